//! Logical times, time domains, and the frontier algebra.
//!
//! A logical time lives in one of three domain kinds: per-edge sequence
//! numbers, scalar epochs, or structured tuples (an epoch plus loop
//! counters). Frontiers are downward-closed sets of times, represented as
//! antichains of maximal elements whose coordinates may individually be a
//! wildcard (`*`, matching every value of that coordinate), plus the
//! distinguished values `TOP` (all times) and `EMPTY` (no times).

use std::cmp::Ordering as CmpOrdering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Identifier of a dataflow edge; sequence-number times are scoped to one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub String);

impl EdgeId {
    pub fn new(s: impl Into<String>) -> Self {
        EdgeId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How tuples in a structured domain compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingMode {
    /// Coordinate-wise comparison; incomparable tuples exist.
    Product,
    /// Total order by leftmost differing coordinate.
    Lexicographic,
}

/// A family of logical times with a fixed partial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TimeDomain {
    /// Times are `(edge, seq)` pairs; only same-edge times compare.
    SequenceNumbers { edges: BTreeSet<EdgeId> },
    /// Scalar epoch numbers, totally ordered.
    Epochs,
    /// An epoch plus `loop_depth` loop counters.
    Structured { loop_depth: usize, mode: OrderingMode },
}

impl TimeDomain {
    pub fn seq<I: IntoIterator<Item = EdgeId>>(edges: I) -> Arc<Self> {
        Arc::new(TimeDomain::SequenceNumbers { edges: edges.into_iter().collect() })
    }
    pub fn epochs() -> Arc<Self> {
        Arc::new(TimeDomain::Epochs)
    }
    pub fn structured(loop_depth: usize, mode: OrderingMode) -> Arc<Self> {
        Arc::new(TimeDomain::Structured { loop_depth, mode })
    }

    pub fn is_totally_ordered(&self) -> bool {
        match self {
            TimeDomain::SequenceNumbers { edges } => edges.len() <= 1,
            TimeDomain::Epochs => true,
            TimeDomain::Structured { mode, .. } => *mode == OrderingMode::Lexicographic,
        }
    }

    /// Number of coordinates a structured tuple carries (epoch included).
    pub fn tuple_width(&self) -> Option<usize> {
        match self {
            TimeDomain::Structured { loop_depth, .. } => Some(1 + loop_depth),
            _ => None,
        }
    }
}

/// Outcome of comparing two logical times under their domain's order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeOrder {
    LessOrEqual,
    Greater,
    Incomparable,
}

/// The value part of a logical time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeValue {
    /// Sequence number `seq >= 1` on `edge`.
    Seq { edge: EdgeId, seq: u64 },
    Epoch(u64),
    /// Epoch plus loop counters, innermost counter last.
    Tuple { epoch: u64, counters: Vec<u64> },
}

/// A logical time bound to its domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalTime {
    pub domain: Arc<TimeDomain>,
    pub value: TimeValue,
}

impl LogicalTime {
    pub fn seq(domain: &Arc<TimeDomain>, edge: EdgeId, seq: u64) -> Result<Self> {
        let t = LogicalTime { domain: domain.clone(), value: TimeValue::Seq { edge, seq } };
        t.validate()?;
        Ok(t)
    }

    pub fn epoch(domain: &Arc<TimeDomain>, epoch: u64) -> Result<Self> {
        let t = LogicalTime { domain: domain.clone(), value: TimeValue::Epoch(epoch) };
        t.validate()?;
        Ok(t)
    }

    pub fn tuple(domain: &Arc<TimeDomain>, epoch: u64, counters: Vec<u64>) -> Result<Self> {
        let t = LogicalTime { domain: domain.clone(), value: TimeValue::Tuple { epoch, counters } };
        t.validate()?;
        Ok(t)
    }

    /// Checks the value matches the domain shape.
    pub fn validate(&self) -> Result<()> {
        match (&*self.domain, &self.value) {
            (TimeDomain::SequenceNumbers { edges }, TimeValue::Seq { edge, seq }) => {
                if !edges.contains(edge) {
                    return Err(Error::DomainMismatch(format!(
                        "edge {edge} not in sequence-number domain"
                    )));
                }
                if *seq == 0 {
                    return Err(Error::DomainMismatch("sequence numbers start at 1".into()));
                }
                Ok(())
            }
            (TimeDomain::Epochs, TimeValue::Epoch(_)) => Ok(()),
            (TimeDomain::Structured { loop_depth, .. }, TimeValue::Tuple { counters, .. }) => {
                if counters.len() != *loop_depth {
                    return Err(Error::DomainMismatch(format!(
                        "tuple has {} counters, domain expects {}",
                        counters.len(),
                        loop_depth
                    )));
                }
                Ok(())
            }
            _ => Err(Error::DomainMismatch("time value does not fit its domain".into())),
        }
    }

    /// All coordinates, epoch first, for tuple-shaped values.
    fn coords(&self) -> Vec<u64> {
        match &self.value {
            TimeValue::Seq { seq, .. } => vec![*seq],
            TimeValue::Epoch(e) => vec![*e],
            TimeValue::Tuple { epoch, counters } => {
                let mut v = Vec::with_capacity(1 + counters.len());
                v.push(*epoch);
                v.extend_from_slice(counters);
                v
            }
        }
    }
}

impl fmt::Display for LogicalTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            TimeValue::Seq { edge, seq } => write!(f, "seq:{edge}:{seq}"),
            TimeValue::Epoch(e) => write!(f, "epoch:{e}"),
            TimeValue::Tuple { epoch, counters } => {
                write!(f, "tuple:{epoch}")?;
                for c in counters {
                    write!(f, ".{c}")?;
                }
                Ok(())
            }
        }
    }
}

fn require_same_domain(a: &Arc<TimeDomain>, b: &Arc<TimeDomain>, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DomainMismatch(format!("{what}: {a:?} vs {b:?}")))
    }
}

/// Compares two times in the same domain.
pub fn leq(t1: &LogicalTime, t2: &LogicalTime) -> Result<TimeOrder> {
    require_same_domain(&t1.domain, &t2.domain, "leq")?;
    t1.validate()?;
    t2.validate()?;
    let ord = match (&*t1.domain, &t1.value, &t2.value) {
        (_, TimeValue::Seq { edge: e1, seq: s1 }, TimeValue::Seq { edge: e2, seq: s2 }) => {
            if e1 != e2 {
                TimeOrder::Incomparable
            } else if s1 <= s2 {
                TimeOrder::LessOrEqual
            } else {
                TimeOrder::Greater
            }
        }
        (_, TimeValue::Epoch(a), TimeValue::Epoch(b)) => {
            if a <= b {
                TimeOrder::LessOrEqual
            } else {
                TimeOrder::Greater
            }
        }
        (TimeDomain::Structured { mode, .. }, _, _) => {
            let a = t1.coords();
            let b = t2.coords();
            match mode {
                OrderingMode::Product => {
                    let le = a.iter().zip(&b).all(|(x, y)| x <= y);
                    let ge = a.iter().zip(&b).all(|(x, y)| x >= y);
                    match (le, ge) {
                        (true, _) => TimeOrder::LessOrEqual,
                        (false, true) => TimeOrder::Greater,
                        (false, false) => TimeOrder::Incomparable,
                    }
                }
                OrderingMode::Lexicographic => match a.cmp(&b) {
                    CmpOrdering::Less | CmpOrdering::Equal => TimeOrder::LessOrEqual,
                    CmpOrdering::Greater => TimeOrder::Greater,
                },
            }
        }
        _ => unreachable!("validated values match the domain"),
    };
    Ok(ord)
}

/// True iff `t1 <= t2`.
pub fn time_le(t1: &LogicalTime, t2: &LogicalTime) -> Result<bool> {
    Ok(leq(t1, t2)? == TimeOrder::LessOrEqual)
}

/// One coordinate of a frontier element: a value or the wildcard.
pub type Coord = Option<u64>;

/// A maximal element of a frontier's antichain. Wildcard coordinates mean
/// "every value of this coordinate".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrontierElement {
    Seq { edge: EdgeId, seq: Coord },
    Epoch(Coord),
    Tuple { epoch: Coord, counters: Vec<Coord> },
}

impl FrontierElement {
    pub fn from_time(t: &LogicalTime) -> Self {
        match &t.value {
            TimeValue::Seq { edge, seq } => {
                FrontierElement::Seq { edge: edge.clone(), seq: Some(*seq) }
            }
            TimeValue::Epoch(e) => FrontierElement::Epoch(Some(*e)),
            TimeValue::Tuple { epoch, counters } => FrontierElement::Tuple {
                epoch: Some(*epoch),
                counters: counters.iter().map(|c| Some(*c)).collect(),
            },
        }
    }

    fn coords(&self) -> Vec<Coord> {
        match self {
            FrontierElement::Seq { seq, .. } => vec![*seq],
            FrontierElement::Epoch(e) => vec![*e],
            FrontierElement::Tuple { epoch, counters } => {
                let mut v = Vec::with_capacity(1 + counters.len());
                v.push(*epoch);
                v.extend_from_slice(counters);
                v
            }
        }
    }

    fn all_wild(&self) -> bool {
        self.coords().iter().all(|c| c.is_none())
    }

    fn is_tuple(&self) -> bool {
        matches!(self, FrontierElement::Tuple { .. })
    }
}

impl fmt::Display for FrontierElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn coord(c: &Coord) -> String {
            match c {
                Some(v) => v.to_string(),
                None => "*".to_string(),
            }
        }
        match self {
            FrontierElement::Seq { edge, seq } => write!(f, "seq:{edge}:{}", coord(seq)),
            FrontierElement::Epoch(e) => write!(f, "epoch:{}", coord(e)),
            FrontierElement::Tuple { epoch, counters } => {
                write!(f, "tuple:{}", coord(epoch))?;
                for c in counters {
                    write!(f, ".{}", coord(c))?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum FrontierRepr {
    Empty,
    Top,
    Antichain(Vec<FrontierElement>),
}

/// A downward-closed set of logical times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frontier {
    pub domain: Arc<TimeDomain>,
    repr: FrontierRepr,
}

impl Frontier {
    pub fn empty(domain: &Arc<TimeDomain>) -> Self {
        Frontier { domain: domain.clone(), repr: FrontierRepr::Empty }
    }

    pub fn top(domain: &Arc<TimeDomain>) -> Self {
        Frontier { domain: domain.clone(), repr: FrontierRepr::Top }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.repr, FrontierRepr::Empty)
    }

    pub fn is_top(&self) -> bool {
        matches!(self.repr, FrontierRepr::Top)
    }

    /// Antichain elements; empty for `TOP`/`EMPTY`.
    pub fn elements(&self) -> &[FrontierElement] {
        match &self.repr {
            FrontierRepr::Antichain(v) => v,
            _ => &[],
        }
    }

    /// Builds a frontier from raw elements, canonicalizing.
    pub fn from_elements(
        domain: &Arc<TimeDomain>,
        elements: Vec<FrontierElement>,
    ) -> Result<Self> {
        for e in &elements {
            validate_element(domain, e)?;
        }
        Ok(canonicalize(domain, elements))
    }

    /// The smallest frontier containing every given time (`↓T`).
    pub fn downward_close(domain: &Arc<TimeDomain>, times: &[LogicalTime]) -> Result<Self> {
        let mut elems = Vec::with_capacity(times.len());
        for t in times {
            require_same_domain(domain, &t.domain, "downward_close")?;
            t.validate()?;
            elems.push(FrontierElement::from_time(t));
        }
        Ok(canonicalize(domain, elems))
    }

    /// Convenience: `↓{t}`.
    pub fn of_time(t: &LogicalTime) -> Self {
        canonicalize(&t.domain, vec![FrontierElement::from_time(t)])
    }

    /// True iff `t` lies in the denoted set.
    pub fn contains(&self, t: &LogicalTime) -> Result<bool> {
        require_same_domain(&self.domain, &t.domain, "frontier_contains")?;
        t.validate()?;
        Ok(match &self.repr {
            FrontierRepr::Top => true,
            FrontierRepr::Empty => false,
            FrontierRepr::Antichain(v) => {
                v.iter().any(|e| element_contains_time(&self.domain, e, t))
            }
        })
    }

    /// Set inclusion of the denoted downward-closed sets.
    pub fn subset(&self, other: &Frontier) -> Result<bool> {
        require_same_domain(&self.domain, &other.domain, "frontier_subset")?;
        Ok(match (&self.repr, &other.repr) {
            (FrontierRepr::Empty, _) => true,
            (_, FrontierRepr::Top) => true,
            (FrontierRepr::Top, FrontierRepr::Empty | FrontierRepr::Antichain(_)) => false,
            (FrontierRepr::Antichain(_), FrontierRepr::Empty) => false,
            (FrontierRepr::Antichain(a), FrontierRepr::Antichain(b)) => a
                .iter()
                .all(|ea| b.iter().any(|eb| element_leq(&self.domain, ea, eb))),
        })
    }

    /// Union of the denoted sets.
    pub fn union(&self, other: &Frontier) -> Result<Frontier> {
        require_same_domain(&self.domain, &other.domain, "frontier_union")?;
        Ok(match (&self.repr, &other.repr) {
            (FrontierRepr::Top, _) | (_, FrontierRepr::Top) => Frontier::top(&self.domain),
            (FrontierRepr::Empty, _) => other.clone(),
            (_, FrontierRepr::Empty) => self.clone(),
            (FrontierRepr::Antichain(a), FrontierRepr::Antichain(b)) => {
                let mut elems = a.clone();
                elems.extend(b.iter().cloned());
                canonicalize(&self.domain, elems)
            }
        })
    }

    /// Intersection of the denoted sets.
    pub fn intersect(&self, other: &Frontier) -> Result<Frontier> {
        require_same_domain(&self.domain, &other.domain, "frontier_intersect")?;
        Ok(match (&self.repr, &other.repr) {
            (FrontierRepr::Top, _) => other.clone(),
            (_, FrontierRepr::Top) => self.clone(),
            (FrontierRepr::Empty, _) | (_, FrontierRepr::Empty) => Frontier::empty(&self.domain),
            (FrontierRepr::Antichain(a), FrontierRepr::Antichain(b)) => {
                let mut meets = Vec::new();
                for ea in a {
                    for eb in b {
                        if let Some(m) = element_meet(&self.domain, ea, eb) {
                            meets.push(m);
                        }
                    }
                }
                canonicalize(&self.domain, meets)
            }
        })
    }

    /// Union with `↓{t}`.
    pub fn insert(&self, t: &LogicalTime) -> Result<Frontier> {
        self.union(&Frontier::of_time(t))
    }
}

impl fmt::Display for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            FrontierRepr::Empty => write!(f, "EMPTY"),
            FrontierRepr::Top => write!(f, "TOP"),
            FrontierRepr::Antichain(v) => {
                write!(f, "{{")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

fn validate_element(domain: &Arc<TimeDomain>, e: &FrontierElement) -> Result<()> {
    match (&**domain, e) {
        (TimeDomain::SequenceNumbers { edges }, FrontierElement::Seq { edge, seq }) => {
            if !edges.contains(edge) {
                return Err(Error::DomainMismatch(format!("edge {edge} not in domain")));
            }
            if *seq == Some(0) {
                return Err(Error::DomainMismatch("sequence numbers start at 1".into()));
            }
            Ok(())
        }
        (TimeDomain::Epochs, FrontierElement::Epoch(_)) => Ok(()),
        (TimeDomain::Structured { loop_depth, .. }, FrontierElement::Tuple { counters, .. }) => {
            if counters.len() != *loop_depth {
                return Err(Error::DomainMismatch(format!(
                    "element has {} counters, domain expects {}",
                    counters.len(),
                    loop_depth
                )));
            }
            Ok(())
        }
        _ => Err(Error::DomainMismatch("frontier element does not fit its domain".into())),
    }
}

/// Is concrete time `t` within `↓e`?
fn element_contains_time(domain: &TimeDomain, e: &FrontierElement, t: &LogicalTime) -> bool {
    match (e, &t.value) {
        (FrontierElement::Seq { edge: fe, seq: fs }, TimeValue::Seq { edge, seq }) => {
            fe == edge && fs.is_none_or(|bound| *seq <= bound)
        }
        (FrontierElement::Epoch(fe), TimeValue::Epoch(e2)) => fe.is_none_or(|bound| *e2 <= bound),
        (FrontierElement::Tuple { .. }, TimeValue::Tuple { .. }) => {
            let ec = e.coords();
            let tc = t.coords();
            match domain {
                TimeDomain::Structured { mode: OrderingMode::Product, .. } => ec
                    .iter()
                    .zip(&tc)
                    .all(|(bound, v)| bound.is_none_or(|b| *v <= b)),
                TimeDomain::Structured { mode: OrderingMode::Lexicographic, .. } => {
                    for (bound, v) in ec.iter().zip(&tc) {
                        match bound {
                            None => return true,
                            Some(b) if v < b => return true,
                            Some(b) if v > b => return false,
                            _ => {}
                        }
                    }
                    true
                }
                _ => unreachable!(),
            }
        }
        _ => false,
    }
}

/// Is `↓a ⊆ ↓b` for two canonical elements?
fn element_leq(domain: &TimeDomain, a: &FrontierElement, b: &FrontierElement) -> bool {
    match (a, b) {
        (FrontierElement::Seq { edge: ea, seq: sa }, FrontierElement::Seq { edge: eb, seq: sb }) => {
            ea == eb
                && match (sa, sb) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(x), Some(y)) => x <= y,
                }
        }
        (FrontierElement::Epoch(a), FrontierElement::Epoch(b)) => match (a, b) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x <= y,
        },
        (FrontierElement::Tuple { .. }, FrontierElement::Tuple { .. }) => {
            let ac = a.coords();
            let bc = b.coords();
            match domain {
                TimeDomain::Structured { mode: OrderingMode::Product, .. } => {
                    ac.iter().zip(&bc).all(|(x, y)| match (x, y) {
                        (_, None) => true,
                        (None, Some(_)) => false,
                        (Some(x), Some(y)) => x <= y,
                    })
                }
                TimeDomain::Structured { mode: OrderingMode::Lexicographic, .. } => {
                    for (x, y) in ac.iter().zip(&bc) {
                        match (x, y) {
                            (_, None) => return true,
                            (None, Some(_)) => return false,
                            (Some(x), Some(y)) if x < y => return true,
                            (Some(x), Some(y)) if x > y => return false,
                            _ => {}
                        }
                    }
                    true
                }
                _ => unreachable!(),
            }
        }
        _ => false,
    }
}

/// Greatest lower bound of `↓a ∩ ↓b` as a single element, if non-empty.
fn element_meet(
    domain: &TimeDomain,
    a: &FrontierElement,
    b: &FrontierElement,
) -> Option<FrontierElement> {
    fn meet_coord(x: Coord, y: Coord) -> Coord {
        match (x, y) {
            (None, c) | (c, None) => c,
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }
    match (a, b) {
        (FrontierElement::Seq { edge: ea, seq: sa }, FrontierElement::Seq { edge: eb, seq: sb }) => {
            if ea != eb {
                None
            } else {
                Some(FrontierElement::Seq { edge: ea.clone(), seq: meet_coord(*sa, *sb) })
            }
        }
        (FrontierElement::Epoch(x), FrontierElement::Epoch(y)) => {
            Some(FrontierElement::Epoch(meet_coord(*x, *y)))
        }
        (FrontierElement::Tuple { .. }, FrontierElement::Tuple { .. }) => {
            match domain {
                TimeDomain::Structured { mode: OrderingMode::Product, .. } => {
                    let coords: Vec<Coord> = a
                        .coords()
                        .iter()
                        .zip(&b.coords())
                        .map(|(x, y)| meet_coord(*x, *y))
                        .collect();
                    Some(tuple_from_coords(&coords))
                }
                // Lexicographic elements form a chain, so the meet is the
                // smaller of the two.
                TimeDomain::Structured { mode: OrderingMode::Lexicographic, .. } => {
                    if element_leq(domain, a, b) {
                        Some(a.clone())
                    } else {
                        Some(b.clone())
                    }
                }
                _ => unreachable!(),
            }
        }
        _ => None,
    }
}

fn tuple_from_coords(coords: &[Coord]) -> FrontierElement {
    FrontierElement::Tuple { epoch: coords[0], counters: coords[1..].to_vec() }
}

/// Drops dominated elements, normalizes wildcards, and sorts. An element
/// whose coordinates are all wildcards denotes every time, so the result
/// collapses to `TOP`.
fn canonicalize(domain: &Arc<TimeDomain>, mut elems: Vec<FrontierElement>) -> Frontier {
    // In lexicographic mode everything after the first wildcard coordinate is
    // unconstrained.
    if let TimeDomain::Structured { mode: OrderingMode::Lexicographic, .. } = &**domain {
        for e in &mut elems {
            if e.is_tuple() {
                let mut coords = e.coords();
                if let Some(first) = coords.iter().position(|c| c.is_none()) {
                    for c in coords.iter_mut().skip(first) {
                        *c = None;
                    }
                    *e = tuple_from_coords(&coords);
                }
            }
        }
    }
    match &**domain {
        // A wildcard sequence element still pins its edge; the frontier is
        // TOP only when every edge of the domain is wildcard-covered.
        TimeDomain::SequenceNumbers { edges } => {
            let covered = !edges.is_empty()
                && edges.iter().all(|de| {
                    elems.iter().any(
                        |el| matches!(el, FrontierElement::Seq { edge, seq: None } if edge == de),
                    )
                });
            if covered {
                return Frontier::top(domain);
            }
        }
        _ => {
            if elems.iter().any(|e| e.all_wild()) {
                return Frontier::top(domain);
            }
        }
    }
    let mut keep: Vec<FrontierElement> = Vec::new();
    'outer: for e in elems {
        let mut i = 0;
        while i < keep.len() {
            if element_leq(domain, &e, &keep[i]) {
                continue 'outer;
            }
            if element_leq(domain, &keep[i], &e) {
                keep.remove(i);
            } else {
                i += 1;
            }
        }
        keep.push(e);
    }
    if keep.is_empty() {
        return Frontier::empty(domain);
    }
    keep.sort();
    keep.dedup();
    Frontier { domain: domain.clone(), repr: FrontierRepr::Antichain(keep) }
}

// ---------------------------------------------------------------------------
// Text encoding: `seq:<edge>:<n>`, `epoch:<n>`, `tuple:<e>.<c1>...<ck>`,
// `*` for wildcards; frontiers as `{elem,elem}`, `TOP`, `EMPTY`.
// ---------------------------------------------------------------------------

pub fn parse_time(domain: &Arc<TimeDomain>, s: &str) -> Result<LogicalTime> {
    let s = s.trim();
    let value = if let Some(rest) = s.strip_prefix("seq:") {
        let (edge, seq) = rest
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("bad seq time {s:?}")))?;
        TimeValue::Seq {
            edge: EdgeId::new(edge),
            seq: seq.parse().map_err(|_| Error::Parse(format!("bad sequence number {seq:?}")))?,
        }
    } else if let Some(rest) = s.strip_prefix("epoch:") {
        TimeValue::Epoch(
            rest.parse().map_err(|_| Error::Parse(format!("bad epoch {rest:?}")))?,
        )
    } else if let Some(rest) = s.strip_prefix("tuple:") {
        let mut parts = rest.split('.');
        let epoch: u64 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad tuple {s:?}")))?;
        let counters = parts
            .map(|p| p.parse().map_err(|_| Error::Parse(format!("bad counter {p:?}"))))
            .collect::<Result<Vec<u64>>>()?;
        TimeValue::Tuple { epoch, counters }
    } else {
        return Err(Error::Parse(format!("unknown time encoding {s:?}")));
    };
    let t = LogicalTime { domain: domain.clone(), value };
    t.validate()?;
    Ok(t)
}

fn parse_coord(s: &str) -> Result<Coord> {
    if s == "*" {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| Error::Parse(format!("bad coordinate {s:?}")))
    }
}

pub fn parse_element(domain: &Arc<TimeDomain>, s: &str) -> Result<FrontierElement> {
    let s = s.trim();
    let elem = if let Some(rest) = s.strip_prefix("seq:") {
        let (edge, seq) = rest
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("bad seq element {s:?}")))?;
        FrontierElement::Seq { edge: EdgeId::new(edge), seq: parse_coord(seq)? }
    } else if let Some(rest) = s.strip_prefix("epoch:") {
        FrontierElement::Epoch(parse_coord(rest)?)
    } else if let Some(rest) = s.strip_prefix("tuple:") {
        let mut parts = rest.split('.');
        let epoch = parts
            .next()
            .map(parse_coord)
            .transpose()?
            .ok_or_else(|| Error::Parse(format!("bad tuple element {s:?}")))?;
        let counters = parts.map(parse_coord).collect::<Result<Vec<Coord>>>()?;
        FrontierElement::Tuple { epoch, counters }
    } else {
        return Err(Error::Parse(format!("unknown element encoding {s:?}")));
    };
    validate_element(domain, &elem)?;
    Ok(elem)
}

pub fn parse_frontier(domain: &Arc<TimeDomain>, s: &str) -> Result<Frontier> {
    let s = s.trim();
    match s {
        "TOP" => Ok(Frontier::top(domain)),
        "EMPTY" => Ok(Frontier::empty(domain)),
        _ => {
            let inner = s
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("frontier must be {{..}}, TOP or EMPTY: {s:?}")))?;
            let mut elems = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                elems.push(parse_element(domain, part)?);
            }
            if elems.is_empty() {
                return Ok(Frontier::empty(domain));
            }
            Ok(canonicalize(domain, elems))
        }
    }
}
