//! The dataflow graph: processor declarations, edges, and the per-edge
//! projection functions that bridge time domains.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::time::{
    EdgeId, Frontier, FrontierElement, LogicalTime, TimeDomain, TimeValue,
};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcId(pub String);

impl ProcId {
    pub fn new(s: impl Into<String>) -> Self {
        ProcId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How a processor touches the world outside the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExternalRole {
    None,
    Ingress,
    Egress,
}

/// Built-in processor behaviors. The library is closed so scenarios are pure
/// data and replays stay deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BehaviorKind {
    /// Maps each payload through a named pure function, forwarding at the
    /// same time.
    Select { map: String },
    /// Accumulates a per-time sum; on notification emits it and drops the
    /// per-time state.
    Sum,
    /// Records every message, partitioned by time. Emits nothing.
    Buffer,
    StatelessRelay,
    /// Holds epoch `t+1` messages until epoch `t` completes, then releases
    /// them in arrival order.
    EpochBarrier,
    /// Entry relay for a loop domain.
    LoopIngress,
    /// Increments the innermost loop counter of each received message and
    /// forwards it, dropping messages whose counter would exceed
    /// `max_counter`.
    LoopEgressIncrement { max_counter: u64 },
    /// Folds payload values per time through a named reducer.
    KeyedStateful { reducer: String },
    /// Feeds scenario input batches into the graph.
    IngressSource,
    /// Delivers messages to an external consumer with ack/retry.
    EgressSink,
}

impl BehaviorKind {
    /// Keeps no state between logical times (it may accumulate within one).
    pub fn is_stateless(&self) -> bool {
        match self {
            BehaviorKind::Select { .. }
            | BehaviorKind::StatelessRelay
            | BehaviorKind::LoopIngress
            | BehaviorKind::LoopEgressIncrement { .. }
            | BehaviorKind::IngressSource
            | BehaviorKind::EgressSink => true,
            BehaviorKind::Sum
            | BehaviorKind::Buffer
            | BehaviorKind::EpochBarrier
            | BehaviorKind::KeyedStateful { .. } => false,
        }
    }

    /// Asks the runtime for a notification once a delivered time completes.
    pub fn wants_notifications(&self) -> bool {
        matches!(self, BehaviorKind::Sum | BehaviorKind::EpochBarrier)
    }

    /// May send at times strictly above the causing event's time.
    pub fn sends_into_future(&self) -> bool {
        matches!(self, BehaviorKind::LoopEgressIncrement { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BehaviorKind::Select { .. } => "select",
            BehaviorKind::Sum => "sum",
            BehaviorKind::Buffer => "buffer",
            BehaviorKind::StatelessRelay => "stateless-relay",
            BehaviorKind::EpochBarrier => "epoch-barrier",
            BehaviorKind::LoopIngress => "loop-ingress",
            BehaviorKind::LoopEgressIncrement { .. } => "loop-egress-increment",
            BehaviorKind::KeyedStateful { .. } => "keyed-stateful",
            BehaviorKind::IngressSource => "ingress-source",
            BehaviorKind::EgressSink => "egress-sink",
        }
    }
}

/// When a processor persists checkpoints, logs, or nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyKind {
    /// Persists nothing.
    Ephemeral,
    /// Persists a record after every delivered event, before acking.
    EagerPerEvent,
    /// Persists at every `period`-th completed frontier.
    LazyOnCompletion { period: u64 },
    /// Logs every delivered event; state is reconstructed by replay.
    LogAllHistory,
    /// Logs sent messages only (the RDD-style firewall).
    LogSentMessages,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointPolicy {
    pub kind: PolicyKind,
    /// Log sent messages in addition to whatever the kind persists.
    pub log_outputs: bool,
}

impl CheckpointPolicy {
    pub fn logs_outputs(&self) -> bool {
        self.log_outputs || self.kind == PolicyKind::LogSentMessages
    }
}

/// Whether frontier estimates are tracked exactly or by the safe
/// overestimate `M̄ = N̄ = f`, `D̄ = φ(f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    Exact,
    Approximate,
}

#[derive(Debug, Clone)]
pub struct ProcessorDecl {
    pub id: ProcId,
    pub domain: Arc<TimeDomain>,
    pub behavior: BehaviorKind,
    pub policy: CheckpointPolicy,
    pub external_role: ExternalRole,
    pub estimates: EstimateMode,
    pub deterministic: bool,
}

/// Per-edge projection bridging the source and destination time domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionKind {
    Identity,
    /// Destination counts messages; the projection is the recorded
    /// sent-count at the checkpoint.
    SentCount,
    /// Epoch (or tuple) domain into a domain with one more counter.
    LoopIngress,
    /// Drops the innermost counter.
    LoopEgress,
    /// Buffered epoch-to-sequence transformer; uses recorded per-epoch
    /// message counts.
    EpochToSeq,
    /// Sequence numbers grouped into count-based epoch windows.
    SeqToEpoch { window: u64 },
}

impl ProjectionKind {
    /// History-dependent projections are read from checkpoint metadata.
    pub fn needs_context(&self) -> bool {
        matches!(
            self,
            ProjectionKind::SentCount | ProjectionKind::EpochToSeq | ProjectionKind::SeqToEpoch { .. }
        )
    }
}

/// Recorded data backing a history-dependent projection at one checkpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionContext {
    SentCount { sent: u64 },
    PerEpochCounts { counts: BTreeMap<u64, u64> },
    SeqSent { sent: u64 },
}

#[derive(Debug, Clone)]
pub struct EdgeDecl {
    pub id: EdgeId,
    pub src: ProcId,
    pub dst: ProcId,
    pub projection: ProjectionKind,
}

#[derive(Debug, Clone, Default)]
pub struct GraphSpec {
    pub processors: Vec<ProcessorDecl>,
    pub edges: Vec<EdgeDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

impl GraphSpec {
    pub fn processor(&self, id: &ProcId) -> Option<&ProcessorDecl> {
        self.processors.iter().find(|p| &p.id == id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&EdgeDecl> {
        self.edges.iter().find(|e| &e.id == id)
    }

    pub fn in_edges(&self, id: &ProcId) -> Vec<&EdgeDecl> {
        self.edges.iter().filter(|e| &e.dst == id).collect()
    }

    pub fn out_edges(&self, id: &ProcId) -> Vec<&EdgeDecl> {
        self.edges.iter().filter(|e| &e.src == id).collect()
    }
}

/// Checks the whole graph and returns every violation found.
pub fn validate_graph(g: &GraphSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut violation = |subject: &str, message: String| {
        out.push(Violation { subject: subject.to_string(), message });
    };

    let mut proc_ids = BTreeSet::new();
    for p in &g.processors {
        if !proc_ids.insert(p.id.clone()) {
            violation(p.id.as_str(), "duplicate processor id".into());
        }
    }
    let mut edge_ids = BTreeSet::new();
    for e in &g.edges {
        if !edge_ids.insert(e.id.clone()) {
            violation(e.id.as_str(), "duplicate edge id".into());
        }
        if g.processor(&e.src).is_none() {
            violation(e.id.as_str(), format!("unknown source processor {}", e.src));
        }
        if g.processor(&e.dst).is_none() {
            violation(e.id.as_str(), format!("unknown destination processor {}", e.dst));
        }
    }

    for p in &g.processors {
        let ins = g.in_edges(&p.id);
        let outs = g.out_edges(&p.id);
        match p.external_role {
            ExternalRole::Ingress => {
                if !ins.is_empty() {
                    violation(p.id.as_str(), "ingress processors take no graph input edges".into());
                }
                if !matches!(p.behavior, BehaviorKind::IngressSource) {
                    violation(p.id.as_str(), "ingress role requires the ingress-source behavior".into());
                }
            }
            ExternalRole::Egress => {
                if !outs.is_empty() {
                    violation(p.id.as_str(), "egress processors take no graph output edges".into());
                }
                if !matches!(p.behavior, BehaviorKind::EgressSink) {
                    violation(p.id.as_str(), "egress role requires the egress-sink behavior".into());
                }
            }
            ExternalRole::None => {
                if matches!(p.behavior, BehaviorKind::IngressSource) {
                    violation(p.id.as_str(), "ingress-source behavior requires the ingress role".into());
                }
                if matches!(p.behavior, BehaviorKind::EgressSink) {
                    violation(p.id.as_str(), "egress-sink behavior requires the egress role".into());
                }
            }
        }

        if let TimeDomain::SequenceNumbers { edges } = &*p.domain {
            let in_ids: BTreeSet<EdgeId> = ins.iter().map(|e| e.id.clone()).collect();
            if *edges != in_ids {
                violation(
                    p.id.as_str(),
                    format!(
                        "sequence-number domain edges {:?} must equal the input edge ids {:?}",
                        edges, in_ids
                    ),
                );
            }
        }

        if p.policy.kind == PolicyKind::EagerPerEvent
            && !matches!(&*p.domain, TimeDomain::SequenceNumbers { .. })
        {
            violation(
                p.id.as_str(),
                "eager-per-event checkpoints require a sequence-number domain, where every \
                 delivered event immediately completes its time"
                    .into(),
            );
        }

        if p.behavior.sends_into_future() && !p.policy.logs_outputs() && !outs.is_empty() {
            violation(
                p.id.as_str(),
                "behaviors that send into the future must log sent messages; the discarded-message \
                 frontier cannot be approximated by the edge projection"
                    .into(),
            );
        }

        match &p.behavior {
            BehaviorKind::LoopEgressIncrement { .. } => {
                if !matches!(&*p.domain, TimeDomain::Structured { loop_depth, .. } if *loop_depth >= 1)
                {
                    violation(
                        p.id.as_str(),
                        "loop-egress-increment requires a structured domain with a loop counter".into(),
                    );
                }
            }
            BehaviorKind::EpochBarrier => {
                if !matches!(&*p.domain, TimeDomain::Epochs) {
                    violation(p.id.as_str(), "epoch-barrier requires the epochs domain".into());
                }
            }
            _ => {}
        }
    }

    for e in &g.edges {
        let (Some(src), Some(dst)) = (g.processor(&e.src), g.processor(&e.dst)) else {
            continue;
        };
        let sd = &src.domain;
        let dd = &dst.domain;
        let ok = match &e.projection {
            ProjectionKind::Identity => sd == dd,
            ProjectionKind::SentCount => match &**dd {
                TimeDomain::SequenceNumbers { edges } => edges.contains(&e.id),
                _ => false,
            },
            ProjectionKind::LoopIngress => match (&**sd, &**dd) {
                (TimeDomain::Epochs, TimeDomain::Structured { loop_depth: 1, .. }) => true,
                (
                    TimeDomain::Structured { loop_depth: a, .. },
                    TimeDomain::Structured { loop_depth: b, .. },
                ) => *b == a + 1,
                _ => false,
            },
            ProjectionKind::LoopEgress => match (&**sd, &**dd) {
                (TimeDomain::Structured { loop_depth: 1, .. }, TimeDomain::Epochs) => true,
                (
                    TimeDomain::Structured { loop_depth: a, .. },
                    TimeDomain::Structured { loop_depth: b, .. },
                ) => *a == b + 1,
                _ => false,
            },
            ProjectionKind::EpochToSeq => {
                matches!(&**sd, TimeDomain::Epochs)
                    && matches!(&**dd, TimeDomain::SequenceNumbers { edges } if edges.contains(&e.id))
            }
            ProjectionKind::SeqToEpoch { window } => {
                *window >= 1
                    && matches!(&**sd, TimeDomain::SequenceNumbers { .. })
                    && matches!(&**dd, TimeDomain::Epochs)
            }
        };
        if !ok {
            violation(
                e.id.as_str(),
                format!(
                    "projection domain mismatch: {:?} does not map {:?} into {:?}",
                    e.projection, sd, dd
                ),
            );
        }
    }

    out
}

/// Maps a frontier in the edge's source domain into its destination domain.
///
/// History-dependent kinds require the recorded context for the checkpoint
/// being projected; static kinds compute directly.
pub fn apply_projection(
    edge: &EdgeDecl,
    src_domain: &Arc<TimeDomain>,
    dst_domain: &Arc<TimeDomain>,
    f: &Frontier,
    context: Option<&ProjectionContext>,
) -> Result<Frontier> {
    if f.domain != *src_domain {
        return Err(Error::DomainMismatch(format!(
            "frontier {f} is not in the source domain of edge {}",
            edge.id
        )));
    }
    match &edge.projection {
        ProjectionKind::Identity => {
            let mut out = f.clone();
            out.domain = dst_domain.clone();
            Ok(out)
        }
        ProjectionKind::LoopIngress => {
            if f.is_top() {
                return Ok(Frontier::top(dst_domain));
            }
            if f.is_empty() {
                return Ok(Frontier::empty(dst_domain));
            }
            let mut elems = Vec::new();
            for e in f.elements() {
                let (epoch, counters) = match e {
                    FrontierElement::Epoch(c) => (*c, vec![]),
                    FrontierElement::Tuple { epoch, counters } => (*epoch, counters.clone()),
                    FrontierElement::Seq { .. } => {
                        return Err(Error::DomainMismatch(
                            "loop-ingress projection over a sequence-number frontier".into(),
                        ))
                    }
                };
                let mut cs = counters;
                cs.push(None);
                elems.push(FrontierElement::Tuple { epoch, counters: cs });
            }
            Frontier::from_elements(dst_domain, elems)
        }
        ProjectionKind::LoopEgress => {
            if f.is_top() {
                return Ok(Frontier::top(dst_domain));
            }
            if f.is_empty() {
                return Ok(Frontier::empty(dst_domain));
            }
            // An outer time is fixed only once the frontier covers every
            // iteration of it, i.e. the element's innermost coordinate is a
            // wildcard. Dropping the coordinate of a bounded element would
            // claim times the loop can still produce.
            let mut elems = Vec::new();
            for e in f.elements() {
                let FrontierElement::Tuple { epoch, counters } = e else {
                    return Err(Error::DomainMismatch(
                        "loop-egress projection over a non-tuple frontier".into(),
                    ));
                };
                let (last, outer) = counters.split_last().expect("loop domain has a counter");
                if last.is_some() {
                    continue;
                }
                if outer.is_empty() {
                    elems.push(FrontierElement::Epoch(*epoch));
                } else {
                    elems.push(FrontierElement::Tuple { epoch: *epoch, counters: outer.to_vec() });
                }
            }
            if elems.is_empty() {
                return Ok(Frontier::empty(dst_domain));
            }
            match &**dst_domain {
                TimeDomain::Epochs => Frontier::from_elements(dst_domain, elems),
                TimeDomain::Structured { .. } => Frontier::from_elements(
                    dst_domain,
                    elems
                        .into_iter()
                        .map(|e| match e {
                            FrontierElement::Epoch(c) => {
                                FrontierElement::Tuple { epoch: c, counters: vec![] }
                            }
                            other => other,
                        })
                        .collect(),
                ),
                _ => Err(Error::DomainMismatch("loop-egress destination must be epochs or tuples".into())),
            }
        }
        ProjectionKind::SentCount => {
            if f.is_empty() {
                return Ok(Frontier::empty(dst_domain));
            }
            let Some(ProjectionContext::SentCount { sent }) = context else {
                return Err(Error::MissingProjectionContext(format!(
                    "sent-count projection on {} needs the recorded sent count",
                    edge.id
                )));
            };
            seq_prefix(dst_domain, &edge.id, *sent)
        }
        ProjectionKind::EpochToSeq => {
            if f.is_empty() {
                return Ok(Frontier::empty(dst_domain));
            }
            let Some(ProjectionContext::PerEpochCounts { counts }) = context else {
                return Err(Error::MissingProjectionContext(format!(
                    "epoch-to-seq projection on {} needs recorded per-epoch counts",
                    edge.id
                )));
            };
            let total: u64 = if f.is_top() {
                counts.values().sum()
            } else {
                counts
                    .iter()
                    .filter(|(epoch, _)| {
                        let t = LogicalTime {
                            domain: src_domain.clone(),
                            value: TimeValue::Epoch(**epoch),
                        };
                        f.contains(&t).unwrap_or(false)
                    })
                    .map(|(_, c)| *c)
                    .sum()
            };
            seq_prefix(dst_domain, &edge.id, total)
        }
        ProjectionKind::SeqToEpoch { window } => {
            if f.is_empty() {
                return Ok(Frontier::empty(dst_domain));
            }
            let Some(ProjectionContext::SeqSent { sent }) = context else {
                return Err(Error::MissingProjectionContext(format!(
                    "seq-to-epoch projection on {} needs the recorded sent count",
                    edge.id
                )));
            };
            // Positions beyond `sent` land in window `sent / window` and
            // later, so only strictly earlier epochs are fixed.
            let fixed = sent / window;
            if fixed == 0 {
                return Ok(Frontier::empty(dst_domain));
            }
            Frontier::from_elements(dst_domain, vec![FrontierElement::Epoch(Some(fixed - 1))])
        }
    }
}

fn seq_prefix(dst_domain: &Arc<TimeDomain>, edge: &EdgeId, sent: u64) -> Result<Frontier> {
    if sent == 0 {
        return Ok(Frontier::empty(dst_domain));
    }
    Frontier::from_elements(
        dst_domain,
        vec![FrontierElement::Seq { edge: edge.clone(), seq: Some(sent) }],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{parse_frontier, OrderingMode};

    fn decl(
        id: &str,
        domain: Arc<TimeDomain>,
        behavior: BehaviorKind,
        role: ExternalRole,
    ) -> ProcessorDecl {
        ProcessorDecl {
            id: ProcId::new(id),
            domain,
            behavior,
            policy: CheckpointPolicy { kind: PolicyKind::Ephemeral, log_outputs: false },
            external_role: role,
            estimates: EstimateMode::Exact,
            deterministic: true,
        }
    }

    fn edge(id: &str, src: &str, dst: &str, projection: ProjectionKind) -> EdgeDecl {
        EdgeDecl {
            id: EdgeId::new(id),
            src: ProcId::new(src),
            dst: ProcId::new(dst),
            projection,
        }
    }

    #[test]
    fn empty_graph_is_ok() {
        assert!(validate_graph(&GraphSpec::default()).is_empty());
    }

    #[test]
    fn loop_graph_validates() {
        let epochs = TimeDomain::epochs();
        let inner = TimeDomain::structured(1, OrderingMode::Lexicographic);
        let g = GraphSpec {
            processors: vec![
                decl("p", epochs.clone(), BehaviorKind::IngressSource, ExternalRole::Ingress),
                decl("r", inner.clone(), BehaviorKind::LoopIngress, ExternalRole::None),
                decl(
                    "y",
                    inner.clone(),
                    BehaviorKind::KeyedStateful { reducer: "countdown".into() },
                    ExternalRole::None,
                ),
                ProcessorDecl {
                    policy: CheckpointPolicy {
                        kind: PolicyKind::LogSentMessages,
                        log_outputs: true,
                    },
                    ..decl(
                        "q",
                        inner.clone(),
                        BehaviorKind::LoopEgressIncrement { max_counter: 8 },
                        ExternalRole::None,
                    )
                },
            ],
            edges: vec![
                edge("e2", "p", "r", ProjectionKind::LoopIngress),
                edge("e3", "r", "y", ProjectionKind::Identity),
                edge("e5", "y", "q", ProjectionKind::Identity),
                edge("e4", "q", "r", ProjectionKind::Identity),
            ],
        };
        let violations = validate_graph(&g);
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn identity_between_mismatched_domains_is_rejected() {
        let epochs = TimeDomain::epochs();
        let seq = TimeDomain::seq([EdgeId::new("e1")]);
        let g = GraphSpec {
            processors: vec![
                decl("a", epochs, BehaviorKind::StatelessRelay, ExternalRole::None),
                decl("b", seq, BehaviorKind::StatelessRelay, ExternalRole::None),
            ],
            edges: vec![edge("e1", "a", "b", ProjectionKind::Identity)],
        };
        let violations = validate_graph(&g);
        assert!(violations.iter().any(|v| v.message.contains("projection domain mismatch")));
    }

    #[test]
    fn future_sender_must_log() {
        let inner = TimeDomain::structured(1, OrderingMode::Lexicographic);
        let g = GraphSpec {
            processors: vec![
                decl(
                    "q",
                    inner.clone(),
                    BehaviorKind::LoopEgressIncrement { max_counter: 4 },
                    ExternalRole::None,
                ),
                decl("r", inner.clone(), BehaviorKind::StatelessRelay, ExternalRole::None),
            ],
            edges: vec![edge("e4", "q", "r", ProjectionKind::Identity)],
        };
        let violations = validate_graph(&g);
        assert!(violations.iter().any(|v| v.message.contains("send into the future")));
    }

    #[test]
    fn identity_projection_is_identity() {
        let d = TimeDomain::epochs();
        let e = edge("e1", "a", "b", ProjectionKind::Identity);
        let f = parse_frontier(&d, "{epoch:2}").unwrap();
        let out = apply_projection(&e, &d, &d, &f, None).unwrap();
        assert_eq!(out.to_string(), "{epoch:2}");
    }

    #[test]
    fn loop_ingress_adds_wildcard_counter() {
        let src = TimeDomain::epochs();
        let dst = TimeDomain::structured(1, OrderingMode::Lexicographic);
        let e = edge("e2", "p", "r", ProjectionKind::LoopIngress);
        let f = parse_frontier(&src, "{epoch:1}").unwrap();
        let out = apply_projection(&e, &src, &dst, &f, None).unwrap();
        assert_eq!(out.to_string(), "{tuple:1.*}");
        assert!(apply_projection(&e, &src, &dst, &Frontier::top(&src), None).unwrap().is_top());
        assert!(apply_projection(&e, &src, &dst, &Frontier::empty(&src), None).unwrap().is_empty());
    }

    #[test]
    fn loop_egress_keeps_only_completed_iterations() {
        let src = TimeDomain::structured(1, OrderingMode::Lexicographic);
        let dst = TimeDomain::epochs();
        let e = edge("e6", "q", "z", ProjectionKind::LoopEgress);
        let complete = parse_frontier(&src, "{tuple:1.*}").unwrap();
        let out = apply_projection(&e, &src, &dst, &complete, None).unwrap();
        assert_eq!(out.to_string(), "{epoch:1}");
        // A bounded iteration count fixes nothing in the outer domain: the
        // loop may still emit messages for those epochs.
        let partial = parse_frontier(&src, "{tuple:2.3}").unwrap();
        let out = apply_projection(&e, &src, &dst, &partial, None).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn loop_egress_inverts_loop_ingress() {
        let outer = TimeDomain::epochs();
        let inner = TimeDomain::structured(1, OrderingMode::Lexicographic);
        let ein = edge("in", "p", "r", ProjectionKind::LoopIngress);
        let eout = edge("out", "q", "z", ProjectionKind::LoopEgress);
        for s in ["EMPTY", "{epoch:0}", "{epoch:5}", "TOP"] {
            let f = parse_frontier(&outer, s).unwrap();
            let inside = apply_projection(&ein, &outer, &inner, &f, None).unwrap();
            let back = apply_projection(&eout, &inner, &outer, &inside, None).unwrap();
            assert_eq!(back.to_string(), f.to_string(), "round trip through {s}");
        }
    }

    #[test]
    fn sent_count_uses_recorded_context() {
        let src = TimeDomain::epochs();
        let dst = TimeDomain::seq([EdgeId::new("e3")]);
        let e = edge("e3", "p", "c", ProjectionKind::SentCount);
        let f = parse_frontier(&src, "{epoch:0}").unwrap();
        let out =
            apply_projection(&e, &src, &dst, &f, Some(&ProjectionContext::SentCount { sent: 3 }))
                .unwrap();
        assert_eq!(out.to_string(), "{seq:e3:3}");
        assert!(matches!(
            apply_projection(&e, &src, &dst, &f, None),
            Err(Error::MissingProjectionContext(_))
        ));
    }

    #[test]
    fn epoch_to_seq_sums_counts_within_frontier() {
        let src = TimeDomain::epochs();
        let dst = TimeDomain::seq([EdgeId::new("e")]);
        let e = edge("e", "p", "z", ProjectionKind::EpochToSeq);
        let counts = BTreeMap::from([(0u64, 0u64), (1u64, 73u64), (2u64, 10u64)]);
        let f = parse_frontier(&src, "{epoch:1}").unwrap();
        let out = apply_projection(
            &e,
            &src,
            &dst,
            &f,
            Some(&ProjectionContext::PerEpochCounts { counts }),
        )
        .unwrap();
        assert_eq!(out.to_string(), "{seq:e:73}");
    }

    #[test]
    fn seq_to_epoch_fixes_only_complete_windows() {
        let src = TimeDomain::seq([EdgeId::new("in")]);
        let dst = TimeDomain::epochs();
        let e = edge("w", "p", "z", ProjectionKind::SeqToEpoch { window: 3 });
        let f = parse_frontier(&src, "{seq:in:7}").unwrap();
        for (sent, expect) in [(2u64, "EMPTY"), (3, "{epoch:0}"), (7, "{epoch:1}"), (9, "{epoch:2}")] {
            let out =
                apply_projection(&e, &src, &dst, &f, Some(&ProjectionContext::SeqSent { sent }))
                    .unwrap();
            assert_eq!(out.to_string(), expect, "sent={sent}");
        }
    }

    #[test]
    fn projections_are_monotone() {
        let src = TimeDomain::epochs();
        let dst = TimeDomain::structured(1, OrderingMode::Lexicographic);
        let e = edge("e2", "p", "r", ProjectionKind::LoopIngress);
        let mut prev = apply_projection(&e, &src, &dst, &Frontier::empty(&src), None).unwrap();
        for epoch in 0..6 {
            let f = parse_frontier(&src, &format!("{{epoch:{epoch}}}")).unwrap();
            let cur = apply_projection(&e, &src, &dst, &f, None).unwrap();
            assert!(prev.subset(&cur).unwrap());
            prev = cur;
        }
    }
}
