//! Processor behaviors and their execution: event delivery under the
//! limited re-ordering rule, history recording, selective history
//! filtering, and deterministic replay.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BehaviorKind, ProcessorDecl};
use crate::time::{time_le, EdgeId, Frontier, LogicalTime, TimeDomain, TimeValue};

/// Message payloads carried through the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Payload {
    Int(i64),
    Str(String),
}

impl Payload {
    pub fn parse(s: &str) -> Result<Payload> {
        if let Some(v) = s.strip_prefix("int:") {
            Ok(Payload::Int(
                v.parse().map_err(|_| Error::Parse(format!("bad int payload {v:?}")))?,
            ))
        } else if let Some(v) = s.strip_prefix("str:") {
            Ok(Payload::Str(v.to_string()))
        } else {
            Err(Error::Parse(format!("payload must be int:<n> or str:<s>: {s:?}")))
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Int(v) => write!(f, "int:{v}"),
            Payload::Str(s) => write!(f, "str:{s}"),
        }
    }
}

/// A delivered event: a message on an input edge or a notification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Message { payload: Payload, time: LogicalTime, edge: EdgeId },
    Notification { time: LogicalTime },
}

impl Event {
    pub fn time(&self) -> &LogicalTime {
        match self {
            Event::Message { time, .. } | Event::Notification { time } => time,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Message { payload, time, edge } => write!(f, "msg {time} {edge} {payload}"),
            Event::Notification { time } => write!(f, "note {time}"),
        }
    }
}

/// The ordered sequence of events a processor has processed.
pub type History = Vec<Event>;

/// One message produced by processing an event. `time` is in the
/// destination's domain once the edge has stamped it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emit {
    pub payload: Payload,
    /// Time relative to the producing processor's domain, before any edge
    /// stamping.
    pub time: LogicalTime,
}

/// The §3.3 dequeue rule: position `i` (1-based) in the FIFO arrival order
/// may be processed iff no earlier message's time is `<=` its time.
pub fn can_dequeue(queue_times: &[LogicalTime], i: usize) -> Result<bool> {
    if i == 0 || i > queue_times.len() {
        return Err(Error::Simulation(format!("dequeue index {i} out of range")));
    }
    let target = &queue_times[i - 1];
    for earlier in &queue_times[..i - 1] {
        if time_le(earlier, target)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Keeps only events with times inside `f`, preserving order.
pub fn filter_history(h: &History, f: &Frontier) -> Result<History> {
    let mut out = Vec::new();
    for ev in h {
        if f.contains(ev.time())? {
            out.push(ev.clone());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Behavior state
// ---------------------------------------------------------------------------

/// Canonical time key used to partition state. Formatting is injective per
/// domain, so byte equality of encoded state is meaningful.
fn time_key(t: &LogicalTime) -> String {
    t.to_string()
}

/// Per-behavior mutable state, partitioned by logical time everywhere so
/// selective rollback stays sound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BehaviorState {
    Stateless,
    /// Per-time running sums still awaiting their notification.
    Sum { pending: BTreeMap<String, i64> },
    /// Per-time message record.
    Buffer { seen: BTreeMap<String, Vec<Payload>> },
    /// Per-epoch buffered messages not yet released.
    Barrier { held: BTreeMap<u64, Vec<Payload>> },
    /// Per-time reducer accumulators.
    Keyed { acc: BTreeMap<String, i64> },
}

impl BehaviorState {
    pub fn initial(kind: &BehaviorKind) -> BehaviorState {
        match kind {
            BehaviorKind::Sum => BehaviorState::Sum { pending: BTreeMap::new() },
            BehaviorKind::Buffer => BehaviorState::Buffer { seen: BTreeMap::new() },
            BehaviorKind::EpochBarrier => BehaviorState::Barrier { held: BTreeMap::new() },
            BehaviorKind::KeyedStateful { .. } => BehaviorState::Keyed { acc: BTreeMap::new() },
            _ => BehaviorState::Stateless,
        }
    }

    /// Canonical byte encoding; state equality is byte equality.
    pub fn encode(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("state serializes")
    }

    /// Restricts per-time partitions to times inside `f`.
    pub fn filtered(&self, domain: &Arc<TimeDomain>, f: &Frontier) -> Result<BehaviorState> {
        let keep = |key: &str| -> Result<bool> {
            let t = crate::time::parse_time(domain, key)?;
            f.contains(&t)
        };
        Ok(match self {
            BehaviorState::Stateless => BehaviorState::Stateless,
            BehaviorState::Sum { pending } => {
                let mut out = BTreeMap::new();
                for (k, v) in pending {
                    if keep(k)? {
                        out.insert(k.clone(), *v);
                    }
                }
                BehaviorState::Sum { pending: out }
            }
            BehaviorState::Buffer { seen } => {
                let mut out = BTreeMap::new();
                for (k, v) in seen {
                    if keep(k)? {
                        out.insert(k.clone(), v.clone());
                    }
                }
                BehaviorState::Buffer { seen: out }
            }
            BehaviorState::Barrier { held } => {
                let mut out = BTreeMap::new();
                for (epoch, v) in held {
                    let t = LogicalTime { domain: domain.clone(), value: TimeValue::Epoch(*epoch) };
                    if f.contains(&t)? {
                        out.insert(*epoch, v.clone());
                    }
                }
                BehaviorState::Barrier { held: out }
            }
            BehaviorState::Keyed { acc } => {
                let mut out = BTreeMap::new();
                for (k, v) in acc {
                    if keep(k)? {
                        out.insert(k.clone(), *v);
                    }
                }
                BehaviorState::Keyed { acc: out }
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Map and reducer registries
// ---------------------------------------------------------------------------

const WORDS: [(&str, i64); 10] = [
    ("one", 1),
    ("two", 2),
    ("three", 3),
    ("four", 4),
    ("five", 5),
    ("six", 6),
    ("seven", 7),
    ("eight", 8),
    ("nine", 9),
    ("ten", 10),
];

/// Applies a registered Select map. Returning `None` drops the message.
pub fn apply_map(map: &str, payload: &Payload) -> Result<Option<Payload>> {
    match map {
        "identity" => Ok(Some(payload.clone())),
        "double" => match payload {
            Payload::Int(v) => Ok(Some(Payload::Int(v * 2))),
            p => Ok(Some(p.clone())),
        },
        "negate" => match payload {
            Payload::Int(v) => Ok(Some(Payload::Int(-v))),
            p => Ok(Some(p.clone())),
        },
        "word-to-int" => match payload {
            Payload::Str(s) => {
                let v = WORDS
                    .iter()
                    .find(|(w, _)| w == s)
                    .map(|(_, v)| *v)
                    .unwrap_or_else(|| s.len() as i64);
                Ok(Some(Payload::Int(v)))
            }
            Payload::Int(v) => Ok(Some(Payload::Int(*v))),
        },
        "drop-all" => Ok(None),
        other => Err(Error::Scenario(format!("unknown select map {other:?}"))),
    }
}

/// Folds one value into a per-time accumulator and decides what to emit.
pub fn apply_reducer(reducer: &str, acc: &mut i64, value: i64) -> Result<Option<i64>> {
    match reducer {
        // Running sum; emits the updated accumulator.
        "sum" => {
            *acc += value;
            Ok(Some(*acc))
        }
        // Remembers the count of deliveries; forwards a decremented budget
        // until it runs out. Drives bounded loop circulation.
        "countdown" => {
            *acc += 1;
            if value > 1 {
                Ok(Some(value - 1))
            } else {
                Ok(None)
            }
        }
        "max" => {
            *acc = (*acc).max(value);
            Ok(Some(*acc))
        }
        other => Err(Error::Scenario(format!("unknown reducer {other:?}"))),
    }
}

fn payload_int(p: &Payload) -> Result<i64> {
    match p {
        Payload::Int(v) => Ok(*v),
        Payload::Str(s) => {
            Err(Error::Simulation(format!("behavior needs an int payload, got str:{s}")))
        }
    }
}

// ---------------------------------------------------------------------------
// Delivery
// ---------------------------------------------------------------------------

/// Applies one event to a behavior. Returns the emitted messages in the
/// processor's own domain; routing and edge stamping happen outside.
///
/// `generation` counts how many times the processor has been reset; a
/// processor flagged non-deterministic mixes it into integer outputs so
/// re-execution visibly diverges.
pub fn deliver(
    decl: &ProcessorDecl,
    state: &mut BehaviorState,
    ev: &Event,
    generation: u64,
) -> Result<Vec<Emit>> {
    if ev.time().domain != decl.domain {
        return Err(Error::DomainMismatch(format!(
            "event time {} outside the domain of {}",
            ev.time(),
            decl.id
        )));
    }
    let skew = if decl.deterministic { 0 } else { generation as i64 * 1_000_000 };
    let emits = match (&decl.behavior, ev) {
        (BehaviorKind::Select { map }, Event::Message { payload, time, .. }) => {
            match apply_map(map, payload)? {
                Some(p) => {
                    let p = match p {
                        Payload::Int(v) => Payload::Int(v + skew),
                        other => other,
                    };
                    vec![Emit { payload: p, time: time.clone() }]
                }
                None => vec![],
            }
        }
        (BehaviorKind::Select { .. }, Event::Notification { .. }) => vec![],

        (BehaviorKind::Sum, Event::Message { payload, time, .. }) => {
            let BehaviorState::Sum { pending } = state else { unreachable!() };
            *pending.entry(time_key(time)).or_insert(0) += payload_int(payload)?;
            vec![]
        }
        (BehaviorKind::Sum, Event::Notification { time }) => {
            let BehaviorState::Sum { pending } = state else { unreachable!() };
            match pending.remove(&time_key(time)) {
                Some(total) => {
                    vec![Emit { payload: Payload::Int(total + skew), time: time.clone() }]
                }
                None => vec![],
            }
        }

        (BehaviorKind::Buffer, Event::Message { payload, time, .. }) => {
            let BehaviorState::Buffer { seen } = state else { unreachable!() };
            seen.entry(time_key(time)).or_default().push(payload.clone());
            vec![]
        }
        (BehaviorKind::Buffer, Event::Notification { .. }) => vec![],

        (
            BehaviorKind::StatelessRelay | BehaviorKind::LoopIngress,
            Event::Message { payload, time, .. },
        ) => vec![Emit { payload: payload.clone(), time: time.clone() }],
        (BehaviorKind::StatelessRelay | BehaviorKind::LoopIngress, Event::Notification { .. }) => {
            vec![]
        }

        (BehaviorKind::EpochBarrier, Event::Message { payload, time, .. }) => {
            let BehaviorState::Barrier { held } = state else { unreachable!() };
            let TimeValue::Epoch(epoch) = &time.value else {
                return Err(Error::DomainMismatch("epoch-barrier needs epoch times".into()));
            };
            held.entry(*epoch).or_default().push(payload.clone());
            vec![]
        }
        (BehaviorKind::EpochBarrier, Event::Notification { time }) => {
            // The notification means the epoch is complete; release its
            // buffered messages in arrival order.
            let BehaviorState::Barrier { held } = state else { unreachable!() };
            let TimeValue::Epoch(epoch) = &time.value else {
                return Err(Error::DomainMismatch("epoch-barrier needs epoch times".into()));
            };
            match held.remove(epoch) {
                Some(buffered) => buffered
                    .into_iter()
                    .map(|payload| Emit { payload, time: time.clone() })
                    .collect(),
                None => vec![],
            }
        }

        (
            BehaviorKind::LoopEgressIncrement { max_counter },
            Event::Message { payload, time, .. },
        ) => {
            let TimeValue::Tuple { epoch, counters } = &time.value else {
                return Err(Error::DomainMismatch("loop increment needs tuple times".into()));
            };
            let mut counters = counters.clone();
            let last = counters.last_mut().expect("loop domain has a counter");
            *last += 1;
            if *last > *max_counter {
                vec![]
            } else {
                let bumped = LogicalTime {
                    domain: time.domain.clone(),
                    value: TimeValue::Tuple { epoch: *epoch, counters },
                };
                vec![Emit { payload: payload.clone(), time: bumped }]
            }
        }
        (BehaviorKind::LoopEgressIncrement { .. }, Event::Notification { .. }) => vec![],

        (BehaviorKind::KeyedStateful { reducer }, Event::Message { payload, time, .. }) => {
            let BehaviorState::Keyed { acc } = state else { unreachable!() };
            let slot = acc.entry(time_key(time)).or_insert(0);
            match apply_reducer(reducer, slot, payload_int(payload)?)? {
                Some(v) => vec![Emit { payload: Payload::Int(v + skew), time: time.clone() }],
                None => vec![],
            }
        }
        (BehaviorKind::KeyedStateful { .. }, Event::Notification { .. }) => vec![],

        // The ingress source treats scenario batches as messages on a
        // virtual edge; it forwards them unchanged.
        (BehaviorKind::IngressSource, Event::Message { payload, time, .. }) => {
            vec![Emit { payload: payload.clone(), time: time.clone() }]
        }
        (BehaviorKind::IngressSource, Event::Notification { .. }) => vec![],

        // The sink forwards nothing through the graph; the simulator turns
        // its deliveries into external output records.
        (BehaviorKind::EgressSink, _) => vec![],
    };
    Ok(emits)
}

/// Re-executes a history from the initial state. Returns the resulting
/// state and the emitted messages in processing order.
pub fn replay_filtered(decl: &ProcessorDecl, h: &History) -> Result<(BehaviorState, Vec<Emit>)> {
    if !decl.deterministic {
        return Err(Error::NonDeterministicReplay(decl.id.to_string()));
    }
    let mut state = BehaviorState::initial(&decl.behavior);
    let mut sends = Vec::new();
    for ev in h {
        sends.extend(deliver(decl, &mut state, ev, 0)?);
    }
    Ok((state, sends))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CheckpointPolicy, EstimateMode, ExternalRole, PolicyKind, ProcId};
    use crate::time::OrderingMode;

    fn decl(behavior: BehaviorKind, domain: Arc<TimeDomain>) -> ProcessorDecl {
        ProcessorDecl {
            id: ProcId::new("p"),
            domain,
            behavior,
            policy: CheckpointPolicy { kind: PolicyKind::Ephemeral, log_outputs: false },
            external_role: ExternalRole::None,
            estimates: EstimateMode::Exact,
            deterministic: true,
        }
    }

    fn epoch(d: &Arc<TimeDomain>, e: u64) -> LogicalTime {
        LogicalTime::epoch(d, e).unwrap()
    }

    fn msg(d: &Arc<TimeDomain>, e: u64, v: i64) -> Event {
        Event::Message { payload: Payload::Int(v), time: epoch(d, e), edge: EdgeId::new("e1") }
    }

    #[test]
    fn dequeue_allows_late_earlier_epoch() {
        let d = TimeDomain::epochs();
        let times: Vec<LogicalTime> =
            [2u64, 2, 2, 2, 1].iter().map(|e| epoch(&d, *e)).collect();
        assert!(can_dequeue(&times, 5).unwrap());
        assert!(can_dequeue(&times, 1).unwrap());
    }

    #[test]
    fn dequeue_blocks_after_smaller_time() {
        let d = TimeDomain::epochs();
        let times = vec![epoch(&d, 1), epoch(&d, 2)];
        assert!(!can_dequeue(&times, 2).unwrap());
    }

    #[test]
    fn sum_emits_on_notification_and_drops_state() {
        let d = TimeDomain::epochs();
        let p = decl(BehaviorKind::Sum, d.clone());
        let mut state = BehaviorState::initial(&p.behavior);
        assert!(deliver(&p, &mut state, &msg(&d, 0, 3), 0).unwrap().is_empty());
        assert!(deliver(&p, &mut state, &msg(&d, 0, 4), 0).unwrap().is_empty());
        let out =
            deliver(&p, &mut state, &Event::Notification { time: epoch(&d, 0) }, 0).unwrap();
        assert_eq!(out, vec![Emit { payload: Payload::Int(7), time: epoch(&d, 0) }]);
        assert_eq!(state, BehaviorState::Sum { pending: BTreeMap::new() });
        // A second notification for the same time has nothing to emit.
        let out =
            deliver(&p, &mut state, &Event::Notification { time: epoch(&d, 0) }, 0).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn select_on_empty_input_emits_nothing() {
        let d = TimeDomain::epochs();
        let p = decl(BehaviorKind::Select { map: "identity".into() }, d.clone());
        let (state, sends) = replay_filtered(&p, &Vec::new()).unwrap();
        assert_eq!(state, BehaviorState::Stateless);
        assert!(sends.is_empty());
    }

    #[test]
    fn loop_increment_bumps_counter() {
        let d = TimeDomain::structured(1, OrderingMode::Lexicographic);
        let p = decl(BehaviorKind::LoopEgressIncrement { max_counter: 4 }, d.clone());
        let mut state = BehaviorState::initial(&p.behavior);
        let t13 = LogicalTime::tuple(&d, 1, vec![3]).unwrap();
        let ev = Event::Message { payload: Payload::Int(9), time: t13, edge: EdgeId::new("e5") };
        let out = deliver(&p, &mut state, &ev, 0).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].time.to_string(), "tuple:1.4");
        // At the cap the message is dropped.
        let t14 = LogicalTime::tuple(&d, 1, vec![4]).unwrap();
        let ev = Event::Message { payload: Payload::Int(9), time: t14, edge: EdgeId::new("e5") };
        assert!(deliver(&p, &mut state, &ev, 0).unwrap().is_empty());
    }

    #[test]
    fn filter_history_keeps_order() {
        let d = TimeDomain::epochs();
        let h: History = vec![
            msg(&d, 2, 1),
            msg(&d, 1, 2),
            msg(&d, 3, 3),
            Event::Notification { time: epoch(&d, 3) },
            msg(&d, 4, 4),
        ];
        let f = Frontier::downward_close(&d, &[epoch(&d, 3)]).unwrap();
        let filtered = filter_history(&h, &f).unwrap();
        assert_eq!(filtered, h[..4].to_vec());
        assert_eq!(filter_history(&h, &Frontier::top(&d)).unwrap(), h);
    }

    #[test]
    fn replay_matches_selective_filtering_for_sum() {
        let d = TimeDomain::epochs();
        let p = decl(BehaviorKind::Sum, d.clone());
        // Interleave epochs 0 and 1, then complete epoch 0.
        let h: History = vec![
            msg(&d, 0, 3),
            msg(&d, 1, 10),
            msg(&d, 0, 4),
            Event::Notification { time: epoch(&d, 0) },
            msg(&d, 1, 20),
        ];
        let (live, _) = replay_filtered(&p, &h).unwrap();
        let f = Frontier::downward_close(&d, &[epoch(&d, 0)]).unwrap();
        let selective = live.filtered(&d, &f).unwrap();
        let (replayed, _) = replay_filtered(&p, &filter_history(&h, &f).unwrap()).unwrap();
        assert_eq!(selective.encode(), replayed.encode());
        // Epoch 0 completed, so its state is gone either way.
        assert_eq!(selective, BehaviorState::Sum { pending: BTreeMap::new() });
    }

    #[test]
    fn barrier_holds_until_notification() {
        let d = TimeDomain::epochs();
        let p = decl(BehaviorKind::EpochBarrier, d.clone());
        let mut state = BehaviorState::initial(&p.behavior);
        assert!(deliver(&p, &mut state, &msg(&d, 1, 7), 0).unwrap().is_empty());
        assert!(deliver(&p, &mut state, &msg(&d, 1, 8), 0).unwrap().is_empty());
        let out =
            deliver(&p, &mut state, &Event::Notification { time: epoch(&d, 1) }, 0).unwrap();
        assert_eq!(
            out.iter().map(|e| e.payload.clone()).collect::<Vec<_>>(),
            vec![Payload::Int(7), Payload::Int(8)]
        );
    }

    #[test]
    fn non_deterministic_replay_is_rejected() {
        let d = TimeDomain::epochs();
        let mut p = decl(BehaviorKind::Select { map: "identity".into() }, d);
        p.deterministic = false;
        assert!(matches!(replay_filtered(&p, &Vec::new()), Err(Error::NonDeterministicReplay(_))));
    }
}
