//! Persisted per-processor state: checkpoint records, sent-message logs,
//! frontier estimates, default approximations, and the chain of frontiers a
//! processor can roll back to.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{ProcId, ProcessorDecl};
use crate::runtime::Payload;
use crate::time::{EdgeId, Frontier, LogicalTime, TimeDomain};

/// The metadata bundle the rollback algorithm needs for one `(p, f)` pair:
/// the frontier itself plus the notification, per-input message, and
/// per-output discarded-message estimates and edge projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointMetadata {
    pub proc: ProcId,
    pub f: Frontier,
    /// Smallest frontier containing the processed notifications, or a
    /// declared over-approximation.
    pub nbar: Frontier,
    /// Per input edge, smallest frontier containing the delivered messages.
    pub mbar: BTreeMap<EdgeId, Frontier>,
    /// Per output edge, smallest frontier containing the discarded (sent and
    /// unlogged) messages, in the destination's domain.
    pub dbar: BTreeMap<EdgeId, Frontier>,
    /// Per output edge, the edge projection at this frontier, in the
    /// destination's domain.
    pub phi: BTreeMap<EdgeId, Frontier>,
}

impl CheckpointMetadata {
    /// Checks the structural invariants every record must satisfy.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::CheckpointRejected(msg));
        if !self.nbar.subset(&self.f)? {
            return err(format!("{}: N̄ {} escapes f {}", self.proc, self.nbar, self.f));
        }
        for (d, m) in &self.mbar {
            if !m.subset(&self.f)? {
                return err(format!("{}: M̄({d}) {} escapes f {}", self.proc, m, self.f));
            }
        }
        for (e, dbar) in &self.dbar {
            let Some(phi) = self.phi.get(e) else {
                return err(format!("{}: D̄({e}) recorded without φ({e})", self.proc));
            };
            if !dbar.subset(phi)? {
                return err(format!(
                    "{}: D̄({e}) {} escapes φ({e}) {}",
                    self.proc, dbar, phi
                ));
            }
        }
        Ok(())
    }

    /// Metadata for the initial-state frontier: everything empty.
    pub fn at_empty(
        proc: &ProcId,
        domain: &Arc<TimeDomain>,
        in_edges: &[EdgeId],
        out_edges: &[(EdgeId, Arc<TimeDomain>)],
    ) -> CheckpointMetadata {
        CheckpointMetadata {
            proc: proc.clone(),
            f: Frontier::empty(domain),
            nbar: Frontier::empty(domain),
            mbar: in_edges.iter().map(|d| (d.clone(), Frontier::empty(domain))).collect(),
            dbar: out_edges
                .iter()
                .map(|(e, dd)| (e.clone(), Frontier::empty(dd)))
                .collect(),
            phi: out_edges
                .iter()
                .map(|(e, dd)| (e.clone(), Frontier::empty(dd)))
                .collect(),
        }
    }
}

/// Fills the safe approximations: `M̄ = N̄ = f` and `D̄ = φ(e)(f)` when
/// nothing is logged, `D̄ = ∅` when everything is.
pub fn default_metadata(
    decl: &ProcessorDecl,
    f: &Frontier,
    in_edges: &[EdgeId],
    phi: &BTreeMap<EdgeId, Frontier>,
) -> Result<CheckpointMetadata> {
    let logs = decl.policy.logs_outputs();
    if decl.behavior.sends_into_future() && !logs && !phi.is_empty() {
        return Err(Error::CheckpointRejected(format!(
            "{}: sends into the future, so discarded-message frontiers must be tracked \
             explicitly rather than approximated by φ",
            decl.id
        )));
    }
    let meta = CheckpointMetadata {
        proc: decl.id.clone(),
        f: f.clone(),
        nbar: f.clone(),
        mbar: in_edges.iter().map(|d| (d.clone(), f.clone())).collect(),
        dbar: phi
            .iter()
            .map(|(e, p)| {
                let d = if logs { Frontier::empty(&p.domain) } else { p.clone() };
                (e.clone(), d)
            })
            .collect(),
        phi: phi.clone(),
    };
    meta.validate()?;
    Ok(meta)
}

/// One message retained in a sender's log. `time` is in the destination's
/// domain; `cause` is the sender-domain time of the event that produced it,
/// which drives selective log filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoggedMessage {
    pub time: LogicalTime,
    pub payload: Payload,
    pub cause: LogicalTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointRecord {
    pub meta: CheckpointMetadata,
    /// Canonical byte encoding of the selectively filtered behavior state.
    pub state: Vec<u8>,
    /// Per output edge, the logged subsequence of messages sent under `f`.
    pub logs: BTreeMap<EdgeId, Vec<LoggedMessage>>,
    /// True once storage has acknowledged state, logs, and metadata.
    pub persisted: bool,
}

/// The chain `F*(p)` of frontiers a processor has persisted enough
/// information to roll back to, plus in-flight records awaiting their
/// storage acks. Acks are applied in chain order so the persisted prefix is
/// always itself a chain.
#[derive(Debug, Clone)]
pub struct ProcessorStore {
    pub proc: ProcId,
    records: Vec<CheckpointRecord>,
}

impl ProcessorStore {
    /// A fresh store holding only the initial-state record, which needs no
    /// storage round trip.
    pub fn new(empty_meta: CheckpointMetadata) -> Result<ProcessorStore> {
        if !empty_meta.f.is_empty() {
            return Err(Error::Storage("store must start at the empty frontier".into()));
        }
        empty_meta.validate()?;
        let proc = empty_meta.proc.clone();
        Ok(ProcessorStore {
            proc,
            records: vec![CheckpointRecord {
                meta: empty_meta,
                state: Vec::new(),
                logs: BTreeMap::new(),
                persisted: true,
            }],
        })
    }

    /// Appends a record taken at a completed frontier. The caller is
    /// responsible for the completeness precondition; the store enforces the
    /// strictly-increasing chain and the metadata invariants.
    pub fn append(&mut self, rec: CheckpointRecord) -> Result<()> {
        rec.meta.validate()?;
        let last = &self.records.last().expect("store never empty").meta.f;
        if !last.subset(&rec.meta.f)? || last == &rec.meta.f {
            return Err(Error::CheckpointRejected(format!(
                "{}: frontier {} does not strictly extend the previous entry {}",
                self.proc, rec.meta.f, last
            )));
        }
        self.records.push(rec);
        Ok(())
    }

    /// Marks the record at `f` acknowledged by storage. The record only
    /// becomes usable once every earlier record is acknowledged too.
    pub fn ack(&mut self, f: &Frontier) -> Result<()> {
        let Some(rec) = self.records.iter_mut().find(|r| &r.meta.f == f) else {
            return Err(Error::Storage(format!("{}: ack for unknown record {f}", self.proc)));
        };
        rec.persisted = true;
        Ok(())
    }

    /// Records that are persisted with every predecessor persisted.
    pub fn persisted_chain(&self) -> Vec<&CheckpointRecord> {
        let mut out = Vec::new();
        for r in &self.records {
            if r.persisted {
                out.push(r);
            } else {
                break;
            }
        }
        out
    }

    pub fn all_records(&self) -> &[CheckpointRecord] {
        &self.records
    }

    pub fn record_at(&self, f: &Frontier) -> Option<&CheckpointRecord> {
        self.records.iter().find(|r| &r.meta.f == f)
    }

    /// Failure: in-flight, unacknowledged records are lost.
    pub fn drop_unacked(&mut self) {
        let keep = self.persisted_chain().len();
        self.records.truncate(keep);
    }

    /// Rollback: keep only entries within `f`.
    pub fn truncate_to(&mut self, f: &Frontier) -> Result<()> {
        let mut keep = Vec::new();
        for r in self.records.drain(..) {
            if r.meta.f.subset(f)? {
                keep.push(r);
            }
        }
        self.records = keep;
        Ok(())
    }

    /// Garbage collection: drop persisted records strictly below `f`,
    /// keeping `f` itself. Returns the dropped frontiers.
    pub fn collect_below(&mut self, f: &Frontier) -> Result<Vec<Frontier>> {
        let mut dropped = Vec::new();
        let mut keep = Vec::new();
        for r in self.records.drain(..) {
            if r.meta.f != *f && r.meta.f.subset(f)? {
                dropped.push(r.meta.f.clone());
            } else {
                keep.push(r);
            }
        }
        self.records = keep;
        Ok(dropped)
    }

    /// Drops logged messages destined for times inside `f` on edge `e`, as
    /// authorized by the destination's low-watermark.
    pub fn discard_logged_in(&mut self, e: &EdgeId, f: &Frontier) -> Result<usize> {
        let mut dropped = 0;
        for r in &mut self.records {
            if let Some(log) = r.logs.get_mut(e) {
                let before = log.len();
                let mut kept = Vec::with_capacity(before);
                for m in log.drain(..) {
                    if f.contains(&m.time)? {
                        dropped += 1;
                    } else {
                        kept.push(m);
                    }
                }
                *log = kept;
            }
        }
        Ok(dropped)
    }

    /// The chain of frontiers currently available for rollback.
    pub fn available(&self, include_unacked: bool) -> Vec<Frontier> {
        if include_unacked {
            self.records.iter().map(|r| r.meta.f.clone()).collect()
        } else {
            self.persisted_chain().iter().map(|r| r.meta.f.clone()).collect()
        }
    }
}

/// Checks the `F*(p)` invariants: contains `EMPTY` and forms a strictly
/// increasing chain.
pub fn validate_chain(frontiers: &[Frontier]) -> Result<()> {
    let Some(first) = frontiers.first() else {
        return Err(Error::Snapshot("available-frontier chain is empty".into()));
    };
    if !first.is_empty() {
        return Err(Error::Snapshot(format!(
            "available-frontier chain must start at EMPTY, found {first}"
        )));
    }
    for pair in frontiers.windows(2) {
        if !pair[0].subset(&pair[1])? || pair[0] == pair[1] {
            return Err(Error::Snapshot(format!(
                "available frontiers must strictly increase: {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        BehaviorKind, CheckpointPolicy, EstimateMode, ExternalRole, PolicyKind,
    };
    use crate::time::parse_frontier;

    fn epoch_meta(proc: &str, f: &str) -> CheckpointMetadata {
        let d = TimeDomain::epochs();
        let f = parse_frontier(&d, f).unwrap();
        CheckpointMetadata {
            proc: ProcId::new(proc),
            f: f.clone(),
            nbar: f.clone(),
            mbar: BTreeMap::new(),
            dbar: BTreeMap::new(),
            phi: BTreeMap::new(),
        }
    }

    fn store() -> ProcessorStore {
        ProcessorStore::new(epoch_meta("p", "EMPTY")).unwrap()
    }

    #[test]
    fn chain_rejects_non_superset() {
        let mut s = store();
        s.append(CheckpointRecord {
            meta: epoch_meta("p", "{epoch:2}"),
            state: vec![],
            logs: BTreeMap::new(),
            persisted: false,
        })
        .unwrap();
        let err = s.append(CheckpointRecord {
            meta: epoch_meta("p", "{epoch:1}"),
            state: vec![],
            logs: BTreeMap::new(),
            persisted: false,
        });
        assert!(matches!(err, Err(Error::CheckpointRejected(_))));
    }

    #[test]
    fn out_of_order_acks_respect_chain_order() {
        let mut s = store();
        for f in ["{epoch:0}", "{epoch:1}"] {
            s.append(CheckpointRecord {
                meta: epoch_meta("p", f),
                state: vec![],
                logs: BTreeMap::new(),
                persisted: false,
            })
            .unwrap();
        }
        let d = TimeDomain::epochs();
        // The later record acks first; it stays unusable until its
        // predecessor is acked.
        s.ack(&parse_frontier(&d, "{epoch:1}").unwrap()).unwrap();
        assert_eq!(s.persisted_chain().len(), 1);
        s.ack(&parse_frontier(&d, "{epoch:0}").unwrap()).unwrap();
        assert_eq!(s.persisted_chain().len(), 3);
    }

    #[test]
    fn crash_before_ack_loses_record() {
        let mut s = store();
        s.append(CheckpointRecord {
            meta: epoch_meta("p", "{epoch:0}"),
            state: vec![],
            logs: BTreeMap::new(),
            persisted: false,
        })
        .unwrap();
        s.drop_unacked();
        assert_eq!(s.available(true).len(), 1);
        assert!(s.available(true)[0].is_empty());
    }

    #[test]
    fn metadata_invariants_enforced() {
        let d = TimeDomain::epochs();
        let mut meta = epoch_meta("p", "{epoch:1}");
        meta.nbar = parse_frontier(&d, "{epoch:5}").unwrap();
        assert!(meta.validate().is_err());
    }

    #[test]
    fn default_metadata_log_all_gives_empty_dbar() {
        let d = TimeDomain::epochs();
        let decl = ProcessorDecl {
            id: ProcId::new("p"),
            domain: d.clone(),
            behavior: BehaviorKind::StatelessRelay,
            policy: CheckpointPolicy { kind: PolicyKind::LogSentMessages, log_outputs: true },
            external_role: ExternalRole::None,
            estimates: EstimateMode::Approximate,
            deterministic: true,
        };
        let f = parse_frontier(&d, "{epoch:2}").unwrap();
        let phi = BTreeMap::from([(EdgeId::new("e1"), f.clone())]);
        let meta = default_metadata(&decl, &f, &[EdgeId::new("in")], &phi).unwrap();
        assert!(meta.dbar[&EdgeId::new("e1")].is_empty());
        assert_eq!(meta.mbar[&EdgeId::new("in")], f);

        // A discard-everything processor approximates D̄ by φ.
        let mut no_log = decl.clone();
        no_log.policy = CheckpointPolicy { kind: PolicyKind::Ephemeral, log_outputs: false };
        let meta = default_metadata(&no_log, &f, &[], &phi).unwrap();
        assert_eq!(meta.dbar[&EdgeId::new("e1")], f);

        // All estimates collapse at EMPTY.
        let empty = Frontier::empty(&d);
        let phi_empty = BTreeMap::from([(EdgeId::new("e1"), empty.clone())]);
        let meta = default_metadata(&no_log, &empty, &[EdgeId::new("in")], &phi_empty).unwrap();
        assert!(meta.nbar.is_empty());
        assert!(meta.mbar[&EdgeId::new("in")].is_empty());
        assert!(meta.dbar[&EdgeId::new("e1")].is_empty());
    }

    #[test]
    fn future_sender_cannot_approximate_dbar() {
        let d = TimeDomain::structured(1, crate::time::OrderingMode::Lexicographic);
        let decl = ProcessorDecl {
            id: ProcId::new("q"),
            domain: d.clone(),
            behavior: BehaviorKind::LoopEgressIncrement { max_counter: 4 },
            policy: CheckpointPolicy { kind: PolicyKind::Ephemeral, log_outputs: false },
            external_role: ExternalRole::None,
            estimates: EstimateMode::Approximate,
            deterministic: true,
        };
        let f = parse_frontier(&d, "{tuple:1.4}").unwrap();
        let phi = BTreeMap::from([(EdgeId::new("e4"), f.clone())]);
        assert!(default_metadata(&decl, &f, &[], &phi).is_err());
    }

    #[test]
    fn chain_validation() {
        let d = TimeDomain::epochs();
        let f = |s: &str| parse_frontier(&d, s).unwrap();
        assert!(validate_chain(&[f("EMPTY"), f("{epoch:0}"), f("{epoch:3}")]).is_ok());
        assert!(validate_chain(&[f("{epoch:0}")]).is_err());
        assert!(validate_chain(&[f("EMPTY"), f("{epoch:3}"), f("{epoch:1}")]).is_err());
        assert!(validate_chain(&[f("EMPTY"), f("{epoch:1}"), f("{epoch:1}")]).is_err());
    }
}
