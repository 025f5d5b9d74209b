//! The monitoring service: ingests persisted checkpoint metadata, maintains
//! per-processor low-watermark frontiers by re-running the fixed point over
//! persisted-only state, and authorizes garbage collection and external
//! acknowledgements.

use std::collections::BTreeMap;

use crate::checkpoint::CheckpointMetadata;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, ProcId};
use crate::rollback::{choose_frontiers, ProcSnapshot, SnapshotEntry, SystemSnapshot};
use crate::time::{EdgeId, Frontier};

/// What a watermark advance authorizes: dropping records strictly below the
/// watermark at the processor, and dropping upstream logged messages with
/// times inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcAuthorization {
    pub proc: ProcId,
    pub watermark: Frontier,
    /// Upstream `(sender, edge)` pairs whose logs may shed messages with
    /// times in the watermark.
    pub upstream: Vec<(ProcId, EdgeId)>,
}

/// Deterministic, order-independent monitor state. The watermark at `p` is
/// the rollback frontier the fixed point chooses when every processor is
/// assumed failed and only persisted records exist; since storage is
/// reliable, no failure scenario can force a rollback below it.
#[derive(Debug, Clone)]
pub struct MonitorState {
    graph: GraphSpec,
    chains: BTreeMap<ProcId, Vec<CheckpointMetadata>>,
    watermarks: BTreeMap<ProcId, Frontier>,
    /// Restrict recomputation to the weakly-connected component of the
    /// processor whose chain changed. Constraints never cross components,
    /// so results match the from-scratch mode exactly.
    incremental: bool,
    component: BTreeMap<ProcId, usize>,
    rejected: Vec<String>,
}

fn weak_components(graph: &GraphSpec) -> BTreeMap<ProcId, usize> {
    let mut comp: BTreeMap<ProcId, usize> = BTreeMap::new();
    let mut next = 0usize;
    for p in &graph.processors {
        if comp.contains_key(&p.id) {
            continue;
        }
        let id = next;
        next += 1;
        let mut stack = vec![p.id.clone()];
        while let Some(cur) = stack.pop() {
            if comp.insert(cur.clone(), id).is_some() {
                continue;
            }
            for e in &graph.edges {
                if e.src == cur && !comp.contains_key(&e.dst) {
                    stack.push(e.dst.clone());
                }
                if e.dst == cur && !comp.contains_key(&e.src) {
                    stack.push(e.src.clone());
                }
            }
        }
    }
    comp
}

impl MonitorState {
    pub fn new(graph: GraphSpec, incremental: bool) -> Result<MonitorState> {
        let mut chains = BTreeMap::new();
        let mut watermarks = BTreeMap::new();
        for p in &graph.processors {
            let in_edges: Vec<EdgeId> =
                graph.in_edges(&p.id).iter().map(|e| e.id.clone()).collect();
            let out_edges: Vec<_> = graph
                .out_edges(&p.id)
                .iter()
                .map(|e| {
                    let dst = graph
                        .processor(&e.dst)
                        .ok_or_else(|| Error::Snapshot(format!("edge {} dangles", e.id)))?;
                    Ok((e.id.clone(), dst.domain.clone()))
                })
                .collect::<Result<_>>()?;
            chains.insert(
                p.id.clone(),
                vec![CheckpointMetadata::at_empty(&p.id, &p.domain, &in_edges, &out_edges)],
            );
            watermarks.insert(p.id.clone(), Frontier::empty(&p.domain));
        }
        let component = weak_components(&graph);
        Ok(MonitorState { graph, chains, watermarks, incremental, component, rejected: Vec::new() })
    }

    pub fn watermark(&self, p: &ProcId) -> Option<&Frontier> {
        self.watermarks.get(p)
    }

    pub fn watermarks(&self) -> &BTreeMap<ProcId, Frontier> {
        &self.watermarks
    }

    pub fn rejected(&self) -> &[String] {
        &self.rejected
    }

    /// The persisted-only view the monitor reasons over: every processor
    /// treated as failed, no live `TOP` entries.
    pub fn snapshot(&self) -> SystemSnapshot {
        let procs = self
            .chains
            .iter()
            .map(|(p, metas)| {
                (
                    p.clone(),
                    ProcSnapshot {
                        chain: metas.iter().map(|m| SnapshotEntry { meta: m.clone() }).collect(),
                    },
                )
            })
            .collect();
        SystemSnapshot {
            graph: self.graph.clone(),
            procs,
            failed: self.graph.processors.iter().map(|p| p.id.clone()).collect(),
        }
    }

    /// Adds fully persisted checkpoint metadata and returns the watermark
    /// advances it unlocks. Metadata violating the record invariants is
    /// rejected and logged; duplicate ingestion is a no-op.
    pub fn ingest(&mut self, meta: CheckpointMetadata) -> Result<Vec<(ProcId, Frontier)>> {
        if let Err(e) = meta.validate() {
            self.rejected.push(format!("{}: {e}", meta.proc));
            return Ok(Vec::new());
        }
        let Some(chain) = self.chains.get_mut(&meta.proc) else {
            self.rejected.push(format!("{}: unknown processor", meta.proc));
            return Ok(Vec::new());
        };
        if chain.iter().any(|m| m.f == meta.f) {
            return Ok(Vec::new());
        }
        // Keep the chain sorted by containment regardless of arrival order.
        let mut pos = chain.len();
        for (i, existing) in chain.iter().enumerate() {
            if meta.f.subset(&existing.f)? {
                pos = i;
                break;
            }
            if !existing.f.subset(&meta.f)? {
                self.rejected.push(format!(
                    "{}: frontier {} incomparable with recorded {}",
                    meta.proc, meta.f, existing.f
                ));
                return Ok(Vec::new());
            }
        }
        let proc = meta.proc.clone();
        chain.insert(pos, meta);
        self.recompute(Some(&proc))
    }

    /// Removes collected records below each processor's watermark so the
    /// monitor's view matches the stores.
    pub fn note_collected(&mut self, proc: &ProcId, below: &Frontier) -> Result<()> {
        if let Some(chain) = self.chains.get_mut(proc) {
            let mut kept = Vec::with_capacity(chain.len());
            for m in chain.drain(..) {
                if m.f == *below || !m.f.subset(below)? {
                    kept.push(m);
                }
            }
            *chain = kept;
        }
        Ok(())
    }

    fn recompute(&mut self, changed: Option<&ProcId>) -> Result<Vec<(ProcId, Frontier)>> {
        let scope = match (self.incremental, changed) {
            (true, Some(p)) => self.component.get(p).copied(),
            _ => None,
        };
        let report = choose_frontiers(&self.snapshot())?;
        let mut advances = Vec::new();
        for (p, new) in &report.assignment.f {
            if let Some(c) = scope {
                if self.component.get(p) != Some(&c) {
                    continue;
                }
            }
            let old = &self.watermarks[p];
            if old.subset(new)? && old != new {
                advances.push((p.clone(), new.clone()));
                self.watermarks.insert(p.clone(), new.clone());
            }
        }
        Ok(advances)
    }

    /// What the current watermark at `p` allows to be collected.
    pub fn authorize_gc(&self, p: &ProcId) -> Result<GcAuthorization> {
        let watermark = self
            .watermarks
            .get(p)
            .ok_or_else(|| Error::Snapshot(format!("unknown processor {p}")))?
            .clone();
        let upstream = self
            .graph
            .in_edges(p)
            .iter()
            .map(|e| (e.src.clone(), e.id.clone()))
            .collect();
        Ok(GcAuthorization { proc: p.clone(), watermark, upstream })
    }
}
