//! ASAP/ALAP/mobility analysis under a latency bound, and schedule validation.
//!
//! Control steps are 1-indexed. ALAP is the latest *start* step under unit
//! durations; an operation starting at `t` with duration `d` meets its
//! deadline iff `t + d - 1 <= alap`.

use crate::dfg::Dfg;
use crate::library::ResourceLibrary;
use crate::schedule::Schedule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimingInfo {
    pub asap: Vec<u32>,
    pub alap: Vec<u32>,
    pub mobility: Vec<u32>,
    pub critical_length: u32,
    pub slack: u32,
    pub latency_bound: u32,
}

impl TimingInfo {
    /// `start..=end` window an operation must stay inside.
    pub fn window(&self, idx: usize) -> (u32, u32) {
        (self.asap[idx], self.alap[idx])
    }
}

pub fn compute_timing(g: &Dfg, slack: u32) -> TimingInfo {
    let n = g.len();
    let mut asap = vec![1u32; n];
    for &v in g.topo_indices() {
        asap[v] = g.preds(v).iter().map(|&p| asap[p] + 1).max().unwrap_or(1);
    }
    let critical_length = asap.iter().copied().max().unwrap_or(0);
    let latency_bound = critical_length + slack;
    let mut alap = vec![latency_bound; n];
    for &v in g.topo_indices().iter().rev() {
        alap[v] = g.succs(v).iter().map(|&s| alap[s] - 1).min().unwrap_or(latency_bound);
    }
    let mobility = alap.iter().zip(&asap).map(|(l, e)| l - e).collect();
    TimingInfo { asap, alap, mobility, critical_length, slack, latency_bound }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("node {node}: start {start} precedes ASAP {asap}")]
    BeforeAsap { node: u32, start: u32, asap: u32 },
    #[error("node {node}: duration must be at least 1")]
    ZeroDuration { node: u32 },
    #[error("node {node}: duration {duration} is not a library cycle count")]
    UnsupportedDuration { node: u32, duration: u32 },
    #[error("node {node}: completes at step {end}, after its ALAP deadline {alap}")]
    MissesDeadline { node: u32, end: u32, alap: u32 },
    #[error("edge ({src}, {dst}): {dst} starts at {start} before {src} completes at {end}")]
    Precedence { src: u32, dst: u32, start: u32, end: u32 },
    #[error("node {node}: completes at step {end}, beyond latency bound {bound}")]
    ExceedsLatency { node: u32, end: u32, bound: u32 },
    #[error("op type `{op}` of node {node} is not in the library")]
    UnknownOpType { node: u32, op: String },
}

/// Checks a complete schedule against windows, precedences and the bound.
/// Per-node sanity checks come first, then precedences, then deadlines and the bound.
pub fn validate_schedule(g: &Dfg, lib: &ResourceLibrary, t: &TimingInfo, s: &Schedule) -> Result<(), Violation> {
    assert_eq!(s.len(), g.len(), "schedule does not cover the graph");
    for (v, node) in g.nodes().iter().enumerate() {
        let slot = s.slot(v);
        if slot.start < t.asap[v] {
            return Err(Violation::BeforeAsap { node: node.id, start: slot.start, asap: t.asap[v] });
        }
        if slot.duration == 0 {
            return Err(Violation::ZeroDuration { node: node.id });
        }
        let ty = lib
            .type_index(&node.op)
            .ok_or_else(|| Violation::UnknownOpType { node: node.id, op: node.op.to_string() })?;
        if lib.level_for(ty, slot.duration).is_none() {
            return Err(Violation::UnsupportedDuration { node: node.id, duration: slot.duration });
        }
    }
    for &(u, v) in g.edges() {
        let (a, b) = (s.slot(u), s.slot(v));
        if b.start < a.start + a.duration {
            return Err(Violation::Precedence { src: g.node(u).id, dst: g.node(v).id, start: b.start, end: a.end() });
        }
    }
    for (v, node) in g.nodes().iter().enumerate() {
        let end = s.slot(v).end();
        if end > t.alap[v] {
            return Err(Violation::MissesDeadline { node: node.id, end, alap: t.alap[v] });
        }
        if end > t.latency_bound {
            return Err(Violation::ExceedsLatency { node: node.id, end, bound: t.latency_bound });
        }
    }
    Ok(())
}
