//! Exhaustive enumeration of every valid schedule of a small instance, and
//! the pareto front obtained from it by brute force.
//!
//! Nodes are assigned in ascending id order (not topological order), each
//! over its whole `[asap, alap]` window, and a partial assignment is only
//! rejected when it already breaks a precedence between two assigned nodes.
//! Costs are never consulted while enumerating.

use crate::budget::Budget;
use crate::cost::{ArchMode, CostModel};
use crate::dfg::Dfg;
use crate::error::OracleError;
use crate::library::ResourceLibrary;
use crate::pareto::ParetoSet;
use crate::schedule::{Schedule, Slot};
use crate::timing::{validate_schedule, TimingInfo};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBound {
    pub max_nodes: usize,
    pub max_states: u64,
}

impl Default for EnumerationBound {
    fn default() -> Self {
        EnumerationBound { max_nodes: 8, max_states: 10_000_000 }
    }
}

/// Upper bound on the schedule space: product over nodes of
/// `(mobility + 1) * level count`.
pub fn state_space_estimate(g: &Dfg, t: &TimingInfo, lib: &ResourceLibrary) -> f64 {
    g.nodes()
        .iter()
        .enumerate()
        .map(|(v, n)| {
            let levels = lib.entry(&n.op).map_or(0, |e| e.levels.len());
            f64::from(t.mobility[v] + 1) * levels as f64
        })
        .product()
}

/// Streams every schedule accepted by [`validate_schedule`], once each.
pub struct ScheduleEnumerator<'a> {
    g: &'a Dfg,
    /// Per node, every (start, duration) inside its window.
    candidates: Vec<Vec<Slot>>,
    cursor: Vec<usize>,
    current: Vec<Slot>,
    depth: usize,
    done: bool,
}

impl<'a> ScheduleEnumerator<'a> {
    fn new(g: &'a Dfg, t: &TimingInfo, lib: &ResourceLibrary) -> Self {
        let candidates: Vec<Vec<Slot>> = g
            .nodes()
            .iter()
            .enumerate()
            .map(|(v, n)| {
                let levels = &lib.entry(&n.op).expect("library covers graph").levels;
                let (lo, hi) = t.window(v);
                let mut c = Vec::new();
                for start in lo..=hi {
                    for l in levels {
                        if start + l.cycles - 1 <= hi {
                            c.push(Slot::new(start, l.cycles));
                        }
                    }
                }
                c
            })
            .collect();
        let n = g.len();
        ScheduleEnumerator {
            g,
            candidates,
            cursor: vec![0; n],
            current: vec![Slot::new(0, 0); n],
            depth: 0,
            done: n == 0,
        }
    }

    /// Whether node `v`'s slot agrees with every already-assigned neighbour.
    fn consistent(&self, v: usize) -> bool {
        let me = self.current[v];
        let before_ok = self.g.preds(v).iter().filter(|&&u| u < v).all(|&u| {
            let p = self.current[u];
            me.start >= p.start + p.duration
        });
        let after_ok = self.g.succs(v).iter().filter(|&&u| u < v).all(|&u| {
            let s = self.current[u];
            s.start >= me.start + me.duration
        });
        before_ok && after_ok
    }
}

impl Iterator for ScheduleEnumerator<'_> {
    type Item = Schedule;

    fn next(&mut self) -> Option<Schedule> {
        let n = self.g.len();
        loop {
            if self.done {
                return None;
            }
            let d = self.depth;
            if self.cursor[d] >= self.candidates[d].len() {
                // exhausted this level: backtrack
                if d == 0 {
                    self.done = true;
                    return None;
                }
                self.cursor[d] = 0;
                self.depth -= 1;
                self.cursor[self.depth] += 1;
                continue;
            }
            self.current[d] = self.candidates[d][self.cursor[d]];
            if !self.consistent(d) {
                self.cursor[d] += 1;
                continue;
            }
            if d + 1 == n {
                let out = Schedule::new(self.current.clone());
                self.cursor[d] += 1;
                return Some(out);
            }
            self.depth += 1;
        }
    }
}

pub fn enumerate_schedules<'a>(
    g: &'a Dfg,
    t: &TimingInfo,
    lib: &ResourceLibrary,
    bound: EnumerationBound,
) -> Result<ScheduleEnumerator<'a>, OracleError> {
    if g.len() > bound.max_nodes {
        return Err(OracleError::TooManyNodes { nodes: g.len(), max: bound.max_nodes });
    }
    let estimate = state_space_estimate(g, t, lib);
    if estimate > bound.max_states as f64 {
        return Err(OracleError::StateSpaceTooLarge { estimate, cap: bound.max_states });
    }
    Ok(ScheduleEnumerator::new(g, t, lib))
}

/// Fronts for several (mode, budget) pairs from a single enumeration pass.
pub fn oracle_fronts(
    g: &Dfg,
    t: &TimingInfo,
    lib: &ResourceLibrary,
    cases: &[(ArchMode, Budget)],
    bound: EnumerationBound,
) -> Result<Vec<ParetoSet>, OracleError> {
    let models: Vec<CostModel> = cases.iter().map(|(m, _)| CostModel::new(g, lib, *m, t.latency_bound)).collect();
    let caps: Vec<Vec<Option<u32>>> = cases.iter().map(|(_, b)| b.caps_for(lib)).collect();
    let mut fronts = vec![ParetoSet::new(); cases.len()];
    for s in enumerate_schedules(g, t, lib, bound)? {
        debug_assert_eq!(validate_schedule(g, lib, t, &s), Ok(()));
        let single_vdd_ok = s.slots().iter().all(|slot| slot.duration == 1);
        for (i, (mode, budget)) in cases.iter().enumerate() {
            if *mode == ArchMode::SingleVdd && !single_vdd_ok {
                continue;
            }
            let cost = models[i].evaluate(&s)?;
            if budget.admits(&cost, &caps[i]) {
                fronts[i].insert(cost, s.clone());
            }
        }
    }
    Ok(fronts)
}

/// The exact front by exhaustion.
pub fn oracle_front(
    g: &Dfg,
    t: &TimingInfo,
    lib: &ResourceLibrary,
    mode: ArchMode,
    budget: &Budget,
    bound: EnumerationBound,
) -> Result<ParetoSet, OracleError> {
    Ok(oracle_fronts(g, t, lib, &[(mode, budget.clone())], bound)?.remove(0))
}
