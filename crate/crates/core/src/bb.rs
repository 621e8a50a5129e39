//! Least-cost branch-and-bound over (start, duration) assignments.
//!
//! Nodes are placed depth-first in topological order. Each node branches
//! over starts from its earliest precedence-feasible step up to its ALAP
//! step and, per start, over library durations fastest first, subject to
//! the deadline rule. After every placement the partial cost is checked
//! against the budget and the archive of solutions found so far.
//!
//! Pruning needs a partial cost that never decreases as the schedule grows.
//! Per-type area is a running peak, dynamic and leakage power are sums over
//! placed operations (plus always-on instance leakage, itself a function of
//! peaks). The DVS switching term is left out of the bound: the greedy
//! start-order binding can rebind earlier operations when an op with an
//! earlier start is placed later, so its partial value is not monotone.
//! Complete schedules are always costed in full.
//!
//! With `lookahead` on, the bound also counts the cheapest power each
//! unplaced node could possibly run at. That never overestimates a
//! completion either, and cuts the tree by orders of magnitude once slack
//! opens up longer durations.
//!
//! Two further cuts keep the front exact:
//! - per-type area is also bounded from below by interval load: nodes whose
//!   whole window lies inside `[a, b]` need at least one cycle there;
//! - twins (same type, predecessors and successors) start in id order. A
//!   schedule with the later twin first is a relabelling of one that is
//!   explored, with the same cost, since binding order only sees
//!   (start, id) and ties keep their relative order.

use std::time::{Duration, Instant};

use crate::bound::Lookahead;
use crate::budget::Budget;
use crate::cost::{ArchMode, CostModel, CostTuple};
use crate::dfg::Dfg;
use crate::library::ResourceLibrary;
use crate::pareto::{ParetoSet, POWER_EPS};
use crate::schedule::{Schedule, Slot};
use crate::timing::TimingInfo;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub mode: ArchMode,
    pub budget: Budget,
    pub time_limit: Option<Duration>,
    /// Record the first budget-satisfying complete schedule and when it was found.
    pub emit_first_solution: bool,
    /// Prune partial schedules covered by an archived solution.
    pub dominance_pruning: bool,
    /// Keep the (area, power) of every accepted solution in emission order.
    pub record_trace: bool,
    /// Add the cheapest possible power of the unplaced nodes to the bound.
    pub lookahead: bool,
    /// Start interchangeable nodes in id order.
    pub symmetry_breaking: bool,
    /// Recompute every partial cost from scratch and compare it with the
    /// incremental one. Slow; meant for tests.
    pub cross_check: bool,
}

impl SearchConfig {
    pub fn new(mode: ArchMode) -> Self {
        SearchConfig {
            mode,
            budget: Budget::None,
            time_limit: None,
            emit_first_solution: false,
            dominance_pruning: true,
            record_trace: false,
            lookahead: true,
            symmetry_breaking: true,
            cross_check: false,
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        assert!(limit > Duration::ZERO, "time limit must be positive");
        self.time_limit = Some(limit);
        self
    }
}

#[derive(Clone, Debug)]
pub struct FirstSolution {
    pub cost: CostTuple,
    pub schedule: Schedule,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub front: ParetoSet,
    pub first_solution: Option<FirstSolution>,
    pub nodes_expanded: u64,
    pub budget_prunes: u64,
    pub dominance_prunes: u64,
    /// False iff the time limit interrupted the search.
    pub completed: bool,
    pub elapsed: Duration,
    /// Accepted solutions in the order they were found (when recorded).
    pub trace: Vec<(u32, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Within,
    OverBudget,
    Dominated,
}

/// Pruning test for a partial cost: over budget, or dominated-or-matched by
/// an archived solution.
pub fn bound_exceeded(partial: &CostTuple, archive: &ParetoSet, budget: &Budget, lib: &ResourceLibrary) -> bool {
    check_bound(&partial.area_by_type, partial.area_total, partial.power, archive, budget, &budget.caps_for(lib), true)
        != Bound::Within
}

fn check_bound(
    area_by_type: &[u32],
    area_total: u32,
    power: f64,
    archive: &ParetoSet,
    budget: &Budget,
    caps: &[Option<u32>],
    dominance: bool,
) -> Bound {
    let over = match budget {
        Budget::None => false,
        // rounding in the bound must not cut a schedule sitting exactly on the cap
        Budget::Power(cap) => power > *cap + POWER_EPS,
        Budget::Area(_) => area_by_type.iter().zip(caps).any(|(&a, cap)| cap.is_some_and(|c| a > c)),
    };
    if over {
        return Bound::OverBudget;
    }
    if dominance && archive.members().iter().any(|(c, _)| c.area_total <= area_total && c.power <= power + POWER_EPS) {
        return Bound::Dominated;
    }
    Bound::Within
}

/// Allowed (duration, level) pairs for a type, fastest first.
fn choices_of(lib: &ResourceLibrary, ty: usize, mode: ArchMode) -> impl Iterator<Item = (u32, usize)> + '_ {
    let levels = lib.levels(ty);
    let usable = if mode == ArchMode::SingleVdd { 1 } else { levels.len() };
    levels[..usable].iter().enumerate().map(|(i, l)| (l.cycles, i))
}

struct Search<'a> {
    g: &'a Dfg,
    t: &'a TimingInfo,
    lib: &'a ResourceLibrary,
    cfg: &'a SearchConfig,
    model: CostModel<'a>,
    caps: Vec<Option<u32>>,
    order: Vec<usize>,
    node_type: Vec<usize>,
    /// Per node, allowed (duration, level) pairs fastest first.
    choices: Vec<Vec<(u32, usize)>>,
    slots: Vec<Option<Slot>>,
    levels: Vec<usize>,
    /// Busy count per (type, level, step) and per (type, step).
    busy_level: Vec<Vec<Vec<u32>>>,
    busy_type: Vec<Vec<u32>>,
    peak_level: Vec<Vec<u32>>,
    peak_type: Vec<u32>,
    /// Dynamic (+ gated leakage for DVS) power of the placed prefix, per depth.
    additive: Vec<f64>,
    lookahead: Lookahead,
    /// Earliest start each unplaced node can still get, and the cheapest
    /// power per type of the unplaced nodes at the current depth.
    early: Vec<u32>,
    floor: Vec<f64>,
    /// Earlier twin each node must not start before.
    twin: Vec<Option<usize>>,
    prefix: Vec<u32>,
    archive: ParetoSet,
    /// Archive points sorted by area.
    staircase: Vec<(u32, f64)>,
    first: Option<FirstSolution>,
    started: Instant,
    deadline: Option<Instant>,
    expanded: u64,
    budget_prunes: u64,
    dominance_prunes: u64,
    timed_out: bool,
    stop: bool,
    stop_at_first: bool,
    trace: Vec<(u32, f64)>,
}

impl<'a> Search<'a> {
    fn new(
        g: &'a Dfg,
        t: &'a TimingInfo,
        lib: &'a ResourceLibrary,
        cfg: &'a SearchConfig,
        stop_at_first: bool,
    ) -> Self {
        let model = CostModel::new(g, lib, cfg.mode, t.latency_bound);
        let node_type: Vec<usize> = (0..g.len()).map(|v| model.node_type(v)).collect();
        let choices = node_type.iter().map(|&ty| choices_of(lib, ty, cfg.mode).collect()).collect();
        let order = g.topo_indices().to_vec();
        let lookahead = Lookahead::new(t, lib, cfg.mode, &order, &node_type, cfg.lookahead);
        let horizon = t.latency_bound as usize + 1;
        let twin = (0..g.len())
            .map(|v| {
                if !cfg.symmetry_breaking {
                    return None;
                }
                (0..v)
                    .rev()
                    .find(|&u| node_type[u] == node_type[v] && g.preds(u) == g.preds(v) && g.succs(u) == g.succs(v))
            })
            .collect();
        let started = Instant::now();
        Search {
            g,
            t,
            lib,
            cfg,
            model,
            caps: cfg.budget.caps_for(lib),
            order,
            node_type,
            choices,
            slots: vec![None; g.len()],
            levels: vec![0; g.len()],
            busy_level: lib.types().iter().map(|e| vec![vec![0; horizon]; e.levels.len()]).collect(),
            busy_type: vec![vec![0; horizon]; lib.types().len()],
            peak_level: lib.types().iter().map(|e| vec![0; e.levels.len()]).collect(),
            peak_type: vec![0; lib.types().len()],
            additive: vec![0.0; g.len() + 1],
            lookahead,
            early: vec![0; g.len()],
            floor: vec![0.0; lib.types().len()],
            twin,
            prefix: vec![0; horizon],
            archive: ParetoSet::new(),
            staircase: Vec::new(),
            first: None,
            started,
            deadline: cfg.time_limit.map(|d| started + d),
            expanded: 0,
            budget_prunes: 0,
            dominance_prunes: 0,
            timed_out: false,
            stop: false,
            stop_at_first,
            trace: Vec::new(),
        }
    }

    fn area_by_type(&self) -> Vec<u32> {
        match self.cfg.mode {
            ArchMode::Fgdvs | ArchMode::SingleVdd => self.peak_type.clone(),
            ArchMode::MultiVdd => self.peak_level.iter().map(|p| p.iter().sum()).collect(),
        }
    }

    /// Monotone lower bound on the power of any completion of the prefix at `depth`.
    fn power_bound(&mut self, depth: usize) -> f64 {
        self.committed_power(depth) + self.update_floor(depth)
    }

    /// Refreshes `floor` for the unplaced nodes from `depth` on; returns its sum.
    fn update_floor(&mut self, depth: usize) -> f64 {
        self.floor.iter_mut().for_each(|f| *f = 0.0);
        if !self.lookahead.enabled() {
            return 0.0;
        }
        for &u in &self.order[depth..] {
            let mut e = self.t.asap[u];
            for &p in self.g.preds(u) {
                e = e.max(match self.slots[p] {
                    Some(s) => s.start + s.duration,
                    None => self.early[p] + 1,
                });
            }
            self.early[u] = e;
            let ty = self.node_type[u];
            self.floor[ty] += self.lookahead.cheapest(ty, self.t.alap[u] + 1 - e);
        }
        self.floor.iter().sum()
    }

    /// Power of the placed prefix that no completion can undo.
    fn committed_power(&self, depth: usize) -> f64 {
        let additive = self.additive[depth];
        match self.cfg.mode {
            ArchMode::Fgdvs => additive,
            ArchMode::SingleVdd | ArchMode::MultiVdd => {
                let t = f64::from(self.t.latency_bound);
                let mut leakage = 0.0;
                for (ty, peaks) in self.peak_level.iter().enumerate() {
                    for (l, &count) in peaks.iter().enumerate() {
                        leakage += f64::from(count) * self.lib.levels(ty)[l].plk * t;
                    }
                }
                additive + leakage
            }
        }
    }

    fn place(&mut self, v: usize, slot: Slot, level: usize) -> (u32, u32) {
        let ty = self.node_type[v];
        let saved = (self.peak_type[ty], self.peak_level[ty][level]);
        for step in slot.start..=slot.end() {
            let s = step as usize;
            self.busy_type[ty][s] += 1;
            self.busy_level[ty][level][s] += 1;
            self.peak_type[ty] = self.peak_type[ty].max(self.busy_type[ty][s]);
            self.peak_level[ty][level] = self.peak_level[ty][level].max(self.busy_level[ty][level][s]);
        }
        self.slots[v] = Some(slot);
        self.levels[v] = level;
        saved
    }

    fn unplace(&mut self, v: usize, slot: Slot, level: usize, saved: (u32, u32)) {
        let ty = self.node_type[v];
        for step in slot.start..=slot.end() {
            let s = step as usize;
            self.busy_type[ty][s] -= 1;
            self.busy_level[ty][level][s] -= 1;
        }
        self.peak_type[ty] = saved.0;
        self.peak_level[ty][level] = saved.1;
        self.slots[v] = None;
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if let Some(deadline) = self.deadline {
            if self.expanded.is_multiple_of(256) && Instant::now() >= deadline {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    fn run(&mut self, depth: usize) {
        if self.stop || self.out_of_time() {
            return;
        }
        self.expanded += 1;
        if depth == self.order.len() {
            self.complete();
            return;
        }
        let v = self.order[depth];
        let earliest = self
            .g
            .preds(v)
            .iter()
            .map(|&p| {
                let s = self.slots[p].expect("parents precede children in topological order");
                s.start + s.duration
            })
            .max()
            .unwrap_or(0)
            .max(self.t.asap[v])
            .max(self.twin[v].map_or(0, |u| self.slots[u].expect("twins are placed in id order").start));
        let alap = self.t.alap[v];
        let ty = self.node_type[v];
        for start in earliest..=alap {
            for ci in 0..self.choices[v].len() {
                let (duration, level) = self.choices[v][ci];
                if start + duration - 1 > alap {
                    break;
                }
                let slot = Slot::new(start, duration);
                let saved = self.place(v, slot, level);
                let lv = &self.lib.levels(ty)[level];
                let mut add = lv.pdyn * f64::from(duration);
                if self.cfg.mode == ArchMode::Fgdvs {
                    add += lv.plk * f64::from(duration);
                }
                self.additive[depth + 1] = self.additive[depth] + add;

                let exact = self.area_by_type();
                let mut area = exact.clone();
                let power = self.power_bound(depth + 1);
                if self.cfg.cross_check {
                    self.cross_check(&exact, self.committed_power(depth + 1));
                }
                let mut verdict = self.check(&area, power);
                if verdict == Bound::Within {
                    self.lookahead.area_bound(depth + 1, &self.busy_type, &mut self.prefix, &mut area);
                    verdict = self.check(&area, power);
                }
                if verdict == Bound::Within
                    && self.cfg.dominance_pruning
                    && self.lookahead.covered(
                        depth + 1,
                        &self.busy_type,
                        &area,
                        &exact,
                        &self.floor,
                        self.committed_power(depth + 1),
                        &self.staircase,
                        POWER_EPS,
                    )
                {
                    verdict = Bound::Dominated;
                }
                match verdict {
                    Bound::OverBudget => self.budget_prunes += 1,
                    Bound::Dominated => self.dominance_prunes += 1,
                    Bound::Within => self.run(depth + 1),
                }
                self.unplace(v, slot, level, saved);
                if self.stop || self.timed_out {
                    return;
                }
            }
        }
    }

    fn check(&self, area: &[u32], power: f64) -> Bound {
        let total = area.iter().sum();
        check_bound(area, total, power, &self.archive, &self.cfg.budget, &self.caps, self.cfg.dominance_pruning)
    }

    fn cross_check(&self, area: &[u32], power: f64) {
        let full = self.model.evaluate_partial(&self.slots).expect("placed durations come from the library");
        assert_eq!(full.area_by_type, area, "incremental area diverged");
        let bound_part = full.breakdown.dynamic + full.breakdown.leakage;
        assert!((bound_part - power).abs() <= 1e-6, "incremental power diverged: {bound_part} vs {power}");
    }

    fn complete(&mut self) {
        let cost = self.model.evaluate_partial(&self.slots).expect("placed durations come from the library");
        if !self.cfg.budget.admits(&cost, &self.caps) {
            self.budget_prunes += 1;
            return;
        }
        let schedule = Schedule::new(self.slots.iter().map(|s| s.expect("complete")).collect());
        if self.first.is_none() && (self.cfg.emit_first_solution || self.stop_at_first) {
            self.first =
                Some(FirstSolution { cost: cost.clone(), schedule: schedule.clone(), elapsed: self.started.elapsed() });
        }
        if self.stop_at_first {
            self.stop = true;
            return;
        }
        let point = (cost.area_total, cost.power);
        if self.archive.insert(cost, schedule) {
            self.staircase = self.archive.points();
            if self.cfg.record_trace {
                self.trace.push(point);
            }
        }
    }

    fn report(self) -> SearchReport {
        SearchReport {
            front: self.archive,
            first_solution: self.first,
            nodes_expanded: self.expanded,
            budget_prunes: self.budget_prunes,
            dominance_prunes: self.dominance_prunes,
            completed: !self.timed_out,
            elapsed: self.started.elapsed(),
            trace: self.trace,
        }
    }
}

/// The exact pareto front of all budget-satisfying schedules (when the
/// search completes).
pub fn bb_pareto(g: &Dfg, t: &TimingInfo, lib: &ResourceLibrary, cfg: &SearchConfig) -> SearchReport {
    let mut search = Search::new(g, t, lib, cfg, false);
    search.run(0);
    search.report()
}

/// The first complete budget-satisfying schedule in search order, if any.
/// Not necessarily non-dominated.
pub fn bb_first(g: &Dfg, t: &TimingInfo, lib: &ResourceLibrary, cfg: &SearchConfig) -> Option<FirstSolution> {
    bb_first_report(g, t, lib, cfg).first_solution
}

/// [`bb_first`] with search statistics. `completed` is false when the time
/// limit ran out before a solution was found or the space was exhausted.
pub fn bb_first_report(g: &Dfg, t: &TimingInfo, lib: &ResourceLibrary, cfg: &SearchConfig) -> SearchReport {
    let mut search = Search::new(g, t, lib, cfg, true);
    search.run(0);
    search.report()
}
