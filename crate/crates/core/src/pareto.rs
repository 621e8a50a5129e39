//! Dominance on (area, power) costs and the non-dominated archive.

use crate::cost::CostTuple;
use crate::schedule::Schedule;

/// Absolute tolerance for power comparisons, mW.
pub const POWER_EPS: f64 = 1e-9;

fn power_le(a: f64, b: f64) -> bool {
    a <= b + POWER_EPS
}

fn power_lt(a: f64, b: f64) -> bool {
    a < b - POWER_EPS
}

pub fn power_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= POWER_EPS
}

/// `c1` is no worse in area and power and strictly better in one of them.
pub fn dominates(c1: &CostTuple, c2: &CostTuple) -> bool {
    c1.area_total <= c2.area_total
        && power_le(c1.power, c2.power)
        && (c1.area_total < c2.area_total || power_lt(c1.power, c2.power))
}

/// Dominance over (area, power, latency).
pub fn dominates3(c1: &CostTuple, c2: &CostTuple) -> bool {
    c1.area_total <= c2.area_total
        && power_le(c1.power, c2.power)
        && c1.latency <= c2.latency
        && (c1.area_total < c2.area_total || power_lt(c1.power, c2.power) || c1.latency < c2.latency)
}

/// Dominates or matches: no worse in both area and power.
pub fn covers(c1: &CostTuple, c2: &CostTuple) -> bool {
    c1.area_total <= c2.area_total && power_le(c1.power, c2.power)
}

pub fn same_point(c1: &CostTuple, c2: &CostTuple) -> bool {
    c1.area_total == c2.area_total && power_eq(c1.power, c2.power)
}

/// Mutually non-dominated `(cost, schedule)` pairs, at most one per cost point.
#[derive(Clone, Debug, Default)]
pub struct ParetoSet {
    members: Vec<(CostTuple, Schedule)>,
}

impl ParetoSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Inserts unless dominated or duplicating an existing point; evicts
    /// members the candidate dominates. Returns whether it was accepted.
    pub fn insert(&mut self, cost: CostTuple, schedule: Schedule) -> bool {
        if self.members.iter().any(|(c, _)| covers(c, &cost)) {
            return false;
        }
        self.members.retain(|(c, _)| !dominates(&cost, c));
        self.members.push((cost, schedule));
        true
    }

    /// True if some member dominates or matches `cost`.
    pub fn covers(&self, cost: &CostTuple) -> bool {
        self.members.iter().any(|(c, _)| covers(c, cost))
    }

    /// Members in insertion order.
    pub fn members(&self) -> &[(CostTuple, Schedule)] {
        &self.members
    }

    /// Members sorted by ascending area, then power.
    pub fn sorted(&self) -> Vec<&(CostTuple, Schedule)> {
        let mut v: Vec<_> = self.members.iter().collect();
        v.sort_by(|a, b| a.0.area_total.cmp(&b.0.area_total).then(a.0.power.total_cmp(&b.0.power)));
        v
    }

    /// Sorted `(area, power)` points.
    pub fn points(&self) -> Vec<(u32, f64)> {
        self.sorted().into_iter().map(|(c, _)| (c.area_total, c.power)).collect()
    }

    pub fn merge(&mut self, other: ParetoSet) {
        for (c, s) in other.members {
            self.insert(c, s);
        }
    }

    pub fn into_members(self) -> Vec<(CostTuple, Schedule)> {
        self.members
    }
}

/// Whether two fronts hold the same cost points (exact area, power within tolerance).
pub fn same_points(a: &[(u32, f64)], b: &[(u32, f64)]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && power_eq(x.1, y.1))
}

/// Non-dominated subset under [`dominates3`]; equal triples keep the first.
pub fn filter3(points: &[CostTuple]) -> Vec<CostTuple> {
    let mut out: Vec<CostTuple> = Vec::new();
    for p in points {
        let dup = out.iter().any(|q| dominates3(q, p) || (same_point(q, p) && q.latency == p.latency));
        if dup {
            continue;
        }
        out.retain(|q| !dominates3(p, q));
        out.push(p.clone());
    }
    out
}
