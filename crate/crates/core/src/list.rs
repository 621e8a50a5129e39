//! One-pass list scheduling under a latency bound and a budget.
//!
//! Nodes are taken in topological order and placed at their earliest
//! precedence-feasible step. Each node gets the longest (or shortest)
//! duration that meets its deadline and keeps the running cost inside the
//! budget. There is no backtracking: when no duration fits, the whole run
//! fails, even if another assignment of the earlier nodes would have worked.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::cost::{ArchMode, CostModel, CostTuple};
use crate::dfg::Dfg;
use crate::library::ResourceLibrary;
use crate::schedule::{Schedule, Slot};
use crate::timing::TimingInfo;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Priority {
    MaxDuration,
    MinDuration,
}

impl Priority {
    pub const ALL: [Priority; 2] = [Priority::MaxDuration, Priority::MinDuration];

    pub fn as_str(self) -> &'static str {
        match self {
            Priority::MaxDuration => "max-duration",
            Priority::MinDuration => "min-duration",
        }
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Priority {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max-duration" | "max" => Ok(Priority::MaxDuration),
            "min-duration" | "min" => Ok(Priority::MinDuration),
            _ => Err(format!("unknown priority `{s}` (expected max-duration or min-duration)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ListOutcome {
    Scheduled {
        schedule: Schedule,
        cost: CostTuple,
    },
    /// No duration fit this node (by id).
    Infeasible {
        node: u32,
    },
}

impl ListOutcome {
    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            ListOutcome::Scheduled { schedule, .. } => Some(schedule),
            ListOutcome::Infeasible { .. } => None,
        }
    }

    pub fn cost(&self) -> Option<&CostTuple> {
        match self {
            ListOutcome::Scheduled { cost, .. } => Some(cost),
            ListOutcome::Infeasible { .. } => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, ListOutcome::Infeasible { .. })
    }
}

pub fn list_schedule(
    g: &Dfg,
    t: &TimingInfo,
    lib: &ResourceLibrary,
    mode: ArchMode,
    budget: &Budget,
    priority: Priority,
) -> ListOutcome {
    let model = CostModel::new(g, lib, mode, t.latency_bound);
    let caps = budget.caps_for(lib);
    let mut slots: Vec<Option<Slot>> = vec![None; g.len()];
    for &v in g.topo_indices() {
        let start =
            g.preds(v).iter().map(|&p| slots[p].map_or(0, |s| s.start + s.duration)).max().unwrap_or(0).max(t.asap[v]);
        let levels = lib.levels(model.node_type(v));
        let usable = if mode == ArchMode::SingleVdd { 1 } else { levels.len() };
        let mut durations: Vec<u32> = levels[..usable].iter().map(|l| l.cycles).collect();
        if priority == Priority::MaxDuration {
            durations.reverse();
        }
        let mut placed = false;
        for d in durations {
            if start + d - 1 > t.alap[v] {
                continue;
            }
            slots[v] = Some(Slot::new(start, d));
            let partial = model.evaluate_partial(&slots).expect("durations come from the library");
            if budget.admits(&partial, &caps) {
                placed = true;
                break;
            }
        }
        if !placed {
            return ListOutcome::Infeasible { node: g.node(v).id };
        }
    }
    let schedule = Schedule::new(slots.into_iter().map(|s| s.expect("every node placed")).collect());
    let cost = model.evaluate(&schedule).expect("durations come from the library");
    // The switching term can still move once every node is bound.
    if !budget.admits(&cost, &caps) {
        let last = g.topo_indices().last().copied().unwrap_or(0);
        return ListOutcome::Infeasible { node: g.node(last).id };
    }
    ListOutcome::Scheduled { schedule, cost }
}
