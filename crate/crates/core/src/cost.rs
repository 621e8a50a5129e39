//! Area and power of a schedule under the three architecture styles.
//!
//! Area counts functional-unit instances. Power is the sum of per-cycle
//! powers over occupied cycles:
//!
//! * dynamic: `pdyn * duration` per operation, identical in every mode;
//! * leakage: Single-/Multi-Vdd instances are always on and leak for the
//!   whole latency bound, DVS instances are power-gated when idle so only
//!   busy cycles leak;
//! * switching (DVS only): a greedy binding charges `psw` whenever an
//!   operation lands on a unit whose previous use ran at another level.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dfg::Dfg;
use crate::error::CostError;
use crate::library::ResourceLibrary;
use crate::schedule::{Schedule, Slot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchMode {
    SingleVdd,
    MultiVdd,
    Fgdvs,
}

impl ArchMode {
    pub const ALL: [ArchMode; 3] = [ArchMode::SingleVdd, ArchMode::MultiVdd, ArchMode::Fgdvs];

    pub fn as_str(&self) -> &'static str {
        match self {
            ArchMode::SingleVdd => "single-vdd",
            ArchMode::MultiVdd => "multi-vdd",
            ArchMode::Fgdvs => "fgdvs",
        }
    }
}

impl fmt::Display for ArchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single-vdd" => Ok(ArchMode::SingleVdd),
            "multi-vdd" => Ok(ArchMode::MultiVdd),
            "fgdvs" => Ok(ArchMode::Fgdvs),
            other => Err(format!("unknown mode `{other}` (expected single-vdd, multi-vdd or fgdvs)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub dynamic: f64,
    pub leakage: f64,
    pub switching: f64,
}

impl PowerBreakdown {
    pub fn total(&self) -> f64 {
        self.dynamic + self.leakage + self.switching
    }
}

/// Cost of a (possibly partial) schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct CostTuple {
    pub area_total: u32,
    /// Instance count per library type, in library declaration order.
    pub area_by_type: Vec<u32>,
    pub power: f64,
    pub breakdown: PowerBreakdown,
    /// Completion step of the schedule.
    pub latency: u32,
}

impl CostTuple {
    pub fn new(area_by_type: Vec<u32>, breakdown: PowerBreakdown, latency: u32) -> Self {
        CostTuple { area_total: area_by_type.iter().sum(), area_by_type, power: breakdown.total(), breakdown, latency }
    }

    /// A bare (area, power) point, mostly for tests and pruning checks.
    pub fn point(area: u32, power: f64) -> Self {
        CostTuple {
            area_total: area,
            area_by_type: vec![area],
            power,
            breakdown: PowerBreakdown { dynamic: power, leakage: 0.0, switching: 0.0 },
            latency: 0,
        }
    }

    pub fn with_latency(mut self, latency: u32) -> Self {
        self.latency = latency;
        self
    }
}

/// Where an operation landed in the DVS binding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Binding {
    pub instance: u32,
    pub charged: bool,
}

/// Per-node lookups shared by every evaluation on one (graph, library) pair.
#[derive(Clone, Debug)]
pub struct CostModel<'a> {
    g: &'a Dfg,
    lib: &'a ResourceLibrary,
    node_type: Vec<usize>,
    mode: ArchMode,
    latency_bound: u32,
}

impl<'a> CostModel<'a> {
    /// Panics if the library lacks one of the graph's op types; callers
    /// check coverage with [`ResourceLibrary::check_covers`] first.
    pub fn new(g: &'a Dfg, lib: &'a ResourceLibrary, mode: ArchMode, latency_bound: u32) -> Self {
        let node_type = g
            .nodes()
            .iter()
            .map(|n| lib.type_index(&n.op).unwrap_or_else(|| panic!("op type `{}` missing from library", n.op)))
            .collect();
        CostModel { g, lib, node_type, mode, latency_bound }
    }

    pub fn mode(&self) -> ArchMode {
        self.mode
    }

    pub fn node_type(&self, v: usize) -> usize {
        self.node_type[v]
    }

    fn levels(&self, slots: &[Option<Slot>]) -> Result<Vec<usize>, CostError> {
        slots
            .iter()
            .enumerate()
            .map(|(v, slot)| {
                let Some(slot) = slot else { return Ok(UNPLACED) };
                let d = slot.duration;
                let level = self.lib.level_for(self.node_type[v], d).ok_or_else(|| CostError::UnknownLevel {
                    node: self.g.node(v).id,
                    op: self.g.node(v).op.to_string(),
                    duration: d,
                })?;
                if self.mode == ArchMode::SingleVdd && level != 0 {
                    return Err(CostError::NotSingleVdd { node: self.g.node(v).id, duration: d });
                }
                Ok(level)
            })
            .collect()
    }

    fn placed<'s>(slots: &'s [Option<Slot>]) -> impl Iterator<Item = (usize, Slot)> + 's {
        slots.iter().enumerate().filter_map(|(v, s)| s.map(|s| (v, s)))
    }

    fn horizon(slots: &[Option<Slot>]) -> usize {
        Self::placed(slots).map(|(_, s)| s.end()).max().unwrap_or(0) as usize
    }

    /// Peak concurrency per (type, level).
    fn peak_by_level(&self, slots: &[Option<Slot>], levels: &[usize]) -> Vec<Vec<u32>> {
        let horizon = Self::horizon(slots);
        let types = self.lib.types();
        let mut hist: Vec<Vec<Vec<u32>>> =
            types.iter().map(|t| vec![vec![0u32; horizon + 1]; t.levels.len()]).collect();
        for (v, slot) in Self::placed(slots) {
            let row = &mut hist[self.node_type[v]][levels[v]];
            for step in slot.start..=slot.end() {
                row[step as usize] += 1;
            }
        }
        hist.into_iter()
            .map(|per_level| per_level.into_iter().map(|row| row.into_iter().max().unwrap_or(0)).collect())
            .collect()
    }

    /// Peak concurrency per type, ignoring levels.
    fn peak_by_type(&self, slots: &[Option<Slot>]) -> Vec<u32> {
        let horizon = Self::horizon(slots);
        let mut hist = vec![vec![0u32; horizon + 1]; self.lib.types().len()];
        for (v, slot) in Self::placed(slots) {
            for step in slot.start..=slot.end() {
                hist[self.node_type[v]][step as usize] += 1;
            }
        }
        hist.into_iter().map(|row| row.into_iter().max().unwrap_or(0)).collect()
    }

    pub fn area(&self, s: &Schedule) -> Result<Vec<u32>, CostError> {
        let slots = as_partial(s);
        let levels = self.levels(&slots)?;
        Ok(self.area_with_levels(&slots, &levels))
    }

    fn area_with_levels(&self, slots: &[Option<Slot>], levels: &[usize]) -> Vec<u32> {
        match self.mode {
            ArchMode::Fgdvs | ArchMode::SingleVdd => self.peak_by_type(slots),
            ArchMode::MultiVdd => self.peak_by_level(slots, levels).into_iter().map(|l| l.iter().sum()).collect(),
        }
    }

    pub fn power(&self, s: &Schedule) -> Result<PowerBreakdown, CostError> {
        let slots = as_partial(s);
        let levels = self.levels(&slots)?;
        Ok(self.power_with_levels(&slots, &levels))
    }

    fn power_with_levels(&self, slots: &[Option<Slot>], levels: &[usize]) -> PowerBreakdown {
        let level = |v: usize| &self.lib.levels(self.node_type[v])[levels[v]];
        let mut dynamic = 0.0;
        for (v, slot) in Self::placed(slots) {
            dynamic += level(v).pdyn * f64::from(slot.duration);
        }
        let (leakage, switching) = match self.mode {
            ArchMode::Fgdvs => {
                let mut leakage = 0.0;
                for (v, slot) in Self::placed(slots) {
                    leakage += level(v).plk * f64::from(slot.duration);
                }
                let mut switching = 0.0;
                for (v, b) in self.bind(slots, levels).into_iter().enumerate() {
                    if b.is_some_and(|b| b.charged) {
                        switching += level(v).psw;
                    }
                }
                (leakage, switching)
            }
            ArchMode::SingleVdd | ArchMode::MultiVdd => {
                let t = f64::from(self.latency_bound);
                let mut leakage = 0.0;
                for (ty, per_level) in self.peak_by_level(slots, levels).iter().enumerate() {
                    for (l, &count) in per_level.iter().enumerate() {
                        leakage += f64::from(count) * self.lib.levels(ty)[l].plk * t;
                    }
                }
                (leakage, 0.0)
            }
        };
        PowerBreakdown { dynamic, leakage, switching }
    }

    pub fn evaluate(&self, s: &Schedule) -> Result<CostTuple, CostError> {
        self.evaluate_partial(&as_partial(s))
    }

    /// Cost of the placed operations only; `None` slots contribute nothing.
    pub fn evaluate_partial(&self, slots: &[Option<Slot>]) -> Result<CostTuple, CostError> {
        let levels = self.levels(slots)?;
        Ok(CostTuple::new(
            self.area_with_levels(slots, &levels),
            self.power_with_levels(slots, &levels),
            Self::horizon(slots) as u32,
        ))
    }

    /// DVS binding: per type, operations in ascending (start, id) order take
    /// a free unit last used at the same level, else a never-used unit, else
    /// the lowest free unit (charged). The unit pool is the type's peak
    /// concurrency, so a free unit always exists.
    pub fn binding(&self, s: &Schedule) -> Result<Vec<Binding>, CostError> {
        let slots = as_partial(s);
        let levels = self.levels(&slots)?;
        Ok(self.bind(&slots, &levels).into_iter().map(|b| b.expect("complete schedule")).collect())
    }

    fn bind(&self, slots: &[Option<Slot>], levels: &[usize]) -> Vec<Option<Binding>> {
        let pool = self.peak_by_type(slots);
        let mut order: Vec<(usize, Slot)> = Self::placed(slots).collect();
        order.sort_by_key(|&(v, s)| (s.start, v));
        // (last busy step, level) per unit; None = never used.
        let mut units: Vec<Vec<Option<(u32, usize)>>> = pool.iter().map(|&n| vec![None; n as usize]).collect();
        let mut out = vec![None; slots.len()];
        for (v, slot) in order {
            let units = &mut units[self.node_type[v]];
            let free = |u: &Option<(u32, usize)>| matches!(u, Some((end, _)) if *end < slot.start);
            let (instance, charged) =
                if let Some(i) = units.iter().position(|u| free(u) && u.map(|(_, l)| l) == Some(levels[v])) {
                    (i, false)
                } else if let Some(i) = units.iter().position(Option::is_none) {
                    (i, false)
                } else {
                    let i = units.iter().position(free).expect("binding pool smaller than peak concurrency");
                    (i, true)
                };
            units[instance] = Some((slot.end(), levels[v]));
            out[v] = Some(Binding { instance: instance as u32, charged });
        }
        out
    }
}

const UNPLACED: usize = usize::MAX;

fn as_partial(s: &Schedule) -> Vec<Option<Slot>> {
    s.slots().iter().copied().map(Some).collect()
}

/// `(area_total, area_by_type)` of a schedule.
pub fn area_of(g: &Dfg, lib: &ResourceLibrary, s: &Schedule, mode: ArchMode) -> Result<(u32, Vec<u32>), CostError> {
    // The latency bound only matters for leakage.
    let by_type = CostModel::new(g, lib, mode, 0).area(s)?;
    Ok((by_type.iter().sum(), by_type))
}

pub fn power_of(
    g: &Dfg,
    s: &Schedule,
    lib: &ResourceLibrary,
    mode: ArchMode,
    latency_bound: u32,
) -> Result<PowerBreakdown, CostError> {
    CostModel::new(g, lib, mode, latency_bound).power(s)
}
