//! CSV and JSON result formats. See `docs/formats.md` for the schemas.

use std::collections::BTreeMap;

use dvsched::{
    ArchMode, Budget, CostTuple, Dfg, OpType, ParetoSet, PowerBreakdown, ResourceLibrary, Schedule, SearchReport,
};
use serde::{Deserialize, Serialize};

/// Power columns are printed with this many decimals.
pub const POWER_DECIMALS: usize = 6;

pub fn fmt_power(p: f64) -> String {
    format!("{p:.POWER_DECIMALS$}")
}

pub fn front_header(lib: &ResourceLibrary) -> Vec<String> {
    let mut h = vec!["area_total".to_string()];
    h.extend(lib.types().iter().map(|t| format!("area_{}", t.op)));
    h.extend(["power_total", "power_dynamic", "power_leakage", "power_switching", "latency"].map(String::from));
    h
}

pub fn front_record(cost: &CostTuple) -> Vec<String> {
    let mut r = vec![cost.area_total.to_string()];
    r.extend(cost.area_by_type.iter().map(u32::to_string));
    r.push(fmt_power(cost.power));
    r.push(fmt_power(cost.breakdown.dynamic));
    r.push(fmt_power(cost.breakdown.leakage));
    r.push(fmt_power(cost.breakdown.switching));
    r.push(cost.latency.to_string());
    r
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory csv writer cannot fail");
    String::from_utf8(bytes).expect("csv fields are ascii")
}

/// One row per front point, ascending area then power, with a trailing
/// `completed` flag.
pub fn front_csv(lib: &ResourceLibrary, front: &ParetoSet, completed: bool) -> String {
    let mut w = writer();
    let mut h = front_header(lib);
    h.push("completed".into());
    w.write_record(&h).unwrap();
    for (cost, _) in front.sorted() {
        let mut r = front_record(cost);
        r.push(completed.to_string());
        w.write_record(&r).unwrap();
    }
    finish(w)
}

/// Long-format front table with a leading `mode` column.
pub fn compare_csv(lib: &ResourceLibrary, runs: &[(ArchMode, SearchReport)]) -> String {
    let mut w = writer();
    let mut h = vec!["mode".to_string()];
    h.extend(front_header(lib));
    h.push("completed".into());
    w.write_record(&h).unwrap();
    for (mode, report) in runs {
        for (cost, _) in report.front.sorted() {
            let mut r = vec![mode.to_string()];
            r.extend(front_record(cost));
            r.push(report.completed.to_string());
            w.write_record(&r).unwrap();
        }
    }
    finish(w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k: u32,
    pub latency_bound: u32,
    pub points: usize,
    pub min_area: Option<u32>,
    pub max_area: Option<u32>,
    pub min_power: Option<f64>,
    pub max_power: Option<f64>,
    pub completed: bool,
}

impl SweepRow {
    pub fn new(k: u32, latency_bound: u32, report: &SearchReport) -> Self {
        let pts = report.front.points();
        let areas = pts.iter().map(|p| p.0);
        let powers = || pts.iter().map(|p| p.1);
        SweepRow {
            k,
            latency_bound,
            points: pts.len(),
            min_area: areas.clone().min(),
            max_area: areas.max(),
            min_power: powers().reduce(f64::min),
            max_power: powers().reduce(f64::max),
            completed: report.completed,
        }
    }
}

/// Per-k summary table. Empty fronts leave the min/max cells blank.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = writer();
    w.write_record(["k", "latency_bound", "points", "min_area", "max_area", "min_power", "max_power", "completed"])
        .unwrap();
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.latency_bound.to_string(),
            r.points.to_string(),
            opt(r.min_area.map(|a| a.to_string())),
            opt(r.max_area.map(|a| a.to_string())),
            opt(r.min_power.map(fmt_power)),
            opt(r.max_power.map(fmt_power)),
            r.completed.to_string(),
        ])
        .unwrap();
    }
    finish(w)
}

/// Merged (area, power, latency) front; `latency` is the bound T of the
/// slack the point came from.
pub fn merged_csv(lib: &ResourceLibrary, points: &[(u32, CostTuple)]) -> String {
    let mut w = writer();
    let mut h = vec!["k".to_string()];
    h.extend(front_header(lib));
    w.write_record(&h).unwrap();
    for (k, cost) in points {
        let mut r = vec![k.to_string()];
        r.extend(front_record(cost));
        w.write_record(&r).unwrap();
    }
    finish(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub id: u32,
    pub op: String,
    pub start: u32,
    pub duration: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub area_total: u32,
    pub area_by_type: BTreeMap<String, u32>,
    pub power: f64,
    pub breakdown: PowerBreakdown,
    pub latency: u32,
    pub schedule: Vec<Placement>,
}

impl FrontPoint {
    pub fn new(g: &Dfg, lib: &ResourceLibrary, cost: &CostTuple, s: &Schedule) -> Self {
        FrontPoint {
            area_total: cost.area_total,
            area_by_type: lib.types().iter().zip(&cost.area_by_type).map(|(t, &a)| (t.op.to_string(), a)).collect(),
            power: cost.power,
            breakdown: cost.breakdown,
            latency: cost.latency,
            schedule: g
                .nodes()
                .iter()
                .zip(s.slots())
                .map(|(n, slot)| Placement {
                    id: n.id,
                    op: n.op.to_string(),
                    start: slot.start,
                    duration: slot.duration,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub budget_prunes: u64,
    pub dominance_prunes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstFound {
    pub area_total: u32,
    pub power: f64,
    pub elapsed_seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BudgetCaps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<BTreeMap<String, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
}

impl BudgetCaps {
    pub fn from_budget(b: &Budget) -> Self {
        match b {
            Budget::None => BudgetCaps::default(),
            Budget::Power(p) => BudgetCaps { power: Some(*p), area: None },
            Budget::Area(caps) => {
                BudgetCaps { area: Some(caps.iter().map(|(k, v)| (k.to_string(), *v)).collect()), power: None }
            }
        }
    }

    pub fn to_budget(&self) -> Result<Budget, String> {
        match (&self.area, self.power) {
            (None, None) => Ok(Budget::None),
            (Some(caps), None) if caps.keys().any(String::is_empty) => Err("area budget names an empty op type".into()),
            (Some(caps), None) => Ok(Budget::Area(caps.iter().map(|(k, v)| (OpType::new(k.as_str()), *v)).collect())),
            (None, Some(p)) => Budget::power(p),
            (Some(_), Some(_)) => Err("budget sets both an area and a power cap".into()),
        }
    }
}

/// JSON sidecar of one front: every schedule plus run statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub graph: String,
    pub mode: ArchMode,
    pub k: u32,
    pub latency_bound: u32,
    pub algorithm: String,
    pub budget: BudgetCaps,
    pub completed: bool,
    pub elapsed_seconds: f64,
    /// Absent for the brute-force oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<SearchStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_solution: Option<FirstFound>,
    pub front: Vec<FrontPoint>,
}

impl Sidecar {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g: &Dfg,
        lib: &ResourceLibrary,
        mode: ArchMode,
        k: u32,
        latency_bound: u32,
        algorithm: &str,
        budget: &Budget,
        front: &ParetoSet,
    ) -> Self {
        Sidecar {
            graph: g.name().to_string(),
            mode,
            k,
            latency_bound,
            algorithm: algorithm.to_string(),
            budget: BudgetCaps::from_budget(budget),
            completed: true,
            elapsed_seconds: 0.0,
            stats: None,
            first_solution: None,
            front: front.sorted().into_iter().map(|(c, s)| FrontPoint::new(g, lib, c, s)).collect(),
        }
    }

    pub fn with_report(mut self, report: &SearchReport) -> Self {
        self.completed = report.completed;
        self.elapsed_seconds = report.elapsed.as_secs_f64();
        self.stats = Some(SearchStats {
            nodes_expanded: report.nodes_expanded,
            budget_prunes: report.budget_prunes,
            dominance_prunes: report.dominance_prunes,
        });
        self.first_solution = report.first_solution.as_ref().map(|f| FirstFound {
            area_total: f.cost.area_total,
            power: f.cost.power,
            elapsed_seconds: f.elapsed.as_secs_f64(),
        });
        self
    }
}
