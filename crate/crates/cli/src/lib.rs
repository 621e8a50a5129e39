//! `dvsched` command-line front-end.
//!
//! Every command writes its results to `--out` (or stdout) and reports
//! problems on stderr. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure writing results |
//! | 2 | bad arguments, unreadable or invalid DFG / library / schedule file |
//! | 3 | instance too large for the brute-force oracle |
//! | 4 | time limit hit; partial results were still written |

pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dvsched::pareto::{covers, dominates, filter3, power_eq};
use dvsched::{
    bb_first_report, bb_pareto, compute_timing, list_schedule, oracle_front, validate_schedule, ArchMode, Budget,
    CostModel, CostTuple, Dfg, EnumerationBound, ListOutcome, OracleError, Priority, ResourceLibrary, Schedule,
    SearchConfig, SearchReport, TimingInfo,
};

use output::{FrontPoint, Sidecar, SweepRow};

#[derive(Debug, Parser)]
#[command(name = "dvsched", version, about = "Pareto (area, power) scheduling of data-flow graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact (area, power) front by branch and bound.
    Pareto(FrontArgs),
    /// Fronts of all three unit styles side by side.
    Compare(CompareArgs),
    /// Fronts for slack 0..=k-max and their merged (area, power, latency) front.
    Sweep(SweepArgs),
    /// One budgeted run of the list scheduler, first-solution search or full search.
    Budget(BudgetArgs),
    /// Exact front by exhaustive enumeration (small graphs only).
    Oracle(OracleArgs),
    /// Check a DFG/library pair, and optionally every schedule of a JSON sidecar.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Data-flow graph file.
    #[arg(long)]
    pub dfg: PathBuf,
    /// Resource library file [default: the bundled library].
    #[arg(long)]
    pub lib: Option<PathBuf>,
    /// Accepted for scripting symmetry; every algorithm is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BudgetFlags {
    /// Per-type instance caps, e.g. `mul=3,add=2,comp=1`.
    #[arg(long, conflicts_with = "power_budget")]
    pub area_budget: Option<String>,
    /// Total power cap in mW.
    #[arg(long)]
    pub power_budget: Option<f64>,
}

impl BudgetFlags {
    fn budget(&self) -> Result<Budget, CliError> {
        match (&self.area_budget, self.power_budget) {
            (Some(a), _) => Budget::parse_area(a).map_err(|e| CliError::Input(format!("--area-budget: {e}"))),
            (None, Some(p)) => Budget::power(p).map_err(|e| CliError::Input(format!("--power-budget: {e}"))),
            (None, None) => Ok(Budget::None),
        }
    }
}

#[derive(Debug, Args)]
pub struct FrontArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "fgdvs")]
    pub mode: ArchMode,
    /// Slack: latency bound is the critical path length plus k.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub budget: BudgetFlags,
    /// Stop the search after this many seconds and report what was found.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Front CSV [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON sidecar with full schedules and statistics.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Per-mode time limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON array with one sidecar per mode.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "fgdvs")]
    pub mode: ArchMode,
    #[arg(long, default_value_t = 3)]
    pub k_max: u32,
    /// Per-slack time limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Per-k summary CSV [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Merged front CSV [default: stdout, after the summary and a blank line].
    #[arg(long)]
    pub front: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    List,
    Bb,
    BbFirst,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "fgdvs")]
    pub mode: ArchMode,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub budget: BudgetFlags,
    #[arg(long, value_enum, default_value_t = Algo::BbFirst)]
    pub algo: Algo,
    /// List-scheduler duration order [default: both].
    #[arg(long)]
    pub priority: Option<Priority>,
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Front CSV of `--algo bb`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "fgdvs")]
    pub mode: ArchMode,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub budget: BudgetFlags,
    #[arg(long, default_value_t = EnumerationBound::default().max_nodes)]
    pub max_nodes: usize,
    #[arg(long, default_value_t = EnumerationBound::default().max_states)]
    pub max_states: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// JSON sidecar whose schedules are re-validated and re-costed.
    #[arg(long)]
    pub schedules: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    OracleCap(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Input(_) => 2,
            CliError::OracleCap(_) => 3,
        }
    }
}

/// How a command that wrote its results ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Done,
    TimeLimit,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Done => 0,
            Status::TimeLimit => 4,
        }
    }

    fn from_completed(all: bool) -> Self {
        if all {
            Status::Done
        } else {
            Status::TimeLimit
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Status, CliError> {
    match cli.command {
        Command::Pareto(a) => cmd_pareto(&a, stdout),
        Command::Compare(a) => cmd_compare(&a, stdout),
        Command::Sweep(a) => cmd_sweep(&a, stdout),
        Command::Budget(a) => cmd_budget(&a, stdout),
        Command::Oracle(a) => cmd_oracle(&a, stdout),
        Command::Validate(a) => cmd_validate(&a, stdout),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load(input: &InputArgs) -> Result<(Dfg, ResourceLibrary), CliError> {
    let g = Dfg::parse(&read(&input.dfg)?).map_err(|e| CliError::Input(format!("{}: {e}", input.dfg.display())))?;
    let lib = match &input.lib {
        Some(p) => ResourceLibrary::parse(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        None => ResourceLibrary::default_library(),
    };
    lib.check_covers(&g).map_err(|e| CliError::Input(e.to_string()))?;
    Ok((g, lib))
}

fn time_limit(secs: Option<f64>) -> Result<Option<Duration>, CliError> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s)
            .ok()
            .filter(|d| !d.is_zero())
            .ok_or_else(|| CliError::Input(format!("--time-limit must be a positive number of seconds, got {s}")))
    })
    .transpose()
}

fn config(mode: ArchMode, budget: Budget, limit: Option<Duration>) -> SearchConfig {
    let mut cfg = SearchConfig::new(mode).with_budget(budget);
    cfg.time_limit = limit;
    cfg
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn emit_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("sidecar is plain data");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn warn_incomplete(what: &str) {
    eprintln!("warning: {what}: time limit reached, results are partial (completed=false)");
}

pub fn cmd_pareto(a: &FrontArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let (g, lib) = load(&a.input)?;
    let budget = a.budget.budget()?;
    let t = compute_timing(&g, a.k);
    let mut cfg = config(a.mode, budget.clone(), time_limit(a.time_limit)?);
    cfg.emit_first_solution = true;
    let report = bb_pareto(&g, &t, &lib, &cfg);
    emit(a.out.as_deref(), &output::front_csv(&lib, &report.front, report.completed), stdout)?;
    if let Some(p) = &a.json {
        let side = Sidecar::new(&g, &lib, a.mode, a.k, t.latency_bound, "bb", &budget, &report.front);
        emit_json(p, &side.with_report(&report))?;
    }
    if !report.completed {
        warn_incomplete(g.name());
    }
    Ok(Status::from_completed(report.completed))
}

/// Multi-Vdd front points matched or beaten by some DVS point, and those
/// strictly dominated.
pub fn domination_counts(multi: &SearchReport, dvs: &SearchReport) -> (usize, usize, usize) {
    let m = multi.front.sorted();
    let d = dvs.front.sorted();
    let covered = m.iter().filter(|(c, _)| d.iter().any(|(e, _)| covers(e, c))).count();
    let strict = m.iter().filter(|(c, _)| d.iter().any(|(e, _)| dominates(e, c))).count();
    (covered, strict, m.len())
}

pub fn compare_summary(multi: &SearchReport, dvs: &SearchReport) -> String {
    let (covered, strict, total) = domination_counts(multi, dvs);
    let pct = if total == 0 { "n/a".to_string() } else { format!("{:.2}%", 100.0 * covered as f64 / total as f64) };
    let mut line = format!(
        "multi-vdd points dominated-or-matched by fgdvs: {covered}/{total} ({pct}); strictly dominated: {strict}/{total}"
    );
    if !(multi.completed && dvs.completed) {
        line.push_str(" [partial fronts]");
    }
    line
}

/// Runs independent searches on scoped threads; results keep input order.
fn parallel<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|it| s.spawn(|| f(it))).collect();
        handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
    })
}

pub fn cmd_compare(a: &CompareArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let (g, lib) = load(&a.input)?;
    let t = compute_timing(&g, a.k);
    let limit = time_limit(a.time_limit)?;
    let reports = parallel(&ArchMode::ALL, |&m| bb_pareto(&g, &t, &lib, &config(m, Budget::None, limit)));
    let runs: Vec<(ArchMode, SearchReport)> = ArchMode::ALL.into_iter().zip(reports).collect();
    emit(a.out.as_deref(), &output::compare_csv(&lib, &runs), stdout)?;
    let find = |m| &runs.iter().find(|(x, _)| *x == m).unwrap().1;
    let line = compare_summary(find(ArchMode::MultiVdd), find(ArchMode::Fgdvs));
    writeln!(stdout, "{line}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    if let Some(p) = &a.json {
        let sides: Vec<Sidecar> = runs
            .iter()
            .map(|(m, r)| {
                Sidecar::new(&g, &lib, *m, a.k, t.latency_bound, "bb", &Budget::None, &r.front).with_report(r)
            })
            .collect();
        emit_json(p, &sides)?;
    }
    let completed = runs.iter().all(|(_, r)| r.completed);
    if !completed {
        warn_incomplete(g.name());
    }
    Ok(Status::from_completed(completed))
}

/// Union of per-slack fronts with latency set to each bound T(k), reduced
/// to its (area, power, latency) non-dominated subset, sorted by area,
/// power, then latency.
pub fn merged_front(runs: &[(u32, TimingInfo, SearchReport)]) -> Vec<(u32, CostTuple)> {
    let mut all: Vec<(u32, CostTuple)> = Vec::new();
    for (k, t, r) in runs {
        for (c, _) in r.front.sorted() {
            all.push((*k, c.clone().with_latency(t.latency_bound)));
        }
    }
    let kept = filter3(&all.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>());
    let mut out: Vec<(u32, CostTuple)> = kept
        .into_iter()
        .map(|c| {
            let k = all
                .iter()
                .find(|(_, x)| x.latency == c.latency && x.area_total == c.area_total && power_eq(x.power, c.power))
                .unwrap()
                .0;
            (k, c)
        })
        .collect();
    out.sort_by(|a, b| {
        a.1.area_total.cmp(&b.1.area_total).then(a.1.power.total_cmp(&b.1.power)).then(a.1.latency.cmp(&b.1.latency))
    });
    out
}

pub fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let (g, lib) = load(&a.input)?;
    let limit = time_limit(a.time_limit)?;
    let ks: Vec<u32> = (0..=a.k_max).collect();
    let runs: Vec<(u32, TimingInfo, SearchReport)> = parallel(&ks, |&k| {
        let t = compute_timing(&g, k);
        let r = bb_pareto(&g, &t, &lib, &config(a.mode, Budget::None, limit));
        (k, t, r)
    });
    let rows: Vec<SweepRow> = runs.iter().map(|(k, t, r)| SweepRow::new(*k, t.latency_bound, r)).collect();
    let merged = output::merged_csv(&lib, &merged_front(&runs));
    match (&a.out, &a.front) {
        (None, None) => emit(None, &format!("{}\n{}", output::sweep_csv(&rows), merged), stdout)?,
        (out, front) => {
            emit(out.as_deref(), &output::sweep_csv(&rows), stdout)?;
            emit(front.as_deref(), &merged, stdout)?;
        }
    }
    let completed = runs.iter().all(|(_, _, r)| r.completed);
    if !completed {
        warn_incomplete(g.name());
    }
    Ok(Status::from_completed(completed))
}

fn tuple(c: &CostTuple) -> String {
    format!("({}, {})", c.area_total, output::fmt_power(c.power))
}

fn secs(d: Duration) -> String {
    format!("time={:.6}s", d.as_secs_f64())
}

pub fn cmd_budget(a: &BudgetArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let (g, lib) = load(&a.input)?;
    let budget = a.budget.budget()?;
    let t = compute_timing(&g, a.k);
    let limit = time_limit(a.time_limit)?;
    let mut lines = Vec::new();
    let mut status = Status::Done;
    match a.algo {
        Algo::List => {
            let priorities = a.priority.map_or(Priority::ALL.to_vec(), |p| vec![p]);
            for p in priorities {
                let clock = Instant::now();
                let out = list_schedule(&g, &t, &lib, a.mode, &budget, p);
                let elapsed = clock.elapsed();
                let result = match &out {
                    ListOutcome::Scheduled { cost, .. } => tuple(cost),
                    ListOutcome::Infeasible { .. } => "INFEASIBLE".into(),
                };
                lines.push(format!("list {p}: {result} {}", secs(elapsed)));
            }
        }
        Algo::BbFirst => {
            let r = bb_first_report(&g, &t, &lib, &config(a.mode, budget.clone(), limit));
            let result = match &r.first_solution {
                Some(f) => tuple(&f.cost),
                None if !r.completed => "NONE (time limit)".into(),
                None => "NONE".into(),
            };
            lines.push(format!("bb-first: {result} {}", secs(r.elapsed)));
            status = Status::from_completed(r.completed);
        }
        Algo::Bb => {
            let r = bb_pareto(&g, &t, &lib, &config(a.mode, budget.clone(), limit));
            let front = r.front.sorted();
            let result = if front.is_empty() {
                "NONE".to_string()
            } else {
                front.iter().map(|(c, _)| tuple(c)).collect::<Vec<_>>().join(" ")
            };
            lines.push(format!("bb: {result} {} completed={}", secs(r.elapsed), r.completed));
            if let Some(p) = &a.out {
                emit(Some(p), &output::front_csv(&lib, &r.front, r.completed), stdout)?;
            }
            if let Some(p) = &a.json {
                let side = Sidecar::new(&g, &lib, a.mode, a.k, t.latency_bound, "bb", &budget, &r.front);
                emit_json(p, &side.with_report(&r))?;
            }
            status = Status::from_completed(r.completed);
        }
    }
    let mut text = lines.join("\n");
    text.push('\n');
    emit(None, &text, stdout)?;
    if status == Status::TimeLimit {
        warn_incomplete(g.name());
    }
    Ok(status)
}

pub fn cmd_oracle(a: &OracleArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let (g, lib) = load(&a.input)?;
    let budget = a.budget.budget()?;
    if a.max_nodes == 0 || a.max_states == 0 {
        return Err(CliError::Input("--max-nodes and --max-states must be positive".into()));
    }
    let bound = EnumerationBound { max_nodes: a.max_nodes, max_states: a.max_states };
    let t = compute_timing(&g, a.k);
    let clock = Instant::now();
    let front = oracle_front(&g, &t, &lib, a.mode, &budget, bound).map_err(|e| match e {
        OracleError::Cost(e) => CliError::Input(e.to_string()),
        cap => CliError::OracleCap(cap.to_string()),
    })?;
    let elapsed = clock.elapsed();
    emit(a.out.as_deref(), &output::front_csv(&lib, &front, true), stdout)?;
    if let Some(p) = &a.json {
        let mut side = Sidecar::new(&g, &lib, a.mode, a.k, t.latency_bound, "oracle", &budget, &front);
        side.elapsed_seconds = elapsed.as_secs_f64();
        emit_json(p, &side)?;
    }
    Ok(Status::Done)
}

/// Re-validates and re-costs every schedule of a sidecar against the graph
/// and library it was computed for. Returns the number of schedules checked.
pub fn check_sidecar(g: &Dfg, lib: &ResourceLibrary, side: &Sidecar) -> Result<usize, String> {
    if side.graph != g.name() {
        return Err(format!("sidecar is for graph `{}`, not `{}`", side.graph, g.name()));
    }
    let t = compute_timing(g, side.k);
    if t.latency_bound != side.latency_bound {
        return Err(format!(
            "latency bound {} does not match T={} at k={}",
            side.latency_bound, t.latency_bound, side.k
        ));
    }
    let budget = side.budget.to_budget()?;
    let caps = budget.caps_for(lib);
    let model = CostModel::new(g, lib, side.mode, t.latency_bound);
    for (i, p) in side.front.iter().enumerate() {
        let at = |msg: String| format!("front point {i} ({}, {}): {msg}", p.area_total, p.power);
        let s = Schedule::from_ids(g, p.schedule.iter().map(|e| (e.id, e.start, e.duration)))
            .map_err(|e| at(e.to_string()))?;
        for e in &p.schedule {
            let op = &g.node(g.index_of(e.id).unwrap()).op;
            if op.as_str() != e.op {
                return Err(at(format!("node {} is `{op}`, sidecar says `{}`", e.id, e.op)));
            }
        }
        validate_schedule(g, lib, &t, &s).map_err(|v| at(v.to_string()))?;
        let cost = model.evaluate(&s).map_err(|e| at(e.to_string()))?;
        if FrontPoint::new(g, lib, &cost, &s).area_by_type != p.area_by_type || cost.area_total != p.area_total {
            return Err(at(format!("recomputed area is {:?}", cost.area_by_type)));
        }
        if !power_eq(cost.power, p.power) || cost.latency != p.latency {
            return Err(at(format!("recomputed cost is {} at latency {}", tuple(&cost), cost.latency)));
        }
        if !budget.admits(&cost, &caps) {
            return Err(at(format!("violates budget {budget}")));
        }
    }
    Ok(side.front.len())
}

pub fn cmd_validate(a: &ValidateArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let (g, lib) = load(&a.input)?;
    let t = compute_timing(&g, 0);
    let types: Vec<String> = g.op_types().iter().map(ToString::to_string).collect();
    let mut text = format!(
        "{}: {} nodes, {} edges, critical length {}, types {}\n",
        g.name(),
        g.len(),
        g.edges().len(),
        t.critical_length,
        types.join(",")
    );
    if let Some(p) = &a.schedules {
        let raw = read(p)?;
        let sides: Vec<Sidecar> = match serde_json::from_str::<Sidecar>(&raw) {
            Ok(s) => vec![s],
            Err(_) => serde_json::from_str(&raw).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        };
        for side in &sides {
            let n = check_sidecar(&g, &lib, side).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            text.push_str(&format!("{} k={}: {n} schedules valid\n", side.mode, side.k));
        }
    }
    emit(None, &text, stdout)?;
    Ok(Status::Done)
}
