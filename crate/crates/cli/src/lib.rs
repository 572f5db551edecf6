//! Batch runs, budget sweeps and run comparisons on top of `hsreach-core`.
//!
//! A run directory holds:
//! - `sets.jsonl`: one `{"t","lo","hi"}` record per time step,
//! - `schedule.json`: the array of issued queries,
//! - `report.csv`: `budget,elapsed_s,e_volume,e_radius,n,seed`,
//! - `run.json`: the configuration and per-step errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use hsreach_core::{
    audit_soundness, fixtures, load_system, naive_reach, refined_reach, run_fixed_schedule, sample_hulls,
    BoundPropagation, Budget, Clock, CostModel, ErrorReport, Hyperrect, IntermediateMode, Query, ScheduleLog,
    SimulatedClock, SystemFile, WallClock,
};
use serde::{Deserialize, Serialize};

pub const SETS_FILE: &str = "sets.jsonl";
pub const SCHEDULE_FILE: &str = "schedule.json";
pub const REPORT_FILE: &str = "report.csv";
pub const META_FILE: &str = "run.json";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Refined,
    Naive,
    Fixed,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "refined" => Ok(Mode::Refined),
            "naive" => Ok(Mode::Naive),
            "fixed" => Ok(Mode::Fixed),
            _ => Err(format!("unknown mode {s:?} (refined, naive, fixed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockSpec {
    Wall,
    /// Simulated clock; `None` uses the default model `depth * pass` seconds.
    Simulated(Option<PathBuf>),
}

impl FromStr for ClockSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wall" => Ok(ClockSpec::Wall),
            "sim" => Ok(ClockSpec::Simulated(None)),
            _ => match s.strip_prefix("sim:") {
                Some(p) if !p.is_empty() => Ok(ClockSpec::Simulated(Some(PathBuf::from(p)))),
                _ => Err(format!("unknown clock {s:?} (wall, sim, sim:<cost-model.json>)")),
            },
        }
    }
}

impl ClockSpec {
    pub fn build(&self) -> Result<Box<dyn Clock>> {
        Ok(match self {
            ClockSpec::Wall => Box::new(WallClock::new()),
            ClockSpec::Simulated(None) => Box::new(SimulatedClock::new(CostModel::affine(0.0, 1.0))),
            ClockSpec::Simulated(Some(p)) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading cost model {}", p.display()))?;
                let model: CostModel =
                    serde_json::from_str(&text).with_context(|| format!("parsing cost model {}", p.display()))?;
                Box::new(SimulatedClock::new(model))
            }
        })
    }
}

/// One-line summary printed after a run.
pub fn summary_line(row: &ReportRow, log: &ScheduleLog) -> String {
    format!(
        "n={} queries={} depths={:?} elapsed={:.3}s e_volume={:.4} e_radius={:.4}",
        row.n,
        log.len(),
        log.depths(),
        row.elapsed_s,
        row.e_volume,
        row.e_radius
    )
}

/// Comma-separated depth list, e.g. `4,4,2`.
pub fn parse_schedule(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid depth {d:?} in schedule"))
        })
        .collect()
}

pub fn parse_budgets(s: &str) -> Result<Vec<Budget>, String> {
    s.split(',').map(|b| b.parse::<Budget>()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Path of a system document, or the name of a built-in fixture.
    pub system: String,
    pub mode: Mode,
    pub budget: Option<Budget>,
    pub schedule: Option<Vec<usize>>,
    pub horizon: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub clock: ClockSpec,
    pub refine_levels: usize,
    pub segments: usize,
    pub intermediate: IntermediateMode,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(system: impl Into<String>, mode: Mode, out: impl Into<PathBuf>) -> Self {
        Self {
            system: system.into(),
            mode,
            budget: None,
            schedule: None,
            horizon: None,
            samples: hsreach_core::oracle::DEFAULT_SAMPLES,
            seed: 0,
            clock: ClockSpec::Wall,
            refine_levels: Query::DEFAULT_REFINE_LEVELS,
            segments: Query::DEFAULT_PWL_SEGMENTS,
            intermediate: IntermediateMode::Concrete,
            out: out.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Refined => {
                let b = self.budget.context("refined mode needs --budget")?;
                ensure!(b.seconds() > 0.0, "budget must be positive, got {b}");
            }
            Mode::Fixed => {
                self.schedule.as_ref().context("fixed mode needs --schedule")?;
            }
            Mode::Naive => {}
        }
        ensure!(self.samples >= 1, "--samples must be at least 1");
        Ok(())
    }
}

/// Loads `spec` as a file path, falling back to a built-in fixture name.
pub fn resolve_system(spec: &str) -> Result<SystemFile> {
    let path = Path::new(spec);
    if path.exists() {
        return load_system(path).with_context(|| format!("loading system {spec}"));
    }
    fixtures::by_name(spec).with_context(|| {
        format!(
            "no system file {spec:?} and no built-in fixture of that name (built-ins: {})",
            fixtures::all().iter().map(|f| f.system.name().to_string()).collect::<Vec<_>>().join(", ")
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub budget: Budget,
    pub elapsed_s: f64,
    pub e_volume: f64,
    pub e_radius: f64,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub system: String,
    pub mode: Mode,
    pub budget: Option<Budget>,
    pub schedule: Vec<usize>,
    pub horizon: usize,
    pub samples: usize,
    pub seed: u64,
    pub clock: ClockSpec,
    pub refine_levels: usize,
    pub segments: usize,
    pub intermediate: IntermediateMode,
    pub elapsed_s: f64,
    pub e_total_volume: f64,
    pub e_total_radius: f64,
    pub per_step_e: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub sets: Vec<Hyperrect>,
    pub log: ScheduleLog,
    pub report: ErrorReport,
    pub row: ReportRow,
    pub meta: RunMeta,
}

#[derive(Serialize)]
struct SetRecord<'a> {
    t: usize,
    lo: &'a [f64],
    hi: &'a [f64],
}

fn write_sets(path: &Path, sets: &[Hyperrect]) -> Result<()> {
    let mut text = String::new();
    for (i, s) in sets.iter().enumerate() {
        let rec = SetRecord {
            t: i + 1,
            lo: s.lo(),
            hi: s.hi(),
        };
        text.push_str(&serde_json::to_string(&rec)?);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Reads a sets file back into boxes ordered by time.
pub fn read_sets(path: &Path) -> Result<Vec<Hyperrect>> {
    #[derive(Deserialize)]
    struct Rec {
        t: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let r: Rec = serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        ensure!(r.t == i + 1, "{}: expected t = {}, found {}", path.display(), i + 1, r.t);
        out.push(Hyperrect::new(r.lo, r.hi)?);
    }
    Ok(out)
}

pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize()
        .map(|row| row.with_context(|| format!("parsing {}", path.display())))
        .collect()
}

/// Samples once per sweep: reference hulls depend only on system, x0, n,
/// sample count and seed.
struct Reference {
    system: SystemFile,
    horizon: usize,
    hulls: Vec<Hyperrect>,
}

impl Reference {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let mut system = resolve_system(&cfg.system)?;
        let horizon = cfg.horizon.unwrap_or(system.horizon);
        ensure!(horizon >= 1, "horizon must be at least 1");
        system.horizon = horizon;
        let hulls = sample_hulls(&system.system, &system.initial_set, horizon, cfg.samples, cfg.seed)
            .context("sampling reference trajectories")?;
        Ok(Self {
            system,
            horizon,
            hulls,
        })
    }
}

fn execute(cfg: &RunConfig, reference: &Reference) -> Result<RunOutcome> {
    cfg.validate()?;
    let sys = &reference.system;
    let n = reference.horizon;
    let mut q = Query::new(sys.system.clone(), n)?
        .with_refine_levels(cfg.refine_levels)?
        .with_pwl_segments(cfg.segments)?
        .with_intermediate_mode(cfg.intermediate);
    let mut clock = cfg.clock.build()?;
    let start = clock.now();
    let backend = BoundPropagation;
    let x0 = &sys.initial_set;
    let (sets, log) = match cfg.mode {
        Mode::Refined => refined_reach(&mut q, x0, cfg.budget.expect("validated"), &backend, clock.as_mut())?,
        Mode::Naive => naive_reach(&mut q, x0, &backend, clock.as_mut())?,
        Mode::Fixed => run_fixed_schedule(&mut q, x0, cfg.schedule.as_deref().expect("validated"), &backend, clock.as_mut())?,
    };
    let elapsed_s = clock.now() - start;

    let violations = audit_soundness(&sys.system, x0, &sets, cfg.samples, cfg.seed);
    if let Some(v) = violations.first() {
        bail!(
            "soundness audit failed: {} sampled states outside their sets (first: sample {} at t = {})",
            violations.len(),
            v.sample,
            v.t
        );
    }
    let report = ErrorReport::new(&sets, &reference.hulls, cfg.samples, cfg.seed)?;
    let budget = match cfg.mode {
        Mode::Refined => cfg.budget.expect("validated"),
        Mode::Naive | Mode::Fixed => Budget::Unlimited,
    };
    let row = ReportRow {
        budget,
        elapsed_s,
        e_volume: report.e_total_volume,
        e_radius: report.e_total_radius,
        n,
        seed: cfg.seed,
    };
    let meta = RunMeta {
        system: sys.system.name().to_string(),
        mode: cfg.mode,
        budget: cfg.budget,
        schedule: log.depths(),
        horizon: n,
        samples: cfg.samples,
        seed: cfg.seed,
        clock: cfg.clock.clone(),
        refine_levels: cfg.refine_levels,
        segments: cfg.segments,
        intermediate: cfg.intermediate,
        elapsed_s,
        e_total_volume: report.e_total_volume,
        e_total_radius: report.e_total_radius,
        per_step_e: report.per_step_e.clone(),
    };
    Ok(RunOutcome {
        sets,
        log,
        report,
        row,
        meta,
    })
}

fn write_outcome(dir: &Path, out: &RunOutcome) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_sets(&dir.join(SETS_FILE), &out.sets)?;
    fs::write(dir.join(SCHEDULE_FILE), out.log.to_json() + "\n")?;
    write_report(&dir.join(REPORT_FILE), std::slice::from_ref(&out.row))?;
    fs::write(dir.join(META_FILE), serde_json::to_string_pretty(&out.meta)? + "\n")?;
    Ok(())
}

/// Runs one configuration and writes its run directory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let reference = Reference::new(cfg)?;
    let out = execute(cfg, &reference)?;
    write_outcome(&cfg.out, &out)?;
    Ok(out)
}

/// One refined run per budget, in order. Each run lands in
/// `<out>/run_<i>`, and the rows are collected in `<out>/sweep.csv`.
pub fn sweep(cfg: &RunConfig, budgets: &[Budget]) -> Result<Vec<ReportRow>> {
    ensure!(budgets.len() >= 2, "a sweep needs at least two budgets");
    ensure!(cfg.mode == Mode::Refined, "sweeps vary the budget of refined runs");
    let mut probe = cfg.clone();
    probe.budget = Some(budgets[0]);
    probe.validate()?;
    let reference = Reference::new(cfg)?;
    let mut rows = Vec::with_capacity(budgets.len());
    for (i, &b) in budgets.iter().enumerate() {
        let mut c = cfg.clone();
        c.budget = Some(b);
        c.out = cfg.out.join(format!("run_{i}"));
        let out = execute(&c, &reference)?;
        write_outcome(&c.out, &out)?;
        rows.push(out.row);
    }
    write_report(&cfg.out.join(SWEEP_FILE), &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a: (String, ReportRow),
    pub b: (String, ReportRow),
}

impl Comparison {
    pub fn volume_ratio(&self) -> f64 {
        self.b.1.e_volume / self.a.1.e_volume
    }

    pub fn radius_ratio(&self) -> f64 {
        self.b.1.e_radius / self.a.1.e_radius
    }

    pub fn time_ratio(&self) -> f64 {
        self.b.1.elapsed_s / self.a.1.elapsed_s
    }

    /// Table with one column per run and a ratio column (B / A).
    pub fn table(&self) -> String {
        let w = self.a.0.len().max(self.b.0.len()).max(10);
        let mut s = String::new();
        let _ = writeln!(s, "{:<16}{:>w$}  {:>w$}  {:>8}", "", self.a.0, self.b.0, "B/A");
        let rows = [
            ("Error (volume)", self.a.1.e_volume, self.b.1.e_volume, self.volume_ratio()),
            ("Error (radius)", self.a.1.e_radius, self.b.1.e_radius, self.radius_ratio()),
            ("Time (s)", self.a.1.elapsed_s, self.b.1.elapsed_s, self.time_ratio()),
        ];
        for (label, a, b, r) in rows {
            let _ = writeln!(s, "{label:<16}{:>w$}  {:>w$}  {:>8.3}", sig3(a), sig3(b), r);
        }
        s
    }
}

/// Three significant digits, the way result tables usually print them.
fn sig3(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (2 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn load_run(dir: &Path) -> Result<(RunMeta, ReportRow)> {
    let meta_path = dir.join(META_FILE);
    let meta: RunMeta = serde_json::from_str(
        &fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?,
    )
    .with_context(|| format!("parsing {}", meta_path.display()))?;
    let rows = read_report(&dir.join(REPORT_FILE))?;
    ensure!(rows.len() == 1, "{}: expected one report row", dir.display());
    Ok((meta, rows.into_iter().next().expect("one row")))
}

fn label(meta: &RunMeta) -> String {
    match (meta.mode, meta.budget) {
        (Mode::Refined, Some(b)) => format!("refined@{b}"),
        (Mode::Fixed, _) => "fixed".into(),
        (Mode::Naive, _) => "naive".into(),
        (Mode::Refined, None) => "refined".into(),
    }
}

/// Compares two run directories made on the same system, horizon and
/// oracle seed.
pub fn compare(a: &Path, b: &Path) -> Result<Comparison> {
    let (ma, ra) = load_run(a)?;
    let (mb, rb) = load_run(b)?;
    ensure!(ma.system == mb.system, "runs are on different systems: {} vs {}", ma.system, mb.system);
    ensure!(ra.n == rb.n, "runs have different horizons: {} vs {}", ra.n, rb.n);
    ensure!(ra.seed == rb.seed, "runs have different oracle seeds: {} vs {}", ra.seed, rb.seed);
    ensure!(ma.samples == mb.samples, "runs have different sample counts: {} vs {}", ma.samples, mb.samples);
    let (mut la, mut lb) = (label(&ma), label(&mb));
    if la == lb {
        la.push_str(" (A)");
        lb.push_str(" (B)");
    }
    Ok(Comparison {
        a: (la, ra),
        b: (lb, rb),
    })
}

/// Writes every built-in fixture as `<name>.json` plus `<name>_net.json`.
pub fn export_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for f in fixtures::all() {
        let name = f.system.name().to_string();
        let net_name = format!("{name}_net.json");
        let net = f.system.controller().context("fixture has a controller")?;
        let net_path = dir.join(&net_name);
        fs::File::create(&net_path)?.write_all((net.to_json() + "\n").as_bytes())?;
        let sys_path = dir.join(format!("{name}.json"));
        fs::write(&sys_path, f.to_document(Some(&net_name)) + "\n")?;
        written.push(sys_path);
        written.push(net_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        assert_eq!("refined".parse::<Mode>().unwrap(), Mode::Refined);
        assert!("greedy".parse::<Mode>().is_err());
        assert_eq!("wall".parse::<ClockSpec>().unwrap(), ClockSpec::Wall);
        assert_eq!(
            "sim:costs.json".parse::<ClockSpec>().unwrap(),
            ClockSpec::Simulated(Some("costs.json".into()))
        );
        assert_eq!("sim".parse::<ClockSpec>().unwrap(), ClockSpec::Simulated(None));
        assert!("sim:".parse::<ClockSpec>().is_err());
        assert_eq!(parse_schedule("4, 4,2").unwrap(), vec![4, 4, 2]);
        assert!(parse_schedule("4,x").is_err());
        assert_eq!(parse_budgets("1,inf").unwrap(), vec![Budget::Seconds(1.0), Budget::Unlimited]);
    }

    #[test]
    fn report_csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("hsreach-report-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("r.csv");
        let rows = vec![
            ReportRow { budget: Budget::Seconds(2.5), elapsed_s: 1.25, e_volume: 3.0, e_radius: 1.5, n: 20, seed: 7 },
            ReportRow { budget: Budget::Unlimited, elapsed_s: 9.0, e_volume: 1.1, e_radius: 1.01, n: 20, seed: 7 },
        ];
        write_report(&path, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("budget,elapsed_s,e_volume,e_radius,n,seed\n"), "{text}");
        assert!(text.contains("\ninf,"));
        assert_eq!(read_report(&path).unwrap(), rows);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sig3_formatting() {
        assert_eq!(sig3(11.9), "11.9");
        assert_eq!(sig3(1.94), "1.94");
        assert_eq!(sig3(117.0), "117");
        assert_eq!(sig3(0.01234), "0.0123");
    }

    #[test]
    fn validation_messages() {
        let mut c = RunConfig::new("pendulum", Mode::Refined, "out");
        assert!(c.validate().is_err());
        c.budget = Some(Budget::Seconds(0.0));
        assert!(c.validate().is_err());
        c.budget = Some(Budget::Unlimited);
        c.validate().unwrap();
        let c = RunConfig::new("pendulum", Mode::Fixed, "out");
        assert!(c.validate().is_err());
    }
}
