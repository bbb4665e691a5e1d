//! Batch driver behind the `pharmonic` binary.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{capacity, Condenser, SequenceOptions};
use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::io::{csv_err, num, read_pgraph, write_sequence_csv, write_solution_csv};
use crate::lattice::{cylinder_set, lattice_box, thorn_set, GraphWindow, Lattice, Profile, SetSpec};
use crate::massiveness::{
    dp_massiveness_probe, massiveness_sequence, parabolicity_sequence, MassivenessOptions, Thresholds,
};
use crate::oracles::mc_point_capacity;
use crate::plaplace::{Method, PExponent, SolverOptions};
use crate::selftest::{run_selftest, SelftestOptions};
use crate::wiener::{wiener_report, WienerOptions};

#[derive(Debug, Parser)]
#[command(name = "pharmonic", version, about = "p-harmonic potentials, capacities and Wiener sums on weighted graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the `generated_at` field from JSON outputs.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads for parallel sweeps and random walks.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Solver residual tolerance; overrides the config.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Condenser capacity, or a sweep of cylinders against the window frontier.
    Capacity,
    /// Dyadic Wiener terms of a set around a point.
    Wiener,
    /// Exhaustion sequence for p-massiveness, plus the D_p probe when `omega1` is set.
    Massive,
    /// Capacity of a set to infinity along growing balls.
    Parabolic,
    /// Wiener report for a thorn in Z^d.
    Thorn,
    /// Runs the invariant suite.
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Capacity => "capacity",
            Command::Wiener => "wiener",
            Command::Massive => "massive",
            Command::Parabolic => "parabolic",
            Command::Thorn => "thorn",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub d: usize,
    #[serde(rename = "R")]
    pub radius: usize,
    #[serde(default)]
    pub w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphSpec {
    Lattice(LatticeSpec),
    /// A `pgraph v1` file, relative to the config file.
    File(PathBuf),
    /// Path with `n` edges of weight `w` on vertices `0..=n`.
    Path {
        n: usize,
        #[serde(default = "unit")]
        w: f64,
    },
}

fn unit() -> f64 {
    1.0
}

/// A vertex given by lattice coordinates or by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Coords(Vec<i64>),
    Id(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderSpec {
    pub h: i64,
    pub r: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sink: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cylinder_sweep: Option<Vec<CylinderSpec>>,
    /// The set `A` of the Wiener sum, or `K` for parabolicity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<usize>>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n_scales: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    /// Shorthand for `profile = {"type":"power","alpha":alpha}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Random walks per neighbor for the escape cross-check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn missing(field: &str, command: Command) -> Error {
    Error::Config(format!("`{}` needs the config field `{field}`", command.name()))
}

impl ExperimentConfig {
    /// Checks that everything the command reads is present, before any work.
    pub fn validate(&self, command: Command) -> Result<()> {
        PExponent::new(self.p)?;
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::Config(format!("tol must be positive, got {t}")));
            }
        }
        let need = |present: bool, field: &str| if present { Ok(()) } else { Err(missing(field, command)) };
        match command {
            Command::Capacity => {
                need(self.graph.is_some(), "graph")?;
                if self.cylinder_sweep.is_none() {
                    need(self.source.is_some(), "source")?;
                    need(self.sink.is_some(), "sink")?;
                }
            }
            Command::Wiener => {
                need(self.graph.is_some(), "graph")?;
                need(self.set.is_some(), "set")?;
                need(self.n_scales.is_some(), "N")?;
            }
            Command::Massive => {
                need(self.graph.is_some(), "graph")?;
                need(self.omega.is_some(), "omega")?;
                need(self.x0.is_some(), "x0")?;
                need(self.radii.is_some(), "radii")?;
            }
            Command::Parabolic => {
                need(self.graph.is_some(), "graph")?;
                need(self.radii.is_some(), "radii")?;
            }
            Command::Thorn => {
                need(self.profile.is_some() || self.alpha.is_some(), "alpha")?;
                if self.profile.is_some() && self.alpha.is_some() {
                    return Err(Error::Config("give either `profile` or `alpha`, not both".into()));
                }
                if let Some(GraphSpec::Lattice(_)) | None = &self.graph {
                } else {
                    return Err(Error::Config("`thorn` runs on a lattice".into()));
                }
            }
            Command::Selftest => {}
        }
        Ok(())
    }

    fn solver(&self, tol: Option<f64>) -> SolverOptions {
        let mut s = SolverOptions::default();
        if let Some(t) = tol.or(self.tol) {
            s.tol = t;
        }
        if let Some(m) = self.method {
            s.method = m;
        }
        s.max_sweeps = self.max_sweeps;
        s
    }

    fn massiveness_options(&self, solver: SolverOptions) -> MassivenessOptions {
        MassivenessOptions {
            sequence: SequenceOptions {
                solver,
                warm_start: self.warm_start.unwrap_or(true),
            },
            thresholds: self.thresholds.clone().unwrap_or_default(),
        }
    }

    fn thorn_profile(&self) -> Option<Profile> {
        self.profile
            .or(self.alpha.map(|alpha| Profile::Power { alpha, scale: 1.0 }))
    }
}

/// The graph an experiment runs on.
pub enum Space {
    Lattice(Lattice),
    Graph(WeightedGraph),
}

impl GraphWindow for Space {
    fn graph(&self) -> &WeightedGraph {
        match self {
            Space::Lattice(l) => &l.graph,
            Space::Graph(g) => g,
        }
    }

    fn ball_is_interior(&self, center: VertexId, r: usize) -> bool {
        match self {
            Space::Lattice(l) => l.ball_is_interior(center, r),
            Space::Graph(_) => true,
        }
    }

    fn window_radius(&self) -> Option<i64> {
        match self {
            Space::Lattice(l) => l.window_radius(),
            Space::Graph(_) => None,
        }
    }
}

impl Space {
    pub fn build(spec: &GraphSpec, base: &Path) -> Result<Space> {
        Ok(match spec {
            GraphSpec::Lattice(l) => Space::Lattice(lattice_box(l.d, l.radius, l.w)?),
            GraphSpec::File(f) => {
                let path = base.join(f);
                let file = fs::File::open(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                Space::Graph(read_pgraph(BufReader::new(file))?)
            }
            GraphSpec::Path { n, w } => {
                let edges: Vec<_> = (0..*n).map(|i| (i, i + 1, *w)).collect();
                Space::Graph(WeightedGraph::from_edges(n + 1, &edges)?)
            }
        })
    }

    pub fn set(&self, spec: &SetSpec) -> Result<VertexSet> {
        match self {
            Space::Lattice(l) => spec.evaluate(l),
            Space::Graph(g) => spec.evaluate_on_graph(g),
        }
    }

    pub fn point(&self, p: &Point) -> Result<VertexId> {
        match (self, p) {
            (Space::Lattice(l), Point::Coords(c)) => l
                .window
                .id(c)
                .ok_or_else(|| Error::Config(format!("point {c:?} is outside the window"))),
            (Space::Graph(_), Point::Coords(c)) => Err(Error::Config(format!(
                "point {c:?} given by coordinates but the graph is not a lattice"
            ))),
            (_, Point::Id(id)) => {
                self.graph().check_vertex(*id)?;
                Ok(*id)
            }
        }
    }

    fn center(&self, p: Option<&Point>) -> Result<VertexId> {
        match (p, self) {
            (Some(p), _) => self.point(p),
            (None, Space::Lattice(l)) => Ok(l.window.origin()),
            (None, Space::Graph(_)) => Err(Error::Config("`center` is required on a non-lattice graph".into())),
        }
    }

    fn frontier(&self) -> Result<VertexSet> {
        match self {
            Space::Lattice(l) => Ok(VertexSet::from_predicate(&l.graph, |x| l.window.is_frontier(x))),
            Space::Graph(_) => Err(Error::Config("the window frontier exists only on lattices".into())),
        }
    }
}

struct Output {
    dir: PathBuf,
    deterministic: bool,
    written: Vec<PathBuf>,
}

impl Output {
    fn file(&mut self, name: &str) -> Result<BufWriter<fs::File>> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        let f = fs::File::create(&path)?;
        self.written.push(path);
        Ok(BufWriter::new(f))
    }

    fn json(&mut self, name: &str, command: Command, config: &ExperimentConfig, result: Value) -> Result<()> {
        let mut doc = json!({
            "command": command.name(),
            "config": config,
            "result": result,
        });
        if !self.deterministic {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            doc["generated_at"] = json!(format!("unix:{secs}"));
        }
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn cmd_capacity(space: &Space, cfg: &ExperimentConfig, solver: &SolverOptions, out: &mut Output) -> Result<()> {
    let g = space.graph();
    let p = PExponent::new(cfg.p)?;
    let domain = cfg.domain.as_ref().map(|d| space.set(d)).transpose()?;
    if let Some(sweep) = &cfg.cylinder_sweep {
        let Space::Lattice(lat) = space else {
            return Err(Error::Config("cylinder sweeps need a lattice graph".into()));
        };
        let sink = match &cfg.sink {
            Some(s) => space.set(s)?,
            None => space.frontier()?,
        };
        let mut rows = Vec::new();
        let mut w = csv::Writer::from_writer(out.file("cylinders.csv")?);
        w.write_record(["h", "r", "cap", "uncertainty"]).map_err(csv_err)?;
        for c in sweep {
            let mut cond = Condenser::new(cylinder_set(lat, c.h, c.r), sink.clone(), p);
            if let Some(d) = &domain {
                cond = cond.within(d.clone());
            }
            let res = capacity(g, &cond, solver)?;
            w.write_record([c.h.to_string(), c.r.to_string(), num(res.value), num(res.uncertainty)])
                .map_err(csv_err)?;
            rows.push(json!({"h": c.h, "r": c.r, "capacity": res.summary()}));
        }
        w.flush()?;
        return out.json("capacity.json", Command::Capacity, cfg, json!({ "cylinders": rows }));
    }
    let source = space.set(cfg.source.as_ref().expect("validated"))?;
    let sink = space.set(cfg.sink.as_ref().expect("validated"))?;
    let mut cond = Condenser::new(source, sink, p);
    if let Some(d) = domain {
        cond = cond.within(d);
    }
    let res = capacity(g, &cond, solver)?;
    write_solution_csv(g, &res.potential, &p, out.file("potential.csv")?)?;
    let mut result = to_value(&res.summary())?;
    result["flux_at_source"] = json!(res.flux_at_source);
    result["flux_at_sink"] = json!(res.flux_at_sink);
    result["sigma_mass_on_source"] = json!(res.sigma_mass_on_source);
    out.json("capacity.json", Command::Capacity, cfg, result)
}

fn wiener_outputs(
    space: &Space,
    cfg: &ExperimentConfig,
    a: &VertexSet,
    x0: VertexId,
    n_scales: u32,
    solver: &SolverOptions,
    command: Command,
    out: &mut Output,
) -> Result<()> {
    let mut opts = WienerOptions {
        solver: solver.clone(),
        global: cfg.global.unwrap_or(false),
        ..Default::default()
    };
    if let Some(f) = cfg.divergence_floor {
        opts.divergence_floor = f;
    }
    let report = wiener_report(space, x0, a, &PExponent::new(cfg.p)?, n_scales, &opts)?;
    report.write_csv(out.file("wiener.csv")?)?;
    out.json("wiener.json", command, cfg, to_value(&report)?)
}

fn cmd_wiener(space: &Space, cfg: &ExperimentConfig, solver: &SolverOptions, out: &mut Output) -> Result<()> {
    let a = space.set(cfg.set.as_ref().expect("validated"))?;
    let x0 = match &cfg.x0 {
        Some(x) => space.point(x)?,
        None => space.center(cfg.center.as_ref())?,
    };
    wiener_outputs(space, cfg, &a, x0, cfg.n_scales.expect("validated"), solver, Command::Wiener, out)
}

fn cmd_thorn(cfg: &ExperimentConfig, base: &Path, solver: &SolverOptions, out: &mut Output) -> Result<()> {
    let n_scales = cfg.n_scales.unwrap_or(5);
    let spec = match &cfg.graph {
        Some(g) => g.clone(),
        None => GraphSpec::Lattice(LatticeSpec {
            d: 3,
            radius: (1usize << (n_scales + 1)) + 1,
            w: None,
        }),
    };
    let space = Space::build(&spec, base)?;
    let Space::Lattice(lat) = &space else {
        return Err(Error::Config("`thorn` runs on a lattice".into()));
    };
    let thorn = thorn_set(lat, &cfg.thorn_profile().expect("validated"));
    let x0 = space.center(cfg.x0.as_ref().or(cfg.center.as_ref()))?;
    wiener_outputs(&space, cfg, &thorn, x0, n_scales, solver, Command::Thorn, out)
}

fn cmd_massive(space: &Space, cfg: &ExperimentConfig, solver: &SolverOptions, out: &mut Output) -> Result<()> {
    let omega = space.set(cfg.omega.as_ref().expect("validated"))?;
    let center = space.center(cfg.center.as_ref())?;
    let x0 = space.point(cfg.x0.as_ref().expect("validated"))?;
    let radii = cfg.radii.as_deref().expect("validated");
    let p = PExponent::new(cfg.p)?;
    let opts = cfg.massiveness_options(solver.clone());
    let evidence = massiveness_sequence(space, &omega, center, x0, &p, radii, &opts)?;
    write_sequence_csv(&evidence.sequence.points, out.file("massive.csv")?)?;
    let mut result = json!({ "massiveness": evidence });
    if let Some(o1) = &cfg.omega1 {
        let omega1 = space.set(o1)?;
        let dp = dp_massiveness_probe(space, &omega, &omega1, center, &p, radii, &opts)?;
        write_sequence_csv(&dp.capacity.points, out.file("dp_capacity.csv")?)?;
        result["dp"] = to_value(&dp)?;
    }
    out.json("massive.json", Command::Massive, cfg, result)
}

fn cmd_parabolic(space: &Space, cfg: &ExperimentConfig, solver: &SolverOptions, out: &mut Output) -> Result<()> {
    let center = space.center(cfg.center.as_ref())?;
    let k = match &cfg.set {
        Some(s) => space.set(s)?,
        None => VertexSet::new(space.graph(), [center])?,
    };
    let radii = cfg.radii.as_deref().expect("validated");
    let p = PExponent::new(cfg.p)?;
    let evidence = parabolicity_sequence(space, center, &k, &p, radii, &cfg.massiveness_options(solver.clone()))?;
    write_sequence_csv(&evidence.sequence.points, out.file("parabolic.csv")?)?;
    let mut result = json!({ "parabolicity": evidence });
    if let Some(samples) = cfg.samples {
        if !p.is_linear() || k.len() != 1 || k.ids()[0] != center {
            return Err(Error::Config(
                "the random-walk cross-check needs p = 2 and the set equal to the center".into(),
            ));
        }
        let walks = mc_point_capacity(space, center, samples, radii, cfg.seed.unwrap_or(0))?;
        result["random_walk"] = to_value(&walks)?;
    }
    out.json("parabolic.json", Command::Parabolic, cfg, result)
}

fn cmd_selftest(cli: &Cli, cfg: Option<&ExperimentConfig>) -> Result<bool> {
    let mut opts = SelftestOptions::default();
    if let Some(seed) = cfg.and_then(|c| c.seed) {
        opts.seed = seed;
    }
    if let Some(t) = cli.tol.or(cfg.and_then(|c| c.tol)) {
        opts.tol = t;
    }
    if let Some(n) = cli.threads {
        opts.threads = n.max(2);
    }
    let report = run_selftest(&opts);
    for c in &report.checks {
        println!(
            "{} {:<26} worst={:.3e} bound={:.1e} {:.2}s  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.bound,
            c.seconds,
            c.detail
        );
    }
    if let Some(dir) = &cli.out {
        let mut out = Output {
            dir: dir.clone(),
            deterministic: cli.deterministic,
            written: Vec::new(),
        };
        let mut w = out.file("selftest.json")?;
        serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
    }
    Ok(report.passed())
}

/// What a successful run produced.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
    pub selftest_passed: Option<bool>,
}

pub fn run(cli: &Cli) -> Result<RunSummary> {
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(Error::Config(format!("--tol must be positive, got {t}")));
        }
    }
    let cfg = cli.config.as_deref().map(load_config).transpose()?;
    if let Some(c) = &cfg {
        c.validate(cli.command)?;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    }
    if cli.command == Command::Selftest {
        return Ok(RunSummary {
            written: Vec::new(),
            selftest_passed: Some(cmd_selftest(cli, cfg.as_ref())?),
        });
    }
    let cfg = cfg.ok_or_else(|| Error::Config(format!("`{}` needs --config", cli.command.name())))?;
    let base = cli
        .config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let solver = cfg.solver(cli.tol);
    let mut out = Output {
        dir: cli.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        deterministic: cli.deterministic,
        written: Vec::new(),
    };
    if cli.command == Command::Thorn {
        cmd_thorn(&cfg, &base, &solver, &mut out)?;
    } else {
        let space = Space::build(cfg.graph.as_ref().expect("validated"), &base)?;
        match cli.command {
            Command::Capacity => cmd_capacity(&space, &cfg, &solver, &mut out)?,
            Command::Wiener => cmd_wiener(&space, &cfg, &solver, &mut out)?,
            Command::Massive => cmd_massive(&space, &cfg, &solver, &mut out)?,
            Command::Parabolic => cmd_parabolic(&space, &cfg, &solver, &mut out)?,
            Command::Thorn | Command::Selftest => unreachable!(),
        }
    }
    Ok(RunSummary {
        written: out.written,
        selftest_passed: None,
    })
}

/// 2 for configuration problems, 3 for non-convergence, 4 for a window that
/// is too small, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse(_)
        | Error::SetSpec(_)
        | Error::InvalidLattice(_)
        | Error::InvalidExponent(_)
        | Error::SizeOverflow { .. } => 2,
        Error::MaxSweepsExceeded { .. } => 3,
        Error::WindowTooSmall { .. } => 4,
        _ => 1,
    }
}

/// Parses `args`, runs, reports, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(summary) => {
            for path in &summary.written {
                println!("wrote {}", path.display());
            }
            match summary.selftest_passed {
                Some(false) => 1,
                _ => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
