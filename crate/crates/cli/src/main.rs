//! `frustra` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical or tolerance
//! failure, 3 a sweep found a model that is not INES on average.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use frustra::correlations::{monogamy_residual, Purification, SearchConfig};
use frustra::eigen::{DensityMatrix, DEFAULT_DEGENERACY_TOL};
use frustra::harness::{sweep, ModelClass, SweepConfig};
use frustra::metrics::{analyze_state, FrustrationRecord, GroundAnalysis, Scope, DEFAULT_EQUALITY_TOL};
use frustra::model::SpinModel;
use frustra::xychain::{self, XYPoint};
use frustra::{csv_float, CVector, C64};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED_ENV: &str = "FRUSTRA_SEED";
const MONOGAMY_TOL: f64 = 1e-3;
const MAX_MONOGAMY_DIM: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "frustra", version, about = "Frustration and correlation analysis of spin-1/2 ground states")]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-bond f_S and eps_d of a model's ground state.
    Analyze(AnalyzeArgs),
    /// Random prototype models checked for INES on average.
    Sweep(SweepArgs),
    /// Thermodynamic-limit XY chain over a grid of anisotropies.
    XyScan(XyScanArgs),
    /// eps - E - C on random tripartite pure states.
    Monogamy(MonogamyArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Model file (JSON).
    model: PathBuf,
    /// `mmgs`, `index:k` (k-th ground basis vector) or `superpose:a,b`
    /// (normalized a|g0> + b|g1>).
    #[arg(long, default_value = "mmgs")]
    state: StateSpec,
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOL)]
    tol_degeneracy: f64,
    #[arg(long, default_value_t = DEFAULT_EQUALITY_TOL)]
    tol_equality: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = parse_class)]
    class: ModelClass,
    #[arg(long)]
    sites: usize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replicate one coupling on every bond.
    #[arg(long)]
    homogeneous: bool,
    #[arg(long)]
    no_gauge: bool,
    #[arg(long)]
    no_pt: bool,
    /// Negative control: add a sign-reversed triangle to every model.
    #[arg(long)]
    inject_geometric: bool,
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOL)]
    tol_degeneracy: f64,
    #[arg(long, default_value_t = DEFAULT_EQUALITY_TOL)]
    tol_equality: f64,
}

#[derive(Args, Debug)]
struct XyScanArgs {
    #[arg(long, default_value_t = 0.0)]
    gamma_from: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_to: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
}

#[derive(Args, Debug)]
struct MonogamyArgs {
    /// Dimensions of S, R and A.
    #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Number of retained eigenvalues in eps_d.
    #[arg(long, default_value_t = 1)]
    d: usize,
}

#[derive(Clone, Debug)]
enum StateSpec {
    Mmgs,
    Index(usize),
    Superpose(f64, f64),
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "mmgs" {
            return Ok(StateSpec::Mmgs);
        }
        if let Some(k) = s.strip_prefix("index:") {
            return k.parse().map(StateSpec::Index).map_err(|e| format!("bad index '{k}': {e}"));
        }
        if let Some(rest) = s.strip_prefix("superpose:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if let [a, b] = parts[..] {
                let a: f64 = a.parse().map_err(|e| format!("bad amplitude '{a}': {e}"))?;
                let b: f64 = b.parse().map_err(|e| format!("bad amplitude '{b}': {e}"))?;
                return Ok(StateSpec::Superpose(a, b));
            }
        }
        Err(format!("unknown state '{s}' (expected mmgs, index:k or superpose:a,b)"))
    }
}

fn parse_class(s: &str) -> Result<ModelClass, String> {
    s.parse().map_err(|e: frustra::Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(frustra::Error),
}

impl From<frustra::Error> for Failure {
    fn from(e: frustra::Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Library(frustra::Error::Numerical(_)) => 2,
            Failure::Library(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

/// Command output and the exit code to report after printing it.
struct Outcome {
    text: String,
    code: u8,
}

fn seed_override(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_ENV}='{v}' is not a 64-bit seed"))),
        Err(_) => Ok(flag),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<Outcome, Failure> {
    let model = SpinModel::load(&args.model)?;
    let analysis = GroundAnalysis::new(&model, args.tol_degeneracy)?;
    let gs = &analysis.ground;
    let (rho, scope) = match args.state {
        StateSpec::Mmgs => (analysis.mmgs.clone(), Scope::OnAverage),
        StateSpec::Index(k) => {
            if k >= gs.degeneracy {
                return Err(Failure::Usage(format!("ground space has {} states, index {k} requested", gs.degeneracy)));
            }
            (DensityMatrix::pure(&gs.vector(k))?, Scope::Local(format!("index:{k}")))
        }
        StateSpec::Superpose(a, b) => {
            if gs.degeneracy < 2 {
                return Err(Failure::Usage("superposition needs a degenerate ground space".into()));
            }
            let psi: CVector = gs.vector(0) * C64::new(a, 0.0) + gs.vector(1) * C64::new(b, 0.0);
            (DensityMatrix::pure(&psi)?, Scope::Local(format!("superpose:{a},{b}")))
        }
    };
    let c = analyze_state(&model, gs, &rho, scope, args.tol_equality)?;
    let mut text = String::new();
    text.push_str(FrustrationRecord::CSV_HEADER);
    text.push('\n');
    for r in &c.per_bond {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    text.push_str(&format!("verdict={} scope={}\n", c.verdict, c.scope));
    Ok(Outcome { text, code: 0 })
}

fn run_sweep(args: &SweepArgs) -> Result<Outcome, Failure> {
    let cfg = SweepConfig {
        homogeneous: args.homogeneous,
        apply_gauges: !args.no_gauge,
        apply_pt: !args.no_pt,
        tol_degeneracy: args.tol_degeneracy,
        tol_equality: args.tol_equality,
        inject_geometric: args.inject_geometric,
        ..SweepConfig::new(args.class, args.sites, args.count, seed_override(args.seed)?)
    };
    let report = sweep(&cfg)?;
    let code = if report.rejected == 0 { 0 } else { 3 };
    Ok(Outcome { text: report.to_csv(), code })
}

fn xy_scan(args: &XyScanArgs) -> Result<Outcome, Failure> {
    let points = xychain::scan(args.gamma_from, args.gamma_to, args.steps)?;
    let mut text = String::from(XYPoint::CSV_HEADER);
    text.push('\n');
    for p in &points {
        text.push_str(&p.csv_row());
        text.push('\n');
    }
    Ok(Outcome { text, code: 0 })
}

fn monogamy(args: &MonogamyArgs) -> Result<Outcome, Failure> {
    let dims: [usize; 3] = args.dims[..].try_into().map_err(|_| Failure::Usage("--dims takes three values".into()))?;
    if dims.contains(&0) || dims.iter().product::<usize>() > MAX_MONOGAMY_DIM {
        return Err(Failure::Usage(format!(
            "--dims must be positive with product at most {MAX_MONOGAMY_DIM}"
        )));
    }
    if args.d == 0 || args.d > dims[0] {
        return Err(Failure::Usage(format!("--d must lie in 1..={}", dims[0])));
    }
    if args.trials == 0 || args.restarts == 0 {
        return Err(Failure::Usage("--trials and --restarts must be positive".into()));
    }
    let seed = seed_override(args.seed)?;
    let mut text = String::from("trial,epsilon,E,C,residual,converged\n");
    let mut worst: f64 = 0.0;
    for t in 0..args.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let psi = Purification::random(dims, &mut rng)?;
        let cfg = SearchConfig { restarts: args.restarts, seed: seed.wrapping_add(t as u64), ..SearchConfig::default() };
        let rep = monogamy_residual(&psi, args.d, &cfg, &cfg)?;
        worst = worst.max(rep.residual.abs());
        text.push_str(&format!(
            "{t},{},{},{},{},{}\n",
            csv_float(rep.epsilon),
            csv_float(rep.entanglement.value),
            csv_float(rep.correlations.value),
            csv_float(rep.residual),
            rep.converged()
        ));
    }
    text.push_str(&format!("max_abs_residual={}\n", csv_float(worst)));
    let code = if worst <= MONOGAMY_TOL { 0 } else { 2 };
    Ok(Outcome { text, code })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => run_sweep(a),
        Command::XyScan(a) => xy_scan(a),
        Command::Monogamy(a) => monogamy(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
