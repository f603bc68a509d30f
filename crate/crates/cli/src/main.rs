use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beltrami::demo::DemoMu;
use beltrami::grid::{load_cgrid, save_cgrid, ComplexField, DerivativeMode, GridSpec};
use beltrami::hodge::BeltramiCoefficient;
use beltrami::render::{orientation, render_checkerboard, write_csv};
use beltrami::solution::QCMapSolution;
use beltrami::solver::{SolveParams, SolverRegistry};
use beltrami::verify::{core_suite, full_suite, FullSuiteInput, Relation, Thresholds, VerifyReport};
use beltrami::Error;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "beltrami", version, about = "Solve the Beltrami equation on a square grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the normalized map and write it with a check report.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output prefix; writes <out>.phi.cgrid and <out>.report.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and print the report.
    Verify {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_enum, default_value_t = Suite::Core)]
        suite: Suite,
    },
    /// Render a checkerboard pushforward of a stored map.
    Map {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, default_value_t = 8)]
        cells: usize,
        /// Image side in pixels.
        #[arg(long, default_value_t = 512)]
        size: usize,
        /// PPM path; the CSV goes to <out>.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct Problem {
    /// A cgrid file or `demo:<name>[:params]`.
    #[arg(long)]
    mu: String,
    /// Grid size for demo coefficients (taken from the file otherwise).
    #[arg(long)]
    n: Option<usize>,
    /// Half-width of the box for demo coefficients.
    #[arg(long = "L", default_value_t = 2.0)]
    half_width: f64,
    #[arg(long, default_value = "neumann")]
    method: String,
    /// Derivative mode for checks and integration: central, central4 or spectral.
    #[arg(long, default_value = "central")]
    mode: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Core,
    Full,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_)
            | Error::Parse(_)
            | Error::InvalidGrid(_)
            | Error::InvalidBeltrami(_)
            | Error::UnknownStrategy { .. }
            | Error::DomainError(_)
            | Error::ShapeMismatch
            | Error::PointOutsideGrid(_)
            | Error::BallOutsideGrid { .. }
            | Error::DirectQuadratureTooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

enum Source {
    Demo(DemoMu),
    File(ComplexField),
}

struct Loaded {
    mu: BeltramiCoefficient,
    source: Source,
    mode: DerivativeMode,
    registry: SolverRegistry,
}

fn load_problem(p: &Problem) -> CliResult<Loaded> {
    let mode: DerivativeMode = p.mode.parse()?;
    let registry = SolverRegistry::with_defaults();
    registry.get(&p.method)?;
    let source = if p.mu.starts_with("demo:") {
        Source::Demo(p.mu.parse()?)
    } else {
        Source::File(load_cgrid(&p.mu).map_err(|e| Failure::Usage(format!("{}: {e}", p.mu)))?)
    };
    let mu = match &source {
        Source::Demo(d) => d.coefficient(GridSpec::new(p.n.unwrap_or(128), p.half_width)?)?,
        Source::File(f) => {
            if let Some(n) = p.n {
                if n != f.spec().n() {
                    return Err(Failure::Usage(format!("--n {n} disagrees with the file grid {}", f.spec().n())));
                }
            }
            BeltramiCoefficient::new(f.clone())?
        }
    };
    Ok(Loaded {
        mu,
        source,
        mode,
        registry,
    })
}

fn params(mode: DerivativeMode, tol: f64) -> CliResult<SolveParams> {
    if !(tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    Ok(SolveParams {
        tol,
        mode,
        ..SolveParams::default()
    })
}

fn meta_lines(sol: &QCMapSolution) -> String {
    let m = &sol.meta;
    let mut s = format!(
        "solver method={} iterations={} residual={:e}\n",
        m.method, m.iterations, m.solver_residual
    );
    for (name, v) in &m.diagnostics {
        s.push_str(&format!("diag {name}={v:e}\n"));
    }
    s
}

fn report_outcome(report: &VerifyReport) -> CliResult<()> {
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.entries.iter().filter(|e| !e.pass).map(|e| e.id.as_str()).collect();
        Err(Failure::Check(format!("failed checks: {}", failed.join(", "))))
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_solve(problem: &Problem, tol: f64, out: &Path) -> CliResult<()> {
    let loaded = load_problem(problem)?;
    let params = params(loaded.mode, tol)?;
    let sol = loaded.registry.solve(&problem.method, &loaded.mu, &params)?;
    let thresholds = Thresholds::default();
    let mut report = core_suite(&sol, &loaded.mu, loaded.mode, &thresholds)?;
    if let Source::Demo(d) = &loaded.source {
        if let Some(m) = d.manufactured() {
            let exact = ComplexField::from_fn(*sol.phi.spec(), |z| m.phi_normalized(z));
            let err = (&sol.phi - &exact).sup_norm();
            report.push("oracle_sup_error", err, 0.1, Relation::AtMost, sol.phi.spec().n());
        }
    }
    save_cgrid(&sol.phi, with_suffix(out, ".phi.cgrid"))?;
    let text = format!("{}{}", meta_lines(&sol), report);
    std::fs::write(with_suffix(out, ".report.txt"), &text).map_err(Error::from)?;
    print!("{text}");
    report_outcome(&report)
}

fn cmd_verify(problem: &Problem, suite: Suite) -> CliResult<()> {
    let loaded = load_problem(problem)?;
    let params = params(loaded.mode, 1e-10)?;
    let thresholds = Thresholds::default();
    let report = match suite {
        Suite::Core => {
            let sol = loaded.registry.solve(&problem.method, &loaded.mu, &params)?;
            core_suite(&sol, &loaded.mu, loaded.mode, &thresholds)?
        }
        Suite::Full => {
            let demo = match &loaded.source {
                Source::Demo(d) => Some(*d),
                Source::File(_) => None,
            };
            let make = move |s: GridSpec| demo.expect("demo source").coefficient(s);
            let input = FullSuiteInput {
                mu: &loaded.mu,
                make_mu: demo.is_some().then_some(&make as &dyn Fn(GridSpec) -> _),
                registry: &loaded.registry,
                method: &problem.method,
                params,
                thresholds,
            };
            full_suite(&input)?
        }
    };
    print!("{report}");
    report_outcome(&report)
}

fn cmd_map(phi: &Path, cells: usize, size: usize, out: &Path) -> CliResult<()> {
    let field = load_cgrid(phi).map_err(|e| Failure::Usage(format!("{}: {e}", phi.display())))?;
    let img = render_checkerboard(&field, cells, size)?;
    let mut w = BufWriter::new(File::create(out).map_err(Error::from)?);
    img.write_ppm(&mut w)?;
    w.flush().map_err(Error::from)?;
    let mut c = BufWriter::new(File::create(with_suffix(out, ".csv")).map_err(Error::from)?);
    write_csv(&field, &mut c)?;
    c.flush().map_err(Error::from)?;
    let o = orientation(&field)?;
    println!(
        "map n={} min_jacobian={:e} max_jacobian={:e} reversed_fraction={:e}",
        field.spec().n(),
        o.min_jacobian,
        o.max_jacobian,
        o.reversed_fraction
    );
    if o.is_reversing() {
        return Err(Failure::Check("map reverses orientation".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { problem, tol, out } => cmd_solve(problem, *tol, out),
        Command::Verify { problem, suite } => cmd_verify(problem, *suite),
        Command::Map { phi, cells, size, out } => cmd_map(phi, *cells, *size, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("beltrami: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("beltrami: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("beltrami: {m}");
            ExitCode::from(3)
        }
    }
}
