//! `shiftlab`: scenarios, reports and worked examples for weighted forward
//! shifts on tridiagonal spaces.
//!
//! Exit codes: 0 when every task computed (whatever the verdicts), 1 when a
//! computation broke its contract, 2 for usage and configuration errors.

mod render;
mod scenario;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shiftlab::space::Space;

use scenario::{Format, OutputSpec, PSpec, Params, Scenario, ScenarioFile, SpaceSpec};

#[derive(Parser, Debug)]
#[command(name = "shiftlab", version, about = "Weighted forward shifts on tridiagonal spaces: bounds, spectra-adjacent data and adjoint dynamics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Stored coordinates N.
    #[arg(long, global = true)]
    size: Option<usize>,
    /// Explicit series terms before analytic tails.
    #[arg(long, global = true)]
    series_cap: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Exponent p (a number, or c0).
    #[arg(long, global = true)]
    p: Option<String>,
    /// Output file (json) or directory (csv).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
struct Source {
    /// EX-CHAOS, EX-TRIDIAG, EX-TRIDIAG(<lambda>), EX-HC or EX-DECAY.
    #[arg(long)]
    preset: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run a scenario's tasks in order.
    Run {
        #[command(flatten)]
        src: Source,
        /// Comma-separated task ids (replaces the scenario's list).
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<String>>,
    },
    /// The space itself.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Matrices, norms and the compact-perturbation decomposition.
    #[command(subcommand)]
    Operator(OperatorCmd),
    /// Dynamics criteria.
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Adjoint orbits.
    #[command(subcommand)]
    Orbit(OrbitCmd),
    /// Self-contained demonstrations.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Subcommand, Debug)]
enum SpaceCmd {
    /// Radius, monomial norms, polynomial membership.
    Info {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        monomials: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum OperatorCmd {
    /// Leading block of [F_w^nu].
    Matrix {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        nu: Option<usize>,
    },
    /// Band bounds and a norm bracket for F_w.
    Norm {
        #[command(flatten)]
        src: Source,
    },
    /// F_w as an unweighted shift plus a compact perturbation.
    Decompose {
        #[command(flatten)]
        src: Source,
    },
}

#[derive(Subcommand, Debug)]
enum DynamicsCmd {
    /// Every criterion.
    Check {
        #[command(flatten)]
        src: Source,
    },
}

#[derive(Subcommand, Debug)]
enum OrbitCmd {
    /// Iterate the adjoint on k:N, e:N or ev:<complex>.
    Run {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Orbit of ev_z + ev_lambda accumulating at ev_lambda.
    Demo {
        #[command(flatten)]
        src: Source,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum DemoCmd {
    /// (B + K_lambda)^n x in closed form, checked against matrix powers.
    RankOne {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Comma-separated starting coordinates (default e_0).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<String>>,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

fn base(src: &Source) -> anyhow::Result<ScenarioFile> {
    let mut f = match &src.scenario {
        Some(p) => scenario::load(p)?,
        None => ScenarioFile::default(),
    };
    if let Some(p) = &src.preset {
        f.preset = Some(p.clone());
        f.triple = None;
    }
    Ok(f)
}

/// The scenario file behind a command, with its task list and knobs applied.
fn build(cmd: Cmd) -> anyhow::Result<ScenarioFile> {
    let single = |src: &Source, task: &str| -> anyhow::Result<ScenarioFile> {
        let mut f = base(src)?;
        f.tasks = vec![task.to_string()];
        Ok(f)
    };
    Ok(match cmd {
        Cmd::Run { src, tasks } => {
            if src.preset.is_none() && src.scenario.is_none() && tasks.as_ref().is_none_or(|t| t.iter().any(|x| x.trim() != "rank-one" && !x.trim().is_empty())) {
                anyhow::bail!("run needs --preset or --scenario");
            }
            let mut f = base(&src)?;
            if let Some(t) = tasks {
                f.tasks = t;
            }
            f
        }
        Cmd::Space(SpaceCmd::Info { src, monomials }) => {
            let mut f = single(&src, "space")?;
            f.params.monomials = monomials.unwrap_or(f.params.monomials);
            f
        }
        Cmd::Operator(OperatorCmd::Matrix { src, nu }) => {
            let mut f = single(&src, "matrix")?;
            f.params.nu = nu.unwrap_or(f.params.nu);
            f
        }
        Cmd::Operator(OperatorCmd::Norm { src }) => single(&src, "norm")?,
        Cmd::Operator(OperatorCmd::Decompose { src }) => single(&src, "decompose")?,
        Cmd::Dynamics(DynamicsCmd::Check { src }) => single(&src, "dynamics")?,
        Cmd::Orbit(OrbitCmd::Run { src, vector, target, steps }) => {
            let mut f = single(&src, "orbit")?;
            f.params.vector = vector.unwrap_or(f.params.vector);
            f.params.target = target.or(f.params.target);
            f.params.steps = steps.unwrap_or(f.params.steps);
            f
        }
        Cmd::Orbit(OrbitCmd::Demo { src, z, lambda, steps }) => {
            let mut f = single(&src, "orbit-demo")?;
            f.params.z = z.or(f.params.z);
            f.params.lambda = lambda.or(f.params.lambda);
            f.params.steps = steps.unwrap_or(40);
            f
        }
        Cmd::Demo(DemoCmd::RankOne { lambda, steps, x }) => ScenarioFile {
            tasks: vec!["rank-one".into()],
            params: Params { rank_one_lambda: lambda, steps, x: x.unwrap_or_else(|| vec!["1".into()]), ..Params::default() },
            ..ScenarioFile::default()
        },
    })
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let overrides = SpaceSpec { p: cli.p.clone().map(PSpec::Name), n: cli.size, series_cap: cli.series_cap, tol: cli.tol };
    let mut file = build(cli.cmd).map_err(Failure::Usage)?;
    file.space.overlay(&overrides);
    let output = OutputSpec {
        path: cli.out.or(file.output.path.clone()),
        format: cli.format.as_deref().map(|f| f.parse::<Format>()).transpose().map_err(Failure::Usage)?.or(file.output.format),
    };
    let sc = Scenario::resolve(file).map_err(Failure::Usage)?;
    let space = match &sc.triple {
        Some(t) => Some(Space::new(t.clone(), sc.space).map_err(|e| Failure::Usage(e.into()))?),
        None => None,
    };
    let hash = sc.hash();
    // tasks run concurrently; the report keeps declaration order
    let results: Vec<anyhow::Result<tasks::TaskOutput>> = std::thread::scope(|scope| {
        let handles: Vec<_> = sc.tasks.iter().map(|t| scope.spawn(|| tasks::run(t, &sc, space.as_ref()))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("task panicked")))).collect()
    });
    let mut done = Vec::new();
    for (t, r) in sc.tasks.iter().zip(results) {
        done.push((t.clone(), r.map_err(|e| Failure::Compute(e.context(format!("task {t}"))))?));
    }
    render::emit(&sc, &hash, &done, output.format.unwrap_or(Format::Json), output.path.as_deref()).map_err(Failure::Compute)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
