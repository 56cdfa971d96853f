use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use signorini_core::solver::Method;
use signorini_lab::plot::{self, PlotKind};
use signorini_lab::{exit, io, pipeline, scenarios, LabError, Overrides, ScenarioConfig};

/// Finite-element lab for the scalar Signorini problem.
#[derive(Parser)]
#[command(name = "signorini", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios (config files or shipped scenario names).
    Run {
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[command(flatten)]
        overrides: OverrideArgs,
        /// Directory for reports, meshes, matrices and gap tables.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// List the shipped scenarios.
    ListScenarios,
    /// Run a scenario and report only its barrier certificates.
    VerifyBarriers {
        scenario: String,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Extract a CSV series from a saved report.
    Plot {
        report: PathBuf,
        /// boundary-trace, field-heatmap or coverage-vs-alpha.
        #[arg(long)]
        kind: String,
        /// Write to this file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OverrideArgs {
    /// Single mesh resolution instead of the configured list.
    #[arg(long)]
    resolution: Option<usize>,
    /// Comma-separated, strictly decreasing α values.
    #[arg(long, value_delimiter = ',')]
    alpha_schedule: Option<Vec<f64>>,
    /// KKT tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pgs,
    Pdas,
}

impl OverrideArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            resolution: self.resolution,
            alpha_schedule: self.alpha_schedule.clone(),
            kkt_tol: self.tol,
            method: self.method.map(|m| match m {
                MethodArg::Pgs => Method::Pgs,
                MethodArg::Pdas => Method::Pdas,
            }),
        }
    }
}

/// A path to a JSON config if one exists, otherwise a shipped scenario name.
fn load(arg: &str) -> Result<ScenarioConfig, LabError> {
    let p = Path::new(arg);
    if p.is_file() {
        ScenarioConfig::load(p)
    } else {
        scenarios::get(arg)
    }
}

fn run(names: &[String], ov: &Overrides, out_dir: Option<&Path>) -> Result<i32, LabError> {
    let cfgs = names.iter().map(|n| load(n)).collect::<Result<Vec<_>, _>>()?;
    let mut code = exit::PASS;
    for res in pipeline::run_batch(&cfgs, ov) {
        let art = match res {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: {e}");
                code = exit::ERROR;
                continue;
            }
        };
        println!("{}", art.report.summary());
        for a in art.report.failed() {
            println!("  failed: {} = {:e} (required {})", a.name, a.value, a.requirement);
        }
        if let Some(dir) = out_dir {
            for p in io::write_outputs(dir, &art)? {
                println!("  wrote {}", p.display());
            }
        }
        if !art.report.pass && code == exit::PASS {
            code = exit::FAILED;
        }
    }
    Ok(code)
}

fn verify_barriers(name: &str, ov: &Overrides) -> Result<i32, LabError> {
    let report = pipeline::run(&load(name)?, ov)?;
    if report.certificates.is_empty() {
        return Err(LabError::Config(format!("scenario `{}` declares no barriers", report.scenario)));
    }
    let mut code = exit::PASS;
    for c in &report.certificates {
        let k = &c.certificate;
        let status = match (c.pass, c.asserted) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (diagnostic)",
        };
        println!("{} barrier: c = {:e}, M = {:e}, feasible = {} {}", k.kind.name(), k.constants.c, c.m_measured, k.feasible, status);
        if let Some(r) = &k.report {
            println!(
                "  residuals: interior {:e}, cap {:e}, flux {:e}",
                r.interior.worst, r.cap.worst, r.flux.worst
            );
        }
        if let Some(cmp) = &c.comparison {
            println!("  comparison: max gap {:e} over {} nodes (tol {:e})", cmp.worst_gap, cmp.nodes_checked, cmp.tol);
        }
        for n in &c.notes {
            println!("  {n}");
        }
        if !c.pass && c.asserted {
            code = exit::FAILED;
        }
    }
    Ok(code)
}

fn plot_cmd(report: &Path, kind: &str, output: Option<&Path>) -> Result<i32, LabError> {
    let kind: PlotKind = kind.parse()?;
    let csv = plot::render(&io::read_report(report)?, kind)?;
    match output {
        Some(p) => io::write_text(p, &csv)?,
        None => print!("{csv}"),
    }
    Ok(exit::PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run { scenarios, overrides, out_dir } => run(scenarios, &overrides.overrides(), out_dir.as_deref()),
        Command::ListScenarios => {
            for (name, desc) in scenarios::list() {
                println!("{name:20} {desc}");
            }
            Ok(exit::PASS)
        }
        Command::VerifyBarriers { scenario, overrides } => verify_barriers(scenario, &overrides.overrides()),
        Command::Plot { report, kind, output } => plot_cmd(report, kind, output.as_deref()),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}
