use clap::{Args, Parser, Subcommand};
use nsp_harness::config::ExperimentConfig;
use nsp_harness::{load_config, parse_config, run_experiment, ExperimentKind, HarnessError, Summary};
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nsp-lab", about = "Viscous contact wave experiments for the Navier-Stokes-Poisson system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile invariants, residual decay, decay integrals and distances.
    ProfileVerify(Common),
    /// Perturbed wave integrated with the diagnostics stream.
    StabilityRun(Common),
    /// Distance to the sharp contact over a fan of conductivities.
    KappaSweep(Common),
    /// Boundary volume identity over a fan of grids.
    BoundaryIdentity(Common),
    /// Strength scaling of residuals, integrals and the weight.
    DecaySuite(Common),
    /// Load the configuration and print it with defaults filled in.
    ValidateConfig(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file; the baseline is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; defaults to experiment.output_dir, then `out/<kind>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; defaults to experiment.workers.
    #[arg(long)]
    workers: Option<usize>,
    /// Replace one configuration value, e.g. `physics.kappa=0.5`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Disable colored output (also honored through NO_COLOR).
    #[arg(long)]
    no_color: bool,
}

impl Common {
    fn load(&self) -> nsp_harness::Result<ExperimentConfig> {
        match &self.config {
            Some(path) => load_config(path, &self.overrides),
            None => parse_config("", "<defaults>", &self.overrides),
        }
    }

    fn color(&self) -> bool {
        !self.no_color && std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
    }
}

fn paint(text: &str, code: &str, color: bool) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn report(summary: &Summary, out: &Path, color: bool) {
    println!("{} (config {})", summary.kind, &summary.config_hash[..12]);
    for p in &summary.points {
        if let Some(e) = &p.error {
            println!("{} point {}: {e}", paint("ERROR", "31", color), p.name);
        }
    }
    for c in &summary.checks {
        let verdict = if c.passed() {
            paint("PASS", "32", color)
        } else {
            paint("FAIL", "31", color)
        };
        println!(
            "{verdict} {:<48} measured {:<12.6e} target {:<10.4e} tol {:.2e}",
            c.check, c.measured, c.target, c.tolerance
        );
    }
    println!("status: {:?}; outputs in {}", summary.status, out.display());
}

fn fail(e: &HarnessError, color: bool) -> ExitCode {
    eprintln!("{} {e}", paint("error:", "31", color));
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::ProfileVerify(c) => (Some(ExperimentKind::ProfileVerify), c),
        Command::StabilityRun(c) => (Some(ExperimentKind::StabilityRun), c),
        Command::KappaSweep(c) => (Some(ExperimentKind::KappaSweep), c),
        Command::BoundaryIdentity(c) => (Some(ExperimentKind::BoundaryIdentity), c),
        Command::DecaySuite(c) => (Some(ExperimentKind::DecaySuite), c),
        Command::ValidateConfig(c) => (None, c),
    };
    let color = common.color();
    let cfg = match common.load() {
        Ok(c) => c,
        Err(e) => return fail(&e, color),
    };
    let Some(kind) = kind else {
        print!("{}", cfg.resolved_toml());
        println!("# config_hash = {}", cfg.config_hash());
        if let Some(out) = &common.out {
            let written = std::fs::create_dir_all(out)
                .and_then(|_| std::fs::write(out.join("resolved.toml"), cfg.resolved_toml()));
            if let Err(e) = written {
                return fail(&HarnessError::io(out, e), color);
            }
        }
        return ExitCode::SUCCESS;
    };
    let out = common
        .out
        .clone()
        .or_else(|| cfg.experiment.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").join(kind.as_str()));
    let workers = common.workers.unwrap_or(cfg.experiment.workers).max(1);
    match run_experiment(kind, &cfg, &out, workers) {
        Ok(summary) => {
            report(&summary, &out, color);
            ExitCode::from(summary.status.exit_code() as u8)
        }
        Err(e) => fail(&e, color),
    }
}
