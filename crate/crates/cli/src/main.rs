use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinor_eit_cli::commands;
use spinor_eit_cli::config::RunConfig;
use spinor_eit_cli::exit;

/// Two-component slow light with vortex control beams: scans, maps, sweeps and checks.
#[derive(Parser)]
#[command(name = "spinor-eit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the validity constraints (exit 0 pass, 2 warn, 3 fail).
    Check(Common),
    /// Radial transmission scan at zero azimuth.
    Scan(Common),
    /// Generated-component intensity and phase over the (rho, phi) plane.
    Map(Common),
    /// Run the oracle-agreement and convergence checks.
    Validate(Common),
    /// Peak transfer over a grid of (S, a, alpha, xi).
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::ERROR } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (run, args): (fn(&RunConfig, &std::path::Path) -> _, Common) = match cli.command {
        Command::Check(a) => (commands::run_check, a),
        Command::Scan(a) => (commands::run_scan, a),
        Command::Map(a) => (commands::run_map, a),
        Command::Validate(a) => (commands::run_validate, a),
        Command::Sweep(a) => (commands::run_sweep, a),
    };
    let result = RunConfig::load(&args.config).and_then(RunConfig::resolve).and_then(|cfg| {
        let out = args.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        run(&cfg, &out)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
