use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shiftlab_cli::output::write_outputs;
use shiftlab_cli::{presets, run, CliError, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "shiftlab", version, about = "Criterion checks for weighted shifts on Hilbert C*-modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a config file or a bundled preset.
    Run {
        /// Path to a JSON config, or a preset name.
        config: String,
        /// Output directory (default: the config's output_dir, else `out/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List bundled presets.
    ListPresets,
}

fn load(arg: &str) -> Result<ExperimentConfig, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return ExperimentConfig::load(path);
    }
    let name = arg.strip_suffix(".json").unwrap_or(arg);
    presets::get(name).unwrap_or_else(|| Err(CliError::Io(format!("{arg}: no such file or preset"))))
}

fn threads() -> Option<usize> {
    std::env::var("SHIFTLAB_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::ListPresets => {
            for (name, desc) in presets::list()? {
                println!("{name:<20} {desc}");
            }
            Ok(0)
        }
        Command::Run { config, out, max_k, tol } => {
            let cfg = load(&config)?;
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads() {
                pool = pool.num_threads(n);
            }
            let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
            let report = pool.install(|| run(&cfg, max_k, tol))?;
            write_outputs(&dir, &report)?;
            for o in &report.outcomes {
                let r = &o.report;
                let at = r.satisfied_at_k.map(|k| format!(" at k = {k}")).unwrap_or_default();
                println!("{:<24} {:?}{at} ({:.1} ms)", r.check, r.verdict, o.elapsed_ms);
            }
            println!("wrote {} ({:.1} ms total)", dir.display(), report.elapsed_ms);
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
