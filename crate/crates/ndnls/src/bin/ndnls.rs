use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ndnls::pipeline::{dispatch, Command, Config};

/// Inverse scattering solver for the nonlocal derivative NLS equation.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// check | scatter | evolve | solve | oracle | compare
    command: String,
    #[arg(long)]
    config: PathBuf,
    /// Overrides time.t
    #[arg(long)]
    t: Option<f64>,
    /// Overrides output.dir
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> ndnls::Result<()> {
    let cmd: Command = cli.command.parse()?;
    let mut cfg = Config::load(&cli.config)?;
    if let Some(t) = cli.t {
        cfg.time_t = t;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    cfg.validate()?;
    dispatch(cmd, &cfg, &mut std::io::stdout())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
