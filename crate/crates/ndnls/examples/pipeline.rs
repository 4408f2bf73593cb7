//! Config-driven pipeline, the same path the `ndnls` binary takes.
//!
//! `cargo run --release --example pipeline -- configs/default.cfg solve`

use ndnls::pipeline::{dispatch, Command, Config};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "configs/default.cfg".into());
    let commands: Vec<String> = args.collect();
    let commands = if commands.is_empty() {
        vec!["check".to_string()]
    } else {
        commands
    };
    let result = Config::load(path.as_ref()).and_then(|cfg| {
        commands.iter().try_for_each(|c| {
            println!("== {c}");
            dispatch(c.parse::<Command>()?, &cfg, &mut std::io::stdout())
        })
    });
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
