//! Runs a JSON experiment config through the library runner, the same path
//! the `wdrcm` binary takes.
//!
//! `cargo run --example run_config -- configs/theta.json /tmp/theta-out`

use std::path::PathBuf;

use wdrcm::experiment::{run, ExperimentConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let config = PathBuf::from(args.next().unwrap_or_else(|| "configs/theta.json".into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/example-out".into()));
    let cfg = ExperimentConfig::from_file(&config).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    });
    match run(&cfg, Some(&out)) {
        Ok(s) => {
            for o in &s.manifest.outputs {
                println!("{} ({} rows, {})", o.file, o.rows, o.schema);
            }
            std::process::exit(s.exit_code());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
