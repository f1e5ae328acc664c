//! `momentlab` command-line front end.

mod commands;
mod config;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use config::{cli, RunConfig};

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match RunConfig::resolve(&matches) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let (rows, table) = match commands::run(&cfg) {
        Ok(r) => (r.rows, r.table),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if matches!(e, momentlab::Error::Config(_) | momentlab::Error::Precondition(_)) { 2 } else { 1 });
        }
    };
    match output::emit(&cfg, &rows, table.as_deref(), start.elapsed()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
