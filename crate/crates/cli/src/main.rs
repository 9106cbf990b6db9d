use clap::Parser;
use noma_sim_cli::args::Cli;
use noma_sim_cli::output::{analysis_rows, emit_csv, RunManifest};
use noma_sim_core::montecarlo::run_sweep;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

/// Exit statuses: 0 success, 1 I/O failure, 2 usage error (the latter is
/// also what clap's own parse errors produce).
fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        // Can only be set once per process; a failure here means a pool
        // already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build_global();
    }
    let spec = cli.to_spec();
    if let Err(e) = spec.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> io::Result<()> {
    let spec = cli.to_spec();
    let rows = run_sweep(&spec).expect("spec validated before dispatch");
    let overlay = if cli.analysis {
        analysis_rows(&spec, &mut |msg| eprintln!("warning: {msg}"))
    } else {
        Vec::new()
    };
    let manifest = RunManifest::new(spec);
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit_csv(&mut w, &manifest, &rows, &overlay)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit_csv(&mut w, &manifest, &rows, &overlay)?;
            w.flush()
        }
    }
}
