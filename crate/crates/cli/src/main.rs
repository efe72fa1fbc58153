mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;
use negdep::Exec;

use args::{Cli, Cmd};
use commands::CliError;

fn run(cli: &Cli) -> Result<String, CliError> {
    let exec = Exec::Parallel;
    let mut out = commands::header(cli)?;
    match &cli.cmd {
        Cmd::Gen(a) => commands::gen(a, exec, &mut out)?,
        Cmd::Criteria(a) => commands::criteria(a, exec, &mut out)?,
        Cmd::Cqe(a) => commands::cqe(a, exec, &mut out)?,
        Cmd::Converge(a) => commands::converge(a, exec, &mut out)?,
        Cmd::Hist(a) => commands::hist(a, exec, &mut out)?,
    }
    Ok(out)
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| run(&cli)).and_then(|text| commands::write_output(cli.out.as_deref(), &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
