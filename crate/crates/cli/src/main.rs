mod args;
mod check;
mod run;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::run::{run_contract, run_curve, Curve, Failure, Report};

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

fn execute(command: &Command) -> Result<(), Failure> {
    let (report, opts) = match command {
        Command::Figure1(o) => (run_curve(Curve::Figure1, o), o),
        Command::Spread(o) => (run_curve(Curve::Spread, o), o),
        Command::Density(o) => (run_curve(Curve::Density, o), o),
        Command::Contract(o) => (run_contract(o), o),
        Command::Check(o) => (check::run_check(o), o),
    };
    let Report {
        table,
        failure,
        warnings,
    } = report?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    emit(&table.render(opts.format()), opts.out.as_deref())?;
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("relpack: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
