//! Command-line front end for `fqtile`: file formats, reports and subcommands.
//!
//! Exit codes: 0 valid, 1 a check failed, 2 usage, input or refusal errors.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod report;

use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use error::CliError;

use args::Command;
use commands::Outcome;
use report::Stopwatch;

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let mut sw = Stopwatch::new(cli.timings);
    let mut outcome = match &cli.command {
        Command::Construct(a) => commands::construct(a, &mut sw),
        Command::Verify(a) => commands::verify(a, &mut sw),
        Command::ToCode(a) => commands::to_code(a, &mut sw),
        Command::Search(a) => commands::search(a, &mut sw),
    }?;
    sw.finish(&mut outcome.report);
    Ok(outcome)
}

/// Runs a parsed command line, writing the report to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {t} threads: {e}"))),
        },
        None => dispatch(cli),
    };
    match result {
        Ok(outcome) => {
            let text = outcome.report.render();
            let _ = out.write_all(text.as_bytes());
            if let Some(msg) = &outcome.message {
                let _ = writeln!(err, "error: {msg}");
            }
            if let Some(path) = &cli.report {
                if let Err(e) = format::write(path, &text) {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            }
            outcome.exit
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Parses `argv` and runs it, returning the exit code with captured stdout and stderr.
pub fn run_args<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli, &mut out, &mut err),
        Err(e) => {
            let _ = write!(err, "{e}");
            e.exit_code()
        }
    };
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}
