//! Command-line driver for the `bunkbed` library.
//!
//! [`run_cli`] parses arguments, runs one command and returns the exit code
//! together with everything destined for stdout and stderr, so the binary
//! and the tests share one code path.

pub mod args;
pub mod commands;
pub mod report;
pub mod search;

// The command-line chapter of the guide is compiled as a doctest here.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod guide {}

use clap::Parser;

use crate::args::{Cli, RunSpec};

/// Exit code: success, no violation.
pub const EXIT_OK: i32 = 0;
/// Exit code: a verification failed or a violation was found.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit code: invalid input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `argv` (including the program name).
pub fn run_cli<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutput {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => {
                    let first = e
                        .to_string()
                        .lines()
                        .next()
                        .unwrap_or("invalid arguments")
                        .to_string();
                    CliOutput {
                        code: EXIT_INPUT,
                        stdout: String::new(),
                        stderr: format!("{first}\n"),
                    }
                }
            };
        }
    };
    let (kind, raw) = cli.command.split();
    let spec = match RunSpec::from_args(kind, raw) {
        Ok(spec) => spec,
        Err(e) => return input_error(&e),
    };
    run(&spec)
}

/// Runs a validated spec, on a dedicated pool when `--threads` was given.
pub fn run(spec: &RunSpec) -> CliOutput {
    let mut stderr = String::new();
    if spec.cutoff_raised {
        stderr.push_str(&format!(
            "warning: enumeration cutoff raised to {} random edges; runs may be slow\n",
            spec.enumerator.cutoff()
        ));
    }
    let result = match spec.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::execute(spec)),
            Err(e) => Err(bunkbed::Error::Input(format!(
                "cannot start {t} threads: {e}"
            ))),
        },
        None => commands::execute(spec),
    };
    match result {
        Ok(report) => {
            for w in &report.warnings {
                stderr.push_str(&format!("warning: {w}\n"));
            }
            CliOutput {
                code: if report.violation {
                    EXIT_VIOLATION
                } else {
                    EXIT_OK
                },
                stdout: report.render(spec.format),
                stderr,
            }
        }
        Err(e) => {
            let mut out = input_error(&e);
            out.stderr = stderr + &out.stderr;
            out
        }
    }
}

fn input_error(e: &bunkbed::Error) -> CliOutput {
    CliOutput {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}
