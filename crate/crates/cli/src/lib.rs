//! Command-line front end for `mibound`.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code, so the binary and the tests share one code path.

mod args;
mod commands;
mod reproduce;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use reproduce::{reproduce_all, HEADLINE_EPS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {source}")]
    Invalid {
        flag: &'static str,
        #[source]
        source: mibound::Error,
    },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(format!("write failed: {e}"))
    }
}

pub(crate) trait FlagContext<T> {
    /// Attributes a library error to the flag whose value caused it, falling
    /// back to `default` when the error does not identify one.
    fn flag(self, default: &'static str) -> Result<T, CliError>;
    /// Treats a library error as an internal failure.
    fn internal(self) -> Result<T, CliError>;
}

// library argument names that correspond one-to-one to a flag
const KNOWN_FLAGS: [(&str, &str); 13] = [
    ("eps", "--eps"),
    ("b", "--b"),
    ("c", "--train-size"),
    ("grid", "--grid"),
    ("id", "--id"),
    ("w0", "--w0"),
    ("grad_step", "--grad-step"),
    ("sigma", "--sigma"),
    ("m", "--m"),
    ("rate", "--rate"),
    ("base_prior", "--base-prior"),
    ("trials", "--trials"),
    ("alpha", "--alpha"),
];

fn flag_for(e: &mibound::Error, default: &'static str) -> &'static str {
    let name = match e {
        mibound::Error::InvalidParameter { name, .. }
        | mibound::Error::InvalidProbability { name, .. }
        | mibound::Error::InvalidEpsilon { name, .. } => *name,
        _ => return default,
    };
    KNOWN_FLAGS.iter().find(|(n, _)| *n == name).map_or(default, |(_, f)| f)
}

impl<T> FlagContext<T> for mibound::Result<T> {
    fn flag(self, default: &'static str) -> Result<T, CliError> {
        self.map_err(|source| match source {
            mibound::Error::NoConvergence(m) => CliError::Internal(m),
            source => CliError::Invalid {
                flag: flag_for(&source, default),
                source,
            },
        })
    }

    fn internal(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Internal(e.to_string()))
    }
}

/// Whether a subcommand finished normally or found a bound violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };

    let result = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                commands::dispatch(&cli.command, &mut w).and_then(|s| {
                    w.flush()?;
                    Ok(s)
                })
            }
            Err(e) => Err(CliError::Internal(format!("cannot create {}: {e}", path.display()))),
        },
        None => commands::dispatch(&cli.command, stdout).and_then(|s| {
            stdout.flush()?;
            Ok(s)
        }),
    };

    match result {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Violation) => {
            let _ = writeln!(stderr, "error: bound violation found");
            EXIT_VIOLATION
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
