//! Batch front end: parses a job (from flags or a JSON job file), runs it
//! against the engine, and renders the result.

mod args;
mod job;
mod render;

use std::io::Write;

pub use args::Cli;
pub use job::{
    Command, DaniellOut, Integrand, JobSpec, Options, OutputFormat, RefineOp, StoneRow, SumOut, SvarOut, DEFAULT_SEED,
};

/// Process exit status and everything destined for standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub const EXIT_OK: i32 = 0;
/// A self-test suite reported a failure.
pub const EXIT_SELFTEST: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;

/// Why a job did not produce a result.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable input, or a payload that fails validation.
    Invalid(String),
    Engine(riesz_core::Error),
}

impl From<riesz_core::Error> for Failure {
    fn from(e: riesz_core::Error) -> Failure {
        match e {
            riesz_core::Error::Parse(msg) => Failure::Invalid(msg),
            e => Failure::Engine(e),
        }
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Engine(_) => EXIT_ENGINE,
        }
    }

    fn diagnostic(&self) -> String {
        let (name, message) = match self {
            Failure::Invalid(m) => ("ValidationError", m.clone()),
            Failure::Engine(e) => (e.name(), e.to_string()),
        };
        let v = serde_json::json!({ "error": name, "message": message });
        format!("{}\n", serde_json::to_string_pretty(&v).expect("json value"))
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                };
            }
            let f = Failure::Invalid(e.to_string().trim_end().to_string());
            return Outcome {
                code: f.code(),
                stdout: f.diagnostic(),
            };
        }
    };
    let result = cli.into_spec().and_then(|spec| {
        log::info!("running {:?}", spec.command);
        job::execute(&spec)
    });
    match result {
        Ok((code, stdout)) => Outcome { code, stdout },
        Err(f) => {
            log::warn!("job failed: {f:?}");
            Outcome {
                code: f.code(),
                stdout: f.diagnostic(),
            }
        }
    }
}

/// Entry point for the binary: logging from `RIESZ_LOG`, then [`run`].
pub fn main_with_env() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RIESZ_LOG"))
        .format_timestamp(None)
        .init();
    let out = run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = stdout.write_all(out.stdout.as_bytes());
    let _ = stdout.flush();
    out.code
}
