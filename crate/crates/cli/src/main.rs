mod args;
mod chart;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use tlqueue_core::{ClosedFormError, ModelError, RecognizeError, SimError, SpectralError};

use args::Cli;

/// Why a run failed, which fixes the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or inputs outside a routine's domain (exit 1).
    Usage(String),
    /// A numeric routine did not converge (exit 2).
    NonConvergence(String),
    /// No algebraic relation or fit was found (exit 3).
    Recognition(String),
    /// Files that could not be read or written (exit 1).
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::NonConvergence(_) => 2,
            Failure::Recognition(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::NonConvergence(m) | Failure::Recognition(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ClosedFormError> for Failure {
    fn from(e: ClosedFormError) -> Self {
        match e {
            ClosedFormError::Io(e) => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io(e) => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::NonConvergence { .. } | SpectralError::SingularPivot(_) => {
                Failure::NonConvergence(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<RecognizeError> for Failure {
    fn from(e: RecognizeError) -> Self {
        match e {
            RecognizeError::NoRelationFound { .. }
            | RecognizeError::NoFactorization(_)
            | RecognizeError::NonRealBranch
            | RecognizeError::NoIntegerFit { .. }
            | RecognizeError::InsufficientPoints { .. }
            | RecognizeError::NoRescaledFit { .. } => Failure::Recognition(e.to_string()),
            RecognizeError::Io(e) => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<chart::ChartError> for Failure {
    fn from(e: chart::ChartError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
