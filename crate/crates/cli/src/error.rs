use cxrtriage::datastore::DataError;
use cxrtriage::labeler::LexiconError;
use cxrtriage::metrics::MetricsError;
use cxrtriage::synth::SynthError;

/// Failure of one command; `Input` maps to exit code 2, `Internal` to 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError::Internal(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

macro_rules! input_error_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_error_from!(DataError, LexiconError, MetricsError, SynthError);
