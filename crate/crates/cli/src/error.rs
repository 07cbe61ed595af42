use std::path::PathBuf;

use molcl::arq::EnsembleError;
use molcl::bench::BenchError;
use molcl::nn::NnError;
use molcl::simcore::SimError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("invalid sample: delivery rate {rate:.3} is below 0.5 ({delivered} of {runs} runs delivered)")]
    InvalidSample { rate: f64, delivered: usize, runs: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } | Self::Other(_) => 1,
            Self::Config(_) => 3,
            Self::Data(_) => 4,
            Self::InvalidSample { .. } => 5,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidSettings(_) => Self::Config(e.to_string()),
            SimError::PlacementFailure { .. } => Self::Data(e.to_string()),
        }
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::InvalidSample(s) => Self::InvalidSample {
                rate: s.delivery_rate,
                delivered: s.delivered,
                runs: s.runs,
            },
            EnsembleError::NoRuns => Self::Config(e.to_string()),
            EnsembleError::Sim(e) => e.into(),
        }
    }
}

impl From<NnError> for CliError {
    fn from(e: NnError) -> Self {
        match e {
            NnError::InvalidConfig(_) => Self::Config(e.to_string()),
            NnError::Io(source) => Self::Io {
                path: PathBuf::new(),
                source,
            },
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::InvalidTask { .. } | BenchError::InvalidSequence(_) | BenchError::InvalidConfig(_) => {
                Self::Config(e.to_string())
            }
            BenchError::Ensemble(e) => e.into(),
            BenchError::Nn(e) => e.into(),
            BenchError::Io(source) => Self::Io {
                path: PathBuf::new(),
                source,
            },
            _ => Self::Data(e.to_string()),
        }
    }
}
