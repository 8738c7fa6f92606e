use std::path::PathBuf;

use crate::classifiers::ClassifierError;
use crate::config::ConfigError;
use crate::dsp::DspError;
use crate::eval::EvalError;
use crate::features::FeatureError;
use crate::ingest::IngestError;
use crate::spectral::SpectralError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error. Module errors convert into it; the experiment runner
/// wraps them with the pipeline stage that failed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn in_stage(self, stage: impl Into<String>) -> Error {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Attach a stage name to any error convertible into [`Error`].
pub trait StageContext<T> {
    fn stage(self, stage: &str) -> Result<T>;
}

impl<T, E: Into<Error>> StageContext<T> for std::result::Result<T, E> {
    fn stage(self, stage: &str) -> Result<T> {
        self.map_err(|e| e.into().in_stage(stage))
    }
}
