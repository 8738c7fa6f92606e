//! EEG screening pipeline for Parkinson's disease studies.
//!
//! The crate covers the whole path from raw recordings to a comparison
//! table of classifiers:
//!
//! ```text
//! BDF / CSV recordings + manifest            ingest
//!   ├─ 60 Hz notch, broadband band-pass      dsp::filter
//!   ├─ delta/theta/alpha/beta/gamma split    dsp::rhythm
//!   ├─ fixed-length epochs                   dsp::epoch
//!   ├─ band power, periodogram, FFT          spectral
//!   ├─ std/kurtosis/variance/norm/energy/rms features
//!   ├─ SVM, KNN, LDA, QDA, NB, DT, RF, vote  classifiers
//!   └─ subject-grouped k-fold, kappa, report eval
//! ```
//!
//! Every stage is a plain function over owned data, so individual steps can be
//! reused outside the pipeline. The `examples/` directory has one runnable
//! program per capability, and the `pdeeg` binary wraps the experiment runner.

// `!(x > 0.0)` is used on purpose so NaN parameters are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifiers;
pub mod cli;
pub mod config;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod spectral;
pub mod synth;
pub mod warning;

pub use error::{Error, Result};
pub use warning::Warning;
