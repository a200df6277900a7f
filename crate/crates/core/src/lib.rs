//! Prosody modelling toolkit: stress assignment over bracketings, tone
//! rewrite rules and transducers, timing variability metrics, and rhythm
//! formant analysis of speech audio.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ingest;
pub mod plot;
pub mod rewrite;
pub mod rfa;
pub mod stress;
pub mod timing;

use thiserror::Error;

/// Any error raised by the library, tagged by module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Stress(#[from] stress::StressError),
    #[error(transparent)]
    Fst(#[from] rewrite::FstError),
    #[error(transparent)]
    Metric(#[from] timing::MetricError),
    #[error(transparent)]
    Rfa(#[from] rfa::RfaError),
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Plot(#[from] plot::PlotError),
}

impl Error {
    /// The variant name of the underlying error, e.g. `Unparseable`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Stress(e) => e.name(),
            Error::Fst(e) => e.name(),
            Error::Metric(e) => e.name(),
            Error::Rfa(e) => e.name(),
            Error::Ingest(e) => e.name(),
            Error::Plot(e) => e.name(),
        }
    }
}
