//! Rhythm formant analysis.
//!
//! The pipeline demodulates a speech signal into a slow amplitude envelope
//! (AEM) and an F0 track (FEM), takes low-frequency spectra of both (AEMS,
//! FEMS), and picks the strongest spectral bins as rhythm formants:
//!
//! ```text
//! Signal ─┬─ extract_envelope ─ lf_spectrum ─ pick_formants ─┐
//!         └─ extract_f0 ─────── lf_spectrum ─ pick_formants ─┴─ correlate_spectra
//! ```
//!
//! [`fourier_synthesize`] builds test signals with known modulators, which
//! is how the pipeline is calibrated.

mod dsp;
mod envelope;
mod f0;
mod formants;
mod pipeline;
mod spectrum;
mod synth;

use serde::Serialize;
use thiserror::Error;

pub use dsp::{interpolate, median_filter, pearson, polyfit_values, power_spectrum, sliding_max};
pub use envelope::{extract_envelope, EnvWindow, Envelope, EnvelopeParams};
pub use f0::{extract_f0, AutocorrelationTracker, F0Params, F0Preset, F0Track, PitchTracker};
pub use formants::{
    pick_formants, pick_formants_with, HistBin, Histogram, HistogramParams, RFormant, RFormantSet,
};
pub use pipeline::{analyze, analyze_with, RfaAnalysis, RfaConfig, RfaReport, SpectrumData};
pub use spectrum::{correlate_spectra, lf_spectrum, LfSpectrum, LfsParams, SpectrumMode};
pub use synth::{fourier_synthesize, AmModulator, Carrier, FmModulator, SynthSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RfaError {
    #[error("signal has {len} samples, needs more than {needed}")]
    SignalTooShort { len: usize, needed: usize },
    #[error("no spectral bins between {fmin} Hz and {fmax} Hz")]
    EmptyBand { fmin: f64, fmax: f64 },
    #[error("no voiced frames found")]
    NoVoicedFrames,
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("signal is silent (all samples zero)")]
    DegenerateAudio,
}

impl RfaError {
    pub fn name(&self) -> &'static str {
        match self {
            RfaError::SignalTooShort { .. } => "SignalTooShort",
            RfaError::EmptyBand { .. } => "EmptyBand",
            RfaError::NoVoicedFrames => "NoVoicedFrames",
            RfaError::DegenerateSpectrum(_) => "DegenerateSpectrum",
            RfaError::InvalidParameters(_) => "InvalidParameters",
            RfaError::DegenerateAudio => "DegenerateAudio",
        }
    }
}

/// Mono audio at sampling rate `fs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self, RfaError> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(RfaError::InvalidParameters(format!(
                "sampling rate must be positive, got {fs}"
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(RfaError::InvalidParameters("samples must be finite".into()));
        }
        Ok(Signal { samples, fs })
    }

    /// Scales so that the largest absolute sample is exactly 1.
    pub fn normalized(mut self) -> Result<Self, RfaError> {
        let peak = self.peak();
        if peak == 0.0 {
            return Err(RfaError::DegenerateAudio);
        }
        for s in &mut self.samples {
            *s /= peak;
        }
        Ok(self)
    }

    pub fn scaled(&self, c: f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|s| s * c).collect(),
            fs: self.fs,
        }
    }

    pub fn reversed(&self) -> Signal {
        let mut samples = self.samples.clone();
        samples.reverse();
        Signal {
            samples,
            fs: self.fs,
        }
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }
}
