use serde::{Deserialize, Serialize};

use super::envelope::{extract_envelope, Envelope, EnvelopeParams};
use super::f0::{F0Params, F0Track, PitchTracker};
use super::formants::{pick_formants_with, Histogram, HistogramParams, RFormant};
use super::spectrum::{correlate_spectra, lf_spectrum, LfSpectrum, LfsParams};
use super::{AutocorrelationTracker, RfaError, Signal};

/// Every tunable of the analysis. `lfs` applies to both AEMS and FEMS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfaConfig {
    pub envelope: EnvelopeParams,
    pub lfs: LfsParams,
    pub f0: F0Params,
    pub rhythm_count: usize,
    pub histogram: HistogramParams,
}

impl Default for RfaConfig {
    fn default() -> Self {
        RfaConfig {
            envelope: EnvelopeParams::default(),
            lfs: LfsParams::default(),
            f0: F0Params::default(),
            rhythm_count: 6,
            histogram: HistogramParams::default(),
        }
    }
}

/// Intermediate and final results for one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct RfaAnalysis {
    pub duration_s: f64,
    pub envelope: Envelope,
    pub f0: F0Track,
    pub aems: LfSpectrum,
    pub fems: LfSpectrum,
    pub formants_am: Vec<RFormant>,
    pub formants_fm: Vec<RFormant>,
    /// Weighted histogram over the AEMS formants.
    pub histogram: Histogram,
    pub pearson_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumData {
    pub freqs: Vec<f64>,
    pub mags: Vec<f64>,
}

impl From<&LfSpectrum> for SpectrumData {
    fn from(sp: &LfSpectrum) -> Self {
        SpectrumData {
            freqs: sp.freqs.clone(),
            mags: sp.mags.clone(),
        }
    }
}

/// The JSON written per analysed file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RfaReport {
    pub duration_s: f64,
    pub aems: SpectrumData,
    pub fems: SpectrumData,
    pub formants_am: Vec<RFormant>,
    pub formants_fm: Vec<RFormant>,
    pub histogram: Histogram,
    pub pearson_r: f64,
}

impl RfaAnalysis {
    pub fn report(&self) -> RfaReport {
        RfaReport {
            duration_s: self.duration_s,
            aems: (&self.aems).into(),
            fems: (&self.fems).into(),
            formants_am: self.formants_am.clone(),
            formants_fm: self.formants_fm.clone(),
            histogram: self.histogram.clone(),
            pearson_r: self.pearson_r,
        }
    }
}

pub fn analyze(s: &Signal, config: &RfaConfig) -> Result<RfaAnalysis, RfaError> {
    analyze_with(s, config, &AutocorrelationTracker)
}

pub fn analyze_with(
    s: &Signal,
    config: &RfaConfig,
    tracker: &dyn PitchTracker,
) -> Result<RfaAnalysis, RfaError> {
    if config.rhythm_count == 0 {
        return Err(RfaError::InvalidParameters(
            "rhythm count must be at least 1".into(),
        ));
    }
    let envelope = extract_envelope(s, &config.envelope)?;
    let aems = lf_spectrum(&envelope.values, envelope.fs, &config.lfs)?;
    let f0 = tracker.track(s, &config.f0)?;
    let fems = f0.spectrum(&config.lfs)?;
    let am = pick_formants_with(&aems, config.rhythm_count, &config.histogram);
    let fm = pick_formants_with(&fems, config.rhythm_count, &config.histogram);
    let pearson_r = correlate_spectra(&aems, &fems)?;
    Ok(RfaAnalysis {
        duration_s: s.duration_s(),
        envelope,
        f0,
        aems,
        fems,
        formants_am: am.formants,
        formants_fm: fm.formants,
        histogram: am.histogram,
        pearson_r,
    })
}
