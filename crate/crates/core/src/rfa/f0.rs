//! F0 tracking for the frequency-modulation branch.
//!
//! The tracker sits behind [`PitchTracker`]; the default is a normalized
//! autocorrelation tracker. Unvoiced frames are filled by linear
//! interpolation between voiced neighbours, and leading or trailing gaps
//! hold the nearest voiced value, so the track can go straight into a
//! Fourier transform.

use serde::{Deserialize, Serialize};

use super::spectrum::{lf_spectrum, LfSpectrum, LfsParams};
use super::{RfaError, Signal};

/// A local autocorrelation peak within this fraction of the best one, at a
/// shorter lag, wins. Guards against picking a subharmonic.
const OCTAVE_TOLERANCE: f64 = 0.9;
/// Frames quieter than this fraction of the signal peak (RMS) are unvoiced.
const SILENCE_RMS: f64 = 1e-3;
/// Minimum energy ratio between the compared span and its lagged copy.
/// Onsets and offsets fall below it; their correlation peak is biased
/// toward short lags.
const ENERGY_BALANCE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F0Preset {
    Male,
    Female,
}

impl F0Preset {
    pub fn range(self) -> (f64, f64) {
        match self {
            F0Preset::Male => (75.0, 300.0),
            F0Preset::Female => (120.0, 400.0),
        }
    }
}

impl std::str::FromStr for F0Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "male" => Ok(F0Preset::Male),
            "female" => Ok(F0Preset::Female),
            other => Err(format!("unknown F0 preset `{other}` (male|female)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F0Params {
    pub fmin: f64,
    pub fmax: f64,
    pub hop_ms: f64,
    pub voicing_threshold: f64,
}

impl F0Params {
    pub fn preset(p: F0Preset) -> Self {
        let (fmin, fmax) = p.range();
        F0Params {
            fmin,
            fmax,
            hop_ms: 10.0,
            voicing_threshold: 0.3,
        }
    }

    fn validate(&self, fs: f64) -> Result<(), RfaError> {
        if !(self.fmin > 0.0 && self.fmax > self.fmin) {
            return Err(RfaError::InvalidParameters(format!(
                "F0 range must satisfy 0 < fmin < fmax, got {}..{}",
                self.fmin, self.fmax
            )));
        }
        if !(self.fmax < fs / 2.0) {
            return Err(RfaError::InvalidParameters(format!(
                "F0 ceiling {} Hz is not below Nyquist ({} Hz)",
                self.fmax,
                fs / 2.0
            )));
        }
        if !(self.hop_ms > 0.0) {
            return Err(RfaError::InvalidParameters(format!(
                "F0 hop must be positive, got {} ms",
                self.hop_ms
            )));
        }
        Ok(())
    }
}

impl Default for F0Params {
    fn default() -> Self {
        F0Params::preset(F0Preset::Male)
    }
}

/// F0 per frame, gaps filled. `voiced[i]` records whether frame `i` was
/// measured or filled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct F0Track {
    pub values: Vec<f64>,
    pub voiced: Vec<bool>,
    pub hop_s: f64,
    pub fmin: f64,
    pub fmax: f64,
}

impl F0Track {
    pub fn frame_rate(&self) -> f64 {
        1.0 / self.hop_s
    }

    pub fn duration_s(&self) -> f64 {
        self.values.len() as f64 * self.hop_s
    }

    /// Frame centre times in seconds.
    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len())
            .map(|i| (i as f64 + 0.5) * self.hop_s)
            .collect()
    }

    pub fn voiced_fraction(&self) -> f64 {
        self.voiced.iter().filter(|v| **v).count() as f64 / self.voiced.len().max(1) as f64
    }

    /// Mean-subtracted track in Hz, the input to the FEMS.
    pub fn modulation(&self) -> Vec<f64> {
        let mean = self.values.iter().sum::<f64>() / self.values.len().max(1) as f64;
        self.values.iter().map(|v| v - mean).collect()
    }

    pub fn spectrum(&self, params: &LfsParams) -> Result<LfSpectrum, RfaError> {
        lf_spectrum(&self.modulation(), self.frame_rate(), params)
    }
}

pub trait PitchTracker {
    fn track(&self, s: &Signal, params: &F0Params) -> Result<F0Track, RfaError>;
}

/// Normalized autocorrelation over the lag range `[fs/fmax, fs/fmin]`, with
/// parabolic refinement of the chosen peak.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutocorrelationTracker;

pub fn extract_f0(s: &Signal, params: &F0Params) -> Result<F0Track, RfaError> {
    AutocorrelationTracker.track(s, params)
}

impl PitchTracker for AutocorrelationTracker {
    fn track(&self, s: &Signal, params: &F0Params) -> Result<F0Track, RfaError> {
        let fs = s.fs();
        params.validate(fs)?;
        let x = s.samples();
        let hop = ((params.hop_ms * fs / 1000.0).round() as usize).max(1);
        let lag_min = ((fs / params.fmax).floor() as usize).max(2);
        let lag_max = (fs / params.fmin).ceil() as usize;
        // compared span plus the largest lag (and one extra for refinement)
        let span = lag_max;
        let seg = span + lag_max + 2;
        if x.len() < seg {
            return Err(RfaError::SignalTooShort {
                len: x.len(),
                needed: seg,
            });
        }
        let frames = x.len() / hop;
        let peak = s.peak();
        let mut squares = Vec::with_capacity(x.len() + 1);
        squares.push(0.0);
        for v in x {
            squares.push(squares.last().unwrap() + v * v);
        }
        let energy = |from: usize, len: usize| squares[from + len] - squares[from];

        let mut raw: Vec<Option<f64>> = Vec::with_capacity(frames);
        let mut r = vec![0.0; lag_max + 2];
        for i in 0..frames {
            let centre = i * hop + hop / 2;
            let start = centre.saturating_sub(seg / 2).min(x.len() - seg);
            let e0 = energy(start, span);
            let rms = (e0 / span as f64).sqrt();
            if peak == 0.0 || rms < SILENCE_RMS * peak {
                raw.push(None);
                continue;
            }
            for (lag, slot) in r.iter_mut().enumerate().skip(lag_min - 1) {
                let el = energy(start + lag, span);
                let denom = (e0 * el).sqrt();
                *slot = if denom > 0.0 {
                    let a = &x[start..start + span];
                    let b = &x[start + lag..start + lag + span];
                    a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() / denom
                } else {
                    0.0
                };
            }
            let peaks: Vec<usize> = (lag_min..=lag_max)
                .filter(|&l| r[l] >= r[l - 1] && r[l] > r[l + 1])
                .collect();
            let best = peaks
                .iter()
                .map(|&l| r[l])
                .fold(f64::NEG_INFINITY, f64::max);
            let chosen = peaks
                .iter()
                .copied()
                .find(|&l| r[l] >= OCTAVE_TOLERANCE * best);
            let balanced = |l: usize| {
                let el = energy(start + l, span);
                e0.min(el) >= ENERGY_BALANCE * e0.max(el)
            };
            match chosen {
                Some(l) if r[l] >= params.voicing_threshold && balanced(l) => {
                    let (a, b, c) = (r[l - 1], r[l], r[l + 1]);
                    let curv = a - 2.0 * b + c;
                    let shift = if curv < 0.0 {
                        0.5 * (a - c) / curv
                    } else {
                        0.0
                    };
                    let f0 = fs / (l as f64 + shift.clamp(-0.5, 0.5));
                    raw.push(Some(f0.clamp(params.fmin, params.fmax)));
                }
                _ => raw.push(None),
            }
        }
        let voiced: Vec<bool> = raw.iter().map(Option::is_some).collect();
        let values = fill_gaps(&raw).ok_or(RfaError::NoVoicedFrames)?;
        Ok(F0Track {
            values,
            voiced,
            hop_s: hop as f64 / fs,
            fmin: params.fmin,
            fmax: params.fmax,
        })
    }
}

/// Linear interpolation across interior gaps; edges hold the nearest
/// voiced value. `None` when nothing is voiced.
fn fill_gaps(raw: &[Option<f64>]) -> Option<Vec<f64>> {
    let known: Vec<(usize, f64)> = raw
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .collect();
    let (&(first_i, first_v), &(last_i, last_v)) = (known.first()?, known.last()?);
    let mut out = vec![0.0; raw.len()];
    out[..=first_i].fill(first_v);
    out[last_i..].fill(last_v);
    for w in known.windows(2) {
        let (i0, v0) = w[0];
        let (i1, v1) = w[1];
        for (k, slot) in out.iter_mut().enumerate().take(i1 + 1).skip(i0) {
            let t = (k - i0) as f64 / (i1 - i0) as f64;
            *slot = v0 + t * (v1 - v0);
        }
    }
    Some(out)
}
