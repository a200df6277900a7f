//! Fourier synthesis of modulated carriers, the pipeline's calibration
//! source.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{RfaError, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmModulator {
    pub freq: f64,
    /// 0 leaves the carrier untouched; 1 swings it fully to zero.
    pub depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmModulator {
    pub freq: f64,
    /// Peak frequency deviation in Hz.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    pub freq: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
    #[serde(default)]
    pub am: Vec<AmModulator>,
    #[serde(default)]
    pub fm: Vec<FmModulator>,
}

fn unit() -> f64 {
    1.0
}

impl Carrier {
    pub fn new(freq: f64) -> Self {
        Carrier {
            freq,
            amplitude: 1.0,
            am: Vec::new(),
            fm: Vec::new(),
        }
    }

    pub fn with_am(mut self, freq: f64, depth: f64) -> Self {
        self.am.push(AmModulator { freq, depth });
        self
    }

    pub fn with_fm(mut self, freq: f64, deviation: f64) -> Self {
        self.fm.push(FmModulator { freq, deviation });
        self
    }

    fn validate(&self, fs: f64) -> Result<(), RfaError> {
        let bad = |msg: String| Err(RfaError::InvalidParameters(msg));
        if !(self.freq > 0.0) || !(self.amplitude > 0.0) {
            return bad(format!(
                "carrier needs positive frequency and amplitude, got {} Hz x {}",
                self.freq, self.amplitude
            ));
        }
        for m in &self.am {
            if !(m.freq > 0.0) || !(0.0..=1.0).contains(&m.depth) {
                return bad(format!(
                    "AM modulator needs freq > 0 and depth in [0, 1], got {} Hz depth {}",
                    m.freq, m.depth
                ));
            }
        }
        let mut swing = 0.0;
        for m in &self.fm {
            if !(m.freq > 0.0) || !(m.deviation >= 0.0) {
                return bad(format!(
                    "FM modulator needs freq > 0 and deviation >= 0, got {} Hz dev {}",
                    m.freq, m.deviation
                ));
            }
            swing += m.deviation;
        }
        if self.freq - swing <= 0.0 {
            return bad(format!(
                "carrier {} Hz with total deviation {swing} Hz reaches non-positive frequency",
                self.freq
            ));
        }
        if self.freq + swing >= fs / 2.0 {
            return bad(format!(
                "carrier {} Hz with total deviation {swing} Hz reaches Nyquist ({} Hz)",
                self.freq,
                fs / 2.0
            ));
        }
        Ok(())
    }

    fn sample(&self, t: f64) -> f64 {
        let phase = 2.0 * PI * self.freq * t
            + self
                .fm
                .iter()
                .map(|m| m.deviation / m.freq * (2.0 * PI * m.freq * t).sin())
                .sum::<f64>();
        let gain: f64 = self
            .am
            .iter()
            .map(|m| 1.0 - m.depth * (1.0 - (2.0 * PI * m.freq * t).cos()) / 2.0)
            .product();
        self.amplitude * gain * phase.sin()
    }
}

/// A synthesis job as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub duration_s: f64,
    pub fs: f64,
    pub carriers: Vec<Carrier>,
}

impl SynthSpec {
    pub fn synthesize(&self) -> Result<Signal, RfaError> {
        fourier_synthesize(&self.carriers, self.duration_s, self.fs)
    }
}

/// Sum of carriers, each scaled by a product of raised cosines (AM) and
/// phase-modulated by sinusoids (FM), normalized to a peak of 1.
pub fn fourier_synthesize(
    carriers: &[Carrier],
    duration_s: f64,
    fs: f64,
) -> Result<Signal, RfaError> {
    if carriers.is_empty() {
        return Err(RfaError::InvalidParameters("no carriers given".into()));
    }
    if !(duration_s > 0.0 && fs > 0.0) {
        return Err(RfaError::InvalidParameters(format!(
            "duration and rate must be positive, got {duration_s} s at {fs} Hz"
        )));
    }
    for c in carriers {
        c.validate(fs)?;
    }
    let n = (duration_s * fs).round() as usize;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            carriers.iter().map(|c| c.sample(t)).sum()
        })
        .collect();
    Signal::new(samples, fs)?.normalized()
}
