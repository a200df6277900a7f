use serde::{Deserialize, Serialize};

use super::dsp::{median_filter, sliding_max};
use super::{RfaError, Signal};

/// Width of the peak-picking window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvWindow {
    Samples(usize),
    Millis(f64),
}

impl EnvWindow {
    pub fn samples_at(&self, fs: f64) -> usize {
        match *self {
            EnvWindow::Samples(n) => n.max(1),
            EnvWindow::Millis(ms) => ((ms * fs / 1000.0).round() as usize).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub window: EnvWindow,
    /// Odd median-filter length applied to the peak trace.
    pub medfilt: usize,
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        EnvelopeParams {
            window: EnvWindow::Samples(20),
            medfilt: 501,
        }
    }
}

impl EnvelopeParams {
    pub fn validate(&self) -> Result<(), RfaError> {
        if self.medfilt.is_multiple_of(2) {
            return Err(RfaError::InvalidParameters(format!(
                "envelope median filter length must be odd, got {}",
                self.medfilt
            )));
        }
        if let EnvWindow::Millis(ms) = self.window {
            if !(ms > 0.0) {
                return Err(RfaError::InvalidParameters(format!(
                    "envelope window must be positive, got {ms} ms"
                )));
            }
        }
        if self.window == EnvWindow::Samples(0) {
            return Err(RfaError::InvalidParameters(
                "envelope window must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Amplitude envelope at the source sampling rate, peak-normalized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub values: Vec<f64>,
    pub fs: f64,
    pub method: &'static str,
}

impl Envelope {
    pub fn duration_s(&self) -> f64 {
        self.values.len() as f64 / self.fs
    }
}

/// Peak-picking demodulation: rectify, take the maximum over a moving
/// window, pad back to the input length with edge values, median-filter,
/// and scale to a peak of 1.
pub fn extract_envelope(s: &Signal, params: &EnvelopeParams) -> Result<Envelope, RfaError> {
    params.validate()?;
    let w = params.window.samples_at(s.fs());
    let n = s.len();
    if n <= w {
        return Err(RfaError::SignalTooShort { len: n, needed: w });
    }
    let rectified: Vec<f64> = s.samples().iter().map(|x| x.abs()).collect();
    let mut peaks = sliding_max(&rectified, w);
    // n - w windows, as in the reference chain (the final full window is dropped)
    peaks.truncate(n - w);
    let pad_left = w / 2;
    let pad_right = w - pad_left;
    let mut padded = Vec::with_capacity(n);
    padded.extend(std::iter::repeat_n(peaks[0], pad_left));
    padded.extend_from_slice(&peaks);
    padded.extend(std::iter::repeat_n(peaks[peaks.len() - 1], pad_right));

    let mut values = median_filter(&padded, params.medfilt);
    let peak = values.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(RfaError::DegenerateAudio);
    }
    for v in &mut values {
        *v /= peak;
    }
    Ok(Envelope {
        values,
        fs: s.fs(),
        method: "peak-pick",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, secs: f64, fs: f64) -> Signal {
        let n = (secs * fs) as usize;
        Signal::new(
            (0..n)
                .map(|i| (2.0 * PI * freq * i as f64 / fs).sin())
                .collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn constant_signal_gives_flat_envelope() {
        let s = Signal::new(vec![0.3; 4000], 8000.0).unwrap();
        let e = extract_envelope(&s, &EnvelopeParams::default()).unwrap();
        assert_eq!(e.values.len(), 4000);
        assert!(e.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pure_tone_envelope_is_flat() {
        let s = sine(440.0, 2.0, 16000.0);
        let e = extract_envelope(&s, &EnvelopeParams::default()).unwrap();
        assert_eq!(e.values.len(), s.len());
        // away from the zero-padded median border
        let inner = &e.values[300..e.values.len() - 300];
        let min = inner.iter().cloned().fold(f64::MAX, f64::min);
        assert!(1.0 - min < 0.05, "ripple {}", 1.0 - min);
    }

    #[test]
    fn too_short() {
        let s = Signal::new(vec![0.5; 20], 8000.0).unwrap();
        assert_eq!(
            extract_envelope(&s, &EnvelopeParams::default()).unwrap_err(),
            RfaError::SignalTooShort {
                len: 20,
                needed: 20
            }
        );
    }

    #[test]
    fn even_median_length_rejected() {
        let s = sine(100.0, 0.1, 8000.0);
        let p = EnvelopeParams {
            medfilt: 4,
            ..Default::default()
        };
        assert_eq!(
            extract_envelope(&s, &p).unwrap_err().name(),
            "InvalidParameters"
        );
    }

    #[test]
    fn millisecond_window() {
        assert_eq!(EnvWindow::Millis(2.5).samples_at(8000.0), 20);
        assert_eq!(EnvWindow::Samples(20).samples_at(44100.0), 20);
    }
}
