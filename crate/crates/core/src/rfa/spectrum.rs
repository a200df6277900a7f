use serde::{Deserialize, Serialize};

use super::dsp::{interpolate, median_filter, pearson, polyfit_values, power_spectrum};
use super::RfaError;

/// Stand-in for zero power before the first log (the reference chain uses
/// the same constant for exact zeros).
const POWER_FLOOR: f64 = 1e-6;
const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    /// Reference chain with a second log10 after the power step.
    #[default]
    Reference,
    /// Same chain without the second log10.
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfsParams {
    pub fmin: f64,
    pub fmax: f64,
    pub power: f64,
    pub detrend_degree: usize,
    /// Odd median-filter length over the log spectrum; 1 disables it.
    pub medfilt: usize,
    pub mode: SpectrumMode,
}

impl Default for LfsParams {
    fn default() -> Self {
        LfsParams {
            fmin: 1.0,
            fmax: 10.0,
            power: 2.0,
            detrend_degree: 1,
            medfilt: 3,
            mode: SpectrumMode::Reference,
        }
    }
}

impl LfsParams {
    pub fn validate(&self) -> Result<(), RfaError> {
        if !(self.fmin > 0.0 && self.fmax > self.fmin && self.fmax.is_finite()) {
            return Err(RfaError::InvalidParameters(format!(
                "spectrum window must satisfy 0 < fmin < fmax, got {}..{}",
                self.fmin, self.fmax
            )));
        }
        if self.medfilt.is_multiple_of(2) {
            return Err(RfaError::InvalidParameters(format!(
                "spectrum median filter length must be odd, got {}",
                self.medfilt
            )));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(RfaError::InvalidParameters(format!(
                "spectrum power must be positive, got {}",
                self.power
            )));
        }
        Ok(())
    }
}

/// Low-frequency magnitude spectrum restricted to a window.
///
/// `freqs[i] = freqs[0] + i / duration_s`; magnitudes lie in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfSpectrum {
    pub freqs: Vec<f64>,
    pub mags: Vec<f64>,
    pub duration_s: f64,
    /// Bin spacing, `1 / duration_s`.
    pub resolution: f64,
}

impl LfSpectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Frequency of bin `i` of the window.
    pub fn bin_freq(&self, i: usize) -> f64 {
        self.freqs[0] + i as f64 / self.duration_s
    }

    /// Bin with the largest magnitude (lowest frequency on ties).
    pub fn peak(&self) -> Option<(f64, f64)> {
        let mut best: Option<usize> = None;
        for (i, m) in self.mags.iter().enumerate() {
            if best.is_none_or(|b| *m > self.mags[b]) {
                best = Some(i);
            }
        }
        best.map(|i| (self.freqs[i], self.mags[i]))
    }
}

/// Low-frequency spectrum of a slowly varying trace sampled at `rate` Hz.
///
/// Steps: squared-magnitude DFT; log10; DC bin replaced by bin 1; divide by
/// the maximum; median filter; cut to `[fmin, fmax]`; raise to `power`;
/// log10 again (reference mode only); min-max normalize; subtract a
/// least-squares polynomial of `detrend_degree`; shift so the minimum is 0
/// and, if the result peaks above 1, rescale to a peak of 1.
pub fn lf_spectrum(values: &[f64], rate: f64, params: &LfsParams) -> Result<LfSpectrum, RfaError> {
    params.validate()?;
    if !(rate > 0.0) {
        return Err(RfaError::InvalidParameters(format!(
            "sampling rate must be positive, got {rate}"
        )));
    }
    let n = values.len();
    if n < 2 {
        return Err(RfaError::SignalTooShort { len: n, needed: 1 });
    }
    let duration_s = n as f64 / rate;

    let mut logp: Vec<f64> = power_spectrum(values)
        .into_iter()
        .map(|p| p.max(POWER_FLOOR).log10())
        .collect();
    logp[0] = logp[1];
    let max = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == 0.0 || !max.is_finite() {
        return Err(RfaError::DegenerateSpectrum(format!(
            "log power maximum is {max}"
        )));
    }
    // the reference divides by the maximum as is, sign included
    for v in &mut logp {
        *v /= max;
    }
    let smoothed = median_filter(&logp, params.medfilt);

    let start = (params.fmin * duration_s).round() as usize;
    let end = ((params.fmax * duration_s + 1e-9).floor() as usize).min(smoothed.len() - 1);
    if start >= end {
        return Err(RfaError::EmptyBand {
            fmin: params.fmin,
            fmax: params.fmax,
        });
    }
    let first = start as f64 / duration_s;
    let freqs: Vec<f64> = (0..=end - start)
        .map(|i| first + i as f64 / duration_s)
        .collect();

    let integral_power = params.power.fract() == 0.0 && params.power <= i32::MAX as f64;
    let mut data: Vec<f64> = smoothed[start..=end]
        .iter()
        .map(|&v| {
            if integral_power {
                v.powi(params.power as i32)
            } else {
                v.abs().powf(params.power)
            }
        })
        .collect();
    if params.mode == SpectrumMode::Reference {
        // second log10 kept from the reference chain
        for v in &mut data {
            *v = v.max(LOG_FLOOR).log10();
        }
    }
    let mags = normalize_and_detrend(data, params.detrend_degree);
    Ok(LfSpectrum {
        freqs,
        mags,
        duration_s,
        resolution: 1.0 / duration_s,
    })
}

fn normalize_and_detrend(mut data: Vec<f64>, degree: usize) -> Vec<f64> {
    let (lo, hi) = min_max(&data);
    if !(hi > lo) {
        return vec![0.0; data.len()];
    }
    for v in &mut data {
        *v = (*v - lo) / (hi - lo);
    }
    let fit = polyfit_values(&data, degree);
    for (v, f) in data.iter_mut().zip(&fit) {
        *v -= f;
    }
    let (lo, _) = min_max(&data);
    for v in &mut data {
        *v -= lo;
    }
    let (_, hi) = min_max(&data);
    if hi > 1.0 {
        for v in &mut data {
            *v /= hi;
        }
    }
    data
}

fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Pearson's r between two spectra after aligning them on the union of
/// their frequency grids, restricted to the window both cover. Each
/// spectrum is linearly interpolated onto that grid.
pub fn correlate_spectra(a: &LfSpectrum, b: &LfSpectrum) -> Result<f64, RfaError> {
    let (ga, gb) = aligned(a, b)?;
    pearson(&ga, &gb)
        .ok_or_else(|| RfaError::DegenerateSpectrum("zero variance after alignment".into()))
}

fn aligned(a: &LfSpectrum, b: &LfSpectrum) -> Result<(Vec<f64>, Vec<f64>), RfaError> {
    if a.is_empty() || b.is_empty() {
        return Err(RfaError::DegenerateSpectrum("empty spectrum".into()));
    }
    let lo = a.freqs[0].max(b.freqs[0]);
    let hi = a.freqs[a.len() - 1].min(b.freqs[b.len() - 1]);
    if !(hi > lo) {
        return Err(RfaError::EmptyBand { fmin: lo, fmax: hi });
    }
    let mut grid: Vec<f64> = a
        .freqs
        .iter()
        .chain(&b.freqs)
        .copied()
        .filter(|f| *f >= lo && *f <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * y.abs().max(1.0));
    let ga = grid
        .iter()
        .map(|&f| interpolate(&a.freqs, &a.mags, f))
        .collect();
    let gb = grid
        .iter()
        .map(|&f| interpolate(&b.freqs, &b.mags, f))
        .collect();
    Ok((ga, gb))
}
