use serde::{Deserialize, Serialize};

use super::spectrum::LfSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RFormant {
    pub freq: f64,
    pub mag: f64,
    /// Bin index within the spectrum window.
    pub bin: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramParams {
    pub min: f64,
    pub max: f64,
    pub bin_width: f64,
}

impl Default for HistogramParams {
    fn default() -> Self {
        HistogramParams {
            min: 0.0,
            max: 12.0,
            bin_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub weight: f64,
}

/// Magnitude-weighted histogram of formant frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<HistBin>,
}

impl Histogram {
    pub fn new(params: &HistogramParams, formants: &[RFormant]) -> Histogram {
        let count = (((params.max - params.min) / params.bin_width) - 1e-9)
            .ceil()
            .max(1.0) as usize;
        let mut bins: Vec<HistBin> = (0..count)
            .map(|i| HistBin {
                lo: params.min + i as f64 * params.bin_width,
                hi: params.min + (i + 1) as f64 * params.bin_width,
                weight: 0.0,
            })
            .collect();
        for f in formants {
            if f.freq < params.min || f.freq > params.max {
                continue;
            }
            let i = (((f.freq - params.min) / params.bin_width).floor() as usize).min(count - 1);
            bins[i].weight += f.mag;
        }
        Histogram {
            bin_width: params.bin_width,
            bins,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.bins.iter().map(|b| b.weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RFormantSet {
    /// Strongest bins, by magnitude descending.
    pub formants: Vec<RFormant>,
    pub histogram: Histogram,
}

impl RFormantSet {
    pub fn frequencies(&self) -> Vec<f64> {
        self.formants.iter().map(|f| f.freq).collect()
    }
}

pub fn pick_formants(sp: &LfSpectrum, n: usize) -> RFormantSet {
    pick_formants_with(sp, n, &HistogramParams::default())
}

/// The `n` highest-magnitude bins of the spectrum (ties go to the lower
/// frequency), plus their weighted histogram.
pub fn pick_formants_with(sp: &LfSpectrum, n: usize, hist: &HistogramParams) -> RFormantSet {
    let mut order: Vec<usize> = (0..sp.len()).collect();
    order.sort_by(|&a, &b| sp.mags[b].total_cmp(&sp.mags[a]).then(a.cmp(&b)));
    let formants: Vec<RFormant> = order
        .into_iter()
        .take(n)
        .map(|bin| RFormant {
            freq: sp.bin_freq(bin),
            mag: sp.mags[bin],
            bin,
        })
        .collect();
    let histogram = Histogram::new(hist, &formants);
    RFormantSet {
        formants,
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(mags: Vec<f64>) -> LfSpectrum {
        let freqs = (0..mags.len()).map(|i| 1.0 + i as f64 * 0.5).collect();
        LfSpectrum {
            freqs,
            mags,
            duration_s: 2.0,
            resolution: 0.5,
        }
    }

    #[test]
    fn single_peak() {
        let s = sp(vec![0.1, 0.2, 1.0, 0.3, 0.0]);
        let set = pick_formants(&s, 1);
        assert_eq!(set.formants.len(), 1);
        assert_eq!(set.formants[0].freq, 2.0);
        assert_eq!(set.formants[0].mag, 1.0);
        assert_eq!(set.formants[0].bin, 2);
    }

    #[test]
    fn ordering_and_ties() {
        let s = sp(vec![0.5, 0.9, 0.5, 0.7]);
        let set = pick_formants(&s, 3);
        assert_eq!(set.frequencies(), [1.5, 2.5, 1.0]);
        let all = pick_formants(&s, 10);
        assert_eq!(all.formants.len(), 4);
    }

    #[test]
    fn histogram_weights() {
        let s = sp(vec![0.5, 0.9, 0.5, 0.7]);
        let set = pick_formants(&s, 4);
        let h = &set.histogram;
        assert_eq!(h.bins.len(), 12);
        assert_eq!(h.bins[1].weight, 0.5 + 0.9);
        assert_eq!(h.bins[2].weight, 0.5 + 0.7);
        assert!((h.total_weight() - 2.6).abs() < 1e-12);
    }

    #[test]
    fn histogram_upper_edge_falls_in_last_bin() {
        let f = RFormant {
            freq: 12.0,
            mag: 1.0,
            bin: 0,
        };
        let h = Histogram::new(&HistogramParams::default(), &[f]);
        assert_eq!(h.bins[11].weight, 1.0);
    }
}
