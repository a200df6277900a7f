//! Annotation-based isochrony metrics.
//!
//! The pairwise variability indices are distances between a duration vector
//! and its own one-step shift: rPVI is an averaged Manhattan distance, nPVI
//! an averaged Canberra distance with a halved denominator, scaled by 100.
//! nPVI is bounded above by 200 and is not a percentage.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("need at least {needed} durations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("duration {value} at index {index} is not positive")]
    NonPositiveDuration { index: usize, value: f64 },
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("p + q is zero at index {0}")]
    ZeroDenominator(usize),
    #[error("durations have zero variance")]
    ZeroVariance,
}

impl MetricError {
    pub fn name(&self) -> &'static str {
        match self {
            MetricError::TooShort { .. } => "TooShort",
            MetricError::NonPositiveDuration { .. } => "NonPositiveDuration",
            MetricError::LengthMismatch(..) => "LengthMismatch",
            MetricError::ZeroDenominator(_) => "ZeroDenominator",
            MetricError::ZeroVariance => "ZeroVariance",
        }
    }
}

/// Durations (seconds) of consecutive units on one annotation tier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationVector {
    pub tier: String,
    pub values: Vec<f64>,
}

impl DurationVector {
    pub fn new(tier: impl Into<String>, values: Vec<f64>) -> Self {
        DurationVector {
            tier: tier.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.values.is_empty()).then(|| self.total() / self.values.len() as f64)
    }

    /// Units per second implied by the mean duration.
    pub fn rate(&self) -> Option<f64> {
        self.mean().map(|m| 1.0 / m)
    }

    /// `(d_1..d_{n-1}, d_2..d_n)`.
    pub fn shifted_pair(&self) -> (&[f64], &[f64]) {
        let n = self.values.len();
        if n == 0 {
            return (&[], &[]);
        }
        (&self.values[..n - 1], &self.values[1..])
    }

    fn check_pvi(&self) -> Result<(), MetricError> {
        if self.values.len() < 2 {
            return Err(MetricError::TooShort {
                needed: 2,
                got: self.values.len(),
            });
        }
        match self.values.iter().position(|&d| !(d > 0.0)) {
            Some(index) => Err(MetricError::NonPositiveDuration {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }
}

pub fn rpvi(d: &DurationVector) -> Result<f64, MetricError> {
    if d.len() < 2 {
        return Err(MetricError::TooShort {
            needed: 2,
            got: d.len(),
        });
    }
    let sum: f64 = d.values.windows(2).map(|w| (w[0] - w[1]).abs()).sum();
    Ok(sum / (d.len() - 1) as f64)
}

pub fn npvi(d: &DurationVector) -> Result<f64, MetricError> {
    d.check_pvi()?;
    let sum: f64 = d
        .values
        .windows(2)
        .map(|w| (w[0] - w[1]).abs() / ((w[0] + w[1]) / 2.0))
        .sum();
    Ok(100.0 * sum / (d.len() - 1) as f64)
}

fn check_lengths(p: &[f64], q: &[f64]) -> Result<(), MetricError> {
    if p.len() != q.len() {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    if p.is_empty() {
        return Err(MetricError::TooShort { needed: 1, got: 0 });
    }
    Ok(())
}

pub fn manhattan(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    check_lengths(p, q)?;
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// `Σ |p_k − q_k| / (p_k + q_k)`.
pub fn canberra(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    check_lengths(p, q)?;
    let mut sum = 0.0;
    for (k, (a, b)) in p.iter().zip(q).enumerate() {
        let den = a + b;
        if den == 0.0 {
            return Err(MetricError::ZeroDenominator(k));
        }
        sum += (a - b).abs() / den;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct QuadrantCounts {
    /// shorter then longer
    pub upper_left: usize,
    /// longer, longer
    pub upper_right: usize,
    /// shorter, shorter
    pub lower_left: usize,
    /// longer then shorter
    pub lower_right: usize,
    pub on_axis: usize,
}

impl QuadrantCounts {
    pub fn total(&self) -> usize {
        self.upper_left + self.upper_right + self.lower_left + self.lower_right + self.on_axis
    }
}

/// Adjacent-pair scatter of z-scored durations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterData {
    pub tier: String,
    pub pairs: Vec<(f64, f64)>,
    pub quadrants: QuadrantCounts,
}

/// z-scores the durations (population standard deviation) and pairs each
/// unit with its successor.
pub fn wagner_scatter(d: &DurationVector) -> Result<ScatterData, MetricError> {
    let n = d.len();
    if n < 3 {
        return Err(MetricError::TooShort { needed: 3, got: n });
    }
    let mean = d.total() / n as f64;
    let var = d.values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(MetricError::ZeroVariance);
    }
    let z: Vec<f64> = d.values.iter().map(|x| (x - mean) / sd).collect();
    let pairs: Vec<(f64, f64)> = z.windows(2).map(|w| (w[0], w[1])).collect();
    let mut quadrants = QuadrantCounts::default();
    for &(x, y) in &pairs {
        match (x.partial_cmp(&0.0), y.partial_cmp(&0.0)) {
            (Some(std::cmp::Ordering::Less), Some(std::cmp::Ordering::Greater)) => {
                quadrants.upper_left += 1
            }
            (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Greater)) => {
                quadrants.upper_right += 1
            }
            (Some(std::cmp::Ordering::Less), Some(std::cmp::Ordering::Less)) => {
                quadrants.lower_left += 1
            }
            (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Less)) => {
                quadrants.lower_right += 1
            }
            _ => quadrants.on_axis += 1,
        }
    }
    Ok(ScatterData {
        tier: d.tier.clone(),
        pairs,
        quadrants,
    })
}

/// PVI values plus the tier's size and tempo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PviReport {
    pub tier: String,
    pub n: usize,
    pub total_s: f64,
    pub mean_s: f64,
    /// Units per second, `1 / mean_s`.
    pub rate_per_s: f64,
    pub rpvi: f64,
    pub npvi: f64,
}

pub fn pvi_report(d: &DurationVector) -> Result<PviReport, MetricError> {
    let rpvi = rpvi(d)?;
    let npvi = npvi(d)?;
    let mean_s = d.total() / d.len() as f64;
    Ok(PviReport {
        tier: d.tier.clone(),
        n: d.len(),
        total_s: d.total(),
        mean_s,
        rate_per_s: 1.0 / mean_s,
        rpvi,
        npvi,
    })
}
