//! Descriptive statistics shared by the feature extractors.
//!
//! Standard deviation is the population one throughout. Undefined values are
//! reported as [`MISSING`] and left for the model's imputation table.

use thiserror::Error;

/// Missing-value sentinel.
pub const MISSING: f64 = f64::NAN;

/// Default bin count for distribution entropy.
pub const DEFAULT_BINS: usize = 10;

pub fn is_missing(v: f64) -> bool {
    v.is_nan()
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinScale {
    Linear,
    /// Bins over ln(v); nonpositive values land in a dedicated underflow bin.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptiveStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub skewness: f64,
    /// Excess kurtosis.
    pub kurtosis: f64,
    pub entropy_bits: f64,
}

impl DescriptiveStats {
    /// Field names in the order of [`DescriptiveStats::values`].
    pub const FIELDS: [&'static str; 9] = [
        "count", "min", "max", "mean", "median", "std", "skewness", "kurtosis", "entropy",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.count as f64,
            self.min,
            self.max,
            self.mean,
            self.median,
            self.std,
            self.skewness,
            self.kurtosis,
            self.entropy_bits,
        ]
    }

    fn empty() -> Self {
        DescriptiveStats {
            count: 0,
            min: MISSING,
            max: MISSING,
            mean: MISSING,
            median: MISSING,
            std: MISSING,
            skewness: MISSING,
            kurtosis: MISSING,
            entropy_bits: MISSING,
        }
    }
}

pub fn describe(values: &[f64]) -> DescriptiveStats {
    describe_scaled(values, BinScale::Linear)
}

/// [`describe`] with an explicit entropy binning scale.
pub fn describe_scaled(values: &[f64], scale: BinScale) -> DescriptiveStats {
    if values.is_empty() {
        return DescriptiveStats::empty();
    }
    let n = values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    // Summing in sorted order makes the result permutation invariant.
    let mean = sorted.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in &sorted {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std = m2.sqrt();
    let (skewness, kurtosis) = if std > 1e-12 * mean.abs().max(1.0) {
        (m3 / (m2 * std), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    DescriptiveStats {
        count: values.len(),
        min,
        max,
        mean,
        median,
        std,
        skewness,
        kurtosis,
        entropy_bits: histogram_entropy(&sorted, DEFAULT_BINS, scale),
    }
}

/// Shannon entropy (bits) of the bin-count distribution over `bins`
/// equal-width bins spanning `[min, max]`.
pub fn histogram_entropy(values: &[f64], bins: usize, scale: BinScale) -> f64 {
    assert!(bins >= 1, "bins must be positive");
    if values.is_empty() {
        return 0.0;
    }
    let (mapped, underflow): (Vec<f64>, usize) = match scale {
        BinScale::Linear => (values.to_vec(), 0),
        BinScale::Log => {
            let pos: Vec<f64> = values.iter().filter(|v| **v > 0.0).map(|v| v.ln()).collect();
            let under = values.len() - pos.len();
            (pos, under)
        }
    };
    let mut counts = vec![0usize; bins];
    if !mapped.is_empty() {
        let lo = mapped.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = mapped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = hi - lo;
        for v in &mapped {
            let idx = if width > 0.0 {
                (((v - lo) / width) * bins as f64).floor() as usize
            } else {
                0
            };
            counts[idx.min(bins - 1)] += 1;
        }
    }
    counts.push(underflow);
    entropy_of_counts(&counts)
}

/// Shannon entropy (bits) of a discrete count distribution.
pub fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    // Clamp the -0.0 produced by a single occupied bin.
    h.max(0.0)
}

/// Burstiness `(σ − μ)/(σ + μ)` of inter-event intervals.
pub fn burstiness(intervals: &[f64]) -> Result<f64, StatsError> {
    if intervals.len() < 2 {
        return Err(StatsError::InsufficientData {
            needed: 2,
            got: intervals.len(),
        });
    }
    let n = intervals.len() as f64;
    let mean = intervals.iter().sum::<f64>() / n;
    let std = (intervals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if std + mean == 0.0 {
        return Ok(-1.0);
    }
    Ok(((std - mean) / (std + mean)).clamp(-1.0, 1.0))
}

/// Mean of the non-missing values, or [`MISSING`] if there are none.
pub fn mean_present(values: &[f64]) -> f64 {
    let present: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if present.is_empty() {
        return MISSING;
    }
    present.iter().sum::<f64>() / present.len() as f64
}

/// Population std of the non-missing values, or [`MISSING`] if there are none.
pub fn std_present(values: &[f64]) -> f64 {
    let present: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if present.is_empty() {
        return MISSING;
    }
    let n = present.len() as f64;
    let m = present.iter().sum::<f64>() / n;
    (present.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt()
}
