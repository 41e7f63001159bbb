//! One-pass mean/variance estimation (Welford's update).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Welford::default()
    }

    pub fn add(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (n-1 denominator).
    pub fn variance(&self) -> f64 {
        if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    /// Standard error of the std estimator, `std / sqrt(2(n-1))`.
    pub stderr_of_std: f64,
}

pub fn estimate_stats(samples: &[f64]) -> Result<SummaryStats, StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::TooFewSamples(samples.len()));
    }
    let mut acc = Welford::new();
    for &s in samples {
        acc.add(s);
    }
    let std = acc.std_dev();
    Ok(SummaryStats {
        mean: acc.mean(),
        std,
        stderr_of_std: std / (2.0 * (samples.len() as f64 - 1.0)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::sampler::{sample_poisson, trial_rng};

    #[test]
    fn constant_samples() {
        let s = estimate_stats(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.std, 0.0);
    }

    #[test]
    fn two_samples_hand_arithmetic() {
        let s = estimate_stats(&[0.0, 2.0]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!((s.std - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        assert!(estimate_stats(&[]).is_err());
        assert!(estimate_stats(&[1.0]).is_err());
    }

    #[test]
    fn poisson_std_within_estimator_error() {
        let samples: Vec<f64> = (0..1_000_000u64)
            .map(|t| {
                let mut rng = trial_rng(5, t);
                sample_poisson(1e4, &mut rng).unwrap() as f64
            })
            .collect();
        let s = estimate_stats(&samples).unwrap();
        assert!(
            (s.std - 100.0).abs() < 3.0 * s.stderr_of_std,
            "std {} vs 100 (se {})",
            s.std,
            s.stderr_of_std
        );
    }
}
