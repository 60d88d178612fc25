//! Goodness-of-fit statistics and Monte Carlo summaries.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Significance level used by every distributional check.
pub const SIGNIFICANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    pub critical_value: f64,
}

impl KsResult {
    pub fn passed(&self) -> bool {
        self.statistic <= self.critical_value
    }
}

/// Asymptotic one-sample KS critical value, `sqrt(ln(2/α)/2)/√n`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// One-sample Kolmogorov–Smirnov distance against a continuous reference CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { need: 1, got: 0 });
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("NaN in KS sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    });
    Ok(KsResult { n: sorted.len(), statistic, critical_value: ks_critical_value(sorted.len(), SIGNIFICANCE) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
}

impl ChiSquareResult {
    pub fn passed(&self) -> bool {
        self.statistic <= self.critical_value
    }
}

/// Pearson chi-square of observed counts against expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::Parameter("chi-square needs matching bins, at least two".into()));
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Parameter("expected counts must be positive".into()));
    }
    let statistic = observed.iter().zip(expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    let degrees_of_freedom = observed.len() - 1;
    let dist = ChiSquared::new(degrees_of_freedom as f64).map_err(|e| Error::Oracle(e.to_string()))?;
    Ok(ChiSquareResult { statistic, degrees_of_freedom, critical_value: dist.inverse_cdf(1.0 - SIGNIFICANCE) })
}

/// Sample mean and variance with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased.
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
}

pub fn monte_carlo_moments(values: &[f64]) -> Result<SampleMoments> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (m2, m4) = values.iter().fold((0.0, 0.0), |(a, b), &x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let variance = m2 / (nf - 1.0);
    let m4 = m4 / nf;
    let var_of_var = ((m4 - (nf - 3.0) / (nf - 1.0) * variance * variance) / nf).max(0.0);
    Ok(SampleMoments { n, mean, variance, se_mean: (variance / nf).sqrt(), se_variance: var_of_var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn critical_value_at_default_level() {
        assert_relative_eq!(ks_critical_value(1, SIGNIFICANCE), 1.9495, epsilon = 1e-4);
        assert_relative_eq!(ks_critical_value(10_000, SIGNIFICANCE), 0.019495, epsilon = 1e-6);
    }

    #[test]
    fn ks_edge_cases() {
        assert!(matches!(ks_distance(&[], |x| x), Err(Error::InsufficientSamples { .. })));
        let r = ks_distance(&[0.5; 100], |x: f64| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.statistic >= 0.5);
        assert!(!r.passed());
    }

    #[test]
    fn ks_accepts_uniform_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_distance(&xs, |x| x.clamp(0.0, 1.0)).unwrap().passed());
        let shifted: Vec<f64> = xs.iter().map(|x| x * 0.9).collect();
        assert!(!ks_distance(&shifted, |x| x.clamp(0.0, 1.0)).unwrap().passed());
    }

    #[test]
    fn chi_square_critical_value() {
        let r = chi_square(&[10, 10], &[10.0, 10.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_relative_eq!(r.critical_value, 10.828, epsilon = 1e-3);
    }

    #[test]
    fn sample_moments() {
        assert!(monte_carlo_moments(&[1.0]).is_err());
        let m = monte_carlo_moments(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((m.mean, m.variance), (1.0, 0.0));
        let m = monte_carlo_moments(&[0.0, 2.0]).unwrap();
        assert_eq!((m.mean, m.variance), (1.0, 2.0));
        let m = monte_carlo_moments(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        assert_relative_eq!(m.variance, 5.0 / 3.0);
        assert_relative_eq!(m.se_mean, (5.0 / 12.0f64).sqrt());
    }
}
