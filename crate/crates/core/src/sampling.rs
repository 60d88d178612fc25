//! Jump samplers and the per-round Poisson superposition step.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Open01};

use crate::error::{Error, Result};
use crate::measures::{poisson_count, BaseMeasure, LocationDraw};

/// Largest integer shape drawn as a sum of exponentials.
pub const EXPONENTIAL_SUM_MAX_SHAPE: f64 = 16.0;

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

/// `Beta(1, b)` by inverse transform: `1 − u^{1/b}`, computed as `−expm1(ln u / b)`.
/// Results that round onto 1 are redrawn so the jump stays inside (0, 1).
pub fn beta_one<R: Rng + ?Sized>(b: f64, rng: &mut R) -> f64 {
    loop {
        let jump = -(open01(rng).ln() / b).exp_m1();
        if jump > 0.0 && jump < 1.0 {
            return jump;
        }
    }
}

/// `Beta(a, b)`; draws that round onto 0 or 1 are redrawn.
pub fn beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    if a == 1.0 {
        return Ok(beta_one(b, rng));
    }
    let dist = Beta::new(a, b).map_err(|e| Error::Parameter(format!("Beta({a}, {b}): {e}")))?;
    loop {
        let x = dist.sample(rng);
        if x > 0.0 && x < 1.0 {
            return Ok(x);
        }
    }
}

/// `Gamma(shape, scale)`. Integer shapes up to 16 are sums of exponentials;
/// everything else goes through the Marsaglia–Tsang sampler of `rand_distr`.
pub fn gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    if shape.fract() == 0.0 && (1.0..=EXPONENTIAL_SUM_MAX_SHAPE).contains(&shape) {
        let sum: f64 = (0..shape as u32).map(|_| -open01(rng).ln()).sum();
        return Ok(sum * scale);
    }
    let dist = Gamma::new(shape, scale).map_err(|e| Error::Parameter(format!("Gamma({shape}, {scale}): {e}")))?;
    loop {
        let x = dist.sample(rng);
        if x > 0.0 {
            return Ok(x);
        }
    }
}

/// One round of Poisson superposition: `n ~ Poisson(m(Ω))`, then `n` i.i.d.
/// locations from `m / m(Ω)`, each handed to `mark` in draw order.
pub(crate) fn superpose<R, T>(
    measure: &BaseMeasure,
    rng: &mut R,
    mut mark: impl FnMut(LocationDraw, &mut R) -> Result<T>,
) -> Result<Vec<T>>
where
    R: Rng + ?Sized,
{
    let n = poisson_count(measure.total_mass(), rng)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let sampler = measure.sampler()?;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let loc = sampler.sample(rng);
        out.push(mark(loc, rng)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::RandomStream;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn beta_one_moments() {
        let mut rng = RandomStream::new(11).rng();
        let b = 3.0;
        let xs: Vec<f64> = (0..100_000).map(|_| beta_one(b, &mut rng)).collect();
        assert!(xs.iter().all(|x| *x > 0.0 && *x < 1.0));
        let (m, v) = mean_var(&xs);
        let true_mean = 1.0 / (1.0 + b);
        let true_var = b / ((1.0 + b).powi(2) * (2.0 + b));
        assert!((m - true_mean).abs() < 4.0 * (true_var / 1e5).sqrt());
        assert!((v / true_var - 1.0).abs() < 0.03);
    }

    #[test]
    fn beta_one_stays_open_for_extreme_shapes() {
        let mut rng = RandomStream::new(12).rng();
        for b in [1e-3, 0.05, 1e6, 1e12] {
            assert!((0..10_000).map(|_| beta_one(b, &mut rng)).all(|x| x > 0.0 && x < 1.0));
        }
    }

    #[test]
    fn gamma_paths_agree_on_moments() {
        let mut rng = RandomStream::new(13).rng();
        for (shape, scale) in [(1.0, 0.5), (3.0, 2.0), (16.0, 0.1), (17.0, 0.1), (0.4, 1.0), (2.5, 3.0)] {
            let xs: Vec<f64> = (0..50_000).map(|_| gamma(shape, scale, &mut rng).unwrap()).collect();
            assert!(xs.iter().all(|x| *x > 0.0));
            let (m, v) = mean_var(&xs);
            let tv = shape * scale * scale;
            assert!((m - shape * scale).abs() < 4.0 * (tv / 5e4).sqrt(), "shape {shape}: mean {m}");
            assert!((v / tv - 1.0).abs() < 0.06, "shape {shape}: var {v}");
        }
    }

    #[test]
    fn general_beta_moments() {
        let mut rng = RandomStream::new(14).rng();
        let (a, b) = (0.5, 2.5);
        let xs: Vec<f64> = (0..50_000).map(|_| beta(a, b, &mut rng).unwrap()).collect();
        let (m, _) = mean_var(&xs);
        let tv = a * b / ((a + b).powi(2) * (a + b + 1.0));
        assert!((m - a / (a + b)).abs() < 4.0 * (tv / 5e4).sqrt());
        assert!(beta(0.0, 1.0, &mut rng).is_err());
    }
}
