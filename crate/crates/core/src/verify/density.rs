//! Target Lévy densities and partial sums of their decompositions.
//!
//! Everything here is evaluated from closed-form pdfs with its own log-gamma
//! calls; none of it touches the simulation samplers.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Jump-density family with its (pointwise) parameters. Densities are per unit of base measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LevyFamily {
    Beta { c: f64 },
    StableBeta { c: f64, sigma: f64 },
    Gamma { theta: f64 },
    GeneralizedGamma { theta: f64, sigma: f64 },
    SymmetricGamma { theta: f64 },
}

impl LevyFamily {
    pub(crate) fn validate(&self) -> Result<()> {
        let ok = match *self {
            LevyFamily::Beta { c } => c > 0.0,
            LevyFamily::StableBeta { c, sigma } => c > -sigma && sigma > 0.0 && sigma < 1.0,
            LevyFamily::Gamma { theta } | LevyFamily::SymmetricGamma { theta } => theta > 0.0,
            LevyFamily::GeneralizedGamma { theta, sigma } => theta > 0.0 && sigma > 0.0 && sigma < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid parameters {self:?}")))
        }
    }

    fn check_support(&self, x: f64) -> Result<()> {
        let inside = match self {
            LevyFamily::Beta { .. } | LevyFamily::StableBeta { .. } => x > 0.0 && x < 1.0,
            LevyFamily::Gamma { .. } | LevyFamily::GeneralizedGamma { .. } => x > 0.0 && x.is_finite(),
            LevyFamily::SymmetricGamma { .. } => x != 0.0 && x.is_finite(),
        };
        if inside {
            Ok(())
        } else {
            Err(Error::Domain(format!("jump {x} is on the boundary of or outside the support")))
        }
    }
}

/// `ln Γ(1+c) − ln Γ(1−σ) − ln Γ(c+σ)`, the stable-beta normalizer.
fn ln_stable_constant(c: f64, sigma: f64) -> f64 {
    ln_gamma(1.0 + c) - ln_gamma(1.0 - sigma) - ln_gamma(c + sigma)
}

fn ln_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p()
}

fn ln_gamma_pdf(x: f64, shape: f64, scale: f64) -> f64 {
    (shape - 1.0) * x.ln() - x / scale - shape * scale.ln() - ln_gamma(shape)
}

/// Pointwise target Lévy density.
pub fn levy_density(family: LevyFamily, x: f64) -> Result<f64> {
    family.validate()?;
    family.check_support(x)?;
    Ok(match family {
        LevyFamily::Beta { c } => c * ((c - 1.0) * (-x).ln_1p()).exp() / x,
        LevyFamily::StableBeta { c, sigma } => {
            (ln_stable_constant(c, sigma) - (sigma + 1.0) * x.ln() + (c + sigma - 1.0) * (-x).ln_1p()).exp()
        }
        LevyFamily::Gamma { theta } => (-x / theta).exp() / x,
        LevyFamily::GeneralizedGamma { theta, sigma } => {
            (-(sigma + 1.0) * x.ln() - x / theta - ln_gamma(1.0 - sigma)).exp()
        }
        LevyFamily::SymmetricGamma { theta } => (-x.abs() / theta).exp() / x.abs(),
    })
}

/// Which rate the generalized-gamma series uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneralizedForm {
    /// `1/(Γ(1−σ)(k+1)^h h)`, as published.
    Printed,
    /// `Γ(h−σ) (θ/(k+1))^{−σ} / (Γ(1−σ)(k+1)^h h!)`, re-derived from the series of the target.
    Rederived,
}

/// A truncated decomposition evaluated at one jump value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub value: f64,
    /// Analytic bound on (or exact value of) the omitted terms, when one is known.
    pub tail_bound: Option<f64>,
}

/// Partial sum of the component densities at `x`.
///
/// Beta families sum rounds `k = 0..=last_k` and ignore `last_h`. Gamma
/// families sum `k = 1..=last_k`, `h = 1..=last_h`. Generalized gamma uses the
/// published rates; see [`generalized_gamma_partial_sum`] for both forms.
pub fn decomposition_density_partial_sum(family: LevyFamily, x: f64, last_k: u32, last_h: u32) -> Result<PartialSum> {
    family.validate()?;
    family.check_support(x)?;
    match family {
        LevyFamily::Beta { c } => {
            let value = (0..=last_k)
                .map(|k| {
                    let b = c + k as f64;
                    (ln_beta_pdf(x, 1.0, b) + (c / b).ln()).exp()
                })
                .sum();
            let tail = c * ((c + last_k as f64) * (-x).ln_1p()).exp() / x;
            Ok(PartialSum { value, tail_bound: Some(tail) })
        }
        LevyFamily::StableBeta { c, sigma } => {
            let ln_c1 = ln_gamma(c + 1.0);
            let ln_cs = ln_gamma(c + sigma);
            let value = (0..=last_k)
                .map(|k| {
                    let k = k as f64;
                    let ln_factor = ln_gamma(c + sigma + k) + ln_c1 - ln_gamma(c + k + 1.0) - ln_cs;
                    (ln_beta_pdf(x, 1.0 - sigma, c + sigma + k) + ln_factor).exp()
                })
                .sum();
            let tail = (ln_stable_constant(c, sigma) - sigma * x.ln() + (c + sigma + last_k as f64) * (-x).ln_1p()).exp() / x;
            Ok(PartialSum { value, tail_bound: Some(tail) })
        }
        LevyFamily::Gamma { theta } => gamma_partial_sum(theta, x, last_k, last_h),
        LevyFamily::SymmetricGamma { theta } => {
            // Rate doubles, each sign takes half: the signed density is the one-sided sum at |x|.
            let one_sided = gamma_partial_sum(theta, x.abs(), last_k, last_h)?;
            Ok(PartialSum { value: 2.0 * one_sided.value * 0.5, tail_bound: one_sided.tail_bound })
        }
        LevyFamily::GeneralizedGamma { theta, sigma } => {
            generalized_gamma_partial_sum(theta, sigma, x, last_k, last_h, GeneralizedForm::Printed)
        }
    }
}

fn gamma_partial_sum(theta: f64, x: f64, last_k: u32, last_h: u32) -> Result<PartialSum> {
    if last_k == 0 || last_h == 0 {
        return Err(Error::Parameter("gamma partial sums start at k = h = 1".into()));
    }
    let mut value = 0.0;
    for k in 1..=last_k {
        let kp1 = (k + 1) as f64;
        let scale = theta / kp1;
        for h in 1..=last_h {
            let hf = h as f64;
            value += (ln_gamma_pdf(x, hf, scale) - hf * kp1.ln() - hf.ln()).exp();
        }
    }
    Ok(PartialSum { value, tail_bound: Some(gamma_tail_bound(theta, 0.0, x, last_k, last_h)) })
}

/// Levels past `K` contribute exactly `x^{-σ-1} e^{-(K+1)x/θ}`; within level `k` the terms
/// past `H` are at most `x^{-σ-1} e^{-kx/θ} (x/θ)^{H+1}/(H+1)!` (Lagrange remainder of `e^{x/θ}`).
/// Both are in units of the un-normalized density (no `1/Γ(1−σ)`).
fn gamma_tail_bound(theta: f64, sigma: f64, x: f64, last_k: u32, last_h: u32) -> f64 {
    let ln_pre = -(sigma + 1.0) * x.ln();
    let u = x / theta;
    let levels = (ln_pre - (last_k as f64 + 1.0) * u).exp();
    let ln_rem = (last_h as f64 + 1.0) * u.ln() - ln_gamma(last_h as f64 + 2.0);
    let within: f64 = (1..=last_k).map(|k| (ln_pre - k as f64 * u + ln_rem).exp()).sum();
    levels + within
}

/// Generalized-gamma partial sum under either rate form. Only the re-derived
/// form carries a tail bound; the published form has no target it converges to.
pub fn generalized_gamma_partial_sum(
    theta: f64,
    sigma: f64,
    x: f64,
    last_k: u32,
    last_h: u32,
    form: GeneralizedForm,
) -> Result<PartialSum> {
    let family = LevyFamily::GeneralizedGamma { theta, sigma };
    family.validate()?;
    family.check_support(x)?;
    if last_k == 0 || last_h == 0 {
        return Err(Error::Parameter("gamma partial sums start at k = h = 1".into()));
    }
    let ln_g1s = ln_gamma(1.0 - sigma);
    let mut value = 0.0;
    for k in 1..=last_k {
        let kp1 = (k + 1) as f64;
        let scale = theta / kp1;
        for h in 1..=last_h {
            let hf = h as f64;
            let ln_rate = match form {
                GeneralizedForm::Printed => -ln_g1s - hf * kp1.ln() - hf.ln(),
                GeneralizedForm::Rederived => {
                    ln_gamma(hf - sigma) - sigma * scale.ln() - ln_g1s - hf * kp1.ln() - ln_gamma(hf + 1.0)
                }
            };
            value += (ln_gamma_pdf(x, hf - sigma, scale) + ln_rate).exp();
        }
    }
    let tail_bound = match form {
        GeneralizedForm::Printed => None,
        GeneralizedForm::Rederived => Some(gamma_tail_bound(theta, sigma, x, last_k, last_h) / ln_g1s.exp()),
    };
    Ok(PartialSum { value, tail_bound })
}

/// Smallest `K` with `(1−π)^{K+1} ≤ rel_tol`: the beta partial sum's relative error is exactly `(1−π)^{K+1}`.
pub fn beta_rounds_for_tolerance(pi: f64, rel_tol: f64) -> u32 {
    let needed = rel_tol.ln() / (-pi).ln_1p();
    (needed.ceil() - 1.0).max(0.0) as u32
}
