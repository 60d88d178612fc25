//! Moments of the target Lévy measure by direct quadrature.

use crate::beta::{BetaProcessParams, StableBetaParams};
use crate::error::{Error, Result};
use crate::gamma::{GammaProcessParams, GeneralizedGammaParams};
use crate::measures::{BaseMeasure, DomainFunction, Region};
use statrs::function::gamma::ln_gamma;

use super::density::{levy_density, LevyFamily};
use super::quadrature::{integrate_endpoint_singular, integrate_half_line};

pub const ORACLE_TOLERANCE: f64 = 1e-9;

/// A process whose Lévy measure the oracle integrates.
#[derive(Debug, Clone, Copy)]
pub enum ProcessRef<'a> {
    Beta(&'a BetaProcessParams),
    StableBeta(&'a StableBetaParams),
    Gamma(&'a GammaProcessParams),
    GeneralizedGamma(&'a GeneralizedGammaParams),
    SymmetricGamma(&'a GammaProcessParams),
}

/// `∫ x^r ν(dx)` for a single parameter value, per unit of base measure.
pub fn jump_moment(family: LevyFamily, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::Parameter("the zeroth moment of a Lévy measure is infinite".into()));
    }
    family.validate()?;
    let rf = r as f64;
    let weighted = |x: f64| -> f64 { x.powi(r as i32) * levy_density(family, x).unwrap_or(0.0) };
    match family {
        LevyFamily::Beta { c } => integrate_endpoint_singular(
            |x, y| c * x.powi(r as i32 - 1) * y.powf(c - 1.0),
            0.0,
            1.0,
            rf - 1.0,
            c - 1.0,
            ORACLE_TOLERANCE,
        ),
        LevyFamily::StableBeta { c, sigma } => {
            let constant = (ln_gamma(1.0 + c) - ln_gamma(1.0 - sigma) - ln_gamma(c + sigma)).exp();
            integrate_endpoint_singular(
                |x, y| constant * x.powf(rf - sigma - 1.0) * y.powf(c + sigma - 1.0),
                0.0,
                1.0,
                rf - sigma - 1.0,
                c + sigma - 1.0,
                ORACLE_TOLERANCE,
            )
        }
        LevyFamily::Gamma { theta } => integrate_half_line(weighted, rf - 1.0, theta, ORACLE_TOLERANCE),
        LevyFamily::GeneralizedGamma { theta, sigma } => {
            integrate_half_line(weighted, rf - sigma - 1.0, theta, ORACLE_TOLERANCE)
        }
        LevyFamily::SymmetricGamma { theta } => {
            let positive = integrate_half_line(weighted, rf - 1.0, theta, 0.5 * ORACLE_TOLERANCE)?;
            Ok(if r.is_multiple_of(2) { 2.0 * positive } else { 0.0 })
        }
    }
}

/// `∫_A ∫ x^r ν(dx, dω)`: the inner integral by quadrature at each distinct parameter
/// value, the outer one exactly over the piecewise-constant base measure.
pub fn moment_oracle(process: ProcessRef<'_>, set: &Region, r: u32) -> Result<f64> {
    match process {
        ProcessRef::Beta(p) => integrate_over(p.mu(), p.c(), set, |c| jump_moment(LevyFamily::Beta { c }, r)),
        ProcessRef::StableBeta(p) => {
            let sigma = p.sigma();
            integrate_over(p.base().mu(), p.base().c(), set, |c| jump_moment(LevyFamily::StableBeta { c, sigma }, r))
        }
        ProcessRef::Gamma(p) => integrate_over(p.alpha(), p.theta(), set, |theta| jump_moment(LevyFamily::Gamma { theta }, r)),
        ProcessRef::GeneralizedGamma(p) => {
            let sigma = p.sigma();
            integrate_over(p.base().alpha(), p.base().theta(), set, |theta| {
                jump_moment(LevyFamily::GeneralizedGamma { theta, sigma }, r)
            })
        }
        ProcessRef::SymmetricGamma(p) => {
            integrate_over(p.alpha(), p.theta(), set, |theta| jump_moment(LevyFamily::SymmetricGamma { theta }, r))
        }
    }
}

fn integrate_over(
    measure: &BaseMeasure,
    parameter: &DomainFunction,
    set: &Region,
    inner: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let values = parameter.values();
    let moments = values.iter().map(|&v| inner(v)).collect::<Result<Vec<_>>>()?;
    let lookup = parameter.map(|v| {
        let i = values.iter().position(|&w| w == v).expect("value taken from the same function");
        moments[i]
    });
    measure.weighted_integral(&lookup, set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::gamma;

    #[test]
    fn closed_form_jump_moments() {
        for c in [0.3, 1.0, 4.0] {
            assert_relative_eq!(jump_moment(LevyFamily::Beta { c }, 1).unwrap(), 1.0, epsilon = 1e-9);
            assert_relative_eq!(jump_moment(LevyFamily::Beta { c }, 2).unwrap(), 1.0 / (c + 1.0), epsilon = 1e-9);
        }
        for theta in [0.5f64, 2.0] {
            for r in 1..4 {
                let exact = theta.powi(r as i32) * gamma(r as f64);
                assert_relative_eq!(jump_moment(LevyFamily::Gamma { theta }, r).unwrap(), exact, epsilon = 1e-8);
            }
            assert_eq!(jump_moment(LevyFamily::SymmetricGamma { theta }, 1).unwrap(), 0.0);
            assert_relative_eq!(
                jump_moment(LevyFamily::SymmetricGamma { theta }, 2).unwrap(),
                2.0 * theta * theta,
                epsilon = 1e-8
            );
        }
        // ∫ x^{1-σ-1} e^{-x/θ}/Γ(1−σ) dx = θ^{1−σ}
        let v = jump_moment(LevyFamily::GeneralizedGamma { theta: 2.0, sigma: 0.5 }, 1).unwrap();
        assert_relative_eq!(v, 2f64.powf(0.5), epsilon = 1e-8);
        // The stable-beta normalizer makes the first moment exactly one.
        for (c, sigma) in [(1.5, 0.4), (0.2, 0.9)] {
            assert_relative_eq!(jump_moment(LevyFamily::StableBeta { c, sigma }, 1).unwrap(), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn zeroth_moment_rejected() {
        assert!(matches!(jump_moment(LevyFamily::Beta { c: 1.0 }, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn oracle_over_a_set() {
        let p = BetaProcessParams::homogeneous(2.0, 3.0).unwrap();
        let half = Region::interval(0.0, 0.5).unwrap();
        assert_relative_eq!(moment_oracle(ProcessRef::Beta(&p), &half, 1).unwrap(), 1.5, epsilon = 1e-9);
        let g = GammaProcessParams::homogeneous(2.0, 4.0).unwrap();
        let all = Region::whole(g.alpha().domain());
        assert_relative_eq!(moment_oracle(ProcessRef::Gamma(&g), &all, 2).unwrap(), 16.0, epsilon = 1e-8);
    }
}
