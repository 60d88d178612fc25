//! Beta process `BP(c(ω), μ)` as a superposition of proper rounds.
//!
//! Expanding `π^{-1} = Σ_k (1 − π)^k` in the Lévy measure
//! `c π^{-1} (1 − π)^{c−1} dπ μ(dω)` gives rounds `k = 0, 1, …` with
//! jump law `Beta(1, c + k)` and location measure `μ_k = c/(c + k) · μ`.
//! Round `k` is a finite Poisson process; the union over all rounds is a
//! realization of the process.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::Moments;
use crate::measures::{
    BaseMeasure, DomainFunction, Origin, PointMeasure, RandomStream, Region, WeightedAtom,
};
use crate::sampling;

/// Stream id for beta-process rounds: round `k` uses path `[.., BETA_STREAM, k]`.
pub const BETA_STREAM: u64 = 1;
/// Stream id for stable-beta rounds.
pub const STABLE_BETA_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaProcessParams {
    c: DomainFunction,
    mu: BaseMeasure,
}

impl BetaProcessParams {
    pub fn new(c: DomainFunction, mu: BaseMeasure) -> Result<Self> {
        c.check_domain(mu.domain())?;
        if c.values().iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parameter("concentration must be positive".into()));
        }
        Ok(Self { c, mu })
    }

    /// Constant `c` with a uniform base measure of mass `mass` on the unit interval.
    pub fn homogeneous(c: f64, mass: f64) -> Result<Self> {
        let mu = BaseMeasure::uniform(Default::default(), mass)?;
        Self::new(DomainFunction::constant(c)?, mu)
    }

    pub fn c(&self) -> &DomainFunction {
        &self.c
    }

    pub fn mu(&self) -> &BaseMeasure {
        &self.mu
    }

    /// `γ = μ(Ω)`.
    pub fn mass(&self) -> f64 {
        self.mu.total_mass()
    }
}

/// Round `k`: jumps `Beta(1, c(ω) + k)` at locations of the Poisson process with mean `μ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaRound {
    pub k: u32,
    pub mu_k: BaseMeasure,
    pub jump_b: DomainFunction,
}

impl BetaRound {
    pub fn jump_a(&self) -> f64 {
        1.0
    }

    /// Expected number of atoms, `μ_k(Ω)`.
    pub fn rate(&self) -> f64 {
        self.mu_k.total_mass()
    }
}

pub fn round_measure(p: &BetaProcessParams, k: u32) -> BetaRound {
    let kf = k as f64;
    let mu_k = p
        .mu
        .reweighted(&p.c, |c| c / (c + kf))
        .expect("concentration was checked against the domain");
    BetaRound { k, mu_k, jump_b: p.c.map(|c| c + kf) }
}

/// One round of the superposition. Locations come from `μ_k / μ_k(Ω)`; the
/// jump's shape is evaluated at the sampled location.
pub fn simulate_round(p: &BetaProcessParams, k: u32, stream: &RandomStream) -> Result<PointMeasure> {
    let round = round_measure(p, k);
    let mut rng = stream.child(BETA_STREAM).child(k as u64).rng();
    let atoms = sampling::superpose(&round.mu_k, &mut rng, |loc, rng| {
        let jump = sampling::beta_one(round.jump_b.eval(&loc.point), rng);
        Ok(WeightedAtom { location: loc.point, jump, round_k: k, subround_h: 0, origin: Origin::Prior })
    })?;
    Ok(PointMeasure { domain: p.mu.domain().clone(), atoms })
}

/// `Σ_{k=0}^{K} B_k`: rounds `0..=last_round`, each on its own stream.
pub fn simulate_beta_process(p: &BetaProcessParams, last_round: u32, stream: &RandomStream) -> Result<PointMeasure> {
    let mut out = PointMeasure::empty(p.mu.domain().clone());
    for k in 0..=last_round {
        out.append(simulate_round(p, k, stream)?);
    }
    Ok(out)
}

/// Exact mean and variance of `B_k(A)`: `∫_A μ_k/(c+k+1)` and `∫_A 2/((c+k+1)(c+k+2)) μ_k`.
pub fn round_mean_and_variance(p: &BetaProcessParams, k: u32, set: &Region) -> Result<Moments> {
    let round = round_measure(p, k);
    let mean = round.mu_k.weighted_integral(&round.jump_b.map(|b| 1.0 / (b + 1.0)), set)?;
    let variance = round
        .mu_k
        .weighted_integral(&round.jump_b.map(|b| 2.0 / ((b + 1.0) * (b + 2.0))), set)?;
    Ok(Moments { mean, variance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableBetaParams {
    base: BetaProcessParams,
    sigma: f64,
}

impl StableBetaParams {
    pub fn new(base: BetaProcessParams, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::Parameter(format!("stability index must lie in (0, 1), got {sigma}")));
        }
        Ok(Self { base, sigma })
    }

    pub fn base(&self) -> &BetaProcessParams {
        &self.base
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Location-measure factor of stable-beta round `k`:
/// `Γ(c+σ+k) Γ(c+1) / (Γ(c+k+1) Γ(c+σ))`, evaluated in log space.
pub fn stable_mass_factor(c: f64, sigma: f64, k: u32) -> f64 {
    let k = k as f64;
    (ln_gamma(c + sigma + k) + ln_gamma(c + 1.0) - ln_gamma(c + k + 1.0) - ln_gamma(c + sigma)).exp()
}

/// Stable-beta round `k`: jumps `Beta(1 − σ, c(ω) + σ + k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableBetaRound {
    pub k: u32,
    pub mu_k: BaseMeasure,
    pub jump_a: f64,
    pub jump_b: DomainFunction,
}

/// For piecewise `c` the factor is applied cell by cell.
pub fn stable_round_measure(p: &StableBetaParams, k: u32) -> StableBetaRound {
    let sigma = p.sigma;
    let base = &p.base;
    let mu_k = base
        .mu
        .reweighted(&base.c, |c| stable_mass_factor(c, sigma, k))
        .expect("concentration was checked against the domain");
    StableBetaRound { k, mu_k, jump_a: 1.0 - sigma, jump_b: base.c.map(|c| c + sigma + k as f64) }
}

pub fn simulate_stable_round(p: &StableBetaParams, k: u32, stream: &RandomStream) -> Result<PointMeasure> {
    let round = stable_round_measure(p, k);
    let mut rng = stream.child(STABLE_BETA_STREAM).child(k as u64).rng();
    let atoms = sampling::superpose(&round.mu_k, &mut rng, |loc, rng| {
        let jump = sampling::beta(round.jump_a, round.jump_b.eval(&loc.point), rng)?;
        Ok(WeightedAtom { location: loc.point, jump, round_k: k, subround_h: 0, origin: Origin::Prior })
    })?;
    Ok(PointMeasure { domain: p.base.mu.domain().clone(), atoms })
}

pub fn simulate_stable_beta_process(p: &StableBetaParams, last_round: u32, stream: &RandomStream) -> Result<PointMeasure> {
    let mut out = PointMeasure::empty(p.base.mu.domain().clone());
    for k in 0..=last_round {
        out.append(simulate_stable_round(p, k, stream)?);
    }
    Ok(out)
}

/// Jump density of the finite-`N` Indian buffet Lévy measure,
/// `(N/γ) · Beta(π; cγ/N, c)`, per unit of base measure.
///
/// As `N → ∞` it converges to the beta-process density `c π^{-1} (1−π)^{c−1}`.
pub fn ibp_levy_density(n: u64, c: f64, gamma: f64, pi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    if !(c > 0.0 && gamma > 0.0) {
        return Err(Error::Parameter(format!("need c > 0 and γ > 0, got c={c}, γ={gamma}")));
    }
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::Domain(format!("jump {pi} is outside (0, 1)")));
    }
    let n = n as f64;
    let a = c * gamma / n;
    let ln_beta = ln_gamma(a) + ln_gamma(c) - ln_gamma(a + c);
    Ok(((n / gamma).ln() + (a - 1.0) * pi.ln() + (c - 1.0) * (-pi).ln_1p() - ln_beta).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Domain, Grid};
    use approx::assert_relative_eq;

    fn unit() -> Domain {
        Domain::unit_interval()
    }

    fn piecewise_c(values: Vec<f64>, mass: f64) -> BetaProcessParams {
        let c = DomainFunction::equal_cells(&unit(), values).unwrap();
        BetaProcessParams::new(c, BaseMeasure::uniform(unit(), mass).unwrap()).unwrap()
    }

    #[test]
    fn round_measure_examples() {
        let p = BetaProcessParams::homogeneous(1.0, 1.0).unwrap();
        assert_eq!(round_measure(&p, 0).rate(), 1.0);
        let p = BetaProcessParams::homogeneous(2.0, 3.0).unwrap();
        let r = round_measure(&p, 4);
        assert_relative_eq!(r.rate(), 1.0, epsilon = 1e-15);
        assert_eq!(r.jump_b.eval(&[0.3]), 6.0);
        assert_eq!(r.jump_a(), 1.0);
    }

    #[test]
    fn piecewise_round_mass_matches_riemann_oracle() {
        let p = piecewise_c(vec![1.0, 3.0], 2.0);
        let mass = round_measure(&p, 1).rate();
        assert_relative_eq!(mass, 1.25, epsilon = 1e-15);
        let n = 200_000;
        let riemann: f64 = (0..n)
            .map(|i| {
                let c = p.c().eval(&[(i as f64 + 0.5) / n as f64]);
                2.0 * c / (c + 1.0) / n as f64
            })
            .sum();
        assert_relative_eq!(riemann, 1.25, epsilon = 1e-9);
    }

    #[test]
    fn round_moment_examples() {
        let all = Region::whole(&unit());
        let p = BetaProcessParams::homogeneous(1.0, 1.0).unwrap();
        let m = round_mean_and_variance(&p, 0, &all).unwrap();
        assert_relative_eq!(m.mean, 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.variance, 1.0 / 3.0, epsilon = 1e-15);
        let p = BetaProcessParams::homogeneous(2.0, 3.0).unwrap();
        assert_relative_eq!(round_mean_and_variance(&p, 4, &all).unwrap().mean, 1.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn telescoping_round_means() {
        let all = Region::whole(&unit());
        for (c, gamma) in [(1.0, 1.0), (0.5, 3.0), (4.0, 10.0)] {
            let p = BetaProcessParams::homogeneous(c, gamma).unwrap();
            let mut partial = 0.0;
            let mut previous = 0.0;
            for k in 0..=1000u32 {
                partial += round_mean_and_variance(&p, k, &all).unwrap().mean;
                assert!(partial > previous && partial < gamma);
                previous = partial;
                if [0, 1, 9, 99, 1000].contains(&k) {
                    let target = gamma * (1.0 - c / (c + k as f64 + 1.0));
                    assert_relative_eq!(partial, target, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn empty_round_when_mass_is_zero() {
        let p = BetaProcessParams::homogeneous(1.0, 0.0).unwrap();
        assert!(simulate_round(&p, 0, &RandomStream::new(1)).unwrap().is_empty());
    }

    #[test]
    fn single_round_process_equals_round_zero() {
        let p = BetaProcessParams::homogeneous(1.0, 5.0).unwrap();
        let s = RandomStream::new(3).child(17);
        assert_eq!(simulate_beta_process(&p, 0, &s).unwrap(), simulate_round(&p, 0, &s).unwrap());
    }

    #[test]
    fn rounds_do_not_depend_on_generation_order() {
        let p = BetaProcessParams::homogeneous(2.0, 8.0).unwrap();
        let s = RandomStream::new(5);
        let full = simulate_beta_process(&p, 6, &s).unwrap();
        let mut reversed: Vec<WeightedAtom> = Vec::new();
        for k in (0..=6).rev() {
            let mut r = simulate_round(&p, k, &s).unwrap().atoms;
            r.append(&mut reversed);
            reversed = r;
        }
        assert_eq!(full.atoms, reversed);
    }

    #[test]
    fn jumps_and_locations_are_in_support() {
        let p = piecewise_c(vec![0.2, 5.0], 20.0);
        let draw = simulate_beta_process(&p, 30, &RandomStream::new(8)).unwrap();
        assert!(!draw.is_empty());
        for a in &draw.atoms {
            assert!(a.jump > 0.0 && a.jump < 1.0);
            assert!(unit().contains(&a.location));
            assert!(a.round_k <= 30);
        }
    }

    #[test]
    fn inhomogeneous_jump_shape_follows_location() {
        // c = 1 on the left half and 9 on the right: right-half jumps are Beta(1, 9 + k).
        let p = piecewise_c(vec![1.0, 9.0], 200.0);
        let draw = simulate_round(&p, 0, &RandomStream::new(21)).unwrap();
        let (left, right): (Vec<_>, Vec<_>) = draw.atoms.iter().partition(|a| a.location[0] < 0.5);
        let mean = |v: &[&WeightedAtom]| v.iter().map(|a| a.jump).sum::<f64>() / v.len() as f64;
        assert!((mean(&left) - 0.5).abs() < 0.1);
        assert!((mean(&right) - 0.1).abs() < 0.03);
        // μ_0 = μ, so both halves receive about half of the atoms.
        assert!(left.len() > 60 && right.len() > 60);
    }

    #[test]
    fn stable_factor_examples() {
        // Oracle: Γ(x+1) = xΓ(x), so Γ(3.5)/Γ(1.5) = 2.5·1.5 and Γ(4)/Γ(2) = 3·2.
        assert_relative_eq!(stable_mass_factor(1.0, 0.5, 2), 2.5 * 1.5 / 6.0, max_relative = 1e-13);
        assert_relative_eq!(stable_mass_factor(1.0, 0.5, 0), 1.0, max_relative = 1e-14);
        for (c, k) in [(1.0, 3u32), (2.5, 10), (0.3, 100)] {
            assert_relative_eq!(stable_mass_factor(c, 1e-8, k), c / (c + k as f64), max_relative = 1e-6);
        }
        // No overflow for large k.
        assert!(stable_mass_factor(2.0, 0.5, 1_000_000).is_finite());
    }

    #[test]
    fn stable_round_scales_cellwise() {
        let grid = Grid::from_breaks(&unit(), vec![vec![0.0, 0.5, 1.0]]).unwrap();
        let c = DomainFunction::piecewise(grid, vec![1.0, 2.0]).unwrap();
        let base = BetaProcessParams::new(c, BaseMeasure::uniform(unit(), 2.0).unwrap()).unwrap();
        let p = StableBetaParams::new(base, 0.5).unwrap();
        let r = stable_round_measure(&p, 2);
        let expected = stable_mass_factor(1.0, 0.5, 2) + stable_mass_factor(2.0, 0.5, 2);
        assert_relative_eq!(r.mu_k.total_mass(), expected, max_relative = 1e-14);
        assert_eq!(r.jump_a, 0.5);
        assert_eq!(r.jump_b.eval(&[0.9]), 4.5);
        assert!(StableBetaParams::new(p.base().clone(), 1.0).is_err());
        assert!(StableBetaParams::new(p.base().clone(), 0.0).is_err());
    }

    #[test]
    fn stable_simulation_stays_in_support() {
        let p = StableBetaParams::new(BetaProcessParams::homogeneous(1.0, 10.0).unwrap(), 0.4).unwrap();
        let draw = simulate_stable_beta_process(&p, 20, &RandomStream::new(2)).unwrap();
        assert!(draw.atoms.iter().all(|a| a.jump > 0.0 && a.jump < 1.0));
    }

    #[test]
    fn ibp_density_examples() {
        let target = 1.0 * 0.5f64.powi(-1);
        assert_eq!(target, 2.0);
        let v = ibp_levy_density(1_000_000, 1.0, 1.0, 0.5).unwrap();
        assert!((v / target - 1.0).abs() < 1e-3);
        let errors: Vec<f64> = [1_000u64, 10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| (ibp_levy_density(n, 1.0, 1.0, 0.5).unwrap() / target - 1.0).abs())
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
        assert!(matches!(ibp_levy_density(10, 1.0, 1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(ibp_levy_density(10, 1.0, 1.0, 1.0), Err(Error::Domain(_))));
    }
}
