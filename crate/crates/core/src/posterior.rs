//! Conjugate posterior of a homogeneous beta process given Bernoulli-process data.
//!
//! After `M` draws with counts `m_i` at observed locations the posterior is
//! `BP(c + M, cμ/(c+M) + Σ_i m_i/(c+M) δ_{ω_i})`. Its rounds have jump law
//! `Beta(1, c+M+k)` and location measure scaled by `1/(c+M+k)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::beta::{round_measure, BetaProcessParams, BetaRound};
use crate::error::{Error, Result};
use crate::measures::{poisson_count, BaseMeasure, Domain, DomainFunction, Origin, PointMeasure, RandomStream, WeightedAtom};
use crate::sampling;
use crate::verify::monte_carlo_moments;

/// Stream id for resampling observed atom `i`: path `[.., OBSERVED_STREAM, i]`.
pub const OBSERVED_STREAM: u64 = 5;
/// Stream id for posterior atoms at previously unobserved locations.
pub const NEW_JUMP_STREAM: u64 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedAtom {
    pub location: Vec<f64>,
    pub count: u64,
}

/// Counts from `draws` Bernoulli-process draws, one entry per prior atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub draws: u64,
    pub atoms: Vec<ObservedAtom>,
}

impl ObservationSet {
    pub fn new(draws: u64, atoms: Vec<ObservedAtom>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| a.count > draws) {
            return Err(Error::Parameter(format!("count {} exceeds the number of draws {draws}", a.count)));
        }
        Ok(Self { draws, atoms })
    }

    pub fn total_count(&self) -> u64 {
        self.atoms.iter().map(|a| a.count).sum()
    }
}

/// `m_i ~ Binomial(M, π_i)` independently at every atom of `prior`. Zero counts are kept.
pub fn sample_bernoulli_data<R: Rng + ?Sized>(prior: &PointMeasure, draws: u64, rng: &mut R) -> Result<ObservationSet> {
    let mut atoms = Vec::with_capacity(prior.len());
    for atom in &prior.atoms {
        if !(atom.jump > 0.0 && atom.jump < 1.0) {
            return Err(Error::InvalidPrior(format!("jump {} is not a probability in (0, 1)", atom.jump)));
        }
        let count = if draws == 0 {
            0
        } else {
            let dist = Binomial::new(draws, atom.jump).map_err(|e| Error::InvalidPrior(e.to_string()))?;
            dist.sample(rng)
        };
        atoms.push(ObservedAtom { location: atom.location.clone(), count });
    }
    ObservationSet::new(draws, atoms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorBetaParams {
    prior_c: f64,
    draws: u64,
    concentration: f64,
    base: BaseMeasure,
    prior_base: BaseMeasure,
}

impl PosteriorBetaParams {
    /// Requires a constant concentration; observed locations must lie in the prior's domain.
    pub fn new(prior: &BetaProcessParams, obs: &ObservationSet) -> Result<Self> {
        let c = prior
            .c()
            .as_constant()
            .ok_or_else(|| Error::Unsupported("the posterior is implemented for constant c only".into()))?;
        let total = c + obs.draws as f64;
        let mut base = prior.mu().scaled(c / total);
        for atom in obs.atoms.iter().filter(|a| a.count > 0) {
            base = base.with_atom(atom.location.clone(), atom.count as f64 / total)?;
        }
        Ok(Self { prior_c: c, draws: obs.draws, concentration: total, base, prior_base: prior.mu().clone() })
    }

    pub fn prior_c(&self) -> f64 {
        self.prior_c
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// `c + M`.
    pub fn concentration(&self) -> f64 {
        self.concentration
    }

    /// `cμ/(c+M) + Σ m_i/(c+M) δ_{ω_i}`.
    pub fn base(&self) -> &BaseMeasure {
        &self.base
    }

    pub fn domain(&self) -> &Domain {
        self.base.domain()
    }

    /// The posterior viewed as an ordinary beta process.
    pub fn to_beta_params(&self) -> Result<BetaProcessParams> {
        if self.draws == 0 {
            return BetaProcessParams::new(DomainFunction::constant(self.prior_c)?, self.prior_base.clone());
        }
        BetaProcessParams::new(DomainFunction::constant(self.concentration)?, self.base.clone())
    }
}

/// Posterior round `k`: jump law `Beta(1, c+M+k)`, location measure `cμ/(c+M+k) + Σ m_i/(c+M+k) δ_{ω_i}`.
pub fn posterior_round_measure(pp: &PosteriorBetaParams, k: u32) -> Result<BetaRound> {
    Ok(round_measure(&pp.to_beta_params()?, k))
}

/// `m (1/(c+M) − 1/(c+M+K+1))`, the mean of the observed-atom sum truncated after round `K`.
pub fn truncated_observed_expectation(c: f64, draws: u64, count: u64, last_round: u32) -> f64 {
    let a = c + draws as f64;
    count as f64 * (1.0 / a - 1.0 / (a + last_round as f64 + 1.0))
}

/// Round weights `1/(c+M+k)`, `k = 0..=K`, shared by observed-atom resampling and new jumps.
///
/// An observed atom's jump is `Σ_k Σ_{h ≤ H_k} b_kh` with `H_k ~ Poisson(m/(c+M+k))` and
/// `b_kh ~ Beta(1, c+M+k)`. The Poisson counts are drawn as one total
/// `Poisson(m Σ_k 1/(c+M+k))` split over rounds by these weights, which has the same law.
#[derive(Debug, Clone)]
pub struct PosteriorJumpSampler {
    concentration: f64,
    last_round: u32,
    weight_sum: f64,
    rounds: WeightedIndex<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedJump {
    pub jump: f64,
    /// Number of beta terms summed.
    pub terms: u64,
    pub truncated_expectation: f64,
}

impl PosteriorJumpSampler {
    pub fn new(c: f64, draws: u64, last_round: u32) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("concentration must be positive, got {c}")));
        }
        let concentration = c + draws as f64;
        let weights: Vec<f64> = (0..=last_round).map(|k| 1.0 / (concentration + k as f64)).collect();
        let weight_sum = weights.iter().sum();
        let rounds = WeightedIndex::new(&weights).map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(Self { concentration, last_round, weight_sum, rounds })
    }

    /// `Σ_{k=0}^{K} 1/(c+M+k)`.
    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    /// Probability that a new jump comes from round `k`.
    pub fn round_probability(&self, k: u32) -> f64 {
        if k > self.last_round {
            return 0.0;
        }
        1.0 / (self.concentration + k as f64) / self.weight_sum
    }

    pub fn observed<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> Result<ObservedJump> {
        let a = self.concentration;
        let truncated_expectation = count as f64 * (1.0 / a - 1.0 / (a + self.last_round as f64 + 1.0));
        let terms = if count == 0 { 0 } else { poisson_count(count as f64 * self.weight_sum, rng)? };
        let mut jump = 0.0;
        for _ in 0..terms {
            let k = self.rounds.sample(rng);
            jump += sampling::beta_one(self.concentration + k as f64, rng);
        }
        Ok(ObservedJump { jump, terms, truncated_expectation })
    }

    /// `k ∝ 1/(c+M+k)`, then a `Beta(1, c+M+k)` jump.
    pub fn new_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, f64) {
        let k = self.rounds.sample(rng) as u32;
        (k, sampling::beta_one(self.concentration + k as f64, rng))
    }
}

/// Resample one observed atom's jump with the round sum truncated after `last_round`.
pub fn resample_observed_jump<R: Rng + ?Sized>(
    c: f64,
    draws: u64,
    count: u64,
    last_round: u32,
    rng: &mut R,
) -> Result<ObservedJump> {
    if count > draws {
        return Err(Error::Parameter(format!("count {count} exceeds the number of draws {draws}")));
    }
    PosteriorJumpSampler::new(c, draws, last_round)?.observed(count, rng)
}

/// One jump at a new location: round `k ∈ 0..=K` with weight `1/(c+M+k)`, jump `Beta(1, c+M+k)`.
pub fn sample_new_jump<R: Rng + ?Sized>(c: f64, draws: u64, last_round: u32, rng: &mut R) -> Result<(u32, f64)> {
    Ok(PosteriorJumpSampler::new(c, draws, last_round)?.new_jump(rng))
}

/// A full posterior draw truncated after round `K`: every observed atom with a positive
/// count is resampled on its own stream, then the unobserved part adds
/// `Poisson(cγ Σ_k 1/(c+M+k))` new atoms with locations from `μ`.
pub fn simulate_posterior(pp: &PosteriorBetaParams, obs: &ObservationSet, last_round: u32, stream: &RandomStream) -> Result<PointMeasure> {
    let c = pp.prior_c();
    let sampler = PosteriorJumpSampler::new(c, pp.draws(), last_round)?;
    let mut out = PointMeasure::empty(pp.domain().clone());
    for (i, atom) in obs.atoms.iter().enumerate().filter(|(_, a)| a.count > 0) {
        let mut rng = stream.child(OBSERVED_STREAM).child(i as u64).rng();
        let draw = sampler.observed(atom.count, &mut rng)?;
        out.atoms.push(WeightedAtom {
            location: atom.location.clone(),
            jump: draw.jump,
            round_k: 0,
            subround_h: 0,
            origin: Origin::PosteriorObserved,
        });
    }
    let continuous = pp.prior_base.scaled(c * sampler.weight_sum());
    let mut rng = stream.child(NEW_JUMP_STREAM).rng();
    let new_atoms = sampling::superpose(&continuous, &mut rng, |loc, rng| {
        let (k, jump) = sampler.new_jump(rng);
        Ok(WeightedAtom { location: loc.point, jump, round_k: k, subround_h: 0, origin: Origin::PosteriorNew })
    })?;
    out.atoms.extend(new_atoms);
    Ok(out)
}

/// Replica statistics for one observed atom, against `m/(c+M)` and the moments of the
/// undecomposed `Beta(m, c+M−m)` posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedAtomSummary {
    pub count: u64,
    pub replicas: usize,
    pub expected_mean: f64,
    pub truncated_expectation: f64,
    pub empirical_mean: f64,
    pub standard_error: f64,
    pub empirical_variance: f64,
    pub beta_posterior_variance: f64,
    pub fraction_above_one: f64,
}

pub fn summarize_observed(c: f64, draws: u64, count: u64, last_round: u32, jumps: &[f64]) -> Result<ObservedAtomSummary> {
    let mc = monte_carlo_moments(jumps)?;
    let a = c + draws as f64;
    let m = count as f64;
    Ok(ObservedAtomSummary {
        count,
        replicas: jumps.len(),
        expected_mean: m / a,
        truncated_expectation: truncated_observed_expectation(c, draws, count, last_round),
        empirical_mean: mc.mean,
        standard_error: mc.se_mean,
        empirical_variance: mc.variance,
        beta_posterior_variance: m * (a - m) / (a * a * (a + 1.0)),
        fraction_above_one: jumps.iter().filter(|&&x| x > 1.0).count() as f64 / jumps.len() as f64,
    })
}
