//! Truncation errors of the superposition constructions.
//!
//! All bounds here are closed forms. [`empirical_residual_mass`] is the one
//! Monte Carlo estimate, kept separate so formula and simulation evidence are
//! never mixed in a report.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::beta::{self, BetaProcessParams};
use crate::error::{Error, Result};
use crate::measures::{DomainFunction, RandomStream};
use crate::verify::monte_carlo_moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationFamily {
    BetaSuperposition,
    BetaStickBreaking,
    GammaSuperposition,
}

/// Truncation level of the gamma sub-round index `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubroundLimit {
    Finite(u32),
    Infinite,
}

impl fmt::Display for SubroundLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubroundLimit::Finite(h) => write!(f, "{h}"),
            SubroundLimit::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub family: TruncationFamily,
    pub k: u32,
    /// Gamma only.
    pub h: Option<SubroundLimit>,
    pub l1_error: f64,
    /// Beta families only, for the requested number of observations.
    pub marginal_bound: Option<f64>,
    pub expected_atoms: f64,
}

fn positive_mass(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("mass must be positive and finite, got {gamma}")))
    }
}

fn check_observations(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Parameter("the marginal bound needs at least one observation".into()));
    }
    Ok(())
}

/// `‖B − Σ_{k≤K} B_k‖₁ = μ_{K+1}(Ω)/γ`; `c/(c+K+1)` for constant `c`.
pub fn beta_l1_error(p: &BetaProcessParams, last_round: u32) -> Result<f64> {
    positive_mass(p.mass())?;
    Ok(beta::round_measure(p, last_round + 1).rate() / p.mass())
}

/// `1 − exp(−M μ_{K+1}(Ω))`, the bound on a quarter of the marginal-likelihood L1 distance
/// after `M` Bernoulli-process observations.
pub fn beta_marginal_bound(p: &BetaProcessParams, last_round: u32, observations: u32) -> Result<f64> {
    check_observations(observations)?;
    let tail = beta::round_measure(p, last_round + 1).rate();
    Ok(-(-(observations as f64) * tail).exp_m1())
}

/// `E(I_K) = Σ_{k=0}^{K} μ_k(Ω)`, the expected atom count of the first `K+1` rounds;
/// the partial harmonic sum `Σ cγ/(c+k)` when `c` is constant.
pub fn beta_expected_atoms(p: &BetaProcessParams, last_round: u32) -> f64 {
    (0..=last_round).map(|k| beta::round_measure(p, k).rate()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StickBreakingBounds {
    pub l1: f64,
    pub marginal_bound: f64,
}

fn constant_concentration(c: &DomainFunction) -> Result<f64> {
    c.as_constant()
        .ok_or_else(|| Error::Unsupported("this bound needs a constant concentration".into()))
}

/// Stick-breaking construction: `(c/(c+1))^{K+1}` and `1 − exp(−Mγ (c/(c+1))^{K+1})`.
pub fn stick_breaking_bounds(c: &DomainFunction, gamma: f64, last_round: u32, observations: u32) -> Result<StickBreakingBounds> {
    let c = constant_concentration(c)?;
    check_observations(observations)?;
    let l1 = (c / (c + 1.0)).powi(last_round as i32 + 1);
    Ok(StickBreakingBounds { l1, marginal_bound: -(-(observations as f64) * gamma * l1).exp_m1() })
}

/// Each stick-breaking round carries `Poisson(γ)` atoms, so `K+1` rounds hold `γ(K+1)` on average.
pub fn stick_breaking_expected_atoms(gamma: f64, last_round: u32) -> f64 {
    gamma * (last_round as f64 + 1.0)
}

/// Remaining distance from cutting `h` at `H`: `Σ_{k=1}^{K} 1/(k (k+1)^{H+1})`.
pub fn gamma_h_remainder(last_k: u32, last_h: u32) -> f64 {
    (1..=last_k)
        .map(|k| {
            let k = k as f64;
            (-(last_h as f64 + 1.0) * (k + 1.0).ln()).exp() / k
        })
        .sum()
}

/// `‖G − Σ_{k≤K} Σ_{h≤H} Γ_kh‖₁ = 1/(K+1)`, plus the `h` remainder when `H` is finite.
pub fn gamma_l1_error(last_k: u32, last_h: SubroundLimit) -> Result<f64> {
    if last_k == 0 {
        return Err(Error::Parameter("gamma truncation needs K ≥ 1".into()));
    }
    let base = 1.0 / (last_k as f64 + 1.0);
    match last_h {
        SubroundLimit::Infinite => Ok(base),
        SubroundLimit::Finite(0) => Err(Error::Parameter("gamma truncation needs H ≥ 1".into())),
        SubroundLimit::Finite(h) => Ok(base + gamma_h_remainder(last_k, h)),
    }
}

/// Expected atoms in `k ≤ K, h ≤ H`; with `H = ∞` the `h`-sum is `γ ln((k+1)/k)` and the total `γ ln(K+1)`.
pub fn gamma_expected_atoms(gamma: f64, last_k: u32, last_h: SubroundLimit) -> f64 {
    match last_h {
        SubroundLimit::Infinite => gamma * (last_k as f64 + 1.0).ln(),
        SubroundLimit::Finite(h_max) => (1..=last_k)
            .flat_map(|k| (1..=h_max).map(move |h| (k, h)))
            .map(|(k, h)| crate::gamma::subround_rate(gamma, k, h).expect("indices start at 1"))
            .sum(),
    }
}

pub fn beta_report(p: &BetaProcessParams, last_round: u32, observations: u32) -> Result<TruncationReport> {
    Ok(TruncationReport {
        family: TruncationFamily::BetaSuperposition,
        k: last_round,
        h: None,
        l1_error: beta_l1_error(p, last_round)?,
        marginal_bound: Some(beta_marginal_bound(p, last_round, observations)?),
        expected_atoms: beta_expected_atoms(p, last_round),
    })
}

pub fn stick_breaking_report(c: &DomainFunction, gamma: f64, last_round: u32, observations: u32) -> Result<TruncationReport> {
    let b = stick_breaking_bounds(c, gamma, last_round, observations)?;
    Ok(TruncationReport {
        family: TruncationFamily::BetaStickBreaking,
        k: last_round,
        h: None,
        l1_error: b.l1,
        marginal_bound: Some(b.marginal_bound),
        expected_atoms: stick_breaking_expected_atoms(gamma, last_round),
    })
}

pub fn gamma_report(gamma: f64, last_k: u32, last_h: SubroundLimit) -> Result<TruncationReport> {
    Ok(TruncationReport {
        family: TruncationFamily::GammaSuperposition,
        k: last_k,
        h: Some(last_h),
        l1_error: gamma_l1_error(last_k, last_h)?,
        marginal_bound: None,
        expected_atoms: gamma_expected_atoms(gamma, last_k, last_h),
    })
}

/// Which construction has the smaller L1 error at a given `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lower {
    Superposition,
    StickBreaking,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub k: u32,
    pub superposition_l1: f64,
    pub stick_breaking_l1: f64,
    pub lower: Lower,
}

/// L1 errors of both beta constructions for `K = 0..=k_max` at constant `c`.
pub fn crossover_rows(c: f64, k_max: u32) -> Result<Vec<CrossoverRow>> {
    let cf = DomainFunction::constant(c)?;
    let p = BetaProcessParams::homogeneous(c, 1.0)?;
    (0..=k_max)
        .map(|k| {
            let sup = beta_l1_error(&p, k)?;
            let sb = stick_breaking_bounds(&cf, 1.0, k, 1)?.l1;
            let lower = if (sup - sb).abs() <= 1e-15 * sup.max(sb) {
                Lower::Tie
            } else if sup < sb {
                Lower::Superposition
            } else {
                Lower::StickBreaking
            };
            Ok(CrossoverRow { k, superposition_l1: sup, stick_breaking_l1: sb, lower })
        })
        .collect()
}

/// Maximal runs of consecutive `K` sharing the same [`Lower`] verdict, as `(verdict, first K, last K)`.
pub fn crossover_ranges(rows: &[CrossoverRow]) -> Vec<(Lower, u32, u32)> {
    let mut out: Vec<(Lower, u32, u32)> = Vec::new();
    for row in rows {
        match out.last_mut() {
            Some((lower, _, last)) if *lower == row.lower && *last + 1 == row.k => *last = row.k,
            _ => out.push((row.lower, row.k, row.k)),
        }
    }
    out
}

/// Truncation error against expected atom count for both beta constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomBudgetRow {
    pub k: u32,
    pub superposition_atoms: f64,
    pub superposition_l1: f64,
    pub stick_breaking_atoms: f64,
    pub stick_breaking_l1: f64,
}

pub fn atom_budget_table(c: f64, gamma: f64, rounds: &[u32]) -> Result<Vec<AtomBudgetRow>> {
    let p = BetaProcessParams::homogeneous(c, gamma)?;
    let cf = DomainFunction::constant(c)?;
    rounds
        .iter()
        .map(|&k| {
            Ok(AtomBudgetRow {
                k,
                superposition_atoms: beta_expected_atoms(&p, k),
                superposition_l1: beta_l1_error(&p, k)?,
                stick_breaking_atoms: stick_breaking_expected_atoms(gamma, k),
                stick_breaking_l1: stick_breaking_bounds(&cf, gamma, k, 1)?.l1,
            })
        })
        .collect()
}

/// Monte Carlo estimate of the mass in rounds `K+1 ..= K+extra` of a simulated beta process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualEstimate {
    pub mean: f64,
    pub standard_error: f64,
    /// Exact expected mass of the simulated window of rounds.
    pub window_target: f64,
    /// `γ · beta_l1_error(K)`: expected mass of every round past `K`.
    pub full_residual: f64,
    pub replicas: usize,
}

pub fn empirical_residual_mass(
    p: &BetaProcessParams,
    last_round: u32,
    extra_rounds: u32,
    replicas: usize,
    stream: &RandomStream,
) -> Result<ResidualEstimate> {
    let window = last_round + 1..=last_round + extra_rounds;
    let totals = (0..replicas)
        .map(|r| {
            let s = stream.child(r as u64);
            window
                .clone()
                .map(|k| beta::simulate_round(p, k, &s).map(|d| d.total_mass()))
                .sum::<Result<f64>>()
        })
        .collect::<Result<Vec<f64>>>()?;
    let mc = monte_carlo_moments(&totals)?;
    let all = crate::measures::Region::whole(p.mu().domain());
    let window_target = window
        .map(|k| beta::round_mean_and_variance(p, k, &all).map(|m| m.mean))
        .sum::<Result<f64>>()?;
    Ok(ResidualEstimate {
        mean: mc.mean,
        standard_error: mc.se_mean,
        window_target,
        full_residual: p.mass() * beta_l1_error(p, last_round)?,
        replicas,
    })
}
