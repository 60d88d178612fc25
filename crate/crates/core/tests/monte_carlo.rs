use levyd::beta::{self, BetaProcessParams};
use levyd::gamma::{self, GammaProcessParams};
use levyd::measures::{BaseMeasure, Domain, Grid, Origin, PointMeasure, RandomStream, Region, WeightedAtom};
use levyd::posterior::{resample_observed_jump, sample_bernoulli_data};
use levyd::sampling;
use levyd::truncation::{crossover_ranges, crossover_rows, empirical_residual_mass, Lower};
use levyd::verify::{chi_square, ks_distance, monte_carlo_moments};
use rand::Rng;

fn within_se(mean: f64, target: f64, se: f64, z: f64) -> bool {
    (mean - target).abs() <= z * se
}

#[test]
fn beta_round_mass_matches_its_moments() {
    let (c, gamma) = (2.0, 4.0);
    let p = BetaProcessParams::homogeneous(c, gamma).unwrap();
    let set = Region::interval(0.2, 0.7).unwrap();
    let root = RandomStream::new(101);
    for k in [0u32, 3, 10] {
        let masses: Vec<f64> = (0..10_000)
            .map(|r| beta::simulate_round(&p, k, &root.child(r)).unwrap().mass_in(&set))
            .collect();
        let mc = monte_carlo_moments(&masses).unwrap();
        let kf = k as f64;
        let mu_k = c / (c + kf) * gamma * 0.5;
        let mean = mu_k / (c + kf + 1.0);
        let variance = mu_k * 2.0 / ((c + kf + 1.0) * (c + kf + 2.0));
        assert!(within_se(mc.mean, mean, mc.se_mean, 4.0), "k={k}: mean {} vs {mean}", mc.mean);
        assert!(within_se(mc.variance, variance, mc.se_variance, 4.0), "k={k}: var {} vs {variance}", mc.variance);
    }
}

#[test]
fn gamma_subround_mass_matches_its_moments() {
    let (theta, mass) = (1.5, 3.0);
    let p = GammaProcessParams::homogeneous(theta, mass).unwrap();
    let set = Region::interval(0.0, 0.4).unwrap();
    let root = RandomStream::new(202);
    for (k, h) in [(1u32, 1u32), (2, 3)] {
        let masses: Vec<f64> = (0..10_000)
            .map(|r| gamma::simulate_subround(&p, k, h, &root.child(r)).unwrap().mass_in(&set))
            .collect();
        let mc = monte_carlo_moments(&masses).unwrap();
        let (kf, hf) = (k as f64, h as f64);
        let rate = mass * 0.4 / ((kf + 1.0).powi(h as i32) * hf);
        let scale = theta / (kf + 1.0);
        let mean = rate * hf * scale;
        let variance = rate * hf * (hf + 1.0) * scale * scale;
        assert!(within_se(mc.mean, mean, mc.se_mean, 4.0), "({k},{h}): mean {} vs {mean}", mc.mean);
        assert!(within_se(mc.variance, variance, mc.se_variance, 4.0), "({k},{h}): var {} vs {variance}", mc.variance);
    }
}

#[test]
fn locations_follow_a_piecewise_density() {
    let domain = Domain::unit_interval();
    let grid = Grid::equal_cells(&domain, &[2]).unwrap();
    let mu = BaseMeasure::piecewise_density(domain, grid, vec![1.0, 3.0]).unwrap();
    let n = 100_000;
    let pts = mu.sample_locations(n, &mut RandomStream::new(303).rng()).unwrap();
    let mut observed = vec![0u64; 20];
    for p in &pts {
        observed[((p[0] * 20.0) as usize).min(19)] += 1;
    }
    let expected: Vec<f64> = (0..20).map(|i| n as f64 * if i < 10 { 1.0 } else { 3.0 } / 40.0).collect();
    let chi = chi_square(&observed, &expected).unwrap();
    assert!(chi.passed(), "{chi:?}");
}

#[test]
fn pooled_gamma_locations_are_uniform() {
    let p = GammaProcessParams::homogeneous(1.0, 5.0).unwrap();
    let root = RandomStream::new(404);
    let mut observed = vec![0u64; 20];
    let mut n = 0usize;
    for r in 0..4000 {
        for a in gamma::simulate_gamma_process(&p, 5, 5, &root.child(r)).unwrap().atoms {
            observed[((a.location[0] * 20.0) as usize).min(19)] += 1;
            n += 1;
        }
    }
    assert!(n > 10_000);
    let chi = chi_square(&observed, &[n as f64 / 20.0; 20]).unwrap();
    assert!(chi.passed(), "{chi:?}");
}

#[test]
fn residual_mass_matches_the_truncation_error() {
    let p = BetaProcessParams::homogeneous(1.0, 10.0).unwrap();
    for k in [4u32, 9, 19] {
        let est = empirical_residual_mass(&p, k, 2000, 2000, &RandomStream::new(505 + k as u64)).unwrap();
        // Rounds K+1..=K+2000 at c = 1 carry 10·(1/(K+2) − 1/(K+2002)).
        let window = 10.0 * (1.0 / (k as f64 + 2.0) - 1.0 / (k as f64 + 2002.0));
        assert!((est.window_target - window).abs() < 1e-9 * window);
        assert!((est.full_residual - 10.0 / (k as f64 + 2.0)).abs() < 1e-12);
        assert!((est.mean - est.window_target).abs() <= 0.05 * est.window_target, "K={k}: {est:?}");
        assert!(est.window_target / est.full_residual > 0.98);
    }
}

#[test]
fn observed_jump_means_match_truncated_expectation() {
    for (c, draws) in [(1.0, 2u64), (3.0, 5)] {
        for count in 0..=draws {
            for last_round in [0u32, 1000] {
                let mut rng = RandomStream::new(606).child(count).child(last_round as u64).rng();
                let jumps: Vec<f64> = (0..20_000)
                    .map(|_| resample_observed_jump(c, draws, count, last_round, &mut rng).unwrap().jump)
                    .collect();
                let target: f64 = (0..=last_round)
                    .map(|k| {
                        let b = c + draws as f64 + k as f64;
                        count as f64 / (b * (b + 1.0))
                    })
                    .sum();
                if count == 0 {
                    assert!(jumps.iter().all(|&j| j == 0.0));
                    continue;
                }
                let mc = monte_carlo_moments(&jumps).unwrap();
                assert!(
                    within_se(mc.mean, target, mc.se_mean, 4.0),
                    "c={c} M={draws} m={count} K={last_round}: {} vs {target}",
                    mc.mean
                );
            }
        }
    }
}

#[test]
fn ks_accepts_correct_samples_at_nominal_rate() {
    let b = 3.0;
    let cdf = |x: f64| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powf(b);
    let trials = 300;
    let passed = (0..trials)
        .filter(|&s| {
            let mut rng = RandomStream::new(s).rng();
            let xs: Vec<f64> = (0..2000).map(|_| sampling::beta_one(b, &mut rng)).collect();
            ks_distance(&xs, cdf).unwrap().passed()
        })
        .count();
    assert!(passed as f64 >= 0.99 * trials as f64, "{passed}/{trials}");
}

#[test]
fn ks_rejects_a_wrong_law() {
    let mut rng = RandomStream::new(7).rng();
    let xs: Vec<f64> = (0..2000).map(|_| sampling::beta_one(2.0, &mut rng)).collect();
    assert!(!ks_distance(&xs, |x: f64| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(3)).unwrap().passed());
}

#[test]
fn stream_uniforms_are_centered() {
    let mut rng = RandomStream::new(808).child(1).rng();
    let xs: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
    let mc = monte_carlo_moments(&xs).unwrap();
    assert!(within_se(mc.mean, 0.5, mc.se_mean, 4.0));
    assert!((mc.variance - 1.0 / 12.0).abs() < 4.0 * mc.se_variance);
}

#[test]
fn bernoulli_counts_are_independent_across_atoms() {
    let atom = |x: f64, jump: f64| WeightedAtom { location: vec![x], jump, round_k: 0, subround_h: 0, origin: Origin::Prior };
    let prior = PointMeasure { domain: Domain::unit_interval(), atoms: vec![atom(0.25, 0.3), atom(0.75, 0.6)] };
    let mut rng = RandomStream::new(909).rng();
    let n = 50_000;
    let (mut a, mut b, mut ab) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let obs = sample_bernoulli_data(&prior, 1, &mut rng).unwrap();
        let x = obs.atoms[0].count as f64;
        let y = obs.atoms[1].count as f64;
        a += x;
        b += y;
        ab += x * y;
    }
    let nf = n as f64;
    let cov = ab / nf - (a / nf) * (b / nf);
    let corr = cov / (0.3f64 * 0.7 * 0.6 * 0.4).sqrt();
    assert!(corr.abs() < 4.0 / nf.sqrt(), "correlation {corr}");
    assert!(((a / nf) - 0.3).abs() < 4.0 * (0.21 / nf).sqrt());
    assert!(((b / nf) - 0.6).abs() < 4.0 * (0.24 / nf).sqrt());
}

#[test]
fn stick_breaking_bound_is_never_the_larger() {
    for c in [0.5, 1.0, 2.0, 5.0] {
        let rows = crossover_rows(c, 50).unwrap();
        let ranges = crossover_ranges(&rows);
        println!("c = {c}: {ranges:?}");
        assert!(rows.iter().all(|r| r.lower != Lower::Superposition));
        // Equal at K = 0: both are c/(c+1).
        assert_eq!(rows[0].lower, Lower::Tie);
    }
}
