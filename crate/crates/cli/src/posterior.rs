use std::io::Write;

use levyd::measures::{Origin, RandomStream};
use levyd::posterior::{sample_bernoulli_data, simulate_posterior, summarize_observed, ObservedAtomSummary, PosteriorBetaParams, PosteriorJumpSampler};
use serde::Serialize;

use crate::args::{ObserveArgs, PosteriorArgs};
use crate::error::CliError;
use crate::input::{read_observations, read_prior_draw};
use crate::pool;
use crate::records::{open_output, real, AtomWriter, Labels};
use crate::simulate::beta_params;

/// Stream id under the root seed for Bernoulli-process data.
const OBSERVE_STREAM: u64 = 7;

#[derive(Serialize)]
struct ObservationsHeader<'a> {
    record: &'static str,
    #[serde(rename = "M")]
    draws: u64,
    seed: u64,
    prior_draw: &'a str,
    replica: u64,
    version: &'static str,
}

pub fn observe(args: ObserveArgs) -> Result<(), CliError> {
    let prior = read_prior_draw(&args.prior_draw, args.replica)?;
    let seed = pool::resolve_seed(args.seed);
    let mut rng = RandomStream::new(seed).child(OBSERVE_STREAM).rng();
    let obs = sample_bernoulli_data(&prior, args.draws, &mut rng)?;
    let mut out = open_output(args.output.as_deref())?;
    let header = ObservationsHeader {
        record: "observations",
        draws: obs.draws,
        seed,
        prior_draw: &args.prior_draw.to_string_lossy(),
        replica: args.replica,
        version: env!("CARGO_PKG_VERSION"),
    };
    writeln!(out, "{}", serde_json::to_string(&header).map_err(std::io::Error::other)?)?;
    for atom in &obs.atoms {
        let locs: Vec<String> = atom.location.iter().map(|&x| real(x)).collect();
        writeln!(out, "{{\"location\":[{}],\"count\":{}}}", locs.join(","), atom.count)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PosteriorHeader<'a> {
    record: &'static str,
    command: &'static str,
    family: &'static str,
    c: f64,
    mass: f64,
    #[serde(rename = "M")]
    draws: u64,
    c_post: f64,
    #[serde(rename = "K")]
    last_k: u32,
    observations: &'a str,
    replicas: u64,
    seed: u64,
    version: &'static str,
    truncation_l1: Option<f64>,
}

#[derive(Serialize)]
struct AtomSummary<'a> {
    record: &'static str,
    location: &'a [f64],
    prior_jump: Option<f64>,
    #[serde(flatten)]
    stats: ObservedAtomSummary,
}

#[derive(Serialize)]
struct RunSummary {
    record: &'static str,
    prior_equivalent: bool,
    observed_atoms: usize,
    new_atoms_expected: f64,
    new_atoms_mean: f64,
}

pub fn posterior(args: PosteriorArgs) -> Result<(), CliError> {
    let obs = read_observations(&args.observations)?;
    let prior = beta_params(&args.process)?;
    let pp = PosteriorBetaParams::new(&prior, &obs)?;
    let c = pp.prior_c();
    let last_k = args.last_k;
    let prior_jumps = match &args.prior_draw {
        Some(path) => Some(read_prior_draw(path, args.replica)?),
        None => None,
    };

    let seed = pool::resolve_seed(args.run.seed);
    let header = PosteriorHeader {
        record: "header",
        command: "posterior",
        family: "beta",
        c,
        mass: args.process.mass,
        draws: obs.draws,
        c_post: pp.concentration(),
        last_k,
        observations: &args.observations.to_string_lossy(),
        replicas: args.run.replicas,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        truncation_l1: levyd::truncation::beta_l1_error(&pp.to_beta_params()?, last_k).ok(),
    };

    let observed: Vec<usize> = (0..obs.atoms.len()).filter(|&i| obs.atoms[i].count > 0).collect();
    let mut jumps: Vec<Vec<f64>> = vec![Vec::with_capacity(args.run.replicas as usize); observed.len()];
    let mut new_atoms = 0usize;

    let workers = pool::build(args.run.threads)?;
    let out = open_output(args.out.output.as_deref())?;
    let mut writer = AtomWriter::new(out, args.out.format, pp.domain().dim(), &header)?;
    let root = RandomStream::new(seed);
    pool::ordered(
        &workers,
        args.run.replicas,
        |r| Ok(simulate_posterior(&pp, &obs, last_k, &root.child(r))?),
        |r, draw| {
            let mut slot = 0;
            for atom in &draw.atoms {
                if atom.origin == Origin::PosteriorObserved {
                    jumps[slot].push(atom.jump);
                    slot += 1;
                } else {
                    new_atoms += 1;
                }
                writer.atom(r, Labels::of(atom, false), atom)?;
            }
            Ok(())
        },
    )?;

    if args.run.replicas >= 2 {
        for (slot, &i) in observed.iter().enumerate() {
            let atom = &obs.atoms[i];
            let prior_jump = prior_jumps
                .as_ref()
                .and_then(|d| d.atoms.iter().find(|a| a.location == atom.location).map(|a| a.jump));
            let stats = summarize_observed(c, obs.draws, atom.count, last_k, &jumps[slot])?;
            writer.extra(&AtomSummary { record: "summary", location: &atom.location, prior_jump, stats })?;
        }
    }
    let weights = PosteriorJumpSampler::new(c, obs.draws, last_k)?.weight_sum();
    let continuous_mass = prior.mu().total_mass();
    writer.extra(&RunSummary {
        record: "summary",
        prior_equivalent: obs.draws == 0,
        observed_atoms: observed.len(),
        new_atoms_expected: c * continuous_mass * weights,
        new_atoms_mean: if args.run.replicas == 0 { 0.0 } else { new_atoms as f64 / args.run.replicas as f64 },
    })?;
    writer.finish()?;
    Ok(())
}
