use levyd::beta::{self, BetaProcessParams, StableBetaParams};
use levyd::gamma::{self, GammaProcessParams};
use levyd::measures::{BaseMeasure, Domain, DomainFunction, PointMeasure, RandomStream};
use levyd::truncation::{beta_l1_error, gamma_h_remainder, gamma_l1_error, SubroundLimit};
use serde::Serialize;

use crate::args::{Family, ProcessArgs, SimulateArgs};
use crate::error::CliError;
use crate::pool;
use crate::records::{open_output, AtomWriter, Labels};

const DEFAULT_ROUNDS: u32 = 10;
/// `H = inf` is simulated with the smallest `H` whose omitted share of the mass is below this.
const H_CAP_TOLERANCE: f64 = 1e-15;
const H_CAP_MAX: u32 = 200;

pub fn beta_params(p: &ProcessArgs) -> Result<BetaProcessParams, CliError> {
    let domain = Domain::unit_interval();
    let c = DomainFunction::equal_cells(&domain, p.c.clone())?;
    Ok(BetaProcessParams::new(c, BaseMeasure::uniform(domain, p.mass)?)?)
}

pub fn gamma_params(p: &ProcessArgs) -> Result<GammaProcessParams, CliError> {
    let domain = Domain::unit_interval();
    let theta = DomainFunction::equal_cells(&domain, p.theta.clone())?;
    Ok(GammaProcessParams::new(BaseMeasure::uniform(domain, p.mass)?, theta)?)
}

enum Process {
    Beta(BetaProcessParams),
    StableBeta(StableBetaParams),
    Gamma(GammaProcessParams),
    SymmetricGamma(GammaProcessParams),
}

impl Process {
    fn draw(&self, last_k: u32, last_h: u32, stream: &RandomStream) -> levyd::Result<PointMeasure> {
        match self {
            Process::Beta(p) => beta::simulate_beta_process(p, last_k, stream),
            Process::StableBeta(p) => beta::simulate_stable_beta_process(p, last_k, stream),
            Process::Gamma(p) => gamma::simulate_gamma_process(p, last_k, last_h, stream),
            Process::SymmetricGamma(p) => gamma::simulate_symmetric_gamma(p, last_k, last_h, stream),
        }
    }
}

fn last_round(family: Family, rounds: Option<u32>, last_k: Option<u32>) -> Result<u32, CliError> {
    match (last_k, rounds) {
        (Some(0), _) if family.is_gamma() => Err(CliError::Usage("gamma levels start at K = 1".into())),
        (Some(k), _) => Ok(k),
        (None, rounds) => {
            let n = rounds.unwrap_or(DEFAULT_ROUNDS);
            if n == 0 {
                return Err(CliError::Usage("--rounds must be at least 1".into()));
            }
            Ok(if family.is_gamma() { n } else { n - 1 })
        }
    }
}

pub fn subround_cap(last_k: u32) -> u32 {
    (1..=H_CAP_MAX).find(|&h| gamma_h_remainder(last_k, h) <= H_CAP_TOLERANCE).unwrap_or(H_CAP_MAX)
}

#[derive(Serialize)]
struct Header<'a> {
    record: &'static str,
    command: &'static str,
    family: &'static str,
    c: Option<&'a [f64]>,
    theta: Option<&'a [f64]>,
    sigma: Option<f64>,
    mass: f64,
    #[serde(rename = "K")]
    last_k: u32,
    #[serde(rename = "H")]
    last_h: Option<String>,
    /// Sub-rounds actually simulated when `H` is `inf`.
    h_cap: Option<u32>,
    replicas: u64,
    seed: u64,
    version: &'static str,
    truncation_l1: Option<f64>,
    format: &'static str,
}

pub fn run(args: SimulateArgs) -> Result<(), CliError> {
    let family = args.family;
    let last_k = last_round(family, args.rounds, args.last_k)?;
    if !family.is_gamma() && args.last_h.is_some() {
        return Err(CliError::Usage("--H applies to the gamma families only".into()));
    }
    if family != Family::StableBeta && args.process.sigma.is_some() {
        return Err(CliError::Usage("--sigma applies to stable-beta only".into()));
    }
    let limit = args.last_h.unwrap_or(SubroundLimit::Infinite);
    let (simulated_h, h_cap) = match limit {
        SubroundLimit::Finite(h) => (h, None),
        SubroundLimit::Infinite => {
            let cap = subround_cap(last_k);
            (cap, Some(cap))
        }
    };

    let (process, truncation_l1) = match family {
        Family::Beta => {
            let p = beta_params(&args.process)?;
            let l1 = beta_l1_error(&p, last_k)?;
            (Process::Beta(p), Some(l1))
        }
        Family::StableBeta => {
            let sigma = args.process.sigma.ok_or_else(|| CliError::Usage("stable-beta needs --sigma".into()))?;
            (Process::StableBeta(StableBetaParams::new(beta_params(&args.process)?, sigma)?), None)
        }
        Family::Gamma => (Process::Gamma(gamma_params(&args.process)?), Some(gamma_l1_error(last_k, limit)?)),
        Family::SymmetricGamma => {
            (Process::SymmetricGamma(gamma_params(&args.process)?), Some(gamma_l1_error(last_k, limit)?))
        }
    };

    let seed = pool::resolve_seed(args.run.seed);
    let gamma_family = family.is_gamma();
    let header = Header {
        record: "header",
        command: "simulate",
        family: family.name(),
        c: (!gamma_family).then_some(args.process.c.as_slice()),
        theta: gamma_family.then_some(args.process.theta.as_slice()),
        sigma: args.process.sigma,
        mass: args.process.mass,
        last_k,
        last_h: gamma_family.then(|| limit.to_string()),
        h_cap: if gamma_family { h_cap } else { None },
        replicas: args.run.replicas,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        truncation_l1,
        format: match args.out.format {
            crate::args::Format::Jsonl => "jsonl",
            crate::args::Format::Csv => "csv",
        },
    };

    let workers = pool::build(args.run.threads)?;
    let out = open_output(args.out.output.as_deref())?;
    let mut writer = AtomWriter::new(out, args.out.format, 1, &header)?;
    let root = RandomStream::new(seed);
    pool::ordered(
        &workers,
        args.run.replicas,
        |r| Ok(process.draw(last_k, simulated_h, &root.child(r))?),
        |r, draw| {
            for atom in &draw.atoms {
                writer.atom(r, Labels::of(atom, gamma_family), atom)?;
            }
            Ok(())
        },
    )?;
    writer.finish()?;
    Ok(())
}
