//! Domains, finite measures, realized point measures, and the random-stream
//! contract shared by every process family.
//!
//! Measures are piecewise-constant over tensor-product partitions, so set
//! masses and weighted integrals are computed exactly rather than by
//! quadrature.

mod base;
mod domain;
mod function;
mod point;
mod stream;

pub use base::{BaseMeasure, LocationDraw, LocationSampler, PointMass};
pub use domain::{Cuboid, Domain, Grid, Interval, Region};
pub use function::DomainFunction;
pub use point::{Origin, PointMeasure, WeightedAtom};
pub use stream::{RandomStream, StreamRng};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

/// Draws a Poisson count with mean `rate`. A zero rate returns 0 without consuming randomness.
pub fn poisson_count<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<u64> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::Parameter(format!("Poisson rate must be finite and nonnegative, got {rate}")));
    }
    if rate == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(rate).map_err(|e| Error::Parameter(format!("Poisson rate {rate}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}
