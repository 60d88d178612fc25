use rand::Rng;
use serde::{Deserialize, Serialize};

use super::domain::{Domain, Grid, Region};
use super::function::DomainFunction;
use crate::error::{Error, Result};

/// Positive mass sitting on a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub location: Vec<f64>,
    pub mass: f64,
}

/// Finite measure on a bounded domain: a piecewise-constant density (stored as
/// per-cell masses on a [`Grid`]) plus finitely many fixed atoms.
///
/// This covers the base measure `μ` of the beta process, the shape measure `α`
/// of the gamma process, and the mixed posterior base measure that carries an
/// atom at every observed location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseMeasure {
    domain: Domain,
    grid: Grid,
    cell_masses: Vec<f64>,
    atoms: Vec<PointMass>,
}

fn check_mass(m: f64, what: &str) -> Result<()> {
    if m.is_finite() && m >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMeasure(format!("{what} must be finite and nonnegative, got {m}")))
    }
}

impl BaseMeasure {
    pub fn zero(domain: Domain) -> Self {
        let grid = Grid::trivial(&domain);
        Self { domain, grid, cell_masses: vec![0.0], atoms: Vec::new() }
    }

    /// Uniform density with total mass `mass`.
    pub fn uniform(domain: Domain, mass: f64) -> Result<Self> {
        check_mass(mass, "mass")?;
        let grid = Grid::trivial(&domain);
        Ok(Self { domain, grid, cell_masses: vec![mass], atoms: Vec::new() })
    }

    /// Piecewise-constant density: `densities[i]` is the density (mass per unit volume) on cell `i`.
    pub fn piecewise_density(domain: Domain, grid: Grid, densities: Vec<f64>) -> Result<Self> {
        if densities.len() != grid.cell_count() {
            return Err(Error::InvalidMeasure(format!(
                "{} densities for a partition with {} cells",
                densities.len(),
                grid.cell_count()
            )));
        }
        DomainFunction::Piecewise { grid: grid.clone(), values: vec![1.0; grid.cell_count()] }.check_domain(&domain)?;
        let mut cell_masses = Vec::with_capacity(densities.len());
        for (i, d) in densities.iter().enumerate() {
            check_mass(*d, "density")?;
            cell_masses.push(d * grid.cell(i).volume());
        }
        Ok(Self { domain, grid, cell_masses, atoms: Vec::new() })
    }

    /// Adds a fixed atom. Locations must be inside the domain and distinct.
    pub fn with_atom(mut self, location: Vec<f64>, mass: f64) -> Result<Self> {
        if !self.domain.contains(&location) {
            return Err(Error::Domain(format!("atom {location:?} lies outside the domain")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidMeasure(format!("atom mass must be finite and positive, got {mass}")));
        }
        if self.atoms.iter().any(|a| a.location == location) {
            return Err(Error::InvalidMeasure(format!("duplicate atom at {location:?}")));
        }
        self.atoms.push(PointMass { location, mass });
        Ok(self)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn atoms(&self) -> &[PointMass] {
        &self.atoms
    }

    pub fn continuous_mass(&self) -> f64 {
        self.cell_masses.iter().sum()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `γ`: continuous plus atomic mass.
    pub fn total_mass(&self) -> f64 {
        self.continuous_mass() + self.atom_mass()
    }

    /// Whether the continuous part is a single uniform density (atoms aside).
    pub fn is_uniform(&self) -> bool {
        self.grid.cell_count() == 1
    }

    /// `m(A)`, exact: each cell contributes its mass times the fraction of its volume inside `A`.
    pub fn measure_of_set(&self, set: &Region) -> Result<f64> {
        self.weighted_integral(&DomainFunction::Constant(1.0), set)
    }

    /// `∫_A f dm`, exact for piecewise-constant `f`: evaluated cell by cell on the
    /// common refinement of the density's and `f`'s partitions. Atoms add `f(x)·mass`.
    pub fn weighted_integral(&self, f: &DomainFunction, set: &Region) -> Result<f64> {
        set.check_within(&self.domain)?;
        f.check_domain(&self.domain)?;
        let refined = match f.grid() {
            Some(g) => self.grid.refine(g),
            None => self.grid.clone(),
        };
        let mut total = 0.0;
        for cell in 0..refined.cell_count() {
            let cell_box = refined.cell(cell);
            let center = refined.cell_center(cell);
            let parent = self.grid.locate(&center);
            let mass = self.cell_masses[parent];
            if mass == 0.0 {
                continue;
            }
            let density = mass / self.grid.cell(parent).volume();
            let inside: f64 = set.boxes().iter().map(|b| cell_box.overlap_volume(b)).sum();
            if inside > 0.0 {
                total += density * inside * f.eval(&center);
            }
        }
        for atom in &self.atoms {
            if set.contains(&atom.location, &self.domain) {
                total += f.eval(&atom.location) * atom.mass;
            }
        }
        Ok(total)
    }

    /// The measure `g(f(ω))·m(dω)`, kept exact by moving to the refinement of the partitions.
    pub fn reweighted(&self, f: &DomainFunction, g: impl Fn(f64) -> f64) -> Result<Self> {
        f.check_domain(&self.domain)?;
        let grid = match f.grid() {
            Some(fg) => self.grid.refine(fg),
            None => self.grid.clone(),
        };
        let cell_masses = (0..grid.cell_count())
            .map(|cell| {
                let center = grid.cell_center(cell);
                let parent = self.grid.locate(&center);
                let share = grid.cell(cell).volume() / self.grid.cell(parent).volume();
                self.cell_masses[parent] * share * g(f.eval(&center))
            })
            .collect();
        let atoms = self
            .atoms
            .iter()
            .map(|a| PointMass { location: a.location.clone(), mass: a.mass * g(f.eval(&a.location)) })
            .collect();
        Ok(Self { domain: self.domain.clone(), grid, cell_masses, atoms })
    }

    /// The measure `factor·m`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            domain: self.domain.clone(),
            grid: self.grid.clone(),
            cell_masses: self.cell_masses.iter().map(|m| m * factor).collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| PointMass { location: a.location.clone(), mass: a.mass * factor })
                .collect(),
        }
    }

    /// Sampler for the normalized measure `m / m(Ω)`.
    pub fn sampler(&self) -> Result<LocationSampler<'_>> {
        LocationSampler::new(self)
    }

    /// `n` i.i.d. locations from `m / m(Ω)`.
    pub fn sample_locations<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let sampler = self.sampler()?;
        Ok((0..n).map(|_| sampler.sample(rng).point).collect())
    }
}

/// A location drawn from a [`BaseMeasure`]; `atom` is set when a fixed atom was chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationDraw {
    pub point: Vec<f64>,
    pub atom: Option<usize>,
}

/// Inverse-CDF sampler over the cells and atoms of a [`BaseMeasure`].
#[derive(Debug, Clone)]
pub struct LocationSampler<'a> {
    measure: &'a BaseMeasure,
    cumulative: Vec<f64>,
}

impl<'a> LocationSampler<'a> {
    fn new(measure: &'a BaseMeasure) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = measure
            .cell_masses
            .iter()
            .copied()
            .chain(measure.atoms.iter().map(|a| a.mass))
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(Error::InvalidMeasure("cannot sample from a measure with zero mass".into()));
        }
        Ok(Self { measure, cumulative })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LocationDraw {
        let total = *self.cumulative.last().expect("nonempty");
        let target = rng.random::<f64>() * total;
        // First slot whose cumulative mass exceeds the target; zero-mass slots are never chosen.
        let slot = self.cumulative.partition_point(|c| *c <= target).min(self.cumulative.len() - 1);
        let cells = self.measure.cell_masses.len();
        if slot < cells {
            let cell = self.measure.grid.cell(slot);
            let point = cell
                .sides()
                .iter()
                .map(|s| s.lo + rng.random::<f64>() * s.length())
                .collect();
            LocationDraw { point, atom: None }
        } else {
            let idx = slot - cells;
            LocationDraw { point: self.measure.atoms[idx].location.clone(), atom: Some(idx) }
        }
    }
}
