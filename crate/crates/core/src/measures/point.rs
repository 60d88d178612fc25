use serde::{Deserialize, Serialize};

use super::domain::{Domain, Region};

/// Where an atom of a realized measure came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Prior,
    PosteriorObserved,
    PosteriorNew,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::Prior => "prior",
            Origin::PosteriorObserved => "posterior-observed",
            Origin::PosteriorNew => "posterior-new",
        }
    }
}

/// One `(location, jump)` pair of a realized process, tagged with the round
/// `k` (and sub-round `h`, 0 when the family has none) that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedAtom {
    pub location: Vec<f64>,
    pub jump: f64,
    pub round_k: u32,
    pub subround_h: u32,
    pub origin: Origin,
}

/// A realized draw `Σ jump_i δ_{location_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    pub domain: Domain,
    pub atoms: Vec<WeightedAtom>,
}

impl PointMeasure {
    pub fn empty(domain: Domain) -> Self {
        Self { domain, atoms: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Signed total `Σ jump_i`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.jump).sum()
    }

    /// `Σ |jump_i|`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.jump.abs()).sum()
    }

    /// Signed mass the draw puts on `set`.
    pub fn mass_in(&self, set: &Region) -> f64 {
        self.atoms
            .iter()
            .filter(|a| set.contains(&a.location, &self.domain))
            .map(|a| a.jump)
            .sum()
    }

    pub fn append(&mut self, mut other: PointMeasure) {
        self.atoms.append(&mut other.atoms);
    }
}
