use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Domain(format!("interval [{lo}, {hi}] must be finite with lo < hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    fn overlap(&self, other: &Interval) -> f64 {
        (self.hi.min(other.hi) - self.lo.max(other.lo)).max(0.0)
    }
}

/// Bounded axis-aligned domain `Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    bounds: Vec<Interval>,
}

impl Default for Domain {
    fn default() -> Self {
        Self::unit_interval()
    }
}

impl Domain {
    pub fn new(bounds: Vec<Interval>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::Domain("domain needs at least one dimension".into()));
        }
        for b in &bounds {
            Interval::new(b.lo, b.hi)?;
        }
        Ok(Self { bounds })
    }

    pub fn unit_interval() -> Self {
        Self { bounds: vec![Interval::unit()] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(Interval::length).product()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(&self.bounds)
                .all(|(x, b)| *x >= b.lo && *x <= b.hi)
    }

    pub fn as_box(&self) -> Cuboid {
        Cuboid { sides: self.bounds.clone() }
    }
}

/// Axis-aligned box. Membership is half-open, `[lo, hi)` per side, except that
/// a side ending on the domain's upper bound is closed there. Adjacent boxes
/// are therefore disjoint and a box equal to the domain covers all of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    sides: Vec<Interval>,
}

impl Cuboid {
    pub fn new(sides: Vec<Interval>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::Domain("box needs at least one side".into()));
        }
        for s in &sides {
            Interval::new(s.lo, s.hi)?;
        }
        Ok(Self { sides })
    }

    /// One-dimensional box `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Interval::new(lo, hi)?])
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().map(Interval::length).product()
    }

    pub fn overlap_volume(&self, other: &Cuboid) -> f64 {
        self.sides
            .iter()
            .zip(&other.sides)
            .map(|(a, b)| a.overlap(b))
            .product()
    }

    pub fn contains(&self, point: &[f64], domain: &Domain) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(&self.sides)
                .zip(domain.bounds())
                .all(|((x, s), d)| *x >= s.lo && (*x < s.hi || (s.hi == d.hi && *x <= s.hi)))
    }

    fn within(&self, domain: &Domain) -> bool {
        self.dim() == domain.dim()
            && self
                .sides
                .iter()
                .zip(domain.bounds())
                .all(|(s, d)| s.lo >= d.lo && s.hi <= d.hi)
    }
}

/// Finite union of pairwise disjoint boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    boxes: Vec<Cuboid>,
}

impl Region {
    pub fn new(boxes: Vec<Cuboid>) -> Result<Self> {
        if let Some(first) = boxes.first() {
            if boxes.iter().any(|b| b.dim() != first.dim()) {
                return Err(Error::Domain("boxes of a region must share a dimension".into()));
            }
        }
        for (i, a) in boxes.iter().enumerate() {
            for b in &boxes[i + 1..] {
                if a.overlap_volume(b) > 0.0 {
                    return Err(Error::Domain("boxes of a region must be disjoint".into()));
                }
            }
        }
        Ok(Self { boxes })
    }

    pub fn single(b: Cuboid) -> Self {
        Self { boxes: vec![b] }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(Self::single(Cuboid::interval(lo, hi)?))
    }

    pub fn whole(domain: &Domain) -> Self {
        Self::single(domain.as_box())
    }

    pub fn boxes(&self) -> &[Cuboid] {
        &self.boxes
    }

    pub fn contains(&self, point: &[f64], domain: &Domain) -> bool {
        self.boxes.iter().any(|b| b.contains(point, domain))
    }

    /// Fails unless every box lies inside `domain`.
    pub fn check_within(&self, domain: &Domain) -> Result<()> {
        match self.boxes.iter().find(|b| !b.within(domain)) {
            Some(b) => Err(Error::Domain(format!("set {:?} is not inside the domain", b.sides()))),
            None => Ok(()),
        }
    }
}

/// Tensor-product partition of a domain: sorted breakpoints per dimension,
/// first and last equal to the domain bounds. Cells follow the same half-open
/// convention as [`Cuboid`]. Flat cell indices are row-major (last dimension fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    breaks: Vec<Vec<f64>>,
}

impl Grid {
    /// The one-cell partition of `domain`.
    pub fn trivial(domain: &Domain) -> Self {
        Self {
            breaks: domain.bounds().iter().map(|b| vec![b.lo, b.hi]).collect(),
        }
    }

    pub fn from_breaks(domain: &Domain, breaks: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.len() != domain.dim() {
            return Err(Error::Domain("partition dimension does not match the domain".into()));
        }
        for (b, dom) in breaks.iter().zip(domain.bounds()) {
            if b.len() < 2 || b[0] != dom.lo || b[b.len() - 1] != dom.hi {
                return Err(Error::Domain("partition breakpoints must start and end on the domain bounds".into()));
            }
            if b.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Domain("partition breakpoints must be strictly increasing".into()));
            }
        }
        Ok(Self { breaks })
    }

    /// `cells[d]` equal-width cells along dimension `d`.
    pub fn equal_cells(domain: &Domain, cells: &[usize]) -> Result<Self> {
        if cells.len() != domain.dim() || cells.contains(&0) {
            return Err(Error::Domain("need a positive cell count per dimension".into()));
        }
        let breaks = domain
            .bounds()
            .iter()
            .zip(cells)
            .map(|(b, &n)| {
                (0..=n)
                    .map(|i| if i == n { b.hi } else { b.lo + b.length() * i as f64 / n as f64 })
                    .collect()
            })
            .collect();
        Self::from_breaks(domain, breaks)
    }

    pub fn breaks(&self) -> &[Vec<f64>] {
        &self.breaks
    }

    pub fn dim(&self) -> usize {
        self.breaks.len()
    }

    pub fn cell_count(&self) -> usize {
        self.breaks.iter().map(|b| b.len() - 1).product()
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for d in (0..self.dim()).rev() {
            let n = self.breaks[d].len() - 1;
            idx[d] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn cell(&self, flat: usize) -> Cuboid {
        let sides = self
            .multi_index(flat)
            .into_iter()
            .zip(&self.breaks)
            .map(|(i, b)| Interval { lo: b[i], hi: b[i + 1] })
            .collect();
        Cuboid { sides }
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        self.cell(flat).sides.iter().map(|s| 0.5 * (s.lo + s.hi)).collect()
    }

    /// Cell holding `point`; points past a bound are clamped into the edge cell.
    pub fn locate(&self, point: &[f64]) -> usize {
        let mut flat = 0;
        for (x, b) in point.iter().zip(&self.breaks) {
            let n = b.len() - 1;
            let i = b.partition_point(|v| v <= x).saturating_sub(1).min(n - 1);
            flat = flat * n + i;
        }
        flat
    }

    /// Common refinement: union of the breakpoints in every dimension.
    pub fn refine(&self, other: &Grid) -> Grid {
        let breaks = self
            .breaks
            .iter()
            .zip(&other.breaks)
            .map(|(a, b)| {
                let mut merged: Vec<f64> = a.iter().chain(b).copied().collect();
                merged.sort_by(f64::total_cmp);
                merged.dedup();
                merged
            })
            .collect();
        Grid { breaks }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_reject_empty_and_infinite() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Domain::new(vec![]).is_err());
    }

    #[test]
    fn adjacent_boxes_are_disjoint_and_cover_the_upper_bound() {
        let dom = Domain::unit_interval();
        let left = Cuboid::interval(0.0, 0.5).unwrap();
        let right = Cuboid::interval(0.5, 1.0).unwrap();
        assert!(!left.contains(&[0.5], &dom));
        assert!(right.contains(&[0.5], &dom));
        assert!(right.contains(&[1.0], &dom));
        assert!(Region::new(vec![left, right]).is_ok());
        let overlapping = vec![Cuboid::interval(0.0, 0.6).unwrap(), Cuboid::interval(0.5, 1.0).unwrap()];
        assert!(Region::new(overlapping).is_err());
    }

    #[test]
    fn grid_locate_and_refine() {
        let dom = Domain::unit_interval();
        let g = Grid::from_breaks(&dom, vec![vec![0.0, 0.5, 1.0]]).unwrap();
        assert_eq!(g.locate(&[0.25]), 0);
        assert_eq!(g.locate(&[0.5]), 1);
        assert_eq!(g.locate(&[1.0]), 1);
        let h = Grid::equal_cells(&dom, &[4]).unwrap();
        let r = g.refine(&h);
        assert_eq!(r.breaks()[0], vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(Grid::from_breaks(&dom, vec![vec![0.0, 0.7, 0.7, 1.0]]).is_err());
        assert!(Grid::from_breaks(&dom, vec![vec![0.1, 1.0]]).is_err());
    }

    #[test]
    fn two_dimensional_cells_are_row_major() {
        let dom = Domain::new(vec![Interval::unit(), Interval::new(0.0, 2.0).unwrap()]).unwrap();
        let g = Grid::equal_cells(&dom, &[2, 2]).unwrap();
        assert_eq!(g.cell_count(), 4);
        assert_eq!(g.locate(&[0.25, 1.5]), 1);
        assert_eq!(g.locate(&[0.75, 0.5]), 2);
        assert_eq!(g.cell(3).volume(), 0.5);
    }
}
