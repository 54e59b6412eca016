//! Decision oracles over analytic regions of the flattened trajectory space.
//!
//! These have closed-form nearest adversarial points, which makes them the
//! yardstick for convergence checks of the boundary walk.

use crate::criteria::{CriteriaError, DecisionOracle};
use crate::trajcore::{Point2, Trajectory};

/// An adversarial region in flattened coordinates `[x0, y0, x1, y1, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// `{ v : normal . v >= offset }`
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// `{ v : |v - center| <= radius }`
    Ball { center: Vec<f64>, radius: f64 },
    /// The empty region.
    Empty,
}

impl Region {
    /// `{ v : v[0] >= offset }` in `dim` dimensions.
    pub fn half_plane(dim: usize, offset: f64) -> Self {
        let mut normal = vec![0.0; dim];
        normal[0] = 1.0;
        Region::HalfSpace { normal, offset }
    }

    /// Ball of `radius` centred `center_distance` along the first axis.
    pub fn ball(dim: usize, center_distance: f64, radius: f64) -> Self {
        let mut center = vec![0.0; dim];
        center[0] = center_distance;
        Region::Ball { center, radius }
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        match self {
            Region::HalfSpace { normal, offset } => {
                normal.iter().zip(v).map(|(n, x)| n * x).sum::<f64>() >= *offset
            }
            Region::Ball { center, radius } => {
                center
                    .iter()
                    .zip(v)
                    .map(|(c, x)| (x - c) * (x - c))
                    .sum::<f64>()
                    .sqrt()
                    <= *radius
            }
            Region::Empty => false,
        }
    }

    /// Euclidean distance from `origin` to the closest point of the region.
    pub fn flat_distance_from(&self, origin: &[f64]) -> f64 {
        match self {
            Region::HalfSpace { normal, offset } => {
                let n = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
                let proj: f64 = normal.iter().zip(origin).map(|(a, b)| a * b).sum();
                ((offset - proj) / n).max(0.0)
            }
            Region::Ball { center, radius } => {
                let d = center
                    .iter()
                    .zip(origin)
                    .map(|(c, x)| (x - c) * (x - c))
                    .sum::<f64>()
                    .sqrt();
                (d - radius).max(0.0)
            }
            Region::Empty => f64::INFINITY,
        }
    }
}

/// Budgeted oracle answering membership of a [`Region`].
#[derive(Debug, Clone)]
pub struct RegionOracle {
    region: Region,
    original: Trajectory,
    budget: usize,
    used: usize,
}

impl RegionOracle {
    /// The original is the all-zero trajectory of `dim / 2` points at 2 Hz.
    pub fn new(region: Region, dim: usize, budget: usize) -> Self {
        assert!(dim >= 2 && dim % 2 == 0, "flattened dimension must be even");
        let original = Trajectory::from_points(&vec![Point2::ZERO; dim / 2], 0.5)
            .expect("zero trajectory is valid");
        Self {
            region,
            original,
            budget,
            used: 0,
        }
    }

    pub fn original(&self) -> &Trajectory {
        &self.original
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Minimal RMS distance from the original to the region.
    pub fn optimum_distance(&self) -> f64 {
        let flat = self.region.flat_distance_from(&self.original.flatten());
        flat / (self.original.len() as f64).sqrt()
    }
}

impl DecisionOracle for RegionOracle {
    fn query(&mut self, candidate: &Trajectory) -> Result<bool, CriteriaError> {
        if self.used >= self.budget {
            return Err(CriteriaError::BudgetExhausted {
                budget: self.budget,
            });
        }
        self.used += 1;
        Ok(self.region.contains(&candidate.flatten()))
    }
    fn queries_used(&self) -> usize {
        self.used
    }
    fn budget(&self) -> usize {
        self.budget
    }
}

/// Oracle backed by an arbitrary predicate on the candidate.
pub struct FnOracle<F> {
    predicate: F,
    budget: usize,
    used: usize,
}

impl<F: FnMut(&Trajectory) -> bool> FnOracle<F> {
    pub fn new(budget: usize, predicate: F) -> Self {
        Self {
            predicate,
            budget,
            used: 0,
        }
    }
}

impl<F: FnMut(&Trajectory) -> bool> DecisionOracle for FnOracle<F> {
    fn query(&mut self, candidate: &Trajectory) -> Result<bool, CriteriaError> {
        if self.used >= self.budget {
            return Err(CriteriaError::BudgetExhausted {
                budget: self.budget,
            });
        }
        self.used += 1;
        Ok((self.predicate)(candidate))
    }
    fn queries_used(&self) -> usize {
        self.used
    }
    fn budget(&self) -> usize {
        self.budget
    }
}
