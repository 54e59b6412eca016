//! Step geometry of the boundary walk.
//!
//! Trajectories are handled as flattened position vectors. Distances use the
//! RMS metric of [`trajectory_distance`](crate::trajcore::trajectory_distance),
//! which is the Euclidean norm scaled by `1/sqrt(len)`, so directions and
//! orthogonality are the plain Euclidean ones.

use rand::Rng;
use rand_distr::StandardNormal;

use super::AttackError;
use crate::trajcore::Trajectory;

/// Below this RMS distance two trajectories are treated as identical.
pub const MIN_SEPARATION: f64 = 1e-12;

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// RMS norm of a flattened displacement.
pub(crate) fn rms(v: &[f64]) -> f64 {
    l2(v) / ((v.len() / 2) as f64).sqrt()
}

/// Raw orthogonal perturbation: a Gaussian draw with its component along
/// `diff` removed, scaled to `delta * |diff|`.
pub fn orthogonal_perturbation<R: Rng + ?Sized>(diff: &[f64], delta: f64, rng: &mut R) -> Vec<f64> {
    let norm_sq = dot(diff, diff);
    let target = delta * norm_sq.sqrt();
    loop {
        let mut g: Vec<f64> = (0..diff.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let along = dot(&g, diff) / norm_sq;
        for (gi, di) in g.iter_mut().zip(diff) {
            *gi -= along * di;
        }
        let len = l2(&g);
        // redraw if the sample was (numerically) parallel to diff
        if len > 1e-150 {
            let k = target / len;
            return g.into_iter().map(|x| x * k).collect();
        }
    }
}

/// Distance-preserving random step: perturb orthogonally to
/// `original - current`, then project back onto the sphere around
/// `original` through `current`.
pub fn orthogonal_step<R: Rng + ?Sized>(
    original: &Trajectory,
    current: &Trajectory,
    delta: f64,
    rng: &mut R,
) -> Result<Trajectory, AttackError> {
    let o = original.flatten();
    let c = current.flatten();
    let diff = sub(&o, &c);
    if rms(&diff) < MIN_SEPARATION {
        return Err(AttackError::NoDirection);
    }
    let radius = l2(&diff);
    let step = orthogonal_perturbation(&diff, delta, rng);
    let cand: Vec<f64> = c.iter().zip(&step).map(|(x, s)| x + s).collect();
    let offset = sub(&cand, &o);
    let k = radius / l2(&offset);
    let projected: Vec<f64> = o.iter().zip(&offset).map(|(x, v)| x + v * k).collect();
    Ok(current.with_flat_positions(&projected)?)
}

/// Moves `point` straight toward `original` by `epsilon` meters of RMS
/// distance, never past it.
pub fn forward_step(
    original: &Trajectory,
    point: &Trajectory,
    epsilon: f64,
) -> Result<Trajectory, AttackError> {
    let o = original.flatten();
    let p = point.flatten();
    let diff = sub(&o, &p);
    let dist = rms(&diff);
    if dist < MIN_SEPARATION {
        return Err(AttackError::NoDirection);
    }
    if epsilon >= dist {
        return Ok(point.with_flat_positions(&o)?);
    }
    let k = epsilon / dist;
    let moved: Vec<f64> = p.iter().zip(&diff).map(|(x, d)| x + d * k).collect();
    Ok(point.with_flat_positions(&moved)?)
}
