//! Deterministic kinematic extrapolators.

use super::PredictError;
use crate::trajcore::{Point2, Trajectory, DEGENERATE_SEGMENT};

/// Repeats the last observed step. A single-point history predicts a
/// stationary agent.
pub fn constant_velocity_predict(history: &Trajectory, horizon: usize) -> Vec<Point2> {
    let pts = history.points();
    let last = pts[pts.len() - 1];
    let step = match pts.as_slice() {
        [.., prev, last] => *last - *prev,
        _ => Point2::ZERO,
    };
    let mut out = Vec::with_capacity(horizon);
    let mut p = last;
    for _ in 0..horizon {
        p += step;
        out.push(p);
    }
    out
}

/// Rolls the circular arc through the last three points forward at constant
/// speed: every predicted step is the previous one rotated by the observed
/// turn angle.
pub fn constant_turn_predict(
    history: &Trajectory,
    horizon: usize,
) -> Result<Vec<Point2>, PredictError> {
    let pts = history.points();
    let [.., p0, p1, p2] = pts.as_slice() else {
        return Err(PredictError::InsufficientHistory {
            needed: 3,
            found: pts.len(),
        });
    };
    let (s1, s2) = (*p1 - *p0, *p2 - *p1);
    let turn = if s1.norm() < DEGENERATE_SEGMENT || s2.norm() < DEGENERATE_SEGMENT {
        0.0
    } else {
        let cross = s1.x * s2.y - s1.y * s2.x;
        cross.atan2(s1.dot(s2))
    };
    let mut step = s2;
    let mut p = *p2;
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        step = step.rotate(turn);
        p += step;
        out.push(p);
    }
    Ok(out)
}

/// Polynomial least-squares fit of each coordinate against the step index,
/// evaluated past the end of the history.
pub fn least_squares_predict(
    history: &Trajectory,
    horizon: usize,
    degree: u8,
) -> Result<Vec<Point2>, PredictError> {
    if !(1..=2).contains(&degree) {
        return Err(PredictError::InvalidDegree(degree));
    }
    let pts = history.points();
    let terms = degree as usize + 1;
    if pts.len() < terms {
        return Err(PredictError::InsufficientHistory {
            needed: terms,
            found: pts.len(),
        });
    }
    // time axis centred on the last observation keeps the normal equations tame
    let n = pts.len();
    let tau: Vec<f64> = (0..n).map(|i| i as f64 - (n - 1) as f64).collect();
    let cx = fit_poly(&tau, pts.iter().map(|p| p.x), terms);
    let cy = fit_poly(&tau, pts.iter().map(|p| p.y), terms);
    Ok((1..=horizon)
        .map(|k| {
            let t = k as f64;
            Point2::new(eval_poly(&cx, t), eval_poly(&cy, t))
        })
        .collect())
}

fn fit_poly(tau: &[f64], values: impl Iterator<Item = f64>, terms: usize) -> Vec<f64> {
    let mut a = vec![vec![0.0; terms + 1]; terms];
    for (&t, v) in tau.iter().zip(values) {
        let powers: Vec<f64> = (0..terms).map(|p| t.powi(p as i32)).collect();
        for r in 0..terms {
            for c in 0..terms {
                a[r][c] += powers[r] * powers[c];
            }
            a[r][terms] += powers[r] * v;
        }
    }
    solve_augmented(a)
}

/// Gaussian elimination with partial pivoting on an augmented `n x (n+1)` system.
fn solve_augmented(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..=n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][n] - s) / a[row][row];
    }
    x
}

fn eval_poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}
