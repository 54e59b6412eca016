use serde::{Deserialize, Serialize};

use crate::trajcore::{Trajectory, DEGENERATE_SEGMENT};

/// Finite-difference limits a physically plausible track must respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KinematicBounds {
    /// m/s
    pub v_max: f64,
    /// m/s², applied to the change of scalar speed
    pub a_max: f64,
    /// rad/s
    pub yaw_rate_max: f64,
    /// m/s; slower segments count as stationary and skip the heading check
    pub stationary_speed: f64,
}

impl Default for KinematicBounds {
    fn default() -> Self {
        Self {
            v_max: 20.0,
            a_max: 5.0,
            yaw_rate_max: 1.0,
            stationary_speed: 1.0,
        }
    }
}

impl KinematicBounds {
    pub fn validate(&self) -> Result<(), String> {
        if [self.v_max, self.a_max, self.yaw_rate_max]
            .iter()
            .all(|v| *v > 0.0)
            && self.stationary_speed >= 0.0
        {
            Ok(())
        } else {
            Err("kinematic bounds must be positive".into())
        }
    }
}

/// All limits hold (non-strict). Heading changes are only checked between
/// two moving segments.
pub fn check_feasibility(traj: &Trajectory, bounds: &KinematicBounds) -> bool {
    let dt = traj.dt();
    let pts = traj.points();
    let segments: Vec<_> = pts.windows(2).map(|w| w[1] - w[0]).collect();
    let speeds: Vec<f64> = segments.iter().map(|s| s.norm() / dt).collect();

    if speeds.iter().any(|v| *v > bounds.v_max) {
        return false;
    }
    if speeds
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() / dt > bounds.a_max)
    {
        return false;
    }
    let max_turn = bounds.yaw_rate_max * dt;
    let still = |v: f64| v < bounds.stationary_speed || v * dt < DEGENERATE_SEGMENT;
    segments.windows(2).zip(speeds.windows(2)).all(|(w, v)| {
        if still(v[0]) || still(v[1]) {
            return true;
        }
        let cross = w[0].x * w[1].y - w[0].y * w[1].x;
        cross.atan2(w[0].dot(w[1])).abs() <= max_turn
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajcore::Point2;

    fn traj(points: &[(f64, f64)]) -> Trajectory {
        let pts: Vec<Point2> = points.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        Trajectory::from_points(&pts, 0.5).unwrap()
    }

    #[test]
    fn stationary_and_single_points_are_feasible() {
        let b = KinematicBounds::default();
        assert!(check_feasibility(&traj(&[(1.0, 1.0); 6]), &b));
        assert!(check_feasibility(&traj(&[(1.0, 1.0)]), &b));
    }

    #[test]
    fn speed_limit_is_inclusive() {
        let b = KinematicBounds::default();
        assert!(!check_feasibility(&traj(&[(0.0, 0.0), (25.0, 0.0)]), &b));
        // 10 m per 0.5 s is exactly 20 m/s
        assert!(check_feasibility(&traj(&[(0.0, 0.0), (10.0, 0.0)]), &b));
    }

    #[test]
    fn acceleration_and_turn_limits() {
        let b = KinematicBounds::default();
        // speed 2 -> 6 m/s in one step: 8 m/s²
        assert!(!check_feasibility(
            &traj(&[(0.0, 0.0), (1.0, 0.0), (4.0, 0.0)]),
            &b
        ));
        // 2 -> 4 m/s: 4 m/s²
        assert!(check_feasibility(
            &traj(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]),
            &b
        ));
        // a right angle turn exceeds 0.5 rad per step
        assert!(!check_feasibility(
            &traj(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]),
            &b
        ));
        let a = 0.45f64;
        assert!(check_feasibility(
            &traj(&[(0.0, 0.0), (1.0, 0.0), (1.0 + a.cos(), a.sin())]),
            &b
        ));
    }

    #[test]
    fn pauses_skip_the_turn_check() {
        let b = KinematicBounds::default();
        let t = traj(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        // 1 m step back-to-back with a stop: only acceleration matters
        assert!(check_feasibility(&t, &b));
        // creeping below the stationary speed may wander in heading
        let creep = traj(&[(0.0, 0.0), (0.1, 0.0), (0.1, 0.1), (0.0, 0.1)]);
        assert!(check_feasibility(&creep, &b));
        let strict = KinematicBounds {
            stationary_speed: 0.0,
            ..b
        };
        assert!(!check_feasibility(&creep, &strict));
    }
}
