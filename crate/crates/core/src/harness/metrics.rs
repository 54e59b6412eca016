use super::{HarnessError, ScenarioRecord};
use crate::trajcore::{LaneContext, Point2, Prediction, TrajError};

/// Share of records whose attack met the criterion with a feasible history.
pub fn attack_success_rate(records: &[ScenarioRecord]) -> Result<f64, HarnessError> {
    fraction(records, |r| r.success && r.feasible)
}

/// Share of records whose attack met the criterion, feasible or not.
pub fn criterion_rate(records: &[ScenarioRecord]) -> Result<f64, HarnessError> {
    fraction(records, |r| r.success)
}

/// Share of final displacement errors strictly above `threshold`.
pub fn miss_rate(fdes: &[f64], threshold: f64) -> Result<f64, HarnessError> {
    if !(threshold > 0.0) {
        return Err(HarnessError::InvalidConfig(format!(
            "miss threshold must be positive, got {threshold}"
        )));
    }
    fraction(fdes, |f| *f > threshold)
}

fn fraction<T>(items: &[T], hit: impl Fn(&T) -> bool) -> Result<f64, HarnessError> {
    if items.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    Ok(items.iter().filter(|r| hit(r)).count() as f64 / items.len() as f64)
}

/// Euclidean distance from `p` to a polyline.
pub fn point_polyline_distance(p: Point2, polyline: &[Point2]) -> f64 {
    if let [only] = polyline {
        return (p - *only).norm();
    }
    polyline
        .windows(2)
        .map(|w| {
            let seg = w[1] - w[0];
            let len_sq = seg.norm_squared();
            let t = if len_sq > 0.0 {
                ((p - w[0]).dot(seg) / len_sq).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (p - (w[0] + seg * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Share of the agent's predicted points farther than half a lane width
/// from every centerline. `None` without lane context.
pub fn off_road_rate(
    pred: &Prediction,
    context: Option<&LaneContext>,
    agent: &str,
) -> Result<Option<f64>, TrajError> {
    let Some(ctx) = context else {
        return Ok(None);
    };
    let points = pred.agent(agent)?;
    if points.is_empty() {
        return Err(TrajError::EmptyTrajectory);
    }
    let half = ctx.lane_width / 2.0;
    let off = points
        .iter()
        .filter(|p| {
            ctx.centerlines
                .iter()
                .map(|c| point_polyline_distance(**p, c))
                .fold(f64::INFINITY, f64::min)
                > half
        })
        .count();
    Ok(Some(off as f64 / points.len() as f64))
}
