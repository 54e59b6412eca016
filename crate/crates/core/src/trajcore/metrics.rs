use super::{Direction, Point2, Prediction, Scene, TrajError, Trajectory};

/// Segments shorter than this (meters) carry no usable heading.
pub const DEGENERATE_SEGMENT: f64 = 1e-9;

fn paired<'a>(
    pred: &'a Prediction,
    scene: &'a Scene,
    agent: &str,
) -> Result<(&'a [Point2], Vec<Point2>), TrajError> {
    let p = pred.agent(agent)?;
    let truth = scene.future(agent)?.points();
    if p.len() != truth.len() {
        return Err(TrajError::LengthMismatch {
            left: p.len(),
            right: truth.len(),
        });
    }
    Ok((p, truth))
}

/// Average displacement error of `agent` over the prediction horizon.
pub fn ade(pred: &Prediction, scene: &Scene, agent: &str) -> Result<f64, TrajError> {
    let (p, truth) = paired(pred, scene, agent)?;
    let sum: f64 = p.iter().zip(&truth).map(|(a, b)| (*a - *b).norm()).sum();
    Ok(sum / p.len() as f64)
}

/// Displacement error at the final predicted step.
pub fn fde(pred: &Prediction, scene: &Scene, agent: &str) -> Result<f64, TrajError> {
    let (p, truth) = paired(pred, scene, agent)?;
    let last = p.len() - 1;
    Ok((p[last] - truth[last]).norm())
}

/// Unit vector for `dir` in the frame of the segment `start -> end`.
pub fn direction_unit(start: Point2, end: Point2, dir: Direction) -> Result<Point2, TrajError> {
    let seg = end - start;
    let len = seg.norm();
    if len < DEGENERATE_SEGMENT {
        return Err(TrajError::DegenerateHeading);
    }
    let front = seg * (1.0 / len);
    Ok(match dir {
        Direction::Front => front,
        Direction::Rear => -front,
        Direction::Left => front.perp(),
        Direction::Right => -front.perp(),
    })
}

/// Heading segment used for each future step of `agent`.
///
/// Step `i` uses the ground-truth segment `i -> i+1`; the last step reuses the
/// final segment. Degenerate segments fall back to the nearest preceding
/// usable one, then the nearest following one, then the last history segment.
fn heading_segments(scene: &Scene, agent: &str) -> Result<Vec<(Point2, Point2)>, TrajError> {
    let future = scene.future(agent)?.points();
    let segs: Vec<Option<(Point2, Point2)>> = future
        .windows(2)
        .map(|w| ((w[1] - w[0]).norm() >= DEGENERATE_SEGMENT).then_some((w[0], w[1])))
        .collect();

    let history_fallback = || -> Result<(Point2, Point2), TrajError> {
        let hist = scene.history(agent)?.points();
        match hist.as_slice() {
            [.., a, b] if (*b - *a).norm() >= DEGENERATE_SEGMENT => Ok((*a, *b)),
            _ => Err(TrajError::StationaryTruth),
        }
    };

    if segs.iter().all(Option::is_none) {
        let seg = history_fallback()?;
        return Ok(vec![seg; future.len()]);
    }

    let n = segs.len();
    (0..future.len())
        .map(|i| {
            let own = i.min(n - 1);
            if let Some(seg) = segs[own] {
                return Ok(seg);
            }
            if let Some(seg) = segs[..own].iter().rev().flatten().next() {
                return Ok(*seg);
            }
            Ok(*segs[own + 1..]
                .iter()
                .flatten()
                .next()
                .expect("at least one usable segment"))
        })
        .collect()
}

/// Mean signed offset of the prediction from ground truth along `dir`.
pub fn intention_deviation(
    pred: &Prediction,
    scene: &Scene,
    agent: &str,
    dir: Direction,
) -> Result<f64, TrajError> {
    let (p, truth) = paired(pred, scene, agent)?;
    let segments = heading_segments(scene, agent)?;
    let mut sum = 0.0;
    for ((pi, si), (a, b)) in p.iter().zip(&truth).zip(segments) {
        let g = direction_unit(a, b, dir)?;
        sum += (*pi - *si).dot(g);
    }
    Ok(sum / p.len() as f64)
}

/// Indicator-weighted sum of ADE and FDE.
pub fn combined_error(
    pred: &Prediction,
    scene: &Scene,
    agent: &str,
    use_ade: bool,
    use_fde: bool,
) -> Result<f64, TrajError> {
    if !use_ade && !use_fde {
        return Err(TrajError::InvalidObjective);
    }
    let mut total = 0.0;
    if use_ade {
        total += ade(pred, scene, agent)?;
    }
    if use_fde {
        total += fde(pred, scene, agent)?;
    }
    Ok(total)
}

/// Root-mean-square per-step displacement between two trajectories, in meters.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> Result<f64, TrajError> {
    if a.len() != b.len() {
        return Err(TrajError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sq: f64 = a
        .positions()
        .zip(b.positions())
        .map(|(p, q)| (p - q).norm_squared())
        .sum();
    Ok((sq / a.len() as f64).sqrt())
}
