use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::TrajError;

/// Identifier of a traffic participant inside a scene.
pub type AgentId = String;

/// A planar position or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Counter-clockwise rotation by 90 degrees.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, rhs: Point2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// One sampled state of an agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Point2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
    /// Additional scalar attributes such as semantic class or vehicle dimensions.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

impl AgentState {
    pub fn at(position: Point2) -> Self {
        Self {
            position,
            heading: None,
            extras: BTreeMap::new(),
        }
    }

    pub fn with_heading(mut self, heading: f64) -> Self {
        self.heading = Some(heading);
        self
    }

    fn is_finite(&self) -> bool {
        self.position.is_finite()
            && self.heading.is_none_or(f64::is_finite)
            && self.extras.values().all(|v| v.is_finite())
    }
}

/// A uniformly sampled sequence of agent states.
///
/// Construction validates that the sequence is non-empty, that `dt` is
/// positive and that every state is finite; the fields are private so those
/// invariants hold for every value in circulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrajectory", into = "RawTrajectory")]
pub struct Trajectory {
    states: Vec<AgentState>,
    dt: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTrajectory {
    states: Vec<AgentState>,
    dt: f64,
}

impl TryFrom<RawTrajectory> for Trajectory {
    type Error = TrajError;
    fn try_from(raw: RawTrajectory) -> Result<Self, TrajError> {
        Trajectory::new(raw.states, raw.dt)
    }
}

impl From<Trajectory> for RawTrajectory {
    fn from(t: Trajectory) -> Self {
        RawTrajectory {
            states: t.states,
            dt: t.dt,
        }
    }
}

impl Trajectory {
    pub fn new(states: Vec<AgentState>, dt: f64) -> Result<Self, TrajError> {
        if states.is_empty() {
            return Err(TrajError::EmptyTrajectory);
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(TrajError::InvalidSamplingInterval(dt));
        }
        if let Some(i) = states.iter().position(|s| !s.is_finite()) {
            return Err(TrajError::NonFinite { index: i });
        }
        Ok(Self { states, dt })
    }

    pub fn from_points(points: &[Point2], dt: f64) -> Result<Self, TrajError> {
        Self::new(points.iter().copied().map(AgentState::at).collect(), dt)
    }

    pub fn states(&self) -> &[AgentState] {
        &self.states
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false; a trajectory holds at least one state.
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = Point2> + '_ {
        self.states.iter().map(|s| s.position)
    }

    pub fn points(&self) -> Vec<Point2> {
        self.positions().collect()
    }

    pub fn last_position(&self) -> Point2 {
        self.states[self.states.len() - 1].position
    }

    /// Row-major flattening `[x0, y0, x1, y1, ...]`.
    pub fn flatten(&self) -> Vec<f64> {
        self.positions().flat_map(|p| [p.x, p.y]).collect()
    }

    /// Replaces the positions with `flat` while keeping headings, extras and `dt`.
    pub fn with_flat_positions(&self, flat: &[f64]) -> Result<Self, TrajError> {
        if flat.len() != 2 * self.len() {
            return Err(TrajError::LengthMismatch {
                left: self.len(),
                right: flat.len() / 2,
            });
        }
        let states = self
            .states
            .iter()
            .zip(flat.chunks_exact(2))
            .map(|(s, xy)| AgentState {
                position: Point2::new(xy[0], xy[1]),
                ..s.clone()
            })
            .collect();
        Trajectory::new(states, self.dt)
    }

    pub fn translated(&self, offset: Point2) -> Self {
        let states = self
            .states
            .iter()
            .map(|s| AgentState {
                position: s.position + offset,
                ..s.clone()
            })
            .collect();
        Self {
            states,
            dt: self.dt,
        }
    }
}

/// Lane centerlines used for off-road accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneContext {
    pub centerlines: Vec<Vec<Point2>>,
    pub lane_width: f64,
}

impl LaneContext {
    pub fn new(centerlines: Vec<Vec<Point2>>, lane_width: f64) -> Result<Self, TrajError> {
        if !(lane_width.is_finite() && lane_width > 0.0) {
            return Err(TrajError::InvalidLaneWidth(lane_width));
        }
        if centerlines.iter().any(|c| c.len() < 2) {
            return Err(TrajError::ShortPolyline);
        }
        Ok(Self {
            centerlines,
            lane_width,
        })
    }
}

/// One prediction instance: per-agent histories and ground-truth futures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub id: String,
    histories: BTreeMap<AgentId, Trajectory>,
    futures: BTreeMap<AgentId, Trajectory>,
    target: AgentId,
    #[serde(default)]
    context: Option<LaneContext>,
}

impl Scene {
    pub fn new(
        id: impl Into<String>,
        histories: BTreeMap<AgentId, Trajectory>,
        futures: BTreeMap<AgentId, Trajectory>,
        target: impl Into<AgentId>,
        context: Option<LaneContext>,
    ) -> Result<Self, TrajError> {
        let target = target.into();
        if !histories.contains_key(&target) || !futures.contains_key(&target) {
            return Err(TrajError::MissingAgent(target));
        }
        if histories.keys().ne(futures.keys()) {
            return Err(TrajError::AgentSetMismatch);
        }
        let hist_len = histories[&target].len();
        let fut_len = futures[&target].len();
        for (id, h) in &histories {
            if h.len() != hist_len {
                return Err(TrajError::HorizonMismatch {
                    agent: id.clone(),
                    expected: hist_len,
                    found: h.len(),
                });
            }
        }
        for (id, f) in &futures {
            if f.len() != fut_len {
                return Err(TrajError::HorizonMismatch {
                    agent: id.clone(),
                    expected: fut_len,
                    found: f.len(),
                });
            }
        }
        Ok(Self {
            id: id.into(),
            histories,
            futures,
            target,
            context,
        })
    }

    pub fn histories(&self) -> &BTreeMap<AgentId, Trajectory> {
        &self.histories
    }

    pub fn futures(&self) -> &BTreeMap<AgentId, Trajectory> {
        &self.futures
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn context(&self) -> Option<&LaneContext> {
        self.context.as_ref()
    }

    pub fn agent_count(&self) -> usize {
        self.histories.len()
    }

    pub fn history_len(&self) -> usize {
        self.histories[&self.target].len()
    }

    pub fn horizon(&self) -> usize {
        self.futures[&self.target].len()
    }

    pub fn dt(&self) -> f64 {
        self.histories[&self.target].dt()
    }

    pub fn target_history(&self) -> &Trajectory {
        &self.histories[&self.target]
    }

    pub fn target_future(&self) -> &Trajectory {
        &self.futures[&self.target]
    }

    pub fn history(&self, agent: &str) -> Result<&Trajectory, TrajError> {
        self.histories
            .get(agent)
            .ok_or_else(|| TrajError::MissingAgent(agent.to_owned()))
    }

    pub fn future(&self, agent: &str) -> Result<&Trajectory, TrajError> {
        self.futures
            .get(agent)
            .ok_or_else(|| TrajError::MissingAgent(agent.to_owned()))
    }

    /// Copy of the scene with the target agent's history replaced.
    pub fn with_target_history(&self, history: Trajectory) -> Result<Self, TrajError> {
        if history.len() != self.history_len() {
            return Err(TrajError::LengthMismatch {
                left: self.history_len(),
                right: history.len(),
            });
        }
        let mut scene = self.clone();
        scene.histories.insert(self.target.clone(), history);
        Ok(scene)
    }

    pub fn translated(&self, offset: Point2) -> Self {
        let shift = |m: &BTreeMap<AgentId, Trajectory>| {
            m.iter()
                .map(|(k, t)| (k.clone(), t.translated(offset)))
                .collect()
        };
        Self {
            id: self.id.clone(),
            histories: shift(&self.histories),
            futures: shift(&self.futures),
            target: self.target.clone(),
            context: self.context.as_ref().map(|c| LaneContext {
                centerlines: c
                    .centerlines
                    .iter()
                    .map(|l| l.iter().map(|p| *p + offset).collect())
                    .collect(),
                lane_width: c.lane_width,
            }),
        }
    }
}

/// Predicted future positions for every agent of a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub positions: BTreeMap<AgentId, Vec<Point2>>,
}

impl Prediction {
    pub fn new(positions: BTreeMap<AgentId, Vec<Point2>>) -> Self {
        Self { positions }
    }

    pub fn agent(&self, agent: &str) -> Result<&[Point2], TrajError> {
        self.positions
            .get(agent)
            .map(Vec::as_slice)
            .ok_or_else(|| TrajError::MissingAgent(agent.to_owned()))
    }

    /// Checks that the prediction covers the scene's agents over its horizon.
    pub fn validate_against(&self, scene: &Scene) -> Result<(), TrajError> {
        if self.positions.keys().ne(scene.futures().keys()) {
            return Err(TrajError::AgentSetMismatch);
        }
        for (id, pts) in &self.positions {
            if pts.len() != scene.horizon() {
                return Err(TrajError::HorizonMismatch {
                    agent: id.clone(),
                    expected: scene.horizon(),
                    found: pts.len(),
                });
            }
            if let Some(i) = pts.iter().position(|p| !p.is_finite()) {
                return Err(TrajError::NonFinite { index: i });
            }
        }
        Ok(())
    }
}

/// Direction along which an intention deviation is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
    Front,
    Rear,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Left,
        Direction::Right,
        Direction::Front,
        Direction::Rear,
    ];

    pub fn is_lateral(self) -> bool {
        matches!(self, Direction::Left | Direction::Right)
    }
}
