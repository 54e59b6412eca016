use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{HarnessError, Style, DT};
use crate::trajcore::{AgentState, LaneContext, Point2, Scene, Trajectory};

pub const TARGET_ID: &str = "ego";
pub const NEIGHBOR_ID: &str = "other";

#[derive(Debug, Deserialize, Serialize)]
struct Row {
    scene_id: String,
    agent_id: String,
    t: i64,
    x: f64,
    y: f64,
}

/// Reads a scene CSV (`scene_id,agent_id,t,x,y`) and cuts it into windows.
pub fn load_scenes(path: impl AsRef<Path>, style: Style) -> Result<Vec<Scene>, HarnessError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    parse_scenes(file, style)
}

/// Sliding windows of `style.window()` steps, stride 1, per recording.
/// Agents covering the whole window join the scene; the target is the agent
/// with the longest track in the recording, ties broken by id.
pub fn parse_scenes<R: Read>(input: R, style: Style) -> Result<Vec<Scene>, HarnessError> {
    // recording -> agent -> t -> position
    let mut tracks: BTreeMap<String, BTreeMap<String, BTreeMap<i64, Point2>>> = BTreeMap::new();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| HarnessError::MalformedRow {
            line: e.position().map_or(i + 2, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = i + 2;
        let p = Point2::new(row.x, row.y);
        if !p.is_finite() {
            return Err(HarnessError::MalformedRow {
                line,
                message: "non-finite coordinate".into(),
            });
        }
        let track = tracks
            .entry(row.scene_id)
            .or_default()
            .entry(row.agent_id)
            .or_default();
        if track.insert(row.t, p).is_some() {
            return Err(HarnessError::MalformedRow {
                line,
                message: format!("duplicate timestep {}", row.t),
            });
        }
    }

    let window = style.window() as i64;
    let mut scenes = Vec::new();
    for (recording, agents) in &tracks {
        let mut by_length: Vec<(&String, usize)> =
            agents.iter().map(|(id, t)| (id, t.len())).collect();
        by_length.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let steps: BTreeSet<i64> = agents.values().flat_map(|t| t.keys().copied()).collect();
        let (Some(&first), Some(&last)) = (steps.first(), steps.last()) else {
            continue;
        };
        for start in first..=(last - window + 1) {
            let covering: Vec<&String> = agents
                .iter()
                .filter(|(_, t)| (start..start + window).all(|k| t.contains_key(&k)))
                .map(|(id, _)| id)
                .collect();
            let Some(target) = by_length
                .iter()
                .map(|(id, _)| *id)
                .find(|id| covering.contains(id))
            else {
                continue;
            };
            let mut histories = BTreeMap::new();
            let mut futures = BTreeMap::new();
            for id in covering {
                let pts: Vec<Point2> = (start..start + window).map(|k| agents[id][&k]).collect();
                let (h, f) = pts.split_at(style.history_len());
                histories.insert(id.clone(), Trajectory::from_points(h, DT)?);
                futures.insert(id.clone(), Trajectory::from_points(f, DT)?);
            }
            scenes.push(Scene::new(
                format!("{recording}/{start}"),
                histories,
                futures,
                target.clone(),
                None,
            )?);
        }
    }
    if scenes.is_empty() {
        return Err(HarnessError::NoScenes);
    }
    Ok(scenes)
}

/// Writes scenes as CSV, one recording per scene with steps from 0.
pub fn write_scenes_csv<W: Write>(scenes: &[Scene], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for scene in scenes {
        for (agent, history) in scene.histories() {
            let future = &scene.futures()[agent];
            for (t, p) in history.positions().chain(future.positions()).enumerate() {
                w.serialize(Row {
                    scene_id: scene.id.clone(),
                    agent_id: agent.clone(),
                    t: t as i64,
                    x: p.x,
                    y: p.y,
                })?;
            }
        }
    }
    w.flush().map_err(|e| HarnessError::io("<csv output>", e))?;
    Ok(())
}

/// Ground-truth motion pattern of a synthetic target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Template {
    Straight,
    /// Counter-clockwise at `yaw_rate` rad/s.
    LeftTurn {
        yaw_rate: f64,
    },
    /// Clockwise at `yaw_rate` rad/s.
    RightTurn {
        yaw_rate: f64,
    },
    /// Speeds up by `accel` m/s².
    Accelerate {
        accel: f64,
    },
    /// Slows by `decel` m/s² down to a standstill.
    Brake {
        decel: f64,
    },
}

impl Template {
    /// One of each pattern with moderate parameters.
    pub const DEFAULTS: [Template; 5] = [
        Template::Straight,
        Template::LeftTurn { yaw_rate: 0.1 },
        Template::RightTurn { yaw_rate: 0.1 },
        Template::Accelerate { accel: 1.0 },
        Template::Brake { decel: 1.0 },
    ];

    fn yaw_rate(self) -> f64 {
        match self {
            Template::LeftTurn { yaw_rate } => yaw_rate,
            Template::RightTurn { yaw_rate } => -yaw_rate,
            _ => 0.0,
        }
    }

    fn accel(self) -> f64 {
        match self {
            Template::Accelerate { accel } => accel,
            Template::Brake { decel } => -decel,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticOptions {
    /// Standard deviation of Gaussian noise on observed positions, meters.
    pub jitter: f64,
    /// Adds a second vehicle one lane to the left of the target.
    pub neighbor: bool,
    pub lane_width: f64,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        Self {
            jitter: 0.0,
            neighbor: true,
            lane_width: 3.5,
        }
    }
}

/// Noise-free synthetic scene with default options.
pub fn generate_synthetic_scene(
    template: Template,
    style: Style,
    speed: f64,
    seed: u64,
) -> Result<Scene, HarnessError> {
    generate_synthetic_scene_with(template, style, speed, seed, &SyntheticOptions::default())
}

/// The target starts at the origin heading along +x at step 0; steps
/// `1..=window` are observed. Lane centerlines follow the nominal paths.
pub fn generate_synthetic_scene_with(
    template: Template,
    style: Style,
    speed: f64,
    seed: u64,
    options: &SyntheticOptions,
) -> Result<Scene, HarnessError> {
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(HarnessError::InvalidConfig(format!(
            "speed must be positive, got {speed}"
        )));
    }
    if !(options.jitter >= 0.0 && options.lane_width > 0.0) {
        return Err(HarnessError::InvalidConfig(
            "invalid synthetic options".into(),
        ));
    }
    let n = style.window();
    let (yaw_rate, accel) = (template.yaw_rate(), template.accel());

    // nominal (position, heading) for steps 0..=n
    let mut nominal = Vec::with_capacity(n + 1);
    let (mut p, mut v) = (Point2::ZERO, speed);
    for k in 0..=n {
        let heading = yaw_rate * DT * k as f64;
        nominal.push((p, heading));
        p += Point2::new(heading.cos(), heading.sin()) * (v * DT);
        v = (v + accel * DT).max(0.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observe = |offset: f64| -> Result<(Trajectory, Trajectory), HarnessError> {
        let states: Vec<AgentState> = nominal[1..]
            .iter()
            .map(|&(p, h)| {
                let lateral = Point2::new(-h.sin(), h.cos()) * offset;
                let noise = if options.jitter > 0.0 {
                    Point2::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                        * options.jitter
                } else {
                    Point2::ZERO
                };
                AgentState::at(p + lateral + noise).with_heading(h)
            })
            .collect();
        let (h, f) = states.split_at(style.history_len());
        Ok((
            Trajectory::new(h.to_vec(), DT)?,
            Trajectory::new(f.to_vec(), DT)?,
        ))
    };

    let mut histories = BTreeMap::new();
    let mut futures = BTreeMap::new();
    let mut centerlines = vec![nominal.iter().map(|(p, _)| *p).collect::<Vec<_>>()];
    let (h, f) = observe(0.0)?;
    histories.insert(TARGET_ID.to_string(), h);
    futures.insert(TARGET_ID.to_string(), f);
    if options.neighbor {
        let (h, f) = observe(options.lane_width)?;
        histories.insert(NEIGHBOR_ID.to_string(), h);
        futures.insert(NEIGHBOR_ID.to_string(), f);
        centerlines.push(
            nominal
                .iter()
                .map(|&(p, h)| p + Point2::new(-h.sin(), h.cos()) * options.lane_width)
                .collect(),
        );
    }
    let context = LaneContext::new(centerlines, options.lane_width)?;
    let id = format!("{}-{seed}", template_name(template));
    Ok(Scene::new(
        id,
        histories,
        futures,
        TARGET_ID,
        Some(context),
    )?)
}

fn template_name(t: Template) -> &'static str {
    match t {
        Template::Straight => "straight",
        Template::LeftTurn { .. } => "left_turn",
        Template::RightTurn { .. } => "right_turn",
        Template::Accelerate { .. } => "accelerate",
        Template::Brake { .. } => "brake",
    }
}
