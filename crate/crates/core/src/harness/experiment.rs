use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::off_road_rate;
use super::report::{Intentions, Report, ScenarioRecord};
use super::scenes::{generate_synthetic_scene_with, load_scenes, SyntheticOptions, Template};
use super::{check_feasibility, HarnessError, KinematicBounds, Style};
use crate::attack::{run_attack, AttackParams, AttackResult, TerminationReason};
use crate::baselines::{
    default_simba_step, derive_ball, pso_attack, random_attack, simba_attack, PsoParams,
    ScoreOracle,
};
use crate::criteria::{Objective, QueryOracle, ThresholdConfig};
use crate::predictors::{Predictor, PredictorHandle, PredictorSpec};
use crate::trajcore::{ade, fde, intention_deviation, Direction, Prediction, Scene, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    #[default]
    Dtp,
    Pso,
    Simba,
    Random,
}

impl std::str::FromStr for AttackKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dtp" => Ok(AttackKind::Dtp),
            "pso" => Ok(AttackKind::Pso),
            "simba" => Ok(AttackKind::Simba),
            "random" => Ok(AttackKind::Random),
            other => Err(format!("unknown attack {other:?}")),
        }
    }
}

/// Where scenarios come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// Scenario `i` uses `templates[i % len]` at a speed drawn uniformly
    /// from `[speed_min, speed_max]`.
    Synthetic {
        templates: Vec<Template>,
        speed_min: f64,
        speed_max: f64,
        #[serde(default)]
        options: SyntheticOptions,
    },
    /// Scene CSV; `scenario_count` windows are drawn without replacement.
    Csv { path: PathBuf },
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec::Synthetic {
            templates: Template::DEFAULTS.to_vec(),
            speed_min: 4.0,
            speed_max: 10.0,
            options: SyntheticOptions {
                jitter: 0.02,
                ..SyntheticOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub style: Style,
    pub predictor: PredictorSpec,
    pub objective: Objective,
    /// Defaults to the style's thresholds.
    pub thresholds: Option<ThresholdConfig>,
    pub attack: AttackKind,
    pub budget: usize,
    pub scenario_count: usize,
    /// Final displacement error above which a prediction misses, meters.
    pub miss_threshold: f64,
    pub bounds: KinematicBounds,
    pub seed: u64,
    /// Boundary-walk parameters; `rng_seed` is replaced per scenario.
    pub dtp: AttackParams,
    /// Swarm parameters; `rng_seed` is replaced per scenario.
    pub pso: PsoParams,
    /// SimBA coordinate step; defaults to a quarter of the ball radius.
    pub simba_step: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSpec::default(),
            style: Style::default(),
            predictor: PredictorSpec::default(),
            objective: Objective::ADE,
            thresholds: None,
            attack: AttackKind::Dtp,
            budget: 1000,
            scenario_count: 100,
            miss_threshold: 2.0,
            bounds: KinematicBounds::default(),
            seed: 0,
            dtp: AttackParams::default(),
            pso: PsoParams::default(),
            simba_step: None,
        }
    }
}

impl ExperimentConfig {
    pub fn thresholds(&self) -> ThresholdConfig {
        self.thresholds.unwrap_or_else(|| self.style.thresholds())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.scenario_count == 0 {
            return bad("scenario_count must be at least 1".into());
        }
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        if !(self.miss_threshold > 0.0) {
            return bad("miss_threshold must be positive".into());
        }
        self.bounds
            .validate()
            .map_err(HarnessError::InvalidConfig)?;
        self.objective.validate()?;
        self.thresholds().validate()?;
        self.dtp.validate().map_err(HarnessError::InvalidConfig)?;
        self.pso.validate()?;
        if let Some(step) = self.simba_step {
            if !(step > 0.0) {
                return bad("simba_step must be positive".into());
            }
        }
        if let DatasetSpec::Synthetic {
            templates,
            speed_min,
            speed_max,
            ..
        } = &self.dataset
        {
            if templates.is_empty() {
                return bad("at least one template is required".into());
            }
            if !(*speed_min > 0.0 && speed_min <= speed_max && speed_max.is_finite()) {
                return bad("speeds must satisfy 0 < speed_min <= speed_max".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Seed of scenario `index`, a pure function of the master seed.
pub fn scenario_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

/// The scenes an experiment runs on, each with its scenario seed.
pub fn build_scenarios(config: &ExperimentConfig) -> Result<Vec<(Scene, u64)>, HarnessError> {
    config.validate()?;
    match &config.dataset {
        DatasetSpec::Synthetic {
            templates,
            speed_min,
            speed_max,
            options,
        } => (0..config.scenario_count)
            .map(|i| {
                let seed = scenario_seed(config.seed, i);
                let mut speed_rng = ChaCha8Rng::seed_from_u64(seed);
                speed_rng.set_stream(1);
                let speed = if speed_min < speed_max {
                    speed_rng.random_range(*speed_min..=*speed_max)
                } else {
                    *speed_min
                };
                let template = templates[i % templates.len()];
                let scene =
                    generate_synthetic_scene_with(template, config.style, speed, seed, options)?;
                Ok((scene, seed))
            })
            .collect(),
        DatasetSpec::Csv { path } => {
            let mut scenes = load_scenes(path, config.style)?;
            scenes.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
            scenes.truncate(config.scenario_count);
            Ok(scenes
                .into_iter()
                .enumerate()
                .map(|(i, s)| (s, scenario_seed(config.seed, i)))
                .collect())
        }
    }
}

/// Runs the configured attack on one scene. Baselines first run the
/// boundary walk to derive their search ball.
pub fn attack_scene(
    config: &ExperimentConfig,
    predictor: &dyn Predictor,
    scene: &Scene,
    seed: u64,
) -> Result<AttackResult, HarnessError> {
    let thresholds = config.thresholds();
    let original = scene.target_history();
    let dtp = || -> Result<AttackResult, HarnessError> {
        let mut oracle = QueryOracle::new(
            predictor,
            scene,
            config.objective,
            thresholds,
            config.budget,
        )?;
        Ok(run_attack(
            original,
            &mut oracle,
            &config.dtp.clone().with_seed(seed),
        )?)
    };
    if config.attack == AttackKind::Dtp {
        return dtp();
    }
    let reference = dtp()?;
    if reference.termination == TerminationReason::OriginalAdversarial {
        // nothing to search for; the single query on the original decides
        return Ok(reference);
    }
    let ball = derive_ball(&reference, original)?;
    let result = match config.attack {
        AttackKind::Dtp => unreachable!(),
        AttackKind::Pso => {
            let mut oracle = ScoreOracle::new(
                predictor,
                scene,
                config.objective,
                thresholds,
                config.budget,
            )?;
            let params = PsoParams {
                rng_seed: seed,
                ..config.pso.clone()
            };
            pso_attack(&mut oracle, &ball, &params)?
        }
        AttackKind::Simba => {
            let mut oracle = ScoreOracle::new(
                predictor,
                scene,
                config.objective,
                thresholds,
                config.budget,
            )?;
            let step = config
                .simba_step
                .unwrap_or_else(|| default_simba_step(&ball));
            simba_attack(&mut oracle, &ball, step, seed)?
        }
        AttackKind::Random => {
            let mut oracle = QueryOracle::new(
                predictor,
                scene,
                config.objective,
                thresholds,
                config.budget,
            )?;
            random_attack(&mut oracle, &ball, seed)?
        }
    };
    Ok(result)
}

fn intentions(pred: &Prediction, scene: &Scene) -> Option<Intentions> {
    let agent = scene.target();
    let d = |dir| intention_deviation(pred, scene, agent, dir).ok();
    Some(Intentions {
        left: d(Direction::Left)?,
        right: d(Direction::Right)?,
        front: d(Direction::Front)?,
        rear: d(Direction::Rear)?,
    })
}

fn run_scenario(
    config: &ExperimentConfig,
    predictor: &dyn Predictor,
    index: usize,
    scene: &Scene,
    seed: u64,
) -> ScenarioRecord {
    let mut record = ScenarioRecord {
        index,
        scene_id: scene.id.clone(),
        seed,
        success: false,
        feasible: false,
        final_distance: 0.0,
        min_adversarial_distance: None,
        queries_used: 0,
        termination: None,
        ade_normal: 0.0,
        ade_attack: 0.0,
        fde_normal: 0.0,
        fde_attack: 0.0,
        intention_normal: None,
        intention_attack: None,
        orr_normal: None,
        orr_attack: None,
        trace: Vec::new(),
        error: None,
    };
    if let Err(e) = fill_record(config, predictor, scene, seed, &mut record) {
        record.error = Some(e.to_string());
    }
    record
}

fn fill_record(
    config: &ExperimentConfig,
    predictor: &dyn Predictor,
    scene: &Scene,
    seed: u64,
    record: &mut ScenarioRecord,
) -> Result<(), HarnessError> {
    let agent = scene.target();
    let clean = predictor.predict(scene)?;
    clean.validate_against(scene)?;
    record.ade_normal = ade(&clean, scene, agent)?;
    record.fde_normal = fde(&clean, scene, agent)?;
    record.intention_normal = intentions(&clean, scene);
    record.orr_normal = off_road_rate(&clean, scene.context(), agent)?;

    let result = attack_scene(config, predictor, scene, seed)?;
    let adversarial: &Trajectory = &result.adversarial;
    let attacked = predictor.predict(&scene.with_target_history(adversarial.clone())?)?;
    record.success = result.success;
    record.feasible = check_feasibility(adversarial, &config.bounds);
    record.final_distance = result.final_distance;
    record.min_adversarial_distance = result.min_adversarial_distance;
    record.queries_used = result.queries_used;
    record.termination = Some(result.termination);
    record.ade_attack = ade(&attacked, scene, agent)?;
    record.fde_attack = fde(&attacked, scene, agent)?;
    record.intention_attack = intentions(&attacked, scene);
    record.orr_attack = off_road_rate(&attacked, scene.context(), agent)?;
    record.trace = result.trace;
    Ok(())
}

/// Runs every scenario in parallel. Reports do not depend on the execution
/// mode.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    run_experiment_with(config, Execution::Parallel)
}

pub fn run_experiment_with(
    config: &ExperimentConfig,
    execution: Execution,
) -> Result<Report, HarnessError> {
    let scenarios = build_scenarios(config)?;
    let predictor = PredictorHandle::from_spec(&config.predictor)?;
    let run = |(i, (scene, seed)): (usize, &(Scene, u64))| {
        run_scenario(config, &predictor, i, scene, *seed)
    };
    let records: Vec<ScenarioRecord> = match execution {
        Execution::Serial => scenarios.iter().enumerate().map(run).collect(),
        Execution::Parallel => scenarios.par_iter().enumerate().map(run).collect(),
    };
    Report::new(config.clone(), records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(attack: AttackKind, count: usize, budget: usize) -> ExperimentConfig {
        ExperimentConfig {
            attack,
            scenario_count: count,
            budget,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn scenario_seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = (0..50).map(|i| scenario_seed(7, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 50);
        assert_eq!(seeds[3], scenario_seed(7, 3));
        assert_ne!(scenario_seed(7, 0), scenario_seed(8, 0));
    }

    #[test]
    fn single_random_query() {
        // the ball comes from a separate boundary-walk run
        let report = run_experiment(&small(AttackKind::Random, 1, 1)).unwrap();
        assert_eq!(report.records.len(), 1);
        assert!(report.records[0].queries_used <= 1);
    }

    #[test]
    fn serial_and_parallel_reports_match() {
        let config = small(AttackKind::Dtp, 6, 200);
        let a = run_experiment_with(&config, Execution::Serial).unwrap();
        let b = run_experiment_with(&config, Execution::Parallel).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(
            a.to_json().unwrap(),
            run_experiment(&config).unwrap().to_json().unwrap()
        );
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for c in [small(AttackKind::Dtp, 0, 10), small(AttackKind::Dtp, 1, 0)] {
            assert!(matches!(
                run_experiment(&c),
                Err(HarnessError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn config_json_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"attack":"simba","objective":"left"}"#).unwrap();
        assert_eq!(c.attack, AttackKind::Simba);
        assert_eq!(c.objective, Objective::Intention(Direction::Left));
        assert_eq!(c.budget, 1000);
        let back: ExperimentConfig =
            serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
