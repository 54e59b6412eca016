use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{attack_success_rate, criterion_rate, miss_rate};
use super::{ExperimentConfig, HarnessError};
use crate::attack::{TerminationReason, TracePoint};

/// Intention deviations of the target along each direction, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intentions {
    pub left: f64,
    pub right: f64,
    pub front: f64,
    pub rear: f64,
}

/// Outcome of one scenario. Metric fields are zero when `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub index: usize,
    pub scene_id: String,
    pub seed: u64,
    /// The returned history satisfies the criterion.
    pub success: bool,
    /// The returned history passes the kinematic check.
    pub feasible: bool,
    /// RMS distance of the returned history (0 when unsuccessful).
    pub final_distance: f64,
    pub min_adversarial_distance: Option<f64>,
    pub queries_used: usize,
    pub termination: Option<TerminationReason>,
    pub ade_normal: f64,
    pub ade_attack: f64,
    pub fde_normal: f64,
    pub fde_attack: f64,
    pub intention_normal: Option<Intentions>,
    pub intention_attack: Option<Intentions>,
    /// `None` when the scene has no lane context.
    pub orr_normal: Option<f64>,
    pub orr_attack: Option<f64>,
    pub trace: Vec<TracePoint>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub scenarios: usize,
    pub errors: usize,
    /// Criterion met with a feasible history.
    pub asr: f64,
    /// Criterion met, feasibility ignored.
    pub criterion_rate: f64,
    pub ade_normal: Option<f64>,
    pub ade_attack: Option<f64>,
    pub fde_normal: Option<f64>,
    pub fde_attack: Option<f64>,
    /// attack / normal
    pub ade_amplification: Option<f64>,
    pub fde_amplification: Option<f64>,
    pub mr_normal: Option<f64>,
    pub mr_attack: Option<f64>,
    /// Off-road rates measured against the lane corridor around centerlines.
    pub orr_normal: Option<f64>,
    pub orr_attack: Option<f64>,
    /// Mean final distance over successful scenarios.
    pub mean_perturbation_distance: Option<f64>,
    pub mean_queries: f64,
}

impl Aggregates {
    pub fn compute(records: &[ScenarioRecord], miss_threshold: f64) -> Result<Self, HarnessError> {
        let ok: Vec<&ScenarioRecord> = records.iter().filter(|r| r.error.is_none()).collect();
        let mean_of =
            |f: &dyn Fn(&ScenarioRecord) -> Option<f64>| mean(ok.iter().filter_map(|r| f(r)));
        let ade_normal = mean_of(&|r| Some(r.ade_normal));
        let ade_attack = mean_of(&|r| Some(r.ade_attack));
        let fde_normal = mean_of(&|r| Some(r.fde_normal));
        let fde_attack = mean_of(&|r| Some(r.fde_attack));
        let fdes = |attack: bool| -> Vec<f64> {
            ok.iter()
                .map(|r| if attack { r.fde_attack } else { r.fde_normal })
                .collect()
        };
        let mr = |attack: bool| -> Result<Option<f64>, HarnessError> {
            let v = fdes(attack);
            if v.is_empty() {
                Ok(None)
            } else {
                miss_rate(&v, miss_threshold).map(Some)
            }
        };
        Ok(Self {
            scenarios: records.len(),
            errors: records.len() - ok.len(),
            asr: attack_success_rate(records)?,
            criterion_rate: criterion_rate(records)?,
            ade_normal,
            ade_attack,
            fde_normal,
            fde_attack,
            ade_amplification: ratio(ade_attack, ade_normal),
            fde_amplification: ratio(fde_attack, fde_normal),
            mr_normal: mr(false)?,
            mr_attack: mr(true)?,
            orr_normal: mean_of(&|r| r.orr_normal),
            orr_attack: mean_of(&|r| r.orr_attack),
            mean_perturbation_distance: mean_of(&|r| r.success.then_some(r.final_distance)),
            mean_queries: records.iter().map(|r| r.queries_used as f64).sum::<f64>()
                / records.len() as f64,
        })
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn ratio(num: Option<f64>, den: Option<f64>) -> Option<f64> {
    match (num, den) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub records: Vec<ScenarioRecord>,
    pub aggregates: Aggregates,
}

impl Report {
    pub fn new(
        config: ExperimentConfig,
        records: Vec<ScenarioRecord>,
    ) -> Result<Self, HarnessError> {
        let aggregates = Aggregates::compute(&records, config.miss_threshold)?;
        Ok(Self {
            seed: config.seed,
            config,
            records,
            aggregates,
        })
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a report and checks its aggregates against its records.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let report: Report = serde_json::from_str(text)?;
        let again = Aggregates::compute(&report.records, report.config.miss_threshold)?;
        if again != report.aggregates {
            return Err(HarnessError::InconsistentReport(
                "stored aggregates differ from the records".into(),
            ));
        }
        if report.seed != report.config.seed {
            return Err(HarnessError::InconsistentReport(
                "seed differs from config".into(),
            ));
        }
        Ok(report)
    }
}

pub fn emit_report(report: &Report, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    let mut text = report.to_json()?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn load_report(path: impl AsRef<Path>) -> Result<Report, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Report::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(success: bool, feasible: bool, fde_attack: f64) -> ScenarioRecord {
        ScenarioRecord {
            index: 0,
            scene_id: "s".into(),
            seed: 0,
            success,
            feasible,
            final_distance: if success { 0.5 } else { 0.0 },
            min_adversarial_distance: None,
            queries_used: 10,
            termination: Some(TerminationReason::MaxIter),
            ade_normal: 1.0,
            ade_attack: 2.0,
            fde_normal: 1.0,
            fde_attack,
            intention_normal: None,
            intention_attack: None,
            orr_normal: None,
            orr_attack: Some(0.25),
            trace: vec![],
            error: None,
        }
    }

    #[test]
    fn asr_requires_feasibility() {
        let mut records: Vec<_> = (0..100).map(|i| record(i < 81, true, 3.0)).collect();
        assert!((attack_success_rate(&records).unwrap() - 0.81).abs() < 1e-15);
        records.iter_mut().for_each(|r| r.feasible = false);
        assert_eq!(attack_success_rate(&records).unwrap(), 0.0);
        assert_eq!(criterion_rate(&records).unwrap(), 0.81);
        let none: Vec<_> = (0..7).map(|_| record(false, true, 0.0)).collect();
        assert_eq!(attack_success_rate(&none).unwrap(), 0.0);
        assert!(attack_success_rate(&[]).is_err());
    }

    #[test]
    fn aggregates_follow_records() {
        let mut records = vec![
            record(true, true, 1.0),
            record(true, false, 3.0),
            record(false, true, 3.0),
        ];
        records[2].error = Some("predictor crashed".into());
        let a = Aggregates::compute(&records, 2.0).unwrap();
        assert_eq!(a.errors, 1);
        assert_eq!(a.mr_attack, Some(0.5));
        assert_eq!(a.mr_normal, Some(0.0));
        assert_eq!(a.ade_amplification, Some(2.0));
        assert_eq!(a.orr_normal, None);
        assert_eq!(a.orr_attack, Some(0.25));
        assert_eq!(a.mean_perturbation_distance, Some(0.5));
        assert!((a.asr - 1.0 / 3.0).abs() < 1e-15);
    }
}
