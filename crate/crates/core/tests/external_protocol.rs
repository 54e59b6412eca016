#![cfg(unix)]

use std::time::Duration;

use trajattack::harness::{generate_synthetic_scene, Style, Template};
use trajattack::predictors::{
    ExternalPredictor, PredictError, PredictRequest, Predictor, WIRE_SCHEMA,
};
use trajattack::trajcore::Scene;

fn scene() -> Scene {
    generate_synthetic_scene(Template::Straight, Style::ApolloLike, 6.0, 0).unwrap()
}

fn sh(script: &str, timeout_ms: u64) -> ExternalPredictor {
    ExternalPredictor::spawn(
        "sh",
        &["-c".to_string(), script.to_string()],
        Duration::from_millis(timeout_ms),
    )
    .unwrap()
}

fn points(n: usize, y: f64) -> String {
    let p: Vec<String> = (1..=n).map(|k| format!("[{k}.0,{y}]")).collect();
    format!("[{}]", p.join(","))
}

/// Answers every request with the same prediction for both agents.
fn echo_script(n: usize) -> String {
    format!(
        r#"while read line; do echo '{{"prediction":{{"ego":{},"other":{}}}}}'; done"#,
        points(n, 0.0),
        points(n, 3.5)
    )
}

#[test]
fn fixed_answer_is_returned() {
    let s = scene();
    let p = sh(&echo_script(s.horizon()), 5000);
    for _ in 0..3 {
        let pred = p.predict(&s).unwrap();
        let ego = pred.agent("ego").unwrap();
        assert_eq!(ego.len(), 6);
        assert_eq!((ego[2].x, ego[2].y), (3.0, 0.0));
        assert_eq!(pred.agent("other").unwrap()[0].y, 3.5);
    }
}

#[test]
fn request_matches_wire_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("req.json");
    let s = scene();
    let script = format!(
        r#"read line; printf '%s\n' "$line" > '{}'; echo '{{"prediction":{{"ego":{},"other":{}}}}}'; sleep 1"#,
        path.display(),
        points(s.horizon(), 0.0),
        points(s.horizon(), 3.5)
    );
    let p = sh(&script, 5000);
    p.predict(&s).unwrap();
    let raw = std::fs::read_to_string(&path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&raw).unwrap();
    assert_eq!(value["schema"], WIRE_SCHEMA);
    assert_eq!(value["horizon"], 6);
    assert_eq!(value["dt"], 0.5);
    assert_eq!(value["target"], "ego");
    assert!(value["context"].is_null());
    assert_eq!(value["history"]["ego"].as_array().unwrap().len(), 6);
    assert_eq!(value["history"]["ego"][0].as_array().unwrap().len(), 2);
    let request: PredictRequest = serde_json::from_value(value).unwrap();
    assert_eq!(request, PredictRequest::from_scene(&s));
}

#[test]
fn malformed_json_is_a_schema_error() {
    let p = sh("while read line; do echo 'not json'; done", 5000);
    assert!(matches!(p.predict(&scene()), Err(PredictError::Schema(_))));
}

#[test]
fn wrong_horizon_is_a_mismatch() {
    let s = scene();
    let p = sh(&echo_script(s.horizon() - 1), 5000);
    assert!(matches!(p.predict(&s), Err(PredictError::Mismatch(_))));
}

#[test]
fn missing_agent_is_a_mismatch() {
    let p = sh(
        &format!(
            r#"while read line; do echo '{{"prediction":{{"ego":{}}}}}'; done"#,
            points(6, 0.0)
        ),
        5000,
    );
    assert!(matches!(
        p.predict(&scene()),
        Err(PredictError::Mismatch(_))
    ));
}

#[test]
fn silent_child_times_out() {
    let p = sh("sleep 5", 200);
    let start = std::time::Instant::now();
    assert!(matches!(p.predict(&scene()), Err(PredictError::Timeout(_))));
    assert!(start.elapsed() < Duration::from_secs(3));
}

#[test]
fn exiting_child_reports_closed() {
    let p = sh("exit 0", 5000);
    let err = p.predict(&scene()).unwrap_err();
    assert!(
        matches!(err, PredictError::Closed | PredictError::Io(_)),
        "{err:?}"
    );
}

#[test]
fn missing_program_fails_to_spawn() {
    let err = ExternalPredictor::spawn("/nonexistent/predictor", &[], Duration::from_millis(100))
        .unwrap_err();
    assert!(matches!(err, PredictError::Io(_)));
}
