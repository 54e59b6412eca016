//! Adapter for predictors living in a child process.
//!
//! The child reads one JSON request per line on stdin and answers with one
//! JSON line on stdout:
//!
//! ```text
//! -> {"schema":"dtp-predict/1","dt":0.5,"horizon":12,"target":"a1","history":{"a1":[[x,y],...]},"context":null}
//! <- {"prediction":{"a1":[[x,y],...]}}
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{PredictError, Predictor};
use crate::trajcore::{AgentId, Point2, Prediction, Scene};

pub const WIRE_SCHEMA: &str = "dtp-predict/1";
pub(super) const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub schema: String,
    pub dt: f64,
    pub horizon: usize,
    pub target: AgentId,
    pub history: BTreeMap<AgentId, Vec<Point2>>,
    /// Reserved; always null for now.
    pub context: Option<serde_json::Value>,
}

impl PredictRequest {
    pub fn from_scene(scene: &Scene) -> Self {
        Self {
            schema: WIRE_SCHEMA.to_owned(),
            dt: scene.dt(),
            horizon: scene.horizon(),
            target: scene.target().to_owned(),
            history: scene
                .histories()
                .iter()
                .map(|(id, t)| (id.clone(), t.points()))
                .collect(),
            context: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub prediction: BTreeMap<AgentId, Vec<Point2>>,
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

/// A predictor process speaking the line protocol. Requests are serialized:
/// at most one is in flight per process.
pub struct ExternalPredictor {
    program: String,
    timeout: Duration,
    channel: Mutex<Channel>,
}

impl fmt::Debug for ExternalPredictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExternalPredictor")
            .field("program", &self.program)
            .field("timeout", &self.timeout)
            .finish_non_exhaustive()
    }
}

impl ExternalPredictor {
    pub fn spawn(program: &str, args: &[String], timeout: Duration) -> Result<Self, PredictError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().ok_or(PredictError::Closed)?;
        let stdout = child.stdout.take().ok_or(PredictError::Closed)?;
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            program: program.to_owned(),
            timeout,
            channel: Mutex::new(Channel {
                child,
                stdin,
                lines: rx,
            }),
        })
    }

    fn roundtrip(&self, request: &str) -> Result<String, PredictError> {
        let mut ch = self.channel.lock().unwrap_or_else(|e| e.into_inner());
        ch.stdin.write_all(request.as_bytes())?;
        ch.stdin.write_all(b"\n")?;
        ch.stdin.flush()?;
        match ch.lines.recv_timeout(self.timeout) {
            Ok(line) => Ok(line?),
            Err(RecvTimeoutError::Timeout) => Err(PredictError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(PredictError::Closed),
        }
    }
}

impl Predictor for ExternalPredictor {
    fn predict(&self, scene: &Scene) -> Result<Prediction, PredictError> {
        let request = serde_json::to_string(&PredictRequest::from_scene(scene))
            .map_err(|e| PredictError::Schema(e.to_string()))?;
        let line = self.roundtrip(&request)?;
        let response: PredictResponse = serde_json::from_str(line.trim_end())
            .map_err(|e| PredictError::Schema(e.to_string()))?;
        let prediction = Prediction::new(response.prediction);
        prediction.validate_against(scene)?;
        Ok(prediction)
    }
}

impl Drop for ExternalPredictor {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|e| e.into_inner());
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}
