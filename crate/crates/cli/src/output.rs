//! Report envelope and file emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use orbitframe::tuples::TupleDiagnostics;
use orbitframe::{Tolerances, Universe};
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

/// Named residuals of a computation; `None` entries are omitted.
#[derive(Default)]
pub struct Residuals(BTreeMap<String, f64>);

impl Residuals {
    pub fn add(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.0.insert(name.into(), value);
        self
    }

    pub fn add_opt(&mut self, name: impl Into<String>, value: Option<f64>) -> &mut Self {
        if let Some(v) = value {
            self.add(name, v);
        }
        self
    }

    pub fn merge(&mut self, other: Residuals) -> &mut Self {
        self.0.extend(other.0);
        self
    }

    pub fn tuple(&mut self, prefix: &str, d: &TupleDiagnostics) -> &mut Self {
        self.add(format!("{prefix}.commutator_norm"), d.commutator_norm)
            .add(format!("{prefix}.commutator_bound"), d.commutator_bound)
            .add(format!("{prefix}.t_sigma_min"), d.t_sigma_min)
            .add(format!("{prefix}.l_sigma_min"), d.l_sigma_min)
            .add_opt(format!("{prefix}.cyclic_defect"), d.cyclic_defect)
            .add_opt(format!("{prefix}.l_cyclic_defect"), d.l_cyclic_defect)
            .add_opt(format!("{prefix}.hardy_tail"), d.hardy_tail)
    }
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    universe: Option<Universe>,
    tolerances: Tolerances,
    inputs: &'a [String],
    residuals: &'a BTreeMap<String, f64>,
    result: &'a R,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    command: &'a str,
    started_unix: f64,
    finished_unix: f64,
    elapsed_seconds: f64,
    files: &'a [String],
}

pub struct Emitter {
    out: PathBuf,
    format: Format,
    command: String,
    seed: Option<u64>,
    tolerances: Tolerances,
    inputs: Vec<String>,
    started: SystemTime,
    written: Vec<String>,
}

fn unix(t: SystemTime) -> f64 {
    t.duration_since(SystemTime::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl Emitter {
    pub fn new(out: &Path, format: Format, command: &str, tolerances: Tolerances) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
        Ok(Emitter {
            out: out.to_path_buf(),
            format,
            command: command.to_string(),
            seed: None,
            tolerances,
            inputs: Vec::new(),
            started: SystemTime::now(),
            written: Vec::new(),
        })
    }

    pub fn set_seed(&mut self, seed: Option<u64>) {
        self.seed = seed;
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    pub fn write_file(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = orbitframe::io::to_json(value)?;
        self.write_file(name, &text)
    }

    /// Writes `<stem>.json` (or `<stem>.csv` with flattened scalars).
    pub fn report<R: Serialize>(
        &mut self,
        stem: &str,
        universe: Option<Universe>,
        residuals: &Residuals,
        result: &R,
    ) -> Result<(), CliError> {
        let envelope = Envelope {
            tool: "orbitframe",
            version: orbitframe::VERSION,
            command: &self.command,
            seed: self.seed,
            universe,
            tolerances: self.tolerances,
            inputs: &self.inputs,
            residuals: &residuals.0,
            result,
        };
        let (name, text) = match self.format {
            Format::Json => (format!("{stem}.json"), orbitframe::io::to_json(&envelope)?),
            Format::Csv => {
                let value = serde_json::to_value(&envelope).map_err(orbitframe::Error::from)?;
                let mut rows = Vec::new();
                flatten("", &value, &mut rows);
                let mut text = String::from("key,value\n");
                for (k, v) in rows {
                    text.push_str(&format!("{k},{v}\n"));
                }
                (format!("{stem}.csv"), text)
            }
        };
        self.write_file(&name, &text)
    }

    /// Timestamps live here so that reports stay byte-identical across runs.
    pub fn finish(mut self) -> Result<(), CliError> {
        let finished = SystemTime::now();
        let files = std::mem::take(&mut self.written);
        let meta = RunMeta {
            command: &self.command,
            started_unix: unix(self.started),
            finished_unix: unix(finished),
            elapsed_seconds: finished
                .duration_since(self.started)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            files: &files,
        };
        let text = orbitframe::io::to_json(&meta)?;
        self.write_file("run_meta.json", &text)
    }
}

/// Scalar leaves of a JSON value as `dotted.path, value`; arrays are skipped.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, out);
            }
        }
        Value::Array(_) => {}
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
