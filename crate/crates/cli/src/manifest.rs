use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// `{"experiments": [{"name": ..., "spec": "path.json"}, ...]}`; an entry may
/// also inline its spec with `command`/`seed`/`params` instead of `spec`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub experiments: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct ManifestEntry {
    pub name: String,
    pub spec: Option<PathBuf>,
    #[serde(flatten)]
    pub inline: Option<ExperimentSpec>,
}

/// One experiment: a subcommand, its seed and its flags.
#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct ExperimentSpec {
    pub command: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

fn json_error(e: serde_json::Error) -> CliError {
    CliError::Usage(format!(
        "invalid JSON at line {}, column {}: {}",
        e.line(),
        e.column(),
        metric_lab::format::json_message(&e)
    ))
}

pub fn read_manifest(text: &str) -> Result<Manifest, CliError> {
    serde_json::from_str(text).map_err(json_error)
}

pub(crate) fn read_spec(text: &str) -> Result<ExperimentSpec, CliError> {
    serde_json::from_str(text).map_err(json_error)
}

const SEEDED: [&str; 4] = ["gh", "scan", "qs", "boundary"];

fn path_keys(command: &str) -> &'static [&'static str] {
    match command {
        "validate" => &["space"],
        "gh" => &["x", "y", "out"],
        "qs" => &["domain", "codomain", "map", "out"],
        _ => &["out"],
    }
}

/// Turns a spec into an argument vector. Path-valued flags are resolved
/// against `base_dir`; `true` becomes a bare flag, `false` is dropped and
/// arrays are comma-joined.
pub fn spec_to_argv(spec: &ExperimentSpec, base_dir: &Path) -> Result<Vec<String>, CliError> {
    if spec.command == "reproduce" {
        return Err(CliError::Usage("manifests cannot nest reproduce".into()));
    }
    let mut argv = vec!["metric-lab".to_string(), spec.command.clone()];
    if let Some(seed) = spec.seed {
        if !SEEDED.contains(&spec.command.as_str()) {
            return Err(CliError::Usage(format!("{} takes no seed", spec.command)));
        }
        argv.push("--seed".into());
        argv.push(seed.to_string());
    }
    for (key, value) in &spec.params {
        let flag = format!("--{}", key.replace('_', "-"));
        let text = match value {
            Value::Bool(true) => {
                argv.push(flag);
                continue;
            }
            Value::Bool(false) | Value::Null => continue,
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(CliError::Usage(format!("param {key}: unsupported list item {v}"))),
                })
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
            Value::Object(_) => return Err(CliError::Usage(format!("param {key}: objects are not flags"))),
        };
        let text = if path_keys(&spec.command).contains(&key.as_str()) {
            base_dir.join(text).to_string_lossy().into_owned()
        } else {
            text
        };
        argv.push(flag);
        argv.push(text);
    }
    Ok(argv)
}

/// The declared output path of a spec, resolved like its flags.
pub(crate) fn declared_output(spec: &ExperimentSpec, base_dir: &Path) -> Option<PathBuf> {
    spec.params.get("out").and_then(Value::as_str).map(|p| base_dir.join(p))
}
