//! `--config file.json`: keys are long flag names; values fill in flags the
//! user did not pass.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory};
use serde_json::Value;

use crate::args::Cli;

fn explicit(m: &ArgMatches, id: &str) -> bool {
    matches!(
        m.try_get_raw(id).ok().flatten().and_then(|_| m.value_source(id)),
        Some(ValueSource::CommandLine | ValueSource::EnvVariable)
    )
}

fn render(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        other => Some(other.to_string()),
    }
}

/// Returns `argv` with config-file values appended for every flag the user
/// left unset. Usage errors surface as `clap::Error`.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, MergeError> {
    let cmd = Cli::command();
    let m = cmd.clone().try_get_matches_from(&argv).map_err(MergeError::Clap)?;
    let Some(path) = m.get_one::<PathBuf>("config").cloned() else {
        return Ok(argv);
    };
    let extra = extra_args(&cmd, &m, &path).map_err(MergeError::Other)?;
    let mut out = argv;
    out.extend(extra.into_iter().map(OsString::from));
    Ok(out)
}

fn extra_args(cmd: &clap::Command, m: &ArgMatches, path: &PathBuf) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let json: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let Value::Object(map) = json else {
        bail!("config {} must hold a JSON object", path.display());
    };
    let (sub_name, sub_m) = m.subcommand().context("no subcommand")?;
    let sub = cmd.find_subcommand(sub_name).context("unknown subcommand")?;

    let mut extra = vec![];
    for (key, value) in map {
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()) || a.get_id().as_str() == key.replace('-', "_"));
        let Some(arg) = arg else {
            bail!("config key `{key}` is not a flag of `{sub_name}`");
        };
        let id = arg.get_id().as_str();
        if arg.is_positional() || id == "config" || explicit(sub_m, id) || explicit(m, id) {
            continue;
        }
        let long = arg.get_long().expect("non-positional args have a long name");
        let takes_value = arg.get_action().takes_values();
        let items = match &value {
            Value::Array(xs) => xs.clone(),
            v => vec![v.clone()],
        };
        for item in items {
            match (&item, takes_value) {
                (Value::Bool(true), false) => extra.push(format!("--{long}")),
                (Value::Bool(false), false) => {}
                // counted flags such as -v
                (Value::Number(n), false) => {
                    for _ in 0..n.as_u64().unwrap_or(0) {
                        extra.push(format!("--{long}"));
                    }
                }
                _ => {
                    if let Some(s) = render(&item) {
                        extra.push(format!("--{long}={s}"));
                    }
                }
            }
        }
    }
    Ok(extra)
}

#[derive(Debug)]
pub enum MergeError {
    Clap(clap::Error),
    Other(anyhow::Error),
}
