//! Merges a JSON config file into the argument list.
//!
//! Each `key: value` pair of the file becomes `--key value` placed ahead of
//! the user's flags, so flags given on the command line win.

use std::ffi::OsString;

use serde_json::{Map, Value};

use crate::error::CliError;

fn take_config_path(args: &mut Vec<String>) -> Result<Option<String>, CliError> {
    let mut path = None;
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::usage("missing value for 'config'"));
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(path)
}

fn scalar_token(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(CliError::usage(format!("invalid value for '{key}': expected a scalar entry"))),
    }
}

/// Arrays become `a,b,c`; arrays of arrays become matrix literals `a,b;c,d`.
fn value_token(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::Array(items) => {
            let nested = items.iter().any(Value::is_array);
            let parts = items
                .iter()
                .map(|item| match item {
                    Value::Array(row) if nested => row
                        .iter()
                        .map(|x| scalar_token(key, x))
                        .collect::<Result<Vec<_>, _>>()
                        .map(|r| r.join(",")),
                    other => scalar_token(key, other),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(parts.join(if nested { ";" } else { "," }))
        }
        Value::Object(_) => Err(CliError::usage(format!("invalid value for '{key}': nested objects are not accepted"))),
        other => scalar_token(key, other),
    }
}

fn config_tokens(cmd: &clap::Command, sub: &str, map: &Map<String, Value>) -> Result<Vec<String>, CliError> {
    let sub_cmd = cmd
        .find_subcommand(sub)
        .ok_or_else(|| CliError::usage(format!("unknown subcommand '{sub}'")))?;
    let mut tokens = Vec::new();
    for (raw_key, value) in map {
        if raw_key == "subcommand" {
            continue;
        }
        let key = raw_key.replace('_', "-");
        let arg = sub_cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| CliError::usage(format!("unknown config key '{raw_key}' for subcommand '{sub}'")))?;
        let flag = !arg.get_action().takes_values();
        match value {
            Value::Null => {}
            Value::Bool(b) if flag => {
                if *b {
                    tokens.push(format!("--{key}"));
                }
            }
            _ if flag => {
                return Err(CliError::usage(format!("invalid value for '{raw_key}': expected true or false")));
            }
            v => {
                tokens.push(format!("--{key}"));
                tokens.push(value_token(raw_key, v)?);
            }
        }
    }
    Ok(tokens)
}

/// Full argument list, program name first, with config-file entries spliced in.
pub fn expand_args(cmd: &clap::Command, argv: Vec<String>) -> Result<Vec<OsString>, CliError> {
    let mut args: Vec<String> = argv;
    let program = if args.is_empty() { "rmtlab".to_string() } else { args.remove(0) };
    let Some(path) = take_config_path(&mut args)? else {
        return Ok(std::iter::once(program).chain(args).map(OsString::from).collect());
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::usage(format!("cannot read config '{path}': {e}")))?;
    expand_with_text(cmd, program, args, &text)
}

fn expand_with_text(
    cmd: &clap::Command,
    program: String,
    mut args: Vec<String>,
    text: &str,
) -> Result<Vec<OsString>, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::usage(format!("invalid value for 'config': {e}")))?;
    let Value::Object(map) = value else {
        return Err(CliError::usage("invalid value for 'config': expected a JSON object"));
    };
    let from_args = args
        .first()
        .filter(|a| cmd.find_subcommand(a.as_str()).is_some())
        .cloned();
    let from_file = match map.get("subcommand") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(CliError::usage("invalid value for 'subcommand': expected a string")),
    };
    let sub = match (from_args.as_ref(), from_file) {
        (Some(a), Some(f)) if *a != f => {
            return Err(CliError::usage(format!(
                "invalid value for 'subcommand': config says '{f}' but the command line says '{a}'"
            )))
        }
        (Some(a), _) => a.clone(),
        (None, Some(f)) => f,
        (None, None) => return Err(CliError::usage("missing value for 'subcommand'")),
    };
    if from_args.is_some() {
        args.remove(0);
    }
    let tokens = config_tokens(cmd, &sub, &map)?;
    Ok(std::iter::once(program)
        .chain(std::iter::once(sub))
        .chain(tokens)
        .chain(args)
        .map(OsString::from)
        .collect())
}
