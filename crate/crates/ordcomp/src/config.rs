//! Flat `key = value` run configuration files.
//!
//! Keys are long flag names without the leading dashes (`max-depth = 4`,
//! `max_depth = 4` also works). `command = solve` picks the subcommand
//! when none is given on the command line. Boolean flags take `true` or
//! `false`. Flags given on the command line override the file.

use std::ffi::OsString;

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("{path}: line {line}: {msg}")]
pub struct ConfigError {
    pub path: String,
    pub line: usize,
    pub msg: String,
}

/// Parsed `(key, value, line)` triples in file order.
pub fn parse(path: &str, text: &str) -> Result<Vec<(String, String, usize)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| ConfigError { path: path.into(), line: i + 1, msg: msg.into() };
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(err("bad key"));
        }
        out.push((k, v.trim().to_string(), i + 1));
    }
    Ok(out)
}

/// Removes `--config PATH` / `--config=PATH` from `args`, returning the path.
pub fn take_config_flag(args: &mut Vec<OsString>) -> Option<OsString> {
    let i = args.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config="))?;
    let a = args.remove(i);
    let s = a.to_string_lossy();
    if let Some(p) = s.strip_prefix("--config=") {
        return Some(p.into());
    }
    (i < args.len()).then(|| args.remove(i))
}

/// Command line for clap: `prog`, the subcommand, the file's settings as
/// flags, then the user's arguments (minus the subcommand), so that later
/// user flags override file values.
pub fn merge(
    prog: OsString,
    user: Vec<OsString>,
    file: &[(String, String, usize)],
    subcommands: &[&str],
) -> Vec<OsString> {
    let pos = user.iter().position(|a| subcommands.iter().any(|s| a == s));
    let mut user = user;
    let sub = match pos {
        Some(i) => Some(user.remove(i)),
        None => file.iter().find(|(k, _, _)| k == "command").map(|(_, v, _)| OsString::from(v)),
    };
    let mut out = vec![prog];
    out.extend(sub);
    for (k, v, _) in file.iter().filter(|(k, _, _)| k != "command") {
        match v.as_str() {
            "true" => out.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{k}").into());
                out.push(v.into());
            }
        }
    }
    out.extend(user);
    out
}
