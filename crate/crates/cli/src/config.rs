//! `key = value` defaults file and its merge into the command line.
//!
//! Keys are long flag names (`rmax`, `initial-width`, `format`, ...; `_` and
//! `-` are interchangeable). A key that belongs to a different subcommand is
//! ignored, an unknown key is an error. Values are appended to the argument
//! list only when the flag was not given explicitly, so clap parses and
//! validates them exactly like typed flags.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command};

use crate::error::CliError;

pub fn load(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected `key = value`", lineno + 1)));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"').to_owned();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", lineno + 1)));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

/// Extra arguments realizing `entries` for the subcommand in `matches`.
pub fn extra_args(
    command: &Command,
    matches: &ArgMatches,
    entries: &[(String, String)],
) -> Result<Vec<OsString>, CliError> {
    let Some((name, sub_matches)) = matches.subcommand() else {
        return Ok(Vec::new());
    };
    let sub = command.find_subcommand(name).expect("matched subcommand exists");
    let mut extra = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        }
        let top = command.get_arguments().find(|a| a.get_long() == Some(key));
        let local = sub.get_arguments().find(|a| a.get_long() == Some(key));
        let (arg, level) = match (top, local) {
            (Some(a), _) => (a, matches),
            (None, Some(a)) => (a, sub_matches),
            (None, None) => {
                let known = command
                    .get_subcommands()
                    .any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)));
                if known {
                    continue;
                }
                return Err(CliError::Usage(format!("unknown config key `{key}`")));
            }
        };
        if level.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(OsString::from(format!("--{key}")));
            extra.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" => extra.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key `{key}` expects true or false"))),
            }
        }
    }
    Ok(extra)
}
