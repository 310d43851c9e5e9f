//! Plain-text `key=value` configuration. Every subcommand declares a key
//! table; values come from the table defaults, then an optional `--config`
//! file, then per-key flags (`--some-key`), later sources winning.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use clap::{Arg, ArgMatches, Command};

use crate::{CliError, Result};

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Flag,
}

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

/// Adds `--config` and one flag per key, and lists the keys with their
/// defaults after the generated help.
pub fn with_keys(mut cmd: Command, keys: &'static [Key]) -> Command {
    cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("key=value configuration file; flags override it"),
    );
    let width = keys.iter().map(|k| k.name.len()).max().unwrap_or(0);
    let mut table = String::from("Configuration keys (key = default):\n");
    for k in keys {
        cmd = cmd.arg(
            Arg::new(k.name)
                .long(flag_name(k.name))
                .value_name("VALUE")
                .help(format!("{} [default: {}]", k.help, display_default(k.default))),
        );
        let _ = writeln!(table, "  {:width$} = {}", k.name, display_default(k.default));
    }
    cmd.after_help(table)
}

fn display_default(d: &str) -> &str {
    if d.is_empty() {
        "(unset)"
    } else {
        d
    }
}

#[derive(Debug, Clone)]
pub struct Resolved {
    values: BTreeMap<&'static str, (String, Source)>,
}

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str, keys: &[Key]) -> Result<Vec<(&'static str, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {}: expected key=value", i + 1)))?;
        let k = k.trim();
        let spec = keys
            .iter()
            .find(|s| s.name == k)
            .ok_or_else(|| CliError::Input(format!("config line {}: unknown key '{k}'", i + 1)))?;
        out.push((spec.name, v.trim().to_string()));
    }
    Ok(out)
}

impl Resolved {
    pub fn from_matches(m: &ArgMatches, keys: &'static [Key]) -> Result<Self> {
        let mut values: BTreeMap<&'static str, (String, Source)> =
            keys.iter().map(|k| (k.name, (k.default.to_string(), Source::Default))).collect();
        if let Some(path) = m.get_one::<String>("config") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read config {path}: {e}")))?;
            for (k, v) in parse_config_text(&text, keys)? {
                values.insert(k, (v, Source::File));
            }
        }
        for k in keys {
            if let Some(v) = m.get_one::<String>(k.name) {
                values.insert(k.name, (v.clone(), Source::Flag));
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> &str {
        &self.values.get(key).unwrap_or_else(|| panic!("undeclared key {key}")).0
    }

    pub fn source(&self, key: &str) -> Source {
        self.values.get(key).map_or(Source::Default, |v| v.1)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key);
        raw.parse::<T>()
            .map_err(|e| CliError::Input(format!("invalid value '{raw}' for {key}: {e}")))
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| CliError::Input(format!("invalid item '{s}' in {key}: {e}")))
            })
            .collect()
    }

    /// Writes every key with its value and origin to the log.
    pub fn log(&self, command: &str) {
        log::info!("resolved config for {command}:");
        for (k, (v, src)) in &self.values {
            let origin = match src {
                Source::Default => "default",
                Source::File => "file",
                Source::Flag => "flag",
            };
            log::info!("  {k} = {v} ({origin})");
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))
}
