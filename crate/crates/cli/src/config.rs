//! Flat key-value experiment files (TOML syntax, one experiment per file).
//!
//! Every lookup records the value it resolved to, defaults included, so the
//! output can echo the complete configuration.

use std::cell::RefCell;
use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::CliError;
use crate::units::{self, Length};
use optomech::superscatterer::SpacingRule;

pub struct Config {
    text: String,
    table: Table,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: Table = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_at(text, s.start));
            CliError::Config { line, message: e.message().trim().to_string() }
        })?;
        for (key, value) in &table {
            if matches!(value, Value::Table(_)) {
                return Err(CliError::Config {
                    line: line_of(text, key),
                    message: format!("section [{key}] not allowed; use flat key = value pairs"),
                });
            }
        }
        Ok(Self { text: text.to_string(), table, resolved: RefCell::new(BTreeMap::new()) })
    }

    pub fn empty() -> Self {
        Self::parse("").expect("empty config parses")
    }

    /// SHA-256 of the config file as given.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }

    /// Every key consulted so far with the value it resolved to.
    pub fn resolved(&self) -> Vec<(String, String)> {
        self.resolved.borrow().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config { line: line_of(&self.text, key), message: format!("{key}: {}", message.into()) }
    }

    /// Rejects keys the experiment does not use.
    pub fn check_known(&self, known: &[&str]) -> Result<(), CliError> {
        for key in self.table.keys() {
            if key != "experiment" && !known.contains(&key.as_str()) {
                return Err(self.error(key, format!("unknown key; expected one of {}", known.join(", "))));
            }
        }
        Ok(())
    }

    /// `experiment = "..."`, when present, must name the subcommand being run.
    pub fn check_experiment(&self, name: &str) -> Result<(), CliError> {
        match self.table.get("experiment") {
            None => Ok(()),
            Some(Value::String(s)) if s == name => Ok(()),
            Some(v) => Err(self.error("experiment", format!("file is for {v}, not {name:?}"))),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = match self.table.get(key) {
            None => default,
            Some(Value::Float(f)) => *f,
            Some(Value::Integer(i)) => *i as f64,
            Some(other) => return Err(self.error(key, format!("expected a number, found {other}"))),
        };
        self.record(key, format!("{v:e}"));
        Ok(v)
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        let v = match self.table.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(other) => return Err(self.error(key, format!("expected a non-negative integer, found {other}"))),
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        let v = match self.table.get(key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(other) => return Err(self.error(key, format!("expected true or false, found {other}"))),
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn str_or(&self, key: &str, default: &str) -> Result<String, CliError> {
        let v = match self.table.get(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(other) => return Err(self.error(key, format!("expected a string, found {other}"))),
        };
        self.record(key, v.clone());
        Ok(v)
    }

    /// Raw text of a unit-annotated quantity, unrecorded.
    fn quantity_text(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.table.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(other) => {
                Err(self.error(key, format!("expected a quantity with unit such as \"1 cm\", found {other}")))
            }
        }
    }

    fn quantity<T>(&self, key: &str, default: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        let text = self.quantity_text(key, default)?;
        let v = parse(&text).map_err(|m| self.error(key, m))?;
        self.record(key, text);
        Ok(v)
    }

    pub fn length_or(&self, key: &str, default: &str) -> Result<Length, CliError> {
        self.quantity(key, default, units::parse_length)
    }

    pub fn metres_or(&self, key: &str, default: &str) -> Result<f64, CliError> {
        self.quantity(key, default, units::parse_metres)
    }

    pub fn frequency_or(&self, key: &str, default: &str) -> Result<f64, CliError> {
        self.quantity(key, default, units::parse_frequency)
    }

    pub fn temperature_or(&self, key: &str, default: &str) -> Result<f64, CliError> {
        self.quantity(key, default, units::parse_temperature)
    }

    pub fn spacing_or(&self, key: &str, default: &str, lambda0: f64) -> Result<SpacingRule, CliError> {
        self.quantity(key, default, |t| units::parse_spacing(t, lambda0))
    }

    /// Array of quantities (strings with units).
    pub fn lengths_or(&self, key: &str, default: &[&str]) -> Result<Vec<Length>, CliError> {
        let items: Vec<String> = match self.table.get(key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    other => Err(self.error(key, format!("expected quantities with units, found {other}"))),
                })
                .collect::<Result<_, _>>()?,
            Some(other) => return Err(self.error(key, format!("expected an array, found {other}"))),
        };
        let parsed = items
            .iter()
            .map(|t| units::parse_length(t).map_err(|m| self.error(key, m)))
            .collect::<Result<Vec<_>, _>>()?;
        self.record(key, format!("[{}]", items.join(", ")));
        Ok(parsed)
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line on which `key` is assigned.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
                || l.strip_prefix(&format!("\"{key}\"")).is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}
