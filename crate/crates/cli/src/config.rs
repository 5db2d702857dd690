// SPDX-License-Identifier: Apache-2.0

//! `key=value` settings for the bench subcommand.

use std::fmt;

use pubo_forge::bench::{choose3, BenchConfig};
use pubo_forge::compile::Strategy;
use pubo_forge::gadget::GadgetMode;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Experiment {
    #[default]
    Ancilla,
    Precision,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Ancilla => "ancilla",
            Experiment::Precision => "precision",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSettings {
    pub experiment: Experiment,
    pub config: BenchConfig,
    /// Sweep every λ in `1..=C(n,3)` instead of the configured grid.
    pub full_sweep: bool,
}

impl BenchSettings {
    pub fn preset(fig: Option<u8>) -> Result<Self, String> {
        let (experiment, config) = match fig {
            None => (Experiment::Ancilla, BenchConfig::default()),
            Some(1) => (Experiment::Ancilla, BenchConfig::ancilla_preset()),
            Some(3) => (Experiment::Precision, BenchConfig::precision_preset()),
            Some(other) => return Err(format!("no preset {other}; use 1 or 3")),
        };
        Ok(BenchSettings {
            experiment,
            config,
            full_sweep: false,
        })
    }

    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.apply(line)
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(())
    }

    /// Apply one `key=value` setting.
    pub fn apply(&mut self, setting: &str) -> Result<(), String> {
        let (key, value) = setting
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got `{setting}`"))?;
        let (key, value) = (key.trim().replace('-', "_"), value.trim());
        let c = &mut self.config;
        match key.as_str() {
            "experiment" => {
                self.experiment = match value {
                    "ancilla" => Experiment::Ancilla,
                    "precision" => Experiment::Precision,
                    _ => return Err(format!("unknown experiment `{value}`")),
                }
            }
            "n" => c.n = num(&key, value)?,
            "lambda" | "lambdas" => c.lambdas = list(value, |v| num(&key, v))?,
            "instances" => c.instances = num(&key, value)?,
            "seed" => c.seed = num(&key, value)?,
            "coeff_min" => c.coeff_min = num(&key, value)?,
            "coeff_max" => c.coeff_max = num(&key, value)?,
            "quadratic_layer" | "include_quadratic_layer" => {
                c.include_quadratic_layer = boolean(&key, value)?
            }
            "strategies" | "strategy" => {
                c.strategies = list(value, |v| Strategy::parse(v).map_err(|e| e.to_string()))?
            }
            "gadgets" | "gadget" => c.gadgets = list(value, gadget)?,
            "ilp_budget" => c.ilp_budget = num(&key, value)?,
            "verify_fraction" => c.verify_fraction = num(&key, value)?,
            "verify_cap" => c.verify_cap = num(&key, value)?,
            "record_timing" => c.record_timing = boolean(&key, value)?,
            "full_sweep" => self.full_sweep = boolean(&key, value)?,
            _ => return Err(format!("unknown setting `{key}`")),
        }
        Ok(())
    }

    pub fn finish(mut self) -> BenchConfig {
        if self.full_sweep {
            self.config.lambdas = (1..=choose3(self.config.n as u64)).collect();
        }
        self.config
    }
}

pub fn gadget(v: &str) -> Result<GadgetMode, String> {
    match v {
        "single" => Ok(GadgetMode::SingleAncilla),
        "triple" => Ok(GadgetMode::TripleAncilla),
        _ => Err(format!("unknown gadget `{v}`; use single or triple")),
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse()
        .map_err(|_| format!("invalid value `{v}` for {key}"))
}

fn boolean(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("invalid value `{v}` for {key}")),
    }
}

fn list<T>(v: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(f)
        .collect()
}
