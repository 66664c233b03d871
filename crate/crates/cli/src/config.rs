//! Flat key-value simulation config files: one `key = value` pair per line,
//! `#` comments, keys validated by name.

use crate::errors::{CliError, CliResult};
use crate::family::build_family;
use sdci_core::selection::{DependencyMode, ProcedureConfig};
use sdci_core::sim::{NoiseModel, SimConfig, ThetaModel};
use std::collections::BTreeMap;

pub struct RawConfig {
    map: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> CliResult<RawConfig> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Parse(format!("config line {}: expected key = value", lineno + 1))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(RawConfig { map })
    }

    fn get(&self, key: &str) -> CliResult<&str> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Parse(format!("config field '{key}' is missing")))
    }

    fn opt(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?.parse::<T>().map_err(|_| {
            CliError::Parse(format!(
                "config field '{key}': bad value {:?}",
                self.get(key).unwrap()
            ))
        })
    }

    fn opt_as<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.opt(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Parse(format!("config field '{key}': bad value {v:?}"))),
        }
    }
}

fn known_key(key: &str) -> bool {
    matches!(
        key,
        "m" | "theta_model"
            | "theta_values"
            | "n_exp"
            | "exp_mean"
            | "n_norm"
            | "norm_mean"
            | "norm_sd"
            | "random_signs"
            | "prior_sd"
            | "pi1"
            | "rho1"
            | "n_subjects"
            | "noise"
            | "dims"
            | "fwhm"
            | "family"
            | "psi"
            | "delta"
            | "q"
            | "dependency"
            | "n_reps"
            | "seed"
            | "theta_fixed"
    )
}

/// Builds a [`SimConfig`] from a parsed file, with optional rep/seed overrides.
pub fn sim_config(
    raw: &RawConfig,
    reps_override: Option<usize>,
    seed_override: Option<u64>,
) -> CliResult<SimConfig> {
    for key in raw.map.keys() {
        if !known_key(key) {
            return Err(CliError::Parse(format!(
                "config field '{key}' is not recognized"
            )));
        }
    }
    let m: usize = raw.parse_as("m")?;

    let theta = match raw.get("theta_model")? {
        "fixed" => {
            let values = raw
                .get("theta_values")?
                .split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CliError::Parse(format!("config field 'theta_values': bad value {v:?}"))
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?;
            ThetaModel::Fixed(values)
        }
        "exp_normal_mix" => ThetaModel::ExpNormalMix {
            n_exp: raw.parse_as("n_exp")?,
            exp_mean: raw.parse_as("exp_mean")?,
            n_norm: raw.parse_as("n_norm")?,
            norm_mean: raw.parse_as("norm_mean")?,
            norm_sd: raw.parse_as("norm_sd")?,
            random_signs: raw.opt_as("random_signs")?.unwrap_or(true),
        },
        "normal_prior" => ThetaModel::NormalPrior {
            sd: raw.parse_as("prior_sd")?,
        },
        "sparse_field" => ThetaModel::SparseField {
            pi1: raw.parse_as("pi1")?,
            rho1: raw.parse_as("rho1")?,
            n_subjects: raw.opt_as("n_subjects")?.unwrap_or(16),
        },
        other => {
            return Err(CliError::Parse(format!(
                "config field 'theta_model': unknown model {other:?}"
            )))
        }
    };

    let noise = match raw.get("noise")? {
        "independent" => NoiseModel::Independent,
        "smoothed_field" => {
            let dims_text = raw.get("dims")?;
            let parts: Vec<usize> = dims_text
                .split('x')
                .map(|p| {
                    p.trim().parse::<usize>().map_err(|_| {
                        CliError::Parse(format!("config field 'dims': bad value {dims_text:?}"))
                    })
                })
                .collect::<CliResult<Vec<usize>>>()?;
            if parts.len() != 3 {
                return Err(CliError::Parse(format!(
                    "config field 'dims': expected AxBxC, got {dims_text:?}"
                )));
            }
            NoiseModel::SmoothedField {
                dims: [parts[0], parts[1], parts[2]],
                fwhm: raw.parse_as("fwhm")?,
            }
        }
        other => {
            return Err(CliError::Parse(format!(
                "config field 'noise': unknown model {other:?}"
            )))
        }
    };

    let family = build_family(raw.get("family")?, raw.opt_as("psi")?, raw.opt_as("delta")?)?;
    let dependency = match raw.opt("dependency").unwrap_or("independent") {
        "independent" => DependencyMode::Independent,
        "general" => DependencyMode::GeneralDependency,
        other => {
            return Err(CliError::Parse(format!(
                "config field 'dependency': expected independent|general, got {other:?}"
            )))
        }
    };

    Ok(SimConfig {
        m,
        theta,
        noise,
        procedure: ProcedureConfig {
            q: raw.parse_as("q")?,
            family,
            dependency,
        },
        n_reps: reps_override
            .map(Ok)
            .unwrap_or_else(|| raw.parse_as("n_reps"))?,
        seed: seed_override
            .map(Ok)
            .unwrap_or_else(|| raw.parse_as("seed"))?,
        theta_fixed: raw.opt_as("theta_fixed")?.unwrap_or(false),
    })
}
