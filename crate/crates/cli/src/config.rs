//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use flevy::sst::Model;
use flevy::{FlpParams, LevyDriverSpec};

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "driver.kind",
    "driver.intensity",
    "driver.jumps",
    "flp.d",
    "flp.n",
    "flp.window_exponent",
    "floup.lambda",
    "floup.cutoff_tol",
    "model.id",
    "model.tau",
    "model.z",
    "ensemble.seed",
    "ensemble.replicates",
    "ensemble.times",
    "ensemble.u",
    "ensemble.lag_min",
    "ensemble.lag_max",
    "ensemble.lags",
    "ensemble.slope_tol",
    "ensemble.reference_d",
    "ensemble.runs",
    "ensemble.instances",
    "ensemble.refinements",
    "output.t_min",
    "output.t_max",
];

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected `key = value`", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !known_key(key) {
                return Err(config_err(format!("line {}: unknown key `{key}`", no + 1)));
            }
            if value.is_empty() {
                return Err(config_err(format!("line {}: `{key}` has no value", no + 1)));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(config_err(format!("line {}: duplicate key `{key}`", no + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| config_err(format!("`{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?.ok_or_else(|| config_err(format!("missing required key `{key}`")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        let v: f64 = self.get_or(key, default)?;
        if !v.is_finite() {
            return Err(config_err(format!("`{key}` must be finite")));
        }
        Ok(v)
    }

    pub fn list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.entries
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| config_err(format!("`{key}`: cannot parse `{}`", x.trim())))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn seed(&self) -> CliResult<u64> {
        self.require("ensemble.seed")
    }

    pub fn driver(&self) -> CliResult<LevyDriverSpec> {
        let seed = self.get_or("ensemble.seed", 0u64)?;
        let intensity = self.f64_or("driver.intensity", 1.0)?;
        let kind: String = self.get_or("driver.kind", "compensated_poisson".to_string())?;
        let spec = match kind.as_str() {
            "compensated_poisson" => {
                if self.contains("driver.jumps") {
                    return Err(config_err("`driver.jumps` needs driver.kind = compound_poisson"));
                }
                LevyDriverSpec::compensated_poisson(intensity, seed)?
            }
            "compound_poisson" => {
                let text: String = self.require("driver.jumps")?;
                let jumps = text
                    .split(',')
                    .map(|pair| {
                        let (size, prob) = pair
                            .split_once(':')
                            .ok_or_else(|| config_err(format!("`driver.jumps`: expected size:probability, got `{pair}`")))?;
                        let p = |s: &str| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|_| config_err(format!("`driver.jumps`: cannot parse `{}`", s.trim())))
                        };
                        Ok((p(size)?, p(prob)?))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                LevyDriverSpec::compound_poisson(intensity, jumps, seed)?
            }
            other => {
                return Err(config_err(format!(
                    "`driver.kind`: expected compensated_poisson or compound_poisson, got `{other}`"
                )))
            }
        };
        Ok(spec)
    }

    pub fn flp(&self) -> CliResult<FlpParams> {
        let p = FlpParams::new(self.f64_or("flp.d", 0.25)?, self.get_or("flp.n", 100usize)?)?;
        Ok(p.with_window_exponent(self.f64_or("flp.window_exponent", 2.0)?)?)
    }

    /// Catalog model from `model.id` and `model.<parameter>` keys.
    pub fn model(&self) -> CliResult<Option<Model>> {
        let Some(id) = self.get::<String>("model.id")? else {
            if let Some(k) = self.model_param_keys().next() {
                return Err(config_err(format!("`{k}` given without `model.id`")));
            }
            return Ok(None);
        };
        let mut params = Vec::new();
        for key in self.model_param_keys() {
            let name = &key["model.".len()..];
            params.push((name.to_string(), self.require::<f64>(key)?));
        }
        Ok(Some(Model::from_params(&id, &params)?))
    }

    fn model_param_keys(&self) -> impl Iterator<Item = &str> {
        self.entries
            .keys()
            .map(String::as_str)
            .filter(|k| k.starts_with("model.") && !KEYS.contains(k))
    }
}

fn known_key(key: &str) -> bool {
    if KEYS.contains(&key) {
        return true;
    }
    // model parameters are checked against the chosen model later
    key.strip_prefix("model.")
        .is_some_and(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rejects_unknown_keys() {
        let c = RunConfig::parse("# header\nflp.d = 0.3 # memory\n\nensemble.seed=7\n").unwrap();
        assert_eq!(c.require::<f64>("flp.d").unwrap(), 0.3);
        assert_eq!(c.seed().unwrap(), 7);
        assert!(RunConfig::parse("flp.dd = 1").is_err());
        assert!(RunConfig::parse("floup.past = 1").is_err());
        assert!(RunConfig::parse("flp.d 0.3").is_err());
        assert!(RunConfig::parse("flp.d = 0.3\nflp.d = 0.2").is_err());
        assert!(RunConfig::parse("flp.d = abc").unwrap().flp().is_err());
    }

    #[test]
    fn seed_is_mandatory() {
        let c = RunConfig::parse("flp.d = 0.3").unwrap();
        assert!(matches!(c.seed(), Err(CliError::Config(_))));
    }

    #[test]
    fn builds_drivers_and_models() {
        let c = RunConfig::parse(
            "driver.kind = compound_poisson\ndriver.jumps = 1:0.5, -1:0.5\ndriver.intensity = 2\nmodel.id = log\nmodel.sigma = 0.5",
        )
        .unwrap();
        assert_eq!(c.driver().unwrap().second_moment(), 2.0);
        assert_eq!(c.model().unwrap(), Some(Model::Log { lambda: 1.0, sigma: 0.5 }));
        let bad = RunConfig::parse("model.id = log\nmodel.gamma = 1").unwrap();
        assert!(bad.model().is_err());
        let zero = RunConfig::parse("driver.intensity = 0").unwrap();
        assert!(matches!(zero.driver().unwrap_err().exit_code(), 2));
    }
}
