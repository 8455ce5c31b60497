//! Run configuration: which chart, where to sample it and what to check.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Tolerance tiers. Jet-exact quantities are differentiated analytically;
/// stencil quantities once numerically; double-stencil ones twice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Jet,
    Stencil,
    DoubleStencil,
}

impl Tier {
    pub fn default_tolerance(self) -> f64 {
        match self {
            Tier::Jet => 1e-8,
            Tier::Stencil => 1e-5,
            Tier::DoubleStencil => 1e-4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Jet => "jet",
            Tier::Stencil => "stencil",
            Tier::DoubleStencil => "double_stencil",
        }
    }
}

/// One verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Label used in reports; defaults to the chart name.
    #[serde(default)]
    pub name: Option<String>,
    pub chart: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// `[lo, hi]` per coordinate.
    #[serde(rename = "box")]
    pub bounds: [[f64; 2]; 4],
    #[serde(default = "default_resolution")]
    pub resolution: [usize; 4],
    /// Check names; empty selects the chart's default checks.
    #[serde(default)]
    pub checks: Vec<String>,
    /// Overrides keyed by residual name (`check.residual`), check name or tier name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Draw this many random points in the box instead of the grid.
    #[serde(default)]
    pub samples: Option<usize>,
}

fn default_resolution() -> [usize; 4] {
    [1; 4]
}

/// A configuration file holds one run or a list of runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Suite { runs: Vec<Config> },
    Single(Box<Config>),
}

impl ConfigFile {
    pub fn into_runs(self) -> Vec<Config> {
        match self {
            ConfigFile::Suite { runs } => runs,
            ConfigFile::Single(c) => vec![*c],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<Vec<Config>, ConfigError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError(format!("malformed config: {e}")))?;
    let runs = file.into_runs();
    if runs.is_empty() {
        return Err(ConfigError("config contains no runs".into()));
    }
    for r in &runs {
        r.validate()?;
    }
    Ok(runs)
}

impl Config {
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.chart)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (k, [lo, hi]) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(ConfigError(format!("{}: box interval {k} is empty or not finite", self.label())));
            }
        }
        if self.resolution.contains(&0) {
            return Err(ConfigError(format!("{}: resolution must be at least 1 per axis", self.label())));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(ConfigError(format!("{}: tolerance '{k}' = {v} is not a non-negative number", self.label())));
        }
        Ok(())
    }

    /// Grid points in lexicographic order (first axis slowest). An axis with
    /// resolution 1 uses the interval midpoint.
    pub fn grid(&self) -> Vec<[f64; 4]> {
        let axis = |k: usize| -> Vec<f64> {
            let [lo, hi] = self.bounds[k];
            let n = self.resolution[k];
            if n == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        };
        let axes: [Vec<f64>; 4] = std::array::from_fn(axis);
        let mut out = Vec::with_capacity(axes.iter().map(Vec::len).product());
        for &a in &axes[0] {
            for &b in &axes[1] {
                for &c in &axes[2] {
                    for &d in &axes[3] {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
        out
    }

    pub fn center(&self) -> [f64; 4] {
        self.bounds.map(|[lo, hi]| 0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_suite_forms_parse() {
        let one = r#"{"chart": "flat", "box": [[0,1],[0,1],[0,1],[0,1]], "resolution": [2,2,1,1]}"#;
        let runs = parse_config(one).unwrap();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].grid().len(), 4);
        let suite = format!(r#"{{"runs": [{one}, {one}]}}"#);
        assert_eq!(parse_config(&suite).unwrap().len(), 2);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(parse_config("{").is_err());
        assert!(parse_config(r#"{"chart": "flat", "box": [[1,0],[0,1],[0,1],[0,1]]}"#).is_err());
        assert!(parse_config(r#"{"chart": "flat", "box": [[0,1],[0,1],[0,1],[0,1]], "resolution": [0,1,1,1]}"#).is_err());
        assert!(parse_config(r#"{"chart": "flat", "box": [[0,1],[0,1],[0,1],[0,1]], "bogus": 1}"#).is_err());
    }

    #[test]
    fn grid_is_lexicographic_with_midpoints() {
        let c = Config {
            name: None,
            chart: "flat".into(),
            params: BTreeMap::new(),
            bounds: [[0.0, 1.0], [2.0, 4.0], [0.0, 0.0], [0.0, 0.0]],
            resolution: [2, 1, 1, 1],
            checks: vec![],
            tolerances: BTreeMap::new(),
            samples: None,
        };
        assert_eq!(c.grid(), vec![[0.0, 3.0, 0.0, 0.0], [1.0, 3.0, 0.0, 0.0]]);
    }
}
