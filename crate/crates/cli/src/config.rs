//! Run configuration: a flat `key = value` file merged with command-line flags.
//!
//! Precedence is flag > file > default. Recognised keys:
//! `mode`, `problem`, `m`, `backend`, `theta`, `reference`, `n_list`, `tol`,
//! `k0`, `k_max`, `out`. Lines starting with `#` are comments.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use ifmid_core::bench::{ProblemId, ProblemSpec, Reference};
use ifmid_core::Backend;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Converge,
    Adapt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKey {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
}

impl From<ProblemKey> for ProblemId {
    fn from(p: ProblemKey) -> Self {
        match p {
            ProblemKey::Ex1 => ProblemId::Ex1,
            ProblemKey::Ex2 => ProblemId::Ex2,
            ProblemKey::Ex3 => ProblemId::Ex3,
            ProblemKey::Ex4 => ProblemId::Ex4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKey {
    Spectral,
    Dense,
}

impl From<BackendKey> for Backend {
    fn from(b: BackendKey) -> Self {
        match b {
            BackendKey::Spectral => Backend::Spectral,
            BackendKey::Dense => Backend::DensePade,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKey {
    /// Exact solution of the semi-discrete system
    SemiDiscrete,
    /// Continuous solution sampled on the grid
    Sampled,
}

impl From<ReferenceKey> for Reference {
    fn from(r: ReferenceKey) -> Self {
        match r {
            ReferenceKey::SemiDiscrete => Reference::SemiDiscrete,
            ReferenceKey::Sampled => Reference::Sampled,
        }
    }
}

macro_rules! parse_via_clap {
    ($($t:ty),*) => {$(
        impl FromStr for $t {
            type Err = anyhow::Error;
            fn from_str(s: &str) -> Result<Self> {
                <$t as clap::ValueEnum>::from_str(s.trim(), true).map_err(|e| anyhow!(e))
            }
        }
    )*};
}
parse_via_clap!(Mode, ProblemKey, BackendKey, ReferenceKey);

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Converge => "converge",
            Mode::Adapt => "adapt",
        })
    }
}

/// The fully resolved configuration of one run. Only the keys used by `mode`
/// are populated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub problem: ProblemKey,
    pub m: usize,
    pub backend: BackendKey,
    pub theta: f64,
    pub reference: ReferenceKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    pub out: PathBuf,
}

/// Every setting optional; one of these comes from the file, one from the flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    pub problem: Option<ProblemKey>,
    pub m: Option<usize>,
    pub backend: Option<BackendKey>,
    pub theta: Option<f64>,
    pub reference: Option<ReferenceKey>,
    pub n_list: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub k0: Option<f64>,
    pub k_max: Option<f64>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

/// Parses a comma- or whitespace-separated list of step counts.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| parse_value::<usize>("n_list", p))
        .collect()
}

impl PartialConfig {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                bail!("line {}: duplicate key `{key}`", lineno + 1);
            }
            let at = || format!("line {}", lineno + 1);
            match key {
                "mode" => cfg.mode = Some(parse_value(key, value).with_context(at)?),
                "problem" => cfg.problem = Some(parse_value(key, value).with_context(at)?),
                "m" => cfg.m = Some(parse_value(key, value).with_context(at)?),
                "backend" => cfg.backend = Some(parse_value(key, value).with_context(at)?),
                "theta" => cfg.theta = Some(parse_value(key, value).with_context(at)?),
                "reference" => cfg.reference = Some(parse_value(key, value).with_context(at)?),
                "n_list" => cfg.n_list = Some(parse_n_list(value).with_context(at)?),
                "tol" => cfg.tol = Some(parse_value(key, value).with_context(at)?),
                "k0" => cfg.k0 = Some(parse_value(key, value).with_context(at)?),
                "k_max" => cfg.k_max = Some(parse_value(key, value).with_context(at)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => bail!("line {}: unknown key `{other}`", lineno + 1),
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse_str(&text).with_context(|| format!("in config file {}", path.display()))
    }

    /// Fields of `self` win over those of `lower`.
    pub fn over(self, lower: PartialConfig) -> PartialConfig {
        PartialConfig {
            mode: self.mode.or(lower.mode),
            problem: self.problem.or(lower.problem),
            m: self.m.or(lower.m),
            backend: self.backend.or(lower.backend),
            theta: self.theta.or(lower.theta),
            reference: self.reference.or(lower.reference),
            n_list: self.n_list.or(lower.n_list),
            tol: self.tol.or(lower.tol),
            k0: self.k0.or(lower.k0),
            k_max: self.k_max.or(lower.k_max),
            out: self.out.or(lower.out),
        }
    }

    /// Fills defaults and checks the result.
    pub fn resolve(self, mode: Mode) -> Result<RunConfig> {
        if let Some(file_mode) = self.mode {
            if file_mode != mode {
                bail!("config sets mode `{file_mode}` but the `{mode}` subcommand was used");
            }
        }
        let problem = self.problem.unwrap_or(ProblemKey::Ex1);
        let spec = ProblemSpec::new(problem.into());
        let m = self.m.unwrap_or(199);
        if m == 0 {
            bail!("m must be at least 1");
        }
        let theta = self.theta.unwrap_or_else(|| spec.default_theta());
        if !(theta > 0.0 && theta < 0.5) {
            bail!("theta must lie in (0, 1/2), got {theta}");
        }
        let mut cfg = RunConfig {
            mode,
            problem,
            m,
            backend: self.backend.unwrap_or(BackendKey::Spectral),
            theta,
            reference: self.reference.unwrap_or(ReferenceKey::SemiDiscrete),
            n_list: None,
            tol: None,
            k0: None,
            k_max: None,
            out: self.out.unwrap_or_else(|| PathBuf::from("out")),
        };
        match mode {
            Mode::Converge => {
                let n_list = self.n_list.unwrap_or_else(|| vec![16, 32, 64, 128]);
                if n_list.is_empty() {
                    bail!("no step counts given");
                }
                if n_list.contains(&0) {
                    bail!("step counts must be positive");
                }
                cfg.n_list = Some(n_list);
            }
            Mode::Adapt => {
                let (k0, k_max) = default_steps(problem);
                let tol = self.tol.unwrap_or(0.1);
                let k0 = self.k0.unwrap_or(k0);
                let k_max = self.k_max.unwrap_or(k_max.max(k0));
                for (name, v) in [("tol", tol), ("k0", k0), ("k_max", k_max)] {
                    if !(v > 0.0 && v.is_finite()) {
                        bail!("{name} must be positive, got {v}");
                    }
                }
                if k_max < k0 {
                    bail!("k_max ({k_max}) must not be smaller than k0 ({k0})");
                }
                cfg.tol = Some(tol);
                cfg.k0 = Some(k0);
                cfg.k_max = Some(k_max);
            }
        }
        Ok(cfg)
    }
}

/// `(k0, k_max)` used when none are given.
fn default_steps(problem: ProblemKey) -> (f64, f64) {
    match problem {
        ProblemKey::Ex4 => (0.1, 0.12),
        _ => (1.0 / 60.0, 0.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text() {
        let text = "# sweep\nproblem = ex2\nm=63\nn_list = 16, 32 64\nbackend = dense\n\n";
        let p = PartialConfig::parse_str(text).unwrap();
        assert_eq!(p.problem, Some(ProblemKey::Ex2));
        assert_eq!(p.m, Some(63));
        assert_eq!(p.n_list, Some(vec![16, 32, 64]));
        assert_eq!(p.backend, Some(BackendKey::Dense));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let e = PartialConfig::parse_str("colour = red").unwrap_err();
        assert!(e.to_string().contains("unknown key `colour`"));
        let e = PartialConfig::parse_str("m = 3\nm = 4").unwrap_err();
        assert!(e.to_string().contains("duplicate key"));
        assert!(PartialConfig::parse_str("just words").is_err());
        assert!(PartialConfig::parse_str("m = many").is_err());
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = PartialConfig::parse_str("m = 50\ntheta = 0.2\nproblem = ex3").unwrap();
        let flags = PartialConfig {
            m: Some(80),
            ..Default::default()
        };
        let cfg = flags.over(file).resolve(Mode::Adapt).unwrap();
        assert_eq!(cfg.m, 80);
        assert_eq!(cfg.theta, 0.2);
        assert_eq!(cfg.problem, ProblemKey::Ex3);
        assert_eq!(cfg.k0, Some(1.0 / 60.0));
        assert_eq!(cfg.n_list, None);
    }

    #[test]
    fn empty_step_list_is_an_error() {
        let p = PartialConfig {
            n_list: Some(vec![]),
            ..Default::default()
        };
        let e = p.resolve(Mode::Converge).unwrap_err();
        assert_eq!(e.to_string(), "no step counts given");
        assert!(parse_n_list(" , ").unwrap().is_empty());
    }

    #[test]
    fn mode_conflict_is_an_error() {
        let p = PartialConfig::parse_str("mode = adapt").unwrap();
        assert!(p.resolve(Mode::Converge).is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = PartialConfig::default().resolve(Mode::Converge).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert!(
            serde_json::from_str::<RunConfig>(&text.replacen('{', "{\"extra\":1,", 1)).is_err()
        );
    }
}
