//! Experiment configuration and its lossless textual form.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use frame_gridding::dcf::{full_bandwidth, log_bandwidth};
use frame_gridding::edge::EpsilonPolicy;
use frame_gridding::gridding::{Filter, Truncation};
use frame_gridding::sampling::SamplingPattern;
use frame_gridding::testfns::PiecewiseFunction;
use frame_gridding::window::WindowSpec;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Serde via `Display`/`FromStr`, for the core types.
mod text {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

macro_rules! serde_as_text {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                text::serialize(self, s)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                text::deserialize(d)
            }
        }
    )*};
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

/// Parses `key=value,key=value` after a `kind:` prefix.
fn key_values(body: &str) -> Result<Vec<(&str, &str)>> {
    body.split(',')
        .filter(|kv| !kv.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| config_err(format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| config_err(format!("`{key}` has unparsable value `{v}`")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionId {
    Ex41,
    Ex42,
}

impl FunctionId {
    pub fn build(self) -> PiecewiseFunction {
        match self {
            FunctionId::Ex41 => PiecewiseFunction::smooth_example(),
            FunctionId::Ex42 => PiecewiseFunction::jump_example(),
        }
    }
}

impl FromStr for FunctionId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ex41" => Ok(FunctionId::Ex41),
            "ex42" => Ok(FunctionId::Ex42),
            other => Err(config_err(format!("unknown function `{other}` (ex41 | ex42)"))),
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionId::Ex41 => "ex41",
            FunctionId::Ex42 => "ex42",
        })
    }
}

/// Sampling scheme without its seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingSpec {
    Uniform { n: usize },
    Jittered { n: usize, theta: f64 },
    Log { n: usize, v: f64 },
}

impl SamplingSpec {
    pub fn n(&self) -> usize {
        match *self {
            SamplingSpec::Uniform { n } | SamplingSpec::Jittered { n, .. } | SamplingSpec::Log { n, .. } => n,
        }
    }

    pub fn with_n(self, n: usize) -> Self {
        match self {
            SamplingSpec::Uniform { .. } => SamplingSpec::Uniform { n },
            SamplingSpec::Jittered { theta, .. } => SamplingSpec::Jittered { n, theta },
            SamplingSpec::Log { v, .. } => SamplingSpec::Log { n, v },
        }
    }

    pub fn build(&self, seed: u64) -> Result<SamplingPattern> {
        Ok(match *self {
            SamplingSpec::Uniform { n } => SamplingPattern::uniform(n)?,
            SamplingSpec::Jittered { n, theta } => SamplingPattern::jittered(n, theta, seed)?,
            SamplingSpec::Log { n, v } => SamplingPattern::logarithmic(n, v)?,
        })
    }
}

impl FromStr for SamplingSpec {
    type Err = HarnessError;

    /// `uniform:n=..`, `jittered:n=..,theta=..`, `log:n=..,v=..`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let (mut n, mut theta, mut v) = (None, 0.25, 1.0);
        for (k, val) in key_values(body)? {
            match k {
                "n" => n = Some(parse_num::<usize>(k, val)?),
                "theta" if kind == "jittered" => theta = parse_num(k, val)?,
                "v" if kind == "log" => v = parse_num(k, val)?,
                _ => return Err(config_err(format!("`{k}` is not a parameter of `{kind}` sampling"))),
            }
        }
        let n = n.ok_or_else(|| config_err(format!("sampling `{s}` needs n=<count>")))?;
        match kind {
            "uniform" => Ok(SamplingSpec::Uniform { n }),
            "jittered" => Ok(SamplingSpec::Jittered { n, theta }),
            "log" => Ok(SamplingSpec::Log { n, v }),
            other => Err(config_err(format!(
                "unknown sampling `{other}` (uniform | jittered | log)"
            ))),
        }
    }
}

impl fmt::Display for SamplingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingSpec::Uniform { n } => write!(f, "uniform:n={n}"),
            SamplingSpec::Jittered { n, theta } => write!(f, "jittered:n={n},theta={theta}"),
            SamplingSpec::Log { n, v } => write!(f, "log:n={n},v={v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Frame approximation through `Ψ†`.
    Fa,
    /// Traditional gridding with trapezoidal weights.
    Cg,
    /// Gridding with optimal banded density compensation.
    Fcg,
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fa" => Ok(Method::Fa),
            "cg" => Ok(Method::Cg),
            "fcg" => Ok(Method::Fcg),
            other => Err(config_err(format!("unknown method `{other}` (fa | cg | fcg)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fa => "fa",
            Method::Cg => "cg",
            Method::Fcg => "fcg",
        })
    }
}

/// How the DCF bandwidth `r` follows `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthPolicy {
    Fixed(usize),
    /// `max(1, ⌈log₂ n⌉)`
    Log,
    /// Band covering the whole matrix.
    Full,
}

impl BandwidthPolicy {
    pub fn resolve(self, n: usize) -> Result<usize> {
        match self {
            BandwidthPolicy::Fixed(r) if r >= 1 && r <= full_bandwidth(n) => Ok(r),
            BandwidthPolicy::Fixed(r) => Err(config_err(format!(
                "bandwidth r = {r} outside [1, {}] for n = {n}",
                full_bandwidth(n)
            ))),
            BandwidthPolicy::Log => Ok(log_bandwidth(n)),
            BandwidthPolicy::Full => Ok(full_bandwidth(n)),
        }
    }
}

impl FromStr for BandwidthPolicy {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "log" => Ok(BandwidthPolicy::Log),
            "full" => Ok(BandwidthPolicy::Full),
            other => match other.parse::<usize>() {
                Ok(r) if r >= 1 => Ok(BandwidthPolicy::Fixed(r)),
                _ => Err(config_err(format!(
                    "bandwidth `{other}` (positive integer | log | full)"
                ))),
            },
        }
    }
}

impl fmt::Display for BandwidthPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthPolicy::Fixed(r) => write!(f, "{r}"),
            BandwidthPolicy::Log => f.write_str("log"),
            BandwidthPolicy::Full => f.write_str("full"),
        }
    }
}

/// Standard deviation of complex Gaussian noise added to `f̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
}

impl FromStr for NoiseSpec {
    type Err = HarnessError;

    /// `sigma=<real>`
    fn from_str(s: &str) -> Result<Self> {
        match key_values(s.trim())?.as_slice() {
            [("sigma", v)] => {
                let sigma: f64 = parse_num("sigma", v)?;
                if sigma >= 0.0 && sigma.is_finite() {
                    Ok(NoiseSpec { sigma })
                } else {
                    Err(config_err(format!("noise sigma must be finite and >= 0, got {sigma}")))
                }
            }
            _ => Err(config_err(format!("noise `{s}` (expected sigma=<real>)"))),
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma={}", self.sigma)
    }
}

serde_as_text!(FunctionId, SamplingSpec, Method, BandwidthPolicy, NoiseSpec);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sample,
    Dcf,
    Reconstruct,
    Convergence,
    Edges,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Sample => "sample",
            Command::Dcf => "dcf",
            Command::Reconstruct => "reconstruct",
            Command::Convergence => "convergence",
            Command::Edges => "edges",
        })
    }
}

/// Everything that determines an experiment's output. Output paths are not
/// part of it, so the same experiment written to two places embeds the same
/// provenance header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub function: FunctionId,
    pub sampling: SamplingSpec,
    /// Measured `(λ, Re f̂, Im f̂)` rows replacing the generated samples.
    pub samples_file: Option<PathBuf>,
    #[serde(with = "text")]
    pub window: WindowSpec,
    pub method: Method,
    pub r: BandwidthPolicy,
    pub m_factor: f64,
    pub grid: Option<usize>,
    pub seed: u64,
    pub noise: Option<NoiseSpec>,
    #[serde(with = "text")]
    pub q: Truncation,
    #[serde(with = "text")]
    pub filter: Filter,
    pub dcf_real: bool,
    #[serde(with = "text")]
    pub eps_policy: EpsilonPolicy,
    pub threshold: f64,
    pub n_list: Vec<usize>,
    pub r_list: Vec<BandwidthPolicy>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            function: FunctionId::Ex41,
            sampling: SamplingSpec::Jittered { n: 32, theta: 0.25 },
            samples_file: None,
            window: WindowSpec::Exponential { a: 5e-5 },
            method: Method::Fcg,
            r: BandwidthPolicy::Log,
            m_factor: 1.0,
            grid: None,
            seed: 0,
            noise: None,
            q: Truncation::Full,
            filter: Filter::None,
            dcf_real: false,
            eps_policy: EpsilonPolicy::default(),
            threshold: 0.3,
            n_list: vec![16, 32, 64, 128],
            r_list: vec![
                BandwidthPolicy::Fixed(1),
                BandwidthPolicy::Log,
                BandwidthPolicy::Full,
            ],
        }
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("config fields serialize infallibly")
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| config_err(format!("config text: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks cross-field constraints that individual parsers cannot see.
    pub fn validate(&self) -> Result<()> {
        if !(self.m_factor >= 1.0 && self.m_factor.is_finite()) {
            return Err(config_err(format!("--m-factor must be >= 1, got {}", self.m_factor)));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(config_err(format!("--threshold must lie in (0, 1), got {}", self.threshold)));
        }
        if self.sampling.n() == 0 {
            return Err(config_err("sampling needs n >= 1"));
        }
        if self.command == Command::Convergence {
            if self.n_list.is_empty() || self.n_list.contains(&0) {
                return Err(config_err("--n-list needs positive sizes"));
            }
            if self.r_list.is_empty() {
                return Err(config_err("--r-list is empty"));
            }
            if self.samples_file.is_some() {
                return Err(config_err("convergence sweeps generate their own samples; drop --samples"));
            }
        }
        if self.q != Truncation::Full && self.method == Method::Fa {
            return Err(config_err("--q applies to gridding methods, not fa"));
        }
        Ok(())
    }
}
