//! Non-uniform frequency sets `λ_{-n..=n}` used as frame indices.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How a pattern was generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingKind {
    Uniform,
    Jittered { theta: f64, seed: u64 },
    Logarithmic { v: f64 },
    /// Read from a file or supplied by the caller.
    Custom,
}

/// Sorted list of `2n+1` real frequencies, in mode units.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPattern {
    lambdas: Vec<f64>,
    n: usize,
    kind: SamplingKind,
}

impl SamplingPattern {
    /// `λ_k = k`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let lambdas = (-(n as i64)..=n as i64).map(|k| k as f64).collect();
        Ok(Self {
            lambdas,
            n,
            kind: SamplingKind::Uniform,
        })
    }

    /// `λ_k = k ± τ_k`, `τ_k ~ U[0, θ]`, with an independent fair sign per node.
    ///
    /// Draws are taken in order `k = -n..=n` from a ChaCha8 stream seeded with
    /// `seed`, so the same `(n, theta, seed)` always yields the same pattern.
    pub fn jittered(n: usize, theta: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(0.0..0.5).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "jitter theta = {theta} must lie in [0, 1/2)"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambdas = (-(n as i64)..=n as i64)
            .map(|k| {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let tau = theta * rng.random::<f64>();
                k as f64 + sign * tau
            })
            .collect();
        Ok(Self {
            lambdas,
            n,
            kind: SamplingKind::Jittered { theta, seed },
        })
    }

    /// Symmetric pattern with `λ_0 = 0` and `|λ_k|` log-spaced from `10^{-v}` to `n`.
    pub fn logarithmic(n: usize, v: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "logarithmic sampling needs n >= 2".into(),
            ));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("v = {v} must be positive")));
        }
        let lo = -v;
        let hi = (n as f64).log10();
        let step = (hi - lo) / (n - 1) as f64;
        let mags: Vec<f64> = (0..n)
            .map(|i| match i {
                0 => 10f64.powf(lo),
                i if i == n - 1 => n as f64,
                i => 10f64.powf(lo + step * i as f64),
            })
            .collect();
        let lambdas = mags
            .iter()
            .rev()
            .map(|m| -m)
            .chain(std::iter::once(0.0))
            .chain(mags.iter().copied())
            .collect();
        Ok(Self {
            lambdas,
            n,
            kind: SamplingKind::Logarithmic { v },
        })
    }

    /// Wrap caller-supplied frequencies; they must be strictly increasing and odd in count.
    pub fn custom(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.len() < 3 || lambdas.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "a pattern needs 2n+1 >= 3 frequencies, got {}",
                lambdas.len()
            )));
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter("non-finite frequency".into()));
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "frequencies must be strictly increasing".into(),
            ));
        }
        let n = lambdas.len() / 2;
        Ok(Self {
            lambdas,
            n,
            kind: SamplingKind::Custom,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn kind(&self) -> SamplingKind {
        self.kind
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `λ_k` for `k ∈ [-n, n]`.
    pub fn lambda(&self, k: i64) -> f64 {
        self.lambdas[(k + self.n as i64) as usize]
    }

    /// Two-column text: `k λ_k` with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.lambdas.iter().enumerate() {
            let k = i as i64 - self.n as i64;
            let _ = writeln!(out, "{k} {l:.16e}");
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Blank lines and `#` comments are skipped.
    pub fn from_text(reader: impl BufRead) -> Result<Self> {
        let mut lambdas = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty());
            let parse_err = |msg: &str| Error::Parse {
                line: no + 1,
                msg: msg.to_string(),
            };
            let k: i64 = cols
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err("expected integer index"))?;
            let l: f64 = cols
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err("expected frequency"))?;
            lambdas.push((k, l));
        }
        lambdas.sort_by_key(|&(k, _)| k);
        let n = lambdas.len() / 2;
        for (i, &(k, _)) in lambdas.iter().enumerate() {
            if k != i as i64 - n as i64 {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("indices must run over -n..=n, found {k}"),
                });
            }
        }
        Self::custom(lambdas.into_iter().map(|(_, l)| l).collect())
    }
}
