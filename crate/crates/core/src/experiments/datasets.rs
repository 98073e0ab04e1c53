use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    /// sin 2πx
    Sin,
    /// Pure N(0, 1) targets.
    Noise,
    /// sin 10πx
    Sin10,
    /// sin(1/x)
    TopSin,
    /// exp(-|x - μ|²/2)
    GaussKernel,
    /// sgn(sin 2πx)
    Square,
}

const NAMES: &str = "sin, noise, sin10, topsin, gausskernel, square";

impl DatasetKind {
    pub const ALL: [DatasetKind; 6] = [
        DatasetKind::Sin,
        DatasetKind::Noise,
        DatasetKind::Sin10,
        DatasetKind::TopSin,
        DatasetKind::GaussKernel,
        DatasetKind::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Sin => "sin",
            DatasetKind::Noise => "noise",
            DatasetKind::Sin10 => "sin10",
            DatasetKind::TopSin => "topsin",
            DatasetKind::GaussKernel => "gausskernel",
            DatasetKind::Square => "square",
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            DatasetKind::TopSin => 10_000,
            _ => 1000,
        }
    }

    /// Hidden units used for this dataset unless overridden.
    pub fn default_hidden_units(self) -> usize {
        match self {
            DatasetKind::Sin10 | DatasetKind::TopSin | DatasetKind::Square => 100,
            _ => 10,
        }
    }

    /// Noise-free target; `None` for the pure noise dataset.
    pub fn target(self, x: f64, mu: f64) -> Option<f64> {
        Some(match self {
            DatasetKind::Sin => (TAU * x).sin(),
            DatasetKind::Noise => return None,
            DatasetKind::Sin10 => (10.0 * PI * x).sin(),
            DatasetKind::TopSin => (1.0 / x).sin(),
            DatasetKind::GaussKernel => (-0.5 * (x - mu).powi(2)).exp(),
            DatasetKind::Square => sgn((TAU * x).sin()),
        })
    }
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or(Error::UnknownName {
                kind: "dataset",
                name: s.to_string(),
                expected: NAMES,
            })
    }
}

/// Points closer than this to 0 are redrawn for sin(1/x).
pub const TOPSIN_EXCLUSION: f64 = 1e-6;

/// s samples with x ~ U(-1, 1). Targets are the named function plus
/// N(0, noise_std²) noise; the noise dataset draws y ~ N(0, 1) and ignores
/// `noise_std`. `mu` is only used by the Gaussian kernel.
pub fn gen_dataset(
    kind: DatasetKind,
    s: usize,
    noise_std: f64,
    mu: f64,
    seed: u64,
) -> Result<Dataset> {
    if s == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be at least 1".into(),
        ));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise std must be non-negative, got {noise_std}"
        )));
    }
    if !mu.is_finite() {
        return Err(Error::InvalidParameter("mu must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(s);
    while x.len() < s {
        let v: f64 = rng.random_range(-1.0..=1.0);
        if kind == DatasetKind::TopSin && v.abs() < TOPSIN_EXCLUSION {
            continue;
        }
        x.push(v);
    }
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let y = x
        .iter()
        .map(|&xi| match kind.target(xi, mu) {
            Some(t) if noise_std > 0.0 => t + noise_std * unit.sample(&mut rng),
            Some(t) => t,
            None => unit.sample(&mut rng),
        })
        .collect();
    Dataset::from_1d(x, y)
}
