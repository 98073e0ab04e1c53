use rayon::prelude::*;

use super::{train_one, TrainConfig};
use crate::data::{Dataset, NetworkParams, Unit};
use crate::error::{Error, Result};
use crate::special::Activation;

#[derive(Clone, Debug)]
pub struct EnsembleRun {
    pub run: usize,
    pub seed: u64,
    pub params: NetworkParams,
    pub final_loss: f64,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunFailure {
    pub run: usize,
    pub seed: u64,
    pub message: String,
}

/// One hidden unit of one trained network.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleUnit {
    pub run: usize,
    pub index: usize,
    pub unit: Unit,
    pub final_loss: f64,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    /// Successful runs in run order.
    pub runs: Vec<EnsembleRun>,
    pub failures: Vec<RunFailure>,
}

impl EnsembleResult {
    pub fn final_losses(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.final_loss).collect()
    }

    pub fn units(&self) -> Vec<EnsembleUnit> {
        self.runs
            .iter()
            .flat_map(|r| {
                (0..r.params.len()).map(move |j| EnsembleUnit {
                    run: r.run,
                    index: j,
                    unit: r.params.unit(j),
                    final_loss: r.final_loss,
                })
            })
            .collect()
    }

    pub fn filtered_units(&self, low: f64, high: f64) -> Result<Vec<EnsembleUnit>> {
        filter_units(&self.units(), low, high)
    }
}

/// Default quantiles of |c| kept by the noisy-unit filter.
pub const DEFAULT_FILTER: (f64, f64) = (0.02, 0.98);

/// Trains `n` networks with seeds `cfg.seed + r` in parallel. Failed runs are
/// recorded; the call fails unless at least 90% succeed.
pub fn train_ensemble(
    ds: &Dataset,
    act: Activation,
    cfg: &TrainConfig,
    n: usize,
) -> Result<EnsembleResult> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "ensemble size must be at least 1".into(),
        ));
    }
    cfg.validate()?;
    let outcomes: Vec<(usize, u64, Result<super::TrainResult>)> = (0..n)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed.wrapping_add(r as u64);
            let run_cfg = TrainConfig {
                seed,
                ..cfg.clone()
            };
            (r, seed, train_one(ds, act, &run_cfg))
        })
        .collect();

    let mut runs = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for (run, seed, outcome) in outcomes {
        match outcome {
            Ok(res) => runs.push(EnsembleRun {
                run,
                seed,
                params: res.params,
                final_loss: res.final_loss,
                trace: res.trace,
            }),
            Err(e) if e.is_numeric() => failures.push(RunFailure {
                run,
                seed,
                message: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    // ≥ 90% without floating point
    if runs.len() * 10 < n * 9 {
        return Err(Error::EnsembleFailed {
            succeeded: runs.len(),
            total: n,
        });
    }
    Ok(EnsembleResult { runs, failures })
}

/// Empirical quantile with linear interpolation between order statistics
/// (h = (n-1)q). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Keeps units whose |c| lies within the [low, high] quantiles of |c|.
pub fn filter_units(units: &[EnsembleUnit], low: f64, high: f64) -> Result<Vec<EnsembleUnit>> {
    if units.is_empty() {
        return Err(Error::Empty("unit list"));
    }
    if !(0.0 <= low && low < high && high <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantiles must satisfy 0 <= low < high <= 1, got ({low}, {high})"
        )));
    }
    let mut mags: Vec<f64> = units.iter().map(|u| u.unit.c.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let (lo, hi) = (quantile(&mags, low), quantile(&mags, high));
    Ok(units
        .iter()
        .filter(|u| {
            let m = u.unit.c.abs();
            lo <= m && m <= hi
        })
        .cloned()
        .collect())
}
