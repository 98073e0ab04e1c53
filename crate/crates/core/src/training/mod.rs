//! Backpropagation training of finite shallow networks.

mod ensemble;
mod optim;

pub use ensemble::{
    filter_units, quantile, train_ensemble, EnsembleResult, EnsembleRun, EnsembleUnit, RunFailure,
    DEFAULT_FILTER,
};
pub use optim::{Adam, Lbfgs};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, NetworkParams};
use crate::error::{Error, Result};
use crate::special::Activation;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
    },
    Lbfgs {
        memory: usize,
        line_search_max_steps: usize,
    },
}

impl Optimizer {
    pub fn adam(lr: f64) -> Self {
        Optimizer::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn lbfgs() -> Self {
        Optimizer::Lbfgs {
            memory: 10,
            line_search_max_steps: 20,
        }
    }
}

impl Default for Optimizer {
    fn default() -> Self {
        Self::adam(1e-3)
    }
}

/// Distribution of the hidden parameters (a, b) at initialization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Init {
    /// Uniform on [-scale, scale].
    UniformSymmetric {
        scale: f64,
    },
    Gaussian {
        std: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Hidden units.
    pub p: usize,
    pub optimizer: Optimizer,
    pub epochs: usize,
    /// `None` is full batch. L-BFGS always uses the full batch.
    pub batch_size: Option<usize>,
    pub seed: u64,
    pub init: Init,
    /// Standard deviation of the zero-mean Gaussian for the output weights c.
    pub c_init_std: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            p: 10,
            optimizer: Optimizer::default(),
            epochs: 1000,
            batch_size: None,
            seed: 0,
            init: Init::UniformSymmetric { scale: 1.0 },
            c_init_std: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if self.batch_size == Some(0) {
            return bad("batch size must be at least 1".into());
        }
        match self.optimizer {
            Optimizer::Adam {
                lr,
                beta1,
                beta2,
                eps,
            } => {
                if !(lr > 0.0 && lr.is_finite()) {
                    return bad(format!("learning rate must be positive, got {lr}"));
                }
                if !((0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2)) {
                    return bad("ADAM betas must lie in [0, 1)".into());
                }
                if !(eps > 0.0) {
                    return bad("ADAM eps must be positive".into());
                }
            }
            Optimizer::Lbfgs {
                memory,
                line_search_max_steps,
            } => {
                if memory == 0 || line_search_max_steps == 0 {
                    return bad("L-BFGS memory and line search steps must be at least 1".into());
                }
            }
        }
        let spread = match self.init {
            Init::UniformSymmetric { scale } => scale,
            Init::Gaussian { std } => std,
        };
        if !(spread >= 0.0 && spread.is_finite())
            || !(self.c_init_std >= 0.0 && self.c_init_std.is_finite())
        {
            return bad("initialization scales must be non-negative and finite".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub params: NetworkParams,
    /// Full-data loss at the start of each epoch.
    pub trace: Vec<f64>,
    pub final_loss: f64,
}

fn check_input(theta: &NetworkParams, dim: usize) -> Result<()> {
    if theta.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            got: dim,
        });
    }
    Ok(())
}

/// g(x; θ) = Σ_j c_j σ(a_j·x - b_j)
pub fn forward(theta: &NetworkParams, act: Activation, x: &[f64]) -> Result<f64> {
    check_input(theta, x.len())?;
    Ok(forward_flat(theta.as_slice(), theta.dim(), act, x))
}

fn forward_flat(values: &[f64], dim: usize, act: Activation, x: &[f64]) -> f64 {
    values
        .chunks_exact(dim + 2)
        .map(|u| {
            let z: f64 = u[..dim].iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - u[dim];
            u[dim + 1] * act.eval(z)
        })
        .sum()
}

/// (1/s) Σ_i |y_i - g(x_i; θ)|²
pub fn mse_loss(theta: &NetworkParams, act: Activation, ds: &Dataset) -> Result<f64> {
    check_input(theta, ds.dim())?;
    Ok(loss_flat(theta.as_slice(), act, ds))
}

fn loss_flat(values: &[f64], act: Activation, ds: &Dataset) -> f64 {
    let dim = ds.dim();
    let sum: f64 = ds
        .samples()
        .map(|(x, y)| (forward_flat(values, dim, act, x) - y).powi(2))
        .sum();
    sum / ds.len() as f64
}

/// Gradient of the mean squared error, in the flat layout of [`NetworkParams`].
pub fn grad(theta: &NetworkParams, act: Activation, ds: &Dataset) -> Result<Vec<f64>> {
    check_input(theta, ds.dim())?;
    let mut g = vec![0.0; theta.as_slice().len()];
    loss_and_grad(theta.as_slice(), act, ds, None, &mut g);
    Ok(g)
}

/// Loss and gradient over `batch` (all samples when `None`); overwrites `g`.
fn loss_and_grad(
    values: &[f64],
    act: Activation,
    ds: &Dataset,
    batch: Option<&[usize]>,
    g: &mut [f64],
) -> f64 {
    let dim = ds.dim();
    let stride = dim + 2;
    let p = values.len() / stride;
    g.iter_mut().for_each(|v| *v = 0.0);
    let mut z = vec![0.0; p];
    let mut sig = vec![0.0; p];
    let mut loss = 0.0;

    let mut visit = |i: usize| {
        let x = ds.x(i);
        let mut out = 0.0;
        for (j, u) in values.chunks_exact(stride).enumerate() {
            z[j] = u[..dim].iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - u[dim];
            sig[j] = act.eval(z[j]);
            out += u[dim + 1] * sig[j];
        }
        let r = out - ds.targets()[i];
        loss += r * r;
        for (j, (u, gu)) in values
            .chunks_exact(stride)
            .zip(g.chunks_exact_mut(stride))
            .enumerate()
        {
            let rc = r * u[dim + 1] * act.derivative(z[j]);
            for (ga, xi) in gu[..dim].iter_mut().zip(x) {
                *ga += rc * xi;
            }
            gu[dim] -= rc;
            gu[dim + 1] += r * sig[j];
        }
    };

    let count = match batch {
        Some(idx) => {
            idx.iter().for_each(|&i| visit(i));
            idx.len()
        }
        None => {
            (0..ds.len()).for_each(&mut visit);
            ds.len()
        }
    };
    let scale = 2.0 / count as f64;
    g.iter_mut().for_each(|v| *v *= scale);
    loss / count as f64
}

pub fn init_params(dim: usize, cfg: &TrainConfig, rng: &mut ChaCha8Rng) -> Result<NetworkParams> {
    cfg.validate()?;
    let mut values = Vec::with_capacity(cfg.p * (dim + 2));
    let c_dist =
        Normal::new(0.0, cfg.c_init_std).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    for _ in 0..cfg.p {
        for _ in 0..=dim {
            let v = match cfg.init {
                Init::UniformSymmetric { scale } => {
                    if scale == 0.0 {
                        0.0
                    } else {
                        rng.random_range(-scale..=scale)
                    }
                }
                Init::Gaussian { std } => Normal::new(0.0, std)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?
                    .sample(rng),
            };
            values.push(v);
        }
        values.push(c_dist.sample(rng));
    }
    NetworkParams::from_flat(dim, values)
}

/// Trains one network from the seeded initialization. Deterministic in
/// `cfg.seed`.
pub fn train_one(ds: &Dataset, act: Activation, cfg: &TrainConfig) -> Result<TrainResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = init_params(ds.dim(), cfg, &mut rng)?;
    train_from(ds, act, cfg, init, &mut rng)
}

/// Trains starting at `init`; `rng` drives mini-batch shuffling.
pub fn train_from(
    ds: &Dataset,
    act: Activation,
    cfg: &TrainConfig,
    init: NetworkParams,
    rng: &mut ChaCha8Rng,
) -> Result<TrainResult> {
    cfg.validate()?;
    check_input(&init, ds.dim())?;
    if ds.is_empty() {
        return Err(Error::Empty("training dataset"));
    }
    let dim = ds.dim();
    let mut x = init.into_flat();
    let mut g = vec![0.0; x.len()];
    let mut trace = Vec::with_capacity(cfg.epochs);

    let diverged = |epoch: usize, loss: f64| Error::Diverged { epoch, loss };

    match cfg.optimizer {
        Optimizer::Adam {
            lr,
            beta1,
            beta2,
            eps,
        } => {
            let mut adam = Adam::new(x.len(), lr, beta1, beta2, eps);
            let batch = cfg.batch_size.filter(|&b| b < ds.len());
            let mut order: Vec<usize> = (0..ds.len()).collect();
            for epoch in 0..cfg.epochs {
                match batch {
                    None => {
                        let loss = loss_and_grad(&x, act, ds, None, &mut g);
                        if !loss.is_finite() {
                            return Err(diverged(epoch, loss));
                        }
                        trace.push(loss);
                        adam.step(&mut x, &g);
                    }
                    Some(size) => {
                        let loss = loss_flat(&x, act, ds);
                        if !loss.is_finite() {
                            return Err(diverged(epoch, loss));
                        }
                        trace.push(loss);
                        order.shuffle(rng);
                        for chunk in order.chunks(size) {
                            loss_and_grad(&x, act, ds, Some(chunk), &mut g);
                            adam.step(&mut x, &g);
                        }
                    }
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(diverged(epoch, f64::NAN));
                }
            }
        }
        Optimizer::Lbfgs {
            memory,
            line_search_max_steps,
        } => {
            let mut lbfgs = Lbfgs::new(memory, line_search_max_steps);
            let mut f = loss_and_grad(&x, act, ds, None, &mut g);
            for epoch in 0..cfg.epochs {
                if !f.is_finite() {
                    return Err(diverged(epoch, f));
                }
                trace.push(f);
                f = lbfgs.step(&mut x, f, &mut g, |p, gp| {
                    loss_and_grad(p, act, ds, None, gp)
                });
            }
        }
    }

    let final_loss = loss_flat(&x, act, ds);
    if !final_loss.is_finite() {
        return Err(diverged(cfg.epochs, final_loss));
    }
    Ok(TrainResult {
        params: NetworkParams::from_flat(dim, x)?,
        trace,
        final_loss,
    })
}
