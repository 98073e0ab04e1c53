//! Operator calculus on L²(λ) and L²(μ).
//!
//! * `S : L²(λ) → L²(μ)`, `S[γ](x) = Σ_k w_k γ_k σ(a_k·x - b_k)` (integral
//!   representation of a network on the atoms of λ)
//! * `S* = R_{ρ_σ}`, `S*[f]_k = (1/s) Σ_i f_i σ(a_k·x_i - b_k)`
//! * `T = S*S` with kernel `K((a,b),(a',b')) = (1/s) Σ_i σ(a·x_i-b) σ(a'·x_i-b')`
//! * the Tikhonov minimizer `γ* = (β + T)⁻¹ S* f` and the kernel ρ* with
//!   `(β + T) ρ*(x_i, ·) = σ_{x_i}`, so that `R_{ρ*} f = γ*`.
//!
//! μ is always the empirical measure of a [`Dataset`].

mod cg;
mod gram;
mod ridgelet;
mod solve;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::data::{dot, Coefficient, Dataset, ParamMeasure, Scalar};
use crate::error::{Error, Result};
use crate::special::Activation;

pub use cg::{tikhonov_solve_cg, CgOptions, CgSolution};
pub use gram::{build_gram, build_gram_with_cap, GramOperator, DEFAULT_GRAM_CAP};
pub use ridgelet::RidgeletKernel;
pub use solve::{
    minimize, reconstruct, solve_rho_star, tikhonov_solve, Reconstruction, TikhonovSystem,
};

fn check_points(meas: &ParamMeasure, xs: &[f64]) -> Result<usize> {
    let m = meas.dim();
    if !xs.len().is_multiple_of(m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: xs.len() % m,
        });
    }
    Ok(xs.len() / m)
}

fn check_dataset(meas: &ParamMeasure, ds: &Dataset) -> Result<()> {
    if meas.dim() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: meas.dim(),
            got: ds.dim(),
        });
    }
    Ok(())
}

/// S[γ] evaluated at each point of `xs` (row-major, `meas.dim()` per point).
pub fn apply_s<T: Scalar>(
    meas: &ParamMeasure,
    act: Activation,
    gamma: &Coefficient<T>,
    xs: &[f64],
) -> Result<Vec<T>> {
    gamma.check_matches(meas)?;
    check_points(meas, xs)?;
    let weighted: Vec<T> = gamma
        .values()
        .iter()
        .zip(meas.weights())
        .map(|(g, w)| *g * *w)
        .collect();
    Ok(xs
        .par_chunks(meas.dim())
        .map(|x| {
            let mut acc = T::ZERO;
            for (k, g) in weighted.iter().enumerate() {
                acc += *g * act.eval(meas.preactivation(k, x));
            }
            acc
        })
        .collect())
}

/// S*[f] = R_{ρ_σ}[f] for the empirical measure of `ds`.
pub fn apply_s_adjoint<T: Scalar>(
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    fvals: &[T],
) -> Result<Coefficient<T>> {
    check_dataset(meas, ds)?;
    if fvals.len() != ds.len() {
        return Err(Error::length("function values", ds.len(), fvals.len()));
    }
    let inv_s = 1.0 / ds.len() as f64;
    let values = (0..meas.len())
        .into_par_iter()
        .map(|k| {
            let mut acc = T::ZERO;
            for ((x, _), f) in ds.samples().zip(fvals) {
                acc += *f * act.eval(meas.preactivation(k, x));
            }
            acc * inv_s
        })
        .collect();
    Ok(Coefficient::from_vec_unchecked(values))
}

/// Φ with Φ_ik = σ(a_k·x_i - b_k), an s × M matrix.
pub fn feature_matrix(meas: &ParamMeasure, act: Activation, ds: &Dataset) -> Result<DMatrix<f64>> {
    check_dataset(meas, ds)?;
    let s = ds.len();
    let mut phi = DMatrix::<f64>::zeros(s, meas.len());
    // column-major: column k is contiguous
    phi.as_mut_slice()
        .par_chunks_mut(s)
        .enumerate()
        .for_each(|(k, col)| {
            for (i, v) in col.iter_mut().enumerate() {
                *v = act.eval(meas.preactivation(k, ds.x(i)));
            }
        });
    Ok(phi)
}

/// K(p1, p2) = (1/s) Σ_i σ(a·x_i - b) σ(a'·x_i - b').
pub fn param_kernel(
    act: Activation,
    ds: &Dataset,
    p1: (&[f64], f64),
    p2: (&[f64], f64),
) -> Result<f64> {
    for a in [p1.0, p2.0] {
        if a.len() != ds.dim() {
            return Err(Error::DimensionMismatch {
                expected: ds.dim(),
                got: a.len(),
            });
        }
    }
    let sum: f64 = ds
        .samples()
        .map(|(x, _)| act.eval(dot(p1.0, x) - p1.1) * act.eval(dot(p2.0, x) - p2.1))
        .sum();
    Ok(sum / ds.len() as f64)
}

/// k(x, y) = Σ_k w_k σ(a_k·x - b_k) σ(a_k·y - b_k).
pub fn data_kernel(meas: &ParamMeasure, act: Activation, x: &[f64], y: &[f64]) -> Result<f64> {
    for v in [x, y] {
        if v.len() != meas.dim() {
            return Err(Error::DimensionMismatch {
                expected: meas.dim(),
                got: v.len(),
            });
        }
    }
    Ok((0..meas.len())
        .map(|k| {
            meas.weights()[k]
                * act.eval(meas.preactivation(k, x))
                * act.eval(meas.preactivation(k, y))
        })
        .sum())
}

/// Gram matrix [k(x_i, x_j)] over a point set (row-major points).
pub fn data_kernel_matrix(
    meas: &ParamMeasure,
    act: Activation,
    xs: &[f64],
) -> Result<DMatrix<f64>> {
    let n = check_points(meas, xs)?;
    let m = meas.dim();
    // Ψ_ik = sqrt(w_k) σ(a_k·x_i - b_k), so the Gram matrix is ΨΨᵀ
    let psi = DMatrix::from_fn(n, meas.len(), |i, k| {
        meas.weights()[k].sqrt() * act.eval(meas.preactivation(k, &xs[i * m..(i + 1) * m]))
    });
    Ok(&psi * psi.transpose())
}

/// L[γ; f, β] = ‖S[γ] - y‖²_{L²(μ)} + β ‖γ‖²_{L²(λ)}.
pub fn loss_functional<T: Scalar>(
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    gamma: &Coefficient<T>,
    beta: f64,
) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    check_dataset(meas, ds)?;
    let fitted = apply_s(meas, act, gamma, ds.inputs())?;
    let misfit: f64 = fitted
        .iter()
        .zip(ds.targets())
        .map(|(g, y)| (*g - T::from_real(*y)).norm_sqr())
        .sum::<f64>()
        / ds.len() as f64;
    Ok(misfit + beta * gamma.norm_sqr(meas)?)
}
