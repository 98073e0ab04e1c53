use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{
    apply_s, apply_s_adjoint, build_gram_with_cap, feature_matrix, tikhonov_solve_cg, CgOptions,
    GramOperator, RidgeletKernel,
};
use crate::data::{Coefficient, Dataset, MeasureKind, ParamMeasure};
use crate::error::{Error, Result};
use crate::special::Activation;

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

/// Factorization of β + T for repeated solves.
///
/// T = K W is self-adjoint in L²(λ) but not symmetric as a matrix when the
/// weights differ. With D = W^{1/2}, D(β + KW)γ = (β + DKD)(Dγ), and
/// β + DKD is symmetric positive definite for β > 0.
pub struct TikhonovSystem {
    cholesky: Cholesky<f64, Dyn>,
    sqrt_w: Vec<f64>,
}

impl TikhonovSystem {
    pub fn factor(gram: &GramOperator, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let sqrt_w: Vec<f64> = gram.measure().weights().iter().map(|w| w.sqrt()).collect();
        let n = gram.size();
        let k = gram.kernel();
        let a = DMatrix::from_fn(n, n, |i, j| {
            let v = sqrt_w[i] * k[(i, j)] * sqrt_w[j];
            if i == j {
                v + beta
            } else {
                v
            }
        });
        let cholesky = Cholesky::new(a).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { cholesky, sqrt_w })
    }

    /// Solves (β + T) γ = rhs.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.sqrt_w.len() {
            return Err(Error::length(
                "right-hand side",
                self.sqrt_w.len(),
                rhs.len(),
            ));
        }
        let scaled =
            DVector::from_iterator(rhs.len(), rhs.iter().zip(&self.sqrt_w).map(|(r, d)| r * d));
        let u = self.cholesky.solve(&scaled);
        Ok(u.iter().zip(&self.sqrt_w).map(|(u, d)| u / d).collect())
    }

    /// Column-wise solve for an M × n right-hand side.
    fn solve_columns(&self, mut rhs: DMatrix<f64>) -> DMatrix<f64> {
        for (k, mut row) in rhs.row_iter_mut().enumerate() {
            row *= self.sqrt_w[k];
        }
        self.cholesky.solve_mut(&mut rhs);
        for (k, mut row) in rhs.row_iter_mut().enumerate() {
            row /= self.sqrt_w[k];
        }
        rhs
    }
}

/// The unique minimizer γ* = (β + T)⁻¹ S* y of
/// ‖S[γ] - y‖²_{L²(μ)} + β ‖γ‖²_{L²(λ)}, by Cholesky factorization.
pub fn tikhonov_solve(
    gram: &GramOperator,
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    beta: f64,
) -> Result<Coefficient> {
    check_beta(beta)?;
    gram.matches(meas, act)?;
    let rhs = apply_s_adjoint(meas, act, ds, ds.targets())?;
    let system = TikhonovSystem::factor(gram, beta)?;
    Ok(Coefficient::from_vec_unchecked(system.solve(rhs.values())?))
}

/// ρ* with (β + T) ρ*(x_i, ·) = σ_{x_i} for every sample, sharing one
/// factorization. R_{ρ*}[y] equals the Tikhonov minimizer.
pub fn solve_rho_star(
    gram: &GramOperator,
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    beta: f64,
) -> Result<RidgeletKernel> {
    check_beta(beta)?;
    gram.matches(meas, act)?;
    let system = TikhonovSystem::factor(gram, beta)?;
    // column i of Φᵀ is σ_{x_i} on the atoms
    let phi_t = feature_matrix(meas, act, ds)?.transpose();
    let solved = system.solve_columns(phi_t);
    // M × s column-major is s × M row-major
    RidgeletKernel::new(ds.len(), meas.len(), solved.as_slice().to_vec())
}

/// Tikhonov minimizer, dense for up to `cap` atoms and matrix-free
/// conjugate gradients above.
pub fn minimize(
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    beta: f64,
    cap: usize,
) -> Result<Coefficient> {
    check_beta(beta)?;
    if meas.len() <= cap {
        let gram = build_gram_with_cap(meas, act, ds, cap)?;
        tikhonov_solve(&gram, meas, act, ds, beta)
    } else {
        Ok(tikhonov_solve_cg(meas, act, ds, beta, &CgOptions::for_size(meas.len()))?.coefficient)
    }
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub gamma: Coefficient,
    /// S[γ*] at the requested evaluation points.
    pub fitted: Vec<f64>,
}

/// Learns y from data on a grid λ: γ* plus S[γ*] evaluated at `xs_eval`.
pub fn reconstruct(
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    beta: f64,
    xs_eval: &[f64],
) -> Result<Reconstruction> {
    if !matches!(meas.kind(), MeasureKind::Grid(_)) {
        return Err(Error::InvalidParameter(
            "reconstruction needs a grid measure".into(),
        ));
    }
    let gamma = minimize(meas, act, ds, beta, super::DEFAULT_GRAM_CAP)?;
    let fitted = apply_s(meas, act, &gamma, xs_eval)?;
    Ok(Reconstruction { gamma, fitted })
}
