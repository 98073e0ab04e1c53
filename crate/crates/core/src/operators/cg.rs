use super::solve::check_beta;
use super::{apply_s, apply_s_adjoint, check_dataset};
use crate::data::{Coefficient, Dataset, ParamMeasure};
use crate::error::{Error, Result};
use crate::special::Activation;

#[derive(Clone, Copy, Debug)]
pub struct CgOptions {
    /// Target relative residual ‖r‖ / ‖b‖.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl CgOptions {
    /// Tolerance 1e-10 and 10·M iterations.
    pub fn for_size(atoms: usize) -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10 * atoms.max(1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgSolution {
    pub coefficient: Coefficient,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Matrix-free Tikhonov solve: Jacobi-preconditioned conjugate gradients on
/// the symmetrized system (β + DKD) u = D S*y with D = W^{1/2}, γ = D⁻¹u.
/// K is applied as S*S, never assembled.
pub fn tikhonov_solve_cg(
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    beta: f64,
    opts: &CgOptions,
) -> Result<CgSolution> {
    check_beta(beta)?;
    check_dataset(meas, ds)?;
    let n = meas.len();
    let d: Vec<f64> = meas.weights().iter().map(|w| w.sqrt()).collect();
    let w = meas.weights();

    let apply = |u: &[f64]| -> Result<Vec<f64>> {
        // S acts as Φ W γ; with γ = D⁻¹u this is Φ D u
        let gamma = Coefficient::from_vec_unchecked(u.iter().zip(&d).map(|(u, d)| u / d).collect());
        let f = apply_s(meas, act, &gamma, ds.inputs())?;
        let back = apply_s_adjoint(meas, act, ds, &f)?;
        Ok(back
            .values()
            .iter()
            .zip(&d)
            .zip(u)
            .map(|((v, d), u)| beta * u + d * v)
            .collect())
    };

    // diag(β + DKD)_k = β + w_k (1/s) Σ_i σ_k(x_i)²
    let inv_s = 1.0 / ds.len() as f64;
    let precond: Vec<f64> = (0..n)
        .map(|k| {
            let kk: f64 = ds
                .samples()
                .map(|(x, _)| act.eval(meas.preactivation(k, x)).powi(2))
                .sum::<f64>()
                * inv_s;
            1.0 / (beta + w[k] * kk)
        })
        .collect();

    let rhs = apply_s_adjoint(meas, act, ds, ds.targets())?;
    let b: Vec<f64> = rhs.values().iter().zip(&d).map(|(r, d)| r * d).collect();
    let b_norm = norm(&b);
    if b_norm == 0.0 {
        return Ok(CgSolution {
            coefficient: Coefficient::zeros(n),
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let mut u = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&precond).map(|(r, p)| r * p).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut residual = 1.0;

    for iteration in 1..=opts.max_iterations {
        let ap = apply(&p)?;
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            u[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        residual = norm(&r) / b_norm;
        if residual <= opts.tolerance {
            let gamma = u.iter().zip(&d).map(|(u, d)| u / d).collect();
            return Ok(CgSolution {
                coefficient: Coefficient::from_vec_unchecked(gamma),
                iterations: iteration,
                relative_residual: residual,
            });
        }
        for k in 0..n {
            z[k] = r[k] * precond[k];
        }
        let rz_next = dot(&r, &z);
        let ratio = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            p[k] = z[k] + ratio * p[k];
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        residual,
    })
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}
