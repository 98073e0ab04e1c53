//! A quick invariant suite: small random instances of the identities the
//! library relies on. Used by `ridgelab selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{
    dirac_measure_from_params, empirical_inner, l2_inner, Coefficient, Dataset, GridSpec,
    NetworkParams, ParamMeasure,
};
use crate::error::Result;
use crate::operators::{
    apply_s, apply_s_adjoint, build_gram, data_kernel_matrix, solve_rho_star, tikhonov_solve,
};
use crate::special::{dawson, Activation};
use crate::training::{forward, grad, mse_loss};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error and its tolerance.
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e}, tolerance {tol:.0e}"),
    }
}

fn failed(name: &'static str, err: crate::Error) -> Check {
    Check {
        name,
        passed: false,
        detail: err.to_string(),
    }
}

fn instance(
    rng: &mut ChaCha8Rng,
    dim: usize,
    atoms: usize,
    s: usize,
) -> Result<(ParamMeasure, Dataset)> {
    let a = (0..atoms * dim)
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    let b = (0..atoms).map(|_| rng.random_range(-3.0..3.0)).collect();
    let w = (0..atoms).map(|_| rng.random_range(0.1..2.0)).collect();
    let x = (0..s * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y = (0..s).map(|_| rng.random_range(-1.0..1.0)).collect();
    Ok((ParamMeasure::dirac(dim, a, b, w)?, Dataset::new(dim, x, y)?))
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(lo) + f(hi) + inner) * h / 3.0
}

fn dawson_check() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in [0.3, 1.0, 2.5, 4.0] {
        let oracle = simpson(|w| (w * w - z * z).exp(), 0.0, z, 4000);
        worst = worst.max((dawson(z)? - oracle).abs());
        worst = worst.max((dawson(-z)? + dawson(z)?).abs());
    }
    Ok(worst)
}

fn adjoint_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for dim in 1..=3 {
        let (meas, ds) = instance(rng, dim, 64, 32)?;
        let gamma = Coefficient::new(random_vec(rng, 64))?;
        let f = random_vec(rng, 32);
        let lhs = empirical_inner(
            &ds,
            &apply_s(&meas, Activation::Tanh, &gamma, ds.inputs())?,
            &f,
        )?;
        let rhs = l2_inner(
            &meas,
            &gamma,
            &apply_s_adjoint(&meas, Activation::Tanh, &ds, &f)?,
        )?;
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1e-12));
    }
    Ok(worst)
}

fn gram_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (meas, ds) = instance(rng, 2, 48, 30)?;
    let gram = build_gram(&meas, Activation::Tanh, &ds)?;
    let gamma = Coefficient::new(random_vec(rng, 48))?;
    let direct = gram.apply(&gamma)?;
    let composed = apply_s_adjoint(
        &meas,
        Activation::Tanh,
        &ds,
        &apply_s(&meas, Activation::Tanh, &gamma, ds.inputs())?,
    )?;
    let diff: f64 = direct
        .values()
        .iter()
        .zip(composed.values())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = composed.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(diff / scale)
}

fn tikhonov_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (meas, ds) = instance(rng, 1, 40, 50)?;
    let beta = 0.05;
    let gram = build_gram(&meas, Activation::Tanh, &ds)?;
    let gamma = tikhonov_solve(&gram, &meas, Activation::Tanh, &ds, beta)?;
    let tg = gram.apply(&gamma)?;
    let rhs = apply_s_adjoint(&meas, Activation::Tanh, &ds, ds.targets())?;
    let resid = tg
        .values()
        .iter()
        .zip(gamma.values())
        .zip(rhs.values())
        .map(|((t, g), r)| (beta * g + t - r).powi(2))
        .sum::<f64>()
        .sqrt();
    let rho = solve_rho_star(&gram, &meas, Activation::Tanh, &ds, beta)?;
    let via_rho = rho.transform(ds.targets())?;
    let gap = via_rho
        .values()
        .iter()
        .zip(gamma.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(resid.max(gap))
}

fn gradient_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let h = 1e-5;
    for act in [Activation::Tanh, Activation::Gaussian] {
        let theta = NetworkParams::from_flat(2, random_vec(rng, 5 * 4))?;
        let (_, ds) = instance(rng, 2, 1, 20)?;
        let g = grad(&theta, act, &ds)?;
        let mut err = 0.0;
        let mut scale = 0.0;
        for k in 0..g.len() {
            let mut plus = theta.as_slice().to_vec();
            let mut minus = plus.clone();
            plus[k] += h;
            minus[k] -= h;
            let fd = (mse_loss(&NetworkParams::from_flat(2, plus)?, act, &ds)?
                - mse_loss(&NetworkParams::from_flat(2, minus)?, act, &ds)?)
                / (2.0 * h);
            err += (fd - g[k]).powi(2);
            scale += fd * fd;
        }
        worst = worst.max((err / scale).sqrt());
    }
    Ok(worst)
}

fn reparameterization_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let theta = NetworkParams::from_flat(1, random_vec(rng, 10 * 3))?;
    let (meas, gamma) = dirac_measure_from_params(&theta);
    let xs = random_vec(rng, 25);
    let via_s = apply_s(&meas, Activation::Tanh, &gamma, &xs)?;
    let mut worst: f64 = 0.0;
    for (x, v) in xs.iter().zip(via_s) {
        worst = worst.max((forward(&theta, Activation::Tanh, &[*x])? - v).abs());
    }
    Ok(worst)
}

/// Negated smallest eigenvalue of the periodized-tanh data kernel.
fn kernel_psd_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let grid = ParamMeasure::grid(
        1,
        GridSpec {
            a_range: (-6.0, 6.0),
            b_range: (-4.0, 4.0),
            a_steps: 32,
            b_steps: 24,
        },
    )?;
    let weights = (0..grid.len())
        .map(|k| grid.weights()[k] * (-0.5 * grid.a(k)[0].powi(2)).exp())
        .collect();
    let meas = ParamMeasure::dirac(
        1,
        grid.directions().to_vec(),
        grid.biases().to_vec(),
        weights,
    )?;
    let xs = random_vec(rng, 20);
    let g = data_kernel_matrix(&meas, Activation::PeriodizedTanh { half_period: 4.0 }, &xs)?;
    Ok((-g.symmetric_eigenvalues().min()).max(0.0))
}

/// Runs every check with a fixed seed.
pub fn run() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut out = Vec::new();
    let mut push = |name, tol, res: Result<f64>| {
        out.push(match res {
            Ok(worst) => check(name, worst, tol),
            Err(e) => failed(name, e),
        })
    };
    push("dawson quadrature and oddness", 1e-10, dawson_check());
    push("adjoint identity", 1e-10, adjoint_check(&mut rng));
    push("gram factorization", 1e-10, gram_check(&mut rng));
    push("tikhonov residual and rho*", 1e-8, tikhonov_check(&mut rng));
    push("backprop gradient", 1e-5, gradient_check(&mut rng));
    push(
        "network reparameterization",
        1e-12,
        reparameterization_check(&mut rng),
    );
    push("periodized kernel psd", 1e-8, kernel_psd_check(&mut rng));
    out
}
