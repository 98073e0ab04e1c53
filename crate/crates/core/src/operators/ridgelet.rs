use rayon::prelude::*;

use super::check_dataset;
use crate::data::{Coefficient, Dataset, ParamMeasure};
use crate::error::{Error, Result};
use crate::special::{Activation, RidgeletFn};

/// A generalized ridgelet function ρ(x, (a, b)) tabulated on sample × atom
/// pairs: an s × M array, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RidgeletKernel {
    samples: usize,
    atoms: usize,
    values: Vec<f64>,
}

impl RidgeletKernel {
    pub fn new(samples: usize, atoms: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != samples * atoms {
            return Err(Error::length(
                "ridgelet kernel",
                samples * atoms,
                values.len(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "ridgelet kernel has non-finite entries".into(),
            ));
        }
        Ok(Self {
            samples,
            atoms,
            values,
        })
    }

    /// ρ_σ(x, (a, b)) = σ(a·x - b); R_{ρ_σ} is S*.
    pub fn from_activation(meas: &ParamMeasure, act: Activation, ds: &Dataset) -> Result<Self> {
        check_dataset(meas, ds)?;
        Self::tabulate(meas, ds, |z| act.eval(z))
    }

    /// The classic kernel ρ(a·x - b) for an admissible ridgelet function.
    pub fn from_ridgelet(meas: &ParamMeasure, rf: RidgeletFn, ds: &Dataset) -> Result<Self> {
        check_dataset(meas, ds)?;
        Self::tabulate(meas, ds, |z| rf.eval(z))
    }

    fn tabulate(meas: &ParamMeasure, ds: &Dataset, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        let m = meas.len();
        let mut values = vec![0.0; ds.len() * m];
        values.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
            let x = ds.x(i);
            for (k, v) in row.iter_mut().enumerate() {
                *v = f(meas.preactivation(k, x));
            }
        });
        Self::new(ds.len(), m, values)
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.atoms..(i + 1) * self.atoms]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// R_ρ[f]_k = (1/s) Σ_i f_i ρ(x_i, atom_k)
    pub fn transform(&self, f: &[f64]) -> Result<Coefficient> {
        if f.len() != self.samples {
            return Err(Error::length("function values", self.samples, f.len()));
        }
        let mut out = vec![0.0; self.atoms];
        for (i, fi) in f.iter().enumerate() {
            for (o, r) in out.iter_mut().zip(self.row(i)) {
                *o += fi * r;
            }
        }
        let inv_s = 1.0 / self.samples as f64;
        out.iter_mut().for_each(|v| *v *= inv_s);
        Ok(Coefficient::from_vec_unchecked(out))
    }

    /// ‖ρ‖_{L²(μ⊗λ)} with μ the empirical measure.
    pub fn norm(&self, meas: &ParamMeasure) -> Result<f64> {
        if meas.len() != self.atoms {
            return Err(Error::length("measure atoms", self.atoms, meas.len()));
        }
        let w = meas.weights();
        let sum: f64 = self
            .values
            .chunks_exact(self.atoms)
            .map(|row| row.iter().zip(w).map(|(r, wk)| wk * r * r).sum::<f64>())
            .sum();
        Ok((sum / self.samples as f64).sqrt())
    }
}
