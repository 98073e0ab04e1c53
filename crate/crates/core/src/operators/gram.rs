use std::io::Write;

use nalgebra::{DMatrix, DVector};

use super::feature_matrix;
use crate::data::{Coefficient, Dataset, ParamMeasure};
use crate::error::{Error, Result};
use crate::special::Activation;

/// Largest atom count for which the dense M × M Gram matrix is assembled.
pub const DEFAULT_GRAM_CAP: usize = 4096;

/// Discretized T = S*S on the atom basis of λ.
///
/// Only the symmetric kernel part K_kl = K(atom_k, atom_l) is stored; the
/// operator entry is T_kl = K_kl w_l.
#[derive(Clone, Debug)]
pub struct GramOperator {
    kernel: DMatrix<f64>,
    measure: ParamMeasure,
    activation: Activation,
}

pub fn build_gram(meas: &ParamMeasure, act: Activation, ds: &Dataset) -> Result<GramOperator> {
    build_gram_with_cap(meas, act, ds, DEFAULT_GRAM_CAP)
}

pub fn build_gram_with_cap(
    meas: &ParamMeasure,
    act: Activation,
    ds: &Dataset,
    cap: usize,
) -> Result<GramOperator> {
    if meas.len() > cap {
        return Err(Error::TooManyAtoms {
            atoms: meas.len(),
            cap,
        });
    }
    let phi = feature_matrix(meas, act, ds)?;
    let mut kernel = phi.transpose() * &phi;
    kernel /= ds.len() as f64;
    // gemm need not return an exactly symmetric product
    let m = kernel.nrows();
    for k in 0..m {
        for l in (k + 1)..m {
            let v = 0.5 * (kernel[(k, l)] + kernel[(l, k)]);
            kernel[(k, l)] = v;
            kernel[(l, k)] = v;
        }
    }
    Ok(GramOperator {
        kernel,
        measure: meas.clone(),
        activation: act,
    })
}

impl GramOperator {
    pub fn size(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn measure(&self) -> &ParamMeasure {
        &self.measure
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// K(atom_k, atom_l)
    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    /// T_kl = K_kl w_l
    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.kernel[(k, l)] * self.measure.weights()[l]
    }

    /// Dense T.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let w = self.measure.weights();
        let mut t = self.kernel.clone();
        for (l, mut col) in t.column_iter_mut().enumerate() {
            col *= w[l];
        }
        t
    }

    /// T[γ]_k = Σ_l K_kl w_l γ_l
    pub fn apply(&self, gamma: &Coefficient) -> Result<Coefficient> {
        gamma.check_matches(&self.measure)?;
        let weighted = DVector::from_iterator(
            self.size(),
            gamma
                .values()
                .iter()
                .zip(self.measure.weights())
                .map(|(g, w)| g * w),
        );
        let out = &self.kernel * weighted;
        Ok(Coefficient::from_vec_unchecked(out.as_slice().to_vec()))
    }

    /// ‖K‖_{L²(λ⊗λ)} = (Σ_kl w_k w_l K_kl²)^{1/2}
    pub fn kernel_norm(&self) -> f64 {
        let w = self.measure.weights();
        let mut sum = 0.0;
        for (l, col) in self.kernel.column_iter().enumerate() {
            let inner: f64 = col.iter().zip(w).map(|(v, wk)| wk * v * v).sum();
            sum += w[l] * inner;
        }
        sum.sqrt()
    }

    pub(crate) fn matches(&self, meas: &ParamMeasure, act: Activation) -> Result<()> {
        if self.measure != *meas || self.activation != act {
            return Err(Error::InvalidParameter(
                "Gram operator was built for a different measure or activation".into(),
            ));
        }
        Ok(())
    }

    /// Row-major CSV of T, one matrix row per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let t = self.to_matrix();
        for row in t.row_iter() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Little-endian dump: rows and columns as u64, then T row-major as f64.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let t = self.to_matrix();
        out.write_all(&(t.nrows() as u64).to_le_bytes())?;
        out.write_all(&(t.ncols() as u64).to_le_bytes())?;
        for row in t.row_iter() {
            for v in row.iter() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }
}
