use crate::error::{Error, Result};

/// Samples {(x_i, y_i)} with x_i ∈ R^m. The empirical measure μ puts mass
/// 1/s on every sample.
///
/// Inputs are stored row-major: sample `i` occupies `x[i*m..(i+1)*m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "input dimension must be at least 1".into(),
            ));
        }
        if y.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        if x.len() != y.len() * dim {
            return Err(Error::length("dataset inputs", y.len() * dim, x.len()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Domain("dataset contains non-finite values".into()));
        }
        Ok(Self { dim, x, y })
    }

    /// One-dimensional dataset from paired inputs and targets.
    pub fn from_1d(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::length("dataset inputs", y.len(), x.len()));
        }
        Self::new(1, x, y)
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::Empty("dataset"))?;
        let mut x = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            x.extend_from_slice(row);
        }
        if rows.len() != y.len() {
            return Err(Error::length("dataset targets", rows.len(), y.len()));
        }
        Self::new(dim, x, y)
    }

    /// Same inputs, different targets.
    pub fn with_targets(&self, y: Vec<f64>) -> Result<Self> {
        if y.len() != self.len() {
            return Err(Error::length("targets", self.len(), y.len()));
        }
        Self::new(self.dim, self.x.clone(), y)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    /// All inputs, row-major.
    pub fn inputs(&self) -> &[f64] {
        &self.x
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    pub fn samples(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.x.chunks_exact(self.dim).zip(self.y.iter().copied())
    }
}

/// ⟨f1, f2⟩ in L²(μ) for the empirical measure: (1/s) Σ f1_i f2_i.
pub fn empirical_inner(ds: &Dataset, f1: &[f64], f2: &[f64]) -> Result<f64> {
    if f1.len() != ds.len() {
        return Err(Error::length("first function", ds.len(), f1.len()));
    }
    if f2.len() != ds.len() {
        return Err(Error::length("second function", ds.len(), f2.len()));
    }
    let sum: f64 = f1.iter().zip(f2).map(|(a, b)| a * b).sum();
    Ok(sum / ds.len() as f64)
}
