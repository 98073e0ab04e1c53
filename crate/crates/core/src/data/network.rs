use serde::{Deserialize, Serialize};

use crate::data::coefficient::Coefficient;
use crate::data::measure::ParamMeasure;
use crate::error::{Error, Result};

/// One hidden unit c · σ(a·x - b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub a: Vec<f64>,
    pub b: f64,
    pub c: f64,
}

/// Parameters θ = {(a_j, b_j, c_j)} of a shallow network with p hidden units.
///
/// Stored flat, unit-major: unit `j` occupies `dim + 2` consecutive values
/// `[a_j..., b_j, c_j]`. Optimizers work directly on this layout.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    dim: usize,
    values: Vec<f64>,
}

impl NetworkParams {
    pub fn from_flat(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "input dimension must be at least 1".into(),
            ));
        }
        let stride = dim + 2;
        if values.is_empty() || !values.len().is_multiple_of(stride) {
            return Err(Error::InvalidParameter(format!(
                "{} values do not form whole units of {stride}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("network parameters must be finite".into()));
        }
        Ok(Self { dim, values })
    }

    pub fn from_units(units: &[Unit]) -> Result<Self> {
        let dim = units
            .first()
            .map(|u| u.a.len())
            .ok_or(Error::Empty("network units"))?;
        let mut values = Vec::with_capacity(units.len() * (dim + 2));
        for u in units {
            if u.a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.a.len(),
                });
            }
            values.extend_from_slice(&u.a);
            values.push(u.b);
            values.push(u.c);
        }
        Self::from_flat(dim, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stride(&self) -> usize {
        self.dim + 2
    }

    /// Number of hidden units p.
    pub fn len(&self) -> usize {
        self.values.len() / self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn a(&self, j: usize) -> &[f64] {
        let s = j * self.stride();
        &self.values[s..s + self.dim]
    }

    #[inline]
    pub fn b(&self, j: usize) -> f64 {
        self.values[j * self.stride() + self.dim]
    }

    #[inline]
    pub fn c(&self, j: usize) -> f64 {
        self.values[j * self.stride() + self.dim + 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.values
    }

    pub fn unit(&self, j: usize) -> Unit {
        Unit {
            a: self.a(j).to_vec(),
            b: self.b(j),
            c: self.c(j),
        }
    }

    pub fn units(&self) -> Vec<Unit> {
        (0..self.len()).map(|j| self.unit(j)).collect()
    }
}

/// Dirac reparameterization γ_θ dλ = Σ_j c_j δ_(a_j, b_j): one unit-mass atom
/// per hidden unit (duplicates kept) carrying the output weight c_j.
pub fn dirac_measure_from_params(theta: &NetworkParams) -> (ParamMeasure, Coefficient) {
    let p = theta.len();
    let mut a = Vec::with_capacity(p * theta.dim());
    let mut b = Vec::with_capacity(p);
    let mut c = Vec::with_capacity(p);
    for j in 0..p {
        a.extend_from_slice(theta.a(j));
        b.push(theta.b(j));
        c.push(theta.c(j));
    }
    let meas = ParamMeasure::dirac(theta.dim(), a, b, vec![1.0; p])
        .expect("valid network parameters give a valid measure");
    (meas, Coefficient::from_vec_unchecked(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_reparameterization() {
        let theta = NetworkParams::from_units(&[Unit {
            a: vec![1.0],
            b: 0.0,
            c: 2.0,
        }])
        .unwrap();
        let (meas, gamma) = dirac_measure_from_params(&theta);
        assert_eq!(meas.len(), 1);
        assert_eq!(meas.a(0), &[1.0]);
        assert_eq!(meas.b(0), 0.0);
        assert_eq!(meas.weights(), &[1.0]);
        assert_eq!(gamma.values(), &[2.0]);
    }

    #[test]
    fn duplicate_atoms_are_kept() {
        let u = Unit {
            a: vec![0.5, -1.0],
            b: 0.3,
            c: 1.0,
        };
        let theta = NetworkParams::from_units(&[u.clone(), u]).unwrap();
        let (meas, gamma) = dirac_measure_from_params(&theta);
        assert_eq!(meas.len(), 2);
        assert_eq!(meas.a(0), meas.a(1));
        assert_eq!(gamma.len(), 2);
    }

    #[test]
    fn flat_layout() {
        let theta =
            NetworkParams::from_flat(2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        assert_eq!(theta.len(), 2);
        assert_eq!(theta.a(1), &[5.0, 6.0]);
        assert_eq!(theta.b(1), 7.0);
        assert_eq!(theta.c(0), 4.0);
        assert_eq!(NetworkParams::from_units(&theta.units()).unwrap(), theta);
        assert!(NetworkParams::from_flat(2, vec![1.0; 5]).is_err());
        assert!(NetworkParams::from_flat(1, vec![]).is_err());
    }
}
