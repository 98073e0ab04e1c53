use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use serde::{de::DeserializeOwned, Serialize};

use crate::data::measure::ParamMeasure;
use crate::error::{Error, Result};

/// Field of coefficient values: the real pipeline uses `f64`, the operator
/// algebra also accepts complex coefficients.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Serialize
    + DeserializeOwned
    + 'static
{
    const ZERO: Self;
    fn from_real(v: f64) -> Self;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    #[inline]
    fn from_real(v: f64) -> Self {
        v
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    #[inline]
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// A function γ ∈ L²(λ): one value per atom of a [`ParamMeasure`].
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient<T = f64> {
    values: Vec<T>,
}

impl<T: Scalar> Coefficient<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("coefficient has non-finite entries".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![T::ZERO; len],
        }
    }

    pub(crate) fn from_vec_unchecked(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_matches(&self, meas: &ParamMeasure) -> Result<()> {
        if self.len() != meas.len() {
            return Err(Error::length("coefficient", meas.len(), self.len()));
        }
        Ok(())
    }

    /// ‖γ‖²_{L²(λ)} = Σ w_k |γ_k|²
    pub fn norm_sqr(&self, meas: &ParamMeasure) -> Result<f64> {
        self.check_matches(meas)?;
        Ok(meas
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, g)| w * g.norm_sqr())
            .sum())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::length("coefficient", self.len(), other.len()));
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a + *b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| *v * factor).collect(),
        }
    }
}

/// ⟨γ1, γ2⟩_{L²(λ)} = Σ_k w_k γ1_k conj(γ2_k)
pub fn l2_inner<T: Scalar>(
    meas: &ParamMeasure,
    g1: &Coefficient<T>,
    g2: &Coefficient<T>,
) -> Result<T> {
    g1.check_matches(meas)?;
    g2.check_matches(meas)?;
    let mut acc = T::ZERO;
    for ((w, a), b) in meas.weights().iter().zip(&g1.values).zip(&g2.values) {
        acc += (*a * b.conj()) * *w;
    }
    Ok(acc)
}
