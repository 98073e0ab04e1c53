use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Midpoint-rule grid over hidden parameters: every component of `a` ranges
/// over `a_range` in `a_steps` cells and `b` over `b_range` in `b_steps`
/// cells. Atoms sit at cell centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub a_steps: usize,
    pub b_steps: usize,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            a_range: (lo, hi),
            b_range: (lo, hi),
            a_steps: steps,
            b_steps: steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ok(self.a_range) || !ok(self.b_range) {
            return Err(Error::InvalidParameter(format!(
                "grid ranges must be finite with lo < hi: a {:?}, b {:?}",
                self.a_range, self.b_range
            )));
        }
        if self.a_steps == 0 || self.b_steps == 0 {
            return Err(Error::InvalidParameter(
                "grid steps must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn a_step(&self) -> f64 {
        (self.a_range.1 - self.a_range.0) / self.a_steps as f64
    }

    pub fn b_step(&self) -> f64 {
        (self.b_range.1 - self.b_range.0) / self.b_steps as f64
    }

    pub fn a_points(&self) -> Vec<f64> {
        axis_points(self.a_range, self.a_steps)
    }

    pub fn b_points(&self) -> Vec<f64> {
        axis_points(self.b_range, self.b_steps)
    }
}

/// Cell centers of `steps` equal cells covering `range`.
pub fn axis_points(range: (f64, f64), steps: usize) -> Vec<f64> {
    let h = (range.1 - range.0) / steps as f64;
    (0..steps).map(|i| range.0 + (i as f64 + 0.5) * h).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureKind {
    Grid(GridSpec),
    /// Weighted Dirac atoms, e.g. the hidden units of a finite network.
    DiracSum,
}

/// The base measure λ on hidden parameters (a, b) ∈ R^m × R, as a finite
/// set of atoms with positive masses.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamMeasure {
    dim: usize,
    /// Row-major, `dim` entries per atom.
    a: Vec<f64>,
    b: Vec<f64>,
    weights: Vec<f64>,
    kind: MeasureKind,
}

impl ParamMeasure {
    /// Weighted Dirac atoms. `a` is row-major with `dim` entries per atom.
    pub fn dirac(dim: usize, a: Vec<f64>, b: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::checked(dim, a, b, weights, MeasureKind::DiracSum)
    }

    /// Midpoint grid in `dim` dimensions; every atom carries the cell volume
    /// Δa^dim · Δb.
    pub fn grid(dim: usize, spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        let a_axis = spec.a_points();
        let b_axis = spec.b_points();
        let count = spec
            .a_steps
            .checked_pow(dim as u32)
            .and_then(|n| n.checked_mul(spec.b_steps))
            .ok_or_else(|| Error::InvalidParameter("grid too large".into()))?;
        let cell = spec.a_step().powi(dim as i32) * spec.b_step();

        let mut a = Vec::with_capacity(count * dim);
        let mut b = Vec::with_capacity(count);
        let mut index = vec![0usize; dim];
        loop {
            for &bv in &b_axis {
                a.extend(index.iter().map(|&i| a_axis[i]));
                b.push(bv);
            }
            // odometer over the a components, last component fastest
            let mut d = dim;
            loop {
                if d == 0 {
                    let weights = vec![cell; b.len()];
                    return Self::checked(dim, a, b, weights, MeasureKind::Grid(spec));
                }
                d -= 1;
                index[d] += 1;
                if index[d] < spec.a_steps {
                    break;
                }
                index[d] = 0;
            }
        }
    }

    /// Rebuilds a measure from its parts, as read back from disk.
    pub fn from_parts(
        dim: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        weights: Vec<f64>,
        kind: MeasureKind,
    ) -> Result<Self> {
        if let MeasureKind::Grid(spec) = &kind {
            let expected = Self::grid(dim, *spec)?;
            if expected.a != a || expected.b != b {
                return Err(Error::GridMismatch(
                    "atoms do not match the grid spec".into(),
                ));
            }
        }
        Self::checked(dim, a, b, weights, kind)
    }

    fn checked(
        dim: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        weights: Vec<f64>,
        kind: MeasureKind,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        if b.is_empty() {
            return Err(Error::Empty("parameter measure"));
        }
        if a.len() != b.len() * dim {
            return Err(Error::length("atom directions", b.len() * dim, a.len()));
        }
        if weights.len() != b.len() {
            return Err(Error::length("weights", b.len(), weights.len()));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite atom".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be positive and finite".into(),
            ));
        }
        Ok(Self {
            dim,
            a,
            b,
            weights,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn a(&self, k: usize) -> &[f64] {
        &self.a[k * self.dim..(k + 1) * self.dim]
    }

    #[inline]
    pub fn b(&self, k: usize) -> f64 {
        self.b[k]
    }

    pub fn directions(&self) -> &[f64] {
        &self.a
    }

    pub fn biases(&self) -> &[f64] {
        &self.b
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn grid_spec(&self) -> Option<&GridSpec> {
        match &self.kind {
            MeasureKind::Grid(spec) => Some(spec),
            MeasureKind::DiracSum => None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// a_k · x - b_k
    #[inline]
    pub fn preactivation(&self, k: usize, x: &[f64]) -> f64 {
        dot(self.a(k), x) - self.b[k]
    }
}

#[inline]
pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}
