use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{axis_points, Coefficient, Dataset, MeasureKind, ParamMeasure, Unit};
use crate::error::{Error, Result};
use crate::special::RidgeletFn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Monte Carlo sums as computed.
    RawSum,
    /// Rescaled so that max |value| = 1 (left alone when all zero).
    MaxAbsOne,
}

/// Values on an (a, b) grid, a-major: `values[ia * nb + ib]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    a_grid: Vec<f64>,
    b_grid: Vec<f64>,
    values: Vec<f64>,
    normalization: Normalization,
}

fn check_axis(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

impl Spectrum {
    pub fn new(
        a_grid: Vec<f64>,
        b_grid: Vec<f64>,
        values: Vec<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        check_axis("a", &a_grid)?;
        check_axis("b", &b_grid)?;
        if values.len() != a_grid.len() * b_grid.len() {
            return Err(Error::length(
                "spectrum values",
                a_grid.len() * b_grid.len(),
                values.len(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("spectrum values must be finite".into()));
        }
        let spec = Self {
            a_grid,
            b_grid,
            values,
            normalization: Normalization::RawSum,
        };
        Ok(match normalization {
            Normalization::RawSum => spec,
            Normalization::MaxAbsOne => spec.normalized(),
        })
    }

    pub fn a_grid(&self) -> &[f64] {
        &self.a_grid
    }

    pub fn b_grid(&self) -> &[f64] {
        &self.b_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn get(&self, ia: usize, ib: usize) -> f64 {
        self.values[ia * self.b_grid.len() + ib]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() / self.values.len() as f64
    }

    /// MaxAbsOne rescaling.
    pub fn normalized(mut self) -> Self {
        let m = self.max_abs();
        if m > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= m);
        }
        self.normalization = Normalization::MaxAbsOne;
        self
    }

    pub fn same_grid(&self, other: &Spectrum) -> bool {
        self.a_grid == other.a_grid && self.b_grid == other.b_grid
    }

    /// Bilinear interpolation of |values| at (a, b); `None` outside the grid.
    pub fn interpolate_abs(&self, a: f64, b: f64) -> Option<f64> {
        let (ia, ta) = locate(&self.a_grid, a)?;
        let (ib, tb) = locate(&self.b_grid, b)?;
        let at = |i: usize, j: usize| self.get(i, j).abs();
        let ia1 = (ia + 1).min(self.a_grid.len() - 1);
        let ib1 = (ib + 1).min(self.b_grid.len() - 1);
        Some(
            (1.0 - ta) * (1.0 - tb) * at(ia, ib)
                + (1.0 - ta) * tb * at(ia, ib1)
                + ta * (1.0 - tb) * at(ia1, ib)
                + ta * tb * at(ia1, ib1),
        )
    }
}

/// Cell index and fractional offset of v in an ascending grid.
fn locate(grid: &[f64], v: f64) -> Option<(usize, f64)> {
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if !(first <= v && v <= last) {
        return None;
    }
    if grid.len() == 1 {
        return Some((0, 0.0));
    }
    let i = grid
        .partition_point(|g| *g <= v)
        .saturating_sub(1)
        .min(grid.len() - 2);
    Some((i, (v - grid[i]) / (grid[i + 1] - grid[i])))
}

/// Monte Carlo ridgelet transform R[f](a, b) ≈ (1/s) Σ_i y_i ρ(a x_i - b)
/// on every grid point of a 1-D dataset.
pub fn classic_spectrum(
    ds: &Dataset,
    rf: RidgeletFn,
    a_grid: &[f64],
    b_grid: &[f64],
    normalization: Normalization,
) -> Result<Spectrum> {
    if ds.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: ds.dim(),
        });
    }
    check_axis("a", a_grid)?;
    check_axis("b", b_grid)?;
    let nb = b_grid.len();
    let inv_s = 1.0 / ds.len() as f64;
    let xs = ds.inputs();
    let ys = ds.targets();
    let mut values = vec![0.0; a_grid.len() * nb];
    values
        .par_chunks_mut(nb)
        .zip(a_grid.par_iter())
        .for_each(|(row, &a)| {
            for (v, &b) in row.iter_mut().zip(b_grid) {
                let sum: f64 = xs.iter().zip(ys).map(|(x, y)| y * rf.eval(a * x - b)).sum();
                *v = sum * inv_s;
            }
        });
    Spectrum::new(a_grid.to_vec(), b_grid.to_vec(), values, normalization)
}

/// Default spectrum grid: `steps` cell centers per axis on [-25, 25].
pub fn default_spectrum_axis(steps: usize) -> Vec<f64> {
    axis_points((-25.0, 25.0), steps)
}

/// A coefficient on a 1-D grid measure laid out as a spectrum.
pub fn spectrum_from_operator(
    meas: &ParamMeasure,
    coeff: &Coefficient,
    normalization: Normalization,
) -> Result<Spectrum> {
    let MeasureKind::Grid(spec) = meas.kind() else {
        return Err(Error::InvalidParameter(
            "spectrum needs a grid measure".into(),
        ));
    };
    if meas.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: meas.dim(),
        });
    }
    coeff.check_matches(meas)?;
    Spectrum::new(
        spec.a_points(),
        spec.b_points(),
        coeff.values().to_vec(),
        normalization,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentrationScore {
    pub score: f64,
    /// Units inside the grid.
    pub used: usize,
    /// Units outside the grid, ignored.
    pub dropped: usize,
}

/// Mean of |spectrum| at the trained (a_j, b_j) over the mean of |spectrum|
/// on the whole grid. Values above 1 mean units sit in high-intensity areas.
pub fn concentration_score(spec: &Spectrum, units: &[Unit]) -> Result<ConcentrationScore> {
    if units.is_empty() {
        return Err(Error::Empty("unit list"));
    }
    let mut total = 0.0;
    let mut used = 0;
    for u in units {
        if u.a.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: u.a.len(),
            });
        }
        if let Some(v) = spec.interpolate_abs(u.a[0], u.b) {
            total += v;
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::Empty("units inside the spectrum grid"));
    }
    let mean = spec.mean_abs();
    if mean == 0.0 {
        return Err(Error::Domain("spectrum is identically zero".into()));
    }
    Ok(ConcentrationScore {
        score: total / used as f64 / mean,
        used,
        dropped: units.len() - used,
    })
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::length("correlation input", x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::Empty("correlation needs at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Domain("correlation of a constant series".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson correlation of |values| between two spectra on the same grid.
pub fn spectrum_correlation(s1: &Spectrum, s2: &Spectrum) -> Result<f64> {
    if !s1.same_grid(s2) {
        return Err(Error::GridMismatch(format!(
            "{}x{} vs {}x{} or differing grid points",
            s1.a_grid.len(),
            s1.b_grid.len(),
            s2.a_grid.len(),
            s2.b_grid.len()
        )));
    }
    let abs = |s: &Spectrum| s.values.iter().map(|v| v.abs()).collect::<Vec<_>>();
    pearson(&abs(s1), &abs(s2))
}
