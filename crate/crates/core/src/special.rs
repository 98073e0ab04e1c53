//! Dawson's integral and the activation / ridgelet function pairs.
//!
//! The two ridgelet functions are admissible partners of `tanh` and ReLU and
//! are built from Dawson's integral
//!
//! F(z) = exp(-z²) ∫₀^z exp(w²) dw.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude the power series is used, above it the asymptotic
/// expansion. At |z| = 6 the smallest asymptotic term is far below 1e-16.
const SERIES_LIMIT: f64 = 6.0;

/// Dawson's integral F(z) = exp(-z²) ∫₀^z exp(w²) dw.
///
/// Absolute error is below 1e-12 on the whole real line.
pub fn dawson(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("dawson({z})")));
    }
    Ok(dawson_unchecked(z))
}

/// [`dawson`] without the finiteness check; NaN propagates.
#[inline]
pub fn dawson_unchecked(z: f64) -> f64 {
    let x = z.abs();
    let value = if x <= SERIES_LIMIT {
        dawson_series(x)
    } else {
        dawson_asymptotic(x)
    };
    value.copysign(z)
}

// exp(-x²) Σ x^(2n+1) / (n! (2n+1)); every term is positive so there is no
// cancellation, unlike the alternating Maclaurin series of F itself.
fn dawson_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0_f64;
    loop {
        n += 1.0;
        term *= x2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add <= sum * 1e-17 {
            break;
        }
    }
    (-x2).exp() * sum
}

// F(x) ~ 1/(2x) Σ (2n-1)!! / (2x²)^n, truncated before the terms turn around.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut n = 0.0_f64;
    loop {
        n += 1.0;
        let next = term * (2.0 * n - 1.0) * inv;
        if next >= term || next <= 1e-17 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

/// Activation function σ of a hidden unit σ(a·x - b).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Relu,
    /// exp(-z²/2)
    Gaussian,
    /// tanh restricted to [-A, A) and repeated with period 2A.
    PeriodizedTanh {
        half_period: f64,
    },
    /// ReLU restricted to [-A, A) and repeated with period 2A.
    PeriodizedRelu {
        half_period: f64,
    },
}

impl Activation {
    #[inline]
    pub fn eval(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
            Activation::Gaussian => (-0.5 * z * z).exp(),
            Activation::PeriodizedTanh { half_period } => reduce(z, half_period).tanh(),
            Activation::PeriodizedRelu { half_period } => reduce(z, half_period).max(0.0),
        }
    }

    /// dσ/dz. The ReLU derivative at 0 is taken to be 0; the periodized
    /// kinds use the derivative of the reduced argument (the jumps at odd
    /// multiples of A are ignored).
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Relu => relu_step(z),
            Activation::Gaussian => -z * (-0.5 * z * z).exp(),
            Activation::PeriodizedTanh { half_period } => {
                let t = reduce(z, half_period).tanh();
                1.0 - t * t
            }
            Activation::PeriodizedRelu { half_period } => relu_step(reduce(z, half_period)),
        }
    }

    /// The admissible ridgelet function paired with this activation, if any.
    pub fn ridgelet(self) -> Option<RidgeletFn> {
        match self {
            Activation::Tanh => Some(RidgeletFn::TanhDual),
            Activation::Relu => Some(RidgeletFn::ReluDual),
            _ => None,
        }
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            Activation::PeriodizedTanh { half_period }
            | Activation::PeriodizedRelu { half_period }
                if !(half_period.is_finite() && half_period > 0.0) =>
            {
                Err(Error::InvalidParameter(format!(
                    "half period must be positive and finite, got {half_period}"
                )))
            }
            other => Ok(other),
        }
    }
}

#[inline]
fn relu_step(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Maps z into [-A, A) by subtracting the nearest multiple of 2A.
#[inline]
fn reduce(z: f64, half_period: f64) -> f64 {
    let period = 2.0 * half_period;
    let n = ((z + half_period) / period).floor();
    let r = z - n * period;
    // rounding can land r a hair outside the fundamental domain
    if r >= half_period {
        r - period
    } else if r < -half_period {
        r + period
    } else {
        r
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Tanh => write!(f, "tanh"),
            Activation::Relu => write!(f, "relu"),
            Activation::Gaussian => write!(f, "gaussian"),
            Activation::PeriodizedTanh { half_period } => write!(f, "ptanh:{half_period}"),
            Activation::PeriodizedRelu { half_period } => write!(f, "prelu:{half_period}"),
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    /// Accepts `tanh`, `relu`, `gaussian`, `ptanh:A` and `prelu:A`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, arg) = match lower.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (lower.as_str(), None),
        };
        let half_period = || -> Result<f64> {
            let a = arg.ok_or_else(|| {
                Error::InvalidParameter(format!("'{name}' needs a half period, e.g. {name}:4"))
            })?;
            a.parse::<f64>()
                .map_err(|e| Error::Parse(format!("half period '{a}': {e}")))
        };
        let act = match name {
            "tanh" => Activation::Tanh,
            "relu" => Activation::Relu,
            "gaussian" | "gauss" => Activation::Gaussian,
            "ptanh" => Activation::PeriodizedTanh {
                half_period: half_period()?,
            },
            "prelu" => Activation::PeriodizedRelu {
                half_period: half_period()?,
            },
            _ => {
                return Err(Error::UnknownName {
                    kind: "activation",
                    name: s.to_string(),
                    expected: "tanh, relu, gaussian, ptanh:A, prelu:A",
                })
            }
        };
        act.validate()
    }
}

/// Admissible ridgelet functions for the classic ridgelet transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RidgeletFn {
    /// (4z² - 2) F(z) - 2z, paired with tanh. Odd.
    TanhDual,
    /// (12z - 8z³) F(z) + 4z² - 4, paired with ReLU. Even.
    ReluDual,
}

impl RidgeletFn {
    #[inline]
    pub fn eval(self, z: f64) -> f64 {
        let f = dawson_unchecked(z);
        let z2 = z * z;
        match self {
            RidgeletFn::TanhDual => (4.0 * z2 - 2.0) * f - 2.0 * z,
            RidgeletFn::ReluDual => (12.0 * z - 8.0 * z2 * z) * f + 4.0 * z2 - 4.0,
        }
    }

    pub fn activation(self) -> Activation {
        match self {
            RidgeletFn::TanhDual => Activation::Tanh,
            RidgeletFn::ReluDual => Activation::Relu,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Adaptive Simpson quadrature, used as an oracle independent of the
    /// series / asymptotic evaluation.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn step(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                left + right + delta / 15.0
            } else {
                step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        step(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    fn dawson_oracle(z: f64) -> f64 {
        // exp(w² - z²) keeps the integrand bounded by 1
        adaptive_simpson(&|w| (w * w - z * z).exp(), 0.0, z, 1e-14)
    }

    #[test]
    fn dawson_zero_and_oddness() {
        assert_eq!(dawson(0.0).unwrap(), 0.0);
        for z in [0.5, 1.0, 3.0] {
            assert_eq!(dawson(-z).unwrap(), -dawson(z).unwrap());
        }
    }

    #[test]
    fn dawson_rejects_non_finite() {
        assert!(matches!(dawson(f64::NAN), Err(Error::Domain(_))));
        assert!(dawson(f64::INFINITY).is_err());
    }

    #[test]
    fn dawson_at_one_matches_quadrature() {
        let oracle = dawson_oracle(1.0);
        // frozen from the oracle above
        assert!((oracle - 0.538_079_506_912_768_4).abs() < 1e-13);
        assert!((dawson(1.0).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn dawson_matches_quadrature_across_range() {
        let mut z = -10.0;
        while z <= 10.0 {
            let got = dawson(z).unwrap();
            let want = dawson_oracle(z);
            assert!((got - want).abs() < 1e-12, "z={z}: {got} vs {want}");
            z += 0.37;
        }
        // both sides of the branch switch
        for z in [5.999, 6.0, 6.001, 6.5] {
            assert!(
                (dawson(z).unwrap() - dawson_oracle(z)).abs() < 1e-12,
                "z={z}"
            );
        }
    }

    #[test]
    fn dawson_large_argument_tends_to_reciprocal() {
        for z in [50.0, 1e3, 1e8] {
            let f = dawson(z).unwrap();
            assert!((f * 2.0 * z - 1.0).abs() < 1.0 / (z * z));
        }
    }

    #[test]
    fn dawson_odd_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let z: f64 = rng.random_range(-10.0..10.0);
            assert!((dawson(z).unwrap() + dawson(-z).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn dawson_satisfies_ode() {
        let h = 1e-5;
        let mut z = -5.0;
        while z <= 5.0 {
            let d = (dawson_unchecked(z + h) - dawson_unchecked(z - h)) / (2.0 * h);
            let rhs = 1.0 - 2.0 * z * dawson_unchecked(z);
            assert!((d - rhs).abs() < 1e-6, "z={z}");
            z += 0.05;
        }
    }

    #[test]
    fn activation_values() {
        assert_eq!(Activation::Tanh.eval(0.0), 0.0);
        assert_eq!(Activation::Relu.eval(-1.5), 0.0);
        assert_eq!(Activation::Gaussian.eval(0.0), 1.0);
        let p = Activation::PeriodizedRelu { half_period: 4.0 };
        assert_eq!(p.eval(9.0), Activation::Relu.eval(1.0));
        assert_eq!(p.eval(9.0), 1.0);
        // inside the fundamental domain the periodization is the identity
        let pt = Activation::PeriodizedTanh { half_period: 4.0 };
        assert_eq!(pt.eval(2.5), 2.5_f64.tanh());
        assert_eq!(pt.eval(-4.0), (-4.0_f64).tanh());
        assert_eq!(pt.eval(4.0), (-4.0_f64).tanh());
    }

    #[test]
    fn periodized_activations_are_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for act in [
            Activation::PeriodizedTanh { half_period: 4.0 },
            Activation::PeriodizedRelu { half_period: 2.5 },
        ] {
            let (Activation::PeriodizedTanh { half_period: a }
            | Activation::PeriodizedRelu { half_period: a }) = act
            else {
                unreachable!()
            };
            for _ in 0..200 {
                let z: f64 = rng.random_range(-30.0..30.0);
                assert!(
                    (act.eval(z) - act.eval(z + 2.0 * a)).abs() <= 1e-12,
                    "{act} z={z}"
                );
            }
        }
    }

    #[test]
    fn ridgelet_values() {
        assert_eq!(RidgeletFn::TanhDual.eval(0.0), 0.0);
        assert_eq!(RidgeletFn::ReluDual.eval(0.0), -4.0);
        // 2 F(1) - 2 with F(1) from the quadrature oracle
        let want = 2.0 * dawson_oracle(1.0) - 2.0;
        assert!((want - (-0.923_840_986_174_463_2)).abs() < 1e-12);
        assert!((RidgeletFn::TanhDual.eval(1.0) - want).abs() < 1e-12);
    }

    #[test]
    fn ridgelet_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let z: f64 = rng.random_range(-20.0..20.0);
            let t = RidgeletFn::TanhDual;
            let r = RidgeletFn::ReluDual;
            assert!((t.eval(z) + t.eval(-z)).abs() <= 1e-12);
            assert!((r.eval(z) - r.eval(-z)).abs() <= 1e-12);
        }
    }

    #[test]
    fn ridgelet_decays() {
        // (4z²-2)F - 2z ~ 1/z³ for large z
        let z = 40.0;
        let v = RidgeletFn::TanhDual.eval(z);
        assert!((v * z * z * z - 1.0).abs() < 0.01, "{v}");
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for act in [
            Activation::Tanh,
            Activation::Gaussian,
            Activation::PeriodizedTanh { half_period: 4.0 },
        ] {
            for z in [-2.3, -0.4, 0.7, 1.9] {
                let fd = (act.eval(z + h) - act.eval(z - h)) / (2.0 * h);
                assert!((fd - act.derivative(z)).abs() < 1e-8);
            }
        }
        assert_eq!(Activation::Relu.derivative(0.0), 0.0);
        assert_eq!(Activation::Relu.derivative(2.0), 1.0);
    }

    #[test]
    fn activation_parsing() {
        assert_eq!("tanh".parse::<Activation>().unwrap(), Activation::Tanh);
        assert_eq!(
            "ptanh:4".parse::<Activation>().unwrap(),
            Activation::PeriodizedTanh { half_period: 4.0 }
        );
        assert!("ptanh".parse::<Activation>().is_err());
        assert!("prelu:-1".parse::<Activation>().is_err());
        assert!(matches!(
            "sigmoid".parse::<Activation>(),
            Err(Error::UnknownName { .. })
        ));
        for act in [
            Activation::Relu,
            Activation::PeriodizedRelu { half_period: 2.5 },
        ] {
            assert_eq!(act.to_string().parse::<Activation>().unwrap(), act);
        }
    }
}
