//! Numerical toolkit for the integral representation of shallow neural
//! networks.
//!
//! A shallow network g(x) = Σ_j c_j σ(a_j·x - b_j) is the special case
//! S[γ_θ] of the integral representation S[γ](x) = ∫ γ(a,b) σ(a·x - b) dλ(a,b)
//! with λ a sum of Dirac atoms. On a finite base measure λ, the regularized
//! least-squares problem over γ is a linear inverse problem with a closed
//! form minimizer γ* = (β + S*S)⁻¹ S* f, which is itself a (modified)
//! ridgelet transform of the data. The crate provides:
//!
//! * [`special`]: Dawson's integral, activations and admissible ridgelet functions
//! * [`data`]: datasets, base measures, coefficient functions, network parameters
//! * [`operators`]: S, S*, the Gram operator T = S*S, Tikhonov and ρ* solvers
//! * [`training`]: backpropagation training of finite networks (ADAM, L-BFGS)
//! * [`experiments`]: synthetic datasets, ridgelet spectra and the
//!   concentration score comparing trained parameters against a spectrum
//! * [`io`]: CSV / JSON formats shared with the command-line front end

pub mod data;
pub mod error;
pub mod experiments;
pub mod io;
pub mod operators;
pub mod selfcheck;
pub mod special;
pub mod training;

pub use error::{Error, Result};
