//! Synthetic datasets, ridgelet spectra and the comparison between a
//! spectrum and trained network parameters.

mod datasets;
mod spectrum;

pub use datasets::{gen_dataset, DatasetKind, TOPSIN_EXCLUSION};
pub use spectrum::{
    classic_spectrum, concentration_score, default_spectrum_axis, pearson, spectrum_correlation,
    spectrum_from_operator, ConcentrationScore, Normalization, Spectrum,
};
