//! Inverse Abel transform by Legendre expansion.
//!
//! Samples of `g = A f` on `[0, 1]` are read through the map
//! `x = sin²(t/2)` as a `2π`-periodic function of `t`. The Fourier
//! coefficients `γ̂_n` of `η(t) = sgn(t) e^{it/2} g(sin²(t/2)) / (2πi)` give
//! the orthonormal shifted-Legendre coefficients of `f` directly:
//! `c_n = (-1)^n √(2n+1) γ̂_n`. The expansion is then truncated at an index
//! chosen from the noise level.
//!
//! ```
//! use abelinv::{invert, InvertOptions, SampleSet, SelectionRule};
//!
//! let g = |x: f64| 16.0 / 3.0 * (x.powf(2.5) - x.powf(1.5));
//! let data = SampleSet::uniform(64, g).unwrap();
//! let opts = InvertOptions { selection: SelectionRule::Fixed, fixed_n: Some(4), ..Default::default() };
//! let inv = invert(&data, &opts).unwrap();
//! let f = |x: f64| 5.0 * x * x - 4.0 * x;
//! assert!((inv.solution.eval(0.3).unwrap() - f(0.3)).abs() < 1e-9);
//! ```

pub mod abel;
pub mod error;
pub mod legendre;
pub mod noise;
pub mod regularize;
mod serde_ext;
pub mod spectral;

pub use abel::{forward_abel, forward_expansion, AbelOperator, AbelPair, PairId, Which, DEFAULT_QUAD_ORDER};
pub use error::{Error, Result};
pub use legendre::{shifted_legendre, GaussLegendre, LegendreExpansion};
pub use noise::{add_noise, check_noise_propagation, l2_error, l2mu_norm, snr_db, NoiseSpec};
pub use regularize::{
    a_priori_n, discrepancy, invert, select_n_min_discrepancy, select_n_morozov, truncate, InversionReport,
    InvertOptions, SelectionRule,
};
pub use spectral::{eta_from_samples, fourier_coeffs, legendre_coeffs, GridKind, SampleSet};
