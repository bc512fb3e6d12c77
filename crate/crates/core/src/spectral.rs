//! From data samples to Legendre coefficients.
//!
//! The data `g` at `x = sin²(t/2)` define the 2π-periodic function
//!
//! ```text
//! η(t) = sgn(t) e^{it/2} g(sin²(t/2)) / (2πi),   t ∈ [-π, π),
//! ```
//!
//! whose Fourier coefficients `γ̂_n = ∫ η(t) e^{int} dt` give the Legendre
//! coefficients of `f = A⁻¹g` through `c_n = (-1)^n sqrt(2n+1) γ̂_n`. They also
//! satisfy `γ̂_n = -γ̂_{-n-1}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::LegendreExpansion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// `t_j = -π + 2πj/N_s`.
    Uniform,
    /// Any strictly increasing nodes in `[-π, π)`.
    Arbitrary,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::Uniform => "uniform",
            GridKind::Arbitrary => "arbitrary",
        }
    }
}

/// Samples of `g` taken at `x_j = sin²(t_j/2)`, indexed by the auxiliary
/// variable `t_j`. The map `t -> x` is two-to-one, so the grid lives in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    t_nodes: Vec<f64>,
    g_values: Vec<f64>,
    grid_kind: GridKind,
}

impl SampleSet {
    pub const MIN_SAMPLES: usize = 4;

    pub fn new(t_nodes: Vec<f64>, g_values: Vec<f64>, grid_kind: GridKind) -> Result<Self> {
        if t_nodes.len() != g_values.len() {
            return Err(Error::LengthMismatch {
                left: t_nodes.len(),
                right: g_values.len(),
            });
        }
        let n = t_nodes.len();
        if n < Self::MIN_SAMPLES {
            return Err(Error::TooFewNodes {
                got: n,
                need: Self::MIN_SAMPLES,
            });
        }
        if let Some(bad) = t_nodes.iter().find(|t| !(**t >= -PI && **t < PI)) {
            return Err(Error::InvalidGrid(format!("node {bad} outside [-π, π)")));
        }
        if t_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("nodes are not strictly increasing".into()));
        }
        if g_values.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample value".into()));
        }
        if grid_kind == GridKind::Uniform {
            let expected = uniform_nodes(n);
            if let Some(j) = (0..n).find(|&j| t_nodes[j] != expected[j]) {
                return Err(Error::InvalidGrid(format!(
                    "node {j} is {} but a uniform grid needs {}",
                    t_nodes[j], expected[j]
                )));
            }
        }
        Ok(Self {
            t_nodes,
            g_values,
            grid_kind,
        })
    }

    /// Samples `g` on the uniform grid with `n_samples` nodes.
    pub fn uniform<G: Fn(f64) -> f64>(n_samples: usize, g: G) -> Result<Self> {
        let t = uniform_nodes(n_samples);
        let values = t.iter().map(|&t| g(x_of_t(t))).collect();
        Self::new(t, values, GridKind::Uniform)
    }

    /// Samples `g` on caller-chosen nodes.
    pub fn arbitrary<G: Fn(f64) -> f64>(t_nodes: Vec<f64>, g: G) -> Result<Self> {
        let values = t_nodes.iter().map(|&t| g(x_of_t(t))).collect();
        Self::new(t_nodes, values, GridKind::Arbitrary)
    }

    /// Same grid, new values.
    pub fn with_values(&self, g_values: Vec<f64>) -> Result<Self> {
        Self::new(self.t_nodes.clone(), g_values, self.grid_kind)
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn g_values(&self) -> &[f64] {
        &self.g_values
    }

    pub fn grid_kind(&self) -> GridKind {
        self.grid_kind
    }

    pub fn len(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_nodes.is_empty()
    }

    /// Data abscissae `x_j = sin²(t_j/2)`.
    pub fn x_nodes(&self) -> Vec<f64> {
        self.t_nodes.iter().map(|&t| x_of_t(t)).collect()
    }

    /// Largest `n_max` the coefficient extraction accepts for this grid.
    pub fn max_index(&self) -> usize {
        match self.grid_kind {
            GridKind::Uniform => self.len() / 2,
            GridKind::Arbitrary => self.len() / 4 - 1,
        }
    }
}

/// `t_j = -π + 2πj/n`.
pub fn uniform_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
}

pub fn x_of_t(t: f64) -> f64 {
    let s = (0.5 * t).sin();
    s * s
}

/// Values of the auxiliary function `η` on the sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaGrid {
    pub t_nodes: Vec<f64>,
    pub eta_values: Vec<Complex64>,
    pub grid_kind: GridKind,
}

/// `η(t_j) = sgn(t_j) e^{i t_j/2} g_j / (2πi)`, with `sgn(0) = 0`.
pub fn eta_from_samples(s: &SampleSet) -> EtaGrid {
    let eta_values = s
        .t_nodes
        .iter()
        .zip(&s.g_values)
        .map(|(&t, &g)| {
            let sgn = if t > 0.0 {
                1.0
            } else if t < 0.0 {
                -1.0
            } else {
                0.0
            };
            // e^{it/2} / i = sin(t/2) - i cos(t/2)
            let (sin, cos) = (0.5 * t).sin_cos();
            Complex64::new(sin, -cos) * (sgn * g / (2.0 * PI))
        })
        .collect();
    EtaGrid {
        t_nodes: s.t_nodes.clone(),
        eta_values,
        grid_kind: s.grid_kind,
    }
}

/// Fourier coefficients `γ̂_n` of `η` for a contiguous index range.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxSpectrum {
    lo: i64,
    gamma: Vec<Complex64>,
}

impl AuxSpectrum {
    pub fn get(&self, n: i64) -> Option<Complex64> {
        let k = n.checked_sub(self.lo)?;
        usize::try_from(k).ok().and_then(|k| self.gamma.get(k)).copied()
    }

    pub fn lowest(&self) -> i64 {
        self.lo
    }

    /// Largest stored index.
    pub fn n_max(&self) -> i64 {
        self.lo + self.gamma.len() as i64 - 1
    }

    /// `(n, γ̂_n)` in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.gamma.iter().enumerate().map(|(k, &g)| (self.lo + k as i64, g))
    }

    /// `max |γ̂_n + γ̂_{-n-1}|` over the `n ≥ 0` whose partner is stored.
    pub fn symmetry_residual(&self) -> f64 {
        (0..=self.n_max())
            .filter_map(|n| Some((self.get(n)? + self.get(-n - 1)?).norm()))
            .fold(0.0, f64::max)
    }
}

/// `γ̂_n ≈ (2π/N_s) Σ_j η(t_j) e^{i n t_j}` on a uniform grid, one FFT of
/// length `N_s`.
///
/// All `N_s` bins are returned, as indices `n_max+1-N_s ..= n_max`. The
/// rectangle rule is exact for trigonometric polynomials whose aliases stay
/// outside that window. `n_max` may not exceed `N_s/2`.
pub fn fourier_coeffs(eta: &EtaGrid, n_max: usize) -> Result<AuxSpectrum> {
    let n_s = eta.eta_values.len();
    if eta.grid_kind != GridKind::Uniform {
        return Err(Error::InvalidGrid("the FFT path needs a uniform grid".into()));
    }
    let limit = n_s / 2;
    if n_max > limit {
        return Err(Error::Aliasing {
            n_max,
            n_samples: n_s,
            limit,
        });
    }
    let mut buf = eta.eta_values.clone();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(n_s).process(&mut buf);

    // e^{i n t_j} = (-1)^n e^{2πi nj/N_s}, and the inverse FFT computes
    // Σ_j x_j e^{2πi jk/N_s}.
    let scale = 2.0 * PI / n_s as f64;
    let lo = n_max as i64 + 1 - n_s as i64;
    let gamma = (lo..=n_max as i64)
        .map(|n| {
            let bin = n.rem_euclid(n_s as i64) as usize;
            let sign = if n.rem_euclid(2) == 0 { scale } else { -scale };
            buf[bin] * sign
        })
        .collect();
    Ok(AuxSpectrum { lo, gamma })
}

/// Periodic trapezoid weights `(t_{j+1} - t_{j-1}) / 2`, wrapping across 2π.
pub fn trapezoid_weights(t: &[f64]) -> Vec<f64> {
    let n = t.len();
    (0..n)
        .map(|j| {
            let next = if j + 1 < n { t[j + 1] } else { t[0] + 2.0 * PI };
            let prev = if j > 0 { t[j - 1] } else { t[n - 1] - 2.0 * PI };
            0.5 * (next - prev)
        })
        .collect()
}

/// `γ̂_n` for `n ∈ [-n_max-1, n_max]` by the periodic trapezoid rule on an
/// arbitrary grid, summed directly in `O(N_s · n_max)`.
pub fn fourier_coeffs_nonuniform(eta: &EtaGrid, n_max: usize) -> Result<AuxSpectrum> {
    let n_s = eta.t_nodes.len();
    let need = 4 * (n_max + 1);
    if n_s < need {
        return Err(Error::TooFewNodes { got: n_s, need });
    }
    if eta.t_nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("nodes are not strictly increasing".into()));
    }
    let weights = trapezoid_weights(&eta.t_nodes);
    let lo = -(n_max as i64) - 1;
    let gamma = (lo..=n_max as i64)
        .map(|n| {
            let nf = n as f64;
            eta.t_nodes
                .iter()
                .zip(&eta.eta_values)
                .zip(&weights)
                .map(|((&t, &e), &w)| e * Complex64::cis(nf * t) * w)
                .sum()
        })
        .collect();
    Ok(AuxSpectrum { lo, gamma })
}

/// `c_n = Re[(-1)^n sqrt(2n+1) γ̂_n]` for `n = 0..=n_max`; the largest
/// dropped imaginary part is kept as `imag_residual`.
pub fn coeffs_from_spectrum(spec: &AuxSpectrum, n_max: usize) -> Result<LegendreExpansion> {
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut imag_residual: f64 = 0.0;
    for n in 0..=n_max {
        let gamma = spec.get(n as i64).ok_or(Error::MissingCoefficient(n as i64))?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let c = gamma * (sign * ((2 * n + 1) as f64).sqrt());
        coeffs.push(c.re);
        imag_residual = imag_residual.max(c.im.abs());
    }
    Ok(LegendreExpansion {
        coeffs,
        imag_residual,
    })
}

/// Step 1 of the inversion: samples to spectrum to coefficients `c_0..c_{n_max}`.
/// Uniform grids go through the FFT, arbitrary ones through the direct sum.
pub fn legendre_coeffs(s: &SampleSet, n_max: usize) -> Result<(LegendreExpansion, AuxSpectrum)> {
    let eta = eta_from_samples(s);
    let spec = match s.grid_kind {
        GridKind::Uniform => fourier_coeffs(&eta, n_max)?,
        GridKind::Arbitrary => fourier_coeffs_nonuniform(&eta, n_max)?,
    };
    let exp = coeffs_from_spectrum(&spec, n_max)?;
    Ok((exp, spec))
}
