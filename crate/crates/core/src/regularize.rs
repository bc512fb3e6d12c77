//! Spectral cut-off regularization.
//!
//! The truncated expansions `f_N = Σ_{n≤N} c_n P̄_n` form a one-parameter
//! family. `N` is picked by the discrepancy principle, by minimum
//! discrepancy, by the a-priori rule `N = c ε^{-1/k}`, or fixed by the caller.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::abel::AbelOperator;
use crate::error::{invalid, Error, Result};
use crate::legendre::LegendreExpansion;
use crate::spectral::{legendre_coeffs, SampleSet};

pub const DEFAULT_TAU: f64 = 1.5;

/// Discrepancies within this fraction of the data norm count as equal when
/// searching for the minimum, so roundoff does not decide the choice.
const TIE_RTOL: f64 = 1e-12;

/// The first `n + 1` coefficients of `exp`.
pub fn truncate(exp: &LegendreExpansion, n: usize) -> Result<LegendreExpansion> {
    let max = exp.n_max().ok_or(Error::OutOfRange { index: n, max: 0 })?;
    if n > max {
        return Err(Error::OutOfRange { index: n, max });
    }
    Ok(LegendreExpansion {
        coeffs: exp.coeffs[..=n].to_vec(),
        imag_residual: exp.imag_residual,
    })
}

/// Trapezoid weights for `∫_0^1 h dx` on scattered abscissae: points are
/// ordered by `x`, repeated abscissae are kept, and each point gets half of
/// its neighbouring gaps.
pub fn x_trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    for k in 0..n {
        let lo = x[order[k.saturating_sub(1)]];
        let hi = x[order[(k + 1).min(n - 1)]];
        w[order[k]] = 0.5 * (hi - lo);
    }
    w
}

/// `‖A f_N − g^ε‖_{L²(0,1)}` measured on the data abscissae.
#[derive(Debug, Clone)]
pub struct Discrepancy {
    x: Vec<f64>,
    g: Vec<f64>,
    weights: Vec<f64>,
    quad_order: usize,
}

impl Discrepancy {
    pub fn new(data: &SampleSet, quad_order: usize) -> Self {
        let x = data.x_nodes();
        let weights = x_trapezoid_weights(&x);
        Self {
            x,
            g: data.g_values().to_vec(),
            weights,
            quad_order,
        }
    }

    // A Gauss rule in θ loses accuracy on P̄_n once n approaches the order,
    // so the order is raised to keep a margin above the expansion degree.
    fn operator_for(&self, degree: usize) -> AbelOperator {
        AbelOperator::new(self.quad_order.max(degree + 24))
    }

    fn weighted_norm(&self, residual: &[f64]) -> f64 {
        residual
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * r * r)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖g^ε‖` in the same discrete norm.
    pub fn data_norm(&self) -> f64 {
        self.weighted_norm(&self.g)
    }

    /// Discrepancy of one expansion, evaluated from scratch.
    pub fn eval(&self, exp: &LegendreExpansion) -> Result<f64> {
        let op = self.operator_for(exp.n_max().unwrap_or(0));
        let residual = self
            .x
            .iter()
            .zip(&self.g)
            .map(|(&x, &g)| Ok(op.apply_expansion(exp, x)? - g))
            .collect::<Result<Vec<f64>>>()?;
        Ok(self.weighted_norm(&residual))
    }

    /// `(N, discrepancy(truncate(family, N)))` for `N = 0..=n_cap`, updating
    /// the residual one forward-transformed basis term at a time.
    pub fn curve(&self, family: &LegendreExpansion, n_cap: usize) -> Result<Vec<(usize, f64)>> {
        let max = family.n_max().ok_or(Error::OutOfRange { index: n_cap, max: 0 })?;
        if n_cap > max {
            return Err(Error::OutOfRange { index: n_cap, max });
        }
        let images = self.operator_for(n_cap).basis_images(&self.x, n_cap)?;
        let mut residual: Vec<f64> = self.g.iter().map(|g| -g).collect();
        let mut curve = Vec::with_capacity(n_cap + 1);
        for (n, image) in images.iter().enumerate() {
            let c = family.coeffs[n];
            for (r, a) in residual.iter_mut().zip(image) {
                *r += c * a;
            }
            curve.push((n, self.weighted_norm(&residual)));
        }
        Ok(curve)
    }
}

/// Discrepancy of `exp` against the samples in `data`.
pub fn discrepancy(exp: &LegendreExpansion, data: &SampleSet, quad_order: usize) -> Result<f64> {
    Discrepancy::new(data, quad_order).eval(exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    Morozov,
    MinDiscrepancy,
    APriori,
    Fixed,
}

impl SelectionRule {
    pub fn name(self) -> &'static str {
        match self {
            SelectionRule::Morozov => "morozov",
            SelectionRule::MinDiscrepancy => "min-discrepancy",
            SelectionRule::APriori => "a-priori",
            SelectionRule::Fixed => "fixed",
        }
    }
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "morozov" => Ok(SelectionRule::Morozov),
            "min-discrepancy" => Ok(SelectionRule::MinDiscrepancy),
            "a-priori" => Ok(SelectionRule::APriori),
            "fixed" => Ok(SelectionRule::Fixed),
            other => Err(invalid("selection", format!("unknown rule `{other}`"))),
        }
    }
}

/// Outcome of a truncation choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub chosen_n: usize,
    pub tau: f64,
    pub epsilon: f64,
    pub discrepancy_curve: Vec<(usize, f64)>,
    pub selection_rule: SelectionRule,
    /// `None` when unknown; `Some(inf)` for noiseless data.
    #[serde(with = "crate::serde_ext::opt_f64_inf", default)]
    pub snr_db: Option<f64>,
    pub imag_residual: f64,
}

impl InversionReport {
    pub fn discrepancy_at(&self, n: usize) -> Option<f64> {
        self.discrepancy_curve.iter().find(|(k, _)| *k == n).map(|&(_, d)| d)
    }
}

fn argmin_with_ties(curve: &[(usize, f64)], tie: f64) -> usize {
    let min = curve.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
    curve
        .iter()
        .find(|&&(_, d)| d <= min + tie)
        .map_or(0, |&(n, _)| n)
}

fn check_cap(family: &LegendreExpansion, n_cap: usize) -> Result<()> {
    match family.n_max() {
        Some(max) if n_cap <= max => Ok(()),
        Some(max) => Err(Error::OutOfRange { index: n_cap, max }),
        None => Err(invalid("family", "empty expansion")),
    }
}

/// Discrepancy principle: the smallest `N ≤ n_cap` whose discrepancy is at
/// most `τε`, so that `D(N-1) > τε ≥ D(N)`. Falls back to minimum
/// discrepancy, recorded in `selection_rule`, when no `N` qualifies.
pub fn select_n_morozov(
    family: &LegendreExpansion,
    data: &SampleSet,
    epsilon: f64,
    tau: f64,
    n_cap: usize,
    quad_order: usize,
) -> Result<InversionReport> {
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    if !(tau > 1.0) {
        return Err(invalid("tau", format!("must be > 1, got {tau}")));
    }
    check_cap(family, n_cap)?;
    let disc = Discrepancy::new(data, quad_order);
    let curve = disc.curve(family, n_cap)?;
    let bound = tau * epsilon;
    let (chosen_n, rule) = match curve.iter().find(|&&(_, d)| d <= bound) {
        Some(&(n, _)) => (n, SelectionRule::Morozov),
        None => (
            argmin_with_ties(&curve, TIE_RTOL * disc.data_norm()),
            SelectionRule::MinDiscrepancy,
        ),
    };
    Ok(InversionReport {
        chosen_n,
        tau,
        epsilon,
        discrepancy_curve: curve,
        selection_rule: rule,
        snr_db: None,
        imag_residual: family.imag_residual,
    })
}

/// `argmin_N D(N)` over `0..=n_cap`, ties toward smaller `N`.
pub fn select_n_min_discrepancy(
    family: &LegendreExpansion,
    data: &SampleSet,
    n_cap: usize,
    quad_order: usize,
) -> Result<InversionReport> {
    check_cap(family, n_cap)?;
    let disc = Discrepancy::new(data, quad_order);
    let curve = disc.curve(family, n_cap)?;
    Ok(InversionReport {
        chosen_n: argmin_with_ties(&curve, TIE_RTOL * disc.data_norm()),
        tau: DEFAULT_TAU,
        epsilon: 0.0,
        discrepancy_curve: curve,
        selection_rule: SelectionRule::MinDiscrepancy,
        snr_db: None,
        imag_residual: family.imag_residual,
    })
}

/// `N = round(c ε^{-1/k})`, at least 1. Needs `k > 1`.
pub fn a_priori_n(epsilon: f64, k: u32, c: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    if k <= 1 {
        return Err(invalid("k", format!("smoothness order must exceed 1, got {k}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid("c", format!("must be positive, got {c}")));
    }
    let n = (c * epsilon.powf(-1.0 / k as f64)).round();
    if !n.is_finite() || n > usize::MAX as f64 {
        return Err(invalid("epsilon", "a-priori index overflows"));
    }
    Ok((n as usize).max(1))
}

/// How to run the three-step inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertOptions {
    pub selection: SelectionRule,
    /// Noise level; required by `Morozov` and `APriori`.
    pub epsilon: f64,
    pub tau: f64,
    /// Largest candidate `N`; defaults to `N_s/2 - 1` on uniform grids.
    pub n_cap: Option<usize>,
    /// Truncation index for `Fixed`.
    pub fixed_n: Option<usize>,
    pub k: u32,
    pub c: f64,
    pub quad_order: usize,
}

impl Default for InvertOptions {
    fn default() -> Self {
        Self {
            selection: SelectionRule::Morozov,
            epsilon: 0.0,
            tau: DEFAULT_TAU,
            n_cap: None,
            fixed_n: None,
            k: 2,
            c: 1.0,
            quad_order: crate::abel::DEFAULT_QUAD_ORDER,
        }
    }
}

/// Result of [`invert`].
#[derive(Debug, Clone)]
pub struct Inversion {
    /// All computed coefficients `c_0..c_{n_max}`.
    pub family: LegendreExpansion,
    /// The selected `f_N`.
    pub solution: LegendreExpansion,
    pub report: InversionReport,
    pub symmetry_residual: f64,
}

pub fn default_n_cap(data: &SampleSet) -> usize {
    match data.grid_kind() {
        crate::spectral::GridKind::Uniform => (data.len() / 2).saturating_sub(1),
        crate::spectral::GridKind::Arbitrary => data.max_index(),
    }
}

/// Coefficients from the data, a truncation index by the chosen rule, and
/// the truncated expansion.
pub fn invert(data: &SampleSet, opts: &InvertOptions) -> Result<Inversion> {
    let n_cap = opts.n_cap.unwrap_or_else(|| default_n_cap(data));
    let target = match opts.selection {
        SelectionRule::Fixed => Some(
            opts.fixed_n
                .ok_or_else(|| invalid("fixed_n", "fixed selection needs a truncation index"))?,
        ),
        SelectionRule::APriori => Some(a_priori_n(opts.epsilon, opts.k, opts.c)?),
        _ => None,
    };
    let n_max = target.map_or(n_cap, |t| t.max(n_cap));
    let limit = data.max_index();
    if n_max > limit {
        return Err(Error::Aliasing {
            n_max,
            n_samples: data.len(),
            limit,
        });
    }
    let (family, spectrum) = legendre_coeffs(data, n_max)?;
    let mut report = match opts.selection {
        SelectionRule::Morozov => select_n_morozov(&family, data, opts.epsilon, opts.tau, n_cap, opts.quad_order)?,
        SelectionRule::MinDiscrepancy => {
            let mut r = select_n_min_discrepancy(&family, data, n_cap, opts.quad_order)?;
            r.epsilon = opts.epsilon;
            r.tau = opts.tau;
            r
        }
        rule @ (SelectionRule::Fixed | SelectionRule::APriori) => {
            let n = target.unwrap_or(0);
            let curve = Discrepancy::new(data, opts.quad_order).curve(&family, n_max)?;
            InversionReport {
                chosen_n: n,
                tau: opts.tau,
                epsilon: opts.epsilon,
                discrepancy_curve: curve,
                selection_rule: rule,
                snr_db: None,
                imag_residual: family.imag_residual,
            }
        }
    };
    report.imag_residual = family.imag_residual;
    let solution = truncate(&family, report.chosen_n)?;
    Ok(Inversion {
        family,
        solution,
        report,
        symmetry_residual: spectrum.symmetry_residual(),
    })
}
