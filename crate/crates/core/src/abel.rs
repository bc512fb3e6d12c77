//! Forward Abel operator `(Af)(x) = ∫_0^x f(y) (x-y)^{-1/2} dy` and the
//! catalog of analytic Abel pairs.
//!
//! The substitution `y = x sin²θ` turns the weakly singular integral into
//! `2 sqrt(x) ∫_0^{π/2} f(x sin²θ) sinθ dθ`, whose integrand is as smooth as
//! `f`. A fixed Gauss–Legendre rule in `θ` then gives deterministic results.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::legendre::{check_unit, panel_edges, shifted_legendre_all, GaussLegendre, LegendreExpansion};

pub const DEFAULT_QUAD_ORDER: usize = 64;

/// Gauss–Legendre discretization of the forward Abel operator.
#[derive(Debug, Clone)]
pub struct AbelOperator {
    rule: GaussLegendre,
}

impl AbelOperator {
    pub fn new(quad_order: usize) -> Self {
        Self {
            rule: GaussLegendre::new(quad_order.max(1)),
        }
    }

    pub fn quad_order(&self) -> usize {
        self.rule.order()
    }

    /// `(Af)(x)`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> Result<f64> {
        self.apply_piecewise(f, x, &[])
    }

    /// `(Af)(x)` with the θ-range split where `y = x sin²θ` crosses one of
    /// `breaks`, so piecewise-smooth `f` keeps full accuracy.
    pub fn apply_piecewise<F: Fn(f64) -> f64>(&self, f: F, x: f64, breaks: &[f64]) -> Result<f64> {
        let x = check_unit("x", x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let theta_breaks: Vec<f64> = breaks
            .iter()
            .filter(|&&b| b > 0.0 && b < x)
            .map(|&b| (b / x).sqrt().asin())
            .collect();
        let mut acc = 0.0;
        for edge in panel_edges(0.0, FRAC_PI_2, &theta_breaks).windows(2) {
            acc += self.rule.integrate(edge[0], edge[1], |theta| {
                let s = theta.sin();
                f(x * s * s) * s
            });
        }
        Ok(2.0 * x.sqrt() * acc)
    }

    /// `(A f_N)(x)` for a Legendre expansion.
    pub fn apply_expansion(&self, exp: &LegendreExpansion, x: f64) -> Result<f64> {
        if exp.is_empty() {
            check_unit("x", x)?;
            return Ok(0.0);
        }
        self.apply(|y| exp.eval_unchecked(y), x)
    }

    /// `images[n][j] = (A P̄_n)(xs[j])` for `n = 0..=n_cap`, sharing one
    /// Legendre recurrence per quadrature node.
    pub fn basis_images(&self, xs: &[f64], n_cap: usize) -> Result<Vec<Vec<f64>>> {
        let mut images = vec![vec![0.0; xs.len()]; n_cap + 1];
        let mut basis = vec![0.0; n_cap + 1];
        let thetas: Vec<(f64, f64)> = self.rule.mapped(0.0, FRAC_PI_2).collect();
        for (j, &x) in xs.iter().enumerate() {
            let x = check_unit("x", x)?;
            if x == 0.0 {
                continue;
            }
            let scale = 2.0 * x.sqrt();
            for &(theta, w) in &thetas {
                let s = theta.sin();
                shifted_legendre_all(x * s * s, &mut basis);
                let ws = scale * w * s;
                for (img, p) in images.iter_mut().zip(&basis) {
                    img[j] += ws * p;
                }
            }
        }
        Ok(images)
    }
}

impl Default for AbelOperator {
    fn default() -> Self {
        Self::new(DEFAULT_QUAD_ORDER)
    }
}

/// `(Af)(x)` with a `quad_order`-point rule.
pub fn forward_abel<F: Fn(f64) -> f64>(f: F, x: f64, quad_order: usize) -> Result<f64> {
    AbelOperator::new(quad_order).apply(f, x)
}

/// `(A f_N)(x)` for an expansion; linear in the coefficients.
pub fn forward_expansion(exp: &LegendreExpansion, x: f64, quad_order: usize) -> Result<f64> {
    AbelOperator::new(quad_order).apply_expansion(exp, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairId {
    /// `f(x) = 5x² - 4x`, analytic.
    Poly,
    /// Square-root profile joined to a line at x = 3/4, continuous but not analytic.
    Spline,
    /// Piecewise linear with three jumps.
    Step,
}

impl PairId {
    pub const ALL: [PairId; 3] = [PairId::Poly, PairId::Spline, PairId::Step];

    pub fn name(self) -> &'static str {
        match self {
            PairId::Poly => "poly",
            PairId::Spline => "spline",
            PairId::Step => "step",
        }
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(PairId::Poly),
            "spline" => Ok(PairId::Spline),
            "step" => Ok(PairId::Step),
            other => Err(invalid("pair", format!("unknown pair `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Solution,
    Transform,
}

/// A catalog entry: a solution `f`, its closed-form transform `g = Af`, and
/// where `f` is not smooth.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelPair {
    pub id: PairId,
    pub smoothness_note: &'static str,
    /// Abscissae where `f` jumps.
    pub jump_locations: &'static [f64],
    /// All abscissae where `f` loses smoothness; quadrature panels split here.
    pub breakpoints: &'static [f64],
}

impl AbelPair {
    pub fn get(id: PairId) -> Self {
        match id {
            PairId::Poly => AbelPair {
                id,
                smoothness_note: "analytic",
                jump_locations: &[],
                breakpoints: &[],
            },
            PairId::Spline => AbelPair {
                id,
                smoothness_note: "continuous, not analytic",
                jump_locations: &[],
                breakpoints: &[SPLINE_BREAK],
            },
            PairId::Step => AbelPair {
                id,
                smoothness_note: "discontinuous",
                jump_locations: &[0.2, 0.5, 0.7],
                breakpoints: &[0.2, 0.5, 0.7],
            },
        }
    }

    /// The true solution `f(x)`, no domain check.
    pub fn solution(&self, x: f64) -> f64 {
        match self.id {
            PairId::Poly => f1(x),
            PairId::Spline => f2(x),
            PairId::Step => f3(x),
        }
    }

    /// The closed-form transform `g(x)`, no domain check.
    pub fn transform(&self, x: f64) -> f64 {
        match self.id {
            PairId::Poly => g1(x),
            PairId::Spline => g2(x),
            PairId::Step => g3(x),
        }
    }

    pub fn eval(&self, which: Which, x: f64) -> Result<f64> {
        let x = check_unit("x", x)?;
        Ok(match which {
            Which::Solution => self.solution(x),
            Which::Transform => self.transform(x),
        })
    }

    /// `(A f)(x)` computed numerically from the solution, with panels split
    /// at the pair's breakpoints.
    pub fn forward(&self, op: &AbelOperator, x: f64) -> Result<f64> {
        op.apply_piecewise(|y| self.solution(y), x, self.breakpoints)
    }
}

pub fn pair_eval(id: PairId, which: Which, x: f64) -> Result<f64> {
    AbelPair::get(id).eval(which, x)
}

// Where the square-root branch of the spline pair meets the line 2x - 1.
// Both branches equal 1/2 there, and the transform's second branch needs
// 4x - 3 >= 0.
const SPLINE_BREAK: f64 = 0.75;

fn f1(x: f64) -> f64 {
    5.0 * x * x - 4.0 * x
}

fn g1(x: f64) -> f64 {
    16.0 / 3.0 * (x.powf(2.5) - x.powf(1.5))
}

fn f2(x: f64) -> f64 {
    if x < SPLINE_BREAK {
        2.0 * (2.0 - 2.0 * (1.0 - x).sqrt() - x)
    } else {
        2.0 * x - 1.0
    }
}

fn g2(x: f64) -> f64 {
    let sx = x.sqrt();
    let head = 4.0 / 3.0 * (3.0 - 2.0 * x) * sx;
    if x < SPLINE_BREAK {
        head - 4.0 * (1.0 - x) * ((1.0 + sx) / (1.0 - x).sqrt()).ln()
    } else {
        let r = (4.0 * x - 3.0).sqrt();
        head - (9.0 - 8.0 * x) / 3.0 * r - 4.0 * (1.0 - x) * ((2.0 + 2.0 * sx) / (1.0 + r)).ln()
    }
}

fn f3(x: f64) -> f64 {
    if x < 0.2 {
        0.0
    } else if x < 0.5 {
        2.0 - x
    } else if x < 0.7 {
        x
    } else {
        1.5
    }
}

fn g3(x: f64) -> f64 {
    // A[(c0 + c1 y) 1_{y >= a}](x) with s = x - a equals
    // 2 (c0 + c1 x) sqrt(s) - (4/3) c1 s^{3/2}.
    fn ramp(a: f64, x: f64) -> (f64, f64) {
        let s = x - a;
        (s.powf(1.5), s.sqrt())
    }
    if x < 0.2 {
        return 0.0;
    }
    let (s32, s12) = ramp(0.2, x);
    let ga = 2.0 / 3.0 * s32 - (2.0 * x - 4.0) * s12;
    if x < 0.5 {
        return ga;
    }
    let (s32, s12) = ramp(0.5, x);
    let gb = ga - 4.0 / 3.0 * s32 + (4.0 * x - 4.0) * s12;
    if x < 0.7 {
        return gb;
    }
    let (s32, s12) = ramp(0.7, x);
    gb + 2.0 / 3.0 * s32 - (2.0 * x - 3.0) * s12
}
