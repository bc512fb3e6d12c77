//! Shifted Legendre polynomials on [0, 1].
//!
//! The orthonormal basis is `P̄_n(x) = sqrt(2n+1) P_n(2x - 1)`, with `P_n`
//! the ordinary Legendre polynomial generated by
//! `(n+1) P_{n+1}(z) = (2n+1) z P_n(z) - n P_{n-1}(z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the closed interval [0, 1] before an abscissa is rejected.
pub const DOMAIN_TOL: f64 = 1e-12;

pub(crate) fn check_unit(what: &'static str, x: f64) -> Result<f64> {
    if !(-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&x) {
        return Err(Error::Domain {
            what,
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Ordinary Legendre polynomial `P_n(z)` by upward recurrence.
pub fn legendre_p(n: usize, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p_curr = z;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * z * p_curr - kf * p_prev) / (kf + 1.0);
        p_prev = p_curr;
        p_curr = p_next;
    }
    p_curr
}

/// Orthonormal shifted Legendre polynomial `P̄_n(x)` on [0, 1].
pub fn shifted_legendre(n: usize, x: f64) -> Result<f64> {
    let x = check_unit("x", x)?;
    Ok(((2 * n + 1) as f64).sqrt() * legendre_p(n, 2.0 * x - 1.0))
}

/// Fills `out[k] = P̄_k(x)` for `k < out.len()` in one recurrence sweep.
///
/// No domain check; callers pass points they have already validated.
pub fn shifted_legendre_all(x: f64, out: &mut [f64]) {
    let z = 2.0 * x - 1.0;
    let mut p_prev = 0.0;
    let mut p_curr = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        let kf = k as f64;
        *slot = (2.0 * kf + 1.0).sqrt() * p_curr;
        let p_next = ((2.0 * kf + 1.0) * z * p_curr - kf * p_prev) / (kf + 1.0);
        p_prev = p_curr;
        p_curr = p_next;
    }
}

/// A finite expansion `Σ c_n P̄_n(x)` over the shifted Legendre basis.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LegendreExpansion {
    pub coeffs: Vec<f64>,
    /// Largest imaginary magnitude discarded when the coefficients came from
    /// a complex spectrum. Zero for expansions built any other way.
    #[serde(default)]
    pub imag_residual: f64,
}

impl LegendreExpansion {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs,
            imag_residual: 0.0,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Highest index `N`, or `None` for the empty expansion.
    pub fn n_max(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluates the expansion at `x` by Clenshaw's backward recurrence.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = check_unit("x", x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        // With a_k = c_k sqrt(2k+1) the sum is Σ a_k P_k(z), and
        // P_{k+1} = alpha_k P_k + beta_k P_{k-1}, alpha_k = (2k+1) z / (k+1),
        // beta_k = -k / (k+1).
        let z = 2.0 * x - 1.0;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            let kf = k as f64;
            let a = c * (2.0 * kf + 1.0).sqrt();
            let alpha = (2.0 * kf + 1.0) * z / (kf + 1.0);
            let beta_next = -(kf + 1.0) / (kf + 2.0);
            let b0 = a + alpha * b1 + beta_next * b2;
            b2 = b1;
            b1 = b0;
        }
        b1
    }

    /// Sum of squared coefficients, i.e. the squared L²(0,1) norm.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&z, &w)| (mid + half * z, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule: one panel per sub-interval cut at the interior
    /// `breaks`. Break points outside `(a, b)` are ignored.
    pub fn integrate_piecewise<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        breaks: &[f64],
        mut f: F,
    ) -> f64 {
        panel_edges(a, b, breaks)
            .windows(2)
            .map(|e| self.integrate(e[0], e[1], &mut f))
            .sum()
    }
}

/// Sorted panel edges `a, interior breaks..., b`.
pub(crate) fn panel_edges(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    edges
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p_curr = z;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * z * p_curr - kf * p_prev) / (kf + 1.0);
        p_prev = p_curr;
        p_curr = p_next;
    }
    let nf = n as f64;
    let d = nf * (z * p_curr - p_prev) / (z * z - 1.0);
    (p_curr, d)
}

/// Projects `f` onto `P̄_0..P̄_{n_max}` with a `quad_order`-point Gauss rule.
pub fn project<F: Fn(f64) -> f64>(f: F, n_max: usize, quad_order: usize) -> LegendreExpansion {
    project_piecewise(f, n_max, quad_order, &[])
}

/// As [`project`], with the rule applied panel-wise between `breaks`.
/// Use this for functions with known jumps.
pub fn project_piecewise<F: Fn(f64) -> f64>(
    f: F,
    n_max: usize,
    quad_order: usize,
    breaks: &[f64],
) -> LegendreExpansion {
    let rule = GaussLegendre::new(quad_order);
    let mut coeffs = vec![0.0; n_max + 1];
    let mut basis = vec![0.0; n_max + 1];
    for edge in panel_edges(0.0, 1.0, breaks).windows(2) {
        for (x, w) in rule.mapped(edge[0], edge[1]) {
            let fx = f(x);
            shifted_legendre_all(x, &mut basis);
            for (c, p) in coeffs.iter_mut().zip(&basis) {
                *c += w * fx * p;
            }
        }
    }
    LegendreExpansion::new(coeffs)
}
