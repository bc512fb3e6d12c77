//! Synthetic noise, signal-to-noise ratio and error metrics.
//!
//! Noise is `g^ε = g + ε ν` with `ν_j` i.i.d. standard normal, drawn from a
//! ChaCha8 stream seeded with `seed` in sample order. The same
//! `(seed, N_s)` always gives the same `ν`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::legendre::{GaussLegendre, LegendreExpansion};
use crate::spectral::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self { epsilon, seed }
    }
}

/// `n` standard normal draws from the stream for `seed`.
pub fn gaussian_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `g + ε ν` on the same nodes. `ε = 0` returns the input unchanged.
pub fn add_noise(s: &SampleSet, spec: NoiseSpec) -> Result<SampleSet> {
    if !(spec.epsilon >= 0.0 && spec.epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be finite and >= 0, got {}", spec.epsilon)));
    }
    if spec.epsilon == 0.0 {
        return Ok(s.clone());
    }
    let nu = gaussian_vector(s.len(), spec.seed);
    let g = s
        .g_values()
        .iter()
        .zip(&nu)
        .map(|(g, v)| g + spec.epsilon * v)
        .collect();
    s.with_values(g)
}

/// `10 log10(Σ g² / Σ (g^ε − g)²)`, `+∞` when the two agree exactly.
pub fn snr_db(clean: &SampleSet, noisy: &SampleSet) -> Result<f64> {
    if clean.t_nodes() != noisy.t_nodes() {
        return Err(Error::InvalidGrid("clean and noisy samples are on different nodes".into()));
    }
    let signal: f64 = clean.g_values().iter().map(|g| g * g).sum();
    let noise: f64 = clean
        .g_values()
        .iter()
        .zip(noisy.g_values())
        .map(|(a, b)| (b - a) * (b - a))
        .sum();
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

/// `‖h‖_μ` with `dμ = dx / √(x(1−x))`, computed after the substitution
/// `x = sin²(u/2)` which turns it into `∫_0^π h(sin²(u/2))² du`.
pub fn l2mu_norm<H: Fn(f64) -> f64>(h: H, quad_order: usize) -> f64 {
    let rule = GaussLegendre::new(quad_order);
    rule.integrate(0.0, std::f64::consts::PI, |u| {
        let s = (0.5 * u).sin();
        let v = h(s * s);
        v * v
    })
    .sqrt()
}

/// Discrete `‖·‖_μ` of values on a uniform `t`-grid: the rectangle rule
/// `(π/N_s) Σ_j v_j²`, square-rooted.
pub fn sample_l2mu_norm(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    (std::f64::consts::PI / n * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `raw` rescaled to unit [`sample_l2mu_norm`].
pub fn normalize_direction(raw: &[f64]) -> Result<Vec<f64>> {
    let m = sample_l2mu_norm(raw);
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid("direction", "zero or non-finite direction"));
    }
    Ok(raw.iter().map(|v| v / m).collect())
}

fn panel_breaks(grid_size: usize, breaks: &[f64]) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=grid_size).map(|i| i as f64 / grid_size as f64).collect();
    e.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < 1.0));
    e.sort_by(f64::total_cmp);
    e.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    e
}

/// `‖f_true − f_N‖_{L²(0,1)}` by 16-point Gauss on `grid_size` equal panels.
pub fn l2_error<F: Fn(f64) -> f64>(f_true: F, exp: &LegendreExpansion, grid_size: usize) -> Result<f64> {
    l2_error_piecewise(f_true, exp, grid_size, &[])
}

/// As [`l2_error`], with extra panel edges at the jumps of `f_true`.
pub fn l2_error_piecewise<F: Fn(f64) -> f64>(
    f_true: F,
    exp: &LegendreExpansion,
    grid_size: usize,
    breaks: &[f64],
) -> Result<f64> {
    if grid_size == 0 {
        return Err(invalid("grid_size", "need at least one panel"));
    }
    let rule = GaussLegendre::new(16);
    let edges = panel_breaks(grid_size, breaks);
    let mut acc = 0.0;
    for w in edges.windows(2) {
        for (x, wt) in rule.mapped(w[0], w[1]) {
            let d = f_true(x) - exp.eval_unchecked(x);
            acc += wt * d * d;
        }
    }
    Ok(acc.sqrt())
}

/// `(x, |f_true(x) − f_N(x)|)` on `grid`.
pub fn pointwise_error_curve<F: Fn(f64) -> f64>(
    f_true: F,
    exp: &LegendreExpansion,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&x| Ok((x, (f_true(x) - exp.eval(x)?).abs())))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `(Σ_{k≤n} |c_k − c_k^ε|²)^{1/2}` with `(n+1) ε / √π`, the bound
/// that holds when the perturbation has `‖g − g^ε‖_μ ≤ ε`.
pub fn check_noise_propagation(
    clean: &LegendreExpansion,
    noisy: &LegendreExpansion,
    epsilon: f64,
    n: usize,
) -> Result<BoundCheck> {
    for e in [clean, noisy] {
        let max = e.n_max().unwrap_or(0);
        if e.is_empty() || n > max {
            return Err(Error::OutOfRange { index: n, max });
        }
    }
    let lhs = clean.coeffs[..=n]
        .iter()
        .zip(&noisy.coeffs[..=n])
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let rhs = (n as f64 + 1.0) * epsilon / std::f64::consts::PI.sqrt();
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-6),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::legendre_coeffs;
    use proptest::prelude::*;

    fn g1(x: f64) -> f64 {
        16.0 / 3.0 * (x.powf(2.5) - x.powf(1.5))
    }

    #[test]
    fn zero_epsilon_is_identity() {
        let s = SampleSet::uniform(64, g1).unwrap();
        let n = add_noise(&s, NoiseSpec::new(0.0, 7)).unwrap();
        assert_eq!(n, s);
        assert_eq!(snr_db(&s, &n).unwrap(), f64::INFINITY);
    }

    #[test]
    fn noise_is_deterministic_and_seed_dependent() {
        let s = SampleSet::uniform(64, g1).unwrap();
        let a = add_noise(&s, NoiseSpec::new(0.1, 3)).unwrap();
        let b = add_noise(&s, NoiseSpec::new(0.1, 3)).unwrap();
        let c = add_noise(&s, NoiseSpec::new(0.1, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(add_noise(&s, NoiseSpec::new(-1.0, 0)).is_err());
    }

    #[test]
    fn noise_statistics() {
        let v = gaussian_vector(100_000, 11);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64;
        assert!(mean.abs() < 0.02);
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn snr_examples() {
        let s = SampleSet::uniform(8, |_| 1.0).unwrap();
        let n = s.with_values(vec![1.1; 8]).unwrap();
        assert!((snr_db(&s, &n).unwrap() - 20.0).abs() < 1e-9);
        let doubled = s.with_values(vec![2.0; 8]).unwrap();
        assert!(snr_db(&s, &doubled).unwrap().abs() < 1e-12);
        let other = SampleSet::uniform(16, |_| 1.0).unwrap();
        assert!(snr_db(&s, &other).is_err());
    }

    #[test]
    fn l2mu_examples() {
        let pi = std::f64::consts::PI;
        assert!((l2mu_norm(|_| 1.0, 64) - pi.sqrt()).abs() < 1e-12);
        // ∫ x² dμ = 3π/8
        assert!((l2mu_norm(|x| x, 64) - (3.0 * pi / 8.0).sqrt()).abs() < 1e-12);
        assert_eq!(l2mu_norm(|_| 0.0, 64), 0.0);
        // g1² = 256/9 (x⁵ − 2x⁴ + x³) and ∫ x^k dμ = π C(2k,k) / 4^k, so ‖g1‖_μ² = π/3
        assert!((l2mu_norm(g1, 64) - (pi / 3.0).sqrt()).abs() < 1e-12);
        assert!((sample_l2mu_norm(&[1.0; 64]) - pi.sqrt()).abs() < 1e-13);
        let d = normalize_direction(&[2.0; 10]).unwrap();
        assert!((d[0] - 1.0 / pi.sqrt()).abs() < 1e-15);
        assert!(normalize_direction(&[0.0; 4]).is_err());
    }

    #[test]
    fn l2_error_examples() {
        let f = |x: f64| 5.0 * x * x - 4.0 * x;
        let exact = LegendreExpansion::new(vec![-1.0 / 3.0, 3f64.sqrt() / 6.0, 5f64.sqrt() / 6.0]);
        assert!(l2_error(f, &exact, 8).unwrap() < 1e-14);
        // ‖f‖² = 25/5 − 40/4 + 16/3 = 1/3
        let e = l2_error(f, &LegendreExpansion::zero(), 8).unwrap();
        assert!((e - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        // a unit jump at 0.3 against zero: error 0.7^{1/2}
        let step = |x: f64| if x < 0.3 { 0.0 } else { 1.0 };
        let e = l2_error_piecewise(step, &LegendreExpansion::zero(), 5, &[0.3]).unwrap();
        assert!((e - 0.7f64.sqrt()).abs() < 1e-14);
        assert!(l2_error(f, &exact, 0).is_err());
    }

    #[test]
    fn pointwise_curve() {
        let c = pointwise_error_curve(|_| 1.0, &LegendreExpansion::new(vec![0.5]), &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(c, vec![(0.0, 0.5), (0.5, 0.5), (1.0, 0.5)]);
        assert!(pointwise_error_curve(|_| 1.0, &LegendreExpansion::zero(), &[1.5]).is_err());
    }

    #[test]
    fn bound_examples() {
        let c = LegendreExpansion::new(vec![1.0, 2.0, 3.0]);
        let r = check_noise_propagation(&c, &c, 0.0, 2).unwrap();
        assert!(r.holds && r.lhs == 0.0);
        assert!(check_noise_propagation(&c, &c, 0.1, 3).is_err());

        // constant perturbation of unit μ-norm only moves c_0
        let n_s = 64;
        let s = SampleSet::uniform(n_s, g1).unwrap();
        let nu = normalize_direction(&vec![1.0; n_s]).unwrap();
        let eps = 1e-2;
        let noisy = s
            .with_values(s.g_values().iter().zip(&nu).map(|(g, v)| g + eps * v).collect())
            .unwrap();
        let (a, _) = legendre_coeffs(&s, 31).unwrap();
        let (b, _) = legendre_coeffs(&noisy, 31).unwrap();
        let r = check_noise_propagation(&a, &b, eps, 31).unwrap();
        assert!(r.holds, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn bound_holds_for_random_unit_directions(seed in any::<u64>(), n in 0usize..32) {
            let n_s = 64;
            let s = SampleSet::uniform(n_s, g1).unwrap();
            let nu = normalize_direction(&gaussian_vector(n_s, seed)).unwrap();
            let eps = 1e-2;
            let noisy = s
                .with_values(s.g_values().iter().zip(&nu).map(|(g, v)| g + eps * v).collect())
                .unwrap();
            let (a, _) = legendre_coeffs(&s, 31).unwrap();
            let (b, _) = legendre_coeffs(&noisy, 31).unwrap();
            let r = check_noise_propagation(&a, &b, eps, n).unwrap();
            prop_assert!(r.holds, "{:?}", r);
        }

        #[test]
        fn snr_scales_twenty_db_per_decade(seed in any::<u64>(), e in 1e-4f64..1e-1) {
            let s = SampleSet::uniform(64, g1).unwrap();
            let a = snr_db(&s, &add_noise(&s, NoiseSpec::new(e, seed)).unwrap()).unwrap();
            let b = snr_db(&s, &add_noise(&s, NoiseSpec::new(e / 10.0, seed)).unwrap()).unwrap();
            prop_assert!((b - a - 20.0).abs() < 1e-9);
        }
    }
}
