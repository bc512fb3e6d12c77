//! Named invariant checks. Each measures one quantity and compares it with a
//! tolerance; `--tol-scale` multiplies every tolerance.

use abelinv::abel::{AbelOperator, AbelPair, PairId};
use abelinv::legendre::{shifted_legendre_all, GaussLegendre, LegendreExpansion};
use abelinv::noise::{
    add_noise, check_noise_propagation, gaussian_vector, l2_error, normalize_direction, snr_db, NoiseSpec,
};
use abelinv::regularize::{truncate, Discrepancy};
use abelinv::spectral::{eta_from_samples, fourier_coeffs, fourier_coeffs_nonuniform, legendre_coeffs, SampleSet};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};

pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    measure: fn() -> f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Ledger {
    pub passed: bool,
    pub checks: Vec<Outcome>,
}

fn g1(x: f64) -> f64 {
    16.0 / 3.0 * (x.powf(2.5) - x.powf(1.5))
}

fn f1(x: f64) -> f64 {
    5.0 * x * x - 4.0 * x
}

fn poly_samples(n_s: usize) -> SampleSet {
    SampleSet::uniform(n_s, g1).unwrap()
}

fn orthonormality() -> f64 {
    let n = 33;
    let rule = GaussLegendre::new(64);
    let mut gram = vec![0.0; n * n];
    let mut p = vec![0.0; n];
    for (x, w) in rule.mapped(0.0, 1.0) {
        shifted_legendre_all(x, &mut p);
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] += w * p[i] * p[j];
            }
        }
    }
    (0..n * n)
        .map(|k| (gram[k] - if k / n == k % n { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

fn forward_poly() -> f64 {
    let op = AbelOperator::new(64);
    (0..33)
        .map(|i| {
            let x = i as f64 / 32.0;
            (op.apply(f1, x).unwrap() - g1(x)).abs()
        })
        .fold(0.0, f64::max)
}

fn forward_constant() -> f64 {
    let op = AbelOperator::new(64);
    (0..33)
        .map(|i| {
            let x = i as f64 / 32.0;
            (op.apply(|_| 1.0, x).unwrap() - 2.0 * x.sqrt()).abs()
        })
        .fold(0.0, f64::max)
}

fn catalog_consistency() -> f64 {
    let op = AbelOperator::new(64);
    PairId::ALL
        .iter()
        .flat_map(|&id| {
            let pair = AbelPair::get(id);
            let op = &op;
            (0..=20).map(move |i| {
                let x = i as f64 / 20.0;
                (pair.forward(op, x).unwrap() - pair.transform(x)).abs()
            })
        })
        .fold(0.0, f64::max)
}

fn coefficient_identity() -> f64 {
    let (exp, _) = legendre_coeffs(&poly_samples(64), 31).unwrap();
    let mut exact = vec![-1.0 / 3.0, 3f64.sqrt() / 6.0, 5f64.sqrt() / 6.0];
    exact.resize(32, 0.0);
    exp.coeffs.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn spectrum_symmetry() -> f64 {
    PairId::ALL
        .iter()
        .map(|&id| {
            let pair = AbelPair::get(id);
            let s = SampleSet::uniform(256, |x| pair.transform(x)).unwrap();
            legendre_coeffs(&s, 128).unwrap().1.symmetry_residual()
        })
        .fold(0.0, f64::max)
}

fn nonuniform_matches_fft() -> f64 {
    let eta = eta_from_samples(&poly_samples(128));
    let a = fourier_coeffs(&eta, 20).unwrap();
    let b = fourier_coeffs_nonuniform(&eta, 20).unwrap();
    (-21..=20)
        .map(|n| (a.get(n).unwrap() - b.get(n).unwrap()).norm())
        .fold(0.0, f64::max)
}

fn exact_reconstruction() -> f64 {
    let (family, _) = legendre_coeffs(&poly_samples(64), 31).unwrap();
    l2_error(f1, &truncate(&family, 13).unwrap(), 32).unwrap()
}

fn incremental_discrepancy() -> f64 {
    let pair = AbelPair::get(PairId::Spline);
    let s = SampleSet::uniform(64, |x| pair.transform(x)).unwrap();
    let noisy = add_noise(&s, NoiseSpec::new(1e-2, 5)).unwrap();
    let (family, _) = legendre_coeffs(&noisy, 31).unwrap();
    let disc = Discrepancy::new(&noisy, 64);
    let curve = disc.curve(&family, 31).unwrap();
    curve
        .iter()
        .map(|&(n, d)| (d - disc.eval(&truncate(&family, n).unwrap()).unwrap()).abs())
        .fold(0.0, f64::max)
}

/// Largest `lhs / rhs` over 100 unit-norm perturbations; at most `1 + 1e-6`.
fn noise_bound_ratio() -> f64 {
    let n_s = 64;
    let s = poly_samples(n_s);
    let (clean, _) = legendre_coeffs(&s, 31).unwrap();
    (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let nu = normalize_direction(&gaussian_vector(n_s, seed)).unwrap();
            let g = s.g_values().iter().zip(&nu).map(|(g, v)| g + 1e-2 * v).collect();
            let (noisy, _) = legendre_coeffs(&s.with_values(g).unwrap(), 31).unwrap();
            let r = check_noise_propagation(&clean, &noisy, 1e-2, 10).unwrap();
            r.lhs / r.rhs
        })
        .reduce(|| 0.0, f64::max)
}

fn snr_consistency() -> f64 {
    let n_s = 256;
    let s = poly_samples(n_s);
    let p: f64 = s.g_values().iter().map(|g| g * g).sum();
    [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&eps| {
            let noisy = add_noise(&s, NoiseSpec::new(eps, 1)).unwrap();
            let expected = 10.0 * (p / (n_s as f64 * eps * eps)).log10();
            (snr_db(&s, &noisy).unwrap() - expected).abs()
        })
        .fold(0.0, f64::max)
}

fn clenshaw_vs_direct() -> f64 {
    let coeffs: Vec<f64> = (0..=512).map(|k| 1.0 / (1.0 + k as f64)).collect();
    let exp = LegendreExpansion::new(coeffs.clone());
    let mut p = vec![0.0; coeffs.len()];
    (0..=20)
        .map(|i| {
            let x = i as f64 / 20.0;
            shifted_legendre_all(x, &mut p);
            let direct: f64 = coeffs.iter().zip(&p).map(|(c, v)| c * v).sum();
            (exp.eval(x).unwrap() - direct).abs()
        })
        .fold(0.0, f64::max)
}

pub const CHECKS: &[Check] = &[
    Check { name: "legendre-orthonormality", tolerance: 1e-10, measure: orthonormality },
    Check { name: "clenshaw-vs-direct", tolerance: 1e-10, measure: clenshaw_vs_direct },
    Check { name: "forward-poly", tolerance: 1e-10, measure: forward_poly },
    Check { name: "forward-constant", tolerance: 1e-12, measure: forward_constant },
    Check { name: "catalog-consistency", tolerance: 1e-8, measure: catalog_consistency },
    Check { name: "coefficient-identity", tolerance: 1e-9, measure: coefficient_identity },
    Check { name: "spectrum-symmetry", tolerance: 1e-12, measure: spectrum_symmetry },
    Check { name: "nonuniform-vs-fft", tolerance: 1e-9, measure: nonuniform_matches_fft },
    Check { name: "exact-reconstruction", tolerance: 1e-8, measure: exact_reconstruction },
    Check { name: "incremental-discrepancy", tolerance: 1e-10, measure: incremental_discrepancy },
    Check { name: "noise-bound", tolerance: 1.0 + 1e-6, measure: noise_bound_ratio },
    Check { name: "snr-consistency", tolerance: 2.0, measure: snr_consistency },
];

pub fn names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs the named checks (all when `only` is empty).
pub fn run(only: &[String], tol_scale: f64) -> Result<Ledger> {
    if !(tol_scale >= 0.0 && tol_scale.is_finite()) {
        return Err(CliError::Usage(format!("--tol-scale must be finite and >= 0, got {tol_scale}")));
    }
    let selected: Vec<&Check> = if only.is_empty() {
        CHECKS.iter().collect()
    } else {
        only.iter()
            .map(|name| {
                CHECKS.iter().find(|c| c.name == name).ok_or_else(|| {
                    CliError::Usage(format!("unknown check `{name}`; known: {}", names().join(", ")))
                })
            })
            .collect::<Result<_>>()?
    };
    let checks: Vec<Outcome> = selected
        .par_iter()
        .map(|c| {
            let value = (c.measure)();
            let tolerance = c.tolerance * tol_scale;
            Outcome {
                name: c.name,
                value,
                tolerance,
                passed: value <= tolerance,
            }
        })
        .collect();
    Ok(Ledger {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
