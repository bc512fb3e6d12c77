use std::io::Write;
use std::path::Path;

use abelinv::abel::{AbelOperator, AbelPair};
use abelinv::noise::{add_noise, l2_error_piecewise, snr_db, NoiseSpec};
use abelinv::regularize::{invert as run_inversion, InvertOptions};
use abelinv::spectral::SampleSet;
use abelinv::{forward_expansion, SelectionRule};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::io::{self, fmt_f64};
use crate::{ForwardArgs, InvertArgs, SelectArgs, SweepArgs, SynthArgs, VerifyArgs};

const L2_PANELS: usize = 64;

fn json_f64(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_f64(v))
    }
}

fn grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(CliError::Usage(format!("--grid needs at least 2 points, got {points}")));
    }
    Ok((0..points).map(|i| i as f64 / (points - 1) as f64).collect())
}

fn options(sel: &SelectArgs, epsilon: f64) -> Result<InvertOptions> {
    let selection = sel.select.unwrap_or(if epsilon > 0.0 {
        SelectionRule::Morozov
    } else {
        SelectionRule::MinDiscrepancy
    });
    let fixed_n = match selection {
        SelectionRule::Fixed => Some(
            sel.ncap
                .ok_or_else(|| CliError::Usage("--select fixed needs --ncap".into()))?,
        ),
        _ => None,
    };
    Ok(InvertOptions {
        selection,
        epsilon,
        tau: sel.tau,
        n_cap: sel.ncap,
        fixed_n,
        k: sel.k,
        c: sel.c,
        quad_order: sel.quad_order,
    })
}

fn pair_samples(pair: &AbelPair, n_s: usize) -> Result<SampleSet> {
    Ok(SampleSet::uniform(n_s, |x| pair.transform(x))?)
}

pub fn synth(a: &SynthArgs) -> Result<()> {
    let pair = AbelPair::get(a.pair);
    let clean = pair_samples(&pair, a.samples)?;
    let noisy = add_noise(&clean, NoiseSpec::new(a.epsilon, a.seed))?;
    let snr = snr_db(&clean, &noisy)?;
    let meta = [
        ("pair", a.pair.to_string()),
        ("epsilon", fmt_f64(a.epsilon)),
        ("seed", a.seed.to_string()),
        ("snr_db", fmt_f64(snr)),
    ];
    io::write_samples(io::sink(a.out.as_deref())?, &noisy, &meta)?;
    if let Some(path) = &a.out {
        let summary = json!({
            "out": path,
            "pair": a.pair,
            "samples": a.samples,
            "epsilon": a.epsilon,
            "seed": a.seed,
            "snr_db": json_f64(snr),
        });
        println!("{summary}");
    }
    Ok(())
}

pub fn invert(a: &InvertArgs) -> Result<()> {
    let file = io::read_samples(&io::read_to_string(&a.input)?)?;
    let epsilon = match a.epsilon {
        Some(e) => e,
        None => file.meta_f64("epsilon")?.unwrap_or(0.0),
    };
    let xs = grid(a.grid)?;
    let mut inv = run_inversion(&file.samples, &options(&a.select, epsilon)?)?;
    inv.report.snr_db = file.meta_f64("snr_db")?;

    let Some(stem) = &a.out else {
        return io::write_json(None, &inv.report);
    };
    io::write_json(Some(&io::with_suffix(stem, ".expansion.json")), &inv.solution)?;
    io::write_json(Some(&io::with_suffix(stem, ".report.json")), &inv.report)?;
    let rows = xs
        .iter()
        .map(|&x| Ok((x, inv.solution.eval(x)?)))
        .collect::<Result<Vec<_>>>()?;
    let recon = io::with_suffix(stem, ".recon.csv");
    io::write_columns(io::sink(Some(&recon))?, ["x", "f"], &rows)?;
    println!(
        "{}",
        json!({
            "chosen_n": inv.report.chosen_n,
            "selection_rule": inv.report.selection_rule,
            "expansion": io::with_suffix(stem, ".expansion.json"),
            "report": io::with_suffix(stem, ".report.json"),
            "reconstruction": recon,
        })
    );
    Ok(())
}

pub fn forward(a: &ForwardArgs) -> Result<()> {
    let xs = grid(a.grid)?;
    let rows: Vec<(f64, f64)> = match (&a.pair, &a.input) {
        (Some(id), _) => {
            let pair = AbelPair::get(*id);
            let op = AbelOperator::new(a.quad_order);
            xs.iter()
                .map(|&x| Ok((x, pair.forward(&op, x)?)))
                .collect::<Result<_>>()?
        }
        (None, Some(path)) => {
            let exp = io::read_expansion(path)?;
            xs.iter()
                .map(|&x| Ok((x, forward_expansion(&exp, x, a.quad_order)?)))
                .collect::<Result<_>>()?
        }
        (None, None) => return Err(CliError::Usage("forward needs --pair or --in".into())),
    };
    io::write_columns(io::sink(a.out.as_deref())?, ["x", "Af"], &rows)
}

struct Trial {
    snr: f64,
    chosen_n: usize,
    l2: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let pair = AbelPair::get(a.pair);
    let clean = pair_samples(&pair, a.samples)?;
    let mut rows = Vec::with_capacity(a.epsilon.len());
    for &eps in &a.epsilon {
        let opts = options(&a.select, eps)?;
        // noiseless data is the same for every seed
        let trials = if eps == 0.0 { 1 } else { a.trials };
        let runs = (0..trials)
            .into_par_iter()
            .map(|i| {
                let noisy = add_noise(&clean, NoiseSpec::new(eps, a.seed + i))?;
                let inv = run_inversion(&noisy, &opts)?;
                let l2 = l2_error_piecewise(|x| pair.solution(x), &inv.solution, L2_PANELS, pair.jump_locations)?;
                Ok(Trial {
                    snr: snr_db(&clean, &noisy)?,
                    chosen_n: inv.report.chosen_n,
                    l2,
                })
            })
            .collect::<Result<Vec<Trial>>>()?;
        let mut ns: Vec<usize> = runs.iter().map(|t| t.chosen_n).collect();
        ns.sort_unstable();
        rows.push((
            eps,
            median(runs.iter().map(|t| t.snr).collect()),
            ns[(ns.len() - 1) / 2],
            median(runs.iter().map(|t| t.l2).collect()),
        ));
    }
    let path = a.out.as_deref();
    let mut w = csv::Writer::from_writer(io::sink(path)?);
    w.write_record(["epsilon", "snr_db", "chosen_n", "l2_error"])?;
    for (eps, snr, n, l2) in rows {
        w.write_record([fmt_f64(eps), fmt_f64(snr), n.to_string(), fmt_f64(l2)])?;
    }
    w.flush().map_err(|e| CliError::io(path.unwrap_or(Path::new("<stdout>")), e))
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let ledger = crate::verify::run(&a.check, a.tol_scale)?;
    io::write_json(a.out.as_deref(), &ledger)?;
    if a.out.is_some() {
        let mut out = std::io::stdout().lock();
        let failed: Vec<&str> = ledger.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        writeln!(out, "{}", json!({ "passed": ledger.passed, "failed": failed }))
            .map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}
