//! File formats.
//!
//! Sample files are CSV with `# key=value` metadata lines, a `t,x,g` header
//! and one row per node. Floats are written with 17 significant digits so a
//! write-then-read reproduces every value bitwise.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use abelinv::spectral::{x_of_t, GridKind, SampleSet};
use abelinv::LegendreExpansion;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Allowed gap between a stored `x` and `sin²(t/2)` recomputed from `t`.
const X_CONSISTENCY: f64 = 1e-12;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("not a number: `{s}`")))
}

#[derive(Debug, Clone)]
pub struct SampleFile {
    pub samples: SampleSet,
    pub meta: BTreeMap<String, String>,
}

impl SampleFile {
    pub fn meta_f64(&self, key: &str) -> Result<Option<f64>> {
        self.meta.get(key).map(|v| parse_f64(v)).transpose()
    }
}

pub fn write_samples<W: Write>(out: W, s: &SampleSet, meta: &[(&str, String)]) -> Result<()> {
    let mut out = out;
    let mut head = format!("# grid_kind={}\n", s.grid_kind().name());
    for (k, v) in meta {
        head.push_str(&format!("# {k}={v}\n"));
    }
    out.write_all(head.as_bytes()).map_err(|e| CliError::io("<output>", e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "g"])?;
    for (&t, &g) in s.t_nodes().iter().zip(s.g_values()) {
        w.write_record([fmt_f64(t), fmt_f64(x_of_t(t)), fmt_f64(g)])?;
    }
    w.flush().map_err(|e| CliError::io("<output>", e))?;
    Ok(())
}

pub fn read_samples(text: &str) -> Result<SampleFile> {
    let mut meta = BTreeMap::new();
    for line in text.lines() {
        if let Some(rest) = line.trim_start().strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
    }
    if text.lines().all(|l| l.trim().is_empty() || l.trim_start().starts_with('#')) {
        return Err(CliError::Parse("sample file is empty".into()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Parse(format!("sample file has no `{name}` column")))
    };
    let (it, ix, ig) = (col("t")?, col("x")?, col("g")?);
    let mut t = Vec::new();
    let mut g = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| parse_f64(rec.get(i).unwrap_or(""));
        let (tv, xv, gv) = (field(it)?, field(ix)?, field(ig)?);
        if (xv - x_of_t(tv)).abs() > X_CONSISTENCY {
            return Err(CliError::Parse(format!("row t={tv}: x={xv} is not sin^2(t/2)")));
        }
        t.push(tv);
        g.push(gv);
    }
    if t.is_empty() {
        return Err(CliError::Parse("sample file has no rows".into()));
    }
    let samples = match meta.get("grid_kind").map(String::as_str) {
        Some("uniform") => SampleSet::new(t, g, GridKind::Uniform)?,
        Some("arbitrary") => SampleSet::new(t, g, GridKind::Arbitrary)?,
        Some(other) => return Err(CliError::Parse(format!("unknown grid_kind `{other}`"))),
        None => SampleSet::new(t.clone(), g.clone(), GridKind::Uniform)
            .or_else(|_| SampleSet::new(t, g, GridKind::Arbitrary))?,
    };
    Ok(SampleFile { samples, meta })
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// A file at `path`, or standard output.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut out = sink(path)?;
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}").map_err(|e| CliError::io(path.unwrap_or(Path::new("<stdout>")), e))?;
    out.flush().map_err(|e| CliError::io(path.unwrap_or(Path::new("<stdout>")), e))
}

pub fn read_expansion(path: &Path) -> Result<LegendreExpansion> {
    Ok(serde_json::from_str(&read_to_string(path)?)?)
}

/// Writes a two-column CSV.
pub fn write_columns<W: Write>(out: W, header: [&str; 2], rows: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for &(a, b) in rows {
        w.write_record([fmt_f64(a), fmt_f64(b)])?;
    }
    w.flush().map_err(|e| CliError::io("<output>", e))?;
    Ok(())
}

/// `stem.suffix`, keeping any directories in `stem`.
pub fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
