//! Text formats: one-sample-per-line signals, `j,k,re,im` coefficient files
//! and `key=value` configuration files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::transform::CoeffTree;
use crate::{Error, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

/// Parses a single-column signal. Blank lines are skipped and a non-numeric
/// first line is taken as a header.
pub fn parse_signal(text: &str, origin: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut seen_line = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let first = !seen_line;
        seen_line = true;
        if line.contains(',') {
            return Err(Error::InvalidParameter(format!(
                "{origin}:{}: expected a single column, got '{line}'",
                i + 1
            )));
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(v) => {
                return Err(Error::InvalidParameter(format!(
                    "{origin}:{}: non-finite value {v}",
                    i + 1
                )));
            }
            Err(_) if first => continue,
            Err(_) => {
                return Err(Error::InvalidParameter(format!(
                    "{origin}:{}: not a number: '{line}'",
                    i + 1
                )));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(format!("{origin}: no samples")));
    }
    Ok(out)
}

pub fn read_signal(path: &Path) -> Result<Vec<f64>> {
    parse_signal(&read_text(path)?, &path.display().to_string())
}

pub fn write_signal<W: Write>(signal: &[f64], mut out: W) -> std::io::Result<()> {
    for v in signal {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Extends `x` to the next power of two by mirroring its tail
/// (`…, x[n-2], x[n-1] | x[n-1], x[n-2], …`). Returns the padded signal and
/// the original length.
pub fn pad_symmetric(x: &[f64]) -> (Vec<f64>, usize) {
    let n = x.len();
    let m = n.next_power_of_two().max(8);
    let mut out = x.to_vec();
    let mut i = 0;
    while out.len() < m {
        // reflect back and forth when the pad is longer than the signal
        let period = 2 * n;
        let p = i % period;
        let idx = if p < n { n - 1 - p } else { p - n };
        out.push(x[idx]);
        i += 1;
    }
    (out, n)
}

pub const COEFF_HEADER: &str = "j,k,re,im";

/// Writes a tree as `j,k,re,im` rows. Approximation coefficients use
/// `j = -1`; their count `2^j0` fixes the coarsest level.
pub fn write_coefficients<W: Write>(tree: &CoeffTree, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{COEFF_HEADER}")?;
    for (k, c) in tree.approx.iter().enumerate() {
        writeln!(out, "-1,{k},{},{}", c.re, c.im)?;
    }
    for (i, level) in tree.details.iter().enumerate() {
        for (k, c) in level.iter().enumerate() {
            writeln!(out, "{},{k},{},{}", tree.j0 + i, c.re, c.im)?;
        }
    }
    Ok(())
}

pub fn parse_coefficients(text: &str, origin: &str) -> Result<CoeffTree> {
    let bad = |line: usize, what: String| Error::MalformedTree(format!("{origin}:{line}: {what}"));
    let mut groups: BTreeMap<i64, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case(COEFF_HEADER)) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(i + 1, format!("expected 4 fields, got {}", fields.len())));
        }
        let j: i64 = fields[0]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad level '{}'", fields[0])))?;
        let k: usize = fields[1]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad index '{}'", fields[1])))?;
        let re: f64 = fields[2]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad value '{}'", fields[2])))?;
        let im: f64 = fields[3]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad value '{}'", fields[3])))?;
        if j < -1 {
            return Err(bad(i + 1, format!("level {j} is negative")));
        }
        groups.entry(j).or_default().push((k, Complex64::new(re, im)));
    }

    let take = |rows: Vec<(usize, Complex64)>, label: String| -> Result<Vec<Complex64>> {
        let mut values = vec![None; rows.len()];
        for (k, c) in rows {
            match values.get_mut(k) {
                Some(slot @ None) => *slot = Some(c),
                Some(Some(_)) => return Err(Error::MalformedTree(format!("{label}: duplicate index {k}"))),
                None => return Err(Error::MalformedTree(format!("{label}: index {k} out of range"))),
            }
        }
        Ok(values.into_iter().map(|v| v.expect("every slot filled")).collect())
    };

    let approx = take(
        groups
            .remove(&-1)
            .ok_or_else(|| Error::MalformedTree(format!("{origin}: no approximation rows (j = -1)")))?,
        "approximation".into(),
    )?;
    if !approx.len().is_power_of_two() {
        return Err(Error::MalformedTree(format!(
            "{origin}: {} approximation coefficients is not a power of two",
            approx.len()
        )));
    }
    let j0 = approx.len().trailing_zeros() as usize;
    let mut details = Vec::new();
    for (expected, (j, rows)) in (j0..).zip(groups) {
        if j as usize != expected {
            return Err(Error::MalformedTree(format!(
                "{origin}: expected level {expected}, found {j}"
            )));
        }
        if rows.len() != 1 << expected {
            return Err(Error::MalformedTree(format!(
                "{origin}: level {j} has {} coefficients, expected {}",
                rows.len(),
                1usize << expected
            )));
        }
        details.push(take(rows, format!("level {j}"))?);
    }
    if details.is_empty() {
        return Err(Error::MalformedTree(format!("{origin}: no detail levels")));
    }
    let n = 1usize << (j0 + details.len());
    let tree = CoeffTree { n, j0, approx, details };
    tree.validate()?;
    Ok(tree)
}

pub fn read_coefficients(path: &Path) -> Result<CoeffTree> {
    parse_coefficients(&read_text(path)?, &path.display().to_string())
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("{origin}:{}: expected key=value", i + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_config(&read_text(path)?, &path.display().to_string())
}
