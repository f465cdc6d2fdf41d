use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};

use anyhow::{bail, Context, Result};

/// Writes `header` followed by `rows`, one line each.
pub fn write_csv(path: &str, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {path}"))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush().with_context(|| format!("cannot write {path}"))?;
    Ok(())
}

/// Empty string for a missing value.
pub fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// Reads the `sigma` column of a `j,sigma` file.
pub fn read_sv_csv(path: &str) -> Result<Vec<f64>> {
    let file = File::open(path).with_context(|| format!("cannot open {path}"))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != "j,sigma" {
        bail!("{path}: expected header `j,sigma`");
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (_, sigma) = line
            .split_once(',')
            .with_context(|| format!("{path}:{}: expected `j,sigma`", i + 2))?;
        out.push(
            sigma
                .trim()
                .parse()
                .with_context(|| format!("{path}:{}: bad sigma `{sigma}`", i + 2))?,
        );
    }
    Ok(out)
}
