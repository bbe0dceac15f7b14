use std::io::{BufRead, Write};

use super::{McResult, McRow, SlopeFit};
use crate::error::{invalid, Result};

pub const CSV_HEADER: &str = "estimator,process,n,d,epsilon,gap,reps,mse,bias2,variance,se_mse,seed";
pub const PLOT_HEADER: &str = "log_n,log_mse,fit_line";

fn io_err(e: std::io::Error) -> crate::Error {
    invalid(format!("i/o error: {e}"))
}

/// Writes the header followed by every row of every result.
pub fn write_csv<W: Write>(results: &[McResult], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}").map_err(io_err)?;
    for res in results {
        for r in &res.rows {
            let gap = r.gap.map_or_else(|| "na".to_string(), |g| g.to_string());
            writeln!(
                out,
                "{},{},{},{},{:e},{},{},{:e},{:e},{:e},{:e},{}",
                res.estimator, res.process, r.n, res.d, r.epsilon, gap, r.reps, r.mse, r.bias2, r.variance,
                r.se_mse, r.seed
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Reads a file written by [`write_csv`], grouping rows by estimator and
/// process in order of first appearance.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<McResult>> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == CSV_HEADER => {}
        Some((_, Ok(h))) => return Err(invalid(format!("line 1: unexpected header '{h}'"))),
        Some((_, Err(e))) => return Err(io_err(e)),
        None => return Err(invalid("empty results file")),
    }
    let mut out: Vec<McResult> = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let bad = |what: &str| invalid(format!("line {lineno}: {what}"));
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 12 {
            return Err(bad(&format!("expected 12 fields, found {}", f.len())));
        }
        let int = |s: &str, name: &str| s.parse::<usize>().map_err(|_| bad(&format!("bad {name} '{s}'")));
        let real = |s: &str, name: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad {name} '{s}'")));
        let row = McRow {
            n: int(f[2], "n")?,
            epsilon: real(f[4], "epsilon")?,
            gap: if f[5] == "na" { None } else { Some(int(f[5], "gap")?) },
            reps: int(f[6], "reps")?,
            mse: real(f[7], "mse")?,
            bias2: real(f[8], "bias2")?,
            variance: real(f[9], "variance")?,
            se_mse: real(f[10], "se_mse")?,
            seed: f[11].parse().map_err(|_| bad(&format!("bad seed '{}'", f[11])))?,
        };
        let d = int(f[3], "d")?;
        match out.iter_mut().find(|r| r.estimator == f[0] && r.process == f[1]) {
            Some(res) => res.rows.push(row),
            None => out.push(McResult {
                estimator: f[0].to_string(),
                process: f[1].to_string(),
                d,
                schedule: None,
                truth: None,
                rows: vec![row],
            }),
        }
    }
    Ok(out)
}

/// Plot-ready points and the fitted line, one line per grid point.
pub fn write_plot_data<W: Write>(result: &McResult, fit: &SlopeFit, mut out: W) -> Result<()> {
    writeln!(out, "{PLOT_HEADER}").map_err(io_err)?;
    for r in &result.rows {
        let x = (r.n as f64).ln();
        writeln!(out, "{:e},{:e},{:e}", x, r.mse.ln(), fit.intercept + fit.slope * x).map_err(io_err)?;
    }
    Ok(())
}
