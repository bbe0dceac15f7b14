use std::path::Path;

use qfest::Sample;

use crate::error::CliError;

/// Reads one observation per line, coordinates separated by commas. Blank
/// lines are skipped.
pub fn read_sample(path: &Path) -> Result<Sample, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_sample(&text).map_err(|msg| CliError::Input(format!("{}: {msg}", path.display())))
}

pub fn parse_sample(text: &str) -> Result<Sample, String> {
    let mut dim = None;
    let mut data = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("line {}: {e}", i + 1))?;
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(format!("line {}: non-finite value {v}", i + 1));
        }
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(format!("line {}: expected {d} coordinates, found {}", i + 1, row.len()))
            }
            _ => {}
        }
        data.extend(row);
    }
    let dim = dim.ok_or_else(|| "no observations".to_string())?;
    Sample::from_flat(dim, data).map_err(|e| e.to_string())
}
