//! Flag values and CSV input files.

use std::path::Path;

use crate::CliError;

/// Parses a decimal number, refusing percent notation. Used directly as a
/// clap value parser, which names the flag in its own message.
pub fn flag_decimal(raw: &str) -> Result<f64, String> {
    let raw = raw.trim();
    if raw.contains('%') {
        return Err("percent signs are not accepted, write rates as decimals (3% is 0.03)".into());
    }
    let v: f64 = raw.parse().map_err(|_| format!("'{raw}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("'{raw}' is not finite"));
    }
    Ok(v)
}

/// [`flag_decimal`] with the field name prefixed to any error.
pub fn decimal(field: &str, raw: &str) -> Result<f64, String> {
    flag_decimal(raw).map_err(|e| format!("{field}: {e}"))
}

/// Comma-separated decimals.
pub fn decimal_list(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',').map(|s| decimal("list entry", s)).collect()
}

/// Either `a..b` (whole years, inclusive) or a comma-separated list.
pub fn maturity_list(raw: &str) -> Result<Vec<f64>, String> {
    if let Some((a, b)) = raw.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| format!("maturities: bad range start '{a}'"))?;
        let b: u32 = b.trim().parse().map_err(|_| format!("maturities: bad range end '{b}'"))?;
        if a == 0 || b < a {
            return Err(format!("maturities: range {a}..{b} must be ascending and start at 1 or later"));
        }
        return Ok((a..=b).map(f64::from).collect());
    }
    decimal_list(raw)
}

/// Reads the named columns of a headed CSV file, in the order given.
fn read_table(path: &Path, what: &str, columns: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = |msg: String| CliError::Validation(format!("{what} file {}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let index: Vec<usize> = columns
        .iter()
        .map(|c| headers.iter().position(|h| h == *c).ok_or_else(|| bad(format!("missing column '{c}'"))))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row = index
            .iter()
            .zip(columns)
            .map(|(&i, c)| decimal(c, record.get(i).unwrap_or("")).map_err(|e| bad(format!("line {}: {e}", line + 2))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no rows".into()));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy)]
pub struct QuoteRow {
    pub maturity_years: f64,
    pub coupon_rate: f64,
    pub clean_price: f64,
}

pub fn quotes(path: &Path) -> Result<Vec<QuoteRow>, CliError> {
    Ok(read_table(path, "quotes", &["maturity_years", "coupon_rate", "clean_price"])?
        .into_iter()
        .map(|r| QuoteRow { maturity_years: r[0], coupon_rate: r[1], clean_price: r[2] })
        .collect())
}

/// `(maturity_years, zero_rate)` pairs.
pub fn zero_curve(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    Ok(read_table(path, "zero curve", &["maturity_years", "zero_rate"])?.into_iter().map(|r| (r[0], r[1])).collect())
}

/// `(period_or_time, lambda)` pairs.
pub fn hazard(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    Ok(read_table(path, "hazard", &["period_or_time", "lambda"])?.into_iter().map(|r| (r[0], r[1])).collect())
}
