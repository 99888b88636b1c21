//! Result rows and CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{HarnessError, Result};

pub const CSV_HEADER: [&str; 6] = ["sweep_value", "metric", "empirical", "theoretical", "trials", "stderr"];

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub metric: String,
    pub empirical: f64,
    pub theoretical: Option<f64>,
    pub trials: usize,
    pub stderr: f64,
}

impl ResultRow {
    /// Sample mean of `samples` with its standard error (zero for fewer than
    /// two samples).
    pub fn mean(sweep_value: f64, metric: impl Into<String>, samples: &[f64], theoretical: Option<f64>) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n as f64 - 1.0) / n as f64).sqrt()
        };
        Self { sweep_value, metric: metric.into(), empirical: mean, theoretical, trials: n, stderr }
    }

    /// Empirical rate `hits/trials` with its binomial standard error.
    pub fn proportion(sweep_value: f64, metric: impl Into<String>, hits: usize, trials: usize, theoretical: Option<f64>) -> Self {
        let p = hits as f64 / trials as f64;
        let stderr = (p * (1.0 - p) / trials as f64).sqrt();
        Self { sweep_value, metric: metric.into(), empirical: p, theoretical, trials, stderr }
    }

    /// A closed-form value with no simulation behind it.
    pub fn theory(sweep_value: f64, metric: impl Into<String>, value: f64) -> Self {
        Self { sweep_value, metric: metric.into(), empirical: value, theoretical: Some(value), trials: 0, stderr: 0.0 }
    }
}

/// `%.9g`-style rendering: 9 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-5, 1e9)`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the header and `rows` as CSV with LF line endings.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format_float(r.sweep_value),
            r.metric.clone(),
            format_float(r.empirical),
            r.theoretical.map(format_float).unwrap_or_default(),
            r.trials.to_string(),
            format_float(r.stderr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn write_csv_file(rows: &[ResultRow], path: &Path) -> Result<()> {
    let io_err = |source| HarnessError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_csv(rows, BufWriter::new(file)).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(source),
        other => io_err(std::io::Error::other(format!("{other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(3.99700299700), "3.997003");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(100000.0), "100000");
        assert_eq!(format_float(123456789.0), "123456789");
        assert_eq!(format_float(1234567890.0), "1.23456789e+09");
        assert_eq!(format_float(1e-4), "0.0001");
        assert_eq!(format_float(1.5e-7), "1.5e-07");
        assert_eq!(format_float(0.999999999999), "1");
    }

    #[test]
    fn mean_row() {
        let r = ResultRow::mean(1.0, "x", &[1.0, 2.0, 3.0, 4.0], None);
        assert_eq!(r.empirical, 2.5);
        assert!((r.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(ResultRow::mean(1.0, "x", &[7.0], None).stderr, 0.0);
    }

    #[test]
    fn proportion_row() {
        let r = ResultRow::proportion(0.0, "p", 25, 100, Some(0.2));
        assert_eq!(r.empirical, 0.25);
        assert!((r.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert_eq!(ResultRow::proportion(0.0, "p", 1, 1, None).stderr, 0.0);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            ResultRow::proportion(64.0, "pd@0.001", 999, 1000, Some(0.9991)),
            ResultRow::mean(64.0, "rs_mrt", &[1.0], None),
        ];
        let text = to_csv_string(&rows);
        assert_eq!(
            text,
            "sweep_value,metric,empirical,theoretical,trials,stderr\n\
             64,pd@0.001,0.999,0.9991,1000,0.000999499875\n\
             64,rs_mrt,1,,1,0\n"
        );
        assert!(!text.contains('\r'));
    }
}
