//! CSV output for sweep results.
//!
//! Header `method,snr_db,mean_sum_rate,feasibility_prob,trials,seed`, one
//! row per (method, SNR) in ascending SNR order, numbers printed with 12
//! significant digits, every row newline-terminated. Feasibility families
//! use the same columns behind a leading `r_min` column.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use twocell_core::harness::FeasibilityCurve;
use twocell_core::{MethodId, SweepResult};

pub const HEADER: &str = "method,snr_db,mean_sum_rate,feasibility_prob,trials,seed";

/// Formats `x` with 12 significant digits, like C's `%.12g`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn push_rows(out: &mut String, prefix: &str, result: &SweepResult) {
    for p in &result.points {
        writeln!(
            out,
            "{prefix}{},{},{},{},{},{}",
            p.method,
            format_sig(p.snr_db),
            format_sig(p.mean_sum_rate),
            format_sig(p.feasibility_prob),
            p.trials,
            result.seed
        )
        .expect("writing to a String");
    }
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    push_rows(&mut out, "", result);
    out
}

pub fn feasibility_csv_string(curves: &[FeasibilityCurve]) -> String {
    let mut out = format!("r_min,{HEADER}\n");
    for curve in curves {
        push_rows(
            &mut out,
            &format!("{},", format_sig(curve.r_min)),
            &curve.result,
        );
    }
    out
}

fn write_to(destination: &Path, text: &str) -> io::Result<()> {
    let mut file = std::fs::File::create(destination)?;
    file.write_all(text.as_bytes())?;
    file.flush()
}

pub fn emit_csv(result: &SweepResult, destination: &Path) -> io::Result<()> {
    write_to(destination, &to_csv_string(result))
}

pub fn emit_feasibility_csv(curves: &[FeasibilityCurve], destination: &Path) -> io::Result<()> {
    write_to(destination, &feasibility_csv_string(curves))
}

/// One parsed row of a sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub method: MethodId,
    pub snr_db: f64,
    pub mean_sum_rate: f64,
    pub feasibility_prob: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Parses a file written by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            let err = |what: &str| format!("row {}: bad {what}", i + 1);
            if fields.len() != 6 {
                return Err(err("field count"));
            }
            Ok(CsvRow {
                method: fields[0].parse().map_err(|_| err("method"))?,
                snr_db: fields[1].parse().map_err(|_| err("snr_db"))?,
                mean_sum_rate: fields[2].parse().map_err(|_| err("mean_sum_rate"))?,
                feasibility_prob: fields[3].parse().map_err(|_| err("feasibility_prob"))?,
                trials: fields[4].parse().map_err(|_| err("trials"))?,
                seed: fields[5].parse().map_err(|_| err("seed"))?,
            })
        })
        .collect()
}
