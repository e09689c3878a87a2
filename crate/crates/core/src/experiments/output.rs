//! CSV output. Numbers carry 12 significant digits; rows are written in the
//! order given, which callers keep sorted.

use std::path::Path;

use super::runs::{BoundValidation, PerturbationRecord, TemperatureSweep};
use crate::error::{Error, Result};
use crate::io::write_text;

pub const RECORD_HEADER: [&str; 8] = [
    "noise",
    "seed",
    "eps_bc_exact",
    "eps_bc_mc",
    "br_dist_p1",
    "br_dist_p2",
    "nash_gap",
    "bound_value",
];
pub const CURVE_HEADER: [&str; 3] = ["tau", "eps_grid", "delta_value"];
pub const ENVELOPE_HEADER: [&str; 3] = ["eps_bc_exact", "cummax_nash_gap", "delta_hat"];

/// Shortest `%.12g`-style rendering.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp).max(0) as usize, x))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp)
    }
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Csv {
        path: "<memory>".into(),
        source: e,
    };
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

fn record_row(r: &PerturbationRecord) -> Vec<String> {
    let d = |i: usize| r.br_dist.get(i).copied().unwrap_or(f64::NAN);
    vec![
        fmt_num(r.noise),
        r.seed.to_string(),
        fmt_num(r.eps_bc_exact),
        fmt_num(r.eps_bc_mc),
        fmt_num(d(0)),
        fmt_num(d(1)),
        fmt_num(r.nash_gap),
        fmt_num(r.bound_value),
    ]
}

pub fn records_csv(records: &[PerturbationRecord]) -> Result<String> {
    to_csv(&RECORD_HEADER, records.iter().map(record_row))
}

pub fn write_records(records: &[PerturbationRecord], path: &Path) -> Result<()> {
    write_text(path, &records_csv(records)?)
}

/// `(tau, eps, delta)` rows.
pub fn curves_csv(rows: &[(f64, f64, f64)]) -> Result<String> {
    to_csv(
        &CURVE_HEADER,
        rows.iter().map(|(t, e, d)| vec![fmt_num(*t), fmt_num(*e), fmt_num(*d)]),
    )
}

pub fn sweep_rows(sweep: &TemperatureSweep) -> Vec<(f64, f64, f64)> {
    sweep
        .curves
        .iter()
        .filter(|c| c.run.is_some())
        .flat_map(|c| sweep.grid.iter().zip(&c.values).map(move |(e, d)| (c.tau, *e, *d)))
        .collect()
}

/// Breakpoints of a single run's curve, labelled with `tau` (NaN if none).
pub fn curve_rows(run: &BoundValidation, tau: Option<f64>) -> Vec<(f64, f64, f64)> {
    let t = tau.unwrap_or(f64::NAN);
    run.curve.breakpoints().iter().map(|(e, d)| (t, *e, *d)).collect()
}

/// Cumulative-max Nash gap and tight delta against BC error, in BC-error order.
pub fn envelope_csv(run: &BoundValidation) -> Result<String> {
    let mut done: Vec<_> = run.completed().collect();
    done.sort_by(|a, b| a.eps_bc_exact.total_cmp(&b.eps_bc_exact).then(a.noise.total_cmp(&b.noise)).then(a.seed.cmp(&b.seed)));
    to_csv(
        &ENVELOPE_HEADER,
        done.into_iter().map(|r| {
            vec![
                fmt_num(r.eps_bc_exact),
                fmt_num(r.cummax_gap),
                fmt_num(run.curve.eval(r.eps_bc_exact)),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(50.0 / 3.0), "16.6666666667");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn empty_records_give_header_only() {
        assert_eq!(records_csv(&[]).unwrap(), format!("{}\n", RECORD_HEADER.join(",")));
    }
}
