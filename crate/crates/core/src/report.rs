//! CSV serialization of per-trial records and aggregates.
//!
//! Floats are written with 17 significant digits so they round-trip
//! exactly; undefined rates are written as `NaN`.

use std::io::{Read, Write};

use crate::diagnostic::{RateRecord, RateStats, Trial, TrialAggregate};
use crate::error::{Error, Result};

pub const TRIALS_HEADER: [&str; 7] = ["seed", "k", "n_k", "samp", "r_msd", "r_grad", "valid_count"];

pub const AGGREGATE_HEADER: [&str; 14] = [
    "k",
    "n_k",
    "samp",
    "mean_msd",
    "q25_msd",
    "q75_msd",
    "d10_msd",
    "d90_msd",
    "mean_grad",
    "q25_grad",
    "q75_grad",
    "d10_grad",
    "d90_grad",
    "defined_count",
];

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn format_rate(x: Option<f64>) -> String {
    x.map_or_else(|| "NaN".to_string(), format_float)
}

fn stats_fields(s: &Option<RateStats>) -> [String; 5] {
    match s {
        Some(s) => [s.mean, s.q25, s.q75, s.d10, s.d90].map(format_float),
        None => std::array::from_fn(|_| "NaN".to_string()),
    }
}

pub fn write_trials_csv<W: Write>(w: W, trials: &[Trial]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRIALS_HEADER)?;
    for t in trials {
        for r in &t.records {
            out.write_record([
                t.seed.to_string(),
                r.k.to_string(),
                r.n_k.to_string(),
                format_float(r.samp),
                format_rate(r.r_msd),
                format_rate(r.r_grad),
                r.valid_count.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `defined_count` is the number of trials with a defined `r_msd`.
pub fn write_aggregate_csv<W: Write>(w: W, agg: &TrialAggregate) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(AGGREGATE_HEADER)?;
    for row in &agg.rows {
        let mut rec = vec![
            row.k.to_string(),
            row.n_k.to_string(),
            format_float(row.samp),
        ];
        rec.extend(stats_fields(&row.msd));
        rec.extend(stats_fields(&row.grad));
        rec.push(row.msd_count().to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, row: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).ok_or_else(|| Error::Parse {
        row,
        message: format!("missing column {i}"),
    })?;
    raw.trim().parse().map_err(|e: T::Err| Error::Parse {
        row,
        message: format!("column `{}`: {e}", TRIALS_HEADER[i]),
    })
}

fn rate_field(rec: &csv::StringRecord, i: usize, row: usize) -> Result<Option<f64>> {
    let v: f64 = field(rec, i, row)?;
    Ok(if v.is_nan() { None } else { Some(v) })
}

/// Reads a trials CSV, grouping rows into trials by seed in order of first
/// appearance. Reported rows are 1-based file lines.
pub fn read_trials_csv<R: Read>(r: R) -> Result<Vec<Trial>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(TRIALS_HEADER) {
        return Err(Error::Parse {
            row: 1,
            message: format!("expected header `{}`", TRIALS_HEADER.join(",")),
        });
    }
    let mut trials: Vec<Trial> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let seed: u64 = field(&rec, 0, row)?;
        let record = RateRecord {
            k: field(&rec, 1, row)?,
            n_k: field(&rec, 2, row)?,
            samp: field(&rec, 3, row)?,
            r_msd: rate_field(&rec, 4, row)?,
            r_grad: rate_field(&rec, 5, row)?,
            valid_count: field(&rec, 6, row)?,
        };
        match trials.iter_mut().find(|t| t.seed == seed) {
            Some(t) => t.records.push(record),
            None => trials.push(Trial {
                seed,
                records: vec![record],
            }),
        }
    }
    Ok(trials)
}
