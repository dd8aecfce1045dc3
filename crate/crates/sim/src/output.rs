//! Result emission: CSV with a fixed header, or a JSON array of records.
//!
//! Floating-point fields use Rust's shortest round-trip `Display`
//! formatting ('.' radix, no locale), so `parse_csv(emit_csv(r)) == r`.

use std::io::Write;
use std::path::Path;

use crate::sweep::{OutputFormat, Record};
use crate::SimError;

pub const CSV_HEADER: &str = "scheme,N,N_Q,K,n_R,M,snr_db,metric,value,trials,errors,std_err,seed";

pub fn to_csv(records: &[Record]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scheme,
            r.n,
            r.n_q,
            r.k,
            r.n_r,
            r.m,
            r.snr_db,
            r.metric,
            r.value,
            r.trials,
            r.errors,
            r.std_err,
            r.seed
        ));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<Record>, SimError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(SimError::Runtime(format!("bad CSV header: {other:?}")));
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(SimError::Runtime(format!("line {}: expected 13 fields", i + 2)));
        }
        let parse_err =
            |field: &str| SimError::Runtime(format!("line {}: bad {field}", i + 2));
        records.push(Record {
            scheme: fields[0].to_owned(),
            n: fields[1].parse().map_err(|_| parse_err("N"))?,
            n_q: fields[2].parse().map_err(|_| parse_err("N_Q"))?,
            k: fields[3].parse().map_err(|_| parse_err("K"))?,
            n_r: fields[4].parse().map_err(|_| parse_err("n_R"))?,
            m: fields[5].parse().map_err(|_| parse_err("M"))?,
            snr_db: fields[6].parse().map_err(|_| parse_err("snr_db"))?,
            metric: fields[7].to_owned(),
            value: fields[8].parse().map_err(|_| parse_err("value"))?,
            trials: fields[9].parse().map_err(|_| parse_err("trials"))?,
            errors: fields[10].parse().map_err(|_| parse_err("errors"))?,
            std_err: fields[11].parse().map_err(|_| parse_err("std_err"))?,
            seed: fields[12].parse().map_err(|_| parse_err("seed"))?,
        });
    }
    Ok(records)
}

pub fn to_json(records: &[Record]) -> Result<String, SimError> {
    serde_json::to_string_pretty(records).map_err(|e| SimError::Runtime(e.to_string()))
}

pub fn render(records: &[Record], format: OutputFormat) -> Result<String, SimError> {
    match format {
        OutputFormat::Csv => Ok(to_csv(records)),
        OutputFormat::Json => to_json(records),
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(
    records: &[Record],
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<(), SimError> {
    let text = render(records, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
