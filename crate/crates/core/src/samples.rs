//! CSV form of embedding samples.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::cox_hobson::{ChainSamples, EmbeddingSample};
use crate::error::{Error, Result};

pub const HEADER: &str = "sample_id,t,tprime,stopped_value,steps,running_max";

/// One row per path and chain point, floats as `{:.16e}`.
pub fn to_csv_string(samples: &ChainSamples) -> String {
    let mut out = String::with_capacity(64 * samples.samples.len() * samples.chain.len() + 64);
    out.push_str(HEADER);
    out.push('\n');
    for s in samples.flat() {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            s.sample_id, s.t, s.tprime, s.stopped_value, s.steps, s.running_max
        );
    }
    out
}

pub fn write_csv<W: Write>(samples: &ChainSamples, mut w: W) -> Result<()> {
    w.write_all(to_csv_string(samples).as_bytes())
        .map_err(|e| Error::InvalidArgument(format!("writing samples: {e}")))
}

fn field<T: std::str::FromStr>(s: Option<&str>, line: usize, name: &str) -> Result<T> {
    s.and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("line {line}: bad or missing {name}")))
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<EmbeddingSample>> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::InvalidArgument(format!("reading samples: {e}")))?;
        if i == 0 {
            if line.trim() != HEADER {
                return Err(Error::InvalidArgument(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let n = i + 1;
        let row = EmbeddingSample {
            sample_id: field(it.next(), n, "sample_id")?,
            t: field(it.next(), n, "t")?,
            tprime: field(it.next(), n, "tprime")?,
            stopped_value: field(it.next(), n, "stopped_value")?,
            steps: field(it.next(), n, "steps")?,
            running_max: field(it.next(), n, "running_max")?,
        };
        if it.next().is_some() {
            return Err(Error::InvalidArgument(format!("line {n}: too many fields")));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Regroups rows by sample id; every sample must cover the same chain.
pub fn group(rows: Vec<EmbeddingSample>) -> Result<ChainSamples> {
    let mut chain: Vec<(f64, f64)> = Vec::new();
    for r in &rows {
        if r.sample_id != rows[0].sample_id {
            break;
        }
        chain.push((r.t, r.tprime));
    }
    if chain.is_empty() {
        return Err(Error::Shape("no samples".into()));
    }
    if !rows.len().is_multiple_of(chain.len()) {
        return Err(Error::Shape(format!(
            "{} rows do not split into paths of {} chain points",
            rows.len(),
            chain.len()
        )));
    }
    let samples: Vec<Vec<EmbeddingSample>> = rows.chunks(chain.len()).map(<[_]>::to_vec).collect();
    for row in &samples {
        let id = row[0].sample_id;
        if row.iter().zip(&chain).any(|(r, c)| r.sample_id != id || (r.t, r.tprime) != *c) {
            return Err(Error::Shape(format!("sample {id} does not follow the chain")));
        }
    }
    Ok(ChainSamples {
        chain,
        samples,
        exhausted: 0,
    })
}
