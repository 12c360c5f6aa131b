//! Report envelopes and writers. Everything a command prints on stdout goes
//! through here; diagnostics go to stderr.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use manifest_core::VERSION;
use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Wall-clock start and elapsed time. The only report field that varies
/// between runs with identical inputs.
#[derive(Debug, Serialize)]
pub struct Timestamp {
    pub started_unix: f64,
    pub elapsed_seconds: f64,
}

pub struct Clock {
    started: SystemTime,
    instant: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Self {
            started: SystemTime::now(),
            instant: Instant::now(),
        }
    }

    pub fn stamp(&self) -> Timestamp {
        Timestamp {
            started_unix: self
                .started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            elapsed_seconds: self.instant.elapsed().as_secs_f64(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: u32,
    version: &'a str,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
    timestamp: Timestamp,
}

fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Pretty JSON with a trailing newline, to `path` or stdout.
pub fn write_json<T: Serialize>(command: &str, body: &T, clock: &Clock, path: Option<&Path>) -> Result<()> {
    let envelope = Envelope {
        schema: SCHEMA,
        version: VERSION,
        command,
        body,
        timestamp: clock.stamp(),
    };
    let mut sink = open_sink(path)?;
    serde_json::to_writer_pretty(&mut sink, &envelope).context("cannot serialize report")?;
    sink.write_all(b"\n")?;
    sink.flush().context("cannot write report")?;
    Ok(())
}

/// One row per feature in index order.
pub struct FeatureRow<'a> {
    pub name: &'a str,
    pub score: f64,
    /// 1-based position in the ranking.
    pub rank: usize,
    pub selected: bool,
}

/// `index,name,score,rank,selected`, scores in shortest round-trip form.
pub fn write_feature_csv(rows: &[FeatureRow<'_>], path: Option<&Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(open_sink(path)?);
    w.write_record(["index", "name", "score", "rank", "selected"])?;
    for (j, row) in rows.iter().enumerate() {
        w.write_record([
            j.to_string(),
            row.name.to_string(),
            row.score.to_string(),
            row.rank.to_string(),
            row.selected.to_string(),
        ])?;
    }
    w.flush().context("cannot write report")?;
    Ok(())
}

/// Columns as CSV with the given header; all columns must have equal length.
pub fn write_columns(path: &Path, header: &[String], columns: &[Vec<f64>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    let rows = columns.first().map_or(0, Vec::len);
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| c[i].to_string()))?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
