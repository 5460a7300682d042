//! Run artifacts: summary JSON and CSV tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! runs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::engine::RunOutput;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, monetized_utility, MetricStat, RunSummary, Status};

pub const CUSTOMER_COLUMNS: [&str; 15] = [
    "id",
    "spawn_time",
    "origin_x",
    "origin_y",
    "dest_x",
    "dest_y",
    "choice_set_size",
    "status",
    "lost_reason",
    "station_id",
    "wait_min",
    "total_min",
    "detour_mi",
    "payment_usd",
    "monetized_utility_usd",
];

pub const STATION_COLUMNS: [&str; 5] = [
    "station_id",
    "minute",
    "queue_len",
    "price_usd_per_hr",
    "cum_arrivals",
];

pub const ARRIVAL_COLUMNS: [&str; 3] = ["station_id", "bin_start", "arrivals"];

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_customers_csv(path: &Path, out: &RunOutput, config: &ScenarioConfig) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(CUSTOMER_COLUMNS)?;
    let rounded = config.metrics.round_lost_value;
    for o in &out.outcomes {
        let station = o
            .station
            .map(|i| config.stations[i].id.clone())
            .unwrap_or_default();
        let status = match o.status {
            Status::Served => "served",
            Status::Lost => "lost",
        };
        w.write_record([
            o.customer.to_string(),
            o.spawn_time.to_string(),
            o.origin.x.to_string(),
            o.origin.y.to_string(),
            o.dest.x.to_string(),
            o.dest.y.to_string(),
            o.choice_set_size.to_string(),
            status.to_string(),
            o.lost_reason.map(|r| r.name()).unwrap_or("").to_string(),
            station,
            o.wait.to_string(),
            o.total_time.to_string(),
            o.detour_total.to_string(),
            o.payment.to_string(),
            monetized_utility(o, &config.choice, rounded).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_station_series_csv(path: &Path, out: &RunOutput) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(STATION_COLUMNS)?;
    for s in &out.series {
        for k in 0..s.queue_len.len() {
            w.write_record([
                s.station.clone(),
                (s.start_minute + k as f64).to_string(),
                s.queue_len[k].to_string(),
                s.price[k].to_string(),
                s.cum_arrivals[k].to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_arrival_rates_csv(path: &Path, out: &RunOutput) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(ARRIVAL_COLUMNS)?;
    for s in &out.series {
        for (k, n) in s.arrival_counts.iter().enumerate() {
            w.write_record([
                s.station.clone(),
                (s.start_minute + k as f64 * s.bin_minutes).to_string(),
                n.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_replications_csv(path: &Path, runs: &[RunSummary]) -> Result<()> {
    let mut w = csv_writer(path)?;
    if let Some(first) = runs.first() {
        let mut header = vec!["seed".to_string()];
        header.extend(first.scalars().iter().map(|(n, _)| n.to_string()));
        w.write_record(&header)?;
    }
    for r in runs {
        let mut row = vec![r.seed.to_string()];
        row.extend(r.scalars().iter().map(|(_, v)| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Files written by [`write_run`].
pub const RUN_FILES: [&str; 4] = [
    "summary.json",
    "customers.csv",
    "stations.csv",
    "arrival_rates.csv",
];

/// Writes the artifacts of a `run`: detailed files for the first replication
/// and, with several replications, a per-replication table plus mean and
/// standard deviation of every metric.
pub fn write_run(
    dir: &Path,
    config: &ScenarioConfig,
    runs: &[RunOutput],
) -> Result<Option<Vec<MetricStat>>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let first = runs.first().expect("at least one replication");
    write_json(&dir.join("summary.json"), &first.summary)?;
    write_customers_csv(&dir.join("customers.csv"), first, config)?;
    write_station_series_csv(&dir.join("stations.csv"), first)?;
    write_arrival_rates_csv(&dir.join("arrival_rates.csv"), first)?;
    if runs.len() < 2 {
        return Ok(None);
    }
    let summaries: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    write_replications_csv(&dir.join("replications.csv"), &summaries)?;
    let agg = aggregate(&summaries);
    write_json(&dir.join("aggregate.json"), &agg)?;
    Ok(Some(agg))
}

/// Writes rows of any serializable record type as CSV with a header.
pub fn write_rows_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Renders rows as an aligned text table.
pub fn print_table(
    out: &mut impl Write,
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (k, cell) in r.iter().enumerate() {
            widths[k] = widths[k].max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for r in rows {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
