//! Counts CSV: one row per series, first column `series_id`, remaining
//! columns headed by ISO week-start dates (`YYYY-MM-DD`). Each week's month
//! is the calendar month of its first day.
//!
//! Exposure CSV: columns `series_id,exposure`, one row per panel series.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use dpoinar_core::math::civil_from_days;
use dpoinar_core::{CountPanel, SeasonMap};

use crate::error::{Error, Result};

pub const SERIES_ID: &str = "series_id";

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

/// Season map from week-start dates: weekly-dated (so months extend past the
/// window) when the dates are consecutive weeks, otherwise just the months.
fn season_from_dates(dates: &[NaiveDate]) -> Result<SeasonMap> {
    let weekly = dates.windows(2).all(|w| (w[1] - w[0]).num_days() == 7);
    if weekly && !dates.is_empty() {
        let d = dates[0];
        return Ok(SeasonMap::weekly(d.year() as i64, d.month(), d.day(), dates.len()));
    }
    let months: Vec<u8> = dates.iter().map(|d| d.month() as u8).collect();
    Ok(SeasonMap::from_months(&months)?)
}

/// Parses a counts CSV; `path` only labels errors.
pub fn read_counts<R: Read>(reader: R, path: &Path) -> Result<CountPanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.get(0).map(str::trim) != Some(SERIES_ID) {
        return Err(Error::parse(path, format!("first column must be `{SERIES_ID}`")));
    }
    let mut dates = Vec::with_capacity(header.len() - 1);
    for (c, h) in header.iter().enumerate().skip(1) {
        let d = NaiveDate::parse_from_str(h.trim(), "%Y-%m-%d").map_err(|_| {
            Error::parse(path, format!("column {}: `{h}` is not a YYYY-MM-DD date", c + 1))
        })?;
        dates.push(d);
    }
    if dates.is_empty() {
        return Err(Error::parse(path, "no date columns"));
    }
    let season = season_from_dates(&dates)?;

    let mut ids = Vec::new();
    let mut counts = Vec::new();
    let mut seen = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != header.len() {
            return Err(Error::parse(
                path,
                format!("row {row}: {} fields, header has {}", rec.len(), header.len()),
            ));
        }
        let id = rec[0].trim().to_string();
        if let Some(first) = seen.insert(id.clone(), row) {
            return Err(Error::parse(
                path,
                format!("row {row}: series `{id}` already defined on row {first}"),
            ));
        }
        let series = rec
            .iter()
            .enumerate()
            .skip(1)
            .map(|(c, cell)| {
                cell.trim().parse::<u64>().map_err(|_| {
                    Error::parse(
                        path,
                        format!(
                            "row {row}, column {} ({}): `{cell}` is not a non-negative integer",
                            c + 1,
                            &header[c]
                        ),
                    )
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        ids.push(id);
        counts.push(series);
    }
    if counts.is_empty() {
        return Err(Error::parse(path, "no series rows"));
    }
    Ok(CountPanel::new(counts, season, None, ids)?)
}

/// Loads a counts CSV and, when given, joins an exposure CSV onto it.
pub fn load_counts(path: &Path, exposure: Option<&Path>) -> Result<CountPanel> {
    let panel = read_counts(open(path)?, path)?;
    match exposure {
        Some(x) => attach_exposure(panel, &load_exposure(x)?, x),
        None => Ok(panel),
    }
}

fn week_dates(season: &SeasonMap) -> Option<Vec<String>> {
    let start = season.weekly_start()?;
    Some(
        (0..season.len())
            .map(|t| {
                let (y, m, d) = civil_from_days(start + 7 * t as i64);
                format!("{y:04}-{m:02}-{d:02}")
            })
            .collect(),
    )
}

/// Writes a panel in the counts format. The panel must be weekly-dated.
pub fn write_counts<W: Write>(panel: &CountPanel, writer: W) -> Result<()> {
    let dates = week_dates(panel.season())
        .ok_or_else(|| Error::Config("only weekly-dated panels can be written as CSV".into()))?;
    let mut w = csv::Writer::from_writer(writer);
    let to_err = |e: csv::Error| Error::parse("<output>", e.to_string());
    w.write_record(std::iter::once(SERIES_ID.to_string()).chain(dates))
        .map_err(to_err)?;
    for (id, series) in panel.series_ids().iter().zip(panel.counts()) {
        w.write_record(std::iter::once(id.clone()).chain(series.iter().map(u64::to_string)))
            .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn save_counts(panel: &CountPanel, path: &Path) -> Result<()> {
    write_counts(panel, create(path)?).map_err(|e| relabel(e, path))
}

fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Parse { message, .. } => Error::parse(path, message),
        other => other,
    }
}

/// Reads `series_id,exposure` rows.
pub fn load_exposure(path: &Path) -> Result<Vec<(String, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(open(path)?);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() != 2 || header[0].trim() != SERIES_ID || header[1].trim() != "exposure" {
        return Err(Error::parse(path, "header must be `series_id,exposure`"));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let x: f64 = rec[1].trim().parse().map_err(|_| {
            Error::parse(path, format!("row {}: `{}` is not a number", i + 2, &rec[1]))
        })?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::parse(path, format!("row {}: exposure must be positive", i + 2)));
        }
        out.push((rec[0].trim().to_string(), x));
    }
    Ok(out)
}

/// Joins exposures by series id; every panel series needs exactly one entry
/// and no entry may name an unknown series.
pub fn attach_exposure(panel: CountPanel, entries: &[(String, f64)], path: &Path) -> Result<CountPanel> {
    let mut by_id: HashMap<&str, f64> = HashMap::new();
    for (id, x) in entries {
        if by_id.insert(id.as_str(), *x).is_some() {
            return Err(Error::parse(path, format!("series `{id}` listed twice")));
        }
    }
    let exposure = panel
        .series_ids()
        .iter()
        .map(|id| {
            by_id
                .remove(id.as_str())
                .ok_or_else(|| Error::parse(path, format!("no exposure for series `{id}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if let Some(extra) = by_id.keys().next() {
        return Err(Error::parse(path, format!("exposure for unknown series `{extra}`")));
    }
    Ok(panel.with_exposure(exposure)?)
}

pub fn save_exposure(panel: &CountPanel, path: &Path) -> Result<()> {
    let x = panel
        .exposure()
        .ok_or_else(|| Error::Config("panel has no exposure".into()))?;
    let mut w = csv::Writer::from_writer(create(path)?);
    let to_err = |e: csv::Error| Error::parse(path, e.to_string());
    w.write_record([SERIES_ID, "exposure"]).map_err(to_err)?;
    for (id, v) in panel.series_ids().iter().zip(x) {
        w.write_record([id.clone(), format!("{v:?}")]).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
