//! Posterior draws as JSON lines.
//!
//! The first line is a [`DrawsHeader`]; every further line is one draw with
//! fields `chain`, `iteration`, `alpha`, `z`, `phi_star`, `theta`, `tau` and,
//! when stored, `innovations`. Reals are written in shortest round-trip form
//! and parsed back bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use dpoinar_core::model::RateMode;
use dpoinar_core::sampler::Draw;
use dpoinar_core::{ModelState, PosteriorDraws};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DRAWS_FORMAT: &str = "dpoinar-draws";
pub const DRAWS_VERSION: u32 = 1;

/// First line of a draws file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawsHeader {
    pub format: String,
    pub version: u32,
    pub n_draws: usize,
    /// Chain indices in order of appearance.
    pub chains: Vec<usize>,
    pub mode: RateMode,
    /// Series ids of the fitted panel, in model order.
    pub series_ids: Vec<String>,
    pub innovations: bool,
}

impl DrawsHeader {
    pub fn new(draws: &PosteriorDraws, mode: RateMode, series_ids: &[String]) -> Self {
        Self {
            format: DRAWS_FORMAT.into(),
            version: DRAWS_VERSION,
            n_draws: draws.len(),
            chains: draws.chain_ids(),
            mode,
            series_ids: series_ids.to_vec(),
            innovations: draws.iter().any(|d| !d.state.innovations.is_empty()),
        }
    }
}

#[derive(Serialize)]
struct RecordRef<'a> {
    chain: usize,
    iteration: usize,
    #[serde(flatten)]
    state: &'a ModelState,
}

#[derive(Deserialize)]
struct Record {
    chain: usize,
    iteration: usize,
    #[serde(flatten)]
    state: ModelState,
}

pub fn write_draws<W: Write>(header: &DrawsHeader, draws: &PosteriorDraws, writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for d in draws.iter() {
        let rec = RecordRef {
            chain: d.chain,
            iteration: d.iteration,
            state: &d.state,
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn save_draws(path: &Path, header: &DrawsHeader, draws: &PosteriorDraws) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_draws(header, draws, file).map_err(|e| Error::io(path, e))
}

/// Parses a draws file, checking its version and that the records match the
/// header (count, chains, series count).
pub fn read_draws<R: Read>(reader: R, path: &Path) -> Result<(DrawsHeader, PosteriorDraws)> {
    let integrity = |message: String| Error::Integrity {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = BufReader::new(reader).lines();
    let first = lines
        .next()
        .ok_or_else(|| integrity("empty file".into()))?
        .map_err(|e| Error::io(path, e))?;
    let probe: serde_json::Value =
        serde_json::from_str(&first).map_err(|e| integrity(format!("unreadable header: {e}")))?;
    if probe.get("format").and_then(|f| f.as_str()) != Some(DRAWS_FORMAT) {
        return Err(integrity("not a draws file".into()));
    }
    let version = probe.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != DRAWS_VERSION {
        return Err(Error::Version {
            path: path.to_path_buf(),
            found: version,
            expected: DRAWS_VERSION,
        });
    }
    let header: DrawsHeader =
        serde_json::from_value(probe).map_err(|e| integrity(format!("bad header: {e}")))?;

    let mut draws = Vec::with_capacity(header.n_draws);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line)
            .map_err(|e| integrity(format!("line {}: {e}", i + 2)))?;
        if rec.state.n_series() != header.series_ids.len() {
            return Err(integrity(format!(
                "line {}: draw covers {} series, header lists {}",
                i + 2,
                rec.state.n_series(),
                header.series_ids.len()
            )));
        }
        draws.push(Draw {
            chain: rec.chain,
            iteration: rec.iteration,
            state: rec.state,
        });
    }
    let draws = PosteriorDraws { draws };
    if draws.len() != header.n_draws {
        return Err(integrity(format!(
            "header announces {} draws, found {}",
            header.n_draws,
            draws.len()
        )));
    }
    if draws.chain_ids() != header.chains {
        return Err(integrity("chain indices differ from the header".into()));
    }
    Ok((header, draws))
}

pub fn load_draws(path: &Path) -> Result<(DrawsHeader, PosteriorDraws)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_draws(file, path)
}
