//! File formats for sample sets and reports, written atomically.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{RatioSampleSet, SimConfig};

/// Writes through a temporary file in the target directory, then renames it
/// into place, so readers never see a partial file.
pub fn atomic_write<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    atomic_write(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Parse {
            what: "JSON output".into(),
            detail: e.to_string(),
        })?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Metadata stored next to a sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSidecar {
    pub config: SimConfig,
    pub n: u64,
    pub seed_used: u64,
    pub reps: usize,
    pub ties: u64,
}

pub fn sample_csv_name(n: u64) -> String {
    format!("samples_n{n}.csv")
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `rep,r_value` rows and the JSON sidecar; returns the CSV path.
pub fn write_samples(dir: &Path, config: &SimConfig, set: &RatioSampleSet) -> Result<PathBuf> {
    let csv_path = dir.join(sample_csv_name(set.n));
    atomic_write(&csv_path, |w| {
        let mut c = csv::Writer::from_writer(w);
        let wrap = |e: csv::Error| Error::Parse {
            what: "sample CSV".into(),
            detail: e.to_string(),
        };
        c.write_record(["rep", "r_value"]).map_err(wrap)?;
        for (i, r) in set.r_values.iter().enumerate() {
            c.write_record([i.to_string(), r.to_string()]).map_err(wrap)?;
        }
        c.flush().map_err(|e| Error::io(&csv_path, e))
    })?;
    let sidecar = SampleSidecar {
        config: config.clone(),
        n: set.n,
        seed_used: set.seed_used,
        reps: set.reps(),
        ties: set.ties,
    };
    write_json(&sidecar_path(&csv_path), &sidecar)?;
    Ok(csv_path)
}

/// Reads a sample CSV and its sidecar. `Z` is rebuilt as `r - 1`, which
/// loses the digits of very small `Z` that the in-memory set keeps.
pub fn read_samples(csv_path: &Path) -> Result<(RatioSampleSet, SampleSidecar)> {
    let sidecar: SampleSidecar = read_json(&sidecar_path(csv_path))?;
    let f = File::open(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let mut r = csv::Reader::from_reader(BufReader::new(f));
    let bad = |detail: String| Error::Parse {
        what: format!("sample CSV {}", csv_path.display()),
        detail,
    };
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["rep", "r_value"] {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut values = Vec::with_capacity(sidecar.reps);
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let rep: usize = rec[0].parse().map_err(|e| bad(format!("row {i}: {e}")))?;
        if rep != i {
            return Err(bad(format!("row {i} has rep {rep}")));
        }
        values.push(rec[1].parse::<f64>().map_err(|e| bad(format!("row {i}: {e}")))?);
    }
    if values.len() != sidecar.reps {
        return Err(bad(format!("{} rows, sidecar says {}", values.len(), sidecar.reps)));
    }
    let mut set = RatioSampleSet::from_r_values(sidecar.config.spec, sidecar.n, sidecar.seed_used, values)?;
    set.ties = sidecar.ties;
    Ok((set, sidecar))
}
