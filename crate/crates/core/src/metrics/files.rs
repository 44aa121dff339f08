//! Readers for the evaluation input files: prediction/reference records
//! (`{id, text}`) and token log-probability records (`{id, logprobs}`).

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct TextRecord {
    id: String,
    text: String,
}

#[derive(Debug, Deserialize)]
struct LogprobRecord {
    id: String,
    logprobs: Vec<f64>,
}

fn read_records<R: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, R)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: R = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push((idx + 1, record));
    }
    Ok(records)
}

fn reject_duplicates<'a>(
    path: &Path,
    ids: impl Iterator<Item = (usize, &'a str)>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for (line, id) in ids {
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line,
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

/// Read an `{id, text}` JSONL file, rejecting duplicate ids.
pub fn read_text_records(path: &Path) -> Result<Vec<(String, String)>> {
    let records: Vec<(usize, TextRecord)> = read_records(path)?;
    reject_duplicates(path, records.iter().map(|(l, r)| (*l, r.id.as_str())))?;
    Ok(records
        .into_iter()
        .map(|(_, r)| (r.id, r.text))
        .collect())
}

/// Read an `{id, logprobs}` JSONL file, rejecting duplicate ids.
pub fn read_logprob_records(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let records: Vec<(usize, LogprobRecord)> = read_records(path)?;
    reject_duplicates(path, records.iter().map(|(l, r)| (*l, r.id.as_str())))?;
    Ok(records
        .into_iter()
        .map(|(_, r)| (r.id, r.logprobs))
        .collect())
}
