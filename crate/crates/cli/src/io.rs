//! Input loading with content hashes, and deterministic output writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use radar_core::detect::InputFile;
use radar_core::ingest::{ingest, load_company_catalog, CompanyCatalog, Dataset, IngestOptions};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct Loaded {
    pub bytes: Vec<u8>,
    pub input: InputFile,
}

pub fn check_input(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "input file not found: {}",
            path.display()
        )))
    }
}

pub fn check_output(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::Input(format!(
            "output directory does not exist: {}",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

pub fn read(path: &Path, role: &str) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    Ok(Loaded {
        bytes,
        input: InputFile {
            role: role.to_string(),
            path: path.display().to_string(),
            sha256,
        },
    })
}

pub fn read_text(path: &Path, role: &str) -> Result<(String, InputFile), CliError> {
    let loaded = read(path, role)?;
    let text = String::from_utf8(loaded.bytes)
        .map_err(|_| CliError::Input(format!("{} is not valid UTF-8", path.display())))?;
    Ok((text, loaded.input))
}

/// Catalog and dataset plus the provenance of both files.
pub struct Inputs {
    pub catalog: CompanyCatalog,
    pub dataset: Dataset,
    pub files: Vec<InputFile>,
}

pub fn load(tweets: &Path, companies: &Path, keep_unknown: bool) -> Result<Inputs, CliError> {
    check_input(tweets)?;
    check_input(companies)?;
    let c = read(companies, "companies")?;
    let catalog =
        load_company_catalog(c.bytes.as_slice()).map_err(|e| CliError::Input(e.to_string()))?;
    let t = read(tweets, "tweets")?;
    let dataset = ingest(t.bytes.as_slice(), &catalog, IngestOptions { keep_unknown })
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Inputs {
        catalog,
        dataset,
        files: vec![t.input, c.input],
    })
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn to_stdout<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    print_text(&format!("{text}\n"))
}

/// Writes to stdout; a closed pipe (`radar ... | head`) is not an error.
pub fn print_text(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Input(e.to_string())),
        _ => Ok(()),
    }
}

/// `graph.csv` -> `graph.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn csv_err(e: csv::Error) -> CliError {
    CliError::Input(e.to_string())
}
