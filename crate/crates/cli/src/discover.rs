//! Finding repository files under the paths given on the command line.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use w6h_core::format::{Diagnostic, SourceDocument};

const SUFFIXES: [&str; 2] = [".ea.yaml", ".ea.json"];

fn is_repository_file(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| SUFFIXES.iter().any(|s| n.ends_with(s)))
}

/// Files named directly are taken as they are; directories are searched
/// recursively for `*.ea.yaml` and `*.ea.json`, skipping hidden entries.
pub fn repository_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for path in paths {
        let meta = fs::metadata(path).with_context(|| format!("cannot read `{}`", path.display()))?;
        if meta.is_dir() {
            walk(path, &mut found)?;
        } else {
            found.push(path.clone());
        }
    }
    found.sort();
    found.dedup();
    if found.is_empty() {
        bail!("no *.ea.yaml or *.ea.json files found");
    }
    Ok(found)
}

fn walk(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("cannot list `{}`", dir.display()))?
        .collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.path());
    for entry in entries {
        let path = entry.path();
        if entry.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        if entry.file_type()?.is_dir() {
            walk(&path, found)?;
        } else if is_repository_file(&path) {
            found.push(path);
        }
    }
    Ok(())
}

/// Reads each file as UTF-8. Undecodable files become diagnostics.
pub fn load(files: &[PathBuf]) -> Result<(Vec<SourceDocument>, Vec<Diagnostic>)> {
    let mut docs = Vec::new();
    let mut diags = Vec::new();
    for file in files {
        let bytes = fs::read(file).with_context(|| format!("cannot read `{}`", file.display()))?;
        match SourceDocument::from_bytes(file.display().to_string(), bytes) {
            Ok(doc) => docs.push(doc),
            Err(d) => diags.push(d),
        }
    }
    Ok((docs, diags))
}
