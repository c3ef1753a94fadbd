//! Atomic file writes and number formatting.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::CliError;

/// Full round-trip precision: 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Path of the whitespace-column sidecar next to `output`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("dat")
}

fn stage(path: &Path, contents: &[u8]) -> Result<NamedTempFile, CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Runtime(format!("writing {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    Ok(tmp)
}

/// Writes every file to a temporary sibling first and renames only once all
/// of them are complete.
pub fn write_all_atomic(files: &[(&Path, String)]) -> Result<(), CliError> {
    let staged = files
        .iter()
        .map(|(path, contents)| stage(path, contents.as_bytes()))
        .collect::<Result<Vec<_>, _>>()?;
    for (tmp, (path, _)) in staged.into_iter().zip(files) {
        tmp.persist(path)
            .map_err(|e| CliError::Runtime(format!("writing {}: {}", path.display(), e.error)))?;
    }
    Ok(())
}
