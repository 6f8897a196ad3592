//! File handling: atomic writes (temp file + rename, so failed runs leave no
//! partial outputs) and the two-column scan CSV format.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// CSV header shared by scan and pattern files.
pub const SCAN_HEADER: &str = "alpha_deg,intensity";

/// Resolves an output path: relative paths are placed under the directory
/// named by VALTOMO_OUT_DIR when that variable is set.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os("VALTOMO_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes content to the path atomically: the bytes land in a temporary file
/// in the destination directory, then rename into place.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&parent)
        .with_context(|| format!("creating a temporary file in {}", parent.display()))?;
    tmp.write_all(content.as_bytes())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.flush()
        .with_context(|| format!("flushing {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("moving output into place at {}", path.display()))?;
    Ok(())
}

/// Renders a two-column CSV from parallel angle (degrees) and value columns.
pub fn render_scan_csv(alpha_deg: &[f64], values: &[f64]) -> String {
    let mut out = String::with_capacity(16 * alpha_deg.len() + SCAN_HEADER.len() + 1);
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for (a, v) in alpha_deg.iter().zip(values) {
        out.push_str(&format!("{a},{v}\n"));
    }
    out
}

/// Parses a two-column scan CSV; errors name the offending 1-based line.
/// Returns (angles in degrees, intensities).
pub fn parse_scan_csv(content: &str, origin: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == SCAN_HEADER => {}
        Some((_, header)) => bail!(
            "{}: line 1: expected header '{SCAN_HEADER}', found '{header}'",
            origin.display()
        ),
        None => bail!("{}: file is empty", origin.display()),
    }
    let mut alpha_deg = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let (a, v) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(v), None) => (a.trim(), v.trim()),
            _ => bail!(
                "{}: line {line_no}: expected two comma-separated values, found '{trimmed}'",
                origin.display()
            ),
        };
        let a: f64 = a.parse().with_context(|| {
            format!(
                "{}: line {line_no}: '{a}' is not a number",
                origin.display()
            )
        })?;
        let v: f64 = v.parse().with_context(|| {
            format!(
                "{}: line {line_no}: '{v}' is not a number",
                origin.display()
            )
        })?;
        alpha_deg.push(a);
        values.push(v);
    }
    Ok((alpha_deg, values))
}

/// Reads a file to a string with path context on failure.
pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Path of the JSON sidecar carrying a scan's session metadata.
pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Path of the JSON sidecar carrying a dynamics summary.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary.json")
}
