//! Artifact management: tracked output files, CSV I/O, SVG plots, and the
//! hash manifest.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

/// Collects every file a command writes so failures can clean up partial
/// output and success can emit a complete hash manifest.
pub struct ArtifactSet {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactSet {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// Write `manifest.json`: every artifact of this run with its SHA-256.
    pub fn finish(mut self) -> Result<(), CliError> {
        self.written.sort();
        let mut entries = Vec::new();
        for p in &self.written {
            let bytes = fs::read(p)
                .map_err(|e| CliError::Io(format!("cannot hash {}: {e}", p.display())))?;
            let hash = Sha256::digest(&bytes);
            let name = p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            entries.push(serde_json::json!({
                "file": name,
                "sha256": format!("{hash:x}"),
            }));
        }
        let manifest = serde_json::to_string_pretty(&serde_json::Value::Array(entries))
            .map_err(|e| CliError::Io(format!("cannot serialize manifest: {e}")))?;
        let path = self.path("manifest.json");
        fs::write(&path, manifest)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }

    /// Remove everything written so far (failure path).
    pub fn discard(self) {
        for p in self.written {
            let _ = fs::remove_file(p);
        }
    }
}

/// Render rows as CSV with a header line. Values use full float precision so
/// downstream commands reading the file lose nothing.
pub fn csv_table(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{v:.17e}"));
        }
        out.push('\n');
    }
    out
}

/// Parse a CSV written by `csv_table`: header plus uniform numeric rows.
pub fn parse_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Io(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| {
            CliError::Io(format!("{} line {}: {e}", path.display(), i + 2))
        })?;
        if row.len() != header.len() {
            return Err(CliError::Io(format!(
                "{} line {}: {} fields, expected {}",
                path.display(),
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Minimal line plot. `log_log` plots log10 of both axes.
pub fn svg_line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    log_log: bool,
) -> String {
    const W: f64 = 800.0;
    const H: f64 = 480.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;

    let tx = |v: f64| if log_log { v.abs().max(1e-300).log10() } else { v };
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (tx(x), tx(y)))
        .collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let sx = |x: f64| ML + (x - x0) / (x1 - x0).max(1e-300) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0).max(1e-300) * (H - MT - MB);

    let mut path = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        path.push_str(&format!("{cmd}{:.2} {:.2} ", sx(*x), sy(*y)));
    }
    let axis_note = if log_log { " (log10)" } else { "" };
    format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{tx_mid}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>
<line x1="{ML}" y1="{yb}" x2="{xr}" y2="{yb}" stroke="black"/>
<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{yb}" stroke="black"/>
<text x="{tx_mid}" y="{tl}" text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}{axis_note} [{x0:.4e}, {x1:.4e}]</text>
<text x="16" y="{ty_mid}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {ty_mid})">{y_label}{axis_note} [{y0:.4e}, {y1:.4e}]</text>
<path d="{path}" fill="none" stroke="#1f6fb2" stroke-width="1"/>
</svg>
"##,
        tx_mid = (ML + W - MR) / 2.0,
        ty_mid = (MT + H - MB) / 2.0,
        yb = H - MB,
        xr = W - MR,
        tl = H - 14.0,
    )
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
