//! CSV/JSON artifact writers and the run manifest.
//!
//! Every CSV starts with `#`-prefixed comment lines naming the units
//! (energies in J, lengths in a, times in 1/J), uses LF line endings, and
//! prints floats with 17 significant digits so reruns are byte-identical.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        // avoid the "-0" wobble
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}

/// Collects artifacts as they are written so a failed run can remove its
/// partial outputs and a finished run can hash everything.
pub struct ArtifactSet {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactSet {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header_comment: &str,
        columns: &[&str],
        rows: impl Iterator<Item = Vec<f64>>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let mut out = String::new();
        for line in header_comment.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&columns.join(","));
        out.push('\n');
        for row in rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                out.push_str(&fmt_float(v));
                first = false;
            }
            out.push('\n');
        }
        fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    /// Remove every artifact written so far (failed-run cleanup).
    pub fn remove_all(&mut self) {
        for path in self.written.drain(..) {
            let _ = fs::remove_file(path);
        }
    }

    /// Hash all artifacts and write the manifest; returns its path.
    pub fn finish(
        &mut self,
        config_echo: &serde_json::Value,
        wall_time_s: f64,
        deterministic: bool,
    ) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Entry {
            file: String,
            sha256: String,
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            library_version: &'a str,
            deterministic: bool,
            wall_time_s: f64,
            config: &'a serde_json::Value,
            artifacts: Vec<Entry>,
        }
        let mut artifacts = Vec::new();
        for path in &self.written {
            let bytes = fs::read(path)?;
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            artifacts.push(Entry {
                file: path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                sha256: hex::encode(hasher.finalize()),
            });
        }
        let manifest = Manifest {
            library_version: env!("CARGO_PKG_VERSION"),
            deterministic,
            wall_time_s,
            config: config_echo,
            artifacts,
        };
        let path = self.dir.join("manifest.json");
        let mut file = fs::File::create(&path)?;
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        file.write_all(text.as_bytes())?;
        Ok(path)
    }
}
