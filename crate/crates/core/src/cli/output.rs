//! CSV files with a `#` JSON header, and the per-run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// What a run did and what it produced.
///
/// The `#` header of each CSV carries every field except `threads`,
/// `wall_time_s` and `outputs`, so reruns with the same flags produce
/// identical files.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub params: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, params: Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            params,
            results: Value::Object(Default::default()),
            threads: None,
            wall_time_s: None,
            outputs: BTreeMap::new(),
        }
    }

    pub fn set_result(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(map) = &mut self.results {
            map.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        }
    }

    fn header(&self) -> Result<String> {
        let stable = RunManifest { threads: None, wall_time_s: None, outputs: BTreeMap::new(), ..self.clone() };
        Ok(serde_json::to_string(&stable)?)
    }
}

/// Collects output files for one run and records their checksums.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write_csv(&mut self, name: &str, manifest: &RunManifest, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let mut text = format!("# {}\n{}\n", manifest.header()?, columns.join(","));
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_raw(name, text.as_bytes())
    }

    pub fn write_raw(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        f.write_all(bytes)?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Writes `<command>.manifest.json` with checksums of everything written.
    pub fn finish(self, mut manifest: RunManifest) -> Result<PathBuf> {
        for path in &self.written {
            let digest = Sha256::digest(fs::read(path)?);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            manifest.outputs.insert(name, hex);
        }
        let path = self.dir.join(format!("{}.manifest.json", manifest.command));
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}

/// `x` in positional notation with 17 significant digits.
pub fn sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.16}", x);
    }
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(0.5), "0.50000000000000000");
        assert_eq!(sig17(2f64.sqrt() - 1.0), "0.41421356237309515");
        assert_eq!(sig17(0.03125), "0.031250000000000000");
        assert_eq!(sig17(0.0), "0.0000000000000000");
        for x in [0.123456789, 1e-7, 0.999999999999] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
    }
}
