//! Stage outputs and their `.meta.json` sidecars.
//!
//! A sidecar records the tool version, stage, every input by file name and SHA-256, the
//! stage configuration and the seed. It holds no timestamps or absolute paths, so equal
//! inputs give byte-identical sidecars.

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "presslens";

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub name: String,
    pub sha256: String,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    stage: &'a str,
    output: &'a str,
    sha256: String,
    inputs: &'a [InputRecord],
    config: &'a serde_json::Value,
    seed: u64,
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = BufReader::new(file);
    let mut hasher = Sha256::new();
    loop {
        let chunk = reader
            .fill_buf()
            .with_context(|| format!("reading {}", path.display()))?;
        if chunk.is_empty() {
            break;
        }
        hasher.update(chunk);
        let n = chunk.len();
        reader.consume(n);
    }
    Ok(hex(&hasher.finalize()))
}

pub struct Stage {
    name: &'static str,
    out_dir: PathBuf,
    seed: u64,
    inputs: Vec<InputRecord>,
    config: serde_json::Value,
}

impl Stage {
    pub fn new(name: &'static str, out_dir: &Path, seed: u64) -> Result<Self> {
        fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
        Ok(Stage {
            name,
            out_dir: out_dir.to_path_buf(),
            seed,
            inputs: Vec::new(),
            config: serde_json::Value::Null,
        })
    }

    /// Hashes an input file and returns its path for reading.
    pub fn input<'p>(&mut self, path: &'p Path) -> Result<&'p Path> {
        let sha256 = sha256_file(path)?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.inputs.push(InputRecord { name, sha256 });
        Ok(path)
    }

    pub fn config(&mut self, config: impl Serialize) {
        self.config = serde_json::to_value(config).expect("config serializes");
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }

    /// Writes `file` into the output directory together with its sidecar.
    pub fn write(&self, file: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path(file);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        let sidecar = Sidecar {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            stage: self.name,
            output: file,
            sha256: hex(&Sha256::digest(bytes)),
            inputs: &self.inputs,
            config: &self.config,
            seed: self.seed,
        };
        let mut meta = serde_json::to_vec_pretty(&sidecar)?;
        meta.push(b'\n');
        let meta_path = self.path(&format!("{file}.meta.json"));
        fs::write(&meta_path, meta).with_context(|| format!("writing {}", meta_path.display()))?;
        Ok(path)
    }

    pub fn write_json(&self, file: &str, value: &impl Serialize) -> Result<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(file, &bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_is_stable_and_path_free() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        fs::write(&input, "abc").unwrap();
        let run = |out: &str| {
            let out = dir.path().join(out);
            let mut stage = Stage::new("demo", &out, 7).unwrap();
            stage.input(&input).unwrap();
            stage.config(serde_json::json!({"k": 1}));
            stage.write("x.txt", b"hello").unwrap();
            fs::read_to_string(out.join("x.txt.meta.json")).unwrap()
        };
        let a = run("a");
        assert_eq!(a, run("b"));
        assert!(!a.contains(dir.path().to_str().unwrap()));
        // sha256("abc")
        assert!(a.contains("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
        assert!(a.contains("\"seed\": 7"));
    }
}
