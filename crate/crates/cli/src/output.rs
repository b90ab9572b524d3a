use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Written next to every command's outputs.
#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub argv: Vec<String>,
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub workers: Option<usize>,
    pub wall_time_s: f64,
    pub summary: Vec<String>,
    pub outputs: Vec<OutputFile>,
}

/// Collects output files and summary lines for one command.
pub struct Outputs {
    dir: PathBuf,
    pub svg: bool,
    files: Vec<OutputFile>,
    summary: Vec<String>,
    started: Instant,
}

impl Outputs {
    pub fn new(dir: &Path, svg: bool) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), svg, files: vec![], summary: vec![], started: Instant::now() })
    }

    pub fn write(&mut self, name: &str, content: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(OutputFile {
            path: name.to_string(),
            sha256: hex(&Sha256::digest(content)),
            bytes: content.len(),
        });
        Ok(path)
    }

    /// Prints a summary line and keeps it for the manifest.
    pub fn say(&mut self, line: impl Into<String>) {
        let line = line.into();
        println!("{line}");
        self.summary.push(line);
    }

    pub fn finish(
        mut self,
        command: &str,
        config: serde_json::Value,
        seeds: Vec<u64>,
        workers: Option<usize>,
    ) -> Result<PathBuf> {
        let manifest = RunManifest {
            tool: "holopt",
            version: env!("CARGO_PKG_VERSION"),
            argv: std::env::args().collect(),
            command: command.to_string(),
            config,
            seeds,
            workers,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            summary: std::mem::take(&mut self.summary),
            outputs: std::mem::take(&mut self.files),
        };
        let path = self.dir.join(format!("{command}.manifest.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(path)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Minimal CSV builder; numbers print in shortest round-trip form.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { buf: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells.iter().map(Cell::to_string).collect();
        self.buf.push_str(&line.join(","));
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

#[derive(Clone)]
pub enum Cell {
    F(f64),
    U(usize),
    S(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::F(x) => write!(f, "{x}"),
            Cell::U(x) => write!(f, "{x}"),
            Cell::S(s) => write!(f, "{s}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::U(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

#[macro_export]
macro_rules! cells {
    ($($x:expr),* $(,)?) => { &[$($crate::output::Cell::from($x)),*] };
}
