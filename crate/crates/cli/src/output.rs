use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub build: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<bool>,
    /// Seconds since the Unix epoch. The only field that differs between
    /// identical runs.
    pub generated_at: u64,
}

impl Metadata {
    pub fn new(command: &'static str) -> Self {
        Self {
            tool: "poolshare",
            version: env!("CARGO_PKG_VERSION"),
            build: env!("POOLSHARE_GIT_DESCRIBE"),
            command,
            seed: None,
            generator: None,
            chunk_size: None,
            audit: None,
            generated_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn stochastic(mut self, seed: u64, chunk_size: u64) -> Self {
        self.seed = Some(seed);
        self.generator = Some(poolshare::stats::GENERATOR_ID);
        self.chunk_size = Some(chunk_size);
        self
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    metadata: &'a Metadata,
    config: &'a ScenarioConfig,
    result: &'a T,
}

pub struct Writer {
    dir: PathBuf,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    pub fn report<T: Serialize>(&self, metadata: &Metadata, config: &ScenarioConfig, result: &T) -> Result<(), CliError> {
        self.write_json("report.json", &Report { metadata, config, result })
    }

    pub fn config(&self, name: &str, config: &ScenarioConfig) -> Result<(), CliError> {
        self.write_json(name, config)
    }

    /// Writes `table.csv` with a fixed header.
    pub fn table(&self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let path = self.dir.join("table.csv");
        let fail = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(fail)?;
        w.write_record(header).map_err(fail)?;
        for row in rows {
            w.write_record(&row).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
        Ok(())
    }
}

/// Shortest representation that parses back to the same double.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
