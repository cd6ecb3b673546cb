//! Plain-text run manifests written next to every CSV file.
//!
//! A manifest records everything needed to reproduce its CSV: subcommand,
//! resolved parameters (defaults included), seed, tool version, output path,
//! and how long the run took.

use std::path::Path;
use std::time::Duration;

#[derive(Debug, Clone)]
pub struct RunManifest {
    subcommand: String,
    parameters: Vec<(String, String)>,
    seed: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            parameters: Vec::new(),
            seed,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self, output: &Path, elapsed: Duration) -> String {
        let mut out = String::new();
        out.push_str(&format!("subcommand: {}\n", self.subcommand));
        out.push_str(&format!("version: {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("seed: {}\n", self.seed));
        for (key, value) in &self.parameters {
            out.push_str(&format!("param.{key}: {value}\n"));
        }
        out.push_str(&format!("output: {}\n", output.display()));
        out.push_str(&format!("duration_ms: {}\n", elapsed.as_millis()));
        out
    }
}
