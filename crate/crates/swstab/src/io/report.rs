//! JSON result bundles with a fixed key order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BUNDLE_VERSION: u32 = 1;

/// Everything a command produced, plus the resolved config it ran with.
///
/// Wall-clock timings live in a separate file so that identical inputs give
/// byte-identical bundles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub version: u32,
    pub command: String,
    pub config_echo: String,
    pub result: serde_json::Value,
}

impl ReportBundle {
    pub fn new<T: Serialize>(command: &str, config_echo: String, result: &T) -> Result<Self> {
        let result = serde_json::to_value(result)
            .map_err(|e| Error::invalid(format!("result is not serializable: {e}")))?;
        Ok(ReportBundle {
            version: BUNDLE_VERSION,
            command: command.into(),
            config_echo,
            result,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle is serializable");
        s.push('\n');
        s
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_bundle(path: &Path, bundle: &ReportBundle) -> Result<()> {
    write_text(path, &bundle.to_json())
}

pub fn write_timings(path: &Path, command: &str, seconds: f64, threads: usize) -> Result<()> {
    let v = serde_json::json!({
        "command": command,
        "wall_seconds": seconds,
        "threads": threads,
    });
    write_text(path, &(serde_json::to_string_pretty(&v).unwrap() + "\n"))
}
