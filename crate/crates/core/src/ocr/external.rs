use std::process::Command;

use crate::error::{Error, Result};
use crate::io::write_png;
use crate::raster::RasterImage;

use super::OcrEngine;

/// Runs an external executable per crop. `cmd` is a whitespace-separated
/// command line in which `{path}` is replaced by a temporary PNG path; the
/// first line of stdout is the recognized text.
#[derive(Debug, Clone)]
pub struct ExternalEngine {
    pub cmd: String,
}

impl ExternalEngine {
    pub fn new(cmd: impl Into<String>) -> Self {
        ExternalEngine { cmd: cmd.into() }
    }
}

impl OcrEngine for ExternalEngine {
    fn name(&self) -> &str {
        "external"
    }

    fn supports_rotated(&self) -> bool {
        true
    }

    fn recognize(&self, img: &RasterImage) -> Result<String> {
        let dir = tempfile::tempdir()?;
        let path = dir.path().join("crop.png");
        write_png(img, &path)?;
        let path = path.to_string_lossy();
        let args: Vec<String> = self
            .cmd
            .split_whitespace()
            .map(|a| a.replace("{path}", &path))
            .collect();
        let (prog, rest) = args
            .split_first()
            .ok_or_else(|| Error::EngineUnavailable("empty OCR command".into()))?;
        let out = Command::new(prog)
            .args(rest)
            .output()
            .map_err(|e| Error::EngineUnavailable(format!("{prog}: {e}")))?;
        if !out.status.success() {
            return Err(Error::EngineUnavailable(format!("{prog} exited with {}", out.status)));
        }
        let stdout = String::from_utf8_lossy(&out.stdout);
        Ok(stdout.lines().next().unwrap_or("").trim().to_string())
    }
}
