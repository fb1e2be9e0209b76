//! Input sources and their provenance hashes.

use std::io::Read;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Raw input text with the label it was read from.
pub struct Source {
    pub label: String,
    pub text: String,
}

impl Source {
    /// A file path, `-` for standard input, or inline JSON (an argument
    /// starting with `[` or `{` that names no file).
    pub fn read(arg: &str) -> Result<Self, CliError> {
        if arg == "-" {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?;
            return Ok(Source {
                label: "<stdin>".into(),
                text,
            });
        }
        let path = Path::new(arg);
        if path.is_file() {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?;
            return Ok(Source {
                label: arg.into(),
                text,
            });
        }
        let trimmed = arg.trim_start();
        if trimmed.starts_with('[') || trimmed.starts_with('{') {
            return Ok(Source {
                label: "<inline>".into(),
                text: arg.into(),
            });
        }
        Err(CliError::Input(format!("no such input file: {arg}")))
    }

    /// Synthetic source for inputs assembled from command-line options.
    pub fn from_options(label: &str, text: String) -> Self {
        Source {
            label: label.into(),
            text,
        }
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }

    pub fn provenance(&self) -> Value {
        json!({"source": self.label, "sha256": self.sha256()})
    }
}
