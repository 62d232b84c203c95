//! Atomic file output and the metadata headers carried by every file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};

pub const TOOL: &str = "pairsim";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;

/// Command name plus the full parameter set; enough to regenerate a file.
#[derive(Debug, Clone)]
pub struct Metadata {
    pub command: &'static str,
    pub params: Value,
}

impl Metadata {
    pub fn new(command: &'static str, params: Value) -> Self {
        Self { command, params }
    }

    pub fn csv_header(&self) -> String {
        format!(
            "# {TOOL} {VERSION}\n# command: {}\n# params: {}\n",
            self.command, self.params
        )
    }

    /// JSON envelope with the payload fields merged in after the metadata.
    pub fn json_document(&self, payload: Value) -> Value {
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "params": self.params,
        });
        if let (Some(obj), Value::Object(extra)) = (doc.as_object_mut(), payload) {
            obj.extend(extra);
        }
        doc
    }
}

pub fn json_text(doc: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

/// Writes every file to a temporary sibling first and renames only once all
/// of them are on disk, so a failure never leaves partial outputs behind.
pub fn write_files_atomically(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, _) in files {
        let target = dir.join(name);
        if target.is_dir() {
            anyhow::bail!("cannot overwrite directory {}", target.display());
        }
    }
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(files.len());
    let result = (|| -> Result<()> {
        for (name, contents) in files {
            let target = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
            staged.push((tmp.clone(), target));
            let mut f =
                fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
        }
        for (tmp, target) in &staged {
            fs::rename(tmp, target).with_context(|| format!("writing {}", target.display()))?;
        }
        Ok(())
    })();
    if let Err(e) = result {
        for (tmp, _) in &staged {
            let _ = fs::remove_file(tmp);
        }
        return Err(e);
    }
    Ok(staged.into_iter().map(|(_, target)| target).collect())
}

/// Shortest round-trip decimal form, so CSV values parse back bit-exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `2`, `1.5`, `0.25` style tag for file names.
pub fn x_tag(x: f64) -> String {
    format!("{x}")
}
