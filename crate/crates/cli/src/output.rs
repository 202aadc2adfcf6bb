//! Writing results with the run configuration attached.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::Failure;

/// Everything needed to reproduce a run: the tool version, the subcommand
/// and every option after defaults and environment have been applied.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, A: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub args: &'a A,
}

impl<'a, A: Serialize> RunConfig<'a, A> {
    pub fn new(command: &'a str, args: &'a A) -> Self {
        RunConfig { tool: "tlqueue", version: tlqueue_core::VERSION, command, args }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// `#` lines placed ahead of a CSV header.
    pub fn csv_preamble(&self) -> String {
        format!("# tlqueue {}\n# config: {}\n", self.version, self.to_json())
    }

    /// `result` as a JSON object with a leading `config` field.
    pub fn wrap<T: Serialize>(&self, result: &T) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("config".into(), json!(self));
        match serde_json::to_value(result).expect("result serializes") {
            Value::Object(fields) => obj.extend(fields),
            other => {
                obj.insert("result".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("json serializes");
        text.push('\n');
        text
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}
