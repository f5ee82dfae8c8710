//! Run manifests and output envelopes.
//!
//! A JSON artifact is `{"manifest": .., "result": ..}`; a CSV artifact starts
//! with a `# manifest: {..}` line. The checksum is the SHA-256 of the
//! serialized result (JSON) or of the CSV body.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub params: Value,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
    pub output_checksum: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Artifact {
    pub extension: &'static str,
    pub text: String,
}

pub fn json_artifact(command: &str, params: Value, wall: Option<f64>, result: &Value) -> Artifact {
    let body = serde_json::to_string(result).expect("result serializes");
    let manifest = Manifest {
        command: command.into(),
        params,
        tool_version: TOOL_VERSION,
        wall_time_secs: wall,
        output_checksum: sha256_hex(body.as_bytes()),
    };
    let envelope = serde_json::json!({ "manifest": manifest, "result": result });
    Artifact {
        extension: "json",
        text: serde_json::to_string_pretty(&envelope).expect("envelope serializes") + "\n",
    }
}

pub fn csv_artifact(command: &str, params: Value, wall: Option<f64>, body: String) -> Artifact {
    let manifest = Manifest {
        command: command.into(),
        params,
        tool_version: TOOL_VERSION,
        wall_time_secs: wall,
        output_checksum: sha256_hex(body.as_bytes()),
    };
    let head = serde_json::to_string(&manifest).expect("manifest serializes");
    Artifact {
        extension: "csv",
        text: format!("# manifest: {head}\n{body}"),
    }
}

/// Writes to `<outdir>/<command>.<ext>`, or to stdout without an outdir.
pub fn emit(command: &str, artifact: &Artifact, outdir: Option<&Path>) -> std::io::Result<()> {
    match outdir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{command}.{}", artifact.extension)), &artifact.text)
        }
        None => {
            print!("{}", artifact.text);
            Ok(())
        }
    }
}
