//! Check records and the versioned JSON report.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One verified statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Rendering of the computed value or a short summary.
    pub value: String,
    /// A witness in the expression syntax, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// The library invariant this check exercises.
    pub traceability: String,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, value: impl Into<String>, traceability: &str) -> Self {
        Check {
            name: name.into(),
            status,
            value: value.into(),
            witness: None,
            traceability: traceability.into(),
        }
    }

    pub fn with_witness(mut self, witness: String) -> Self {
        self.witness = Some(witness);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub seed: u64,
    /// Wall time in milliseconds; absent unless timing was requested, so
    /// that reports replay byte for byte.
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// Process exit code: 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{:<12} {}: {}\n", c.status.label(), c.name, c.value));
        }
        out
    }

    /// Writes the JSON report through a temporary file in the target
    /// directory and renames it into place.
    pub fn write_atomic(&self, path: &Path) -> std::io::Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.to_json().as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(status: Status) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            command: "verify arnold".into(),
            parameters: BTreeMap::from([("n".into(), 2.into())]),
            checks: vec![Check::new("c", status, "0", "model-p: d V equals the cyclic sum")],
            seed: 7,
            elapsed_ms: None,
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(sample(Status::Pass).exit_code(), 0);
        assert_eq!(sample(Status::Inconclusive).exit_code(), 0);
        assert_eq!(sample(Status::Fail).exit_code(), 1);
    }

    #[test]
    fn json_layout() {
        let v: serde_json::Value = serde_json::from_str(&sample(Status::Pass).to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["checks"][0]["status"], "pass");
        assert!(v["checks"][0].get("witness").is_none());
        assert!(v["elapsed_ms"].is_null());
    }

    #[test]
    fn atomic_write_replaces_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        std::fs::write(&path, "old").unwrap();
        sample(Status::Fail).write_atomic(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), sample(Status::Fail).to_json());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
