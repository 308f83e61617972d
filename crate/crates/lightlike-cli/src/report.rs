use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// One named check: passes when `max_residual ≤ tol`, unless it is a
/// yes/no check whose verdict is recorded directly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub max_residual: f64,
    pub points_tested: usize,
    pub tol: f64,
    pub pass: bool,
}

impl Stage {
    pub fn residual(name: impl Into<String>, max_residual: f64, points_tested: usize, tol: f64) -> Self {
        Stage { name: name.into(), max_residual, points_tested, tol, pass: max_residual <= tol }
    }

    /// A check with a boolean verdict; `max_residual` is informational.
    pub fn verdict(name: impl Into<String>, pass: bool, max_residual: f64, points_tested: usize, tol: f64) -> Self {
        Stage { name: name.into(), max_residual, points_tested, tol, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub seed: u64,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub versions: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub pass: bool,
    pub stages: Vec<Stage>,
    pub metadata: Metadata,
    /// Classification outcome, for commands that produce one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
}

impl VerificationReport {
    pub fn new(command: &str, stages: Vec<Stage>, metadata: Metadata) -> Self {
        let pass = !stages.is_empty() && stages.iter().all(|s| s.pass);
        VerificationReport { command: command.to_string(), pass, stages, metadata, result: None }
    }

    pub fn first_failure(&self) -> Option<&Stage> {
        self.stages.iter().find(|s| !s.pass)
    }

    /// 0 on pass, 1 on a failed check, 2 for a report without stages.
    pub fn exit_code(&self) -> i32 {
        if self.stages.is_empty() {
            2
        } else if self.pass {
            0
        } else {
            1
        }
    }
}

/// Writes every float in scientific notation with 17 significant digits.
struct Canonical;

impl Formatter for Canonical {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
}

/// Canonical JSON: sorted keys, 17-digit floats, non-finite floats as
/// `null`, UTF-8, one trailing newline.
pub fn emit(report: &VerificationReport) -> Vec<u8> {
    // Going through `Value` sorts object keys and maps NaN/inf to null.
    let value = serde_json::to_value(report).expect("report fields are plain data");
    let mut out = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut out, Canonical)).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    out
}
