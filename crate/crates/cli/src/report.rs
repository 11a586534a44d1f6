use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedYes,
    Valid,
    CertifiedNo,
    Invalid,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::CertifiedYes | Verdict::Valid => 0,
            Verdict::CertifiedNo | Verdict::Invalid => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// One JSON line per input. Fields that do not apply are omitted, and the
/// elapsed time is only present when requested, so reruns are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &'static str, verdict: Verdict, detail: impl Into<String>) -> Self {
        Report {
            command,
            input: None,
            verdict,
            property: None,
            detail: detail.into(),
            certificate: None,
            pairing: None,
            scale: None,
            extra: BTreeMap::new(),
            elapsed_ms: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.extra.insert(key.to_string(), value.into());
        self
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
