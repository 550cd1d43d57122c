//! Certificate documents: JSON, versioned, self-contained. Each one echoes
//! the job it answers (with a single `t0` or `alpha0`) and a SHA-256 of that
//! echo, so it can be replayed without the original file.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use speccert_core::exact::fmt_rat;
use speccert_core::extend::{Evidence, InjectivityCertificate, Obstruction};

use crate::error::CliError;
use crate::job::Job;

pub const FORMAT: &str = "speccert-certificate";
pub const VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub format: String,
    pub version: String,
    pub certificates: Vec<Certificate>,
}

impl Bundle {
    pub fn new(certificates: Vec<Certificate>) -> Self {
        Bundle {
            format: FORMAT.into(),
            version: VERSION.into(),
            certificates,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let b: Bundle = serde_json::from_str(text)
            .map_err(|e| CliError::new("E-CERT", format!("malformed certificate: {e}")))?;
        if b.format != FORMAT || b.version != VERSION {
            return Err(CliError::new(
                "E-CERT",
                format!("unsupported certificate format {} {}", b.format, b.version),
            ));
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceDoc {
    pub kind: String,
    pub operands: Vec<String>,
    pub result: String,
}

impl From<&Evidence> for EvidenceDoc {
    fn from(e: &Evidence) -> Self {
        EvidenceDoc {
            kind: e.kind.clone(),
            operands: e.operands.clone(),
            result: e.result.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub kind: String,
    pub detail: String,
}

impl From<&Obstruction> for WitnessDoc {
    fn from(o: &Obstruction) -> Self {
        let kind = match o {
            Obstruction::SquareProduct { .. } => "square-product",
            Obstruction::Vanishing { .. } => "vanishing-generator",
            Obstruction::Halving { .. } => "halving",
            Obstruction::Kernel { .. } => "kernel",
            Obstruction::FiberTwoTorsion { .. } => "fiber-two-torsion",
            Obstruction::Unreachable => "unreachable",
        };
        WitnessDoc {
            kind: kind.into(),
            detail: o.describe(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub inputs: Job<String>,
    pub input_hash: String,
    pub route: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<String>,
    /// `Injective`, `Indeterminate`, or `Informational` for the
    /// `specialize` and `factor` routes.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    pub evidence: Vec<EvidenceDoc>,
    pub assumptions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub const INFORMATIONAL: &str = "Informational";

pub fn hash_inputs(inputs: &Job<String>) -> String {
    let canonical = serde_json::to_string(inputs).expect("jobs serialize");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Certificate {
    pub fn from_core(inputs: Job<String>, c: &InjectivityCertificate) -> Self {
        Certificate {
            input_hash: hash_inputs(&inputs),
            inputs,
            route: c.route.as_str().into(),
            t0: c.t0.as_ref().map(fmt_rat),
            alpha0: c.alpha0.as_ref().map(fmt_rat),
            verdict: c.verdict.as_str().into(),
            witness: c.obstruction.as_ref().map(WitnessDoc::from),
            evidence: c.evidence.iter().map(EvidenceDoc::from).collect(),
            assumptions: c.assumptions.clone(),
            timing_ms: None,
        }
    }

    pub fn informational(inputs: Job<String>, route: &str, t0: Option<String>, evidence: Vec<Evidence>) -> Self {
        Certificate {
            input_hash: hash_inputs(&inputs),
            inputs,
            route: route.into(),
            t0,
            alpha0: None,
            verdict: INFORMATIONAL.into(),
            witness: None,
            evidence: evidence.iter().map(EvidenceDoc::from).collect(),
            assumptions: vec![],
            timing_ms: None,
        }
    }

    pub fn is_indeterminate(&self) -> bool {
        self.verdict == "Indeterminate"
    }
}
