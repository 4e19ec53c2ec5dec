//! Decompositions, search reports, and their JSON certificate form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CertError, SearchError};
use crate::matrix::Gf2Matrix;

/// `target = p + q` with `p^2 = p` and `q^k = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p: Gf2Matrix,
    pub q: Gf2Matrix,
    pub k: u32,
    pub target: Gf2Matrix,
}

impl Decomposition {
    /// Builds a decomposition, checking all three defining equations.
    pub fn new(p: Gf2Matrix, q: Gf2Matrix, k: u32, target: Gf2Matrix) -> Result<Self, SearchError> {
        let d = Decomposition { p, q, k, target };
        if let Some(why) = d.violation() {
            return Err(SearchError::InvalidPair(why));
        }
        Ok(d)
    }

    fn violation(&self) -> Option<&'static str> {
        let n = self.target.dim();
        if self.p.dim() != n || self.q.dim() != n {
            return Some("dimension mismatch");
        }
        if self.k == 0 {
            return Some("index must be at least 1");
        }
        if self.p.add_unchecked(&self.q) != self.target {
            return Some("p + q differs from the target");
        }
        if !self.p.is_idempotent() {
            return Some("p is not idempotent");
        }
        if !self.q.is_nilpotent_index(self.k as u64) {
            return Some("q^k is nonzero");
        }
        None
    }

    /// Re-checks `p + q = target`, `p^2 = p`, and `q^k = 0`.
    pub fn verify(&self) -> bool {
        self.violation().is_none()
    }
}

pub fn verify_decomposition(d: &Decomposition) -> bool {
    d.verify()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    ExhaustedNone,
    Exported,
    Unknown,
}

impl SearchStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchStatus::Found => "found",
            SearchStatus::ExhaustedNone => "exhausted-none",
            SearchStatus::Exported => "exported",
            SearchStatus::Unknown => "unknown",
        }
    }
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Brute,
    Stratified,
    Sat,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Brute => "brute",
            Strategy::Stratified => "stratified",
            Strategy::Sat => "sat",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "brute" => Ok(Strategy::Brute),
            "stratified" => Ok(Strategy::Stratified),
            "sat" => Ok(Strategy::Sat),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// Outcome of a decomposition search.
///
/// `space_size` counts idempotents examined for the enumerating strategies
/// and DPLL decisions for the SAT strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub target: Gf2Matrix,
    pub k: u32,
    pub status: SearchStatus,
    pub witness: Option<Decomposition>,
    pub strategy: Strategy,
    pub space_size: u64,
}

/// Serialized certificate. Matrices are embedded in the matrix text format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub k: u32,
    pub target: String,
    pub status: SearchStatus,
    pub strategy: Strategy,
    pub space_size: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_q: Option<String>,
    pub tool_version: String,
}

impl SearchReport {
    pub fn certificate(&self) -> Certificate {
        Certificate {
            n: self.target.dim(),
            k: self.k,
            target: self.target.to_text(),
            status: self.status,
            strategy: self.strategy,
            space_size: self.space_size,
            witness_p: self.witness.as_ref().map(|w| w.p.to_text()),
            witness_q: self.witness.as_ref().map(|w| w.q.to_text()),
            tool_version: crate::VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.certificate()).expect("certificate serializes")
    }

    /// Parses a certificate and re-verifies any witness it carries.
    pub fn from_json(text: &str) -> Result<Self, CertError> {
        let cert: Certificate = serde_json::from_str(text)?;
        let parse = |field: &'static str, s: &str| {
            Gf2Matrix::parse_text(s).map_err(|source| CertError::Matrix { field, source })
        };
        let target = parse("target", &cert.target)?;
        if target.dim() != cert.n {
            return Err(CertError::Inconsistent(format!(
                "n = {} but target is {}x{}",
                cert.n,
                target.dim(),
                target.dim()
            )));
        }
        let witness = match (&cert.witness_p, &cert.witness_q) {
            (Some(p), Some(q)) => {
                let d = Decomposition::new(parse("witness_p", p)?, parse("witness_q", q)?, cert.k, target.clone())
                    .map_err(|e| CertError::Inconsistent(e.to_string()))?;
                Some(d)
            }
            (None, None) => None,
            _ => return Err(CertError::Inconsistent("witness_p and witness_q must appear together".into())),
        };
        if (cert.status == SearchStatus::Found) != witness.is_some() {
            return Err(CertError::Inconsistent("status found requires a witness and vice versa".into()));
        }
        Ok(SearchReport {
            target,
            k: cert.k,
            status: cert.status,
            witness,
            strategy: cert.strategy,
            space_size: cert.space_size,
        })
    }
}
