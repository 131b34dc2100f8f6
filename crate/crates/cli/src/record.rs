use std::collections::BTreeMap;

use probdom::formats::Instance;
use probdom::scalar::{format_decimal, format_rational};
use probdom::{Rational, Scalar, SolutionReport};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One solver run, as printed by `solve` and read back by `check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub algorithm: String,
    pub k: usize,
    /// Rounded to 12 significant digits.
    pub value: f64,
    /// Lowest-terms ratio, present for the exact backend.
    pub value_exact: Option<String>,
    pub set: Vec<usize>,
    pub guarantee: Option<String>,
    pub params: BTreeMap<String, String>,
    pub instance_hash: String,
    pub wall_time_ms: f64,
}

impl ResultRecord {
    pub fn from_report<T: Scalar>(r: &SolutionReport<T>, inst: &Instance) -> Self {
        let mut params: BTreeMap<String, String> = r.params.iter().cloned().collect();
        params.insert("backend".into(), if T::EXACT { "rational" } else { "f64" }.into());
        ResultRecord {
            algorithm: r.algorithm.clone(),
            k: r.k,
            value: round12(&r.value),
            value_exact: T::EXACT.then(|| format_rational(&r.value.to_rational())),
            set: r.set.clone(),
            guarantee: r.guarantee.as_ref().map(|g| g.to_string()),
            params,
            instance_hash: instance_hash(inst),
            wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
        }
    }
}

pub fn round12<T: Scalar>(v: &T) -> f64 {
    if T::EXACT {
        decimal(&v.to_rational()).parse().expect("decimal renders as a float")
    } else {
        format!("{:.11e}", v.to_f64()).parse().expect("float renders as a float")
    }
}

pub fn decimal(r: &Rational) -> String {
    format_decimal(r, 12)
}

/// SHA-256 of the canonical text form.
pub fn instance_hash(inst: &Instance) -> String {
    Sha256::digest(inst.to_text().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
