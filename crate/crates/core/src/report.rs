use std::fmt;
use std::time::Duration;

use crate::coverage::coverage;
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::scalar::{scalar_eq, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Guarantee {
    Exact,
    /// `(1-eps)`-approximation; the field is `eps` as a decimal string.
    Approx(String),
    Greedy,
    MonteCarlo,
    Heuristic,
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guarantee::Exact => write!(f, "exact"),
            Guarantee::Approx(_) => write!(f, "(1-ε)-approx"),
            Guarantee::Greedy => write!(f, "(1-1/e)-approx"),
            Guarantee::MonteCarlo => write!(f, "monte-carlo"),
            Guarantee::Heuristic => write!(f, "heuristic"),
        }
    }
}

/// Output of every solver.
#[derive(Debug, Clone)]
pub struct SolutionReport<T> {
    pub algorithm: String,
    pub k: usize,
    /// Chosen vertices (or pair indices for k-SPM solvers), sorted.
    pub set: Vec<usize>,
    pub value: T,
    pub guarantee: Option<Guarantee>,
    pub wall_time: Duration,
    pub params: Vec<(String, String)>,
}

impl<T: Scalar> SolutionReport<T> {
    pub fn new(algorithm: &str, k: usize, mut set: Vec<usize>, value: T) -> Self {
        set.sort_unstable();
        SolutionReport {
            algorithm: algorithm.to_string(),
            k,
            set,
            value,
            guarantee: None,
            wall_time: Duration::ZERO,
            params: Vec::new(),
        }
    }

    pub fn with_guarantee(mut self, g: Guarantee) -> Self {
        self.guarantee = Some(g);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_time(mut self, t: Duration) -> Self {
        self.wall_time = t;
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Recomputes `C(V, S)` and compares it with the reported value.
    pub fn verify(&self, g: &UncertainGraph<T>) -> Result<()> {
        if self.set.len() > self.k {
            return Err(Error::Certificate(format!("set has {} vertices but k = {}", self.set.len(), self.k)));
        }
        if self.set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Certificate("set contains a repeated vertex".into()));
        }
        let actual = coverage(g, &self.set)?;
        if !scalar_eq(&actual, &self.value) {
            return Err(Error::Certificate(format!("reported value {} but the set covers {}", self.value, actual)));
        }
        Ok(())
    }
}
