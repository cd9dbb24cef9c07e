//! Outcome of a verification suite.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub key: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub instances: u64,
    pub passed: u64,
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            instances: 0,
            passed: 0,
            failures: Vec::new(),
            wall_time_ms: None,
            config: BTreeMap::new(),
        }
    }

    pub fn with_config(mut self, key: &str, value: impl Display) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    /// Records one instance; passes iff `expected == actual`.
    pub fn check<T: PartialEq + Display>(&mut self, key: impl Display, expected: T, actual: T) -> bool {
        self.instances += 1;
        if expected == actual {
            self.passed += 1;
            true
        } else {
            self.failures.push(Failure {
                key: key.to_string(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
            false
        }
    }

    pub fn fail(&mut self, key: impl Display, expected: impl Display, actual: impl Display) {
        self.instances += 1;
        self.failures.push(Failure {
            key: key.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.instances += other.instances;
        self.passed += other.passed;
        self.failures.extend(other.failures);
    }

    pub fn is_pass(&self) -> bool {
        self.failures.is_empty()
    }
}
