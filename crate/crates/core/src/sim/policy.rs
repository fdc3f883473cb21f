use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gdop::SelectionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// Track every visible satellite.
    Full,
    /// Track the GDOP-weighted subset, refreshed periodically.
    Selective,
    /// Track a uniformly random subset of fixed size, refreshed periodically.
    Random,
}

impl FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "ft" => Ok(PolicyKind::Full),
            "selective" | "st" => Ok(PolicyKind::Selective),
            "random" | "rt" => Ok(PolicyKind::Random),
            other => Err(Error::invalid("policy", format!("unknown policy {other:?}"))),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Full => "full",
            PolicyKind::Selective => "selective",
            PolicyKind::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingPolicy {
    pub kind: PolicyKind,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default = "default_subset")]
    pub random_subset_size: usize,
    /// Seconds between subset refreshes (selective and random only).
    #[serde(default = "default_period")]
    pub reselection_period: f64,
}

fn default_subset() -> usize {
    4
}

fn default_period() -> f64 {
    60.0
}

impl TrackingPolicy {
    pub fn full() -> Self {
        Self::new(PolicyKind::Full)
    }

    pub fn selective() -> Self {
        Self::new(PolicyKind::Selective)
    }

    pub fn random(subset_size: usize) -> Self {
        Self {
            random_subset_size: subset_size,
            ..Self::new(PolicyKind::Random)
        }
    }

    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            selection: SelectionConfig::default(),
            random_subset_size: default_subset(),
            reselection_period: default_period(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.selection.validate()?;
        if !(self.reselection_period > 0.0 && self.reselection_period.is_finite()) {
            return Err(Error::invalid("reselection_period", "must be positive"));
        }
        if self.kind == PolicyKind::Random && self.random_subset_size < self.minimum_tracked() {
            return Err(Error::invalid(
                "random_subset_size",
                format!("must be at least {}", self.minimum_tracked()),
            ));
        }
        Ok(())
    }

    /// Altitude aiding only applies to the subset policies.
    pub fn altitude_aided(&self) -> bool {
        self.kind != PolicyKind::Full && self.selection.altitude_aided
    }

    /// Fewest tracked satellites that still yield a fix.
    pub fn minimum_tracked(&self) -> usize {
        if self.altitude_aided() {
            3
        } else {
            4
        }
    }

    /// Short label used in reports, e.g. `random-4`.
    pub fn label(&self) -> String {
        match self.kind {
            PolicyKind::Random => format!("random-{}", self.random_subset_size),
            k => k.to_string(),
        }
    }
}
