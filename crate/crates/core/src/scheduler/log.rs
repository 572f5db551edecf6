use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::Phase;
use crate::bounder::QueryStatus;

/// Time budget in seconds, or the named unlimited sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Seconds(f64),
    Unlimited,
}

impl Budget {
    pub fn seconds(self) -> f64 {
        match self {
            Budget::Seconds(s) => s,
            Budget::Unlimited => f64::INFINITY,
        }
    }

    pub(crate) fn from_seconds(s: f64) -> Self {
        if s == f64::INFINITY {
            Budget::Unlimited
        } else {
            Budget::Seconds(s)
        }
    }

    pub fn is_unlimited(self) -> bool {
        matches!(self, Budget::Unlimited)
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Seconds(s) => write!(f, "{s}"),
            Budget::Unlimited => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(Budget::Unlimited);
        }
        let v: f64 = t.parse().map_err(|_| format!("invalid budget {s:?}"))?;
        if !v.is_finite() {
            return Err(format!("invalid budget {s:?}; use \"inf\" for no limit"));
        }
        Ok(Budget::Seconds(v))
    }
}

impl Serialize for Budget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Budget::Seconds(v) => s.serialize_f64(*v),
            Budget::Unlimited => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Budget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Budget;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number of seconds or \"inf\"")
            }
            // Some formats (csv) hand "inf" over as a float.
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Budget, E> {
                Ok(Budget::from_seconds(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Budget, E> {
                Ok(Budget::Seconds(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Budget, E> {
                Ok(Budget::Seconds(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Budget, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// One `symbolic_reach` call issued by a driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub phase: Phase,
    pub t_start: usize,
    pub depth: usize,
    pub status: QueryStatus,
    /// Seconds deducted from the budget for this iteration.
    pub elapsed: f64,
    /// Remaining budget at the top of the iteration.
    pub budget_before: Budget,
    /// Times whose sets this call contributed to the result.
    pub pushed: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScheduleLog(pub Vec<ScheduleRecord>);

impl ScheduleLog {
    pub fn records(&self) -> &[ScheduleRecord] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depths(&self) -> Vec<usize> {
        self.0.iter().map(|r| r.depth).collect()
    }

    pub fn search_records(&self) -> impl Iterator<Item = &ScheduleRecord> {
        self.0.iter().filter(|r| r.phase == Phase::Search)
    }

    pub fn jump_records(&self) -> impl Iterator<Item = &ScheduleRecord> {
        self.0.iter().filter(|r| r.phase == Phase::Jump)
    }

    pub fn total_elapsed(&self) -> f64 {
        self.0.iter().map(|r| r.elapsed).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("log serializes")
    }
}
