use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryStatus {
    Nominal,
    StoppedEarly,
}

/// How a query produces the sets strictly before its final depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntermediateMode {
    /// Chain one-step queries from the start set.
    #[default]
    Concrete,
    /// A composed depth-k pass for every k.
    Symbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub time: f64,
    pub steps: usize,
}

/// Timing records keyed by absolute end time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryData(BTreeMap<usize, QueryRecord>);

impl QueryData {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, end_time: usize, record: QueryRecord) {
        self.0.insert(end_time, record);
    }

    pub fn get(&self, end_time: usize) -> Option<&QueryRecord> {
        self.0.get(&end_time)
    }

    pub fn merge(&mut self, other: QueryData) {
        self.0.extend(other.0);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &QueryRecord)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mutable query object: system, horizon, current temporal depth, timeout
/// and tightness hyperparameters. Owned by one driver at a time.
#[derive(Debug, Clone)]
pub struct Query {
    system: Arc<SystemSpec>,
    horizon: usize,
    depth: usize,
    timeout: f64,
    refine_levels: usize,
    pwl_segments: usize,
    intermediate_mode: IntermediateMode,
    last_status: Option<QueryStatus>,
}

impl Query {
    pub const DEFAULT_REFINE_LEVELS: usize = 3;
    pub const DEFAULT_PWL_SEGMENTS: usize = 8;

    pub fn new(system: impl Into<Arc<SystemSpec>>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidQuery("horizon must be at least 1".into()));
        }
        Ok(Self {
            system: system.into(),
            horizon,
            depth: 1,
            timeout: f64::INFINITY,
            refine_levels: Self::DEFAULT_REFINE_LEVELS,
            pwl_segments: Self::DEFAULT_PWL_SEGMENTS,
            intermediate_mode: IntermediateMode::default(),
            last_status: None,
        })
    }

    pub fn with_refine_levels(mut self, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidQuery("refine_levels must be at least 1".into()));
        }
        self.refine_levels = levels;
        Ok(self)
    }

    pub fn with_pwl_segments(mut self, segments: usize) -> Result<Self> {
        if segments == 0 {
            return Err(Error::InvalidQuery("pwl_segments must be at least 1".into()));
        }
        self.pwl_segments = segments;
        Ok(self)
    }

    pub fn with_intermediate_mode(mut self, mode: IntermediateMode) -> Self {
        self.intermediate_mode = mode;
        self
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn set_depth(&mut self, h: usize) -> Result<()> {
        if h == 0 || h > self.horizon {
            return Err(Error::InvalidQuery(format!(
                "depth {h} outside 1..={}",
                self.horizon
            )));
        }
        self.depth = h;
        Ok(())
    }

    pub fn timeout(&self) -> f64 {
        self.timeout
    }

    /// Subsequent calls stop refining once `seconds` have elapsed.
    pub fn set_timeout(&mut self, seconds: f64) -> Result<()> {
        if seconds.is_nan() || seconds < 0.0 {
            return Err(Error::InvalidQuery(format!("timeout must be >= 0, got {seconds}")));
        }
        self.timeout = seconds;
        Ok(())
    }

    pub fn refine_levels(&self) -> usize {
        self.refine_levels
    }

    pub fn pwl_segments(&self) -> usize {
        self.pwl_segments
    }

    pub fn intermediate_mode(&self) -> IntermediateMode {
        self.intermediate_mode
    }

    /// Segment count of pass `pass` (1-based): halves from the finest level
    /// downward, so pass `refine_levels` uses `pwl_segments`.
    pub fn segments_for_pass(&self, pass: usize) -> usize {
        let shift = (self.refine_levels - pass).min(usize::BITS as usize - 1);
        (self.pwl_segments >> shift).max(1)
    }

    /// Status of the most recent `symbolic_reach` call.
    pub fn status(&self) -> Result<QueryStatus> {
        self.last_status.ok_or(Error::NoStatus)
    }

    pub(crate) fn record_status(&mut self, status: QueryStatus) {
        self.last_status = Some(status);
    }
}
