use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sketch::{SizingConstants, SizingMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Srht,
    CountSketch,
    /// Full SVD solve on every update; the reference the sketches are
    /// measured against.
    Exact,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Srht, Backend::CountSketch, Backend::Exact];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Srht => "srht",
            Backend::CountSketch => "countsketch",
            Backend::Exact => "exact",
        }
    }

    pub fn is_sketched(self) -> bool {
        self != Backend::Exact
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "srht" => Ok(Backend::Srht),
            "countsketch" | "count-sketch" => Ok(Backend::CountSketch),
            "exact" => Ok(Backend::Exact),
            other => Err(Error::InvalidArgument(format!("unknown backend `{other}`"))),
        }
    }
}

impl fmt::Display for SizingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizingMode::PaperExact => "paper-exact",
            SizingMode::Practical => "practical",
        })
    }
}

impl FromStr for SizingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-exact" => Ok(SizingMode::PaperExact),
            "practical" => Ok(SizingMode::Practical),
            other => Err(Error::InvalidArgument(format!("unknown sizing mode `{other}`"))),
        }
    }
}

pub const DEFAULT_REFRESH_INTERVAL: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub backend: Backend,
    pub eps: f64,
    pub mode: SizingMode,
    pub constants: SizingConstants,
    pub seed: u64,
    /// Recompute the pseudoinverse by SVD after this many updates (0 = never).
    pub refresh_interval: u64,
    /// Fixed sketch row count, bypassing the sizing formulas.
    pub rows_override: Option<usize>,
}

impl EngineConfig {
    pub fn new(backend: Backend, eps: f64, seed: u64) -> Self {
        Self {
            backend,
            eps,
            mode: SizingMode::Practical,
            constants: SizingConstants::default(),
            seed,
            refresh_interval: DEFAULT_REFRESH_INTERVAL,
            rows_override: None,
        }
    }

    pub fn with_mode(mut self, mode: SizingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_rows(mut self, rows: usize) -> Self {
        self.rows_override = Some(rows);
        self
    }

    pub fn with_refresh_interval(mut self, every: u64) -> Self {
        self.refresh_interval = every;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in Backend::ALL {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("gauss".parse::<Backend>().is_err());
        for m in [SizingMode::PaperExact, SizingMode::Practical] {
            assert_eq!(m.to_string().parse::<SizingMode>().unwrap(), m);
        }
    }
}
