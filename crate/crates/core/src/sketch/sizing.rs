//! How many sketch rows to draw for a target accuracy `eps`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizingMode {
    /// Literal sample-count bounds with their published constants.
    PaperExact,
    /// Asymptotic forms with small tunable constants.
    Practical,
}

/// Constants for [`SizingMode::Practical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizingConstants {
    /// Multiplier on `m·(ln m·ln n + ln n/eps)` for SRHT.
    pub srht: f64,
    /// Multiplier on `m²/eps²` for CountSketch.
    pub countsketch: f64,
}

impl Default for SizingConstants {
    fn default() -> Self {
        Self {
            srht: 10.0,
            countsketch: 4.0,
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// Unrounded SRHT row count.
///
/// `PaperExact`:
/// `max{48²·m·ln(40nm)·ln(100²·m·ln(40nm)), 40·m·ln(40nm)/eps}`.
/// `Practical`: `C₁·m·(ln m·ln n + ln n/eps)`.
pub fn srht_sample_bound(
    n: usize,
    m: usize,
    eps: f64,
    mode: SizingMode,
    constants: &SizingConstants,
) -> Result<f64> {
    check_eps(eps)?;
    if m == 0 || n < m {
        return Err(Error::InvalidArgument(format!(
            "srht sample count needs n >= m >= 1, got n={n} m={m}"
        )));
    }
    let (n, m) = (n as f64, m as f64);
    Ok(match mode {
        SizingMode::PaperExact => {
            let l = (40.0 * n * m).ln();
            let first = 48.0 * 48.0 * m * l * (100.0 * 100.0 * m * l).ln();
            let second = 40.0 * m * l / eps;
            first.max(second)
        }
        SizingMode::Practical => constants.srht * m * (m.ln() * n.ln() + n.ln() / eps),
    })
}

/// SRHT row count, at least 1. In `PaperExact` mode the count is clamped to
/// the padded row count (next power of two ≥ n) with a warning.
pub fn srht_sample_count(
    n: usize,
    m: usize,
    eps: f64,
    mode: SizingMode,
    constants: &SizingConstants,
) -> Result<usize> {
    let raw = srht_sample_bound(n, m, eps, mode, constants)?;
    let mut r = (raw.ceil() as usize).max(1);
    if mode == SizingMode::PaperExact {
        let cap = n.next_power_of_two();
        if r > cap {
            log::warn!("srht sample count {r} exceeds padded row count {cap}; clamping");
            r = cap;
        }
    }
    Ok(r)
}

/// CountSketch row count, at least 1.
///
/// `PaperExact`: `(m²/eps²)·(ln(m/eps) + 1)⁶`.
/// `Practical`: `C₂·m²/eps²`.
pub fn countsketch_sample_count(
    m: usize,
    eps: f64,
    mode: SizingMode,
    constants: &SizingConstants,
) -> Result<usize> {
    check_eps(eps)?;
    let mf = m as f64;
    let base = mf * mf / (eps * eps);
    let raw = match mode {
        SizingMode::PaperExact => base * ((mf / eps).ln() + 1.0).powi(6),
        SizingMode::Practical => constants.countsketch * base,
    };
    Ok((raw.ceil() as usize).max(1))
}
