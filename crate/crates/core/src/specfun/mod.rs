//! Real-valued special functions: gamma family, incomplete gamma, Kummer's
//! `M`, Tricomi's `U` and the derivative of `U` in its second parameter.
//!
//! Everything here is a pure function of its arguments.

mod gamma;
mod hyper;
mod quad;

pub use gamma::{
    cot_pi, digamma, gamma, gamma_pq, ln_gamma, ln_upper_inc_gamma, pochhammer, rgamma, sin_pi,
    upper_inc_gamma,
};
pub use hyper::{kummer_m, tricomi_u, tricomi_u_dc};

use crate::error::{Error, Result};

/// Truncation and integer-detection settings for the hypergeometric series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    /// A series stops once two consecutive terms fall below `rel_tol * |partial sum|`.
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Half-width used to decide that a second parameter is "an integer".
    pub integer_guard: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            rel_tol: 1e-14,
            max_terms: 20_000,
            integer_guard: 1e-5,
        }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if self.max_terms < 1 {
            return Err(Error::InvalidParameter("max_terms must be >= 1".into()));
        }
        if !(self.integer_guard > 0.0 && self.integer_guard <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "integer_guard must lie in (0, 1e-3], got {}",
                self.integer_guard
            )));
        }
        Ok(())
    }

    /// Distance from `x` to the nearest integer is at most the guard.
    pub fn near_integer(&self, x: f64) -> bool {
        (x - x.round()).abs() <= self.integer_guard
    }
}
