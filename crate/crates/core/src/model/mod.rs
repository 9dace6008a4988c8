//! Parameters of the capital process, the four protection schemes, and a
//! Monte Carlo simulator of the piecewise-deterministic capital path.

mod sim;

pub use sim::{
    estimate_expected_trapping_time, estimate_laplace, estimate_subsidy_value,
    estimate_trapping_probability, evolve, simulate_path, MCEstimate, PathOutcome, SimConfig,
};

use crate::error::{Error, Result};

/// Uninsured-world parameters: capital grows at rate `r` above the poverty
/// line `x_star`, losses arrive at rate `lambda` with sizes `Exp(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub r: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub x_star: f64,
}

impl ModelParams {
    pub fn new(r: f64, lambda: f64, alpha: f64, x_star: f64) -> Result<Self> {
        let p = ModelParams {
            r,
            lambda,
            alpha,
            x_star,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r", self.r),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("x_star", self.x_star),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn mean_loss(&self) -> f64 {
        1.0 / self.alpha
    }
}

/// Premium under the expected value principle, `(1 + theta)(1 - kappa) lambda E[Z]`.
pub fn premium(params: &ModelParams, kappa: f64, theta: f64) -> f64 {
    (1.0 + theta) * (1.0 - kappa) * params.lambda * params.mean_loss()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Uninsured,
    Insured,
    SubsidisedInsured,
    BarrierSubsidised,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Uninsured => "uninsured",
            SchemeKind::Insured => "insured",
            SchemeKind::SubsidisedInsured => "subsidised",
            SchemeKind::BarrierSubsidised => "barrier",
        }
    }
}

/// How a continuously paid premium `pi` changes the household's growth rate
/// and critical capital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PremiumMapping {
    /// Premium paid out of the drift: `r_ins = r`, `x_star_ins = x_star + pi / r`.
    #[default]
    DriftAbsorption,
    /// Premium paid as a proportional cut in growth:
    /// `r_ins = r lambda / (lambda + pi alpha)`, `x_star_ins = x_star`.
    /// With the expected value premium this is `r / (1 + (1 + theta)(1 - kappa))`.
    RateScaling,
}

impl PremiumMapping {
    /// `(r_ins, x_star_ins)` for a household paying premium rate `pi`.
    pub fn apply(&self, params: &ModelParams, pi: f64) -> (f64, f64) {
        match self {
            PremiumMapping::DriftAbsorption => (params.r, params.x_star + pi / params.r),
            PremiumMapping::RateScaling => (
                params.r * params.lambda / (params.lambda + pi * params.alpha),
                params.x_star,
            ),
        }
    }
}

/// One of the four protection schemes, with the household's insured
/// dynamics `(r_ins, x_star_ins)` already resolved.
///
/// For `SubsidisedInsured` the insured dynamics are those of the subsidised
/// premium `pi(kappa, theta_star)`; for `BarrierSubsidised` they are the
/// dynamics above the barrier, and `x_star_ins` is the critical capital in
/// both regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub kappa: f64,
    pub theta: f64,
    pub theta_star: f64,
    pub barrier: f64,
    pub r_ins: f64,
    pub x_star_ins: f64,
}

impl SchemeSpec {
    pub fn uninsured(params: &ModelParams) -> Self {
        SchemeSpec {
            kind: SchemeKind::Uninsured,
            kappa: 1.0,
            theta: 0.0,
            theta_star: 0.0,
            barrier: f64::NAN,
            r_ins: params.r,
            x_star_ins: params.x_star,
        }
    }

    pub fn insured(
        params: &ModelParams,
        kappa: f64,
        theta: f64,
        mapping: PremiumMapping,
    ) -> Result<Self> {
        let (r_ins, x_star_ins) = mapping.apply(params, premium(params, kappa, theta));
        let s = SchemeSpec {
            kind: SchemeKind::Insured,
            kappa,
            theta,
            theta_star: theta,
            barrier: f64::NAN,
            r_ins,
            x_star_ins,
        };
        s.validate(params)?;
        Ok(s)
    }

    /// Insured scheme in which the government pays the loading `theta - theta_star`.
    pub fn subsidised(
        params: &ModelParams,
        kappa: f64,
        theta: f64,
        theta_star: f64,
        mapping: PremiumMapping,
    ) -> Result<Self> {
        let (r_ins, x_star_ins) = mapping.apply(params, premium(params, kappa, theta_star));
        let s = SchemeSpec {
            kind: SchemeKind::SubsidisedInsured,
            kappa,
            theta,
            theta_star,
            barrier: f64::NAN,
            r_ins,
            x_star_ins,
        };
        s.validate(params)?;
        Ok(s)
    }

    /// Scheme in which the government pays the whole premium while capital is below `barrier`.
    pub fn barrier(
        params: &ModelParams,
        kappa: f64,
        theta: f64,
        barrier: f64,
        mapping: PremiumMapping,
    ) -> Result<Self> {
        let (r_ins, x_star_ins) = mapping.apply(params, premium(params, kappa, theta));
        let s = SchemeSpec {
            kind: SchemeKind::BarrierSubsidised,
            kappa,
            theta,
            theta_star: theta,
            barrier,
            r_ins,
            x_star_ins,
        };
        s.validate(params)?;
        Ok(s)
    }

    /// Replace the mapped insured dynamics with explicit values.
    pub fn with_insured_dynamics(
        mut self,
        params: &ModelParams,
        r_ins: f64,
        x_star_ins: f64,
    ) -> Result<Self> {
        self.r_ins = r_ins;
        self.x_star_ins = x_star_ins;
        self.validate(params)?;
        Ok(self)
    }

    pub fn with_barrier(mut self, params: &ModelParams, barrier: f64) -> Result<Self> {
        self.barrier = barrier;
        self.validate(params)?;
        Ok(self)
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.kind == SchemeKind::Uninsured {
            if self.kappa != 1.0 || self.r_ins != params.r || self.x_star_ins != params.x_star {
                return bad(
                    "uninsured scheme must have kappa = 1, r_ins = r, x_star_ins = x_star".into(),
                );
            }
            return Ok(());
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return bad(format!("kappa must lie in [0, 1], got {}", self.kappa));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return bad(format!("theta must be >= 0, got {}", self.theta));
        }
        if !(self.theta_star >= 0.0 && self.theta_star <= self.theta) {
            return bad(format!(
                "theta_star must lie in [0, theta], got {}",
                self.theta_star
            ));
        }
        if !(self.r_ins > 0.0 && self.r_ins <= params.r * (1.0 + 1e-15)) {
            return bad(format!("r_ins must lie in (0, r], got {}", self.r_ins));
        }
        if !(self.x_star_ins >= params.x_star && self.x_star_ins.is_finite()) {
            return bad(format!(
                "x_star_ins must be >= x_star, got {}",
                self.x_star_ins
            ));
        }
        if self.kind == SchemeKind::BarrierSubsidised
            && !(self.barrier >= self.x_star_ins && self.barrier.is_finite())
        {
            return bad(format!(
                "barrier must be finite and >= x_star_ins = {}, got {}",
                self.x_star_ins, self.barrier
            ));
        }
        Ok(())
    }

    /// Capital below which the household is trapped.
    pub fn critical_capital(&self) -> f64 {
        self.x_star_ins
    }

    /// Growth rate of the household's capital (above the barrier, for the barrier scheme).
    pub fn growth_rate(&self) -> f64 {
        self.r_ins
    }

    /// Fraction of each loss the household retains.
    pub fn retained(&self) -> f64 {
        self.kappa
    }

    /// Exponential rate of the retained loss `kappa Z`, infinite when `kappa = 0`.
    pub fn loss_rate(&self, params: &ModelParams) -> f64 {
        params.alpha / self.kappa
    }

    /// Premium paid for the cover at the full market loading.
    pub fn market_premium(&self, params: &ModelParams) -> f64 {
        premium(params, self.kappa, self.theta)
    }

    /// Loading-based subsidy `theta - theta_star`.
    pub fn loading_gap(&self) -> f64 {
        self.theta - self.theta_star
    }

    pub fn check_capital(&self, x: f64) -> Result<()> {
        if !x.is_finite() || x < self.critical_capital() {
            return Err(Error::InvalidInitialCapital {
                x0: x,
                critical: self.critical_capital(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ModelParams {
        ModelParams::new(0.5, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, 1.0, -1.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn premium_examples() {
        let params = p();
        assert_eq!(premium(&params, 1.0, 0.7), 0.0);
        assert_eq!(premium(&params, 0.5, 0.5), 0.75);
        let q = ModelParams::new(0.5, 2.0, 4.0, 1.0).unwrap();
        assert_eq!(premium(&q, 0.0, 0.0), 0.5);
    }

    #[test]
    fn mappings() {
        let params = p();
        let s = SchemeSpec::insured(&params, 0.5, 0.5, PremiumMapping::DriftAbsorption).unwrap();
        assert_eq!(s.r_ins, 0.5);
        assert!((s.x_star_ins - 2.5).abs() < 1e-15);
        let s = SchemeSpec::insured(&params, 0.5, 0.5, PremiumMapping::RateScaling).unwrap();
        assert!((s.r_ins - 0.5 / 1.75).abs() < 1e-15);
        assert_eq!(s.x_star_ins, 1.0);
        assert!((s.loss_rate(&params) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scheme_invariants() {
        let params = p();
        assert!(SchemeSpec::insured(&params, 1.5, 0.5, PremiumMapping::RateScaling).is_err());
        assert!(
            SchemeSpec::subsidised(&params, 0.5, 0.5, 0.6, PremiumMapping::RateScaling).is_err()
        );
        assert!(SchemeSpec::barrier(&params, 0.5, 0.5, 0.5, PremiumMapping::RateScaling).is_err());
        let s = SchemeSpec::insured(&params, 0.5, 0.5, PremiumMapping::RateScaling).unwrap();
        assert!(s.with_insured_dynamics(&params, 0.6, 1.0).is_err());
        assert!(s.with_insured_dynamics(&params, 0.4, 0.9).is_err());
        let u = SchemeSpec::uninsured(&params);
        assert!(u.validate(&params).is_ok());
        assert_eq!(u.critical_capital(), 1.0);
        assert!(u.check_capital(0.99).is_err());
    }

    #[test]
    fn subsidised_uses_reduced_premium() {
        let params = p();
        let s =
            SchemeSpec::subsidised(&params, 0.5, 0.5, 0.0, PremiumMapping::RateScaling).unwrap();
        assert!((s.r_ins - 0.5 / 1.5).abs() < 1e-15);
        assert_eq!(s.loading_gap(), 0.5);
        assert_eq!(s.market_premium(&params), 0.75);
    }
}
