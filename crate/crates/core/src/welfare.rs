//! Government outlays: present value of subsidies and the cost of social
//! protection `V(x) + M psi(x)`.

use crate::analytics::{laplace_trapping, trapping_probability, TrappingQuery};
use crate::barrier::{barrier_trapping_probability_with, Matching, TwoRegime, BARRIER_COLLAPSE};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SchemeKind, SchemeSpec};

pub use crate::model::premium;

/// How the loading subsidy `theta - theta_star` turns into a payment rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsidyRateMode {
    /// Pay `theta - theta_star` per unit time.
    #[default]
    PaperLiteral,
    /// Pay the premium difference `(theta - theta_star)(1 - kappa) lambda / alpha`.
    Dimensional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareParams {
    pub delta: f64,
    /// Cost of lifting a trapped household out of poverty.
    pub m_cost: f64,
    pub subsidy_rate_mode: SubsidyRateMode,
    /// Matching condition used for every barrier-scheme quantity.
    pub matching: Matching,
}

impl Default for WelfareParams {
    fn default() -> Self {
        WelfareParams {
            delta: 0.9,
            m_cost: 8.0,
            subsidy_rate_mode: SubsidyRateMode::default(),
            matching: Matching::default(),
        }
    }
}

impl WelfareParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if !(self.m_cost > 0.0 && self.m_cost.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "m_cost must be > 0, got {}",
                self.m_cost
            )));
        }
        Ok(())
    }
}

/// Payment rate of the constant-loading subsidy.
pub fn subsidy_rate(params: &ModelParams, scheme: &SchemeSpec, mode: SubsidyRateMode) -> f64 {
    let gap = scheme.loading_gap();
    match mode {
        SubsidyRateMode::PaperLiteral => gap,
        SubsidyRateMode::Dimensional => gap * (1.0 - scheme.kappa) * params.lambda / params.alpha,
    }
}

/// `V(x) = rate / delta * (1 - m_delta(x))` for the subsidised scheme, where
/// `m_delta` runs on the household's subsidised dynamics.
pub fn subsidy_value_constant(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x: f64,
    w: &WelfareParams,
) -> Result<f64> {
    w.validate()?;
    if scheme.kind != SchemeKind::SubsidisedInsured {
        return Err(Error::Unsupported(format!(
            "constant subsidy value needs the subsidised scheme, got {}",
            scheme.kind.name()
        )));
    }
    let rate = subsidy_rate(params, scheme, w.subsidy_rate_mode);
    if rate == 0.0 {
        scheme.check_capital(x)?;
        return Ok(0.0);
    }
    let m = laplace_trapping(&TrappingQuery::new(*params, *scheme, x, w.delta)?)?;
    Ok(rate / w.delta * (1.0 - m))
}

/// Coefficients of the barrier subsidy value: `R1 M + R2 e^y U + pi/delta`
/// below the barrier and `R4 e^y U` above it (`R3 = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsidyConstants {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

/// Matched constants of the barrier subsidy value in the `M` / `e^y U` basis.
/// Like [`crate::barrier::barrier_constants`] this is singular when
/// `lambda / r` is a positive integer.
pub fn subsidy_constants(
    params: &ModelParams,
    scheme: &SchemeSpec,
    w: &WelfareParams,
) -> Result<SubsidyConstants> {
    w.validate()?;
    let sys = TwoRegime::new(params, scheme, w.delta)?;
    let pi = scheme.market_premium(params);
    let (r1, r2, r4, _, _) = sys.solve(pi / (params.lambda + w.delta), pi, w.matching)?;
    Ok(SubsidyConstants {
        r1,
        r2,
        r3: 0.0,
        r4,
    })
}

/// Present value of premiums paid by the government while capital is below the barrier.
pub fn subsidy_value_barrier(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x: f64,
    w: &WelfareParams,
) -> Result<f64> {
    w.validate()?;
    let sys = TwoRegime::new(params, scheme, w.delta)?;
    scheme.check_capital(x)?;
    let pi = scheme.market_premium(params);
    let at_line = pi / (params.lambda + w.delta);
    if x <= sys.x_a {
        return Ok(at_line);
    }
    if x >= sys.barrier && sys.barrier - sys.x_a <= BARRIER_COLLAPSE {
        return Ok(0.0);
    }
    if sys.beta.is_infinite() {
        // no losses: capital grows to the barrier and never returns
        let t_b = if x >= sys.barrier {
            0.0
        } else {
            ((sys.barrier - sys.x_a) / (x - sys.x_a)).ln() / sys.r_below
        };
        return Ok(pi / w.delta * (-(-w.delta * t_b).exp_m1()));
    }
    let particular = pi / w.delta;
    let coef = sys.solve_regular(at_line, pi, w.matching)?;
    sys.eval_regular(coef, particular, x)
}

/// Present value of subsidies paid under `scheme` (zero for schemes without one).
pub fn subsidy_value(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x: f64,
    w: &WelfareParams,
) -> Result<f64> {
    match scheme.kind {
        SchemeKind::Uninsured | SchemeKind::Insured => {
            w.validate()?;
            scheme.check_capital(x)?;
            Ok(0.0)
        }
        SchemeKind::SubsidisedInsured => subsidy_value_constant(params, scheme, x, w),
        SchemeKind::BarrierSubsidised => subsidy_value_barrier(params, scheme, x, w),
    }
}

/// `V(x) + M psi(x)` for the given scheme.
pub fn cost_of_social_protection(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x: f64,
    w: &WelfareParams,
) -> Result<f64> {
    let v = subsidy_value(params, scheme, x, w)?;
    let psi = match scheme.kind {
        SchemeKind::BarrierSubsidised => {
            barrier_trapping_probability_with(params, scheme, x, w.matching)?
        }
        _ => trapping_probability(&TrappingQuery::new(*params, *scheme, x, 0.0)?)?,
    };
    Ok(v + w.m_cost * psi)
}
