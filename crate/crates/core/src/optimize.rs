//! Optimal subsidised loading and optimal barrier, and grid sweeps over schemes.

use rayon::prelude::*;

use crate::analytics::{
    expected_trapping_time_perturbed, laplace_trapping, trapping_probability, TrappingQuery,
};
use crate::barrier::{
    barrier_expected_trapping_time_with, barrier_laplace_with, barrier_trapping_probability_with,
    Matching,
};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PremiumMapping, SchemeKind, SchemeSpec};
use crate::welfare::{cost_of_social_protection, subsidy_value, WelfareParams};

/// Bisection settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
    /// Growth factor for widening a bracket; the built-in problems have fixed
    /// brackets and do not use it.
    pub bracket_expansion: f64,
}

impl RootConfig {
    /// Defaults for the loading problem.
    pub fn for_theta() -> Self {
        RootConfig {
            abs_tol: 1e-12,
            max_iter: 200,
            bracket_expansion: 2.0,
        }
    }

    /// Defaults for the barrier problem at critical capital `x_star`.
    pub fn for_barrier(x_star: f64) -> Self {
        RootConfig {
            abs_tol: 1e-12 * x_star.abs().max(1.0),
            max_iter: 200,
            bracket_expansion: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || self.max_iter < 1 || !(self.bracket_expansion > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "root config needs abs_tol > 0, max_iter >= 1, bracket_expansion > 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for RootConfig {
    fn default() -> Self {
        Self::for_theta()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Interior root of the defining equation.
    Root,
    /// Subsidising the whole loading still leaves the household worse off than uninsured.
    AllSubsidyInsufficient,
    /// The household is better off insured at the full loading.
    NoSubsidyNeeded,
    /// The household is better off paying premiums from the critical capital up.
    NoBarrierNeeded,
    /// Even the largest barrier leaves the household worse off than uninsured.
    BarrierInsufficient,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Root => "Root",
            Verdict::AllSubsidyInsufficient => "AllSubsidyInsufficient",
            Verdict::NoSubsidyNeeded => "NoSubsidyNeeded",
            Verdict::NoBarrierNeeded => "NoBarrierNeeded",
            Verdict::BarrierInsufficient => "BarrierInsufficient",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    /// `theta*` or `B*`; for the two "insufficient" verdicts the end of the
    /// range that comes closest (`0` or `b_max`).
    pub value: f64,
    pub verdict: Verdict,
    /// Defining-equation residual at `value`.
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection for a sign change of `f` on `[lo, hi]` with `f(lo)` and `f(hi)` of
/// opposite signs (or zero). Returns the endpoint with the smaller residual.
fn bisect(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    cfg: &RootConfig,
) -> Result<(f64, f64, usize)> {
    let mut it = 0;
    while hi - lo > cfg.abs_tol && it < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        it += 1;
        if fm == 0.0 {
            return Ok((mid, 0.0, it));
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    Ok(if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo, it)
    } else {
        (hi, f_hi, it)
    })
}

fn uninsured_psi(params: &ModelParams, x: f64) -> Result<f64> {
    trapping_probability(&TrappingQuery::uninsured(*params, x, 0.0)?)
}

/// Smallest household loading `theta*` in `[0, theta]` at which the subsidised
/// household is no worse off than the uninsured one.
pub fn optimal_theta(
    params: &ModelParams,
    kappa: f64,
    theta: f64,
    mapping: PremiumMapping,
    x: f64,
    cfg: &RootConfig,
) -> Result<Optimum> {
    cfg.validate()?;
    let target = uninsured_psi(params, x)?;
    let f = |t: f64| -> Result<f64> {
        let s = SchemeSpec::subsidised(params, kappa, theta, t, mapping)?;
        Ok(trapping_probability(&TrappingQuery::new(*params, s, x, 0.0)?)? - target)
    };
    let end = |t: f64| {
        f(t).map_err(|e| {
            Error::BracketFailure(format!("loading {t} not evaluable at x = {x}: {e}"))
        })
    };
    let f0 = end(0.0)?;
    let f1 = end(theta)?;
    if f0 > f1 {
        return Err(Error::MonotonicityViolation { lo: f0, hi: f1 });
    }
    if f0 > 0.0 {
        return Ok(Optimum {
            value: 0.0,
            verdict: Verdict::AllSubsidyInsufficient,
            residual: f0,
            iterations: 0,
        });
    }
    if f1 <= 0.0 {
        return Ok(Optimum {
            value: theta,
            verdict: Verdict::NoSubsidyNeeded,
            residual: f1,
            iterations: 0,
        });
    }
    let (value, residual, iterations) = bisect(f, 0.0, theta, f0, f1, cfg)?;
    Ok(Optimum {
        value,
        verdict: Verdict::Root,
        residual,
        iterations,
    })
}

/// Default upper end of the barrier search: beyond it the trapping probability
/// no longer depends on the barrier to working precision.
pub fn default_b_max(params: &ModelParams, scheme: &SchemeSpec) -> f64 {
    scheme.x_star_ins + 60.0 / scheme.loss_rate(params)
}

/// Barrier `B*` in `[x_A, b_max]` at which the household under the barrier
/// scheme is exactly as likely to be trapped as the uninsured one. `template`
/// supplies every field but the barrier.
pub fn optimal_barrier(
    params: &ModelParams,
    template: &SchemeSpec,
    x: f64,
    b_max: Option<f64>,
    cfg: &RootConfig,
    matching: Matching,
) -> Result<Optimum> {
    cfg.validate()?;
    if template.kind != SchemeKind::BarrierSubsidised {
        return Err(Error::Unsupported(format!(
            "optimal barrier needs a barrier scheme, got {}",
            template.kind.name()
        )));
    }
    let x_a = template.x_star_ins;
    template.check_capital(x)?;
    let b_max = b_max.unwrap_or_else(|| default_b_max(params, template));
    if !(b_max >= x_a && b_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "b_max must be >= {x_a}, got {b_max}"
        )));
    }
    let target = uninsured_psi(params, x)?;
    let g = |b: f64| -> Result<f64> {
        let s = template.with_barrier(params, b)?;
        Ok(barrier_trapping_probability_with(params, &s, x, matching)? - target)
    };
    let end = |b: f64| {
        g(b).map_err(|e| {
            Error::BracketFailure(format!("barrier {b} not evaluable at x = {x}: {e}"))
        })
    };
    let g0 = end(x_a)?;
    if g0 <= 0.0 {
        return Ok(Optimum {
            value: x_a,
            verdict: Verdict::NoBarrierNeeded,
            residual: g0,
            iterations: 0,
        });
    }
    let g1 = end(b_max)?;
    if g1 > g0 {
        return Err(Error::MonotonicityViolation { lo: g0, hi: g1 });
    }
    if g1 > 0.0 {
        return Ok(Optimum {
            value: b_max,
            verdict: Verdict::BarrierInsufficient,
            residual: g1,
            iterations: 0,
        });
    }
    let (value, residual, iterations) = bisect(g, x_a, b_max, g0, g1, cfg)?;
    Ok(Optimum {
        value,
        verdict: Verdict::Root,
        residual,
        iterations,
    })
}

/// Quantity tabulated by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    TrappingProbability,
    Laplace { delta: f64 },
    ExpectedTime,
    SubsidyValue,
    Cost,
    OptimalTheta,
    OptimalBarrier,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::TrappingProbability => "psi",
            Quantity::Laplace { .. } => "laplace",
            Quantity::ExpectedTime => "expected_time",
            Quantity::SubsidyValue => "subsidy_value",
            Quantity::Cost => "cost",
            Quantity::OptimalTheta => "theta_star",
            Quantity::OptimalBarrier => "barrier_star",
        }
    }
}

/// Settings shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepContext {
    pub welfare: WelfareParams,
    pub mapping: PremiumMapping,
    pub matching: Matching,
    /// Overrides the per-problem root defaults when set.
    pub root: Option<RootConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellError {
    pub x: f64,
    pub column: String,
    pub error: Error,
}

/// Values of one quantity per scheme (columns) per capital level (rows).
/// Failed cells are `None` and listed in `errors`, in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub x: Vec<f64>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
    pub errors: Vec<CellError>,
}

/// Evaluate `quantity` for one scheme at one capital level.
pub fn evaluate(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x: f64,
    quantity: Quantity,
    ctx: &SweepContext,
) -> Result<f64> {
    let barrier = scheme.kind == SchemeKind::BarrierSubsidised;
    match quantity {
        Quantity::TrappingProbability if barrier => {
            barrier_trapping_probability_with(params, scheme, x, ctx.matching)
        }
        Quantity::TrappingProbability => {
            trapping_probability(&TrappingQuery::new(*params, *scheme, x, 0.0)?)
        }
        Quantity::Laplace { delta } => {
            let q = TrappingQuery::new(*params, *scheme, x, delta)?;
            if barrier {
                barrier_laplace_with(&q, ctx.matching)
            } else {
                laplace_trapping(&q)
            }
        }
        Quantity::ExpectedTime => {
            let q = TrappingQuery::new(*params, *scheme, x, 0.0)?;
            if barrier {
                barrier_expected_trapping_time_with(&q, ctx.matching)
            } else {
                Ok(expected_trapping_time_perturbed(&q)?.0)
            }
        }
        Quantity::SubsidyValue => subsidy_value(
            params,
            scheme,
            x,
            &WelfareParams {
                matching: ctx.matching,
                ..ctx.welfare
            },
        ),
        Quantity::Cost => cost_of_social_protection(
            params,
            scheme,
            x,
            &WelfareParams {
                matching: ctx.matching,
                ..ctx.welfare
            },
        ),
        Quantity::OptimalTheta => {
            let cfg = ctx.root.unwrap_or_else(RootConfig::for_theta);
            Ok(optimal_theta(params, scheme.kappa, scheme.theta, ctx.mapping, x, &cfg)?.value)
        }
        Quantity::OptimalBarrier => {
            let cfg = ctx
                .root
                .unwrap_or_else(|| RootConfig::for_barrier(params.x_star));
            Ok(optimal_barrier(params, scheme, x, None, &cfg, ctx.matching)?.value)
        }
    }
}

/// Tabulate `quantity` for each labelled scheme over `x_grid`. Cells are
/// evaluated in parallel; errors never abort the sweep.
pub fn sweep(
    params: &ModelParams,
    schemes: &[(String, SchemeSpec)],
    x_grid: &[f64],
    quantity: Quantity,
    ctx: &SweepContext,
) -> Result<SweepTable> {
    params.validate()?;
    if schemes.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one scheme".into(),
        ));
    }
    if x_grid.is_empty() || x_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "x grid must be non-empty and strictly ascending".into(),
        ));
    }
    let ncol = schemes.len();
    let cells: Vec<Result<f64>> = (0..x_grid.len() * ncol)
        .into_par_iter()
        .map(|k| {
            evaluate(
                params,
                &schemes[k % ncol].1,
                x_grid[k / ncol],
                quantity,
                ctx,
            )
        })
        .collect();
    let mut values = vec![vec![None; ncol]; x_grid.len()];
    let mut errors = Vec::new();
    for (k, cell) in cells.into_iter().enumerate() {
        let (i, j) = (k / ncol, k % ncol);
        match cell {
            Ok(v) => values[i][j] = Some(v),
            Err(error) => errors.push(CellError {
                x: x_grid[i],
                column: schemes[j].0.clone(),
                error,
            }),
        }
    }
    Ok(SweepTable {
        x: x_grid.to_vec(),
        columns: schemes.iter().map(|s| s.0.clone()).collect(),
        values,
        errors,
    })
}
