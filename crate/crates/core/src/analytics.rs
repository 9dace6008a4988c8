//! Closed forms for the uninsured and proportionally insured processes:
//! the Laplace transform of the trapping time, the trapping probability and
//! the expected trapping time.
//!
//! Queries on the barrier scheme are forwarded to [`crate::barrier`].

use crate::barrier;
use crate::error::{Error, Result};
use crate::model::{ModelParams, SchemeKind, SchemeSpec};
use crate::specfun::{gamma, gamma_pq, tricomi_u, tricomi_u_dc, upper_inc_gamma, SeriesPolicy};

/// A single evaluation point: parameters, scheme, initial capital and force of interest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrappingQuery {
    pub params: ModelParams,
    pub scheme: SchemeSpec,
    pub x: f64,
    pub delta: f64,
}

impl TrappingQuery {
    pub fn new(params: ModelParams, scheme: SchemeSpec, x: f64, delta: f64) -> Result<Self> {
        params.validate()?;
        scheme.validate(&params)?;
        scheme.check_capital(x)?;
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be >= 0, got {delta}"
            )));
        }
        Ok(TrappingQuery {
            params,
            scheme,
            x,
            delta,
        })
    }

    pub fn uninsured(params: ModelParams, x: f64, delta: f64) -> Result<Self> {
        Self::new(params, SchemeSpec::uninsured(&params), x, delta)
    }

    pub fn with_x(&self, x: f64) -> Result<Self> {
        Self::new(self.params, self.scheme, x, self.delta)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.params, self.scheme, self.x, delta)
    }
}

/// Growth rate, critical capital and loss rate of a single-regime process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub rho: f64,
    pub x_c: f64,
    /// Rate of the retained exponential loss; infinite under full cover.
    pub alpha: f64,
}

impl Regime {
    pub fn of(params: &ModelParams, scheme: &SchemeSpec) -> Self {
        match scheme.kind {
            SchemeKind::Uninsured => Regime {
                rho: params.r,
                x_c: params.x_star,
                alpha: params.alpha,
            },
            _ => Regime {
                rho: scheme.r_ins,
                x_c: scheme.x_star_ins,
                alpha: scheme.loss_rate(params),
            },
        }
    }

    /// `-y(x) = alpha (x - x_c)`.
    pub fn z(&self, x: f64) -> f64 {
        self.alpha * (x - self.x_c)
    }
}

/// `m_delta(x)` of a single-regime process with jump intensity `lambda`, by the
/// Tricomi-function closed form (also at `delta = 0`).
pub(crate) fn laplace_single(
    lambda: f64,
    rg: Regime,
    x: f64,
    delta: f64,
    policy: &SeriesPolicy,
) -> Result<f64> {
    let boundary = lambda / (lambda + delta);
    if x <= rg.x_c {
        return Ok(boundary);
    }
    if rg.alpha.is_infinite() {
        return Ok(0.0);
    }
    let a = 1.0 - lambda / rg.rho;
    let c = 1.0 - (lambda + delta) / rg.rho;
    let z = rg.z(x);
    let u0 = tricomi_u(a, c, 0.0, policy)?;
    let uz = tricomi_u(a, c, z, policy)?;
    Ok(boundary * (-z).exp() * uz / u0)
}

/// `psi(x) = Gamma(lambda/rho; z) / Gamma(lambda/rho)` of a single-regime process.
pub(crate) fn psi_single(lambda: f64, rg: Regime, x: f64) -> Result<f64> {
    if x <= rg.x_c {
        return Ok(1.0);
    }
    if rg.alpha.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_pq(lambda / rg.rho, rg.z(x))?.1)
}

/// Laplace transform `m_delta(x) = E[e^(-delta tau) 1{tau < inf}]` of the trapping time.
/// `delta = 0` returns the trapping probability.
pub fn laplace_trapping(q: &TrappingQuery) -> Result<f64> {
    if q.delta == 0.0 {
        return trapping_probability(q);
    }
    if q.scheme.kind == SchemeKind::BarrierSubsidised {
        return barrier::barrier_laplace(q);
    }
    laplace_single(
        q.params.lambda,
        Regime::of(&q.params, &q.scheme),
        q.x,
        q.delta,
        &SeriesPolicy::default(),
    )
}

/// The Tricomi-function form of `m_delta` evaluated as written, including at
/// `delta = 0` where the second parameter may sit on an integer. Kept as an
/// independent route to the trapping probability.
pub fn laplace_trapping_tricomi(q: &TrappingQuery) -> Result<f64> {
    if q.scheme.kind == SchemeKind::BarrierSubsidised {
        return Err(Error::Unsupported(
            "single-regime form on the barrier scheme".into(),
        ));
    }
    laplace_single(
        q.params.lambda,
        Regime::of(&q.params, &q.scheme),
        q.x,
        q.delta,
        &SeriesPolicy::default(),
    )
}

/// Infinite-horizon trapping probability `psi(x)` (the `delta` of the query is ignored).
pub fn trapping_probability(q: &TrappingQuery) -> Result<f64> {
    if q.scheme.kind == SchemeKind::BarrierSubsidised {
        return barrier::barrier_trapping_probability(&q.params, &q.scheme, q.x);
    }
    psi_single(q.params.lambda, Regime::of(&q.params, &q.scheme), q.x)
}

/// `E[tau 1{tau < inf}]` for a single-regime process with `g = lambda / rho`.
fn expected_time_single(lambda: f64, rg: Regime, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    if rg.alpha.is_infinite() && x > rg.x_c {
        return Ok(0.0);
    }
    let g = lambda / rg.rho;
    if policy.near_integer(g) {
        return Err(Error::IntegerC { c: 1.0 - g });
    }
    let z = if x <= rg.x_c { 0.0 } else { rg.z(x) };
    let a = 1.0 - g;
    let u0 = gamma(g);
    let gz = upper_inc_gamma(g, z)?;
    let dc0 = tricomi_u_dc(a, a, 0.0, policy)?;
    let dcz = tricomi_u_dc(a, a, z, policy)?;
    Ok(gz / (lambda * u0) - gz * dc0 / (rg.rho * u0 * u0) + (-z).exp() * dcz / (rg.rho * u0))
}

/// Expected trapping time `E[tau 1{tau < inf}] = -d m_delta / d delta` at `delta = 0`.
///
/// Fails with `IntegerC` when `lambda / rho` is within the integer guard of an
/// integer; see [`expected_trapping_time_perturbed`].
pub fn expected_trapping_time(q: &TrappingQuery) -> Result<f64> {
    if q.scheme.kind == SchemeKind::BarrierSubsidised {
        return barrier::barrier_expected_trapping_time(q);
    }
    expected_time_single(
        q.params.lambda,
        Regime::of(&q.params, &q.scheme),
        q.x,
        &SeriesPolicy::default(),
    )
}

/// As [`expected_trapping_time`], but when `lambda / rho` sits on an integer the
/// value is the average of the two evaluations with `lambda / rho` moved
/// `5 * integer_guard` to either side. The flag reports whether that happened.
pub fn expected_trapping_time_perturbed(q: &TrappingQuery) -> Result<(f64, bool)> {
    match expected_trapping_time(q) {
        Err(Error::IntegerC { .. }) if q.scheme.kind != SchemeKind::BarrierSubsidised => {
            let policy = SeriesPolicy::default();
            let rg = Regime::of(&q.params, &q.scheme);
            let lambda = q.params.lambda;
            let g = lambda / rg.rho;
            let eps = 5.0 * policy.integer_guard;
            let at = |gg: f64| {
                expected_time_single(
                    lambda,
                    Regime {
                        rho: lambda / gg,
                        ..rg
                    },
                    q.x,
                    &policy,
                )
            };
            Ok((0.5 * (at(g - eps)? + at(g + eps)?), true))
        }
        other => other.map(|v| (v, false)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PremiumMapping;

    fn fig1(alpha: f64) -> ModelParams {
        ModelParams::new(0.5, 1.0, alpha, 1.0).unwrap()
    }

    #[test]
    fn boundary_values() {
        let q = TrappingQuery::uninsured(fig1(1.0), 1.0, 0.125).unwrap();
        assert!((laplace_trapping(&q).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(trapping_probability(&q).unwrap(), 1.0);
        let q0 = q.with_delta(0.0).unwrap();
        assert_eq!(laplace_trapping(&q0).unwrap(), 1.0);
    }

    #[test]
    fn trapping_probability_examples() {
        let p = fig1(1.0);
        let at =
            |x: f64| trapping_probability(&TrappingQuery::uninsured(p, x, 0.0).unwrap()).unwrap();
        assert!((at(2.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-14);
        assert!((at(3.0) - 3.0 * (-2.0f64).exp()).abs() < 1e-14);
        let ins = SchemeSpec::insured(&p, 0.5, 0.5, PremiumMapping::RateScaling)
            .unwrap()
            .with_insured_dynamics(&p, 0.5, 1.0)
            .unwrap();
        let q = TrappingQuery::new(p, ins, 2.0, 0.0).unwrap();
        assert!((trapping_probability(&q).unwrap() - 3.0 * (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn full_cover() {
        let p = fig1(1.0);
        let s = SchemeSpec::insured(&p, 0.0, 0.5, PremiumMapping::RateScaling).unwrap();
        let q = TrappingQuery::new(p, s, 1.5, 0.1).unwrap();
        assert_eq!(trapping_probability(&q).unwrap(), 0.0);
        assert_eq!(laplace_trapping(&q).unwrap(), 0.0);
        assert_eq!(expected_trapping_time(&q).unwrap(), 0.0);
        let at_line = q.with_x(1.0).unwrap();
        assert_eq!(trapping_probability(&at_line).unwrap(), 1.0);
    }

    #[test]
    fn tricomi_route_matches_gamma_route() {
        // lambda / r = 2 puts the second parameter on an integer at delta = 0
        for &alpha in &[0.8, 1.0, 1.5, 2.0] {
            for &x in &[1.0, 1.3, 2.0, 4.5, 9.0] {
                let q = TrappingQuery::uninsured(fig1(alpha), x, 0.0).unwrap();
                let a = laplace_trapping_tricomi(&q).unwrap();
                let b = trapping_probability(&q).unwrap();
                assert!((a - b).abs() < 1e-7, "alpha {alpha} x {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn small_delta_approaches_psi() {
        let q = TrappingQuery::uninsured(fig1(1.0), 2.7, 1e-8).unwrap();
        let m = laplace_trapping(&q).unwrap();
        let psi = trapping_probability(&q).unwrap();
        assert!((m - psi).abs() < 1e-5);
        assert!(m < psi);
    }

    #[test]
    fn expected_time_matches_finite_difference() {
        let p = ModelParams::new(0.05 * 1.013, 1.0, 1.0, 1.0).unwrap();
        for &x in &[1.0, 1.5, 2.0, 3.0] {
            let q = TrappingQuery::uninsured(p, x, 0.0).unwrap();
            let e = expected_trapping_time(&q).unwrap();
            let h = 1e-6;
            let fd = -(laplace_trapping(&q.with_delta(h).unwrap()).unwrap()
                - trapping_probability(&q).unwrap())
                / h;
            assert!(((e - fd) / e).abs() < 1e-4, "x = {x}: {e} vs {fd}");
        }
    }

    #[test]
    fn integer_ratio_needs_perturbation() {
        let p = ModelParams::new(0.05, 1.0, 1.0, 1.0).unwrap();
        let q = TrappingQuery::uninsured(p, 2.0, 0.0).unwrap();
        assert!(matches!(
            expected_trapping_time(&q),
            Err(Error::IntegerC { .. })
        ));
        let (v, perturbed) = expected_trapping_time_perturbed(&q).unwrap();
        assert!(perturbed);
        let h = 1e-6;
        let fd = -(laplace_trapping(&q.with_delta(h).unwrap()).unwrap()
            - trapping_probability(&q).unwrap())
            / h;
        assert!(((v - fd) / v).abs() < 1e-4, "{v} vs {fd}");
    }

    #[test]
    fn expected_time_at_line_is_first_jump_scale() {
        // from x*, trapping happens at the first jump if it traps: E = psi/lambda + ...
        let p = ModelParams::new(0.37, 1.0, 1.0, 1.0).unwrap();
        let q = TrappingQuery::uninsured(p, 1.0, 0.0).unwrap();
        let e = expected_trapping_time(&q).unwrap();
        assert!((e - 1.0).abs() < 1e-9, "{e}");
    }
}
