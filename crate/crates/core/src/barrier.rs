//! Closed forms for the barrier scheme: the government pays the whole
//! premium while capital is below the barrier `B`, so the household grows
//! at rate `r` below `B` and at the insured rate above it, with the same
//! critical capital in both regimes.

use crate::analytics::{psi_single, Regime, TrappingQuery};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SchemeKind, SchemeSpec};
use crate::specfun::{gamma_pq, kummer_m, ln_gamma, ln_upper_inc_gamma, tricomi_u, SeriesPolicy};

/// Barriers closer than this to the critical capital are treated as absent.
pub const BARRIER_COLLAPSE: f64 = 1e-9;

/// Condition used to join the two regimes at the barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Matching {
    /// Value and first derivative continuous at `B`. Satisfies the
    /// integro-differential equation above `B` only when the two regimes share
    /// the same drift and payoff.
    SmoothPasting,
    /// Value continuous and the generator continuous across `B`:
    /// `r (B - x_A) f'(B-) + s_below = r_ins (B - x_A) f'(B+) + s_above`, where
    /// `s` is the running payoff rate (zero for the transform, the premium for
    /// the subsidy value below the barrier).
    #[default]
    FluxContinuity,
}

impl Matching {
    /// Ratio `m'(B-) / m'(B+)` imposed at the barrier.
    fn slope_ratio(&self, r_below: f64, r_above: f64) -> f64 {
        match self {
            Matching::SmoothPasting => 1.0,
            Matching::FluxContinuity => r_above / r_below,
        }
    }

    /// Offset `j` in `f'(B-) = ratio f'(B+) - j` from a payoff rate paid below `B` only.
    fn slope_offset(&self, source: f64, r_below: f64, gap: f64) -> f64 {
        match self {
            Matching::SmoothPasting => 0.0,
            Matching::FluxContinuity => source / (r_below * gap),
        }
    }
}

/// Coefficients of the matched two-regime transform
/// `C1 M + C2 e^y U` below `B` and `C3 M + C4 e^y U` above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierConstants {
    pub c1: f64,
    pub c2: f64,
    /// Always zero: the growing solution is excluded above the barrier.
    pub c3: f64,
    pub c4: f64,
    /// Log-derivative of the upper solution at `B`, shifted by the loss rate.
    pub d_term: f64,
    /// Determinant of the matching system.
    pub k_term: f64,
}

/// The two-regime equation at a fixed force of interest.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TwoRegime {
    pub lambda: f64,
    pub r_below: f64,
    pub r_above: f64,
    pub x_a: f64,
    pub barrier: f64,
    pub beta: f64,
    pub delta: f64,
    pub policy: SeriesPolicy,
}

/// Homogeneous solutions and their x-derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Basis {
    pub p: f64,
    pub dp: f64,
    pub q: f64,
    pub dq: f64,
}

impl TwoRegime {
    pub fn new(params: &ModelParams, scheme: &SchemeSpec, delta: f64) -> Result<Self> {
        if scheme.kind != SchemeKind::BarrierSubsidised {
            return Err(Error::Unsupported(format!(
                "barrier formulas need the barrier scheme, got {}",
                scheme.kind.name()
            )));
        }
        scheme.validate(params)?;
        Ok(TwoRegime {
            lambda: params.lambda,
            r_below: params.r,
            r_above: scheme.r_ins,
            x_a: scheme.x_star_ins,
            barrier: scheme.barrier,
            beta: scheme.loss_rate(params),
            delta,
            policy: SeriesPolicy::default(),
        })
    }

    fn params_for(&self, rho: f64) -> (f64, f64) {
        (
            1.0 - self.lambda / rho,
            1.0 - (self.lambda + self.delta) / rho,
        )
    }

    /// `M(-delta/rho, c; y)` and `e^y U(1 - lambda/rho, c; -y)` with derivatives in x.
    pub fn basis(&self, rho: f64, x: f64) -> Result<Basis> {
        let (b, c) = self.params_for(rho);
        let am = c - b;
        let z = self.beta * (x - self.x_a);
        let y = -z;
        let p = kummer_m(am, c, y, &self.policy)?;
        let dp = -self.beta * am / c * kummer_m(am + 1.0, c + 1.0, y, &self.policy)?;
        let u = tricomi_u(b, c, z, &self.policy)?;
        let u1 = tricomi_u(b + 1.0, c + 1.0, z, &self.policy)?;
        let ey = y.exp();
        Ok(Basis {
            p,
            dp,
            q: ey * u,
            dq: -self.beta * ey * (u + b * u1),
        })
    }

    /// `z^(1-c) M(lambda/rho, 2-c; -z)` with its x-derivative: the solution that
    /// vanishes at the critical capital. Unlike the `M` solution it stays
    /// independent of the `U` solution when `lambda/rho` is an integer.
    pub fn regular(&self, rho: f64, x: f64) -> Result<(f64, f64)> {
        let (b, c) = self.params_for(rho);
        let g = 1.0 - b;
        let z = self.beta * (x - self.x_a);
        if z <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let m0 = kummer_m(g, 2.0 - c, -z, &self.policy)?;
        let m1 = kummer_m(g + 1.0, 3.0 - c, -z, &self.policy)?;
        let zc = z.powf(-c);
        let s = z * zc * m0;
        let ds = self.beta * zc * ((1.0 - c) * m0 - z * g / (2.0 - c) * m1);
        Ok((s, ds))
    }

    /// Coefficients `(a, b, upper)` of `a S + b Q + source / delta` below `B` and
    /// `upper R` above it, with `S` from [`Self::regular`], `Q` and `R` the
    /// decaying solutions of the two regimes.
    pub fn solve_regular(
        &self,
        boundary: f64,
        source: f64,
        matching: Matching,
    ) -> Result<(f64, f64, f64)> {
        let particular = if source == 0.0 {
            0.0
        } else {
            source / self.delta
        };
        let j = matching.slope_offset(source, self.r_below, self.barrier - self.x_a);
        let (s, ds) = self.regular(self.r_below, self.barrier)?;
        let lo = self.basis_decaying(self.r_below, self.barrier)?;
        let hi = self.basis_decaying(self.r_above, self.barrier)?;
        let g = matching.slope_ratio(self.r_below, self.r_above) * hi.1 / hi.0;
        let b_coef = (boundary - particular) / self.u_at_line()?;
        let den = ds - g * s;
        if !(den.abs() > 1e-12 * (ds.abs() + (g * s).abs())) {
            return Err(Error::SingularMatching { k: den });
        }
        let a_coef = (g * (b_coef * lo.0 + particular) - b_coef * lo.1 - j) / den;
        let upper = (a_coef * s + b_coef * lo.0 + particular) / hi.0;
        Ok((a_coef, b_coef, upper))
    }

    /// `e^y U(1 - lambda/rho, c; -y)` and its x-derivative.
    pub fn basis_decaying(&self, rho: f64, x: f64) -> Result<(f64, f64)> {
        let (b, c) = self.params_for(rho);
        let z = self.beta * (x - self.x_a);
        let u = tricomi_u(b, c, z, &self.policy)?;
        let u1 = tricomi_u(b + 1.0, c + 1.0, z, &self.policy)?;
        let ey = (-z).exp();
        Ok((ey * u, -self.beta * ey * (u + b * u1)))
    }

    /// Value at `x` of the matched solution from [`Self::solve_regular`].
    pub fn eval_regular(&self, coef: (f64, f64, f64), particular: f64, x: f64) -> Result<f64> {
        if x <= self.barrier {
            let (s, _) = self.regular(self.r_below, x)?;
            let (q, _) = self.basis_decaying(self.r_below, x)?;
            Ok(coef.0 * s + coef.1 * q + particular)
        } else {
            Ok(coef.2 * self.basis_decaying(self.r_above, x)?.0)
        }
    }

    /// `U(1 - lambda/r, 1 - (lambda+delta)/r; 0)`, the decaying solution at the critical capital.
    pub fn u_at_line(&self) -> Result<f64> {
        let (b, c) = self.params_for(self.r_below);
        tricomi_u(b, c, 0.0, &self.policy)
    }

    /// Below-barrier coefficients `(A, B)` of `A M + B e^y U + particular` and the
    /// upper coefficient, for a solution with value `boundary` at the critical
    /// capital, payoff rate `source` below `B` (so `particular = source / delta`)
    /// and none above.
    pub fn solve(
        &self,
        boundary: f64,
        source: f64,
        matching: Matching,
    ) -> Result<(f64, f64, f64, f64, f64)> {
        let particular = if source == 0.0 {
            0.0
        } else {
            source / self.delta
        };
        let j = matching.slope_offset(source, self.r_below, self.barrier - self.x_a);
        let lo = self.basis(self.r_below, self.barrier)?;
        let hi = self.basis(self.r_above, self.barrier)?;
        let u10 = self.u_at_line()?;
        let g = matching.slope_ratio(self.r_below, self.r_above) * hi.dq / hi.q;
        let l = boundary - particular;
        let den = lo.dq - g * lo.q - u10 * (lo.dp - g * lo.p);
        let scale = lo.dq.abs() + (g * lo.q).abs() + (u10 * lo.dp).abs() + (u10 * g * lo.p).abs();
        if !(den.abs() > 1e-12 * scale) {
            return Err(Error::SingularMatching { k: den });
        }
        let b_coef = (l * (g * lo.p - lo.dp) + g * particular - j) / den;
        let a_coef = l - b_coef * u10;
        let upper = (a_coef * lo.p + b_coef * lo.q + particular) / hi.q;
        Ok((a_coef, b_coef, upper, hi.dq / hi.q + self.beta, -den))
    }
}

fn check_delta_positive(delta: f64) -> Result<()> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "barrier transform constants need delta > 0, got {delta}"
        )));
    }
    Ok(())
}

/// Matched constants of the barrier transform at force of interest `delta > 0`,
/// in the `M` / `e^y U` basis. When `lambda / r` is a positive integer the two
/// lower solutions coincide up to a factor and this fails with
/// `SingularMatching`; the transform itself is still available through
/// [`barrier_laplace`], which uses a basis that stays independent.
pub fn barrier_constants(
    params: &ModelParams,
    scheme: &SchemeSpec,
    delta: f64,
) -> Result<BarrierConstants> {
    barrier_constants_with(params, scheme, delta, Matching::default())
}

pub fn barrier_constants_with(
    params: &ModelParams,
    scheme: &SchemeSpec,
    delta: f64,
    matching: Matching,
) -> Result<BarrierConstants> {
    check_delta_positive(delta)?;
    let sys = TwoRegime::new(params, scheme, delta)?;
    let boundary = params.lambda / (params.lambda + delta);
    let (c1, c2, c4, d_term, k_term) = sys.solve(boundary, 0.0, matching)?;
    Ok(BarrierConstants {
        c1,
        c2,
        c3: 0.0,
        c4,
        d_term,
        k_term,
    })
}

fn insured_regime(params: &ModelParams, scheme: &SchemeSpec) -> Regime {
    Regime {
        rho: scheme.r_ins,
        x_c: scheme.x_star_ins,
        alpha: scheme.loss_rate(params),
    }
}

/// Laplace transform of the trapping time under the barrier scheme.
pub fn barrier_laplace(q: &TrappingQuery) -> Result<f64> {
    barrier_laplace_with(q, Matching::default())
}

pub fn barrier_laplace_with(q: &TrappingQuery, matching: Matching) -> Result<f64> {
    if q.delta == 0.0 {
        return barrier_trapping_probability_with(&q.params, &q.scheme, q.x, matching);
    }
    let sys = TwoRegime::new(&q.params, &q.scheme, q.delta)?;
    let boundary = q.params.lambda / (q.params.lambda + q.delta);
    if q.x <= sys.x_a {
        return Ok(boundary);
    }
    if sys.beta.is_infinite() {
        return Ok(0.0);
    }
    if sys.barrier - sys.x_a <= BARRIER_COLLAPSE {
        return crate::analytics::laplace_single(
            q.params.lambda,
            insured_regime(&q.params, &q.scheme),
            q.x,
            q.delta,
            &sys.policy,
        );
    }
    let coef = sys.solve_regular(boundary, 0.0, matching)?;
    sys.eval_regular(coef, 0.0, q.x)
}

/// `ln P(a, z)` of the regularised lower incomplete gamma.
fn ln_lower_reg(a: f64, z: f64) -> Result<f64> {
    let (p, q) = gamma_pq(a, z)?;
    Ok(if z < a + 1.0 { p.ln() } else { (-q).ln_1p() })
}

/// Trapping probability under the barrier scheme.
pub fn barrier_trapping_probability(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x: f64,
) -> Result<f64> {
    barrier_trapping_probability_with(params, scheme, x, Matching::default())
}

pub fn barrier_trapping_probability_with(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x: f64,
    matching: Matching,
) -> Result<f64> {
    let sys = TwoRegime::new(params, scheme, 0.0)?;
    scheme.check_capital(x)?;
    if x <= sys.x_a {
        return Ok(1.0);
    }
    if sys.beta.is_infinite() {
        return Ok(0.0);
    }
    if sys.barrier - sys.x_a <= BARRIER_COLLAPSE {
        return psi_single(params.lambda, insured_regime(params, scheme), x);
    }
    let ga = params.lambda / sys.r_below;
    let gs = params.lambda / sys.r_above;
    let zb = sys.beta * (sys.barrier - sys.x_a);
    let z = sys.beta * (x - sys.x_a);
    let ln_w = params.lambda * (1.0 / sys.r_below - 1.0 / sys.r_above) * zb.ln();
    let ln_phi = matching.slope_ratio(sys.r_below, sys.r_above).ln();
    // Delta = w Gamma(gs; zB) + phi (Gamma(ga) - Gamma(ga; zB)), in logs
    let t_above = ln_w + ln_upper_inc_gamma(gs, zb)?;
    let t_below = ln_phi + ln_gamma(ga) + ln_lower_reg(ga, zb)?;
    let hi = t_above.max(t_below);
    let ln_delta = hi + ((t_above - hi).exp() + (t_below - hi).exp()).ln();
    if x <= sys.barrier {
        let t = ln_phi + ln_gamma(ga) + ln_lower_reg(ga, z)?;
        Ok(-(t - ln_delta).exp_m1())
    } else {
        Ok((ln_w + ln_upper_inc_gamma(gs, z)? - ln_delta).exp())
    }
}

/// Step in `delta` for the Richardson-extrapolated derivative of the transform.
const DELTA_STEP: f64 = 1e-4;

/// Expected trapping time under the barrier scheme, `-d m_delta/d delta` at zero,
/// by Richardson extrapolation of one-sided differences in `delta`.
pub fn barrier_expected_trapping_time(q: &TrappingQuery) -> Result<f64> {
    barrier_expected_trapping_time_with(q, Matching::default())
}

pub fn barrier_expected_trapping_time_with(q: &TrappingQuery, matching: Matching) -> Result<f64> {
    let psi = barrier_trapping_probability_with(&q.params, &q.scheme, q.x, matching)?;
    let slope = |h: f64| -> Result<f64> {
        Ok((barrier_laplace_with(&q.with_delta(h)?, matching)? - psi) / h)
    };
    let h = DELTA_STEP;
    Ok(-(2.0 * slope(h)? - slope(2.0 * h)?))
}
