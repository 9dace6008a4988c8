use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use super::{ModelParams, SchemeKind, SchemeSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    pub t_max: f64,
    pub seed: u64,
    /// Paths whose capital exceeds this level are declared never trapped.
    pub escape_level: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_paths: 100_000,
            t_max: 200.0,
            seed: 1,
            escape_level: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::InvalidParameter("n_paths must be >= 1".into()));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be > 0, got {}",
                self.t_max
            )));
        }
        if let Some(e) = self.escape_level {
            if !(e > params.x_star) {
                return Err(Error::InvalidParameter(format!(
                    "escape_level must exceed x_star, got {e}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub trapped: bool,
    /// Trapping time, present only when `trapped`.
    pub tau: Option<f64>,
    pub discounted_subsidy: f64,
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_paths: usize,
    pub truncated_fraction: f64,
}

impl MCEstimate {
    /// Standardised distance of `value` from the estimate.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = self.mean - value;
        if self.std_err > 0.0 {
            d / self.std_err
        } else if d.abs() <= 1e-12 * value.abs().max(1.0) {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }
}

/// `int_a^b e^(-delta s) ds`.
fn discounted(delta: f64, a: f64, b: f64) -> f64 {
    if delta == 0.0 {
        b - a
    } else {
        ((-delta * a).exp() - (-delta * b).exp()) / delta
    }
}

fn grow(x: f64, xc: f64, rho: f64, dt: f64) -> f64 {
    xc + (x - xc) * (rho * dt).exp()
}

/// Deterministic flow of capital `x` over a jump-free interval of length `dt`.
///
/// Returns the end capital and the time spent below the barrier (zero for
/// schemes without one).
pub fn evolve(params: &ModelParams, scheme: &SchemeSpec, x: f64, dt: f64) -> (f64, f64) {
    let xc = scheme.critical_capital();
    if scheme.kind != SchemeKind::BarrierSubsidised {
        return (grow(x, xc, scheme.growth_rate(), dt), 0.0);
    }
    let b = scheme.barrier;
    if x >= b {
        return (grow(x, xc, scheme.r_ins, dt), 0.0);
    }
    if x <= xc {
        return (x, dt);
    }
    let t_cross = ((b - xc) / (x - xc)).ln() / params.r;
    if t_cross >= dt {
        (grow(x, xc, params.r, dt), dt)
    } else {
        (grow(b, xc, scheme.r_ins, dt - t_cross), t_cross)
    }
}

/// Simulate one capital path from `x0`.
///
/// `subsidy_rate` is the government payment rate: paid for life by the
/// subsidised scheme and only below the barrier by the barrier scheme.
pub fn simulate_path<R: Rng + ?Sized>(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x0: f64,
    delta: f64,
    subsidy_rate: f64,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<PathOutcome> {
    scheme.check_capital(x0)?;
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be >= 0, got {delta}"
        )));
    }
    let xc = scheme.critical_capital();
    let arrivals = Exp::new(params.lambda).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let losses = Exp::new(params.alpha).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let lifelong = scheme.kind == SchemeKind::SubsidisedInsured;
    let barrier = scheme.kind == SchemeKind::BarrierSubsidised;

    let mut t = 0.0;
    let mut x = x0;
    let mut subsidy = 0.0;
    loop {
        let t_next = t + arrivals.sample(rng);
        let t_end = t_next.min(cfg.t_max);
        let (x_end, below) = evolve(params, scheme, x, t_end - t);
        if lifelong {
            subsidy += subsidy_rate * discounted(delta, t, t_end);
        } else if barrier && below > 0.0 {
            subsidy += subsidy_rate * discounted(delta, t, t + below);
        }
        x = x_end;
        if t_next >= cfg.t_max {
            if lifelong && delta > 0.0 {
                subsidy += subsidy_rate * (-delta * cfg.t_max).exp() / delta;
            }
            return Ok(PathOutcome {
                trapped: false,
                tau: None,
                discounted_subsidy: subsidy,
                truncated: true,
            });
        }
        t = t_next;
        x -= scheme.retained() * losses.sample(rng);
        if x < xc {
            return Ok(PathOutcome {
                trapped: true,
                tau: Some(t),
                discounted_subsidy: subsidy,
                truncated: false,
            });
        }
        if let Some(level) = cfg.escape_level {
            if x > level {
                if lifelong && delta > 0.0 {
                    subsidy += subsidy_rate * (-delta * t).exp() / delta;
                }
                return Ok(PathOutcome {
                    trapped: false,
                    tau: None,
                    discounted_subsidy: subsidy,
                    truncated: false,
                });
            }
        }
    }
}

/// Per-path generator keyed by `(seed, path_index)`, independent of scheduling.
fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run_paths(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x0: f64,
    delta: f64,
    subsidy_rate: f64,
    cfg: &SimConfig,
) -> Result<Vec<PathOutcome>> {
    params.validate()?;
    scheme.validate(params)?;
    cfg.validate(params)?;
    scheme.check_capital(x0)?;
    (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            simulate_path(
                params,
                scheme,
                x0,
                delta,
                subsidy_rate,
                cfg,
                &mut path_rng(cfg.seed, i),
            )
        })
        .collect()
}

fn summarise(outcomes: &[PathOutcome], f: impl Fn(&PathOutcome) -> f64) -> MCEstimate {
    let n = outcomes.len();
    let nf = n as f64;
    let mean = outcomes.iter().map(&f).sum::<f64>() / nf;
    let var = if n > 1 {
        outcomes.iter().map(|o| (f(o) - mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let truncated = outcomes.iter().filter(|o| o.truncated).count() as f64 / nf;
    MCEstimate {
        mean,
        std_err: (var / nf).sqrt(),
        n_paths: n,
        truncated_fraction: truncated,
    }
}

/// Fraction of paths trapped before the horizon; truncated paths count as survivors.
pub fn estimate_trapping_probability(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x0: f64,
    cfg: &SimConfig,
) -> Result<MCEstimate> {
    let out = run_paths(params, scheme, x0, 0.0, 0.0, cfg)?;
    Ok(summarise(&out, |o| if o.trapped { 1.0 } else { 0.0 }))
}

/// Mean of `e^(-delta tau) 1{trapped}`.
pub fn estimate_laplace(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x0: f64,
    delta: f64,
    cfg: &SimConfig,
) -> Result<MCEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be > 0, got {delta}"
        )));
    }
    let out = run_paths(params, scheme, x0, delta, 0.0, cfg)?;
    Ok(summarise(&out, |o| {
        o.tau.map_or(0.0, |t| (-delta * t).exp())
    }))
}

/// Mean of `tau 1{trapped}`, the defective expectation of the trapping time.
pub fn estimate_expected_trapping_time(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x0: f64,
    cfg: &SimConfig,
) -> Result<MCEstimate> {
    let out = run_paths(params, scheme, x0, 0.0, 0.0, cfg)?;
    Ok(summarise(&out, |o| o.tau.unwrap_or(0.0)))
}

/// Mean discounted subsidy paid along the path at rate `subsidy_rate`.
pub fn estimate_subsidy_value(
    params: &ModelParams,
    scheme: &SchemeSpec,
    x0: f64,
    delta: f64,
    subsidy_rate: f64,
    cfg: &SimConfig,
) -> Result<MCEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be > 0, got {delta}"
        )));
    }
    if !matches!(
        scheme.kind,
        SchemeKind::SubsidisedInsured | SchemeKind::BarrierSubsidised
    ) {
        return Err(Error::Unsupported(format!(
            "{} scheme pays no subsidy",
            scheme.kind.name()
        )));
    }
    let out = run_paths(params, scheme, x0, delta, subsidy_rate, cfg)?;
    Ok(summarise(&out, |o| o.discounted_subsidy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PremiumMapping;

    fn p() -> ModelParams {
        ModelParams::new(0.5, 1.0, 1.0, 1.0).unwrap()
    }

    fn cfg(n: usize) -> SimConfig {
        SimConfig {
            n_paths: n,
            t_max: 200.0,
            seed: 7,
            escape_level: None,
        }
    }

    #[test]
    fn rejects_capital_below_line() {
        let params = p();
        let s = SchemeSpec::uninsured(&params);
        let mut rng = path_rng(1, 0);
        let r = simulate_path(&params, &s, 0.5, 0.0, 0.0, &cfg(1), &mut rng);
        assert!(matches!(r, Err(Error::InvalidInitialCapital { .. })));
    }

    #[test]
    fn at_the_line_first_loss_traps() {
        let params = p();
        let s = SchemeSpec::uninsured(&params);
        let est = estimate_trapping_probability(&params, &s, 1.0, &cfg(2000)).unwrap();
        assert_eq!(est.mean, 1.0);
        let t = estimate_expected_trapping_time(&params, &s, 1.0, &cfg(20_000)).unwrap();
        assert!((t.mean - 1.0).abs() < 4.0 * t.std_err);
    }

    #[test]
    fn full_cover_never_traps() {
        let params = p();
        let s = SchemeSpec::insured(&params, 0.0, 0.5, PremiumMapping::RateScaling).unwrap();
        let c = SimConfig {
            t_max: 20.0,
            ..cfg(500)
        };
        let est = estimate_trapping_probability(&params, &s, 1.2, &c).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.truncated_fraction, 1.0);
        let t = estimate_expected_trapping_time(&params, &s, 1.2, &c).unwrap();
        assert_eq!(t.mean, 0.0);
    }

    #[test]
    fn flow_splits_exactly() {
        let params = p();
        let b = SchemeSpec::barrier(&params, 0.5, 0.5, 2.0, PremiumMapping::RateScaling).unwrap();
        for s in [SchemeSpec::uninsured(&params), b] {
            for &x in &[1.0, 1.3, 1.9, 2.0, 3.5] {
                let (whole, _) = evolve(&params, &s, x, 1.7);
                let (mid, _) = evolve(&params, &s, x, 0.6);
                let (split, _) = evolve(&params, &s, mid, 1.1);
                assert!(
                    (whole - split).abs() <= 1e-12 * whole.abs(),
                    "x = {x}: {whole} vs {split}"
                );
            }
        }
    }

    #[test]
    fn barrier_crossing_time() {
        let params = p();
        let s = SchemeSpec::barrier(&params, 0.5, 0.5, 2.0, PremiumMapping::RateScaling).unwrap();
        // from 1.5 with x_c = 1 and r = 0.5 the barrier is reached at 2 ln 2
        let t_cross = 2.0 * 2f64.ln();
        let (x, below) = evolve(&params, &s, 1.5, 10.0);
        assert!((below - t_cross).abs() < 1e-14);
        let want = 1.0 + (10.0 - t_cross) * 0.0 + ((s.r_ins * (10.0 - t_cross)).exp());
        assert!((x - want).abs() < 1e-12 * want);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let params = p();
        let s = SchemeSpec::uninsured(&params);
        let c = cfg(3000);
        let a = estimate_laplace(&params, &s, 2.0, 0.1, &c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| estimate_laplace(&params, &s, 2.0, 0.1, &c).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn barrier_at_critical_capital_matches_insured_paths() {
        let params = p();
        let ins = SchemeSpec::insured(&params, 0.5, 0.5, PremiumMapping::RateScaling).unwrap();
        let bar = SchemeSpec::barrier(
            &params,
            0.5,
            0.5,
            ins.x_star_ins,
            PremiumMapping::RateScaling,
        )
        .unwrap();
        let c = cfg(1);
        for i in 0..200 {
            let a = simulate_path(&params, &ins, 1.7, 0.0, 0.0, &c, &mut path_rng(3, i)).unwrap();
            let b = simulate_path(&params, &bar, 1.7, 0.0, 0.0, &c, &mut path_rng(3, i)).unwrap();
            assert_eq!(a.tau, b.tau);
            assert_eq!(b.discounted_subsidy, 0.0);
        }
    }

    #[test]
    fn zero_subsidy_rate_gives_zero() {
        let params = p();
        let s =
            SchemeSpec::subsidised(&params, 0.5, 0.5, 0.5, PremiumMapping::RateScaling).unwrap();
        let est =
            estimate_subsidy_value(&params, &s, 2.0, 0.9, s.loading_gap(), &cfg(500)).unwrap();
        assert_eq!(est.mean, 0.0);
        let u = SchemeSpec::uninsured(&params);
        assert!(matches!(
            estimate_subsidy_value(&params, &u, 2.0, 0.9, 1.0, &cfg(10)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn z_score_conventions() {
        let e = MCEstimate {
            mean: 1.0,
            std_err: 0.0,
            n_paths: 10,
            truncated_fraction: 0.0,
        };
        assert_eq!(e.z_score(1.0), 0.0);
        assert!(e.z_score(0.5).is_infinite());
        let e = MCEstimate { std_err: 0.25, ..e };
        assert_eq!(e.z_score(0.5), 2.0);
    }
}
