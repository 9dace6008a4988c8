//! Independent numerical oracles shared by the integration tests and the
//! acceptance suite: finite differences, Simpson quadrature and the
//! integro-differential generator of the capital process.
#![allow(dead_code)]

use std::path::PathBuf;

use poverty_trap::cli::{Overrides, RunConfig};

/// Composite Simpson rule on [a, b] with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Simpson on [a, b] split at the given interior points.
pub fn simpson_split(f: impl Fn(f64) -> f64, a: f64, b: f64, cuts: &[f64], n: usize) -> f64 {
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
    pts.push(b);
    pts.windows(2).map(|w| simpson(&f, w[0], w[1], n)).sum()
}

pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn second_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// One regime of the trapping generator at `x`:
/// `rho (x - line) f'(x) - (lambda + delta) f(x) + lambda ∫ f(x - z) beta e^{-beta z} dz
///  + lambda * below * e^{-beta (x - line)} + source`.
///
/// `below` is the value of `f` once capital falls under the line (1 for the
/// trapping transform, 0 for the subsidy value). Returns the residual and the
/// scale `(lambda + delta) |f(x)|` it should be compared with.
#[allow(clippy::too_many_arguments)]
pub fn generator_residual(
    f: &dyn Fn(f64) -> f64,
    x: f64,
    line: f64,
    rho: f64,
    lambda: f64,
    delta: f64,
    beta: f64,
    below: f64,
    source: f64,
    kinks: &[f64],
) -> (f64, f64) {
    let h = 1e-5 * x.abs().max(1.0);
    let fx = f(x);
    let d = central_diff(f, x, h);
    let cuts: Vec<f64> = kinks.iter().map(|k| x - k).collect();
    let integral = simpson_split(|z| f(x - z) * beta * (-beta * z).exp(), 0.0, x - line, &cuts, 600);
    let res = rho * (x - line) * d - (lambda + delta) * fx
        + lambda * integral
        + lambda * below * (-beta * (x - line)).exp()
        + source;
    (res, (lambda + delta) * fx.abs())
}

/// Path of a shipped figure configuration.
pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.cfg"))
}

pub fn load_config(name: &str) -> RunConfig {
    RunConfig::load(&config_path(name), &Overrides::default()).expect("shipped config parses")
}

/// Column of a shipped config by label.
pub fn column<'a>(cfg: &'a RunConfig, label: &str) -> &'a poverty_trap::cli::Column {
    cfg.schemes.iter().find(|c| c.label == label).unwrap_or_else(|| panic!("no column {label}"))
}
