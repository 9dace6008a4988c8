use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const S_MAX: f64 = 6.5;
const MAX_LEVEL: u32 = 9;
const PRUNE: f64 = 45.0;

/// `int_0^inf f(t) dt` by the exp-sinh substitution `t = exp(pi/2 sinh s)`.
///
/// `ln_f(t, ln t)` returns `(ln |f(t)|, sign f(t))`; the result comes back the
/// same way so very large or very small integrals do not overflow.
pub(crate) fn exp_sinh<F>(ln_f: F, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let node = |s: f64| -> (f64, f64) {
        let u = FRAC_PI_2 * s.sinh();
        let (lf, sign) = ln_f(u.exp(), u);
        let lw = lf + u + (FRAC_PI_2 * s.cosh()).ln();
        if lw.is_nan() {
            (f64::NEG_INFINITY, 0.0)
        } else {
            (lw, sign)
        }
    };

    let mut h = 0.5;
    let k_max = (S_MAX / h) as i64;
    let mut nodes: Vec<(f64, f64)> = (-k_max..=k_max).map(|k| node(k as f64 * h)).collect();
    // refine only where the weighted integrand is within e^-PRUNE of its peak
    let peak = nodes.iter().map(|n| n.0).fold(f64::NEG_INFINITY, f64::max);
    let live: Vec<i64> = (-k_max..=k_max)
        .filter(|k| nodes[(k + k_max) as usize].0 > peak - PRUNE)
        .collect();
    let (s_lo, s_hi) = match (live.first(), live.last()) {
        (Some(&lo), Some(&hi)) => ((lo - 1) as f64 * h, (hi + 1) as f64 * h),
        _ => return Ok((f64::NEG_INFINITY, 0.0)),
    };
    let mut prev = weighted_sum(&nodes, h);
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let k_max = (S_MAX / h) as i64;
        nodes.extend(
            (-k_max..=k_max)
                .filter(|k| k % 2 != 0)
                .map(|k| k as f64 * h)
                .filter(|s| *s > s_lo && *s < s_hi)
                .map(node),
        );
        let cur = weighted_sum(&nodes, h);
        let rel = (1.0 - prev.1 * cur.1 * (prev.0 - cur.0).exp()).abs();
        // the error roughly squares from one level to the next
        if level >= 3 && (rel <= rel_tol || rel * rel <= 1e-4 * rel_tol) {
            return Ok(cur);
        }
        if level == MAX_LEVEL {
            if rel <= 1e-10 {
                return Ok(cur);
            }
            return Err(Error::NonConvergence {
                what: "exp-sinh quadrature",
                terms: nodes.len(),
            });
        }
        prev = cur;
    }
    unreachable!()
}

fn weighted_sum(nodes: &[(f64, f64)], h: f64) -> (f64, f64) {
    let max = nodes.iter().map(|n| n.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    let s: f64 = nodes.iter().map(|&(l, sg)| sg * (l - max).exp()).sum();
    (max + s.abs().ln() + h.ln(), s.signum())
}
