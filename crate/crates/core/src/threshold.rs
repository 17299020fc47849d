//! The ISR threshold `q(a)` of the approximate best response.
//!
//! `q(a)` is the root in `z` of the limiting indifference function
//! `t(z, a) = lim_{x -> inf} e(x, z x, a)`. It is strictly decreasing on
//! `(0, 1]`, equals `1/2` at `a = 1`, `1` at `a = 1/2`, and diverges as
//! `a -> 0`; `a = 0` maps to an infinite threshold.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, domain, Error, Result};

/// Lower end of the ISR range on which FDM can ever be a best response.
pub const MIN_THRESHOLD: f64 = 0.5;

const BRACKET_START: f64 = 4.0;
const BRACKET_CAP: f64 = 1e12;
const DERIVATIVE_STEP: f64 = 1e-6;

#[inline]
pub(crate) fn indifference_unchecked(z: f64, a: f64) -> f64 {
    // ((1-a)/2) [log2(1 + 2/z) - 2 log2(1 + 1/z)] folded into one log1p
    let inv = 1.0 / (z + 1.0);
    (0.5 * a - 0.5 * a * (0.5 / z).ln_1p() / std::f64::consts::LN_2)
        + 0.5 * (1.0 - a) * (-inv * inv).ln_1p() / std::f64::consts::LN_2
}

/// Limiting payoff gap `t(z, a)` at ISR `z` when the opponent plays FDM with
/// probability `a`.
pub fn indifference(z: f64, a: f64) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return domain(format!("isr z = {z} must be positive and finite"));
    }
    check_probability("a", a)?;
    Ok(indifference_unchecked(z, a))
}

/// Result of solving for `q(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSolution {
    /// Threshold value; `f64::INFINITY` when no finite root exists.
    pub q: f64,
    /// `|t(q, a)|` at the returned root (0 for the infinite sentinel).
    pub residual: f64,
    pub iterations: u32,
}

/// Solves `t(z, a) = 0` for `z` in `[1/2, inf)`.
///
/// The bracket starts at `[1/2, 4]` and the upper end doubles until a sign
/// change appears or it passes `1e12`, in which case the infinite sentinel is
/// returned. Bisection then runs to machine resolution, well inside the
/// `1e-10` absolute (relative above 1) tolerance.
pub fn solve_q(a: f64) -> Result<ThresholdSolution> {
    check_probability("a", a)?;
    if a == 0.0 {
        return Ok(ThresholdSolution {
            q: f64::INFINITY,
            residual: 0.0,
            iterations: 0,
        });
    }
    let mut lo = MIN_THRESHOLD;
    if indifference_unchecked(lo, a) >= 0.0 {
        // only reached at a = 1, where t(1/2, 1) = 0 exactly
        return Ok(ThresholdSolution {
            q: lo,
            residual: indifference_unchecked(lo, a).abs(),
            iterations: 0,
        });
    }
    let mut hi = BRACKET_START;
    let mut iterations = 0u32;
    while indifference_unchecked(hi, a) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if hi > BRACKET_CAP {
            return Ok(ThresholdSolution {
                q: f64::INFINITY,
                residual: 0.0,
                iterations,
            });
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iterations > 400 {
            break;
        }
        iterations += 1;
        if indifference_unchecked(mid, a) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let f_lo = indifference_unchecked(lo, a).abs();
    let f_hi = indifference_unchecked(hi, a).abs();
    let (q, residual) = if f_lo <= f_hi { (lo, f_lo) } else { (hi, f_hi) };
    Ok(ThresholdSolution {
        q,
        residual,
        iterations,
    })
}

/// Convenience wrapper returning only the threshold value.
pub fn q_of(a: f64) -> Result<f64> {
    solve_q(a).map(|s| s.q)
}

/// Slope `q'(a)` via the implicit function theorem, both partial
/// derivatives of `t` taken by central differences.
pub fn q_derivative(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return domain(format!(
            "q'(a) needs a in the open interval (0, 1), got {a}"
        ));
    }
    let q = q_of(a)?;
    if !q.is_finite() {
        return domain(format!("q({a}) is infinite; derivative undefined"));
    }
    let h = DERIVATIVE_STEP;
    let dt_da = (indifference_unchecked(q, a + h) - indifference_unchecked(q, a - h)) / (2.0 * h);
    let dt_dz = (indifference_unchecked(q + h, a) - indifference_unchecked(q - h, a)) / (2.0 * h);
    if dt_dz == 0.0 {
        return Err(Error::Numeric(format!(
            "flat indifference curve at a = {a}"
        )));
    }
    Ok(-dt_da / dt_dz)
}

/// One tabulated node of `q(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdNode {
    pub a: f64,
    #[serde(with = "crate::serde_inf")]
    pub q: f64,
}

/// `q(a)` sampled on an increasing grid of `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    nodes: Vec<ThresholdNode>,
}

impl ThresholdCurve {
    pub fn nodes(&self) -> &[ThresholdNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Evenly spaced table of `q(a)` on `[a_min, a_max]`.
///
/// When `a_min == a_max` the grid collapses to one node regardless of
/// `steps`; otherwise `steps >= 2` nodes are produced.
pub fn tabulate(a_min: f64, a_max: f64, steps: usize) -> Result<ThresholdCurve> {
    if !(a_min > 0.0 && a_min <= a_max && a_max <= 1.0) {
        return domain(format!(
            "need 0 < a_min <= a_max <= 1, got [{a_min}, {a_max}]"
        ));
    }
    if steps == 0 {
        return domain("steps must be at least 1");
    }
    if a_min == a_max {
        let q = q_of(a_min)?;
        return Ok(ThresholdCurve {
            nodes: vec![ThresholdNode { a: a_min, q }],
        });
    }
    if steps < 2 {
        return domain("a distinct range needs at least 2 steps");
    }
    let span = a_max - a_min;
    let nodes = (0..steps)
        .map(|k| {
            let a = if k + 1 == steps {
                a_max
            } else {
                a_min + span * k as f64 / (steps - 1) as f64
            };
            q_of(a).map(|q| ThresholdNode { a, q })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve { nodes })
}
