//! One-shot utilities, conditional expected payoffs and best responses.
//!
//! All rates are in bits per channel use (base-2 logarithms). `x` is the
//! observed SNR and `y` the observed INR, both as linear ratios.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{check_probability, domain, Result};

/// Spectrum action of a player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    /// Transmit only on the pre-assigned half band (theta = 1).
    Fdm,
    /// Spread power evenly over the whole band (theta = 1/2).
    Fs,
}

impl Action {
    /// Fraction of power placed on the player's own sub-band.
    pub fn theta(self) -> f64 {
        match self {
            Action::Fdm => 1.0,
            Action::Fs => 0.5,
        }
    }

    pub fn is_fdm(self) -> bool {
        self == Action::Fdm
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Fdm => "FDM",
            Action::Fs => "FS",
        })
    }
}

/// A private channel observation: SNR and INR of one player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    snr: f64,
    inr: f64,
}

impl ChannelRealization {
    pub fn new(snr: f64, inr: f64) -> Result<Self> {
        if !(snr.is_finite() && snr > 0.0) {
            return domain(format!("snr = {snr} must be positive and finite"));
        }
        if !(inr.is_finite() && inr > 0.0) {
            return domain(format!("inr = {inr} must be positive and finite"));
        }
        Ok(Self { snr, inr })
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn inr(&self) -> f64 {
        self.inr
    }

    /// Interference-to-signal ratio `inr / snr`.
    pub fn isr(&self) -> f64 {
        self.inr / self.snr
    }
}

fn check_xy(x: f64, y: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return domain(format!("snr x = {x} must be positive and finite"));
    }
    if !(y.is_finite() && y >= 0.0) {
        return domain(format!("inr y = {y} must be non-negative and finite"));
    }
    Ok(())
}

#[inline]
fn log2_1p(v: f64) -> f64 {
    v.ln_1p() / std::f64::consts::LN_2
}

/// Table cell without argument checks; callers validate.
#[inline]
pub(crate) fn utility_unchecked(own: Action, other: Action, x: f64, y: f64) -> f64 {
    match (own, other) {
        (Action::Fdm, Action::Fdm) => 0.5 * log2_1p(x),
        (Action::Fdm, Action::Fs) => 0.5 * log2_1p(x / (1.0 + 0.5 * y)),
        (Action::Fs, Action::Fdm) => 0.5 * log2_1p(0.5 * x) + 0.5 * log2_1p(0.5 * x / (1.0 + y)),
        (Action::Fs, Action::Fs) => log2_1p(0.5 * x / (1.0 + 0.5 * y)),
    }
}

/// Rate obtained by a player taking `own` while the opponent takes `other`.
pub fn utility(own: Action, other: Action, x: f64, y: f64) -> Result<f64> {
    check_xy(x, y)?;
    Ok(utility_unchecked(own, other, x, y))
}

#[inline]
pub(crate) fn expected_payoff_unchecked(own: Action, a_other: f64, x: f64, y: f64) -> f64 {
    a_other * utility_unchecked(own, Action::Fdm, x, y)
        + (1.0 - a_other) * utility_unchecked(own, Action::Fs, x, y)
}

/// Conditional expected payoff of `own` when the opponent plays FDM with
/// probability `a_other`.
pub fn expected_payoff(own: Action, a_other: f64, x: f64, y: f64) -> Result<f64> {
    check_xy(x, y)?;
    check_probability("a_other", a_other)?;
    Ok(expected_payoff_unchecked(own, a_other, x, y))
}

#[inline]
pub(crate) fn payoff_gap_unchecked(x: f64, y: f64, a: f64) -> f64 {
    expected_payoff_unchecked(Action::Fdm, a, x, y) - expected_payoff_unchecked(Action::Fs, a, x, y)
}

/// Payoff gap `e(x, y, a)`: expected FDM payoff minus expected FS payoff.
///
/// Positive values favour FDM. The gap is affine in `a`.
pub fn payoff_gap(x: f64, y: f64, a: f64) -> Result<f64> {
    check_xy(x, y)?;
    check_probability("a", a)?;
    Ok(payoff_gap_unchecked(x, y, a))
}

/// High-SNR surrogate of the payoff gap, obtained by dropping the unit
/// terms inside every logarithm. It depends on `(x, y)` only through the
/// ratio `y / x`, and `approx_payoff_gap(x, z * x, a) == indifference(z, a)`.
pub fn approx_payoff_gap(x: f64, y: f64, a: f64) -> Result<f64> {
    check_xy(x, y)?;
    check_probability("a", a)?;
    if y == 0.0 {
        return domain("approximate payoff gap is undefined for inr = 0");
    }
    let r = x / y;
    Ok(0.5 * a * x.log2()
        - 0.5 * a * (0.5 * x).log2()
        - 0.5 * a * log2_1p(0.5 * r)
        - (1.0 - a) * log2_1p(r)
        + 0.5 * (1.0 - a) * log2_1p(2.0 * r))
}

#[inline]
pub(crate) fn exact_best_response_unchecked(x: f64, y: f64, a_other: f64) -> Action {
    if y > 0.5 * x && payoff_gap_unchecked(x, y, a_other) > 0.0 {
        Action::Fdm
    } else {
        Action::Fs
    }
}

/// Exact best response to an opponent playing FDM with probability
/// `a_other`. FDM requires a strictly positive gap and `y / x > 1/2`; ties
/// go to FS.
pub fn exact_best_response(x: f64, y: f64, a_other: f64) -> Result<Action> {
    check_xy(x, y)?;
    check_probability("a_other", a_other)?;
    Ok(exact_best_response_unchecked(x, y, a_other))
}

#[inline]
pub(crate) fn threshold_best_response_unchecked(x: f64, y: f64, isr_cutoff: f64) -> Action {
    if y / x > isr_cutoff {
        Action::Fdm
    } else {
        Action::Fs
    }
}

/// Threshold rule: FDM iff the observed ISR strictly exceeds `isr_cutoff`.
/// An infinite cutoff always yields FS.
pub fn threshold_best_response(x: f64, y: f64, isr_cutoff: f64) -> Result<Action> {
    check_xy(x, y)?;
    if isr_cutoff.is_nan() || isr_cutoff <= 0.0 {
        return domain(format!("isr cutoff {isr_cutoff} must be positive"));
    }
    Ok(threshold_best_response_unchecked(x, y, isr_cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    /// Gap written out in the substituted form `y = z x`, derived
    /// independently of the table cells.
    fn gap_in_isr_form(x: f64, z: f64, a: f64) -> f64 {
        let l = f64::log2;
        0.5 * a * l(x + 1.0)
            - a * (0.5 * l(x / (2.0 * (x * z + 1.0)) + 1.0) + 0.5 * l(x / 2.0 + 1.0))
            - (1.0 - a) * l(x / (x * z + 2.0) + 1.0)
            + 0.5 * (1.0 - a) * l(2.0 * x / (x * z + 2.0) + 1.0)
    }

    fn gap_closed_form(x: f64, y: f64, a: f64) -> f64 {
        let l = f64::log2;
        0.5 * a * (l(1.0 + x) - l(1.0 + x / 2.0) - l(1.0 + (x / 2.0) / (1.0 + y)))
            + (1.0 - a) * (0.5 * l(1.0 + 2.0 * x / (2.0 + y)) - l(1.0 + x / (2.0 + y)))
    }

    #[test]
    fn utility_cells() {
        assert_eq!(utility(Action::Fdm, Action::Fdm, 3.0, 7.0).unwrap(), 1.0);
        let v = utility(Action::Fs, Action::Fs, 1.0, 0.0).unwrap();
        assert!((v - 1.5f64.log2()).abs() < TOL);
        assert!((v - 0.584962500721156).abs() < 1e-12);
        let v = utility(Action::Fs, Action::Fdm, 2.0, 1.0).unwrap();
        assert!((v - 0.792481250360578).abs() < 1e-12);
    }

    #[test]
    fn utility_domain_errors() {
        assert!(utility(Action::Fs, Action::Fs, 0.0, 1.0).is_err());
        assert!(utility(Action::Fs, Action::Fs, -1.0, 1.0).is_err());
        assert!(utility(Action::Fs, Action::Fs, f64::NAN, 1.0).is_err());
        assert!(utility(Action::Fs, Action::Fs, f64::INFINITY, 1.0).is_err());
        assert!(utility(Action::Fs, Action::Fs, 1.0, -0.1).is_err());
    }

    #[test]
    fn expected_payoff_examples() {
        let a0 = expected_payoff(Action::Fdm, 0.0, 2.5, 4.0).unwrap();
        assert_eq!(a0, utility(Action::Fdm, Action::Fs, 2.5, 4.0).unwrap());
        let v = expected_payoff(Action::Fs, 1.0, 2.0, 1.0).unwrap();
        assert!((v - 0.792481250360578).abs() < 1e-12);
        let v = expected_payoff(Action::Fdm, 0.5, 3.0, 3.0).unwrap();
        assert!((v - (0.5 + 0.25 * 2.2f64.log2())).abs() < TOL);
        assert!((v - 0.784376).abs() < 1e-6);
        assert!(expected_payoff(Action::Fdm, 1.5, 3.0, 3.0).is_err());
        assert!(expected_payoff(Action::Fdm, -0.1, 3.0, 3.0).is_err());
    }

    #[test]
    fn payoff_gap_examples() {
        assert!(payoff_gap(2.0, 1.0, 1.0).unwrap().abs() < 1e-15);
        let v = payoff_gap(2.0, 2.0, 1.0).unwrap();
        assert!((v - (3f64.log2() - 1.5)).abs() < TOL);
        assert!((v - 0.084963).abs() < 1e-6);
        assert!(payoff_gap(1.0, 1.0, 0.0).unwrap() < 0.0);
    }

    #[test]
    fn payoff_gap_matches_isr_substituted_form() {
        for &x in &[0.1, 1.0, 3.7, 50.0, 1e4] {
            for &z in &[0.3, 0.5, 1.0, 2.5, 20.0] {
                for &a in &[0.0, 0.2, 0.5, 0.9, 1.0] {
                    let g = payoff_gap(x, z * x, a).unwrap();
                    assert!(
                        (g - gap_in_isr_form(x, z, a)).abs() < 1e-12,
                        "x={x} z={z} a={a}"
                    );
                    assert!((g - gap_closed_form(x, z * x, a)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn approx_gap_examples() {
        assert!(approx_payoff_gap(4.0, 2.0, 1.0).unwrap().abs() < 1e-15);
        let exact = payoff_gap(1e8, 1e8, 0.5).unwrap();
        let approx = approx_payoff_gap(1e8, 1e8, 0.5).unwrap();
        assert!((exact - approx).abs() < 1e-6);
        for &(q, a) in &[(0.7, 0.9), (1.0, 0.5), (3.0, 0.1), (10.0, 0.02)] {
            let approx = approx_payoff_gap(1e8, q * 1e8, a).unwrap();
            let t = crate::threshold::indifference(q, a).unwrap();
            assert!((approx - t).abs() < 1e-6);
        }
        assert!(approx_payoff_gap(1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn exact_best_response_examples() {
        assert_eq!(exact_best_response(4.0, 1.0, 0.9).unwrap(), Action::Fs);
        assert_eq!(exact_best_response(2.0, 3.0, 1.0).unwrap(), Action::Fdm);
        for &(x, y) in &[(1.0, 5.0), (100.0, 1000.0), (1e6, 1e9)] {
            assert_eq!(exact_best_response(x, y, 0.0).unwrap(), Action::Fs);
        }
        // gap exactly zero at (2, 1, 1) and isr = 1/2: both ties go to FS
        assert_eq!(exact_best_response(2.0, 1.0, 1.0).unwrap(), Action::Fs);
    }

    #[test]
    fn threshold_best_response_examples() {
        assert_eq!(threshold_best_response(1.0, 2.0, 1.0).unwrap(), Action::Fdm);
        assert_eq!(
            threshold_best_response(1.0, 2.0, f64::INFINITY).unwrap(),
            Action::Fs
        );
        assert_eq!(threshold_best_response(1.0, 0.5, 0.5).unwrap(), Action::Fs);
        assert!(threshold_best_response(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn action_serde() {
        for a in [Action::Fdm, Action::Fs] {
            let s = serde_json::to_string(&a).unwrap();
            assert_eq!(serde_json::from_str::<Action>(&s).unwrap(), a);
        }
        assert_eq!(serde_json::to_string(&Action::Fdm).unwrap(), "\"fdm\"");
        assert_eq!(Action::Fdm.theta(), 1.0);
        assert_eq!(Action::Fs.theta(), 0.5);
    }

    #[test]
    fn realization_invariants() {
        let r = ChannelRealization::new(4.0, 2.0).unwrap();
        assert_eq!(r.isr(), 0.5);
        assert!(ChannelRealization::new(0.0, 1.0).is_err());
        assert!(ChannelRealization::new(1.0, 0.0).is_err());
        assert!(ChannelRealization::new(1.0, f64::INFINITY).is_err());
    }

    fn xy() -> impl Strategy<Value = (f64, f64)> {
        (-3.0f64..8.0, -3.0f64..8.0).prop_map(|(lx, ly)| (10f64.powf(lx), 10f64.powf(ly)))
    }

    proptest! {
        #[test]
        fn fdm_against_fdm_beats_fdm_against_fs((x, y) in xy()) {
            prop_assert!(utility_unchecked(Action::Fdm, Action::Fdm, x, y)
                > utility_unchecked(Action::Fdm, Action::Fs, x, y));
        }

        #[test]
        fn fs_dominates_fdm_against_fs((x, y) in xy()) {
            prop_assert!(utility_unchecked(Action::Fs, Action::Fs, x, y)
                > utility_unchecked(Action::Fdm, Action::Fs, x, y));
        }

        #[test]
        fn opponent_fdm_never_hurts_fs((x, y) in xy(), a in 0.0f64..=1.0) {
            let fs_fs = utility_unchecked(Action::Fs, Action::Fs, x, y);
            prop_assert!(utility_unchecked(Action::Fs, Action::Fdm, x, y) >= fs_fs);
            prop_assert!(expected_payoff_unchecked(Action::Fs, a, x, y) >= fs_fs - 1e-15);
        }

        #[test]
        fn gap_is_affine_in_a((x, y) in xy(), a in 0.0f64..=1.0) {
            let g0 = payoff_gap_unchecked(x, y, 0.0);
            let g1 = payoff_gap_unchecked(x, y, 1.0);
            let ga = payoff_gap_unchecked(x, y, a);
            prop_assert!((ga - (g0 + a * (g1 - g0))).abs() < 1e-9 * (1.0 + g0.abs() + g1.abs()));
            prop_assert!(g0 < 0.0);
            if y > 0.5 * x {
                prop_assert!(g1 - g0 > 0.0);
            }
        }

        #[test]
        fn region_b_always_fs((x, r) in (1e-3f64..1e8, 0.0f64..=0.5), a in 0.0f64..=1.0) {
            prop_assert_eq!(exact_best_response_unchecked(x, r * x, a), Action::Fs);
        }
    }
}
