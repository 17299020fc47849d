//! Log-gamma and the regularized incomplete gamma and beta functions, with
//! domain errors mapped into this crate's error type.

use statrs::function::{beta, gamma};

use crate::error::{Error, Result};

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn check_gamma(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) || x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "incomplete gamma needs s > 0, x >= 0 (s={s}, x={x})"
        )));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(s, x)`.
pub fn gamma_p(s: f64, x: f64) -> Result<f64> {
    check_gamma(s, x)?;
    if x.is_infinite() {
        return Ok(1.0);
    }
    gamma::checked_gamma_lr(s, x)
        .map_err(|e| Error::Numeric(format!("incomplete gamma (s={s}, x={x}): {e}")))
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`.
pub fn gamma_q(s: f64, x: f64) -> Result<f64> {
    check_gamma(s, x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    gamma::checked_gamma_ur(s, x)
        .map_err(|e| Error::Numeric(format!("incomplete gamma (s={s}, x={x}): {e}")))
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "incomplete beta needs a, b > 0 (a={a}, b={b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "incomplete beta needs x in [0, 1], got {x}"
        )));
    }
    beta::checked_beta_reg(a, b, x)
        .map(|v| v.clamp(0.0, 1.0))
        .map_err(|e| Error::Numeric(format!("incomplete beta (a={a}, b={b}, x={x}): {e}")))
}

/// Complement `1 - I_x(a, b)`.
pub fn beta_inc_complement(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "incomplete beta needs x in [0, 1], got {x}"
        )));
    }
    beta_inc(b, a, 1.0 - x)
}
