//! Squared channel-gain laws and the induced ISR distribution.
//!
//! `X = power_scale * |H_ii|^2` is the SNR, `Y = power_scale * |H_ij|^2` the
//! INR and `Z = Y / X` the ISR. The ISR law does not depend on
//! `power_scale`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_half_line, QuadOptions};
use crate::special::{beta_inc, gamma_p, gamma_q, ln_beta, ln_gamma};

pub const MIN_NAKAGAMI_M: f64 = 0.5;
pub const MAX_RICIAN_K: f64 = 1e3;
/// Poisson mixture weights below this are dropped.
const RICIAN_WEIGHT_FLOOR: f64 = 1e-18;

/// Absolute tolerance of every quadrature-backed ISR evaluation.
pub const ISR_QUAD_TOL: f64 = 1e-8;

/// Law of one squared channel gain, parameterized by its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum GainDistribution {
    /// Exponential squared gain.
    Rayleigh { mean: f64 },
    /// Gamma squared gain with shape `m`.
    Nakagami { mean: f64, m: f64 },
    /// Non-central chi-square squared gain with line-of-sight to scatter
    /// power ratio `k`.
    Rician { mean: f64, k: f64 },
}

impl GainDistribution {
    pub fn rayleigh(mean: f64) -> Result<Self> {
        let d = GainDistribution::Rayleigh { mean };
        d.validate()?;
        Ok(d)
    }

    pub fn nakagami(m: f64, mean: f64) -> Result<Self> {
        let d = GainDistribution::Nakagami { mean, m };
        d.validate()?;
        Ok(d)
    }

    pub fn rician(k: f64, mean: f64) -> Result<Self> {
        let d = GainDistribution::Rician { mean, k };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let mean = self.mean();
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean {mean} must be positive and finite"
            )));
        }
        match *self {
            GainDistribution::Rayleigh { .. } => Ok(()),
            GainDistribution::Nakagami { m, .. } => {
                if !(m.is_finite() && m >= MIN_NAKAGAMI_M) {
                    return Err(Error::InvalidParameter(format!(
                        "nakagami m = {m} must be finite and >= {MIN_NAKAGAMI_M}"
                    )));
                }
                Ok(())
            }
            GainDistribution::Rician { k, .. } => {
                if !(0.0..=MAX_RICIAN_K).contains(&k) {
                    return Err(Error::InvalidParameter(format!(
                        "rician k = {k} must lie in [0, {MAX_RICIAN_K}]"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            GainDistribution::Rayleigh { mean }
            | GainDistribution::Nakagami { mean, .. }
            | GainDistribution::Rician { mean, .. } => mean,
        }
    }

    pub fn with_mean(self, mean: f64) -> Self {
        match self {
            GainDistribution::Rayleigh { .. } => GainDistribution::Rayleigh { mean },
            GainDistribution::Nakagami { m, .. } => GainDistribution::Nakagami { mean, m },
            GainDistribution::Rician { k, .. } => GainDistribution::Rician { mean, k },
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            GainDistribution::Rayleigh { .. } => "rayleigh",
            GainDistribution::Nakagami { .. } => "nakagami",
            GainDistribution::Rician { .. } => "rician",
        }
    }

    /// Gamma shape when the squared gain is gamma distributed.
    pub fn gamma_shape(&self) -> Option<f64> {
        match *self {
            GainDistribution::Rayleigh { .. } => Some(1.0),
            GainDistribution::Nakagami { m, .. } => Some(m),
            GainDistribution::Rician { .. } => None,
        }
    }

    /// Whether the density stays bounded near zero.
    fn bounded_density(&self) -> bool {
        self.gamma_shape().is_none_or(|m| m >= 1.0)
    }

    /// Gamma mixture `(weight, shape, scale)` of the squared gain.
    fn gamma_components(&self) -> Vec<(f64, f64, f64)> {
        match *self {
            GainDistribution::Rician { mean, k } => {
                let theta = mean / (k + 1.0);
                Self::rician_terms(k).map(|(w, s)| (w, s, theta)).collect()
            }
            _ => {
                let m = self.gamma_shape().expect("gamma family");
                vec![(1.0, m, self.mean() / m)]
            }
        }
    }

    /// Poisson-mixture terms `(weight, gamma shape)` of a Rician squared
    /// gain; all shapes share the scale `mean / (k + 1)`.
    fn rician_terms(k: f64) -> impl Iterator<Item = (f64, f64)> {
        let spread = 12.0 * k.sqrt() + 12.0;
        let lo = (k - spread).floor().max(0.0) as u64;
        let hi = (k + spread).ceil() as u64;
        (lo..=hi).filter_map(move |j| {
            let jf = j as f64;
            let w = if k == 0.0 {
                if j == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-k + jf * k.ln() - ln_gamma(jf + 1.0)).exp()
            };
            (w > RICIAN_WEIGHT_FLOOR).then_some((w, jf + 1.0))
        })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(1.0);
        }
        match *self {
            GainDistribution::Rician { mean, k } => {
                let theta = mean / (k + 1.0);
                let mut acc = 0.0;
                for (w, s) in Self::rician_terms(k) {
                    acc += w * gamma_p(s, x / theta)?;
                }
                Ok(acc.clamp(0.0, 1.0))
            }
            _ => {
                let m = self.gamma_shape().expect("gamma family");
                gamma_p(m, x * m / self.mean())
            }
        }
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(1.0);
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        match *self {
            GainDistribution::Rician { mean, k } => {
                let theta = mean / (k + 1.0);
                let mut acc = 0.0;
                for (w, s) in Self::rician_terms(k) {
                    acc += w * gamma_q(s, x / theta)?;
                }
                Ok(acc.clamp(0.0, 1.0))
            }
            _ => {
                let m = self.gamma_shape().expect("gamma family");
                gamma_q(m, x * m / self.mean())
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || x.is_infinite() {
            return 0.0;
        }
        let gamma_pdf = |shape: f64, theta: f64| {
            ((shape - 1.0) * x.ln() - x / theta - ln_gamma(shape) - shape * theta.ln()).exp()
        };
        match *self {
            GainDistribution::Rician { mean, k } => {
                let theta = mean / (k + 1.0);
                Self::rician_terms(k)
                    .map(|(w, s)| w * gamma_pdf(s, theta))
                    .sum()
            }
            _ => {
                let m = self.gamma_shape().expect("gamma family");
                gamma_pdf(m, self.mean() / m)
            }
        }
    }

    /// One draw of the squared gain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            GainDistribution::Rayleigh { mean } => {
                let e: f64 = Exp1.sample(rng);
                mean * e
            }
            GainDistribution::Nakagami { mean, m } => Gamma::new(m, mean / m)
                .expect("validated shape")
                .sample(rng),
            GainDistribution::Rician { mean, k } => {
                let los = (k / (k + 1.0) * mean).sqrt();
                let sigma = (0.5 * mean / (k + 1.0)).sqrt();
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let i = los + sigma * re;
                let q = sigma * im;
                i * i + q * q
            }
        }
    }
}

/// One player's channel statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerModel {
    /// Direct-link squared gain; induces the SNR.
    pub direct: GainDistribution,
    /// Cross-link squared gain; induces the INR.
    pub cross: GainDistribution,
    /// Transmit power over noise power, multiplying both gains.
    pub power_scale: f64,
}

/// Closed form behind the ISR law of a model pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsrRoute {
    /// Both gains gamma distributed: a single incomplete beta.
    IncompleteBeta,
    /// A Rician gain on either link: a Poisson mixture of incomplete betas.
    BetaMixture,
}

impl PlayerModel {
    pub fn new(
        direct: GainDistribution,
        cross: GainDistribution,
        power_scale: f64,
    ) -> Result<Self> {
        let p = Self {
            direct,
            cross,
            power_scale,
        };
        p.validate()?;
        Ok(p)
    }

    /// Rayleigh on both links with unit direct mean and the given mean ISR.
    pub fn rayleigh(isr_bar: f64, power_scale: f64) -> Result<Self> {
        Self::new(
            GainDistribution::rayleigh(1.0)?,
            GainDistribution::rayleigh(isr_bar)?,
            power_scale,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.direct.validate()?;
        self.cross.validate()?;
        if !(self.power_scale.is_finite() && self.power_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "power scale {} must be positive and finite",
                self.power_scale
            )));
        }
        Ok(())
    }

    pub fn with_power_scale(self, power_scale: f64) -> Self {
        Self {
            power_scale,
            ..self
        }
    }

    /// `E[Y] / E[X]`.
    pub fn isr_bar(&self) -> f64 {
        self.cross.mean() / self.direct.mean()
    }

    pub fn mean_snr(&self) -> f64 {
        self.power_scale * self.direct.mean()
    }

    pub fn mean_inr(&self) -> f64 {
        self.power_scale * self.cross.mean()
    }

    /// Draws one private observation `(snr, inr)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let x = self.power_scale * self.direct.sample(rng);
        let y = self.power_scale * self.cross.sample(rng);
        (x, y)
    }

    pub fn isr_route(&self) -> IsrRoute {
        match (self.direct.gamma_shape(), self.cross.gamma_shape()) {
            (Some(_), Some(_)) => IsrRoute::IncompleteBeta,
            _ => IsrRoute::BetaMixture,
        }
    }

    /// Pairs `(weight, cross shape, direct shape, scale ratio)` such that
    /// `Z` is the `weight` mixture of `ratio * B'(cross shape, direct shape)`
    /// with `B'` the beta-prime law.
    fn beta_prime_terms(&self) -> Vec<(f64, f64, f64, f64)> {
        let xs = self.direct.gamma_components();
        let ys = self.cross.gamma_components();
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &(wx, sx, tx) in &xs {
            for &(wy, sy, ty) in &ys {
                let w = wx * wy;
                if w > RICIAN_WEIGHT_FLOOR {
                    out.push((w, sy, sx, ty / tx));
                }
            }
        }
        out
    }

    fn check_z(z: f64) -> Result<()> {
        if z.is_nan() || z < 0.0 {
            return domain(format!("isr z = {z} must be non-negative"));
        }
        Ok(())
    }

    /// `F_Z(z) = P(Y / X <= z)`.
    pub fn isr_cdf(&self, z: f64) -> Result<f64> {
        Self::check_z(z)?;
        if z == 0.0 {
            return Ok(0.0);
        }
        if z.is_infinite() {
            return Ok(1.0);
        }
        let mut acc = 0.0;
        for (w, a, b, ratio) in self.beta_prime_terms() {
            // P(ratio * B' <= z) = I_u(a, b), u = z / (z + ratio)
            acc += w * beta_inc(a, b, z / (z + ratio))?;
        }
        Ok(acc.clamp(0.0, 1.0))
    }

    /// `1 - F_Z(z)`, accurate in the far tail.
    pub fn isr_sf(&self, z: f64) -> Result<f64> {
        Self::check_z(z)?;
        if z == 0.0 {
            return Ok(1.0);
        }
        if z.is_infinite() {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for (w, a, b, ratio) in self.beta_prime_terms() {
            // 1 - I_u(a, b) = I_{1-u}(b, a)
            acc += w * beta_inc(b, a, ratio / (z + ratio))?;
        }
        Ok(acc.clamp(0.0, 1.0))
    }

    /// `F_Z(z)` by adaptive quadrature regardless of the model pair.
    pub fn isr_cdf_quadrature(&self, z: f64) -> Result<f64> {
        Self::check_z(z)?;
        if z == 0.0 {
            return Ok(0.0);
        }
        let (x, y) = (self.direct, self.cross);
        let opts = QuadOptions {
            abs_tol: ISR_QUAD_TOL,
            ..QuadOptions::default()
        };
        let v = if x.bounded_density() || !y.bounded_density() {
            // P(Y <= z X) = int F_Y(z x) f_X(x) dx
            integrate_half_line(
                |s| x.pdf(s) * y.cdf(z * s).unwrap_or(f64::NAN),
                x.mean(),
                opts,
            )?
            .value
        } else {
            // P(Y <= z X) = 1 - int F_X(y / z) f_Y(y) dy
            1.0 - integrate_half_line(
                |s| y.pdf(s) * x.cdf(s / z).unwrap_or(f64::NAN),
                y.mean(),
                opts,
            )?
            .value
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// `1 - F_Z(z)` by adaptive quadrature, tightened to relative accuracy
    /// when the tail is small.
    pub fn isr_sf_quadrature(&self, z: f64) -> Result<f64> {
        Self::check_z(z)?;
        if z == 0.0 {
            return Ok(1.0);
        }
        let (x, y) = (self.direct, self.cross);
        let run = |tol: f64| -> Result<f64> {
            let opts = QuadOptions {
                abs_tol: tol,
                ..QuadOptions::default()
            };
            let v = if x.bounded_density() || !y.bounded_density() {
                // P(Y > z X) = int S_Y(z x) f_X(x) dx
                integrate_half_line(
                    |s| x.pdf(s) * y.sf(z * s).unwrap_or(f64::NAN),
                    x.mean(),
                    opts,
                )?
                .value
            } else {
                // P(X < Y / z) = int F_X(y / z) f_Y(y) dy
                integrate_half_line(
                    |s| y.pdf(s) * x.cdf(s / z).unwrap_or(f64::NAN),
                    y.mean(),
                    opts,
                )?
                .value
            };
            Ok(v.clamp(0.0, 1.0))
        };
        let v = run(ISR_QUAD_TOL)?;
        if v < 1e-4 {
            return run((v * 1e-6).max(1e-300));
        }
        Ok(v)
    }

    /// ISR density `f_Z(z)`.
    pub fn isr_pdf(&self, z: f64) -> Result<f64> {
        if !(z.is_finite() && z > 0.0) {
            return domain(format!("isr density needs z > 0, got {z}"));
        }
        let mut acc = 0.0;
        for (w, a, b, ratio) in self.beta_prime_terms() {
            let r = z / ratio;
            let ln_f = (a - 1.0) * r.ln() - (a + b) * r.ln_1p() - ln_beta(a, b) - ratio.ln();
            acc += w * ln_f.exp();
        }
        Ok(acc)
    }

    /// `f_Z(z) = int x f_Y(z x) f_X(x) dx`, or the equivalent integral over
    /// the cross gain when the direct density is unbounded at zero.
    pub fn isr_pdf_quadrature(&self, z: f64) -> Result<f64> {
        if !(z.is_finite() && z > 0.0) {
            return domain(format!("isr density needs z > 0, got {z}"));
        }
        let (x, y) = (self.direct, self.cross);
        let opts = QuadOptions {
            abs_tol: ISR_QUAD_TOL,
            ..QuadOptions::default()
        };
        let v = if x.bounded_density() || !y.bounded_density() {
            integrate_half_line(|s| s * x.pdf(s) * y.pdf(z * s), x.mean(), opts)?.value
        } else {
            integrate_half_line(|s| s / (z * z) * y.pdf(s) * x.pdf(s / z), y.mean(), opts)?.value
        };
        Ok(v.max(0.0))
    }
}

/// Heavy-tail existence test `lim f_Z(b) b^2 log b = inf`, decided
/// analytically from the direct link alone.
pub fn tail_condition(player: &PlayerModel) -> bool {
    match player.direct {
        GainDistribution::Rayleigh { .. } => true,
        GainDistribution::Nakagami { m, .. } => m <= 1.0,
        // positive density at zero gives f_Z(b) ~ c / b^2
        GainDistribution::Rician { .. } => true,
    }
}
