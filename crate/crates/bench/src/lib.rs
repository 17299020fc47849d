//! Shared fixtures for the benchmarks.

use isrgame_core::{GainDistribution, PlayerModel};

/// Rayleigh on both links, unit direct mean.
pub fn rayleigh(isr_bar: f64, power_scale: f64) -> PlayerModel {
    PlayerModel::rayleigh(isr_bar, power_scale).expect("valid rayleigh model")
}

/// Nakagami on both links, unit direct mean.
pub fn nakagami(m_direct: f64, m_cross: f64, isr_bar: f64, power_scale: f64) -> PlayerModel {
    PlayerModel::new(
        GainDistribution::nakagami(m_direct, 1.0).expect("valid shape"),
        GainDistribution::nakagami(m_cross, isr_bar).expect("valid shape"),
        power_scale,
    )
    .expect("valid nakagami model")
}

/// Rician direct link against a Nakagami cross link.
pub fn rician(k: f64, m_cross: f64, isr_bar: f64, power_scale: f64) -> PlayerModel {
    PlayerModel::new(
        GainDistribution::rician(k, 1.0).expect("valid k-factor"),
        GainDistribution::nakagami(m_cross, isr_bar).expect("valid shape"),
        power_scale,
    )
    .expect("valid rician model")
}
