//! Plays the game over sampled channel realizations.
//!
//! Trials are split into fixed-size chunks. Chunk `c` draws from a ChaCha8
//! stream keyed by `(seed, purpose)` with stream id `c`, and partial sums are
//! combined in chunk order, so results do not depend on the thread count.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{GainDistribution, PlayerModel};
use crate::equilibrium::{
    conditional_payoffs, find_fixed_points_with, play_utilities, BracketFailure, EquilibriumPoint,
    Player, SolverOptions, StrategyProfile,
};
use crate::error::{domain, Error, Result};
use crate::payoff::{exact_best_response_unchecked, threshold_best_response_unchecked};
use crate::threshold::q_of;

pub const CHUNK_SIZE: usize = 8192;
pub const BATCHES: usize = 100;

const PURPOSE_TRIALS: u64 = 0x7472_6961;
const PURPOSE_DISAGREE: u64 = 0x6469_7361;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for chunk `chunk` of the stream family `(seed, purpose)`.
pub(crate) fn stream_rng(seed: u64, purpose: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(purpose)));
    rng.set_stream(chunk);
    rng
}

/// `(chunk index, trial range)` pairs covering `0..n`.
pub(crate) fn chunk_ranges(n: usize) -> Vec<(usize, Range<usize>)> {
    (0..n.div_ceil(CHUNK_SIZE))
        .map(|c| (c, c * CHUNK_SIZE..((c + 1) * CHUNK_SIZE).min(n)))
        .collect()
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
/// Sorts `sample` in place.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Mean and batch-means standard error of one per-trial quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerStats {
    pub fdm_freq: Estimate,
    pub mean_utility: Estimate,
    pub mean_fs_utility: Estimate,
    /// Realized utility minus pure-FS utility, trial by trial.
    pub mean_gain: Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub players: [PlayerStats; 2],
    pub trials: usize,
    pub seed: u64,
}

const FIELDS: usize = 8;

/// Batch `b` holds trials `ceil(b n / nb) .. ceil((b + 1) n / nb)`.
fn batch_bounds(trials: usize, batches: usize) -> Vec<usize> {
    (0..=batches)
        .map(|b| ((b as u128 * trials as u128).div_ceil(batches as u128)) as usize)
        .collect()
}

fn estimate(batch_sums: &[[f64; FIELDS]], bounds: &[usize], field: usize) -> Estimate {
    let nb = batch_sums.len();
    let total = bounds[nb] as f64;
    let mean = batch_sums.iter().map(|s| s[field]).sum::<f64>() / total;
    let stderr = if nb < 2 {
        f64::NAN
    } else {
        let means: Vec<f64> = batch_sums
            .iter()
            .zip(bounds.windows(2))
            .map(|(s, w)| s[field] / (w[1] - w[0]) as f64)
            .collect();
        let bm = means.iter().sum::<f64>() / nb as f64;
        let var = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (nb - 1) as f64;
        (var / nb as f64).sqrt()
    };
    Estimate { mean, stderr }
}

/// Plays `trials` independent rounds of the game under `profile`.
pub fn run_trials(
    profile: &StrategyProfile,
    p1: &PlayerModel,
    p2: &PlayerModel,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    if trials == 0 {
        return domain("trials must be at least 1");
    }
    p1.validate()?;
    p2.validate()?;
    let nb = BATCHES.min(trials);
    let bounds = batch_bounds(trials, nb);
    let [s1, s2] = profile.players;

    let partial: Vec<Vec<(usize, [f64; FIELDS])>> = chunk_ranges(trials)
        .into_par_iter()
        .map(|(c, range)| {
            let mut rng = stream_rng(seed, PURPOSE_TRIALS, c as u64);
            let mut b = bounds.partition_point(|&start| start <= range.start) - 1;
            let mut out: Vec<(usize, [f64; FIELDS])> = vec![(b, [0.0; FIELDS])];
            for t in range {
                if t >= bounds[b + 1] {
                    b += 1;
                    out.push((b, [0.0; FIELDS]));
                }
                let (x1, y1) = p1.sample(&mut rng);
                let (x2, y2) = p2.sample(&mut rng);
                let (act1, act2) = (s1.action(x1, y1), s2.action(x2, y2));
                let (u1, f1) = play_utilities(act1, act2, x1, y1);
                let (u2, f2) = play_utilities(act2, act1, x2, y2);
                let row = [
                    f64::from(u8::from(act1.is_fdm())),
                    u1,
                    f1,
                    u1 - f1,
                    f64::from(u8::from(act2.is_fdm())),
                    u2,
                    f2,
                    u2 - f2,
                ];
                let acc = &mut out.last_mut().expect("non-empty").1;
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            out
        })
        .collect();

    let mut sums = vec![[0.0; FIELDS]; nb];
    for (b, s) in partial.into_iter().flatten() {
        for (a, v) in sums[b].iter_mut().zip(s) {
            *a += v;
        }
    }
    let player = |o: usize| PlayerStats {
        fdm_freq: estimate(&sums, &bounds, o),
        mean_utility: estimate(&sums, &bounds, o + 1),
        mean_fs_utility: estimate(&sums, &bounds, o + 2),
        mean_gain: estimate(&sums, &bounds, o + 3),
    };
    Ok(TrialStats {
        players: [player(0), player(4)],
        trials,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisagreementPoint {
    pub power_scale: f64,
    pub rate: f64,
    pub stderr: f64,
}

/// Fraction of draws where the exact best response and the threshold rule
/// disagree, per power scale. The same random streams are reused at every
/// scale.
pub fn disagreement_rate(
    player: &PlayerModel,
    a_other: f64,
    power_scales: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<DisagreementPoint>> {
    if !(a_other > 0.0 && a_other <= 1.0) {
        return domain(format!("a_other = {a_other} must lie in (0, 1]"));
    }
    if trials == 0 {
        return domain("trials must be at least 1");
    }
    if power_scales.windows(2).any(|w| w[1] <= w[0]) {
        return domain("power scales must be strictly increasing");
    }
    let q = q_of(a_other)?;
    power_scales
        .iter()
        .map(|&scale| {
            let model = PlayerModel::new(player.direct, player.cross, scale)?;
            let count: usize = chunk_ranges(trials)
                .into_par_iter()
                .map(|(c, range)| {
                    let mut rng = stream_rng(seed, PURPOSE_DISAGREE, c as u64);
                    range
                        .filter(|_| {
                            let (x, y) = model.sample(&mut rng);
                            exact_best_response_unchecked(x, y, a_other)
                                != threshold_best_response_unchecked(x, y, q)
                        })
                        .count()
                })
                .sum();
            let rate = count as f64 / trials as f64;
            Ok(DisagreementPoint {
                power_scale: scale,
                rate,
                stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub isr: f64,
    /// SNR at which each player's gain was evaluated.
    pub snr: [f64; 2],
    pub gain_db: [f64; 2],
}

/// Conditional gain over pure FS along an ISR grid. Each player is evaluated
/// at `x = snr_ref` (or its own mean SNR) and `y = isr * x`.
pub fn gain_curve(
    point: &EquilibriumPoint,
    p1: &PlayerModel,
    p2: &PlayerModel,
    isr_grid: &[f64],
    snr_ref: Option<f64>,
) -> Result<Vec<GainRow>> {
    if let Some(s) = snr_ref {
        if !(s.is_finite() && s > 0.0) {
            return domain(format!("reference SNR {s} must be positive and finite"));
        }
    }
    let snr = [p1, p2].map(|p| snr_ref.unwrap_or_else(|| p.mean_snr()));
    isr_grid
        .iter()
        .map(|&isr| {
            if !(isr.is_finite() && isr > 0.0) {
                return domain(format!("ISR grid value {isr} must be positive and finite"));
            }
            let mut gain_db = [0.0; 2];
            for pl in Player::BOTH {
                let x = snr[pl.index()];
                gain_db[pl.index()] = conditional_payoffs(point, x, isr * x, pl)?.gain_db();
            }
            Ok(GainRow { isr, snr, gain_db })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    P1,
    P2,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepField {
    /// Nakagami `m` or Rician `k` of the direct link.
    DirectShape,
    CrossShape,
    DirectMean,
    CrossMean,
    /// Mean ISR, set through the cross-link mean.
    Isr,
    PowerScale,
}

/// A numeric model field addressed as `<p1|p2|both>.<field>`, where field is
/// one of `direct.shape`, `cross.shape`, `direct.mean`, `cross.mean`, `isr`,
/// `power_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamPath {
    pub target: SweepTarget,
    pub field: SweepField,
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown parameter path '{s}'"));
        let (head, tail) = s.split_once('.').ok_or_else(bad)?;
        let target = match head {
            "p1" => SweepTarget::P1,
            "p2" => SweepTarget::P2,
            "both" => SweepTarget::Both,
            _ => return Err(bad()),
        };
        let field = match tail {
            "direct.shape" | "direct.m" | "direct.k" => SweepField::DirectShape,
            "cross.shape" | "cross.m" | "cross.k" => SweepField::CrossShape,
            "direct.mean" => SweepField::DirectMean,
            "cross.mean" => SweepField::CrossMean,
            "isr" => SweepField::Isr,
            "power_scale" => SweepField::PowerScale,
            _ => return Err(bad()),
        };
        Ok(Self { target, field })
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.target {
            SweepTarget::P1 => "p1",
            SweepTarget::P2 => "p2",
            SweepTarget::Both => "both",
        };
        let tail = match self.field {
            SweepField::DirectShape => "direct.shape",
            SweepField::CrossShape => "cross.shape",
            SweepField::DirectMean => "direct.mean",
            SweepField::CrossMean => "cross.mean",
            SweepField::Isr => "isr",
            SweepField::PowerScale => "power_scale",
        };
        write!(f, "{head}.{tail}")
    }
}

fn with_shape(d: GainDistribution, v: f64) -> Result<GainDistribution> {
    match d {
        GainDistribution::Rician { mean, .. } => GainDistribution::rician(v, mean),
        _ => GainDistribution::nakagami(v, d.mean()),
    }
}

impl ParamPath {
    fn apply_one(&self, p: &PlayerModel, v: f64) -> Result<PlayerModel> {
        let mut out = *p;
        match self.field {
            SweepField::DirectShape => out.direct = with_shape(p.direct, v)?,
            SweepField::CrossShape => out.cross = with_shape(p.cross, v)?,
            SweepField::DirectMean => out.direct = p.direct.with_mean(v),
            SweepField::CrossMean => out.cross = p.cross.with_mean(v),
            SweepField::Isr => out.cross = p.cross.with_mean(v * p.direct.mean()),
            SweepField::PowerScale => out.power_scale = v,
        }
        out.validate()?;
        Ok(out)
    }

    /// The pair of models with this field set to `v`.
    pub fn apply(
        &self,
        p1: &PlayerModel,
        p2: &PlayerModel,
        v: f64,
    ) -> Result<(PlayerModel, PlayerModel)> {
        Ok(match self.target {
            SweepTarget::P1 => (self.apply_one(p1, v)?, *p2),
            SweepTarget::P2 => (*p1, self.apply_one(p2, v)?),
            SweepTarget::Both => (self.apply_one(p1, v)?, self.apply_one(p2, v)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    /// Trivial point first, then interior points; empty only on error.
    pub points: Vec<EquilibriumPoint>,
    pub failures: Vec<BracketFailure>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn interior(&self) -> impl Iterator<Item = &EquilibriumPoint> {
        self.points.iter().filter(|p| p.is_interior())
    }
}

/// Re-solves the fixed-point system for each value of one model field.
/// Invalid values and solver errors are recorded in the row.
pub fn sweep_param(
    p1: &PlayerModel,
    p2: &PlayerModel,
    param: ParamPath,
    values: &[f64],
    opts: &SolverOptions,
) -> Vec<SweepRow> {
    values
        .iter()
        .map(|&value| {
            match param
                .apply(p1, p2, value)
                .and_then(|(a, b)| find_fixed_points_with(&a, &b, opts))
            {
                Ok(set) => SweepRow {
                    value,
                    points: set.points,
                    failures: set.failures,
                    error: None,
                },
                Err(e) => SweepRow {
                    value,
                    points: Vec::new(),
                    failures: Vec::new(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
