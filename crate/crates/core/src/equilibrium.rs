//! Fixed points of the threshold response map, the strategy profiles they
//! induce, their payoff gains over pure FS, and empirical epsilon bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::PlayerModel;
use crate::error::{check_probability, domain, Error, Result};
use crate::montecarlo::{chunk_ranges, stream_rng};
use crate::payoff::{
    exact_best_response_unchecked, expected_payoff_unchecked, payoff_gap_unchecked,
    threshold_best_response_unchecked, utility, utility_unchecked, Action,
};
use crate::threshold::q_of;

/// Default number of uniform scan nodes on `(0, 1]`.
pub const DEFAULT_GRID: usize = 2000;
pub const MIN_GRID: usize = 100;
/// Accepted points satisfy the fixed-point equations to this tolerance.
pub const ACCEPT_RESIDUAL: f64 = 1e-8;
/// Default stopping tolerance on `|a1 - R1(R2(a1))|` during bisection.
pub const DEFAULT_TOL: f64 = 1e-12;
const DEDUP_DISTANCE: f64 = 1e-6;
/// Log-spaced nodes below the first uniform node; interior roots can sit
/// at very small `a` when both mean ISRs are small.
const NEAR_ZERO_NODES: usize = 120;
const NEAR_ZERO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    TrivialFs,
    Interior,
}

/// A solution `(a1, a2)` of `a1 = 1 - F_Z1(q(a2))`, `a2 = 1 - F_Z2(q(a1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub a1: f64,
    pub a2: f64,
    /// Threshold used by player 1, `q(a2)`.
    #[serde(with = "crate::serde_inf")]
    pub q1: f64,
    /// Threshold used by player 2, `q(a1)`.
    #[serde(with = "crate::serde_inf")]
    pub q2: f64,
    pub residual: f64,
    pub kind: PointKind,
    /// Bisection steps spent refining the root (0 for the trivial point).
    pub iterations: u32,
}

impl EquilibriumPoint {
    pub fn trivial() -> Self {
        Self {
            a1: 0.0,
            a2: 0.0,
            q1: f64::INFINITY,
            q2: f64::INFINITY,
            residual: 0.0,
            kind: PointKind::TrivialFs,
            iterations: 0,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.kind == PointKind::Interior
    }

    /// FDM probability of `player`.
    pub fn a(&self, player: Player) -> f64 {
        match player {
            Player::One => self.a1,
            Player::Two => self.a2,
        }
    }

    /// Threshold applied by `player`.
    pub fn q(&self, player: Player) -> f64 {
        match player {
            Player::One => self.q1,
            Player::Two => self.q2,
        }
    }

    /// Recomputes `max(|a1 - R1(a2)|, |a2 - R2(a1)|)`.
    pub fn recompute_residual(&self, p1: &PlayerModel, p2: &PlayerModel) -> Result<f64> {
        let r1 = response_prob(p1, self.a2)?;
        let r2 = response_prob(p2, self.a1)?;
        Ok((self.a1 - r1).abs().max((self.a2 - r2).abs()))
    }
}

/// A scan bracket that could not be resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketFailure {
    pub a_lo: f64,
    pub a_hi: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    /// Trivial point first, then interior points by increasing `a1`.
    pub points: Vec<EquilibriumPoint>,
    pub failures: Vec<BracketFailure>,
}

impl FixedPointSet {
    pub fn interior(&self) -> impl Iterator<Item = &EquilibriumPoint> {
        self.points.iter().filter(|p| p.is_interior())
    }

    pub fn interior_count(&self) -> usize {
        self.interior().count()
    }
}

/// Probability that `player`, using the threshold rule against an opponent
/// who plays FDM with probability `a_other`, chooses FDM.
pub fn response_prob(player: &PlayerModel, a_other: f64) -> Result<f64> {
    check_probability("a_other", a_other)?;
    if a_other == 0.0 {
        return Ok(0.0);
    }
    let q = q_of(a_other)?;
    if q.is_infinite() {
        return Ok(0.0);
    }
    player.isr_sf(q)
}

fn composite_defect(p1: &PlayerModel, p2: &PlayerModel, a1: f64) -> Result<f64> {
    let a2 = response_prob(p2, a1)?;
    Ok(a1 - response_prob(p1, a2)?)
}

fn scan_nodes(grid: usize) -> Vec<f64> {
    let first = 1.0 / grid as f64;
    let (lo, hi) = (NEAR_ZERO_FLOOR.ln(), first.ln());
    let mut nodes: Vec<f64> = (0..NEAR_ZERO_NODES)
        .map(|k| (lo + (hi - lo) * k as f64 / NEAR_ZERO_NODES as f64).exp())
        .collect();
    nodes.extend((1..=grid).map(|k| k as f64 / grid as f64));
    nodes
}

fn bisect(
    p1: &PlayerModel,
    p2: &PlayerModel,
    mut lo: f64,
    mut hi: f64,
    mut g_lo: f64,
    tol: f64,
) -> Result<(f64, f64, u32)> {
    let mut best = (lo, g_lo.abs());
    let mut iterations = 0;
    while iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let g_mid = composite_defect(p1, p2, mid)?;
        if g_mid.abs() < best.1 {
            best = (mid, g_mid.abs());
        }
        if best.1 <= tol {
            break;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok((best.0, best.1, iterations))
}

fn finish_point(
    p1: &PlayerModel,
    p2: &PlayerModel,
    a1: f64,
    iterations: u32,
) -> Result<EquilibriumPoint> {
    let a2 = response_prob(p2, a1)?;
    let mut point = EquilibriumPoint {
        a1,
        a2,
        q1: q_of(a2)?,
        q2: q_of(a1)?,
        residual: 0.0,
        kind: PointKind::Interior,
        iterations,
    };
    point.residual = point.recompute_residual(p1, p2)?;
    Ok(point)
}

/// Scan resolution and bisection tolerance of the fixed-point search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub grid: usize,
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            tol: DEFAULT_TOL,
        }
    }
}

impl SolverOptions {
    pub fn with_grid(grid: usize) -> Self {
        Self {
            grid,
            ..Self::default()
        }
    }
}

/// Enumerates solutions of the fixed-point system with the default
/// tolerance. See [`find_fixed_points_with`].
pub fn find_fixed_points(p1: &PlayerModel, p2: &PlayerModel, grid: usize) -> Result<FixedPointSet> {
    find_fixed_points_with(p1, p2, &SolverOptions::with_grid(grid))
}

type Bracket = (f64, f64, std::result::Result<(f64, f64), Error>);

/// Enumerates solutions of the fixed-point system.
///
/// Scans `g(a1) = a1 - R1(R2(a1))` on `grid` uniform nodes over `(0, 1]`
/// plus a log-spaced refinement toward zero, bisects each sign change until
/// `|g| <= tol` and drops duplicates closer than `1e-6`. The trivial point
/// is always first.
pub fn find_fixed_points_with(
    p1: &PlayerModel,
    p2: &PlayerModel,
    opts: &SolverOptions,
) -> Result<FixedPointSet> {
    let SolverOptions { grid, tol } = *opts;
    if grid < MIN_GRID {
        return domain(format!("grid = {grid} must be at least {MIN_GRID}"));
    }
    if !(tol > 0.0 && tol <= ACCEPT_RESIDUAL) {
        return domain(format!("tol = {tol} must lie in (0, {ACCEPT_RESIDUAL:e}]"));
    }
    p1.validate()?;
    p2.validate()?;
    let nodes = scan_nodes(grid);
    let values: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&a| composite_defect(p1, p2, a))
        .collect();

    let brackets: Vec<Bracket> = nodes
        .windows(2)
        .zip(values.windows(2))
        .filter_map(|(a, g)| match (&g[0], &g[1]) {
            (Ok(g0), Ok(g1)) => (g0 * g1 <= 0.0).then_some((a[0], a[1], Ok((*g0, *g1)))),
            (Err(e), _) | (_, Err(e)) => Some((a[0], a[1], Err(e.clone()))),
        })
        .collect();

    let refined: Vec<std::result::Result<EquilibriumPoint, BracketFailure>> = brackets
        .into_par_iter()
        .map(|(lo, hi, g)| {
            let fail = |message: String| BracketFailure {
                a_lo: lo,
                a_hi: hi,
                message,
            };
            let (g_lo, g_hi) = g.map_err(|e| fail(e.to_string()))?;
            let (root, iterations) = if g_lo == 0.0 {
                (lo, 0)
            } else if g_hi == 0.0 {
                (hi, 0)
            } else {
                let (root, _, it) =
                    bisect(p1, p2, lo, hi, g_lo, tol).map_err(|e| fail(e.to_string()))?;
                (root, it)
            };
            let point = finish_point(p1, p2, root, iterations).map_err(|e| fail(e.to_string()))?;
            if point.residual > ACCEPT_RESIDUAL {
                return Err(fail(format!(
                    "residual {:e} above {ACCEPT_RESIDUAL:e} at a1 = {root}",
                    point.residual
                )));
            }
            Ok(point)
        })
        .collect();

    let mut points = vec![EquilibriumPoint::trivial()];
    let mut failures = Vec::new();
    for r in refined {
        match r {
            Ok(p) => match points
                .iter_mut()
                .skip(1)
                .find(|q| (q.a1 - p.a1).abs() < DEDUP_DISTANCE)
            {
                Some(existing) => {
                    if p.residual < existing.residual {
                        *existing = p;
                    }
                }
                None => points.push(p),
            },
            Err(f) => failures.push(f),
        }
    }
    points[1..].sort_by(|a, b| a.a1.total_cmp(&b.a1));
    Ok(FixedPointSet { points, failures })
}

/// A player's strategy: a map from its private `(snr, inr)` to an action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    PureFs,
    /// Exact best response to an opponent FDM probability.
    ExactBestResponse {
        a_opponent: f64,
    },
    /// FDM iff `inr / snr > isr_cutoff`.
    Threshold {
        #[serde(with = "crate::serde_inf")]
        isr_cutoff: f64,
    },
}

impl StrategyKind {
    #[inline]
    pub fn action(&self, x: f64, y: f64) -> Action {
        match *self {
            StrategyKind::PureFs => Action::Fs,
            StrategyKind::ExactBestResponse { a_opponent } => {
                exact_best_response_unchecked(x, y, a_opponent)
            }
            StrategyKind::Threshold { isr_cutoff } => {
                threshold_best_response_unchecked(x, y, isr_cutoff)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub players: [StrategyKind; 2],
}

impl StrategyProfile {
    pub fn pure_fs() -> Self {
        Self {
            players: [StrategyKind::PureFs; 2],
        }
    }

    pub fn get(&self, player: Player) -> StrategyKind {
        self.players[player.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    Exact,
    Threshold,
}

/// Strategy profile attached to an equilibrium point.
pub fn build_profile(point: &EquilibriumPoint, mode: ProfileMode) -> StrategyProfile {
    if !point.is_interior() {
        return StrategyProfile::pure_fs();
    }
    let strategy = |player: Player| match mode {
        ProfileMode::Exact => StrategyKind::ExactBestResponse {
            a_opponent: point.a(player.opponent()),
        },
        ProfileMode::Threshold => {
            let q = point.q(player);
            if q.is_infinite() {
                StrategyKind::PureFs
            } else {
                StrategyKind::Threshold { isr_cutoff: q }
            }
        }
    };
    StrategyProfile {
        players: [strategy(Player::One), strategy(Player::Two)],
    }
}

/// Conditional expected payoff at the equilibrium and under pure FS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPayoffs {
    pub equilibrium: f64,
    pub pure_fs: f64,
}

impl ConditionalPayoffs {
    pub fn gain_db(&self) -> f64 {
        10.0 * (self.equilibrium / self.pure_fs).log10()
    }
}

pub fn conditional_payoffs(
    point: &EquilibriumPoint,
    x: f64,
    y: f64,
    player: Player,
) -> Result<ConditionalPayoffs> {
    let pure_fs = utility(Action::Fs, Action::Fs, x, y)?;
    if pure_fs <= 0.0 {
        return domain(format!("pure-FS payoff underflows at x = {x}, y = {y}"));
    }
    let a = point.a(player.opponent());
    let equilibrium = expected_payoff_unchecked(Action::Fdm, a, x, y)
        .max(expected_payoff_unchecked(Action::Fs, a, x, y));
    Ok(ConditionalPayoffs {
        equilibrium,
        pure_fs,
    })
}

/// Equilibrium conditional expected payoff over the pure-FS payoff, in dB.
pub fn conditional_gain_db(
    point: &EquilibriumPoint,
    x: f64,
    y: f64,
    player: Player,
) -> Result<f64> {
    conditional_payoffs(point, x, y, player).map(|c| c.gain_db())
}

/// Empirical deviation bound for one player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEstimate {
    /// Opponent FDM probability assumed by the profile.
    pub a_hat_opponent: f64,
    /// Opponent FDM probability actually realized by its exact best response.
    pub a_tilde_opponent: f64,
    /// Largest sampled gain from deviating.
    pub epsilon: f64,
    /// Largest `|e(x, y, a_tilde) - e(x, y, a_hat)|` over disagreeing samples.
    pub gap_bound: f64,
    /// Fraction of samples where responding to `a_tilde` changes the action.
    pub disagreement: f64,
}

const EPS_PURPOSE_FDM: u64 = 0x6570_7331;
const EPS_PURPOSE_REGRET: u64 = 0x6570_7332;

/// Monte Carlo estimate of how much each player could gain by deviating
/// from the exact-best-response profile at `point`.
pub fn epsilon_estimate(
    point: &EquilibriumPoint,
    p1: &PlayerModel,
    p2: &PlayerModel,
    sample_count: usize,
    seed: u64,
) -> Result<[EpsilonEstimate; 2]> {
    if sample_count == 0 {
        return domain("sample_count must be positive");
    }
    let models = [p1, p2];
    let mut out = [None, None];
    for player in Player::BOTH {
        let opp = player.opponent();
        let a_hat_own = point.a(player);
        let a_hat_opp = point.a(opp);
        let opp_model = models[opp.index()];
        let own_model = models[player.index()];

        // realized FDM frequency of the opponent's exact best response
        let opp_fdm: usize = chunk_ranges(sample_count)
            .into_par_iter()
            .map(|(c, range)| {
                let mut rng = stream_rng(seed, EPS_PURPOSE_FDM + opp.index() as u64, c as u64);
                range
                    .filter(|_| {
                        let (x, y) = opp_model.sample(&mut rng);
                        exact_best_response_unchecked(x, y, a_hat_own).is_fdm()
                    })
                    .count()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        let a_tilde = opp_fdm as f64 / sample_count as f64;

        let partial: Vec<(f64, f64, usize)> = chunk_ranges(sample_count)
            .into_par_iter()
            .map(|(c, range)| {
                let mut rng =
                    stream_rng(seed, EPS_PURPOSE_REGRET + player.index() as u64, c as u64);
                let (mut eps, mut bound, mut disagree) = (0.0f64, 0.0f64, 0usize);
                for _ in range {
                    let (x, y) = own_model.sample(&mut rng);
                    let used = exact_best_response_unchecked(x, y, a_hat_opp);
                    let best = exact_best_response_unchecked(x, y, a_tilde);
                    if used != best {
                        disagree += 1;
                        let regret = expected_payoff_unchecked(best, a_tilde, x, y)
                            - expected_payoff_unchecked(used, a_tilde, x, y);
                        eps = eps.max(regret);
                        bound = bound.max(
                            (payoff_gap_unchecked(x, y, a_tilde)
                                - payoff_gap_unchecked(x, y, a_hat_opp))
                            .abs(),
                        );
                    }
                }
                (eps, bound, disagree)
            })
            .collect();
        let (eps, bound, disagree) = partial
            .into_iter()
            .fold((0.0f64, 0.0f64, 0usize), |acc, p| {
                (acc.0.max(p.0), acc.1.max(p.1), acc.2 + p.2)
            });
        out[player.index()] = Some(EpsilonEstimate {
            a_hat_opponent: a_hat_opp,
            a_tilde_opponent: a_tilde,
            epsilon: eps.max(0.0),
            gap_bound: bound,
            disagreement: disagree as f64 / sample_count as f64,
        });
    }
    Ok([out[0].expect("filled"), out[1].expect("filled")])
}

/// Utility pair `(realized, pure FS)` of one player in one play.
#[inline]
pub(crate) fn play_utilities(own: Action, other: Action, x: f64, y: f64) -> (f64, f64) {
    (
        utility_unchecked(own, other, x, y),
        utility_unchecked(Action::Fs, Action::Fs, x, y),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{tail_condition, GainDistribution};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ray(isr: f64) -> PlayerModel {
        PlayerModel::rayleigh(isr, 1e4).unwrap()
    }

    fn nak(m1: f64, m2: f64, isr: f64) -> PlayerModel {
        PlayerModel::new(
            GainDistribution::nakagami(m1, 1.0).unwrap(),
            GainDistribution::nakagami(m2, isr).unwrap(),
            1e4,
        )
        .unwrap()
    }

    #[test]
    fn response_prob_examples() {
        let p = ray(1.0);
        assert!((response_prob(&p, 0.5).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(response_prob(&p, 0.0).unwrap(), 0.0);
        assert!((response_prob(&p, 1.0).unwrap() - 1.0 / 1.5).abs() < 1e-14);
        assert!(response_prob(&p, 1.2).is_err());
    }

    #[test]
    fn response_prob_monotone() {
        for p in [ray(1.0), ray(0.05), nak(0.5, 2.0, 3.0), nak(3.0, 1.0, 1.0)] {
            let mut prev = 0.0;
            for i in 0..=200 {
                let r = response_prob(&p, i as f64 / 200.0).unwrap();
                assert!(r >= prev);
                prev = r;
            }
        }
    }

    #[test]
    fn symmetric_rayleigh_point() {
        let set = find_fixed_points(&ray(1.0), &ray(1.0), DEFAULT_GRID).unwrap();
        assert_eq!(set.points[0], EquilibriumPoint::trivial());
        let p = set
            .interior()
            .find(|p| (p.a1 - 0.5).abs() < 1e-6)
            .expect("symmetric point");
        assert!((p.a2 - 0.5).abs() < 1e-6);
        assert!((p.q1 - 1.0).abs() < 1e-6 && (p.q2 - 1.0).abs() < 1e-6);
        assert!(p.residual <= ACCEPT_RESIDUAL);
        assert!(set.failures.is_empty());
    }

    #[test]
    fn rayleigh_always_has_interior_point() {
        for &(i1, i2) in &[
            (0.01, 0.01),
            (0.1, 3.0),
            (0.25, 0.25),
            (10.0, 10.0),
            (1.0, 0.05),
        ] {
            let (p1, p2) = (ray(i1), ray(i2));
            let set = find_fixed_points(&p1, &p2, 500).unwrap();
            assert!(set.interior_count() >= 1, "isr=({i1},{i2})");
            for p in &set.points {
                assert!(p.recompute_residual(&p1, &p2).unwrap() <= ACCEPT_RESIDUAL);
            }
        }
    }

    #[test]
    fn tiny_isr_root_below_first_grid_node() {
        let set = find_fixed_points(&ray(0.01), &ray(0.01), DEFAULT_GRID).unwrap();
        let p = set.interior().next().unwrap();
        assert!(p.a1 < 1.0 / DEFAULT_GRID as f64);
        assert!((p.a1 - 6.9927e-5).abs() < 1e-8);
    }

    #[test]
    fn strong_direct_links_may_only_have_trivial_point() {
        let p = nak(3.0, 3.0, 0.1);
        assert!(!tail_condition(&p));
        let set = find_fixed_points(&p, &p, 500).unwrap();
        assert_eq!(set.points[0].kind, PointKind::TrivialFs);
        assert!(set.interior().all(|q| q.residual <= ACCEPT_RESIDUAL));
    }

    #[test]
    fn power_scale_does_not_move_points() {
        let (a, b) = (nak(0.7, 2.0, 0.5), ray(2.0));
        let s1 = find_fixed_points(&a, &b, 400).unwrap();
        let s2 =
            find_fixed_points(&a.with_power_scale(10.0), &b.with_power_scale(1e8), 400).unwrap();
        assert_eq!(s1.points, s2.points);
    }

    #[test]
    fn option_validation() {
        assert!(find_fixed_points(&ray(1.0), &ray(1.0), 99).is_err());
        let bad = SolverOptions {
            grid: 200,
            tol: 1e-3,
        };
        assert!(find_fixed_points_with(&ray(1.0), &ray(1.0), &bad).is_err());
    }

    #[test]
    fn looser_tolerance_moves_points_little() {
        let (a, b) = (ray(0.25), ray(1.0));
        let tight = find_fixed_points(&a, &b, 500).unwrap();
        let loose = find_fixed_points_with(
            &a,
            &b,
            &SolverOptions {
                grid: 500,
                tol: 1e-9,
            },
        )
        .unwrap();
        assert_eq!(tight.points.len(), loose.points.len());
        for (t, l) in tight.points.iter().zip(&loose.points) {
            assert!((t.a1 - l.a1).abs() < 1e-7 && l.residual <= 1e-8);
            assert!(l.iterations <= t.iterations);
        }
    }

    #[test]
    fn profiles() {
        let fs = build_profile(&EquilibriumPoint::trivial(), ProfileMode::Threshold);
        assert_eq!(fs, StrategyProfile::pure_fs());
        assert_eq!(
            build_profile(&EquilibriumPoint::trivial(), ProfileMode::Exact),
            StrategyProfile::pure_fs()
        );
        let set = find_fixed_points(&ray(1.0), &ray(1.0), DEFAULT_GRID).unwrap();
        let p = set.interior().next().unwrap();
        match build_profile(p, ProfileMode::Threshold).players {
            [StrategyKind::Threshold { isr_cutoff: c1 }, StrategyKind::Threshold { isr_cutoff: c2 }] =>
            {
                assert!((c1 - 1.0).abs() < 1e-6 && (c2 - 1.0).abs() < 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
        let asym = find_fixed_points(&ray(0.25), &ray(1.0), 500).unwrap();
        let p = asym.interior().next().unwrap();
        assert_eq!(
            build_profile(p, ProfileMode::Exact).players,
            [
                StrategyKind::ExactBestResponse { a_opponent: p.a2 },
                StrategyKind::ExactBestResponse { a_opponent: p.a1 }
            ]
        );
    }

    #[test]
    fn gains_are_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set = find_fixed_points(&ray(0.25), &ray(1.0), 500).unwrap();
        for p in set.points.iter() {
            for _ in 0..2000 {
                let x = 10f64.powf(rng.random_range(-2.0..6.0));
                let y = 10f64.powf(rng.random_range(-2.0..7.0));
                for pl in Player::BOTH {
                    let g = conditional_gain_db(p, x, y, pl).unwrap();
                    assert!(g >= -1e-9);
                    if !p.is_interior() {
                        assert_eq!(g, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn gain_grows_with_isr() {
        let set = find_fixed_points(&ray(1.0), &ray(1.0), DEFAULT_GRID).unwrap();
        let p = set.interior().next().unwrap();
        let g1 = conditional_gain_db(p, 100.0, 100.0, Player::One).unwrap();
        let g4 = conditional_gain_db(p, 100.0, 400.0, Player::One).unwrap();
        assert!(g4 > g1);
    }

    #[test]
    fn epsilon_trivial_point_is_zero() {
        let e = epsilon_estimate(
            &EquilibriumPoint::trivial(),
            &ray(1.0),
            &ray(1.0),
            10_000,
            9,
        )
        .unwrap();
        for x in e {
            assert_eq!(x.epsilon, 0.0);
            assert_eq!(x.a_tilde_opponent, 0.0);
            assert_eq!(x.disagreement, 0.0);
        }
    }

    #[test]
    fn epsilon_shrinks_with_power() {
        let (a, b) = (ray(0.25), ray(1.0));
        let p = *find_fixed_points(&a, &b, DEFAULT_GRID)
            .unwrap()
            .interior()
            .next()
            .unwrap();
        let at = |scale: f64| {
            epsilon_estimate(
                &p,
                &a.with_power_scale(scale),
                &b.with_power_scale(scale),
                400_000,
                21,
            )
            .unwrap()
        };
        let (low, high) = (at(1.0), at(1e4));
        for i in 0..2 {
            assert!(
                high[i].epsilon < 0.5 * low[i].epsilon,
                "{:?} {:?}",
                low[i],
                high[i]
            );
            assert!(high[i].disagreement < low[i].disagreement);
            assert!(low[i].epsilon <= low[i].gap_bound + 1e-15);
            assert!(high[i].epsilon <= high[i].gap_bound + 1e-15);
        }
    }

    #[test]
    fn point_serializes_infinite_thresholds() {
        let s = serde_json::to_string(&EquilibriumPoint::trivial()).unwrap();
        assert!(s.contains(r#""q1":"inf""#) && s.contains(r#""kind":"trivial_fs""#));
    }
}
