//! Two-player spectrum-sharing game between FDM and full spreading under
//! fading: payoffs, the ISR threshold rule, channel laws, equilibrium
//! search and Monte Carlo play.

pub mod channel;
pub mod equilibrium;
mod error;
pub mod montecarlo;
pub mod payoff;
pub mod quadrature;
pub(crate) mod serde_inf;
pub mod special;
pub mod threshold;

pub use channel::{tail_condition, GainDistribution, IsrRoute, PlayerModel};
pub use equilibrium::{
    build_profile, conditional_gain_db, epsilon_estimate, find_fixed_points,
    find_fixed_points_with, response_prob, EpsilonEstimate, EquilibriumPoint, FixedPointSet,
    Player, PointKind, ProfileMode, SolverOptions, StrategyKind, StrategyProfile,
};
pub use error::{Error, Result};
pub use montecarlo::{
    disagreement_rate, gain_curve, run_trials, sweep_param, ParamPath, TrialStats,
};
pub use payoff::{
    approx_payoff_gap, exact_best_response, expected_payoff, payoff_gap, threshold_best_response,
    utility, Action, ChannelRealization,
};
pub use threshold::{
    indifference, q_derivative, q_of, solve_q, tabulate, ThresholdCurve, ThresholdSolution,
};
