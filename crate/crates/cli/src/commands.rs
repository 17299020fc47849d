//! One function per subcommand. Each resolves flags against the config,
//! calls into the core crate and returns a report.

use anyhow::{anyhow, Result};
use isrgame_core::equilibrium::ProfileMode;
use isrgame_core::montecarlo::SweepField;
use isrgame_core::{
    build_profile, disagreement_rate, find_fixed_points_with, gain_curve as core_gain_curve,
    run_trials, sweep_param, tabulate, tail_condition, EquilibriumPoint, FixedPointSet, ParamPath,
    PlayerModel,
};
use serde_json::json;

use crate::config::{db_to_linear, linear_to_db, RunConfig};
use crate::output::{num, Report, Table};
use crate::{McFlags, PointFlags, SolverFlags, UsageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    Exact,
    Threshold,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn apply_solver(cfg: &mut RunConfig, flags: SolverFlags) {
    if let Some(g) = flags.grid {
        cfg.solver.grid = g;
    }
    if let Some(t) = flags.tol {
        cfg.solver.tol = t;
    }
}

fn apply_mc(cfg: &mut RunConfig, flags: McFlags) {
    if let Some(t) = flags.trials {
        cfg.montecarlo.trials = t;
    }
    if let Some(s) = flags.seed {
        cfg.montecarlo.seed = s;
    }
}

fn solve(cfg: &RunConfig) -> Result<(PlayerModel, PlayerModel, FixedPointSet)> {
    let (p1, p2) = cfg.models()?;
    let set = find_fixed_points_with(&p1, &p2, &cfg.solver_options())?;
    Ok((p1, p2, set))
}

fn pick_point(set: &FixedPointSet, flags: PointFlags) -> Result<EquilibriumPoint> {
    match flags.point {
        Some(i) => set.points.get(i).copied().ok_or_else(|| {
            usage(format!(
                "--point {i} out of range; {} fixed points found",
                set.points.len()
            ))
        }),
        None => Ok(set
            .interior()
            .next()
            .copied()
            .unwrap_or_else(EquilibriumPoint::trivial)),
    }
}

fn point_json(p: &EquilibriumPoint) -> serde_json::Value {
    serde_json::to_value(p).expect("points serialize")
}

pub fn q_table(a_min: f64, a_max: f64, steps: usize) -> Result<Report> {
    let curve = tabulate(a_min, a_max, steps)?;
    let mut t = Table::new(&["a", "q"]);
    for n in curve.nodes() {
        t.push(vec![num(n.a), num(n.q)]);
    }
    Ok(Report::Table(t))
}

pub fn equilibrium(cfg: &mut RunConfig, solver: SolverFlags) -> Result<Report> {
    apply_solver(cfg, solver);
    let (p1, p2, set) = solve(cfg)?;
    let interior = set.interior_count();
    let (status, note) = if interior == 0 {
        (
            "pure_fs_only",
            "no interior fixed point found; pure FS is the only equilibrium",
        )
    } else {
        (
            "interior_found",
            "pure FS plus the listed interior fixed points",
        )
    };
    let json = json!({
        "models": [p1, p2],
        "tail_condition": [tail_condition(&p1), tail_condition(&p2)],
        "solver": cfg.solver_options(),
        "status": status,
        "note": note,
        "interior_count": interior,
        "points": set.points.iter().map(point_json).collect::<Vec<_>>(),
        "failures": set.failures,
    });
    let mut t = Table::new(&["index", "kind", "a1", "a2", "q1", "q2", "residual"]);
    for (i, p) in set.points.iter().enumerate() {
        let kind = if p.is_interior() {
            "interior"
        } else {
            "trivial_fs"
        };
        t.push(vec![
            i.to_string(),
            kind.into(),
            num(p.a1),
            num(p.a2),
            num(p.q1),
            num(p.q2),
            num(p.residual),
        ]);
    }
    Ok(Report::Document { json, table: t })
}

pub fn simulate(
    cfg: &mut RunConfig,
    solver: SolverFlags,
    mc: McFlags,
    point: PointFlags,
    profile: Profile,
) -> Result<Report> {
    apply_solver(cfg, solver);
    apply_mc(cfg, mc);
    let (p1, p2, set) = solve(cfg)?;
    let point = pick_point(&set, point)?;
    let mode = match profile {
        Profile::Exact => ProfileMode::Exact,
        Profile::Threshold => ProfileMode::Threshold,
    };
    let strategies = build_profile(&point, mode);
    let stats = run_trials(
        &strategies,
        &p1,
        &p2,
        cfg.montecarlo.trials,
        cfg.montecarlo.seed,
    )?;
    let mut t = Table::new(&[
        "player",
        "fdm_freq",
        "mean_utility",
        "mean_fs_utility",
        "stderr",
    ]);
    for (i, s) in stats.players.iter().enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            num(s.fdm_freq.mean),
            num(s.mean_utility.mean),
            num(s.mean_fs_utility.mean),
            num(s.mean_utility.stderr),
        ]);
    }
    let json = json!({ "point": point_json(&point), "profile": strategies, "stats": stats });
    Ok(Report::Document { json, table: t })
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || {
        usage(format!(
            "range '{spec}' must be start:stop:step with step > 0 and stop >= start"
        ))
    };
    let [start, stop, step] = parts.as_slice() else {
        return Err(bad());
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

pub fn gain_curve(
    cfg: &mut RunConfig,
    solver: SolverFlags,
    point: PointFlags,
    isr_db: &str,
    snr_db: Option<f64>,
) -> Result<Report> {
    apply_solver(cfg, solver);
    let grid_db = parse_range(isr_db)?;
    let (p1, p2, set) = solve(cfg)?;
    let point = pick_point(&set, point)?;
    if !point.is_interior() {
        return Err(anyhow!(
            "no interior equilibrium to evaluate; gains over pure FS are identically zero"
        ));
    }
    let grid: Vec<f64> = grid_db.iter().map(|&d| db_to_linear(d)).collect();
    let rows = core_gain_curve(&point, &p1, &p2, &grid, snr_db.map(db_to_linear))?;
    let mut t = Table::new(&["isr_db", "gain_db_p1", "gain_db_p2"]);
    for (d, r) in grid_db.iter().zip(&rows) {
        t.push(vec![num(*d), num(r.gain_db[0]), num(r.gain_db[1])]);
    }
    let snr: Vec<f64> = rows
        .first()
        .map(|r| r.snr.map(linear_to_db).to_vec())
        .unwrap_or_default();
    let json = json!({ "point": point_json(&point), "snr_db": snr, "rows": rows });
    Ok(Report::Document { json, table: t })
}

pub fn disagreement(
    cfg: &mut RunConfig,
    mc: McFlags,
    player: u8,
    a_other: f64,
    scales_db: &[f64],
) -> Result<Report> {
    apply_mc(cfg, mc);
    let (p1, p2) = cfg.models()?;
    let model = if player == 1 { p1 } else { p2 };
    let scales: Vec<f64> = scales_db.iter().map(|&d| db_to_linear(d)).collect();
    let rows = disagreement_rate(
        &model,
        a_other,
        &scales,
        cfg.montecarlo.trials,
        cfg.montecarlo.seed,
    )?;
    let mut t = Table::new(&["scale_db", "rate", "stderr"]);
    for (d, r) in scales_db.iter().zip(&rows) {
        t.push(vec![num(*d), num(r.rate), num(r.stderr)]);
    }
    Ok(Report::Table(t))
}

pub fn sweep(
    cfg: &mut RunConfig,
    solver: SolverFlags,
    param: &str,
    values: &[f64],
) -> Result<Report> {
    apply_solver(cfg, solver);
    let path: ParamPath = param
        .parse()
        .map_err(|e: isrgame_core::Error| usage(e.to_string()))?;
    let in_db = !matches!(path.field, SweepField::DirectShape | SweepField::CrossShape);
    let linear: Vec<f64> = values
        .iter()
        .map(|&v| if in_db { db_to_linear(v) } else { v })
        .collect();
    let (p1, p2) = cfg.models()?;
    let rows = sweep_param(&p1, &p2, path, &linear, &cfg.solver_options());
    let mut t = Table::new(&[
        "value",
        "interior_count",
        "a1",
        "a2",
        "q1",
        "q2",
        "residual",
        "failures",
        "error",
    ]);
    for (v, r) in values.iter().zip(&rows) {
        let n = r.interior().count();
        let base = |t: &mut Table, cells: [String; 5]| {
            let mut row = vec![num(*v), n.to_string()];
            row.extend(cells);
            row.push(r.failures.len().to_string());
            row.push(r.error.clone().unwrap_or_default());
            t.push(row);
        };
        if n == 0 {
            base(&mut t, Default::default());
        }
        for p in r.interior() {
            base(
                &mut t,
                [num(p.a1), num(p.a2), num(p.q1), num(p.q2), num(p.residual)],
            );
        }
    }
    let json = json!({
        "param": path.to_string(),
        "values": values,
        "units": if in_db { "dB" } else { "linear" },
        "rows": rows,
    });
    Ok(Report::Document { json, table: t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-3:12:1").unwrap().len(), 16);
        assert_eq!(parse_range("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_range("2:2:1").unwrap(), vec![2.0]);
        for bad in ["1:0:1", "0:1:0", "0:1", "a:b:c"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }
}
