//! ε-constraint method: payoff table, grid sweep, Pareto assembly.
//!
//! One objective stays as the objective while the other becomes a bound
//! that is swept across the payoff range. Every solve is refined
//! lexicographically (the free objective is re-minimized with the primary
//! one pinned at its optimum) so returned points are never weakly
//! dominated.

use serde::{Deserialize, Serialize};

use crate::branch_bound::solve_milp;
use crate::error::{Error, Result};
use crate::formulation::{build_milp, ObjectiveMode, VariableLayout};
use crate::io::instance_hash;
use crate::lp::{LinearProgram, LpSolution, LpStatus, SolverConfig};
use crate::model::{evaluate_cost, evaluate_emissions, FlowSolution, IndicatorMode, NetworkInstance};
use crate::parallel;
use crate::pareto::{FrontEntry, FrontMetadata, ParetoFront, Provenance};
use crate::simplex::solve_lp;

/// Slack added when pinning an objective at its optimum for the
/// lexicographic refinement solve.
const LEX_SLACK: f64 = 1e-9;

/// Which objective becomes the swept constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstrainedObjective {
    /// Sweep over cost, minimize emissions.
    F1,
    /// Sweep over emissions, minimize cost (default; fronts are plotted
    /// with cost on the x-axis).
    F2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsConfig {
    /// Grid points over the constrained objective, endpoints included.
    pub grid_points: usize,
    pub constrain: ConstrainedObjective,
    pub solver: SolverConfig,
    /// Solve LP relaxations instead of MILPs (indicators range over [0, 1]).
    pub relaxed: bool,
}

impl Default for EpsConfig {
    fn default() -> Self {
        EpsConfig {
            grid_points: 20,
            constrain: ConstrainedObjective::F2,
            solver: SolverConfig::default(),
            relaxed: false,
        }
    }
}

impl EpsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::InvalidParameter("grid_points must be >= 2".into()));
        }
        self.solver.validate()
    }
}

/// Anchor solutions and the objective-space box they span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    /// Componentwise minima over the two anchors.
    pub ideal: (f64, f64),
    /// Componentwise maxima over the two anchors.
    pub nadir: (f64, f64),
    pub cost_anchor_objectives: (f64, f64),
    pub emission_anchor_objectives: (f64, f64),
    pub cost_anchor: FlowSolution,
    pub emission_anchor: FlowSolution,
}

/// Aggregate solver effort for one sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    pub solves: u64,
    pub simplex_iterations: u64,
    pub nodes: u64,
    pub grid_points_skipped: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub front: ParetoFront,
    pub payoff: PayoffTable,
    pub stats: SweepStats,
}

/// Which front-building route is driving the sweep; decides the
/// provenance tag on emitted points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MethodTag {
    Eps,
    Oracle,
}

pub(crate) type Backend<'a> = &'a (dyn Fn(&LinearProgram, &SolverConfig) -> Result<LpSolution> + Sync);

struct LexPoint {
    solution: FlowSolution,
    f1: f64,
    f2: f64,
    proven: bool,
}

/// Minimizes `primary` (optionally capped), then re-minimizes the opposite
/// objective with the primary pinned at its optimum plus [`LEX_SLACK`].
fn lex_solve(
    inst: &NetworkInstance,
    config: &EpsConfig,
    solve: Backend<'_>,
    primary: ObjectiveMode,
    primary_cap: Option<f64>,
    stats: &mut SweepStats,
) -> Result<Option<LexPoint>> {
    let layout = VariableLayout::new(inst.dims);
    let mode = if config.relaxed {
        IndicatorMode::Relaxed
    } else {
        IndicatorMode::Exact
    };
    let lp1 = build_milp(inst, primary, primary_cap)?;
    let sol1 = solve(&lp1, &config.solver)?;
    stats.solves += 1;
    stats.simplex_iterations += sol1.iterations;
    stats.nodes += sol1.nodes;

    let (x1, mut proven) = match sol1.status {
        LpStatus::Optimal => (sol1.x, true),
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => {
            return Err(Error::Unsupported("unbounded network model".into()));
        }
        LpStatus::IterationLimit => {
            if sol1.x.is_empty() {
                stats.grid_points_skipped += 1;
                return Ok(None);
            }
            (sol1.x, false)
        }
    };

    let mut best = x1;
    if proven {
        let secondary = match primary {
            ObjectiveMode::Cost | ObjectiveMode::CostWithEmissionCap => {
                ObjectiveMode::EmissionsWithCostCap
            }
            ObjectiveMode::Emissions | ObjectiveMode::EmissionsWithCostCap => {
                ObjectiveMode::CostWithEmissionCap
            }
        };
        let lp2 = build_milp(inst, secondary, Some(sol1.objective + LEX_SLACK))?;
        let sol2 = solve(&lp2, &config.solver)?;
        stats.solves += 1;
        stats.simplex_iterations += sol2.iterations;
        stats.nodes += sol2.nodes;
        match sol2.status {
            LpStatus::Optimal => best = sol2.x,
            LpStatus::IterationLimit => proven = false,
            // Refinement can only fail numerically; the primary point stands.
            LpStatus::Infeasible | LpStatus::Unbounded => {}
        }
    }

    let solution = layout.solution_from_point(&best, mode)?;
    let f1 = evaluate_cost(inst, &solution)?.total;
    let f2 = evaluate_emissions(inst, &solution)?.total;
    Ok(Some(LexPoint {
        solution,
        f1,
        f2,
        proven,
    }))
}

fn default_backend(relaxed: bool) -> impl Fn(&LinearProgram, &SolverConfig) -> Result<LpSolution> + Sync {
    move |lp: &LinearProgram, cfg: &SolverConfig| {
        if relaxed {
            solve_lp(lp, cfg)
        } else {
            solve_milp(lp, cfg)
        }
    }
}

/// Computes ideal and nadir estimates from lexicographic anchor solves.
pub fn payoff_table(inst: &NetworkInstance, config: &EpsConfig) -> Result<PayoffTable> {
    config.validate()?;
    let backend = default_backend(config.relaxed);
    payoff_with(inst, config, &backend)
}

pub(crate) fn payoff_with(
    inst: &NetworkInstance,
    config: &EpsConfig,
    solve: Backend<'_>,
) -> Result<PayoffTable> {
    let mut stats = SweepStats::default();
    let cost_anchor = lex_solve(inst, config, solve, ObjectiveMode::Cost, None, &mut stats)?
        .ok_or(Error::ModelInfeasible)?;
    let emission_anchor = lex_solve(inst, config, solve, ObjectiveMode::Emissions, None, &mut stats)?
        .ok_or(Error::ModelInfeasible)?;
    let a = (cost_anchor.f1, cost_anchor.f2);
    let b = (emission_anchor.f1, emission_anchor.f2);
    Ok(PayoffTable {
        ideal: (a.0.min(b.0), a.1.min(b.1)),
        nadir: (a.0.max(b.0), a.1.max(b.1)),
        cost_anchor_objectives: a,
        emission_anchor_objectives: b,
        cost_anchor: cost_anchor.solution,
        emission_anchor: emission_anchor.solution,
    })
}

/// Sweeps the constrained objective over `grid_points` evenly spaced bounds
/// between ideal and nadir, solving one capped problem per grid point.
/// Infeasible grid points are skipped; solver limits mark the affected
/// point (and the front) as non-exact. Grid solves run concurrently;
/// assembly is ordered by ε, so output does not depend on scheduling.
pub fn sweep(inst: &NetworkInstance, config: &EpsConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let backend = default_backend(config.relaxed);
    sweep_with(inst, config, &backend, MethodTag::Eps)
}

pub(crate) fn sweep_with(
    inst: &NetworkInstance,
    config: &EpsConfig,
    solve: Backend<'_>,
    tag: MethodTag,
) -> Result<SweepOutcome> {
    inst.validate()?;
    let payoff = payoff_with(inst, config, solve)?;
    let (lo, hi) = match config.constrain {
        ConstrainedObjective::F2 => (payoff.ideal.1, payoff.nadir.1),
        ConstrainedObjective::F1 => (payoff.ideal.0, payoff.nadir.0),
    };
    let n = config.grid_points;
    let grid: Vec<f64> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();

    let results: Vec<Result<(Option<LexPoint>, SweepStats)>> = parallel::map_slice(&grid, |&eps| {
        let mut stats = SweepStats::default();
        let primary = match config.constrain {
            ConstrainedObjective::F2 => ObjectiveMode::CostWithEmissionCap,
            ConstrainedObjective::F1 => ObjectiveMode::EmissionsWithCostCap,
        };
        let point = lex_solve(inst, config, solve, primary, Some(eps), &mut stats)?;
        Ok((point, stats))
    });

    let mut stats = SweepStats::default();
    let mut exact = true;
    let mut candidates = Vec::with_capacity(n);
    for (eps, res) in grid.iter().zip(results) {
        let (point, s) = res?;
        stats.solves += s.solves;
        stats.simplex_iterations += s.simplex_iterations;
        stats.nodes += s.nodes;
        stats.grid_points_skipped += s.grid_points_skipped;
        if s.grid_points_skipped > 0 {
            exact = false;
        }
        if let Some(p) = point {
            exact &= p.proven;
            let provenance = match tag {
                MethodTag::Eps => Provenance::Eps { epsilon: *eps },
                MethodTag::Oracle => Provenance::Oracle { epsilon: Some(*eps) },
            };
            candidates.push(FrontEntry {
                f1: p.f1,
                f2: p.f2,
                proven: p.proven,
                provenance,
                solution: p.solution,
            });
        }
    }

    let metadata = FrontMetadata {
        instance_hash: instance_hash(inst),
        method: match tag {
            MethodTag::Eps => "eps".into(),
            MethodTag::Oracle => "oracle".into(),
        },
        config: serde_json::to_value(config).expect("config serializes"),
        exact,
        relaxed: config.relaxed,
        timestamp: None,
    };
    Ok(SweepOutcome {
        front: ParetoFront::from_candidates(metadata, candidates),
        payoff,
        stats,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::io::samples::{bundled_case, unit_instance};
    use crate::model::check_feasibility;
    use crate::model::NetworkInstance;

    /// Unit-width instance with two factory→warehouse options: option 0 is
    /// cheap and emission-heavy, option 1 the reverse.
    pub(crate) fn tradeoff_unit_instance() -> NetworkInstance {
        let mut inst = unit_instance();
        inst.dims.tf = 2;
        inst.ta = vec![vec![vec![1.0]], vec![vec![10.0]]];
        inst.la = vec![vec![vec![1.0]], vec![vec![1.0]]];
        inst.gta = vec![10.0, 1.0];
        inst
    }

    /// Forces a unique feasible flow pattern: capacities pin every tensor.
    fn rigid_instance() -> NetworkInstance {
        let mut inst = unit_instance();
        inst.pa = vec![10.0];
        inst.pb = vec![10.0];
        inst.pd = vec![2.0];
        inst.pr = vec![1.0];
        inst
    }

    #[test]
    fn payoff_collapses_on_single_point_objective_space() {
        let inst = rigid_instance();
        let table = payoff_table(&inst, &EpsConfig::default()).unwrap();
        assert!((table.ideal.0 - table.nadir.0).abs() < 1e-6);
        assert!((table.ideal.1 - table.nadir.1).abs() < 1e-6);
    }

    #[test]
    fn payoff_matches_pure_assignments_on_tradeoff_instance() {
        let inst = tradeoff_unit_instance();
        // Enumerate the two pure transport assignments with the evaluators.
        let mut pure = Vec::new();
        for opt in 0..2 {
            let mut sol = crate::model::FlowSolution::zeros(&inst.dims, IndicatorMode::Exact);
            sol.xa = vec![1.0];
            sol.xb = vec![1.0];
            sol.xd = vec![1.0];
            sol.ya[opt][0][0] = 10.0;
            sol.yb[0][0][0] = 10.0;
            sol.yc[0][0][0] = 2.0;
            sol.yd[0][0][0] = 1.0;
            let f1 = evaluate_cost(&inst, &sol).unwrap().total;
            let f2 = evaluate_emissions(&inst, &sol).unwrap().total;
            pure.push((f1, f2));
        }
        let table = payoff_table(&inst, &EpsConfig::default()).unwrap();
        let ideal = (pure[0].0.min(pure[1].0), pure[0].1.min(pure[1].1));
        let nadir = (pure[0].0.max(pure[1].0), pure[0].1.max(pure[1].1));
        assert!((table.ideal.0 - ideal.0).abs() < 1e-6);
        assert!((table.ideal.1 - ideal.1).abs() < 1e-6);
        assert!((table.nadir.0 - nadir.0).abs() < 1e-6);
        assert!((table.nadir.1 - nadir.1).abs() < 1e-6);
    }

    #[test]
    fn bundled_case_has_objective_spread() {
        let inst = bundled_case();
        let table = payoff_table(&inst, &EpsConfig::default()).unwrap();
        assert!(table.ideal.1 < table.nadir.1);
    }

    #[test]
    fn two_point_sweep_returns_anchors() {
        let inst = tradeoff_unit_instance();
        let config = EpsConfig {
            grid_points: 2,
            ..EpsConfig::default()
        };
        let out = sweep(&inst, &config).unwrap();
        let table = &out.payoff;
        for e in &out.front.entries {
            let is_cost_anchor = (e.f1 - table.cost_anchor_objectives.0).abs() < 1e-6
                && (e.f2 - table.cost_anchor_objectives.1).abs() < 1e-6;
            let is_emission_anchor = (e.f1 - table.emission_anchor_objectives.0).abs() < 1e-6
                && (e.f2 - table.emission_anchor_objectives.1).abs() < 1e-6;
            assert!(is_cost_anchor || is_emission_anchor);
        }
    }

    #[test]
    fn sweep_points_respect_their_epsilon() {
        let inst = tradeoff_unit_instance();
        let config = EpsConfig {
            grid_points: 11,
            ..EpsConfig::default()
        };
        let out = sweep(&inst, &config).unwrap();
        assert!(out.front.len() >= 2);
        for e in &out.front.entries {
            let Provenance::Eps { epsilon } = e.provenance else {
                panic!("eps sweep must tag points with eps provenance");
            };
            let em = evaluate_emissions(&inst, &e.solution).unwrap().total;
            assert!(em <= epsilon + 1e-6, "f2 {em} exceeds eps {epsilon}");
        }
    }

    #[test]
    fn bundled_sweep_is_feasible_and_nondominated() {
        let inst = bundled_case();
        let out = sweep(&inst, &EpsConfig::default()).unwrap();
        assert!(out.front.len() >= 2);
        assert!(out.front.metadata.exact);
        for e in &out.front.entries {
            let report = check_feasibility(&inst, &e.solution, 1e-6).unwrap();
            assert!(report.feasible, "violations: {:?}", report.violations);
        }
        let pts = out.front.points();
        for w in pts.windows(2) {
            assert!(w[0].0 < w[1].0);
            assert!(w[0].1 > w[1].1);
        }
    }

    #[test]
    fn cost_anchor_always_on_front() {
        let inst = bundled_case();
        for n in [2, 5, 9] {
            let config = EpsConfig {
                grid_points: n,
                ..EpsConfig::default()
            };
            let out = sweep(&inst, &config).unwrap();
            let (af1, af2) = out.payoff.cost_anchor_objectives;
            assert!(
                out.front
                    .entries
                    .iter()
                    .any(|e| (e.f1 - af1).abs() < 1e-6 && (e.f2 - af2).abs() < 1e-6),
                "cost anchor missing from {n}-point front"
            );
        }
    }

    #[test]
    fn hypervolume_grows_with_grid_resolution() {
        let inst = tradeoff_unit_instance();
        let reference = {
            let table = payoff_table(&inst, &EpsConfig::default()).unwrap();
            (table.nadir.0 * 1.1, table.nadir.1 * 1.1)
        };
        let mut last = 0.0;
        for n in [2, 5, 11] {
            let config = EpsConfig {
                grid_points: n,
                ..EpsConfig::default()
            };
            let out = sweep(&inst, &config).unwrap();
            let hv = crate::pareto::hypervolume(&out.front.points(), reference).unwrap();
            assert!(hv >= last - 1e-9, "hv shrank from {last} to {hv} at n={n}");
            last = hv;
        }
    }

    #[test]
    fn iteration_limit_marks_front_non_exact() {
        let inst = bundled_case();
        let mut config = EpsConfig {
            grid_points: 3,
            ..EpsConfig::default()
        };
        config.solver.max_iterations = 5;
        let out = sweep(&inst, &config).unwrap();
        assert!(!out.front.metadata.exact);
        for e in &out.front.entries {
            assert!(!e.proven);
        }
    }

    #[test]
    fn cost_constrained_sweep_respects_its_bounds() {
        let inst = tradeoff_unit_instance();
        let config = EpsConfig {
            grid_points: 7,
            constrain: ConstrainedObjective::F1,
            ..EpsConfig::default()
        };
        let out = sweep(&inst, &config).unwrap();
        assert!(out.front.len() >= 2);
        for e in &out.front.entries {
            let Provenance::Eps { epsilon } = e.provenance else {
                panic!("eps provenance expected");
            };
            let cost = evaluate_cost(&inst, &e.solution).unwrap().total;
            assert!(cost <= epsilon + 1e-6, "f1 {cost} exceeds eps {epsilon}");
        }
        let pts = out.front.points();
        for w in pts.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
        }
    }

    #[test]
    fn relaxed_sweep_reports_relaxed_mode() {
        let inst = bundled_case();
        let config = EpsConfig {
            grid_points: 3,
            relaxed: true,
            ..EpsConfig::default()
        };
        let out = sweep(&inst, &config).unwrap();
        assert!(out.front.metadata.relaxed);
        for e in &out.front.entries {
            assert_eq!(e.solution.mode, IndicatorMode::Relaxed);
        }
    }
}
