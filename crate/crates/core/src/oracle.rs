//! Brute-force reference solvers: every 0/1 indicator assignment is
//! enumerated and a continuous LP is solved per configuration. Used only
//! by tests and the `verify` command; the integer search here is fully
//! independent of branch-and-bound.

use serde::{Deserialize, Serialize};

use crate::eps::{sweep_with, EpsConfig, MethodTag, SweepOutcome};
use crate::error::{Error, Result};
use crate::formulation::{build_milp, ObjectiveMode};
use crate::lp::{LinearProgram, LpSolution, LpStatus, SolverConfig};
use crate::model::NetworkInstance;
use crate::parallel;
use crate::simplex::solve_lp;

/// Enumeration refuses instances with more binary variables than this.
pub const ENUMERATION_BOUND: usize = 16;

/// One enumerated configuration: indicator assignment, LP status, objective
/// (infinite when infeasible).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigLog {
    pub indicators: Vec<u8>,
    pub status: LpStatus,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Minimum over feasible configurations; `None` when all are infeasible.
    pub objective: Option<f64>,
    /// Every configuration attaining the optimum within 1e-9 relative,
    /// lexicographically ordered.
    pub optimal_indicators: Vec<Vec<u8>>,
    /// Full point of the lexicographically smallest optimal configuration.
    pub best_point: Option<Vec<f64>>,
    pub log: Vec<ConfigLog>,
}

fn integer_columns(lp: &LinearProgram) -> Vec<usize> {
    lp.integer
        .iter()
        .enumerate()
        .filter_map(|(j, &b)| b.then_some(j))
        .collect()
}

/// Solves `lp` by enumerating all assignments of its integer columns and
/// solving the continuous LP per assignment. Ties break toward the
/// lexicographically smallest assignment.
fn enumerate_lp(lp: &LinearProgram, config: &SolverConfig) -> Result<(LpSolution, Vec<ConfigLog>)> {
    let cols = integer_columns(lp);
    let k = cols.len();
    if k > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            size: k,
            max: ENUMERATION_BOUND,
        });
    }
    let total = 1usize << k;

    let runs: Vec<Result<(Vec<u8>, LpSolution)>> = parallel::map_range(total, |m| {
        // Bit layout keeps ascending m aligned with lexicographic order of
        // the indicator vector.
        let assignment: Vec<u8> = (0..k).map(|j| ((m >> (k - 1 - j)) & 1) as u8).collect();
        let mut fixed = lp.clone();
        fixed.integer = vec![false; lp.num_vars()];
        for (pos, &col) in cols.iter().enumerate() {
            fixed.lower[col] = assignment[pos] as f64;
            fixed.upper[col] = assignment[pos] as f64;
        }
        let sol = solve_lp(&fixed, config)?;
        Ok((assignment, sol))
    });

    let mut log = Vec::with_capacity(total);
    let mut iterations = 0;
    let mut best: Option<(Vec<u8>, LpSolution)> = None;
    for run in runs {
        let (assignment, sol) = run?;
        iterations += sol.iterations;
        log.push(ConfigLog {
            indicators: assignment.clone(),
            status: sol.status,
            objective: if sol.status == LpStatus::Optimal {
                sol.objective
            } else {
                f64::INFINITY
            },
        });
        if sol.status == LpStatus::Optimal {
            let replace = match &best {
                None => true,
                Some((_, b)) => sol.objective < b.objective,
            };
            if replace {
                best = Some((assignment, sol));
            }
        }
    }

    let solution = match best {
        Some((_, mut sol)) => {
            sol.iterations = iterations;
            sol.nodes = total as u64;
            sol.duals = None;
            sol
        }
        None => LpSolution {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective: f64::INFINITY,
            duals: None,
            iterations,
            nodes: total as u64,
        },
    };
    Ok((solution, log))
}

/// Exhaustive reference for [`crate::branch_bound::solve_milp`] on the
/// network model: enumerates all 2^(F+W+I) indicator assignments.
pub fn brute_force_milp(
    inst: &NetworkInstance,
    mode: ObjectiveMode,
    cap: Option<f64>,
) -> Result<OracleResult> {
    let k = inst.dims.indicator_count();
    if k > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            size: k,
            max: ENUMERATION_BOUND,
        });
    }
    let lp = build_milp(inst, mode, cap)?;
    let config = SolverConfig::default();
    let (sol, log) = enumerate_lp(&lp, &config)?;
    let objective = (sol.status == LpStatus::Optimal).then_some(sol.objective);
    let optimal_indicators = match objective {
        None => Vec::new(),
        Some(obj) => {
            let tol = 1e-9 * obj.abs().max(1.0);
            log.iter()
                .filter(|c| c.status == LpStatus::Optimal && (c.objective - obj).abs() <= tol)
                .map(|c| c.indicators.clone())
                .collect()
        }
    };
    Ok(OracleResult {
        objective,
        optimal_indicators,
        best_point: (sol.status == LpStatus::Optimal).then_some(sol.x),
        log,
    })
}

/// Reference ε-sweep where every capped solve is enumerated. Mirrors
/// [`crate::eps::sweep`] exactly apart from the integer search, so the two
/// fronts must agree point for point.
pub fn brute_force_front(inst: &NetworkInstance, grid_points: usize) -> Result<SweepOutcome> {
    let k = inst.dims.indicator_count();
    if k > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            size: k,
            max: ENUMERATION_BOUND,
        });
    }
    let config = EpsConfig {
        grid_points,
        ..EpsConfig::default()
    };
    let backend = |lp: &LinearProgram, cfg: &SolverConfig| enumerate_lp(lp, cfg).map(|(s, _)| s);
    sweep_with(inst, &config, &backend, MethodTag::Oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch_bound::solve_milp;
    use crate::io::samples::{bundled_case, unit_instance};
    use crate::io::{generate, GeneratorSpec};
    use crate::model::Dims;

    #[test]
    fn bundled_cost_matches_branch_and_bound() {
        let inst = bundled_case();
        let oracle = brute_force_milp(&inst, ObjectiveMode::Cost, None).unwrap();
        assert_eq!(oracle.log.len(), 64);
        let lp = build_milp(&inst, ObjectiveMode::Cost, None).unwrap();
        let milp = solve_milp(&lp, &SolverConfig::default()).unwrap();
        let obj = oracle.objective.unwrap();
        assert!(
            (milp.objective - obj).abs() <= 1e-6 * obj.abs().max(1.0),
            "milp {} vs oracle {obj}",
            milp.objective
        );
    }

    #[test]
    fn free_setup_keeps_all_open_among_optima() {
        let mut inst = unit_instance();
        inst.ra = vec![0.0];
        inst.rb = vec![0.0];
        inst.rd = vec![0.0];
        let oracle = brute_force_milp(&inst, ObjectiveMode::Cost, None).unwrap();
        assert!(oracle.optimal_indicators.contains(&vec![1, 1, 1]));
    }

    #[test]
    fn zero_demand_closes_everything() {
        let mut inst = unit_instance();
        inst.q = vec![0.0];
        inst.hd = 0.0;
        let oracle = brute_force_milp(&inst, ObjectiveMode::Cost, None).unwrap();
        assert_eq!(oracle.objective, Some(0.0));
        assert_eq!(oracle.optimal_indicators[0], vec![0, 0, 0]);
    }

    #[test]
    fn refuses_oversized_instances() {
        let dims = Dims {
            f: 6,
            w: 6,
            c: 1,
            i: 5,
            tf: 1,
            tw: 1,
            tk: 1,
            ti: 1,
        };
        let inst = generate(&GeneratorSpec::new(1, dims)).unwrap();
        let err = brute_force_milp(&inst, ObjectiveMode::Cost, None).unwrap_err();
        assert!(matches!(err, Error::EnumerationBound { size: 17, .. }));
    }

    #[test]
    fn two_point_front_is_the_anchor_pair() {
        let inst = crate::eps::tests::tradeoff_unit_instance();
        let out = brute_force_front(&inst, 2).unwrap();
        assert!(!out.front.is_empty() && out.front.len() <= 2);
        assert!(out.front.len() >= 2 || out.payoff.ideal == out.payoff.nadir);
    }

    #[test]
    fn tradeoff_front_has_spread() {
        let inst = crate::eps::tests::tradeoff_unit_instance();
        let out = brute_force_front(&inst, 5).unwrap();
        assert!(out.front.len() >= 2);
    }

    #[test]
    fn front_matches_eps_sweep_point_for_point() {
        let inst = bundled_case();
        let n = 7;
        let exact = crate::eps::sweep(
            &inst,
            &EpsConfig {
                grid_points: n,
                ..EpsConfig::default()
            },
        )
        .unwrap();
        let brute = brute_force_front(&inst, n).unwrap();
        assert_eq!(exact.front.len(), brute.front.len());
        for (a, b) in exact.front.entries.iter().zip(&brute.front.entries) {
            assert!((a.f1 - b.f1).abs() <= 1e-6 * a.f1.abs().max(1.0));
            assert!((a.f2 - b.f2).abs() <= 1e-6 * a.f2.abs().max(1.0));
        }
    }
}
