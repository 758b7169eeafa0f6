//! Best-first branch-and-bound on top of the simplex solver.
//!
//! Nodes are ordered by their LP relaxation value;  branching picks the
//! integer variable whose fractional part is closest to one half (ties to
//! the lowest index), which keeps the search deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::lp::{BranchRule, LinearProgram, LpSolution, LpStatus, SolverConfig};
use crate::simplex::solve_lp;

struct Node {
    bound: f64,
    id: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse so the lowest bound pops first,
        // with the node id as a deterministic tie-break.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// (bound, point, simplex iterations, limit hit) of a solved node.
type NodeSolve = Option<(f64, Vec<f64>, u64, bool)>;

pub fn solve_milp(lp: &LinearProgram, config: &SolverConfig) -> Result<LpSolution> {
    lp.validate()?;
    config.validate()?;
    if !lp.integer.iter().any(|&b| b) {
        return solve_lp(lp, config);
    }
    for (j, &is_int) in lp.integer.iter().enumerate() {
        if is_int && !lp.upper[j].is_finite() {
            return Err(Error::InvalidParameter(format!(
                "integer variable {} must have finite bounds",
                lp.names[j]
            )));
        }
    }

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut next_id: u64 = 0;
    let mut nodes: u64 = 0;
    let mut total_iterations: u64 = 0;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    // Best relaxation point seen, reported when a limit cuts the search
    // before any integral incumbent exists.
    let fallback: Option<(f64, Vec<f64>)>;
    let mut limit_hit = false;

    let mut relaxed = lp.clone();
    relaxed.integer = vec![false; lp.num_vars()];

    let solve_node =
        |lower: &[f64], upper: &[f64], relaxed: &mut LinearProgram| -> Result<NodeSolve> {
        relaxed.lower = lower.to_vec();
        relaxed.upper = upper.to_vec();
        let sol = solve_lp(relaxed, config)?;
        match sol.status {
            LpStatus::Optimal => Ok(Some((sol.objective, sol.x, sol.iterations, false))),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::Unsupported(
                "unbounded relaxation in branch and bound".into(),
            )),
            LpStatus::IterationLimit => Ok(Some((sol.objective, sol.x, sol.iterations, true))),
        }
    };

    match solve_node(&lp.lower, &lp.upper, &mut relaxed)? {
        None => {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::INFINITY,
                duals: None,
                iterations: 0,
                nodes: 1,
            })
        }
        Some((bound, x, iters, hit)) => {
            nodes += 1;
            total_iterations += iters;
            limit_hit |= hit;
            fallback = Some((bound, x.clone()));

            heap.push(Node {
                bound,
                id: next_id,
                lower: lp.lower.clone(),
                upper: lp.upper.clone(),
                x,
            });
            next_id += 1;
        }
    }

    while let Some(node) = heap.pop() {
        if limit_hit {
            break;
        }
        if let Some((best, _)) = &incumbent {
            // Best-first: once the best open bound cannot improve on the
            // incumbent, the whole frontier is fathomed.
            if node.bound >= *best - 1e-9 {
                break;
            }
        }

        let frac = select_branch_var(lp, &node.x, config);
        match frac {
            None => {
                let obj = node.bound;
                let better = match &incumbent {
                    None => true,
                    Some((best, _)) => obj < *best - 1e-12,
                };
                if better {
                    incumbent = Some((obj, node.x));
                }
            }
            Some(j) => {
                let xj = node.x[j];
                let floor = xj.floor();
                for (lo, hi) in [
                    (node.lower[j], floor.min(node.upper[j])),
                    ((floor + 1.0).max(node.lower[j]), node.upper[j]),
                ] {
                    if lo > hi {
                        continue;
                    }
                    if nodes >= config.max_nodes {
                        limit_hit = true;
                        break;
                    }
                    let mut lower = node.lower.clone();
                    let mut upper = node.upper.clone();
                    lower[j] = lo;
                    upper[j] = hi;
                    if let Some((bound, x, iters, hit)) = solve_node(&lower, &upper, &mut relaxed)? {
                        nodes += 1;
                        total_iterations += iters;
                        limit_hit |= hit;
                        let prune = incumbent
                            .as_ref()
                            .map(|(best, _)| bound >= *best - 1e-9)
                            .unwrap_or(false);
                        if !prune {
                            heap.push(Node {
                                bound,
                                id: next_id,
                                lower,
                                upper,
                                x,
                            });
                            next_id += 1;
                        }
                    } else {
                        nodes += 1;
                    }
                }
            }
        }
    }

    let status = if limit_hit {
        LpStatus::IterationLimit
    } else if incumbent.is_some() {
        LpStatus::Optimal
    } else {
        LpStatus::Infeasible
    };
    let (objective, x) = match incumbent {
        Some((_, mut x)) => {
            for (j, v) in x.iter_mut().enumerate() {
                if lp.integer[j] {
                    *v = v.round();
                }
            }
            let obj: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            (obj, x)
        }
        None => match (status, fallback) {
            (LpStatus::IterationLimit, Some((bound, x))) => (bound, x),
            _ => (f64::INFINITY, Vec::new()),
        },
    };
    Ok(LpSolution {
        status,
        x,
        objective,
        duals: None,
        iterations: total_iterations,
        nodes,
    })
}

fn select_branch_var(lp: &LinearProgram, x: &[f64], config: &SolverConfig) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &is_int) in lp.integer.iter().enumerate() {
        if !is_int {
            continue;
        }
        let frac = x[j] - x[j].floor();
        let dist = frac.min(1.0 - frac);
        if dist <= config.integrality_tol {
            continue;
        }
        match config.branch_rule {
            BranchRule::LowestIndex => return Some(j),
            BranchRule::MostFractional => match best {
                Some((_, d)) if dist <= d => {}
                _ => best = Some((j, dist)),
            },
        }
    }
    best.map(|(j, _)| j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Relation, Row};

    fn lp(
        objective: Vec<f64>,
        rows: Vec<(Vec<f64>, Relation, f64)>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        integer: Vec<bool>,
    ) -> LinearProgram {
        let n = objective.len();
        LinearProgram {
            objective,
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, (coeffs, rel, rhs))| Row {
                    name: format!("r{i}"),
                    coeffs,
                    rel,
                    rhs,
                })
                .collect(),
            lower,
            upper,
            integer,
            names: (0..n).map(|j| format!("x{j}")).collect(),
        }
    }

    #[test]
    fn rounds_down_single_variable() {
        let p = lp(
            vec![-1.0],
            vec![(vec![1.0], Relation::Le, 2.5)],
            vec![0.0],
            vec![10.0],
            vec![true],
        );
        let s = solve_milp(&p, &SolverConfig::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x[0], 2.0);
        assert!((s.objective + 2.0).abs() < 1e-9);
    }

    #[test]
    fn no_integer_flags_matches_lp() {
        let p = lp(
            vec![-1.0, -2.0],
            vec![(vec![1.0, 1.0], Relation::Le, 4.0)],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
            vec![false, false],
        );
        let milp = solve_milp(&p, &SolverConfig::default()).unwrap();
        let relax = solve_lp(&p, &SolverConfig::default()).unwrap();
        assert_eq!(milp, relax);
    }

    #[test]
    fn small_knapsack_matches_enumeration() {
        // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, binaries.
        let p = lp(
            vec![-5.0, -4.0, -3.0],
            vec![(vec![2.0, 3.0, 1.0], Relation::Le, 5.0)],
            vec![0.0; 3],
            vec![1.0; 3],
            vec![true; 3],
        );
        let s = solve_milp(&p, &SolverConfig::default()).unwrap();
        let mut best = f64::INFINITY;
        for mask in 0..8u32 {
            let pick: Vec<f64> = (0..3).map(|j| ((mask >> j) & 1) as f64).collect();
            let used = 2.0 * pick[0] + 3.0 * pick[1] + pick[2];
            if used <= 5.0 {
                let v = -5.0 * pick[0] - 4.0 * pick[1] - 3.0 * pick[2];
                best = best.min(v);
            }
        }
        assert!((s.objective - best).abs() < 1e-9);
    }

    #[test]
    fn relaxation_bounds_milp_objective() {
        let p = lp(
            vec![1.0, 1.0],
            vec![(vec![2.0, 1.0], Relation::Ge, 3.1)],
            vec![0.0, 0.0],
            vec![5.0, 5.0],
            vec![true, true],
        );
        let milp = solve_milp(&p, &SolverConfig::default()).unwrap();
        let mut relaxed = p.clone();
        relaxed.integer = vec![false, false];
        let rel = solve_lp(&relaxed, &SolverConfig::default()).unwrap();
        assert!(rel.objective <= milp.objective + 1e-9);
    }

    #[test]
    fn infeasible_integer_program() {
        // 0.4 <= x <= 0.6 admits no integer point.
        let p = lp(
            vec![1.0],
            vec![
                (vec![1.0], Relation::Ge, 0.4),
                (vec![1.0], Relation::Le, 0.6),
            ],
            vec![0.0],
            vec![1.0],
            vec![true],
        );
        let s = solve_milp(&p, &SolverConfig::default()).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn node_limit_returns_incumbent_status() {
        let p = lp(
            vec![-1.0, -1.0, -1.0],
            vec![(vec![2.0, 2.0, 2.0], Relation::Le, 3.0)],
            vec![0.0; 3],
            vec![1.0; 3],
            vec![true; 3],
        );
        let config = SolverConfig {
            max_nodes: 1,
            ..SolverConfig::default()
        };
        let s = solve_milp(&p, &config).unwrap();
        assert_eq!(s.status, LpStatus::IterationLimit);
    }
}
