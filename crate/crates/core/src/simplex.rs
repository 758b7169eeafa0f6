//! Two-phase dense-tableau simplex.
//!
//! Variables are shifted by their (finite) lower bounds; finite upper
//! bounds become internal rows. Every internal row receives an artificial
//! variable, so phase 1 always starts from the identity basis and the
//! final tableau's artificial columns carry the basis inverse, which is
//! where the row duals are read from. Pricing is Dantzig's rule with a
//! permanent switch to Bland's rule once a degeneracy streak is detected.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpSolution, LpStatus, Relation, SolverConfig};

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const DEGENERACY_STREAK_LIMIT: u32 = 50;

pub fn solve_lp(lp: &LinearProgram, config: &SolverConfig) -> Result<LpSolution> {
    lp.validate()?;
    config.validate()?;
    let mut t = Tableau::build(lp);
    let status = t.run(config);
    Ok(t.extract(lp, status))
}

enum Phase {
    One,
    Two,
}

struct Tableau {
    n_struct: usize,
    n_slack: usize,
    m: usize,
    /// Row-major coefficients, width `n_struct + n_slack + m`.
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Phase-1 reduced cost row.
    cost1: Vec<f64>,
    /// Phase-2 reduced cost row.
    cost2: Vec<f64>,
    basis: Vec<usize>,
    /// Internal rows whose sign was flipped to normalize the rhs.
    flipped: Vec<bool>,
    n_orig_rows: usize,
    iterations: u64,
    bland: bool,
    degen_streak: u32,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        // Internal rows: original rows on shifted variables, then one bound
        // row per finite upper bound.
        let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(lp.rows.len());
        for row in &lp.rows {
            let shift: f64 = row
                .coeffs
                .iter()
                .zip(&lp.lower)
                .map(|(a, l)| a * l)
                .sum();
            rows.push((row.coeffs.clone(), row.rel, row.rhs - shift));
        }
        for j in 0..n {
            if lp.upper[j].is_finite() {
                let mut coeffs = vec![0.0; n];
                coeffs[j] = 1.0;
                rows.push((coeffs, Relation::Le, lp.upper[j] - lp.lower[j]));
            }
        }

        let m = rows.len();
        let mut flipped = vec![false; m];
        for (i, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
            if *rhs < 0.0 {
                flipped[i] = true;
                *rhs = -*rhs;
                for c in coeffs.iter_mut() {
                    *c = -*c;
                }
                *rel = match *rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }

        let n_slack = rows.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
        let width = n + n_slack + m;
        let mut a = vec![vec![0.0; width]; m];
        let mut rhs = vec![0.0; m];
        let mut slack_col = n;
        for (i, (coeffs, rel, b)) in rows.iter().enumerate() {
            a[i][..n].copy_from_slice(coeffs);
            match rel {
                Relation::Le => {
                    a[i][slack_col] = 1.0;
                    slack_col += 1;
                }
                Relation::Ge => {
                    a[i][slack_col] = -1.0;
                    slack_col += 1;
                }
                Relation::Eq => {}
            }
            a[i][n + n_slack + i] = 1.0;
            rhs[i] = *b;
        }

        // Phase-1 costs: artificials cost one; reduce against the
        // all-artificial starting basis.
        let mut cost1 = vec![0.0; width];
        for i in 0..m {
            for j in 0..n + n_slack {
                cost1[j] -= a[i][j];
            }
        }
        // Phase-2 costs on shifted structurals; artificials cost zero.
        let mut cost2 = vec![0.0; width];
        cost2[..n].copy_from_slice(&lp.objective);

        let basis = (0..m).map(|i| n + n_slack + i).collect();
        Tableau {
            n_struct: n,
            n_slack,
            m,
            a,
            rhs,
            cost1,
            cost2,
            basis,
            flipped,
            n_orig_rows: lp.rows.len(),
            iterations: 0,
            bland: false,
            degen_streak: 0,
        }
    }

    fn art_start(&self) -> usize {
        self.n_struct + self.n_slack
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.a[r][c];
        let inv = 1.0 / piv;
        for v in self.a[r].iter_mut() {
            *v *= inv;
        }
        self.rhs[r] *= inv;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let factor = self.a[i][c];
            if factor != 0.0 {
                for j in 0..self.a[i].len() {
                    self.a[i][j] -= factor * self.a[r][j];
                }
                self.rhs[i] -= factor * self.rhs[r];
            }
        }
        for cost in [&mut self.cost1, &mut self.cost2] {
            let factor = cost[c];
            if factor != 0.0 {
                for j in 0..cost.len() {
                    cost[j] -= factor * self.a[r][j];
                }
            }
        }
        self.basis[r] = c;
    }

    fn choose_entering(&self, cost: &[f64], opt_tol: f64) -> Option<usize> {
        let limit = self.art_start();
        if self.bland {
            (0..limit).find(|&j| cost[j] < -opt_tol)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..limit {
                if cost[j] < -opt_tol {
                    match best {
                        Some((_, c)) if cost[j] >= c => {}
                        _ => best = Some((j, cost[j])),
                    }
                }
            }
            best.map(|(j, _)| j)
        }
    }

    fn choose_leaving(&self, enter: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let d = self.a[i][enter];
            if d > PIVOT_TOL {
                let theta = self.rhs[i] / d;
                match best {
                    None => best = Some((i, theta)),
                    Some((bi, bt)) => {
                        if theta < bt - DEGENERATE_STEP
                            || ((theta - bt).abs() <= DEGENERATE_STEP
                                && self.basis[i] < self.basis[bi])
                        {
                            best = Some((i, theta));
                        }
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn iterate(&mut self, phase: Phase, config: &SolverConfig) -> LpStatus {
        loop {
            let cost = match phase {
                Phase::One => &self.cost1,
                Phase::Two => &self.cost2,
            };
            let Some(enter) = self.choose_entering(cost, config.optimality_tol) else {
                return LpStatus::Optimal;
            };
            let Some(leave) = self.choose_leaving(enter) else {
                return LpStatus::Unbounded;
            };
            if self.rhs[leave] / self.a[leave][enter] <= DEGENERATE_STEP {
                self.degen_streak += 1;
                if self.degen_streak >= DEGENERACY_STREAK_LIMIT {
                    self.bland = true;
                }
            } else {
                self.degen_streak = 0;
            }
            self.pivot(leave, enter);
            self.iterations += 1;
            if self.iterations >= config.max_iterations {
                return LpStatus::IterationLimit;
            }
        }
    }

    fn phase1_objective(&self) -> f64 {
        let art = self.art_start();
        (0..self.m)
            .filter(|&i| self.basis[i] >= art)
            .map(|i| self.rhs[i])
            .sum()
    }

    fn drive_out_artificials(&mut self) {
        let art = self.art_start();
        for r in 0..self.m {
            if self.basis[r] >= art {
                if let Some(j) = (0..art).find(|&j| self.a[r][j].abs() > PIVOT_TOL) {
                    self.pivot(r, j);
                    self.iterations += 1;
                }
                // An all-zero row is redundant; its artificial stays basic
                // at value zero and never moves again.
            }
        }
    }

    fn run(&mut self, config: &SolverConfig) -> LpStatus {
        match self.iterate(Phase::One, config) {
            LpStatus::Optimal => {}
            LpStatus::Unbounded => return LpStatus::Infeasible, // phase 1 is bounded below
            other => return other,
        }
        if self.phase1_objective() > config.feasibility_tol {
            return LpStatus::Infeasible;
        }
        self.drive_out_artificials();
        self.iterate(Phase::Two, config)
    }

    fn extract(&self, lp: &LinearProgram, status: LpStatus) -> LpSolution {
        let n = self.n_struct;
        let mut shifted = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                shifted[b] = self.rhs[i];
            }
        }
        let x: Vec<f64> = (0..n).map(|j| lp.lower[j] + shifted[j]).collect();
        let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let duals = if status == LpStatus::Optimal {
            let art = self.art_start();
            let y: Vec<f64> = (0..self.n_orig_rows)
                .map(|i| {
                    let v = -self.cost2[art + i];
                    if self.flipped[i] {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            Some(y)
        } else {
            None
        };
        LpSolution {
            status,
            x,
            objective,
            duals,
            iterations: self.iterations,
            nodes: 0,
        }
    }
}

/// Returns `Ok(())` when `x` satisfies all rows and bounds within `tol`.
pub fn check_point(lp: &LinearProgram, x: &[f64], tol: f64) -> Result<()> {
    if x.len() != lp.num_vars() {
        return Err(Error::DimensionMismatch("point length".into()));
    }
    for (j, &v) in x.iter().enumerate() {
        if v < lp.lower[j] - tol || v > lp.upper[j] + tol {
            return Err(Error::InvalidParameter(format!(
                "variable {} out of bounds: {v}",
                lp.names[j]
            )));
        }
    }
    for row in &lp.rows {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let ok = match row.rel {
            Relation::Le => lhs <= row.rhs + tol,
            Relation::Ge => lhs >= row.rhs - tol,
            Relation::Eq => (lhs - row.rhs).abs() <= tol,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "row `{}` violated: lhs {lhs}, rhs {}",
                row.name, row.rhs
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{BranchRule, Row};

    pub(crate) fn lp(
        objective: Vec<f64>,
        rows: Vec<(Vec<f64>, Relation, f64)>,
        lower: Vec<f64>,
        upper: Vec<f64>,
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
            integer: vec![false; n],
            names: (0..n).map(|j| format!("x{j}")).collect(),
        }
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn min_x_above_three() {
        let p = lp(
            vec![1.0],
            vec![(vec![1.0], Relation::Ge, 3.0)],
            vec![0.0],
            vec![10.0],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
        let y = s.duals.unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn binding_sum_constraint() {
        let p = lp(
            vec![-1.0, -1.0],
            vec![
                (vec![1.0, 1.0], Relation::Le, 4.0),
                (vec![1.0, 0.0], Relation::Le, 3.0),
            ],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 4.0).abs() < 1e-9);
        // Dual of the binding sum row is -1; b'y equals the objective.
        let y = s.duals.unwrap();
        let dual_obj = 4.0 * y[0] + 3.0 * y[1];
        assert!((dual_obj - s.objective).abs() < 1e-9);
        assert!(y[0] <= 1e-12);
    }

    #[test]
    fn contradictory_rows_infeasible() {
        let p = lp(
            vec![1.0],
            vec![
                (vec![1.0], Relation::Ge, 3.0),
                (vec![1.0], Relation::Le, 2.0),
            ],
            vec![0.0],
            vec![f64::INFINITY],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let p = lp(
            vec![-1.0],
            vec![(vec![1.0], Relation::Ge, 1.0)],
            vec![0.0],
            vec![f64::INFINITY],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_row_and_duals() {
        // min 2a + 3b s.t. a + b = 5, a <= 4
        let p = lp(
            vec![2.0, 3.0],
            vec![
                (vec![1.0, 1.0], Relation::Eq, 5.0),
                (vec![1.0, 0.0], Relation::Le, 4.0),
            ],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 4.0).abs() < 1e-9);
        assert!((s.x[1] - 1.0).abs() < 1e-9);
        assert!((s.objective - 11.0).abs() < 1e-9);
        let y = s.duals.unwrap();
        let dual_obj = 5.0 * y[0] + 4.0 * y[1];
        assert!((dual_obj - s.objective).abs() < 1e-9);
        // Reduced costs c - A'y must be nonnegative.
        let rc_a = 2.0 - (y[0] + y[1]);
        let rc_b = 3.0 - y[0];
        assert!(rc_a > -1e-9 && rc_b > -1e-9);
    }

    #[test]
    fn degenerate_cycling_prone_lp_terminates() {
        // Beale's cycling example; Dantzig's rule cycles without
        // safeguards.
        let p = lp(
            vec![-0.75, 150.0, -0.02, 6.0],
            vec![
                (vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0),
                (vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0),
                (vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0),
            ],
            vec![0.0; 4],
            vec![f64::INFINITY; 4],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn iteration_limit_reported() {
        let mut config = SolverConfig {
            max_iterations: 1,
            ..cfg()
        };
        config.branch_rule = BranchRule::MostFractional;
        let p = lp(
            vec![-1.0, -1.0],
            vec![
                (vec![1.0, 2.0], Relation::Le, 4.0),
                (vec![2.0, 1.0], Relation::Le, 4.0),
            ],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
        );
        let s = solve_lp(&p, &config).unwrap();
        assert_eq!(s.status, LpStatus::IterationLimit);
    }

    #[test]
    fn shifted_lower_bounds() {
        // min x + y with x >= 2, y in [1, 5], x + y >= 4.
        let p = lp(
            vec![1.0, 1.0],
            vec![(vec![1.0, 1.0], Relation::Ge, 4.0)],
            vec![2.0, 1.0],
            vec![f64::INFINITY, 5.0],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 4.0).abs() < 1e-9);
        assert!(s.x[0] >= 2.0 - 1e-9 && s.x[1] >= 1.0 - 1e-9);
        check_point(&p, &s.x, 1e-6).unwrap();
    }

    #[test]
    fn fixed_variable_via_bounds() {
        // Upper bound equal to lower bound pins the variable.
        let p = lp(
            vec![1.0, 1.0],
            vec![(vec![1.0, 1.0], Relation::Ge, 3.0)],
            vec![1.0, 0.0],
            vec![1.0, f64::INFINITY],
        );
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.x[1] - 2.0).abs() < 1e-9);
    }
}
