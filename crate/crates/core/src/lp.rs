//! Matrix-form linear/mixed-integer program types shared by the simplex
//! and branch-and-bound solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Eq => write!(f, "="),
            Relation::Ge => write!(f, ">="),
        }
    }
}

/// One dense constraint row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

/// Minimization problem: `min c·x` subject to rows, variable bounds, and
/// optional per-variable integrality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    /// Objective coefficients (minimize).
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-variable lower bounds (finite).
    pub lower: Vec<f64>,
    /// Per-variable upper bounds (`f64::INFINITY` when unbounded).
    pub upper: Vec<f64>,
    /// Per-variable integrality flags.
    pub integer: Vec<bool>,
    /// Variable names, index-aligned with the coefficient vectors.
    pub names: Vec<String>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n || self.integer.len() != n || self.names.len() != n {
            return Err(Error::DimensionMismatch(
                "bounds/flags/names must match variable count".into(),
            ));
        }
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !l.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "variable {j} needs a finite lower bound"
                )));
            }
            if l > u {
                return Err(Error::InvalidParameter(format!(
                    "variable {j} has lower bound {l} above upper bound {u}"
                )));
            }
        }
        for row in &self.rows {
            if row.coeffs.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row `{}` has {} coefficients, expected {n}",
                    row.name,
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "row `{}` has non-finite rhs",
                    row.name
                )));
            }
        }
        Ok(())
    }

    /// Plain-text dump for external verification. Format:
    ///
    /// ```text
    /// vars: <name>:<lower>:<upper>[:int] ...
    /// min: c1 c2 ...
    /// <name>: a1 a2 ... <rel> rhs
    /// ```
    pub fn dump_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        out.push_str("vars:");
        for j in 0..self.num_vars() {
            let _ = write!(out, " {}:{}:{}", self.names[j], self.lower[j], self.upper[j]);
            if self.integer[j] {
                out.push_str(":int");
            }
        }
        out.push('\n');
        out.push_str("min:");
        for c in &self.objective {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{}:", row.name);
            for a in &row.coeffs {
                let _ = write!(out, " {a}");
            }
            let _ = writeln!(out, " {} {}", row.rel, row.rhs);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Solver result. `x` is in the original variable space; `duals` (row
/// multipliers, LP solves only) follow the convention y ≥ 0 for `>=` rows,
/// y ≤ 0 for `<=` rows, free for `=` rows, with b·y equal to the optimal
/// objective when no variable has a finite upper bound and all lower bounds
/// are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals: Option<Vec<f64>>,
    pub iterations: u64,
    pub nodes: u64,
}

/// Branch selection rule for the MILP search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchRule {
    /// Fractional part closest to one half; ties to the lowest index.
    MostFractional,
    /// Lowest-index fractional variable.
    LowestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Absolute row/bound violation accepted as feasible.
    pub feasibility_tol: f64,
    /// Reduced-cost threshold for simplex optimality.
    pub optimality_tol: f64,
    /// Distance from an integer accepted as integral.
    pub integrality_tol: f64,
    pub max_iterations: u64,
    pub max_nodes: u64,
    pub branch_rule: BranchRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-6,
            optimality_tol: 1e-9,
            integrality_tol: 1e-6,
            max_iterations: 50_000,
            max_nodes: 200_000,
            branch_rule: BranchRule::MostFractional,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feasibility_tol <= 0.0 || self.optimality_tol <= 0.0 || self.integrality_tol <= 0.0 {
            return Err(Error::InvalidParameter("solver tolerances must be > 0".into()));
        }
        Ok(())
    }
}
