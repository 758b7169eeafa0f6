//! Pareto front container, dominance filtering, and method-comparison
//! metrics (hypervolume, mutual coverage).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FlowSolution;

/// Objective-point duplicates closer than this in both coordinates
/// collapse to the first occurrence.
pub const DUPLICATE_TOL: f64 = 1e-6;

/// Where a front point came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Provenance {
    Eps { epsilon: f64 },
    Ga { generation: u64 },
    Oracle { epsilon: Option<f64> },
}

impl Provenance {
    pub fn method(&self) -> &'static str {
        match self {
            Provenance::Eps { .. } => "eps",
            Provenance::Ga { .. } => "ga",
            Provenance::Oracle { .. } => "oracle",
        }
    }

    /// The ε or generation column used in CSV exports.
    pub fn epsilon_or_gen(&self) -> String {
        match self {
            Provenance::Eps { epsilon } => format!("{epsilon}"),
            Provenance::Ga { generation } => format!("{generation}"),
            Provenance::Oracle { epsilon } => epsilon.map(|e| format!("{e}")).unwrap_or_default(),
        }
    }
}

/// One nondominated point: objective pair, the solution realizing it,
/// provenance, and whether optimality was proven.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub f1: f64,
    pub f2: f64,
    pub proven: bool,
    pub provenance: Provenance,
    pub solution: FlowSolution,
}

/// Front-level provenance. Wall-clock timing lives in the run manifest so
/// front files stay byte-reproducible; `timestamp` is persisted only when a
/// caller explicitly sets it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMetadata {
    pub instance_hash: String,
    pub method: String,
    pub config: serde_json::Value,
    /// Every point proven optimal.
    pub exact: bool,
    /// Indicators were allowed to range over [0, 1].
    pub relaxed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// Mutually nondominated entries sorted by ascending cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub metadata: FrontMetadata,
    pub entries: Vec<FrontEntry>,
}

impl ParetoFront {
    /// Builds a front from raw candidates: deduplicates objective points
    /// (first occurrence wins), drops dominated entries, sorts by ascending
    /// `f1`.
    pub fn from_candidates(metadata: FrontMetadata, candidates: Vec<FrontEntry>) -> Self {
        let mut kept: Vec<FrontEntry> = Vec::with_capacity(candidates.len());
        for cand in candidates {
            let dup = kept.iter().any(|k| {
                (k.f1 - cand.f1).abs() <= DUPLICATE_TOL && (k.f2 - cand.f2).abs() <= DUPLICATE_TOL
            });
            if !dup {
                kept.push(cand);
            }
        }
        let points: Vec<(f64, f64)> = kept.iter().map(|e| (e.f1, e.f2)).collect();
        let mut entries: Vec<FrontEntry> = kept
            .into_iter()
            .enumerate()
            .filter(|(i, e)| {
                !points.iter().enumerate().any(|(j, p)| {
                    j != *i && (strictly_dominates(*p, (e.f1, e.f2)) || (*p == (e.f1, e.f2) && j < *i))
                })
            })
            .map(|(_, e)| e)
            .collect();
        entries.sort_by(|a, b| a.f1.total_cmp(&b.f1).then(a.f2.total_cmp(&b.f2)));
        ParetoFront { metadata, entries }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|e| (e.f1, e.f2)).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `a` dominates `b` (bi-objective minimization).
pub fn strictly_dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// `a` weakly dominates `b`.
pub fn weakly_dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

/// Nondominated subset of `points`, keeping the first of equal duplicates.
pub fn filter_dominated(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    points
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            !points
                .iter()
                .enumerate()
                .any(|(j, q)| j != *i && (strictly_dominates(*q, **p) || (q == *p && j < *i)))
        })
        .map(|(_, p)| *p)
        .collect()
}

/// Area dominated by `points` relative to `reference` (minimization), by
/// the sorted sweep that is exact for bi-objective fronts.
pub fn hypervolume(points: &[(f64, f64)], reference: (f64, f64)) -> Result<f64> {
    for p in points {
        if p.0 > reference.0 || p.1 > reference.1 {
            return Err(Error::InvalidReference(format!(
                "point ({}, {}) lies beyond reference ({}, {})",
                p.0, p.1, reference.0, reference.1
            )));
        }
    }
    let mut front = filter_dominated(points);
    front.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    for (i, p) in front.iter().enumerate() {
        let next_f1 = front.get(i + 1).map(|q| q.0).unwrap_or(reference.0);
        area += (next_f1 - p.0) * (reference.1 - p.1);
    }
    Ok(area)
}

/// Comparison metrics between two fronts sharing a reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMetrics {
    pub reference: (f64, f64),
    pub hypervolume_a: f64,
    pub hypervolume_b: f64,
    /// hypervolume_b / hypervolume_a.
    pub hypervolume_ratio: f64,
    /// Fraction of B's points weakly dominated by some point of A.
    pub coverage_ab: f64,
    /// Fraction of A's points weakly dominated by some point of B.
    pub coverage_ba: f64,
    pub points_a: usize,
    pub points_b: usize,
    /// (min f1, min f2) over front A.
    pub anchors_a: (f64, f64),
    /// (min f1, min f2) over front B.
    pub anchors_b: (f64, f64),
}

/// Compares two fronts built from the same instance. The shared reference
/// point is the componentwise maximum over both fronts scaled by 1.1.
pub fn compare(a: &ParetoFront, b: &ParetoFront) -> Result<FrontMetrics> {
    if a.metadata.instance_hash != b.metadata.instance_hash {
        return Err(Error::FrontMismatch(format!(
            "instance hashes differ: {} vs {}",
            a.metadata.instance_hash, b.metadata.instance_hash
        )));
    }
    let pa = a.points();
    let pb = b.points();
    let all: Vec<(f64, f64)> = pa.iter().chain(pb.iter()).copied().collect();
    let reference = all.iter().fold((0.0_f64, 0.0_f64), |acc, p| {
        (acc.0.max(p.0), acc.1.max(p.1))
    });
    let reference = (reference.0 * 1.1, reference.1 * 1.1);
    let hypervolume_a = hypervolume(&pa, reference)?;
    let hypervolume_b = hypervolume(&pb, reference)?;
    let hypervolume_ratio = if hypervolume_a == 0.0 {
        if hypervolume_b == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        hypervolume_b / hypervolume_a
    };
    Ok(FrontMetrics {
        reference,
        hypervolume_a,
        hypervolume_b,
        hypervolume_ratio,
        coverage_ab: coverage(&pa, &pb),
        coverage_ba: coverage(&pb, &pa),
        points_a: pa.len(),
        points_b: pb.len(),
        anchors_a: anchors(&pa),
        anchors_b: anchors(&pb),
    })
}

/// C(A, B): fraction of B weakly dominated by at least one point of A.
fn coverage(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if b.is_empty() {
        return 1.0;
    }
    let covered = b
        .iter()
        .filter(|q| a.iter().any(|p| weakly_dominates(*p, **q)))
        .count();
    covered as f64 / b.len() as f64
}

fn anchors(points: &[(f64, f64)]) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::INFINITY), |acc, p| {
        (acc.0.min(p.0), acc.1.min(p.1))
    })
}


#[cfg(test)]
mod solver_comparison_tests {
    use super::*;
    use crate::eps::{sweep, EpsConfig};
    use crate::io::samples::bundled_case;
    use crate::moga::{evolve, GaConfig};

    #[test]
    fn exact_front_covers_ga_front_on_bundled_case() {
        let inst = bundled_case();
        let exact = sweep(
            &inst,
            &EpsConfig {
                grid_points: 40,
                ..EpsConfig::default()
            },
        )
        .unwrap()
        .front;
        let ga = evolve(
            &inst,
            &GaConfig {
                population_size: 40,
                generations: 40,
                ..GaConfig::new(1)
            },
        )
        .unwrap()
        .front;
        let m = compare(&exact, &ga).unwrap();
        assert!(m.hypervolume_ratio > 0.0);
        assert!(m.hypervolume_ratio <= 1.0, "ratio {}", m.hypervolume_ratio);
        assert!(m.coverage_ab >= m.coverage_ba);
    }
}
