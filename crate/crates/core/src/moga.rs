//! Elitist multi-objective genetic algorithm: real-coded flows plus
//! indicator genes, deterministic repair, fast nondominated sorting with
//! feasibility dominance, crowding-distance diversity, simulated binary
//! crossover, and polynomial mutation.
//!
//! Determinism contract: every random draw comes from a stream derived
//! from (seed, generation, slot), and evaluation is a pure function of the
//! genes, so results are identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::instance_hash;
use crate::model::{
    check_feasibility, evaluate_cost, evaluate_emissions, FlowSolution, IndicatorMode,
    NetworkInstance,
};
use crate::parallel;
use crate::pareto::{FrontEntry, FrontMetadata, ParetoFront, Provenance};

/// Constraint handling for selection pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum PenaltyMode {
    /// Any feasible point dominates any infeasible one; infeasible points
    /// compare by violation magnitude. Parameter-free.
    FeasibilityDominance,
    /// Violation magnitude is added to both objectives with a weight.
    WeightedPenalty { weight: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: u64,
    pub crossover_probability: f64,
    /// Per-gene mutation probability; `None` means 1 / gene count.
    pub mutation_probability: Option<f64>,
    pub crossover_index: f64,
    pub mutation_index: f64,
    pub penalty: PenaltyMode,
    /// Indicator genes at or above this decode to open.
    pub indicator_threshold: f64,
    pub seed: u64,
    /// Keep indicators fractional in [0, 1] instead of thresholding.
    pub relaxed: bool,
    /// Feasibility tolerance used for the cached violation magnitude.
    pub feasibility_tol: f64,
}

impl GaConfig {
    pub fn new(seed: u64) -> Self {
        GaConfig {
            population_size: 100,
            generations: 250,
            crossover_probability: 0.9,
            mutation_probability: None,
            crossover_index: 15.0,
            mutation_index: 20.0,
            penalty: PenaltyMode::FeasibilityDominance,
            indicator_threshold: 0.5,
            seed,
            relaxed: false,
            feasibility_tol: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidParameter("population_size must be >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return Err(Error::InvalidParameter(
                "crossover_probability must lie in [0, 1]".into(),
            ));
        }
        if let Some(pm) = self.mutation_probability {
            if !(0.0..=1.0).contains(&pm) {
                return Err(Error::InvalidParameter(
                    "mutation_probability must lie in [0, 1]".into(),
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.indicator_threshold) {
            return Err(Error::InvalidParameter(
                "indicator_threshold must lie in [0, 1]".into(),
            ));
        }
        if self.feasibility_tol <= 0.0 {
            return Err(Error::InvalidParameter("feasibility_tol must be > 0".into()));
        }
        Ok(())
    }

    fn indicator_mode(&self) -> IndicatorMode {
        if self.relaxed {
            IndicatorMode::Relaxed
        } else {
            IndicatorMode::Exact
        }
    }
}

/// Gene vector (all flow variables, then the indicator genes) plus cached
/// objectives and constraint-violation magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: Vec<f64>,
    pub f1: f64,
    pub f2: f64,
    pub violation: f64,
}

/// Per-generation progress sample for the trace stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenTrace {
    pub generation: u64,
    pub best_f1: Option<f64>,
    pub best_f2: Option<f64>,
    pub feasible: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub front: ParetoFront,
    pub trace: Vec<GenTrace>,
    /// Set when the final population holds no feasible member.
    pub diagnostic: Option<String>,
    pub evaluations: u64,
}

/// Upper sampling bound per gene: flows are capped by the tighter of their
/// endpoint stage capacities, indicators by one.
pub fn gene_bounds(inst: &NetworkInstance) -> Vec<f64> {
    let d = inst.dims;
    let mut bounds = Vec::with_capacity(d.flow_var_count() + d.indicator_count());
    for _tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                bounds.push(inst.pa[f].min(inst.pb[w]));
            }
        }
    }
    for _tw in 0..d.tw {
        for w in 0..d.w {
            for _c in 0..d.c {
                bounds.push(inst.pb[w]);
            }
        }
    }
    for _tk in 0..d.tk {
        for c in 0..d.c {
            for i in 0..d.i {
                bounds.push(inst.q[c].min(inst.pd[i]));
            }
        }
    }
    for _ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                bounds.push(inst.pd[i].min(inst.pr[f]));
            }
        }
    }
    bounds.extend(std::iter::repeat_n(1.0, d.indicator_count()));
    bounds
}

fn decode(inst: &NetworkInstance, genes: &[f64], mode: IndicatorMode) -> FlowSolution {
    let d = inst.dims;
    let mut sol = FlowSolution::zeros(&d, mode);
    let mut g = genes.iter();
    for tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                sol.ya[tf][f][w] = *g.next().unwrap();
            }
        }
    }
    for tw in 0..d.tw {
        for w in 0..d.w {
            for c in 0..d.c {
                sol.yb[tw][w][c] = *g.next().unwrap();
            }
        }
    }
    for tk in 0..d.tk {
        for c in 0..d.c {
            for i in 0..d.i {
                sol.yc[tk][c][i] = *g.next().unwrap();
            }
        }
    }
    for ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                sol.yd[ti][i][f] = *g.next().unwrap();
            }
        }
    }
    for f in 0..d.f {
        sol.xa[f] = *g.next().unwrap();
    }
    for w in 0..d.w {
        sol.xb[w] = *g.next().unwrap();
    }
    for i in 0..d.i {
        sol.xd[i] = *g.next().unwrap();
    }
    sol
}

fn encode(inst: &NetworkInstance, sol: &FlowSolution) -> Vec<f64> {
    let d = inst.dims;
    let mut genes = Vec::with_capacity(d.flow_var_count() + d.indicator_count());
    for tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                genes.push(sol.ya[tf][f][w]);
            }
        }
    }
    for tw in 0..d.tw {
        for w in 0..d.w {
            for c in 0..d.c {
                genes.push(sol.yb[tw][w][c]);
            }
        }
    }
    for tk in 0..d.tk {
        for c in 0..d.c {
            for i in 0..d.i {
                genes.push(sol.yc[tk][c][i]);
            }
        }
    }
    for ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                genes.push(sol.yd[ti][i][f]);
            }
        }
    }
    genes.extend_from_slice(&sol.xa);
    genes.extend_from_slice(&sol.xb);
    genes.extend_from_slice(&sol.xd);
    genes
}

/// Deterministic single-pass projection toward feasibility.
///
/// (a) indicators decode to {0, 1} by threshold (clamped to [0, 1] in
/// relaxed mode); (b) warehouse→customer flows rise per customer to meet
/// demand, allocated by opened warehouse capacity; (c) factory→warehouse
/// flows rise to cover warehouse outflow; (d) collection rises to the
/// demand floor and demolition to its share of collected units; (e) the
/// capacity constraints are enforced by proportional scale-down against
/// opened capacity (production, warehouse inflow, warehouse outflow vs
/// inflow, collection caps, remanufacturing), so closed facilities carry
/// no flow; finally any facility left serving positive flow has its
/// indicator forced open so fixed costs are charged. Residual violation
/// is measured rather than re-looped.
pub fn repair(inst: &NetworkInstance, config: &GaConfig, genes: &[f64]) -> Vec<f64> {
    let d = inst.dims;
    let mut sol = decode(inst, genes, config.indicator_mode());

    // Nonnegativity projection on flows.
    for t in [&mut sol.ya, &mut sol.yb, &mut sol.yc, &mut sol.yd] {
        for m in t.iter_mut() {
            for r in m.iter_mut() {
                for x in r.iter_mut() {
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                }
            }
        }
    }

    // (a) indicator decode.
    let threshold = config.indicator_threshold;
    let decode_ind = |x: f64| -> f64 {
        if config.relaxed {
            x.clamp(0.0, 1.0)
        } else if x >= threshold {
            1.0
        } else {
            0.0
        }
    };
    for x in sol.xa.iter_mut().chain(sol.xb.iter_mut()).chain(sol.xd.iter_mut()) {
        *x = decode_ind(*x);
    }

    // Opened capacity per echelon.
    let cap_a: Vec<f64> = (0..d.f).map(|f| inst.pa[f] * sol.xa[f]).collect();
    let cap_b: Vec<f64> = (0..d.w).map(|w| inst.pb[w] * sol.xb[w]).collect();
    let cap_d: Vec<f64> = (0..d.i).map(|i| inst.pd[i] * sol.xd[i]).collect();
    let cap_r: Vec<f64> = (0..d.f).map(|f| inst.pr[f] * sol.xa[f]).collect();

    // Flows through closed facilities are dropped up front so the raise
    // steps below re-route through opened capacity.
    for tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                if cap_a[f] <= 0.0 || cap_b[w] <= 0.0 {
                    sol.ya[tf][f][w] = 0.0;
                }
            }
        }
    }
    for tw in 0..d.tw {
        for w in 0..d.w {
            if cap_b[w] <= 0.0 {
                for c in 0..d.c {
                    sol.yb[tw][w][c] = 0.0;
                }
            }
        }
    }
    for tk in 0..d.tk {
        for c in 0..d.c {
            for i in 0..d.i {
                if cap_d[i] <= 0.0 {
                    sol.yc[tk][c][i] = 0.0;
                }
            }
        }
    }
    for ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                if cap_d[i] <= 0.0 || cap_r[f] <= 0.0 {
                    sol.yd[ti][i][f] = 0.0;
                }
            }
        }
    }

    // (b) meet demand, allocating shortfall by opened warehouse capacity.
    let pb_total: f64 = cap_b.iter().sum();
    for c in 0..d.c {
        let served: f64 = (0..d.tw).map(|tw| (0..d.w).map(|w| sol.yb[tw][w][c]).sum::<f64>()).sum();
        let shortfall = inst.q[c] - served;
        if shortfall > 0.0 && pb_total > 0.0 {
            for tw in 0..d.tw {
                for w in 0..d.w {
                    sol.yb[tw][w][c] += shortfall * (cap_b[w] / pb_total) / d.tw as f64;
                }
            }
        }
    }

    // (c) cover warehouse outflow with factory inflow, by opened capacity.
    let pa_total: f64 = cap_a.iter().sum();
    for w in 0..d.w {
        let inflow: f64 = (0..d.tf).map(|tf| (0..d.f).map(|f| sol.ya[tf][f][w]).sum::<f64>()).sum();
        let outflow: f64 = (0..d.tw).map(|tw| (0..d.c).map(|c| sol.yb[tw][w][c]).sum::<f64>()).sum();
        let shortfall = outflow - inflow;
        if shortfall > 0.0 && pa_total > 0.0 {
            for tf in 0..d.tf {
                for f in 0..d.f {
                    sol.ya[tf][f][w] += shortfall * (cap_a[f] / pa_total) / d.tf as f64;
                }
            }
        }
    }

    // (d) collection floor per customer, then demolition floor per center.
    let pd_total: f64 = cap_d.iter().sum();
    for c in 0..d.c {
        let collected: f64 = (0..d.tk).map(|tk| (0..d.i).map(|i| sol.yc[tk][c][i]).sum::<f64>()).sum();
        let shortfall = inst.hd * inst.q[c] - collected;
        if shortfall > 0.0 && pd_total > 0.0 {
            for tk in 0..d.tk {
                for i in 0..d.i {
                    sol.yc[tk][c][i] += shortfall * (cap_d[i] / pd_total) / d.tk as f64;
                }
            }
        }
    }
    let pr_total: f64 = cap_r.iter().sum();
    for i in 0..d.i {
        let collected: f64 = (0..d.tk).map(|tk| (0..d.c).map(|c| sol.yc[tk][c][i]).sum::<f64>()).sum();
        let demolished: f64 = (0..d.ti).map(|ti| (0..d.f).map(|f| sol.yd[ti][i][f]).sum::<f64>()).sum();
        let shortfall = inst.hr * collected - demolished;
        if shortfall > 0.0 && pr_total > 0.0 {
            for ti in 0..d.ti {
                for f in 0..d.f {
                    sol.yd[ti][i][f] += shortfall * (cap_r[f] / pr_total) / d.ti as f64;
                }
            }
        }
    }

    // (e) proportional scale-down against opened capacities, then cap
    // warehouse outflow by inflow and collection by demand.
    for f in 0..d.f {
        let out: f64 = (0..d.tf).map(|tf| (0..d.w).map(|w| sol.ya[tf][f][w]).sum::<f64>()).sum();
        if out > cap_a[f] && out > 0.0 {
            let scale = cap_a[f] / out;
            for tf in 0..d.tf {
                for w in 0..d.w {
                    sol.ya[tf][f][w] *= scale;
                }
            }
        }
    }
    for w in 0..d.w {
        let inflow: f64 = (0..d.tf).map(|tf| (0..d.f).map(|f| sol.ya[tf][f][w]).sum::<f64>()).sum();
        if inflow > cap_b[w] && inflow > 0.0 {
            let scale = cap_b[w] / inflow;
            for tf in 0..d.tf {
                for f in 0..d.f {
                    sol.ya[tf][f][w] *= scale;
                }
            }
        }
    }
    for w in 0..d.w {
        let inflow: f64 = (0..d.tf).map(|tf| (0..d.f).map(|f| sol.ya[tf][f][w]).sum::<f64>()).sum();
        let outflow: f64 = (0..d.tw).map(|tw| (0..d.c).map(|c| sol.yb[tw][w][c]).sum::<f64>()).sum();
        if outflow > inflow && outflow > 0.0 {
            let scale = inflow / outflow;
            for tw in 0..d.tw {
                for c in 0..d.c {
                    sol.yb[tw][w][c] *= scale;
                }
            }
        }
    }
    for c in 0..d.c {
        let collected: f64 = (0..d.tk).map(|tk| (0..d.i).map(|i| sol.yc[tk][c][i]).sum::<f64>()).sum();
        if collected > inst.q[c] && collected > 0.0 {
            let scale = inst.q[c] / collected;
            for tk in 0..d.tk {
                for i in 0..d.i {
                    sol.yc[tk][c][i] *= scale;
                }
            }
        }
    }
    for i in 0..d.i {
        let collected: f64 = (0..d.tk).map(|tk| (0..d.c).map(|c| sol.yc[tk][c][i]).sum::<f64>()).sum();
        if collected > cap_d[i] && collected > 0.0 {
            let scale = cap_d[i] / collected;
            for tk in 0..d.tk {
                for c in 0..d.c {
                    sol.yc[tk][c][i] *= scale;
                }
            }
        }
    }
    for f in 0..d.f {
        let demolished: f64 = (0..d.ti).map(|ti| (0..d.i).map(|i| sol.yd[ti][i][f]).sum::<f64>()).sum();
        if demolished > cap_r[f] && demolished > 0.0 {
            let scale = cap_r[f] / demolished;
            for ti in 0..d.ti {
                for i in 0..d.i {
                    sol.yd[ti][i][f] *= scale;
                }
            }
        }
    }

    // Open any facility that still serves flow.
    for f in 0..d.f {
        let out: f64 = (0..d.tf).map(|tf| (0..d.w).map(|w| sol.ya[tf][f][w]).sum::<f64>()).sum();
        let reman: f64 = (0..d.ti).map(|ti| (0..d.i).map(|i| sol.yd[ti][i][f]).sum::<f64>()).sum();
        if config.relaxed {
            let mut need: f64 = 0.0;
            if inst.pa[f] > 0.0 {
                need = need.max(out / inst.pa[f]);
            }
            if inst.pr[f] > 0.0 {
                need = need.max(reman / inst.pr[f]);
            }
            sol.xa[f] = sol.xa[f].max(need.min(1.0));
        } else if out > 0.0 || reman > 0.0 {
            sol.xa[f] = 1.0;
        }
    }
    for w in 0..d.w {
        let inflow: f64 = (0..d.tf).map(|tf| (0..d.f).map(|f| sol.ya[tf][f][w]).sum::<f64>()).sum();
        let outflow: f64 = (0..d.tw).map(|tw| (0..d.c).map(|c| sol.yb[tw][w][c]).sum::<f64>()).sum();
        if config.relaxed {
            if inst.pb[w] > 0.0 {
                sol.xb[w] = sol.xb[w].max((inflow / inst.pb[w]).min(1.0));
            }
        } else if inflow > 0.0 || outflow > 0.0 {
            sol.xb[w] = 1.0;
        }
    }
    for i in 0..d.i {
        let collected: f64 = (0..d.tk).map(|tk| (0..d.c).map(|c| sol.yc[tk][c][i]).sum::<f64>()).sum();
        let demolished: f64 = (0..d.ti).map(|ti| (0..d.f).map(|f| sol.yd[ti][i][f]).sum::<f64>()).sum();
        if config.relaxed {
            if inst.pd[i] > 0.0 {
                sol.xd[i] = sol.xd[i].max((collected / inst.pd[i]).min(1.0));
            }
        } else if collected > 0.0 || demolished > 0.0 {
            sol.xd[i] = 1.0;
        }
    }

    encode(inst, &sol)
}

/// Repairs the genes, then caches objectives and violation magnitude.
pub fn evaluate(inst: &NetworkInstance, config: &GaConfig, genes: Vec<f64>) -> Chromosome {
    let genes = repair(inst, config, &genes);
    let sol = decode(inst, &genes, config.indicator_mode());
    let f1 = evaluate_cost(inst, &sol).expect("repaired solution has matching shape").total;
    let f2 = evaluate_emissions(inst, &sol)
        .expect("repaired solution has matching shape")
        .total;
    let violation = check_feasibility(inst, &sol, config.feasibility_tol)
        .expect("repaired solution has matching shape")
        .violation_magnitude();
    Chromosome {
        genes,
        f1,
        f2,
        violation,
    }
}

fn stream(seed: u64, generation: u64, slot: u64) -> ChaCha8Rng {
    // splitmix64 finalizer over the mixed identifiers.
    let mut z = seed
        ^ generation.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ slot.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// Seeded population: flow genes uniform in [0, stage bound], indicator
/// genes uniform in [0, 1], every chromosome repaired.
pub fn initialize_population(inst: &NetworkInstance, config: &GaConfig) -> Result<Vec<Chromosome>> {
    inst.validate()?;
    config.validate()?;
    let bounds = gene_bounds(inst);
    Ok(parallel::map_range(config.population_size, |k| {
        let mut rng = stream(config.seed, 0, k as u64);
        let genes: Vec<f64> = bounds
            .iter()
            .map(|&hi| if hi > 0.0 { rng.gen_range(0.0..=hi) } else { 0.0 })
            .collect();
        evaluate(inst, config, genes)
    }))
}

fn dominates_with_penalty(
    a: &Chromosome,
    b: &Chromosome,
    penalty: PenaltyMode,
) -> bool {
    match penalty {
        PenaltyMode::FeasibilityDominance => feasibility_dominates(
            (a.f1, a.f2),
            a.violation,
            (b.f1, b.f2),
            b.violation,
        ),
        PenaltyMode::WeightedPenalty { weight } => {
            let pa = (a.f1 + weight * a.violation, a.f2 + weight * a.violation);
            let pb = (b.f1 + weight * b.violation, b.f2 + weight * b.violation);
            crate::pareto::strictly_dominates(pa, pb)
        }
    }
}

fn feasibility_dominates(a: (f64, f64), va: f64, b: (f64, f64), vb: f64) -> bool {
    let a_feasible = va <= 0.0;
    let b_feasible = vb <= 0.0;
    match (a_feasible, b_feasible) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => va < vb,
        (true, true) => crate::pareto::strictly_dominates(a, b),
    }
}

/// Fast nondominated sort under feasibility dominance. Returns fronts in
/// rank order, each a list of indices into the input.
pub fn nondominated_sort(objectives: &[(f64, f64)], violations: &[f64]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let dominates = |i: usize, j: usize| {
        feasibility_dominates(objectives[i], violations[i], objectives[j], violations[j])
    };
    sort_by_dominance(n, &dominates)
}

fn sort_by_dominance(n: usize, dominates: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut dominated_by: Vec<usize> = vec![0; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(i, j) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            }
        }
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Crowding distance per point of one front. Boundary points per objective
/// get infinity; interior points accumulate the normalized neighbor gap. A
/// zero objective range contributes nothing.
pub fn crowding_distance(front: &[(f64, f64)]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for obj in 0..2 {
        let value = |i: usize| if obj == 0 { front[i].0 } else { front[i].1 };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let lo = value(order[0]);
        let hi = value(order[n - 1]);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let i = order[k];
            if dist[i].is_finite() {
                dist[i] += (value(order[k + 1]) - value(order[k - 1])) / range;
            }
        }
    }
    dist
}

struct Ranked {
    rank: Vec<usize>,
    crowding: Vec<f64>,
}

fn rank_population(pop: &[Chromosome], penalty: PenaltyMode) -> (Vec<Vec<usize>>, Ranked) {
    let n = pop.len();
    let dominates = |i: usize, j: usize| dominates_with_penalty(&pop[i], &pop[j], penalty);
    let fronts = sort_by_dominance(n, &dominates);
    let mut rank = vec![0usize; n];
    let mut crowding = vec![0.0f64; n];
    for (r, front) in fronts.iter().enumerate() {
        let pts: Vec<(f64, f64)> = front.iter().map(|&i| (pop[i].f1, pop[i].f2)).collect();
        let dist = crowding_distance(&pts);
        for (k, &i) in front.iter().enumerate() {
            rank[i] = r;
            crowding[i] = dist[k];
        }
    }
    (fronts, Ranked { rank, crowding })
}

fn tournament(rng: &mut ChaCha8Rng, n: usize, ranked: &Ranked) -> usize {
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    pick_better(i, j, ranked)
}

fn pick_better(i: usize, j: usize, ranked: &Ranked) -> usize {
    if ranked.rank[i] != ranked.rank[j] {
        return if ranked.rank[i] < ranked.rank[j] { i } else { j };
    }
    match ranked.crowding[i].total_cmp(&ranked.crowding[j]) {
        std::cmp::Ordering::Greater => i,
        std::cmp::Ordering::Less => j,
        std::cmp::Ordering::Equal => i.min(j),
    }
}

fn sbx_pair(
    rng: &mut ChaCha8Rng,
    p1: &[f64],
    p2: &[f64],
    bounds: &[f64],
    config: &GaConfig,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.gen::<f64>() > config.crossover_probability {
        return (c1, c2);
    }
    let eta = config.crossover_index;
    for g in 0..c1.len() {
        if rng.gen::<f64>() > 0.5 {
            continue;
        }
        let (y1, y2) = if p1[g] <= p2[g] { (p1[g], p2[g]) } else { (p2[g], p1[g]) };
        if (y2 - y1).abs() <= 1e-14 {
            continue;
        }
        let (lb, ub) = (0.0, bounds[g].max(1e-14));
        let u: f64 = rng.gen();
        let spread = |beta: f64| -> f64 {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let beta_l = 1.0 + 2.0 * (y1 - lb) / (y2 - y1);
        let beta_u = 1.0 + 2.0 * (ub - y2) / (y2 - y1);
        let bq_l = spread(beta_l);
        let bq_u = spread(beta_u);
        let mut v1 = 0.5 * ((y1 + y2) - bq_l * (y2 - y1));
        let mut v2 = 0.5 * ((y1 + y2) + bq_u * (y2 - y1));
        v1 = v1.clamp(lb, ub);
        v2 = v2.clamp(lb, ub);
        if rng.gen::<f64>() <= 0.5 {
            std::mem::swap(&mut v1, &mut v2);
        }
        c1[g] = v1;
        c2[g] = v2;
    }
    (c1, c2)
}

/// Flow genes take bounded polynomial mutation; indicator genes (the tail
/// of the vector, effectively binary after repair) reflect across the
/// open/close threshold so facility moves stay reachable.
fn mutate(
    rng: &mut ChaCha8Rng,
    genes: &mut [f64],
    bounds: &[f64],
    flow_genes: usize,
    config: &GaConfig,
) {
    let pm = config
        .mutation_probability
        .unwrap_or(1.0 / genes.len().max(1) as f64);
    let eta = config.mutation_index;
    for g in 0..genes.len() {
        if rng.gen::<f64>() > pm {
            continue;
        }
        if g >= flow_genes && !config.relaxed {
            genes[g] = 1.0 - genes[g].clamp(0.0, 1.0);
            continue;
        }
        let (lb, ub) = (0.0, bounds[g]);
        if ub - lb <= 1e-14 {
            continue;
        }
        let y = genes[g];
        let d1 = (y - lb) / (ub - lb);
        let d2 = (ub - y) / (ub - lb);
        let u: f64 = rng.gen();
        let pow = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let xy = 1.0 - d1;
            (2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0)).powf(pow) - 1.0
        } else {
            let xy = 1.0 - d2;
            1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0)).powf(pow)
        };
        genes[g] = (y + dq * (ub - lb)).clamp(lb, ub);
    }
}

/// μ+λ survival: whole fronts by rank, the cut front by descending
/// crowding with index as the deterministic tie-break.
fn survive(mut combined: Vec<Chromosome>, n: usize, penalty: PenaltyMode) -> (Vec<Chromosome>, Ranked) {
    let (fronts, ranked) = rank_population(&combined, penalty);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for front in &fronts {
        if order.len() >= n {
            break;
        }
        if order.len() + front.len() <= n {
            order.extend_from_slice(front);
        } else {
            let mut rest: Vec<usize> = front.clone();
            rest.sort_by(|&a, &b| {
                ranked.crowding[b]
                    .total_cmp(&ranked.crowding[a])
                    .then(a.cmp(&b))
            });
            order.extend(rest.into_iter().take(n - order.len()));
        }
    }
    let rank: Vec<usize> = order.iter().map(|&i| ranked.rank[i]).collect();
    let crowding: Vec<f64> = order.iter().map(|&i| ranked.crowding[i]).collect();
    let mut keep: Vec<Option<Chromosome>> = combined.drain(..).map(Some).collect();
    let pop: Vec<Chromosome> = order.iter().map(|&i| keep[i].take().unwrap()).collect();
    (pop, Ranked { rank, crowding })
}

fn trace_of(generation: u64, pop: &[Chromosome]) -> GenTrace {
    let mut best_f1 = None;
    let mut best_f2 = None;
    let mut feasible = 0;
    for c in pop {
        if c.violation <= 0.0 {
            feasible += 1;
            best_f1 = Some(best_f1.map_or(c.f1, |v: f64| v.min(c.f1)));
            best_f2 = Some(best_f2.map_or(c.f2, |v: f64| v.min(c.f2)));
        }
    }
    GenTrace {
        generation,
        best_f1,
        best_f2,
        feasible,
    }
}

/// Runs the full algorithm and returns the feasible rank-1 front of the
/// final population, the per-generation trace, and a diagnostic when no
/// feasible member survived.
pub fn evolve(inst: &NetworkInstance, config: &GaConfig) -> Result<GaOutcome> {
    inst.validate()?;
    config.validate()?;
    let bounds = gene_bounds(inst);
    let flow_genes = inst.dims.flow_var_count();
    let n = config.population_size;
    let mut evaluations = n as u64;

    let mut pop = initialize_population(inst, config)?;
    let (_, mut ranked) = rank_population(&pop, config.penalty);
    let mut trace = Vec::with_capacity(config.generations as usize + 1);
    trace.push(trace_of(0, &pop));

    for generation in 1..=config.generations {
        let pairs = n.div_ceil(2);
        let offspring: Vec<Vec<Chromosome>> = parallel::map_range(pairs, |p| {
            let mut rng = stream(config.seed, generation, p as u64);
            let a = tournament(&mut rng, n, &ranked);
            let b = tournament(&mut rng, n, &ranked);
            let (mut g1, mut g2) = sbx_pair(&mut rng, &pop[a].genes, &pop[b].genes, &bounds, config);
            mutate(&mut rng, &mut g1, &bounds, flow_genes, config);
            mutate(&mut rng, &mut g2, &bounds, flow_genes, config);
            vec![
                evaluate(inst, config, g1),
                evaluate(inst, config, g2),
            ]
        });
        let mut children: Vec<Chromosome> = offspring.into_iter().flatten().collect();
        children.truncate(n);
        evaluations += children.len() as u64;

        let mut combined = pop;
        combined.extend(children);
        let (next, next_ranked) = survive(combined, n, config.penalty);
        pop = next;
        ranked = next_ranked;
        trace.push(trace_of(generation, &pop));
    }

    let feasible_rank1: Vec<&Chromosome> = pop
        .iter()
        .zip(&ranked.rank)
        .filter(|(c, &r)| r == 0 && c.violation <= 0.0)
        .map(|(c, _)| c)
        .collect();
    let diagnostic = if feasible_rank1.is_empty() {
        Some(format!(
            "no feasible member in the final population of {n}; best violation {:.6}",
            pop.iter().map(|c| c.violation).fold(f64::INFINITY, f64::min)
        ))
    } else {
        None
    };

    let candidates: Vec<FrontEntry> = feasible_rank1
        .iter()
        .map(|c| FrontEntry {
            f1: c.f1,
            f2: c.f2,
            proven: false,
            provenance: Provenance::Ga {
                generation: config.generations,
            },
            solution: decode(inst, &c.genes, config.indicator_mode()),
        })
        .collect();

    let metadata = FrontMetadata {
        instance_hash: instance_hash(inst),
        method: "ga".into(),
        config: serde_json::json!({
            "ga": config,
            "parameter_provenance": "population size, generation count, and operator rates are library defaults unless explicitly overridden",
        }),
        exact: false,
        relaxed: config.relaxed,
        timestamp: None,
    };
    Ok(GaOutcome {
        front: ParetoFront::from_candidates(metadata, candidates),
        trace,
        diagnostic,
        evaluations,
    })
}
