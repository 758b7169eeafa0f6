//! Network data model, objective evaluation, and constraint checking.
//!
//! A [`NetworkInstance`] holds every parameter of the four-echelon network:
//! forward flow factory → warehouse → customer, reverse flow customer →
//! disassembly center → factory. A [`FlowSolution`] holds the facility
//! open/close indicators and the four flow tensors. [`evaluate_cost`] and
//! [`evaluate_emissions`] produce full component ledgers;
//! [`check_feasibility`] evaluates all constraint families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Echelon and transport-option counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    /// Potential factories.
    pub f: usize,
    /// Potential warehouses.
    pub w: usize,
    /// Customers.
    pub c: usize,
    /// Potential disassembly centers.
    pub i: usize,
    /// Transport options factory → warehouse.
    pub tf: usize,
    /// Transport options warehouse → customer.
    pub tw: usize,
    /// Transport options customer → disassembly center.
    pub tk: usize,
    /// Transport options disassembly center → factory.
    pub ti: usize,
}

impl Dims {
    pub fn flow_var_count(&self) -> usize {
        self.tf * self.f * self.w
            + self.tw * self.w * self.c
            + self.tk * self.c * self.i
            + self.ti * self.i * self.f
    }

    pub fn indicator_count(&self) -> usize {
        self.f + self.w + self.i
    }
}

/// All sets and parameters of the network design model.
///
/// Tensors are nested in fixed index order: transport option, origin,
/// destination. Distances are origin × destination. Field names follow the
/// conventional symbols of the model; each doc comment spells out the
/// meaning and unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInstance {
    pub dims: Dims,
    /// Customer demand, units of product per customer.
    pub q: Vec<f64>,
    /// Unit transport cost factory → warehouse, `[tf][f][w]`, currency/unit.
    pub ta: Vec<Vec<Vec<f64>>>,
    /// Unit transport cost warehouse → customer, `[tw][w][c]`.
    pub tb: Vec<Vec<Vec<f64>>>,
    /// Unit collection transport cost customer → disassembly center, `[tk][c][i]`.
    pub tc: Vec<Vec<Vec<f64>>>,
    /// Unit transport cost disassembly center → factory, `[ti][i][f]`.
    pub td: Vec<Vec<Vec<f64>>>,
    /// Transport rate (distance-correction multiplier, > 0) factory → warehouse, `[tf][f][w]`.
    pub la: Vec<Vec<Vec<f64>>>,
    /// Transport rate warehouse → customer, `[tw][w][c]`.
    pub lb: Vec<Vec<Vec<f64>>>,
    /// Transport rate customer → disassembly center, `[tk][c][i]`.
    pub lc: Vec<Vec<Vec<f64>>>,
    /// Transport rate disassembly center → factory, `[ti][i][f]`.
    pub ld: Vec<Vec<Vec<f64>>>,
    /// Distance factory → warehouse, km, `[f][w]`.
    pub da: Vec<Vec<f64>>,
    /// Distance warehouse → customer, km, `[w][c]`.
    pub db: Vec<Vec<f64>>,
    /// Distance customer → disassembly center, km, `[c][i]`.
    pub dc: Vec<Vec<f64>>,
    /// Distance disassembly center → factory, km, `[i][f]`.
    pub dd: Vec<Vec<f64>>,
    /// Fixed setup cost per factory.
    pub ra: Vec<f64>,
    /// Fixed setup cost per warehouse.
    pub rb: Vec<f64>,
    /// Fixed setup cost per disassembly center.
    pub rd: Vec<f64>,
    /// Variable production cost per unit, per factory.
    pub ma: Vec<f64>,
    /// Variable handling cost per unit, per warehouse.
    pub mb: Vec<f64>,
    /// Variable collection cost per unit, per customer.
    pub mc: Vec<f64>,
    /// Variable disassembly cost per unit, per disassembly center.
    pub md: Vec<f64>,
    /// Variable remanufacturing cost per unit, per factory.
    pub mr: Vec<f64>,
    /// Production capacity per factory, units.
    pub pa: Vec<f64>,
    /// Processing capacity per warehouse, units.
    pub pb: Vec<f64>,
    /// Disassembly capacity per center, units.
    pub pd: Vec<f64>,
    /// Remanufacturing capacity per factory, units.
    pub pr: Vec<f64>,
    /// Minimum collection share of demand, in [0, 1].
    pub hd: f64,
    /// Minimum demolition share of collected units, in [0, 1].
    pub hr: f64,
    /// Production emission per unit, kg CO₂, per factory.
    pub ga: Vec<f64>,
    /// Assembly emission per unit, kg CO₂, per factory (ledger-only unless
    /// `include_assembly_emissions` is set).
    pub gc: Vec<f64>,
    /// Handling emission per unit, kg CO₂, per warehouse.
    pub gb: Vec<f64>,
    /// Disassembly emission per unit, kg CO₂, per center.
    pub gd: Vec<f64>,
    /// Remanufacturing emission per unit, kg CO₂, per factory.
    pub gr: Vec<f64>,
    /// Transport emission factory → warehouse, kg CO₂ per unit·km, per option.
    pub gta: Vec<f64>,
    /// Transport emission warehouse → customer, per option.
    pub gtb: Vec<f64>,
    /// Transport emission customer → disassembly center, per option.
    pub gtc: Vec<f64>,
    /// Transport emission disassembly center → factory, per option.
    pub gtd: Vec<f64>,
    /// Warehouse failure rate per day, ≥ 0.
    pub lambda: f64,
    /// Planning horizon in days.
    pub t: f64,
    /// Count the assembly emission component in the emission total.
    pub include_assembly_emissions: bool,
    /// Currency label used in reports.
    pub currency: String,
}

impl NetworkInstance {
    /// Warehouse reliability discount applied to handling and
    /// warehouse-outbound transport terms.
    pub fn reliability(&self) -> f64 {
        (-self.lambda * self.t).exp()
    }

    /// Validates every invariant; error messages name the offending field.
    pub fn validate(&self) -> Result<()> {
        let d = &self.dims;
        for (key, n) in [
            ("f", d.f),
            ("w", d.w),
            ("c", d.c),
            ("i", d.i),
            ("tf", d.tf),
            ("tw", d.tw),
            ("tk", d.tk),
            ("ti", d.ti),
        ] {
            if n < 1 {
                return Err(invalid(key, "count must be >= 1"));
            }
        }
        check_vec("q", &self.q, d.c, true)?;
        check_tensor("ta", &self.ta, d.tf, d.f, d.w, true)?;
        check_tensor("tb", &self.tb, d.tw, d.w, d.c, true)?;
        check_tensor("tc", &self.tc, d.tk, d.c, d.i, true)?;
        check_tensor("td", &self.td, d.ti, d.i, d.f, true)?;
        check_tensor_positive("la", &self.la, d.tf, d.f, d.w)?;
        check_tensor_positive("lb", &self.lb, d.tw, d.w, d.c)?;
        check_tensor_positive("lc", &self.lc, d.tk, d.c, d.i)?;
        check_tensor_positive("ld", &self.ld, d.ti, d.i, d.f)?;
        check_matrix("da", &self.da, d.f, d.w)?;
        check_matrix("db", &self.db, d.w, d.c)?;
        check_matrix("dc", &self.dc, d.c, d.i)?;
        check_matrix("dd", &self.dd, d.i, d.f)?;
        check_vec("ra", &self.ra, d.f, true)?;
        check_vec("rb", &self.rb, d.w, true)?;
        check_vec("rd", &self.rd, d.i, true)?;
        check_vec("ma", &self.ma, d.f, true)?;
        check_vec("mb", &self.mb, d.w, true)?;
        check_vec("mc", &self.mc, d.c, true)?;
        check_vec("md", &self.md, d.i, true)?;
        check_vec("mr", &self.mr, d.f, true)?;
        check_vec("pa", &self.pa, d.f, true)?;
        check_vec("pb", &self.pb, d.w, true)?;
        check_vec("pd", &self.pd, d.i, true)?;
        check_vec("pr", &self.pr, d.f, true)?;
        check_vec("ga", &self.ga, d.f, true)?;
        check_vec("gc", &self.gc, d.f, true)?;
        check_vec("gb", &self.gb, d.w, true)?;
        check_vec("gd", &self.gd, d.i, true)?;
        check_vec("gr", &self.gr, d.f, true)?;
        check_vec("gta", &self.gta, d.tf, true)?;
        check_vec("gtb", &self.gtb, d.tw, true)?;
        check_vec("gtc", &self.gtc, d.tk, true)?;
        check_vec("gtd", &self.gtd, d.ti, true)?;
        if !(0.0..=1.0).contains(&self.hd) || !self.hd.is_finite() {
            return Err(invalid("hd", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.hr) || !self.hr.is_finite() {
            return Err(invalid("hr", "must lie in [0, 1]"));
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(invalid("lambda", "must be finite and >= 0"));
        }
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(invalid("t", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Errors unless the solution tensors have exactly the shapes implied by
    /// the instance dimensions.
    pub fn check_shape(&self, sol: &FlowSolution) -> Result<()> {
        let d = &self.dims;
        let shape_ok = sol.xa.len() == d.f
            && sol.xb.len() == d.w
            && sol.xd.len() == d.i
            && tensor_shape_ok(&sol.ya, d.tf, d.f, d.w)
            && tensor_shape_ok(&sol.yb, d.tw, d.w, d.c)
            && tensor_shape_ok(&sol.yc, d.tk, d.c, d.i)
            && tensor_shape_ok(&sol.yd, d.ti, d.i, d.f);
        if shape_ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                "solution tensors do not match instance dimensions".into(),
            ))
        }
    }
}

fn invalid(key: &str, reason: &str) -> Error {
    Error::InvalidDocument {
        key: key.into(),
        reason: reason.into(),
    }
}

fn check_vec(key: &str, v: &[f64], len: usize, nonneg: bool) -> Result<()> {
    if v.len() != len {
        return Err(invalid(key, &format!("expected {len} entries, got {}", v.len())));
    }
    for &x in v {
        if !x.is_finite() || (nonneg && x < 0.0) {
            return Err(invalid(key, "entries must be finite and >= 0"));
        }
    }
    Ok(())
}

fn check_matrix(key: &str, m: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    if m.len() != rows {
        return Err(invalid(key, &format!("expected {rows} rows, got {}", m.len())));
    }
    for row in m {
        if row.len() != cols {
            return Err(invalid(key, &format!("expected {cols} columns")));
        }
        for &x in row {
            if !x.is_finite() || x < 0.0 {
                return Err(invalid(key, "entries must be finite and >= 0"));
            }
        }
    }
    Ok(())
}

fn tensor_shape_ok(t: &[Vec<Vec<f64>>], opts: usize, rows: usize, cols: usize) -> bool {
    t.len() == opts
        && t.iter()
            .all(|m| m.len() == rows && m.iter().all(|r| r.len() == cols))
}

fn check_tensor(
    key: &str,
    t: &[Vec<Vec<f64>>],
    opts: usize,
    rows: usize,
    cols: usize,
    nonneg: bool,
) -> Result<()> {
    if !tensor_shape_ok(t, opts, rows, cols) {
        return Err(invalid(key, &format!("expected shape {opts}x{rows}x{cols}")));
    }
    for m in t {
        for r in m {
            for &x in r {
                if !x.is_finite() || (nonneg && x < 0.0) {
                    return Err(invalid(key, "entries must be finite and >= 0"));
                }
            }
        }
    }
    Ok(())
}

fn check_tensor_positive(key: &str, t: &[Vec<Vec<f64>>], opts: usize, rows: usize, cols: usize) -> Result<()> {
    check_tensor(key, t, opts, rows, cols, true)?;
    for m in t {
        for r in m {
            for &x in r {
                if x <= 0.0 {
                    return Err(invalid(key, "rates must be strictly > 0"));
                }
            }
        }
    }
    Ok(())
}

/// Whether facility indicators must be binary or may range over [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorMode {
    Exact,
    Relaxed,
}

/// Facility indicators plus the four flow tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSolution {
    pub mode: IndicatorMode,
    /// Factory open indicators.
    pub xa: Vec<f64>,
    /// Warehouse open indicators.
    pub xb: Vec<f64>,
    /// Disassembly center open indicators.
    pub xd: Vec<f64>,
    /// Flow factory → warehouse, `[tf][f][w]`, units.
    pub ya: Vec<Vec<Vec<f64>>>,
    /// Flow warehouse → customer, `[tw][w][c]`.
    pub yb: Vec<Vec<Vec<f64>>>,
    /// Collected flow customer → disassembly center, `[tk][c][i]`.
    pub yc: Vec<Vec<Vec<f64>>>,
    /// Demolition flow disassembly center → factory, `[ti][i][f]`.
    pub yd: Vec<Vec<Vec<f64>>>,
}

impl FlowSolution {
    /// All-zero solution shaped for `dims`.
    pub fn zeros(dims: &Dims, mode: IndicatorMode) -> Self {
        let t3 = |o: usize, r: usize, c: usize| vec![vec![vec![0.0; c]; r]; o];
        FlowSolution {
            mode,
            xa: vec![0.0; dims.f],
            xb: vec![0.0; dims.w],
            xd: vec![0.0; dims.i],
            ya: t3(dims.tf, dims.f, dims.w),
            yb: t3(dims.tw, dims.w, dims.c),
            yc: t3(dims.tk, dims.c, dims.i),
            yd: t3(dims.ti, dims.i, dims.f),
        }
    }
}

/// Cost ledger: fixed, variable, transport, and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub tfc: f64,
    pub tvc: f64,
    pub ttc: f64,
    pub total: f64,
}

/// Emission ledger: production, assembly, handling, disassembly,
/// remanufacturing, transport, and the total. The assembly component `ea`
/// is always computed but joins the total only when the instance sets
/// `include_assembly_emissions`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionBreakdown {
    pub ep: f64,
    pub ea: f64,
    pub eh: f64,
    pub ed: f64,
    pub er: f64,
    pub et: f64,
    pub total: f64,
}

/// Warehouse reliability factor e^(−λ·t).
pub fn reliability_factor(lambda: f64, t: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter("lambda must be finite and >= 0".into()));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter("t must be finite and >= 0".into()));
    }
    Ok((-lambda * t).exp())
}

/// Evaluates the cost objective with its component breakdown.
///
/// The reliability factor discounts the warehouse handling term of the
/// variable cost and the warehouse → customer term of the transport cost.
pub fn evaluate_cost(inst: &NetworkInstance, sol: &FlowSolution) -> Result<CostBreakdown> {
    inst.check_shape(sol)?;
    let d = &inst.dims;
    let rel = inst.reliability();

    let mut tfc = 0.0;
    for f in 0..d.f {
        tfc += inst.ra[f] * sol.xa[f];
    }
    for w in 0..d.w {
        tfc += inst.rb[w] * sol.xb[w];
    }
    for i in 0..d.i {
        tfc += inst.rd[i] * sol.xd[i];
    }

    let mut tvc = 0.0;
    for f in 0..d.f {
        let mut out = 0.0;
        for tf in 0..d.tf {
            for w in 0..d.w {
                out += sol.ya[tf][f][w];
            }
        }
        tvc += inst.ma[f] * out;
    }
    for w in 0..d.w {
        let mut out = 0.0;
        for tw in 0..d.tw {
            for c in 0..d.c {
                out += sol.yb[tw][w][c];
            }
        }
        tvc += rel * inst.mb[w] * out;
    }
    for c in 0..d.c {
        let mut coll = 0.0;
        for tk in 0..d.tk {
            for i in 0..d.i {
                coll += sol.yc[tk][c][i];
            }
        }
        tvc += inst.mc[c] * coll;
    }
    for i in 0..d.i {
        let mut coll = 0.0;
        for tk in 0..d.tk {
            for c in 0..d.c {
                coll += sol.yc[tk][c][i];
            }
        }
        tvc += inst.md[i] * coll;
    }
    for f in 0..d.f {
        let mut dem = 0.0;
        for ti in 0..d.ti {
            for i in 0..d.i {
                dem += sol.yd[ti][i][f];
            }
        }
        tvc += inst.mr[f] * dem;
    }

    let mut ttc = 0.0;
    for tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                ttc += inst.ta[tf][f][w] * sol.ya[tf][f][w];
            }
        }
    }
    let mut wc = 0.0;
    for tw in 0..d.tw {
        for w in 0..d.w {
            for c in 0..d.c {
                wc += inst.tb[tw][w][c] * sol.yb[tw][w][c];
            }
        }
    }
    ttc += rel * wc;
    for tk in 0..d.tk {
        for c in 0..d.c {
            for i in 0..d.i {
                ttc += inst.tc[tk][c][i] * sol.yc[tk][c][i];
            }
        }
    }
    for ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                ttc += inst.td[ti][i][f] * sol.yd[ti][i][f];
            }
        }
    }

    Ok(CostBreakdown {
        tfc,
        tvc,
        ttc,
        total: tfc + tvc + ttc,
    })
}

/// Evaluates the emission objective with its component breakdown.
///
/// Each transport leg contributes emission factor × flow × distance × rate;
/// the warehouse → customer leg and the handling term carry the reliability
/// factor.
pub fn evaluate_emissions(inst: &NetworkInstance, sol: &FlowSolution) -> Result<EmissionBreakdown> {
    inst.check_shape(sol)?;
    let d = &inst.dims;
    let rel = inst.reliability();

    let mut ep = 0.0;
    let mut ea = 0.0;
    for f in 0..d.f {
        let mut out = 0.0;
        for tf in 0..d.tf {
            for w in 0..d.w {
                out += sol.ya[tf][f][w];
            }
        }
        ep += inst.ga[f] * out;
        ea += inst.gc[f] * out;
    }

    let mut eh = 0.0;
    for w in 0..d.w {
        let mut out = 0.0;
        for tw in 0..d.tw {
            for c in 0..d.c {
                out += sol.yb[tw][w][c];
            }
        }
        eh += inst.gb[w] * out;
    }
    eh *= rel;

    let mut ed = 0.0;
    for i in 0..d.i {
        let mut coll = 0.0;
        for tk in 0..d.tk {
            for c in 0..d.c {
                coll += sol.yc[tk][c][i];
            }
        }
        ed += inst.gd[i] * coll;
    }

    let mut er = 0.0;
    for f in 0..d.f {
        let mut dem = 0.0;
        for ti in 0..d.ti {
            for i in 0..d.i {
                dem += sol.yd[ti][i][f];
            }
        }
        er += inst.gr[f] * dem;
    }

    let mut et = 0.0;
    for tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                et += inst.gta[tf] * sol.ya[tf][f][w] * inst.da[f][w] * inst.la[tf][f][w];
            }
        }
    }
    let mut et_wc = 0.0;
    for tw in 0..d.tw {
        for w in 0..d.w {
            for c in 0..d.c {
                et_wc += inst.gtb[tw] * sol.yb[tw][w][c] * inst.db[w][c] * inst.lb[tw][w][c];
            }
        }
    }
    et += rel * et_wc;
    for tk in 0..d.tk {
        for c in 0..d.c {
            for i in 0..d.i {
                et += inst.gtc[tk] * sol.yc[tk][c][i] * inst.dc[c][i] * inst.lc[tk][c][i];
            }
        }
    }
    for ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                et += inst.gtd[ti] * sol.yd[ti][i][f] * inst.dd[i][f] * inst.ld[ti][i][f];
            }
        }
    }

    let mut total = ep + eh + ed + er + et;
    if inst.include_assembly_emissions {
        total += ea;
    }
    Ok(EmissionBreakdown {
        ep,
        ea,
        eh,
        ed,
        er,
        et,
        total,
    })
}

/// Constraint family identifiers, named by printed position in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintFamily {
    /// Factory production capacity.
    C12,
    /// Warehouse processing capacity.
    C13,
    /// Warehouse outflow bounded by inflow.
    C14,
    /// Customer demand satisfaction.
    C15,
    /// Collection bounded by demand.
    C16,
    /// Disassembly center capacity.
    C17,
    /// Minimum collection share of demand.
    C18,
    /// Minimum demolition share of collected units.
    C19,
    /// Factory remanufacturing capacity.
    C20,
    /// Flow nonnegativity.
    C21,
    /// Indicator integrality (box bounds in relaxed mode).
    C22,
}

impl std::fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One violated constraint: family, entity, slack (negative when violated),
/// and the tolerance in force.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub family: ConstraintFamily,
    pub entity: String,
    pub slack: f64,
    pub tol: f64,
}

/// Outcome of a full constraint check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    /// Sum of violation magnitudes, zero iff feasible.
    pub fn violation_magnitude(&self) -> f64 {
        self.violations.iter().map(|v| -v.slack).sum()
    }
}

struct Checker {
    tol: f64,
    violations: Vec<Violation>,
}

impl Checker {
    // slack >= 0 means satisfied; anything below -tol is recorded.
    fn push(&mut self, family: ConstraintFamily, entity: String, slack: f64) {
        if slack < -self.tol {
            self.violations.push(Violation {
                family,
                entity,
                slack,
                tol: self.tol,
            });
        }
    }
}

/// Evaluates every constraint family against `tol` (absolute slack).
pub fn check_feasibility(
    inst: &NetworkInstance,
    sol: &FlowSolution,
    tol: f64,
) -> Result<FeasibilityReport> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidParameter("tol must be finite and >= 0".into()));
    }
    inst.check_shape(sol)?;
    let d = &inst.dims;
    let mut ck = Checker {
        tol,
        violations: Vec::new(),
    };

    // C12: factory outflow vs production capacity.
    for f in 0..d.f {
        let mut out = 0.0;
        for tf in 0..d.tf {
            for w in 0..d.w {
                out += sol.ya[tf][f][w];
            }
        }
        ck.push(ConstraintFamily::C12, format!("f={f}"), inst.pa[f] * sol.xa[f] - out);
    }
    // C13: warehouse inflow vs processing capacity.
    for w in 0..d.w {
        let mut inflow = 0.0;
        for tf in 0..d.tf {
            for f in 0..d.f {
                inflow += sol.ya[tf][f][w];
            }
        }
        ck.push(ConstraintFamily::C13, format!("w={w}"), inst.pb[w] * sol.xb[w] - inflow);
    }
    // C14: warehouse outflow vs inflow.
    for w in 0..d.w {
        let mut inflow = 0.0;
        for tf in 0..d.tf {
            for f in 0..d.f {
                inflow += sol.ya[tf][f][w];
            }
        }
        let mut out = 0.0;
        for tw in 0..d.tw {
            for c in 0..d.c {
                out += sol.yb[tw][w][c];
            }
        }
        ck.push(ConstraintFamily::C14, format!("w={w}"), inflow - out);
    }
    // C15: demand met.
    for c in 0..d.c {
        let mut served = 0.0;
        for tw in 0..d.tw {
            for w in 0..d.w {
                served += sol.yb[tw][w][c];
            }
        }
        ck.push(ConstraintFamily::C15, format!("c={c}"), served - inst.q[c]);
    }
    // C16: collection bounded by demand.
    for c in 0..d.c {
        let mut coll = 0.0;
        for tk in 0..d.tk {
            for i in 0..d.i {
                coll += sol.yc[tk][c][i];
            }
        }
        ck.push(ConstraintFamily::C16, format!("c={c}"), inst.q[c] - coll);
    }
    // C17: disassembly capacity.
    for i in 0..d.i {
        let mut coll = 0.0;
        for tk in 0..d.tk {
            for c in 0..d.c {
                coll += sol.yc[tk][c][i];
            }
        }
        ck.push(ConstraintFamily::C17, format!("i={i}"), inst.pd[i] * sol.xd[i] - coll);
    }
    // C18: minimum collection share of demand.
    for c in 0..d.c {
        let mut coll = 0.0;
        for tk in 0..d.tk {
            for i in 0..d.i {
                coll += sol.yc[tk][c][i];
            }
        }
        ck.push(
            ConstraintFamily::C18,
            format!("c={c}"),
            coll - inst.hd * inst.q[c],
        );
    }
    // C19: minimum demolition share of collected units.
    for i in 0..d.i {
        let mut coll = 0.0;
        for tk in 0..d.tk {
            for c in 0..d.c {
                coll += sol.yc[tk][c][i];
            }
        }
        let mut dem = 0.0;
        for ti in 0..d.ti {
            for f in 0..d.f {
                dem += sol.yd[ti][i][f];
            }
        }
        ck.push(
            ConstraintFamily::C19,
            format!("i={i}"),
            dem - inst.hr * coll,
        );
    }
    // C20: remanufacturing capacity.
    for f in 0..d.f {
        let mut dem = 0.0;
        for ti in 0..d.ti {
            for i in 0..d.i {
                dem += sol.yd[ti][i][f];
            }
        }
        ck.push(ConstraintFamily::C20, format!("f={f}"), inst.pr[f] * sol.xa[f] - dem);
    }
    // C21: flow nonnegativity.
    let check_flows = |name: &str, t: &Vec<Vec<Vec<f64>>>, ck: &mut Checker| {
        for (o, m) in t.iter().enumerate() {
            for (r, row) in m.iter().enumerate() {
                for (c, &x) in row.iter().enumerate() {
                    if x < -tol {
                        ck.push(ConstraintFamily::C21, format!("{name}[{o}][{r}][{c}]"), x);
                    }
                }
            }
        }
    };
    check_flows("ya", &sol.ya, &mut ck);
    check_flows("yb", &sol.yb, &mut ck);
    check_flows("yc", &sol.yc, &mut ck);
    check_flows("yd", &sol.yd, &mut ck);
    // C22: integrality in exact mode, [0, 1] box in relaxed mode. Exact-mode
    // slack is minus the distance to the nearer of {0, 1}; relaxed-mode slack
    // goes negative only outside [0, 1].
    let check_indicator = |name: &str, v: &[f64], ck: &mut Checker| {
        for (j, &x) in v.iter().enumerate() {
            let slack = match sol.mode {
                IndicatorMode::Exact => -distance_to_binary(x),
                IndicatorMode::Relaxed => x.min(1.0 - x),
            };
            ck.push(ConstraintFamily::C22, format!("{name}[{j}]"), slack);
        }
    };
    check_indicator("xa", &sol.xa, &mut ck);
    check_indicator("xb", &sol.xb, &mut ck);
    check_indicator("xd", &sol.xd, &mut ck);

    Ok(FeasibilityReport {
        feasible: ck.violations.is_empty(),
        violations: ck.violations,
    })
}

fn distance_to_binary(x: f64) -> f64 {
    x.abs().min((x - 1.0).abs())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::io::samples::unit_instance;

    /// Flows of the hand-checkable solution on the unit instance.
    pub(crate) fn unit_solution() -> FlowSolution {
        let inst = unit_instance();
        let mut sol = FlowSolution::zeros(&inst.dims, IndicatorMode::Exact);
        sol.xa = vec![1.0];
        sol.xb = vec![1.0];
        sol.xd = vec![1.0];
        sol.ya[0][0][0] = 10.0;
        sol.yb[0][0][0] = 10.0;
        sol.yc[0][0][0] = 2.0;
        sol.yd[0][0][0] = 1.0;
        sol
    }

    #[test]
    fn reliability_is_one_without_failures() {
        assert_eq!(reliability_factor(0.0, 7.0).unwrap(), 1.0);
        assert_eq!(reliability_factor(0.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn reliability_matches_frozen_reference() {
        // exp(-0.7) computed independently with arbitrary precision.
        let expected = 0.4965853037914095;
        assert!((reliability_factor(0.1, 7.0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn reliability_rejects_negative_inputs() {
        assert!(reliability_factor(-0.1, 7.0).is_err());
        assert!(reliability_factor(0.1, -7.0).is_err());
    }

    #[test]
    fn zero_solution_costs_nothing() {
        let inst = unit_instance();
        let sol = FlowSolution::zeros(&inst.dims, IndicatorMode::Exact);
        let cost = evaluate_cost(&inst, &sol).unwrap();
        assert_eq!(cost, CostBreakdown { tfc: 0.0, tvc: 0.0, ttc: 0.0, total: 0.0 });
        let em = evaluate_emissions(&inst, &sol).unwrap();
        assert_eq!(em.total, 0.0);
        assert_eq!(em.ea, 0.0);
    }

    #[test]
    fn open_facilities_pay_fixed_costs_only() {
        let inst = unit_instance();
        let mut sol = FlowSolution::zeros(&inst.dims, IndicatorMode::Exact);
        sol.xa = vec![1.0];
        sol.xb = vec![1.0];
        sol.xd = vec![1.0];
        let cost = evaluate_cost(&inst, &sol).unwrap();
        assert_eq!(cost.tfc, 300.0);
        assert_eq!(cost.total, 300.0);
    }

    #[test]
    fn unit_solution_cost_ledger() {
        let inst = unit_instance();
        let cost = evaluate_cost(&inst, &unit_solution()).unwrap();
        assert_eq!(cost.tfc, 300.0);
        assert_eq!(cost.tvc, 25.0);
        assert_eq!(cost.ttc, 23.0);
        assert_eq!(cost.total, 348.0);
    }

    #[test]
    fn unit_solution_emission_ledger() {
        let inst = unit_instance();
        let em = evaluate_emissions(&inst, &unit_solution()).unwrap();
        assert_eq!(em.ep, 10.0);
        assert_eq!(em.ea, 10.0);
        assert_eq!(em.eh, 10.0);
        assert_eq!(em.ed, 2.0);
        assert_eq!(em.er, 1.0);
        assert_eq!(em.et, 23.0);
        assert_eq!(em.total, 46.0);

        let mut with_assembly = inst;
        with_assembly.include_assembly_emissions = true;
        let em = evaluate_emissions(&with_assembly, &unit_solution()).unwrap();
        assert_eq!(em.total, 56.0);
    }

    #[test]
    fn shape_mismatch_is_a_dimension_error() {
        let inst = unit_instance();
        let mut sol = unit_solution();
        sol.xa.push(1.0);
        assert!(matches!(
            evaluate_cost(&inst, &sol),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn unit_solution_is_feasible() {
        let inst = unit_instance();
        let report = check_feasibility(&inst, &unit_solution(), 1e-6).unwrap();
        assert!(report.feasible, "{:?}", report.violations);
        assert_eq!(report.violation_magnitude(), 0.0);
    }

    #[test]
    fn fractional_indicator_violates_integrality() {
        let inst = unit_instance();
        let mut sol = unit_solution();
        sol.xa[0] = 0.719;
        let report = check_feasibility(&inst, &sol, 1e-6).unwrap();
        assert!(!report.feasible);
        assert!(report
            .violations
            .iter()
            .any(|v| v.family == ConstraintFamily::C22 && v.entity == "xa[0]"));
        // The same value is legitimate in relaxed mode.
        sol.mode = IndicatorMode::Relaxed;
        let report = check_feasibility(&inst, &sol, 1e-6).unwrap();
        assert!(report.violations.iter().all(|v| v.family != ConstraintFamily::C22));
    }

    #[test]
    fn unmet_demand_reports_c15() {
        let inst = unit_instance();
        let sol = FlowSolution::zeros(&inst.dims, IndicatorMode::Exact);
        let report = check_feasibility(&inst, &sol, 1e-6).unwrap();
        assert!(!report.feasible);
        assert!(report
            .violations
            .iter()
            .any(|v| v.family == ConstraintFamily::C15));
    }

    #[test]
    fn negative_tolerance_rejected() {
        let inst = unit_instance();
        assert!(check_feasibility(&inst, &unit_solution(), -1.0).is_err());
    }

    #[test]
    fn cost_scales_exactly_with_power_of_two_factors() {
        let inst = unit_instance();
        let sol = unit_solution();
        let base = evaluate_cost(&inst, &sol).unwrap().total;
        let base_em = evaluate_emissions(&inst, &sol).unwrap().total;
        for k in [0.25, 0.5, 2.0, 8.0] {
            let mut scaled = inst.clone();
            for v in scaled
                .ra
                .iter_mut()
                .chain(scaled.rb.iter_mut())
                .chain(scaled.rd.iter_mut())
                .chain(scaled.ma.iter_mut())
                .chain(scaled.mb.iter_mut())
                .chain(scaled.mc.iter_mut())
                .chain(scaled.md.iter_mut())
                .chain(scaled.mr.iter_mut())
            {
                *v *= k;
            }
            for t in [&mut scaled.ta, &mut scaled.tb, &mut scaled.tc, &mut scaled.td] {
                for m in t.iter_mut() {
                    for r in m.iter_mut() {
                        for x in r.iter_mut() {
                            *x *= k;
                        }
                    }
                }
            }
            let cost = evaluate_cost(&scaled, &sol).unwrap().total;
            assert_eq!(cost, k * base);
            let em = evaluate_emissions(&scaled, &sol).unwrap().total;
            assert_eq!(em, base_em);
        }
    }

    #[test]
    fn objectives_are_linear_in_flows_at_fixed_indicators() {
        let inst = unit_instance();
        let u = unit_solution();
        let mut v = unit_solution();
        v.ya[0][0][0] = 3.0;
        v.yb[0][0][0] = 4.0;
        v.yc[0][0][0] = 1.0;
        v.yd[0][0][0] = 0.5;
        let (alpha, beta) = (0.3, 1.7);

        let scale_flows = |sol: &FlowSolution, a: f64, b: f64, other: &FlowSolution| {
            let mut out = sol.clone();
            for (to, (su, sv)) in [
                (&mut out.ya, (&sol.ya, &other.ya)),
                (&mut out.yb, (&sol.yb, &other.yb)),
                (&mut out.yc, (&sol.yc, &other.yc)),
                (&mut out.yd, (&sol.yd, &other.yd)),
            ] {
                for (om, (um, vm)) in to.iter_mut().zip(su.iter().zip(sv.iter())) {
                    for (or, (ur, vr)) in om.iter_mut().zip(um.iter().zip(vm.iter())) {
                        for (ox, (ux, vx)) in or.iter_mut().zip(ur.iter().zip(vr.iter())) {
                            *ox = a * ux + b * vx;
                        }
                    }
                }
            }
            out
        };
        let mix = scale_flows(&u, alpha, beta, &v);

        let variable_cost = |sol: &FlowSolution| {
            let c = evaluate_cost(&inst, sol).unwrap();
            c.total - c.tfc
        };
        let lhs = variable_cost(&mix);
        let rhs = alpha * variable_cost(&u) + beta * variable_cost(&v);
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));

        let em = |sol: &FlowSolution| evaluate_emissions(&inst, sol).unwrap().total;
        let lhs = em(&mix);
        let rhs = alpha * em(&u) + beta * em(&v);
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn rising_failure_rate_discounts_warehouse_terms() {
        let mut inst = unit_instance();
        let sol = unit_solution();
        let mut last_tvc = f64::INFINITY;
        let mut last_ttc = f64::INFINITY;
        let mut last_eh = f64::INFINITY;
        let mut last_et = f64::INFINITY;
        for lambda in [0.0, 0.05, 0.2, 1.0] {
            inst.lambda = lambda;
            let cost = evaluate_cost(&inst, &sol).unwrap();
            let em = evaluate_emissions(&inst, &sol).unwrap();
            assert!(cost.tvc < last_tvc);
            assert!(cost.ttc < last_ttc);
            assert!(em.eh < last_eh);
            assert!(em.et < last_et);
            last_tvc = cost.tvc;
            last_ttc = cost.ttc;
            last_eh = em.eh;
            last_et = em.et;
        }
    }

    #[test]
    fn tolerant_pass_bounds_exact_slacks() {
        let inst = unit_instance();
        let mut sol = unit_solution();
        let eps = 1e-4;
        sol.yb[0][0][0] = 10.0 - eps / 2.0; // slightly under demand
        let loose = check_feasibility(&inst, &sol, eps).unwrap();
        assert!(loose.feasible);
        let strict = check_feasibility(&inst, &sol, 0.0).unwrap();
        for v in &strict.violations {
            assert!(v.slack >= -eps, "{v:?}");
        }
    }
}
