//! Translation from a [`NetworkInstance`] to matrix form and back.
//!
//! Variable layout: facility indicators first (factories, warehouses,
//! disassembly centers), then the four flow tensors in option-major order.
//! Constraint rows follow the model's printed order (C12–C20); flow
//! nonnegativity and indicator integrality are expressed as bounds and
//! integrality flags rather than rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation, Row};
use crate::model::{Dims, FlowSolution, IndicatorMode, NetworkInstance};

/// Which objective the matrix carries, and whether the other objective is
/// present as a capped row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    Cost,
    Emissions,
    /// Minimize cost subject to total emissions ≤ cap.
    CostWithEmissionCap,
    /// Minimize emissions subject to total cost ≤ cap. Used to refine
    /// anchors and grid points lexicographically.
    EmissionsWithCostCap,
}

/// Index map between matrix columns and the named model variables.
#[derive(Debug, Clone, Copy)]
pub struct VariableLayout {
    pub dims: Dims,
}

impl VariableLayout {
    pub fn new(dims: Dims) -> Self {
        VariableLayout { dims }
    }

    pub fn indicator_count(&self) -> usize {
        self.dims.indicator_count()
    }

    pub fn num_vars(&self) -> usize {
        self.dims.indicator_count() + self.dims.flow_var_count()
    }

    pub fn xa(&self, f: usize) -> usize {
        f
    }

    pub fn xb(&self, w: usize) -> usize {
        self.dims.f + w
    }

    pub fn xd(&self, i: usize) -> usize {
        self.dims.f + self.dims.w + i
    }

    fn flow_base(&self) -> usize {
        self.dims.indicator_count()
    }

    pub fn ya(&self, tf: usize, f: usize, w: usize) -> usize {
        self.flow_base() + (tf * self.dims.f + f) * self.dims.w + w
    }

    pub fn yb(&self, tw: usize, w: usize, c: usize) -> usize {
        self.flow_base()
            + self.dims.tf * self.dims.f * self.dims.w
            + (tw * self.dims.w + w) * self.dims.c
            + c
    }

    pub fn yc(&self, tk: usize, c: usize, i: usize) -> usize {
        self.flow_base()
            + self.dims.tf * self.dims.f * self.dims.w
            + self.dims.tw * self.dims.w * self.dims.c
            + (tk * self.dims.c + c) * self.dims.i
            + i
    }

    pub fn yd(&self, ti: usize, i: usize, f: usize) -> usize {
        self.flow_base()
            + self.dims.tf * self.dims.f * self.dims.w
            + self.dims.tw * self.dims.w * self.dims.c
            + self.dims.tk * self.dims.c * self.dims.i
            + (ti * self.dims.i + i) * self.dims.f
            + f
    }

    pub fn var_names(&self) -> Vec<String> {
        let d = self.dims;
        let mut names = Vec::with_capacity(self.num_vars());
        for f in 0..d.f {
            names.push(format!("xa[{f}]"));
        }
        for w in 0..d.w {
            names.push(format!("xb[{w}]"));
        }
        for i in 0..d.i {
            names.push(format!("xd[{i}]"));
        }
        for tf in 0..d.tf {
            for f in 0..d.f {
                for w in 0..d.w {
                    names.push(format!("ya[{tf}][{f}][{w}]"));
                }
            }
        }
        for tw in 0..d.tw {
            for w in 0..d.w {
                for c in 0..d.c {
                    names.push(format!("yb[{tw}][{w}][{c}]"));
                }
            }
        }
        for tk in 0..d.tk {
            for c in 0..d.c {
                for i in 0..d.i {
                    names.push(format!("yc[{tk}][{c}][{i}]"));
                }
            }
        }
        for ti in 0..d.ti {
            for i in 0..d.i {
                for f in 0..d.f {
                    names.push(format!("yd[{ti}][{i}][{f}]"));
                }
            }
        }
        names
    }

    /// Maps a solver point back to named tensors; inverse of the layout.
    pub fn solution_from_point(&self, x: &[f64], mode: IndicatorMode) -> Result<FlowSolution> {
        if x.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} entries, layout expects {}",
                x.len(),
                self.num_vars()
            )));
        }
        let d = self.dims;
        let mut sol = FlowSolution::zeros(&d, mode);
        for f in 0..d.f {
            sol.xa[f] = x[self.xa(f)];
        }
        for w in 0..d.w {
            sol.xb[w] = x[self.xb(w)];
        }
        for i in 0..d.i {
            sol.xd[i] = x[self.xd(i)];
        }
        for tf in 0..d.tf {
            for f in 0..d.f {
                for w in 0..d.w {
                    sol.ya[tf][f][w] = x[self.ya(tf, f, w)];
                }
            }
        }
        for tw in 0..d.tw {
            for w in 0..d.w {
                for c in 0..d.c {
                    sol.yb[tw][w][c] = x[self.yb(tw, w, c)];
                }
            }
        }
        for tk in 0..d.tk {
            for c in 0..d.c {
                for i in 0..d.i {
                    sol.yc[tk][c][i] = x[self.yc(tk, c, i)];
                }
            }
        }
        for ti in 0..d.ti {
            for i in 0..d.i {
                for f in 0..d.f {
                    sol.yd[ti][i][f] = x[self.yd(ti, i, f)];
                }
            }
        }
        Ok(sol)
    }
}

/// Full-length cost objective vector: setup costs on indicator columns,
/// unit costs (production/handling/collection/disassembly/remanufacturing
/// plus transport, reliability-weighted on the warehouse leg) on flows.
pub fn cost_coefficients(inst: &NetworkInstance) -> Vec<f64> {
    let layout = VariableLayout::new(inst.dims);
    let d = inst.dims;
    let rel = inst.reliability();
    let mut c = vec![0.0; layout.num_vars()];
    for f in 0..d.f {
        c[layout.xa(f)] = inst.ra[f];
    }
    for w in 0..d.w {
        c[layout.xb(w)] = inst.rb[w];
    }
    for i in 0..d.i {
        c[layout.xd(i)] = inst.rd[i];
    }
    for tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                c[layout.ya(tf, f, w)] = inst.ma[f] + inst.ta[tf][f][w];
            }
        }
    }
    for tw in 0..d.tw {
        for w in 0..d.w {
            for cc in 0..d.c {
                c[layout.yb(tw, w, cc)] = rel * (inst.mb[w] + inst.tb[tw][w][cc]);
            }
        }
    }
    for tk in 0..d.tk {
        for cc in 0..d.c {
            for i in 0..d.i {
                c[layout.yc(tk, cc, i)] = inst.mc[cc] + inst.md[i] + inst.tc[tk][cc][i];
            }
        }
    }
    for ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                c[layout.yd(ti, i, f)] = inst.mr[f] + inst.td[ti][i][f];
            }
        }
    }
    c
}

/// Full-length emission objective vector. Indicator columns are zero (the
/// emission ledger has no setup term); each flow column carries process
/// emission plus transport emission × distance × rate, reliability-weighted
/// on the warehouse leg. The assembly term joins only when the instance
/// opts in, mirroring the evaluator.
pub fn emission_coefficients(inst: &NetworkInstance) -> Vec<f64> {
    let layout = VariableLayout::new(inst.dims);
    let d = inst.dims;
    let rel = inst.reliability();
    let mut c = vec![0.0; layout.num_vars()];
    for tf in 0..d.tf {
        for f in 0..d.f {
            for w in 0..d.w {
                let assembly = if inst.include_assembly_emissions {
                    inst.gc[f]
                } else {
                    0.0
                };
                c[layout.ya(tf, f, w)] =
                    inst.ga[f] + assembly + inst.gta[tf] * inst.da[f][w] * inst.la[tf][f][w];
            }
        }
    }
    for tw in 0..d.tw {
        for w in 0..d.w {
            for cc in 0..d.c {
                c[layout.yb(tw, w, cc)] =
                    rel * (inst.gb[w] + inst.gtb[tw] * inst.db[w][cc] * inst.lb[tw][w][cc]);
            }
        }
    }
    for tk in 0..d.tk {
        for cc in 0..d.c {
            for i in 0..d.i {
                c[layout.yc(tk, cc, i)] =
                    inst.gd[i] + inst.gtc[tk] * inst.dc[cc][i] * inst.lc[tk][cc][i];
            }
        }
    }
    for ti in 0..d.ti {
        for i in 0..d.i {
            for f in 0..d.f {
                c[layout.yd(ti, i, f)] =
                    inst.gr[f] + inst.gtd[ti] * inst.dd[i][f] * inst.ld[ti][i][f];
            }
        }
    }
    c
}

/// Builds the mixed-integer program for `mode`. Capped modes require
/// `cap`; the cap row reuses the matching objective coefficients so
/// LP-feasibility agrees with the evaluators.
pub fn build_milp(
    inst: &NetworkInstance,
    mode: ObjectiveMode,
    cap: Option<f64>,
) -> Result<LinearProgram> {
    inst.validate()?;
    let capped = matches!(
        mode,
        ObjectiveMode::CostWithEmissionCap | ObjectiveMode::EmissionsWithCostCap
    );
    if capped && cap.is_none() {
        return Err(Error::InvalidParameter(
            "capped objective mode requires a cap value".into(),
        ));
    }
    let layout = VariableLayout::new(inst.dims);
    let d = inst.dims;
    let n = layout.num_vars();
    let cost = cost_coefficients(inst);
    let emission = emission_coefficients(inst);
    let objective = match mode {
        ObjectiveMode::Cost | ObjectiveMode::CostWithEmissionCap => cost.clone(),
        ObjectiveMode::Emissions | ObjectiveMode::EmissionsWithCostCap => emission.clone(),
    };

    let mut rows: Vec<Row> = Vec::new();
    // C12: factory outflow within opened production capacity.
    for f in 0..d.f {
        let mut coeffs = vec![0.0; n];
        for tf in 0..d.tf {
            for w in 0..d.w {
                coeffs[layout.ya(tf, f, w)] = 1.0;
            }
        }
        coeffs[layout.xa(f)] = -inst.pa[f];
        rows.push(Row {
            name: format!("C12[f={f}]"),
            coeffs,
            rel: Relation::Le,
            rhs: 0.0,
        });
    }
    // C13: warehouse inflow within opened processing capacity.
    for w in 0..d.w {
        let mut coeffs = vec![0.0; n];
        for tf in 0..d.tf {
            for f in 0..d.f {
                coeffs[layout.ya(tf, f, w)] = 1.0;
            }
        }
        coeffs[layout.xb(w)] = -inst.pb[w];
        rows.push(Row {
            name: format!("C13[w={w}]"),
            coeffs,
            rel: Relation::Le,
            rhs: 0.0,
        });
    }
    // C14: warehouse outflow within inflow.
    for w in 0..d.w {
        let mut coeffs = vec![0.0; n];
        for tw in 0..d.tw {
            for c in 0..d.c {
                coeffs[layout.yb(tw, w, c)] = 1.0;
            }
        }
        for tf in 0..d.tf {
            for f in 0..d.f {
                coeffs[layout.ya(tf, f, w)] -= 1.0;
            }
        }
        rows.push(Row {
            name: format!("C14[w={w}]"),
            coeffs,
            rel: Relation::Le,
            rhs: 0.0,
        });
    }
    // C15: demand met.
    for c in 0..d.c {
        let mut coeffs = vec![0.0; n];
        for tw in 0..d.tw {
            for w in 0..d.w {
                coeffs[layout.yb(tw, w, c)] = 1.0;
            }
        }
        rows.push(Row {
            name: format!("C15[c={c}]"),
            coeffs,
            rel: Relation::Ge,
            rhs: inst.q[c],
        });
    }
    // C16: collection bounded by demand.
    for c in 0..d.c {
        let mut coeffs = vec![0.0; n];
        for tk in 0..d.tk {
            for i in 0..d.i {
                coeffs[layout.yc(tk, c, i)] = 1.0;
            }
        }
        rows.push(Row {
            name: format!("C16[c={c}]"),
            coeffs,
            rel: Relation::Le,
            rhs: inst.q[c],
        });
    }
    // C17: disassembly inflow within opened capacity.
    for i in 0..d.i {
        let mut coeffs = vec![0.0; n];
        for tk in 0..d.tk {
            for c in 0..d.c {
                coeffs[layout.yc(tk, c, i)] = 1.0;
            }
        }
        coeffs[layout.xd(i)] = -inst.pd[i];
        rows.push(Row {
            name: format!("C17[i={i}]"),
            coeffs,
            rel: Relation::Le,
            rhs: 0.0,
        });
    }
    // C18: minimum collection share of demand.
    for c in 0..d.c {
        let mut coeffs = vec![0.0; n];
        for tk in 0..d.tk {
            for i in 0..d.i {
                coeffs[layout.yc(tk, c, i)] = 1.0;
            }
        }
        rows.push(Row {
            name: format!("C18[c={c}]"),
            coeffs,
            rel: Relation::Ge,
            rhs: inst.hd * inst.q[c],
        });
    }
    // C19: demolition outflow covers the minimum share of collected units.
    for i in 0..d.i {
        let mut coeffs = vec![0.0; n];
        for ti in 0..d.ti {
            for f in 0..d.f {
                coeffs[layout.yd(ti, i, f)] = 1.0;
            }
        }
        for tk in 0..d.tk {
            for c in 0..d.c {
                coeffs[layout.yc(tk, c, i)] -= inst.hr;
            }
        }
        rows.push(Row {
            name: format!("C19[i={i}]"),
            coeffs,
            rel: Relation::Ge,
            rhs: 0.0,
        });
    }
    // C20: remanufacturing inflow within opened factory capacity.
    for f in 0..d.f {
        let mut coeffs = vec![0.0; n];
        for ti in 0..d.ti {
            for i in 0..d.i {
                coeffs[layout.yd(ti, i, f)] = 1.0;
            }
        }
        coeffs[layout.xa(f)] = -inst.pr[f];
        rows.push(Row {
            name: format!("C20[f={f}]"),
            coeffs,
            rel: Relation::Le,
            rhs: 0.0,
        });
    }
    if capped {
        let (coeffs, name) = match mode {
            ObjectiveMode::CostWithEmissionCap => (emission, "cap[emissions]"),
            ObjectiveMode::EmissionsWithCostCap => (cost, "cap[cost]"),
            _ => unreachable!(),
        };
        rows.push(Row {
            name: name.into(),
            coeffs,
            rel: Relation::Le,
            rhs: cap.unwrap(),
        });
    }

    let ni = layout.indicator_count();
    let mut lower = vec![0.0; n];
    let mut upper = vec![f64::INFINITY; n];
    let mut integer = vec![false; n];
    for j in 0..ni {
        lower[j] = 0.0;
        upper[j] = 1.0;
        integer[j] = true;
    }
    Ok(LinearProgram {
        objective,
        rows,
        lower,
        upper,
        integer,
        names: layout.var_names(),
    })
}
