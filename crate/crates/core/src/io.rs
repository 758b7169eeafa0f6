//! Instance and front persistence, schema validation, the bundled cases,
//! and the seeded random-instance generator.
//!
//! Documents are schema-versioned JSON with tensors as nested arrays in
//! fixed index order (transport option, origin, destination). Unknown keys
//! are rejected; numbers round-trip at full precision.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formulation::{build_milp, ObjectiveMode};
use crate::lp::{LpStatus, SolverConfig};
use crate::model::{Dims, NetworkInstance};
use crate::pareto::{FrontEntry, FrontMetadata, ParetoFront};
use crate::simplex::solve_lp;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk form of a [`NetworkInstance`] plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema_version: u32,
    pub provenance: String,
    pub currency: String,
    pub dims: Dims,
    pub q: Vec<f64>,
    pub ta: Vec<Vec<Vec<f64>>>,
    pub tb: Vec<Vec<Vec<f64>>>,
    pub tc: Vec<Vec<Vec<f64>>>,
    pub td: Vec<Vec<Vec<f64>>>,
    pub la: Vec<Vec<Vec<f64>>>,
    pub lb: Vec<Vec<Vec<f64>>>,
    pub lc: Vec<Vec<Vec<f64>>>,
    pub ld: Vec<Vec<Vec<f64>>>,
    pub da: Vec<Vec<f64>>,
    pub db: Vec<Vec<f64>>,
    pub dc: Vec<Vec<f64>>,
    pub dd: Vec<Vec<f64>>,
    pub ra: Vec<f64>,
    pub rb: Vec<f64>,
    pub rd: Vec<f64>,
    pub ma: Vec<f64>,
    pub mb: Vec<f64>,
    pub mc: Vec<f64>,
    pub md: Vec<f64>,
    pub mr: Vec<f64>,
    pub pa: Vec<f64>,
    pub pb: Vec<f64>,
    pub pd: Vec<f64>,
    pub pr: Vec<f64>,
    pub hd: f64,
    pub hr: f64,
    pub ga: Vec<f64>,
    /// Assembly emission factors; optional, defaults to all-zero.
    #[serde(default)]
    pub gc: Option<Vec<f64>>,
    pub gb: Vec<f64>,
    pub gd: Vec<f64>,
    pub gr: Vec<f64>,
    pub gta: Vec<f64>,
    pub gtb: Vec<f64>,
    pub gtc: Vec<f64>,
    pub gtd: Vec<f64>,
    pub lambda: f64,
    pub t: f64,
    #[serde(default)]
    pub include_assembly_emissions: bool,
}

impl InstanceDocument {
    pub fn into_instance(self) -> Result<NetworkInstance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let gc = self.gc.unwrap_or_else(|| vec![0.0; self.dims.f]);
        let inst = NetworkInstance {
            dims: self.dims,
            q: self.q,
            ta: self.ta,
            tb: self.tb,
            tc: self.tc,
            td: self.td,
            la: self.la,
            lb: self.lb,
            lc: self.lc,
            ld: self.ld,
            da: self.da,
            db: self.db,
            dc: self.dc,
            dd: self.dd,
            ra: self.ra,
            rb: self.rb,
            rd: self.rd,
            ma: self.ma,
            mb: self.mb,
            mc: self.mc,
            md: self.md,
            mr: self.mr,
            pa: self.pa,
            pb: self.pb,
            pd: self.pd,
            pr: self.pr,
            hd: self.hd,
            hr: self.hr,
            ga: self.ga,
            gc,
            gb: self.gb,
            gd: self.gd,
            gr: self.gr,
            gta: self.gta,
            gtb: self.gtb,
            gtc: self.gtc,
            gtd: self.gtd,
            lambda: self.lambda,
            t: self.t,
            include_assembly_emissions: self.include_assembly_emissions,
            currency: self.currency,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_instance(inst: &NetworkInstance, provenance: &str) -> Self {
        InstanceDocument {
            schema_version: SCHEMA_VERSION,
            provenance: provenance.to_string(),
            currency: inst.currency.clone(),
            dims: inst.dims,
            q: inst.q.clone(),
            ta: inst.ta.clone(),
            tb: inst.tb.clone(),
            tc: inst.tc.clone(),
            td: inst.td.clone(),
            la: inst.la.clone(),
            lb: inst.lb.clone(),
            lc: inst.lc.clone(),
            ld: inst.ld.clone(),
            da: inst.da.clone(),
            db: inst.db.clone(),
            dc: inst.dc.clone(),
            dd: inst.dd.clone(),
            ra: inst.ra.clone(),
            rb: inst.rb.clone(),
            rd: inst.rd.clone(),
            ma: inst.ma.clone(),
            mb: inst.mb.clone(),
            mc: inst.mc.clone(),
            md: inst.md.clone(),
            mr: inst.mr.clone(),
            pa: inst.pa.clone(),
            pb: inst.pb.clone(),
            pd: inst.pd.clone(),
            pr: inst.pr.clone(),
            hd: inst.hd,
            hr: inst.hr,
            ga: inst.ga.clone(),
            gc: Some(inst.gc.clone()),
            gb: inst.gb.clone(),
            gd: inst.gd.clone(),
            gr: inst.gr.clone(),
            gta: inst.gta.clone(),
            gtb: inst.gtb.clone(),
            gtc: inst.gtc.clone(),
            gtd: inst.gtd.clone(),
            lambda: inst.lambda,
            t: inst.t,
            include_assembly_emissions: inst.include_assembly_emissions,
        }
    }
}

pub fn instance_from_json(text: &str) -> Result<NetworkInstance> {
    let doc: InstanceDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_instance()
}

pub fn instance_to_json(inst: &NetworkInstance, provenance: &str) -> String {
    let doc = InstanceDocument::from_instance(inst, provenance);
    let mut s = serde_json::to_string_pretty(&doc).expect("instance serializes");
    s.push('\n');
    s
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<NetworkInstance> {
    let text = std::fs::read_to_string(path)?;
    instance_from_json(&text)
}

pub fn save_instance(path: impl AsRef<Path>, inst: &NetworkInstance, provenance: &str) -> Result<()> {
    std::fs::write(path, instance_to_json(inst, provenance))?;
    Ok(())
}

/// Canonical identity of an instance: SHA-256 over its compact JSON form.
pub fn instance_hash(inst: &NetworkInstance) -> String {
    let json = serde_json::to_string(inst).expect("instance serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// On-disk form of a [`ParetoFront`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontDocument {
    pub schema_version: u32,
    pub metadata: FrontMetadata,
    pub entries: Vec<FrontEntry>,
}

pub fn front_to_json(front: &ParetoFront) -> String {
    let doc = FrontDocument {
        schema_version: SCHEMA_VERSION,
        metadata: front.metadata.clone(),
        entries: front.entries.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("front serializes");
    s.push('\n');
    s
}

pub fn front_from_json(text: &str) -> Result<ParetoFront> {
    let doc: FrontDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: doc.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    let hash = &doc.metadata.instance_hash;
    if hash.len() != 64 || !hash.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()) {
        return Err(Error::InvalidDocument {
            key: "instance_hash".into(),
            reason: "must be 64 lowercase hex characters".into(),
        });
    }
    Ok(ParetoFront {
        metadata: doc.metadata,
        entries: doc.entries,
    })
}

pub fn load_front(path: impl AsRef<Path>) -> Result<ParetoFront> {
    let text = std::fs::read_to_string(path)?;
    front_from_json(&text)
}

pub fn save_front(path: impl AsRef<Path>, front: &ParetoFront) -> Result<()> {
    std::fs::write(path, front_to_json(front))?;
    Ok(())
}

/// CSV export with header `f1,f2,method,epsilon_or_gen,proven`.
pub fn front_to_csv(front: &ParetoFront) -> String {
    let mut out = String::from("f1,f2,method,epsilon_or_gen,proven\n");
    for e in &front.entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.f1,
            e.f2,
            e.provenance.method(),
            e.provenance.epsilon_or_gen(),
            e.proven
        ));
    }
    out
}

/// Closed interval for a sampled parameter family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    pub fn fixed(v: f64) -> Self {
        Range { lo: v, hi: v }
    }

    fn validate(&self, key: &str) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo < 0.0 || self.lo > self.hi {
            return Err(Error::InvalidParameter(format!(
                "range `{key}` must satisfy 0 <= lo <= hi"
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

/// Uniform sampling ranges per parameter family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRanges {
    pub demand: Range,
    pub fixed_cost: Range,
    pub unit_cost: Range,
    pub transport_cost: Range,
    pub rate: Range,
    pub distance: Range,
    pub capacity: Range,
    pub emission: Range,
    pub transport_emission: Range,
    pub hd: Range,
    pub hr: Range,
    pub lambda: Range,
}

impl Default for GeneratorRanges {
    fn default() -> Self {
        GeneratorRanges {
            demand: Range::new(500.0, 3000.0),
            fixed_cost: Range::new(20_000.0, 120_000.0),
            unit_cost: Range::new(2.0, 12.0),
            transport_cost: Range::new(1.0, 3.0),
            rate: Range::new(1.1, 1.4),
            distance: Range::new(60.0, 220.0),
            capacity: Range::new(1000.0, 4000.0),
            emission: Range::new(0.5, 6.0),
            transport_emission: Range::new(0.002, 0.02),
            hd: Range::new(0.1, 0.4),
            hr: Range::new(0.3, 0.7),
            lambda: Range::new(0.0, 0.02),
        }
    }
}

/// Seeded instance generator. Capacities are scaled up where needed so the
/// total at each stage covers `margin` × the stage's minimum requirement,
/// then a relaxed LP probe certifies feasibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub dims: Dims,
    pub margin: f64,
    pub t: f64,
    pub currency: String,
    pub ranges: GeneratorRanges,
}

impl GeneratorSpec {
    pub fn new(seed: u64, dims: Dims) -> Self {
        GeneratorSpec {
            seed,
            dims,
            margin: 1.5,
            t: 7.0,
            currency: "£".into(),
            ranges: GeneratorRanges::default(),
        }
    }
}

/// Deterministic per seed. Sampling order is fixed: demand, transport
/// costs (ta tb tc td), rates (la lb lc ld), distances (da db dc dd),
/// fixed costs (ra rb rd), unit costs (ma mb mc md mr), capacities
/// (pa pb pd pr), hd, hr, emissions (ga gc gb gd gr), transport emissions
/// (gta gtb gtc gtd), lambda.
pub fn generate(spec: &GeneratorSpec) -> Result<NetworkInstance> {
    let r = &spec.ranges;
    for (key, range) in [
        ("demand", r.demand),
        ("fixed_cost", r.fixed_cost),
        ("unit_cost", r.unit_cost),
        ("transport_cost", r.transport_cost),
        ("rate", r.rate),
        ("distance", r.distance),
        ("capacity", r.capacity),
        ("emission", r.emission),
        ("transport_emission", r.transport_emission),
        ("hd", r.hd),
        ("hr", r.hr),
        ("lambda", r.lambda),
    ] {
        range.validate(key)?;
    }
    if r.rate.lo <= 0.0 {
        return Err(Error::InvalidParameter("rate range must be strictly > 0".into()));
    }
    if spec.margin < 1.0 || !spec.margin.is_finite() {
        return Err(Error::InvalidParameter("margin must be >= 1".into()));
    }

    let d = spec.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vec_of = |range: Range, n: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| range.sample(rng)).collect()
    };
    fn tensor_of(range: Range, o: usize, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Vec<f64>>> {
        (0..o)
            .map(|_| {
                (0..rows)
                    .map(|_| (0..cols).map(|_| range.sample(rng)).collect())
                    .collect()
            })
            .collect()
    }
    fn matrix_of(range: Range, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..cols).map(|_| range.sample(rng)).collect())
            .collect()
    }

    let q = vec_of(r.demand, d.c, &mut rng);
    let ta = tensor_of(r.transport_cost, d.tf, d.f, d.w, &mut rng);
    let tb = tensor_of(r.transport_cost, d.tw, d.w, d.c, &mut rng);
    let tc = tensor_of(r.transport_cost, d.tk, d.c, d.i, &mut rng);
    let td = tensor_of(r.transport_cost, d.ti, d.i, d.f, &mut rng);
    let la = tensor_of(r.rate, d.tf, d.f, d.w, &mut rng);
    let lb = tensor_of(r.rate, d.tw, d.w, d.c, &mut rng);
    let lc = tensor_of(r.rate, d.tk, d.c, d.i, &mut rng);
    let ld = tensor_of(r.rate, d.ti, d.i, d.f, &mut rng);
    let da = matrix_of(r.distance, d.f, d.w, &mut rng);
    let db = matrix_of(r.distance, d.w, d.c, &mut rng);
    let dc = matrix_of(r.distance, d.c, d.i, &mut rng);
    let dd = matrix_of(r.distance, d.i, d.f, &mut rng);
    let ra = vec_of(r.fixed_cost, d.f, &mut rng);
    let rb = vec_of(r.fixed_cost, d.w, &mut rng);
    let rd = vec_of(r.fixed_cost, d.i, &mut rng);
    let ma = vec_of(r.unit_cost, d.f, &mut rng);
    let mb = vec_of(r.unit_cost, d.w, &mut rng);
    let mc = vec_of(r.unit_cost, d.c, &mut rng);
    let md = vec_of(r.unit_cost, d.i, &mut rng);
    let mr = vec_of(r.unit_cost, d.f, &mut rng);
    let mut pa = vec_of(r.capacity, d.f, &mut rng);
    let mut pb = vec_of(r.capacity, d.w, &mut rng);
    let mut pd = vec_of(r.capacity, d.i, &mut rng);
    let mut pr = vec_of(r.capacity, d.f, &mut rng);
    let hd = r.hd.sample(&mut rng);
    let hr = r.hr.sample(&mut rng);
    let ga = vec_of(r.emission, d.f, &mut rng);
    let gc = vec_of(r.emission, d.f, &mut rng);
    let gb = vec_of(r.emission, d.w, &mut rng);
    let gd = vec_of(r.emission, d.i, &mut rng);
    let gr = vec_of(r.emission, d.f, &mut rng);
    let gta = vec_of(r.transport_emission, d.tf, &mut rng);
    let gtb = vec_of(r.transport_emission, d.tw, &mut rng);
    let gtc = vec_of(r.transport_emission, d.tk, &mut rng);
    let gtd = vec_of(r.transport_emission, d.ti, &mut rng);
    let lambda = r.lambda.sample(&mut rng);

    // Stage-wise minimum throughput: full demand through factories and
    // warehouses, the collection floor through disassembly, and its
    // demolition share through remanufacturing.
    let total_q: f64 = q.iter().sum();
    scale_capacity(&mut pa, spec.margin * total_q)?;
    scale_capacity(&mut pb, spec.margin * total_q)?;
    scale_capacity(&mut pd, spec.margin * hd * total_q)?;
    scale_capacity(&mut pr, spec.margin * hr * hd * total_q)?;

    let inst = NetworkInstance {
        dims: d,
        q,
        ta,
        tb,
        tc,
        td,
        la,
        lb,
        lc,
        ld,
        da,
        db,
        dc,
        dd,
        ra,
        rb,
        rd,
        ma,
        mb,
        mc,
        md,
        mr,
        pa,
        pb,
        pd,
        pr,
        hd,
        hr,
        ga,
        gc,
        gb,
        gd,
        gr,
        gta,
        gtb,
        gtc,
        gtd,
        lambda,
        t: spec.t,
        include_assembly_emissions: false,
        currency: spec.currency.clone(),
    };
    inst.validate()?;

    // Relaxed LP probe; with fractional indicators allowed, feasibility of
    // the relaxation implies feasibility of the all-open integer point.
    let lp = build_milp(&inst, ObjectiveMode::Cost, None)?;
    let sol = solve_lp(&lp, &SolverConfig::default())?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Generation(format!(
            "sampled instance is infeasible after margin scaling (probe status {:?})",
            sol.status
        )));
    }
    Ok(inst)
}

fn scale_capacity(caps: &mut [f64], needed: f64) -> Result<()> {
    if needed <= 0.0 {
        return Ok(());
    }
    let total: f64 = caps.iter().sum();
    if total <= 0.0 {
        return Err(Error::Generation(
            "zero total capacity cannot cover positive demand".into(),
        ));
    }
    if total < needed {
        let scale = needed / total;
        for c in caps.iter_mut() {
            *c *= scale;
        }
    }
    Ok(())
}

/// Ready-made instances used by tests, examples, and documentation.
pub mod samples {
    use super::*;

    /// Single-echelon-width instance with every rate, distance, unit cost
    /// and emission factor equal to one, fixed costs 100, demand 10,
    /// capacities 100, collection floor 0.2, demolition floor 0.5, and no
    /// warehouse failure. Objective values on it are hand-checkable.
    pub fn unit_instance() -> NetworkInstance {
        let dims = Dims {
            f: 1,
            w: 1,
            c: 1,
            i: 1,
            tf: 1,
            tw: 1,
            tk: 1,
            ti: 1,
        };
        let one3 = vec![vec![vec![1.0]]];
        let one2 = vec![vec![1.0]];
        NetworkInstance {
            dims,
            q: vec![10.0],
            ta: one3.clone(),
            tb: one3.clone(),
            tc: one3.clone(),
            td: one3.clone(),
            la: one3.clone(),
            lb: one3.clone(),
            lc: one3.clone(),
            ld: one3,
            da: one2.clone(),
            db: one2.clone(),
            dc: one2.clone(),
            dd: one2,
            ra: vec![100.0],
            rb: vec![100.0],
            rd: vec![100.0],
            ma: vec![1.0],
            mb: vec![1.0],
            mc: vec![1.0],
            md: vec![1.0],
            mr: vec![1.0],
            pa: vec![100.0],
            pb: vec![100.0],
            pd: vec![100.0],
            pr: vec![100.0],
            hd: 0.2,
            hr: 0.5,
            ga: vec![1.0],
            gc: vec![1.0],
            gb: vec![1.0],
            gd: vec![1.0],
            gr: vec![1.0],
            gta: vec![1.0],
            gtb: vec![1.0],
            gtc: vec![1.0],
            gtd: vec![1.0],
            lambda: 0.0,
            t: 7.0,
            include_assembly_emissions: false,
            currency: "£".into(),
        }
    }

    /// The bundled 2-2-2-2 case document (single transport option per
    /// stage).
    pub fn bundled_case_json() -> &'static str {
        include_str!("../instances/bundled-2x2.json")
    }

    /// The bundled trade-off variant (two factory→warehouse transport
    /// options with opposed cost/emission profiles).
    pub fn bundled_tradeoff_json() -> &'static str {
        include_str!("../instances/bundled-2x2-tradeoff.json")
    }

    pub fn bundled_case() -> NetworkInstance {
        instance_from_json(bundled_case_json()).expect("bundled case is valid")
    }

    pub fn bundled_tradeoff() -> NetworkInstance {
        instance_from_json(bundled_tradeoff_json()).expect("bundled variant is valid")
    }
}
