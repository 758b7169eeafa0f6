//! Command implementations. Human-readable tables go to standard output;
//! machine artifacts are written only through `--out`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use greenloop_core::branch_bound::solve_milp;
use greenloop_core::eps::{payoff_table, sweep, EpsConfig};
use greenloop_core::error::Error;
use greenloop_core::formulation::{build_milp, ObjectiveMode};
use greenloop_core::io;
use greenloop_core::lp::{LpStatus, SolverConfig};
use greenloop_core::model::{Dims, NetworkInstance};
use greenloop_core::moga::{evolve, GaConfig};
use greenloop_core::oracle::{brute_force_front, brute_force_milp, ENUMERATION_BOUND};
use greenloop_core::pareto;
use greenloop_core::simplex::solve_lp;

use crate::manifest::{now_unix, RunManifest};
use crate::{svg, table, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_LIMIT, EXIT_OK, EXIT_VERIFY, OUT_DIR_ENV};

fn input_error(context: &str, err: &Error) -> u8 {
    eprintln!("error: {context}: {err}");
    match err {
        Error::ModelInfeasible => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    }
}

/// Relative output paths resolve against `GREENLOOP_OUT_DIR` when set.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(path);
            }
        }
    }
    path.to_path_buf()
}

fn load_instance(path: &Path) -> Result<NetworkInstance, u8> {
    io::load_instance(path).map_err(|e| input_error(&path.display().to_string(), &e))
}

fn summary_line(name: &str, values: &[f64]) -> String {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!("  {name:<4} n={:<3} min={lo:<12.4} max={hi:<12.4}", values.len())
}

pub fn validate(path: &Path, dump_lp: Option<&Path>) -> u8 {
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let d = inst.dims;
    println!(
        "instance {}: {} factories, {} warehouses, {} customers, {} disassembly centers",
        path.display(),
        d.f,
        d.w,
        d.c,
        d.i
    );
    println!(
        "transport options per stage: {} / {} / {} / {}",
        d.tf, d.tw, d.tk, d.ti
    );
    println!("parameter summaries:");
    println!("{}", summary_line("q", &inst.q));
    println!("{}", summary_line("pa", &inst.pa));
    println!("{}", summary_line("pb", &inst.pb));
    println!("{}", summary_line("pd", &inst.pd));
    println!("{}", summary_line("pr", &inst.pr));
    println!("{}", summary_line("ra", &inst.ra));
    println!("{}", summary_line("rb", &inst.rb));
    println!("{}", summary_line("rd", &inst.rd));
    println!(
        "  hd={} hr={} lambda={} t={} (reliability {:.6})",
        inst.hd,
        inst.hr,
        inst.lambda,
        inst.t,
        inst.reliability()
    );

    let lp = match build_milp(&inst, ObjectiveMode::Cost, None) {
        Ok(lp) => lp,
        Err(e) => return input_error("building matrix", &e),
    };
    if let Some(dump) = dump_lp {
        let dump = resolve_out(dump);
        if let Err(e) = std::fs::write(&dump, lp.dump_text()) {
            eprintln!("error: writing {}: {e}", dump.display());
            return EXIT_INPUT;
        }
        println!("matrix dumped to {}", dump.display());
    }
    match solve_lp(&lp, &SolverConfig::default()) {
        Ok(sol) if sol.status == LpStatus::Optimal => {
            println!(
                "feasibility probe: feasible (relaxed cost bound {} {:.3})",
                inst.currency, sol.objective
            );
            EXIT_OK
        }
        Ok(sol) => {
            println!("feasibility probe: {:?}", sol.status);
            EXIT_INFEASIBLE
        }
        Err(e) => input_error("feasibility probe", &e),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve_eps(
    path: &Path,
    grid: usize,
    relaxed: bool,
    out: &Path,
    csv: Option<&Path>,
    threads: Option<usize>,
) -> u8 {
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let config = EpsConfig {
        grid_points: grid,
        relaxed,
        ..EpsConfig::default()
    };
    let started = Instant::now();
    let outcome = match sweep(&inst, &config) {
        Ok(o) => o,
        Err(Error::ModelInfeasible) => {
            eprintln!("error: instance admits no feasible configuration");
            return EXIT_INFEASIBLE;
        }
        Err(e) => return input_error("sweep", &e),
    };
    let elapsed = started.elapsed().as_secs_f64();

    table::print_front(&inst, &outcome.front.entries);
    println!(
        "front: {} points, ideal ({:.3}, {:.3}), nadir ({:.3}, {:.3})",
        outcome.front.len(),
        outcome.payoff.ideal.0,
        outcome.payoff.ideal.1,
        outcome.payoff.nadir.0,
        outcome.payoff.nadir.1
    );

    let out = resolve_out(out);
    if let Err(e) = io::save_front(&out, &outcome.front) {
        return input_error("writing front", &e);
    }
    let mut artifacts = vec![out.display().to_string()];
    if let Some(csv_path) = csv {
        let csv_path = resolve_out(csv_path);
        if let Err(e) = std::fs::write(&csv_path, io::front_to_csv(&outcome.front)) {
            eprintln!("error: writing csv: {e}");
            return EXIT_INPUT;
        }
        artifacts.push(csv_path.display().to_string());
    }
    let manifest = RunManifest {
        command: format!(
            "solve eps {} --grid {grid}{} --out {}",
            path.display(),
            if relaxed { " --relaxed" } else { "" },
            out.display()
        ),
        instance_hash: outcome.front.metadata.instance_hash.clone(),
        config: serde_json::to_value(&config).expect("config serializes"),
        seed: None,
        threads,
        wall_clock_seconds: elapsed,
        solver_stats: serde_json::to_value(outcome.stats).expect("stats serialize"),
        artifacts,
        created_unix: now_unix(),
    };
    if let Err(e) = manifest.write_next_to(&out) {
        eprintln!("error: writing manifest: {e}");
        return EXIT_INPUT;
    }
    println!("front written to {}", out.display());
    if outcome.front.metadata.exact {
        EXIT_OK
    } else {
        eprintln!("warning: solver limits were hit; front is not proven exact");
        EXIT_LIMIT
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve_ga(
    path: &Path,
    pop: usize,
    gens: u64,
    seed: u64,
    relaxed: bool,
    out: &Path,
    trace: Option<&Path>,
    csv: Option<&Path>,
    threads: Option<usize>,
) -> u8 {
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let config = GaConfig {
        population_size: pop,
        generations: gens,
        relaxed,
        ..GaConfig::new(seed)
    };
    let started = Instant::now();
    let outcome = match evolve(&inst, &config) {
        Ok(o) => o,
        Err(e) => return input_error("evolve", &e),
    };
    let elapsed = started.elapsed().as_secs_f64();

    if let Some(trace_path) = trace {
        let trace_path = resolve_out(trace_path);
        let mut csv = String::from("generation,best_f1,best_f2,feasible\n");
        for t in &outcome.trace {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                t.generation,
                t.best_f1.map(|v| v.to_string()).unwrap_or_default(),
                t.best_f2.map(|v| v.to_string()).unwrap_or_default(),
                t.feasible
            ));
        }
        if let Err(e) = std::fs::write(&trace_path, csv) {
            eprintln!("error: writing trace: {e}");
            return EXIT_INPUT;
        }
    }

    if let Some(diag) = &outcome.diagnostic {
        eprintln!("error: {diag}");
        return EXIT_INFEASIBLE;
    }
    table::print_front(&inst, &outcome.front.entries);
    println!(
        "front: {} points after {} evaluations",
        outcome.front.len(),
        outcome.evaluations
    );

    let out = resolve_out(out);
    if let Err(e) = io::save_front(&out, &outcome.front) {
        return input_error("writing front", &e);
    }
    let mut artifacts = vec![out.display().to_string()];
    if let Some(csv_path) = csv {
        let csv_path = resolve_out(csv_path);
        if let Err(e) = std::fs::write(&csv_path, io::front_to_csv(&outcome.front)) {
            eprintln!("error: writing csv: {e}");
            return EXIT_INPUT;
        }
        artifacts.push(csv_path.display().to_string());
    }
    let manifest = RunManifest {
        command: format!(
            "solve ga {} --pop {pop} --gens {gens} --seed {seed}{} --out {}",
            path.display(),
            if relaxed { " --relaxed" } else { "" },
            out.display()
        ),
        instance_hash: outcome.front.metadata.instance_hash.clone(),
        config: serde_json::to_value(&config).expect("config serializes"),
        seed: Some(seed),
        threads,
        wall_clock_seconds: elapsed,
        solver_stats: serde_json::json!({ "evaluations": outcome.evaluations }),
        artifacts,
        created_unix: now_unix(),
    };
    if let Err(e) = manifest.write_next_to(&out) {
        eprintln!("error: writing manifest: {e}");
        return EXIT_INPUT;
    }
    println!("front written to {}", out.display());
    EXIT_OK
}

pub fn compare(front_a: &Path, front_b: &Path, out: &Path) -> u8 {
    let a = match io::load_front(front_a) {
        Ok(f) => f,
        Err(e) => return input_error(&front_a.display().to_string(), &e),
    };
    let b = match io::load_front(front_b) {
        Ok(f) => f,
        Err(e) => return input_error(&front_b.display().to_string(), &e),
    };
    let metrics = match pareto::compare(&a, &b) {
        Ok(m) => m,
        Err(e) => return input_error("compare", &e),
    };

    let report = format!(
        "front A: {} ({}, {} points)\n\
         front B: {} ({}, {} points)\n\
         reference point: ({}, {})\n\
         hypervolume A: {}\n\
         hypervolume B: {}\n\
         hypervolume ratio (B/A): {}\n\
         coverage C(A,B): {}\n\
         coverage C(B,A): {}\n\
         anchors A (min f1, min f2): ({}, {})\n\
         anchors B (min f1, min f2): ({}, {})\n",
        front_a.display(),
        a.metadata.method,
        metrics.points_a,
        front_b.display(),
        b.metadata.method,
        metrics.points_b,
        metrics.reference.0,
        metrics.reference.1,
        metrics.hypervolume_a,
        metrics.hypervolume_b,
        metrics.hypervolume_ratio,
        metrics.coverage_ab,
        metrics.coverage_ba,
        metrics.anchors_a.0,
        metrics.anchors_a.1,
        metrics.anchors_b.0,
        metrics.anchors_b.1,
    );
    print!("{report}");

    let out = resolve_out(out);
    if let Err(e) = std::fs::write(&out, &report) {
        eprintln!("error: writing report: {e}");
        return EXIT_INPUT;
    }
    let csv = format!(
        "metric,value\nhypervolume_a,{}\nhypervolume_b,{}\nhypervolume_ratio,{}\ncoverage_ab,{}\ncoverage_ba,{}\npoints_a,{}\npoints_b,{}\nreference_f1,{}\nreference_f2,{}\n",
        metrics.hypervolume_a,
        metrics.hypervolume_b,
        metrics.hypervolume_ratio,
        metrics.coverage_ab,
        metrics.coverage_ba,
        metrics.points_a,
        metrics.points_b,
        metrics.reference.0,
        metrics.reference.1,
    );
    let csv_path = out.with_extension("csv");
    if let Err(e) = std::fs::write(&csv_path, csv) {
        eprintln!("error: writing csv: {e}");
        return EXIT_INPUT;
    }
    println!("report written to {} and {}", out.display(), csv_path.display());
    EXIT_OK
}

fn parse_dims(spec: &str) -> Result<Dims, String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 8 {
        return Err("expected 8 comma-separated counts: F,W,C,I,TF,TW,TK,TI".into());
    }
    let mut v = [0usize; 8];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("bad count `{part}`: {e}"))?;
    }
    Ok(Dims {
        f: v[0],
        w: v[1],
        c: v[2],
        i: v[3],
        tf: v[4],
        tw: v[5],
        tk: v[6],
        ti: v[7],
    })
}

pub fn gen(seed: u64, dims: &str, margin: f64, bundled: Option<&str>, out: &Path) -> u8 {
    let out = resolve_out(out);
    if let Some(which) = bundled {
        let text = match which {
            "case" => greenloop_core::io::samples::bundled_case_json(),
            "tradeoff" => greenloop_core::io::samples::bundled_tradeoff_json(),
            other => {
                eprintln!("error: unknown bundled instance `{other}` (use `case` or `tradeoff`)");
                return EXIT_INPUT;
            }
        };
        if let Err(e) = std::fs::write(&out, text) {
            eprintln!("error: writing {}: {e}", out.display());
            return EXIT_INPUT;
        }
        println!("bundled instance written to {}", out.display());
        return EXIT_OK;
    }

    let dims = match parse_dims(dims) {
        Ok(d) => d,
        Err(msg) => {
            eprintln!("error: --dims: {msg}");
            return EXIT_INPUT;
        }
    };
    let spec = io::GeneratorSpec {
        margin,
        ..io::GeneratorSpec::new(seed, dims)
    };
    let inst = match io::generate(&spec) {
        Ok(i) => i,
        Err(e) => return input_error("generate", &e),
    };
    let provenance = format!(
        "generated: seed={seed}, dims={},{},{},{},{},{},{},{}, margin={margin}",
        dims.f, dims.w, dims.c, dims.i, dims.tf, dims.tw, dims.tk, dims.ti
    );
    if let Err(e) = io::save_instance(&out, &inst, &provenance) {
        return input_error("writing instance", &e);
    }
    println!("instance written to {}", out.display());
    EXIT_OK
}

struct VerifyCheck {
    name: String,
    oracle: f64,
    exact: f64,
    ok: bool,
}

pub fn verify(path: &Path, grid: usize) -> u8 {
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(code) => return code,
    };
    if inst.dims.indicator_count() > ENUMERATION_BOUND {
        eprintln!(
            "error: instance has {} binary variables; verify enumerates at most {ENUMERATION_BOUND}",
            inst.dims.indicator_count()
        );
        return EXIT_INPUT;
    }
    let rel_close = |a: f64, b: f64| (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0);
    let mut checks: Vec<VerifyCheck> = Vec::new();
    let solver = SolverConfig::default();

    let check_mode = |name: String, mode: ObjectiveMode, cap: Option<f64>, checks: &mut Vec<VerifyCheck>| -> Result<f64, Error> {
        let oracle = brute_force_milp(&inst, mode, cap)?;
        let lp = build_milp(&inst, mode, cap)?;
        let milp = solve_milp(&lp, &solver)?;
        let oracle_obj = oracle.objective.unwrap_or(f64::INFINITY);
        let milp_obj = if milp.status == LpStatus::Optimal {
            milp.objective
        } else {
            f64::INFINITY
        };
        let ok = if oracle_obj.is_finite() || milp_obj.is_finite() {
            rel_close(oracle_obj, milp_obj)
        } else {
            true
        };
        checks.push(VerifyCheck {
            name,
            oracle: oracle_obj,
            exact: milp_obj,
            ok,
        });
        Ok(oracle_obj)
    };

    let run = (|| -> Result<(), Error> {
        check_mode("min cost".into(), ObjectiveMode::Cost, None, &mut checks)?;
        let e_min = check_mode("min emissions".into(), ObjectiveMode::Emissions, None, &mut checks)?;
        // Emission reach of the cost-optimal run bounds the cap ladder.
        let payoff = payoff_table(&inst, &EpsConfig::default())?;
        let e_max = payoff.nadir.1;
        for k in 0..3 {
            let cap = e_min + (e_max - e_min) * k as f64 / 2.0;
            check_mode(
                format!("min cost s.t. emissions <= {cap:.3}"),
                ObjectiveMode::CostWithEmissionCap,
                Some(cap),
                &mut checks,
            )?;
        }
        Ok(())
    })();
    if let Err(e) = run {
        return input_error("verify", &e);
    }

    // Sweep equivalence, point for point.
    let exact_front = match sweep(
        &inst,
        &EpsConfig {
            grid_points: grid,
            ..EpsConfig::default()
        },
    ) {
        Ok(o) => o.front,
        Err(e) => return input_error("sweep", &e),
    };
    let oracle_front = match brute_force_front(&inst, grid) {
        Ok(o) => o.front,
        Err(e) => return input_error("oracle sweep", &e),
    };
    let mut front_ok = exact_front.len() == oracle_front.len();
    if front_ok {
        for (a, b) in exact_front.entries.iter().zip(&oracle_front.entries) {
            front_ok &= rel_close(a.f1, b.f1) && rel_close(a.f2, b.f2);
        }
    }

    println!(
        "{:<40} {:>16} {:>16} {:>6}",
        "check", "oracle", "exact", "ok"
    );
    let mut all_ok = front_ok;
    for c in &checks {
        all_ok &= c.ok;
        println!(
            "{:<40} {:>16.4} {:>16.4} {:>6}",
            c.name,
            c.oracle,
            c.exact,
            if c.ok { "yes" } else { "NO" }
        );
    }
    println!(
        "{:<40} {:>16} {:>16} {:>6}",
        format!("sweep equivalence ({grid} grid points)"),
        oracle_front.len(),
        exact_front.len(),
        if front_ok { "yes" } else { "NO" }
    );
    if all_ok {
        println!("verify: all checks passed");
        EXIT_OK
    } else {
        eprintln!("verify: MISMATCH between enumeration and exact solver");
        EXIT_VERIFY
    }
}

pub fn plot(fronts: &[PathBuf], out: &Path) -> u8 {
    if fronts.is_empty() {
        eprintln!("error: plot needs at least one front file");
        return EXIT_INPUT;
    }
    let mut series = Vec::new();
    let mut csv = String::from("front,f1,f2,method,epsilon_or_gen,proven\n");
    for path in fronts {
        let front = match io::load_front(path) {
            Ok(f) => f,
            Err(e) => return input_error(&path.display().to_string(), &e),
        };
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| path.display().to_string());
        for e in &front.entries {
            csv.push_str(&format!(
                "{stem},{},{},{},{},{}\n",
                e.f1,
                e.f2,
                e.provenance.method(),
                e.provenance.epsilon_or_gen(),
                e.proven
            ));
        }
        series.push(svg::Series {
            label: format!("{stem} ({})", front.metadata.method),
            points: front.points(),
        });
    }
    let image = svg::render(&series, "f1 — total cost", "f2 — total CO2 (kg)");
    let out = resolve_out(out);
    if let Err(e) = std::fs::write(&out, image) {
        eprintln!("error: writing {}: {e}", out.display());
        return EXIT_INPUT;
    }
    let csv_path = out.with_extension("csv");
    if let Err(e) = std::fs::write(&csv_path, csv) {
        eprintln!("error: writing {}: {e}", csv_path.display());
        return EXIT_INPUT;
    }
    println!("plot written to {} and {}", out.display(), csv_path.display());
    EXIT_OK
}
