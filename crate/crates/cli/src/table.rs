//! Solution tables printed to standard output: the objective line pair and
//! the decision-variable listing, three variables per row.

use greenloop_core::model::{FlowSolution, NetworkInstance};
use greenloop_core::pareto::FrontEntry;

pub fn print_front(inst: &NetworkInstance, entries: &[FrontEntry]) {
    for (idx, entry) in entries.iter().enumerate() {
        let tag = match &entry.provenance {
            greenloop_core::pareto::Provenance::Eps { epsilon } => format!("eps = {epsilon:.3}"),
            greenloop_core::pareto::Provenance::Ga { generation } => {
                format!("generation {generation}")
            }
            greenloop_core::pareto::Provenance::Oracle { .. } => "oracle".to_string(),
        };
        let proven = if entry.proven { "proven" } else { "unproven" };
        println!("point {} ({tag}, {proven})", idx + 1);
        println!("  f1 = {} {:.3}", inst.currency, entry.f1);
        println!("  f2 = {:.3}(kg)", entry.f2);
        print_variables(&entry.solution);
        println!();
    }
}

fn print_variables(sol: &FlowSolution) {
    let rows = variable_rows(sol);
    for chunk in rows.chunks(3) {
        let line: Vec<String> = chunk
            .iter()
            .map(|(name, value)| format!("{name:<10} {value:<18}"))
            .collect();
        println!("  {}", line.join(" "));
    }
}

fn fmt_indicator(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.3}")
    }
}

fn variable_rows(sol: &FlowSolution) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    for (f, &x) in sol.xa.iter().enumerate() {
        rows.push((format!("Xa_{}", f + 1), fmt_indicator(x)));
    }
    for (w, &x) in sol.xb.iter().enumerate() {
        rows.push((format!("Xb_{}", w + 1), fmt_indicator(x)));
    }
    for (i, &x) in sol.xd.iter().enumerate() {
        rows.push((format!("Xd_{}", i + 1), fmt_indicator(x)));
    }
    let flows = |name: &str, t: &Vec<Vec<Vec<f64>>>, rows: &mut Vec<(String, String)>| {
        for (o, m) in t.iter().enumerate() {
            for (a, row) in m.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    rows.push((
                        format!("{name}_{}{}^{}", a + 1, b + 1, o + 1),
                        format!("{v:.3}(units)"),
                    ));
                }
            }
        }
    };
    flows("Ya", &sol.ya, &mut rows);
    flows("Yb", &sol.yb, &mut rows);
    flows("Yc", &sol.yc, &mut rows);
    flows("Yd", &sol.yd, &mut rows);
    rows
}
