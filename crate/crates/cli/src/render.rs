//! Text and JSON renderings of every command's result.
//!
//! JSON objects are `serde_json::Map`s, which are ordered by key, so the
//! serialized output is key-sorted and stable.

use std::fmt::Write;
use std::time::Duration;

use bott_core::bottverify::{Attempt, Certificate, Status, TangentRow, VarietyRow};
use bott_core::bwb::CohomologyTable;
use bott_core::flag::{FlagVariety, MarkedDiagram};
use bott_core::repchar::IrrepMultiset;
use bott_core::{Error, RootSystem, Weight};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::CaseOutcome;

pub const SCHEMA_VERSION: u32 = 1;

pub struct Doc {
    pub text: String,
    pub json: Value,
}

pub fn json_string(mut v: Value) -> String {
    if let Value::Object(m) = &mut v {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Integers that fit in `i64` as numbers, larger ones as strings.
fn big(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn weight(w: &Weight) -> Value {
    json!({ "coords": w.coords(), "label": w.label() })
}

fn variety(x: &FlagVariety) -> Value {
    let md = x.marked_diagram();
    json!({
        "name": md.to_string(),
        "type": md.dynkin().to_string(),
        "marked": md.marked_nodes(),
        "dim": x.dim(),
        "index": x.index(),
    })
}

fn secs(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e6
}

pub fn roots(rs: &RootSystem) -> Doc {
    let mut text = String::new();
    let t = rs.dynkin();
    writeln!(
        text,
        "type {t}, rank {}, {} positive roots",
        rs.rank(),
        rs.positive_roots().len()
    )
    .unwrap();
    writeln!(text, "Cartan matrix:").unwrap();
    for row in rs.cartan() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>3}")).collect();
        writeln!(text, "  {}", cells.join("")).unwrap();
    }
    let sym: Vec<String> = rs.symmetrizer().iter().map(|d| d.to_string()).collect();
    writeln!(text, "symmetrizer: {}", sym.join(" ")).unwrap();
    writeln!(text, "highest root: {}", rs.highest_long_root().label()).unwrap();
    writeln!(
        text,
        "highest short root: {}",
        rs.highest_short_root().label()
    )
    .unwrap();
    writeln!(text, "positive roots (simple-root coordinates | weight):").unwrap();
    let mut list = Vec::new();
    for r in rs.positive_roots() {
        writeln!(
            text,
            "  {:>2}  {:?}  {}{}",
            r.height,
            r.simple.as_slice(),
            r.weight.label(),
            if r.is_long() { "" } else { "  (short)" }
        )
        .unwrap();
        list.push(json!({
            "height": r.height,
            "simple": r.simple.as_slice(),
            "weight": weight(&r.weight),
            "long": r.is_long(),
        }));
    }
    let json = json!({
        "command": "roots",
        "type": t.to_string(),
        "rank": rs.rank(),
        "cartan": rs.cartan(),
        "symmetrizer": sym,
        "highest_long_root": weight(rs.highest_long_root()),
        "highest_short_root": weight(rs.highest_short_root()),
        "positive_roots": list,
    });
    Doc { text, json }
}

fn index_text(i: Option<i64>) -> String {
    i.map_or("-".into(), |i| i.to_string())
}

pub fn variety_table(name: &str, rows: &[VarietyRow]) -> Doc {
    let mut text = String::new();
    writeln!(text, "{:<10} {:>9} {:>6}", "variety", "dimension", "index").unwrap();
    let mut list = Vec::new();
    for r in rows {
        writeln!(
            text,
            "{:<10} {:>9} {:>6}",
            r.variety.to_string(),
            r.dim,
            index_text(r.index)
        )
        .unwrap();
        list.push(json!({
            "variety": r.variety.to_string(),
            "type": r.variety.dynkin().to_string(),
            "marked": r.variety.marked_nodes(),
            "dim": r.dim,
            "index": r.index,
        }));
    }
    let json = json!({ "command": "tables", "table": name, "rows": list });
    Doc { text, json }
}

pub fn e_weight_table(rows: &[TangentRow]) -> Doc {
    let mut text = String::new();
    writeln!(text, "{:<6} {:>5}  highest weight of gr_1", "type", "rank").unwrap();
    let mut list = Vec::new();
    for r in rows {
        writeln!(
            text,
            "{:<6} {:>5}  {}",
            r.dynkin.to_string(),
            r.rank,
            r.highest_weight.label()
        )
        .unwrap();
        list.push(json!({
            "type": r.dynkin.to_string(),
            "rank": r.rank,
            "weight": weight(&r.highest_weight),
        }));
    }
    let json = json!({ "command": "tables", "table": "e-weights", "rows": list });
    Doc { text, json }
}

pub fn exterior(
    x: &FlagVariety,
    source: &str,
    q: usize,
    twist: &Weight,
    dec: &IrrepMultiset,
) -> Result<Doc, Error> {
    let mut text = String::new();
    let twisted = if twist.is_zero() {
        String::new()
    } else {
        format!(" ⊗ O({})", twist.label())
    };
    writeln!(text, "Λ^{q} {source}{twisted} on {}", x.marked_diagram()).unwrap();
    let mut list = Vec::new();
    let mut total = BigInt::from(0);
    for (w, m) in dec.iter() {
        let d = x.levi().weyl_dimension(w)?;
        total += &d * m;
        writeln!(text, "  {m} × U^{}  (rank {d})", w.label()).unwrap();
        list.push(json!({ "weight": weight(w), "multiplicity": big(m), "rank": big(&d) }));
    }
    writeln!(text, "total rank {total}").unwrap();
    let json = json!({
        "command": "exterior",
        "variety": variety(x),
        "source": source,
        "q": q,
        "twist": weight(twist),
        "summands": list,
        "rank": big(&total),
    });
    Ok(Doc { text, json })
}

fn degree_map(
    x: &FlagVariety,
    entries: &std::collections::BTreeMap<usize, std::collections::BTreeMap<Weight, BigInt>>,
    text: &mut String,
) -> Result<Value, Error> {
    let mut out = serde_json::Map::new();
    for (p, reps) in entries {
        let mut list = Vec::new();
        let mut parts = Vec::new();
        for (w, m) in reps {
            let d = x.group().weyl_dimension(w)?;
            parts.push(if *m == BigInt::from(1) {
                format!("V^{} (dim {d})", w.label())
            } else {
                format!("{m} × V^{} (dim {d})", w.label())
            });
            list.push(json!({ "weight": weight(w), "multiplicity": big(m), "dimension": big(&d) }));
        }
        writeln!(text, "  H^{p}: {}", parts.join(" ⊕ ")).unwrap();
        out.insert(p.to_string(), Value::Array(list));
    }
    Ok(Value::Object(out))
}

pub fn cohomology(x: &FlagVariety, w: &Weight, table: &CohomologyTable) -> Result<Doc, Error> {
    let mut text = String::new();
    writeln!(text, "H^•({}, U^{})", x.marked_diagram(), w.label()).unwrap();
    if table.is_empty() {
        writeln!(text, "  all cohomology vanishes").unwrap();
    }
    let degrees = degree_map(x, table.entries(), &mut text)?;
    let json = json!({
        "command": "cohomology",
        "variety": variety(x),
        "weight": weight(w),
        "cohomology": degrees,
        "euler_characteristic": big(&table.euler_characteristic(x)?),
    });
    Ok(Doc { text, json })
}

fn status_json(s: &Status) -> Value {
    match s {
        Status::Ambiguous { witnesses } => json!({
            "name": s.name(),
            "witnesses": witnesses.iter().map(weight).collect::<Vec<_>>(),
        }),
        _ => json!({ "name": s.name() }),
    }
}

fn attempts_json(attempts: &[Attempt], timing: bool) -> Value {
    attempts
        .iter()
        .map(|a| {
            let mut v = json!({ "q": a.q, "status": a.status.name() });
            if timing {
                v["seconds"] = json!(secs(a.elapsed));
            }
            v
        })
        .collect()
}

pub fn certificate(
    x: &FlagVariety,
    c: &Certificate,
    attempts: Option<&[Attempt]>,
    timing: bool,
) -> Result<Doc, Error> {
    let mut text = String::new();
    writeln!(
        text,
        "{}: H^{}(Λ^{} T_X ⊗ O({})) — {}{}",
        x.marked_diagram(),
        c.degree,
        c.q,
        c.twist.label(),
        c.status.name(),
        if c.exact { ", exact" } else { "" }
    )
    .unwrap();
    let mut survivors = Vec::new();
    let mut details = Vec::new();
    for s in &c.survivors {
        let d = x.group().weyl_dimension(&s.weight)?;
        writeln!(
            text,
            "  survivor V^{} (dim {d}) multiplicity {}{} [{}]",
            s.weight.label(),
            if s.rule.name() == "euler-bound" {
                "≥ "
            } else {
                ""
            },
            s.multiplicity,
            s.rule.name()
        )
        .unwrap();
        survivors.push(json!(s.weight.coords()));
        details.push(json!({
            "weight": weight(&s.weight),
            "multiplicity": big(&s.multiplicity),
            "rule": s.rule.name(),
            "dimension": big(&d),
            "e1_degrees": s.degrees,
        }));
    }
    if let Status::Ambiguous { witnesses } = &c.status {
        let w: Vec<String> = witnesses.iter().map(|w| w.label()).collect();
        writeln!(text, "  ambiguous: {}", w.join(", ")).unwrap();
    }
    writeln!(
        text,
        "E1 page ({} compositions, {} Levi irreducibles):",
        c.compositions, c.levi_irreducibles
    )
    .unwrap();
    let e1 = degree_map(x, &c.e1, &mut text)?;
    let mut json = json!({
        "command": "verify",
        "variety": variety(x),
        "q": c.q,
        "twist": weight(&c.twist),
        "degree": c.degree,
        "status": status_json(&c.status),
        "exact": c.exact,
        "survivors": survivors,
        "survivor_details": details,
        "unresolved": c.unresolved.iter().map(weight).collect::<Vec<_>>(),
        "e1": e1,
        "provenance": { "compositions": c.compositions, "levi_irreducibles": c.levi_irreducibles },
    });
    if let Some(a) = attempts {
        let list: Vec<String> = a
            .iter()
            .map(|a| format!("q={} {}", a.q, a.status.name()))
            .collect();
        writeln!(text, "search: {}", list.join(", ")).unwrap();
        json["attempts"] = attempts_json(a, timing);
    }
    if timing {
        writeln!(text, "time: {:.3} s", c.elapsed.as_secs_f64()).unwrap();
        json["seconds"] = json!(secs(c.elapsed));
    }
    Ok(Doc { text, json })
}

pub fn not_found(x: &FlagVariety, q_max: usize, attempts: &[Attempt], timing: bool) -> Doc {
    let mut text = String::new();
    writeln!(
        text,
        "{}: no certificate for q ≤ {q_max}",
        x.marked_diagram()
    )
    .unwrap();
    for a in attempts {
        writeln!(text, "  q={} {}", a.q, a.status.name()).unwrap();
    }
    let json = json!({
        "command": "verify",
        "variety": variety(x),
        "status": { "name": "not-found" },
        "q_max": q_max,
        "attempts": attempts_json(attempts, timing),
    });
    Doc { text, json }
}

pub fn budget_failure(x: &FlagVariety, q: usize, reason: &str) -> Doc {
    let text = format!(
        "{}: budget exceeded at q={q}: {reason}\n",
        x.marked_diagram()
    );
    let json = json!({
        "command": "verify",
        "variety": variety(x),
        "q": q,
        "status": { "name": "budget-exceeded", "reason": reason },
    });
    Doc { text, json }
}

pub fn certify_all(rows: &[(MarkedDiagram, usize, CaseOutcome, Duration)], timing: bool) -> Doc {
    let mut text = String::new();
    let mut list = Vec::new();
    let mut certified = 0;
    for (md, q, outcome, elapsed) in rows {
        let mut line = format!("{:<9} q={:<2} ", md.to_string(), q);
        let mut v = json!({ "variety": md.to_string(), "q": q });
        match outcome {
            CaseOutcome::Done {
                certificate: c,
                minimal_q,
            } => {
                if c.status == Status::Certified {
                    certified += 1;
                }
                let surv: Vec<String> = c.survivors.iter().map(|s| s.weight.label()).collect();
                write!(
                    line,
                    "{:<9} {:<5} survivors {}",
                    c.status.name(),
                    if c.exact { "exact" } else { "" },
                    if surv.is_empty() {
                        "-".into()
                    } else {
                        surv.join(" ⊕ ")
                    }
                )
                .unwrap();
                if let Some(m) = minimal_q.filter(|m| m != q) {
                    write!(line, "  (minimal q={m})").unwrap();
                }
                v["status"] = json!(c.status.name());
                v["exact"] = json!(c.exact);
                v["survivors"] = c
                    .survivors
                    .iter()
                    .map(|s| json!(s.weight.coords()))
                    .collect();
                v["survivor_labels"] = json!(surv);
                v["minimal_q"] = json!(minimal_q);
            }
            CaseOutcome::Budget(reason) => {
                write!(line, "budget-exceeded: {reason}").unwrap();
                v["status"] = json!("budget-exceeded");
                v["reason"] = json!(reason);
            }
        }
        if timing {
            write!(line, "  [{:.3} s]", elapsed.as_secs_f64()).unwrap();
            v["seconds"] = json!(secs(*elapsed));
        }
        writeln!(text, "{}", line.trim_end()).unwrap();
        list.push(v);
    }
    writeln!(text, "{certified}/{} certified", rows.len()).unwrap();
    let json = json!({
        "command": "certify-all",
        "cases": list,
        "certified": certified,
        "total": rows.len(),
    });
    Doc { text, json }
}
