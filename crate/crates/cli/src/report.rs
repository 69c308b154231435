//! Human and machine renderings of command results.
//!
//! Machine output is one JSON object per invocation. Every number that comes
//! from the engine is an exact rational written as a string (`"3/5"`,
//! `"75"`); the only JSON numbers are indices, counts and `elapsed_micros`.
//!
//! A state is `{"space": [domain names], "cells": [[set, ...], ...]}` where a
//! set is one of
//! `{"domain", "kind": "box", "intervals": [[lo, hi], ...]}`,
//! `{"domain", "kind": "polytope", "vertices": [[x, ...], ...], "label"?}`,
//! `{"domain", "kind": "set", "elements": [name, ...]}`.
//! A diagram is `{"links": [[i, j], ...], "survivors": [k, ...]}`, 1-based.

use convexsem::convex::{ConvexSet, Shape};
use convexsem::pregroup::LinkDiagram;
use convexsem::relation::{AuditReport, Relation};
use convexsem::scalar::fmt_exact;
use serde_json::{json, Value};

pub fn set_json(set: &ConvexSet) -> Value {
    let domain = set.domain().name();
    match set.shape() {
        Shape::Box(ivs) => json!({
            "domain": domain,
            "kind": "box",
            "intervals": ivs.iter().map(|iv| json!([fmt_exact(&iv.lo), fmt_exact(&iv.hi)])).collect::<Vec<_>>(),
        }),
        Shape::Polytope(vs) => {
            let mut v = json!({
                "domain": domain,
                "kind": "polytope",
                "vertices": vs.iter().map(|p| p.iter().map(fmt_exact).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            if let Some(label) = set.label() {
                v["label"] = json!(label.source());
            }
            v
        }
        Shape::Lattice(ms) => json!({
            "domain": domain,
            "kind": "set",
            "elements": ms.iter().map(|&m| set.domain().element_name(m)).collect::<Vec<_>>(),
        }),
    }
}

pub fn state_json(r: &Relation) -> Value {
    json!({
        "space": r.space().factors().iter().map(|d| d.name()).collect::<Vec<_>>(),
        "cells": r.cells().iter().map(|c| c.components().iter().map(set_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn diagram_json(d: &LinkDiagram) -> Value {
    json!({
        "links": d.links_one_based().iter().map(|(i, j)| json!([i, j])).collect::<Vec<_>>(),
        "survivors": d.survivors_one_based(),
    })
}

pub fn audit_json(a: &AuditReport) -> Value {
    json!({
        "exhaustive": a.exhaustive,
        "clean": a.is_clean(),
        "violations": a.violations.iter().map(|v| json!({"cells": [v.cells.0, v.cells.1], "witness": v.witness})).collect::<Vec<_>>(),
    })
}

/// One line per cell, unions spelled out.
pub fn state_human(r: &Relation) -> String {
    if r.cells().len() <= 1 {
        return r.to_string();
    }
    if r.target().len() == 1 && r.target().is_all_lattice() {
        return r.to_string();
    }
    let lines: Vec<String> = r.cells().iter().map(|c| format!("  {c}")).collect();
    format!("union of {} cells\n{}", r.cells().len(), lines.join("\n"))
}

pub fn audit_human(a: &AuditReport) -> String {
    if a.is_clean() {
        let how = if a.exhaustive { "exhaustive" } else { "sampled" };
        return format!("convex ({how})");
    }
    let mut out = format!("{} convexity violation(s)", a.violations.len());
    for v in a.violations.iter().take(5) {
        out.push_str(&format!("\n  cells {} and {}: {} lies in no cell", v.cells.0 + 1, v.cells.1 + 1, v.witness));
    }
    if a.violations.len() > 5 {
        out.push_str(&format!("\n  ... {} more", a.violations.len() - 5));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use convexsem::semantics::{demo_lexicon, evaluate_phrase};

    #[test]
    fn machine_state_has_only_string_scalars() {
        let lex = demo_lexicon();
        let r = evaluate_phrase(&lex, "yellow banana", "n").unwrap();
        let v = state_json(&r);
        let text = v.to_string();
        assert!(text.contains(r#"["60","75"]"#), "{text}");
        assert!(text.contains(r#""label":"hull(sweet bitter)""#));
        assert!(!text.contains('.'), "{text}");
    }

    #[test]
    fn lattice_state_lists_elements() {
        let lex = demo_lexicon();
        let r = evaluate_phrase(&lex, "beer tastes sweet", "s").unwrap();
        assert_eq!(state_json(&r)["cells"][0][0]["elements"], json!(["(0,1)"]));
        assert_eq!(state_human(&r), "{(0,1)}");
    }
}
