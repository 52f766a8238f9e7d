//! Serialization of state graphs: a stable JSON schema for machine
//! consumers and Graphviz DOT for visual inspection.

use crate::semantics::Lts;
use crate::syntax::{Action, Alphabet};
use serde_json::json;
use std::fmt::Write;

/// The stable JSON surface for a built graph.
pub fn lts_to_json(lts: &Lts, alphabet: &Alphabet) -> serde_json::Value {
    let states: Vec<_> = lts
        .state_ids()
        .map(|id| {
            let st = lts.state(id);
            json!({
                "id": id.0,
                "term": st.term.to_string(),
                "stable": st.stable,
                "inconsistent": lts.in_f(id),
                "reachable": st.reachable,
            })
        })
        .collect();
    let transitions: Vec<_> = lts
        .transitions()
        .map(|(from, label, to)| {
            json!({
                "from": from.0,
                "label": label.to_string(),
                "to": to.0,
            })
        })
        .collect();
    json!({
        "alphabet": alphabet.iter().collect::<Vec<_>>(),
        "initial": lts.initial().0,
        "states": states,
        "transitions": transitions,
    })
}

/// Graphviz rendering: inconsistent states double-circled and filled,
/// tau-edges dashed, unreachable component states in their own cluster.
pub fn lts_to_dot(lts: &Lts) -> String {
    let mut out = String::from("digraph lts {\n  rankdir=LR;\n  node [shape=circle];\n");
    let node = |id: crate::semantics::StateId| format!("s{}", id.0);
    let emit_state = |out: &mut String, id: crate::semantics::StateId, indent: &str| {
        let st = lts.state(id);
        let mut attrs = vec![format!("label=\"{}\"", escape(&st.term.to_string()))];
        if lts.in_f(id) {
            attrs.push("shape=doublecircle".into());
            attrs.push("style=filled".into());
            attrs.push("fillcolor=lightgray".into());
        }
        if id == lts.initial() {
            attrs.push("penwidth=2".into());
        }
        writeln!(out, "{indent}{} [{}];", node(id), attrs.join(", ")).unwrap();
    };
    for id in lts.state_ids().filter(|&s| lts.state(s).reachable) {
        emit_state(&mut out, id, "  ");
    }
    let unreachable: Vec<_> = lts.state_ids().filter(|&s| !lts.state(s).reachable).collect();
    if !unreachable.is_empty() {
        out.push_str("  subgraph cluster_components {\n    label=\"component closure\";\n    style=dashed;\n");
        for id in unreachable {
            emit_state(&mut out, id, "    ");
        }
        out.push_str("  }\n");
    }
    for (from, label, to) in lts.transitions() {
        let style = if *label == Action::Tau {
            ", style=dashed"
        } else {
            ""
        };
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"{}];",
            node(from),
            node(to),
            label,
            style
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::build_lts;
    use crate::syntax::{parse_alphabet, parse_term};

    #[test]
    fn json_schema_shape() {
        let ab = parse_alphabet("a,b").unwrap();
        let p = parse_term("a.0 \\/ b.0", &ab).unwrap();
        let lts = build_lts(&p, 100).unwrap();
        let v = lts_to_json(&lts, &ab);
        assert_eq!(v["alphabet"], serde_json::json!(["a", "b"]));
        assert_eq!(v["initial"], serde_json::json!(lts.initial().0));
        assert_eq!(v["states"].as_array().unwrap().len(), lts.state_ids().count());
        for s in v["states"].as_array().unwrap() {
            for key in ["id", "term", "stable", "inconsistent", "reachable"] {
                assert!(!s[key].is_null(), "missing {key}");
            }
        }
        for t in v["transitions"].as_array().unwrap() {
            for key in ["from", "label", "to"] {
                assert!(!t[key].is_null(), "missing {key}");
            }
        }
        // round-trips through serde_json text
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<serde_json::Value>(&text).unwrap(), v);
    }

    #[test]
    fn dot_marks_structure() {
        let ab = parse_alphabet("a,b").unwrap();
        let p = parse_term("bot \\/ a.0", &ab).unwrap();
        let lts = build_lts(&p, 100).unwrap();
        let dot = lts_to_dot(&lts);
        assert!(dot.starts_with("digraph lts {"));
        assert!(dot.contains("doublecircle"), "bot state must stand out");
        assert!(dot.contains("style=dashed"), "tau edges dashed");
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn dot_clusters_unreachable_components() {
        let ab = parse_alphabet("a").unwrap();
        // the a-derivative of the recursion body sits in the component closure
        let p = parse_term("<X | X = a.X>", &ab).unwrap();
        let lts = build_lts(&p, 100).unwrap();
        let dot = lts_to_dot(&lts);
        assert!(dot.contains("cluster_components"));
    }
}
