//! Graphviz rendering of the defeat graph.

use std::fmt::Write;

use crate::argue::{defeats, GoalFramework};

fn quoted(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per goal labelled `id (worth)`, one edge per incompatible pair
/// pointing from the defeating goal; mutual defeats become a single
/// `dir=both` edge. Nodes and edges are ordered by goal id.
pub fn defeat_graph_dot(gf: &GoalFramework) -> String {
    let mut out = String::from("digraph goal_framework {\n");
    for g in &gf.goals {
        let worth = gf.worth(g).map(|w| w.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "  {} [label={}];",
            quoted(g.as_str()),
            quoted(&format!("{g} ({worth})"))
        );
    }
    for pair in &gf.incompatibility {
        let (a, b) = (pair.first(), pair.second());
        let line = match (defeats(gf, a, b), defeats(gf, b, a)) {
            (true, true) => format!(
                "{} -> {} [dir=both];",
                quoted(a.as_str()),
                quoted(b.as_str())
            ),
            (true, false) => format!("{} -> {};", quoted(a.as_str()), quoted(b.as_str())),
            (false, true) => format!("{} -> {};", quoted(b.as_str()), quoted(a.as_str())),
            (false, false) => continue,
        };
        let _ = writeln!(out, "  {line}");
    }
    out.push_str("}\n");
    out
}
