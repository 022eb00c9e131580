use std::fmt::Write;

use super::levels::InteractionGraph;

/// Graphviz rendering: nodes labelled `id:level`, one edge per dependence
/// pair (child -> parent), cluster members in the tooltip.
pub fn to_dot(graph: &InteractionGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph interaction {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for node in &graph.nodes {
        let members: Vec<String> = node.members.iter().map(|m| m.to_string()).collect();
        let shape = if node.level == 0 { ", shape=doublecircle" } else { "" };
        writeln!(
            out,
            "  n{} [label=\"{}:{}\", tooltip=\"members: {}\"{}];",
            node.id,
            node.id,
            node.level,
            members.join(","),
            shape
        )
        .unwrap();
    }
    for (child, parent) in &graph.edges {
        writeln!(out, "  n{child} -> n{parent};").unwrap();
    }
    out.push_str("}\n");
    out
}
