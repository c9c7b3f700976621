use std::fmt::Write;

use super::{BranchNode, BranchingPomset, Child};

/// Graphviz rendering: events are boxes, dependencies are arrows, each choice
/// is a dashed cluster holding one solid cluster per branch.
pub fn to_dot(r: &BranchingPomset) -> String {
    let mut out = String::from("digraph bpomset {\n  rankdir=LR;\n  node [shape=box];\n");
    let mut clusters = 0;
    write_node(r, r.branching(), 1, &mut clusters, &mut out);
    for (a, b) in r.deps() {
        let _ = writeln!(out, "  {a} -> {b};");
    }
    out.push_str("}\n");
    out
}

fn write_node(r: &BranchingPomset, node: &BranchNode, depth: usize, clusters: &mut usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for child in &node.children {
        match child {
            Child::Event(e) => {
                let label = r.label(*e).map(|l| l.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{pad}{e} [label=\"{label}\"];");
            }
            Child::Choice(left, right) => {
                let _ = writeln!(out, "{pad}subgraph cluster_{} {{", next(clusters));
                let _ = writeln!(out, "{pad}  style=dashed;\n{pad}  label=\"\";");
                for branch in [left, right] {
                    let _ = writeln!(out, "{pad}  subgraph cluster_{} {{", next(clusters));
                    let _ = writeln!(out, "{pad}    style=rounded;\n{pad}    label=\"\";");
                    write_node(r, branch, depth + 2, clusters, out);
                    let _ = writeln!(out, "{pad}  }}");
                }
                let _ = writeln!(out, "{pad}}}");
            }
        }
    }
}

fn next(counter: &mut usize) -> usize {
    *counter += 1;
    *counter - 1
}
