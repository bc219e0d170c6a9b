//! Graphviz export of views and ground-truth trees: black edges solid, red
//! edges dashed with multiplicity labels shown when greater than 1, one
//! rank row per level.

use std::fmt::Write;

use crate::history::{HistoryTree, NodeRef, View};

struct DotNode {
    id: String,
    text: String,
}

fn render(
    levels: impl Iterator<Item = (i32, Vec<DotNode>)>,
    black: &[(String, String)],
    red: &[(String, String, u64)],
) -> String {
    let mut out = String::from("digraph history {\n  rankdir=TB;\n  node [shape=ellipse];\n");
    for (level, nodes) in levels {
        let _ = writeln!(out, "  {{ rank=same; /* level {level} */");
        for node in &nodes {
            let _ = writeln!(out, "    {} [label=\"{}\"];", node.id, node.text);
        }
        out.push_str("  }\n");
    }
    for (a, b) in black {
        let _ = writeln!(out, "  {a} -> {b} [color=black];");
    }
    for (a, b, mult) in red {
        if *mult > 1 {
            let _ = writeln!(out, "  {a} -> {b} [color=red, style=dashed, label=\"{mult}\"];");
        } else {
            let _ = writeln!(out, "  {a} -> {b} [color=red, style=dashed];");
        }
    }
    out.push_str("}\n");
    out
}

fn node_id(r: NodeRef) -> String {
    if r.level < 0 {
        "root".to_string()
    } else {
        format!("n{}_{}", r.level, r.rank)
    }
}

pub fn view_to_dot(view: &View) -> String {
    let mut black = Vec::new();
    let mut red = Vec::new();
    let levels: Vec<(i32, Vec<DotNode>)> = (-1..=view.top_level())
        .map(|level| {
            let nodes = view
                .nodes_at(level)
                .map(|r| {
                    for c in view.children(r) {
                        black.push((node_id(r), node_id(c)));
                    }
                    for (src, mult) in view.red_in(r) {
                        red.push((node_id(src), node_id(r), mult));
                    }
                    let text = view.label(r).map(|l| l.to_string()).unwrap_or_default();
                    DotNode { id: node_id(r), text }
                })
                .collect();
            (level, nodes)
        })
        .collect();
    render(levels.into_iter(), &black, &red)
}

pub fn tree_to_dot(tree: &HistoryTree) -> String {
    let mut black = Vec::new();
    let mut red = Vec::new();
    let levels: Vec<(i32, Vec<DotNode>)> = (-1..=tree.top_level())
        .map(|level| {
            let nodes = tree
                .nodes_at(level)
                .map(|r| {
                    for c in tree.children(r) {
                        black.push((node_id(r), node_id(c)));
                    }
                    for (src, mult) in tree.red_in(r) {
                        red.push((node_id(src), node_id(r), mult));
                    }
                    let label = tree.label(r).map(|l| l.to_string()).unwrap_or_default();
                    let text = format!("{label} a={}", tree.anonymity(r));
                    DotNode { id: node_id(r), text }
                })
                .collect();
            (level, nodes)
        })
        .collect();
    render(levels.into_iter(), &black, &red)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::build_ground_truth;
    use crate::network::{gen_random_schedule, InputAssignment, ProcessInput};
    use crate::sim::collect_views;

    #[test]
    fn exports_are_well_formed() {
        let schedule = gen_random_schedule(3, 1, 2, 1);
        let inputs = InputAssignment::new(vec![
            ProcessInput::leader("a"),
            ProcessInput::new("b"),
            ProcessInput::new("b"),
        ]);
        let tree = build_ground_truth(&schedule, &inputs, 2).unwrap();
        let dot = tree_to_dot(&tree);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("a=1"));
        assert!(dot.contains("style=dashed"));

        let views = collect_views(&schedule, &inputs, 2).unwrap();
        let dot = view_to_dot(&views[2][0]);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("root"));
        assert!(dot.contains("L:a"));
    }
}
