//! Graphviz DOT export for contraction forests.

use crate::trees::{Child, Forest};

fn child_name(c: Child) -> String {
    match c {
        Child::Internal(l) => format!("v{l}"),
        Child::Leaf(u) => format!("u{u}"),
    }
}

/// Render a forest as a DOT digraph, one cluster per tree, the
/// distinguished tree drawn with bold edges. Vertex names are canonical
/// (`W1`, `v3`, `u7`) so output is byte-stable.
pub fn to_dot(forest: &Forest) -> String {
    let mut out = String::new();
    out.push_str("digraph forest {\n");
    out.push_str("  node [fontsize=10];\n");
    for (ti, tree) in forest.trees.iter().enumerate() {
        let style = if tree.distinguished { " [style=bold]" } else { "" };
        out.push_str(&format!("  subgraph cluster_t{} {{\n", ti + 1));
        out.push_str(&format!("    label=\"tau{}{}\";\n", ti + 1, if tree.distinguished { " (distinguished)" } else { "" }));
        out.push_str(&format!("    W{} [shape=box];\n", tree.root));
        for v in &tree.internals {
            out.push_str(&format!("    v{} [shape=circle];\n", v.time_index));
        }
        for u in tree.leaves() {
            out.push_str(&format!("    u{u} [shape=plaintext];\n"));
        }
        out.push_str(&format!(
            "    W{} -> {}{};\n",
            tree.root,
            child_name(tree.root_child),
            style
        ));
        for v in &tree.internals {
            for c in v.children {
                out.push_str(&format!("    v{} -> {}{};\n", v.time_index, child_name(c), style));
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// Minimal syntactic check used by tests and the CLI: balanced braces,
/// every statement line is a node, edge, label or subgraph construct.
pub fn validate_dot(text: &str) -> bool {
    let mut depth: i32 = 0;
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        depth += t.matches('{').count() as i32;
        depth -= t.matches('}').count() as i32;
        if depth < 0 {
            return false;
        }
        let structural = t.ends_with('{') || t == "}" || t.ends_with("};");
        let statement = t.ends_with(';');
        if !(structural || statement) {
            return false;
        }
    }
    depth == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::CollisionMap;
    use crate::trees::build_forest;

    #[test]
    fn worked_example_dot() {
        let f = build_forest(&CollisionMap::new(2, vec![1, 2, 4, 4]).unwrap());
        let dot = to_dot(&f);
        assert!(validate_dot(&dot));
        assert_eq!(dot.matches("subgraph").count(), 2);
        // 2 roots + 4 internals + 10 leaves declared
        let decls = dot.matches("[shape=").count();
        assert_eq!(decls, 16);
        assert!(dot.contains("W1 -> v1 [style=bold];"));
        assert!(dot.contains("W2 -> v2;"));
    }

    #[test]
    fn smallest_forest_dot() {
        let f = build_forest(&CollisionMap::new(1, vec![1]).unwrap());
        let dot = to_dot(&f);
        assert!(validate_dot(&dot));
        assert!(dot.contains("v1 -> u2"));
    }
}
