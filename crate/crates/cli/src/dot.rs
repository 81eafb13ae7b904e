//! Graphviz export. Node and edge lines are each sorted, so equal input
//! gives byte-identical output.

use lagois::{ClassMap, ConnectionPair, FiniteLattice};

fn node(l: &FiniteLattice, c: lagois::Class) -> String {
    format!("\"{}_{}\"", l.id(), l.name(c))
}

fn collect<'a>(
    lattices: impl IntoIterator<Item = &'a FiniteLattice>,
    nodes: &mut Vec<String>,
    edges: &mut Vec<String>,
) {
    for l in lattices {
        for c in l.classes() {
            nodes.push(format!("  {} [label=\"{}\"];", node(l, c), l.name(c)));
        }
        for &(a, b) in l.covers() {
            edges.push(format!("  {} -> {};", node(l, a), node(l, b)));
        }
    }
}

fn cross(
    map: &ClassMap,
    src: &FiniteLattice,
    dst: &FiniteLattice,
    label: &str,
    edges: &mut Vec<String>,
) {
    for (a, b) in map.entries() {
        edges.push(format!(
            "  {} -> {} [style=dashed, label=\"{label}\"];",
            node(src, a),
            node(dst, b)
        ));
    }
}

fn render(mut nodes: Vec<String>, mut edges: Vec<String>) -> String {
    nodes.sort();
    nodes.dedup();
    edges.sort();
    edges.dedup();
    let mut out = String::from("digraph lagois {\n  rankdir=BT;\n");
    for line in nodes.iter().chain(&edges) {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

/// Hasse diagrams of the given lattices.
pub fn lattices<'a>(lattices: impl IntoIterator<Item = &'a FiniteLattice>) -> String {
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    collect(lattices, &mut nodes, &mut edges);
    render(nodes, edges)
}

/// Both lattices of a connection with its maps as dashed edges.
pub fn connection(p: &ConnectionPair) -> String {
    let (l, m) = (&**p.left(), &**p.right());
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    collect([l, m], &mut nodes, &mut edges);
    cross(p.alpha(), l, m, "alpha", &mut edges);
    cross(p.gamma(), m, l, "gamma", &mut edges);
    render(nodes, edges)
}
