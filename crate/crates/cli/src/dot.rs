//! Graphviz rendering of sculpting bigraphs.

use std::fmt::Write;

use sculpt_core::fock::Basis;
use sculpt_core::sculpt::{Edge, Phase, SculptingBigraph};

fn edge_attrs(edge: &Edge, d: usize) -> String {
    let colour = match (edge.color.basis, edge.color.index) {
        (Basis::Fourier, 0) => "red",
        (Basis::Fourier, i) if i + 1 == d => "blue",
        _ => "black",
    };
    let mut labels = Vec::new();
    if colour == "black" {
        labels.push(edge.color.to_string());
    }
    if edge.phase == Phase::PI {
        labels.push("π".to_string());
    } else if !edge.phase.is_zero() {
        labels.push(edge.phase.to_string());
    }
    if labels.is_empty() {
        format!("color={colour}")
    } else {
        format!("color={colour}, label=\"{}\"", labels.join(" "))
    }
}

/// Undirected DOT graph: numbered circles for spatial modes, unlabelled
/// points for dots.
pub fn to_dot(graph: &SculptingBigraph) -> String {
    let mut out = String::new();
    out.push_str("graph sculpting {\n");
    out.push_str("  node [shape=circle];\n");
    for j in 0..graph.n() {
        let _ = writeln!(out, "  c{j} [label=\"{j}\"];");
    }
    for (i, _) in graph.dots().iter().enumerate() {
        let _ = writeln!(out, "  p{i} [shape=point, width=0.15, label=\"\"];");
    }
    for (i, dot) in graph.dots().iter().enumerate() {
        for edge in dot.edges() {
            let _ = writeln!(out, "  c{} -- p{i} [{}];", edge.mode, edge_attrs(edge, graph.d()));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sculpt_core::sculpt::Scheme;

    #[test]
    fn singlet_n3_counts() {
        let text = to_dot(&Scheme::Singlet.build(3).unwrap());
        assert_eq!(text.matches("shape=point").count(), 6);
        assert_eq!(text.matches(" -- ").count(), 12);
        // only the (N-1)~ dot of each pair carries pi
        assert_eq!(text.matches("label=\"π\"").count(), 3);
        let dicke = to_dot(&Scheme::Dicke.build(3).unwrap());
        assert_eq!(dicke.matches("label=\"π\"").count(), 6);
        assert_eq!(text.matches("color=red").count(), 6);
        assert_eq!(text.matches("color=blue").count(), 6);
    }

    #[test]
    fn empty_graph_has_only_circles() {
        let text = to_dot(&SculptingBigraph::new(2, 2, vec![]).unwrap());
        assert_eq!(text.matches("[label=").count(), 2);
        assert!(!text.contains("--"));
    }
}
