//! Graphviz export.

use std::fmt::Write as _;

use crate::molecule::{Molecule, NodeKind, Source, Target};

fn style(k: &NodeKind) -> (&'static str, &'static str) {
    match k {
        NodeKind::Application => ("box", "lightblue"),
        NodeKind::Abstraction => ("invtriangle", "salmon"),
        NodeKind::FanOut => ("triangle", "palegreen"),
        NodeKind::FanIn => ("invhouse", "gold"),
        NodeKind::Terminal => ("point", "black"),
        NodeKind::Other { .. } => ("ellipse", "lightgrey"),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph. Free labels become plaintext nodes named `label:<name>`.
pub fn export_dot(m: &Molecule) -> String {
    let mut s = String::from("digraph molecule {\n  rankdir=TB;\n");
    for (id, k) in m.nodes() {
        let (shape, color) = style(k);
        let _ = writeln!(
            s,
            "  {} [label={}, shape={shape}, style=filled, fillcolor={color}];",
            quote(id.as_str()),
            quote(&format!("{} {}", k.tag(), id))
        );
    }
    let label_node = |l: &str| quote(&format!("label:{l}"));
    for (src, tgt) in m.links() {
        let (from, tail) = match src {
            Source::Out(p) => (quote(p.node.as_str()), Some(p.port.name())),
            Source::Free(l) => {
                let _ = writeln!(
                    s,
                    "  {} [label={}, shape=plaintext];",
                    label_node(l.as_str()),
                    quote(l.as_str())
                );
                (label_node(l.as_str()), None)
            }
        };
        let (to, head) = match tgt {
            Target::In(p) => (quote(p.node.as_str()), Some(p.port.name())),
            Target::Free(l) => {
                let _ = writeln!(
                    s,
                    "  {} [label={}, shape=plaintext];",
                    label_node(l.as_str()),
                    quote(l.as_str())
                );
                (label_node(l.as_str()), None)
            }
        };
        let mut attrs = Vec::new();
        if let Some(t) = tail {
            attrs.push(format!("taillabel={}", quote(&t)));
        }
        if let Some(h) = head {
            attrs.push(format!("headlabel={}", quote(&h)));
        }
        if attrs.is_empty() {
            let _ = writeln!(s, "  {from} -> {to};");
        } else {
            let _ = writeln!(s, "  {from} -> {to} [{}];", attrs.join(", "));
        }
    }
    if m.loops() > 0 {
        let _ = writeln!(
            s,
            "  loops [label={}, shape=circle];",
            quote(&format!("loops {}", m.loops()))
        );
    }
    s.push_str("}\n");
    s
}
