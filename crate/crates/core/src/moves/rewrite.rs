//! Generic local replacement.
//!
//! A replacement removes some nodes, cuts some links, and inserts new nodes.
//! Every port left open by the removal is a hole: an in-hole stands for
//! "whatever fed this port", an out-hole for "whatever this port fed". The
//! replacement wires each in-hole / new out-port to exactly one out-hole /
//! new in-port. Chains that pass through several removed ports are followed
//! to their real ends; chains that close on themselves become loops.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::molecule::{Molecule, NodeId, NodeKind, Port, PortRef, Source, Target};

/// Source side of a wire.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Feed {
    /// Whatever fed this in-port of a removed node.
    Hole(PortRef),
    /// The source of the k-th cut link.
    Cut(usize),
    /// Out-port of the i-th new node.
    New(usize, Port),
}

/// Target side of a wire.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Sink {
    /// Whatever this out-port of a removed node fed.
    Hole(PortRef),
    /// The target of the k-th cut link.
    Cut(usize),
    /// In-port of the i-th new node.
    New(usize, Port),
}

#[derive(Debug, Default)]
pub(crate) struct Replacement {
    pub removed: Vec<NodeId>,
    pub cut: Vec<Source>,
    /// Links between removed nodes that disappear with the pattern.
    pub consumed: Vec<Source>,
    /// New nodes; `Some(id)` reuses the id of a removed node.
    pub new_nodes: Vec<(Option<NodeId>, NodeKind)>,
    pub wires: Vec<(Feed, Sink)>,
}

impl Replacement {
    pub fn wire(&mut self, feed: Feed, sink: Sink) -> &mut Self {
        self.wires.push((feed, sink));
        self
    }

    pub fn add(&mut self, reuse: Option<NodeId>, kind: NodeKind) -> usize {
        self.new_nodes.push((reuse, kind));
        self.new_nodes.len() - 1
    }
}

pub(crate) struct Outcome {
    pub loops: u64,
    pub created: Vec<NodeId>,
}

fn hole(node: &NodeId, port: Port) -> PortRef {
    PortRef::from((node, port))
}

pub(crate) fn in_hole(node: &NodeId, port: Port) -> Feed {
    Feed::Hole(hole(node, port))
}

pub(crate) fn out_hole(node: &NodeId, port: Port) -> Sink {
    Sink::Hole(hole(node, port))
}

/// Applies the replacement in place. The caller has verified the pattern.
pub(crate) fn execute(m: &mut Molecule, r: Replacement) -> Outcome {
    let removed: BTreeSet<NodeId> = r.removed.iter().cloned().collect();

    let mut hole_in_src: BTreeMap<PortRef, Source> = BTreeMap::new();
    let mut hole_out_tgt: BTreeMap<PortRef, Target> = BTreeMap::new();
    for id in &r.removed {
        let kind = m.kind(id).expect("removed node exists").clone();
        for p in kind.in_ports().iter() {
            let src = m.in_source(id, *p).expect("valid molecule").clone();
            hole_in_src.insert(hole(id, *p), src);
        }
        for p in kind.out_ports().iter() {
            let tgt = m.out_target(id, *p).expect("valid molecule").clone();
            hole_out_tgt.insert(hole(id, *p), tgt);
        }
    }
    let cut: Vec<(Source, Target)> = r
        .cut
        .iter()
        .map(|s| {
            let t = m.disconnect(s).expect("cut link exists");
            (s.clone(), t)
        })
        .collect();

    let mut consumed_in: BTreeSet<PortRef> = BTreeSet::new();
    for s in &r.consumed {
        if let (Source::Out(_), Some(Target::In(q))) = (s, m.target_of(s)) {
            consumed_in.insert(q.clone());
        }
    }

    for id in &r.removed {
        m.remove_node(id);
    }
    let mut new_ids = Vec::with_capacity(r.new_nodes.len());
    for (reuse, kind) in &r.new_nodes {
        let id = match reuse {
            Some(id) => m.add_node(id.clone(), kind.clone()).expect("reused id was freed"),
            None => m.add_fresh(kind.clone()),
        };
        new_ids.push(id);
    }

    let wires: HashMap<Feed, Sink> = r.wires.into_iter().collect();
    let mut visited: BTreeSet<PortRef> = BTreeSet::new();

    // Follows a sink through removed ports until it reaches a real target.
    let resolve = |mut sink: Sink, visited: &mut BTreeSet<PortRef>| -> Target {
        loop {
            match sink {
                Sink::New(i, p) => return Target::input(&new_ids[i], p),
                Sink::Cut(k) => return cut[k].1.clone(),
                Sink::Hole(ho) => {
                    let t = &hole_out_tgt[&ho];
                    match t {
                        Target::In(q) if removed.contains(&q.node) => {
                            visited.insert(q.clone());
                            sink = wires[&Feed::Hole(q.clone())].clone();
                        }
                        other => return other.clone(),
                    }
                }
            }
        }
    };

    let mut links: Vec<(Source, Target)> = Vec::new();
    for (h, src) in &hole_in_src {
        if consumed_in.contains(h) {
            continue;
        }
        let external = src.node().is_none_or(|n| !removed.contains(n));
        if external {
            visited.insert(h.clone());
            let t = resolve(wires[&Feed::Hole(h.clone())].clone(), &mut visited);
            links.push((src.clone(), t));
        }
    }
    for (k, (src, _)) in cut.iter().enumerate() {
        let t = resolve(wires[&Feed::Cut(k)].clone(), &mut visited);
        links.push((src.clone(), t));
    }
    for (i, (_, kind)) in r.new_nodes.iter().enumerate() {
        for p in kind.out_ports().iter() {
            let t = resolve(wires[&Feed::New(i, *p)].clone(), &mut visited);
            links.push((Source::out(&new_ids[i], *p), t));
        }
    }

    let mut loops = 0;
    for h in hole_in_src.keys() {
        if consumed_in.contains(h) || visited.contains(h) {
            continue;
        }
        let mut cur = h.clone();
        loop {
            visited.insert(cur.clone());
            let Sink::Hole(ho) = &wires[&Feed::Hole(cur.clone())] else {
                unreachable!("open chain left unvisited");
            };
            match &hole_out_tgt[ho] {
                Target::In(q) if removed.contains(&q.node) && !visited.contains(q) => cur = q.clone(),
                _ => break,
            }
        }
        loops += 1;
    }

    for (s, t) in links {
        m.connect(s, t).expect("replacement wiring is a bijection");
    }
    m.add_loops(loops);
    Outcome {
        loops,
        created: new_ids,
    }
}
