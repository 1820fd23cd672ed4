//! The non-local GLOBAL FAN-OUT move, kept as a verification oracle.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::molecule::{Label, Molecule, NodeId, NodeKind, Port, Source, Target};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlobalFanoutError {
    #[error("node {0} is not a fan-out")]
    NotAFanout(NodeId),
    #[error("the subgraph feeding {0} is not closed")]
    NotClosed(NodeId),
}

/// Nodes connected to `start` without passing through `fo`.
fn region(m: &Molecule, start: &NodeId, fo: &NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(id) = queue.pop_front() {
        let kind = m.kind(&id).expect("reachable node exists");
        let ins = kind
            .in_ports()
            .iter()
            .filter_map(|p| m.in_source(&id, *p)?.node().cloned())
            .collect::<Vec<_>>();
        let outs = kind
            .out_ports()
            .iter()
            .filter_map(|p| m.out_target(&id, *p)?.node().cloned())
            .collect::<Vec<_>>();
        for n in ins.into_iter().chain(outs) {
            if &n != fo && seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Replaces `fo` and the closed molecule `A` feeding it by two copies of `A`,
/// one on each of `fo`'s former out-arrows.
pub fn apply_global_fanout(m: &Molecule, fo: &NodeId) -> Result<Molecule, GlobalFanoutError> {
    if m.kind(fo) != Some(&NodeKind::FanOut) {
        return Err(GlobalFanoutError::NotAFanout(fo.clone()));
    }
    let not_closed = || GlobalFanoutError::NotClosed(fo.clone());
    let feeder = m.in_source(fo, Port::In).ok_or_else(not_closed)?.clone();
    let Source::Out(head) = &feeder else {
        return Err(not_closed());
    };
    if &head.node == fo {
        return Err(not_closed());
    }
    let a = region(m, &head.node, fo);
    for id in &a {
        let kind = &m.nodes()[id];
        for p in kind.in_ports().iter() {
            match m.in_source(id, *p) {
                Some(Source::Out(q)) if a.contains(&q.node) => {}
                _ => return Err(not_closed()),
            }
        }
        for p in kind.out_ports().iter() {
            let ok = match m.out_target(id, *p) {
                Some(Target::In(q)) if a.contains(&q.node) => true,
                Some(Target::In(q)) => &q.node == fo && id == &head.node && *p == head.port,
                _ => false,
            };
            if !ok {
                return Err(not_closed());
            }
        }
    }

    let left = m.out_target(fo, Port::Left).cloned().ok_or_else(not_closed)?;
    let right = m.out_target(fo, Port::Right).cloned().ok_or_else(not_closed)?;
    // The only cut link is the feeder; it is dropped right away.
    let mut body = m.induced(&a, |_, _| (Label::new("_"), Label::new("_")));
    body.disconnect(&feeder);

    let mut out = m.clone();
    for id in &a {
        out.remove_node(id);
    }
    out.remove_node(fo);
    for end in [left, right] {
        let map = out.absorb(&body);
        let src = Source::out(&map[&head.node], head.port);
        out.connect(src, end).expect("copy output is unattached");
    }
    Ok(out)
}
