//! Molecule generators shared by the integration tests.
#![allow(dead_code)]

use ccm_core::{Molecule, NodeId, NodeKind, Source, Target};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod algebra;
pub mod fotree;
pub mod oracle;

pub const ESSENTIAL: [NodeKind; 5] = [
    NodeKind::Application,
    NodeKind::Abstraction,
    NodeKind::FanOut,
    NodeKind::FanIn,
    NodeKind::Terminal,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ports(m: &Molecule, ids: &[NodeId]) -> (Vec<Source>, Vec<Target>) {
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for id in ids {
        let k = m.kind(id).unwrap();
        sources.extend(k.out_ports().iter().map(|p| Source::out(id, *p)));
        targets.extend(k.in_ports().iter().map(|p| Target::input(id, *p)));
    }
    (sources, targets)
}

/// Closes every unconnected port with a fresh free label.
fn close_free(m: &mut Molecule, sources: &[Source], targets: &[Target]) {
    let mut k = 0;
    for s in sources {
        if m.target_of(s).is_none() {
            m.connect(s.clone(), Target::free(format!("o{k}"))).unwrap();
            k += 1;
        }
    }
    for t in targets {
        if m.source_of(t).is_none() {
            m.connect(Source::free(format!("i{k}")), t.clone()).unwrap();
            k += 1;
        }
    }
}

/// A valid molecule over `kinds` with about 80% of ports linked internally.
pub fn random_over(rng: &mut impl Rng, kinds: &[NodeKind], max_nodes: usize) -> Molecule {
    let n = rng.gen_range(0..=max_nodes);
    let mut m = Molecule::new();
    let ids: Vec<NodeId> = (0..n)
        .map(|_| m.add_fresh(kinds.choose(rng).unwrap().clone()))
        .collect();
    let (mut sources, mut targets) = ports(&m, &ids);
    sources.shuffle(rng);
    targets.shuffle(rng);
    for (s, t) in sources.iter().zip(&targets) {
        if rng.gen_bool(0.8) {
            m.connect(s.clone(), t.clone()).unwrap();
        }
    }
    close_free(&mut m, &sources, &targets);
    if rng.gen_bool(0.1) {
        m.connect(Source::free("a"), Target::free("b")).unwrap();
    }
    if rng.gen_bool(0.2) {
        m.set_loops(rng.gen_range(1..3));
    }
    m
}

pub fn random_molecule(rng: &mut impl Rng, max_nodes: usize) -> Molecule {
    random_over(rng, &ESSENTIAL, max_nodes)
}

/// Like [`random_molecule`] but also uses inert nodes of a few valences.
pub fn random_with_inert(rng: &mut impl Rng, max_nodes: usize) -> Molecule {
    let mut kinds = ESSENTIAL.to_vec();
    kinds.push(NodeKind::other("X", 0, 1));
    kinds.push(NodeKind::other("Y", 2, 1));
    kinds.push(NodeKind::other("Z", 1, 3));
    random_over(rng, &kinds, max_nodes)
}

/// Every valid molecule with up to `max_nodes` essential nodes, up to the
/// choice of node ids and free label names, without loops.
pub fn enumerate(max_nodes: usize) -> Vec<Molecule> {
    let mut out = Vec::new();
    for n in 0..=max_nodes {
        for kinds in ESSENTIAL.iter().combinations_with_replacement(n) {
            let mut base = Molecule::new();
            let ids: Vec<NodeId> = kinds.iter().map(|k| base.add_fresh((*k).clone())).collect();
            let (sources, targets) = ports(&base, &ids);
            let mut used = vec![false; targets.len()];
            wirings(&base, &sources, &targets, 0, &mut used, &mut out);
        }
    }
    out
}

fn wirings(m: &Molecule, sources: &[Source], targets: &[Target], i: usize, used: &mut [bool], out: &mut Vec<Molecule>) {
    if i == sources.len() {
        let mut m = m.clone();
        close_free(&mut m, sources, targets);
        out.push(m);
        return;
    }
    wirings(m, sources, targets, i + 1, used, out);
    for j in 0..targets.len() {
        if !used[j] {
            used[j] = true;
            let mut next = m.clone();
            next.connect(sources[i].clone(), targets[j].clone()).unwrap();
            wirings(&next, sources, targets, i + 1, used, out);
            used[j] = false;
        }
    }
}
