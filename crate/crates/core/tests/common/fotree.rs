//! Fan-out trees of every shape.

use std::collections::BTreeSet;

use ccm_core::moves::FoTree;
use ccm_core::{Molecule, NodeId, NodeKind, Port, Source, Target};

#[derive(Clone, Debug)]
pub enum Shape {
    Leaf,
    Fork(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Fork(l, r) => l.leaves() + r.leaves(),
        }
    }
}

/// All binary trees with `k` leaves.
pub fn shapes(k: usize) -> Vec<Shape> {
    if k == 1 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for i in 1..k {
        for l in shapes(i) {
            for r in shapes(k - i) {
                out.push(Shape::Fork(Box::new(l.clone()), Box::new(r.clone())));
            }
        }
    }
    out
}

/// Fan-out tree fed by free `x`, leaves named by `leaves` left to right.
/// Returns the molecule, its fan-out nodes and the root.
pub fn build(shape: &Shape, leaves: &[String]) -> (Molecule, BTreeSet<NodeId>, NodeId) {
    fn go(m: &mut Molecule, s: &Shape, feed: Source, leaves: &mut std::slice::Iter<'_, String>) {
        match s {
            Shape::Leaf => m.connect(feed, Target::free(leaves.next().unwrap())).unwrap(),
            Shape::Fork(l, r) => {
                let f = m.add_fresh(NodeKind::FanOut);
                m.connect(feed, Target::input(&f, Port::In)).unwrap();
                go(m, l, Source::out(&f, Port::Left), leaves);
                go(m, r, Source::out(&f, Port::Right), leaves);
            }
        }
    }
    let mut m = Molecule::new();
    go(&mut m, shape, Source::free("x"), &mut leaves.iter());
    let frag: BTreeSet<NodeId> = m.nodes().keys().cloned().collect();
    let root = m.target_of(&Source::free("x")).and_then(|t| t.node()).unwrap().clone();
    (m, frag, root)
}

pub fn right_comb(leaves: &[String]) -> FoTree {
    let leaf = |l: &String| FoTree::leaf(Target::free(l));
    let (last, rest) = leaves.split_last().unwrap();
    rest.iter().rev().fold(leaf(last), |acc, l| FoTree::fork(leaf(l), acc))
}

pub fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("y{i}")).collect()
}
