//! DISENTANGLE: rearranging a fan-out tree by CO-ASSOC (and CO-COMM) moves.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use super::{apply, find_sites, MoveKind, ReactionSite};
use crate::molecule::{Molecule, NodeId, NodeKind, Port, Source, Target};

/// Shape of a fan-out tree. Leaves are the endpoints fed by the tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoTree {
    Leaf(Target),
    Fork(Box<FoTree>, Box<FoTree>),
}

impl FoTree {
    pub fn fork(left: FoTree, right: FoTree) -> FoTree {
        FoTree::Fork(Box::new(left), Box::new(right))
    }

    pub fn leaf(t: Target) -> FoTree {
        FoTree::Leaf(t)
    }

    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<&Target> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a FoTree, out: &mut Vec<&'a Target>) {
            match t {
                FoTree::Leaf(x) => out.push(x),
                FoTree::Fork(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn forks(&self) -> usize {
        match self {
            FoTree::Leaf(_) => 0,
            FoTree::Fork(l, r) => 1 + l.forks() + r.forks(),
        }
    }
}

impl fmt::Display for FoTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoTree::Leaf(t) => write!(f, "{t}"),
            FoTree::Fork(l, r) => write!(f, "({l} {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DisentangleError {
    #[error("fragment is not a connected tree of fan-out nodes")]
    NotAFanoutTree,
    #[error("target shape has a different leaf multiset")]
    LeafMismatch,
    #[error("target shape not reachable within {0} moves")]
    UnreachableWithinBound(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DisentangleOptions {
    pub max_depth: usize,
    pub allow_cocomm: bool,
}

impl Default for DisentangleOptions {
    fn default() -> Self {
        DisentangleOptions {
            max_depth: 32,
            allow_cocomm: true,
        }
    }
}

/// The tree hanging below `root`, descending only through `fragment`.
pub fn read_fo_tree(m: &Molecule, root: &NodeId, fragment: &BTreeSet<NodeId>) -> Option<FoTree> {
    fn go(m: &Molecule, id: &NodeId, fragment: &BTreeSet<NodeId>, budget: &mut usize) -> Option<FoTree> {
        *budget = budget.checked_sub(1)?;
        let mut child = |p: Port| -> Option<FoTree> {
            let t = m.out_target(id, p)?;
            match t {
                Target::In(q) if q.port == Port::In && fragment.contains(&q.node) => go(m, &q.node, fragment, budget),
                other => Some(FoTree::Leaf(other.clone())),
            }
        };
        let l = child(Port::Left)?;
        let r = child(Port::Right)?;
        Some(FoTree::fork(l, r))
    }
    if m.kind(root) != Some(&NodeKind::FanOut) {
        return None;
    }
    let mut budget = fragment.len();
    go(m, root, fragment, &mut budget)
}

fn fragment_root(m: &Molecule, fragment: &BTreeSet<NodeId>) -> Result<NodeId, DisentangleError> {
    let mut roots = Vec::new();
    for id in fragment {
        if m.kind(id) != Some(&NodeKind::FanOut) {
            return Err(DisentangleError::NotAFanoutTree);
        }
        let fed_inside = matches!(m.in_source(id, Port::In), Some(Source::Out(p)) if fragment.contains(&p.node));
        if !fed_inside {
            roots.push(id.clone());
        }
    }
    match roots.as_slice() {
        [r] => {
            let tree = read_fo_tree(m, r, fragment).ok_or(DisentangleError::NotAFanoutTree)?;
            if tree.forks() != fragment.len() {
                return Err(DisentangleError::NotAFanoutTree);
            }
            Ok(r.clone())
        }
        _ => Err(DisentangleError::NotAFanoutTree),
    }
}

fn moves_inside(m: &Molecule, fragment: &BTreeSet<NodeId>, opts: &DisentangleOptions) -> Vec<ReactionSite> {
    let mut kinds = vec![MoveKind::CoAssocPlus, MoveKind::CoAssocMinus];
    if opts.allow_cocomm {
        kinds.push(MoveKind::CoComm);
    }
    kinds
        .into_iter()
        .flat_map(|k| find_sites(m, k))
        .filter(|s| s.nodes.iter().all(|n| fragment.contains(n)))
        .collect()
}

/// Shortest sequence of sites turning the fan-out tree on `fragment` into
/// `target`. Node ids are reused by these moves and nothing outside the
/// fragment changes, so the tree read below the root identifies the state.
pub fn disentangle(
    m: &Molecule,
    fragment: &BTreeSet<NodeId>,
    target: &FoTree,
    opts: DisentangleOptions,
) -> Result<Vec<ReactionSite>, DisentangleError> {
    let root = fragment_root(m, fragment)?;
    let start = read_fo_tree(m, &root, fragment).ok_or(DisentangleError::NotAFanoutTree)?;
    let mut want: Vec<&Target> = target.leaves();
    let mut have: Vec<&Target> = start.leaves();
    want.sort();
    have.sort();
    if want != have || target.forks() != fragment.len() {
        return Err(DisentangleError::LeafMismatch);
    }
    if &start == target {
        return Ok(Vec::new());
    }

    // (molecule, parent index and site, depth)
    type State = (Molecule, Option<(usize, ReactionSite)>, usize);
    let mut states: Vec<State> = vec![(m.clone(), None, 0)];
    let mut seen: HashSet<FoTree> = HashSet::from([start]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let depth = states[i].2;
        if depth >= opts.max_depth {
            continue;
        }
        for site in moves_inside(&states[i].0, fragment, &opts) {
            let next = apply(&states[i].0, &site).expect("fresh site").molecule;
            let tree = read_fo_tree(&next, &root, fragment).ok_or(DisentangleError::NotAFanoutTree)?;
            if !seen.insert(tree.clone()) {
                continue;
            }
            let reached = &tree == target;
            states.push((next, Some((i, site)), depth + 1));
            let j = states.len() - 1;
            if reached {
                let mut path = Vec::new();
                let mut k = j;
                while let Some((p, s)) = &states[k].1 {
                    path.push(s.clone());
                    k = *p;
                }
                path.reverse();
                return Ok(path);
            }
            queue.push_back(j);
        }
    }
    Err(DisentangleError::UnreachableWithinBound(opts.max_depth))
}
