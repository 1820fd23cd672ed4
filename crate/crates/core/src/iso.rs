//! Isomorphism and canonical hashing.
//!
//! Ports are named and every port has exactly one connection, so once one
//! node of a connected component is mapped, the rest of the component is
//! forced. Each component is therefore encoded by a port-ordered traversal
//! from every candidate root of its rarest node kind, and the smallest
//! encoding is kept. Two molecules are isomorphic (with free labels held
//! fixed) exactly when their sorted component encodings, free arrows and
//! loop counts coincide.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use sha2::{Digest as _, Sha256};

use crate::molecule::{connected_components, Label, Molecule, NodeId, NodeKind, Source, Target};

/// Result of an isomorphism query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    pub matched: bool,
    /// Node of the left molecule to node of the right one. Empty when unmatched.
    pub bijection: BTreeMap<NodeId, NodeId>,
}

impl IsoWitness {
    fn unmatched() -> Self {
        IsoWitness {
            matched: false,
            bijection: BTreeMap::new(),
        }
    }
}

/// Canonical encoding of a molecule up to node renaming.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    components: Vec<(String, Vec<NodeId>)>,
    free_arrows: Vec<(Label, Label)>,
    loops: u64,
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.loops == other.loops
            && self.free_arrows == other.free_arrows
            && self.components.len() == other.components.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| a.0 == b.0)
    }
}

impl Eq for CanonicalForm {}

impl CanonicalForm {
    pub fn of(m: &Molecule) -> Self {
        let mut components = Vec::new();
        let mut free_arrows = Vec::new();
        for comp in connected_components(m) {
            if comp.node_count() == 0 {
                for (s, t) in comp.links() {
                    if let (Source::Free(a), Target::Free(b)) = (s, t) {
                        free_arrows.push((a.clone(), b.clone()));
                    }
                }
                continue;
            }
            components.push(encode_component(&comp));
        }
        components.sort_by(|a, b| a.0.cmp(&b.0));
        free_arrows.sort();
        CanonicalForm {
            components,
            free_arrows,
            loops: m.loops(),
        }
    }

    /// Single string that determines the form.
    pub fn key(&self) -> String {
        let mut s = String::new();
        for (c, _) in &self.components {
            s.push_str(c);
            s.push('|');
        }
        for (a, b) in &self.free_arrows {
            let _ = write!(s, "A{}:{}>{}:{}|", a.as_str().len(), a, b.as_str().len(), b);
        }
        let _ = write!(s, "loops={}", self.loops);
        s
    }

    pub fn digest(&self) -> Digest {
        let mut h = Sha256::new();
        h.update(self.key().as_bytes());
        Digest(h.finalize().into())
    }

    /// Node bijection into `other`, assuming equal forms.
    fn bijection_to(&self, other: &CanonicalForm) -> BTreeMap<NodeId, NodeId> {
        let mut map = BTreeMap::new();
        for ((_, xs), (_, ys)) in self.components.iter().zip(&other.components) {
            for (x, y) in xs.iter().zip(ys) {
                map.insert(x.clone(), y.clone());
            }
        }
        map
    }
}

fn kind_rank(k: &NodeKind) -> String {
    k.tag().into_owned()
}

fn encode_component(comp: &Molecule) -> (String, Vec<NodeId>) {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for k in comp.nodes().values() {
        *counts.entry(kind_rank(k)).or_default() += 1;
    }
    let (rare, _) = counts
        .iter()
        .min_by(|a, b| a.1.cmp(b.1).then_with(|| a.0.cmp(b.0)))
        .expect("component has nodes");
    let mut best: Option<(String, Vec<NodeId>)> = None;
    for (id, k) in comp.nodes() {
        if &kind_rank(k) != rare {
            continue;
        }
        let enc = encode_from(comp, id);
        if best.as_ref().is_none_or(|b| enc.0 < b.0) {
            best = Some(enc);
        }
    }
    best.expect("rare kind has a node")
}

fn encode_from(m: &Molecule, root: &NodeId) -> (String, Vec<NodeId>) {
    let mut index: HashMap<&NodeId, usize> = HashMap::new();
    let mut order: Vec<NodeId> = Vec::new();
    let mut queue: VecDeque<&NodeId> = VecDeque::new();
    let mut s = String::new();
    index.insert(root, 0);
    order.push(root.clone());
    queue.push_back(root);
    let nodes = m.nodes();
    while let Some(id) = queue.pop_front() {
        let kind = &nodes[id];
        let _ = write!(s, "[{}", kind.tag());
        for p in kind.in_ports().iter() {
            s.push(' ');
            match m.in_source(id, *p) {
                None => s.push('?'),
                Some(Source::Free(l)) => {
                    let _ = write!(s, "L{}:{}", l.as_str().len(), l);
                }
                Some(Source::Out(pr)) => {
                    let (nid, _) = nodes.get_key_value(&pr.node).expect("linked node exists");
                    let i = *index.entry(nid).or_insert_with(|| {
                        order.push(nid.clone());
                        queue.push_back(nid);
                        order.len() - 1
                    });
                    let _ = write!(s, "{}.{}", i, pr.port);
                }
            }
        }
        s.push_str(" /");
        for p in kind.out_ports().iter() {
            s.push(' ');
            match m.out_target(id, *p) {
                None => s.push('?'),
                Some(Target::Free(l)) => {
                    let _ = write!(s, "L{}:{}", l.as_str().len(), l);
                }
                Some(Target::In(pr)) => {
                    let (nid, _) = nodes.get_key_value(&pr.node).expect("linked node exists");
                    let i = *index.entry(nid).or_insert_with(|| {
                        order.push(nid.clone());
                        queue.push_back(nid);
                        order.len() - 1
                    });
                    let _ = write!(s, "{}.{}", i, pr.port);
                }
            }
        }
        s.push(']');
    }
    (s, order)
}

/// Isomorphism with free labels matched by equal name.
pub fn is_isomorphic(a: &Molecule, b: &Molecule) -> IsoWitness {
    let (fa, fb) = (CanonicalForm::of(a), CanonicalForm::of(b));
    if fa != fb {
        return IsoWitness::unmatched();
    }
    IsoWitness {
        matched: true,
        bijection: fa.bijection_to(&fb),
    }
}

/// Isomorphism where label `l` of `a` must correspond to `label_map[l]` of `b`.
pub fn is_isomorphic_with(a: &Molecule, b: &Molecule, label_map: &BTreeMap<Label, Label>) -> IsoWitness {
    is_isomorphic(&a.relabel(label_map), b)
}

/// 256-bit digest of the canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub [u8; 32]);

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

pub fn canonical_hash(m: &Molecule) -> Digest {
    CanonicalForm::of(m).digest()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::{NodeKind, Port};

    fn fanout(left: &str, right: &str) -> Molecule {
        let mut m = Molecule::new();
        let f = m.add_node("f", NodeKind::FanOut).unwrap();
        m.connect(Source::free("in"), Target::input(&f, Port::In)).unwrap();
        m.connect(Source::out(&f, Port::Left), Target::free(left)).unwrap();
        m.connect(Source::out(&f, Port::Right), Target::free(right)).unwrap();
        m
    }

    fn single(id: &str, kind: NodeKind) -> Molecule {
        let mut m = Molecule::new();
        let n = m.add_node(id, kind.clone()).unwrap();
        for (i, p) in kind.in_ports().iter().enumerate() {
            m.connect(Source::free(format!("i{i}")), Target::input(&n, *p)).unwrap();
        }
        for (i, p) in kind.out_ports().iter().enumerate() {
            m.connect(Source::out(&n, *p), Target::free(format!("o{i}"))).unwrap();
        }
        m
    }

    #[test]
    fn renaming_is_isomorphic() {
        let a = fanout("x", "y");
        let mut b = Molecule::new();
        let g = b.add_node("zz", NodeKind::FanOut).unwrap();
        b.connect(Source::free("in"), Target::input(&g, Port::In)).unwrap();
        b.connect(Source::out(&g, Port::Left), Target::free("x")).unwrap();
        b.connect(Source::out(&g, Port::Right), Target::free("y")).unwrap();
        let w = is_isomorphic(&a, &b);
        assert!(w.matched);
        assert_eq!(w.bijection[&NodeId::new("f")], NodeId::new("zz"));
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
    }

    #[test]
    fn kind_mismatch_is_not_isomorphic() {
        // Both nodes expose three ports, labelled alike up to direction.
        let a = single("n", NodeKind::Application);
        let b = single("n", NodeKind::Abstraction);
        assert!(!is_isomorphic(&a, &b).matched);
    }

    #[test]
    fn swapped_fanout_outputs_are_not_isomorphic() {
        assert!(!is_isomorphic(&fanout("x", "y"), &fanout("y", "x")).matched);
    }

    const EMPTY_DIGEST: &str = "9901a4702702ef5730f6809a28d695ce1ca1ba09e75e31414d4a027cd7a42a6f";

    #[test]
    fn empty_hash_is_fixed() {
        let h = canonical_hash(&Molecule::new());
        assert_eq!(h, canonical_hash(&Molecule::default()));
        assert_eq!(h.to_string(), EMPTY_DIGEST);
    }

    #[test]
    fn loops_count_in_form() {
        assert!(!is_isomorphic(&Molecule::with_loops(1), &Molecule::with_loops(2)).matched);
        assert!(is_isomorphic(&Molecule::with_loops(2), &Molecule::with_loops(2)).matched);
    }

    #[test]
    fn label_map_is_honoured() {
        let a = fanout("x", "y");
        let b = fanout("p", "q");
        assert!(!is_isomorphic(&a, &b).matched);
        let map = [("x", "p"), ("y", "q")]
            .into_iter()
            .map(|(a, b)| (Label::new(a), Label::new(b)))
            .collect();
        assert!(is_isomorphic_with(&a, &b, &map).matched);
    }
}
