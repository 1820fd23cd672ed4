//! Molecules: port graphs over the essential nodes.
//!
//! Every connection is stored as a single link from a [`Source`] (an
//! out-port or a free label) to a [`Target`] (an in-port or a free label).
//! Arrows, free half-arrows and fully free arrows are all links, which makes
//! "every port is occupied exactly once" a property of the link maps alone.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use smol_str::SmolStr;
use thiserror::Error;

/// Opaque, stable node identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(SmolStr);

impl NodeId {
    pub fn new(id: impl AsRef<str>) -> Self {
        NodeId(SmolStr::new(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

/// Name of a free half-arrow.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(SmolStr);

impl Label {
    pub fn new(label: impl AsRef<str>) -> Self {
        Label(SmolStr::new(label.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

/// A named port on a node. `InN`/`OutN` are the 1-based ports of OTHER nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    Fun,
    Arg,
    In,
    Left,
    Right,
    Out,
    Var,
    InN(u16),
    OutN(u16),
}

impl Port {
    pub fn name(&self) -> Cow<'static, str> {
        match self {
            Port::Fun => "fun".into(),
            Port::Arg => "arg".into(),
            Port::In => "in".into(),
            Port::Left => "left".into(),
            Port::Right => "right".into(),
            Port::Out => "out".into(),
            Port::Var => "var".into(),
            Port::InN(k) => format!("i{k}").into(),
            Port::OutN(k) => format!("o{k}").into(),
        }
    }

    pub fn parse(name: &str) -> Option<Port> {
        Some(match name {
            "fun" => Port::Fun,
            "arg" => Port::Arg,
            "in" => Port::In,
            "left" => Port::Left,
            "right" => Port::Right,
            "out" => Port::Out,
            "var" => Port::Var,
            _ => {
                let (head, digits) = name.split_at(1);
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return None;
                }
                let k: u16 = digits.parse().ok()?;
                if k == 0 {
                    return None;
                }
                match head {
                    "i" => Port::InN(k),
                    "o" => Port::OutN(k),
                    _ => return None,
                }
            }
        })
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Application,
    Abstraction,
    FanOut,
    FanIn,
    Terminal,
    /// Inert node with user-chosen valences. No move binds it.
    Other {
        name: SmolStr,
        inputs: u16,
        outputs: u16,
    },
}

const APP_IN: &[Port] = &[Port::Fun, Port::Arg];
const APP_OUT: &[Port] = &[Port::Out];
const LAM_IN: &[Port] = &[Port::In];
const LAM_OUT: &[Port] = &[Port::Var, Port::Out];
const FO_IN: &[Port] = &[Port::In];
const FO_OUT: &[Port] = &[Port::Left, Port::Right];
const FI_IN: &[Port] = &[Port::Left, Port::Right];
const FI_OUT: &[Port] = &[Port::Out];
const T_IN: &[Port] = &[Port::In];

impl NodeKind {
    pub fn other(name: impl AsRef<str>, inputs: u16, outputs: u16) -> Self {
        NodeKind::Other {
            name: SmolStr::new(name.as_ref()),
            inputs,
            outputs,
        }
    }

    /// In-ports in signature order.
    pub fn in_ports(&self) -> Cow<'static, [Port]> {
        match self {
            NodeKind::Application => APP_IN.into(),
            NodeKind::Abstraction => LAM_IN.into(),
            NodeKind::FanOut => FO_IN.into(),
            NodeKind::FanIn => FI_IN.into(),
            NodeKind::Terminal => T_IN.into(),
            NodeKind::Other { inputs, .. } => (1..=*inputs).map(Port::InN).collect::<Vec<_>>().into(),
        }
    }

    /// Out-ports in signature order.
    pub fn out_ports(&self) -> Cow<'static, [Port]> {
        match self {
            NodeKind::Application => APP_OUT.into(),
            NodeKind::Abstraction => LAM_OUT.into(),
            NodeKind::FanOut => FO_OUT.into(),
            NodeKind::FanIn => FI_OUT.into(),
            NodeKind::Terminal => Cow::Borrowed(&[]),
            NodeKind::Other { outputs, .. } => (1..=*outputs).map(Port::OutN).collect::<Vec<_>>().into(),
        }
    }

    pub fn has_in_port(&self, port: Port) -> bool {
        match (self, port) {
            (NodeKind::Other { inputs, .. }, Port::InN(k)) => k >= 1 && k <= *inputs,
            (NodeKind::Other { .. }, _) => false,
            _ => self.in_ports().contains(&port),
        }
    }

    pub fn has_out_port(&self, port: Port) -> bool {
        match (self, port) {
            (NodeKind::Other { outputs, .. }, Port::OutN(k)) => k >= 1 && k <= *outputs,
            (NodeKind::Other { .. }, _) => false,
            _ => self.out_ports().contains(&port),
        }
    }

    /// Short tag used by the text format.
    pub fn tag(&self) -> Cow<'static, str> {
        match self {
            NodeKind::Application => "APP".into(),
            NodeKind::Abstraction => "LAM".into(),
            NodeKind::FanOut => "FO".into(),
            NodeKind::FanIn => "FI".into(),
            NodeKind::Terminal => "T".into(),
            NodeKind::Other { name, inputs, outputs } => format!("OTHER:{name}:{inputs}:{outputs}").into(),
        }
    }

    pub fn is_other(&self) -> bool {
        matches!(self, NodeKind::Other { .. })
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub node: NodeId,
    pub port: Port,
}

impl PortRef {
    pub fn new(node: impl Into<NodeId>, port: Port) -> Self {
        PortRef {
            node: node.into(),
            port,
        }
    }
}

impl From<(&NodeId, Port)> for PortRef {
    fn from((node, port): (&NodeId, Port)) -> Self {
        PortRef {
            node: node.clone(),
            port,
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.port)
    }
}

/// Tail of a link: an out-port, or a free label feeding into the molecule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Out(PortRef),
    Free(Label),
}

/// Head of a link: an in-port, or a free label leaving the molecule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    In(PortRef),
    Free(Label),
}

impl Source {
    pub fn out(node: &NodeId, port: Port) -> Self {
        Source::Out(PortRef::from((node, port)))
    }

    pub fn free(label: impl AsRef<str>) -> Self {
        Source::Free(Label::new(label))
    }

    pub fn node(&self) -> Option<&NodeId> {
        match self {
            Source::Out(p) => Some(&p.node),
            Source::Free(_) => None,
        }
    }
}

impl Target {
    pub fn input(node: &NodeId, port: Port) -> Self {
        Target::In(PortRef::from((node, port)))
    }

    pub fn free(label: impl AsRef<str>) -> Self {
        Target::Free(Label::new(label))
    }

    pub fn node(&self) -> Option<&NodeId> {
        match self {
            Target::In(p) => Some(&p.node),
            Target::Free(_) => None,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Out(p) => write!(f, "{p}"),
            Source::Free(l) => write!(f, "<{l}>"),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::In(p) => write!(f, "{p}"),
            Target::Free(l) => write!(f, "<{l}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoleculeError {
    #[error("node `{0}` already exists")]
    DuplicateNode(NodeId),
    #[error("source {0} is already connected")]
    SourceInUse(Source),
    #[error("target {0} is already connected")]
    TargetInUse(Target),
    #[error("free label `{0}` occurs in both molecules")]
    LabelCollision(Label),
    #[error("no free label `{0}`")]
    NoSuchLabel(Label),
}

/// One violated well-formedness rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DanglingPort(PortRef),
    UnknownNode(NodeId),
    UnknownPort(PortRef),
    /// A link leaves an in-port or enters an out-port.
    Orientation(PortRef),
    DuplicateLabel(Label),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingPort(p) => write!(f, "dangling port {p}"),
            Violation::UnknownNode(n) => write!(f, "link refers to unknown node `{n}`"),
            Violation::UnknownPort(p) => write!(f, "unknown port {p}"),
            Violation::Orientation(p) => write!(f, "orientation violated at {p}"),
            Violation::DuplicateLabel(l) => write!(f, "duplicate free label `{l}`"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Molecule {
    nodes: BTreeMap<NodeId, NodeKind>,
    links: BTreeMap<Source, Target>,
    back: BTreeMap<Target, Source>,
    loops: u64,
    next_fresh: u64,
}

impl Molecule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_loops(loops: u64) -> Self {
        Molecule {
            loops,
            ..Self::default()
        }
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, NodeKind> {
        &self.nodes
    }

    pub fn kind(&self, id: &NodeId) -> Option<&NodeKind> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// All links in source order.
    pub fn links(&self) -> impl Iterator<Item = (&Source, &Target)> {
        self.links.iter()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn loops(&self) -> u64 {
        self.loops
    }

    pub fn set_loops(&mut self, loops: u64) {
        self.loops = loops;
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.links.is_empty() && self.loops == 0
    }

    pub fn target_of(&self, source: &Source) -> Option<&Target> {
        self.links.get(source)
    }

    pub fn source_of(&self, target: &Target) -> Option<&Source> {
        self.back.get(target)
    }

    /// Where the given out-port leads.
    pub fn out_target(&self, node: &NodeId, port: Port) -> Option<&Target> {
        self.links.get(&Source::out(node, port))
    }

    /// What feeds the given in-port.
    pub fn in_source(&self, node: &NodeId, port: Port) -> Option<&Source> {
        self.back.get(&Target::input(node, port))
    }

    /// The node whose in-port the out-port leads to, if any.
    pub fn out_neighbor(&self, node: &NodeId, port: Port) -> Option<(&NodeId, Port)> {
        match self.out_target(node, port)? {
            Target::In(p) => Some((&p.node, p.port)),
            Target::Free(_) => None,
        }
    }

    /// The node whose out-port feeds the in-port, if any.
    pub fn in_neighbor(&self, node: &NodeId, port: Port) -> Option<(&NodeId, Port)> {
        match self.in_source(node, port)? {
            Source::Out(p) => Some((&p.node, p.port)),
            Source::Free(_) => None,
        }
    }

    pub fn add_node(&mut self, id: impl Into<NodeId>, kind: NodeKind) -> Result<NodeId, MoleculeError> {
        let id = id.into();
        if self.nodes.contains_key(&id) {
            return Err(MoleculeError::DuplicateNode(id));
        }
        self.nodes.insert(id.clone(), kind);
        Ok(id)
    }

    /// Next unused id of the form `n<k>`. Deterministic given the molecule.
    pub fn fresh_id(&mut self) -> NodeId {
        loop {
            let id = NodeId::new(format!("n{}", self.next_fresh));
            self.next_fresh += 1;
            if !self.nodes.contains_key(&id) {
                return id;
            }
        }
    }

    pub fn add_fresh(&mut self, kind: NodeKind) -> NodeId {
        let id = self.fresh_id();
        self.nodes.insert(id.clone(), kind);
        id
    }

    pub fn connect(&mut self, source: Source, target: Target) -> Result<(), MoleculeError> {
        if self.links.contains_key(&source) {
            return Err(MoleculeError::SourceInUse(source));
        }
        if self.back.contains_key(&target) {
            return Err(MoleculeError::TargetInUse(target));
        }
        self.back.insert(target.clone(), source.clone());
        self.links.insert(source, target);
        Ok(())
    }

    pub fn disconnect(&mut self, source: &Source) -> Option<Target> {
        let target = self.links.remove(source)?;
        self.back.remove(&target);
        Some(target)
    }

    /// Removes a node together with every link touching it.
    pub(crate) fn remove_node(&mut self, id: &NodeId) -> Option<NodeKind> {
        let kind = self.nodes.remove(id)?;
        for p in kind.out_ports().iter() {
            self.disconnect(&Source::out(id, *p));
        }
        for p in kind.in_ports().iter() {
            if let Some(src) = self.back.get(&Target::input(id, *p)).cloned() {
                self.disconnect(&src);
            }
        }
        Some(kind)
    }

    pub fn add_loops(&mut self, n: u64) {
        self.loops += n;
    }

    /// Free labels as a sorted multiset: the labels of free sources and free targets.
    pub fn free_labels(&self) -> Vec<Label> {
        let mut out: Vec<Label> = self
            .links
            .iter()
            .flat_map(|(s, t)| {
                let a = match s {
                    Source::Free(l) => Some(l.clone()),
                    _ => None,
                };
                let b = match t {
                    Target::Free(l) => Some(l.clone()),
                    _ => None,
                };
                a.into_iter().chain(b)
            })
            .collect();
        out.sort();
        out
    }

    /// Free-in labels: labels that feed the molecule.
    pub fn free_in_labels(&self) -> Vec<Label> {
        self.links
            .keys()
            .filter_map(|s| match s {
                Source::Free(l) => Some(l.clone()),
                _ => None,
            })
            .collect()
    }

    /// Free-out labels: labels the molecule feeds.
    pub fn free_out_labels(&self) -> Vec<Label> {
        self.back
            .keys()
            .filter_map(|t| match t {
                Target::Free(l) => Some(l.clone()),
                _ => None,
            })
            .collect()
    }

    /// Renames free labels. Labels absent from the map are kept.
    pub fn relabel(&self, map: &BTreeMap<Label, Label>) -> Molecule {
        let rename = |l: &Label| map.get(l).cloned().unwrap_or_else(|| l.clone());
        let mut out = Molecule {
            nodes: self.nodes.clone(),
            loops: self.loops,
            next_fresh: self.next_fresh,
            ..Default::default()
        };
        for (s, t) in &self.links {
            let s = match s {
                Source::Free(l) => Source::Free(rename(l)),
                other => other.clone(),
            };
            let t = match t {
                Target::Free(l) => Target::Free(rename(l)),
                other => other.clone(),
            };
            out.back.insert(t.clone(), s.clone());
            out.links.insert(s, t);
        }
        out
    }

    /// Reconnects whatever feeds free-out `label` to `target`.
    pub fn attach_out(&mut self, label: &Label, target: Target) -> Result<(), MoleculeError> {
        let src = self
            .back
            .get(&Target::Free(label.clone()))
            .cloned()
            .ok_or_else(|| MoleculeError::NoSuchLabel(label.clone()))?;
        self.disconnect(&src);
        self.connect(src, target)
    }

    /// Feeds whatever free-in `label` fed from `source` instead.
    pub fn attach_in(&mut self, label: &Label, source: Source) -> Result<(), MoleculeError> {
        let free = Source::Free(label.clone());
        let tgt = self
            .disconnect(&free)
            .ok_or_else(|| MoleculeError::NoSuchLabel(label.clone()))?;
        self.connect(source, tgt)
    }

    /// Checks occupancy, orientation and label uniqueness.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = BTreeSet::new();
        for (s, t) in &self.links {
            if let Source::Out(p) = s {
                match self.nodes.get(&p.node) {
                    None => {
                        violations.insert(Violation::UnknownNode(p.node.clone()));
                    }
                    Some(k) if !k.has_out_port(p.port) => {
                        if k.has_in_port(p.port) {
                            violations.insert(Violation::Orientation(p.clone()));
                        } else {
                            violations.insert(Violation::UnknownPort(p.clone()));
                        }
                    }
                    _ => {}
                }
            }
            if let Target::In(p) = t {
                match self.nodes.get(&p.node) {
                    None => {
                        violations.insert(Violation::UnknownNode(p.node.clone()));
                    }
                    Some(k) if !k.has_in_port(p.port) => {
                        if k.has_out_port(p.port) {
                            violations.insert(Violation::Orientation(p.clone()));
                        } else {
                            violations.insert(Violation::UnknownPort(p.clone()));
                        }
                    }
                    _ => {}
                }
            }
        }
        for (id, kind) in &self.nodes {
            for p in kind.in_ports().iter() {
                if !self.back.contains_key(&Target::input(id, *p)) {
                    violations.insert(Violation::DanglingPort(PortRef::from((id, *p))));
                }
            }
            for p in kind.out_ports().iter() {
                if !self.links.contains_key(&Source::out(id, *p)) {
                    violations.insert(Violation::DanglingPort(PortRef::from((id, *p))));
                }
            }
        }
        let labels = self.free_labels();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                violations.insert(Violation::DuplicateLabel(w[0].clone()));
            }
        }
        ValidationReport {
            violations: violations.into_iter().collect(),
        }
    }

    /// Copies every node of `other` into `self`, renaming ids that collide.
    /// Returns the id map applied to `other`'s nodes.
    pub(crate) fn absorb(&mut self, other: &Molecule) -> BTreeMap<NodeId, NodeId> {
        let mut map = BTreeMap::new();
        for (id, kind) in &other.nodes {
            let new_id = if self.nodes.contains_key(id) {
                self.fresh_id()
            } else {
                id.clone()
            };
            self.nodes.insert(new_id.clone(), kind.clone());
            map.insert(id.clone(), new_id);
        }
        let rename = |p: &PortRef| PortRef {
            node: map[&p.node].clone(),
            port: p.port,
        };
        for (s, t) in &other.links {
            let s = match s {
                Source::Out(p) => Source::Out(rename(p)),
                other => other.clone(),
            };
            let t = match t {
                Target::In(p) => Target::In(rename(p)),
                other => other.clone(),
            };
            self.back.insert(t.clone(), s.clone());
            self.links.insert(s, t);
        }
        self.loops += other.loops;
        map
    }

    /// Sub-molecule on a node set. Links leaving the set are cut and their
    /// ends replaced by free labels produced by `name_cut`.
    pub fn induced(
        &self,
        keep: &BTreeSet<NodeId>,
        mut name_cut: impl FnMut(&Source, &Target) -> (Label, Label),
    ) -> Molecule {
        let mut out = Molecule {
            next_fresh: self.next_fresh,
            ..Default::default()
        };
        for id in keep {
            if let Some(k) = self.nodes.get(id) {
                out.nodes.insert(id.clone(), k.clone());
            }
        }
        let inside_s = |s: &Source| s.node().is_some_and(|n| keep.contains(n));
        let inside_t = |t: &Target| t.node().is_some_and(|n| keep.contains(n));
        for (s, t) in &self.links {
            let (si, ti) = (inside_s(s), inside_t(t));
            let pair = match (si, ti) {
                (true, true) => Some((s.clone(), t.clone())),
                (true, false) => {
                    let (_, out_label) = name_cut(s, t);
                    Some((s.clone(), Target::Free(out_label)))
                }
                (false, true) => {
                    let (in_label, _) = name_cut(s, t);
                    Some((Source::Free(in_label), t.clone()))
                }
                (false, false) => None,
            };
            if let Some((s, t)) = pair {
                out.back.insert(t.clone(), s.clone());
                out.links.insert(s, t);
            }
        }
        out
    }
}

/// Disjoint union. Node ids of `b` are renamed apart when they collide with `a`.
pub fn disjoint_union(a: &Molecule, b: &Molecule) -> Result<Molecule, MoleculeError> {
    let la: BTreeSet<Label> = a.free_labels().into_iter().collect();
    if let Some(l) = b.free_labels().into_iter().find(|l| la.contains(l)) {
        return Err(MoleculeError::LabelCollision(l));
    }
    let mut out = a.clone();
    out.absorb(b);
    Ok(out)
}

/// Splits a molecule into connected components: node components first
/// (ordered by smallest node id), then free arrows, then one molecule per loop.
pub fn connected_components(m: &Molecule) -> Vec<Molecule> {
    let ids: Vec<&NodeId> = m.nodes.keys().collect();
    let index: BTreeMap<&NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, t) in &m.links {
        if let (Some(a), Some(b)) = (s.node(), t.node()) {
            if let (Some(&ia), Some(&ib)) = (index.get(a), index.get(b)) {
                let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().insert((*id).clone());
    }
    let mut out = Vec::new();
    for set in groups.values() {
        let mut c = Molecule {
            next_fresh: m.next_fresh,
            ..Default::default()
        };
        for id in set {
            c.nodes.insert(id.clone(), m.nodes[id].clone());
        }
        for (s, t) in &m.links {
            let touches = s.node().is_some_and(|n| set.contains(n)) || t.node().is_some_and(|n| set.contains(n));
            if touches {
                c.back.insert(t.clone(), s.clone());
                c.links.insert(s.clone(), t.clone());
            }
        }
        out.push(c);
    }
    for (s, t) in &m.links {
        if let (Source::Free(_), Target::Free(_)) = (s, t) {
            let mut c = Molecule::new();
            c.back.insert(t.clone(), s.clone());
            c.links.insert(s.clone(), t.clone());
            out.push(c);
        }
    }
    for _ in 0..m.loops {
        out.push(Molecule::with_loops(1));
    }
    out
}
