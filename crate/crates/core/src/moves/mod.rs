//! Enzymes as local rewrite schemas.
//!
//! Each [`MoveKind`] has a pattern (found by [`find_sites`]) and a
//! replacement (performed by [`apply`]). Sites are anchored at their first
//! bound node, and re-verification re-runs the same anchored matcher, so a
//! site is fresh exactly when the pattern is still present verbatim.

mod disentangle;
mod global;
mod rewrite;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::molecule::{Molecule, NodeId, NodeKind, Port, Source, Target};
use rewrite::{in_hole, out_hole, Feed, Replacement, Sink};

pub use disentangle::{disentangle, read_fo_tree, DisentangleError, DisentangleOptions, FoTree};
pub use global::{apply_global_fanout, GlobalFanoutError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    BetaPlus,
    BetaMinus,
    FaninPlus,
    FaninMinus,
    CoComm,
    CoAssocPlus,
    CoAssocMinus,
    DistAppPlus,
    DistAppMinus,
    DistLamPlus,
    DistLamMinus,
    PruneApp,
    PruneLam,
    PruneFi,
    PruneFoLeft,
    PruneFoRight,
    LoopGc,
    Disentangle,
    GlobalFanout,
}

impl MoveKind {
    pub const ALL: [MoveKind; 19] = [
        MoveKind::BetaPlus,
        MoveKind::BetaMinus,
        MoveKind::FaninPlus,
        MoveKind::FaninMinus,
        MoveKind::CoComm,
        MoveKind::CoAssocPlus,
        MoveKind::CoAssocMinus,
        MoveKind::DistAppPlus,
        MoveKind::DistAppMinus,
        MoveKind::DistLamPlus,
        MoveKind::DistLamMinus,
        MoveKind::PruneApp,
        MoveKind::PruneLam,
        MoveKind::PruneFi,
        MoveKind::PruneFoLeft,
        MoveKind::PruneFoRight,
        MoveKind::LoopGc,
        MoveKind::Disentangle,
        MoveKind::GlobalFanout,
    ];

    /// Every kind with a local, single-step schema.
    pub const LOCAL: [MoveKind; 17] = [
        MoveKind::BetaPlus,
        MoveKind::BetaMinus,
        MoveKind::FaninPlus,
        MoveKind::FaninMinus,
        MoveKind::CoComm,
        MoveKind::CoAssocPlus,
        MoveKind::CoAssocMinus,
        MoveKind::DistAppPlus,
        MoveKind::DistAppMinus,
        MoveKind::DistLamPlus,
        MoveKind::DistLamMinus,
        MoveKind::PruneApp,
        MoveKind::PruneLam,
        MoveKind::PruneFi,
        MoveKind::PruneFoLeft,
        MoveKind::PruneFoRight,
        MoveKind::LoopGc,
    ];

    pub const PRUNING: [MoveKind; 5] = [
        MoveKind::PruneApp,
        MoveKind::PruneLam,
        MoveKind::PruneFi,
        MoveKind::PruneFoLeft,
        MoveKind::PruneFoRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::BetaPlus => "BETA+",
            MoveKind::BetaMinus => "BETA-",
            MoveKind::FaninPlus => "FANIN+",
            MoveKind::FaninMinus => "FANIN-",
            MoveKind::CoComm => "COCOMM",
            MoveKind::CoAssocPlus => "COASSOC+",
            MoveKind::CoAssocMinus => "COASSOC-",
            MoveKind::DistAppPlus => "DISTAPP+",
            MoveKind::DistAppMinus => "DISTAPP-",
            MoveKind::DistLamPlus => "DISTLAM+",
            MoveKind::DistLamMinus => "DISTLAM-",
            MoveKind::PruneApp => "PRUNEAPP",
            MoveKind::PruneLam => "PRUNELAM",
            MoveKind::PruneFi => "PRUNEFI",
            MoveKind::PruneFoLeft => "PRUNEFOL",
            MoveKind::PruneFoRight => "PRUNEFOR",
            MoveKind::LoopGc => "LOOPGC",
            MoveKind::Disentangle => "DISENT",
            MoveKind::GlobalFanout => "GFANOUT",
        }
    }

    /// The opposite flavor, if the move has one.
    pub fn inverse(self) -> Option<MoveKind> {
        use MoveKind::*;
        Some(match self {
            BetaPlus => BetaMinus,
            BetaMinus => BetaPlus,
            FaninPlus => FaninMinus,
            FaninMinus => FaninPlus,
            CoComm => CoComm,
            CoAssocPlus => CoAssocMinus,
            CoAssocMinus => CoAssocPlus,
            DistAppPlus => DistAppMinus,
            DistAppMinus => DistAppPlus,
            DistLamPlus => DistLamMinus,
            DistLamMinus => DistLamPlus,
            _ => return None,
        })
    }

    pub fn is_oracle_only(self) -> bool {
        self == MoveKind::GlobalFanout
    }

    /// Sites bound to an ordered pair of links rather than to nodes.
    pub fn binds_links(self) -> bool {
        matches!(self, MoveKind::BetaMinus | MoveKind::FaninMinus)
    }

    /// Change in node count caused by one application.
    pub fn node_delta(self) -> Option<i64> {
        use MoveKind::*;
        Some(match self {
            BetaPlus | FaninPlus | DistAppMinus | DistLamMinus | PruneLam | PruneFoLeft | PruneFoRight => -2,
            BetaMinus | FaninMinus | DistAppPlus | DistLamPlus => 2,
            CoComm | CoAssocPlus | CoAssocMinus | PruneApp | PruneFi | LoopGc => 0,
            Disentangle | GlobalFanout => return None,
        })
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown enzyme `{0}`")]
pub struct UnknownMoveKind(pub String);

impl FromStr for MoveKind {
    type Err = UnknownMoveKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MoveKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMoveKind(s.to_string()))
    }
}

/// A concrete binding of a move's pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionSite {
    pub kind: MoveKind,
    /// Bound nodes in the schema's role order.
    pub nodes: Vec<NodeId>,
    /// Bound links, for the link-pair schemas.
    pub arrows: Vec<(Source, Target)>,
    /// Position under canonical enumeration.
    pub index: usize,
}

impl ReactionSite {
    /// Nodes touched by the site, including endpoints of bound links.
    pub fn footprint(&self) -> BTreeSet<NodeId> {
        let mut out: BTreeSet<NodeId> = self.nodes.iter().cloned().collect();
        for (s, t) in &self.arrows {
            out.extend(s.node().cloned());
            out.extend(t.node().cloned());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GarbageDelta {
    /// Loops closed by the rewrite (added to the molecule's loop count).
    pub loops_emitted: u64,
    /// Loops moved out of the molecule into GARB.
    pub loops_collected: u64,
    pub pruned: u64,
}

/// Running GARB account for a reduction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GarbageLedger {
    pub loops_collected: u64,
    pub pruned_fragments: u64,
    pub notes: Vec<(usize, String)>,
}

impl GarbageLedger {
    pub fn record(&mut self, step: usize, kind: MoveKind, delta: &GarbageDelta) {
        self.loops_collected += delta.loops_collected;
        self.pruned_fragments += delta.pruned;
        if delta.loops_emitted > 0 {
            self.notes
                .push((step, format!("{kind} closed {} loop(s)", delta.loops_emitted)));
        }
        if delta.loops_collected > 0 {
            self.notes
                .push((step, format!("{kind} collected {} loop(s)", delta.loops_collected)));
        }
        if delta.pruned > 0 {
            self.notes
                .push((step, format!("{kind} pruned {} fragment(s)", delta.pruned)));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("site for {0} is stale")]
    StaleSite(MoveKind),
    #[error("site does not fit the {0} schema")]
    SchemaMismatch(MoveKind),
    #[error("sites {0} and {1} overlap")]
    Overlap(usize, usize),
}

/// Result of applying one site.
#[derive(Clone, Debug)]
pub struct Applied {
    pub molecule: Molecule,
    pub garbage: GarbageDelta,
    /// Ids of inserted nodes, in schema order.
    pub created: Vec<NodeId>,
}

fn is(m: &Molecule, id: &NodeId, kind: &NodeKind) -> bool {
    m.kind(id) == Some(kind)
}

/// The node whose `want` in-port is fed by `node.port`, if of kind `kind`.
fn next<'a>(m: &'a Molecule, node: &NodeId, port: Port, want: Port, kind: &NodeKind) -> Option<&'a NodeId> {
    match m.out_neighbor(node, port) {
        Some((n, p)) if p == want && is(m, n, kind) => Some(n),
        _ => None,
    }
}

fn anchor_kind(kind: MoveKind) -> Option<NodeKind> {
    use MoveKind::*;
    Some(match kind {
        BetaPlus | DistLamPlus | PruneLam => NodeKind::Abstraction,
        FaninPlus | PruneFi => NodeKind::FanIn,
        CoComm | CoAssocPlus | CoAssocMinus | DistAppMinus | DistLamMinus | PruneFoLeft | PruneFoRight => {
            NodeKind::FanOut
        }
        DistAppPlus | PruneApp => NodeKind::Application,
        _ => return None,
    })
}

/// Anchored matcher: bound nodes in role order when the pattern sits at `a`.
fn match_anchor(m: &Molecule, kind: MoveKind, a: &NodeId) -> Option<Vec<NodeId>> {
    use MoveKind::*;
    use NodeKind::*;
    if !is(m, a, &anchor_kind(kind)?) {
        return None;
    }
    let v = |xs: &[&NodeId]| Some(xs.iter().map(|x| (*x).clone()).collect());
    match kind {
        BetaPlus => v(&[a, next(m, a, Port::Out, Port::Fun, &Application)?]),
        FaninPlus => v(&[a, next(m, a, Port::Out, Port::In, &FanOut)?]),
        CoComm => v(&[a]),
        CoAssocPlus | CoAssocMinus => {
            let port = if kind == CoAssocPlus { Port::Left } else { Port::Right };
            let f2 = next(m, a, port, Port::In, &FanOut)?;
            (f2 != a).then(|| vec![a.clone(), f2.clone()])
        }
        DistAppPlus => v(&[a, next(m, a, Port::Out, Port::In, &FanOut)?]),
        DistLamPlus => v(&[a, next(m, a, Port::Out, Port::In, &FanOut)?]),
        DistAppMinus => {
            let a1 = next(m, a, Port::Left, Port::Fun, &Application)?;
            let a2 = next(m, a, Port::Right, Port::Fun, &Application)?;
            if a1 == a2 {
                return None;
            }
            let (g, gp) = m.in_neighbor(a1, Port::Arg)?;
            if gp != Port::Left || g == a || !is(m, g, &FanOut) {
                return None;
            }
            (next(m, g, Port::Right, Port::Arg, &Application)? == a2)
                .then(|| vec![a.clone(), g.clone(), a1.clone(), a2.clone()])
        }
        DistLamMinus => {
            let l1 = next(m, a, Port::Left, Port::In, &Abstraction)?;
            let l2 = next(m, a, Port::Right, Port::In, &Abstraction)?;
            if l1 == l2 {
                return None;
            }
            let fi = next(m, l1, Port::Var, Port::Right, &FanIn)?;
            (next(m, l2, Port::Var, Port::Left, &FanIn)? == fi)
                .then(|| vec![a.clone(), l1.clone(), l2.clone(), fi.clone()])
        }
        PruneApp => v(&[a, next(m, a, Port::Out, Port::In, &Terminal)?]),
        PruneLam => v(&[
            a,
            next(m, a, Port::Out, Port::In, &Terminal)?,
            next(m, a, Port::Var, Port::In, &Terminal)?,
        ]),
        PruneFi => v(&[a, next(m, a, Port::Out, Port::In, &Terminal)?]),
        PruneFoLeft => v(&[a, next(m, a, Port::Left, Port::In, &Terminal)?]),
        PruneFoRight => v(&[a, next(m, a, Port::Right, Port::In, &Terminal)?]),
        _ => None,
    }
}

/// Every site of `kind` in canonical order (by bound node ids, then links).
///
/// DISENTANGLE and GLOBAL FAN-OUT have their own entry points and yield no
/// sites here.
pub fn find_sites(m: &Molecule, kind: MoveKind) -> Vec<ReactionSite> {
    let mut sites: Vec<ReactionSite> = Vec::new();
    match kind {
        MoveKind::BetaMinus | MoveKind::FaninMinus => {
            let links: Vec<(Source, Target)> = m.links().map(|(s, t)| (s.clone(), t.clone())).collect();
            for (i, x) in links.iter().enumerate() {
                for (j, y) in links.iter().enumerate() {
                    if i != j {
                        sites.push(ReactionSite {
                            kind,
                            nodes: Vec::new(),
                            arrows: vec![x.clone(), y.clone()],
                            index: 0,
                        });
                    }
                }
            }
        }
        MoveKind::LoopGc => {
            if m.loops() > 0 {
                sites.push(ReactionSite {
                    kind,
                    nodes: Vec::new(),
                    arrows: Vec::new(),
                    index: 0,
                });
            }
        }
        MoveKind::Disentangle | MoveKind::GlobalFanout => {}
        _ => {
            for id in m.nodes().keys() {
                if let Some(nodes) = match_anchor(m, kind, id) {
                    sites.push(ReactionSite {
                        kind,
                        nodes,
                        arrows: Vec::new(),
                        index: 0,
                    });
                }
            }
        }
    }
    sites.sort_by(|a, b| a.nodes.cmp(&b.nodes).then_with(|| a.arrows.cmp(&b.arrows)));
    for (i, s) in sites.iter_mut().enumerate() {
        s.index = i;
    }
    sites
}

/// True when any site of `kind` exists; cheaper than collecting them.
pub fn has_site(m: &Molecule, kind: MoveKind) -> bool {
    match kind {
        MoveKind::BetaMinus | MoveKind::FaninMinus => m.link_count() >= 2,
        MoveKind::LoopGc => m.loops() > 0,
        MoveKind::Disentangle | MoveKind::GlobalFanout => false,
        _ => m.nodes().keys().any(|id| match_anchor(m, kind, id).is_some()),
    }
}

fn verify(m: &Molecule, site: &ReactionSite) -> Result<(), MoveError> {
    let kind = site.kind;
    match kind {
        MoveKind::Disentangle | MoveKind::GlobalFanout => Err(MoveError::SchemaMismatch(kind)),
        MoveKind::BetaMinus | MoveKind::FaninMinus => {
            if site.arrows.len() != 2 || !site.nodes.is_empty() {
                return Err(MoveError::SchemaMismatch(kind));
            }
            if site.arrows[0].0 == site.arrows[1].0 {
                return Err(MoveError::SchemaMismatch(kind));
            }
            for (s, t) in &site.arrows {
                if m.target_of(s) != Some(t) {
                    return Err(MoveError::StaleSite(kind));
                }
            }
            Ok(())
        }
        MoveKind::LoopGc => {
            if m.loops() == 0 {
                Err(MoveError::StaleSite(kind))
            } else {
                Ok(())
            }
        }
        _ => {
            let anchor = site.nodes.first().ok_or(MoveError::SchemaMismatch(kind))?;
            match match_anchor(m, kind, anchor) {
                Some(nodes) if nodes == site.nodes => Ok(()),
                _ => Err(MoveError::StaleSite(kind)),
            }
        }
    }
}

fn replacement(site: &ReactionSite) -> Replacement {
    use MoveKind::*;
    use NodeKind::*;
    let n = &site.nodes;
    let mut r = Replacement {
        removed: n.clone(),
        ..Default::default()
    };
    let out = |id: &NodeId, p: Port| Source::out(id, p);
    match site.kind {
        BetaPlus => {
            let (l, a) = (&n[0], &n[1]);
            r.consumed.push(out(l, Port::Out));
            r.wire(in_hole(l, Port::In), out_hole(a, Port::Out));
            r.wire(in_hole(a, Port::Arg), out_hole(l, Port::Var));
        }
        BetaMinus => {
            r.cut = site.arrows.iter().map(|(s, _)| s.clone()).collect();
            let l = r.add(None, Abstraction);
            let a = r.add(None, Application);
            r.wire(Feed::Cut(0), Sink::New(l, Port::In));
            r.wire(Feed::New(l, Port::Var), Sink::Cut(1));
            r.wire(Feed::Cut(1), Sink::New(a, Port::Arg));
            r.wire(Feed::New(l, Port::Out), Sink::New(a, Port::Fun));
            r.wire(Feed::New(a, Port::Out), Sink::Cut(0));
        }
        FaninPlus => {
            let (fi, fo) = (&n[0], &n[1]);
            r.consumed.push(out(fi, Port::Out));
            r.wire(in_hole(fi, Port::Left), out_hole(fo, Port::Right));
            r.wire(in_hole(fi, Port::Right), out_hole(fo, Port::Left));
        }
        FaninMinus => {
            r.cut = site.arrows.iter().map(|(s, _)| s.clone()).collect();
            let fi = r.add(None, FanIn);
            let fo = r.add(None, FanOut);
            r.wire(Feed::Cut(0), Sink::New(fi, Port::Left));
            r.wire(Feed::Cut(1), Sink::New(fi, Port::Right));
            r.wire(Feed::New(fi, Port::Out), Sink::New(fo, Port::In));
            r.wire(Feed::New(fo, Port::Left), Sink::Cut(1));
            r.wire(Feed::New(fo, Port::Right), Sink::Cut(0));
        }
        CoComm => {
            let f = &n[0];
            let g = r.add(Some(f.clone()), FanOut);
            r.wire(in_hole(f, Port::In), Sink::New(g, Port::In));
            r.wire(Feed::New(g, Port::Left), out_hole(f, Port::Right));
            r.wire(Feed::New(g, Port::Right), out_hole(f, Port::Left));
        }
        CoAssocPlus => {
            let (f1, f2) = (&n[0], &n[1]);
            r.consumed.push(out(f1, Port::Left));
            let g1 = r.add(Some(f1.clone()), FanOut);
            let g2 = r.add(Some(f2.clone()), FanOut);
            r.wire(in_hole(f1, Port::In), Sink::New(g1, Port::In));
            r.wire(Feed::New(g1, Port::Left), out_hole(f2, Port::Left));
            r.wire(Feed::New(g1, Port::Right), Sink::New(g2, Port::In));
            r.wire(Feed::New(g2, Port::Left), out_hole(f2, Port::Right));
            r.wire(Feed::New(g2, Port::Right), out_hole(f1, Port::Right));
        }
        CoAssocMinus => {
            let (f1, f2) = (&n[0], &n[1]);
            r.consumed.push(out(f1, Port::Right));
            let g1 = r.add(Some(f1.clone()), FanOut);
            let g2 = r.add(Some(f2.clone()), FanOut);
            r.wire(in_hole(f1, Port::In), Sink::New(g1, Port::In));
            r.wire(Feed::New(g1, Port::Left), Sink::New(g2, Port::In));
            r.wire(Feed::New(g2, Port::Left), out_hole(f1, Port::Left));
            r.wire(Feed::New(g2, Port::Right), out_hole(f2, Port::Left));
            r.wire(Feed::New(g1, Port::Right), out_hole(f2, Port::Right));
        }
        DistAppPlus => {
            let (a, fo) = (&n[0], &n[1]);
            r.consumed.push(out(a, Port::Out));
            let ff = r.add(None, FanOut);
            let fg = r.add(None, FanOut);
            let a1 = r.add(None, Application);
            let a2 = r.add(None, Application);
            r.wire(in_hole(a, Port::Fun), Sink::New(ff, Port::In));
            r.wire(in_hole(a, Port::Arg), Sink::New(fg, Port::In));
            r.wire(Feed::New(ff, Port::Left), Sink::New(a1, Port::Fun));
            r.wire(Feed::New(ff, Port::Right), Sink::New(a2, Port::Fun));
            r.wire(Feed::New(fg, Port::Left), Sink::New(a1, Port::Arg));
            r.wire(Feed::New(fg, Port::Right), Sink::New(a2, Port::Arg));
            r.wire(Feed::New(a1, Port::Out), out_hole(fo, Port::Left));
            r.wire(Feed::New(a2, Port::Out), out_hole(fo, Port::Right));
        }
        DistAppMinus => {
            let (ff, fg, a1, a2) = (&n[0], &n[1], &n[2], &n[3]);
            for (x, p) in [(ff, Port::Left), (ff, Port::Right), (fg, Port::Left), (fg, Port::Right)] {
                r.consumed.push(out(x, p));
            }
            let a = r.add(None, Application);
            let fo = r.add(None, FanOut);
            r.wire(in_hole(ff, Port::In), Sink::New(a, Port::Fun));
            r.wire(in_hole(fg, Port::In), Sink::New(a, Port::Arg));
            r.wire(Feed::New(a, Port::Out), Sink::New(fo, Port::In));
            r.wire(Feed::New(fo, Port::Left), out_hole(a1, Port::Out));
            r.wire(Feed::New(fo, Port::Right), out_hole(a2, Port::Out));
        }
        DistLamPlus => {
            let (l, fo) = (&n[0], &n[1]);
            r.consumed.push(out(l, Port::Out));
            let fb = r.add(None, FanOut);
            let l1 = r.add(None, Abstraction);
            let l2 = r.add(None, Abstraction);
            let fi = r.add(None, FanIn);
            r.wire(in_hole(l, Port::In), Sink::New(fb, Port::In));
            r.wire(Feed::New(fb, Port::Left), Sink::New(l1, Port::In));
            r.wire(Feed::New(fb, Port::Right), Sink::New(l2, Port::In));
            // The left copy's variable enters the fan-in on the right, so
            // that a later FAN-IN reaction hands each copy its own variable.
            r.wire(Feed::New(l1, Port::Var), Sink::New(fi, Port::Right));
            r.wire(Feed::New(l2, Port::Var), Sink::New(fi, Port::Left));
            r.wire(Feed::New(fi, Port::Out), out_hole(l, Port::Var));
            r.wire(Feed::New(l1, Port::Out), out_hole(fo, Port::Left));
            r.wire(Feed::New(l2, Port::Out), out_hole(fo, Port::Right));
        }
        DistLamMinus => {
            let (fb, l1, l2, _fi) = (&n[0], &n[1], &n[2], &n[3]);
            for (x, p) in [(fb, Port::Left), (fb, Port::Right), (l1, Port::Var), (l2, Port::Var)] {
                r.consumed.push(out(x, p));
            }
            let fi = &n[3];
            let l = r.add(None, Abstraction);
            let fo = r.add(None, FanOut);
            r.wire(in_hole(fb, Port::In), Sink::New(l, Port::In));
            r.wire(Feed::New(l, Port::Var), out_hole(fi, Port::Out));
            r.wire(Feed::New(l, Port::Out), Sink::New(fo, Port::In));
            r.wire(Feed::New(fo, Port::Left), out_hole(l1, Port::Out));
            r.wire(Feed::New(fo, Port::Right), out_hole(l2, Port::Out));
        }
        PruneApp => {
            let a = &n[0];
            r.consumed.push(out(a, Port::Out));
            let t1 = r.add(None, Terminal);
            let t2 = r.add(None, Terminal);
            r.wire(in_hole(a, Port::Fun), Sink::New(t1, Port::In));
            r.wire(in_hole(a, Port::Arg), Sink::New(t2, Port::In));
        }
        PruneLam => {
            let l = &n[0];
            r.consumed.push(out(l, Port::Out));
            r.consumed.push(out(l, Port::Var));
            let t = r.add(None, Terminal);
            r.wire(in_hole(l, Port::In), Sink::New(t, Port::In));
        }
        PruneFi => {
            let fi = &n[0];
            r.consumed.push(out(fi, Port::Out));
            let t1 = r.add(None, Terminal);
            let t2 = r.add(None, Terminal);
            r.wire(in_hole(fi, Port::Left), Sink::New(t1, Port::In));
            r.wire(in_hole(fi, Port::Right), Sink::New(t2, Port::In));
        }
        PruneFoLeft | PruneFoRight => {
            let fo = &n[0];
            let (dead, live) = if site.kind == PruneFoLeft {
                (Port::Left, Port::Right)
            } else {
                (Port::Right, Port::Left)
            };
            r.consumed.push(out(fo, dead));
            r.wire(in_hole(fo, Port::In), out_hole(fo, live));
        }
        LoopGc | Disentangle | GlobalFanout => unreachable!("no replacement schema"),
    }
    r
}

/// Applies one site. The site is re-verified against `m` first.
pub fn apply(m: &Molecule, site: &ReactionSite) -> Result<Applied, MoveError> {
    verify(m, site)?;
    let mut out = m.clone();
    if site.kind == MoveKind::LoopGc {
        out.set_loops(m.loops() - 1);
        return Ok(Applied {
            molecule: out,
            garbage: GarbageDelta {
                loops_collected: 1,
                ..Default::default()
            },
            created: Vec::new(),
        });
    }
    let outcome = rewrite::execute(&mut out, replacement(site));
    let pruned = u64::from(MoveKind::PRUNING.contains(&site.kind));
    Ok(Applied {
        molecule: out,
        garbage: GarbageDelta {
            loops_emitted: outcome.loops,
            loops_collected: 0,
            pruned,
        },
        created: outcome.created,
    })
}

/// Applies pairwise disjoint sites one after another.
pub fn apply_batch(m: &Molecule, sites: &[ReactionSite]) -> Result<(Molecule, Vec<GarbageDelta>), MoveError> {
    let prints: Vec<BTreeSet<NodeId>> = sites.iter().map(ReactionSite::footprint).collect();
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            let shared_link = sites[i]
                .arrows
                .iter()
                .any(|x| sites[j].arrows.iter().any(|y| x.0 == y.0 || x.1 == y.1));
            let both_gc = sites[i].kind == MoveKind::LoopGc && sites[j].kind == MoveKind::LoopGc;
            if !prints[i].is_disjoint(&prints[j]) || shared_link || both_gc {
                return Err(MoveError::Overlap(sites[i].index, sites[j].index));
            }
        }
    }
    let mut cur = m.clone();
    let mut deltas = Vec::with_capacity(sites.len());
    for s in sites {
        let applied = apply(&cur, s)?;
        cur = applied.molecule;
        deltas.push(applied.garbage);
    }
    Ok((cur, deltas))
}
