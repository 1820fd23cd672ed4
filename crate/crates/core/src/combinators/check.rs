//! Multiplier, co-multiplier and propagator checks.
//!
//! A multiplier is searched compositionally: when the fan-out sits below an
//! application whose two arguments are closed and disjoint, DIST-APP pushes
//! the fan-out into both arguments and each is multiplied on its own. Every
//! other head is handled by breadth-first search on the extracted
//! sub-molecule, and the sub-trace is transported back to the host.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use super::rename_labels;
use crate::iso::{is_isomorphic, CanonicalForm, IsoWitness};
use crate::molecule::{disjoint_union, Label, Molecule, NodeId, NodeKind, Port, Source, Target};
use crate::moves::{apply, apply_global_fanout, GarbageDelta, MoveKind, ReactionSite};
use crate::reactor::{replay, search_reduce, SearchBound, Status, StepRecord, Trace};

/// Local kinds used to multiply: the expansive DIST moves, FAN-IN, the
/// fan-out rearrangements and pruning. Beta is left out so that the subject
/// itself is never reduced.
pub const MULTIPLIER_KINDS: [MoveKind; 11] = [
    MoveKind::DistAppPlus,
    MoveKind::DistLamPlus,
    MoveKind::FaninPlus,
    MoveKind::CoAssocPlus,
    MoveKind::CoAssocMinus,
    MoveKind::CoComm,
    MoveKind::PruneApp,
    MoveKind::PruneLam,
    MoveKind::PruneFi,
    MoveKind::PruneFoLeft,
    MoveKind::PruneFoRight,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("refuted within bound ({explored} states explored)")]
    Refuted { explored: usize },
}

#[derive(Clone, Debug)]
pub struct MultiplierCertificate {
    pub subject: Molecule,
    /// The subject wired into the fan-out (or fan-in) that starts the reduction.
    pub host: Molecule,
    pub trace: Trace,
    pub result: Molecule,
    pub copies: IsoWitness,
    /// Comparison with the GLOBAL FAN-OUT result; multipliers only.
    pub oracle: Option<IsoWitness>,
}

impl MultiplierCertificate {
    /// Both witnesses matched and the trace replays from the host.
    pub fn is_valid(&self) -> bool {
        self.copies.matched
            && self.oracle.as_ref().is_none_or(|w| w.matched)
            && replay(&self.host, &self.trace).is_ok_and(|m| m == self.result)
    }
}

fn single_label(m: &Molecule, what: &str) -> Result<(), CheckError> {
    let labels = m.free_labels();
    let outs = m.free_out_labels();
    if labels.len() != 1 || outs.len() != 1 || outs[0].as_str() != "out" {
        return Err(CheckError::Precondition(format!(
            "{what} needs exactly one free label, the output `out`; found {labels:?}"
        )));
    }
    Ok(())
}

/// Subject with `out` feeding a fresh fan-out whose outputs are `1` and `2`.
pub fn multiplier_host(a: &Molecule) -> Result<(Molecule, NodeId), CheckError> {
    single_label(a, "a multiplier subject")?;
    let mut m = a.clone();
    let fo = m.add_fresh(NodeKind::FanOut);
    m.attach_out(&Label::new("out"), Target::input(&fo, Port::In))
        .expect("label checked");
    m.connect(Source::out(&fo, Port::Left), Target::free("1"))
        .expect("fresh node");
    m.connect(Source::out(&fo, Port::Right), Target::free("2"))
        .expect("fresh node");
    Ok((m, fo))
}

/// Two disjoint copies of `a`; `rename(label, k)` names the labels of copy `k`.
pub fn two_copies(a: &Molecule, rename: impl Fn(&str, u8) -> String) -> Molecule {
    let one = rename_labels(a, |l| rename(l, 1));
    let two = rename_labels(a, |l| rename(l, 2));
    disjoint_union(&one, &two).expect("renamed copies have disjoint labels")
}

fn out_copies(a: &Molecule) -> Molecule {
    two_copies(a, |_, k| k.to_string())
}

/// Nodes reachable from `start` without entering `avoid`.
fn reach(m: &Molecule, start: &NodeId, avoid: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(id) = queue.pop_front() {
        let kind = &m.nodes()[&id];
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
            if !avoid.contains(&n) && seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// The closed sub-molecule whose only outside link is `head -> exit`.
fn closed_region(m: &Molecule, head: &Source, exit: &Target) -> Option<BTreeSet<NodeId>> {
    let h = head.node()?;
    let avoid: BTreeSet<NodeId> = exit.node().into_iter().cloned().collect();
    let r = reach(m, h, &avoid);
    for id in &r {
        let kind = &m.nodes()[id];
        for p in kind.in_ports().iter() {
            if !m.in_source(id, *p)?.node().is_some_and(|n| r.contains(n)) {
                return None;
            }
        }
        for p in kind.out_ports().iter() {
            let s = Source::out(id, *p);
            let t = m.target_of(&s)?;
            if !(t.node().is_some_and(|n| r.contains(n)) || (&s == head && t == exit)) {
                return None;
            }
        }
    }
    Some(r)
}

/// Solved sub-searches, keyed by the canonical form of the sub-host.
/// Reusing one cache across calls skips repeated searches for equal heads.
#[derive(Default)]
pub struct MultiplierCache {
    solved: HashMap<String, (Molecule, Vec<ReactionSite>)>,
}

struct Multiplier<'c> {
    cache: &'c mut MultiplierCache,
    host: Molecule,
    steps: Vec<(ReactionSite, GarbageDelta)>,
    bound: SearchBound,
}

impl Multiplier<'_> {
    fn fire(&mut self, site: ReactionSite) -> Vec<NodeId> {
        let applied = apply(&self.host, &site).expect("planned site is fresh");
        self.host = applied.molecule;
        self.steps.push((site, applied.garbage));
        applied.created
    }

    fn multiply(&mut self, fo: &NodeId) -> Result<(), CheckError> {
        let fo_in = Target::input(fo, Port::In);
        let feeder = self
            .host
            .source_of(&fo_in)
            .cloned()
            .ok_or_else(|| CheckError::Precondition("fan-out input is unconnected".into()))?;
        let Source::Out(head) = &feeder else {
            return Err(CheckError::Precondition("fan-out is fed by a free label".into()));
        };
        if self.host.kind(&head.node) == Some(&NodeKind::Application) && self.split_application(&head.node) {
            let site = ReactionSite {
                kind: MoveKind::DistAppPlus,
                nodes: vec![head.node.clone(), fo.clone()],
                arrows: Vec::new(),
                index: 0,
            };
            let created = self.fire(site);
            self.multiply(&created[0])?;
            return self.multiply(&created[1]);
        }
        self.multiply_by_search(&feeder, fo)
    }

    /// Whether the function and argument parts of `app` are closed and disjoint.
    fn split_application(&self, app: &NodeId) -> bool {
        let part = |p: Port| {
            let t = Target::input(app, p);
            let s = self.host.source_of(&t)?.clone();
            closed_region(&self.host, &s, &t)
        };
        match (part(Port::Fun), part(Port::Arg)) {
            (Some(f), Some(x)) => f.is_disjoint(&x),
            _ => false,
        }
    }

    fn multiply_by_search(&mut self, feeder: &Source, fo: &NodeId) -> Result<(), CheckError> {
        let fo_in = Target::input(fo, Port::In);
        let region = closed_region(&self.host, feeder, &fo_in)
            .ok_or_else(|| CheckError::Precondition("subject is not closed".into()))?;
        let subject = self.host.induced(&region, |_, _| (Label::new("?"), Label::new("out")));
        let mut keep = region.clone();
        keep.insert(fo.clone());
        let left = Source::out(fo, Port::Left);
        let sub = self.host.induced(&keep, |s, _| {
            let l = if s == &left { "1" } else { "2" };
            (Label::new("?"), Label::new(l))
        });
        let key = CanonicalForm::of(&sub).key();
        let (mut cur, sites, mut ids) = match self.cache.solved.get(&key) {
            Some((solved, sites)) => {
                let w = is_isomorphic(solved, &sub);
                (solved.clone(), sites.clone(), w.bijection)
            }
            None => {
                let goal = out_copies(&subject);
                let trace = search_reduce(&sub, |m| is_isomorphic(m, &goal).matched, &MULTIPLIER_KINDS, self.bound)
                    .map_err(|e| CheckError::Refuted { explored: e.explored })?;
                let sites: Vec<ReactionSite> = trace.steps.iter().map(StepRecord::site).collect();
                self.cache.solved.insert(key, (sub.clone(), sites.clone()));
                let ids = keep.iter().map(|n| (n.clone(), n.clone())).collect();
                (sub, sites, ids)
            }
        };

        // Transport the sub-trace: ids agree on the kept nodes, and created
        // nodes correspond by position.
        for site in sites {
            let applied = apply(&cur, &site).expect("search trace replays");
            cur = applied.molecule;
            let host_site = ReactionSite {
                nodes: site.nodes.iter().map(|n| ids[n].clone()).collect(),
                ..site
            };
            let created = self.fire(host_site);
            ids.extend(applied.created.into_iter().zip(created));
        }
        Ok(())
    }
}

/// Searches for local reactions turning FO(`a`) into two copies of `a`.
pub fn is_multiplier(a: &Molecule, bound: SearchBound) -> Result<MultiplierCertificate, CheckError> {
    is_multiplier_cached(a, bound, &mut MultiplierCache::default())
}

pub fn is_multiplier_cached(
    a: &Molecule,
    bound: SearchBound,
    cache: &mut MultiplierCache,
) -> Result<MultiplierCertificate, CheckError> {
    let (host, fo) = multiplier_host(a)?;
    let mut mul = Multiplier {
        cache,
        host: host.clone(),
        steps: Vec::new(),
        bound,
    };
    mul.multiply(&fo)?;
    let trace = Trace {
        steps: mul
            .steps
            .into_iter()
            .enumerate()
            .map(|(i, (s, g))| StepRecord {
                ordinal: i + 1,
                kind: s.kind,
                nodes: s.nodes,
                arrows: s.arrows,
                garbage: g,
                available: BTreeMap::new(),
            })
            .collect(),
        status: Some(Status::Goal),
    };
    let result = mul.host;
    let copies = is_isomorphic(&result, &out_copies(a));
    let oracle = apply_global_fanout(&host, &fo)
        .map(|g| is_isomorphic(&result, &g))
        .unwrap_or(IsoWitness {
            matched: false,
            bijection: BTreeMap::new(),
        });
    Ok(MultiplierCertificate {
        subject: a.clone(),
        host,
        trace,
        result,
        copies,
        oracle: Some(oracle),
    })
}

fn certify(
    subject: &Molecule,
    host: Molecule,
    goal: Molecule,
    bound: SearchBound,
) -> Result<MultiplierCertificate, CheckError> {
    let trace = search_reduce(&host, |m| is_isomorphic(m, &goal).matched, &MULTIPLIER_KINDS, bound)
        .map_err(|e| CheckError::Refuted { explored: e.explored })?;
    let result = replay(&host, &trace).expect("search trace replays");
    let copies = is_isomorphic(&result, &goal);
    Ok(MultiplierCertificate {
        subject: subject.clone(),
        host,
        trace,
        result,
        copies,
        oracle: None,
    })
}

/// Fan-in with free inputs `1`, `2` feeding the single free input of `a`;
/// the goal is two copies of `a` with inputs `1` and `2`.
pub fn is_comultiplier(a: &Molecule, bound: SearchBound) -> Result<MultiplierCertificate, CheckError> {
    let ins = a.free_in_labels();
    if ins.len() != 1 || a.free_labels().len() != 1 {
        return Err(CheckError::Precondition(format!(
            "a co-multiplier subject needs exactly one free label, an input; found {:?}",
            a.free_labels()
        )));
    }
    let x = &ins[0];
    let mut host = a.clone();
    let fi = host.add_fresh(NodeKind::FanIn);
    host.connect(Source::free("1"), Target::input(&fi, Port::Left))
        .expect("fresh node");
    host.connect(Source::free("2"), Target::input(&fi, Port::Right))
        .expect("fresh node");
    host.attach_in(x, Source::out(&fi, Port::Out)).expect("label checked");
    let goal = two_copies(a, |_, k| k.to_string());
    certify(a, host, goal, bound)
}

/// `a` followed by a fan-out reduces to a fan-out on `a`'s input feeding
/// two copies of `a`.
pub fn is_propagator(a: &Molecule, bound: SearchBound) -> Result<MultiplierCertificate, CheckError> {
    let (ins, outs) = (a.free_in_labels(), a.free_out_labels());
    if ins.len() != 1 || outs.len() != 1 || a.free_labels().len() != 2 {
        return Err(CheckError::Precondition(format!(
            "a propagator needs exactly one free input and one free output; found {:?}",
            a.free_labels()
        )));
    }
    let (x, y) = (&ins[0], &outs[0]);
    let mut host = a.clone();
    let fo = host.add_fresh(NodeKind::FanOut);
    host.attach_out(y, Target::input(&fo, Port::In)).expect("label checked");
    host.connect(Source::out(&fo, Port::Left), Target::free("1"))
        .expect("fresh node");
    host.connect(Source::out(&fo, Port::Right), Target::free("2"))
        .expect("fresh node");

    let mut goal = two_copies(a, |l, k| {
        if l == y.as_str() {
            k.to_string()
        } else {
            format!("{l}#{k}")
        }
    });
    let g = goal.add_fresh(NodeKind::FanOut);
    goal.connect(Source::Free(x.clone()), Target::input(&g, Port::In))
        .expect("fresh node");
    for (k, p) in [(1, Port::Left), (2, Port::Right)] {
        goal.attach_in(&Label::new(format!("{x}#{k}")), Source::out(&g, p))
            .expect("copy input exists");
    }
    certify(a, host, goal, bound)
}
