//! Zippers, locks, sets and the pair selector.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use super::{inp, link, out};
use crate::molecule::{Label, Molecule, NodeId, NodeKind, Port, Source, Target};
use crate::moves::MoveKind;
use crate::reactor::{run, EnzymeSoup, Status, Strategy, DEFAULT_MAX_STEPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    Beta,
    Phi,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("at least one pair is required")]
    Degenerate,
    #[error("label `{0}` is used twice")]
    DuplicateLabel(Label),
    #[error("no wiring among {searched} candidates has the required behavior")]
    Unrealizable { searched: usize },
}

type Pair = (Label, Label);

fn check_labels(pairs: &[Pair], end: Option<&Pair>) -> Result<(), BuildError> {
    if pairs.is_empty() {
        return Err(BuildError::Degenerate);
    }
    let mut seen = BTreeSet::new();
    for (a, b) in pairs.iter().chain(end) {
        for l in [a, b] {
            if !seen.insert(l.clone()) {
                return Err(BuildError::DuplicateLabel(l.clone()));
            }
        }
    }
    Ok(())
}

/// One redex level: `entry` is the port the previous level feeds,
/// `exit` the port feeding the next level.
struct Level {
    /// LAM.in or FI.left.
    entry: Target,
    /// LAM.out or FI.out.
    head_out: Source,
    /// APP.fun or FO.in.
    head_in: Target,
    /// APP.out or FO.right.
    exit: Source,
}

/// Adds one redex carrying `pair`, without connecting its head arrow.
fn level(m: &mut Molecule, beta: bool, pair: &Pair) -> Level {
    if beta {
        let l = m.add_fresh(NodeKind::Abstraction);
        let a = m.add_fresh(NodeKind::Application);
        link(m, Source::Free(pair.0.clone()), inp(&a, Port::Arg));
        link(m, out(&l, Port::Var), Target::Free(pair.1.clone()));
        Level {
            entry: inp(&l, Port::In),
            head_out: out(&l, Port::Out),
            head_in: inp(&a, Port::Fun),
            exit: out(&a, Port::Out),
        }
    } else {
        let i = m.add_fresh(NodeKind::FanIn);
        let o = m.add_fresh(NodeKind::FanOut);
        link(m, Source::Free(pair.0.clone()), inp(&i, Port::Right));
        link(m, out(&o, Port::Left), Target::Free(pair.1.clone()));
        Level {
            entry: inp(&i, Port::Left),
            head_out: out(&i, Port::Out),
            head_in: inp(&o, Port::In),
            exit: out(&o, Port::Right),
        }
    }
}

fn levels(m: &mut Molecule, kind: GadgetKind, pairs: &[Pair], mixed_beta: impl Fn(usize) -> bool) -> Vec<Level> {
    pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let beta = match kind {
                GadgetKind::Beta => true,
                GadgetKind::Phi => false,
                GadgetKind::Mixed => mixed_beta(k),
            };
            level(m, beta, p)
        })
        .collect()
}

/// Nested redexes: only the first level is a site, and firing it exposes the
/// next. Pairs are released in the given order, then `end`.
///
/// For [`GadgetKind::Mixed`] the first level is a fan-in/fan-out redex and
/// the rest are beta redexes.
pub fn build_zipper(kind: GadgetKind, pairs: &[Pair], end: &Pair) -> Result<Molecule, BuildError> {
    check_labels(pairs, Some(end))?;
    let mut m = Molecule::new();
    let lv = levels(&mut m, kind, pairs, |k| k > 0);
    link(&mut m, lv[0].head_out.clone(), lv[0].head_in.clone());
    chain(&mut m, &lv, end);
    Ok(m)
}

/// Level k+1's head feeds level k's entry; its head target is fed by level
/// k's exit.
fn chain(m: &mut Molecule, lv: &[Level], end: &Pair) {
    for w in lv.windows(2) {
        link(m, w[1].head_out.clone(), w[0].entry.clone());
        link(m, w[0].exit.clone(), w[1].head_in.clone());
    }
    let last = lv.last().expect("nonempty");
    link(m, Source::Free(end.0.clone()), last.entry.clone());
    link(m, last.exit.clone(), Target::Free(end.1.clone()));
}

/// Lock gadget on the arrow `s -> t`: one fan-in/fan-out site whose firing
/// restores the arrow and emits a loop.
fn lock(m: &mut Molecule, s: Source, t: Target) {
    let i = m.add_fresh(NodeKind::FanIn);
    let o = m.add_fresh(NodeKind::FanOut);
    link(m, s, inp(&i, Port::Left));
    link(m, out(&o, Port::Left), inp(&i, Port::Right));
    link(m, out(&i, Port::Out), inp(&o, Port::In));
    link(m, out(&o, Port::Right), t);
}

/// Beta zipper whose head arrow passes through a lock.
pub fn build_locked_zipper(pairs: &[Pair], end: &Pair) -> Result<Molecule, BuildError> {
    check_labels(pairs, Some(end))?;
    let mut m = Molecule::new();
    let lv = levels(&mut m, GadgetKind::Beta, pairs, |_| true);
    lock(&mut m, lv[0].head_out.clone(), lv[0].head_in.clone());
    chain(&mut m, &lv, end);
    Ok(m)
}

/// One pair behind two locks: a beta lock closing on itself and a fan-in
/// lock downstream. Both sites are present at once; each emits a loop.
pub fn build_double_lock(pair: &Pair) -> Result<Molecule, BuildError> {
    check_labels(std::slice::from_ref(pair), None)?;
    let mut m = Molecule::new();
    let l = m.add_fresh(NodeKind::Abstraction);
    let a = m.add_fresh(NodeKind::Application);
    link(&mut m, Source::Free(pair.0.clone()), inp(&l, Port::In));
    link(&mut m, out(&l, Port::Var), inp(&a, Port::Arg));
    link(&mut m, out(&l, Port::Out), inp(&a, Port::Fun));
    lock(&mut m, out(&a, Port::Out), Target::Free(pair.1.clone()));
    Ok(m)
}

/// Independent redexes on a backbone: every level is a site at once.
/// Mixed sets alternate, with beta redexes at even positions (0, 2, …).
pub fn build_set(kind: GadgetKind, pairs: &[Pair], end: &Pair) -> Result<Molecule, BuildError> {
    check_labels(pairs, Some(end))?;
    let mut m = Molecule::new();
    let lv = levels(&mut m, kind, pairs, |k| k % 2 == 0);
    for l in &lv {
        link(&mut m, l.head_out.clone(), l.head_in.clone());
    }
    for w in lv.windows(2) {
        link(&mut m, w[1].exit.clone(), w[0].entry.clone());
    }
    link(
        &mut m,
        Source::Free(end.0.clone()),
        lv.last().expect("nonempty").entry.clone(),
    );
    link(&mut m, lv[0].exit.clone(), Target::Free(end.1.clone()));
    Ok(m)
}

/// Outcome of the exhaustive pair-selector search.
#[derive(Clone, Debug, Default)]
pub struct PairSelectorReport {
    /// Wirings tried.
    pub searched: usize,
    /// Wirings whose two soups release the required couplings.
    pub behavioral: Vec<Molecule>,
    /// Of those, the ones whose two sites also share a node.
    pub accepted: Vec<Molecule>,
}

fn has_arrow(m: &Molecule, a: &Label, b: &Label) -> bool {
    m.target_of(&Source::Free(a.clone())) == Some(&Target::Free(b.clone()))
}

fn stall(m: &Molecule, kind: MoveKind) -> Option<Molecule> {
    let (out, trace) = run(
        m,
        &EnzymeSoup::unbounded(&[kind]),
        Strategy::priority(),
        DEFAULT_MAX_STEPS,
    );
    (trace.status == Some(Status::Stalled)).then_some(out)
}

/// Tries every wiring of one LAM/APP redex and one FI/FO redex with free
/// inputs `a`, `c` and free outputs `b`, `d`. A wiring qualifies when the
/// beta soup alone releases `a->b`, `c->d` and the fan-in soup alone
/// releases `a->d`, `c->b`.
pub fn search_pair_selector(a: &str, b: &str, c: &str, d: &str) -> PairSelectorReport {
    let (la, lb, lc, ld) = (Label::new(a), Label::new(b), Label::new(c), Label::new(d));
    let (l, ap, fi, fo) = (NodeId::new("l"), NodeId::new("a"), NodeId::new("i"), NodeId::new("o"));
    let sources = [
        out(&l, Port::Var),
        out(&ap, Port::Out),
        out(&fo, Port::Left),
        out(&fo, Port::Right),
        Source::Free(la.clone()),
        Source::Free(lc.clone()),
    ];
    let targets = [
        inp(&l, Port::In),
        inp(&ap, Port::Arg),
        inp(&fi, Port::Left),
        inp(&fi, Port::Right),
        Target::Free(lb.clone()),
        Target::Free(ld.clone()),
    ];
    let mut report = PairSelectorReport::default();
    for perm in targets.iter().permutations(targets.len()) {
        report.searched += 1;
        let mut m = Molecule::new();
        m.add_node(l.clone(), NodeKind::Abstraction).unwrap();
        m.add_node(ap.clone(), NodeKind::Application).unwrap();
        m.add_node(fi.clone(), NodeKind::FanIn).unwrap();
        m.add_node(fo.clone(), NodeKind::FanOut).unwrap();
        link(&mut m, out(&l, Port::Out), inp(&ap, Port::Fun));
        link(&mut m, out(&fi, Port::Out), inp(&fo, Port::In));
        for (s, t) in sources.iter().zip(perm) {
            link(&mut m, s.clone(), t.clone());
        }
        let beta_ok = stall(&m, MoveKind::BetaPlus).is_some_and(|x| has_arrow(&x, &la, &lb) && has_arrow(&x, &lc, &ld));
        let phi_ok = stall(&m, MoveKind::FaninPlus).is_some_and(|x| has_arrow(&x, &la, &ld) && has_arrow(&x, &lc, &lb));
        if beta_ok && phi_ok {
            // The two sites are {l, a} and {i, o}: disjoint by construction.
            report.behavioral.push(m);
        }
    }
    report
}

/// A molecule releasing `a->b, c->d` under beta and `a->d, c->b` under
/// fan-in, with the two sites sharing a node. Returns the search result
/// when no such wiring exists.
pub fn build_pair_selector(a: &str, b: &str, c: &str, d: &str) -> Result<Molecule, BuildError> {
    let labels = [a, b, c, d];
    if labels.iter().collect::<BTreeSet<_>>().len() != 4 {
        return Err(BuildError::DuplicateLabel(Label::new(a)));
    }
    let report = search_pair_selector(a, b, c, d);
    report.accepted.into_iter().next().ok_or(BuildError::Unrealizable {
        searched: report.searched,
    })
}
