//! Checks on single move applications: node-count table, boundary labels,
//! locality, and undoing by the inverse kind.

use std::collections::BTreeSet;

use ccm_core::{apply, canonical_hash, find_sites, Applied, Molecule, MoveKind, NodeId, ReactionSite};
use rand::seq::SliceRandom;
use rand::Rng;

/// Node-count change per kind, written out independently of the engine.
pub fn expected_delta(kind: MoveKind) -> i64 {
    use MoveKind::*;
    match kind {
        BetaPlus | FaninPlus => -2,
        BetaMinus | FaninMinus => 2,
        DistAppPlus | DistLamPlus => 2,
        DistAppMinus | DistLamMinus => -2,
        CoComm | CoAssocPlus | CoAssocMinus => 0,
        PruneApp | PruneFi => 0,
        PruneLam | PruneFoLeft | PruneFoRight => -2,
        LoopGc => 0,
        Disentangle | GlobalFanout => unreachable!("not a local move"),
    }
}

/// Node-count delta, free-label multiset, and locality of one application.
pub fn check_application(before: &Molecule, site: &ReactionSite, applied: &Applied) -> Result<(), String> {
    let after = &applied.molecule;
    let delta = after.node_count() as i64 - before.node_count() as i64;
    if delta != expected_delta(site.kind) {
        return Err(format!("{}: node delta {delta}", site.kind));
    }
    if after.free_labels() != before.free_labels() {
        return Err(format!("{}: free labels changed", site.kind));
    }
    if !after.validate().is_ok() {
        return Err(format!("{}: invalid result", site.kind));
    }
    let foot = site.footprint();
    let created: BTreeSet<&NodeId> = applied.created.iter().collect();
    for (id, k) in before.nodes() {
        if !foot.contains(id) && after.kind(id) != Some(k) {
            return Err(format!("{}: node {id} outside the site changed", site.kind));
        }
    }
    for id in after.nodes().keys() {
        if !before.nodes().contains_key(id) && !created.contains(id) {
            return Err(format!("{}: node {id} appeared unannounced", site.kind));
        }
    }
    let touches = |n: Option<&NodeId>| n.is_some_and(|n| foot.contains(n));
    for (s, t) in before.links() {
        let bound = site.arrows.iter().any(|(a, b)| a == s && b == t);
        if !bound && !touches(s.node()) && !touches(t.node()) && after.target_of(s) != Some(t) {
            return Err(format!("{}: link {s} -> {t} outside the site changed", site.kind));
        }
    }
    Ok(())
}

/// True when the site nodes are wired to each other beyond the left-hand
/// side. Such applications fuse chains or close loops and have no inverse.
pub fn self_fed(m: &Molecule, site: &ReactionSite) -> bool {
    let foot = site.footprint();
    let inside = |n: Option<&NodeId>| n.is_some_and(|n| foot.contains(n));
    let internal = m.links().filter(|(s, t)| inside(s.node()) && inside(t.node())).count();
    internal > super::oracle::pattern(site.kind).len()
}

/// Looks for a site of the inverse kind that restores `before` up to
/// isomorphism, loops emitted on the way aside.
pub fn undo(before: &Molecule, site: &ReactionSite, applied: &Applied) -> Result<(), String> {
    let inv = site
        .kind
        .inverse()
        .ok_or_else(|| format!("{} has no inverse", site.kind))?;
    let after = &applied.molecule;
    let want = canonical_hash(before);
    let fresh_link = |s: &ReactionSite| s.arrows.iter().all(|(a, b)| before.target_of(a) != Some(b));
    for cand in find_sites(after, inv) {
        if inv.binds_links() && !fresh_link(&cand) {
            continue;
        }
        let back = apply(after, &cand).map_err(|e| e.to_string())?;
        let mut m = back.molecule;
        let emitted = applied.garbage.loops_emitted + back.garbage.loops_emitted;
        if m.loops() != before.loops() + emitted {
            continue;
        }
        m.set_loops(before.loops());
        if canonical_hash(&m) == want {
            return Ok(());
        }
    }
    Err(format!("{}: no {inv} site restores the molecule", site.kind))
}

/// A random molecule with at least one site of `kind`. Kinds whose pattern
/// is rare are reached by firing their inverse on a random molecule first.
pub fn molecule_with_site(rng: &mut impl Rng, kind: MoveKind, max_nodes: usize) -> Option<Molecule> {
    for _ in 0..5000 {
        let m = super::random_molecule(rng, max_nodes);
        if !find_sites(&m, kind).is_empty() {
            return Some(m);
        }
        if let Some(inv) = kind.inverse() {
            if let Some(s) = find_sites(&m, inv).choose(rng) {
                let next = apply(&m, s).ok()?.molecule;
                if !find_sites(&next, kind).is_empty() {
                    return Some(next);
                }
            }
        }
    }
    None
}
