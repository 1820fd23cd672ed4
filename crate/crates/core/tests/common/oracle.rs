//! Brute-force site enumeration: every tuple of distinct nodes is tested
//! against the left-hand side written out as explicit port links.

use std::collections::BTreeSet;

use ccm_core::{Molecule, MoveKind, NodeId, NodeKind, Port, Source, Target};
use itertools::Itertools;

pub type SiteKey = (Vec<NodeId>, Vec<(Source, Target)>);

fn roles(kind: MoveKind) -> Vec<NodeKind> {
    use MoveKind::*;
    use NodeKind::*;
    match kind {
        BetaPlus => vec![Abstraction, Application],
        FaninPlus => vec![FanIn, FanOut],
        CoComm => vec![FanOut],
        CoAssocPlus | CoAssocMinus => vec![FanOut, FanOut],
        DistAppPlus => vec![Application, FanOut],
        DistLamPlus => vec![Abstraction, FanOut],
        DistAppMinus => vec![FanOut, FanOut, Application, Application],
        DistLamMinus => vec![FanOut, Abstraction, Abstraction, FanIn],
        PruneApp => vec![Application, Terminal],
        PruneLam => vec![Abstraction, Terminal, Terminal],
        PruneFi => vec![FanIn, Terminal],
        PruneFoLeft | PruneFoRight => vec![FanOut, Terminal],
        _ => vec![],
    }
}

/// `(from node, out-port, to node, in-port)` by role index.
pub fn pattern(kind: MoveKind) -> Vec<(usize, Port, usize, Port)> {
    use MoveKind::*;
    use Port::*;
    match kind {
        BetaPlus => vec![(0, Out, 1, Fun)],
        FaninPlus => vec![(0, Out, 1, In)],
        CoComm => vec![],
        CoAssocPlus => vec![(0, Left, 1, In)],
        CoAssocMinus => vec![(0, Right, 1, In)],
        DistAppPlus => vec![(0, Out, 1, In)],
        DistLamPlus => vec![(0, Out, 1, In)],
        DistAppMinus => vec![
            (0, Left, 2, Fun),
            (0, Right, 3, Fun),
            (1, Left, 2, Arg),
            (1, Right, 3, Arg),
        ],
        DistLamMinus => vec![
            (0, Left, 1, In),
            (0, Right, 2, In),
            (1, Var, 3, Right),
            (2, Var, 3, Left),
        ],
        PruneApp => vec![(0, Out, 1, In)],
        PruneLam => vec![(0, Out, 1, In), (0, Var, 2, In)],
        PruneFi => vec![(0, Out, 1, In)],
        PruneFoLeft => vec![(0, Left, 1, In)],
        PruneFoRight => vec![(0, Right, 1, In)],
        _ => vec![],
    }
}

pub fn brute_sites(m: &Molecule, kind: MoveKind) -> BTreeSet<SiteKey> {
    let mut found = BTreeSet::new();
    match kind {
        MoveKind::BetaMinus | MoveKind::FaninMinus => {
            let links: Vec<(Source, Target)> = m.links().map(|(s, t)| (s.clone(), t.clone())).collect();
            for x in &links {
                for y in &links {
                    if x != y {
                        found.insert((vec![], vec![x.clone(), y.clone()]));
                    }
                }
            }
        }
        MoveKind::LoopGc => {
            if m.loops() > 0 {
                found.insert((vec![], vec![]));
            }
        }
        MoveKind::Disentangle | MoveKind::GlobalFanout => {}
        _ => {
            let roles = roles(kind);
            let pat = pattern(kind);
            let ids: Vec<&NodeId> = m.nodes().keys().collect();
            for tuple in ids.into_iter().permutations(roles.len()) {
                let kinds_ok = tuple.iter().zip(&roles).all(|(id, k)| m.kind(id) == Some(k));
                let links_ok = pat.iter().all(|(a, pa, b, pb)| {
                    m.target_of(&Source::out(tuple[*a], *pa)) == Some(&Target::input(tuple[*b], *pb))
                });
                if kinds_ok && links_ok {
                    found.insert((tuple.into_iter().cloned().collect(), vec![]));
                }
            }
        }
    }
    found
}

/// Disagreement between engine and oracle on any local kind, if any.
pub fn disagreement(m: &Molecule) -> Option<(MoveKind, BTreeSet<SiteKey>, BTreeSet<SiteKey>)> {
    for kind in MoveKind::ALL {
        let sites = ccm_core::find_sites(m, kind);
        let engine: BTreeSet<SiteKey> = sites.iter().map(|s| (s.nodes.clone(), s.arrows.clone())).collect();
        let indexed = sites.iter().enumerate().all(|(i, s)| s.index == i);
        let oracle = brute_sites(m, kind);
        if engine != oracle || engine.len() != sites.len() || !indexed {
            return Some((kind, engine, oracle));
        }
    }
    None
}
