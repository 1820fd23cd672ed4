//! Named builders for the `build` subcommand.

use ccm_core::combinators::{
    build_booleans, build_combinator, build_locked_zipper, build_pair_selector, build_set, build_zipper,
    ifthenelse_demo, parse_combinator, BuildError, GadgetKind,
};
use ccm_core::{disjoint_union, Label, Molecule};

use crate::Failure;

pub const USAGE: &str = "builders: combinator <expr> | zipper beta|phi|mixed <n> | locked-zipper <n> | \
set beta|phi|mixed <n> | pair-selector | booleans | ifthenelse-demo true|false";

/// `n` pairs named by letters from the n-th down to `A`, then the end pair
/// on the next letter: for 4, pairs D, C, B, A and end E.
pub fn letter_pairs(n: usize) -> (Vec<(Label, Label)>, (Label, Label)) {
    let name = |k: usize| {
        if n < 26 {
            char::from(b'A' + k as u8).to_string()
        } else {
            format!("P{k}")
        }
    };
    let pair = |k: usize| (Label::new(name(k)), Label::new(format!("{}'", name(k))));
    ((0..n).rev().map(pair).collect(), pair(n))
}

fn gadget(word: &str) -> Result<GadgetKind, Failure> {
    match word {
        "beta" => Ok(GadgetKind::Beta),
        "phi" => Ok(GadgetKind::Phi),
        "mixed" => Ok(GadgetKind::Mixed),
        other => Err(Failure::Usage(format!(
            "unknown gadget kind `{other}` (beta, phi or mixed)"
        ))),
    }
}

fn count(word: Option<&String>) -> Result<usize, Failure> {
    word.and_then(|w| w.parse().ok())
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage("expected a positive pair count".into()))
}

fn built(r: Result<Molecule, BuildError>) -> Result<Molecule, Failure> {
    r.map_err(|e| match e {
        BuildError::Unrealizable { .. } => Failure::Refuted(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })
}

fn renamed(m: &Molecule, label: &str) -> Molecule {
    m.relabel(&[(Label::new("out"), Label::new(label))].into())
}

pub fn build(spec: &[String]) -> Result<Molecule, Failure> {
    let (name, args) = spec.split_first().ok_or_else(|| Failure::Usage(USAGE.into()))?;
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(Failure::Usage(format!("`{name}` takes {n} argument(s); {USAGE}")))
        }
    };
    match name.as_str() {
        "combinator" => {
            let text = args.join(" ");
            let e = parse_combinator(&text).map_err(|e| Failure::Usage(format!("combinator: {e}")))?;
            Ok(build_combinator(&e))
        }
        "zipper" => {
            arity(2)?;
            let (pairs, end) = letter_pairs(count(args.get(1))?);
            built(build_zipper(gadget(&args[0])?, &pairs, &end))
        }
        "locked-zipper" => {
            arity(1)?;
            let (pairs, end) = letter_pairs(count(args.first())?);
            built(build_locked_zipper(&pairs, &end))
        }
        "set" => {
            arity(2)?;
            let (pairs, end) = letter_pairs(count(args.get(1))?);
            built(build_set(gadget(&args[0])?, &pairs, &end))
        }
        "pair-selector" => {
            arity(0)?;
            built(build_pair_selector("A", "B", "C", "D"))
        }
        "booleans" => {
            arity(0)?;
            let b = build_booleans();
            let tf = disjoint_union(&renamed(&b.t, "true"), &renamed(&b.f, "false")).expect("distinct labels");
            Ok(disjoint_union(&tf, &renamed(&b.ifthenelse, "ifthenelse")).expect("distinct labels"))
        }
        "ifthenelse-demo" => {
            arity(1)?;
            match args[0].as_str() {
                "true" => Ok(ifthenelse_demo(true)),
                "false" => Ok(ifthenelse_demo(false)),
                other => Err(Failure::Usage(format!("expected true or false, got `{other}`"))),
            }
        }
        other => Err(Failure::Usage(format!("unknown builder `{other}`; {USAGE}"))),
    }
}
