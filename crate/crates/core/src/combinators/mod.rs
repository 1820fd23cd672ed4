//! Named molecules: combinators, booleans, zippers, locks, sets, and the
//! multiplier family of checks.

mod check;
mod gadgets;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::molecule::{Label, Molecule, NodeId, NodeKind, Port, Source, Target};

pub use check::{
    is_comultiplier, is_multiplier, is_multiplier_cached, is_propagator, multiplier_host, two_copies, CheckError,
    MultiplierCache, MultiplierCertificate, MULTIPLIER_KINDS,
};
pub use gadgets::{
    build_double_lock, build_locked_zipper, build_pair_selector, build_set, build_zipper, search_pair_selector,
    BuildError, GadgetKind, PairSelectorReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    B,
    C,
    K,
    W,
    S,
    I,
}

impl Base {
    pub fn symbol(self) -> char {
        match self {
            Base::B => 'B',
            Base::C => 'C',
            Base::K => 'K',
            Base::W => 'W',
            Base::S => 'S',
            Base::I => 'I',
        }
    }

    fn from_symbol(c: char) -> Option<Base> {
        Some(match c {
            'B' => Base::B,
            'C' => Base::C,
            'K' => Base::K,
            'W' => Base::W,
            'S' => Base::S,
            'I' => Base::I,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CombinatorExpr {
    Base(Base),
    App(Box<CombinatorExpr>, Box<CombinatorExpr>),
}

impl CombinatorExpr {
    pub fn app(f: CombinatorExpr, x: CombinatorExpr) -> CombinatorExpr {
        CombinatorExpr::App(Box::new(f), Box::new(x))
    }

    pub fn depth(&self) -> usize {
        match self {
            CombinatorExpr::Base(_) => 0,
            CombinatorExpr::App(f, x) => 1 + f.depth().max(x.depth()),
        }
    }
}

impl From<Base> for CombinatorExpr {
    fn from(b: Base) -> Self {
        CombinatorExpr::Base(b)
    }
}

impl fmt::Display for CombinatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombinatorExpr::Base(b) => write!(f, "{}", b.symbol()),
            CombinatorExpr::App(l, r) => match **r {
                CombinatorExpr::App(..) => write!(f, "{l} ({r})"),
                CombinatorExpr::Base(_) => write!(f, "{l} {r}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ExprParseError {
    pub column: usize,
    pub message: String,
}

/// Left-associative juxtaposition with parentheses.
pub fn parse_combinator(text: &str) -> Result<CombinatorExpr, ExprParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let e = parse_seq(&chars, &mut pos, 0)?;
    Ok(e)
}

fn parse_seq(chars: &[char], pos: &mut usize, depth: usize) -> Result<CombinatorExpr, ExprParseError> {
    let err = |at: usize, m: &str| ExprParseError {
        column: at + 1,
        message: m.to_string(),
    };
    let mut acc: Option<CombinatorExpr> = None;
    while *pos < chars.len() {
        let c = chars[*pos];
        let item = if c.is_whitespace() {
            *pos += 1;
            continue;
        } else if c == '(' {
            let open = *pos;
            *pos += 1;
            let inner = parse_seq(chars, pos, depth + 1)?;
            if chars.get(*pos) != Some(&')') {
                return Err(err(open, "unclosed `(`"));
            }
            *pos += 1;
            inner
        } else if c == ')' {
            if depth == 0 {
                return Err(err(*pos, "unexpected `)`"));
            }
            break;
        } else if let Some(b) = Base::from_symbol(c) {
            *pos += 1;
            CombinatorExpr::Base(b)
        } else {
            return Err(err(*pos, &format!("unexpected `{c}`")));
        };
        acc = Some(match acc {
            None => item,
            Some(f) => CombinatorExpr::app(f, item),
        });
    }
    acc.ok_or_else(|| err(*pos, "expected a combinator"))
}

impl FromStr for CombinatorExpr {
    type Err = ExprParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_combinator(s)
    }
}

fn link(m: &mut Molecule, s: Source, t: Target) {
    m.connect(s, t).expect("builder wiring is one-to-one");
}

fn lam(m: &mut Molecule) -> NodeId {
    m.add_fresh(NodeKind::Abstraction)
}

fn out(id: &NodeId, p: Port) -> Source {
    Source::out(id, p)
}

fn inp(id: &NodeId, p: Port) -> Target {
    Target::input(id, p)
}

/// Application node on two sources; returns its out-port.
fn app_of(m: &mut Molecule, f: Source, x: Source) -> Source {
    let a = m.add_fresh(NodeKind::Application);
    link(m, f, inp(&a, Port::Fun));
    link(m, x, inp(&a, Port::Arg));
    out(&a, Port::Out)
}

/// Nested abstractions `λv1. … λvn. body`. `body` receives the variable
/// sources and returns the body's source.
fn lambdas(m: &mut Molecule, n: usize, body: impl FnOnce(&mut Molecule, Vec<Source>) -> Source) -> Source {
    let ls: Vec<NodeId> = (0..n).map(|_| lam(m)).collect();
    let vars = ls.iter().map(|l| out(l, Port::Var)).collect();
    let b = body(m, vars);
    link(m, b, inp(&ls[n - 1], Port::In));
    for k in (0..n - 1).rev() {
        link(m, out(&ls[k + 1], Port::Out), inp(&ls[k], Port::In));
    }
    out(&ls[0], Port::Out)
}

fn terminal(m: &mut Molecule, s: Source) {
    let t = m.add_fresh(NodeKind::Terminal);
    link(m, s, inp(&t, Port::In));
}

fn fanout(m: &mut Molecule, s: Source) -> (Source, Source) {
    let f = m.add_fresh(NodeKind::FanOut);
    link(m, s, inp(&f, Port::In));
    (out(&f, Port::Left), out(&f, Port::Right))
}

fn emit_base(m: &mut Molecule, b: Base) -> Source {
    match b {
        // λx.x
        Base::I => lambdas(m, 1, |_, v| v[0].clone()),
        // λx.λy.x
        Base::K => lambdas(m, 2, |m, v| {
            terminal(m, v[1].clone());
            v[0].clone()
        }),
        // λx.λy.λz.x(yz)
        Base::B => lambdas(m, 3, |m, v| {
            let yz = app_of(m, v[1].clone(), v[2].clone());
            app_of(m, v[0].clone(), yz)
        }),
        // λx.λy.λz.(xz)y
        Base::C => lambdas(m, 3, |m, v| {
            let xz = app_of(m, v[0].clone(), v[2].clone());
            app_of(m, xz, v[1].clone())
        }),
        // λx.λy.(xy)y
        Base::W => lambdas(m, 2, |m, v| {
            let (y1, y2) = fanout(m, v[1].clone());
            let xy = app_of(m, v[0].clone(), y1);
            app_of(m, xy, y2)
        }),
        // λx.λy.λz.(xz)(yz)
        Base::S => lambdas(m, 3, |m, v| {
            let (z1, z2) = fanout(m, v[2].clone());
            let xz = app_of(m, v[0].clone(), z1);
            let yz = app_of(m, v[1].clone(), z2);
            app_of(m, xz, yz)
        }),
    }
}

fn emit(m: &mut Molecule, e: &CombinatorExpr) -> Source {
    match e {
        CombinatorExpr::Base(b) => emit_base(m, *b),
        CombinatorExpr::App(f, x) => {
            let f = emit(m, f);
            let x = emit(m, x);
            app_of(m, f, x)
        }
    }
}

fn close(mut m: Molecule, s: Source, label: &str) -> Molecule {
    link(&mut m, s, Target::free(label));
    m
}

/// The molecule of a combinator expression, with one free out `out`.
pub fn build_combinator(e: &CombinatorExpr) -> Molecule {
    let mut m = Molecule::new();
    let s = emit(&mut m, e);
    close(m, s, "out")
}

fn boolean(value: bool) -> Molecule {
    let mut m = Molecule::new();
    let s = lambdas(&mut m, 2, |m, v| {
        let (keep, drop) = if value { (0, 1) } else { (1, 0) };
        terminal(m, v[drop].clone());
        v[keep].clone()
    });
    close(m, s, "out")
}

/// λp.λa.λb.((p a) b)
fn emit_ifthenelse(m: &mut Molecule) -> Source {
    lambdas(m, 3, |m, v| {
        let pa = app_of(m, v[0].clone(), v[1].clone());
        app_of(m, pa, v[2].clone())
    })
}

pub struct Booleans {
    pub t: Molecule,
    pub f: Molecule,
    pub ifthenelse: Molecule,
}

pub fn build_booleans() -> Booleans {
    let mut ite = Molecule::new();
    let s = emit_ifthenelse(&mut ite);
    Booleans {
        t: boolean(true),
        f: boolean(false),
        ifthenelse: close(ite, s, "out"),
    }
}

fn inert(m: &mut Molecule, name: &str) -> Source {
    let id = m
        .add_node(name, NodeKind::other(name, 0, 1))
        .expect("inert ids are unique");
    out(&id, Port::OutN(1))
}

/// `((IFTHENELSE c) A) B` where `A` and `B` are inert one-output nodes.
pub fn ifthenelse_demo(condition: bool) -> Molecule {
    let mut m = Molecule::new();
    let a = inert(&mut m, "A");
    let b = inert(&mut m, "B");
    let ite = emit_ifthenelse(&mut m);
    let c = lambdas(&mut m, 2, |m, v| {
        let (keep, drop) = if condition { (0, 1) } else { (1, 0) };
        terminal(m, v[drop].clone());
        v[keep].clone()
    });
    let ic = app_of(&mut m, ite, c);
    let ica = app_of(&mut m, ic, a);
    let s = app_of(&mut m, ica, b);
    close(m, s, "out")
}

/// Expected normal form of [`ifthenelse_demo`]: the chosen branch on `out`,
/// the other one terminated.
pub fn ifthenelse_expected(condition: bool) -> Molecule {
    let mut m = Molecule::new();
    let a = inert(&mut m, "A");
    let b = inert(&mut m, "B");
    let (kept, dropped) = if condition { (a, b) } else { (b, a) };
    terminal(&mut m, dropped);
    close(m, kept, "out")
}

/// Relabels free labels with a closure over their names.
pub(crate) fn rename_labels(m: &Molecule, f: impl Fn(&str) -> String) -> Molecule {
    let map = m
        .free_labels()
        .into_iter()
        .map(|l| {
            let new = Label::new(f(l.as_str()));
            (l, new)
        })
        .collect();
    m.relabel(&map)
}
