//! Line-based molecule files.
//!
//! ```text
//! # a beta redex
//! node l LAM
//! node a APP
//! edge l.out -> a.fun
//! free in l.in as x
//! free out l.var as y
//! free in a.arg as z
//! free out a.out as w
//! ```
//!
//! A free arrow with no node at either end is written `arrow <label> -> <label>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::molecule::{Label, Molecule, NodeId, NodeKind, Port, PortRef, Source, Target, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown node kind `{0}`")]
    UnknownKind(String),
    #[error("node `{0}` declared twice")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` has no port `{1}`")]
    UnknownPort(String, String),
    #[error("{0} is an {1}-port here")]
    Orientation(String, &'static str),
    #[error("port {0} is already connected")]
    DuplicatePort(String),
    #[error("free label `{0}` used twice")]
    DuplicateLabel(String),
    #[error("port {0} is not connected")]
    Dangling(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok {
                    text: &line[s..i],
                    col: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok {
            text: &line[s..],
            col: s + 1,
        });
    }
    out
}

fn parse_kind(s: &str) -> Option<NodeKind> {
    Some(match s {
        "APP" => NodeKind::Application,
        "LAM" => NodeKind::Abstraction,
        "FO" => NodeKind::FanOut,
        "FI" => NodeKind::FanIn,
        "T" => NodeKind::Terminal,
        _ => {
            let rest = s.strip_prefix("OTHER:")?;
            let mut parts = rest.rsplitn(3, ':');
            let outputs = parts.next()?.parse().ok()?;
            let inputs = parts.next()?.parse().ok()?;
            let name = parts.next()?;
            if name.is_empty() {
                return None;
            }
            NodeKind::other(name, inputs, outputs)
        }
    })
}

enum Dir {
    In,
    Out,
}

struct Parser {
    m: Molecule,
    /// Line of each node declaration, for dangling-port reports.
    decl: BTreeMap<NodeId, usize>,
    line: usize,
}

impl Parser {
    fn err(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: col,
            kind,
        }
    }

    fn port_ref(&self, tok: &Tok<'_>, dir: Dir) -> Result<PortRef, ParseError> {
        let (id, port) = tok.text.rsplit_once('.').ok_or_else(|| {
            self.err(
                tok.col,
                ParseErrorKind::Syntax(format!("expected <id>.<port>, got `{}`", tok.text)),
            )
        })?;
        let node = NodeId::new(id);
        let kind = self
            .m
            .kind(&node)
            .ok_or_else(|| self.err(tok.col, ParseErrorKind::UnknownNode(id.to_string())))?;
        let unknown = || {
            self.err(
                tok.col + id.len() + 1,
                ParseErrorKind::UnknownPort(id.to_string(), port.to_string()),
            )
        };
        let p = Port::parse(port).ok_or_else(unknown)?;
        let (ok, other, want) = match dir {
            Dir::In => (kind.has_in_port(p), kind.has_out_port(p), "out"),
            Dir::Out => (kind.has_out_port(p), kind.has_in_port(p), "in"),
        };
        if !ok {
            if other {
                return Err(self.err(tok.col, ParseErrorKind::Orientation(tok.text.to_string(), want)));
            }
            return Err(unknown());
        }
        Ok(PortRef::new(node, p))
    }

    fn link(&mut self, s: Source, t: Target, s_col: usize, t_col: usize) -> Result<(), ParseError> {
        if self.m.target_of(&s).is_some() {
            return Err(self.err(s_col, self.occupied(&s.to_string(), &s)));
        }
        if self.m.source_of(&t).is_some() {
            return Err(self.err(t_col, occupied_t(&t)));
        }
        self.m.connect(s, t).expect("checked occupancy");
        Ok(())
    }

    fn occupied(&self, text: &str, s: &Source) -> ParseErrorKind {
        match s {
            Source::Free(l) => ParseErrorKind::DuplicateLabel(l.to_string()),
            Source::Out(_) => ParseErrorKind::DuplicatePort(text.to_string()),
        }
    }

    fn label_taken(&self, l: &Label) -> bool {
        self.m.target_of(&Source::Free(l.clone())).is_some() || self.m.source_of(&Target::Free(l.clone())).is_some()
    }

    fn line(&mut self, toks: &[Tok<'_>]) -> Result<(), ParseError> {
        let syntax = |p: &Self, col: usize, msg: &str| p.err(col, ParseErrorKind::Syntax(msg.to_string()));
        let end_col = toks.last().map_or(1, |t| t.col + t.text.len());
        let at = |i: usize| toks.get(i).map_or(end_col, |t| t.col);
        match toks[0].text {
            "node" => {
                let [_, id, kind] = toks else {
                    return Err(syntax(self, at(3), "expected `node <id> <kind>`"));
                };
                if id.text.contains('.') {
                    return Err(syntax(self, id.col, "node ids may not contain `.`"));
                }
                let k = parse_kind(kind.text)
                    .ok_or_else(|| self.err(kind.col, ParseErrorKind::UnknownKind(kind.text.to_string())))?;
                let nid = NodeId::new(id.text);
                if self.m.kind(&nid).is_some() {
                    return Err(self.err(id.col, ParseErrorKind::DuplicateNode(id.text.to_string())));
                }
                self.m.add_node(nid.clone(), k).expect("fresh id");
                self.decl.insert(nid, self.line);
            }
            "edge" => {
                let [_, a, arrow, b] = toks else {
                    return Err(syntax(self, at(4), "expected `edge <id>.<port> -> <id>.<port>`"));
                };
                if arrow.text != "->" {
                    return Err(syntax(self, arrow.col, "expected `->`"));
                }
                let s = self.port_ref(a, Dir::Out)?;
                let t = self.port_ref(b, Dir::In)?;
                self.link(Source::Out(s), Target::In(t), a.col, b.col)?;
            }
            "free" => {
                let [_, dir, p, as_, label] = toks else {
                    return Err(syntax(self, at(5), "expected `free in|out <id>.<port> as <label>`"));
                };
                if as_.text != "as" {
                    return Err(syntax(self, as_.col, "expected `as`"));
                }
                let l = Label::new(label.text);
                if self.label_taken(&l) {
                    return Err(self.err(label.col, ParseErrorKind::DuplicateLabel(label.text.to_string())));
                }
                match dir.text {
                    "in" => {
                        let t = self.port_ref(p, Dir::In)?;
                        self.link(Source::Free(l), Target::In(t), label.col, p.col)?;
                    }
                    "out" => {
                        let s = self.port_ref(p, Dir::Out)?;
                        self.link(Source::Out(s), Target::Free(l), p.col, label.col)?;
                    }
                    _ => return Err(syntax(self, dir.col, "expected `in` or `out`")),
                }
            }
            "arrow" => {
                let [_, a, arrow, b] = toks else {
                    return Err(syntax(self, at(4), "expected `arrow <label> -> <label>`"));
                };
                if arrow.text != "->" {
                    return Err(syntax(self, arrow.col, "expected `->`"));
                }
                let (la, lb) = (Label::new(a.text), Label::new(b.text));
                for (l, t) in [(&la, a), (&lb, b)] {
                    if self.label_taken(l) {
                        return Err(self.err(t.col, ParseErrorKind::DuplicateLabel(t.text.to_string())));
                    }
                }
                if la == lb {
                    return Err(self.err(b.col, ParseErrorKind::DuplicateLabel(b.text.to_string())));
                }
                self.m
                    .connect(Source::Free(la), Target::Free(lb))
                    .expect("labels are fresh");
            }
            "loops" => {
                let [_, n] = toks else {
                    return Err(syntax(self, at(2), "expected `loops <n>`"));
                };
                let n: u64 = n.text.parse().map_err(|_| syntax(self, n.col, "expected a count"))?;
                self.m.add_loops(n);
            }
            other => return Err(syntax(self, toks[0].col, &format!("unknown directive `{other}`"))),
        }
        Ok(())
    }
}

fn occupied_t(t: &Target) -> ParseErrorKind {
    match t {
        Target::Free(l) => ParseErrorKind::DuplicateLabel(l.to_string()),
        Target::In(p) => ParseErrorKind::DuplicatePort(p.to_string()),
    }
}

/// Parses a molecule file. The result is always a valid molecule.
pub fn parse_molecule(text: &str) -> Result<Molecule, ParseError> {
    let mut p = Parser {
        m: Molecule::new(),
        decl: BTreeMap::new(),
        line: 0,
    };
    for (i, raw) in text.lines().enumerate() {
        p.line = i + 1;
        let content = raw.split_once('#').map_or(raw, |(a, _)| a);
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        p.line(&toks)?;
    }
    // Occupancy, orientation and labels were enforced line by line; only
    // unconnected ports remain to be reported.
    if let Some(v) = p.m.validate().violations.into_iter().next() {
        let (line, kind) = match &v {
            Violation::DanglingPort(r) => (p.decl[&r.node], ParseErrorKind::Dangling(r.to_string())),
            other => unreachable!("rejected while parsing: {other}"),
        };
        return Err(ParseError { line, column: 1, kind });
    }
    Ok(p.m)
}

/// Deterministic text: nodes by id, then links in source order, then loops.
pub fn print_molecule(m: &Molecule) -> String {
    let mut s = String::new();
    for (id, k) in m.nodes() {
        let _ = writeln!(s, "node {id} {}", k.tag());
    }
    let mut free = String::new();
    let mut arrows = String::new();
    for (src, tgt) in m.links() {
        match (src, tgt) {
            (Source::Out(a), Target::In(b)) => {
                let _ = writeln!(s, "edge {a} -> {b}");
            }
            (Source::Free(l), Target::In(b)) => {
                let _ = writeln!(free, "free in {b} as {l}");
            }
            (Source::Out(a), Target::Free(l)) => {
                let _ = writeln!(free, "free out {a} as {l}");
            }
            (Source::Free(a), Target::Free(b)) => {
                let _ = writeln!(arrows, "arrow {a} -> {b}");
            }
        }
    }
    s.push_str(&free);
    s.push_str(&arrows);
    if m.loops() > 0 {
        let _ = writeln!(s, "loops {}", m.loops());
    }
    s
}
