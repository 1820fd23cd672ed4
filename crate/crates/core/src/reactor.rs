//! Reduction driver: an enzyme soup, a selection strategy, and a trace.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::iso::{canonical_hash, CanonicalForm, Digest};
use crate::molecule::{Label, Molecule, NodeId, Port, PortRef, Source, Target};
use crate::moves::{apply, find_sites, GarbageDelta, GarbageLedger, MoveError, MoveKind, ReactionSite};

pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// FANIN+, BETA+, DISTAPP+, DISTLAM+, COASSOC+, COCOMM, the pruning rules, LOOPGC.
pub const DEFAULT_PRIORITY: [MoveKind; 12] = [
    MoveKind::FaninPlus,
    MoveKind::BetaPlus,
    MoveKind::DistAppPlus,
    MoveKind::DistLamPlus,
    MoveKind::CoAssocPlus,
    MoveKind::CoComm,
    MoveKind::PruneApp,
    MoveKind::PruneLam,
    MoveKind::PruneFi,
    MoveKind::PruneFoLeft,
    MoveKind::PruneFoRight,
    MoveKind::LoopGc,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stock {
    Finite(u64),
    Unbounded,
}

impl Stock {
    pub fn is_empty(self) -> bool {
        self == Stock::Finite(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SoupError {
    #[error("{0} is an oracle and cannot be put in a soup")]
    OracleOnly(MoveKind),
    #[error(transparent)]
    UnknownKind(#[from] crate::moves::UnknownMoveKind),
    #[error("bad enzyme count `{0}`")]
    BadCount(String),
}

/// Available enzymes with their multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnzymeSoup {
    counts: BTreeMap<MoveKind, Stock>,
}

impl EnzymeSoup {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every given kind with unbounded stock.
    pub fn unbounded(kinds: &[MoveKind]) -> Self {
        let mut s = Self::new();
        for k in kinds {
            s.set(*k, Stock::Unbounded).expect("local kind");
        }
        s
    }

    pub fn set(&mut self, kind: MoveKind, stock: Stock) -> Result<(), SoupError> {
        if kind.is_oracle_only() {
            return Err(SoupError::OracleOnly(kind));
        }
        self.counts.insert(kind, stock);
        Ok(())
    }

    /// Builder form of [`EnzymeSoup::set`].
    ///
    /// # Panics
    /// For GLOBAL FAN-OUT.
    pub fn with(mut self, kind: MoveKind, stock: Stock) -> Self {
        self.set(kind, stock).expect("oracle kinds are not soup enzymes");
        self
    }

    pub fn stock(&self, kind: MoveKind) -> Stock {
        self.counts.get(&kind).copied().unwrap_or(Stock::Finite(0))
    }

    /// Kinds with positive stock, in canonical order.
    pub fn active(&self) -> impl Iterator<Item = MoveKind> + '_ {
        self.counts.iter().filter(|(_, s)| !s.is_empty()).map(|(k, _)| *k)
    }

    pub fn is_empty(&self) -> bool {
        self.active().next().is_none()
    }

    fn consume(&mut self, kind: MoveKind) {
        if let Some(Stock::Finite(n)) = self.counts.get_mut(&kind) {
            *n -= 1;
        }
    }
}

/// `BETA+,FANIN+:3` style lists; a kind without a count is unbounded.
impl FromStr for EnzymeSoup {
    type Err = SoupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut soup = EnzymeSoup::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (name, stock) = match item.split_once(':') {
                Some((n, c)) => (
                    n,
                    Stock::Finite(c.parse().map_err(|_| SoupError::BadCount(c.to_string()))?),
                ),
                None => (item, Stock::Unbounded),
            };
            soup.set(name.parse()?, stock)?;
        }
        Ok(soup)
    }
}

/// A site offered to an interactive chooser.
pub type Candidate = ReactionSite;

pub type Chooser<'a> = Box<dyn FnMut(&Molecule, &[Candidate]) -> Option<usize> + 'a>;
pub type Goal<'a> = Box<dyn Fn(&Molecule) -> bool + 'a>;

pub enum Strategy<'a> {
    /// First kind in the order that has stock and a site, then its lowest-index site.
    Priority(Vec<MoveKind>),
    /// Uniform over all (kind, site) pairs of stocked kinds.
    Random(u64),
    /// The callback picks among the candidates; `None` stops the run.
    Interactive(Chooser<'a>),
    /// Breadth-first search for a goal state, then replay of the found path.
    Search { goal: Goal<'a>, bound: SearchBound },
}

impl Strategy<'_> {
    pub fn priority() -> Self {
        Strategy::Priority(DEFAULT_PRIORITY.to_vec())
    }
}

impl fmt::Debug for Strategy<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Priority(o) => f.debug_tuple("Priority").field(o).finish(),
            Strategy::Random(s) => f.debug_tuple("Random").field(s).finish(),
            Strategy::Interactive(_) => f.write_str("Interactive"),
            Strategy::Search { bound, .. } => f.debug_struct("Search").field("bound", bound).finish(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Stalled,
    MaxSteps,
    Goal,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Stalled => "STALLED",
            Status::MaxSteps => "MAX_STEPS",
            Status::Goal => "GOAL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub ordinal: usize,
    pub kind: MoveKind,
    pub nodes: Vec<NodeId>,
    pub arrows: Vec<(Source, Target)>,
    pub garbage: GarbageDelta,
    /// Number of sites per stocked kind just before firing. Not serialized.
    pub available: BTreeMap<MoveKind, usize>,
}

impl StepRecord {
    pub fn site(&self) -> ReactionSite {
        ReactionSite {
            kind: self.kind,
            nodes: self.nodes.clone(),
            arrows: self.arrows.clone(),
            index: 0,
        }
    }

    /// Kinds that had at least one site before this step.
    pub fn available_kinds(&self) -> Vec<MoveKind> {
        self.available
            .iter()
            .filter(|(_, n)| **n > 0)
            .map(|(k, _)| *k)
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    pub status: Option<Status>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn kinds(&self) -> Vec<MoveKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }

    pub fn ledger(&self) -> GarbageLedger {
        let mut l = GarbageLedger::default();
        for s in &self.steps {
            l.record(s.ordinal, s.kind, &s.garbage);
        }
        l
    }
}

fn fmt_end(f: &mut fmt::Formatter<'_>, s: &Source, t: &Target) -> fmt::Result {
    write!(f, "{s}->{t}")
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let nodes: Vec<&str> = s.nodes.iter().map(NodeId::as_str).collect();
            write!(
                f,
                "step={} enzyme={} nodes={} loops+={} pruned+={}",
                s.ordinal,
                s.kind,
                nodes.join(","),
                s.garbage.loops_emitted,
                s.garbage.pruned
            )?;
            if !s.arrows.is_empty() {
                f.write_str(" arrows=")?;
                for (i, (a, b)) in s.arrows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    fmt_end(f, a, b)?;
                }
            }
            writeln!(f)?;
        }
        if let Some(st) = self.status {
            writeln!(f, "status={} steps={}", st.name(), self.steps.len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

fn parse_endpoint(s: &str) -> Option<Result<Label, PortRef>> {
    if let Some(l) = s.strip_prefix('<').and_then(|x| x.strip_suffix('>')) {
        return Some(Ok(Label::new(l)));
    }
    let (id, port) = s.rsplit_once('.')?;
    Some(Err(PortRef::new(id, Port::parse(port)?)))
}

impl FromStr for Trace {
    type Err = TraceParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut trace = Trace::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |m: &str| TraceParseError {
                line: line_no,
                message: m.to_string(),
            };
            if line.trim().is_empty() {
                continue;
            }
            let fields: HashMap<&str, &str> = line.split_whitespace().filter_map(|f| f.split_once('=')).collect();
            if let Some(st) = fields.get("status") {
                trace.status = Some(match *st {
                    "STALLED" => Status::Stalled,
                    "MAX_STEPS" => Status::MaxSteps,
                    "GOAL" => Status::Goal,
                    _ => return Err(err("unknown status")),
                });
                continue;
            }
            let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(&format!("missing `{k}`")));
            let num = |k: &str| -> Result<u64, TraceParseError> {
                get(k)?.parse().map_err(|_| err(&format!("bad number for `{k}`")))
            };
            let kind: MoveKind = get("enzyme")?
                .parse()
                .map_err(|e: crate::moves::UnknownMoveKind| err(&e.to_string()))?;
            let nodes = get("nodes")?
                .split(',')
                .filter(|x| !x.is_empty())
                .map(NodeId::new)
                .collect();
            let mut arrows = Vec::new();
            if let Some(a) = fields.get("arrows") {
                for pair in a.split(',') {
                    let (s, t) = pair.split_once("->").ok_or_else(|| err("bad arrow"))?;
                    let s = match parse_endpoint(s).ok_or_else(|| err("bad arrow source"))? {
                        Ok(l) => Source::Free(l),
                        Err(p) => Source::Out(p),
                    };
                    let t = match parse_endpoint(t).ok_or_else(|| err("bad arrow target"))? {
                        Ok(l) => Target::Free(l),
                        Err(p) => Target::In(p),
                    };
                    arrows.push((s, t));
                }
            }
            trace.steps.push(StepRecord {
                ordinal: num("step")? as usize,
                kind,
                nodes,
                arrows,
                garbage: GarbageDelta {
                    loops_emitted: num("loops+")?,
                    loops_collected: u64::from(kind == MoveKind::LoopGc),
                    pruned: num("pruned+")?,
                },
                available: BTreeMap::new(),
            });
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("replay failed at step {step}: {source}")]
pub struct ReplayError {
    pub step: usize,
    pub source: MoveError,
}

/// Re-applies every recorded site to `initial`.
pub fn replay(initial: &Molecule, trace: &Trace) -> Result<Molecule, ReplayError> {
    let mut m = initial.clone();
    for s in &trace.steps {
        m = apply(&m, &s.site())
            .map_err(|source| ReplayError {
                step: s.ordinal,
                source,
            })?
            .molecule;
    }
    Ok(m)
}

fn candidates(m: &Molecule, soup: &EnzymeSoup) -> (Vec<ReactionSite>, BTreeMap<MoveKind, usize>) {
    let mut all = Vec::new();
    let mut counts = BTreeMap::new();
    for k in soup.active() {
        let sites = find_sites(m, k);
        counts.insert(k, sites.len());
        all.extend(sites);
    }
    (all, counts)
}

/// A molecule under reduction.
pub struct Reactor<'a> {
    molecule: Molecule,
    soup: EnzymeSoup,
    strategy: Strategy<'a>,
    rng: Option<ChaCha8Rng>,
    plan: Option<VecDeque<ReactionSite>>,
    trace: Trace,
    ledger: GarbageLedger,
}

pub enum StepOutcome {
    Fired(StepRecord),
    Stalled,
}

impl<'a> Reactor<'a> {
    pub fn new(molecule: Molecule, soup: EnzymeSoup, strategy: Strategy<'a>) -> Self {
        let rng = match &strategy {
            Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        Reactor {
            molecule,
            soup,
            strategy,
            rng,
            plan: None,
            trace: Trace::default(),
            ledger: GarbageLedger::default(),
        }
    }

    pub fn molecule(&self) -> &Molecule {
        &self.molecule
    }

    pub fn soup(&self) -> &EnzymeSoup {
        &self.soup
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn ledger(&self) -> &GarbageLedger {
        &self.ledger
    }

    pub fn into_parts(self) -> (Molecule, Trace, GarbageLedger) {
        (self.molecule, self.trace, self.ledger)
    }

    fn goal_reached(&self) -> bool {
        match &self.strategy {
            Strategy::Search { goal, .. } => goal(&self.molecule),
            _ => false,
        }
    }

    fn choose(&mut self, cands: &[ReactionSite]) -> Option<ReactionSite> {
        match &mut self.strategy {
            Strategy::Priority(order) => order
                .iter()
                .filter(|k| !self.soup.stock(**k).is_empty())
                .find_map(|k| cands.iter().find(|s| s.kind == *k))
                .cloned(),
            Strategy::Random(_) => {
                if cands.is_empty() {
                    return None;
                }
                let rng = self.rng.as_mut().expect("seeded");
                Some(cands[rng.gen_range(0..cands.len())].clone())
            }
            Strategy::Interactive(chooser) => {
                if cands.is_empty() {
                    return None;
                }
                let i = chooser(&self.molecule, cands)?;
                cands.get(i).cloned()
            }
            Strategy::Search { goal, bound } => {
                if self.plan.is_none() {
                    let kinds: Vec<MoveKind> = self.soup.active().collect();
                    let plan = search_reduce(&self.molecule, |m| goal(m), &kinds, *bound)
                        .map(|t| t.steps.iter().map(StepRecord::site).collect())
                        .unwrap_or_default();
                    self.plan = Some(plan);
                }
                let next = self.plan.as_mut().expect("planned").pop_front()?;
                cands
                    .iter()
                    .find(|s| s.kind == next.kind && s.nodes == next.nodes && s.arrows == next.arrows)
                    .cloned()
            }
        }
    }

    /// Fires one reaction, or reports that none is possible.
    pub fn step(&mut self) -> StepOutcome {
        let (cands, available) = candidates(&self.molecule, &self.soup);
        let Some(site) = self.choose(&cands) else {
            return StepOutcome::Stalled;
        };
        let applied = apply(&self.molecule, &site).expect("candidate sites are fresh");
        self.soup.consume(site.kind);
        let ordinal = self.trace.steps.len() + 1;
        self.ledger.record(ordinal, site.kind, &applied.garbage);
        self.molecule = applied.molecule;
        let rec = StepRecord {
            ordinal,
            kind: site.kind,
            nodes: site.nodes,
            arrows: site.arrows,
            garbage: applied.garbage,
            available,
        };
        self.trace.steps.push(rec.clone());
        StepOutcome::Fired(rec)
    }

    /// Steps until stalled, the goal holds, or `max_steps` reactions fired.
    pub fn run(&mut self, max_steps: usize) -> Status {
        let status = loop {
            if self.goal_reached() {
                break Status::Goal;
            }
            if self.trace.steps.len() >= max_steps {
                break Status::MaxSteps;
            }
            if let StepOutcome::Stalled = self.step() {
                break Status::Stalled;
            }
        };
        self.trace.status = Some(status);
        status
    }
}

/// One reaction on a value; returns the new molecule, soup and record.
pub fn step(m: &Molecule, soup: &EnzymeSoup, strategy: Strategy<'_>) -> (Molecule, EnzymeSoup, Option<StepRecord>) {
    let mut r = Reactor::new(m.clone(), soup.clone(), strategy);
    let rec = match r.step() {
        StepOutcome::Fired(rec) => Some(rec),
        StepOutcome::Stalled => None,
    };
    (r.molecule, r.soup, rec)
}

pub fn run(m: &Molecule, soup: &EnzymeSoup, strategy: Strategy<'_>, max_steps: usize) -> (Molecule, Trace) {
    let mut r = Reactor::new(m.clone(), soup.clone(), strategy);
    r.run(max_steps);
    (r.molecule, r.trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBound {
    pub depth: usize,
    pub max_states: usize,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound {
            depth: 24,
            max_states: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no goal state within depth {depth} ({explored} states explored)")]
pub struct NotFound {
    pub depth: usize,
    pub explored: usize,
}

/// Breadth-first search over molecules reachable with `kinds`, deduplicated
/// up to isomorphism. The returned trace replays from `m`.
pub fn search_reduce(
    m: &Molecule,
    goal: impl Fn(&Molecule) -> bool,
    kinds: &[MoveKind],
    bound: SearchBound,
) -> Result<Trace, NotFound> {
    struct Node {
        molecule: Molecule,
        parent: Option<(usize, ReactionSite, GarbageDelta)>,
        depth: usize,
    }
    let done = |nodes: &[Node], mut i: usize| {
        let mut steps = Vec::new();
        while let Some((p, site, g)) = &nodes[i].parent {
            steps.push((site.clone(), *g));
            i = *p;
        }
        steps.reverse();
        Trace {
            steps: steps
                .into_iter()
                .enumerate()
                .map(|(k, (s, g))| StepRecord {
                    ordinal: k + 1,
                    kind: s.kind,
                    nodes: s.nodes,
                    arrows: s.arrows,
                    garbage: g,
                    available: BTreeMap::new(),
                })
                .collect(),
            status: Some(Status::Goal),
        }
    };
    if goal(m) {
        return Ok(done(
            &[Node {
                molecule: m.clone(),
                parent: None,
                depth: 0,
            }],
            0,
        ));
    }
    let mut nodes = vec![Node {
        molecule: m.clone(),
        parent: None,
        depth: 0,
    }];
    let mut seen: HashMap<Digest, Vec<String>> = HashMap::new();
    let form = CanonicalForm::of(m);
    seen.insert(form.digest(), vec![form.key()]);
    let mut queue = VecDeque::from([0usize]);
    let kinds: Vec<MoveKind> = kinds.iter().copied().filter(|k| !k.is_oracle_only()).collect();
    while let Some(i) = queue.pop_front() {
        if nodes[i].depth >= bound.depth {
            continue;
        }
        for k in &kinds {
            for site in find_sites(&nodes[i].molecule, *k) {
                let applied = apply(&nodes[i].molecule, &site).expect("fresh site");
                let f = CanonicalForm::of(&applied.molecule);
                let key = f.key();
                let bucket = seen.entry(f.digest()).or_default();
                if bucket.contains(&key) {
                    continue;
                }
                bucket.push(key);
                let hit = goal(&applied.molecule);
                nodes.push(Node {
                    molecule: applied.molecule,
                    parent: Some((i, site, applied.garbage)),
                    depth: nodes[i].depth + 1,
                });
                let j = nodes.len() - 1;
                if hit {
                    return Ok(done(&nodes, j));
                }
                if nodes.len() >= bound.max_states {
                    return Err(NotFound {
                        depth: bound.depth,
                        explored: nodes.len(),
                    });
                }
                queue.push_back(j);
            }
        }
    }
    Err(NotFound {
        depth: bound.depth,
        explored: nodes.len(),
    })
}

/// Digests of the final molecules of `trials` seeded random runs.
pub fn confluence_probe(m: &Molecule, soup: &EnzymeSoup, trials: usize, seed: u64) -> BTreeSet<Digest> {
    (0..trials as u64)
        .map(|t| {
            let (out, _) = run(m, soup, Strategy::Random(seed.wrapping_add(t)), DEFAULT_MAX_STEPS);
            canonical_hash(&out)
        })
        .collect()
}
