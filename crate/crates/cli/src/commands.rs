use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use ccm_core::combinators::{
    build_locked_zipper, build_set, build_zipper, ifthenelse_demo, ifthenelse_expected, is_comultiplier, is_multiplier,
    is_propagator, search_pair_selector, CheckError, GadgetKind,
};
use ccm_core::io::{export_dot as dot, parse_molecule, print_molecule};
use ccm_core::reactor::{EnzymeSoup, Reactor, SearchBound, Status, Strategy, Trace, DEFAULT_MAX_STEPS};
use ccm_core::{find_sites, is_isomorphic, Molecule, MoveKind, ReactionSite};

use crate::builders::{self, letter_pairs};
use crate::Failure;

pub enum Check {
    Multiplier,
    Comultiplier,
    Propagator,
}

pub enum Demo {
    Zipper,
    LockedZipper,
    Set,
    Pair,
    IfThenElse(bool),
}

fn read_molecule(path: &Path) -> Result<Molecule, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_molecule(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn soup(list: &str) -> Result<EnzymeSoup, Failure> {
    list.parse().map_err(|e| Failure::Usage(format!("--enzymes: {e}")))
}

fn site_line(i: usize, s: &ReactionSite) -> String {
    let mut line = format!("[{i}] {}", s.kind);
    if !s.nodes.is_empty() {
        let nodes: Vec<&str> = s.nodes.iter().map(|n| n.as_str()).collect();
        line.push_str(&format!(" nodes={}", nodes.join(",")));
    }
    if !s.arrows.is_empty() {
        let arrows: Vec<String> = s.arrows.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        line.push_str(&format!(" arrows={}", arrows.join(",")));
    }
    line
}

fn plural(n: usize, what: &str) -> String {
    format!("{n} {what}{}", if n == 1 { "" } else { "s" })
}

pub fn build(spec: &[String], output: Option<&Path>) -> Result<(), Failure> {
    let m = builders::build(spec)?;
    write_or_print(output, &print_molecule(&m))
}

pub fn sites(path: &Path, enzyme: &str) -> Result<(), Failure> {
    let kind: MoveKind = enzyme.parse().map_err(|e| Failure::Usage(format!("--enzyme: {e}")))?;
    let m = read_molecule(path)?;
    let sites = find_sites(&m, kind);
    println!("{}", plural(sites.len(), "site"));
    for s in &sites {
        println!("{}", site_line(s.index, s));
    }
    Ok(())
}

fn summary(trace: &Trace) {
    if let Some(st) = trace.status {
        eprintln!("status={} steps={}", st.name(), trace.len());
    }
}

pub fn reduce(
    path: &Path,
    enzymes: &str,
    seed: Option<u64>,
    max_steps: usize,
    trace_path: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let m = read_molecule(path)?;
    let strategy = match seed {
        Some(s) => Strategy::Random(s),
        None => Strategy::priority(),
    };
    let mut r = Reactor::new(m, soup(enzymes)?, strategy);
    r.run(max_steps);
    let (m, trace, _) = r.into_parts();
    if let Some(t) = trace_path {
        fs::write(t, trace.to_string()).map_err(|e| Failure::Input(format!("{}: {e}", t.display())))?;
    }
    summary(&trace);
    write_or_print(output, &print_molecule(&m))
}

pub fn step(path: &Path, enzymes: &str) -> Result<(), Failure> {
    let m = read_molecule(path)?;
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    let chooser = Box::new(move |m: &Molecule, cands: &[ReactionSite]| -> Option<usize> {
        let mut out = io::stdout().lock();
        let _ = write!(out, "{}", print_molecule(m));
        for (i, s) in cands.iter().enumerate() {
            let _ = writeln!(out, "{}", site_line(i, s));
        }
        loop {
            let _ = write!(out, "choose> ");
            let _ = out.flush();
            let line = lines.next()?.ok()?;
            let line = line.trim();
            if line == "q" || line == "quit" {
                return None;
            }
            match line.parse::<usize>() {
                Ok(i) if i < cands.len() => return Some(i),
                _ => {
                    let _ = writeln!(out, "expected a site number below {}, or q", cands.len());
                }
            }
        }
    });
    let mut r = Reactor::new(m, soup(enzymes)?, Strategy::Interactive(chooser));
    r.run(DEFAULT_MAX_STEPS);
    let (m, trace, _) = r.into_parts();
    println!();
    print!("{trace}");
    print!("{}", print_molecule(&m));
    Ok(())
}

pub fn check(what: Check, path: &Path, depth: Option<usize>) -> Result<(), Failure> {
    let m = read_molecule(path)?;
    let mut bound = SearchBound::default();
    if let Some(d) = depth {
        bound.depth = d;
    }
    let cert = match what {
        Check::Multiplier => is_multiplier(&m, bound),
        Check::Comultiplier => is_comultiplier(&m, bound),
        Check::Propagator => is_propagator(&m, bound),
    }
    .map_err(|e| match e {
        CheckError::Precondition(msg) => Failure::Input(msg),
        refuted => Failure::Refuted(refuted.to_string()),
    })?;
    if !cert.is_valid() {
        return Err(Failure::Refuted("certificate failed verification".into()));
    }
    println!("certificate: {}", plural(cert.trace.len(), "step"));
    print!("{}", cert.trace);
    println!("# result");
    print!("{}", print_molecule(&cert.result));
    Ok(())
}

fn run_demo(m: Molecule, soup: EnzymeSoup) -> (Molecule, Trace) {
    let mut r = Reactor::new(m, soup, Strategy::priority());
    r.run(DEFAULT_MAX_STEPS);
    let (m, trace, _) = r.into_parts();
    print!("{trace}");
    println!("# final");
    print!("{}", print_molecule(&m));
    (m, trace)
}

fn released_all(m: &Molecule) -> Result<(), Failure> {
    if m.node_count() == 0 {
        Ok(())
    } else {
        Err(Failure::Stalled(format!(
            "stalled with {} left",
            plural(m.node_count(), "node")
        )))
    }
}

pub fn demo(which: Demo) -> Result<(), Failure> {
    let beta = || EnzymeSoup::unbounded(&[MoveKind::BetaPlus]);
    let (pairs, end) = letter_pairs(4);
    match which {
        Demo::Zipper => {
            let z = build_zipper(GadgetKind::Beta, &pairs, &end).expect("fixed labels");
            let (m, _) = run_demo(z, beta());
            released_all(&m)
        }
        Demo::LockedZipper => {
            let z = build_locked_zipper(&pairs, &end).expect("fixed labels");
            println!(
                "# BETA+ alone: {}",
                plural(find_sites(&z, MoveKind::BetaPlus).len(), "site")
            );
            let soup = EnzymeSoup::unbounded(&[MoveKind::FaninPlus, MoveKind::BetaPlus, MoveKind::LoopGc]);
            let (m, _) = run_demo(z, soup);
            released_all(&m)
        }
        Demo::Set => {
            let s = build_set(GadgetKind::Beta, &pairs, &end).expect("fixed labels");
            println!("# {}", plural(find_sites(&s, MoveKind::BetaPlus).len(), "BETA+ site"));
            let (m, _) = run_demo(s, beta());
            released_all(&m)
        }
        Demo::Pair => {
            let report = search_pair_selector("A", "B", "C", "D");
            println!(
                "# wirings searched: {}, with the required behavior: {}, also sharing a node: {}",
                report.searched,
                report.behavioral.len(),
                report.accepted.len()
            );
            Err(Failure::Refuted("no pair selector exists for these gadgets".into()))
        }
        Demo::IfThenElse(cond) => {
            let (m, trace) = run_demo(ifthenelse_demo(cond), beta());
            if trace.status == Some(Status::Stalled) && is_isomorphic(&m, &ifthenelse_expected(cond)).matched {
                Ok(())
            } else {
                Err(Failure::Stalled("stalled before the expected branch".into()))
            }
        }
    }
}

pub fn export_dot(path: &Path) -> Result<(), Failure> {
    let m = read_molecule(path)?;
    print!("{}", dot(&m));
    Ok(())
}
