//! DIMACS max-flow and diffusion text formats. Vertices are 1-based in files
//! and 0-based in memory.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{build_graph, FlowInstance, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("missing source or sink")]
    MissingSourceOrSink,
    #[error("declared {declared} arcs, found {found}")]
    ArcCountMismatch { declared: usize, found: usize },
    #[error("total source {source_total} exceeds total sink {sink_total}")]
    NotDiffusion { source_total: i64, sink_total: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminals {
    St { s: usize, t: usize },
    Diffusion { source: Vec<i64>, sink: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub name: String,
    pub n: usize,
    pub arcs: Vec<(usize, usize, i64)>,
    pub terminals: Terminals,
}

impl InstanceFile {
    /// s-t files get Δ_s = ∇_t = Σ caps + 1, which no flow can exhaust.
    pub fn instance(&self) -> Result<FlowInstance, GraphError> {
        let (g, cap) = build_graph(self.n, &self.arcs)?;
        match &self.terminals {
            Terminals::St { s, t } => {
                let big = cap.iter().sum::<i64>() + 1;
                Ok(FlowInstance::st(g, cap, *s, *t, big))
            }
            Terminals::Diffusion { source, sink } => FlowInstance::new(g, cap, source.clone(), sink.clone()),
        }
    }

    pub fn to_text(&self) -> String {
        match &self.terminals {
            Terminals::St { .. } => emit_dimacs(self),
            Terminals::Diffusion { .. } => emit_diffusion(self),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, FormatError> {
    let diff = text
        .lines()
        .map(str::trim)
        .find(|l| l.starts_with('p'))
        .is_some_and(|l| l.split_whitespace().nth(1) == Some("diff"));
    if diff {
        parse_diffusion(text)
    } else {
        parse_dimacs(text)
    }
}

fn perr(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        reason: reason.into(),
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, FormatError> {
    tok.parse().map_err(|_| perr(line, format!("bad {what} `{tok}`")))
}

fn vertex(tok: &str, n: usize, line: usize) -> Result<usize, FormatError> {
    let v: usize = num(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(perr(line, format!("vertex {v} out of range 1..={n}")));
    }
    Ok(v - 1)
}

struct Header {
    n: usize,
    m: usize,
}

fn header(toks: &[&str], kind: &str, line: usize, seen: &mut Option<Header>) -> Result<(), FormatError> {
    if seen.is_some() {
        return Err(perr(line, "second problem line"));
    }
    match toks {
        ["p", k, n, m] if *k == kind => {
            *seen = Some(Header {
                n: num(n, line, "vertex count")?,
                m: num(m, line, "arc count")?,
            });
            Ok(())
        }
        _ => Err(perr(line, format!("expected `p {kind} <n> <m>`"))),
    }
}

fn comment_name(raw: &str) -> Option<String> {
    raw.trim().strip_prefix("c name ").map(|s| s.trim().to_string())
}

pub fn parse_dimacs(text: &str) -> Result<InstanceFile, FormatError> {
    let mut head: Option<Header> = None;
    let mut name = String::new();
    let mut s = None;
    let mut t = None;
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(&first) = toks.first() else { continue };
        match first {
            "c" => {
                if let Some(nm) = comment_name(raw) {
                    name = nm;
                }
            }
            "p" => header(&toks, "max", line, &mut head)?,
            "n" => {
                let h = head.as_ref().ok_or_else(|| perr(line, "node line before problem line"))?;
                match toks.as_slice() {
                    ["n", v, "s"] => s = Some(vertex(v, h.n, line)?),
                    ["n", v, "t"] => t = Some(vertex(v, h.n, line)?),
                    _ => return Err(perr(line, "expected `n <v> s|t`")),
                }
            }
            "a" => {
                let h = head.as_ref().ok_or_else(|| perr(line, "arc before problem line"))?;
                let ["a", u, v, c] = toks.as_slice() else {
                    return Err(perr(line, "expected `a <u> <v> <cap>`"));
                };
                let cap: i64 = num(c, line, "capacity")?;
                if cap < 0 {
                    return Err(perr(line, "negative capacity"));
                }
                arcs.push((vertex(u, h.n, line)?, vertex(v, h.n, line)?, cap));
            }
            _ => return Err(perr(line, format!("unknown line type `{first}`"))),
        }
    }
    let h = head.ok_or_else(|| perr(0, "no problem line"))?;
    let (Some(s), Some(t)) = (s, t) else {
        return Err(FormatError::MissingSourceOrSink);
    };
    if s == t {
        return Err(FormatError::MissingSourceOrSink);
    }
    if arcs.len() != h.m {
        return Err(FormatError::ArcCountMismatch {
            declared: h.m,
            found: arcs.len(),
        });
    }
    build_graph(h.n, &arcs)?;
    Ok(InstanceFile {
        name,
        n: h.n,
        arcs,
        terminals: Terminals::St { s, t },
    })
}

pub fn emit_dimacs(f: &InstanceFile) -> String {
    let Terminals::St { s, t } = f.terminals else {
        panic!("DIMACS output needs an s-t instance");
    };
    let mut out = String::new();
    if !f.name.is_empty() {
        let _ = writeln!(out, "c name {}", f.name);
    }
    let _ = writeln!(out, "p max {} {}", f.n, f.arcs.len());
    let _ = writeln!(out, "n {} s", s + 1);
    let _ = writeln!(out, "n {} t", t + 1);
    for &(u, v, c) in &f.arcs {
        let _ = writeln!(out, "a {} {} {}", u + 1, v + 1, c);
    }
    out
}

pub fn parse_diffusion(text: &str) -> Result<InstanceFile, FormatError> {
    let mut head: Option<Header> = None;
    let mut name = String::new();
    let mut arcs = Vec::new();
    let mut source = Vec::new();
    let mut sink = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(&first) = toks.first() else { continue };
        if first == "c" {
            if let Some(nm) = comment_name(raw) {
                name = nm;
            }
            continue;
        }
        if first == "p" {
            header(&toks, "diff", line, &mut head)?;
            let n = head.as_ref().unwrap().n;
            source = vec![0; n];
            sink = vec![0; n];
            continue;
        }
        let h = head.as_ref().ok_or_else(|| perr(line, "data before problem line"))?;
        match toks.as_slice() {
            ["a", u, v, c] => {
                let cap: i64 = num(c, line, "capacity")?;
                if cap < 0 {
                    return Err(perr(line, "negative capacity"));
                }
                arcs.push((vertex(u, h.n, line)?, vertex(v, h.n, line)?, cap));
            }
            ["src", v, x] | ["snk", v, x] => {
                let v = vertex(v, h.n, line)?;
                let x: i64 = num(x, line, "amount")?;
                if x < 0 {
                    return Err(perr(line, "negative amount"));
                }
                if first == "src" {
                    source[v] += x;
                } else {
                    sink[v] += x;
                }
            }
            _ => return Err(perr(line, format!("unrecognized line `{}`", raw.trim()))),
        }
    }
    let h = head.ok_or_else(|| perr(0, "no problem line"))?;
    if arcs.len() != h.m {
        return Err(FormatError::ArcCountMismatch {
            declared: h.m,
            found: arcs.len(),
        });
    }
    let source_total: i64 = source.iter().sum();
    let sink_total: i64 = sink.iter().sum();
    if source_total > sink_total {
        return Err(FormatError::NotDiffusion {
            source_total,
            sink_total,
        });
    }
    build_graph(h.n, &arcs)?;
    Ok(InstanceFile {
        name,
        n: h.n,
        arcs,
        terminals: Terminals::Diffusion { source, sink },
    })
}

pub fn emit_diffusion(f: &InstanceFile) -> String {
    let Terminals::Diffusion { source, sink } = &f.terminals else {
        panic!("diffusion output needs a diffusion instance");
    };
    let mut out = String::new();
    if !f.name.is_empty() {
        let _ = writeln!(out, "c name {}", f.name);
    }
    let _ = writeln!(out, "p diff {} {}", f.n, f.arcs.len());
    for &(u, v, c) in &f.arcs {
        let _ = writeln!(out, "a {} {} {}", u + 1, v + 1, c);
    }
    for (v, &x) in source.iter().enumerate() {
        if x > 0 {
            let _ = writeln!(out, "src {} {}", v + 1, x);
        }
    }
    for (v, &x) in sink.iter().enumerate() {
        if x > 0 {
            let _ = writeln!(out, "snk {} {}", v + 1, x);
        }
    }
    out
}
