//! Plain-text instance formats.
//!
//! ```text
//! ugraph <n> <m>          kspm <N> <k> [t]      ksum <N> <k>      mcc <n> <m> <k>
//! <id> <weight>   x n     <x> <y>   x N         <x_1> ... <x_N>   <class_0> ... <class_{n-1}>
//! <u> <v> <prob>  x m                                             <u> <v>   x m
//! ```
//!
//! Numbers are integers, decimals or `a/b` ratios. `#` starts a comment that
//! runs to the end of the line. Tokens may be split across lines freely;
//! the writers put one record per line.

use std::fmt::Write as _;

use crate::baselines::KspmInstance;
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::reductions::{KsumInstance, McColoredGraph};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Graph(UncertainGraph<Rational>),
    Kspm(KspmInstance<Rational>),
    Ksum(KsumInstance),
    Mcc(McColoredGraph),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Graph(_) => "ugraph",
            Instance::Kspm(_) => "kspm",
            Instance::Ksum(_) => "ksum",
            Instance::Mcc(_) => "mcc",
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Instance::Graph(g) => write_ugraph(g),
            Instance::Kspm(i) => write_kspm(i),
            Instance::Ksum(i) => write_ksum(i),
            Instance::Mcc(i) => write_mcc(i),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

struct Tokens<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    last: (usize, usize),
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut toks = Vec::new();
        let mut last = (1, 1);
        for (ln, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("");
            let mut start = None;
            for (i, c) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                match (c.is_whitespace(), start) {
                    (false, None) => start = Some(i),
                    (true, Some(s)) => {
                        toks.push(Tok { text: &body[s..i], line: ln + 1, col: s + 1 });
                        start = None;
                    }
                    _ => {}
                }
            }
            last = (ln + 1, line.len() + 1);
        }
        Tokens { toks, pos: 0, last }
    }

    fn next(&mut self, what: &str) -> Result<Tok<'a>> {
        let t = self.toks.get(self.pos).copied().ok_or_else(|| Error::parse(self.last.0, self.last.1, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn usize(&mut self, what: &str) -> Result<(usize, Tok<'a>)> {
        let t = self.next(what)?;
        let v = t.text.parse().map_err(|_| err(t, format!("expected {what}, found {:?}", t.text)))?;
        Ok((v, t))
    }

    fn i64(&mut self, what: &str) -> Result<i64> {
        let t = self.next(what)?;
        t.text.parse().map_err(|_| err(t, format!("expected integer {what}, found {:?}", t.text)))
    }

    fn number(&mut self, what: &str) -> Result<(Rational, Tok<'a>)> {
        let t = self.next(what)?;
        let v = parse_rational(t.text).map_err(|_| err(t, format!("expected number for {what}, found {:?}", t.text)))?;
        Ok((v, t))
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Some(t) => Err(err(t, format!("trailing token {:?}", t.text))),
            None => Ok(()),
        }
    }
}

fn err(t: Tok<'_>, msg: impl Into<String>) -> Error {
    Error::parse(t.line, t.col, msg)
}

/// Dispatches on the header keyword.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let toks = Tokens::new(text);
    let head = toks.peek().ok_or_else(|| Error::parse(1, 1, "empty input"))?;
    match head.text {
        "ugraph" => parse_ugraph(text).map(Instance::Graph),
        "kspm" => parse_kspm(text).map(Instance::Kspm),
        "ksum" => parse_ksum(text).map(Instance::Ksum),
        "mcc" => parse_mcc(text).map(Instance::Mcc),
        other => Err(err(head, format!("unknown header {other:?}; expected ugraph, kspm, ksum or mcc"))),
    }
}

fn header(toks: &mut Tokens<'_>, kw: &str) -> Result<()> {
    let t = toks.next("header")?;
    if t.text != kw {
        return Err(err(t, format!("expected header `{kw}`, found {:?}", t.text)));
    }
    Ok(())
}

pub fn parse_ugraph(text: &str) -> Result<UncertainGraph<Rational>> {
    let mut toks = Tokens::new(text);
    header(&mut toks, "ugraph")?;
    let (n, _) = toks.usize("vertex count")?;
    let (m, _) = toks.usize("edge count")?;
    let mut weights: Vec<Option<Rational>> = vec![None; n];
    for _ in 0..n {
        let (id, t) = toks.usize("vertex id")?;
        if id >= n {
            return Err(err(t, format!("vertex id {id} outside 0..{n}")));
        }
        if weights[id].is_some() {
            return Err(err(t, format!("vertex {id} listed twice")));
        }
        let (w, t) = toks.number("weight")?;
        if w < Rational::zero() {
            return Err(err(t, format!("negative weight {}", t.text)));
        }
        weights[id] = Some(w);
    }
    let weights: Vec<Rational> = weights.into_iter().map(|w| w.expect("all ids seen")).collect();
    let mut g = UncertainGraph::new(weights)?;
    for _ in 0..m {
        let (u, tu) = toks.usize("edge endpoint")?;
        let (v, _) = toks.usize("edge endpoint")?;
        let (p, tp) = toks.number("probability")?;
        if p < Rational::zero() || p > Rational::one() {
            return Err(err(tp, format!("probability {} outside [0,1]", tp.text)));
        }
        g.add_edge(u, v, p).map_err(|e| err(tu, e.to_string()))?;
    }
    toks.finish()?;
    Ok(g)
}

pub fn write_ugraph(g: &UncertainGraph<Rational>) -> String {
    let mut s = format!("ugraph {} {}\n", g.n(), g.m());
    for (v, w) in g.weights().iter().enumerate() {
        let _ = writeln!(s, "{v} {}", format_rational(w));
    }
    for (u, v, p) in g.edges() {
        let _ = writeln!(s, "{u} {v} {}", format_rational(p));
    }
    s
}

/// Optimisation-mode k-SPM: signs are not restricted here.
pub fn parse_kspm(text: &str) -> Result<KspmInstance<Rational>> {
    let mut toks = Tokens::new(text);
    header(&mut toks, "kspm")?;
    let (n, _) = toks.usize("pair count")?;
    let (k, tk) = toks.usize("k")?;
    // an optional threshold sits on the header line
    let t = match toks.peek() {
        Some(t) if t.line == tk.line => Some(toks.number("threshold")?.0),
        _ => None,
    };
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let x = toks.number("x")?.0;
        let y = toks.number("y")?.0;
        pairs.push((x, y));
    }
    toks.finish()?;
    KspmInstance::optimization(pairs, k, t).map_err(|e| err(tk, e.to_string()))
}

pub fn write_kspm(inst: &KspmInstance<Rational>) -> String {
    let mut s = format!("kspm {} {}", inst.len(), inst.k);
    if let Some(t) = &inst.t {
        let _ = write!(s, " {}", format_rational(t));
    }
    s.push('\n');
    for (x, y) in &inst.pairs {
        let _ = writeln!(s, "{} {}", format_rational(x), format_rational(y));
    }
    s
}

pub fn parse_ksum(text: &str) -> Result<KsumInstance> {
    let mut toks = Tokens::new(text);
    header(&mut toks, "ksum")?;
    let (n, _) = toks.usize("N")?;
    let (k, tk) = toks.usize("k")?;
    let xs = (0..n).map(|_| toks.i64("element")).collect::<Result<Vec<_>>>()?;
    toks.finish()?;
    KsumInstance::new(xs, k).map_err(|e| err(tk, e.to_string()))
}

pub fn write_ksum(inst: &KsumInstance) -> String {
    let xs: Vec<String> = inst.xs.iter().map(|x| x.to_string()).collect();
    format!("ksum {} {}\n{}\n", inst.xs.len(), inst.k, xs.join(" "))
}

pub fn parse_mcc(text: &str) -> Result<McColoredGraph> {
    let mut toks = Tokens::new(text);
    header(&mut toks, "mcc")?;
    let (n, _) = toks.usize("vertex count")?;
    let (m, _) = toks.usize("edge count")?;
    let (k, tk) = toks.usize("class count")?;
    if k == 0 {
        return Err(err(tk, "need at least one class"));
    }
    let mut class_of = Vec::with_capacity(n);
    for _ in 0..n {
        let (c, t) = toks.usize("class")?;
        if c >= k {
            return Err(err(t, format!("class {c} outside 0..{k}")));
        }
        class_of.push(c);
    }
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..m {
        let (u, tu) = toks.usize("edge endpoint")?;
        let (v, _) = toks.usize("edge endpoint")?;
        if u >= n || v >= n || u == v {
            return Err(err(tu, format!("bad edge ({u},{v})")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(err(tu, format!("duplicate edge ({u},{v})")));
        }
        edges.push((u, v));
    }
    toks.finish()?;
    McColoredGraph::new(k, class_of, edges)
}

pub fn write_mcc(g: &McColoredGraph) -> String {
    let classes: Vec<String> = g.class_of.iter().map(|c| c.to_string()).collect();
    let mut s = format!("mcc {} {} {}\n{}\n", g.class_of.len(), g.edges.len(), g.k, classes.join(" "));
    for (u, v) in &g.edges {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    const P3: &str = "ugraph 3 2\n0 1\n1 1\n2 1\n0 1 1/2\n1 2 1/2\n";

    #[test]
    fn path_round_trip() {
        let g = parse_ugraph(P3).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(write_ugraph(&g), P3);
    }

    #[test]
    fn decimals_and_comments() {
        let g = parse_ugraph("# demo\nugraph 2 1 # header\n1 2.5\n0 0.25\n0 1 0.125\n").unwrap();
        assert_eq!(g.weight(1), &rat(5, 2));
        assert_eq!(g.edge_prob(0, 1), Some(&rat(1, 8)));
    }

    #[test]
    fn probability_out_of_range() {
        let e = parse_ugraph("ugraph 2 1\n0 1\n1 1\n0 1 3/2\n").unwrap_err();
        assert_eq!(e, Error::parse(4, 5, "probability 3/2 outside [0,1]"));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_ugraph("ugraph 2 1\n0 1\n1 x\n0 1 1\n") {
            Err(Error::Parse { line: 3, col: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_ugraph("ugraph 2 2\n0 1\n1 1\n0 1 1\n1 0 1\n") {
            Err(Error::Parse { line: 5, col: 1, msg }) => assert!(msg.contains("duplicate")),
            other => panic!("{other:?}"),
        }
        match parse_ugraph("ugraph 2 1\n0 1\n1 1\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_instance("graph 1 0"), Err(Error::Parse { line: 1, col: 1, .. })));
        assert!(parse_ugraph("ugraph 1 0\n0 1\n5\n").is_err());
    }

    #[test]
    fn ksum_header() {
        match parse_instance("ksum 3 3\n-1 0 1\n").unwrap() {
            Instance::Ksum(i) => assert_eq!(i, KsumInstance::new(vec![-1, 0, 1], 3).unwrap()),
            other => panic!("{other:?}"),
        }
        assert!(parse_ksum("ksum 2 3\n1 2\n").is_err());
    }

    #[test]
    fn kspm_round_trip() {
        let text = "kspm 2 1 -1/2\n1 2\n3/4 -1\n";
        let i = parse_kspm(text).unwrap();
        assert_eq!(i.t, Some(rat(-1, 2)));
        assert_eq!(write_kspm(&i), text);
        let j = parse_kspm("kspm 1 1\n2 3\n").unwrap();
        assert_eq!(j.t, None);
    }

    #[test]
    fn mcc_round_trip() {
        let text = "mcc 4 1 2\n0 0 1 1\n0 2\n";
        let g = parse_mcc(text).unwrap();
        assert_eq!(g.cross_edge_count(), 1);
        assert_eq!(write_mcc(&g), text);
        assert!(parse_mcc("mcc 2 0 2\n0 2\n").is_err());
    }
}
