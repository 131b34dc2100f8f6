use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use probdom::formats::{parse_instance, Instance};
use probdom::gen::{random_graph, random_kspm, random_mcc, random_partial_ktree, random_tree, DyadicRange};
use probdom::reductions::{reduce_kspm_to_tree, reduce_ksum_to_kspm, reduce_mcc_to_unipbds};
use probdom::scalar::{format_rational, parse_rational, rational_to_f64};
use probdom::tree_dp::{solve_tree_exact_bounded, solve_tree_ptas};
use probdom::tree_spm::{solve_kspm_colorcoding, solve_tree_exact_general};
use probdom::twdp::{parse_pace, solve_unipbds_treewidth, uniform_p, write_pace};
use probdom::{brute_force_kspm, brute_force_pbds, coverage, greedy_pbds, Guarantee, KspmInstance, Rational, Scalar, SolutionReport, UncertainGraph};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::record::{decimal, instance_hash, round12, ResultRecord};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Solver(String),
    Check(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn solver_err(e: probdom::Error) -> CliError {
    match e {
        probdom::Error::Parse { .. } => CliError::Parse(e.to_string()),
        _ => CliError::Solver(e.to_string()),
    }
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> CliResult<Instance> {
    parse_instance(&read_file(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn number(text: &str, what: &str) -> CliResult<Rational> {
    parse_rational(text).map_err(|_| CliError::Usage(format!("{what}: not a number: {text:?}")))
}

/// `"lo,hi"` (or a single value) as a dyadic range.
pub fn range(text: &str, bits: u32, what: &str) -> CliResult<DyadicRange> {
    let (lo, hi) = text.split_once(',').unwrap_or((text, text));
    DyadicRange::new(number(lo, what)?, number(hi, what)?, bits).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Tree,
    Graph,
    Ktree,
    Kspm,
    Mcc,
}

#[derive(Debug, Clone)]
pub struct GenOpts {
    pub kind: GenKind,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub prob_range: String,
    pub weight_range: String,
    pub x_range: String,
    pub y_range: String,
    pub bits: u32,
    pub density: f64,
    pub width: usize,
}

pub fn gen(o: &GenOpts) -> CliResult<Instance> {
    if o.n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let probs = || range(&o.prob_range, o.bits, "--prob-range");
    let weights = || range(&o.weight_range, o.bits, "--weight-range");
    let bad = |e: probdom::Error| CliError::Usage(e.to_string());
    Ok(match o.kind {
        GenKind::Tree => Instance::Graph(random_tree(o.n, o.seed, &probs()?, &weights()?).map_err(bad)?),
        GenKind::Graph => Instance::Graph(random_graph(o.n, o.density, o.seed, &probs()?, &weights()?).map_err(bad)?),
        GenKind::Ktree => Instance::Graph(random_partial_ktree(o.n, o.width, o.density, o.seed, &probs()?, &weights()?).map_err(bad)?),
        GenKind::Kspm => {
            let xs = range(&o.x_range, o.bits, "--x-range")?;
            let ys = range(&o.y_range, o.bits, "--y-range")?;
            Instance::Kspm(random_kspm(o.n, o.k, o.seed, &xs, &ys).map_err(bad)?)
        }
        GenKind::Mcc => Instance::Mcc(random_mcc(o.k, o.n, o.m, o.seed).map_err(bad)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Brute,
    Greedy,
    TreePtas,
    TreeExactUniform,
    TreeExactSpm,
    Twdp,
    Apex,
    KspmBrute,
    KspmCc,
}

impl Algo {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Debug, Clone)]
pub struct SolveOpts {
    pub algo: Algo,
    pub k: Option<usize>,
    pub eps: Option<String>,
    pub seed: u64,
    pub p: Option<String>,
    pub exact: bool,
    pub td: Option<PathBuf>,
    pub width_threshold: Option<usize>,
}

pub fn solve(inst: &Instance, o: &SolveOpts) -> CliResult<ResultRecord> {
    match inst {
        Instance::Graph(g) => {
            let k = o.k.ok_or_else(|| CliError::Usage(format!("--k is required for {}", o.algo.name())))?;
            if o.exact {
                solve_graph::<Rational>(g, k, o).map(|r| ResultRecord::from_report(&r, inst))
            } else {
                solve_graph::<f64>(g, k, o).map(|r| ResultRecord::from_report(&r, inst))
            }
        }
        Instance::Kspm(ki) => {
            let ki = match o.k {
                Some(k) => KspmInstance::optimization(ki.pairs.clone(), k, ki.t.clone()).map_err(|e| CliError::Usage(e.to_string()))?,
                None => ki.clone(),
            };
            if o.exact {
                solve_kspm::<Rational>(&ki, o).map(|r| ResultRecord::from_report(&r, inst))
            } else {
                solve_kspm::<f64>(&ki, o).map(|r| ResultRecord::from_report(&r, inst))
            }
        }
        other => Err(CliError::Usage(format!("cannot solve a {} instance; reduce it first", other.kind()))),
    }
}

fn solve_graph<T: Scalar>(g: &UncertainGraph<Rational>, k: usize, o: &SolveOpts) -> CliResult<SolutionReport<T>> {
    let gt: UncertainGraph<T> = g.map_scalar(T::from_rational);
    let p = o.p.as_deref().map(|s| number(s, "--p").map(|r| T::from_rational(&r))).transpose()?;
    let tree = || {
        gt.as_rooted_tree(0)
            .map_err(|e| CliError::Usage(format!("{} requires a tree instance: {e}", o.algo.name())))
    };
    let report = match o.algo {
        Algo::Brute => brute_force_pbds(&gt, k),
        Algo::Greedy => greedy_pbds(&gt, k),
        Algo::TreePtas => {
            let eps = T::from_rational(&number(o.eps.as_deref().unwrap_or("0.1"), "--eps")?);
            if eps <= T::zero() || eps >= T::one() {
                return Err(CliError::Usage("--eps must lie in (0, 1)".into()));
            }
            solve_tree_ptas(&tree()?, k, &eps).map_err(solver_err)?
        }
        Algo::TreeExactUniform => solve_tree_exact_bounded(&tree()?, k).map_err(solver_err)?,
        Algo::TreeExactSpm => solve_tree_exact_general(&tree()?, k).map_err(solver_err)?,
        Algo::Twdp => {
            uniform_p(&gt, p.as_ref()).map_err(|e| CliError::Usage(format!("twdp requires uniform edge probabilities: {e}")))?;
            let td = match &o.td {
                Some(path) => {
                    let (td, n) = parse_pace(&read_file(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                    if n != g.n() {
                        return Err(CliError::Usage(format!("decomposition covers {n} vertices, instance has {}", g.n())));
                    }
                    Some(td)
                }
                None => None,
            };
            solve_unipbds_treewidth(&gt, p.as_ref(), k, td.as_ref()).map_err(solver_err)?
        }
        Algo::Apex => solve_apex_checked(&gt, p.as_ref(), k, o.width_threshold)?,
        Algo::KspmBrute | Algo::KspmCc => return Err(CliError::Usage(format!("{} needs a kspm instance", o.algo.name()))),
    };
    Ok(report)
}

fn solve_apex_checked<T: Scalar>(g: &UncertainGraph<T>, p: Option<&T>, k: usize, thr: Option<usize>) -> CliResult<SolutionReport<T>> {
    uniform_p(g, p).map_err(|e| CliError::Usage(format!("apex requires uniform edge probabilities: {e}")))?;
    probdom::apex::solve_apex(g, p, k, thr).map_err(solver_err)
}

fn solve_kspm<T: Scalar>(inst: &KspmInstance<Rational>, o: &SolveOpts) -> CliResult<SolutionReport<T>> {
    let it = inst.map_scalar(T::from_rational);
    match o.algo {
        Algo::KspmBrute => {
            let start = std::time::Instant::now();
            let (value, set) = brute_force_kspm(&it).map_err(solver_err)?;
            Ok(SolutionReport::new("kspm-brute", it.k, set, value).with_guarantee(Guarantee::Exact).with_time(start.elapsed()))
        }
        Algo::KspmCc => solve_kspm_colorcoding(&it, o.seed).map_err(solver_err),
        a => Err(CliError::Usage(format!("{} needs a ugraph instance", a.name()))),
    }
}

/// Recomputes the record's value from the instance.
pub fn check(rec: &ResultRecord, inst: &Instance) -> CliResult<Value> {
    let hash = instance_hash(inst);
    if rec.instance_hash != hash {
        return Err(CliError::Check(format!("instance hash {} does not match the record's {}", hash, rec.instance_hash)));
    }
    let mut sorted = rec.set.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != rec.set.len() {
        return Err(CliError::Check("set contains a repeated element".into()));
    }
    let (actual, extra) = match inst {
        Instance::Graph(g) => {
            if rec.set.len() > rec.k {
                return Err(CliError::Check(format!("set has {} vertices but k = {}", rec.set.len(), rec.k)));
            }
            if let Some(v) = rec.set.iter().find(|&&v| v >= g.n()) {
                return Err(CliError::Check(format!("vertex {v} is outside the instance")));
            }
            (coverage(g, &rec.set).map_err(solver_err)?, json!({}))
        }
        Instance::Kspm(ki) => {
            if rec.set.len() != rec.k || rec.set.iter().any(|&i| i >= ki.len()) {
                return Err(CliError::Check(format!("set {:?} is not a size-{} index set", rec.set, rec.k)));
            }
            let v = ki.objective(&rec.set);
            let meets = ki.t.as_ref().map(|t| v >= *t);
            (v, json!({ "meets_threshold": meets }))
        }
        other => return Err(CliError::Usage(format!("records refer to ugraph or kspm instances, not {}", other.kind()))),
    };
    let af = rational_to_f64(&actual);
    if (rec.value - af).abs() > 1e-9 * 1f64.max(af.abs()) {
        return Err(CliError::Check(format!("reported value {} but recomputed {} ({})", rec.value, decimal(&actual), format_rational(&actual))));
    }
    if let Some(s) = &rec.value_exact {
        let reported = parse_rational(s).map_err(|_| CliError::Check(format!("bad exact value {s:?}")))?;
        if reported != actual {
            return Err(CliError::Check(format!("reported value {s} but recomputed {}", format_rational(&actual))));
        }
    }
    let mut out = json!({ "ok": true, "algorithm": rec.algorithm, "value": round12(&actual), "value_exact": format_rational(&actual) });
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceFrom {
    Ksum,
    Kspm,
    Mcc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceTo {
    Kspm,
    Tree,
    Unipbds,
}

#[derive(Debug, Clone)]
pub struct ReduceOpts {
    pub from: ReduceFrom,
    pub to: ReduceTo,
    pub p: Option<String>,
    pub f: Option<usize>,
    pub certificate: Option<Vec<usize>>,
}

pub struct Reduced {
    pub target: Instance,
    /// Path decomposition of the target, when the reduction builds one.
    pub td: Option<String>,
    pub report: Value,
}

fn threshold_json(t: &Rational) -> Value {
    json!({ "value": rational_to_f64(t), "exact": format_rational(t) })
}

pub fn reduce(inst: &Instance, o: &ReduceOpts) -> CliResult<Reduced> {
    let bad = |e: probdom::Error| match e {
        probdom::Error::Certificate(_) | probdom::Error::Validation(_) => CliError::Usage(e.to_string()),
        _ => CliError::Solver(e.to_string()),
    };
    let cert = o.certificate.as_deref();
    match (o.from, o.to, inst) {
        (ReduceFrom::Ksum, ReduceTo::Kspm | ReduceTo::Tree, Instance::Ksum(ks)) => {
            let red = reduce_ksum_to_kspm(ks).map_err(|e| CliError::Usage(e.to_string()))?;
            let base = json!({ "l": red.l, "q": red.q, "lambda": format_rational(&red.lambda) });
            if o.to == ReduceTo::Kspm {
                let map: Vec<usize> = (0..ks.xs.len()).collect();
                let mapped = cert.map(|c| red.map_certificate(c));
                let report = json!({
                    "from": "ksum", "to": "kspm", "k": ks.k,
                    "threshold": threshold_json(&Rational::zero()),
                    "certificate_map": map, "certificate": mapped, "params": base,
                });
                return Ok(Reduced { target: Instance::Kspm(red.instance), td: None, report });
            }
            let tree = reduce_kspm_to_tree(&red.instance).map_err(bad)?;
            tree_report(tree, "ksum", cert, base)
        }
        (ReduceFrom::Kspm, ReduceTo::Tree, Instance::Kspm(ki)) => {
            let ki = KspmInstance::new(ki.pairs.clone(), ki.k, ki.t.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
            let tree = reduce_kspm_to_tree(&ki).map_err(bad)?;
            tree_report(tree, "kspm", cert, json!({}))
        }
        (ReduceFrom::Mcc, ReduceTo::Unipbds, Instance::Mcc(mg)) => {
            let p = number(o.p.as_deref().unwrap_or("1/2"), "--p")?;
            let red = reduce_mcc_to_unipbds(mg, &p, o.f).map_err(|e| CliError::Usage(e.to_string()))?;
            let gadgets: Vec<Value> = red
                .vertex_blocks
                .iter()
                .enumerate()
                .flat_map(|(i, blk)| {
                    let classes = red.source.padded().classes();
                    blk.gadgets
                        .iter()
                        .zip(classes[i].clone())
                        .map(|(gd, v)| json!({ "vertex": v, "select": gd.selection(true) }))
                        .collect::<Vec<_>>()
                })
                .collect();
            let (mapped, value) = match cert {
                Some(c) => {
                    let s = red.canonical_clique_solution(c).map_err(bad)?;
                    let v = coverage(&red.graph, &s).map_err(solver_err)?;
                    (Some(s), Some(threshold_json(&v)))
                }
                None => (None, None),
            };
            let td = write_pace(&red.build_gadget_path_decomposition(), red.graph.n());
            let report = json!({
                "from": "mcc", "to": "unipbds", "k": red.k_prime,
                "threshold": threshold_json(&red.t_prime),
                "certificate_map": gadgets, "certificate": mapped, "certificate_value": value,
                "params": { "p": format_rational(&red.p), "f": red.f, "n": red.n, "m": red.m },
            });
            Ok(Reduced { target: Instance::Graph(red.graph), td: Some(td), report })
        }
        (f, t, i) => Err(CliError::Usage(format!(
            "unsupported reduction {:?} -> {:?} on a {} instance; valid chains are ksum->kspm, ksum->tree, kspm->tree, mcc->unipbds",
            f,
            t,
            i.kind()
        ))),
    }
}

fn tree_report(tree: probdom::reductions::TreeReduction, from: &str, cert: Option<&[usize]>, params: Value) -> CliResult<Reduced> {
    if let Some(w) = &tree.warning {
        eprintln!("warning: {w}");
    }
    let (mapped, value) = match cert {
        Some(c) => {
            if c.iter().any(|&i| i >= tree.b.len()) {
                return Err(CliError::Usage(format!("certificate {c:?} references a missing element")));
            }
            let s = tree.map_certificate(c);
            let v = coverage(&tree.graph, &s).map_err(solver_err)?;
            (Some(s), Some(threshold_json(&v)))
        }
        None => (None, None),
    };
    let report = json!({
        "from": from, "to": "tree", "k": tree.k,
        "threshold": threshold_json(&tree.threshold),
        "certificate_map": tree.b, "certificate": mapped, "certificate_value": value,
        "warning": tree.warning, "params": params,
    });
    Ok(Reduced { target: Instance::Graph(tree.graph), td: None, report })
}

/// One manifest row: `<instance> <algo> [k] [key=value ...]`.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: PathBuf,
    pub label: String,
    pub opts: SolveOpts,
}

pub fn parse_manifest(text: &str, base: &Path, seed: u64) -> CliResult<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let at = |m: String| CliError::Parse(format!("manifest line {}: {m}", ln + 1));
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(at("expected `<instance> <algo> [k] [key=value ...]`".into()));
        }
        let algo = Algo::from_str(toks[1], true).map_err(|_| at(format!("unknown algorithm {:?}", toks[1])))?;
        let mut opts = SolveOpts { algo, k: None, eps: None, seed, p: None, exact: false, td: None, width_threshold: None };
        for t in &toks[2..] {
            match t.split_once('=') {
                None => opts.k = Some(t.parse().map_err(|_| at(format!("bad k {t:?}")))?),
                Some(("k", v)) => opts.k = Some(v.parse().map_err(|_| at(format!("bad k {v:?}")))?),
                Some(("eps", v)) => opts.eps = Some(v.to_string()),
                Some(("seed", v)) => opts.seed = v.parse().map_err(|_| at(format!("bad seed {v:?}")))?,
                Some(("p", v)) => opts.p = Some(v.to_string()),
                Some(("exact", v)) => opts.exact = v.parse().map_err(|_| at(format!("bad flag {v:?}")))?,
                Some(("td", v)) => opts.td = Some(base.join(v)),
                Some(("width_threshold", v)) => opts.width_threshold = Some(v.parse().map_err(|_| at(format!("bad threshold {v:?}")))?),
                Some((key, _)) => return Err(at(format!("unknown option {key:?}"))),
            }
        }
        rows.push(BenchRow { instance: base.join(toks[0]), label: toks[0].to_string(), opts });
    }
    Ok(rows)
}

/// Runs rows in parallel; output keeps manifest order.
pub fn bench(rows: &[BenchRow]) -> CliResult<String> {
    let results: Vec<CliResult<[String; 6]>> = rows
        .par_iter()
        .map(|row| {
            let inst = load_instance(&row.instance)?;
            let n = match &inst {
                Instance::Graph(g) => g.n(),
                Instance::Kspm(k) => k.len(),
                other => return Err(CliError::Usage(format!("cannot bench a {} instance", other.kind()))),
            };
            let rec = solve(&inst, &row.opts)?;
            Ok([row.opts.algo.name(), row.label.clone(), n.to_string(), rec.k.to_string(), format!("{:?}", rec.value), format!("{:.3}", rec.wall_time_ms)])
        })
        .collect();
    let mut table = vec![["algo", "instance", "n", "k", "value", "time_ms"].map(String::from)];
    for r in results {
        table.push(r?);
    }
    let widths: Vec<usize> = (0..6).map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    Ok(out)
}
