mod commands;
mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Algo, CliError, CliResult, GenKind, GenOpts, ReduceFrom, ReduceOpts, ReduceTo, SolveOpts};
use record::ResultRecord;

/// Budgeted domination on uncertain graphs.
#[derive(Parser)]
#[command(name = "probdom", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve an instance and print a JSON result record.
    Solve(SolveArgs),
    /// Map an instance along a reduction chain.
    Reduce(ReduceArgs),
    /// Recompute the value of a result record.
    Check {
        record: PathBuf,
        instance: PathBuf,
    },
    /// Run every row of a manifest and print a table.
    Bench {
        manifest: PathBuf,
        #[arg(long, env = "PROBDOM_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Vertices (pairs for kspm, class size for mcc).
    #[arg(long)]
    n: usize,
    /// Budget for kspm, number of classes for mcc.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Cross-class edges for mcc.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, env = "PROBDOM_SEED", default_value_t = 0)]
    seed: u64,
    /// `lo,hi` or a single value.
    #[arg(long, default_value = "0,1")]
    prob_range: String,
    #[arg(long, default_value = "1,1")]
    weight_range: String,
    #[arg(long, default_value = "1/4,2")]
    x_range: String,
    #[arg(long, default_value = "1/4,2")]
    y_range: String,
    /// Values are sampled on a grid of step 2^-bits.
    #[arg(long, default_value_t = 4)]
    bits: u32,
    /// Edge density for graph, edge survival for ktree.
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 2)]
    width: usize,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, env = "PROBDOM_SEED", default_value_t = 0)]
    seed: u64,
    /// Uniform edge probability expected by twdp and apex.
    #[arg(long)]
    p: Option<String>,
    /// Use exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Tree decomposition in PACE format.
    #[arg(long)]
    td: Option<PathBuf>,
    #[arg(long)]
    width_threshold: Option<usize>,
}

#[derive(Args)]
struct ReduceArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    from: ReduceFrom,
    #[arg(long, value_enum)]
    to: ReduceTo,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    f: Option<usize>,
    /// Source certificate (indices or clique vertices), comma separated.
    #[arg(long, value_delimiter = ',')]
    certificate: Option<Vec<usize>>,
    /// Write the target instance here instead of embedding it in the report.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write the target's path decomposition (mcc only).
    #[arg(long)]
    td_out: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Gen(a) => {
            let opts = GenOpts {
                kind: a.kind,
                n: a.n,
                k: a.k,
                m: a.m,
                seed: a.seed,
                prob_range: a.prob_range,
                weight_range: a.weight_range,
                x_range: a.x_range,
                y_range: a.y_range,
                bits: a.bits,
                density: a.density,
                width: a.width,
            };
            let inst = commands::gen(&opts)?;
            commands::write_output(a.out.as_deref(), &inst.to_text())
        }
        Cmd::Solve(a) => {
            let inst = commands::load_instance(&a.instance)?;
            let opts = SolveOpts { algo: a.algo, k: a.k, eps: a.eps, seed: a.seed, p: a.p, exact: a.exact, td: a.td, width_threshold: a.width_threshold };
            let rec = commands::solve(&inst, &opts)?;
            println!("{}", serde_json::to_string_pretty(&rec).expect("records serialize"));
            Ok(())
        }
        Cmd::Reduce(a) => {
            let inst = commands::load_instance(&a.instance)?;
            let opts = ReduceOpts { from: a.from, to: a.to, p: a.p, f: a.f, certificate: a.certificate };
            let mut red = commands::reduce(&inst, &opts)?;
            let text = red.target.to_text();
            match &a.out {
                Some(_) => commands::write_output(a.out.as_deref(), &text)?,
                None => {
                    red.report["instance"] = text.into();
                }
            }
            if let Some(p) = &a.td_out {
                let td = red.td.as_deref().ok_or_else(|| CliError::Usage("this reduction does not build a decomposition".into()))?;
                commands::write_output(Some(p), td)?;
            }
            println!("{}", serde_json::to_string_pretty(&red.report).expect("reports serialize"));
            Ok(())
        }
        Cmd::Check { record, instance } => {
            let text = commands::read_file(&record)?;
            let rec: ResultRecord = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", record.display())))?;
            let inst = commands::load_instance(&instance)?;
            let out = commands::check(&rec, &inst)?;
            println!("{}", serde_json::to_string_pretty(&out).expect("reports serialize"));
            Ok(())
        }
        Cmd::Bench { manifest, seed } => {
            let text = commands::read_file(&manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let rows = commands::parse_manifest(&text, base, seed)?;
            print!("{}", commands::bench(&rows)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
