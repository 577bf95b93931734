use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;

use modk::census::{census_mod, CycleCensus, CycleSeq};
use modk::coloring::{chromatic_number, Color};
use modk::corpus::{append_corpus, generate_exhaustive, ingest_graph6, load_corpus};
use modk::graph::{Edge, Graph};
use modk::kempe::{
    build_injection_f, extract_one_mod_k, extract_zero_mod_r, lemma_paths, min_degree_vertex, prescribed_coloring,
    CyclicPerm,
};
use modk::verify::{summary_path, verify_corpus, Suite, VerifyOptions};
use modk::Error;

#[derive(Parser)]
#[command(name = "modk", version, about = "Cycle residues in color-critical graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate every critical graph of a given order and chromatic number.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        chi: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter a graph6 file down to its critical graphs.
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        chi: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count cycles by length residue.
    Census {
        /// A graph6 line, or a file of them.
        #[arg(long)]
        graph6: String,
        #[arg(long = "mod")]
        modulus: usize,
        #[arg(long, default_value_t = 0)]
        residue: usize,
        #[arg(long)]
        emit_cycles: bool,
    },
    /// Check a corpus against the cycle bounds.
    Verify {
        /// Required by every suite except borrowed.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        fail_fast: bool,
        /// Largest order swept by the borrowed suite.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Run one cycle construction and print its cycles.
    Construct {
        #[arg(long)]
        graph6: String,
        #[arg(long = "proc")]
        procedure: Procedure,
        /// Comma-separated key=value pairs: edge=u-v, r, k, v, sigma=a-b-c.
        #[arg(long, default_value = "")]
        args: String,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Procedure {
    Thm3,
    Lemma5,
    Injection,
    Onemod,
}

/// Like `println!`, but a closed stdout becomes an error instead of a panic.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

/// A failure that means a proven bound or construction broke.
struct Counterexample;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on bad usage, which here means a counterexample.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Counterexample>() => ExitCode::from(2),
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(Error::Invariant(msg)) = e.downcast_ref::<Error>() {
                eprintln!("counterexample: {msg}");
                return ExitCode::from(2);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

impl std::fmt::Debug for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("counterexample found")
    }
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("counterexample found")
    }
}

impl std::error::Error for Counterexample {}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen { n, chi, out } => {
            let corpus = generate_exhaustive(n, chi)?;
            append_corpus(&corpus, &out).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{} {chi}-critical graphs on {n} vertices", corpus.len());
        }
        Command::Ingest { input, chi, out } => {
            let (corpus, summary) = ingest_graph6(&input, chi).with_context(|| format!("reading {}", input.display()))?;
            append_corpus(&corpus, &out).with_context(|| format!("writing {}", out.display()))?;
            out!("{}", serde_json::to_string(&summary)?);
        }
        Command::Census { graph6, modulus, residue, emit_cycles } => {
            for g in read_graphs(&graph6)? {
                let census = census_mod(&g, modulus, residue)?;
                out!("{}", serde_json::to_string(&CensusLine::new(&g, &census, emit_cycles)?)?);
            }
        }
        Command::Verify { corpus, suite, k, report, jobs, fail_fast, n_max } => {
            let corpus = match &corpus {
                Some(p) => Some(load_corpus(p, k + 1).with_context(|| format!("loading {}", p.display()))?),
                None if suite == Suite::Borrowed => None,
                None => bail!("--corpus is required for the {suite} suite"),
            };
            let opts = VerifyOptions { suite, k, jobs, fail_fast, n_max };
            let result = verify_corpus(corpus.as_ref(), &opts)?;
            result.write_jsonl(&report).with_context(|| format!("writing {}", report.display()))?;
            result.write_summary_csv(&summary_path(&report))?;
            if result.has_counterexample() {
                for rec in result.counterexamples() {
                    dump_counterexample(&rec.cert, suite, k);
                    for c in rec.checks.iter().filter(|c| c.status == modk::verify::Status::Fail) {
                        eprintln!("  failed {}: {}", c.name, c.detail);
                    }
                }
                return Err(Counterexample.into());
            }
        }
        Command::Construct { graph6, procedure, args } => construct(&graph6, procedure, &args)?,
    }
    Ok(())
}

fn dump_counterexample(cert: &str, suite: Suite, k: usize) {
    eprintln!("counterexample: {cert}");
    let r = if suite == Suite::Main || suite == Suite::Structure { 3 } else { k.max(2) };
    if let Ok(g) = Graph::parse_graph6(cert) {
        if let Ok(c) = census_mod(&g, r, 0) {
            eprintln!("  cycle counts mod {r}: {:?}", c.counts());
            eprintln!("  vertex incidence (residue 0): {:?}", c.vertex_incidence());
        }
    }
}

/// `arg` names a file of graph6 lines if such a file exists, and is a
/// single graph6 line otherwise.
fn read_graphs(arg: &str) -> anyhow::Result<Vec<Graph>> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            out.push(Graph::parse_graph6(line.trim()).with_context(|| format!("{arg}:{}", i + 1))?);
        }
        Ok(out)
    } else {
        Ok(vec![Graph::parse_graph6(arg)?])
    }
}

#[derive(Serialize)]
struct CensusLine {
    graph6: String,
    modulus: usize,
    residue: usize,
    counts: Vec<u64>,
    vertex_incidence: Vec<u64>,
    edge_incidence: Vec<(usize, usize, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles: Option<Vec<CycleSeq>>,
}

impl CensusLine {
    fn new(g: &Graph, c: &CycleCensus, emit: bool) -> anyhow::Result<Self> {
        let cycles = if emit {
            let stored = c
                .cycles_in_class(c.residue())
                .ok_or_else(|| anyhow!("too many cycles to emit; raise MODK_CYCLE_CAP"))?;
            Some(stored.into_iter().cloned().collect())
        } else {
            None
        };
        Ok(CensusLine {
            graph6: g.to_graph6(),
            modulus: c.modulus(),
            residue: c.residue(),
            counts: c.counts().to_vec(),
            vertex_incidence: c.vertex_incidence().to_vec(),
            edge_incidence: c.edge_incidences(g).into_iter().map(|(e, n)| (e.u, e.v, n)).collect(),
            cycles,
        })
    }
}

fn parse_args(args: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| anyhow!("argument {part:?} is not key=value"))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn dashed<T: std::str::FromStr>(s: &str) -> anyhow::Result<Vec<T>> {
    s.split('-')
        .map(|x| x.trim().parse::<T>().map_err(|_| anyhow!("bad number {x:?} in {s:?}")))
        .collect()
}

fn number(map: &BTreeMap<String, String>, key: &str) -> anyhow::Result<Option<usize>> {
    map.get(key).map(|v| v.parse().with_context(|| format!("{key}={v} is not a number"))).transpose()
}

fn seq(vertices: &[usize]) -> String {
    vertices.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn construct(graph6: &str, procedure: Procedure, args: &str) -> anyhow::Result<()> {
    let g = read_graphs(graph6)?.into_iter().next().ok_or_else(|| anyhow!("no graph given"))?;
    let map = parse_args(args)?;
    let k = match number(&map, "k")? {
        Some(k) => k,
        None => chromatic_number(&g)? - 1,
    };
    let vertex = |default: Option<usize>| -> anyhow::Result<usize> {
        number(&map, "v")?.or(default).ok_or_else(|| anyhow!("no vertex of degree {k}; pass v=<vertex>"))
    };
    match procedure {
        Procedure::Thm3 => {
            let e = match map.get("edge") {
                Some(s) => match dashed::<usize>(s)?.as_slice() {
                    [u, v] if u != v => Edge::new(*u, *v),
                    _ => bail!("edge={s} must be u-v"),
                },
                None => g.edges().next().ok_or_else(|| anyhow!("graph has no edges"))?,
            };
            let r = number(&map, "r")?.unwrap_or(k);
            for c in extract_zero_mod_r(&g, e, r, k)? {
                out!("{}", seq(c.vertices()));
            }
        }
        Procedure::Lemma5 => {
            let v = vertex(min_degree_vertex(&g, k))?;
            let ring: Vec<Color> = match map.get("sigma") {
                Some(s) => dashed(s)?,
                None => (1..=k as Color).collect(),
            };
            let sigma = CyclicPerm::within(&ring, k)?;
            let c = prescribed_coloring(&g, v, k)?;
            for (i, path) in lemma_paths(&g, v, &c, &sigma)? {
                out!("{i}: {}", seq(&path));
            }
        }
        Procedure::Injection => {
            let v = vertex(min_degree_vertex(&g, k))?;
            let c = prescribed_coloring(&g, v, k)?;
            for (dom, img) in build_injection_f(&g, v, &c, k)? {
                out!("{} -> {}", seq(dom.vertices()), seq(img.vertices()));
            }
        }
        Procedure::Onemod => {
            let v = vertex(Some(0))?;
            for c in extract_one_mod_k(&g, v, k)? {
                out!("{}", seq(c.vertices()));
            }
        }
    }
    Ok(())
}
