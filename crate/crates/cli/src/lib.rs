//! Command-line front end for the mtensor library.
//!
//! Every subcommand reads a whitespace edge list, emits JSON (default) or
//! CSV on stdout, and echoes node ids as strings. Identical inputs and
//! seeds produce byte-identical outputs. Exit codes: 0 success, 1
//! validation error, 2 numerical / internal-consistency error.

mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mtensor::centrality::{self, ARTICULATION_EPS};
use mtensor::fundamental::{
    fundamental_matrix, fundamental_tensor, normalize_tensor, FundamentalTensor, TensorEngine,
};
use mtensor::graph::{stationary_distribution, ExtendedGraph, Graph, TransitionMatrix};
use mtensor::influence::{self, BaselineMethod};
use mtensor::metrics;
use mtensor::reachability;
use mtensor::simulate::{simulate_walks, WalkConfig};

pub use error::CliError;

/// Environment variable naming the default directory for `--out` files.
pub const OUT_DIR_ENV: &str = "MTENSOR_OUT_DIR";

/// Full tensors are materialized only up to this many nodes by default;
/// larger graphs stream per-target slices.
pub const DEFAULT_TENSOR_CAP: usize = 300;

#[derive(Parser)]
#[command(
    name = "mtensor",
    version,
    about = "Random-walk network analysis via the Markov fundamental tensor",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
#[command(group(ArgGroup::new("direction").required(true).args(["directed", "undirected"])))]
struct InputArgs {
    /// Edge-list file: `src dst [weight [cost]]` per line, `#` comments.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Treat edges as directed.
    #[arg(long)]
    directed: bool,
    /// Treat edges as undirected (each edge is mirrored).
    #[arg(long)]
    undirected: bool,
    /// Parse weight (and cost) columns; otherwise every edge has weight 1.
    #[arg(long)]
    weighted: bool,
    /// Exogenous-node edge weight for extended-graph commands.
    #[arg(long, default_value_t = 1.0, value_name = "FLOAT")]
    beta: f64,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write output to this file instead of stdout. Relative paths are
    /// resolved against $MTENSOR_OUT_DIR when it is set.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Cap the worker-thread count (results do not depend on it).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-target fundamental-matrix slices, or (s, m, t, value) quadruples.
    Tensor {
        #[command(flatten)]
        input: InputArgs,
        /// Emit nonzero entries as `s,m,t,value` rows instead of slices.
        #[arg(long)]
        quads: bool,
        /// Materialization cap; larger graphs stream slices lazily.
        #[arg(long, default_value_t = DEFAULT_TENSOR_CAP)]
        max_n: usize,
    },
    /// Hitting times: pairwise matrix, or a vector towards --targets.
    Hitting {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated target ids; absent means all single targets.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TENSOR_CAP)]
        max_n: usize,
    },
    /// Commute times (and commute costs when the input carries costs).
    Commute {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_TENSOR_CAP)]
        max_n: usize,
    },
    /// Kirchhoff index with its three computation routes.
    Kirchhoff {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_TENSOR_CAP)]
        max_n: usize,
    },
    /// Closeness, betweenness, and load centrality report.
    Centrality {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_TENSOR_CAP)]
        max_n: usize,
    },
    /// Articulation points detected from the normalized tensor.
    Articulation {
        #[command(flatten)]
        input: InputArgs,
        /// Candidate threshold for the `Fhat = 1` test.
        #[arg(long, default_value_t = ARTICULATION_EPS)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_TENSOR_CAP)]
        max_n: usize,
    },
    /// Per-node load values, sorted ascending (plot-ready CSV).
    Load {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_TENSOR_CAP)]
        max_n: usize,
    },
    /// Seed selection for influence maximization.
    Influence {
        #[command(flatten)]
        input: InputArgs,
        /// Number of seeds.
        #[arg(long)]
        k: usize,
        /// c2greedy or a baseline: degree, closeness, pagerank, random.
        #[arg(long, default_value = "c2greedy")]
        method: String,
        /// Seed for the random baseline.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reachability queries, optionally under node failures.
    Reach {
        #[command(flatten)]
        input: InputArgs,
        /// One query: source and target id.
        #[arg(long, num_args = 2, value_names = ["S", "T"])]
        query: Vec<String>,
        /// Comma-separated failed node ids.
        #[arg(long, value_delimiter = ',')]
        failed: Vec<String>,
        /// Batch file: `s t [f1,f2,...]` per line; emits one 0/1 per line.
        #[arg(long, value_name = "PATH")]
        batch: Option<PathBuf>,
        /// Dump the precomputed oracle matrix as CSV.
        #[arg(long)]
        dump_oracle: bool,
    },
    /// Monte-Carlo walk estimates of visits, hitting time/cost, absorption.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        /// Start node id.
        #[arg(long)]
        start: String,
        /// Comma-separated target ids.
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<String>,
        /// Number of walks.
        #[arg(long, default_value_t = 100_000)]
        walks: u64,
        /// Master RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-walk step cap.
        #[arg(long, default_value_t = mtensor::simulate::DEFAULT_MAX_STEPS)]
        max_steps: u64,
    },
    /// Metric relation suite; reports the max violation per relation.
    Relations {
        #[command(flatten)]
        input: InputArgs,
        /// Size cap for the O(n^4) suite.
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
}

/// Parses `argv` and runs the selected command. Returns the process exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Loaded {
    graph: Graph,
    trans: TransitionMatrix,
}

fn load(input: &InputArgs) -> Result<Loaded, CliError> {
    if let Some(n) = input.threads {
        // Only the first configuration wins inside one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = std::fs::read_to_string(&input.input)?;
    let loaded = Graph::parse_edge_list(&text, input.directed, input.weighted)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let trans = TransitionMatrix::from_graph(&loaded.graph)?;
    Ok(Loaded {
        graph: loaded.graph,
        trans,
    })
}

/// Graph load for commands that tolerate zero out-degree nodes (they work
/// on the extended graph).
fn load_graph_only(input: &InputArgs) -> Result<Graph, CliError> {
    if let Some(n) = input.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = std::fs::read_to_string(&input.input)?;
    let loaded = Graph::parse_edge_list(&text, input.directed, input.weighted)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.graph)
}

fn emit(input: &InputArgs, content: &str) -> Result<(), CliError> {
    match &input.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let resolved = if path.is_relative() {
                match std::env::var_os(OUT_DIR_ENV) {
                    Some(dir) => PathBuf::from(dir).join(path),
                    None => path.clone(),
                }
            } else {
                path.clone()
            };
            if let Some(parent) = resolved.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(resolved, content)?;
            Ok(())
        }
    }
}

fn stationary(loaded: &Loaded) -> Result<Vec<f64>, CliError> {
    Ok(stationary_distribution(&loaded.trans)?)
}

fn tensor_checked(loaded: &Loaded, max_n: usize) -> Result<FundamentalTensor, CliError> {
    let n = loaded.graph.n();
    if n > max_n {
        return Err(CliError::Validation(format!(
            "graph has {n} nodes; full tensor materialization is capped at {max_n} \
             (raise --max-n to override)"
        )));
    }
    let pi = stationary(loaded)?;
    Ok(fundamental_tensor(&loaded.trans, &pi)?)
}

fn resolve_ids(g: &Graph, ids: &[String]) -> Result<Vec<usize>, CliError> {
    ids.iter()
        .map(|id| Ok(g.require_index(id)?))
        .collect()
}

fn nodes_json(g: &Graph) -> serde_json::Value {
    json!(g.ids())
}

fn matrix_csv(g: &Graph, m: &mtensor::DenseMatrix) -> String {
    let mut out = String::new();
    out.push_str("node");
    for id in g.ids() {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for i in 0..m.rows() {
        out.push_str(g.id(i));
        for j in 0..m.cols() {
            out.push(',');
            out.push_str(&format!("{}", m.get(i, j)));
        }
        out.push('\n');
    }
    out
}

fn matrix_json(m: &mtensor::DenseMatrix) -> serde_json::Value {
    json!((0..m.rows())
        .map(|i| m.row(i).to_vec())
        .collect::<Vec<_>>())
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Tensor {
            input,
            quads,
            max_n,
        } => cmd_tensor(input, quads, max_n),
        Command::Hitting {
            input,
            targets,
            max_n,
        } => cmd_hitting(input, targets, max_n),
        Command::Commute { input, max_n } => cmd_commute(input, max_n),
        Command::Kirchhoff { input, max_n } => cmd_kirchhoff(input, max_n),
        Command::Centrality { input, max_n } => cmd_centrality(input, max_n),
        Command::Articulation { input, eps, max_n } => cmd_articulation(input, eps, max_n),
        Command::Load { input, max_n } => cmd_load(input, max_n),
        Command::Influence {
            input,
            k,
            method,
            seed,
        } => cmd_influence(input, k, &method, seed),
        Command::Reach {
            input,
            query,
            failed,
            batch,
            dump_oracle,
        } => cmd_reach(input, query, failed, batch, dump_oracle),
        Command::Simulate {
            input,
            start,
            targets,
            walks,
            seed,
            max_steps,
        } => cmd_simulate(input, start, targets, walks, seed, max_steps),
        Command::Relations { input, max_n } => cmd_relations(input, max_n),
    }
}

fn cmd_tensor(input: InputArgs, quads: bool, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let g = &loaded.graph;
    let pi = stationary(&loaded)?;
    let engine = TensorEngine::new(&loaded.trans, &pi)?;
    let n = g.n();
    let mut out = String::new();
    if quads {
        out.push_str("s,m,t,value\n");
        for t in 0..n {
            let slice = engine.slice(t);
            for s in 0..n {
                for m in 0..n {
                    let v = slice.get(s, m);
                    if v != 0.0 {
                        out.push_str(&format!("{},{},{},{}\n", g.id(s), g.id(m), g.id(t), v));
                    }
                }
            }
        }
    } else {
        // Full materialization only under the cap; stream slices otherwise.
        let materialized = if n <= max_n {
            Some(engine.materialize())
        } else {
            None
        };
        for t in 0..n {
            out.push_str(&format!("# tensor slice, target = {}\n", g.id(t)));
            let slice = match &materialized {
                Some(full) => full.slice(t),
                None => engine.slice(t),
            };
            out.push_str(&matrix_csv(g, &slice));
        }
    }
    emit(&input, &out)
}

fn cmd_hitting(input: InputArgs, targets: Vec<String>, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let g = &loaded.graph;
    if targets.is_empty() {
        // Pairwise matrix from tensor row sums.
        let tensor = tensor_checked(&loaded, max_n)?;
        let h = tensor.hitting_matrix();
        let content = match input.format {
            Format::Csv => matrix_csv(g, &h),
            Format::Json => serde_json::to_string_pretty(&json!({
                "nodes": nodes_json(g),
                "hitting_times": matrix_json(&h),
            }))
            .unwrap()
                + "\n",
        };
        return emit(&input, &content);
    }
    let target_idx = resolve_ids(g, &targets)?;
    let f = fundamental_matrix(&loaded.trans, &target_idx)?;
    let ht = metrics::hitting_times(&f);
    let costs = g.cost().map(|w| metrics::hitting_costs(&f, g, w));
    let content = match input.format {
        Format::Csv => {
            let mut out = String::from(if costs.is_some() {
                "node,hitting_time,hitting_cost\n"
            } else {
                "node,hitting_time\n"
            });
            for (i, &node) in ht.transient.iter().enumerate() {
                match &costs {
                    Some(hc) => out.push_str(&format!(
                        "{},{},{}\n",
                        g.id(node),
                        ht.h[i],
                        hc.lh[i]
                    )),
                    None => out.push_str(&format!("{},{}\n", g.id(node), ht.h[i])),
                }
            }
            out
        }
        Format::Json => {
            let mut body = json!({
                "nodes": nodes_json(g),
                "targets": targets,
                "transient": ht.transient.iter().map(|&i| g.id(i)).collect::<Vec<_>>(),
                "hitting_times": ht.h,
            });
            if let Some(hc) = &costs {
                body["hitting_costs"] = json!(hc.lh);
            }
            serde_json::to_string_pretty(&body).unwrap() + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_commute(input: InputArgs, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let g = &loaded.graph;
    let tensor = tensor_checked(&loaded, max_n)?;
    let cm = metrics::commute_matrix(&tensor, Some(g));
    let content = match input.format {
        Format::Csv => {
            let mut out = String::from("# commute times\n");
            out.push_str(&matrix_csv(g, &cm.c));
            if let Some(cc) = &cm.cc {
                out.push_str("# commute costs\n");
                out.push_str(&matrix_csv(g, cc));
            }
            out
        }
        Format::Json => {
            let mut body = json!({
                "nodes": nodes_json(g),
                "commute_times": matrix_json(&cm.c),
            });
            if let Some(cc) = &cm.cc {
                body["commute_costs"] = matrix_json(cc);
            }
            serde_json::to_string_pretty(&body).unwrap() + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_kirchhoff(input: InputArgs, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let tensor = tensor_checked(&loaded, max_n)?;
    let k = metrics::kirchhoff_index(&tensor, &loaded.trans, loaded.graph.edge_count())?;
    let content = match input.format {
        Format::Csv => format!(
            "kirchhoff_index,route_commute,route_laplacian,route_tensor,edge_count\n{},{},{},{},{}\n",
            k.value,
            k.route_commute,
            k.route_laplacian,
            k.route_tensor,
            loaded.graph.edge_count()
        ),
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "kirchhoff_index": k.value,
                "routes": {
                    "commute": k.route_commute,
                    "laplacian": k.route_laplacian,
                    "tensor": k.route_tensor,
                },
                "edge_count": loaded.graph.edge_count(),
            }))
            .unwrap()
                + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_centrality(input: InputArgs, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let g = &loaded.graph;
    let tensor = tensor_checked(&loaded, max_n)?;
    let nt = normalize_tensor(&tensor);
    let report = centrality::centrality_report(&tensor, &nt, &loaded.trans);
    let content = match input.format {
        Format::Csv => {
            // Sorted load curve, ready for plotting.
            let mut rows: Vec<(usize, f64)> = report.load.iter().copied().enumerate().collect();
            rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            let mut out = String::from("rank,node,load\n");
            for (rank, (node, value)) in rows.into_iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", rank, g.id(node), value));
            }
            out
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "nodes": nodes_json(g),
                "closeness_total_hitting": report.closeness_total,
                "closeness_reciprocal": report.closeness_reciprocal,
                "betweenness_rw": report.betweenness_rw,
                "betweenness_newman": report.betweenness_newman,
                "load": report.load,
                "ranking_closeness": report.ranking_closeness.iter().map(|&i| g.id(i)).collect::<Vec<_>>(),
                "ranking_betweenness": report.ranking_betweenness.iter().map(|&i| g.id(i)).collect::<Vec<_>>(),
                "ranking_load": report.ranking_load.iter().map(|&i| g.id(i)).collect::<Vec<_>>(),
            }))
            .unwrap()
                + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_articulation(input: InputArgs, eps: f64, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let g = &loaded.graph;
    let tensor = tensor_checked(&loaded, max_n)?;
    let nt = normalize_tensor(&tensor);
    let records = centrality::articulation_points(&nt, g, eps);
    let content = match input.format {
        Format::Csv => {
            let mut out = String::from("node,source,target,trivial\n");
            for r in &records {
                for p in &r.pairs {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        g.id(r.node),
                        g.id(p.source),
                        g.id(p.target),
                        p.trivial
                    ));
                }
            }
            out
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "nodes": nodes_json(g),
                "articulation_points": records.iter().map(|r| json!({
                    "node": g.id(r.node),
                    "count": r.count(),
                    "pairs": r.pairs.iter().map(|p| json!({
                        "source": g.id(p.source),
                        "target": g.id(p.target),
                        "trivial": p.trivial,
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            }))
            .unwrap()
                + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_load(input: InputArgs, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let g = &loaded.graph;
    let tensor = tensor_checked(&loaded, max_n)?;
    let nt = normalize_tensor(&tensor);
    let loads = centrality::load(&nt);
    let mut rows: Vec<(usize, f64)> = loads.iter().copied().enumerate().collect();
    rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let content = match input.format {
        Format::Csv => {
            let mut out = String::from("rank,node,load\n");
            for (rank, (node, value)) in rows.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", rank, g.id(*node), value));
            }
            out
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "nodes": nodes_json(g),
                "load": loads,
                "sorted": rows.iter().map(|(node, value)| json!({
                    "node": g.id(*node),
                    "load": value,
                })).collect::<Vec<_>>(),
            }))
            .unwrap()
                + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_influence(input: InputArgs, k: usize, method: &str, seed: u64) -> Result<(), CliError> {
    let g = load_graph_only(&input)?;
    let ext = ExtendedGraph::new(g, input.beta)?;
    let g = ext.base();
    let (seeds, gains, total): (Vec<usize>, Vec<f64>, f64) = if method == "c2greedy" {
        let sel = influence::c2greedy(&ext, k)?;
        (sel.seeds, sel.marginal_gains, sel.spread)
    } else {
        let m: BaselineMethod = method.parse()?;
        let seeds = influence::baseline_rankers(g, k, m, seed)?;
        // Spread trace over growing prefixes of the ranked list.
        let mut gains = Vec::with_capacity(k);
        let mut prev = 0.0;
        for i in 1..=k {
            let s = influence::spread(&ext, &seeds[..i])?;
            gains.push(s - prev);
            prev = s;
        }
        (seeds, gains, prev)
    };
    let content = match input.format {
        Format::Csv => {
            let mut out = String::from("k,seed,marginal_gain,cumulative_spread\n");
            let mut cum = 0.0;
            for (i, (&s, &gain)) in seeds.iter().zip(&gains).enumerate() {
                cum += gain;
                out.push_str(&format!("{},{},{},{}\n", i + 1, g.id(s), gain, cum));
            }
            out
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "method": method,
                "beta": input.beta,
                "seeds": seeds.iter().map(|&s| g.id(s)).collect::<Vec<_>>(),
                "marginal_gains": gains,
                "spread": total,
            }))
            .unwrap()
                + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_reach(
    input: InputArgs,
    query: Vec<String>,
    failed: Vec<String>,
    batch: Option<PathBuf>,
    dump_oracle: bool,
) -> Result<(), CliError> {
    let g = load_graph_only(&input)?;
    let ext = ExtendedGraph::new(g, input.beta)?;
    let g = ext.base();
    let oracle = reachability::build_oracle(&ext)?;
    let mut out = String::new();
    if dump_oracle {
        out.push_str(&matrix_csv(g, oracle.matrix()));
    }
    if !query.is_empty() {
        let s = g.require_index(&query[0])?;
        let t = g.require_index(&query[1])?;
        let failed_idx = resolve_ids(g, &failed)?;
        let reachable = if failed_idx.is_empty() {
            oracle.query(s, t)?
        } else {
            oracle.query_with_failures(s, t, &failed_idx)?
        };
        out.push_str(if reachable { "1\n" } else { "0\n" });
    }
    if let Some(path) = batch {
        let text = std::fs::read_to_string(&path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(CliError::Validation(format!(
                    "batch line {}: expected `s t [f1,f2,...]`",
                    lineno + 1
                )));
            }
            let s = g.require_index(fields[0])?;
            let t = g.require_index(fields[1])?;
            let reachable = if fields.len() == 3 {
                let failed_idx: Vec<usize> = fields[2]
                    .split(',')
                    .filter(|f| !f.is_empty())
                    .map(|f| Ok(g.require_index(f)?))
                    .collect::<Result<_, CliError>>()?;
                oracle.query_with_failures(s, t, &failed_idx)?
            } else {
                oracle.query(s, t)?
            };
            out.push_str(if reachable { "1\n" } else { "0\n" });
        }
    }
    emit(&input, &out)
}

fn cmd_simulate(
    input: InputArgs,
    start: String,
    targets: Vec<String>,
    walks: u64,
    seed: u64,
    max_steps: u64,
) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let g = &loaded.graph;
    let start_idx = g.require_index(&start)?;
    let target_idx = resolve_ids(g, &targets)?;
    let cfg = WalkConfig {
        num_walks: walks,
        rng_seed: seed,
        max_steps,
    };
    let report = simulate_walks(&loaded.trans, start_idx, &target_idx, g.cost(), &cfg)?;
    let est = |e: &mtensor::simulate::SimulationEstimate| {
        json!({ "mean": e.mean, "standard_error": e.standard_error })
    };
    let content = match input.format {
        Format::Csv => {
            let mut out = String::from("metric,node,mean,standard_error\n");
            for (i, &node) in report.transient.iter().enumerate() {
                out.push_str(&format!(
                    "visits,{},{},{}\n",
                    g.id(node),
                    report.visits[i].mean,
                    report.visits[i].standard_error
                ));
            }
            out.push_str(&format!(
                "hitting_time,,{},{}\n",
                report.hitting_time.mean, report.hitting_time.standard_error
            ));
            if let Some(hc) = &report.hitting_cost {
                out.push_str(&format!(
                    "hitting_cost,,{},{}\n",
                    hc.mean, hc.standard_error
                ));
            }
            for (i, &t) in report.targets.iter().enumerate() {
                out.push_str(&format!(
                    "absorption,{},{},{}\n",
                    g.id(t),
                    report.absorption[i].mean,
                    report.absorption[i].standard_error
                ));
            }
            out
        }
        Format::Json => {
            let mut body = json!({
                "start": g.id(report.start),
                "targets": report.targets.iter().map(|&t| g.id(t)).collect::<Vec<_>>(),
                "num_walks": walks,
                "seed": seed,
                "truncated_walks": report.truncated_walks,
                "visits": report.transient.iter().zip(&report.visits).map(|(&node, e)| {
                    json!({ "node": g.id(node), "mean": e.mean, "standard_error": e.standard_error })
                }).collect::<Vec<_>>(),
                "hitting_time": est(&report.hitting_time),
                "absorption": report.targets.iter().zip(&report.absorption).map(|(&t, e)| {
                    json!({ "target": g.id(t), "mean": e.mean, "standard_error": e.standard_error })
                }).collect::<Vec<_>>(),
            });
            if let Some(hc) = &report.hitting_cost {
                body["hitting_cost"] = est(hc);
            }
            serde_json::to_string_pretty(&body).unwrap() + "\n"
        }
    };
    emit(&input, &content)
}

fn cmd_relations(input: InputArgs, max_n: usize) -> Result<(), CliError> {
    let loaded = load(&input)?;
    let report = metrics::relation_suite(&loaded.trans, max_n)?;
    let content = match input.format {
        Format::Csv => {
            let mut out = String::from("relation,kind,max_violation,tuples\n");
            for c in &report.checks {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    c.name,
                    match c.kind {
                        metrics::CheckKind::Equality => "equality",
                        metrics::CheckKind::Inequality => "inequality",
                    },
                    c.max_violation,
                    c.tuples
                ));
            }
            out
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "n": report.n,
                "undirected": report.undirected,
                "checks": report.checks.iter().map(|c| json!({
                    "relation": c.name,
                    "kind": match c.kind {
                        metrics::CheckKind::Equality => "equality",
                        metrics::CheckKind::Inequality => "inequality",
                    },
                    "max_violation": c.max_violation,
                    "tuples": c.tuples,
                })).collect::<Vec<_>>(),
            }))
            .unwrap()
                + "\n"
        }
    };
    emit(&input, &content)
}
