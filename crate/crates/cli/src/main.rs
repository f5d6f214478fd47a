//! `connected-cm`: command-line front end.
//!
//! Every subcommand prints one JSON document (or CSV for `estimate-K`) on
//! stdout. Failures print `{"error": kind, "message": ...}` on stderr and exit
//! with status 1, or 2 for unreadable inputs and usage errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use connected_cm::census::{empirical_census, enumerate_bp_trees, giant_rejection_sample, sample_uniform_connected};
use connected_cm::confmodel::{components, is_simple, project, sample_configuration, MultiGraph};
use connected_cm::embedding::build_embedding;
use connected_cm::experiments::{estimate_k, estimates_csv, EstimateKConfig};
use connected_cm::oracle::{decomposition_sides, enumerate_counts};
use connected_cm::par::Execution;
use connected_cm::rate::{rate_k_with_tol, DEFAULT_TOLERANCE};
use connected_cm::{DegreeDistribution, TypeSequence};

#[derive(Parser, Debug)]
#[command(name = "connected-cm", version, about = "Connected graphs with prescribed degrees")]
struct Cli {
    /// Worker threads (default: RAYON_NUM_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run replicates on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extinction root, K(p) and the giant degree law.
    Rate {
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Truncated law and the enlarged type sequence N.
    BuildNbig {
        #[arg(long)]
        p: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: u64,
    },
    /// One uniform configuration and its projection.
    SampleCm {
        #[arg(long = "type")]
        type_seq: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Uniform connected simple graph by rejection.
    SampleConnected {
        #[arg(long = "type")]
        type_seq: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Uniform connected simple graph as the giant of the enlarged sequence.
    SampleGiant {
        #[arg(long)]
        p: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Exhaustive counts for a small type sequence.
    Oracle {
        #[arg(long = "type")]
        type_seq: String,
    },
    /// Radius-r neighbourhood census of an edge list.
    Census {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        r: u32,
        /// Vertex count when isolated vertices follow the largest label.
        #[arg(long)]
        vertices: Option<usize>,
    },
    /// Tree probabilities of the survival-conditioned branching process.
    Mu {
        #[arg(long)]
        p: String,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1e-4)]
        min_prob: f64,
    },
    /// Monte Carlo curve of -ln p_conn / n as CSV.
    #[command(name = "estimate-K")]
    EstimateK(EstimateKArgs),
    /// Both sides of the component decomposition identities.
    DecompCheck {
        #[arg(long = "type")]
        type_seq: String,
        /// JSON list of type sequences.
        #[arg(long)]
        family: String,
    },
    /// Runs a serialized experiment spec.
    Run {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Args, Debug)]
struct EstimateKArgs {
    #[arg(long)]
    p: String,
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
    sizes: Vec<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sizes up to this use plain Monte Carlo; larger ones go through N.
    #[arg(long, default_value_t = 100)]
    direct_max_n: u64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
}

/// A fully serialized invocation; re-running it reproduces the same bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExperimentSpec {
    command: String,
    #[serde(default)]
    inputs: BTreeMap<String, String>,
    seed: Option<u64>,
    replicates: Option<u64>,
    output: Option<PathBuf>,
    /// Numeric flags such as `tol`, `eps` or `min-prob`.
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

impl ExperimentSpec {
    fn argv(&self) -> Vec<String> {
        let mut argv = vec!["connected-cm".to_string(), self.command.clone()];
        let mut flag = |k: &str, v: String| {
            argv.push(format!("--{k}"));
            argv.push(v);
        };
        for (k, v) in &self.inputs {
            flag(k, v.clone());
        }
        if let Some(s) = self.seed {
            flag("seed", s.to_string());
        }
        if let Some(r) = self.replicates {
            flag("replicates", r.to_string());
        }
        for (k, v) in &self.tolerances {
            flag(k, v.to_string());
        }
        if let Some(o) = &self.output {
            flag("out", o.display().to_string());
        }
        argv
    }
}

#[derive(Debug)]
enum Failure {
    Input(String, String),
    Module(connected_cm::Error),
    Usage(String),
    /// Rejection budget spent; carries the near-miss report.
    Exhausted(Value),
}

impl From<connected_cm::Error> for Failure {
    fn from(e: connected_cm::Error) -> Self {
        Failure::Module(e)
    }
}

impl Failure {
    fn report(&self) -> (Value, u8) {
        match self {
            Failure::Input(kind, msg) => (json!({"error": kind, "message": msg}), 2),
            Failure::Usage(msg) => (json!({"error": "Usage", "message": msg}), 2),
            Failure::Module(e) => (json!({"error": e.kind(), "message": e.to_string()}), 1),
            Failure::Exhausted(report) => (
                json!({"error": "BudgetExhausted", "message": "no attempt was accepted", "near_miss": report}),
                1,
            ),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Inline JSON if the argument starts with `{` or `[`, otherwise a file path.
fn read_json(arg: &str) -> Outcome<Value> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        read_file(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input("InvalidJson".into(), format!("{arg}: {e}")))
}

fn read_file(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input("Io".into(), format!("{}: {e}", path.display())))
}

fn field<T: for<'de> Deserialize<'de>>(v: &Value, name: &str) -> Outcome<T> {
    let inner = v.get(name).ok_or_else(|| Failure::Input("InvalidJson".into(), format!("missing `{name}`")))?;
    serde_json::from_value(inner.clone()).map_err(|e| Failure::Input("InvalidJson".into(), format!("`{name}`: {e}")))
}

fn parse_distribution(arg: &str) -> Outcome<DegreeDistribution> {
    Ok(DegreeDistribution::new(field(&read_json(arg)?, "weights")?)?)
}

fn parse_type(v: &Value) -> Outcome<TypeSequence> {
    Ok(TypeSequence::new(field(v, "counts")?)?)
}

/// Rounds every float to 15 significant digits.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{x:.14e}").parse().expect("round trip");
            json!(rounded)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(round_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn graph_json(g: &MultiGraph) -> Value {
    let view = components(g);
    json!({
        "vertices": g.vertices(),
        "degrees": g.degrees(),
        "edges": g.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect::<Vec<_>>(),
        "simple": is_simple(g),
        "components": view.count(),
    })
}

enum Output {
    Json(Value),
    Text(String),
}

fn dispatch(command: Command, exec: Execution) -> Outcome<Output> {
    let out = match command {
        Command::Rate { p, tol } => {
            let p = parse_distribution(&p)?;
            Output::Json(to_json(&rate_k_with_tol(&p, tol)?))
        }
        Command::BuildNbig { p, eps, n } => Output::Json(to_json(&build_embedding(&parse_distribution(&p)?, eps, n)?)),
        Command::SampleCm { type_seq, seed } => {
            let t = parse_type(&read_json(&type_seq)?)?;
            let c = sample_configuration(&t, seed)?;
            let pairs: Vec<(u32, u32)> = c.stub_edges().collect();
            Output::Json(json!({"seed": seed, "stub_pairs": pairs, "graph": graph_json(&project(&c))}))
        }
        Command::SampleConnected { type_seq, seed, budget } => {
            let t = parse_type(&read_json(&type_seq)?)?;
            let s = sample_uniform_connected(&t, seed, budget)?;
            Output::Json(json!({"seed": seed, "attempts": s.attempts, "graph": graph_json(&s.graph)}))
        }
        Command::SampleGiant { p, eps, n, seed, budget } => {
            let p = parse_distribution(&p)?;
            match giant_rejection_sample(&p, eps, n, seed, budget)? {
                connected_cm::census::GiantOutcome::Accepted { graph, attempts } => {
                    Output::Json(json!({"seed": seed, "attempts": attempts, "graph": graph_json(&graph)}))
                }
                connected_cm::census::GiantOutcome::Exhausted(report) => {
                    return Err(Failure::Exhausted(to_json(&report)));
                }
            }
        }
        Command::Oracle { type_seq } => Output::Json(to_json(&enumerate_counts(&parse_type(&read_json(&type_seq)?)?)?)),
        Command::Census { edges, r, vertices } => {
            let g = MultiGraph::parse_edge_list(&read_file(&edges)?, vertices)?;
            if !is_simple(&g) {
                return Err(Failure::Module(connected_cm::Error::InvalidConfiguration(
                    "census requires a simple graph".into(),
                )));
            }
            Output::Json(to_json(&empirical_census(&g, r)))
        }
        Command::Mu { p, r, min_prob } => {
            let p = parse_distribution(&p)?;
            let rate = rate_k_with_tol(&p, DEFAULT_TOLERANCE)?;
            let trees = enumerate_bp_trees(&rate.q, rate.beta, r, min_prob)?;
            let rows: Vec<Value> = trees.iter().map(|t| json!({"tree": t.tree.code, "mu": t.mu})).collect();
            Output::Json(json!({"radius": r, "beta": rate.beta, "trees": rows}))
        }
        Command::EstimateK(a) => {
            let p = parse_distribution(&a.p)?;
            let config = EstimateKConfig {
                sizes: a.sizes,
                replicates: a.replicates,
                seed: a.seed,
                direct_max_n: a.direct_max_n,
                eps: a.eps,
            };
            Output::Text(estimates_csv(&estimate_k(&p, &config, exec)?))
        }
        Command::DecompCheck { type_seq, family } => {
            let n = parse_type(&read_json(&type_seq)?)?;
            let family = match read_json(&family)? {
                Value::Array(xs) => xs.iter().map(parse_type).collect::<Outcome<Vec<_>>>()?,
                _ => return Err(Failure::Input("InvalidJson".into(), "family must be a JSON list".into())),
            };
            Output::Json(to_json(&decomposition_sides(&n, &family)?))
        }
        Command::Run { .. } => return Err(Failure::Usage("`run` specs cannot nest".into())),
    };
    Ok(out)
}

fn execute(cli: Cli) -> Outcome<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let (command, out) = match cli.command {
        Command::Run { spec } => {
            let text = read_file(&spec)?;
            let spec: ExperimentSpec = serde_json::from_str(&text)
                .map_err(|e| Failure::Input("InvalidJson".into(), format!("{}: {e}", spec.display())))?;
            let inner = Cli::try_parse_from(spec.argv()).map_err(|e| Failure::Usage(e.to_string()))?;
            (inner.command, inner.out.or(cli.out))
        }
        other => (other, cli.out),
    };
    let text = match dispatch(command, exec)? {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&round_floats(v)).expect("serializable");
            s.push('\n');
            s
        }
        Output::Text(s) => s,
    };
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::Input("Io".into(), format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let (v, code) = Failure::Usage(e.to_string()).report();
            eprintln!("{v}");
            return ExitCode::from(code);
        }
        Err(e) => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (v, code) = f.report();
            eprintln!("{v}");
            ExitCode::from(code)
        }
    }
}
