use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use diwed::bellexpr::{local_bound, BellExpression};
use diwed::graphwit::{catalog, synthesize, verify_paradox, Graph, SynthOptions};
use diwed::reproduce::{reproduce, ReproduceOptions, Target, NUMERIC_TOL};
use diwed::seesaw::{full_seesaw, kproducible_lower_bound, SeesawConfig};
use diwed::witness_gamma::{build_expression, closed_form_bound, optimal_quantum_bound, qudit_value, GammaWitness};
use diwed::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "diwed", version, about = "Bell-inequality witnesses of entanglement depth")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact local bound by enumerating deterministic strategies.
    LocalBound(ExprSource),
    /// Recompute a published table or figure next to its reference values.
    Reproduce(ReproduceArgs),
    /// Search a graph for GHZ-paradox inequalities.
    Synthesize(GraphSource),
    /// Print a catalog inequality with its setting dictionary and bounds.
    Catalog {
        /// Catalog name, e.g. RG4, FG5, LG5_alt, RG3_full.
        name: String,
    },
    /// Optimal GHZ value of the γ-witness.
    QuantumBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        /// Local dimension of the qudit GHZ state.
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// See-saw lower bound on the quantum (or k-producible) maximum.
    Seesaw(SeesawArgs),
}

#[derive(Args, Debug)]
struct ExprSource {
    /// Catalog inequality name.
    #[arg(long, conflicts_with_all = ["gamma", "expr"])]
    catalog: Option<String>,
    /// γ of the witness `S_{n,γ}` (requires --n).
    #[arg(long, requires = "n", conflicts_with = "expr")]
    gamma: Option<f64>,
    /// Number of parties of the γ-witness.
    #[arg(long, requires = "gamma")]
    n: Option<usize>,
    /// Bell expression in JSON.
    #[arg(long)]
    expr: Option<PathBuf>,
}

impl ExprSource {
    fn load(&self) -> Result<BellExpression> {
        match (&self.catalog, self.gamma, self.n, &self.expr) {
            (Some(name), ..) => Ok(catalog(name)?.expression),
            (None, Some(gamma), Some(n), _) => build_expression(GammaWitness::new(n, gamma)?),
            (None, None, None, Some(path)) => BellExpression::from_json(&fs::read_to_string(path)?),
            _ => Err(Error::InvalidParameter(
                "give one of --catalog NAME, --gamma G --n N, or --expr FILE".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct GraphSource {
    /// Graph file: edge list `n; i j; …` or an adjacency matrix.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// Named graph such as `ring 5`, `linear 5`, `complete 4`.
    #[arg(long)]
    family: Option<String>,
    /// Stop after this many inequalities.
    #[arg(long, default_value_t = SynthOptions::default().max_results)]
    max_results: usize,
}

impl GraphSource {
    fn load(&self) -> Result<Graph> {
        match (&self.graph, &self.family) {
            (Some(path), _) => Graph::parse(&fs::read_to_string(path)?),
            (None, Some(name)) => Graph::from_family(name),
            (None, None) => Err(Error::InvalidParameter("give --graph FILE or --family NAME".into())),
        }
    }
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// table1..table5, fig1, fig2 or fig3.
    target: String,
    /// Party counts (comma separated) for the figure targets and table3.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// γ values (comma separated) for fig2.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// θ grid for fig2 as START:END:STEP.
    #[arg(long, value_parser = parse_grid)]
    theta_grid: Option<(f64, f64, f64)>,
    /// Step of the γ grids of fig1 and fig3.
    #[arg(long, default_value_t = 0.01)]
    gamma_step: f64,
    #[arg(long, default_value_t = SeesawConfig::default().restarts)]
    restarts: usize,
}

#[derive(Args, Debug)]
struct SeesawArgs {
    #[command(flatten)]
    source: ExprSource,
    /// Restrict to k-producible states.
    #[arg(long)]
    k: Option<usize>,
    /// Local dimension of every party.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = SeesawConfig::default().restarts)]
    restarts: usize,
}

fn parse_grid(s: &str) -> std::result::Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("expected START:END:STEP, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?, num(step)?))
}

/// What every output carries besides its payload.
#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    command: String,
    seed: u64,
    tolerance: f64,
}

struct Report {
    tolerance: f64,
    csv: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let report = match &cli.command {
        Command::LocalBound(src) => cmd_local_bound(src)?,
        Command::Reproduce(args) => cmd_reproduce(args, cli.seed)?,
        Command::Synthesize(src) => cmd_synthesize(src)?,
        Command::Catalog { name } => cmd_catalog(name)?,
        Command::QuantumBound { n, gamma, d } => cmd_quantum_bound(*n, *gamma, *d)?,
        Command::Seesaw(args) => cmd_seesaw(args, cli.seed)?,
    };
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: std::env::args().collect::<Vec<_>>().join(" "),
        seed: cli.seed,
        tolerance: report.tolerance,
    };
    let text = match cli.format {
        Format::Csv => format!(
            "# tool: {} {}\n# command: {}\n# seed: {}\n# tolerance: {:e}\n{}",
            meta.tool, meta.version, meta.command, meta.seed, meta.tolerance, report.csv
        ),
        Format::Json => {
            let mut doc = serde_json::to_value(&meta)?;
            doc["result"] = report.json;
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn signs(strategy: &[Vec<i8>]) -> String {
    strategy
        .iter()
        .map(|party| party.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect::<String>())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_local_bound(src: &ExprSource) -> Result<Report> {
    let expr = src.load()?;
    let lb = local_bound(&expr)?;
    let strategy = signs(lb.strategy.signs());
    Ok(Report {
        tolerance: 0.0,
        csv: format!("expression,local_bound,strategy\n{},{},{}\n", expr.name(), lb.value, strategy),
        json: json!({ "expression": expr.name(), "local_bound": lb.value, "strategy": lb.strategy.signs() }),
    })
}

fn cmd_reproduce(args: &ReproduceArgs, seed: u64) -> Result<Report> {
    let target: Target = args.target.parse()?;
    let defaults = ReproduceOptions::default();
    let opts = ReproduceOptions {
        seesaw: SeesawConfig::default().with_seed(seed).with_restarts(args.restarts),
        gamma_step: args.gamma_step,
        ns: args.n.clone(),
        gammas: args.gamma.clone().unwrap_or(defaults.gammas),
        theta_grid: args.theta_grid.unwrap_or(defaults.theta_grid),
        ..defaults
    };
    let artifact = reproduce(target, &opts)?;
    if !artifact.all_match() {
        eprintln!("warning: some {target} rows do not match their reference values");
    }
    Ok(Report {
        tolerance: NUMERIC_TOL,
        csv: artifact.to_csv(),
        json: json!({ "target": target, "artifact": artifact }),
    })
}

fn cmd_synthesize(src: &GraphSource) -> Result<Report> {
    let graph = src.load()?;
    let found = synthesize(&graph, SynthOptions { max_results: src.max_results })?;
    let mut csv = String::from("index,m,local_bound,quantum_value,biseparably_saturated,dictionary,expression\n");
    let mut records = Vec::with_capacity(found.len());
    for (i, s) in found.iter().enumerate() {
        let m = s.selection.m();
        let lb = local_bound(&s.expression)?.value;
        let q = verify_paradox(&s.expression, &s.dictionary, &graph)?.total;
        let dict = s.dictionary.describe();
        let _ = writeln!(csv, "{i},{m},{lb},{q},{},{dict},{}", s.biseparably_saturated, s.expression);
        records.push(json!({
            "m": m,
            "local_bound": lb,
            "quantum_value": q,
            "biseparably_saturated": s.biseparably_saturated,
            "dictionary": dict,
            "subsets": s.selection.subsets,
            "product": s.selection.product,
            "expression": serde_json::from_str::<Value>(&s.expression.to_json()?)?,
        }));
    }
    Ok(Report {
        tolerance: 1e-10,
        csv,
        json: json!({ "graph": graph.edges(), "n": graph.n(), "inequalities": records }),
    })
}

fn cmd_catalog(name: &str) -> Result<Report> {
    let entry = catalog(name)?;
    let lb = local_bound(&entry.expression)?.value;
    let q = verify_paradox(&entry.expression, &entry.dictionary, &entry.graph)?.total;
    let dict = entry.dictionary.describe();
    let printed = entry.matches_printed();
    let mut csv = String::from("name,local_bound,quantum_value,dictionary,matches_printed\n");
    let printed_txt = printed.map_or_else(|| "n/a".to_string(), |b| b.to_string());
    let _ = writeln!(csv, "{},{lb},{q},{dict},{printed_txt}", entry.name);
    csv.push_str("coefficient,settings\n");
    for t in entry.expression.terms() {
        let _ = writeln!(csv, "{},\"{}\"", t.coeff, t.settings);
    }
    Ok(Report {
        tolerance: 1e-10,
        csv,
        json: json!({
            "name": entry.name,
            "local_bound": lb,
            "quantum_value": q,
            "dictionary": dict,
            "matches_printed": printed,
            "expression": serde_json::from_str::<Value>(&entry.expression.to_json()?)?,
        }),
    })
}

fn cmd_quantum_bound(n: usize, gamma: f64, d: usize) -> Result<Report> {
    let b = optimal_quantum_bound(n, gamma)?;
    let closed = closed_form_bound(n, gamma)?.is_some();
    let value = if d == 2 { b.value } else { qudit_value(n, d, gamma)? };
    Ok(Report {
        tolerance: 1e-10,
        csv: format!("n,gamma,d,phi,value,closed_form\n{n},{gamma},{d},{},{value},{closed}\n", b.phi),
        json: json!({ "n": n, "gamma": gamma, "d": d, "phi": b.phi, "value": value, "closed_form": closed }),
    })
}

fn cmd_seesaw(args: &SeesawArgs, seed: u64) -> Result<Report> {
    let expr = args.source.load()?;
    let cfg = SeesawConfig::default().with_seed(seed).with_restarts(args.restarts);
    let dims = vec![args.d; expr.n()];
    let r = match args.k {
        Some(k) if k < expr.n() => kproducible_lower_bound(&expr, k, &dims, &cfg)?,
        _ => full_seesaw(&expr, &dims, &cfg)?,
    };
    let k = args.k.unwrap_or(expr.n()).min(expr.n());
    Ok(Report {
        tolerance: cfg.tol,
        csv: format!(
            "expression,k,value,partition,sweeps,converged,task\n{},{k},{},\"{}\",{},{},{}\n",
            expr.name(),
            r.value,
            r.partition,
            r.sweeps,
            r.converged,
            r.task
        ),
        json: json!({ "expression": expr.name(), "k": k, "result": serde_json::from_str::<Value>(&r.to_json()?)? }),
    })
}
