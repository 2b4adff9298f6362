use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use msplab::lab::{
    self, judge, minimize, run_differential_with, scaling_family, vec_metric, CampaignConfig, CampaignControl,
    GenShape, LabError, MinimizeBudget, VerdictKind,
};
use msplab::oracle::verify_circuit;
use msplab::*;

const EXIT_CODES: &str = "\
Exit codes:
  0  command ran (whatever the YES/NO verdict)
  2  usage error
  3  file could not be read or written
  4  parse error in an instance, graph or config file
  5  instance failed validation
  6  solver error (sweep limit reached)
  7  minimize: the input is not a candidate counterexample
  8  fuzz: a necessity bug (solver NO, oracle YES) was found";

#[derive(Parser)]
#[command(name = "msplab", version, about = "Labeled multistage-graph simple path lab", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance with the Z-H algorithm.
    Solve {
        /// Instance file, `-` for stdin.
        file: PathBuf,
        /// Write deletion records as JSON lines to this file (`-` for stdout).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        max_sweeps: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustive search for a simple path, or a Hamilton circuit with --hamilton.
    Oracle {
        /// Instance file (or graph file with --hamilton), `-` for stdin.
        file: PathBuf,
        #[arg(long)]
        hamilton: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Reduce an undirected graph to a multistage instance.
    Reduce {
        /// Graph file, `-` for stdin.
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        pivot: u32,
        /// Output path; stdout by default.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random instance.
    GenMsp {
        #[arg(long, default_value_t = 6)]
        stages: usize,
        /// Vertices per inner stage.
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Explicit comma-separated widths for stages 0..=L; overrides --stages/--width.
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0.5)]
        edge_density: f64,
        #[arg(long, default_value_t = 0.5)]
        eset_density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random undirected graph.
    GenGraph {
        #[arg(short, long)]
        n: u32,
        #[arg(short, long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a differential campaign from a config file.
    Fuzz {
        #[arg(long)]
        config: PathBuf,
        /// Continue from the archive's checkpoint.
        #[arg(long)]
        resume: bool,
        /// Archive directory; overrides the config and MSPLAB_ARCHIVE_DIR.
        #[arg(long)]
        archive: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Also write the report as JSON lines to this file.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
    /// Shrink a candidate counterexample.
    Minimize {
        file: PathBuf,
        /// Maximum predicate evaluations.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[command(flatten)]
        oracle: BudgetArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the solver over a family of growing instances.
    Bench {
        #[arg(long, default_value_t = 6)]
        stages: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7")]
        widths: Vec<usize>,
        #[arg(long, default_value_t = 0.8)]
        eset_density: f64,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Print one JSON record instead of text.
    #[arg(long)]
    machine: bool,
}

#[derive(Args)]
struct BudgetArgs {
    /// Node expansion cap for the oracle.
    #[arg(long, default_value_t = Budget::DEFAULT_NODES)]
    nodes: u64,
    /// Wall-clock cap for the oracle in milliseconds.
    #[arg(long)]
    millis: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.nodes,
            max_time: self.millis.map(std::time::Duration::from_millis),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Parse(String),
    Invalid(String),
    Solver(String),
    PredicateFalse,
    NecessityBug(u64),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 3,
            Failure::Parse(_) => 4,
            Failure::Invalid(_) => 5,
            Failure::Solver(_) => 6,
            Failure::PredicateFalse => 7,
            Failure::NecessityBug(_) => 8,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) | Failure::Parse(m) | Failure::Invalid(m) | Failure::Solver(m) => m.clone(),
            Failure::PredicateFalse => "input is not a candidate counterexample".into(),
            Failure::NecessityBug(n) => format!("{n} necessity bug(s) found"),
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Io { .. } => Failure::Io(e.to_string()),
            LabError::Config { .. } | LabError::Parse { .. } => Failure::Parse(e.to_string()),
            LabError::Solver { .. } => Failure::Solver(e.to_string()),
            LabError::PredicateFalse => Failure::PredicateFalse,
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        _ => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

/// Parses and validates an instance.
fn load_instance(path: &Path) -> Result<MultistageGraph, Failure> {
    let text = read_input(path)?;
    let g = parse_instance(&text).map_err(|e| match e {
        FormatError::Invalid(_) => Failure::Invalid(format!("{}: {e}", path.display())),
        FormatError::Syntax { .. } => Failure::Parse(format!("{}: {e}", path.display())),
    })?;
    let report = g.validate();
    if !report.ok() {
        return Err(Failure::Invalid(format!("{}: {report}", path.display())));
    }
    Ok(g)
}

fn load_graph(path: &Path) -> Result<UndirectedGraph, Failure> {
    parse_ugraph(&read_input(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn names(g: &MultistageGraph, path: &[VertexId]) -> Vec<String> {
    path.iter().map(|&v| g.name(v).to_string()).collect()
}

fn solve(file: &Path, trace: Option<&Path>, max_sweeps: Option<usize>, machine: bool) -> Result<(), Failure> {
    let g = load_instance(file)?;
    let opts = SolveOptions { max_sweeps };
    let (res, log) = if trace.is_some() {
        let (r, l) = zh_trace(&g, opts).map_err(|e| Failure::Solver(e.to_string()))?;
        (r, Some(l))
    } else {
        (zh_solve(&g, opts).map_err(|e| Failure::Solver(e.to_string()))?, None)
    };
    if let (Some(path), Some(log)) = (trace, log) {
        write_output(Some(path), &log.to_jsonl())?;
    }
    let text = if machine {
        let mut v = lab::campaign::zh_json(&g, &res);
        v["record"] = json!("solve");
        v.to_string() + "\n"
    } else {
        format!(
            "{}\ncomp(E(D), D, R) = {} ({} edges)\nsweeps {} of at most {}\n",
            res.answer,
            g.describe(&res.final_comp_ed),
            res.final_comp_ed.len(),
            res.metrics.outer_sweeps,
            res.metrics.sweep_bound
        )
    };
    write_output(None, &text)
}

fn oracle(file: &Path, hamilton: bool, budget: Budget, machine: bool) -> Result<(), Failure> {
    let (answer, witness, nodes) = if hamilton {
        let ug = load_graph(file)?;
        let r = oracle_hamilton(&ug, budget);
        debug_assert!(r.witness.as_ref().is_none_or(|c| verify_circuit(&ug, c)));
        let w = r.witness.map(|c| c.iter().map(u32::to_string).collect::<Vec<_>>());
        (r.answer, w, r.nodes_expanded)
    } else {
        let g = load_instance(file)?;
        let r = oracle_simple_path(&g, budget);
        (r.answer, r.witness.map(|w| names(&g, &w)), r.nodes_expanded)
    };
    let text = if machine {
        json!({"record": "oracle", "answer": answer, "witness": witness, "nodes_expanded": nodes}).to_string() + "\n"
    } else {
        let mut s = format!("{answer}\n");
        if let Some(w) = witness {
            s.push_str(&format!("witness {}\n", w.join("-")));
        }
        s.push_str(&format!("nodes {nodes}\n"));
        s
    };
    write_output(None, &text)
}

fn fuzz(
    config: &Path,
    resume: bool,
    archive: Option<PathBuf>,
    threads: Option<usize>,
    jsonl: Option<&Path>,
) -> Result<(), Failure> {
    let mut cfg = CampaignConfig::parse(&read_input(config)?).map_err(Failure::from)?;
    if let Some(a) = archive {
        cfg.archive = Some(a);
    } else if cfg.archive.is_none() {
        cfg.archive = std::env::var_os("MSPLAB_ARCHIVE_DIR").map(PathBuf::from);
    }
    if let Some(t) = threads {
        cfg.threads = t.max(1);
    }
    let control = CampaignControl {
        resume,
        ..CampaignControl::default()
    };
    let report = run_differential_with(&cfg, &control, |r| {
        log::info!("{} instances, {} findings", r.instances, r.findings.len());
    })?;
    write_output(None, &report.to_table())?;
    if let Some(path) = jsonl {
        write_output(Some(path), &report.to_jsonl())?;
    }
    if let Some(root) = &cfg.archive {
        let path = root.join("report.jsonl");
        fs::write(&path, report.to_jsonl()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    match report.count(VerdictKind::BugNecessity) {
        0 => Ok(()),
        n => Err(Failure::NecessityBug(n)),
    }
}

fn shrink(file: &Path, budget: usize, oracle: Budget, output: Option<&Path>) -> Result<(), Failure> {
    let g = load_instance(file)?;
    let pred = |h: &MultistageGraph| {
        judge(h, oracle, None).is_ok_and(|(v, _, _)| v.kind == VerdictKind::CandidateCounterexample)
    };
    let out = minimize(&g, pred, MinimizeBudget { max_evaluations: budget })?;
    eprintln!(
        "vec {} -> {}, {} moves, {} evaluations{}",
        vec_metric(&g),
        vec_metric(&out.graph),
        out.accepted.len(),
        out.evaluations,
        if out.exhausted { ", budget exhausted" } else { "" }
    );
    write_output(output, &serialize_instance(&out.graph))
}

fn bench(stages: usize, widths: &[usize], p: f64, reps: usize, seed: u64, machine: bool) -> Result<(), Failure> {
    let r = scaling_family(stages, widths, p, reps, seed)?;
    let text = if machine {
        serde_json::to_string(&r).expect("report serializes") + "\n"
    } else {
        let mut s = format!("{:>6} {:>8} {:>12} {:>7} {:>5}\n", "width", "edges", "median s", "sweeps", "yes");
        for pt in &r.points {
            s.push_str(&format!(
                "{:>6} {:>8.0} {:>12.6} {:>7} {:>5}\n",
                pt.width, pt.edges, pt.seconds, pt.max_sweeps, pt.yes
            ));
        }
        s.push_str(&format!(
            "log-log slope {:.2}; sweep bound {}\n",
            r.slope,
            if r.within_bound { "respected" } else { "EXCEEDED" }
        ));
        s
    };
    write_output(None, &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            file,
            trace,
            max_sweeps,
            out,
        } => solve(&file, trace.as_deref(), max_sweeps, out.machine),
        Command::Oracle {
            file,
            hamilton,
            budget,
            out,
        } => oracle(&file, hamilton, budget.budget(), out.machine),
        Command::Reduce { file, pivot, output } => {
            let ug = load_graph(&file)?;
            let (g, _) = reduce_hc_to_msp(&ug, pivot).map_err(|e| Failure::Invalid(e.to_string()))?;
            write_output(output.as_deref(), &serialize_instance(&g))
        }
        Command::GenMsp {
            stages,
            width,
            widths,
            edge_density,
            eset_density,
            seed,
            output,
        } => {
            let widths = widths.unwrap_or_else(|| {
                (0..=stages)
                    .map(|s| if s == 0 || s == stages { 1 } else { width })
                    .collect()
            });
            let shape = GenShape {
                stages: widths.len().saturating_sub(1),
                widths,
                edge_density,
                eset_density,
                seed,
            };
            let g = lab::gen_msp(&shape)?;
            write_output(output.as_deref(), &serialize_instance(&g))
        }
        Command::GenGraph { n, q, seed, output } => {
            let ug = lab::gen_ugraph(n, q, seed)?;
            write_output(output.as_deref(), &serialize_ugraph(&ug))
        }
        Command::Fuzz {
            config,
            resume,
            archive,
            threads,
            jsonl,
        } => fuzz(&config, resume, archive, threads, jsonl.as_deref()),
        Command::Minimize {
            file,
            budget,
            oracle,
            output,
        } => shrink(&file, budget, oracle.budget(), output.as_deref()),
        Command::Bench {
            stages,
            widths,
            eset_density,
            reps,
            seed,
            out,
        } => bench(stages, &widths, eset_density, reps, seed, out.machine),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("msplab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
