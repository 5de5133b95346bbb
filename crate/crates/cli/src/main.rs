use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hiflow::builder::BuildValidation;
use hiflow::cut_matching::congestion_bound;
use hiflow::hierarchy::validate_hierarchy_with;
use hiflow::hierarchy::ValidateConfig;
use hiflow::maxflow::dag_approx_flow_with;
use hiflow::{
    build_hierarchy, default_phi, edmonds_karp, flow_stats, generate, max_flow_exact, parse_instance,
    sparse_cut, BuildConfig, ExactConfig, Flow, FlowInstance, GenParams, Hierarchy, InstanceFile, Model,
    PrConfig, Ratio, SparseCutConfig,
};

#[derive(Parser)]
#[command(name = "hiflow", version, about = "Max-flow via push-relabel on expander hierarchies")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximum flow of an instance file.
    Solve {
        #[arg(long, value_enum, default_value_t = Algo::Exact)]
        algo: Algo,
        /// Write `f <u> <v> <amount>` lines for every edge carrying flow.
        #[arg(long)]
        flow: Option<PathBuf>,
        #[command(flatten)]
        knobs: Knobs,
        file: PathBuf,
    },
    /// Push-relabel with DAG weights; at least a sixth of the maximum.
    ApproxDag {
        #[command(flatten)]
        knobs: Knobs,
        file: PathBuf,
    },
    /// Route the instance demand with F = E or return a level cut.
    SparseCut {
        /// Congestion; defaults to ⌈2/φ⌉.
        #[arg(long)]
        kappa: Option<i64>,
        #[command(flatten)]
        knobs: Knobs,
        file: PathBuf,
    },
    /// Build an expander hierarchy and print it in the text format.
    Hierarchy {
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        knobs: Knobs,
        file: PathBuf,
    },
    /// Check a hierarchy file against a graph; prints VALID or INVALID.
    Validate {
        #[command(flatten)]
        knobs: Knobs,
        hierarchy: PathBuf,
        graph: PathBuf,
    },
    /// Generate an instance.
    Gen {
        #[arg(value_enum)]
        model: ModelArg,
        /// Vertices; clique size for dumbbell, rows for grid.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Arcs; columns for grid.
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        max_cap: i64,
        #[arg(long, default_value_t = 3)]
        bridge: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run solvers over instance files (or a generated batch) and print TSV.
    Bench {
        /// Generated random instances used when no files are given.
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 80)]
        m: usize,
        #[command(flatten)]
        knobs: Knobs,
        files: Vec<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Knobs {
    /// Expansion parameter as p/q.
    #[arg(long)]
    phi: Option<Ratio>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    debug_invariants: bool,
    #[arg(long = "c-h", default_value_t = 8.0)]
    c_h: f64,
    #[arg(long = "c-6", default_value_t = 1.0)]
    c_6: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_h: i64,
}

impl Knobs {
    fn phi(&self, n: usize) -> Ratio {
        self.phi.unwrap_or_else(|| default_phi(n))
    }

    fn sparse(&self) -> SparseCutConfig {
        SparseCutConfig {
            c6: self.c_6,
            max_h: self.max_h,
            debug_invariants: self.debug_invariants,
            ..SparseCutConfig::default()
        }
    }

    fn build(&self) -> BuildConfig {
        let mut b = BuildConfig::default();
        b.cm.sparse = self.sparse();
        b
    }

    fn exact(&self) -> ExactConfig {
        let mut build = self.build();
        build.validation = BuildValidation::Structural;
        ExactConfig {
            phi: self.phi,
            c_h: self.c_h,
            build,
            debug_invariants: self.debug_invariants,
            ..ExactConfig::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Exact,
    Ek,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Dag,
    Random,
    Dumbbell,
    Cycle,
    Grid,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Dag => Model::Dag,
            ModelArg::Random => Model::Random,
            ModelArg::Dumbbell => Model::Dumbbell,
            ModelArg::Cycle => Model::Cycle,
            ModelArg::Grid => Model::Grid,
        }
    }
}

enum Failure {
    /// Bad input: unreadable or malformed files, bad parameters.
    Input(String),
    /// The solver or builder gave up.
    Solver(String),
    /// `validate` found a problem; the report still goes to stdout.
    Invalid(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Solver(_) | Failure::Invalid(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

fn solver<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Solver(e.to_string())
}

fn read_instance(path: &Path) -> Result<(InstanceFile, FlowInstance), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let file = parse_instance(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let inst = file.instance().map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((file, inst))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn flow_lines(inst: &FlowInstance, f: &Flow) -> String {
    let mut s = String::new();
    for (e, u, v) in inst.graph.edges() {
        if f.get(e) > 0 {
            let _ = writeln!(s, "f {} {} {}", u + 1, v + 1, f.get(e));
        }
    }
    s
}

fn run(cmd: Cmd) -> Result<String, Failure> {
    let mut out = String::new();
    match cmd {
        Cmd::Solve { algo, flow, knobs, file } => {
            let (_, inst) = read_instance(&file)?;
            let f = match algo {
                Algo::Ek => {
                    let _ = writeln!(out, "c hiflow solve algo ek seed {}", knobs.seed);
                    edmonds_karp(&inst)
                }
                Algo::Exact => {
                    let phi = knobs.phi(inst.n());
                    let _ = writeln!(out, "c hiflow solve algo exact seed {} phi {phi}", knobs.seed);
                    let r = max_flow_exact(&inst, knobs.seed, &knobs.exact()).map_err(solver)?;
                    if let Some(v) = r.violations.first() {
                        return Err(Failure::Solver(format!("invariant violated: {v}")));
                    }
                    let _ = writeln!(out, "c iterations {} safety-net {}", r.iterations.len(), r.safety_net_uses);
                    r.flow
                }
            };
            let _ = writeln!(out, "value {}", flow_stats(&inst, &f).value);
            if let Some(path) = flow {
                write_file(&path, &flow_lines(&inst, &f))?;
            }
        }
        Cmd::ApproxDag { knobs, file } => {
            let (_, inst) = read_instance(&file)?;
            let cfg = PrConfig {
                debug_invariants: knobs.debug_invariants,
                ..PrConfig::default()
            };
            let (f, r) = dag_approx_flow_with(&inst, &cfg).map_err(solver)?;
            if let Some(v) = r.violations.first() {
                return Err(Failure::Solver(format!("invariant violated: {v}")));
            }
            let _ = writeln!(out, "c hiflow approx-dag seed {}", knobs.seed);
            let _ = writeln!(out, "c h {} augmentations {} relabels {}", r.h, r.augment_count, r.relabels);
            let _ = writeln!(out, "value {}", flow_stats(&inst, &f).value);
        }
        Cmd::SparseCut { kappa, knobs, file } => {
            let (_, inst) = read_instance(&file)?;
            let (n, m) = (inst.n(), inst.graph.m());
            let phi = knobs.phi(n);
            let kappa = kappa.unwrap_or_else(|| congestion_bound(phi, 1));
            // F = E leaves G ∖ F empty, so the trivial hierarchy fits
            let h = Hierarchy {
                level: vec![0; m],
                eta: 0,
                tau: (0..n).collect(),
            };
            let r = sparse_cut(&inst, kappa, &vec![true; m], &h, phi, &knobs.sparse()).map_err(solver)?;
            let _ = writeln!(out, "c hiflow sparse-cut seed {} phi {phi} kappa {kappa} h {}", knobs.seed, r.h);
            let _ = writeln!(out, "value {}", r.value);
            let _ = writeln!(out, "demand {}", r.demand);
            match &r.cut {
                None => {
                    let _ = writeln!(out, "cut none");
                }
                Some(c) => {
                    let side: Vec<String> = (0..n).filter(|&v| c.side[v]).map(|v| (v + 1).to_string()).collect();
                    let _ = writeln!(out, "cut {}", side.join(" "));
                    let _ = writeln!(out, "cut-out {}", c.out_cap);
                    let _ = writeln!(out, "cut-in {}", c.in_cap);
                    let _ = writeln!(out, "vol {} {}", c.vol_s, c.vol_rest);
                    let _ = writeln!(out, "objective {}", c.objective);
                }
            }
        }
        Cmd::Hierarchy { out: path, knobs, file } => {
            let (_, inst) = read_instance(&file)?;
            let phi = knobs.phi(inst.n());
            let r = build_hierarchy(&inst.graph, &inst.cap, phi, knobs.seed, &knobs.build()).map_err(solver)?;
            let text = r.hierarchy.to_text();
            let _ = writeln!(out, "c hiflow hierarchy seed {} phi {phi}", knobs.seed);
            let _ = writeln!(out, "c eta {} attempts {} restarts {}", r.hierarchy.eta, r.attempts, r.restarts);
            let _ = writeln!(out, "c cuts {} from-check {} rounds {}", r.cut_events, r.check_cuts, r.game_rounds);
            if let Some(rep) = &r.validation {
                let verdict = if rep.is_valid() { "VALID" } else { "INVALID" };
                let exact = if rep.all_exact() { "exact" } else { "sampled" };
                let _ = writeln!(out, "c {verdict} {exact} components {}", rep.components.len());
            }
            match path {
                Some(p) => write_file(&p, &text)?,
                None => out.push_str(&text),
            }
        }
        Cmd::Validate { knobs, hierarchy, graph } => {
            let (_, inst) = read_instance(&graph)?;
            let text = fs::read_to_string(&hierarchy)
                .map_err(|e| Failure::Input(format!("{}: {e}", hierarchy.display())))?;
            let h = Hierarchy::parse_text(&text, inst.n(), inst.graph.m())
                .map_err(|e| Failure::Input(format!("{}: {e}", hierarchy.display())))?;
            let phi = knobs.phi(inst.n());
            let cfg = ValidateConfig {
                seed: knobs.seed,
                ..ValidateConfig::default()
            };
            let rep = validate_hierarchy_with(&inst.graph, &inst.cap, &h, phi, &cfg);
            let _ = writeln!(out, "c hiflow validate seed {} phi {phi}", knobs.seed);
            let exact = rep.components.iter().filter(|c| c.exact).count();
            let _ = writeln!(out, "c components {} exact {exact}", rep.components.len());
            for f in &rep.failures {
                let _ = writeln!(out, "c {f}");
            }
            if !rep.is_valid() {
                out.push_str("INVALID\n");
                return Err(Failure::Invalid(out));
            }
            out.push_str("VALID\n");
        }
        Cmd::Gen {
            model,
            n,
            m,
            max_cap,
            bridge,
            seed,
            out: path,
        } => {
            let p = GenParams { n, m, max_cap, bridge };
            let f = generate(model.into(), &p, seed).map_err(|e| Failure::Input(e.to_string()))?;
            match path {
                Some(p) => write_file(&p, &f.to_text())?,
                None => out.push_str(&f.to_text()),
            }
        }
        Cmd::Bench {
            count,
            n,
            m,
            knobs,
            files,
        } => {
            let mut batch = Vec::new();
            for p in &files {
                let (f, inst) = read_instance(p)?;
                let name = if f.name.is_empty() { p.display().to_string() } else { f.name };
                batch.push((name, inst));
            }
            if files.is_empty() {
                let p = GenParams { n, m, max_cap: 20, bridge: 3 };
                for s in 0..count {
                    let f = generate(Model::Random, &p, knobs.seed.wrapping_add(s)).map_err(|e| Failure::Input(e.to_string()))?;
                    let inst = f.instance().map_err(|e| Failure::Input(e.to_string()))?;
                    batch.push((f.name, inst));
                }
            }
            let _ = writeln!(out, "c hiflow bench seed {}", knobs.seed);
            out.push_str("instance\talgo\tvalue\twall_ms\taugmentations\trelabels\n");
            let cfg = knobs.exact();
            for (name, inst) in &batch {
                let t = Instant::now();
                let f = edmonds_karp(inst);
                let ms = t.elapsed().as_secs_f64() * 1e3;
                let _ = writeln!(out, "{name}\tek\t{}\t{ms:.3}\t-\t-", flow_stats(inst, &f).value);
                let t = Instant::now();
                let r = max_flow_exact(inst, knobs.seed, &cfg).map_err(solver)?;
                let ms = t.elapsed().as_secs_f64() * 1e3;
                let aug: u64 = r.iterations.iter().map(|i| i.augmentations).sum();
                let rel: u64 = r.iterations.iter().map(|i| i.relabels).sum();
                let _ = writeln!(out, "{name}\texact\t{}\t{ms:.3}\t{aug}\t{rel}", r.value);
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(report)) => {
            print!("{report}");
            ExitCode::from(1)
        }
        Err(e) => {
            if let Failure::Input(msg) | Failure::Solver(msg) = &e {
                eprintln!("hiflow: {msg}");
            }
            ExitCode::from(e.code())
        }
    }
}
