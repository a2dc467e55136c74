//! `treesize` — scriptable front end for the state-tree workbench.
//!
//! Every subcommand prints a report header echoing the seed, then
//! fixed-order fields with floats at 15 significant digits, so runs can be
//! diffed. All randomized paths are keyed by `--seed`.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

use treesize::analysis::{
    minimize_tree_size, persistency_upper, product_expansion_check, schmidt_rank,
    slocc_tree_size_consistency, symmetry_eigencheck, EigenCheck, GridSymmetryOp, MinimizeConfig,
    MinimizeOutcome,
};
use treesize::circuit::ProtocolInstance;
use treesize::dense::LocalOp;
use treesize::formula::from_tree;
use treesize::io;
use treesize::matrices::{hadamard_bound, max_abs_determinant, nonsingular_fraction};
use treesize::mps::{cluster_mps, random_mps, Mps};
use treesize::states::{
    basis_expansion_tree, immanant_state_laplace_tree, immanant_state_leibnitz_tree,
    immanant_state_vector, named_state, split_decomposition_tree, NamedKind,
};
use treesize::{DenseState, SignFunction, StateTree};

#[derive(Parser)]
#[command(name = "treesize", version, about = "Rooted-tree representations of multiqubit states")]
struct Cli {
    /// Seed for every randomized path (echoed in each report header).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap worker threads (0 keeps the library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a named/immanant/expansion tree and write its document.
    Build(BuildArgs),
    /// Evaluate a tree document to amplitudes.
    Eval(EvalArgs),
    /// Convert a tree document to its multilinear coefficient formula.
    Formula(FormulaArgs),
    /// Compile a matrix product state into a tree with a leaf-count report.
    CompileMps(CompileMpsArgs),
    /// Exhaustive (0,1)-matrix census: nonsingular fraction and max |det|.
    SurveyMatrices(SurveyArgs),
    /// Simulate the ancilla-measurement preparation protocol.
    Circuit(CircuitArgs),
    /// Symmetry, entanglement, minimization, and persistency reports.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
}

#[derive(Args)]
struct BuildArgs {
    /// One of: ghz, w, cluster, det, per, basis, split.
    #[arg(long)]
    state: String,
    /// Qubit count for ghz/w/cluster.
    #[arg(long)]
    n: Option<usize>,
    /// Grid side for det/per.
    #[arg(long)]
    m: Option<usize>,
    /// Tree construction for det/per: laplace or leibnitz.
    #[arg(long, default_value = "laplace")]
    construction: String,
    /// Dense-state document to expand (basis/split).
    #[arg(long)]
    from: Option<PathBuf>,
    /// Output path for the tree document.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output path for a DOT rendering.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Tree document to evaluate.
    tree: PathBuf,
    /// Write the amplitudes as a dense-state document.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print every amplitude instead of only the nonzero ones.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct FormulaArgs {
    /// Tree document to convert.
    tree: PathBuf,
}

#[derive(Args)]
struct CompileMpsArgs {
    /// Read the chain from an mps/1 document.
    #[arg(long, conflicts_with_all = ["cluster", "random"])]
    input: Option<PathBuf>,
    /// Use the bond-dimension-2 cluster chain.
    #[arg(long)]
    cluster: bool,
    /// Use a random chain (entries uniform on the complex unit box).
    #[arg(long, conflicts_with = "cluster")]
    random: bool,
    /// Site count for --cluster/--random.
    #[arg(long)]
    n: Option<usize>,
    /// Internal bond dimension for --random.
    #[arg(long, default_value_t = 2)]
    bond_dim: usize,
    /// Output path for the compiled tree document.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurveyArgs {
    /// Largest side to survey (each k ≤ m gets a row).
    #[arg(long)]
    m: usize,
    /// Allow the m = 5 exhaustive run (2^25 matrices).
    #[arg(long)]
    long: bool,
}

#[derive(Args)]
struct CircuitArgs {
    /// Grid side (m ≤ 3).
    #[arg(long)]
    m: usize,
    /// Ancilla outcome bits, e.g. 010 (0 = +, 1 = −). Omit to verify all.
    #[arg(long)]
    outcome: Option<String>,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Eigenvalues of row/column swaps and transposition on a grid state.
    Symmetry {
        #[command(flatten)]
        source: StateSource,
        /// Emit csv rows instead of aligned text.
        #[arg(long)]
        csv: bool,
    },
    /// Schmidt rank across a bipartition.
    Schmidt {
        #[command(flatten)]
        source: StateSource,
        /// Comma-separated qubit subset, e.g. 1,2.
        #[arg(long)]
        cut: String,
    },
    /// Pairwise product-expansion witnesses for the m! Leibnitz terms.
    Expansion {
        #[arg(long)]
        m: usize,
    },
    /// Heuristic smallest-tree search (upper bound on the tree size).
    Minimize {
        #[command(flatten)]
        source: StateSource,
        #[arg(long, default_value_t = 12)]
        budget: usize,
        #[arg(long, default_value_t = 24)]
        restarts: usize,
        /// Write the best tree found.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measurement-sequence search for an upper bound on persistency.
    Persistency {
        #[command(flatten)]
        source: StateSource,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Matched-budget minimization of a state vs a random ILO image.
    Slocc {
        #[command(flatten)]
        source: StateSource,
        #[arg(long, default_value_t = 12)]
        budget: usize,
        #[arg(long, default_value_t = 24)]
        restarts: usize,
    },
}

/// Where analyze/build subcommands get their dense state from.
#[derive(Args)]
struct StateSource {
    /// Dense-state document file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Named state: bell, ghz, w, cluster, det, per.
    #[arg(long)]
    state: Option<String>,
    /// Qubit count for ghz/w/cluster.
    #[arg(long)]
    n: Option<usize>,
    /// Grid side for det/per.
    #[arg(long)]
    m: Option<usize>,
}

impl StateSource {
    fn resolve(&self) -> Result<DenseState> {
        if let Some(path) = &self.input {
            let text = read_file(path)?;
            return Ok(io::deserialize_dense(&text)?);
        }
        let name = self
            .state
            .as_deref()
            .ok_or_else(|| anyhow!("provide --input FILE or --state NAME"))?;
        let need_n = || {
            self.n
                .ok_or_else(|| anyhow!("--state {name} requires --n"))
        };
        let need_m = || {
            self.m
                .ok_or_else(|| anyhow!("--state {name} requires --m"))
        };
        match name {
            "bell" => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                Ok(DenseState::new(
                    2,
                    vec![
                        Complex64::new(r, 0.0),
                        Complex64::ZERO,
                        Complex64::ZERO,
                        Complex64::new(r, 0.0),
                    ],
                )?)
            }
            "ghz" => Ok(named_state(NamedKind::Ghz, need_n()?)?.1),
            "w" => Ok(named_state(NamedKind::W, need_n()?)?.1),
            "cluster" => Ok(named_state(NamedKind::ClusterChain, need_n()?)?.1),
            "det" => Ok(immanant_state_vector(need_m()?, &SignFunction::Determinant)?),
            "per" => Ok(immanant_state_vector(need_m()?, &SignFunction::Permanent)?),
            other => bail!("unknown state name {other:?}"),
        }
    }
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore failure: the pool may already be initialized in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Build(args) => build(cli, args),
        Command::Eval(args) => eval(cli, args),
        Command::Formula(args) => formula(cli, args),
        Command::CompileMps(args) => compile_mps(cli, args),
        Command::SurveyMatrices(args) => survey(cli, args),
        Command::Circuit(args) => circuit(cli, args),
        Command::Analyze(args) => analyze(cli, args),
    }
}

fn header(cli: &Cli, subcommand: &str) {
    println!("# treesize {subcommand}");
    println!("# seed: {}", cli.seed);
}

/// 15 significant digits, fixed exponent form.
fn fmt_f(x: f64) -> String {
    format!("{x:.14e}")
}

fn fmt_c(z: Complex64) -> String {
    format!("({}, {})", fmt_f(z.re), fmt_f(z.im))
}

fn bits_of(idx: usize, n: usize) -> String {
    (0..n)
        .map(|p| if (idx >> (n - 1 - p)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_tree(path: &Path) -> Result<StateTree> {
    let tree = io::deserialize_tree(&read_file(path)?)?;
    let report = tree.validate();
    if !report.ok() {
        bail!("invalid tree in {}:\n{report}", path.display());
    }
    Ok(tree)
}

fn sign_of(name: &str) -> Result<SignFunction> {
    match name {
        "det" => Ok(SignFunction::Determinant),
        "per" => Ok(SignFunction::Permanent),
        other => bail!("expected det or per, got {other:?}"),
    }
}

fn build(cli: &Cli, args: &BuildArgs) -> Result<()> {
    header(cli, "build");
    let need_n = || args.n.ok_or_else(|| anyhow!("--state {} requires --n", args.state));
    let need_m = || args.m.ok_or_else(|| anyhow!("--state {} requires --m", args.state));
    let tree = match args.state.as_str() {
        "ghz" => named_state(NamedKind::Ghz, need_n()?)?.0,
        "w" => named_state(NamedKind::W, need_n()?)?.0,
        "cluster" => named_state(NamedKind::ClusterChain, need_n()?)?.0,
        "det" | "per" => {
            let sign = sign_of(&args.state)?;
            match args.construction.as_str() {
                "laplace" => immanant_state_laplace_tree(need_m()?, &sign)?,
                "leibnitz" => immanant_state_leibnitz_tree(need_m()?, &sign, false)?,
                other => bail!("unknown construction {other:?} (laplace or leibnitz)"),
            }
        }
        "basis" | "split" => {
            let path = args
                .from
                .as_ref()
                .ok_or_else(|| anyhow!("--state {} requires --from FILE", args.state))?;
            let dense = io::deserialize_dense(&read_file(path)?)?;
            if args.state == "basis" {
                basis_expansion_tree(&dense)?
            } else {
                split_decomposition_tree(&dense)?
            }
        }
        other => bail!("unknown state {other:?}"),
    };
    println!("state: {}", args.state);
    println!("n: {}", tree.n());
    println!("leaf_count: {}", tree.leaf_count()?);
    if let Some(out) = &args.out {
        write_file(out, &io::serialize_tree(&tree))?;
        println!("tree_document: {}", out.display());
    }
    if let Some(dot) = &args.dot {
        write_file(dot, &io::tree_to_dot(&tree))?;
        println!("dot: {}", dot.display());
    }
    Ok(())
}

fn eval(cli: &Cli, args: &EvalArgs) -> Result<()> {
    header(cli, "eval");
    let tree = load_tree(&args.tree)?;
    let state = tree.evaluate()?;
    println!("n: {}", state.n());
    println!("leaf_count: {}", tree.leaf_count()?);
    let indices: Vec<usize> = if args.all {
        (0..state.amps().len()).collect()
    } else {
        state.support_indices(1e-12)
    };
    println!("amplitudes: {}", indices.len());
    for idx in indices {
        println!("|{}> {}", bits_of(idx, state.n()), fmt_c(state.amp(idx)));
    }
    if let Some(out) = &args.out {
        write_file(out, &io::serialize_dense(&state))?;
        println!("dense_document: {}", out.display());
    }
    Ok(())
}

fn formula(cli: &Cli, args: &FormulaArgs) -> Result<()> {
    header(cli, "formula");
    let tree = load_tree(&args.tree)?;
    let f = from_tree(&tree)?;
    println!("tree_leaf_count: {}", tree.leaf_count()?);
    println!("formula_size: {}", f.size());
    println!("multilinear: {}", f.is_multilinear());
    println!("formula: {f}");
    Ok(())
}

fn compile_mps(cli: &Cli, args: &CompileMpsArgs) -> Result<()> {
    header(cli, "compile-mps");
    let mps: Mps = if let Some(path) = &args.input {
        io::deserialize_mps(&read_file(path)?)?
    } else if args.cluster {
        let n = args.n.ok_or_else(|| anyhow!("--cluster requires --n"))?;
        cluster_mps(n)?
    } else if args.random {
        let n = args.n.ok_or_else(|| anyhow!("--random requires --n"))?;
        random_mps(n, args.bond_dim, cli.seed)?
    } else {
        bail!("choose --input FILE, --cluster, or --random");
    };
    let tree = mps.compile_to_tree()?;
    println!("n: {}", mps.n());
    println!("max_bond: {}", mps.max_bond());
    println!("leaf_count: {}", tree.leaf_count()?);
    println!("leaf_bound: {}", mps.leaf_bound());
    if mps.n() <= 16 {
        let overlap = tree.evaluate()?.overlap(&mps.contract()?);
        println!("contraction_overlap: {}", fmt_f(overlap));
    } else {
        println!("contraction_overlap: skipped (n > 16)");
    }
    if let Some(out) = &args.out {
        write_file(out, &io::serialize_tree(&tree))?;
        println!("tree_document: {}", out.display());
    }
    Ok(())
}

fn survey(cli: &Cli, args: &SurveyArgs) -> Result<()> {
    header(cli, "survey-matrices");
    println!("m,total,nonsingular,fraction,max_abs_det,hadamard_bound,bound_tight");
    for k in 1..=args.m {
        let (count, fraction) = nonsingular_fraction(k, args.long)?;
        let (max_det, _) = max_abs_determinant(k, args.long)?;
        let bound = hadamard_bound(k);
        let tight = (max_det as f64 - bound).abs() < 1e-9;
        println!(
            "{k},{},{count},{},{max_det},{},{tight}",
            1u64 << (k * k),
            fmt_f(fraction),
            fmt_f(bound)
        );
    }
    Ok(())
}

fn circuit(cli: &Cli, args: &CircuitArgs) -> Result<()> {
    header(cli, "circuit");
    let protocol = ProtocolInstance::new(args.m)?;
    println!("m: {}", protocol.m());
    println!("ancillas: {}", protocol.ancilla_count());
    println!("terms: {}", protocol.factorial());
    match &args.outcome {
        Some(bits) => {
            let outcome = parse_bits(bits)?;
            let joint = protocol.prepare_superposition();
            let state = protocol.measure_ancillas(&joint, &outcome)?;
            let predicted = protocol.predicted_state(&outcome);
            println!("outcome: {bits}");
            println!(
                "signs: {}",
                protocol
                    .sign_vector(&outcome)
                    .iter()
                    .map(|s| if *s > 0 { "+" } else { "-" })
                    .collect::<String>()
            );
            println!("matches_prediction: {}", state.proportional_to(&predicted, 1e-9));
            for idx in state.support_indices(1e-12) {
                println!("|{}> {}", bits_of(idx, state.n()), fmt_c(state.amp(idx)));
            }
        }
        None => {
            let report = protocol.verify_all_outcomes()?;
            let verified = report.outcomes.iter().filter(|o| o.matched).count();
            println!("verified: {}/{}", verified, report.outcomes.len());
            for check in &report.outcomes {
                println!(
                    "outcome {} signs {} probability {} matched {}",
                    check
                        .outcome
                        .iter()
                        .map(|b| char::from(b'0' + b))
                        .collect::<String>(),
                    check
                        .signs
                        .iter()
                        .map(|s| if *s > 0 { "+" } else { "-" })
                        .collect::<String>(),
                    fmt_f(check.probability),
                    check.matched
                );
            }
            if !report.all_matched() {
                bail!("protocol verification failed");
            }
        }
    }
    Ok(())
}

fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| match c {
            '0' | '+' => Ok(0u8),
            '1' | '-' => Ok(1u8),
            other => bail!("invalid outcome bit {other:?}"),
        })
        .collect()
}

fn parse_cut(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .with_context(|| format!("invalid qubit index {part:?}"))
        })
        .collect()
}

fn analyze(cli: &Cli, args: &AnalyzeCommand) -> Result<()> {
    match args {
        AnalyzeCommand::Symmetry { source, csv } => {
            header(cli, "analyze symmetry");
            let state = source.resolve()?;
            let m = (state.n() as f64).sqrt().round() as usize;
            let mut ops: Vec<(String, GridSymmetryOp)> = Vec::new();
            for i in 1..=m {
                for j in i + 1..=m {
                    ops.push((format!("row_swap({i},{j})"), GridSymmetryOp::RowSwap(i, j)));
                    ops.push((format!("col_swap({i},{j})"), GridSymmetryOp::ColSwap(i, j)));
                }
            }
            ops.push(("transpose".to_string(), GridSymmetryOp::Transpose));
            if *csv {
                println!("op,eigenvector,eigenvalue_re,eigenvalue_im");
            }
            for (name, op) in ops {
                match symmetry_eigencheck(&state, &op)? {
                    EigenCheck::Eigenvector(l) => {
                        if *csv {
                            println!("{name},true,{},{}", fmt_f(l.re), fmt_f(l.im));
                        } else {
                            println!("{name}: eigenvalue {}", fmt_c(l));
                        }
                    }
                    EigenCheck::NotEigenvector { overlap } => {
                        if *csv {
                            println!("{name},false,,");
                        } else {
                            println!("{name}: not an eigenvector (overlap {})", fmt_f(overlap));
                        }
                    }
                }
            }
        }
        AnalyzeCommand::Schmidt { source, cut } => {
            header(cli, "analyze schmidt");
            let state = source.resolve()?;
            let subset = parse_cut(cut)?;
            let rank = schmidt_rank(&state, &subset)?;
            println!("cut: {cut}");
            println!("schmidt_rank: {rank}");
        }
        AnalyzeCommand::Expansion { m } => {
            header(cli, "analyze expansion");
            let report = product_expansion_check(*m)?;
            println!("m: {m}");
            println!("term_pairs: {}", report.term_pairs);
            println!("witnessed: {}", report.witnesses.len());
            println!("all_witnessed: {}", report.all_witnessed());
            println!("schmidt_measure: {}", fmt_f(report.schmidt_measure));
        }
        AnalyzeCommand::Minimize {
            source,
            budget,
            restarts,
            out,
        } => {
            header(cli, "analyze minimize");
            let state = source.resolve()?;
            let config = MinimizeConfig {
                size_budget: *budget,
                restarts: *restarts,
                seed: cli.seed,
                ..MinimizeConfig::default()
            };
            match minimize_tree_size(&state, &config)? {
                MinimizeOutcome::Found(rep) => {
                    println!("found: true");
                    println!("leaf_count: {}", rep.leaf_count);
                    println!("residual: {}", fmt_f(rep.residual));
                    println!("skeletons_tried: {}", rep.skeletons_tried);
                    if let Some(path) = out {
                        write_file(path, &io::serialize_tree(&rep.tree))?;
                        println!("tree_document: {}", path.display());
                    }
                }
                MinimizeOutcome::NotFound { size_budget } => {
                    println!("found: false");
                    println!("message: no representation found <= {size_budget} leaves");
                }
            }
        }
        AnalyzeCommand::Persistency { source, trials } => {
            header(cli, "analyze persistency");
            let state = source.resolve()?;
            let report = persistency_upper(&state, *trials, cli.seed)?;
            println!("upper_bound: {}", report.upper);
            println!(
                "grid_exhausted: {}",
                report
                    .grid_exhausted
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            for m in &report.witness {
                println!(
                    "measure qubit {} theta {} phi {}",
                    m.qubit,
                    fmt_f(m.theta),
                    fmt_f(m.phi)
                );
            }
        }
        AnalyzeCommand::Slocc {
            source,
            budget,
            restarts,
        } => {
            header(cli, "analyze slocc");
            let state = source.resolve()?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let ops: Vec<LocalOp> = (0..state.n())
                .map(|_| LocalOp::random_invertible(&mut rng))
                .collect();
            let config = MinimizeConfig {
                size_budget: *budget,
                restarts: *restarts,
                seed: cli.seed,
                ..MinimizeConfig::default()
            };
            let report = slocc_tree_size_consistency(&state, &ops, &config)?;
            let fmt_outcome = |o: &MinimizeOutcome| match o.found_size() {
                Some(size) => size.to_string(),
                None => "none".to_string(),
            };
            println!("state_size: {}", fmt_outcome(&report.state_outcome));
            println!("image_size: {}", fmt_outcome(&report.image_outcome));
            println!("sizes_equal: {}", report.sizes_equal());
            println!(
                "mapped_hit_ok: {}",
                report
                    .mapped_hit_ok
                    .map(|b| b.to_string())
                    .unwrap_or_else(|| "n/a".to_string())
            );
        }
    }
    Ok(())
}
