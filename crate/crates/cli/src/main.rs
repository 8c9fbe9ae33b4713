use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use likit::embeddings::{branch, pullback, ToralEmbedding, PRESETS};
use likit::lattice_auts::{weight_multiset_stabilizer, SearchConfig};
use likit::linalg::{format_rational, lattice_index};
use likit::report::{run_suite, SuiteOptions, SUITES};
use likit::reps::{freudenthal_weights, IrrepLabel, WeightMultiset, DEFAULT_REP_CAP};
use likit::roots::RootSystem;
use likit::trace::{membership, polarized_lie_traces, MatrixAlgebra, MembershipConfig, TracePolynomial};
use likit::Error;

/// Exit code for usage and I/O problems.
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "likit", version, about = "Exact computations with root systems, weights and trace invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Root system data.
    Rootsys {
        #[command(subcommand)]
        action: RootsysAction,
    },
    /// Weights of irreducible representations.
    Rep {
        #[command(subcommand)]
        action: RepAction,
    },
    /// Stabilizers of weight multisets.
    Stab {
        #[command(subcommand)]
        action: StabAction,
    },
    /// Toral embeddings.
    Embed {
        #[command(subcommand)]
        action: EmbedAction,
    },
    /// Trace-word invariants.
    Trace {
        #[command(subcommand)]
        action: TraceAction,
    },
    /// Run a verification suite by name.
    #[command(external_subcommand)]
    Suite(Vec<String>),
}

#[derive(Subcommand)]
enum RootsysAction {
    /// Summary of a root system such as A2, F4 or E8.
    Info {
        name: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum RepAction {
    /// Weight multiset of an irreducible representation, given by a
    /// 1-based fundamental index, "adjoint", or a JSON file holding the
    /// highest weight's coordinates.
    Weights {
        name: String,
        rep: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum StabAction {
    /// Stabilizer of the weight multiset stored in a JSON file.
    Weights {
        file: PathBuf,
        #[arg(long)]
        node_cap: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum EmbedAction {
    /// Restriction of a target representation along an embedding (JSON file
    /// or preset name).
    Branch {
        embedding: String,
        rep: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum TraceAction {
    /// Is the target in the span of products of the generators?
    Member {
        target: PathBuf,
        /// JSON list of trace polynomials, or "lie" for the polarized
        /// tr(L^k) forms up to --degree.
        gens: String,
        #[arg(long, default_value = "gl2")]
        algebra: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = likit::report::DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Parser)]
#[command(name = "likit <suite>", no_binary_name = true)]
struct SuiteArgs {
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_rank: Option<usize>,
    /// JSON file overriding caps and defaults; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run independent checks on separate threads.
    #[arg(long)]
    parallel: bool,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: Output,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::UnsupportedSystem(_) => USAGE,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        message: message.into(),
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(output: &Output, text: String, value: Value) -> Result<(), Failure> {
    let body = match output.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
    };
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn strings(v: &[likit::linalg::Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn rootsys_info(name: &str, output: &Output) -> Result<(), Failure> {
    let rs = RootSystem::from_name(name)?;
    let idx = lattice_index(rs.root_lattice(), rs.weight_lattice())?;
    let divisors: Vec<String> = idx.divisors.iter().filter(|d| **d != 1.into()).map(ToString::to_string).collect();
    let diagram = rs.diagram_automorphisms().len() + 1;
    let simple: Vec<String> = rs.simple_roots().iter().map(ToString::to_string).collect();
    let cartan: Vec<String> = rs.cartan_matrix().iter().map(|r| format!("{r:?}")).collect();
    let text = format!(
        "{}\nrank {}  ambient dimension {}\nroots {} ({} positive)\nsimple roots {}\nCartan matrix {}\nhighest root {}\nρ {}\n|W| {}\n|Aut(Δ)/W| {}\nP/Q order {} divisors [{}]\n",
        rs.name(),
        rs.rank(),
        rs.ambient_dim(),
        rs.roots().len(),
        rs.positive_roots().len(),
        simple.join(", "),
        cartan.join(" "),
        rs.highest_root(),
        rs.rho(),
        rs.weyl_order(),
        diagram,
        idx.index,
        divisors.join(", ")
    );
    let value = json!({
        "name": rs.name(),
        "rank": rs.rank(),
        "ambient_dim": rs.ambient_dim(),
        "roots": rs.roots().len(),
        "positive_roots": rs.positive_roots().len(),
        "simple_roots": rs.simple_roots(),
        "cartan_matrix": rs.cartan_matrix(),
        "highest_root": rs.highest_root(),
        "rho": rs.rho(),
        "weyl_order": rs.weyl_order().to_string(),
        "diagram_automorphisms": diagram,
        "weight_root_index": idx.index.to_string(),
        "elementary_divisors": divisors,
    });
    emit(output, text, value)
}

/// `rep` is a 1-based fundamental index, "adjoint", "trivial", or a JSON
/// file with the highest weight's coordinates.
fn parse_rep(rs: Arc<RootSystem>, rep: &str) -> Result<IrrepLabel, Failure> {
    match rep {
        "adjoint" => Ok(IrrepLabel::adjoint(rs)),
        "trivial" => Ok(IrrepLabel::trivial(rs)),
        _ => {
            if let Ok(i) = rep.parse::<usize>() {
                if i == 0 {
                    return Err(usage("fundamental indices start at 1"));
                }
                return Ok(IrrepLabel::fundamental(rs, i - 1)?);
            }
            let value = read_json(Path::new(rep))?;
            let hw: likit::linalg::RationalVector =
                serde_json::from_value(value).map_err(|e| usage(format!("{rep}: {e}")))?;
            Ok(IrrepLabel::new(rs, hw)?)
        }
    }
}

fn weights_text(ws: &WeightMultiset) -> String {
    let mut out = format!("dimension {}  distinct weights {}\n", ws.dim(), ws.entries().len());
    for (w, m) in ws.iter() {
        out.push_str(&format!("{w} ×{m}\n"));
    }
    out
}

fn rep_weights(name: &str, rep: &str, output: &Output) -> Result<(), Failure> {
    let rs = Arc::new(RootSystem::from_name(name)?);
    let label = parse_rep(rs, rep)?;
    let ws = freudenthal_weights(&label, DEFAULT_REP_CAP)?;
    let text = format!("{label}\n{}", weights_text(&ws));
    let mut value = ws.to_json();
    value["label"] = json!(label.to_string());
    emit(output, text, value)
}

fn stab_weights(file: &Path, node_cap: Option<u64>, output: &Output) -> Result<(), Failure> {
    let ws = WeightMultiset::from_json(&read_json(file)?)?;
    let mut cfg = SearchConfig::default();
    if let Some(cap) = node_cap {
        cfg.node_cap = cap;
    }
    let res = weight_multiset_stabilizer(&ws, true, &cfg)?;
    let text = format!(
        "stabilizer order {}\ngenerators {}\nrestricted to span {}\nzero-weight multiplicity {}\nsearch nodes {} prunes {}\n",
        res.group.order(),
        res.group.generators().len(),
        res.restricted_to_span,
        res.zero_multiplicity,
        res.stats.nodes,
        res.stats.prunes
    );
    let value = json!({
        "order": res.group.order().to_string(),
        "generators": res.group.generators(),
        "restricted_to_span": res.restricted_to_span,
        "zero_multiplicity": res.zero_multiplicity,
        "stats": {"nodes": res.stats.nodes, "prunes": res.stats.prunes},
    });
    emit(output, text, value)
}

fn embed_branch(embedding: &str, rep: &str, output: &Output) -> Result<(), Failure> {
    let emb = if PRESETS.contains(&embedding) {
        ToralEmbedding::preset(embedding)?
    } else {
        ToralEmbedding::from_json(&read_json(Path::new(embedding))?)?
    };
    let label = parse_rep(emb.target().clone(), rep)?;
    let ws = freudenthal_weights(&label, DEFAULT_REP_CAP)?;
    let pulled = pullback(&emb, &ws)?;
    let mut text = format!("{emb}\nrestricting {label} (dimension {})\n", ws.dim());
    let mut value = json!({
        "embedding": emb.to_json(),
        "representation": label.to_string(),
        "pullback": pulled.to_json(),
    });
    match branch(&emb, &ws) {
        Ok(dec) => {
            let parts: Vec<String> = dec.iter().map(|(l, m)| format!("{l}×{m}")).collect();
            text.push_str(&format!("decomposition {}\n", parts.join(" + ")));
            value["decomposition"] = dec
                .iter()
                .map(|(l, m)| json!({"label": l.to_string(), "dynkin_labels": strings(&l.dynkin_labels()), "multiplicity": m}))
                .collect();
        }
        Err(Error::Inconsistent(_)) => {
            text.push_str(&weights_text(&pulled));
        }
        Err(e) => return Err(e.into()),
    }
    emit(output, text, value)
}

#[allow(clippy::too_many_arguments)]
fn trace_member(
    target: &Path,
    gens: &str,
    algebra: &str,
    arity: usize,
    degree: usize,
    seed: u64,
    output: &Output,
) -> Result<(), Failure> {
    let target = TracePolynomial::from_json(&read_json(target)?)?;
    if target.max_degree() > degree {
        return Err(usage(format!("target degree {} exceeds --degree {degree}", target.max_degree())));
    }
    let generators = if gens == "lie" {
        polarized_lie_traces(arity, degree)?
    } else {
        let value = read_json(Path::new(gens))?;
        let items = value.as_array().ok_or_else(|| usage(format!("{gens}: expected a JSON list")))?;
        items.iter().map(TracePolynomial::from_json).collect::<Result<Vec<_>, _>>()?
    };
    let algebra = MatrixAlgebra::parse(algebra)?;
    let cfg = MembershipConfig {
        seed,
        ..MembershipConfig::default()
    };
    let res = membership(&target, &generators, algebra, arity, &cfg)?;
    let mut text = format!(
        "member {}\ncandidates {}  samples {}  rank {}\n",
        res.member,
        res.candidates.len(),
        res.samples,
        res.rank
    );
    if let Some(c) = res.combination(&generators) {
        text.push_str(&format!("combination in trace words {c}\n"));
    } else {
        text.push_str("no combination reproduces the target on the samples\n");
    }
    let value = json!({
        "member": res.member,
        "seed": seed,
        "candidates": res.candidates,
        "coefficients": res.coefficients.as_ref().map(|c| strings(c)),
        "samples": res.samples,
        "rank": res.rank,
    });
    emit(output, text, value)
}

fn suite(args: Vec<String>) -> Result<bool, Failure> {
    let args = SuiteArgs::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(usage(format!(
            "unknown command or suite {:?}; suites: {}",
            args.suite,
            SUITES.join(", ")
        )));
    }
    let mut opts = match &args.config {
        Some(path) => SuiteOptions::from_json(&read_json(path)?).map_err(|e| usage(e.to_string()))?,
        None => SuiteOptions::default(),
    };
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    if let Some(r) = args.max_rank {
        opts.max_rank = r;
    }
    opts.parallel |= args.parallel;
    opts.timing |= args.timing;
    let report = run_suite(&args.suite, &opts)?;
    let body = match args.output.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json_string(),
    };
    match &args.output.out {
        Some(path) => fs::write(path, body).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Rootsys { action: RootsysAction::Info { name, output } } => rootsys_info(&name, &output)?,
        Command::Rep { action: RepAction::Weights { name, rep, output } } => rep_weights(&name, &rep, &output)?,
        Command::Stab { action: StabAction::Weights { file, node_cap, output } } => {
            stab_weights(&file, node_cap, &output)?
        }
        Command::Embed { action: EmbedAction::Branch { embedding, rep, output } } => {
            embed_branch(&embedding, &rep, &output)?
        }
        Command::Trace {
            action: TraceAction::Member { target, gens, algebra, arity, degree, seed, output },
        } => trace_member(&target, &gens, &algebra, arity, degree, seed, &output)?,
        Command::Suite(args) => return suite(args),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("likit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
