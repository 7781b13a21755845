//! `metalg`: finite metric spaces, metric algebras and the law suite from the
//! command line.
//!
//! Every input and output is a JSON document. Exit status is 0 on success,
//! 1 when a check is unsatisfied or a law has a counterexample, 2 on input
//! errors.

mod commands;
mod io;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metric_algebra::format::{Body, Document};
use metric_algebra::theories::Mode;
use metric_algebra::SpaceKind;

#[derive(Parser)]
#[command(name = "metalg", version, about = "Finite metric spaces, metric algebras and law checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the output document to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Metric,
    Pseudo,
}

impl From<KindArg> for SpaceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Metric => SpaceKind::Metric,
            KindArg::Pseudo => SpaceKind::Pseudometric,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ordinary,
    Enriched,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ordinary => Mode::Ordinary,
            ModeArg::Enriched => Mode::Enriched,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a space document against the axioms of its kind.
    CheckSpace {
        space: PathBuf,
        /// Check against this kind instead of the document's.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Largest (pseudo)metric below the document's matrix.
    Closure { space: PathBuf },
    /// Cartesian product with the max metric.
    Product { left: PathBuf, right: PathBuf },
    /// Disjoint union.
    Coproduct { left: PathBuf, right: PathBuf },
    /// Tensor product with the sum metric.
    Tensor { left: PathBuf, right: PathBuf },
    /// Internal hom `[X, A]` with the sup metric.
    Hom { exponent: PathBuf, base: PathBuf },
    /// Identify points at distance 0.
    ReflectMetric { space: PathBuf },
    /// Coequalizer of two parallel maps.
    Coequalize {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Metric)]
        kind: KindArg,
    },
    /// Pushout of a span `B <- A -> C`.
    Pushout { f: PathBuf, g: PathBuf },
    /// Surjection followed by an isometric embedding.
    Factorize { map: PathBuf },
    /// Whether the identity factors through the chain `(A, d + 1/n)`.
    FpChain {
        space: PathBuf,
        #[arg(long, default_value_t = 64)]
        stages: u64,
    },
    /// Check an algebra against every equation of a theory.
    CheckAlgebra {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Check `lhs =_eps rhs` on an algebra.
    CheckQuant {
        #[command(flatten)]
        quant: QuantArgs,
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Encode `lhs =_eps rhs` by a fresh `(X, 2_eps)`-ary symbol.
    EncodeQuant {
        #[command(flatten)]
        quant: QuantArgs,
        #[arg(long, default_value = "rho")]
        name: String,
    },
    /// All models of a theory on a carrier.
    EnumerateModels {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Largest number of candidate table families to search.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u128,
    },
    /// `hom(Y, A)` against the limit of `A` over the diagram of `Y`.
    HomLimit {
        #[arg(long)]
        arity: PathBuf,
        #[arg(long)]
        space: PathBuf,
    },
    /// Free algebra of a collapse theory, computed as a reflection.
    Reflect {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        space: PathBuf,
        /// Also check couniversality against algebras with this many points.
        #[arg(long)]
        oracle_bound: Option<usize>,
    },
    /// Validate a monoid document.
    MonoidCheck { monoid: PathBuf },
    /// Coequalizer of a reflexive pair of monoid homomorphisms into `N`.
    MonoidCoeq {
        /// The codomain monoid `N`.
        monoid: PathBuf,
        /// Class label of each point of `N`; uses the kernel pair of the congruence.
        #[arg(long, conflicts_with_all = ["source", "f", "g"])]
        classes: Option<String>,
        /// The domain monoid `M` of `f, g`.
        #[arg(long, requires_all = ["f", "g"])]
        source: Option<PathBuf>,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
        /// Check the result against all monoids with this many points.
        #[arg(long)]
        oracle_bound: Option<usize>,
        #[arg(long, default_value = "1/2,1,2,inf")]
        grid: String,
    },
    /// Run the law suite or a single law.
    Laws(LawArgs),
    /// Print a seeded random instance of the kind the law suite uses.
    Gen {
        /// space, pseudospace, nonexp-map, reflexive-pair, collapse-theory or monoid.
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long)]
        grid: Option<String>,
    },
}

#[derive(Args)]
pub struct QuantArgs {
    #[arg(long)]
    pub theory: PathBuf,
    /// Atom names in application order, comma separated.
    #[arg(long)]
    pub lhs: String,
    #[arg(long)]
    pub rhs: String,
    #[arg(long)]
    pub eps: String,
}

#[derive(Args)]
pub struct LawArgs {
    /// Run every law.
    #[arg(long, conflicts_with = "law")]
    pub suite: bool,
    /// Run one law by name.
    #[arg(long)]
    pub law: Option<String>,
    /// A harness-config document; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub random_count: Option<usize>,
    #[arg(long)]
    pub oracle_bound: Option<usize>,
    /// product-sum or coequalizer-one-step.
    #[arg(long)]
    pub mutation: Option<String>,
}

/// A finished command: the document to print and whether the check held.
pub struct Outcome {
    pub doc: Document,
    pub satisfied: bool,
    /// Text for `--format table`; falls back to the JSON rendering.
    pub table: Option<String>,
}

impl Outcome {
    pub fn ok(doc: Document) -> Self {
        Outcome { doc, satisfied: true, table: None }
    }

    pub fn report(report: serde_json::Value, satisfied: bool) -> Self {
        Outcome { doc: Document::new(Body::Report { report }), satisfied, table: None }
    }
}

fn dispatch(command: Command) -> io::Result<Outcome> {
    use commands as c;
    match command {
        Command::CheckSpace { space, kind } => c::check_space(&space, kind),
        Command::Closure { space } => c::closure(&space),
        Command::Product { left, right } => c::product(&left, &right),
        Command::Coproduct { left, right } => c::coproduct(&left, &right),
        Command::Tensor { left, right } => c::tensor(&left, &right),
        Command::Hom { exponent, base } => c::hom(&exponent, &base),
        Command::ReflectMetric { space } => c::reflect_metric(&space),
        Command::Coequalize { f, g, kind } => c::coequalize(&f, &g, kind),
        Command::Pushout { f, g } => c::pushout(&f, &g),
        Command::Factorize { map } => c::factorize(&map),
        Command::FpChain { space, stages } => c::fp_chain(&space, stages),
        Command::CheckAlgebra { theory, algebra, mode } => c::check_algebra(&theory, &algebra, mode),
        Command::CheckQuant { quant, algebra } => c::check_quant(&quant, &algebra),
        Command::EncodeQuant { quant, name } => c::encode_quant(&quant, &name),
        Command::EnumerateModels { theory, space, mode, budget } => c::enumerate_models(&theory, &space, mode, budget),
        Command::HomLimit { arity, space } => c::hom_limit(&arity, &space),
        Command::Reflect { theory, space, oracle_bound } => c::reflect(&theory, &space, oracle_bound),
        Command::MonoidCheck { monoid } => c::monoid_check(&monoid),
        Command::MonoidCoeq { monoid, classes, source, f, g, oracle_bound, grid } => {
            let pair = match (source, f, g) {
                (Some(m), Some(f), Some(g)) => Some((m, f, g)),
                (None, None, None) => None,
                _ => return Err(io::InputError("--source, --f and --g go together".into())),
            };
            c::monoid_coeq(&monoid, classes.as_deref(), pair, oracle_bound, &grid)
        }
        Command::Laws(args) => c::laws(&args),
        Command::Gen { kind, seed, max_points, grid } => c::gen(&kind, seed, max_points, grid.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match dispatch(cli.command) {
        Ok(o) => o,
        Err(io::InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match (cli.format, &outcome.table) {
        (Format::Table, Some(t)) => t.clone(),
        _ => outcome.doc.render(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.satisfied {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
