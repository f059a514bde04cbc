mod render;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use bott_core::bottverify::{
    certify, default_twist, find_minimal_q, reproduce_tables, Certificate, MinimalQ, Status,
};
use bott_core::bwb::bundle_cohomology;
use bott_core::flag::{adjoint_marking, build_flag, coadjoint_marking, FlagVariety, MarkedDiagram};
use bott_core::repchar::{Character, IrrepMultiset};
use bott_core::{Budget, DynkinType, Error, RootSystem, Series, Weight};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use render::Doc;

#[derive(Parser, Debug)]
#[command(
    name = "bott",
    version,
    about = "Exact Borel–Weil–Bott computations and Bott non-vanishing certificates for partial flag varieties"
)]
struct Cli {
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, env = "BOTT_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall-clock times in the output.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Adjoint,
    Coadjoint,
    #[value(name = "e-weights", alias = "E-weights")]
    EWeights,
}

#[derive(Args, Debug)]
struct TypeArgs {
    /// Dynkin type, either `G2` or a series letter together with `--rank`.
    #[arg(long = "type")]
    ty: String,
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args, Debug)]
struct VarietyArgs {
    #[command(flatten)]
    ty: TypeArgs,
    /// Marked nodes (Bourbaki labels), comma separated.
    #[arg(long, value_delimiter = ',')]
    marked: Vec<usize>,
    #[arg(long)]
    adjoint: bool,
    #[arg(long)]
    coadjoint: bool,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long)]
    budget_seconds: Option<f64>,
    #[arg(long)]
    budget_weights: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cartan matrix, positive roots and highest roots of a Dynkin type.
    Roots {
        #[command(flatten)]
        ty: TypeArgs,
    },
    /// Dimension/index tables and highest weights of the tangent pieces.
    Tables {
        #[arg(value_enum)]
        which: Which,
        /// Largest rank for the classical families.
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Decomposes an exterior power of a Levi representation.
    Exterior {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long)]
        q: usize,
        /// Graded piece of the tangent space (default 1).
        #[arg(long, conflicts_with = "weight")]
        piece: Option<usize>,
        /// Highest weight of a Levi irreducible, in place of a graded piece.
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Cohomology of the irreducible bundle with the given highest weight.
    Cohomology {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
    },
    /// Certifies a non-zero H¹ of Λ^q T_X ⊗ O(twist).
    Verify {
        #[command(flatten)]
        variety: VarietyArgs,
        /// Exterior power; without it the smallest certified q is searched.
        #[arg(long, conflicts_with = "q_max")]
        q: Option<usize>,
        #[arg(long)]
        q_max: Option<usize>,
        /// Twist as fundamental coordinates, or a single integer m for O(m).
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Runs every adjoint and coadjoint case.
    CertifyAll {
        /// Also run E8.
        #[arg(long)]
        extended: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(Doc, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok((doc, code)) => {
            let out = match cli.format {
                Format::Text => doc.text,
                Format::Json => render::json_string(doc.json),
            };
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Roots { ty } => {
            let rs = RootSystem::shared(parse_type(ty)?);
            Ok((render::roots(&rs), 0))
        }
        Command::Tables { which, n_max } => cmd_tables(*which, *n_max),
        Command::Exterior {
            variety,
            q,
            piece,
            weight,
            twist,
            budget,
        } => cmd_exterior(
            variety,
            *q,
            *piece,
            weight.as_deref(),
            twist.as_deref(),
            budget,
        ),
        Command::Cohomology { variety, weight } => cmd_cohomology(variety, weight),
        Command::Verify {
            variety,
            q,
            q_max,
            twist,
            budget,
        } => cmd_verify(variety, *q, *q_max, twist.as_deref(), budget, cli.timing),
        Command::CertifyAll { extended, budget } => cmd_certify_all(*extended, budget, cli.timing),
    }
}

fn parse_type(args: &TypeArgs) -> std::result::Result<DynkinType, Failure> {
    let s = args.ty.trim();
    let letter_only = s.len() == 1;
    match (letter_only, args.rank) {
        (true, Some(r)) => Ok(DynkinType::new(s.parse::<Series>()?, r)?),
        (true, None) => Err(Failure::Usage(format!("type {s} needs --rank"))),
        (false, None) => Ok(s.parse()?),
        (false, Some(r)) => {
            let t: DynkinType = s.parse()?;
            if t.rank() != r {
                return Err(Failure::Usage(format!("--rank {r} contradicts type {t}")));
            }
            Ok(t)
        }
    }
}

fn parse_marking(args: &VarietyArgs) -> std::result::Result<MarkedDiagram, Failure> {
    let t = parse_type(&args.ty)?;
    let selectors = [!args.marked.is_empty(), args.adjoint, args.coadjoint];
    match selectors.iter().filter(|&&b| b).count() {
        1 => {}
        0 => {
            return Err(Failure::Usage(
                "one of --marked, --adjoint, --coadjoint is required".into(),
            ))
        }
        _ => {
            return Err(Failure::Usage(
                "--marked, --adjoint and --coadjoint are mutually exclusive".into(),
            ))
        }
    }
    if args.adjoint {
        Ok(adjoint_marking(t))
    } else if args.coadjoint {
        Ok(coadjoint_marking(t))
    } else {
        Ok(MarkedDiagram::new(t, &args.marked)?)
    }
}

fn parse_weight(s: &str, rank: usize) -> std::result::Result<Weight, Failure> {
    let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
    let coords = trimmed
        .split(',')
        .map(|c| c.trim().parse::<i32>())
        .collect::<std::result::Result<Vec<i32>, _>>()
        .map_err(|e| Failure::Usage(format!("cannot parse weight {s:?}: {e}")))?;
    if coords.len() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            found: coords.len(),
        }
        .into());
    }
    Ok(Weight::from(coords))
}

/// A single integer means that multiple of the ample generator.
fn parse_twist(s: Option<&str>, md: &MarkedDiagram) -> std::result::Result<Weight, Failure> {
    match s {
        None => Ok(default_twist(md)),
        Some(s) => match s.trim().parse::<i32>() {
            Ok(m) => Ok(md.ample_generator().scaled(m)),
            Err(_) => parse_weight(s, md.dynkin().rank()),
        },
    }
}

fn budget(args: &BudgetArgs) -> std::result::Result<Budget, Failure> {
    if args.budget_seconds.is_some_and(|s| s.is_nan() || s <= 0.0) {
        return Err(Failure::Usage("--budget-seconds must be positive".into()));
    }
    if args.budget_weights == Some(0) {
        return Err(Failure::Usage("--budget-weights must be positive".into()));
    }
    Ok(Budget::new(args.budget_seconds, args.budget_weights))
}

fn reject_projective_space(x: &FlagVariety) -> std::result::Result<(), Failure> {
    if x.is_projective_space() {
        return Err(Failure::Usage(format!(
            "{} is a projective space, where Bott vanishing holds",
            x.marked_diagram()
        )));
    }
    Ok(())
}

fn cmd_tables(which: Which, n_max: usize) -> Outcome {
    let tables = reproduce_tables()?;
    let ns: Vec<usize> = (2..=n_max).collect();
    let doc = match which {
        Which::Adjoint => {
            let rows = if n_max == 8 {
                tables.adjoint
            } else {
                bott_core::bottverify::adjoint_table(&ns)
            };
            render::variety_table("adjoint", &rows)
        }
        Which::Coadjoint => {
            let rows = if n_max == 8 {
                tables.coadjoint
            } else {
                bott_core::bottverify::coadjoint_table(&ns)
            };
            render::variety_table("coadjoint", &rows)
        }
        Which::EWeights => {
            let rows = if n_max == 8 {
                tables.e_weights
            } else {
                bott_core::bottverify::e_weight_table(&ns)?
            };
            render::e_weight_table(&rows)
        }
    };
    Ok((doc, 0))
}

fn cmd_exterior(
    variety: &VarietyArgs,
    q: usize,
    piece: Option<usize>,
    weight: Option<&str>,
    twist: Option<&str>,
    budget_args: &BudgetArgs,
) -> Outcome {
    let md = parse_marking(variety)?;
    let x = build_flag(md);
    let budget = budget(budget_args)?;
    let rank = md.dynkin().rank();
    let (source, base): (String, Character) = match weight {
        Some(w) => {
            let w = parse_weight(w, rank)?;
            let c = bott_core::repchar::irrep_character(x.levi(), &w)?;
            (format!("U^{}", w.label()), c)
        }
        None => {
            let j = piece.unwrap_or(1);
            if j == 0 || j > x.num_pieces() {
                return Err(Failure::Usage(format!(
                    "--piece must lie in 1..={}",
                    x.num_pieces()
                )));
            }
            (format!("gr_{j}"), x.graded_piece(j))
        }
    };
    let twist = match twist {
        None => Weight::zero(rank),
        Some(t) => parse_twist(Some(t), &md)?,
    };
    let powers = base.exterior_powers(q, &budget)?;
    let dec = powers[q].shift(&twist)?.decompose_with_budget(&budget)?;
    Ok((render::exterior(&x, &source, q, &twist, &dec)?, 0))
}

fn cmd_cohomology(variety: &VarietyArgs, weight: &str) -> Outcome {
    let md = parse_marking(variety)?;
    let x = build_flag(md);
    let w = parse_weight(weight, md.dynkin().rank())?;
    let s = IrrepMultiset::from_entries(x.levi(), [(w.clone(), BigInt::from(1))])?;
    let table = bundle_cohomology(&x, &s)?;
    Ok((render::cohomology(&x, &w, &table)?, 0))
}

fn status_code(s: &Status) -> u8 {
    match s {
        Status::Certified => 0,
        _ => 2,
    }
}

fn cmd_verify(
    variety: &VarietyArgs,
    q: Option<usize>,
    q_max: Option<usize>,
    twist: Option<&str>,
    budget_args: &BudgetArgs,
    timing: bool,
) -> Outcome {
    let md = parse_marking(variety)?;
    let x = build_flag(md);
    reject_projective_space(&x)?;
    let twist = parse_twist(twist, &md)?;
    x.check_twist(&twist)?;
    let budget = budget(budget_args)?;
    match q {
        Some(q) => {
            if q == 0 || q > x.dim() {
                return Err(Failure::Usage(format!("--q must lie in 1..={}", x.dim())));
            }
            match certify(md, q, &twist, &budget) {
                Ok(c) => Ok((
                    render::certificate(&x, &c, None, timing)?,
                    status_code(&c.status),
                )),
                Err(Error::BudgetExceeded(reason)) => {
                    Ok((render::budget_failure(&x, q, &reason), 2))
                }
                Err(e) => Err(e.into()),
            }
        }
        None => {
            let q_max = q_max.unwrap_or(x.dim());
            if q_max == 0 {
                return Err(Failure::Usage("--q-max must be positive".into()));
            }
            match find_minimal_q(md, q_max, &twist, &budget)? {
                MinimalQ::Found {
                    certificate,
                    attempts,
                } => Ok((
                    render::certificate(&x, &certificate, Some(&attempts), timing)?,
                    0,
                )),
                MinimalQ::NotFoundUpTo { q_max, attempts } => {
                    Ok((render::not_found(&x, q_max, &attempts, timing), 2))
                }
                MinimalQ::BudgetExceeded {
                    reached, reason, ..
                } => Ok((render::budget_failure(&x, reached, &reason), 2)),
            }
        }
    }
}

/// The cases of the main theorem with the exterior power used for each.
fn suite(extended: bool) -> Vec<(MarkedDiagram, usize)> {
    let t = |s: Series, n: usize| DynkinType::new(s, n).expect("suite types are valid");
    let mut cases = Vec::new();
    cases.extend((2..=5).map(|n| (adjoint_marking(t(Series::A, n)), 1)));
    cases.extend((3..=7).map(|n| (adjoint_marking(t(Series::B, n)), 3)));
    cases.extend((4..=8).map(|n| (adjoint_marking(t(Series::D, n)), 3)));
    cases.push((adjoint_marking(t(Series::E, 6)), 5));
    cases.push((adjoint_marking(t(Series::E, 7)), 7));
    if extended {
        cases.push((adjoint_marking(t(Series::E, 8)), 11));
    }
    cases.push((adjoint_marking(t(Series::F, 4)), 4));
    cases.push((adjoint_marking(t(Series::G, 2)), 2));
    cases.extend((3..=6).map(|n| (coadjoint_marking(t(Series::C, n)), 1)));
    cases.push((coadjoint_marking(t(Series::F, 4)), 1));
    cases
}

pub enum CaseOutcome {
    Done {
        certificate: Box<Certificate>,
        minimal_q: Option<usize>,
    },
    Budget(String),
}

fn cmd_certify_all(extended: bool, budget_args: &BudgetArgs, timing: bool) -> Outcome {
    budget(budget_args)?;
    let mut rows = Vec::new();
    let mut code = 0;
    for (md, q) in suite(extended) {
        let start = Instant::now();
        let b = budget(budget_args)?;
        let twist = default_twist(&md);
        let outcome = match certify(md, q, &twist, &b) {
            Ok(c) => {
                let minimal = match find_minimal_q(md, q, &twist, &b) {
                    Ok(m) => m.q(),
                    Err(Error::BudgetExceeded(_)) => None,
                    Err(e) => return Err(e.into()),
                };
                CaseOutcome::Done {
                    certificate: Box::new(c),
                    minimal_q: minimal,
                }
            }
            Err(Error::BudgetExceeded(reason)) => CaseOutcome::Budget(reason),
            Err(e) => return Err(e.into()),
        };
        let ok = matches!(&outcome, CaseOutcome::Done { certificate, .. } if certificate.status == Status::Certified);
        if !ok {
            code = 2;
        }
        rows.push((md, q, outcome, start.elapsed()));
    }
    Ok((render::certify_all(&rows, timing), code))
}
