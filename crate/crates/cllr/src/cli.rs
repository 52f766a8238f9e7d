//! Command-line front end. Exit codes are the machine contract: 0 the
//! property holds (or the command succeeded), 1 it fails, 2 usage or
//! resource errors, reported on stderr as `error:<kind>: message`.

use crate::actl::{self, ActlError};
use crate::equations::{self, EqError};
use crate::export;
use crate::refinement;
use crate::semantics::{build_lts, BuildError};
use crate::syntax::{parse_alphabet, parse_term, Alphabet, ParseError, Term};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::Path;

pub const DEFAULT_BOUND: usize = 10_000;

#[derive(Parser)]
#[command(name = "cllr", version, about = "Analyses for a process calculus over logic labelled transition systems", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Direct,
    Refine,
    Both,
}

#[derive(Args)]
struct Common {
    /// Comma-separated ordered action alphabet; overrides any file header
    #[arg(long)]
    alphabet: Option<String>,
    /// State bound for graph construction (env CLLR_BOUND, default 10000)
    #[arg(long)]
    bound: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a term file and echo the term
    Parse {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Build and emit the state graph of a term
    Lts {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Is the process consistent (outside the inconsistency predicate)?
    Consistent {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Does the left process refine the right one?
    Refine {
        left: String,
        right: String,
        #[command(flatten)]
        common: Common,
    },
    /// Are the two processes equivalent (mutual refinement)?
    Equiv {
        left: String,
        right: String,
        #[command(flatten)]
        common: Common,
    },
    /// Recursive-equation analyses
    #[command(subcommand)]
    Eq(EqCmd),
    /// Formula encoding and model checking
    #[command(subcommand)]
    Actl(ActlCmd),
}

#[derive(Subcommand)]
enum EqCmd {
    /// Check every candidate in the equation file for solutionhood
    Check {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Verify the greatest-solution property over the candidates
    Greatest {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Does the equation meet the unique-solution precondition?
    UniquePre {
        file: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ActlCmd {
    /// Encode a formula as a process term
    Encode {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check a process against a formula
    Check {
        term_file: String,
        formula_file: String,
        /// Checking strategy
        #[arg(long, value_enum, default_value = "refine")]
        method: Method,
        #[command(flatten)]
        common: Common,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl Into<String>) -> Failure {
        Failure {
            kind,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::new("io", e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::new("parse", e.to_string())
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Failure {
        match e {
            BuildError::StateBoundExceeded(_) => Failure::new("state-bound", e.to_string()),
        }
    }
}

impl From<EqError> for Failure {
    fn from(e: EqError) -> Failure {
        match &e {
            EqError::PreconditionNotStronglyGuarded { .. } => {
                Failure::new("precondition", e.to_string())
            }
            EqError::Build(b) => Failure::from(b.clone()),
            EqError::Parse(_) | EqError::Format(_) => Failure::new("parse", e.to_string()),
        }
    }
}

impl From<ActlError> for Failure {
    fn from(e: ActlError) -> Failure {
        match &e {
            ActlError::Syntax { .. } | ActlError::UnknownAction(_) => {
                Failure::new("parse", e.to_string())
            }
            ActlError::EmptyAlphabet | ActlError::AlphabetTooLarge { .. } => {
                Failure::new("alphabet", e.to_string())
            }
            ActlError::Build(b) => Failure::from(b.clone()),
            ActlError::EmptyDisjunction | ActlError::EmptyConjunction => {
                Failure::new("internal", e.to_string())
            }
        }
    }
}

/// Run the CLI on the given argv (including the program name) and return the
/// process exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are successful output, not usage errors
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("error:usage: {e}");
            return 2;
        }
    };
    match dispatch(cli.cmd) {
        Ok(holds) => {
            if holds {
                0
            } else {
                1
            }
        }
        Err(f) => {
            eprintln!("error:{}: {}", f.kind, f.message);
            2
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<bool, Failure> {
    match cmd {
        Cmd::Parse { file, common } => {
            let (term, _alphabet) = load_term(&file, &common)?;
            match common.format {
                Format::Json => println!("{}", serde_json::json!({ "term": term.to_string() })),
                Format::Text => println!("{term}"),
                Format::Dot => return Err(bad_dot()),
            }
            Ok(true)
        }
        Cmd::Lts { file, common } => {
            let (term, alphabet) = load_term(&file, &common)?;
            let lts = build_lts(&term, bound(&common))?;
            match common.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&export::lts_to_json(&lts, &alphabet)).unwrap()
                ),
                Format::Dot => print!("{}", export::lts_to_dot(&lts)),
                Format::Text => {
                    let reachable = lts.state_ids().filter(|&s| lts.state(s).reachable).count();
                    println!(
                        "{} states ({} reachable), {} transitions, initial {}",
                        lts.state_ids().count(),
                        reachable,
                        lts.transitions().count(),
                        if lts.in_f(lts.initial()) {
                            "inconsistent"
                        } else {
                            "consistent"
                        }
                    );
                }
            }
            Ok(true)
        }
        Cmd::Consistent { file, common } => {
            let (term, _) = load_term(&file, &common)?;
            let lts = build_lts(&term, bound(&common))?;
            let consistent = !lts.in_f(lts.initial());
            match common.format {
                Format::Json => println!("{}", serde_json::json!({ "consistent": consistent })),
                Format::Text => println!(
                    "{}",
                    if consistent {
                        "consistent"
                    } else {
                        "inconsistent"
                    }
                ),
                Format::Dot => return Err(bad_dot()),
            }
            Ok(consistent)
        }
        Cmd::Refine {
            left,
            right,
            common,
        } => {
            let (l, r) = load_pair(&left, &right, &common)?;
            let verdict = refinement::refines(&l, &r, bound(&common))?;
            match common.format {
                Format::Json => println!("{}", verdict.to_json()),
                Format::Text => {
                    if verdict.holds {
                        println!("refinement holds");
                    } else {
                        println!("refinement fails");
                        if let Some(ce) = &verdict.counterexample {
                            println!("counterexample: {}", serde_json::json!(ce));
                        }
                    }
                }
                Format::Dot => return Err(bad_dot()),
            }
            Ok(verdict.holds)
        }
        Cmd::Equiv {
            left,
            right,
            common,
        } => {
            let (l, r) = load_pair(&left, &right, &common)?;
            let holds = refinement::equivalent(&l, &r, bound(&common))?;
            match common.format {
                Format::Json => println!("{}", serde_json::json!({ "holds": holds })),
                Format::Text => println!(
                    "{}",
                    if holds {
                        "equivalent"
                    } else {
                        "not equivalent"
                    }
                ),
                Format::Dot => return Err(bad_dot()),
            }
            Ok(holds)
        }
        Cmd::Eq(sub) => run_eq(sub),
        Cmd::Actl(sub) => run_actl(sub),
    }
}

fn run_eq(cmd: EqCmd) -> Result<bool, Failure> {
    let (file, common, mode) = match cmd {
        EqCmd::Check { file, common } => (file, common, "check"),
        EqCmd::Greatest { file, common } => (file, common, "greatest"),
        EqCmd::UniquePre { file, common } => (file, common, "unique-pre"),
    };
    let text = std::fs::read_to_string(&file)?;
    let parsed = equations::parse_equation_file(&text, bound(&common))?;
    if mode == "unique-pre" {
        let holds = equations::uniqueness_precondition(&parsed.problem);
        match common.format {
            Format::Json => println!("{}", serde_json::json!({ "preconditionHolds": holds })),
            Format::Text => println!(
                "unique-solution precondition {}",
                if holds { "holds" } else { "fails" }
            ),
            Format::Dot => return Err(bad_dot()),
        }
        return Ok(holds);
    }
    let reports = if mode == "greatest" {
        equations::check_greatest(&parsed.problem, &parsed.candidates)?
    } else {
        parsed
            .candidates
            .iter()
            .map(|c| equations::is_solution(c, &parsed.problem))
            .collect::<Result<Vec<_>, _>>()?
    };
    let holds = if mode == "greatest" {
        reports
            .iter()
            .filter(|r| r.is_consistent_solution())
            .all(|r| r.refines_canonical == Some(true))
    } else {
        reports.iter().all(|r| r.is_solution)
    };
    match common.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "holds": holds,
                "candidates": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            })
        ),
        Format::Text => {
            for r in &reports {
                println!(
                    "{}: solution={} consistent={} refinesCanonical={}",
                    r.candidate,
                    r.is_solution,
                    r.is_consistent,
                    r.refines_canonical
                        .map_or("n/a".to_string(), |b| b.to_string())
                );
            }
            println!("verdict: {}", if holds { "holds" } else { "fails" });
        }
        Format::Dot => return Err(bad_dot()),
    }
    Ok(holds)
}

fn run_actl(cmd: ActlCmd) -> Result<bool, Failure> {
    match cmd {
        ActlCmd::Encode { file, common } => {
            let (formula, alphabet) = load_formula(&file, &common)?;
            let term = actl::encode(&formula, &alphabet)?;
            match common.format {
                Format::Json => println!("{}", serde_json::json!({ "term": term.to_string() })),
                Format::Text => println!("{term}"),
                Format::Dot => return Err(bad_dot()),
            }
            Ok(true)
        }
        ActlCmd::Check {
            term_file,
            formula_file,
            method,
            common,
        } => {
            let (term, alphabet) = load_term(&term_file, &common)?;
            let (formula, falpha) = load_formula_with(&formula_file, &common, Some(&alphabet))?;
            let alphabet = falpha.unwrap_or(alphabet);
            let b = bound(&common);
            let direct = match method {
                Method::Direct | Method::Both => {
                    Some(actl::sat_direct(&term, &formula, &alphabet, b)?)
                }
                Method::Refine => None,
            };
            let refine = match method {
                Method::Refine | Method::Both => {
                    Some(actl::sat_refine(&term, &formula, &alphabet, b)?)
                }
                Method::Direct => None,
            };
            if let (Some(d), Some(r)) = (direct, refine) {
                if d != r {
                    return Err(Failure::new(
                        "internal",
                        format!("checkers disagree: direct={d} refine={r}"),
                    ));
                }
            }
            let holds = refine.or(direct).unwrap();
            match common.format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "holds": holds,
                        "direct": direct,
                        "refine": refine,
                    })
                ),
                Format::Text => println!(
                    "{}",
                    if holds { "satisfied" } else { "not satisfied" }
                ),
                Format::Dot => return Err(bad_dot()),
            }
            Ok(holds)
        }
    }
}

fn bad_dot() -> Failure {
    Failure::new("usage", "dot output is only available for the lts subcommand")
}

fn bound(common: &Common) -> usize {
    if let Some(b) = common.bound {
        return b;
    }
    if let Ok(v) = std::env::var("CLLR_BOUND") {
        if let Ok(b) = v.parse::<usize>() {
            if b >= 1 {
                return b;
            }
        }
    }
    DEFAULT_BOUND
}

/// Split an input file into an optional `alphabet ...` header and the
/// payload; `#` lines are comments.
fn split_header(text: &str) -> Result<(Option<Alphabet>, String), Failure> {
    let mut alphabet = None;
    let mut payload = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if alphabet.is_none() && payload.is_empty() {
            if let Some(rest) = trimmed.strip_prefix("alphabet") {
                if rest.starts_with(char::is_whitespace) {
                    alphabet = Some(parse_alphabet(rest.trim())?);
                    continue;
                }
            }
        }
        payload.push(line);
    }
    Ok((alphabet, payload.join("\n")))
}

fn resolve_alphabet(
    header: Option<Alphabet>,
    common: &Common,
    path: &str,
) -> Result<Alphabet, Failure> {
    if let Some(flag) = &common.alphabet {
        return Ok(parse_alphabet(flag)?);
    }
    header.ok_or_else(|| {
        Failure::new(
            "usage",
            format!("no alphabet: pass --alphabet or add an `alphabet ...` header to {path}"),
        )
    })
}

fn load_term(path: &str, common: &Common) -> Result<(Term, Alphabet), Failure> {
    let text = std::fs::read_to_string(Path::new(path))?;
    let (header, payload) = split_header(&text)?;
    let alphabet = resolve_alphabet(header, common, path)?;
    let term = parse_term(payload.trim(), &alphabet)?;
    Ok((term, alphabet))
}

fn load_pair(left: &str, right: &str, common: &Common) -> Result<(Term, Term), Failure> {
    let (l, la) = load_term(left, common)?;
    // the right-hand side may reuse the left's alphabet
    let with_fallback = Common {
        alphabet: common
            .alphabet
            .clone()
            .or_else(|| Some(la.iter().cloned().collect::<Vec<_>>().join(","))),
        bound: common.bound,
        format: common.format,
    };
    let (r, _) = load_term(right, &with_fallback)?;
    Ok((l, r))
}

fn load_formula(
    path: &str,
    common: &Common,
) -> Result<(actl::ActlFormula, Alphabet), Failure> {
    let (formula, alphabet) = load_formula_with(path, common, None)?;
    let alphabet = alphabet.ok_or_else(|| {
        Failure::new(
            "usage",
            format!("no alphabet: pass --alphabet or add an `alphabet ...` header to {path}"),
        )
    })?;
    Ok((formula, alphabet))
}

fn load_formula_with(
    path: &str,
    common: &Common,
    fallback: Option<&Alphabet>,
) -> Result<(actl::ActlFormula, Option<Alphabet>), Failure> {
    let text = std::fs::read_to_string(Path::new(path))?;
    let (header, payload) = split_header(&text)?;
    let alphabet = if let Some(flag) = &common.alphabet {
        Some(parse_alphabet(flag)?)
    } else {
        header.or_else(|| fallback.cloned())
    };
    let alphabet = alphabet.ok_or_else(|| {
        Failure::new(
            "usage",
            format!("no alphabet: pass --alphabet or add an `alphabet ...` header to {path}"),
        )
    })?;
    let formula = actl::parse_actl(payload.trim(), &alphabet)?;
    Ok((formula, Some(alphabet)))
}
