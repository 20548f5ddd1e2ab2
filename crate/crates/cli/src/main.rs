//! `ambitab`: disambiguate, prove and model-check scope-ambiguous formulas.
//!
//! Exit status is 0 for proved / valid / agreement, 1 for not proved /
//! counterexample / disagreement and 2 for errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ambitab::oracle::{self, regression_corpus, OracleReport};
use ambitab::semantics::{consequence_u, counterexample_in, parse_model, ConsequenceLimits, Verdict};
use ambitab::syntax::{parse_document, Formula, Sequent};
use ambitab::tableau::{prove, Calculus, ProofResult, SearchLimits};
use ambitab::ur::delta;

#[derive(Parser)]
#[command(name = "ambitab", version, about = "Tableaux for first-order logic with ambiguous quantifier scope")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the total disambiguations of a formula, one per line, sorted.
    Disambiguate(Input),
    /// Prove a formula or sequent.
    Prove(ProveArgs),
    /// Search finite models for a counterexample, or check one given model.
    Check(CheckArgs),
    /// Cross-check the provers against disambiguation and model search.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Input {
    /// Formula or sequent text. Use `--file` to read it from a file instead.
    text: Option<String>,
    #[arg(long, conflicts_with = "text")]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct Limits {
    #[arg(long, value_enum, default_value_t = CalculusArg::Tcup)]
    calculus: CalculusArg,
    /// γ-multiplicity: instances per universal formula and branch.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    gamma: u32,
    /// Maximum branch length.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
}

#[derive(Args)]
struct ProveArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    limits: Limits,
    /// Also print the tableau.
    #[arg(long)]
    tree: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    max_domain: u32,
    /// Check the sequent in this model only.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Formula to check. Without one, the built-in regression corpus is run.
    text: Option<String>,
    #[arg(long, conflicts_with = "text")]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Structured)]
    format: Format,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    gamma: u32,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    /// Domain bound of the soundness sweep.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    max_domain: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// Newline-delimited JSON records.
    Structured,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum CalculusArg {
    Tc,
    Tcu,
    Tcup,
}

impl From<CalculusArg> for Calculus {
    fn from(c: CalculusArg) -> Calculus {
        match c {
            CalculusArg::Tc => Calculus::Tc,
            CalculusArg::Tcu => Calculus::Tcu,
            CalculusArg::Tcup => Calculus::Tcup,
        }
    }
}

/// Failure with exit status 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type Run = Result<bool, Failure>;

fn read(text: &Option<String>, file: &Option<PathBuf>) -> Result<String, Failure> {
    match (text, file) {
        (Some(t), None) => Ok(t.clone()),
        (None, Some(p)) => fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        _ => Err(Failure("give the input as an argument or with --file".into())),
    }
}

fn load(text: &Option<String>, file: &Option<PathBuf>) -> Result<Sequent, Failure> {
    let source = read(text, file)?;
    let doc = parse_document(&source).map_err(|e| Failure(format!("parse error at {e}")))?;
    for w in &doc.warnings {
        eprintln!("{w}");
    }
    Ok(doc.sequent)
}

fn sequent_text(s: &Sequent) -> String {
    if s.premises.is_empty() {
        return s.conclusion.to_string();
    }
    let ps: Vec<String> = s.premises.iter().map(|p| p.to_string()).collect();
    format!("{} |- {}", ps.join(", "), s.conclusion)
}

fn disambiguate(input: &Input) -> Run {
    let s = load(&input.text, &input.file)?;
    if !s.premises.is_empty() {
        return Err(Failure("disambiguate takes a single formula".into()));
    }
    for d in delta(&s.conclusion) {
        match input.format {
            Format::Structured => println!("{}", json!({ "reading": d.to_string() })),
            _ => println!("{d}"),
        }
    }
    Ok(true)
}

fn status(r: &ProofResult) -> &'static str {
    match r {
        ProofResult::Proved(_) => "proved",
        ProofResult::NotProved { limit_reached: true, .. } => "not proved (search bound reached)",
        ProofResult::NotProved { .. } => "not proved",
    }
}

fn run_prove(a: &ProveArgs) -> Run {
    let s = load(&a.input.text, &a.input.file)?;
    let limits = SearchLimits {
        gamma_multiplicity: a.limits.gamma as usize,
        max_depth: a.limits.depth as usize,
        ..SearchLimits::default()
    };
    let calculus = Calculus::from(a.limits.calculus);
    let r = prove(calculus, &s.premises, &s.conclusion, limits)?;
    let t = r.tableau();
    match a.input.format {
        Format::Structured => {
            let record = json!({
                "sequent": sequent_text(&s),
                "calculus": calculus.to_string(),
                "result": status(&r),
                "multiplicity": t.multiplicity,
                "nodes": t.nodes.len(),
                "total_disambiguations": t.total_disambiguations(),
            });
            println!("{record}");
            if a.tree {
                print!("{}", t.to_ndjson());
            }
        }
        Format::Dot => print!("{}", t.to_dot()),
        Format::Text => {
            println!("{}: {}", calculus, status(&r));
            if a.tree {
                print!("{}", t.to_text());
            }
        }
    }
    Ok(r.is_proved())
}

fn run_check(a: &CheckArgs) -> Run {
    let s = load(&a.input.text, &a.input.file)?;
    let structured = a.input.format == Format::Structured;
    if let Some(path) = &a.model {
        let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        let m = parse_model(&text).map_err(|e| Failure(format!("model parse error at {e}")))?;
        let cx = counterexample_in(&m, &s.premises, &s.conclusion)?;
        match (&cx, structured) {
            (_, true) => {
                let record = json!({
                    "sequent": sequent_text(&s),
                    "model": m.to_string(),
                    "counterexample": cx.is_some(),
                    "premise_readings": cx.as_ref().map(|c| c.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
                    "conclusion_reading": cx.as_ref().map(|c| c.conclusion.to_string()),
                });
                println!("{record}");
            }
            (Some(c), false) => {
                println!("counterexample: {m}");
                for p in &c.premises {
                    println!("  true: {p}");
                }
                println!("  false: {}", c.conclusion);
            }
            (None, false) => println!("no counterexample in the given model"),
        }
        let refuted = cx.is_some();
        return Ok(!refuted);
    }
    let n = a.max_domain as usize;
    let v = consequence_u(&s.premises, &s.conclusion, ConsequenceLimits::up_to(n))?;
    match (&v, structured) {
        (Verdict::NoCounterexampleUpTo(k), true) => {
            println!("{}", json!({ "sequent": sequent_text(&s), "counterexample": null, "max_domain": k }));
        }
        (Verdict::NoCounterexampleUpTo(k), false) => println!("valid on all models up to size {k}"),
        (Verdict::Counterexample(c), true) => {
            let premises: Vec<String> = c.premises.iter().map(|p| p.to_string()).collect();
            let record = json!({
                "sequent": sequent_text(&s),
                "counterexample": c.model.to_string(),
                "premise_readings": premises,
                "conclusion_reading": c.conclusion.to_string(),
                "max_domain": n,
            });
            println!("{record}");
        }
        (Verdict::Counterexample(c), false) => {
            println!("counterexample: {}", c.model);
            for p in &c.premises {
                println!("  true: {p}");
            }
            println!("  false: {}", c.conclusion);
        }
    }
    Ok(!v.is_counterexample())
}

fn reports_for(phi: &Formula, premises: &[Formula], a: &OracleArgs) -> Result<Vec<OracleReport>, Failure> {
    let limits = SearchLimits {
        gamma_multiplicity: a.gamma as usize,
        max_depth: a.depth as usize,
        ..SearchLimits::default()
    };
    let sweep_limits = SearchLimits { gamma_multiplicity: limits.gamma_multiplicity.min(2), ..limits };
    let mut out = Vec::new();
    if premises.is_empty() {
        out.push(oracle::check_delta(phi));
        out.push(oracle::check_theorem10(phi, limits)?);
        out.push(oracle::check_theorem14(phi, limits)?);
    }
    out.push(oracle::soundness_sweep(premises, phi, a.max_domain as usize, sweep_limits)?);
    Ok(out)
}

fn run_oracle(a: &OracleArgs) -> Run {
    let mut reports = Vec::new();
    if a.text.is_some() || a.file.is_some() {
        let s = load(&a.text, &a.file)?;
        reports.extend(reports_for(&s.conclusion, &s.premises, a)?);
    } else {
        for item in regression_corpus() {
            for mut r in reports_for(&item.formula, &[], a)? {
                r.claim = format!("{}: {}", item.id, r.claim);
                reports.push(r);
            }
        }
    }
    for r in &reports {
        match a.format {
            Format::Text => println!("{} {} [{}]", if r.agreement { "agree" } else { "DISAGREE" }, r.claim, r.method),
            _ => println!("{}", serde_json::to_string(r)?),
        }
    }
    Ok(reports.iter().all(|r| r.agreement))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Disambiguate(i) => disambiguate(i),
        Command::Prove(a) => run_prove(a),
        Command::Check(a) => run_check(a),
        Command::Oracle(a) => run_oracle(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
