//! `isect`: batch front end for the annotated calculi, their reductions and
//! the decreasing measure.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 type error, 3 non-uniform
//! or wrapped term where an erasable one is required, 4 fuel or
//! strong-normalization failure, 5 internal invariant violation.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use isect::measure::{measure_report, w_measure, MeasureError};
use isect::oracle::{explore, explore_beta, infer_sn, longest_chain, normal_form, Fuel, OracleError};
use isect::reduction::{redexes_in, simulate_beta, step, Calculus, ReductionError, Step};
use isect::syntax::{parse_annotated, parse_untyped, ParseError, Position, Term};
use isect::typing::{
    check, decorate, decorate_set, erase, minimal_context, CurryDerivation, DerivationError, Rule, TypeError,
};

#[derive(Parser)]
#[command(name = "isect", version, about = "Intersection-typed λ-calculi with memory and a decreasing measure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CalculusArg {
    I,
    Im,
}

impl From<CalculusArg> for Calculus {
    fn from(c: CalculusArg) -> Calculus {
        match c {
            CalculusArg::I => Calculus::I,
            CalculusArg::Im => Calculus::Im,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphCalculus {
    Beta,
    I,
    Im,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Leftmost,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the type of an annotated term and its minimal context.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the untyped term refined by a uniform annotated term.
    Erase {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the annotated term encoding a Curry derivation (JSON).
    Decorate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Reduce step by step and print the trace as JSON.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "im")]
        calculus: CalculusArg,
        #[arg(long, value_enum, default_value = "leftmost")]
        strategy: Strategy,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Normalize by leftmost-innermost reduction.
    Normalize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "im")]
        calculus: CalculusArg,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
        #[arg(long)]
        json: bool,
    },
    /// Report the full simplification stages and the measure W (JSON).
    Measure { file: PathBuf },
    /// Simulate a β-step of the untyped term on its refinement (JSON trace).
    Simulate {
        term: PathBuf,
        lam: PathBuf,
        /// Position of the β-redex in the untyped term, e.g. `0.1` or `root`.
        #[arg(long)]
        pos: Position,
    },
    /// Compare the longest i-reduction chain with W.
    Chains {
        file: PathBuf,
        /// Maximum number of graph nodes.
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        #[arg(long)]
        json: bool,
    },
    /// Type a strongly normalizing untyped term.
    InferSn {
        file: PathBuf,
        /// Maximum number of β-graph nodes.
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        #[arg(long)]
        json: bool,
    },
    /// Export the reduction graph.
    Graph {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "im")]
        calculus: GraphCalculus,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::new(1, e.to_string())
    }
}

impl From<TypeError> for Failure {
    fn from(e: TypeError) -> Failure {
        let code = match e {
            TypeError::NotUniform { .. } | TypeError::WrapperPresent { .. } => 3,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Failure {
        match e {
            ReductionError::IllTyped(t) => t.into(),
            ReductionError::SearchBudgetExceeded { .. } => Failure::new(4, e.to_string()),
            ReductionError::Internal(_) => Failure::new(5, e.to_string()),
            ReductionError::WrappersNotAllowed { .. } => Failure::new(3, e.to_string()),
            ReductionError::MissingSubstituent(_) => Failure::new(2, e.to_string()),
            _ => Failure::new(1, e.to_string()),
        }
    }
}

impl From<MeasureError> for Failure {
    fn from(e: MeasureError) -> Failure {
        match e {
            MeasureError::IllTyped(t) => t.into(),
            MeasureError::Reduction(r) => r.into(),
            MeasureError::WrappersPresent => Failure::new(3, e.to_string()),
            MeasureError::DegreeZero => Failure::new(1, e.to_string()),
            MeasureError::Internal(_) => Failure::new(5, e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        match e {
            OracleError::IllTyped(t) => t.into(),
            OracleError::Reduction(r) => r.into(),
            OracleError::FuelExhausted(_) | OracleError::CycleDetected | OracleError::NotSnWithinFuel(_) => {
                Failure::new(4, e.to_string())
            }
            OracleError::Internal(_) => Failure::new(5, e.to_string()),
        }
    }
}

impl From<DerivationError> for Failure {
    fn from(e: DerivationError) -> Failure {
        match e {
            DerivationError::Format(_) => Failure::new(1, e.to_string()),
            DerivationError::Invalid { .. } => Failure::new(2, e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|s| text = s)
    };
    res.map_err(|e| Failure::new(1, format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

fn annotated(path: &Path) -> Result<Term, Failure> {
    Ok(parse_annotated(&read(path)?)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn step_json(s: &Step) -> Value {
    json!({"kind": s.kind.as_str(), "position": s.position.path(), "result": s.target.to_string()})
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Check { file, json } => {
            let t = annotated(&file)?;
            let ctx = minimal_context(&t)?;
            let a = check(&ctx, &t)?;
            Ok(if json {
                pretty(&json!({"formatVersion": 1, "term": t.to_string(), "type": a.to_string(), "context": ctx.to_json()}))
            } else {
                format!("type: {a}\ncontext: {}", if ctx.is_empty() { "(empty)".to_string() } else { ctx.to_string() })
            })
        }
        Command::Erase { file, json } => {
            let m = erase(&annotated(&file)?)?;
            Ok(if json { pretty(&json!({"formatVersion": 1, "untyped": m.to_string()})) } else { m.to_string() })
        }
        Command::Decorate { file, json } => {
            let value: Value = serde_json::from_str(&read(&file)?)
                .map_err(|e| Failure::new(1, format!("parse error: {e}")))?;
            let d = CurryDerivation::from_json(&value)?;
            let text = if d.rule == Rule::Many { decorate_set(&d)?.to_string() } else { decorate(&d)?.to_string() };
            Ok(if json {
                pretty(&json!({"formatVersion": 1, "term": text, "judgement": d.judgement().to_string()}))
            } else {
                text
            })
        }
        Command::Reduce { file, calculus, strategy, steps, seed } => {
            let calculus = Calculus::from(calculus);
            let source = annotated(&file)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cur = source.clone();
            let mut trace = Vec::new();
            for _ in 0..steps {
                let rs = redexes_in(&cur, calculus);
                if rs.is_empty() {
                    break;
                }
                let r = match strategy {
                    Strategy::Leftmost => &rs[0],
                    Strategy::Random => &rs[rng.gen_range(0..rs.len())],
                };
                let next = step(&cur, &r.position, calculus)?;
                trace.push(json!({"kind": calculus.to_string(), "position": r.position.path(), "result": next.to_string()}));
                cur = next;
            }
            let normal = redexes_in(&cur, calculus).is_empty();
            Ok(pretty(&json!({
                "formatVersion": 1,
                "source": source.to_string(),
                "calculus": calculus.to_string(),
                "steps": trace,
                "normal": normal,
            })))
        }
        Command::Normalize { file, calculus, fuel, json } => {
            let (nf, n) = normal_form(&annotated(&file)?, calculus.into(), Fuel::new(usize::MAX, fuel))?;
            Ok(if json {
                pretty(&json!({"formatVersion": 1, "normalForm": nf.to_string(), "steps": n}))
            } else {
                format!("{nf}\nsteps: {n}")
            })
        }
        Command::Measure { file } => Ok(pretty(&measure_report(&annotated(&file)?)?.to_json())),
        Command::Simulate { term, lam, pos } => {
            let t = annotated(&term)?;
            let m = parse_untyped(&read(&lam)?)?;
            let sim = simulate_beta(&t, &m, &pos)?;
            Ok(pretty(&json!({
                "formatVersion": 1,
                "source": t.to_string(),
                "untyped": m.to_string(),
                "position": pos.path(),
                "contractum": sim.untyped.to_string(),
                "steps": sim.steps.iter().map(step_json).collect::<Vec<_>>(),
                "result": sim.term.to_string(),
            })))
        }
        Command::Chains { file, fuel, json } => {
            let t = annotated(&file)?;
            let w = w_measure(&t)?;
            let chain = longest_chain(&t, Calculus::I, Fuel::nodes(fuel))?;
            if chain > w {
                return Err(Failure::new(5, format!("longest chain {chain} exceeds W = {w}")));
            }
            let verdict = "chain ≤ W";
            Ok(if json {
                pretty(&json!({"formatVersion": 1, "longestChain": chain, "W": w, "verdict": verdict}))
            } else {
                format!("longest chain: {chain}\nW: {w}\n{verdict}")
            })
        }
        Command::InferSn { file, fuel, json } => {
            let m = parse_untyped(&read(&file)?)?;
            let r = infer_sn(&m, Fuel::nodes(fuel))?;
            Ok(if json {
                pretty(&json!({
                    "formatVersion": 1,
                    "term": r.term.to_string(),
                    "context": r.context.to_json(),
                    "type": r.ty.to_string(),
                }))
            } else {
                let ctx = if r.context.is_empty() { "(empty)".to_string() } else { r.context.to_string() };
                format!("{}\ncontext: {ctx}\ntype: {}", r.term, r.ty)
            })
        }
        Command::Graph { file, calculus, fuel, format } => {
            let text = read(&file)?;
            let fuel = Fuel::nodes(fuel);
            Ok(match calculus {
                GraphCalculus::Beta => {
                    let g = explore_beta(&parse_untyped(&text)?, fuel);
                    match format {
                        GraphFormat::Dot => g.to_dot(),
                        GraphFormat::Json => pretty(&g.to_json()),
                    }
                }
                GraphCalculus::I | GraphCalculus::Im => {
                    let t = parse_annotated(&text)?;
                    let ctx = minimal_context(&t)?;
                    check(&ctx, &t)?;
                    let c = if calculus == GraphCalculus::I { Calculus::I } else { Calculus::Im };
                    if c == Calculus::I && !t.is_wrapper_free() {
                        return Err(Failure::new(3, "i-reduction is defined on wrapper-free terms"));
                    }
                    let g = explore(&t, c, fuel);
                    match format {
                        GraphFormat::Dot => g.to_dot(),
                        GraphFormat::Json => pretty(&g.to_json()),
                    }
                }
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.trim_end());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
