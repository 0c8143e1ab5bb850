use std::fmt::Write as _;
use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freeexp::bands::{extract_cancellation, MarkedBandSystem, UnbundlingMap};
use freeexp::expsolve::{solve_with, EquationInstance, SolveError};
use freeexp::lattice::{parse_point, LatticeError, SolutionSet, DEFAULT_BUDGET};
use freeexp::twist::{decide_extension_with, ExtensionError, ExtensionInstance};
use freeexp::word::Word;

#[derive(Parser)]
#[command(name = "freeexp", version, about = "Exponential equations in free groups")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solution set of an equation instance (JSON).
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "1")]
        jobs: NonZeroUsize,
    },
    /// Whether a point lies in a solution set.
    Member {
        solution: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Every solution of an instance in the box [-B, B]^l.
    Brute {
        instance: PathBuf,
        #[arg(long = "box")]
        bound: u32,
    },
    /// Maximal bundle of a marked band system.
    Bundle { bands: PathBuf },
    /// Unbundles a maximal marked band system by the fiber sizes `--phi`.
    Unbundle {
        bands: PathBuf,
        #[arg(long)]
        phi: String,
    },
    /// Validates a band system, or checks it against a word with `--word`.
    Checkband {
        bands: PathBuf,
        #[arg(long, requires = "rank")]
        word: Option<String>,
        #[arg(long)]
        rank: Option<u32>,
    },
    /// Cancellation band system of the word stored in a file.
    Extract {
        word: PathBuf,
        #[arg(long)]
        rank: u32,
    },
    /// Decides whether twist exponents exist for an extension instance.
    TwistExtend {
        instance: PathBuf,
        #[arg(long, default_value = "1")]
        jobs: NonZeroUsize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Lattice(l) => l.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::BudgetExhausted(_) => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ExtensionError> for Failure {
    fn from(e: ExtensionError) -> Self {
        match e {
            ExtensionError::Lattice(l) => l.into(),
            ExtensionError::Solve(s) => s.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Text to print and whether the decided answer is yes.
struct Outcome {
    text: String,
    yes: bool,
}

impl Outcome {
    fn yes(text: String) -> Self {
        Self { text, yes: true }
    }

    fn no(text: String) -> Self {
        Self { text, yes: false }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

/// The band file holds one system on its first non-blank line.
fn read_bands(path: &Path) -> Result<MarkedBandSystem, Failure> {
    let text = read(path)?;
    let (number, line) = text
        .lines()
        .enumerate()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Failure::Input(format!("{}: no band system found", path.display())))?;
    line.parse()
        .map_err(|e| Failure::Input(format!("{}:{}: {e}", path.display(), number + 1)))
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Solve { instance, jobs } => {
            let parsed = EquationInstance::from_json(&read(&instance)?).map_err(in_file(&instance))?;
            let set = solve_with(&parsed, jobs)?;
            Ok(Outcome::yes(set.to_json() + "\n"))
        }
        Command::Member {
            solution,
            point,
            budget,
        } => {
            let set = SolutionSet::from_json(&read(&solution)?).map_err(in_file(&solution))?;
            let k = parse_point(&point)?;
            Ok(if set.member_with_budget(&k, budget)? {
                Outcome::yes("yes\n".into())
            } else {
                Outcome::no("no\n".into())
            })
        }
        Command::Brute { instance, bound } => {
            let parsed = EquationInstance::from_json(&read(&instance)?).map_err(in_file(&instance))?;
            let points = parsed.brute_force(i64::from(bound))?;
            let doc = serde_json::json!({ "arity": parsed.arity(), "points": points });
            Ok(Outcome::yes(doc.to_string() + "\n"))
        }
        Command::Bundle { bands } => {
            let system = read_bands(&bands)?;
            let (bundle, map) = system.maximal_bundle();
            Ok(Outcome::yes(format!("{bundle}\niota={}\n", join(map.assignment()))))
        }
        Command::Unbundle { bands, phi } => {
            let system = read_bands(&bands)?;
            let values = phi
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| Failure::Input(format!("--phi: {v:?} is not a positive integer")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let unbundled = system
                .unbundle(&UnbundlingMap::new(values))
                .map_err(|e| Failure::Input(format!("--phi: {e}")))?;
            Ok(Outcome::yes(format!("{unbundled}\n")))
        }
        Command::Checkband { bands, word, rank } => {
            let system = read_bands(&bands)?;
            match (word, rank) {
                (Some(word), Some(rank)) => {
                    let word = Word::parse(rank, &word).map_err(|e| Failure::Input(format!("--word: {e}")))?;
                    let ok = system
                        .system()
                        .is_cancellation(&word)
                        .map_err(|e| Failure::Input(e.to_string()))?;
                    Ok(if ok {
                        Outcome::yes("yes\n".into())
                    } else {
                        Outcome::no("no\n".into())
                    })
                }
                _ => Ok(Outcome::yes(format!(
                    "valid; maximal={}\n",
                    if system.is_maximal() { "yes" } else { "no" }
                ))),
            }
        }
        Command::Extract { word, rank } => {
            let text = read(&word)?;
            let parsed = Word::parse(rank, text.trim()).map_err(in_file(&word))?;
            Ok(match extract_cancellation(&parsed) {
                Some(system) => Outcome::yes(format!("{system}\n")),
                None => Outcome::no("no\n".into()),
            })
        }
        Command::TwistExtend {
            instance,
            jobs,
            budget,
        } => {
            let parsed = ExtensionInstance::from_json(&read(&instance)?).map_err(in_file(&instance))?;
            Ok(match decide_extension_with(&parsed, jobs, budget)? {
                Some(h) => {
                    let mut text = String::from("yes\n");
                    let _ = writeln!(text, "{}", join(&h));
                    Outcome::yes(text)
                }
                None => Outcome::no("no\n".into()),
            })
        }
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &outcome.text),
                None => {
                    print!("{}", outcome.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {}: {e}", cli.output.unwrap().display());
                return ExitCode::from(2);
            }
            if outcome.yes {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
