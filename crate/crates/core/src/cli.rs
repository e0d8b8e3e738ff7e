//! The `morphic` command line.
//!
//! Exit codes: 0 ok or verified, 1 violation found or theorem refuted,
//! 2 usage, parse, domain or I/O error, 3 resource budget exceeded.
//! Machine-readable output goes to `out`; progress goes to `err`.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::characterize::{manifest_paths, verify_characterization_with, TheoremManifest};
use crate::constraint::{check, ConstraintSet};
use crate::error::{Error, Result};
use crate::pattern::{find_occurrences, render_occurrences, Formula};
use crate::repetition::{distinct_min_overlaps, distinct_squares, max_exponent};
use crate::search::{
    count_by_length_with, extendable_set_with, longest_word_search_with, LetterOrder, OutcomeKind,
    SearchLimits,
};
use crate::word::{fixed_point_prefix, morphic_prefix, render_word_set, Morphism, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "morphic",
    version,
    about = "Morphic words, repetitions and avoidance search"
)]
struct Cli {
    #[command(flatten)]
    budgets: Budgets,
    /// Write results to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Suppress progress messages.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Budgets {
    /// Search node budget (good words visited).
    #[arg(long, global = true, env = "MORPHIC_NODE_BUDGET")]
    node_budget: Option<u64>,
    /// Wall-clock budget in seconds for searches.
    #[arg(long, global = true, env = "MORPHIC_TIMEOUT")]
    timeout: Option<u64>,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true, env = "MORPHIC_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct Input {
    /// File holding one word (whitespace is ignored).
    #[arg(long, conflicts_with = "stdin", required_unless_present = "stdin")]
    input: Option<PathBuf>,
    /// Read the word from standard input.
    #[arg(long)]
    stdin: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a prefix of a fixed point, or of its image under --outer.
    Generate {
        #[arg(long)]
        morphism: Morphism,
        #[arg(long)]
        outer: Option<Morphism>,
        #[arg(long)]
        length: usize,
    },
    /// Distinct squares of a word, one per line.
    Squares(Input),
    /// Distinct minimal overlaps of a word, one per line.
    Overlaps(Input),
    /// Maximal exponent of a word with a witness.
    Exponent(Input),
    /// Occurrences of a formula, one assignment per line.
    Match {
        #[arg(long)]
        formula: Formula,
        #[command(flatten)]
        input: Input,
        /// Longest variable image considered (default: the word length).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Check a word against a constraint file.
    Check {
        #[arg(long)]
        constraints: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// Depth-first search for a long good word.
    Search {
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        budget_length: usize,
        #[arg(long)]
        budget_nodes: Option<u64>,
        /// Try letters in decreasing order.
        #[arg(long)]
        descending: bool,
    },
    /// Words of length L extendable by `horizon` letters on both sides.
    Extendable {
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Number of good words of each length.
    Counts {
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        max: usize,
    },
    /// Verify one theorem manifest.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Verify every manifest in a directory.
    VerifyAll {
        #[arg(long, default_value = "manifests")]
        dir: PathBuf,
    },
}

enum Outcome {
    Ok,
    Refuted,
}

struct Context<'a> {
    budgets: &'a Budgets,
    quiet: bool,
    err: &'a mut dyn Write,
    pool: Option<rayon::ThreadPool>,
}

impl Context<'_> {
    fn par<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    fn limits(&self, default_nodes: u64) -> SearchLimits {
        SearchLimits {
            node_budget: self.budgets.node_budget.unwrap_or(default_nodes),
            parallel: true,
            deadline: self
                .budgets
                .timeout
                .map(|s| Instant::now() + Duration::from_secs(s)),
        }
    }

    fn progress(&mut self, msg: &str) {
        if !self.quiet {
            let _ = writeln!(self.err, "{msg}");
        }
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut buffer = Vec::new();
    let pool = cli.budgets.workers.map(|n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Resource(format!("cannot start workers: {e}")))
    });
    let result = match pool.transpose() {
        Ok(pool) => {
            let mut ctx = Context {
                budgets: &cli.budgets,
                quiet: cli.quiet,
                err: &mut *err,
                pool,
            };
            dispatch(&cli.command, &mut ctx, &mut buffer)
        }
        Err(e) => Err(e),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &buffer).map_err(|e| Error::io(path, e)),
        None => out
            .write_all(&buffer)
            .map_err(|e| Error::io(Path::new("<stdout>"), e)),
    };
    match result.and_then(|o| written.map(|_| o)) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Refuted) => EXIT_REFUTED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_resource() {
                if let Error::NodeBudget { best, .. } = &e {
                    if !best.is_empty() {
                        let _ = writeln!(err, "longest good word so far ({}): {best}", best.len());
                    }
                }
                EXIT_RESOURCE
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn read_word(input: &Input) -> Result<Word> {
    let text = match &input.input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::io(Path::new("<stdin>"), e))?;
            s
        }
    };
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    compact.parse()
}

fn emit(out: &mut Vec<u8>, text: impl AsRef<str>) -> Result<()> {
    out.write_all(text.as_ref().as_bytes())
        .map_err(|e| Error::io(Path::new("<output>"), e))
}

fn dispatch(cmd: &Command, ctx: &mut Context<'_>, out: &mut Vec<u8>) -> Result<Outcome> {
    match cmd {
        Command::Generate {
            morphism,
            outer,
            length,
        } => {
            let w = match outer {
                Some(g) => morphic_prefix(g, morphism, *length)?,
                None => fixed_point_prefix(morphism, *length)?,
            };
            emit(out, format!("{w}\n"))?;
        }
        Command::Squares(input) => {
            emit(out, render_word_set(&distinct_squares(&read_word(input)?)))?;
        }
        Command::Overlaps(input) => {
            emit(
                out,
                render_word_set(&distinct_min_overlaps(&read_word(input)?)),
            )?;
        }
        Command::Exponent(input) => {
            let w = read_word(input)?;
            let (e, r) = max_exponent(&w)?;
            emit(
                out,
                format!(
                    "exponent {e}\nstart {}\nperiod {}\nfactor {}\n",
                    r.start,
                    r.period,
                    r.factor(&w)
                ),
            )?;
        }
        Command::Match {
            formula,
            input,
            cap,
        } => {
            let w = read_word(input)?;
            let occ = find_occurrences(&w, formula, cap.unwrap_or(w.len()).max(1))?;
            emit(out, render_occurrences(&occ))?;
        }
        Command::Check { constraints, input } => {
            let c = ConstraintSet::from_file(constraints)?;
            let w = read_word(input)?;
            return match check(&w, &c)? {
                None => {
                    emit(out, "ok\n")?;
                    Ok(Outcome::Ok)
                }
                Some(v) => {
                    emit(out, format!("violation {v}\nwitness {}\n", v.witness(&w)))?;
                    Ok(Outcome::Refuted)
                }
            };
        }
        Command::Search {
            constraints,
            budget_length,
            budget_nodes,
            descending,
        } => {
            let c = ConstraintSet::from_file(constraints)?;
            let mut limits = ctx.limits(crate::search::DEFAULT_NODE_BUDGET);
            if let Some(b) = budget_nodes {
                limits.node_budget = *b;
            }
            let order = if *descending {
                LetterOrder::Descending
            } else {
                LetterOrder::Ascending
            };
            ctx.progress(&format!("searching {}", constraints.display()));
            let o = longest_word_search_with(&c, *budget_length, order, &limits)?;
            let kind = match o.kind {
                OutcomeKind::ReachedBudget => "reached_budget",
                OutcomeKind::Exhausted => "exhausted",
            };
            let witness = o.witness.map(|w| w.to_string()).unwrap_or_default();
            emit(
                out,
                format!(
                    "outcome {kind}\nmax_length {}\nwitness {witness}\ntree_nodes {}\n",
                    o.max_length, o.tree_nodes
                ),
            )?;
        }
        Command::Extendable {
            constraints,
            length,
            horizon,
        } => {
            if *length == 0 {
                return Err(Error::Domain("length must be positive".into()));
            }
            let c = ConstraintSet::from_file(constraints)?;
            let limits = ctx.limits(crate::search::DEFAULT_NODE_BUDGET);
            let h = horizon.unwrap_or(*length);
            let s = ctx.par(|| extendable_set_with(&c, *length, h, &limits))?;
            emit(out, render_word_set(s.words()))?;
        }
        Command::Counts { constraints, max } => {
            if *max == 0 {
                return Err(Error::Domain("--max must be positive".into()));
            }
            let c = ConstraintSet::from_file(constraints)?;
            let limits = ctx.limits(crate::search::DEFAULT_NODE_BUDGET);
            let counts = ctx.par(|| count_by_length_with(&c, *max, &limits))?;
            let mut text = String::new();
            for (i, n) in counts.iter().enumerate() {
                text.push_str(&format!("{}\t{n}\n", i + 1));
            }
            emit(out, text)?;
        }
        Command::Verify { manifest } => {
            let m = TheoremManifest::from_file(manifest)?;
            ctx.progress(&format!("verifying {}", m.name));
            let limits = ctx.limits(m.node_budget);
            let report = ctx.par(|| verify_characterization_with(&m, &limits))?;
            emit(out, report.to_string())?;
            if !report.passed() {
                return Ok(Outcome::Refuted);
            }
        }
        Command::VerifyAll { dir } => {
            let mut all_passed = true;
            for path in manifest_paths(dir)? {
                let m = TheoremManifest::from_file(&path)?;
                ctx.progress(&format!("verifying {}", m.name));
                let limits = ctx.limits(m.node_budget);
                let report = ctx.par(|| verify_characterization_with(&m, &limits))?;
                all_passed &= report.passed();
                emit(out, report.to_string())?;
            }
            if !all_passed {
                return Ok(Outcome::Refuted);
            }
        }
    }
    Ok(Outcome::Ok)
}
