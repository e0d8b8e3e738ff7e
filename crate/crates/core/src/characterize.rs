//! Bounded verification of factor-set characterizations.
//!
//! A theorem of the form "every bi-infinite word of the constrained language
//! has the factor set of the morphic word x" is checked at one length `L`:
//! the two-sided extendable set `S^L` must equal the length-`L` factors of a
//! long prefix of `x`, and the prefix itself must satisfy the constraints.
//! Extra checks cover square and overlap inventories, localizer reductions,
//! code membership and morphism identities.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::constraint::{check, ConstraintSet};
use crate::error::{Error, Result};
use crate::pattern::{avoids, find_occurrences, Formula};
use crate::repetition::{distinct_min_overlaps, distinct_squares};
use crate::search::{extendable_set_with, SearchLimits, DEFAULT_NODE_BUDGET};
use crate::word::{
    compose, erase_letters, factors, find, fixed_point_prefix, morphic_prefix, Letter, Morphism,
    Word,
};

pub use crate::word::morphisms_equal;

/// True iff `v` is a factor of some bi-infinite concatenation of `pieces`.
/// Empty pieces are ignored; with no non-empty piece only `ε` qualifies.
pub fn code_factor_membership(v: &Word, pieces: &[Word]) -> bool {
    let v = v.as_slice();
    let pieces: Vec<&[u8]> = pieces
        .iter()
        .map(Word::as_slice)
        .filter(|p| !p.is_empty())
        .collect();
    if v.is_empty() {
        return true;
    }
    if pieces.iter().any(|p| find(p, v).is_some()) {
        return true;
    }
    let n = v.len();
    // boundary[i]: v[..i] can end exactly at a cut between two pieces.
    let mut boundary = vec![false; n + 1];
    boundary[0] = true;
    for i in 1..=n {
        boundary[i] = pieces.iter().any(|p| p.ends_with(&v[..i]));
    }
    for i in 0..n {
        if !boundary[i] {
            continue;
        }
        for p in &pieces {
            let rest = &v[i..];
            if rest.len() < p.len() {
                if p.starts_with(rest) {
                    return true;
                }
            } else if rest.starts_with(p) {
                boundary[i + p.len()] = true;
            }
        }
    }
    boundary[n]
}

/// True iff every length-`k` factor of `w` contains `u`.
pub fn every_window_contains(w: &Word, k: usize, u: &Word) -> Result<bool> {
    let (s, u) = (w.as_slice(), u.as_slice());
    if k > s.len() || u.len() > k {
        return Err(Error::domain(format!(
            "need |u| <= k <= |w|, got |u| = {}, k = {k}, |w| = {}",
            u.len(),
            s.len()
        )));
    }
    let starts: Vec<usize> = if u.is_empty() {
        (0..=s.len()).collect()
    } else {
        s.windows(u.len())
            .enumerate()
            .filter(|(_, f)| *f == u)
            .map(|(i, _)| i)
            .collect()
    };
    // Window [a, a + k) is covered iff the first occurrence at or after `a`
    // ends inside it.
    let mut next = 0;
    for a in 0..=s.len() - k {
        while next < starts.len() && starts[next] < a {
            next += 1;
        }
        match starts.get(next) {
            Some(&o) if o + u.len() <= a + k => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// The morphic word `outer(inner^ω(0))`, or the pure fixed point when there
/// is no outer morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub outer: Option<Morphism>,
    pub inner: Morphism,
}

impl Target {
    pub fn prefix(&self, n: usize) -> Result<Word> {
        match &self.outer {
            Some(g) => morphic_prefix(g, &self.inner, n),
            None => fixed_point_prefix(&self.inner, n),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outer {
            Some(g) => write!(f, "{g} applied to the fixed point of {}", self.inner),
            None => write!(f, "fixed point of {}", self.inner),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extra {
    /// The prefix also satisfies a second, equivalent constraint set.
    AlsoConstraints {
        path: PathBuf,
        constraints: Box<ConstraintSet>,
    },
    ExpectSquares(BTreeSet<Word>),
    ExpectOverlaps(BTreeSet<Word>),
    /// Record the minimal-overlap inventory without asserting it.
    DeriveOverlaps,
    /// Every window of length `window` contains `factor`, and the first
    /// `prefix` letters avoid `pattern`.
    Localizer {
        window: usize,
        factor: Word,
        pattern: Formula,
        prefix: usize,
    },
    /// Every member of `S^L` lives in the code.
    CodePieces(Vec<Word>),
    /// Occurrences of `formula` in the first `prefix` letters, with images of
    /// length at most `cap`: their whole-formula images are exactly `images`
    /// and there are exactly `|images|` of them.
    ExpectOccurrences {
        formula: Formula,
        cap: usize,
        prefix: usize,
        images: BTreeSet<Word>,
    },
    AvoidPattern {
        pattern: Formula,
        prefix: usize,
    },
    AbsentFactors(BTreeSet<Word>),
    ExpectCompose {
        outer: Morphism,
        inner: Morphism,
        equals: Morphism,
    },
    ExpectErase {
        morphism: Morphism,
        letters: Vec<Letter>,
        equals: Morphism,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremManifest {
    pub name: String,
    pub constraints_path: PathBuf,
    pub constraints: ConstraintSet,
    pub target: Target,
    pub check_length: usize,
    pub horizon: usize,
    pub prefix: usize,
    pub node_budget: u64,
    pub extras: Vec<Extra>,
}

pub const DEFAULT_LOCALIZER_PREFIX: usize = 5000;

/// `max(10 L, 10^4)`.
/// `key=value` options trailing a directive.
type Options = Vec<(String, usize)>;

pub fn default_prefix(check_length: usize) -> usize {
    check_length.saturating_mul(10).max(10_000)
}

impl TheoremManifest {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        TheoremManifest::parse(&text, base).map_err(|e| match e {
            Error::Syntax(m) => Error::Syntax(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parses manifest text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut name = None;
        let mut constraints = None;
        let mut outer = None;
        let mut inner = None;
        let mut check_length = None;
        let mut horizon = None;
        let mut prefix = None;
        let mut node_budget = DEFAULT_NODE_BUDGET;
        let mut extras = Vec::new();
        let mut pieces_from_outer = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::syntax(format!("line {}: {msg}: '{line}'", lineno + 1));
            let mut tokens = line.split_whitespace();
            let directive = tokens.next().unwrap();
            let args: Vec<&str> = tokens.collect();
            let one = || -> Result<&str> {
                match args.as_slice() {
                    [a] => Ok(a),
                    _ => Err(err("expected exactly one argument")),
                }
            };
            let number = |s: &str| s.parse::<usize>().map_err(|_| err("expected a number"));
            // Splits trailing `key=value` options off a word list.
            let options = |args: &[&str]| -> Result<(Vec<String>, Options)> {
                let mut plain = Vec::new();
                let mut opts = Vec::new();
                for a in args {
                    match a.split_once('=') {
                        Some((k, _)) if !["cap", "prefix"].contains(&k) => {
                            return Err(err(&format!("unknown option '{k}'")));
                        }
                        Some((k, v)) => opts.push((k.to_string(), number(v)?)),
                        None => plain.push(a.to_string()),
                    }
                }
                Ok((plain, opts))
            };
            let words = |items: &[String]| -> Result<BTreeSet<Word>> {
                items.iter().map(|s| s.parse()).collect()
            };
            match directive {
                "name" => name = Some(one()?.to_string()),
                "constraints" => {
                    let path = base.join(one()?);
                    constraints = Some((ConstraintSet::from_file(&path)?, path));
                }
                "target-outer" => outer = Some(one()?.parse::<Morphism>()?),
                "target-inner" => inner = Some(one()?.parse::<Morphism>()?),
                "check-length" => check_length = Some(number(one()?)?),
                "horizon" => horizon = Some(number(one()?)?),
                "prefix" => prefix = Some(number(one()?)?),
                "node-budget" => node_budget = number(one()?)? as u64,
                "also-constraints" => {
                    let path = base.join(one()?);
                    extras.push(Extra::AlsoConstraints {
                        constraints: Box::new(ConstraintSet::from_file(&path)?),
                        path,
                    });
                }
                "expect-squares" => {
                    extras.push(Extra::ExpectSquares(words(&options(&args)?.0)?));
                }
                "expect-overlaps" => {
                    extras.push(Extra::ExpectOverlaps(words(&options(&args)?.0)?));
                }
                "expect-overlaps-derived" => extras.push(Extra::DeriveOverlaps),
                "expect-absent" => extras.push(Extra::AbsentFactors(words(&options(&args)?.0)?)),
                "localizer" => {
                    let (plain, opts) = options(&args)?;
                    let [window, factor, pattern] = plain.as_slice() else {
                        return Err(err("expected 'localizer k u PATTERN [prefix=N]'"));
                    };
                    extras.push(Extra::Localizer {
                        window: number(window)?,
                        factor: factor.parse()?,
                        pattern: pattern.parse()?,
                        prefix: option(&opts, "prefix", DEFAULT_LOCALIZER_PREFIX),
                    });
                }
                "avoid-pattern" => {
                    let (plain, opts) = options(&args)?;
                    let [pattern] = plain.as_slice() else {
                        return Err(err("expected 'avoid-pattern P [prefix=N]'"));
                    };
                    extras.push(Extra::AvoidPattern {
                        pattern: pattern.parse()?,
                        prefix: option(&opts, "prefix", DEFAULT_LOCALIZER_PREFIX),
                    });
                }
                "code-pieces" => match args.as_slice() {
                    ["from-target-outer"] => pieces_from_outer = true,
                    [] => return Err(err("missing pieces")),
                    _ => {
                        let pieces = args.iter().map(|s| s.parse()).collect::<Result<_>>()?;
                        extras.push(Extra::CodePieces(pieces));
                    }
                },
                "expect-occurrences" => {
                    let (plain, opts) = options(&args)?;
                    let Some((formula, images)) = plain.split_first() else {
                        return Err(err(
                            "expected 'expect-occurrences F [cap=K] [prefix=N] words'",
                        ));
                    };
                    extras.push(Extra::ExpectOccurrences {
                        formula: formula.parse()?,
                        cap: option(&opts, "cap", 20),
                        prefix: option(&opts, "prefix", DEFAULT_LOCALIZER_PREFIX),
                        images: words(images)?,
                    });
                }
                "expect-compose" => match args.as_slice() {
                    [o, i, e] => extras.push(Extra::ExpectCompose {
                        outer: o.parse()?,
                        inner: i.parse()?,
                        equals: e.parse()?,
                    }),
                    _ => return Err(err("expected 'expect-compose OUTER INNER RESULT'")),
                },
                "expect-erase" => match args.as_slice() {
                    [m, letters, e] => extras.push(Extra::ExpectErase {
                        morphism: m.parse()?,
                        letters: letters
                            .chars()
                            .map(Letter::from_char)
                            .collect::<Result<_>>()?,
                        equals: e.parse()?,
                    }),
                    _ => return Err(err("expected 'expect-erase MORPHISM LETTERS RESULT'")),
                },
                _ => return Err(err("unknown directive")),
            }
        }
        let name = name.ok_or_else(|| Error::syntax("missing 'name'"))?;
        let (constraints, constraints_path) =
            constraints.ok_or_else(|| Error::syntax("missing 'constraints'"))?;
        let inner = inner.ok_or_else(|| Error::syntax("missing 'target-inner'"))?;
        let check_length = check_length.ok_or_else(|| Error::syntax("missing 'check-length'"))?;
        if check_length == 0 {
            return Err(Error::domain("check-length must be positive"));
        }
        if pieces_from_outer {
            let source = outer.as_ref().unwrap_or(&inner);
            extras.push(Extra::CodePieces(source.images().to_vec()));
        }
        let prefix = prefix.unwrap_or_else(|| default_prefix(check_length));
        Ok(TheoremManifest {
            name,
            constraints_path,
            constraints,
            target: Target { outer, inner },
            check_length,
            horizon: horizon.unwrap_or(check_length),
            prefix,
            node_budget,
            extras,
        })
    }
}

fn option(opts: &[(String, usize)], key: &str, default: usize) -> usize {
    opts.iter()
        .rev()
        .find(|(k, _)| k == key)
        .map_or(default, |(_, v)| *v)
}

/// Outcome of one verification step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Both differences between `S^L` and the target's length-`L` factors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FactorComparison {
    pub length: usize,
    pub extendable_count: usize,
    pub target_count: usize,
    pub extendable_only: BTreeSet<Word>,
    pub target_only: BTreeSet<Word>,
}

impl FactorComparison {
    pub fn new(length: usize, extendable: &BTreeSet<Word>, target: &BTreeSet<Word>) -> Self {
        FactorComparison {
            length,
            extendable_count: extendable.len(),
            target_count: target.len(),
            extendable_only: extendable.difference(target).cloned().collect(),
            target_only: target.difference(extendable).cloned().collect(),
        }
    }

    pub fn equal(&self) -> bool {
        self.extendable_only.is_empty() && self.target_only.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub checks: Vec<CheckOutcome>,
    pub comparison: Option<FactorComparison>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn verdict_line(&self) -> String {
        let v = if self.passed() { "PASS" } else { "FAIL" };
        format!("VERDICT {} {v}", self.name)
    }
}

const SHOWN_DIFFERENCES: usize = 20;

fn show(words: &BTreeSet<Word>) -> String {
    let mut out: Vec<String> = words
        .iter()
        .take(SHOWN_DIFFERENCES)
        .map(Word::to_string)
        .collect();
    if words.len() > SHOWN_DIFFERENCES {
        out.push(format!("... ({} in total)", words.len()));
    }
    out.join(" ")
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem {}", self.name)?;
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "  {mark}  {}: {}", c.label, c.detail)?;
        }
        if let Some(cmp) = self.comparison.as_ref().filter(|c| !c.equal()) {
            writeln!(
                f,
                "  in S^{} only: {}",
                cmp.length,
                show(&cmp.extendable_only)
            )?;
            writeln!(
                f,
                "  in Fact_{} only: {}",
                cmp.length,
                show(&cmp.target_only)
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        writeln!(f, "{}", self.verdict_line())
    }
}

fn inventory(words: &BTreeSet<Word>) -> String {
    if words.is_empty() {
        "none".into()
    } else {
        words
            .iter()
            .map(Word::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn verify_characterization(m: &TheoremManifest) -> Result<Report> {
    verify_characterization_with(
        m,
        &SearchLimits {
            node_budget: m.node_budget,
            ..SearchLimits::default()
        },
    )
}

pub fn verify_characterization_with(m: &TheoremManifest, limits: &SearchLimits) -> Result<Report> {
    let mut report = Report {
        name: m.name.clone(),
        checks: Vec::new(),
        comparison: None,
        notes: Vec::new(),
    };
    let (l, h, n) = (m.check_length, m.horizon, m.prefix);
    let prefix = m.target.prefix(n)?;
    report
        .notes
        .push(format!("target: {}, prefix length {n}", m.target));

    // (a) the target prefix is good.
    match check(&prefix, &m.constraints)? {
        None => report.push("(a) target prefix", true, "satisfies the constraints"),
        Some(v) => {
            let detail = format!("violation {v}: {}", v.witness(&prefix));
            report.push("(a) target prefix", false, detail);
        }
    }

    // (b) S^L equals Fact_L.
    let mut extendable = BTreeSet::new();
    if n < l {
        report.push(
            "(b) factor sets",
            false,
            format!("prefix length {n} is shorter than L = {l}"),
        );
    } else {
        let s = extendable_set_with(&m.constraints, l, h, limits)?;
        extendable = s.members.into_keys().collect();
        let fact = factors(&prefix, l);
        let cmp = FactorComparison::new(l, &extendable, &fact);
        let detail = if cmp.equal() {
            format!("S^{l} (horizon {h}) equals Fact_{l}: {} words", fact.len())
        } else {
            format!(
                "S^{l} (horizon {h}) has {} words, Fact_{l} has {}; {} only in S, {} only in Fact",
                cmp.extendable_count,
                cmp.target_count,
                cmp.extendable_only.len(),
                cmp.target_only.len()
            )
        };
        report.push("(b) factor sets", cmp.equal(), detail);
        if cmp.equal() && l > 1 {
            let shorter: BTreeSet<Word> =
                extendable.iter().flat_map(|v| factors(v, l - 1)).collect();
            let ok = shorter == factors(&prefix, l - 1);
            report.push(
                "(b) sanity",
                ok,
                format!("length-{} factors of S^{l} match Fact_{}", l - 1, l - 1),
            );
        }
        report.comparison = Some(cmp);
        let half = factors(&prefix.prefix(n / 2), l).len();
        if half == fact.len() {
            report.notes.push(format!(
                "Fact_{l} already complete at prefix length {}",
                n / 2
            ));
        } else {
            report.notes.push(format!(
                "Fact_{l} still growing after prefix length {} ({half} of {} words); \
                 the prefix may be too short",
                n / 2,
                fact.len()
            ));
        }
    }

    // (c) extra checks.
    for extra in &m.extras {
        run_extra(extra, &prefix, &extendable, &mut report)?;
    }
    Ok(report)
}

fn run_extra(
    extra: &Extra,
    prefix: &Word,
    extendable: &BTreeSet<Word>,
    report: &mut Report,
) -> Result<()> {
    match extra {
        Extra::AlsoConstraints { path, constraints } => {
            let label = format!(
                "(c) constraints {}",
                path.file_name().unwrap_or_default().to_string_lossy()
            );
            match check(prefix, constraints)? {
                None => report.push(label, true, "prefix satisfies them"),
                Some(v) => report.push(
                    label,
                    false,
                    format!("violation {v}: {}", v.witness(prefix)),
                ),
            }
        }
        Extra::ExpectSquares(expected) => {
            let got = distinct_squares(prefix);
            report.push("(c) squares", &got == expected, inventory(&got));
        }
        Extra::ExpectOverlaps(expected) => {
            let got = distinct_min_overlaps(prefix);
            report.push("(c) overlaps", &got == expected, inventory(&got));
        }
        Extra::DeriveOverlaps => {
            let got = distinct_min_overlaps(prefix);
            report.notes.push(format!(
                "minimal overlaps of the prefix: {}",
                inventory(&got)
            ));
        }
        Extra::Localizer {
            window,
            factor,
            pattern,
            prefix: len,
        } => {
            let windows = every_window_contains(prefix, *window, factor)?;
            report.push(
                "(c) localizer window",
                windows,
                format!("every length-{window} factor contains {factor}"),
            );
            let short = prefix.prefix(*len);
            let ok = avoids(&short, pattern)?;
            report.push(
                "(c) localizer pattern",
                ok,
                format!("the length-{} prefix avoids {pattern}", short.len()),
            );
            report.notes.push(format!(
                "assumed, not re-proved: the window property and avoidance of {pattern} \
                 exclude every long square of the whole word"
            ));
        }
        Extra::CodePieces(pieces) => {
            let outside: BTreeSet<Word> = extendable
                .iter()
                .filter(|v| !code_factor_membership(v, pieces))
                .cloned()
                .collect();
            let names: Vec<String> = pieces.iter().map(Word::to_string).collect();
            let detail = if outside.is_empty() {
                format!("every member of S^L lives in {{{}}}", names.join(", "))
            } else {
                format!(
                    "{} members outside the code: {}",
                    outside.len(),
                    show(&outside)
                )
            };
            report.push(
                "(c) code",
                outside.is_empty() && !extendable.is_empty(),
                detail,
            );
        }
        Extra::ExpectOccurrences {
            formula,
            cap,
            prefix: len,
            images,
        } => {
            let short = prefix.prefix(*len);
            let occ = find_occurrences(&short, formula, *cap)?;
            let got: BTreeSet<Word> = occ
                .iter()
                .map(|a| {
                    let parts = a.fragment_images(formula);
                    parts.iter().fold(Word::empty(), |acc, p| acc.concat(p))
                })
                .collect();
            let ok = &got == images && occ.len() == images.len();
            report.push(
                format!("(c) occurrences of {formula}"),
                ok,
                format!("{} assignments with images {}", occ.len(), inventory(&got)),
            );
        }
        Extra::AvoidPattern {
            pattern,
            prefix: len,
        } => {
            let short = prefix.prefix(*len);
            let ok = avoids(&short, pattern)?;
            report.push(
                format!("(c) avoids {pattern}"),
                ok,
                format!("length-{} prefix", short.len()),
            );
        }
        Extra::AbsentFactors(words) => {
            let present: BTreeSet<Word> = words
                .iter()
                .filter(|u| find(prefix.as_slice(), u.as_slice()).is_some())
                .cloned()
                .collect();
            report.push(
                "(c) absent factors",
                present.is_empty(),
                format!("present: {}", inventory(&present)),
            );
        }
        Extra::ExpectCompose {
            outer,
            inner,
            equals,
        } => {
            let composed = compose(outer, inner)?;
            report.push(
                "(c) composition",
                morphisms_equal(&composed, equals),
                format!("({outer}) o ({inner}) = {composed}"),
            );
        }
        Extra::ExpectErase {
            morphism,
            letters,
            equals,
        } => {
            let erased = erase_letters(morphism, letters)?;
            let shown: String = letters.iter().map(|l| l.to_char()).collect();
            report.push(
                "(c) erasure",
                morphisms_equal(&erased, equals),
                format!("{morphism} without {shown} = {erased}"),
            );
        }
    }
    Ok(())
}

/// Manifest files directly inside `dir` (hidden files and directories
/// skipped), sorted by file name.
pub fn manifest_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if path.is_file() && !hidden {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Verifies every manifest in `dir` on `workers` threads. Reports come back
/// in file-name order whatever the worker count.
pub fn verify_all(dir: &Path, workers: usize) -> Result<Vec<Report>> {
    let paths = manifest_paths(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start workers: {e}")))?;
    pool.install(|| {
        paths
            .par_iter()
            .map(|p| verify_characterization(&TheoremManifest::from_file(p)?))
            .collect()
    })
}
