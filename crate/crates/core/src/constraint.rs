//! Declarative avoidance constraints and violation checking.
//!
//! A [`ConstraintSet`] bundles every constraint style the toolkit knows:
//! forbidden factors and formulas, square and overlap whitelists, a bound on
//! long squares, a bound on the number of distinct squares, a budget of
//! distinct occurrences of one formula, an exponent cap and a walk graph.
//! The language it defines is factorial.
//!
//! [`Extender`] keeps a word together with the bookkeeping needed to test a
//! one-letter extension by looking only at what the new letter completes.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::pattern::{
    find_occurrences_with_budget, first_occurrence, first_suffix_occurrence, suffix_occurrences,
    Assignment, Formula, DEFAULT_STEP_BUDGET,
};
use crate::repetition::{violating_run_len, Rational};
use crate::word::{Word, MAX_ALPHABET};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    pub alphabet_size: usize,
    pub forbidden_factors: BTreeSet<Word>,
    pub forbidden_formulas: Vec<Formula>,
    /// Forbid every square `uu` with `|u| >= t`.
    pub sq_min_period: Option<usize>,
    /// Forbid every square not listed.
    pub allowed_squares: Option<BTreeSet<Word>>,
    /// Forbid every minimal overlap (length `2p + 1`, period `p`) not listed.
    pub allowed_overlaps: Option<BTreeSet<Word>>,
    pub max_square_count: Option<usize>,
    /// At most this many distinct occurrences (assignments) of the formula.
    pub occurrence_budget: Option<(Formula, usize)>,
    /// Forbid exponents `> e` (strict) or `>= e`.
    pub exponent_cap: Option<(Rational, bool)>,
    /// Every length-2 factor must be an edge.
    pub graph: Option<LabelledGraph>,
}

impl ConstraintSet {
    /// The unconstrained language over `Σ_k`.
    pub fn new(alphabet_size: usize) -> Self {
        ConstraintSet {
            alphabet_size,
            forbidden_factors: BTreeSet::new(),
            forbidden_formulas: Vec::new(),
            sq_min_period: None,
            allowed_squares: None,
            allowed_overlaps: None,
            max_square_count: None,
            occurrence_budget: None,
            exponent_cap: None,
            graph: None,
        }
    }

    pub fn forbid_factor(mut self, w: &str) -> Result<Self> {
        self.forbidden_factors.insert(w.parse()?);
        Ok(self)
    }

    pub fn forbid_formula(mut self, f: &str) -> Result<Self> {
        self.forbidden_formulas.push(f.parse()?);
        Ok(self)
    }

    pub fn with_sq_min_period(mut self, t: usize) -> Self {
        self.sq_min_period = Some(t);
        self
    }

    pub fn allow_squares(mut self, squares: &[&str]) -> Result<Self> {
        self.allowed_squares = Some(parse_words(squares.iter().copied())?);
        Ok(self)
    }

    pub fn allow_overlaps(mut self, overlaps: &[&str]) -> Result<Self> {
        self.allowed_overlaps = Some(parse_words(overlaps.iter().copied())?);
        Ok(self)
    }

    pub fn with_max_square_count(mut self, n: usize) -> Self {
        self.max_square_count = Some(n);
        self
    }

    pub fn with_occurrence_budget(mut self, f: &str, max: usize) -> Result<Self> {
        self.occurrence_budget = Some((f.parse()?, max));
        Ok(self)
    }

    pub fn with_exponent_cap(mut self, e: Rational, strict: bool) -> Self {
        self.exponent_cap = Some((e, strict));
        self
    }

    pub fn with_graph(mut self, g: LabelledGraph) -> Self {
        self.graph = Some(g);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.alphabet_size;
        if k == 0 || k > MAX_ALPHABET {
            return Err(Error::alphabet(format!(
                "alphabet size must be between 1 and {MAX_ALPHABET}, got {k}"
            )));
        }
        let words = self
            .forbidden_factors
            .iter()
            .chain(self.allowed_squares.iter().flatten())
            .chain(self.allowed_overlaps.iter().flatten());
        for w in words {
            w.check_alphabet(k)?;
        }
        for sq in self.allowed_squares.iter().flatten() {
            let s = sq.as_slice();
            let h = s.len() / 2;
            if s.is_empty() || s.len() % 2 != 0 || s[..h] != s[h..] {
                return Err(Error::domain(format!("{sq} is not a square")));
            }
        }
        for ov in self.allowed_overlaps.iter().flatten() {
            let s = ov.as_slice();
            let p = s.len() / 2;
            if s.len() < 3 || s.len() % 2 != 1 || (p..s.len()).any(|i| s[i] != s[i - p]) {
                return Err(Error::domain(format!("{ov} is not a minimal overlap")));
            }
        }
        if self.sq_min_period == Some(0) {
            return Err(Error::domain(
                "the least forbidden square period must be positive",
            ));
        }
        if let Some((e, _)) = self.exponent_cap {
            if e.numerator() <= e.denominator() {
                return Err(Error::domain(format!("exponent cap {e} must exceed 1")));
            }
        }
        if let Some(g) = &self.graph {
            if g.vertex_count() != k {
                return Err(Error::alphabet(format!(
                    "graph has {} vertices but the alphabet has {k} letters",
                    g.vertex_count()
                )));
            }
        }
        Ok(())
    }

    fn tracks_squares(&self) -> bool {
        self.sq_min_period.is_some()
            || self.allowed_squares.is_some()
            || self.max_square_count.is_some()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut graph_name = None;
        let mut graph_edges: Option<Vec<String>> = None;
        let mut c = ConstraintSet::new(1);
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
            match directive {
                "alphabet" => alphabet = Some(number(one()?)?),
                "forbid-factor" => {
                    if args.is_empty() {
                        return Err(err("missing factor"));
                    }
                    c.forbidden_factors
                        .extend(parse_words(args.iter().copied())?);
                }
                "forbid-formula" => {
                    if args.is_empty() {
                        return Err(err("missing formula"));
                    }
                    for a in &args {
                        c.forbidden_formulas.push(a.parse()?);
                    }
                }
                "forbid-squares-min-period" => c.sq_min_period = Some(number(one()?)?),
                "allow-squares" => {
                    let set = parse_words(args.iter().copied())?;
                    c.allowed_squares
                        .get_or_insert_with(BTreeSet::new)
                        .extend(set);
                }
                "allow-overlaps" => {
                    let set = parse_words(args.iter().copied())?;
                    c.allowed_overlaps
                        .get_or_insert_with(BTreeSet::new)
                        .extend(set);
                }
                "max-distinct-squares" => c.max_square_count = Some(number(one()?)?),
                "max-occurrences" => match args.as_slice() {
                    [f, n] => c.occurrence_budget = Some((f.parse()?, number(n)?)),
                    _ => return Err(err("expected a formula and a count")),
                },
                "exponent-cap" => {
                    let (e, strict) = match args.as_slice() {
                        [e] => (e, true),
                        [e, "strict"] => (e, true),
                        [e, "nonstrict"] => (e, false),
                        _ => return Err(err("expected 'exponent-cap p/q [strict|nonstrict]'")),
                    };
                    c.exponent_cap = Some((e.parse()?, strict));
                }
                "graph" => graph_name = Some(one()?.to_string()),
                "graph-edges" => {
                    graph_edges
                        .get_or_insert_with(Vec::new)
                        .extend(args.iter().map(|s| s.to_string()));
                }
                _ => return Err(err("unknown directive")),
            }
        }
        if graph_name.is_some() && graph_edges.is_some() {
            return Err(Error::syntax(
                "use either 'graph' or 'graph-edges', not both",
            ));
        }
        if let Some(name) = graph_name {
            let g = LabelledGraph::builtin(&name)?;
            alphabet.get_or_insert(g.vertex_count());
            c.graph = Some(g);
        }
        c.alphabet_size = alphabet.ok_or_else(|| Error::syntax("missing 'alphabet' directive"))?;
        if let Some(edges) = graph_edges {
            c.graph = Some(LabelledGraph::from_edge_list(
                c.alphabet_size,
                edges.iter().map(String::as_str),
            )?);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ConstraintSet::parse(&text).map_err(|e| match e {
            Error::Syntax(m) => Error::Syntax(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

fn parse_words<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<BTreeSet<Word>> {
    items.into_iter().map(str::parse).collect()
}

fn join(words: &BTreeSet<Word>) -> String {
    words
        .iter()
        .map(Word::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for ConstraintSet {
    /// Renders the constraint file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {}", self.alphabet_size)?;
        if !self.forbidden_factors.is_empty() {
            writeln!(f, "forbid-factor {}", join(&self.forbidden_factors))?;
        }
        for formula in &self.forbidden_formulas {
            writeln!(f, "forbid-formula {formula}")?;
        }
        if let Some(t) = self.sq_min_period {
            writeln!(f, "forbid-squares-min-period {t}")?;
        }
        if let Some(s) = &self.allowed_squares {
            writeln!(f, "allow-squares {}", join(s))?;
        }
        if let Some(s) = &self.allowed_overlaps {
            writeln!(f, "allow-overlaps {}", join(s))?;
        }
        if let Some(n) = self.max_square_count {
            writeln!(f, "max-distinct-squares {n}")?;
        }
        if let Some((formula, n)) = &self.occurrence_budget {
            writeln!(f, "max-occurrences {formula} {n}")?;
        }
        if let Some((e, strict)) = self.exponent_cap {
            let kind = if strict { "strict" } else { "nonstrict" };
            writeln!(f, "exponent-cap {e} {kind}")?;
        }
        if let Some(g) = &self.graph {
            writeln!(f, "graph-edges {g}")?;
        }
        Ok(())
    }
}

/// Category of a violation, in the order they are tested at a given end
/// position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    Letter,
    Edge,
    Factor,
    LongSquare,
    UnlistedSquare,
    TooManySquares,
    UnlistedOverlap,
    Exponent,
    Formula,
    OccurrenceBudget,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Letter => "letter outside the alphabet",
            ViolationKind::Edge => "non-edge",
            ViolationKind::Factor => "forbidden factor",
            ViolationKind::LongSquare => "long square",
            ViolationKind::UnlistedSquare => "square not allowed",
            ViolationKind::TooManySquares => "too many distinct squares",
            ViolationKind::UnlistedOverlap => "overlap not allowed",
            ViolationKind::Exponent => "exponent above the cap",
            ViolationKind::Formula => "formula occurrence",
            ViolationKind::OccurrenceBudget => "too many occurrences",
        };
        f.write_str(s)
    }
}

/// The witness `w[start..end]` completed at `end`, plus kind-specific detail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub start: usize,
    pub end: usize,
    pub detail: String,
}

impl Violation {
    pub fn witness(&self, w: &Word) -> Word {
        w.factor(self.start, self.end - self.start)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}", self.kind, self.start, self.end)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// A good word under construction.
pub struct Extender<'c> {
    c: &'c ConstraintSet,
    word: Vec<u8>,
    formulas: bool,
    squares: HashSet<Vec<u8>>,
    // Squares first seen at each depth, for undo.
    square_log: Vec<Vec<Vec<u8>>>,
    occurrences: HashSet<Assignment>,
    occurrence_log: Vec<Vec<Assignment>>,
    budget: u64,
}

impl<'c> Extender<'c> {
    pub fn new(c: &'c ConstraintSet) -> Result<Self> {
        c.validate()?;
        Ok(Extender {
            c,
            word: Vec::new(),
            formulas: true,
            squares: HashSet::new(),
            square_log: Vec::new(),
            occurrences: HashSet::new(),
            occurrence_log: Vec::new(),
            budget: DEFAULT_STEP_BUDGET,
        })
    }

    /// Builds the state for a prefix already known to be good.
    pub fn from_prefix(c: &'c ConstraintSet, prefix: &[u8]) -> Result<Self> {
        let mut ext = Extender::new(c)?;
        for &l in prefix {
            if let Some(v) = ext.try_push(l)? {
                return Err(Error::domain(format!("prefix is not good: {v}")));
            }
        }
        Ok(ext)
    }

    fn without_formulas(c: &'c ConstraintSet) -> Result<Self> {
        let mut ext = Extender::new(c)?;
        ext.formulas = false;
        Ok(ext)
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Appends `letter` unless that creates a violation, which is returned
    /// instead (leaving the word unchanged).
    pub fn try_push(&mut self, letter: u8) -> Result<Option<Violation>> {
        self.word.push(letter);
        match self.violation_at_end() {
            Ok(None) => Ok(None),
            other => {
                self.word.pop();
                other
            }
        }
    }

    pub fn pop(&mut self) {
        if self.word.pop().is_none() {
            return;
        }
        if self.c.max_square_count.is_some() {
            for sq in self.square_log.pop().unwrap_or_default() {
                self.squares.remove(&sq);
            }
        }
        if self.formulas && self.c.occurrence_budget.is_some() {
            for a in self.occurrence_log.pop().unwrap_or_default() {
                self.occurrences.remove(&a);
            }
        }
    }

    fn violation_at_end(&mut self) -> Result<Option<Violation>> {
        let c = self.c;
        let w = &self.word;
        let n = w.len();
        let last = w[n - 1];
        let at = |kind, start: usize, detail: String| {
            Ok(Some(Violation {
                kind,
                start,
                end: n,
                detail,
            }))
        };
        if last as usize >= c.alphabet_size {
            return at(ViolationKind::Letter, n - 1, String::new());
        }
        if let Some(g) = &c.graph {
            if n >= 2 && !g.has_edge(w[n - 2], last) {
                return at(ViolationKind::Edge, n - 2, String::new());
            }
        }
        for u in &c.forbidden_factors {
            if w.ends_with(u.as_slice()) {
                return at(ViolationKind::Factor, n - u.len(), String::new());
            }
        }
        if c.tracks_squares() {
            let mut fresh = Vec::new();
            for p in 1..=n / 2 {
                if !(1..=p).all(|j| w[n - j] == w[n - p - j]) {
                    continue;
                }
                let start = n - 2 * p;
                if c.sq_min_period.is_some_and(|t| p >= t) {
                    return at(ViolationKind::LongSquare, start, format!("period {p}"));
                }
                let sq = &w[start..];
                if let Some(allowed) = &c.allowed_squares {
                    if !allowed.contains(&Word::from_slice(sq)) {
                        return at(ViolationKind::UnlistedSquare, start, format!("period {p}"));
                    }
                }
                if c.max_square_count.is_some() && !self.squares.contains(sq) {
                    fresh.push(sq.to_vec());
                }
            }
            if let Some(max) = c.max_square_count {
                if self.squares.len() + fresh.len() > max {
                    let sq = &fresh[0];
                    return at(
                        ViolationKind::TooManySquares,
                        n - sq.len(),
                        format!("more than {max} distinct squares"),
                    );
                }
                self.squares.extend(fresh.iter().cloned());
                self.square_log.push(fresh);
            }
        }
        if let Some(allowed) = &c.allowed_overlaps {
            for p in 1..=(n - 1) / 2 {
                if (1..=p + 1).all(|j| w[n - j] == w[n - p - j]) {
                    let start = n - 2 * p - 1;
                    if !allowed.contains(&Word::from_slice(&w[start..])) {
                        self.undo_squares();
                        return at(ViolationKind::UnlistedOverlap, start, format!("period {p}"));
                    }
                }
            }
        }
        if let Some((e, strict)) = c.exponent_cap {
            for p in 1..n {
                let r = violating_run_len(e, strict, p);
                if p + r > n {
                    break;
                }
                if (1..=r).all(|j| w[n - j] == w[n - p - j]) {
                    self.undo_squares();
                    return at(
                        ViolationKind::Exponent,
                        n - p - r,
                        format!("period {p}, exponent {}", Rational::exponent(p + r, p)),
                    );
                }
            }
        }
        if !self.formulas {
            return Ok(None);
        }
        for f in &c.forbidden_formulas {
            match first_suffix_occurrence(w, f, self.budget) {
                Ok(Some((a, start))) => {
                    self.undo_squares();
                    return at(ViolationKind::Formula, start, format!("{f}: {a}"));
                }
                Ok(None) => {}
                Err(e) => {
                    self.undo_squares();
                    return Err(e);
                }
            }
        }
        if let Some((f, max)) = &c.occurrence_budget {
            let found = match suffix_occurrences(w, f, self.budget) {
                Ok(found) => found,
                Err(e) => {
                    self.undo_squares();
                    return Err(e);
                }
            };
            let fresh: Vec<Assignment> = found
                .into_iter()
                .filter(|a| !self.occurrences.contains(a))
                .collect();
            if self.occurrences.len() + fresh.len() > *max {
                self.undo_squares();
                let a = &fresh[0];
                let span = a
                    .fragment_images(f)
                    .iter()
                    .map(Word::len)
                    .max()
                    .unwrap_or(0);
                return at(
                    ViolationKind::OccurrenceBudget,
                    n - span.min(n),
                    format!(
                        "{f}: {a} is occurrence number {}",
                        self.occurrences.len() + 1
                    ),
                );
            }
            self.occurrences.extend(fresh.iter().cloned());
            self.occurrence_log.push(fresh);
        }
        Ok(None)
    }

    // Rolls back the square bookkeeping of a rejected letter.
    fn undo_squares(&mut self) {
        if self.c.max_square_count.is_some() {
            for sq in self.square_log.pop().unwrap_or_default() {
                self.squares.remove(&sq);
            }
        }
    }
}

/// `None` if `w` is good; otherwise the violation completed first (smallest
/// end position), ties broken by [`ViolationKind`] order.
pub fn check(w: &Word, c: &ConstraintSet) -> Result<Option<Violation>> {
    let mut ext = Extender::without_formulas(c)?;
    let mut first = None;
    for &l in w.as_slice() {
        if let Some(v) = ext.try_push(l)? {
            first = Some(v);
            break;
        }
    }
    let letters = w.as_slice();
    let mut bound = first.as_ref().map_or(letters.len(), |v: &Violation| v.end);

    // Formula constraints: find the shortest violating prefix by bisection,
    // which is sound because avoidance is inherited by prefixes.
    for f in &c.forbidden_formulas {
        // Only strictly earlier completions win over what is already known.
        let limit = if first.is_some() { bound - 1 } else { bound };
        let violated = |e: usize| -> Result<bool> {
            Ok(first_occurrence(&Word::from_slice(&letters[..e]), f)?.is_some())
        };
        if limit == 0 || !violated(limit)? {
            continue;
        }
        let e = bisect(limit, &violated)?;
        let (a, start) = first_suffix_occurrence(&letters[..e], f, DEFAULT_STEP_BUDGET)?
            .expect("the shortest violating prefix ends with an occurrence");
        first = Some(Violation {
            kind: ViolationKind::Formula,
            start,
            end: e,
            detail: format!("{f}: {a}"),
        });
        bound = e;
    }

    if let Some((f, max)) = &c.occurrence_budget {
        let limit = if first.is_some() { bound - 1 } else { bound };
        let count = |e: usize| -> Result<BTreeSet<Assignment>> {
            find_occurrences_with_budget(
                &Word::from_slice(&letters[..e]),
                f,
                e.max(1),
                DEFAULT_STEP_BUDGET,
            )
        };
        let violated = |e: usize| -> Result<bool> { Ok(count(e)?.len() > *max) };
        if limit > 0 && violated(limit)? {
            let e = bisect(limit, &violated)?;
            let before = count(e - 1)?;
            let a = suffix_occurrences(&letters[..e], f, DEFAULT_STEP_BUDGET)?
                .into_iter()
                .find(|a| !before.contains(a))
                .expect("a new occurrence completes at the shortest violating prefix");
            let span = a
                .fragment_images(f)
                .iter()
                .map(Word::len)
                .max()
                .unwrap_or(0);
            first = Some(Violation {
                kind: ViolationKind::OccurrenceBudget,
                start: e - span.min(e),
                end: e,
                detail: format!("{f}: {a} is occurrence number {}", before.len() + 1),
            });
        }
    }
    Ok(first)
}

/// Smallest `e` in `1..=hi` with `pred(e)`, given `pred(hi)` and monotonicity.
fn bisect(hi: usize, pred: &dyn Fn(usize) -> Result<bool>) -> Result<usize> {
    let (mut lo, mut hi) = (0, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
