//! Patterns and formulas, and their occurrences in finite words.
//!
//! A formula is a list of fragments over the variables `A`, `B`, ... written
//! with dots between fragments (`AA.ABAB.BB`). An occurrence assigns a
//! non-empty word to every variable so that the image of each fragment is a
//! factor of the word; the fragments may sit anywhere.
//!
//! Fragments are matched right to left with their last letter pinned to an
//! end position, branching on the length of each unbound variable. Already
//! bound variables are checked by comparison, and a variable immediately
//! repeated (`..VV..`) only branches over periods of squares ending there.
//! Fragments are processed one after the other; the partial assignments
//! reaching each level are deduplicated, so every distinct partial
//! assignment is extended once.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::ControlFlow;
use std::rc::Rc;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::repetition::distinct_square_occurrences;
use crate::word::{find, Word};

/// Formulas with more variables are refused: matching them on words of
/// realistic length blows up.
pub const MAX_VARIABLES: usize = 6;

/// Step budget used when the caller does not give one.
pub const DEFAULT_STEP_BUDGET: u64 = 50_000_000_000;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    fragments: Vec<Vec<u8>>,
    variables: usize,
}

impl Formula {
    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }

    /// The formula of a pattern: isolated variables become dots.
    pub fn from_pattern(pattern: &str) -> Result<Self> {
        let p = Formula::parse(pattern)?;
        if !p.is_pattern() {
            return Err(Error::syntax(format!("'{pattern}' is not a pattern")));
        }
        let letters = &p.fragments[0];
        let counts = p.variable_counts();
        let mut text = String::new();
        for &v in letters {
            if counts[v as usize] == 1 {
                text.push('.');
            } else {
                text.push((b'A' + v) as char);
            }
        }
        let fragments: Vec<&str> = text.split('.').filter(|s| !s.is_empty()).collect();
        if fragments.is_empty() {
            return Err(Error::syntax(format!(
                "every variable of '{pattern}' is isolated"
            )));
        }
        Formula::parse(&fragments.join("."))
    }

    pub fn fragments(&self) -> &[Vec<u8>] {
        &self.fragments
    }

    pub fn variable_count(&self) -> usize {
        self.variables
    }

    pub fn is_pattern(&self) -> bool {
        self.fragments.len() == 1
    }

    /// Total number of occurrences of each variable across all fragments.
    pub fn variable_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.variables];
        for frag in &self.fragments {
            for &v in frag {
                counts[v as usize] += 1;
            }
        }
        counts
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::syntax("empty formula"));
        }
        let mut rename = [u8::MAX; 26];
        let mut variables = 0usize;
        let mut fragments = Vec::new();
        for frag in s.split('.') {
            if frag.is_empty() {
                return Err(Error::syntax(format!("empty fragment in '{s}'")));
            }
            let mut letters = Vec::with_capacity(frag.len());
            for c in frag.chars() {
                if !c.is_ascii_uppercase() {
                    return Err(Error::syntax(format!(
                        "'{c}' is not a variable (use A-Z and '.') in '{s}'"
                    )));
                }
                let slot = &mut rename[(c as u8 - b'A') as usize];
                if *slot == u8::MAX {
                    *slot = variables as u8;
                    variables += 1;
                }
                letters.push(*slot);
            }
            fragments.push(letters);
        }
        if variables > MAX_VARIABLES {
            return Err(Error::domain(format!(
                "'{s}' has {variables} variables; at most {MAX_VARIABLES} are supported. \
                 Use find_sq_t for long squares, or a localizer reduction"
            )));
        }
        Ok(Formula {
            fragments,
            variables,
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, frag) in self.fragments.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            let s: String = frag.iter().map(|&v| (b'A' + v) as char).collect();
            f.write_str(&s)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula(\"{self}\")")
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    text.parse()
}

/// Images of the variables `A`, `B`, ... in order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Assignment {
    images: Vec<Word>,
}

impl Assignment {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        if images.iter().any(Word::is_empty) {
            return Err(Error::domain("assignments are non-erasing"));
        }
        Ok(Assignment { images })
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, variable: usize) -> &Word {
        &self.images[variable]
    }

    /// Image of every fragment of `f`.
    pub fn fragment_images(&self, f: &Formula) -> Vec<Word> {
        f.fragments()
            .iter()
            .map(|frag| {
                let mut out = Vec::new();
                for &v in frag {
                    out.extend_from_slice(self.images[v as usize].as_slice());
                }
                Word::from_raw(out)
            })
            .collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}={img}", (b'A' + i as u8) as char)?;
        }
        Ok(())
    }
}

type Binding<'w> = [Option<&'w [u8]>; MAX_VARIABLES];

enum Stop {
    Found,
    Budget,
}

/// One backtracking run over the fragments of a formula in a fixed order.
struct Search<'a, 'w> {
    w: &'w [u8],
    order: Vec<&'a [u8]>,
    variables: usize,
    // The first fragment must end at `|w|`.
    anchored: bool,
    cap: usize,
    bind: Binding<'w>,
    visited: Vec<HashSet<Vec<&'w [u8]>>>,
    steps: u64,
    budget: u64,
    squares: Vec<Option<Box<[u32]>>>,
    // Variable period of each fragment in `order`, or 0.
    periods: Vec<usize>,
    // Leftmost occurrence (start, p) of each distinct square, by period.
    square_list: Option<Rc<[(usize, usize)]>>,
    // While matching the last period of a periodic fragment: the letter index
    // `k` at which the match must have reached position `floor`.
    span: Option<(usize, usize)>,
    first_only: bool,
    found: BTreeSet<Assignment>,
}

impl<'a, 'w> Search<'a, 'w> {
    fn new(
        w: &'w [u8],
        f: &'a Formula,
        first: Option<usize>,
        cap: usize,
        budget: u64,
        first_only: bool,
    ) -> Self {
        let order = fragment_order(f, first);
        let periods = order
            .iter()
            .map(|&i| variable_period(&f.fragments[i]))
            .collect();
        Search {
            periods,
            square_list: None,
            span: None,
            w,
            visited: vec![HashSet::new(); order.len()],
            order: order
                .into_iter()
                .map(|i| f.fragments[i].as_slice())
                .collect(),
            variables: f.variables,
            anchored: first.is_some(),
            cap,
            bind: [None; MAX_VARIABLES],
            steps: 0,
            budget,
            squares: vec![None; w.len() + 1],
            first_only,
            found: BTreeSet::new(),
        }
    }

    fn run(&mut self) -> ControlFlow<Stop> {
        self.level(0)
    }

    fn level(&mut self, lv: usize) -> ControlFlow<Stop> {
        if lv == self.order.len() {
            let images = self.bind[..self.variables]
                .iter()
                .map(|b| Word::from_slice(b.expect("every variable is bound")))
                .collect();
            self.found.insert(Assignment { images });
            return if self.first_only {
                ControlFlow::Break(Stop::Found)
            } else {
                ControlFlow::Continue(())
            };
        }
        if lv > 0 {
            let key: Vec<&[u8]> = self.bind[..self.variables]
                .iter()
                .map(|b| b.unwrap_or(&[]))
                .collect();
            if !self.visited[lv].insert(key) {
                return ControlFlow::Continue(());
            }
        }
        let frag = self.order[lv];
        if frag.iter().all(|&v| self.bind[v as usize].is_some()) {
            let mut image = Vec::new();
            for &v in frag {
                image.extend_from_slice(self.bind[v as usize].unwrap());
            }
            self.tick()?;
            return if find(self.w, &image).is_some() {
                self.level(lv + 1)
            } else {
                ControlFlow::Continue(())
            };
        }
        let n = self.w.len();
        let anchored = lv == 0 && self.anchored;
        let q = self.periods[lv];
        let m = frag.len();
        let periodic = q > 0
            && frag[m - q..]
                .iter()
                .any(|&v| self.bind[v as usize].is_none());
        if periodic && m == 2 * q && !anchored {
            // A square fragment: only the distinct squares of w matter.
            let list = self
                .square_list
                .get_or_insert_with(|| distinct_square_occurrences(self.w).into())
                .clone();
            for &(start, p) in list.iter() {
                if p > q * self.cap {
                    break;
                }
                if p >= q {
                    self.span = Some((q, start + p));
                    let r = self.back(lv, m, start + 2 * p);
                    self.span = None;
                    r?;
                }
            }
            return ControlFlow::Continue(());
        }
        let ends = if anchored { n..=n } else { m..=n };
        for end in ends {
            if !periodic {
                self.back(lv, m, end)?;
                continue;
            }
            // The image ends with a square whose half is the image of the
            // last q letters.
            self.fill_squares(end);
            let count = self.squares[end].as_ref().unwrap().len();
            for i in 0..count {
                let p = self.squares[end].as_ref().unwrap()[i] as usize;
                if p > q * self.cap {
                    break;
                }
                if p < q {
                    continue;
                }
                self.span = Some((m - q, end - p));
                let r = self.back(lv, m, end);
                self.span = None;
                r?;
            }
        }
        ControlFlow::Continue(())
    }

    fn tick(&mut self) -> ControlFlow<Stop> {
        self.steps += 1;
        if self.steps > self.budget {
            ControlFlow::Break(Stop::Budget)
        } else {
            ControlFlow::Continue(())
        }
    }

    /// Matches `order[lv][..k]` so that it ends at `pos`.
    fn back(&mut self, lv: usize, k: usize, pos: usize) -> ControlFlow<Stop> {
        self.tick()?;
        if let Some((stop, floor)) = self.span {
            if k == stop {
                if pos != floor {
                    return ControlFlow::Continue(());
                }
                self.span = None;
                let r = self.back(lv, k, pos);
                self.span = Some((stop, floor));
                return r;
            }
        }
        if k == 0 {
            return self.level(lv + 1);
        }
        // Every remaining letter takes at least one position.
        let min_start = match self.span {
            Some((stop, floor)) => floor + (k - 1 - stop),
            None => k - 1,
        };
        if pos <= min_start {
            return ControlFlow::Continue(());
        }
        let frag = self.order[lv];
        let v = frag[k - 1] as usize;
        if let Some(img) = self.bind[v] {
            let len = img.len();
            if len <= pos && &self.w[pos - len..pos] == img {
                return self.back(lv, k - 1, pos - len);
            }
            return ControlFlow::Continue(());
        }
        let max_len = self.cap.min(pos - min_start);
        if let Some(len) = self.forced_length(lv, k, pos, v) {
            if len == 0 || len > max_len {
                return ControlFlow::Continue(());
            }
            self.bind[v] = Some(&self.w[pos - len..pos]);
            let r = self.back(lv, k - 1, pos - len);
            self.bind[v] = None;
            return r;
        }
        if k >= 2 && frag[k - 2] as usize == v {
            self.fill_squares(pos);
            let count = self.squares[pos].as_ref().unwrap().len();
            for i in 0..count {
                let p = self.squares[pos].as_ref().unwrap()[i] as usize;
                if p > max_len || 2 * p > pos - (k - 2) {
                    break;
                }
                self.bind[v] = Some(&self.w[pos - p..pos]);
                let r = self.back(lv, k - 1, pos - p);
                self.bind[v] = None;
                r?;
            }
        } else {
            for len in 1..=max_len {
                self.bind[v] = Some(&self.w[pos - len..pos]);
                let r = self.back(lv, k - 1, pos - len);
                self.bind[v] = None;
                r?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Within a span whose only unbound variable is `v`, the length of `v`
    /// fixed by the span width; `Some(0)` if no length fits.
    fn forced_length(&self, lv: usize, k: usize, pos: usize, v: usize) -> Option<usize> {
        let (stop, floor) = self.span?;
        let mut count = 0;
        let mut width = pos - floor;
        for &u in &self.order[lv][stop..k] {
            match self.bind[u as usize] {
                Some(img) if img.len() > width => return Some(0),
                Some(img) => width -= img.len(),
                None if u as usize == v => count += 1,
                None => return None,
            }
        }
        Some(if width.is_multiple_of(count) {
            width / count
        } else {
            0
        })
    }

    /// Periods of the squares ending at `pos`, ascending.
    fn fill_squares(&mut self, pos: usize) {
        if self.squares[pos].is_some() {
            return;
        }
        let w = self.w;
        let periods: Vec<u32> = (1..=pos / 2)
            .filter(|&p| (1..=p).all(|j| w[pos - j] == w[pos - p - j]))
            .map(|p| p as u32)
            .collect();
        self.squares[pos] = Some(periods.into_boxed_slice());
    }
}

/// Smallest `q` with `frag[i] == frag[i + q]` throughout and `|frag| >= 2q`,
/// or 0.
fn variable_period(frag: &[u8]) -> usize {
    (1..=frag.len() / 2)
        .find(|&q| (q..frag.len()).all(|i| frag[i] == frag[i - q]))
        .unwrap_or(0)
}

/// Fragment processing order: `first` (if any), then greedily the fragment
/// with the most letters already bound, then the fewest new variables,
/// preferring repetitive fragments.
fn fragment_order(f: &Formula, first: Option<usize>) -> Vec<usize> {
    let mut bound = [false; MAX_VARIABLES];
    let mut left: Vec<usize> = (0..f.fragments.len()).collect();
    let mut order = Vec::with_capacity(left.len());
    let take = |i: usize, bound: &mut [bool; MAX_VARIABLES], order: &mut Vec<usize>| {
        for &v in &f.fragments[i] {
            bound[v as usize] = true;
        }
        order.push(i);
    };
    if let Some(i) = first {
        left.retain(|&j| j != i);
        take(i, &mut bound, &mut order);
    }
    while !left.is_empty() {
        let score = |i: usize| {
            let frag = &f.fragments[i];
            let bound_letters = frag.iter().filter(|&&v| bound[v as usize]).count();
            let distinct: HashSet<u8> = frag.iter().copied().collect();
            let unbound = distinct.iter().filter(|&&v| !bound[v as usize]).count();
            (
                bound_letters,
                Reverse(unbound),
                frag.len() - distinct.len(),
                frag.len(),
            )
        };
        let pos = (0..left.len())
            .max_by(|&a, &b| score(left[a]).cmp(&score(left[b])).then(b.cmp(&a)))
            .unwrap();
        let i = left.remove(pos);
        take(i, &mut bound, &mut order);
    }
    order
}

fn stop_to_result(flow: ControlFlow<Stop>, search: Search<'_, '_>) -> Result<BTreeSet<Assignment>> {
    match flow {
        ControlFlow::Break(Stop::Budget) => Err(Error::StepBudget {
            budget: search.budget,
            partial: search.found.into_iter().collect(),
        }),
        _ => Ok(search.found),
    }
}

/// All assignments with images of length at most `cap` that form an
/// occurrence of `f` in `w`.
pub fn find_occurrences(w: &Word, f: &Formula, cap: usize) -> Result<BTreeSet<Assignment>> {
    find_occurrences_with_budget(w, f, cap, DEFAULT_STEP_BUDGET)
}

pub fn find_occurrences_with_budget(
    w: &Word,
    f: &Formula,
    cap: usize,
    budget: u64,
) -> Result<BTreeSet<Assignment>> {
    if cap == 0 {
        return Err(Error::domain("the image length cap must be at least 1"));
    }
    let mut search = Search::new(w.as_slice(), f, None, cap, budget, false);
    let flow = search.run();
    stop_to_result(flow, search)
}

/// Some occurrence of `f` in `w`, if there is one.
pub fn first_occurrence(w: &Word, f: &Formula) -> Result<Option<Assignment>> {
    let mut search = Search::new(
        w.as_slice(),
        f,
        None,
        w.len().max(1),
        DEFAULT_STEP_BUDGET,
        true,
    );
    let flow = search.run();
    Ok(stop_to_result(flow, search)?.into_iter().next())
}

pub fn avoids(w: &Word, f: &Formula) -> Result<bool> {
    Ok(first_occurrence(w, f)?.is_none())
}

/// Occurrences of `f` in `w` in which some fragment image is a suffix of `w`,
/// i.e. the occurrences that `w` has and `w` minus its last letter lacks.
pub(crate) fn suffix_occurrences(
    w: &[u8],
    f: &Formula,
    budget: u64,
) -> Result<BTreeSet<Assignment>> {
    let mut all = BTreeSet::new();
    for anchor in 0..f.fragments.len() {
        let mut search = Search::new(w, f, Some(anchor), w.len().max(1), budget, false);
        let flow = search.run();
        all.extend(stop_to_result(flow, search)?);
    }
    Ok(all)
}

/// First suffix occurrence found, with the start of its anchored fragment
/// image.
pub(crate) fn first_suffix_occurrence(
    w: &[u8],
    f: &Formula,
    budget: u64,
) -> Result<Option<(Assignment, usize)>> {
    for anchor in 0..f.fragments.len() {
        let mut search = Search::new(w, f, Some(anchor), w.len().max(1), budget, true);
        let flow = search.run();
        if let Some(a) = stop_to_result(flow, search)?.into_iter().next() {
            let len: usize = f.fragments[anchor]
                .iter()
                .map(|&v| a.images[v as usize].len())
                .sum();
            return Ok(Some((a, w.len() - len)));
        }
    }
    Ok(None)
}

/// No variable occurs exactly once.
pub fn is_doubled(f: &Formula) -> bool {
    f.variable_counts().iter().all(|&c| c != 1)
}

/// Occurrence listing: one `A=..., B=...` line per assignment.
pub fn render_occurrences<'a>(occ: impl IntoIterator<Item = &'a Assignment>) -> String {
    let mut out = String::new();
    for a in occ {
        out.push_str(&a.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn asg(images: &[&str]) -> Assignment {
        Assignment::new(images.iter().map(|s| w(s)).collect()).unwrap()
    }

    #[test]
    fn parse_formulas() {
        let x = f("AA.ABAB.BB");
        assert_eq!(x.fragments().len(), 3);
        assert_eq!(x.variable_count(), 2);
        assert!(!x.is_pattern());
        let abba = f("ABBA");
        assert!(abba.is_pattern());
        assert_eq!(abba.variable_count(), 2);
        assert_eq!(f("A").variable_count(), 1);
        // Variables are renamed by first appearance.
        assert_eq!(f("BAAB").to_string(), "ABBA");
        assert_eq!(f("CC.CDCD.DD"), x);
    }

    #[test]
    fn parse_errors() {
        for bad in ["AA..BB", "", ".A", "A.", "Ab", "A1"] {
            assert!(
                matches!(Formula::parse(bad), Err(Error::Syntax(_))),
                "{bad}"
            );
        }
        assert!(matches!(Formula::parse("ABCDEFG"), Err(Error::Domain(_))));
        assert!(Formula::parse("ABCDEF").is_ok());
    }

    #[test]
    fn formula_of_pattern() {
        assert_eq!(
            Formula::from_pattern("ABBACABADAA").unwrap(),
            f("ABBA.ABA.AA")
        );
        assert!(Formula::from_pattern("AB").is_err());
    }

    #[test]
    fn occurrences() {
        let got = find_occurrences(&w("001001"), &f("AA"), 3).unwrap();
        assert_eq!(got, BTreeSet::from([asg(&["0"]), asg(&["001"])]));

        let got = find_occurrences(&w("0100101000"), &f("AA.ABAB.BB"), 2).unwrap();
        assert!(got.contains(&asg(&["0", "10"])));

        assert!(find_occurrences(&w("01"), &f("AA"), 1).unwrap().is_empty());
        assert!(find_occurrences(&w("01"), &f("AA"), 0).is_err());
    }

    #[test]
    fn single_variable_matches_every_factor() {
        let got = find_occurrences(&w("0110"), &f("A"), 4).unwrap();
        let expect: BTreeSet<_> = ["0", "1", "01", "11", "10", "011", "110", "0110"]
            .iter()
            .map(|s| asg(&[s]))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn avoidance() {
        assert!(avoids(&w("010"), &f("AA")).unwrap());
        assert!(!avoids(&w("0101"), &f("ABAB")).unwrap());
        assert_eq!(
            first_occurrence(&w("0101"), &f("ABAB")).unwrap(),
            Some(asg(&["0", "1"]))
        );
        assert!(avoids(&Word::empty(), &f("A")).unwrap());
    }

    #[test]
    fn step_budget_reports_partial_results() {
        let err = find_occurrences_with_budget(&w("0000000000"), &f("A"), 10, 20).unwrap_err();
        assert!(err.is_resource());
        assert!(matches!(err, Error::StepBudget { budget: 20, .. }));
    }

    #[test]
    fn suffix_anchored_occurrences() {
        assert!(suffix_occurrences(w("0110").as_slice(), &f("AA"), u64::MAX)
            .unwrap()
            .is_empty());
        let got = suffix_occurrences(w("01011").as_slice(), &f("AA"), u64::MAX).unwrap();
        assert_eq!(got, BTreeSet::from([asg(&["1"])]));
        let (a, start) = first_suffix_occurrence(w("001010").as_slice(), &f("AA"), u64::MAX)
            .unwrap()
            .unwrap();
        assert_eq!((a, start), (asg(&["10"]), 2));
    }

    #[test]
    fn doubled() {
        assert!(is_doubled(&f("ABBA")));
        assert!(is_doubled(&f("AA.ABA.ABBA")));
        assert!(!is_doubled(&f("A")));
        assert!(!is_doubled(&f("ABA")));
    }

    #[test]
    fn rendering() {
        let occ = [asg(&["0", "10"]), asg(&["1", "0"])];
        assert_eq!(render_occurrences(&occ), "A=0, B=10\nA=1, B=0\n");
    }
}
