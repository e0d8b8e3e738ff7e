//! Squares, overlaps and rational-exponent repetitions in finite words.
//!
//! Everything here is built on one primitive: for a period `p`, the maximal
//! runs of positions `i` with `w[i] == w[i + p]`. A run `[a, b)` of such
//! positions means `w[a .. b + p)` has period `p`, i.e. it is a repetition of
//! length `b - a + p` and exponent `(b - a + p) / p`.
//!
//! Runs of length at least `m` are found by probing only every `m`-th
//! position, which keeps the scans for long periods cheap on the
//! repetition-sparse words this crate cares about.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::word::Word;

/// Positive rational in lowest terms with exact comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::domain(format!(
                "{num}/{den} is not a positive rational"
            )));
        }
        let g = gcd(num, den);
        Ok(Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(n: u64) -> Result<Self> {
        Rational::new(n, 1)
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exponent of a repetition of `length` letters and period `period`.
    pub fn exponent(length: usize, period: usize) -> Self {
        Rational::new(length as u64, period as u64).expect("length and period are positive")
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::syntax(format!("'{s}' is not a rational of the form p/q"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        Rational::new(n, d).map_err(|_| bad())
    }
}

/// A factor `w[start .. start + length)` with period `period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Repetition {
    pub start: usize,
    pub period: usize,
    pub length: usize,
}

impl Repetition {
    pub fn exponent(&self) -> Rational {
        Rational::exponent(self.length, self.period)
    }

    pub fn end(&self) -> usize {
        self.start + self.length
    }

    pub fn factor(&self, w: &Word) -> Word {
        w.factor(self.start, self.length)
    }
}

/// Calls `f(a, b)` for every maximal run `[a, b)` of positions with
/// `w[i] == w[i + p]` whose length is at least `min_len`, left to right.
pub(crate) fn for_each_run<B>(
    w: &[u8],
    p: usize,
    min_len: usize,
    mut f: impl FnMut(usize, usize) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let n = w.len();
    if p == 0 || p >= n {
        return ControlFlow::Continue(());
    }
    let limit = n - p;
    let step = min_len.max(1);
    if step > limit {
        return ControlFlow::Continue(());
    }
    let mut j = step - 1;
    while j < limit {
        if w[j] != w[j + p] {
            j += step;
            continue;
        }
        let mut a = j;
        while a > 0 && w[a - 1] == w[a - 1 + p] {
            a -= 1;
        }
        let mut b = j + 1;
        while b < limit && w[b] == w[b + p] {
            b += 1;
        }
        if b - a >= min_len {
            f(a, b)?;
        }
        // Next probe strictly after the mismatch at `b`.
        j = (b + 2).div_ceil(step) * step - 1;
    }
    ControlFlow::Continue(())
}

/// Smallest `q` dividing `p` such that `w[a .. a + p)` is a power of its
/// length-`q` prefix.
fn root_period(w: &[u8], a: usize, p: usize) -> usize {
    let block = &w[a..a + p];
    (1..=p)
        .filter(|q| p.is_multiple_of(*q))
        .find(|&q| (q..p).all(|i| block[i] == block[i - q]))
        .unwrap_or(p)
}

/// Distinct factors `uu` (identified by the factor itself).
pub fn distinct_squares(w: &Word) -> BTreeSet<Word> {
    distinct_repetitions(w.as_slice(), 0)
}

/// Distinct factors of length `2p + 1` with period `p`.
pub fn distinct_min_overlaps(w: &Word) -> BTreeSet<Word> {
    distinct_repetitions(w.as_slice(), 1)
}

/// Distinct factors of length `2p + extra` and period `p`, over all `p`.
fn distinct_repetitions(w: &[u8], extra: usize) -> BTreeSet<Word> {
    repetition_occurrences(w, extra)
        .into_iter()
        .map(|(start, p)| Word::from_slice(&w[start..start + 2 * p + extra]))
        .collect()
}

/// One occurrence `(start, p)` of each distinct factor of length `2p + extra`
/// and period `p`: the leftmost, sorted by `(p, start)`.
fn repetition_occurrences(w: &[u8], extra: usize) -> Vec<(usize, usize)> {
    let n = w.len();
    let mut seen: HashMap<&[u8], usize> = HashMap::new();
    let mut out = Vec::new();
    let mut p = 1;
    while 2 * p + extra <= n {
        let need = p + extra;
        let _ = for_each_run::<()>(w, p, need, |a, b| {
            // Starts `i` in `[a, b - need]`; contents repeat with the root period.
            let last = b - need;
            let q = root_period(w, a, p);
            for i in a..=last.min(a + q - 1) {
                if let Entry::Vacant(e) = seen.entry(&w[i..i + 2 * p + extra]) {
                    e.insert(i);
                    out.push((i, p));
                }
            }
            ControlFlow::Continue(())
        });
        p += 1;
    }
    out.sort_unstable();
    out.sort_by_key(|&(_, p)| p);
    out
}

/// Leftmost occurrence `(start, p)` of each distinct square, by period.
pub(crate) fn distinct_square_occurrences(w: &[u8]) -> Vec<(usize, usize)> {
    repetition_occurrences(w, 0)
}

/// Leftmost square `uu` with `|u| >= t`; among squares at the same start, the
/// one with the shortest period.
pub fn find_sq_t(w: &Word, t: usize) -> Option<Repetition> {
    let s = w.as_slice();
    let n = s.len();
    let mut best: Option<Repetition> = None;
    let mut p = t.max(1);
    while 2 * p <= n {
        if best.is_some_and(|b| b.start == 0) {
            break;
        }
        if let ControlFlow::Break(a) = for_each_run(s, p, p, |a, _| ControlFlow::Break(a)) {
            if best.is_none_or(|b| a < b.start) {
                best = Some(Repetition {
                    start: a,
                    period: p,
                    length: 2 * p,
                });
            }
        }
        p += 1;
    }
    best
}

/// Maximal exponent over all factors, with the leftmost (then shortest
/// period) repetition reaching it.
pub fn max_exponent(w: &Word) -> Result<(Rational, Repetition)> {
    let s = w.as_slice();
    let n = s.len();
    if n < 2 {
        return Err(Error::domain(
            "max_exponent needs a word of length at least 2",
        ));
    }
    let mut best = Repetition {
        start: 0,
        period: 1,
        length: 1,
    };
    let mut best_exp = best.exponent();
    for p in 1..n {
        // Runs of length r qualify when (r + p) / p >= best_exp.
        let num = best_exp.numerator() - best_exp.denominator();
        let den = best_exp.denominator();
        let min_len = ((num as u128 * p as u128).div_ceil(den as u128)) as usize;
        if min_len > n - p {
            break;
        }
        let _ = for_each_run::<()>(s, p, min_len.max(1), |a, b| {
            let cand = Repetition {
                start: a,
                period: p,
                length: b - a + p,
            };
            let e = cand.exponent();
            match e.cmp(&best_exp) {
                Ordering::Greater => {
                    best = cand;
                    best_exp = e;
                }
                Ordering::Equal if a < best.start => best = cand,
                _ => {}
            }
            ControlFlow::Continue(())
        });
    }
    Ok((best_exp, best))
}

/// Shortest run length (matches beyond one period) that makes a period-`p`
/// repetition violate the bound `e` (`> e` when strict, `>= e` otherwise).
pub(crate) fn violating_run_len(e: Rational, strict: bool, p: usize) -> usize {
    let excess = (e.numerator() - e.denominator()) as u128 * p as u128;
    let den = e.denominator() as u128;
    let r = if strict {
        excess / den + 1
    } else {
        excess.div_ceil(den)
    };
    r.max(1) as usize
}

/// `None` when `w` has no repetition with exponent `> e` (strict) or `>= e`
/// (non-strict); otherwise the leftmost, then shortest-period, shortest
/// violating repetition.
pub fn is_exponent_free(w: &Word, e: Rational, strict: bool) -> Result<Option<Repetition>> {
    if e.numerator() <= e.denominator() {
        return Err(Error::domain(format!("exponent bound {e} must exceed 1")));
    }
    let s = w.as_slice();
    let n = s.len();
    let mut best: Option<Repetition> = None;
    for p in 1..n {
        let r = violating_run_len(e, strict, p);
        if r > n - p {
            break;
        }
        if let ControlFlow::Break(a) = for_each_run(s, p, r, |a, _| ControlFlow::Break(a)) {
            if best.is_none_or(|b| a < b.start) {
                best = Some(Repetition {
                    start: a,
                    period: p,
                    length: p + r,
                });
            }
        }
        if best.is_some_and(|b| b.start == 0) {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<Word> {
        items.iter().map(|s| w(s)).collect()
    }

    fn runs(s: &str, p: usize, m: usize) -> Vec<(usize, usize)> {
        let mut out = vec![];
        let _ = for_each_run::<()>(w(s).as_slice(), p, m, |a, b| {
            out.push((a, b));
            ControlFlow::Continue(())
        });
        out
    }

    #[test]
    fn run_probing_finds_every_long_run() {
        // period 1 matches at 0,1 (000) and 5,6,7 (1111).
        assert_eq!(runs("00010111101", 1, 1), vec![(0, 2), (5, 8)]);
        assert_eq!(runs("00010111101", 1, 3), vec![(5, 8)]);
        assert_eq!(runs("00010111101", 1, 4), vec![]);
        for m in 1..6 {
            let brute: Vec<_> = runs("0100101001001010010100100101", 5, 1)
                .into_iter()
                .filter(|(a, b)| b - a >= m)
                .collect();
            assert_eq!(runs("0100101001001010010100100101", 5, m), brute, "m = {m}");
        }
    }

    #[test]
    fn rationals() {
        let r: Rational = "10/4".parse().unwrap();
        assert_eq!((r.numerator(), r.denominator()), (5, 2));
        assert_eq!(r.to_string(), "5/2");
        assert!(Rational::new(7, 4).unwrap() > Rational::new(5, 3).unwrap());
        assert_eq!(
            "2".parse::<Rational>().unwrap(),
            Rational::new(4, 2).unwrap()
        );
        assert!("0/3".parse::<Rational>().is_err());
        assert!("a/3".parse::<Rational>().is_err());
    }

    #[test]
    fn square_inventories() {
        assert_eq!(
            distinct_squares(&w("0100010101")),
            set(&["00", "0101", "1010"])
        );
        assert!(distinct_squares(&w("010")).is_empty());
        assert_eq!(distinct_squares(&w("0000")), set(&["00", "0000"]));
        assert_eq!(
            distinct_min_overlaps(&w("0100010101")),
            set(&["000", "01010", "10101"])
        );
        assert!(distinct_min_overlaps(&w("0110")).is_empty());
    }

    #[test]
    fn long_squares() {
        assert_eq!(
            find_sq_t(&w("012012"), 3),
            Some(Repetition {
                start: 0,
                period: 3,
                length: 6
            })
        );
        assert_eq!(find_sq_t(&w("0100010101"), 3), None);
        let r = find_sq_t(&w("0100010101"), 1).unwrap();
        assert_eq!((r.start, r.period), (2, 1));
        let r = find_sq_t(&w("0100010101"), 2).unwrap();
        assert_eq!((r.start, r.period), (4, 2));
    }

    #[test]
    fn exponents() {
        let (e, r) = max_exponent(&w("010")).unwrap();
        assert_eq!(e, Rational::new(3, 2).unwrap());
        assert_eq!((r.start, r.period, r.length), (0, 2, 3));
        assert_eq!(
            max_exponent(&w("00")).unwrap().0,
            Rational::integer(2).unwrap()
        );
        assert_eq!(
            max_exponent(&w("01010")).unwrap().0,
            Rational::new(5, 2).unwrap()
        );
        assert_eq!(
            max_exponent(&w("01")).unwrap().0,
            Rational::integer(1).unwrap()
        );
        assert!(max_exponent(&w("0")).is_err());
    }

    #[test]
    fn exponent_freeness() {
        let seven_quarters = Rational::new(7, 4).unwrap();
        assert_eq!(
            is_exponent_free(&w("010"), seven_quarters, true).unwrap(),
            None
        );
        let two = Rational::integer(2).unwrap();
        let r = is_exponent_free(&w("0101"), two, false).unwrap().unwrap();
        assert_eq!(r.factor(&w("0101")), w("0101"));
        assert_eq!(is_exponent_free(&w("0101"), two, true).unwrap(), None);
        assert!(is_exponent_free(&w("0101"), Rational::integer(1).unwrap(), true).is_err());
    }
}
