//! Exhaustive search of the factorial language of a constraint set.
//!
//! Every operation walks the prefix tree of good words depth first. A node
//! is a good word, so the tree is finite exactly when the language is. The
//! node budget counts good non-empty words visited.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::constraint::{ConstraintSet, Extender};
use crate::error::{Error, Result};
use crate::word::Word;

pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LetterOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    /// A good word of the requested length exists.
    ReachedBudget,
    /// The language is finite; `max_length` is exact.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub kind: OutcomeKind,
    pub max_length: usize,
    pub witness: Option<Word>,
    pub tree_nodes: u64,
}

/// Limits and strategy for the enumeration operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub node_budget: u64,
    pub parallel: bool,
    pub deadline: Option<Instant>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_budget: DEFAULT_NODE_BUDGET,
            parallel: true,
            deadline: None,
        }
    }
}

impl SearchLimits {
    pub fn sequential(node_budget: u64) -> Self {
        SearchLimits {
            node_budget,
            parallel: false,
            deadline: None,
        }
    }
}

fn deadline_error() -> Error {
    Error::Resource("wall-clock budget exceeded".into())
}

pub fn longest_word_search(
    c: &ConstraintSet,
    budget_length: usize,
    budget_nodes: u64,
) -> Result<SearchOutcome> {
    longest_word_search_ordered(c, budget_length, budget_nodes, LetterOrder::Ascending)
}

pub fn longest_word_search_ordered(
    c: &ConstraintSet,
    budget_length: usize,
    budget_nodes: u64,
    order: LetterOrder,
) -> Result<SearchOutcome> {
    longest_word_search_with(
        c,
        budget_length,
        order,
        &SearchLimits::sequential(budget_nodes),
    )
}

/// Sequential whatever `limits.parallel` says: the result depends on the
/// visiting order.
pub fn longest_word_search_with(
    c: &ConstraintSet,
    budget_length: usize,
    order: LetterOrder,
    limits: &SearchLimits,
) -> Result<SearchOutcome> {
    let budget_nodes = limits.node_budget;
    let mut letters: Vec<u8> = (0..c.alphabet_size as u8).collect();
    if order == LetterOrder::Descending {
        letters.reverse();
    }
    let mut ext = Extender::new(c)?;
    // next[d] is the index in `letters` of the next child to try at depth d.
    let mut next = vec![0usize];
    let mut best: Vec<u8> = Vec::new();
    let mut nodes = 0u64;
    loop {
        let depth = ext.len();
        if depth == budget_length {
            return Ok(SearchOutcome {
                kind: OutcomeKind::ReachedBudget,
                max_length: depth,
                witness: Some(Word::from_slice(ext.word())),
                tree_nodes: nodes,
            });
        }
        let i = next[depth];
        if i == letters.len() {
            if depth == 0 {
                break;
            }
            ext.pop();
            next.pop();
            continue;
        }
        next[depth] += 1;
        if ext.try_push(letters[i])?.is_none() {
            nodes += 1;
            if nodes > budget_nodes {
                return Err(Error::NodeBudget {
                    budget: budget_nodes,
                    best: Word::from_slice(&best),
                });
            }
            if ext.len() > best.len() {
                best = ext.word().to_vec();
            }
            if nodes.is_multiple_of(SPEND_BATCH)
                && limits.deadline.is_some_and(|d| Instant::now() > d)
            {
                return Err(deadline_error());
            }
            next.push(0);
        }
    }
    Ok(SearchOutcome {
        kind: OutcomeKind::Exhausted,
        max_length: best.len(),
        witness: Some(Word::from_raw(best)),
        tree_nodes: nodes,
    })
}

/// Shared node accounting for possibly parallel walks.
struct Budget {
    limit: u64,
    deadline: Option<Instant>,
    used: AtomicU64,
    exceeded: AtomicBool,
    late: AtomicBool,
}

impl Budget {
    fn new(limits: &SearchLimits) -> Self {
        Budget {
            limit: limits.node_budget,
            deadline: limits.deadline,
            used: AtomicU64::new(0),
            exceeded: AtomicBool::new(false),
            late: AtomicBool::new(false),
        }
    }

    // Returns false once the budget is spent.
    fn spend(&self, n: u64) -> bool {
        if self.used.fetch_add(n, Ordering::Relaxed) + n > self.limit {
            self.exceeded.store(true, Ordering::Relaxed);
        }
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            self.late.store(true, Ordering::Relaxed);
        }
        !self.exceeded.load(Ordering::Relaxed) && !self.late.load(Ordering::Relaxed)
    }

    fn check(&self) -> Result<u64> {
        if self.late.load(Ordering::Relaxed) {
            Err(deadline_error())
        } else if self.exceeded.load(Ordering::Relaxed) {
            Err(Error::NodeBudget {
                budget: self.limit,
                best: Word::empty(),
            })
        } else {
            Ok(self.used.load(Ordering::Relaxed))
        }
    }
}

const SPEND_BATCH: u64 = 4096;

/// Visits every good word of length `1..=depth` extending `prefix` (which
/// must itself be good), calling `visit` on each. Stops early when the budget
/// is exhausted.
fn walk(
    c: &ConstraintSet,
    prefix: &[u8],
    depth: usize,
    budget: &Budget,
    visit: &mut dyn FnMut(&[u8]),
) -> Result<()> {
    let k = c.alphabet_size as u8;
    let mut ext = Extender::from_prefix(c, prefix)?;
    let base = prefix.len();
    if base >= depth {
        return Ok(());
    }
    let mut next = vec![0u8];
    let mut pending = 0u64;
    loop {
        let level = ext.len() - base;
        let letter = next[level];
        if letter == k || ext.len() == depth {
            if level == 0 {
                break;
            }
            ext.pop();
            next.pop();
            continue;
        }
        next[level] += 1;
        if ext.try_push(letter)?.is_none() {
            visit(ext.word());
            pending += 1;
            if pending == SPEND_BATCH {
                pending = 0;
                if !budget.spend(SPEND_BATCH) {
                    return Ok(());
                }
            }
            next.push(0);
        }
    }
    budget.spend(pending);
    Ok(())
}

/// Good words of length `split` (or shorter leaves that cannot grow), used
/// to partition a walk across threads. Shorter good words are visited here.
fn frontier(
    c: &ConstraintSet,
    depth: usize,
    budget: &Budget,
    visit: &mut dyn FnMut(&[u8]),
) -> Result<Vec<Vec<u8>>> {
    let target = 8 * rayon::current_num_threads().max(1);
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    let mut len = 0;
    while len < depth && layer.len() < target && !layer.is_empty() {
        let mut next = Vec::new();
        for w in &layer {
            let mut ext = Extender::from_prefix(c, w)?;
            for a in 0..c.alphabet_size as u8 {
                if ext.try_push(a)?.is_none() {
                    visit(ext.word());
                    next.push(ext.word().to_vec());
                    ext.pop();
                }
            }
        }
        budget.spend(next.len() as u64);
        layer = next;
        len += 1;
    }
    Ok(layer)
}

/// Runs `visit` over all good words of length `1..=depth`, folding per-task
/// accumulators with `merge`. The fold is order-independent by contract.
fn enumerate<T, F, M>(
    c: &ConstraintSet,
    depth: usize,
    limits: &SearchLimits,
    init: impl Fn() -> T + Sync,
    visit: F,
    merge: M,
) -> Result<(T, u64)>
where
    T: Send,
    F: Fn(&mut T, &[u8]) + Sync,
    M: Fn(T, T) -> T + Sync,
{
    c.validate()?;
    let budget = Budget::new(limits);
    if !limits.parallel {
        let mut acc = init();
        walk(c, &[], depth, &budget, &mut |w| visit(&mut acc, w))?;
        let used = budget.check()?;
        return Ok((acc, used));
    }
    let mut acc = init();
    let roots = frontier(c, depth, &budget, &mut |w| visit(&mut acc, w))?;
    let parts: Result<Vec<T>> = roots
        .par_iter()
        .map(|root| {
            let mut part = init();
            walk(c, root, depth, &budget, &mut |w| visit(&mut part, w))?;
            Ok(part)
        })
        .collect();
    let acc = parts?.into_iter().fold(acc, &merge);
    let used = budget.check()?;
    Ok((acc, used))
}

/// Middles of good words `p v s` with `|p| = |s| = horizon` and `|v| = length`,
/// each mapped to the lexicographically least such `p v s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendableSet {
    pub length: usize,
    pub horizon: usize,
    pub members: BTreeMap<Word, Word>,
    pub tree_nodes: u64,
}

impl ExtendableSet {
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.members.keys()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn extendable_set(c: &ConstraintSet, length: usize, horizon: usize) -> Result<ExtendableSet> {
    extendable_set_with(c, length, horizon, &SearchLimits::default())
}

pub fn extendable_set_with(
    c: &ConstraintSet,
    length: usize,
    horizon: usize,
    limits: &SearchLimits,
) -> Result<ExtendableSet> {
    let depth = length
        .checked_add(
            horizon
                .checked_mul(2)
                .ok_or_else(|| Error::domain("horizon too large"))?,
        )
        .ok_or_else(|| Error::domain("length too large"))?;
    let mut members = BTreeMap::new();
    if depth == 0 {
        members.insert(Word::empty(), Word::empty());
        return Ok(ExtendableSet {
            length,
            horizon,
            members,
            tree_nodes: 0,
        });
    }
    let (members, nodes) = enumerate(
        c,
        depth,
        limits,
        BTreeMap::<Word, Word>::new,
        |acc, w| {
            if w.len() == depth {
                let middle = Word::from_slice(&w[horizon..horizon + length]);
                // Words arrive in increasing order within one walk.
                acc.entry(middle).or_insert_with(|| Word::from_slice(w));
            }
        },
        |mut a, b| {
            for (k, v) in b {
                match a.get_mut(&k) {
                    Some(cur) if *cur <= v => {}
                    Some(cur) => *cur = v,
                    None => {
                        a.insert(k, v);
                    }
                }
            }
            a
        },
    )?;
    Ok(ExtendableSet {
        length,
        horizon,
        members,
        tree_nodes: nodes,
    })
}

/// `counts[n - 1]` is the number of good words of length `n`, for
/// `n = 1..=n_max`.
pub fn count_by_length(c: &ConstraintSet, n_max: usize) -> Result<Vec<u64>> {
    count_by_length_with(c, n_max, &SearchLimits::default())
}

pub fn count_by_length_with(
    c: &ConstraintSet,
    n_max: usize,
    limits: &SearchLimits,
) -> Result<Vec<u64>> {
    let (counts, _) = enumerate(
        c,
        n_max,
        limits,
        || vec![0u64; n_max],
        |acc, w| acc[w.len() - 1] += 1,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{factors, fixed_point_prefix, parse_morphism};

    fn sigma3_squarefree() -> ConstraintSet {
        ConstraintSet::new(3).forbid_formula("AA").unwrap()
    }

    #[test]
    fn square_free_ternary_reaches_budget() {
        let out = longest_word_search(&sigma3_squarefree(), 50, 1_000_000).unwrap();
        assert_eq!(out.kind, OutcomeKind::ReachedBudget);
        assert_eq!(out.max_length, 50);
        let w = out.witness.unwrap();
        assert_eq!(w.len(), 50);
        assert!(w.as_slice().starts_with(&[0, 1, 0, 2, 0, 1, 2]));
    }

    #[test]
    fn square_free_binary_is_finite() {
        let c = ConstraintSet::new(2).forbid_formula("AA").unwrap();
        let out = longest_word_search(&c, 100, 1000).unwrap();
        assert_eq!(out.kind, OutcomeKind::Exhausted);
        assert_eq!(out.max_length, 3);
        assert_eq!(out.witness.unwrap().to_string(), "010");
        // Good words: 0 1 01 10 010 101.
        assert_eq!(out.tree_nodes, 6);
    }

    #[test]
    fn node_budget_is_enforced() {
        let err = longest_word_search(&sigma3_squarefree(), 10_000, 100).unwrap_err();
        match err {
            Error::NodeBudget { budget, best } => {
                assert_eq!(budget, 100);
                assert!(!best.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn descending_order_mirrors() {
        let c = ConstraintSet::new(2).forbid_formula("AA").unwrap();
        let out = longest_word_search_ordered(&c, 100, 1000, LetterOrder::Descending).unwrap();
        assert_eq!(out.witness.unwrap().to_string(), "101");
    }

    #[test]
    fn counts_of_square_free_ternary() {
        let limits = SearchLimits::sequential(1_000_000);
        let seq = count_by_length_with(&sigma3_squarefree(), 10, &limits).unwrap();
        assert_eq!(seq, [3, 6, 12, 18, 30, 42, 60, 78, 108, 144]);
        let par = count_by_length(&sigma3_squarefree(), 10).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn extendable_set_matches_fixed_point_factors() {
        // Squares of period >= 4 plus short junk forbidden: the language
        // equals the factors of a morphic word only beyond a horizon; here
        // we only check parallel and sequential agree and members are good.
        let c = ConstraintSet::new(3)
            .forbid_formula("AA")
            .unwrap()
            .forbid_factor("010")
            .unwrap()
            .forbid_factor("212")
            .unwrap();
        let seq = extendable_set_with(&c, 8, 6, &SearchLimits::sequential(10_000_000)).unwrap();
        let par = extendable_set(&c, 8, 6).unwrap();
        assert_eq!(seq.members, par.members);
        let b3 = parse_morphism("012/02/1").unwrap();
        let fact = factors(&fixed_point_prefix(&b3, 2000).unwrap(), 8);
        let got: std::collections::BTreeSet<Word> = seq.words().cloned().collect();
        assert!(fact.is_subset(&got));
        for (v, wit) in &seq.members {
            assert_eq!(&wit.factor(6, 8), v);
        }
    }

    #[test]
    fn empty_language() {
        let c = ConstraintSet::new(1).forbid_factor("0").unwrap();
        let out = longest_word_search(&c, 5, 10).unwrap();
        assert_eq!((out.kind, out.max_length), (OutcomeKind::Exhausted, 0));
        assert_eq!(count_by_length(&c, 3).unwrap(), [0, 0, 0]);
        assert!(extendable_set(&c, 2, 1).unwrap().is_empty());
    }
}
