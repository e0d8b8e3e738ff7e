//! Brute-force oracles shared by the integration tests. Each one works from
//! the definitions alone and never calls into the library.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

pub fn all_factors(w: &[u8]) -> BTreeSet<Vec<u8>> {
    let mut out = BTreeSet::new();
    for i in 0..w.len() {
        for j in i + 1..=w.len() {
            out.insert(w[i..j].to_vec());
        }
    }
    out
}

pub fn smallest_period(u: &[u8]) -> usize {
    (1..=u.len())
        .find(|&p| (p..u.len()).all(|i| u[i] == u[i - p]))
        .unwrap()
}

pub fn is_factor(w: &[u8], u: &[u8]) -> bool {
    u.is_empty() || w.windows(u.len()).any(|x| x == u)
}

pub fn squares(w: &[u8]) -> BTreeSet<Vec<u8>> {
    let mut out = HashSet::new();
    for i in 0..w.len() {
        for p in 1..=(w.len() - i) / 2 {
            if w[i..i + p] == w[i + p..i + 2 * p] {
                out.insert(&w[i..i + 2 * p]);
            }
        }
    }
    out.into_iter().map(<[u8]>::to_vec).collect()
}

pub fn min_overlaps(w: &[u8]) -> BTreeSet<Vec<u8>> {
    let mut out = HashSet::new();
    for i in 0..w.len() {
        for p in 1..=(w.len() - i).saturating_sub(1) / 2 {
            if w[i..i + p + 1] == w[i + p..i + 2 * p + 1] {
                out.insert(&w[i..i + 2 * p + 1]);
            }
        }
    }
    out.into_iter().map(<[u8]>::to_vec).collect()
}

/// Largest `(length, period)` ratio over all factors, unreduced.
pub fn max_exponent(w: &[u8]) -> (u64, u64) {
    let mut best = (1u64, 1u64);
    for i in 0..w.len() {
        for p in 1..w.len() - i {
            let mut len = p;
            while i + len < w.len() && w[i + len] == w[i + len - p] {
                len += 1;
            }
            if len as u64 * best.1 > best.0 * p as u64 {
                best = (len as u64, p as u64);
            }
        }
    }
    best
}

/// Every non-erasing assignment with images of length at most `cap` under
/// which each fragment maps to a factor of `w`. Fragments are lists of
/// variable indices.
pub fn occurrences(
    w: &[u8],
    fragments: &[Vec<u8>],
    variables: usize,
    cap: usize,
) -> BTreeSet<Vec<Vec<u8>>> {
    let facts: HashSet<&[u8]> = (0..w.len())
        .flat_map(|i| (i + 1..=w.len().min(i + cap)).map(move |j| &w[i..j]))
        .collect();
    let mut candidates: Vec<&[u8]> = facts.into_iter().collect();
    candidates.sort();
    let all: HashSet<&[u8]> = (0..w.len())
        .flat_map(|i| (i + 1..=w.len()).map(move |j| &w[i..j]))
        .collect();
    let mut out = BTreeSet::new();
    let mut chosen: Vec<&[u8]> = Vec::new();
    extend(
        w.len(),
        fragments,
        variables,
        &candidates,
        &all,
        &mut chosen,
        &mut out,
    );
    out
}

fn extend<'w>(
    n: usize,
    fragments: &[Vec<u8>],
    variables: usize,
    candidates: &[&'w [u8]],
    all: &HashSet<&[u8]>,
    chosen: &mut Vec<&'w [u8]>,
    out: &mut BTreeSet<Vec<Vec<u8>>>,
) {
    let k = chosen.len();
    // Fragments whose variables are all chosen must already be factors.
    for frag in fragments {
        if frag.iter().all(|&v| (v as usize) < k) {
            let img: Vec<u8> = frag
                .iter()
                .flat_map(|&v| chosen[v as usize].iter().copied())
                .collect();
            if !all.contains(img.as_slice()) {
                return;
            }
        } else {
            let known: usize = frag
                .iter()
                .filter(|&&v| (v as usize) < k)
                .map(|&v| chosen[v as usize].len())
                .sum();
            let unknown = frag.iter().filter(|&&v| v as usize >= k).count();
            if known + unknown > n {
                return;
            }
        }
    }
    if k == variables {
        out.insert(chosen.iter().map(|s| s.to_vec()).collect());
        return;
    }
    for &c in candidates {
        chosen.push(c);
        extend(n, fragments, variables, candidates, all, chosen, out);
        chosen.pop();
    }
}

/// Parses `AB.BA`-style text into fragments of variable indices.
pub fn formula(text: &str) -> (Vec<Vec<u8>>, usize) {
    let frags: Vec<Vec<u8>> = text
        .split('.')
        .map(|f| f.bytes().map(|b| b - b'A').collect())
        .collect();
    let vars = frags
        .iter()
        .flatten()
        .map(|&v| v as usize + 1)
        .max()
        .unwrap_or(0);
    (frags, vars)
}

/// All words of length `n` over `k` letters, in lexicographic order.
pub fn all_words(k: u8, n: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = (k as u64).pow(n as u32);
    (0..total).map(move |mut code| {
        let mut w = vec![0u8; n];
        for slot in w.iter_mut().rev() {
            *slot = (code % k as u64) as u8;
            code /= k as u64;
        }
        w
    })
}
