//! Letters, finite words and morphisms over digit alphabets.
//!
//! Letters are the digits `0`–`9`, so an alphabet has at most ten letters.
//! A morphism is written as its images separated by slashes, e.g. `012/02/1`
//! maps `0 -> 012`, `1 -> 02`, `2 -> 1`. Empty segments denote erased letters.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported alphabet.
pub const MAX_ALPHABET: usize = 10;

/// Default cap on the length of generated prefixes (letters).
pub const DEFAULT_PREFIX_LIMIT: usize = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(value: u8) -> Result<Self> {
        if (value as usize) < MAX_ALPHABET {
            Ok(Letter(value))
        } else {
            Err(Error::alphabet(format!("letter {value} is not a digit")))
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        c.to_digit(10)
            .map(|d| Letter(d as u8))
            .ok_or_else(|| Error::syntax(format!("'{c}' is not a digit letter")))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn to_char(self) -> char {
        (b'0' + self.0) as char
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A finite word. Letters are stored as raw values `0..=9`.
///
/// Words order lexicographically, which for digit strings coincides with the
/// order of their textual rendering.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= MAX_ALPHABET) {
            return Err(Error::alphabet(format!("letter {bad} is not a digit")));
        }
        Ok(Word(letters))
    }

    /// Caller guarantees every letter is below [`MAX_ALPHABET`].
    pub(crate) fn from_raw(letters: Vec<u8>) -> Self {
        debug_assert!(letters.iter().all(|&l| (l as usize) < MAX_ALPHABET));
        Word(letters)
    }

    pub(crate) fn from_slice(letters: &[u8]) -> Self {
        Word::from_raw(letters.to_vec())
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.0.iter().map(|&l| Letter(l))
    }

    /// Smallest `k` such that the word lives over `Σ_k` (0 for the empty word).
    pub fn alphabet_size(&self) -> usize {
        self.0.iter().max().map_or(0, |&m| m as usize + 1)
    }

    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l as usize >= size) {
            Some(&l) => Err(Error::alphabet(format!(
                "letter {l} outside the {size}-letter alphabet"
            ))),
            None => Ok(()),
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn factor(&self, start: usize, len: usize) -> Word {
        Word(self.0[start..start + len].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter.0);
    }

    pub fn contains_factor(&self, u: &Word) -> bool {
        contains_factor(self, u)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Letter::from_char(c).map(Letter::value))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&l| (b'0' + l) as char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl AsRef<[u8]> for Word {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Position of the first occurrence of `needle` in `hay`.
pub(crate) fn find(hay: &[u8], needle: &[u8]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    if needle.len() > hay.len() {
        return None;
    }
    let first = needle[0];
    let last_start = hay.len() - needle.len();
    let mut i = 0;
    while i <= last_start {
        {
            let off = hay[i..=last_start].iter().position(|&c| c == first)?;
            i += off;
            if &hay[i..i + needle.len()] == needle {
                return Some(i);
            }
            i += 1;
        }
    }
    None
}

pub fn contains_factor(w: &Word, u: &Word) -> bool {
    find(w.as_slice(), u.as_slice()).is_some()
}

/// Distinct factors of length exactly `len`, in lexicographic order.
/// Lengths beyond `|w|` give the empty set.
pub fn factors(w: &Word, len: usize) -> BTreeSet<Word> {
    if len > w.len() {
        return BTreeSet::new();
    }
    let seen: HashSet<&[u8]> = w.as_slice().windows(len.max(1)).collect();
    if len == 0 {
        return BTreeSet::from([Word::empty()]);
    }
    seen.into_iter().map(Word::from_slice).collect()
}

/// Factor-set file format: one word per line, trailing newline.
pub fn render_word_set<'a>(words: impl IntoIterator<Item = &'a Word>) -> String {
    let mut out = String::new();
    for w in words {
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}

/// A morphism from `Σ_k` to digit words, one image per source letter.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        if images.is_empty() || images.len() > MAX_ALPHABET {
            return Err(Error::alphabet(format!(
                "a morphism needs 1 to {MAX_ALPHABET} images, got {}",
                images.len()
            )));
        }
        Ok(Morphism { images })
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }

    pub fn identity(alphabet_size: usize) -> Result<Self> {
        Morphism::new(
            (0..alphabet_size as u8)
                .map(|l| Word::from_raw(vec![l]))
                .collect(),
        )
    }

    /// Size of the source alphabet.
    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    /// Smallest alphabet containing every image letter.
    pub fn target_alphabet_size(&self) -> usize {
        self.images
            .iter()
            .map(Word::alphabet_size)
            .max()
            .unwrap_or(0)
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, letter: u8) -> &Word {
        &self.images[letter as usize]
    }

    /// `m(0)` starts with `0` and has length at least 2.
    pub fn is_prolongable(&self) -> bool {
        let first = self.images[0].as_slice();
        first.len() >= 2 && first[0] == 0
    }

    pub fn is_endomorphism(&self) -> bool {
        self.target_alphabet_size() <= self.alphabet_size()
    }

    /// Letters reachable from `0` by iterating the morphism. Requires an
    /// endomorphism.
    pub fn reachable_letters(&self) -> Vec<u8> {
        let mut seen = [false; MAX_ALPHABET];
        let mut stack = vec![0u8];
        seen[0] = true;
        while let Some(l) = stack.pop() {
            for &m in self.image(l).as_slice() {
                if !seen[m as usize] {
                    seen[m as usize] = true;
                    stack.push(m);
                }
            }
        }
        (0..MAX_ALPHABET as u8)
            .filter(|&l| seen[l as usize])
            .collect()
    }
}

impl FromStr for Morphism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::alphabet("a morphism needs at least one image"));
        }
        let images = s
            .split('/')
            .map(Word::from_str)
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(images)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{img}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism(\"{self}\")")
    }
}

pub fn parse_morphism(text: &str) -> Result<Morphism> {
    text.parse()
}

pub fn apply(m: &Morphism, w: &Word) -> Result<Word> {
    w.check_alphabet(m.alphabet_size())
        .map_err(|_| Error::domain(format!("word {w} uses letters outside the domain of {m}")))?;
    let total = w.as_slice().iter().map(|&l| m.image(l).len()).sum();
    let mut out = Vec::with_capacity(total);
    for &l in w.as_slice() {
        out.extend_from_slice(m.image(l).as_slice());
    }
    Ok(Word::from_raw(out))
}

/// `compose(outer, inner)(a) = outer(inner(a))`.
pub fn compose(outer: &Morphism, inner: &Morphism) -> Result<Morphism> {
    if inner.target_alphabet_size() > outer.alphabet_size() {
        return Err(Error::domain(format!(
            "cannot compose {outer} after {inner}: target alphabet mismatch"
        )));
    }
    let images = inner
        .images()
        .iter()
        .map(|img| apply(outer, img))
        .collect::<Result<Vec<_>>>()?;
    Morphism::new(images)
}

pub fn morphisms_equal(a: &Morphism, b: &Morphism) -> bool {
    a.images == b.images
}

/// Deletes the letters of `kill` from every image. Letters are not renamed.
pub fn erase_letters(m: &Morphism, kill: &[Letter]) -> Result<Morphism> {
    let target = m.target_alphabet_size();
    if let Some(bad) = kill.iter().find(|l| l.value() as usize >= target) {
        return Err(Error::alphabet(format!(
            "letter {bad} is not in the target alphabet of {m}"
        )));
    }
    let mut mask = [false; MAX_ALPHABET];
    for l in kill {
        mask[l.value() as usize] = true;
    }
    let images = m
        .images()
        .iter()
        .map(|img| {
            Word::from_raw(
                img.as_slice()
                    .iter()
                    .copied()
                    .filter(|&l| !mask[l as usize])
                    .collect(),
            )
        })
        .collect();
    Morphism::new(images)
}

/// Lazily expands the fixed point `f^ω(0)` of a prolongable morphism.
struct FixedPointStream<'m> {
    m: &'m Morphism,
    buf: Vec<u8>,
    // Number of letters of `buf` whose image has been appended.
    expanded: usize,
    limit: usize,
}

impl<'m> FixedPointStream<'m> {
    fn new(m: &'m Morphism, limit: usize) -> Result<Self> {
        if !m.is_prolongable() {
            return Err(Error::domain(format!(
                "{m} is not prolongable on 0 (its image of 0 must start with 0 and have length >= 2)"
            )));
        }
        if !m.is_endomorphism() {
            return Err(Error::domain(format!(
                "{m} maps outside its own alphabet and has no fixed point"
            )));
        }
        if let Some(l) = m
            .reachable_letters()
            .into_iter()
            .find(|&l| m.image(l).is_empty())
        {
            return Err(Error::domain(format!(
                "letter {l} is reachable from 0 but erased by {m}"
            )));
        }
        Ok(FixedPointStream {
            m,
            buf: m.image(0).as_slice().to_vec(),
            expanded: 1,
            limit,
        })
    }

    /// Grows the buffer until it holds at least `n` letters.
    fn ensure(&mut self, n: usize) -> Result<()> {
        if n > self.limit {
            return Err(Error::Resource(format!(
                "prefix of length {n} exceeds the limit of {} letters",
                self.limit
            )));
        }
        while self.buf.len() < n {
            let l = self.buf[self.expanded];
            self.expanded += 1;
            let img = self.m.image(l).as_slice();
            self.buf.extend_from_slice(img);
        }
        Ok(())
    }
}

pub fn fixed_point_prefix(m: &Morphism, n: usize) -> Result<Word> {
    fixed_point_prefix_limited(m, n, DEFAULT_PREFIX_LIMIT)
}

pub fn fixed_point_prefix_limited(m: &Morphism, n: usize, limit: usize) -> Result<Word> {
    let mut stream = FixedPointStream::new(m, limit)?;
    stream.ensure(n)?;
    stream.buf.truncate(n);
    Ok(Word::from_raw(stream.buf))
}

/// Prefix of length `n` of `g(f^ω(0))`.
pub fn morphic_prefix(g: &Morphism, f: &Morphism, n: usize) -> Result<Word> {
    morphic_prefix_limited(g, f, n, DEFAULT_PREFIX_LIMIT)
}

pub fn morphic_prefix_limited(g: &Morphism, f: &Morphism, n: usize, limit: usize) -> Result<Word> {
    let mut stream = FixedPointStream::new(f, limit)?;
    let reachable = f.reachable_letters();
    if let Some(&l) = reachable.iter().find(|&&l| l as usize >= g.alphabet_size()) {
        return Err(Error::domain(format!(
            "{g} is not defined on letter {l} of the fixed point of {f}"
        )));
    }
    if reachable.iter().all(|&l| g.image(l).is_empty()) {
        return Err(Error::domain(format!(
            "the image of the fixed point of {f} by {g} is finite"
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while out.len() < n {
        // The fixed point itself is capped by `limit`, which also bounds the
        // work when the coding erases almost everything.
        stream.ensure(i + 1)?;
        out.extend_from_slice(g.image(stream.buf[i]).as_slice());
        i += 1;
    }
    out.truncate(n);
    Ok(Word::from_raw(out))
}
