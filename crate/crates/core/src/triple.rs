//! Triples, pairs and triple systems on the vertex set `0..n`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Binomial coefficient as an exact integer. Panics on overflow.
pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Binomial coefficient in floating point; `n` may be any real.
///
/// Uses the falling-factorial product, which stays accurate for the small
/// lower indices used here (at most a dozen) even when `n` is large.
pub fn binom_f64(n: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i as f64) / (i + 1) as f64;
    }
    acc
}

/// Rank of a sorted 2-set in colexicographic order.
#[inline]
pub fn pair_rank(a: u32, b: u32) -> usize {
    debug_assert!(a < b);
    a as usize + (b as usize * (b as usize - 1)) / 2
}

/// Rank of a sorted 3-set in colexicographic order. Independent of `n`:
/// triples inside `0..n` get exactly the ranks `0..C(n,3)`.
#[inline]
pub fn triple_rank(a: u32, b: u32, c: u32) -> usize {
    debug_assert!(a < b && b < c);
    let (b, c) = (b as usize, c as usize);
    a as usize + b * (b - 1) / 2 + c * (c - 1) * (c - 2) / 6
}

#[inline]
pub(crate) fn sort3(x: u32, y: u32, z: u32) -> [u32; 3] {
    let (mut a, mut b, mut c) = (x, y, z);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if b > c {
        std::mem::swap(&mut b, &mut c);
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    [a, b, c]
}

/// An unordered 2-set `{a, b}` with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    a: u32,
    b: u32,
}

impl Pair {
    pub fn new(x: u32, y: u32) -> Pair {
        assert!(x != y, "pair needs two distinct vertices");
        Pair {
            a: x.min(y),
            b: x.max(y),
        }
    }

    pub fn a(self) -> u32 {
        self.a
    }

    pub fn b(self) -> u32 {
        self.b
    }

    pub fn rank(self) -> usize {
        pair_rank(self.a, self.b)
    }

    pub fn unrank(r: usize) -> Pair {
        let mut b = (((8 * r + 1) as f64).sqrt() as usize + 1) / 2;
        while b * (b - 1) / 2 > r {
            b -= 1;
        }
        while (b + 1) * b / 2 <= r {
            b += 1;
        }
        Pair {
            a: (r - b * (b - 1) / 2) as u32,
            b: b as u32,
        }
    }

    pub fn contains(self, v: u32) -> bool {
        self.a == v || self.b == v
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a, self.b)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

/// An unordered 3-set of vertices, stored sorted.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple([u32; 3]);

impl Triple {
    /// Builds a triple from three distinct vertices in any order.
    ///
    /// # Panics
    /// If two of the vertices coincide.
    pub fn new(x: u32, y: u32, z: u32) -> Triple {
        Triple::try_new(x, y, z).expect("triple needs three distinct vertices")
    }

    pub fn try_new(x: u32, y: u32, z: u32) -> Result<Triple> {
        let v = sort3(x, y, z);
        if v[0] == v[1] || v[1] == v[2] {
            return Err(invalid(format!("repeated vertex in triple ({x},{y},{z})")));
        }
        Ok(Triple(v))
    }

    #[inline]
    pub(crate) fn from_sorted(v: [u32; 3]) -> Triple {
        debug_assert!(v[0] < v[1] && v[1] < v[2]);
        Triple(v)
    }

    pub fn a(self) -> u32 {
        self.0[0]
    }

    pub fn b(self) -> u32 {
        self.0[1]
    }

    pub fn c(self) -> u32 {
        self.0[2]
    }

    pub fn vertices(self) -> [u32; 3] {
        self.0
    }

    #[inline]
    pub fn rank(self) -> usize {
        triple_rank(self.0[0], self.0[1], self.0[2])
    }

    pub fn unrank(r: usize) -> Triple {
        let mut c = 2usize;
        while (c + 1) * c * (c - 1) / 6 <= r {
            c += 1;
        }
        let rest = r - c * (c - 1) * (c - 2) / 6;
        let p = Pair::unrank(rest);
        Triple([p.a, p.b, c as u32])
    }

    pub fn pairs(self) -> [Pair; 3] {
        let [a, b, c] = self.0;
        [Pair { a, b }, Pair { a, b: c }, Pair { a: b, b: c }]
    }

    pub fn contains(self, v: u32) -> bool {
        self.0.contains(&v)
    }

    pub fn contains_pair(self, e: Pair) -> bool {
        self.contains(e.a) && self.contains(e.b)
    }

    /// The vertex of the triple outside `e`, if `e` lies inside it.
    pub fn third(self, e: Pair) -> Option<u32> {
        if !self.contains_pair(e) {
            return None;
        }
        self.0.iter().copied().find(|&v| v != e.a && v != e.b)
    }

    /// Number of shared vertices.
    pub fn meet(self, other: Triple) -> usize {
        self.0.iter().filter(|v| other.contains(**v)).count()
    }

    pub fn max_vertex(self) -> u32 {
        self.0[2]
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        if c < 10 {
            write!(f, "{a}{b}{c}")
        } else {
            write!(f, "{a},{b},{c}")
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "{a},{b},{c}")
    }
}

/// A vertex count together with a set of triples on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TripleSystem {
    n: usize,
    blocks: BTreeSet<Triple>,
}

impl TripleSystem {
    pub fn new(n: usize) -> TripleSystem {
        TripleSystem {
            n,
            blocks: BTreeSet::new(),
        }
    }

    /// Builds a system, rejecting out-of-range vertices. Duplicate triples
    /// collapse into one.
    pub fn from_blocks(n: usize, blocks: impl IntoIterator<Item = Triple>) -> Result<TripleSystem> {
        let mut s = TripleSystem::new(n);
        for t in blocks {
            s.insert(t)?;
        }
        Ok(s)
    }

    /// Parses `"012,013"`-style block lists (single-digit vertices) as used
    /// for small hand-written configurations.
    pub fn from_digits(n: usize, spec: &str) -> Result<TripleSystem> {
        let mut s = TripleSystem::new(n);
        for word in spec.split([',', ' ']).filter(|w| !w.is_empty()) {
            let d: Vec<u32> = word
                .chars()
                .map(|ch| ch.to_digit(10).ok_or_else(|| invalid(format!("bad block {word:?}"))))
                .collect::<Result<_>>()?;
            if d.len() != 3 {
                return Err(invalid(format!("bad block {word:?}")));
            }
            s.insert(Triple::try_new(d[0], d[1], d[2])?)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Inserts a triple; returns whether it was new.
    pub fn insert(&mut self, t: Triple) -> Result<bool> {
        if t.c() as usize >= self.n {
            return Err(invalid(format!("triple {t} out of range for n={}", self.n)));
        }
        Ok(self.blocks.insert(t))
    }

    pub fn remove(&mut self, t: Triple) -> bool {
        self.blocks.remove(&t)
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.blocks.contains(&t)
    }

    pub fn blocks(&self) -> impl ExactSizeIterator<Item = Triple> + '_ {
        self.blocks.iter().copied()
    }

    pub fn block_vec(&self) -> Vec<Triple> {
        self.blocks.iter().copied().collect()
    }

    /// Sorted list of non-isolated vertices.
    pub fn points(&self) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        for t in &self.blocks {
            for v in t.vertices() {
                seen[v as usize] = true;
            }
        }
        (0..self.n as u32).filter(|&v| seen[v as usize]).collect()
    }

    /// Blocks lying entirely inside the vertex set `w`.
    pub fn induced(&self, w: &[u32]) -> Vec<Triple> {
        self.blocks
            .iter()
            .copied()
            .filter(|t| t.vertices().iter().all(|v| w.contains(v)))
            .collect()
    }

    /// The system restricted to a subset of blocks, relabeled onto `0..p`
    /// where `p` is the number of points those blocks span.
    pub fn compact(blocks: &[Triple]) -> TripleSystem {
        let mut pts: Vec<u32> = blocks.iter().flat_map(|t| t.vertices()).collect();
        pts.sort_unstable();
        pts.dedup();
        let idx = |v: u32| pts.binary_search(&v).unwrap() as u32;
        let mut s = TripleSystem::new(pts.len());
        for t in blocks {
            let [a, b, c] = t.vertices();
            s.blocks.insert(Triple::new(idx(a), idx(b), idx(c)));
        }
        s
    }

    /// Applies a vertex relabeling `v -> perm[v]` onto `0..new_n`.
    pub fn relabel(&self, perm: &[u32], new_n: usize) -> Result<TripleSystem> {
        if perm.len() < self.n {
            return Err(invalid("relabeling shorter than vertex count"));
        }
        TripleSystem::from_blocks(
            new_n,
            self.blocks.iter().map(|t| {
                let [a, b, c] = t.vertices();
                Triple::new(perm[a as usize], perm[b as usize], perm[c as usize])
            }),
        )
    }
}

impl FromIterator<Triple> for TripleSystem {
    /// Collects triples, sizing the vertex set to the largest vertex + 1.
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> TripleSystem {
        let blocks: BTreeSet<Triple> = iter.into_iter().collect();
        let n = blocks.iter().map(|t| t.c() as usize + 1).max().unwrap_or(0);
        TripleSystem { n, blocks }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_enumerate_all_triples_in_order() {
        let n = 9u32;
        let mut expected = 0usize;
        let mut all = Vec::new();
        for c in 0..n {
            for b in 0..c {
                for a in 0..b {
                    all.push(Triple::new(a, b, c));
                }
            }
        }
        for t in &all {
            assert_eq!(t.rank(), expected);
            assert_eq!(Triple::unrank(expected), *t);
            expected += 1;
        }
        assert_eq!(expected as u128, binom(9, 3));
    }

    #[test]
    fn pair_ranks_are_dense() {
        let mut r = 0;
        for b in 1..20u32 {
            for a in 0..b {
                assert_eq!(Pair::new(a, b).rank(), r);
                assert_eq!(Pair::unrank(r), Pair::new(a, b));
                r += 1;
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(6, 3), 20);
        assert_eq!(binom(3, 5), 0);
        assert_eq!(binom(1000, 3), 166_167_000);
        assert!((binom_f64(1000.0, 3) - 166_167_000.0).abs() < 1e-3);
    }

    #[test]
    fn third_vertex() {
        let t = Triple::new(5, 1, 3);
        assert_eq!(t.vertices(), [1, 3, 5]);
        assert_eq!(t.third(Pair::new(5, 1)), Some(3));
        assert_eq!(t.third(Pair::new(0, 1)), None);
    }

    #[test]
    fn digits_parser_and_points() {
        let s = TripleSystem::from_digits(8, "012,034,135,245").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.points(), vec![0, 1, 2, 3, 4, 5]);
        assert!(TripleSystem::from_digits(4, "015").is_err());
        assert!(TripleSystem::from_digits(6, "011").is_err());
    }
}
