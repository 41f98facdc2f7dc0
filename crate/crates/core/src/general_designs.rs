//! Partial `(n, q, r)`-Steiner systems: the unavoidable block counts
//! `kappa_{q,r}`, admissibility, configuration extraction from complete
//! systems, and a randomized construction of weakly k-sparse partial
//! systems (sparsify, then match).

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, side_stream, Rng};
use crate::sparse_check::DEFAULT_SUBSET_BUDGET;
use crate::triple::binom;

const HEADER: &str = "qsys";
const TRAILER: &str = "# schema qsys v1";

/// Blocks are sorted `q`-subsets of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSystem {
    n: usize,
    q: usize,
    r: usize,
    blocks: BTreeSet<Vec<u32>>,
}

fn check_qr(q: usize, r: usize) -> Result<()> {
    if r < 2 || q <= r {
        return Err(invalid(format!("need q > r >= 2, got q={q} r={r}")));
    }
    Ok(())
}

impl QSystem {
    pub fn new(n: usize, q: usize, r: usize) -> Result<QSystem> {
        check_qr(q, r)?;
        if n < q {
            return Err(invalid(format!("need n >= q, got n={n} q={q}")));
        }
        Ok(QSystem {
            n,
            q,
            r,
            blocks: BTreeSet::new(),
        })
    }

    /// Rejects blocks of the wrong size, out of range, or sharing `r`
    /// points with another block.
    pub fn from_blocks(n: usize, q: usize, r: usize, blocks: impl IntoIterator<Item = Vec<u32>>) -> Result<QSystem> {
        let mut s = QSystem::new(n, q, r)?;
        for b in blocks {
            s.insert(b)?;
        }
        if let Some((a, b)) = s.overlapping_pair() {
            return Err(invalid(format!("blocks {a:?} and {b:?} share {} points", meet(a, b))));
        }
        Ok(s)
    }

    fn insert(&mut self, mut b: Vec<u32>) -> Result<()> {
        b.sort_unstable();
        b.dedup();
        if b.len() != self.q || b.iter().any(|&x| x as usize >= self.n) {
            return Err(invalid(format!("{b:?} is not a {}-subset of 0..{}", self.q, self.n)));
        }
        self.blocks.insert(b);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.blocks.iter()
    }

    fn overlapping_pair(&self) -> Option<(&Vec<u32>, &Vec<u32>)> {
        let mut owner: HashMap<Vec<u32>, &Vec<u32>> = HashMap::new();
        for b in &self.blocks {
            for e in r_subsets(b, self.r) {
                if let Some(prev) = owner.insert(e, b) {
                    return Some((prev, b));
                }
            }
        }
        None
    }

    /// Every two blocks share at most `r - 1` points.
    pub fn is_partial_steiner(&self) -> bool {
        self.overlapping_pair().is_none()
    }

    /// Partial and covering every `r`-set.
    pub fn is_complete(&self) -> bool {
        self.is_partial_steiner()
            && binom(self.n as u64, self.r as u64) == self.len() as u128 * binom(self.q as u64, self.r as u64)
    }

    /// Number of `r`-sets covered by some block.
    pub fn covered_r_sets(&self) -> u128 {
        self.len() as u128 * binom(self.q as u64, self.r as u64)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER} n={} q={} r={}\n", self.n, self.q, self.r);
        for b in &self.blocks {
            let cells: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out.push_str(TRAILER);
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<QSystem> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let lines: Vec<&str> = text.lines().collect();
        let header = lines.first().ok_or_else(|| err(1, "empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != HEADER {
            return Err(err(1, format!("expected `{HEADER} n=<n> q=<q> r=<r>`")));
        }
        let field = |idx: usize, key: &str| -> Result<usize> {
            fields[idx]
                .strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(1, format!("bad field {}", fields[idx])))
        };
        let (n, q, r) = (field(1, "n=")?, field(2, "q=")?, field(3, "r=")?);
        match lines.last() {
            Some(&TRAILER) => {}
            Some(l) if l.starts_with("# schema ") => return Err(Error::UnsupportedVersion(l.to_string())),
            _ => return Err(err(lines.len(), "missing schema line".into())),
        }
        let mut blocks = Vec::new();
        for (idx, line) in lines[1..lines.len() - 1].iter().enumerate() {
            let b: std::result::Result<Vec<u32>, _> = line.split(',').map(|x| x.trim().parse::<u32>()).collect();
            blocks.push(b.map_err(|e| err(idx + 2, e.to_string()))?);
        }
        QSystem::from_blocks(n, q, r, blocks)
    }
}

fn meet(a: &[u32], b: &[u32]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

/// All `r`-subsets of a sorted slice, each sorted.
fn r_subsets(b: &[u32], r: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(b: &[u32], r: usize, from: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in from..b.len() {
            cur.push(b[i]);
            rec(b, r, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(b, r, 0, &mut cur, &mut out);
    out
}

/// `floor((j - r - 1) / (q - r))`: the number of blocks every complete
/// system has on some `j` points.
pub fn kappa_qr(q: usize, r: usize, j: usize) -> Result<usize> {
    check_qr(q, r)?;
    if j < r + 1 {
        return Err(invalid(format!("need j >= r + 1, got j={j} r={r}")));
    }
    Ok((j - r - 1) / (q - r))
}

/// `C(q-i, r-i)` divides `C(n-i, r-i)` for every `0 <= i < r`.
pub fn admissible(n: usize, q: usize, r: usize) -> Result<bool> {
    check_qr(q, r)?;
    if n < q {
        return Err(invalid(format!("need n >= q, got n={n} q={q}")));
    }
    Ok((0..r).all(|i| {
        let d = binom((q - i) as u64, (r - i) as u64);
        binom((n - i) as u64, (r - i) as u64) % d == 0
    }))
}

/// `kappa_{q,r}(j)` blocks of a complete system inside `points`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extracted {
    pub blocks: Vec<Vec<u32>>,
    /// Union of the blocks.
    pub support: Vec<u32>,
    /// `j` points: the support plus `padding` isolated points.
    pub points: Vec<u32>,
    pub padding: usize,
}

/// Finds `kappa_{q,r}(j)` blocks on at most `j` points by the inductive
/// argument: start with one block plus a point, then repeatedly add the
/// block covering the first `r`-set of the current point set not covered
/// yet. Each step adds at most `q - r` points.
pub fn extract_configuration(s: &QSystem, j: usize) -> Result<Extracted> {
    let (q, r, n) = (s.q, s.r, s.n);
    if j <= q || j > n {
        return Err(invalid(format!("need q < j <= n, got j={j} q={q} n={n}")));
    }
    let first = s.blocks.iter().next().ok_or_else(|| Error::Incomplete("system has no blocks".into()))?;
    let mut cover: HashMap<Vec<u32>, &Vec<u32>> = HashMap::new();
    for b in &s.blocks {
        for e in r_subsets(b, r) {
            cover.insert(e, b);
        }
    }
    let steps = (j - q - 1) / (q - r);
    let mut blocks = vec![first.clone()];
    let mut points: BTreeSet<u32> = first.iter().copied().collect();
    let extra = (0..n as u32).find(|x| !points.contains(x)).expect("n > q");
    points.insert(extra);
    for _ in 0..steps {
        let pts: Vec<u32> = points.iter().copied().collect();
        let e = r_subsets(&pts, r)
            .into_iter()
            .find(|e| !blocks.iter().any(|b| e.iter().all(|x| b.contains(x))))
            .expect("fewer covered r-sets than r-sets in the point set");
        let b = cover
            .get(&e)
            .ok_or_else(|| Error::Incomplete(format!("r-set {e:?} is not covered")))?;
        blocks.push((*b).clone());
        points.extend(b.iter().copied());
    }
    debug_assert!(points.len() <= j);
    let support: BTreeSet<u32> = blocks.iter().flatten().copied().collect();
    let mut all = points;
    let mut filler = 0u32;
    while all.len() < j {
        if !all.contains(&filler) {
            all.insert(filler);
        }
        filler += 1;
    }
    Ok(Extracted {
        padding: j - support.len(),
        support: support.into_iter().collect(),
        points: all.into_iter().collect(),
        blocks,
    })
}

/// Largest `j` with `kappa_{q,r}(j) + 2 <= k`, or `None` for `k < 3`.
pub fn weak_jmax(q: usize, r: usize, k: usize) -> Option<usize> {
    (k >= 3).then(|| (k - 1) * (q - r) + r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakMethod {
    /// Every vertex set of size at most `jmax`.
    VertexScan,
    /// Every family of blocks whose union has at most `jmax` points.
    BlockFamilies,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakReport {
    pub k: usize,
    pub ok: bool,
    pub method: WeakMethod,
    /// A vertex set of size `j` and the at least `kappa_{q,r}(j) + 2`
    /// blocks inside it.
    pub witness: Option<(Vec<u32>, Vec<Vec<u32>>)>,
}

/// Checks that no `j`-set with `q + 1 <= j <= jmax` holds
/// `kappa_{q,r}(j) + 2` or more blocks. Scans vertex sets directly when
/// there are at most [`DEFAULT_SUBSET_BUDGET`] of them, and otherwise
/// searches block families, which is also exact.
pub fn is_weakly_k_sparse(s: &QSystem, k: usize) -> Result<WeakReport> {
    is_weakly_k_sparse_with_budget(s, k, DEFAULT_SUBSET_BUDGET)
}

pub fn is_weakly_k_sparse_with_budget(s: &QSystem, k: usize, budget: u128) -> Result<WeakReport> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    let Some(jmax) = weak_jmax(s.q, s.r, k) else {
        return Ok(WeakReport { k, ok: true, method: WeakMethod::VertexScan, witness: None });
    };
    let jmax = jmax.min(s.n);
    if binom(s.n as u64, jmax as u64) > budget {
        let blocks: Vec<Vec<u32>> = s.blocks.iter().cloned().collect();
        let fam = violating_families(&blocks, s.q, s.r, jmax, 1);
        let witness = fam.first().map(|f| {
            let fb: Vec<Vec<u32>> = f.iter().map(|&i| blocks[i].clone()).collect();
            let v: BTreeSet<u32> = fb.iter().flatten().copied().collect();
            (v.into_iter().collect(), fb)
        });
        return Ok(WeakReport { k, ok: witness.is_none(), method: WeakMethod::BlockFamilies, witness });
    }
    let mut by_max: Vec<Vec<&Vec<u32>>> = vec![Vec::new(); s.n];
    for b in &s.blocks {
        by_max[*b.last().unwrap() as usize].push(b);
    }
    let mut in_w = vec![false; s.n];
    let mut w = Vec::new();
    let found = weak_scan(s, &by_max, &mut in_w, &mut w, 0, 0, jmax);
    Ok(match found {
        Some(vertices) => {
            let blocks = s.blocks.iter().filter(|b| b.iter().all(|x| vertices.contains(x))).cloned().collect();
            WeakReport {
                k,
                ok: false,
                method: WeakMethod::VertexScan,
                witness: Some((vertices, blocks)),
            }
        }
        None => WeakReport { k, ok: true, method: WeakMethod::VertexScan, witness: None },
    })
}

fn weak_scan(s: &QSystem, by_max: &[Vec<&Vec<u32>>], in_w: &mut [bool], w: &mut Vec<u32>, from: usize, inside: usize, jmax: usize) -> Option<Vec<u32>> {
    for v in from..s.n {
        w.push(v as u32);
        in_w[v] = true;
        let total = inside + by_max[v].iter().filter(|b| b.iter().all(|&x| in_w[x as usize])).count();
        let j = w.len();
        let hit = j > s.q && total >= (j - s.r - 1) / (s.q - s.r) + 2;
        let result = if hit {
            Some(w.clone())
        } else if j < jmax {
            weak_scan(s, by_max, in_w, w, v + 1, total, jmax)
        } else {
            None
        };
        w.pop();
        in_w[v] = false;
        if result.is_some() {
            return result;
        }
    }
    None
}

/// Largest `theta` with `(q-r-theta)(kappa(j)+2) >= j-r+theta` for all
/// `q + 1 <= j <= jmax`.
pub fn theta_max(q: usize, r: usize, k: usize) -> Result<f64> {
    check_qr(q, r)?;
    let jmax = weak_jmax(q, r, k).ok_or_else(|| invalid(format!("k must be at least 3, got {k}")))?;
    let mut best = f64::INFINITY;
    for j in q + 1..=jmax {
        let kap = ((j - r - 1) / (q - r)) as f64;
        let bound = ((q - r) as f64 * (kap + 2.0) - (j - r) as f64) / (kap + 3.0);
        best = best.min(bound);
    }
    Ok(best)
}

/// Sets of blocks (indices into `blocks`) of size `kappa(|union|) + 2`
/// with union at most `jmax`, each reported once. The smallest index is
/// the anchor; later blocks are added in increasing index order while the
/// union stays within `jmax` points.
fn violating_families(blocks: &[Vec<u32>], q: usize, r: usize, jmax: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut at: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, b) in blocks.iter().enumerate() {
        for &x in b {
            at.entry(x).or_default().push(i);
        }
    }
    let connected_only = jmax < 2 * q;
    let mut out = Vec::new();
    for anchor in 0..blocks.len() {
        let candidates: Vec<usize> = if connected_only {
            let mut c: Vec<usize> = blocks[anchor].iter().flat_map(|x| at[x].iter().copied()).filter(|&i| i > anchor).collect();
            c.sort_unstable();
            c.dedup();
            c
        } else {
            (anchor + 1..blocks.len()).collect()
        };
        let mut fam = vec![anchor];
        let union: BTreeSet<u32> = blocks[anchor].iter().copied().collect();
        family_dfs(blocks, &candidates, 0, &mut fam, &union, q, r, jmax, &mut out, limit);
        if out.len() >= limit {
            break;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn family_dfs(
    blocks: &[Vec<u32>],
    cand: &[usize],
    from: usize,
    fam: &mut Vec<usize>,
    union: &BTreeSet<u32>,
    q: usize,
    r: usize,
    jmax: usize,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    for c in from..cand.len() {
        if out.len() >= limit {
            return;
        }
        let mut grown = union.clone();
        grown.extend(blocks[cand[c]].iter().copied());
        if grown.len() > jmax {
            continue;
        }
        fam.push(cand[c]);
        let need = (grown.len() - r - 1) / (q - r) + 2;
        if fam.len() >= need {
            out.push(fam.clone());
        } else {
            family_dfs(blocks, cand, c + 1, fam, &grown, q, r, jmax, out, limit);
        }
        fam.pop();
    }
}

/// Degree and codegree statistics of a sparsified `q`-graph, recorded
/// against the relaxed slack `eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifyReport {
    pub p: f64,
    /// Rounds of local resampling until no `j`-set is overfull.
    pub rounds: usize,
    pub blocks: usize,
    pub expected_degree: f64,
    pub eps: f64,
    /// `r`-sets whose degree falls outside `(1 +- eps) n^theta / (q-r)!`.
    pub degree_violations: usize,
    /// Largest number of blocks containing two distinct `r`-sets.
    pub max_codegree: usize,
    pub codegree_threshold: f64,
}

/// Upper bound on local resampling rounds.
pub const SPARSIFY_ROUNDS: usize = 1000;

/// Random `q`-graph with each `q`-set kept with probability
/// `n^{-(q-r)+theta}`, then locally resampled until no `j`-set
/// (`q < j <= jmax`) holds `kappa_{q,r}(j) + 2` blocks: every round redraws
/// all `q`-subsets of the unions of overfull families found.
pub fn sparsify(n: usize, q: usize, r: usize, k: usize, theta: f64, seed: u64) -> Result<(Vec<Vec<u32>>, SparsifyReport)> {
    let tmax = theta_max(q, r, k)?;
    if !(theta > 0.0 && theta <= tmax + 1e-12) {
        return Err(invalid(format!("theta = {theta} outside (0, {tmax:.4}] for q={q} r={r} k={k}")));
    }
    if n < q + 1 {
        return Err(invalid(format!("need n > q, got n={n}")));
    }
    let total = binom(n as u64, q as u64);
    if total > 50_000_000 {
        return Err(Error::TooLarge {
            what: "q-sets to sample",
            size: total,
            budget: 50_000_000,
        });
    }
    let jmax = weak_jmax(q, r, k).unwrap();
    let p = (n as f64).powf(-((q - r) as f64) + theta);
    let mut rng = rng_from_seed(seed);
    let mut chosen: BTreeSet<Vec<u32>> = BTreeSet::new();
    for_each_subset(n, q, &mut |b| {
        if rng.gen_bool(p.min(1.0)) {
            chosen.insert(b.to_vec());
        }
    });
    let mut rounds = 0;
    loop {
        let blocks: Vec<Vec<u32>> = chosen.iter().cloned().collect();
        let bad = violating_families(&blocks, q, r, jmax, usize::MAX);
        if bad.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > SPARSIFY_ROUNDS {
            return Err(Error::BudgetExhausted(SPARSIFY_ROUNDS));
        }
        let mut regions: BTreeSet<Vec<u32>> = BTreeSet::new();
        for fam in &bad {
            let u: BTreeSet<u32> = fam.iter().flat_map(|&i| blocks[i].iter().copied()).collect();
            regions.insert(u.into_iter().collect());
        }
        let mut redraw: BTreeSet<Vec<u32>> = BTreeSet::new();
        for region in &regions {
            for idx in r_subsets(region, q) {
                redraw.insert(idx);
            }
        }
        for b in redraw {
            chosen.remove(&b);
            if rng.gen_bool(p.min(1.0)) {
                chosen.insert(b);
            }
        }
    }
    let blocks: Vec<Vec<u32>> = chosen.into_iter().collect();
    let fact: f64 = (1..=q - r).map(|x| x as f64).product();
    let expected_degree = (n as f64).powf(theta) / fact;
    let eps = 0.5;
    let mut deg: HashMap<Vec<u32>, usize> = HashMap::new();
    for b in &blocks {
        for e in r_subsets(b, r) {
            *deg.entry(e).or_default() += 1;
        }
    }
    let low = ((1.0 - eps) * expected_degree).ceil() as usize;
    let zero_ok = low == 0;
    let nr = binom(n as u64, r as u64) as usize;
    let outside = |d: usize| (d as f64) < (1.0 - eps) * expected_degree || (d as f64) > (1.0 + eps) * expected_degree;
    let degree_violations = deg.values().filter(|&&d| outside(d)).count() + if zero_ok { 0 } else { nr - deg.len() };
    let mut codeg: HashMap<Vec<u32>, usize> = HashMap::new();
    for b in &blocks {
        for size in r + 1..=(2 * r).min(q) {
            for u in r_subsets(b, size) {
                *codeg.entry(u).or_default() += 1;
            }
        }
    }
    let report = SparsifyReport {
        p,
        rounds,
        blocks: blocks.len(),
        expected_degree,
        eps,
        degree_violations,
        max_codegree: codeg.values().copied().max().unwrap_or(0),
        codegree_threshold: (n as f64).powf(theta / 10.0),
    };
    Ok((blocks, report))
}

fn for_each_subset(n: usize, q: usize, f: &mut dyn FnMut(&[u32])) {
    let mut cur: Vec<u32> = (0..q as u32).collect();
    loop {
        f(&cur);
        let mut i = q;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if (cur[i] as usize) < n - q + i {
                cur[i] += 1;
                for t in i + 1..q {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A matching in the auxiliary hypergraph and its coverage of the vertex
/// set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// Indices of matched hyperedges, ascending.
    pub edges: Vec<usize>,
    pub covered: usize,
    pub vertices: usize,
}

impl Matching {
    pub fn coverage(&self) -> f64 {
        if self.vertices == 0 {
            1.0
        } else {
            self.covered as f64 / self.vertices as f64
        }
    }
}

/// Random-order greedy matching: scan hyperedges in random order, take each
/// that is disjoint from those taken; keep the best of `restarts` passes.
pub fn greedy_matching(hyperedges: &[Vec<usize>], vertices: usize, restarts: usize, rng: &mut Rng) -> Matching {
    let mut best = Matching {
        edges: Vec::new(),
        covered: 0,
        vertices,
    };
    let mut order: Vec<usize> = (0..hyperedges.len()).collect();
    for _ in 0..restarts.max(1) {
        order.shuffle(rng);
        let mut used = vec![false; vertices];
        let mut taken = Vec::new();
        let mut covered = 0;
        for &h in &order {
            let e = &hyperedges[h];
            if e.iter().all(|&v| !used[v]) {
                for &v in e {
                    used[v] = true;
                }
                covered += e.len();
                taken.push(h);
            }
        }
        if covered > best.covered || best.edges.is_empty() {
            taken.sort_unstable();
            best = Matching {
                edges: taken,
                covered,
                vertices,
            };
        }
    }
    best
}

/// Rank of a sorted `r`-set among all `r`-subsets of `0..n`, colex order.
fn r_set_rank(e: &[u32]) -> usize {
    e.iter().enumerate().map(|(i, &x)| binom(x as u64, i as u64 + 1) as usize).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub sparsify: SparsifyReport,
    pub theta: f64,
    pub theta_max: f64,
    pub matched_blocks: usize,
    pub r_sets: u128,
    pub coverage: f64,
    /// `(1 - gamma) C(n,r) / C(q,r)`.
    pub target_blocks: f64,
    pub meets_target: bool,
}

/// Restart passes used by [`build_weak_sparse`].
pub const MATCHING_RESTARTS: usize = 50;

/// Sparsify, build the auxiliary hypergraph on `r`-sets (one hyperedge per
/// kept `q`-set), match greedily, and return the matched `q`-sets.
pub fn build_weak_sparse(n: usize, q: usize, r: usize, k: usize, gamma: f64, theta: f64, seed: u64) -> Result<(QSystem, DesignReport)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let (blocks, sparsify_report) = sparsify(n, q, r, k, theta, seed)?;
    let aux: Vec<Vec<usize>> = blocks.iter().map(|b| r_subsets(b, r).iter().map(|e| r_set_rank(e)).collect()).collect();
    let r_sets = binom(n as u64, r as u64);
    let mut rng = side_stream(seed, 0x6d61_7463_68);
    let m = greedy_matching(&aux, r_sets as usize, MATCHING_RESTARTS, &mut rng);
    let system = QSystem::from_blocks(n, q, r, m.edges.iter().map(|&i| blocks[i].clone()))?;
    let target_blocks = (1.0 - gamma) * r_sets as f64 / binom(q as u64, r as u64) as f64;
    let report = DesignReport {
        sparsify: sparsify_report,
        theta,
        theta_max: theta_max(q, r, k)?,
        matched_blocks: system.len(),
        r_sets,
        coverage: m.coverage(),
        target_blocks,
        meets_target: system.len() as f64 >= target_blocks,
    };
    Ok((system, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> QSystem {
        let b = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        QSystem::from_blocks(7, 3, 2, b.iter().map(|x| x.to_vec())).unwrap()
    }

    fn affine_plane() -> QSystem {
        // Points (x, y) of Z_3^2 as 3x + y; lines of all four directions.
        let mut lines = Vec::new();
        for (dx, dy) in [(0, 1), (1, 0), (1, 1), (1, 2)] {
            let mut seen = BTreeSet::new();
            for start in 0..9u32 {
                let (x, y) = (start / 3, start % 3);
                let mut line: Vec<u32> = (0..3).map(|t| ((x + dx * t) % 3) * 3 + (y + dy * t) % 3).collect();
                line.sort_unstable();
                if seen.insert(line.clone()) {
                    lines.push(line);
                }
            }
        }
        QSystem::from_blocks(9, 3, 2, lines).unwrap()
    }

    #[test]
    fn kappa_values() {
        for j in 3..30 {
            assert_eq!(kappa_qr(3, 2, j).unwrap(), j - 3);
        }
        for r in 2..6 {
            for j in r + 1..30 {
                assert_eq!(kappa_qr(r + 1, r, j).unwrap(), j - r - 1);
            }
        }
        for (q, r) in [(4, 2), (5, 3), (7, 2)] {
            assert_eq!(kappa_qr(q, r, q + 1).unwrap(), 1);
        }
        assert!(kappa_qr(2, 2, 5).is_err() && kappa_qr(4, 2, 2).is_err());
    }

    #[test]
    fn admissibility() {
        assert!(admissible(7, 3, 2).unwrap());
        assert!(!admissible(8, 3, 2).unwrap());
        assert!(admissible(13, 4, 2).unwrap());
        assert!(!admissible(12, 4, 2).unwrap());
        assert!(admissible(8, 4, 3).unwrap());
    }

    #[test]
    fn complete_examples() {
        assert!(fano().is_complete());
        let ag = affine_plane();
        assert_eq!(ag.len(), 12);
        assert!(ag.is_complete());
        assert!(QSystem::from_blocks(7, 3, 2, vec![vec![0, 1, 2], vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn extraction() {
        let e = extract_configuration(&fano(), 7).unwrap();
        assert_eq!(e.blocks.len(), 4);
        assert!(e.support.len() <= 7 && e.points.len() == 7);
        let e = extract_configuration(&affine_plane(), 6).unwrap();
        assert_eq!(e.blocks.len(), 3);
        let e = extract_configuration(&fano(), 4).unwrap();
        assert_eq!((e.blocks.len(), e.padding), (1, 1));
        let single = QSystem::from_blocks(7, 3, 2, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(extract_configuration(&single, 5), Err(Error::Incomplete(_))));
        assert!(extract_configuration(&fano(), 3).is_err());
    }

    #[test]
    fn weak_sparseness_detects_planted_configuration() {
        let empty = QSystem::new(12, 4, 2).unwrap();
        assert!(is_weakly_k_sparse(&empty, 3).unwrap().ok);
        // Two 4-sets sharing one point: 7 points, kappa(7) = 2, fine.
        let two = QSystem::from_blocks(12, 4, 2, vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6]]).unwrap();
        assert!(is_weakly_k_sparse(&two, 3).unwrap().ok);
        // Three 4-sets pairwise sharing one point on 6 points: kappa(6) = 1.
        let three = QSystem::from_blocks(12, 4, 2, vec![vec![0, 1, 2, 3], vec![0, 4, 5, 6], vec![1, 4, 7, 8]]).unwrap();
        assert!(is_weakly_k_sparse(&three, 3).unwrap().ok);
        let planted = QSystem::from_blocks(12, 4, 2, vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![2, 3, 4, 5]]);
        assert!(planted.is_err());
        // Fano minus a block: 6 triples on 7 points, kappa(7) + 2 = 6.
        let mut f = fano();
        f.blocks.remove(&vec![2, 4, 5]);
        assert!(is_weakly_k_sparse(&f, 5).unwrap().ok);
        let r = is_weakly_k_sparse(&f, 6).unwrap();
        assert!(!r.ok);
        assert_eq!(r.witness.unwrap().1.len(), 6);
    }

    #[test]
    fn family_search_matches_vertex_scan() {
        let mut rng = rng_from_seed(3);
        for _ in 0..40 {
            let n = 9;
            let mut blocks = BTreeSet::new();
            for _ in 0..rng.gen_range(2..8) {
                let mut b: Vec<u32> = (0..n as u32).collect::<Vec<_>>().choose_multiple(&mut rng, 3).copied().collect();
                b.sort_unstable();
                blocks.insert(b);
            }
            let blocks: Vec<Vec<u32>> = blocks.into_iter().collect();
            let s = QSystem { n, q: 3, r: 2, blocks: blocks.iter().cloned().collect() };
            for k in 3..=5 {
                let scan = is_weakly_k_sparse(&s, k).unwrap();
                let fam = is_weakly_k_sparse_with_budget(&s, k, 0).unwrap();
                assert_eq!(scan.method, WeakMethod::VertexScan);
                assert_eq!(fam.method, WeakMethod::BlockFamilies);
                assert_eq!(fam.ok, scan.ok);
            }
        }
    }

    #[test]
    fn theta_feasibility() {
        assert!((theta_max(4, 2, 3).unwrap() - 0.5).abs() < 1e-12);
        assert!(sparsify(30, 4, 2, 3, 0.6, 1).is_err());
        assert!(sparsify(30, 4, 2, 3, 0.0, 1).is_err());
    }

    #[test]
    fn pipeline_output_is_sparse_and_partial() {
        let (s, rep) = build_weak_sparse(24, 4, 2, 3, 0.3, 0.5, 7).unwrap();
        assert!(s.is_partial_steiner());
        assert!(is_weakly_k_sparse(&s, 3).unwrap().ok);
        assert_eq!(rep.matched_blocks, s.len());
        assert!(s.covered_r_sets() <= rep.r_sets);
        assert!((rep.coverage - s.covered_r_sets() as f64 / rep.r_sets as f64).abs() < 1e-12);
    }

    #[test]
    fn greedy_matching_basics() {
        let mut rng = rng_from_seed(0);
        let m = greedy_matching(&[vec![0, 1, 2]], 6, 3, &mut rng);
        assert_eq!(m.edges, vec![0]);
        assert_eq!(m.coverage(), 0.5);
        let m = greedy_matching(&[vec![0, 1], vec![1, 2], vec![2, 3]], 4, 20, &mut rng);
        assert_eq!(m.covered, 4);
    }

    #[test]
    fn text_round_trip() {
        let f = fano();
        let text = f.to_text();
        assert!(text.starts_with("qsys n=7 q=3 r=2\n0,1,2\n"));
        assert_eq!(QSystem::from_text(&text).unwrap(), f);
        let bumped = text.replace("qsys v1", "qsys v2");
        assert!(matches!(QSystem::from_text(&bumped), Err(Error::UnsupportedVersion(_))));
    }
}
