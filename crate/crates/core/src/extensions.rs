//! Rooted extension types, their balancedness, extension counting, the
//! double-configuration counters, and exhaustive finite checks of the
//! structural inequalities about overlapping Erdős configurations.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::canon::{self, ColoredBlock};
use crate::configs::{CatalogEntry, ErdosCatalog};
use crate::error::{invalid, Error, Result};
use crate::process::ProcessState;
use crate::stats::ConfigCounter;
use crate::triple::{Triple, TripleSystem};

/// Largest pattern accepted by [`compute_kappa`] (it scans `2^|V(H)|` sets).
pub const MAX_PATTERN_POINTS: usize = 20;

/// A pattern `H` on vertices `0..h.n()` with a root set `U` spanning no
/// block of `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionType {
    h: TripleSystem,
    u: Vec<u32>,
    kappa: usize,
    ell: usize,
}

impl ExtensionType {
    pub fn new(h: TripleSystem, mut u: Vec<u32>) -> Result<ExtensionType> {
        u.sort_unstable();
        u.dedup();
        let kappa = compute_kappa(&h, &u)?;
        let ell = h.n() - u.len();
        Ok(ExtensionType { h, u, kappa, ell })
    }

    pub fn h(&self) -> &TripleSystem {
        &self.h
    }

    pub fn u(&self) -> &[u32] {
        &self.u
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Number of non-root vertices.
    pub fn ell(&self) -> usize {
        self.ell
    }
}

fn mask_of(t: Triple) -> u32 {
    t.vertices().iter().fold(0, |m, &v| m | 1 << v)
}

fn inside(blocks: &[u32], set: u32) -> usize {
    blocks.iter().filter(|&&b| b & !set == 0).count()
}

/// Subsets of `m` (including 0 and `m`).
fn subsets(m: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// Smallest `kappa >= 0` with `|H - H[U']| >= |V(H) \ U'| - kappa` for all
/// `U <= U' <= V(H)`, where `V(H)` is the bit set `vh`.
fn kappa_masks(h: &[u32], vh: u32, u: u32) -> usize {
    let mut worst = 0i64;
    for extra in subsets(vh & !u) {
        let up = u | extra;
        let outside = (vh & !up).count_ones() as i64;
        let edges_out = (h.len() - inside(h, up)) as i64;
        worst = worst.max(outside - edges_out);
    }
    worst as usize
}

fn pattern_masks(h: &TripleSystem, u: &[u32]) -> Result<(Vec<u32>, u32, u32)> {
    let n = h.n();
    if n > MAX_PATTERN_POINTS {
        return Err(Error::TooLarge {
            what: "pattern vertices for balancedness",
            size: n as u128,
            budget: MAX_PATTERN_POINTS as u128,
        });
    }
    if let Some(&x) = u.iter().find(|&&x| x as usize >= n) {
        return Err(invalid(format!("root vertex {x} outside the pattern")));
    }
    let um = u.iter().fold(0u32, |m, &x| m | 1 << x);
    let blocks: Vec<u32> = h.blocks().map(mask_of).collect();
    if blocks.iter().any(|&b| b & !um == 0) {
        return Err(invalid("a block of the pattern lies inside the root set"));
    }
    let vh = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    Ok((blocks, vh, um))
}

/// Balancedness `kappa(H, U)` of an extension type.
pub fn compute_kappa(h: &TripleSystem, u: &[u32]) -> Result<usize> {
    let (blocks, vh, um) = pattern_masks(h, u)?;
    Ok(kappa_masks(&blocks, vh, um))
}

/// Same quantity by testing the definition for `kappa = 0, 1, ...`.
pub fn kappa_by_definition(h: &TripleSystem, u: &[u32]) -> Result<usize> {
    let (blocks, vh, um) = pattern_masks(h, u)?;
    let ell = (vh & !um).count_ones() as usize;
    let balanced = |kappa: usize| {
        subsets(vh & !um).all(|extra| {
            let up = um | extra;
            blocks.len() - inside(&blocks, up) + kappa >= (vh & !up).count_ones() as usize
        })
    };
    Ok((0..=ell).find(|&k| balanced(k)).expect("every type is ell-balanced"))
}

/// Extensions with the roots pinned: `phi(u[idx]) = r[idx]`.
pub fn count_extensions_ordered(g: &TripleSystem, r: &[u32], ext: &ExtensionType) -> Result<u128> {
    if r.len() != ext.u.len() {
        return Err(invalid(format!("|R| = {} but |U| = {}", r.len(), ext.u.len())));
    }
    let mut rs = r.to_vec();
    rs.sort_unstable();
    rs.dedup();
    if rs.len() != r.len() || r.iter().any(|&x| x as usize >= g.n()) {
        return Err(invalid("R must be distinct vertices of G"));
    }
    let k = ext.h.n();
    let mut map = vec![u32::MAX; k];
    for (&x, &y) in ext.u.iter().zip(r) {
        map[x as usize] = y;
    }
    let order: Vec<u32> = (0..k as u32).filter(|x| !ext.u.contains(x)).collect();
    let blocks = ext.h.block_vec();
    // For each free vertex: the blocks it completes, and a block it can be
    // read off from (two other vertices mapped earlier).
    let position = |x: u32| -> usize {
        if ext.u.contains(&x) {
            0
        } else {
            1 + order.iter().position(|&y| y == x).unwrap()
        }
    };
    let mut completes: Vec<Vec<[u32; 3]>> = vec![Vec::new(); order.len()];
    let mut anchor: Vec<Option<(u32, u32)>> = vec![None; order.len()];
    for t in &blocks {
        let v = t.vertices();
        let last = v.iter().copied().max_by_key(|&x| position(x)).unwrap();
        let p = position(last);
        if p == 0 {
            continue;
        }
        completes[p - 1].push(v);
        let others: Vec<u32> = v.iter().copied().filter(|&x| x != last).collect();
        anchor[p - 1].get_or_insert((others[0], others[1]));
    }
    let mut third: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
    for t in g.blocks() {
        let [a, b, c] = t.vertices();
        for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
            third.entry((x, y)).or_default().push(z);
        }
    }
    let mut used = vec![false; g.n()];
    for &y in r {
        used[y as usize] = true;
    }
    let ctx = ExtCtx {
        g,
        order: &order,
        completes: &completes,
        anchor: &anchor,
        third: &third,
    };
    Ok(ctx.extend(0, &mut map, &mut used))
}

struct ExtCtx<'a> {
    g: &'a TripleSystem,
    order: &'a [u32],
    completes: &'a [Vec<[u32; 3]>],
    anchor: &'a [Option<(u32, u32)>],
    third: &'a BTreeMap<(u32, u32), Vec<u32>>,
}

impl ExtCtx<'_> {
    fn extend(&self, depth: usize, map: &mut [u32], used: &mut [bool]) -> u128 {
        if depth == self.order.len() {
            return 1;
        }
        let x = self.order[depth] as usize;
        let candidates: Vec<u32> = match self.anchor[depth] {
            Some((a, b)) => {
                let (ma, mb) = (map[a as usize], map[b as usize]);
                let key = (ma.min(mb), ma.max(mb));
                self.third.get(&key).cloned().unwrap_or_default()
            }
            None => (0..self.g.n() as u32).collect(),
        };
        let mut total = 0;
        for w in candidates {
            if used[w as usize] {
                continue;
            }
            map[x] = w;
            let ok = self.completes[depth].iter().all(|v| {
                let [a, b, c] = v.map(|y| map[y as usize]);
                self.g.contains(Triple::new(a, b, c))
            });
            if ok {
                used[w as usize] = true;
                total += self.extend(depth + 1, map, used);
                used[w as usize] = false;
            }
            map[x] = u32::MAX;
        }
        total
    }
}

/// Extensions at the root set `R` over all `|U|!` ways to match `U` with
/// `R`.
pub fn count_extensions(g: &TripleSystem, r: &[u32], ext: &ExtensionType) -> Result<u128> {
    let mut perm = r.to_vec();
    perm.sort_unstable();
    let mut total = count_extensions_ordered(g, &perm, ext)?;
    while next_permutation(&mut perm) {
        total += count_extensions_ordered(g, &perm, ext)?;
    }
    Ok(total)
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// For each available block `T*`, the number of dangerous configurations
/// at `t` whose remaining available block is `T*`, and whether one of them
/// is a diamond.
fn dangerous_by_available(state: &ProcessState, counter: &ConfigCounter, t: Triple) -> Result<BTreeMap<Triple, (u64, bool)>> {
    let mut out: BTreeMap<Triple, (u64, bool)> = BTreeMap::new();
    for d in counter.dangerous(state, t)? {
        let slot = out.entry(d.available).or_default();
        slot.0 += 1;
        slot.1 |= d.j == 4;
    }
    Ok(out)
}

/// `X_{T,double}`: unordered pairs of distinct dangerous configurations at
/// `t` (diamonds included) sharing their available block.
pub fn count_double(state: &ProcessState, counter: &ConfigCounter, t: Triple) -> Result<u64> {
    let by = dangerous_by_available(state, counter, t)?;
    Ok(by.values().map(|&(z, _)| z * z.saturating_sub(1) / 2).sum())
}

/// `X_{T1,T2}`: ordered pairs `(S1, S2)`, dangerous at `t1` and `t2`
/// respectively, not both diamonds, with the same available block.
pub fn count_pair(state: &ProcessState, counter: &ConfigCounter, t1: Triple, t2: Triple) -> Result<u64> {
    if t1 == t2 {
        return Err(invalid("count_pair needs distinct triples"));
    }
    let a = dangerous_by_available(state, counter, t1)?;
    let b = dangerous_by_available(state, counter, t2)?;
    let mut total = 0;
    for (t, &(z1, d1)) in &a {
        if let Some(&(z2, d2)) = b.get(t) {
            total += z1 * z2 - u64::from(d1 && d2);
        }
    }
    Ok(total)
}

/// Whether `t_star` threatens the configuration `s` at `t`: it is
/// available, differs from `t`, is not in exclusion with `t`, and equals or
/// is in exclusion with some other available block of `s`.
fn threatens(state: &ProcessState, t: Triple, t_threats: &[Triple], s: &[Triple], t_star: Triple) -> Result<bool> {
    if t_star == t || !state.is_available(t_star) || t_threats.binary_search(&t_star).is_ok() {
        return Ok(false);
    }
    for &tp in s {
        if tp == t || !state.is_available(tp) {
            continue;
        }
        if tp == t_star || state.threats_of(tp)?.binary_search(&t_star).is_ok() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Left and right side of: dangerous configurations at `t` on `j` points
/// threatened by `t_star` number at most `X_{t, t_star}`.
pub fn threat_pair_bound(state: &ProcessState, counter: &ConfigCounter, t: Triple, t_star: Triple, j: usize) -> Result<(u64, u64)> {
    let t_threats = state.threats_of(t)?;
    let mut lhs = 0;
    for s in counter.configurations(state, t, j, j - 4)? {
        if threatens(state, t, &t_threats, &s, t_star)? {
            lhs += 1;
        }
    }
    Ok((lhs, count_pair(state, counter, t, t_star)?))
}

/// Measured constant in
/// `|th_{S,T} - sum_{T' in S-T available} |threats(T')|| <= O(1) + sum X_{T',T''}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThreatSumReport {
    pub instances: u64,
    /// Largest `|th - sum| - sum X_{T',T''}` over all instances; the
    /// additive constant the inequality needs on this state.
    pub max_excess: i64,
}

/// Evaluates the threat-sum inequality for every configuration through
/// every triple in `triples` (all classes `6 <= j <= jmax`, `0 <= c <= j-4`).
pub fn threat_sum_constant(state: &ProcessState, counter: &ConfigCounter, triples: &[Triple]) -> Result<ThreatSumReport> {
    let mut report = ThreatSumReport {
        instances: 0,
        max_excess: i64::MIN,
    };
    let avail: Vec<Triple> = state.available().collect();
    for &t in triples {
        let t_threats = state.threats_of(t)?;
        for j in 6..=state.jmax() {
            for c in 0..=j - 4 {
                for s in counter.configurations(state, t, j, c)? {
                    let mut th = 0i64;
                    for &t_star in &avail {
                        if threatens(state, t, &t_threats, &s, t_star)? {
                            th += 1;
                        }
                    }
                    let open: Vec<Triple> = s.iter().copied().filter(|&x| state.is_available(x)).collect();
                    let mut sum = 0i64;
                    for &tp in open.iter().filter(|&&x| x != t) {
                        sum += state.threats_of(tp)?.len() as i64;
                    }
                    let mut pairs = 0i64;
                    for (a, &x) in open.iter().enumerate() {
                        for &y in &open[a + 1..] {
                            pairs += count_pair(state, counter, x, y)? as i64;
                        }
                    }
                    report.instances += 1;
                    report.max_excess = report.max_excess.max((th - sum).abs() - pairs);
                }
            }
        }
    }
    if report.instances == 0 {
        report.max_excess = 0;
    }
    Ok(report)
}

/// Outcome of one family of finite checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropCheck {
    pub name: String,
    pub instances: u64,
    pub failures: u64,
    /// Up to ten failing instances, described.
    pub examples: Vec<String>,
}

impl PropCheck {
    fn new(name: &str) -> PropCheck {
        PropCheck {
            name: name.into(),
            instances: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 10 {
                self.examples.push(describe());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancednessReport {
    /// Vertex cap `2 * jmax` for glued pairs.
    pub m: usize,
    pub glued_pairs: u64,
    pub distinct_shared_gluings: u64,
    pub checks: Vec<PropCheck>,
}

impl BalancednessReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }

    /// One line per check: `<name> instances=<n> counterexamples=<f> PASS|FAIL`.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.failures == 0 { "PASS" } else { "FAIL" };
            writeln!(out, "{} instances={} counterexamples={} {verdict}", c.name, c.instances, c.failures).unwrap();
            for e in &c.examples {
                writeln!(out, "  {e}").unwrap();
            }
        }
        out
    }
}

fn entry_masks(e: &CatalogEntry) -> Vec<u32> {
    e.blocks().into_iter().map(mask_of).collect()
}

fn describe(blocks: &[u32]) -> String {
    let parts: Vec<String> = blocks
        .iter()
        .map(|b| (0..32).filter(|i| b >> i & 1 == 1).map(|i| i.to_string()).collect::<Vec<_>>().join(""))
        .collect();
    parts.join(",")
}

/// Checks, over every catalog configuration and every gluing of two of them
/// (at most `2 * jmax` vertices), the inequalities that make their unions
/// well behaved extension types:
///
/// * `simple_erdos_extension`: dropping a block `T'` from `S`, any `U` with
///   `|U| >= 4` leaves at least `|V(S) \ U|` blocks outside `U`;
/// * `erdos_extension_analysis`: for a spanning subconfiguration `S'` with
///   `c` blocks and `a` blocks of `S - S'` inside `U`, the type
///   `(S' - S'[U], U)` is `max(j-3-c-a, 0)`-balanced;
/// * `overlap_edge_count`: distinct `S1, S2` sharing `>= 4` points have
///   `|S1 u S2| >= |V1 u V2| - 1`, and sharing exactly 3 points
///   `>= |V1 u V2| - 2`;
/// * `shared_block_edge_count`: with `T'` in both and `H = (S1 u S2) - T'`,
///   every `U'` meeting `V1` in `>= 4` points and with
///   `|(U' u V1) n V2| >= 4` has `|H - H[U']| >= |V(H) \ U'|`;
/// * `double_extension_balanced`: `T1 in S1`, `T2 in S2`, shared `T'`, all
///   distinct, not both diamonds, `H = (S1 u S2) - {T1,T2,T'}`: if
///   `H[T1 u T2]` is empty then `(H, T1 u T2)` is 0-balanced;
/// * `butterfly_balanced`: `T in S1`, shared `T' != T`, `|V1 n V2| >= 4`:
///   `((S1 u S2) - {T, T'}, T)` is 0-balanced.
pub fn verify_balancedness_props(catalog: &ErdosCatalog) -> BalancednessReport {
    let m = 2 * catalog.jmax();
    let mut simple = PropCheck::new("simple_erdos_extension");
    let mut analysis = PropCheck::new("erdos_extension_analysis");
    let mut overlap = PropCheck::new("overlap_edge_count");
    let mut shared = PropCheck::new("shared_block_edge_count");
    let mut double = PropCheck::new("double_extension_balanced");
    let mut butterfly = PropCheck::new("butterfly_balanced");
    let entries = catalog.entries();

    for e in entries {
        let s = entry_masks(e);
        let j = e.j();
        let vs = (1u32 << j) - 1;
        for (drop, _) in s.iter().enumerate() {
            let minus: Vec<u32> = s.iter().enumerate().filter(|&(x, _)| x != drop).map(|(_, &b)| b).collect();
            for u in subsets(vs).filter(|u| u.count_ones() >= 4) {
                let out = minus.len() - inside(&minus, u);
                simple.record(out >= (vs & !u).count_ones() as usize, || {
                    format!("S={} T'={} U={u:b}", describe(&s), describe(&[s[drop]]))
                });
            }
        }
        for sub in 1u32..(1 << s.len()) {
            let sp: Vec<u32> = (0..s.len()).filter(|x| sub >> x & 1 == 1).map(|x| s[x]).collect();
            if sp.iter().fold(0, |a, &b| a | b) != vs {
                continue;
            }
            let rest: Vec<u32> = (0..s.len()).filter(|x| sub >> x & 1 == 0).map(|x| s[x]).collect();
            let c = sp.len() as i64;
            for u in subsets(vs).filter(|u| u.count_ones() >= 4) {
                let a = inside(&rest, u) as i64;
                let kappa = (j as i64 - 3 - c - a).max(0) as usize;
                let h: Vec<u32> = sp.iter().copied().filter(|&b| b & !u != 0).collect();
                analysis.record(kappa_masks(&h, vs, u) <= kappa, || {
                    format!("S={} S'={} U={u:b}", describe(&s), describe(&sp))
                });
            }
        }
    }

    let mut glued_pairs = 0u64;
    let mut seen: HashSet<Vec<ColoredBlock>> = HashSet::new();
    for e1 in entries {
        for e2 in entries {
            let s1 = entry_masks(e1);
            let s2 = entry_masks(e2);
            let (j1, j2) = (e1.j(), e2.j());
            // All partial identifications of S2's points with S1's.
            let mut map = vec![u32::MAX; j2];
            let mut used = 0u32;
            all_gluings(j1, j2, 0, &mut map, &mut used, &mut |map| {
                let t = map.iter().filter(|&&x| (x as usize) < j1).count();
                let g2 = glue(&s2, map);
                glued_pairs += 1;
                if same_set(&s1, &g2) {
                    return;
                }
                let union = union_len(&s1, &g2);
                let points = j1 + j2 - t;
                if t >= 4 {
                    overlap.record(union + 1 >= points, || format!("S1={} S2={}", describe(&s1), describe(&g2)));
                } else if t == 3 {
                    overlap.record(union + 2 >= points, || format!("S1={} S2={}", describe(&s1), describe(&g2)));
                }
            });
            // Gluings with a shared block, up to isomorphism.
            for o1 in e1.slot_orbits() {
                for o2 in e2.slot_orbits() {
                    let (b1, b2) = (e1.blocks()[o1[0]].vertices(), e2.blocks()[o2[0]].vertices());
                    for perm in PERMS {
                        let mut map = vec![u32::MAX; j2];
                        let mut used = 0u32;
                        for k in 0..3 {
                            map[b2[k] as usize] = b1[perm[k]];
                            used |= 1 << b1[perm[k]];
                        }
                        all_gluings(j1, j2, 0, &mut map, &mut used, &mut |map| {
                            let g2 = glue(&s2, map);
                            if same_set(&s1, &g2) {
                                return;
                            }
                            let nv = j1 + map.iter().filter(|&&x| x as usize >= j1).count();
                            if nv > m || !seen.insert(certificate(nv, &s1, &g2)) {
                                return;
                            }
                            check_shared(&s1, &g2, nv, &mut shared, &mut double, &mut butterfly);
                        });
                    }
                }
            }
        }
    }
    BalancednessReport {
        m,
        glued_pairs,
        distinct_shared_gluings: seen.len() as u64,
        checks: vec![simple, analysis, overlap, shared, double, butterfly],
    }
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Extends `map` (S2 vertex -> glued vertex) over unmapped S2 vertices in
/// order: each goes to an unused S1 vertex or to a fresh vertex. Fresh
/// vertices are numbered `j1, j1+1, ...` in S2 order at the end.
fn all_gluings(j1: usize, j2: usize, x: usize, map: &mut Vec<u32>, used: &mut u32, visit: &mut dyn FnMut(&[u32])) {
    if x == j2 {
        let mut fresh = j1 as u32;
        let done: Vec<u32> = map
            .iter()
            .map(|&y| {
                if y == u32::MAX {
                    fresh += 1;
                    fresh - 1
                } else {
                    y
                }
            })
            .collect();
        visit(&done);
        return;
    }
    if map[x] != u32::MAX {
        return all_gluings(j1, j2, x + 1, map, used, visit);
    }
    all_gluings(j1, j2, x + 1, map, used, visit);
    for y in 0..j1 as u32 {
        if *used >> y & 1 == 0 {
            map[x] = y;
            *used |= 1 << y;
            all_gluings(j1, j2, x + 1, map, used, visit);
            *used &= !(1 << y);
            map[x] = u32::MAX;
        }
    }
}

fn glue(s2: &[u32], map: &[u32]) -> Vec<u32> {
    s2.iter()
        .map(|&b| (0..32).filter(|i| b >> i & 1 == 1).fold(0u32, |m, i| m | 1 << map[i]))
        .collect()
}

fn same_set(a: &[u32], b: &[u32]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

fn union_len(a: &[u32], b: &[u32]) -> usize {
    a.len() + b.iter().filter(|x| !a.contains(x)).count()
}

/// Canonical form with blocks colored by membership (S1 only, S2 only,
/// both).
fn certificate(nv: usize, s1: &[u32], s2: &[u32]) -> Vec<ColoredBlock> {
    let as_verts = |b: u32| {
        let v: Vec<u8> = (0..32u8).filter(|i| b >> i & 1 == 1).collect();
        [v[0], v[1], v[2]]
    };
    let mut blocks: Vec<ColoredBlock> = Vec::new();
    for &b in s1 {
        let color = if s2.contains(&b) { 3 } else { 1 };
        blocks.push((color, as_verts(b)));
    }
    for &b in s2.iter().filter(|b| !s1.contains(b)) {
        blocks.push((2, as_verts(b)));
    }
    canon::canonize(nv, &vec![0; nv], &blocks).cert
}

fn check_shared(s1: &[u32], s2: &[u32], nv: usize, shared: &mut PropCheck, double: &mut PropCheck, butterfly: &mut PropCheck) {
    let v1 = s1.iter().fold(0, |a, &b| a | b);
    let v2 = s2.iter().fold(0, |a, &b| a | b);
    let vh = v1 | v2;
    debug_assert_eq!(vh.count_ones() as usize, nv);
    let mut union: Vec<u32> = s1.to_vec();
    union.extend(s2.iter().filter(|b| !s1.contains(b)));
    let common: Vec<u32> = s1.iter().copied().filter(|b| s2.contains(b)).collect();
    let both_diamonds = s1.len() == 2 && s2.len() == 2;
    let without = |drop: &[u32]| -> Vec<u32> { union.iter().copied().filter(|b| !drop.contains(b)).collect() };
    let show = || format!("S1={} S2={}", describe(s1), describe(s2));

    for &tp in &common {
        let h = without(&[tp]);
        let mut ok = true;
        for up in subsets(vh) {
            if (up & v1).count_ones() < 4 || ((up | v1) & v2).count_ones() < 4 {
                continue;
            }
            if h.len() - inside(&h, up) < (vh & !up).count_ones() as usize {
                ok = false;
                break;
            }
        }
        shared.record(ok, || format!("{} T'={}", show(), describe(&[tp])));

        for &t1 in s1.iter().filter(|&&b| b != tp) {
            for &t2 in s2.iter().filter(|&&b| b != tp && b != t1) {
                if both_diamonds {
                    continue;
                }
                let h = without(&[t1, t2, tp]);
                let u = t1 | t2;
                if inside(&h, u) > 0 {
                    continue;
                }
                double.record(kappa_masks(&h, vh, u) == 0, || {
                    format!("{} T1={} T2={} T'={}", show(), describe(&[t1]), describe(&[t2]), describe(&[tp]))
                });
            }
        }
        if (v1 & v2).count_ones() >= 4 {
            for &t in s1.iter().filter(|&&b| b != tp) {
                let h = without(&[t, tp]);
                butterfly.record(kappa_masks(&h, vh, t) == 0, || {
                    format!("{} T={} T'={}", show(), describe(&[t]), describe(&[tp]))
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::{enumerate_erdos, named_configuration};
    use std::sync::Arc;

    #[test]
    fn kappa_basics() {
        let empty = TripleSystem::new(5);
        assert_eq!(compute_kappa(&empty, &[0, 1]).unwrap(), 3);
        let pasch = named_configuration("pasch").unwrap();
        // (Pasch minus a block, that block) is 0-balanced.
        let mut h = pasch.clone();
        h.remove(Triple::new(0, 1, 2));
        assert_eq!(compute_kappa(&h, &[0, 1, 2]).unwrap(), 0);
        assert_eq!(kappa_by_definition(&h, &[0, 1, 2]).unwrap(), 0);
        assert!(compute_kappa(&pasch, &[0, 1, 2]).is_err());
        assert!(compute_kappa(&pasch, &[9]).is_err());
        let ext = ExtensionType::new(h, vec![2, 0, 1]).unwrap();
        assert_eq!((ext.kappa(), ext.ell(), ext.u()), (0, 3, &[0, 1, 2][..]));
    }

    #[test]
    fn extension_counts() {
        // One free vertex joined to the root pair.
        let h = TripleSystem::from_digits(3, "012").unwrap();
        let ext = ExtensionType::new(h, vec![0, 1]).unwrap();
        let g = TripleSystem::from_digits(6, "012,013,234").unwrap();
        assert_eq!(count_extensions_ordered(&g, &[0, 1], &ext).unwrap(), 2);
        assert_eq!(count_extensions(&g, &[0, 1], &ext).unwrap(), 4);
        assert_eq!(count_extensions(&g, &[2, 3], &ext).unwrap(), 2);
        let free = ExtensionType::new(TripleSystem::new(4), vec![0]).unwrap();
        assert_eq!(count_extensions(&g, &[5], &free).unwrap(), 5 * 4 * 3);
        assert!(count_extensions(&g, &[0], &ext).is_err());
    }

    #[test]
    fn double_and_pair_counts_start_at_zero() {
        let cat = Arc::new(enumerate_erdos(8).unwrap());
        let counter = ConfigCounter::new(&cat);
        let state = ProcessState::new(10, 6, 0, cat.clone()).unwrap();
        let root = Triple::new(0, 1, 2);
        assert_eq!(count_double(&state, &counter, root).unwrap(), 0);
        assert_eq!(count_pair(&state, &counter, root, Triple::new(3, 4, 5)).unwrap(), 0);
        // Diamonds on a shared pair still give no pair count.
        assert_eq!(count_pair(&state, &counter, root, Triple::new(0, 1, 3)).unwrap(), 0);
        assert!(count_pair(&state, &counter, root, root).is_err());
    }

    #[test]
    fn finite_checks_pass_for_pasch_free() {
        let cat = enumerate_erdos(6).unwrap();
        let report = verify_balancedness_props(&cat);
        assert!(report.ok(), "{}", report.to_lines());
        assert!(report.checks.iter().all(|c| c.instances > 0), "{}", report.to_lines());
    }

    #[test]
    fn finite_checks_flag_a_non_minimal_configuration() {
        // The mia is forbidden but contains a Pasch, so dropping one block
        // can leave too many blocks inside a 6-set.
        let mia = named_configuration("mia").unwrap();
        let blocks: Vec<[u8; 3]> = mia.blocks().map(|t| t.vertices().map(|v| v as u8)).collect();
        let mut lists = vec![Vec::new(); 8];
        lists[7].push(blocks);
        let fake = ErdosCatalog::from_canonical_lists(7, lists).unwrap();
        let report = verify_balancedness_props(&fake);
        assert!(!report.ok());
        assert!(report.checks[0].failures > 0);
    }
}
