//! Definition-level verification of linearity and k-sparseness.
//!
//! The exhaustive check never consults the configuration catalog: it
//! verifies directly that every vertex set `W` with `4 <= |W| <= k + 2`
//! spans at most `|W| - 3` blocks.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::rng_from_seed;
use crate::triple::{binom, pair_rank, Triple, TripleSystem};

/// Default cap on the number of vertex subsets scanned exhaustively.
pub const DEFAULT_SUBSET_BUDGET: u128 = 2_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub vertices: Vec<u32>,
    pub blocks: Vec<Triple>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsenessReport {
    pub k_checked: usize,
    pub ok: bool,
    /// A vertex set `W` with `4 <= |W| <= k + 2` spanning at least
    /// `|W| - 2` blocks.
    pub witness: Option<Witness>,
}

/// Whether any two blocks share two or more vertices.
pub fn is_linear(s: &TripleSystem) -> bool {
    let n = s.n();
    let mut seen = vec![false; n * n.saturating_sub(1) / 2];
    for t in s.blocks() {
        for e in t.pairs() {
            let r = e.rank();
            if seen[r] {
                return false;
            }
            seen[r] = true;
        }
    }
    true
}

/// Every pair lies in at most one block. Same thing as [`is_linear`] for
/// 3-graphs; counted independently here by pair multiplicities.
pub fn is_partial_steiner(s: &TripleSystem) -> bool {
    let n = s.n();
    let mut count = vec![0u8; n * n.saturating_sub(1) / 2];
    for t in s.blocks() {
        let [a, b, c] = t.vertices();
        for (x, y) in [(a, b), (a, c), (b, c)] {
            count[pair_rank(x, y)] += 1;
        }
    }
    count.iter().all(|&c| c <= 1)
}

/// Exhaustive k-sparseness check with the default subset budget.
pub fn is_k_sparse(s: &TripleSystem, k: usize) -> Result<SparsenessReport> {
    is_k_sparse_with_budget(s, k, DEFAULT_SUBSET_BUDGET)
}

/// Scans all vertex sets of size at most `k + 2` in lexicographic order and
/// reports the first overfull one. Refuses when `C(n, k+2)` exceeds
/// `budget`.
pub fn is_k_sparse_with_budget(s: &TripleSystem, k: usize, budget: u128) -> Result<SparsenessReport> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    let n = s.n();
    let size = binom(n as u64, (k + 2) as u64);
    if size > budget {
        return Err(Error::TooLarge {
            what: "vertex subsets for exhaustive sparseness check",
            size,
            budget,
        });
    }
    // Blocks indexed by their largest vertex; W grows in increasing order,
    // so a block enters W exactly when its largest vertex does.
    let mut by_max: Vec<Vec<[u32; 2]>> = vec![Vec::new(); n];
    for t in s.blocks() {
        let [a, b, c] = t.vertices();
        by_max[c as usize].push([a, b]);
    }
    let mut in_w = vec![false; n];
    let mut w: Vec<u32> = Vec::new();
    let witness = scan(&by_max, &mut in_w, &mut w, 0, 0, k + 2).map(|vertices| {
        let blocks = s.induced(&vertices);
        Witness { vertices, blocks }
    });
    Ok(SparsenessReport {
        k_checked: k,
        ok: witness.is_none(),
        witness,
    })
}

fn scan(by_max: &[Vec<[u32; 2]>], in_w: &mut [bool], w: &mut Vec<u32>, from: usize, inside: usize, max: usize) -> Option<Vec<u32>> {
    for v in from..by_max.len() {
        let added = by_max[v].iter().filter(|[a, b]| in_w[*a as usize] && in_w[*b as usize]).count();
        w.push(v as u32);
        in_w[v] = true;
        let total = inside + added;
        if w.len() >= 4 && total + 3 > w.len() {
            let found = w.clone();
            w.pop();
            in_w[v] = false;
            return Some(found);
        }
        if w.len() < max {
            if let Some(found) = scan(by_max, in_w, w, v + 1, total, max) {
                w.pop();
                in_w[v] = false;
                return Some(found);
            }
        }
        w.pop();
        in_w[v] = false;
    }
    None
}

/// Checks every vertex subset of `pts` (at least four points) for overfull
/// sets. `pts` must be small.
fn overfull_subset(s_blocks: &[Triple], pts: &[u32]) -> Option<Vec<u32>> {
    let mut inside: Vec<u32> = s_blocks
        .iter()
        .filter(|t| t.vertices().iter().all(|v| pts.contains(v)))
        .map(|t| t.vertices().iter().fold(0u32, |m, v| m | 1 << pts.iter().position(|p| p == v).unwrap()))
        .collect();
    // Callers gather blocks vertex by vertex, so the same block can repeat.
    inside.sort_unstable();
    inside.dedup();
    let full = (1u32 << pts.len()) - 1;
    let mut masks: Vec<u32> = (0..=full).filter(|m| m.count_ones() >= 4).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
        .into_iter()
        .find(|&m| inside.iter().filter(|&&b| b & !m == 0).count() + 3 > m.count_ones() as usize)
        .map(|m| (0..pts.len()).filter(|i| m >> i & 1 == 1).map(|i| pts[i]).collect())
}

/// Statistical stand-in for [`is_k_sparse`] on large systems.
///
/// Checks `samples` uniformly random `(k+2)`-sets (all their subsets), and
/// `samples` anchored local searches: start from a random block and a
/// random block meeting it, then repeatedly add every block with two points
/// inside the current span, or failing that a random block meeting it,
/// while the span stays within `k + 2` points. Every subset of each span is
/// checked. `ok = true` is evidence, not proof.
pub fn sampled_sparseness(s: &TripleSystem, k: usize, samples: usize, seed: u64) -> Result<SparsenessReport> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    let n = s.n();
    let max = k + 2;
    let blocks = s.block_vec();
    let mut rng = rng_from_seed(seed);
    let report = |vertices: Vec<u32>| SparsenessReport {
        k_checked: k,
        ok: false,
        witness: Some(Witness {
            blocks: s.induced(&vertices),
            vertices,
        }),
    };
    let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (bi, t) in blocks.iter().enumerate() {
        for v in t.vertices() {
            at_vertex[v as usize].push(bi);
        }
    }
    if n >= max {
        let all: Vec<u32> = (0..n as u32).collect();
        for _ in 0..samples {
            let mut w: Vec<u32> = all.choose_multiple(&mut rng, max).copied().collect();
            w.sort_unstable();
            let local: Vec<Triple> = w
                .iter()
                .flat_map(|&v| at_vertex[v as usize].iter().map(|&bi| blocks[bi]))
                .collect();
            if let Some(found) = overfull_subset(&local, &w) {
                return Ok(report(found));
            }
        }
    }
    if !blocks.is_empty() {
        for _ in 0..samples {
            let first = blocks[rng.gen_range(0..blocks.len())];
            let mut span: Vec<u32> = first.vertices().to_vec();
            let mut members = vec![first];
            loop {
                let closure: Vec<Triple> = span
                    .iter()
                    .flat_map(|&v| at_vertex[v as usize].iter().map(|&bi| blocks[bi]))
                    .filter(|t| !members.contains(t) && t.vertices().iter().filter(|v| span.contains(v)).count() >= 2)
                    .collect();
                let next = if let Some(&t) = closure.first() {
                    t
                } else {
                    let touching: Vec<Triple> = span
                        .iter()
                        .flat_map(|&v| at_vertex[v as usize].iter().map(|&bi| blocks[bi]))
                        .filter(|t| !members.contains(t))
                        .collect();
                    match touching.choose(&mut rng) {
                        Some(&t) => t,
                        None => break,
                    }
                };
                let mut grown = span.clone();
                grown.extend(next.vertices());
                grown.sort_unstable();
                grown.dedup();
                if grown.len() > max {
                    break;
                }
                span = grown;
                members.push(next);
                let local: Vec<Triple> = span
                    .iter()
                    .flat_map(|&v| at_vertex[v as usize].iter().map(|&bi| blocks[bi]))
                    .collect();
                if let Some(found) = overfull_subset(&local, &span) {
                    return Ok(report(found));
                }
            }
        }
    }
    Ok(SparsenessReport {
        k_checked: k,
        ok: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::named_configuration;

    #[test]
    fn linearity_examples() {
        let diamond = named_configuration("diamond").unwrap();
        let pasch = named_configuration("pasch").unwrap();
        let fano = named_configuration("fano").unwrap();
        assert!(!is_linear(&diamond) && !is_partial_steiner(&diamond));
        assert!(is_linear(&pasch) && is_partial_steiner(&pasch));
        assert!(is_linear(&fano) && is_partial_steiner(&fano));
        assert!(is_linear(&TripleSystem::new(5)));
    }

    #[test]
    fn sampling_counts_each_block_once() {
        let one = TripleSystem::from_blocks(4, [Triple::new(0, 1, 2)]).unwrap();
        assert!(sampled_sparseness(&one, 2, 50, 0).unwrap().ok);
        let fano = named_configuration("fano").unwrap();
        let r = sampled_sparseness(&fano, 4, 200, 1).unwrap();
        assert_eq!(r.ok, is_k_sparse(&fano, 4).unwrap().ok);
    }

    #[test]
    fn pasch_is_not_four_sparse() {
        let pasch = named_configuration("pasch").unwrap();
        let r = is_k_sparse(&pasch, 4).unwrap();
        assert!(!r.ok);
        let w = r.witness.unwrap();
        assert_eq!(w.vertices, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(w.blocks.len(), 4);
        assert!(is_k_sparse(&pasch, 3).unwrap().ok);
    }

    #[test]
    fn three_blocks_on_six_points_are_fine() {
        let s = TripleSystem::from_digits(6, "012,034,135").unwrap();
        assert!(is_k_sparse(&s, 4).unwrap().ok);
    }

    #[test]
    fn budget_guard() {
        let s = TripleSystem::new(200);
        assert!(matches!(is_k_sparse_with_budget(&s, 6, 1000), Err(Error::TooLarge { .. })));
        assert!(is_k_sparse(&s, 1).is_err());
    }

    #[test]
    fn sampled_finds_planted_pasch() {
        let mut s = TripleSystem::from_digits(10, "012,034,135,245").unwrap();
        s.insert(Triple::new(6, 7, 8)).unwrap();
        let r = sampled_sparseness(&s, 4, 50, 1).unwrap();
        assert!(!r.ok);
        assert!(sampled_sparseness(&TripleSystem::new(30), 4, 10, 1).unwrap().ok);
    }
}
