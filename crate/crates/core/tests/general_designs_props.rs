use std::collections::BTreeSet;

use proptest::prelude::*;
use sts_core::general_designs::*;
use sts_core::sparse_check::is_partial_steiner;
use sts_core::triple::binom;
use sts_core::{Triple, TripleSystem};

/// Bose construction of an STS(6t+3) on `Z_{2t+1} x Z_3`.
fn bose(t: u32) -> QSystem {
    let m = 2 * t + 1;
    let pt = |x: u32, i: u32| 3 * x + i % 3;
    let half = (m + 1) / 2;
    let mut blocks = Vec::new();
    for x in 0..m {
        blocks.push(vec![pt(x, 0), pt(x, 1), pt(x, 2)]);
    }
    for x in 0..m {
        for y in x + 1..m {
            let z = ((x + y) * half) % m;
            for i in 0..3 {
                blocks.push(vec![pt(x, i), pt(y, i), pt(z, i + 1)]);
            }
        }
    }
    QSystem::from_blocks(3 * m as usize, 3, 2, blocks).unwrap()
}

fn fano() -> QSystem {
    let b = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
    QSystem::from_blocks(7, 3, 2, b.iter().map(|x| x.to_vec())).unwrap()
}

fn check_extraction(s: &QSystem) {
    for j in s.q() + 1..=s.n() {
        let e = extract_configuration(s, j).unwrap();
        assert_eq!(e.blocks.len(), kappa_qr(s.q(), s.r(), j).unwrap(), "j={j}");
        assert!(e.support.len() <= j);
        assert_eq!(e.points.len(), j);
        assert_eq!(e.padding, j - e.support.len());
        let sub = QSystem::from_blocks(s.n(), s.q(), s.r(), e.blocks.clone()).unwrap();
        assert_eq!(sub.len(), e.blocks.len(), "extracted blocks are distinct");
        for b in &e.blocks {
            assert!(s.blocks().any(|x| x == b));
            assert!(b.iter().all(|x| e.points.contains(x)));
        }
    }
}

#[test]
fn admissible_triple_systems_are_one_or_three_mod_six() {
    for n in 3..=1000 {
        assert_eq!(admissible(n, 3, 2).unwrap(), n % 6 == 1 || n % 6 == 3, "n={n}");
    }
}

#[test]
fn extraction_on_complete_systems() {
    check_extraction(&fano());
    for t in 1..=3 {
        let s = bose(t);
        assert!(s.is_complete());
        check_extraction(&s);
    }
}

#[test]
fn unavoidable_count_inequality() {
    for q in 3..=8usize {
        for r in 2..q {
            for x in 1..=20usize {
                let lhs = x as u128 * binom(q as u64, r as u64);
                let rhs = binom(((x - 1) * (q - r) + q + 1) as u64, r as u64);
                assert!(lhs < rhs, "q={q} r={r} x={x}");
            }
        }
    }
}

#[test]
fn planted_fano_pieces_are_found_by_both_searches() {
    let blocks: Vec<Vec<u32>> = fano().blocks().cloned().collect();
    let mut violating = 0;
    for skip in 0..7 {
        let s = QSystem::from_blocks(8, 3, 2, blocks.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, b)| b.clone())).unwrap();
        let scan = is_weakly_k_sparse(&s, 6).unwrap();
        let fam = is_weakly_k_sparse_with_budget(&s, 6, 0).unwrap();
        assert_eq!(scan.ok, fam.ok);
        violating += usize::from(!scan.ok);
    }
    assert_eq!(violating, 7);
}

#[test]
fn pipeline_at_forty_points() {
    let (s, rep) = build_weak_sparse(40, 4, 2, 3, 0.3, 0.5, 1).unwrap();
    assert!(s.is_partial_steiner());
    let weak = is_weakly_k_sparse(&s, 3).unwrap();
    assert_eq!(weak.method, WeakMethod::VertexScan);
    assert!(weak.ok);
    assert!(s.len() as u128 * 6 <= binom(40, 2));
    assert!(rep.sparsify.blocks >= s.len());
}

/// Weak k-sparseness for triples, straight from the definition: no vertex
/// set `W` with `4 <= |W| <= k + 1` holds `|W| - 1` blocks.
fn weak_triples_brute(s: &TripleSystem, k: usize) -> bool {
    let n = s.n() as u32;
    let blocks = s.block_vec();
    let mut w: Vec<u32> = Vec::new();
    fn rec(n: u32, k: usize, blocks: &[Triple], w: &mut Vec<u32>, from: u32) -> bool {
        if w.len() >= 4 {
            let inside = blocks.iter().filter(|t| t.vertices().iter().all(|v| w.contains(v))).count();
            if inside + 1 >= w.len() {
                return false;
            }
        }
        if w.len() == k + 1 {
            return true;
        }
        for v in from..n {
            w.push(v);
            let ok = rec(n, k, blocks, w, v + 1);
            w.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    rec(n, k, &blocks, &mut w, 0)
}

#[test]
fn triple_pipeline_agrees_with_triple_checks() {
    for seed in 0..3 {
        let k = 4;
        let theta = theta_max(3, 2, k).unwrap();
        let (s, _) = build_weak_sparse(18, 3, 2, k, 0.3, theta, seed).unwrap();
        let ts = TripleSystem::from_blocks(18, s.blocks().map(|b| Triple::new(b[0], b[1], b[2]))).unwrap();
        assert!(is_partial_steiner(&ts));
        assert!(weak_triples_brute(&ts, k));
        assert!(is_weakly_k_sparse(&s, k).unwrap().ok);
    }
    // A near-complete system is not weakly sparse at large k.
    let mut fano_minus: Vec<Triple> = vec![(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6)]
        .into_iter()
        .map(|(a, b, c)| Triple::new(a, b, c))
        .collect();
    let ts = TripleSystem::from_blocks(7, fano_minus.drain(..)).unwrap();
    assert!(!weak_triples_brute(&ts, 6));
    assert!(weak_triples_brute(&ts, 5));
}

fn random_partial(n: usize, q: usize, r: usize, picks: Vec<Vec<u32>>) -> QSystem {
    let mut kept: Vec<Vec<u32>> = Vec::new();
    for mut b in picks {
        b.sort_unstable();
        b.dedup();
        if b.len() != q || kept.iter().any(|x| x.iter().filter(|v| b.contains(v)).count() >= r) {
            continue;
        }
        kept.push(b);
    }
    QSystem::from_blocks(n, q, r, kept).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kappa_shifts_by_one(q in 3usize..10, r in 2usize..9, j in 3usize..60) {
        prop_assume!(r < q && j > r);
        let k0 = kappa_qr(q, r, j).unwrap();
        prop_assert_eq!(kappa_qr(q, r, j + (q - r)).unwrap(), k0 + 1);
        prop_assert!(kappa_qr(q, r, j + 1).unwrap() >= k0);
    }

    #[test]
    fn block_families_agree_with_vertex_scan(
        planted in proptest::collection::vec(proptest::bool::ANY, 7),
        picks in proptest::collection::vec(proptest::collection::vec(0u32..8, 3), 1..20),
        k in 5usize..8,
    ) {
        let fano: Vec<Vec<u32>> = fano().blocks().cloned().collect();
        let first = fano.into_iter().zip(planted).filter(|(_, keep)| *keep).map(|(b, _)| b);
        let s = random_partial(8, 3, 2, first.chain(picks).collect());
        let scan = is_weakly_k_sparse(&s, k).unwrap();
        let fam = is_weakly_k_sparse_with_budget(&s, k, 0).unwrap();
        prop_assert_eq!(scan.ok, fam.ok);
        for rep in [scan, fam] {
            if let Some((w, blocks)) = rep.witness {
                let need = kappa_qr(3, 2, w.len()).unwrap() + 2;
                prop_assert!(blocks.len() >= need);
                prop_assert!(blocks.iter().all(|b| b.iter().all(|x| w.contains(x))));
            }
        }
    }

    #[test]
    fn partial_four_two_systems_are_weakly_three_sparse(
        picks in proptest::collection::vec(proptest::collection::vec(0u32..13, 4), 1..20),
    ) {
        let s = random_partial(13, 4, 2, picks);
        prop_assert!(is_weakly_k_sparse(&s, 3).unwrap().ok);
    }

    #[test]
    fn pipeline_output_is_partial_and_bounded(seed in 0u64..1000, n in 14usize..24) {
        let (s, rep) = build_weak_sparse(n, 4, 2, 3, 0.3, 0.45, seed).unwrap();
        prop_assert!(s.is_partial_steiner());
        prop_assert!(s.len() as u128 * 6 <= binom(n as u64, 2));
        prop_assert!(rep.coverage <= 1.0);
        let set: BTreeSet<_> = s.blocks().collect();
        prop_assert_eq!(set.len(), s.len());
    }
}
