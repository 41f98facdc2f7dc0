use proptest::prelude::*;
use std::sync::OnceLock;

use sts_core::configs::{canonical_form, enumerate_erdos, ErdosCatalog};
use sts_core::sparse_check::{is_k_sparse, is_linear, sampled_sparseness};
use sts_core::{Triple, TripleSystem};

fn catalog() -> &'static ErdosCatalog {
    static CAT: OnceLock<ErdosCatalog> = OnceLock::new();
    CAT.get_or_init(|| enumerate_erdos(8).unwrap())
}

fn system() -> impl Strategy<Value = TripleSystem> {
    (6usize..=10).prop_flat_map(|n| {
        let triple = (0..n as u32, 0..n as u32, 0..n as u32)
            .prop_filter("distinct", |(a, b, c)| a != b && b != c && a != c)
            .prop_map(|(a, b, c)| Triple::new(a, b, c));
        prop::collection::vec(triple, 0..12).prop_map(move |ts| TripleSystem::from_blocks(n, ts).unwrap())
    })
}

/// Looks for a catalog configuration on at most `k + 2` points among the
/// block subsets of `s`.
fn has_catalog_embedding(s: &TripleSystem, k: usize) -> bool {
    let blocks = s.block_vec();
    let b = blocks.len();
    for mask in 1u32..(1 << b) {
        let size = mask.count_ones() as usize;
        if !(2..=k).contains(&size) {
            continue;
        }
        let sub: Vec<Triple> = (0..b).filter(|i| mask >> i & 1 == 1).map(|i| blocks[i]).collect();
        let compact = TripleSystem::compact(&sub);
        if compact.n() != size + 2 {
            continue;
        }
        let form = canonical_form(&compact).unwrap().system.block_vec();
        if catalog().entries_for(size + 2).any(|e| e.blocks() == form) {
            return true;
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sampling_is_sound(s in system(), k in 2usize..=6, seed in 0u64..100) {
        let sampled = sampled_sparseness(&s, k, 40, seed).unwrap();
        if let Some(w) = &sampled.witness {
            let size = w.vertices.len();
            prop_assert!((4..=k + 2).contains(&size));
            prop_assert_eq!(w.blocks.len(), s.induced(&w.vertices).len());
            prop_assert!(w.blocks.len() + 2 >= size);
        }
        if is_k_sparse(&s, k).unwrap().ok {
            prop_assert!(sampled.ok);
        }
    }

    #[test]
    fn sparse_implies_linear(s in system(), k in 2usize..=6) {
        if is_k_sparse(&s, k).unwrap().ok {
            prop_assert!(is_linear(&s));
        }
    }

    #[test]
    fn sparseness_is_monotone_in_k(s in system(), k in 2usize..=6) {
        if is_k_sparse(&s, k).unwrap().ok {
            for smaller in 2..k {
                prop_assert!(is_k_sparse(&s, smaller).unwrap().ok);
            }
        }
    }

    #[test]
    fn removing_blocks_keeps_sparseness(s in system(), k in 2usize..=6, drop in any::<prop::sample::Index>()) {
        if is_k_sparse(&s, k).unwrap().ok && !s.is_empty() {
            let mut fewer = s.clone();
            let t = s.block_vec()[drop.index(s.len())];
            fewer.remove(t);
            prop_assert!(is_k_sparse(&fewer, k).unwrap().ok);
        }
    }

    #[test]
    fn witness_is_overfull_and_small(s in system(), k in 2usize..=6) {
        let r = is_k_sparse(&s, k).unwrap();
        if let Some(w) = r.witness {
            prop_assert!(!r.ok);
            prop_assert!(w.vertices.len() >= 4 && w.vertices.len() <= k + 2);
            prop_assert!(w.blocks.len() + 2 >= w.vertices.len());
        }
    }

    #[test]
    fn subset_scan_agrees_with_catalog_embeddings(s in system(), k in 2usize..=6) {
        let exhaustive = is_k_sparse(&s, k).unwrap().ok;
        prop_assert_eq!(exhaustive, !has_catalog_embedding(&s, k));
    }
}
