use std::collections::{BTreeSet, HashSet};

use super::{extension_is_sparse, mask, ErdosCatalog};
use crate::canon;
use crate::error::{invalid, Result};

/// Largest supported `j_max`.
pub const ENUM_MAX_J: usize = 10;

fn canonical(v: usize, blocks: &[[u8; 3]]) -> Vec<[u8; 3]> {
    let colored: Vec<canon::ColoredBlock> = blocks.iter().map(|&t| (0, t)).collect();
    canon::canonize(v, &vec![0; v], &colored)
        .cert
        .into_iter()
        .map(|(_, t)| t)
        .collect()
}

fn vertex_count(blocks: &[[u8; 3]]) -> usize {
    blocks.iter().flat_map(|t| t.iter()).map(|&x| x as usize + 1).max().unwrap_or(0)
}

/// All Erdős configurations on `4..=j_max` points, up to isomorphism.
///
/// Grows connected sparse configurations one block at a time (every
/// connected sparse configuration has a block whose removal keeps it
/// connected), deduplicating each level by canonical form. Adding a block
/// that makes the configuration tight (`points - 2` blocks) yields an Erdős
/// configuration exactly when no proper vertex subset is overfull.
pub fn enumerate_erdos(j_max: usize) -> Result<ErdosCatalog> {
    if !(4..=ENUM_MAX_J).contains(&j_max) {
        return Err(invalid(format!("enumeration supports 4 <= j_max <= {ENUM_MAX_J}, got {j_max}")));
    }
    let mut found: Vec<BTreeSet<Vec<[u8; 3]>>> = vec![BTreeSet::new(); j_max + 1];
    let mut level: HashSet<Vec<[u8; 3]>> = HashSet::new();
    level.insert(vec![[0, 1, 2]]);
    while !level.is_empty() {
        let mut next: HashSet<Vec<[u8; 3]>> = HashSet::new();
        let mut frontier: Vec<Vec<[u8; 3]>> = level.into_iter().collect();
        frontier.sort();
        for g in frontier {
            let v = vertex_count(&g) as u8;
            let masks: Vec<u16> = g.iter().map(|&t| mask(t)).collect();
            for cand in candidates(v, j_max as u8) {
                let m = mask(cand);
                if masks.contains(&m) {
                    continue;
                }
                let nv = vertex_count(&[cand]).max(v as usize);
                let nb = g.len() + 1;
                if nb + 2 > nv {
                    continue;
                }
                let full: u16 = (1 << nv) - 1;
                let tight = nb + 2 == nv;
                let mut all = masks.clone();
                all.push(m);
                if !extension_is_sparse(&all, m, full, tight) {
                    continue;
                }
                let mut blocks = g.clone();
                blocks.push(cand);
                let c = canonical(nv, &blocks);
                if tight {
                    found[nv].insert(c);
                } else {
                    next.insert(c);
                }
            }
        }
        level = next;
    }
    let lists: Vec<Vec<Vec<[u8; 3]>>> = found.into_iter().map(|s| s.into_iter().collect()).collect();
    ErdosCatalog::from_canonical_lists(j_max, lists)
}

/// Blocks meeting `0..v` in at least one vertex; new vertices are `v, v+1`.
fn candidates(v: u8, cap: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for c in 0..v {
        for b in 0..c {
            for a in 0..b {
                out.push([a, b, c]);
            }
        }
    }
    if v < cap {
        for b in 0..v {
            for a in 0..b {
                out.push([a, b, v]);
            }
        }
    }
    if v + 1 < cap {
        for a in 0..v {
            out.push([a, v, v + 1]);
        }
    }
    out
}
