//! Forbidden and Erdős configurations: recognition, canonical forms,
//! enumeration and the derived counting constants.

mod catalog;
mod enumerate;

pub use catalog::{CatalogEntry, ErdosCatalog};
pub use enumerate::enumerate_erdos;

use crate::canon;
use crate::error::{Error, Result};
use crate::triple::{binom, binom_f64, Triple, TripleSystem};

/// Largest system handled by [`canonical_form`].
pub const CANON_MAX_POINTS: usize = 12;
/// Largest `j` handled by [`erd_count`].
pub const ERD_COUNT_MAX_J: usize = 9;

/// Outcome of [`is_erdos`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErdosVerdict {
    Erdos,
    /// Not a forbidden configuration at all (wrong point/block balance).
    NotForbidden,
    /// Forbidden but not minimal; carries a forbidden proper subconfiguration.
    ContainsForbidden(Vec<Triple>),
}

impl ErdosVerdict {
    pub fn is_erdos(&self) -> bool {
        matches!(self, ErdosVerdict::Erdos)
    }
}

fn point_count(blocks: &[Triple]) -> usize {
    let mut pts: Vec<u32> = blocks.iter().flat_map(|t| t.vertices()).collect();
    pts.sort_unstable();
    pts.dedup();
    pts.len()
}

fn forbidden_blocks(blocks: &[Triple]) -> bool {
    let j = point_count(blocks);
    j >= 4 && blocks.len() == j - 2
}

/// Whether the non-isolated points of `s` number `j >= 4` and `s` has
/// exactly `j - 2` blocks.
pub fn is_forbidden(s: &TripleSystem) -> bool {
    forbidden_blocks(&s.block_vec())
}

/// Forbidden and minimal: no proper non-empty subset of blocks is itself
/// forbidden on the points it spans.
pub fn is_erdos(s: &TripleSystem) -> ErdosVerdict {
    let blocks = s.block_vec();
    if !forbidden_blocks(&blocks) {
        return ErdosVerdict::NotForbidden;
    }
    let b = blocks.len();
    assert!(b < 32, "configuration too large for subset scan");
    let full = (1u32 << b) - 1;
    // Smallest witnesses first, so the reported one is a minimal subconfiguration.
    let mut masks: Vec<u32> = (1..full).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for m in masks {
        let sub: Vec<Triple> = (0..b).filter(|i| m >> i & 1 == 1).map(|i| blocks[i]).collect();
        if forbidden_blocks(&sub) {
            return ErdosVerdict::ContainsForbidden(sub);
        }
    }
    ErdosVerdict::Erdos
}

/// Canonical representative and the relabeling `old -> new` producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub system: TripleSystem,
    pub relabeling: Vec<u32>,
}

/// Canonical form under vertex relabeling. Isolated vertices take part, so
/// systems with different `n` never share a form.
pub fn canonical_form(s: &TripleSystem) -> Result<CanonicalForm> {
    let n = s.n();
    if n > CANON_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "points for canonical labeling",
            size: n as u128,
            budget: CANON_MAX_POINTS as u128,
        });
    }
    let blocks: Vec<canon::ColoredBlock> = s
        .blocks()
        .map(|t| (0, t.vertices().map(|v| v as u8)))
        .collect();
    let c = canon::canonize(n, &vec![0; n], &blocks);
    let relabeling: Vec<u32> = c.perm.iter().map(|&p| p as u32).collect();
    Ok(CanonicalForm {
        system: s.relabel(&relabeling, n)?,
        relabeling,
    })
}

/// The explicit Erdős configuration on `j >= 6` points built from a path of
/// triples alternating between two hub vertices and closed up by one extra
/// triple. Vertex 0 plays the even hub, 1 the odd hub and `x_l = l + 1`.
pub fn build_family(j: usize) -> Result<TripleSystem> {
    if j < 6 {
        return Err(crate::error::invalid(format!("family needs j >= 6, got {j}")));
    }
    let (e, o) = (0u32, 1u32);
    let x = |l: usize| l as u32 + 1;
    let mut s = TripleSystem::new(j);
    for l in 1..=j - 3 {
        let hub = if l % 2 == 1 { o } else { e };
        s.insert(Triple::new(hub, x(l), x(l + 1)))?;
    }
    if j % 2 == 0 {
        s.insert(Triple::new(e, x(j - 2), x(1)))?;
    } else {
        s.insert(Triple::new(x(j - 4), x(j - 2), x(1)))?;
    }
    Ok(s)
}

fn mask(t: [u8; 3]) -> u16 {
    (1 << t[0]) | (1 << t[1]) | (1 << t[2])
}

/// Checks the vertex sets `W ⊇ new` inside `full` against `|blocks[W]| <= |W| - 3`,
/// except that `W = full` may carry `|W| - 2` blocks when `tight` is set.
pub(crate) fn extension_is_sparse(masks: &[u16], new: u16, full: u16, tight: bool) -> bool {
    let rest = full & !new;
    let mut sub = rest;
    loop {
        let w = new | sub;
        let size = w.count_ones() as usize;
        if size >= 4 {
            let inside = masks.iter().filter(|&&m| m & !w == 0).count();
            let limit = if tight && w == full { size - 2 } else { size - 3 };
            if inside > limit {
                return false;
            }
        }
        if sub == 0 {
            return true;
        }
        sub = (sub - 1) & rest;
    }
}

/// Number of Erdős configurations on the labeled point set `[j]` (no isolated
/// points) that contain the fixed triple `{0,1,2}`; counted by direct
/// enumeration of block sets.
pub fn erd_count(j: usize) -> Result<u64> {
    if !(4..=ERD_COUNT_MAX_J).contains(&j) {
        return Err(crate::error::invalid(format!("erd_count supports 4 <= j <= {ERD_COUNT_MAX_J}, got {j}")));
    }
    let mut triples: Vec<[u8; 3]> = Vec::new();
    for c in 0..j as u8 {
        for b in 0..c {
            for a in 0..b {
                if [a, b, c] != [0, 1, 2] {
                    triples.push([a, b, c]);
                }
            }
        }
    }
    let full: u16 = (1 << j) - 1;
    let target = j - 2;
    let mut masks = vec![mask([0, 1, 2])];
    let mut count = 0u64;
    fn rec(triples: &[[u8; 3]], from: usize, masks: &mut Vec<u16>, target: usize, full: u16, count: &mut u64) {
        for idx in from..triples.len() {
            let m = mask(triples[idx]);
            masks.push(m);
            let last = masks.len() == target;
            if extension_is_sparse(masks, m, full, last) {
                if last {
                    let union = masks.iter().fold(0, |acc, &x| acc | x);
                    if union == full {
                        *count += 1;
                    }
                } else {
                    rec(triples, idx + 1, masks, target, full, count);
                }
            }
            masks.pop();
        }
    }
    rec(&triples, 0, &mut masks, target, full, &mut count);
    Ok(count)
}

/// `J_j = erd_j * C(n-3, j-3)`: the number of Erdős configurations on `j`
/// points of an `n`-set that contain a fixed triple.
#[allow(non_snake_case)]
pub fn count_J(n: usize, j: usize, catalog: &ErdosCatalog) -> f64 {
    if j < 4 || j > catalog.jmax() || n < j {
        return 0.0;
    }
    catalog.erd(j) as f64 * binom_f64(n as f64 - 3.0, j as u32 - 3)
}

/// Exact integer variant of [`count_J`] for moderate `n`.
#[allow(non_snake_case)]
pub fn count_J_exact(n: usize, j: usize, catalog: &ErdosCatalog) -> u128 {
    if j < 4 || j > catalog.jmax() || n < j {
        return 0;
    }
    catalog.erd(j) * binom(n as u64 - 3, j as u64 - 3)
}

/// Names of the small configurations with established names.
pub fn named_configuration(name: &str) -> Option<TripleSystem> {
    let (n, spec) = match name {
        "diamond" => (4, "012,013"),
        "pasch" => (6, "012,034,135,245"),
        "mitre" => (7, "012,034,135,236,456"),
        "mia" => (7, "012,034,135,245,056"),
        "6-cycle" => (8, "012,034,135,246,257,367"),
        "crown" => (8, "012,034,135,236,147,567"),
        "fano" => (7, "012,034,056,135,146,236,245"),
        _ => return None,
    };
    Some(TripleSystem::from_digits(n, spec).expect("well-formed literal"))
}

/// Name of a configuration if it is isomorphic to one of the named ones.
pub fn configuration_name(s: &TripleSystem) -> Option<&'static str> {
    let compact = TripleSystem::compact(&s.block_vec());
    let form = canonical_form(&compact).ok()?.system;
    ["diamond", "pasch", "mitre", "mia", "6-cycle", "crown", "fano"]
        .into_iter()
        .find(|name| {
            let named = named_configuration(name).unwrap();
            named.n() == form.n() && canonical_form(&named).unwrap().system == form
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, spec: &str) -> TripleSystem {
        TripleSystem::from_digits(n, spec).unwrap()
    }

    #[test]
    fn forbidden_examples() {
        assert!(is_forbidden(&named_configuration("diamond").unwrap()));
        assert!(!is_forbidden(&sys(3, "012")));
        assert!(is_forbidden(&named_configuration("pasch").unwrap()));
        // Isolated vertices do not count as points.
        assert!(is_forbidden(&sys(9, "012,013")));
    }

    #[test]
    fn erdos_examples_and_witnesses() {
        assert!(is_erdos(&named_configuration("mitre").unwrap()).is_erdos());
        let pasch = named_configuration("pasch").unwrap().block_vec();
        match is_erdos(&named_configuration("mia").unwrap()) {
            ErdosVerdict::ContainsForbidden(w) => assert_eq!(w, pasch),
            other => panic!("unexpected {other:?}"),
        }
        let mitre = named_configuration("mitre").unwrap().block_vec();
        match is_erdos(&sys(8, "012,034,135,236,147,257")) {
            ErdosVerdict::ContainsForbidden(w) => {
                assert_eq!(w.len(), mitre.len());
                assert_eq!(configuration_name(&TripleSystem::compact(&w)), Some("mitre"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(is_erdos(&sys(5, "012,034")), ErdosVerdict::NotForbidden);
    }

    #[test]
    fn family_members_are_erdos() {
        for j in 6..=11 {
            let s = build_family(j).unwrap();
            assert_eq!(s.points().len(), j);
            assert_eq!(s.len(), j - 2);
            assert!(is_erdos(&s).is_erdos(), "j={j}");
        }
        assert!(build_family(5).is_err());
    }

    #[test]
    fn canonical_form_examples() {
        let a = canonical_form(&sys(4, "012,013")).unwrap().system;
        let b = canonical_form(&sys(4, "123,023")).unwrap().system;
        assert_eq!(a, b);
        let p = canonical_form(&sys(7, "012,034,135,245")).unwrap().system;
        let m = canonical_form(&named_configuration("mitre").unwrap()).unwrap().system;
        assert_ne!(p, m);
        assert!(canonical_form(&TripleSystem::new(13)).is_err());
    }

    #[test]
    fn erd_small_values() {
        assert_eq!(erd_count(4).unwrap(), 3);
        assert_eq!(erd_count(5).unwrap(), 0);
        assert_eq!(erd_count(6).unwrap(), 6);
        assert!(erd_count(3).is_err());
        assert!(erd_count(10).is_err());
    }

    #[test]
    fn names_resolve() {
        assert_eq!(configuration_name(&sys(9, "345,346")), Some("diamond"));
        assert_eq!(configuration_name(&build_family(6).unwrap()), Some("pasch"));
        assert_eq!(configuration_name(&sys(6, "012,345")), None);
    }
}
