use super::ProcessState;
use crate::configs::is_erdos;
use crate::error::{Error, Result};
use crate::triple::{Triple, TripleSystem};

/// Cost guard for [`brute_excluded_by`].
pub const BRUTE_MAX_N: usize = 14;

fn for_each_superset(base: &[u32], n: u32, max: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(cur: &mut Vec<u32>, from: u32, n: u32, max: usize, f: &mut dyn FnMut(&[u32])) {
        f(cur);
        if cur.len() == max {
            return;
        }
        for v in from..n {
            if cur.contains(&v) {
                continue;
            }
            cur.push(v);
            rec(cur, v + 1, n, max, f);
            cur.pop();
        }
    }
    let mut cur = base.to_vec();
    rec(&mut cur, 0, n, max, f);
}

fn subsets_of_size(items: &[Triple], size: usize, f: &mut dyn FnMut(&[Triple]) -> bool) -> bool {
    fn rec(items: &[Triple], from: usize, size: usize, cur: &mut Vec<Triple>, f: &mut dyn FnMut(&[Triple]) -> bool) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        for idx in from..items.len() {
            cur.push(items[idx]);
            if rec(items, idx + 1, size, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(items, 0, size, &mut Vec::new(), f)
}

/// Reference for [`ProcessState::excluded_by`]: for every available `T`,
/// scans vertex sets `W ⊇ T ∪ T*` of at most `j_max` points and all sets of
/// `|W| - 4` chosen blocks inside `W`, testing the union with `{T, T*}` for
/// the Erdős property by definition. Shares no code with the catalog.
pub fn brute_excluded_by(state: &ProcessState, t_star: Triple) -> Result<Vec<Triple>> {
    let n = state.n();
    if n > BRUTE_MAX_N {
        return Err(Error::TooLarge {
            what: "vertices for brute-force exclusion",
            size: n as u128,
            budget: BRUTE_MAX_N as u128,
        });
    }
    if !state.is_available(t_star) {
        return Err(Error::NotAvailable(t_star));
    }
    let chosen = state.chosen();
    let jmax = state.jmax();
    let mut out = Vec::new();
    for t in state.available() {
        if t == t_star {
            continue;
        }
        let mut u: Vec<u32> = t.vertices().into_iter().chain(t_star.vertices()).collect();
        u.sort_unstable();
        u.dedup();
        if u.len() > jmax {
            continue;
        }
        let mut hit = false;
        for_each_superset(&u, n as u32, jmax, &mut |w| {
            if hit || w.len() < 4 {
                return;
            }
            let inside: Vec<Triple> = chosen
                .iter()
                .copied()
                .filter(|b| b.vertices().iter().all(|v| w.contains(v)))
                .collect();
            hit = subsets_of_size(&inside, w.len() - 4, &mut |sub| {
                let sys = TripleSystem::from_blocks(n, sub.iter().copied().chain([t, t_star])).unwrap();
                sys.points().len() == w.len() && is_erdos(&sys).is_erdos()
            });
        });
        if hit {
            out.push(t);
        }
    }
    out.sort_unstable();
    Ok(out)
}
