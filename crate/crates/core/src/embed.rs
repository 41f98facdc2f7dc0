//! Rooted embedding search of small configurations into the process state.
//!
//! A [`Plan`] fixes one slot of a configuration as the root (mapped onto a
//! given triple in all six ways) and lists the remaining slots in the order
//! they are matched, each with the status its image must have. Slots are
//! ordered greedily by how constrained they are at that point, so every slot
//! after the root already has at least one mapped vertex.

use crate::triple::{sort3, Triple};

/// Required status of a slot's image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotStatus {
    Chosen,
    Available,
}

/// Read access to the chosen and available triples of a host.
pub trait Host {
    fn n(&self) -> u32;
    /// The chosen block containing the pair, if any (chosen sets are linear).
    fn chosen_on_pair(&self, a: u32, b: u32) -> Option<Triple>;
    fn chosen_at(&self, v: u32) -> &[Triple];
    fn is_available(&self, t: Triple) -> bool;

    fn is_chosen(&self, t: Triple) -> bool {
        self.chosen_on_pair(t.a(), t.b()) == Some(t)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Step {
    pub verts: [u8; 3],
    pub status: SlotStatus,
}

#[derive(Clone, Debug)]
pub(crate) struct Plan {
    pub nverts: usize,
    pub root: [u8; 3],
    pub steps: Vec<Step>,
}

const UNMAPPED: u32 = u32::MAX;

impl Plan {
    /// Orders the non-root slots. `status[s]` is ignored for the root.
    pub fn build(nverts: usize, slots: &[[u8; 3]], root_slot: usize, status: &[SlotStatus]) -> Plan {
        let mut mapped = vec![false; nverts];
        for &x in &slots[root_slot] {
            mapped[x as usize] = true;
        }
        let mut placed = vec![false; slots.len()];
        placed[root_slot] = true;
        let mut steps = Vec::new();
        for _ in 1..slots.len() {
            let mut best: Option<(u8, usize)> = None;
            for s in 0..slots.len() {
                if placed[s] {
                    continue;
                }
                let m = slots[s].iter().filter(|&&x| mapped[x as usize]).count();
                let cost = match (m, status[s]) {
                    (3, _) => 0,
                    (2, SlotStatus::Chosen) => 1,
                    (1, SlotStatus::Chosen) => 2,
                    (2, SlotStatus::Available) => 3,
                    (1, SlotStatus::Available) => 4,
                    _ => u8::MAX,
                };
                if best.is_none_or(|(c, _)| cost < c) {
                    best = Some((cost, s));
                }
            }
            let (cost, s) = best.expect("slot left to place");
            assert!(cost != u8::MAX, "configuration is not connected");
            placed[s] = true;
            for &x in &slots[s] {
                mapped[x as usize] = true;
            }
            steps.push(Step {
                verts: slots[s],
                status: status[s],
            });
        }
        Plan {
            nverts,
            root: slots[root_slot],
            steps,
        }
    }

    /// Calls `visit` with the vertex map of every embedding whose root slot
    /// maps onto `root` and whose other slots have the required statuses.
    pub fn for_each<H: Host + ?Sized>(&self, host: &H, root: Triple, visit: &mut dyn FnMut(&[u32])) {
        let mut map = [UNMAPPED; 16];
        let rv = root.vertices();
        const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for o in ORDERS {
            for k in 0..3 {
                map[self.root[k] as usize] = rv[o[k]];
            }
            self.extend(host, 0, &mut map, visit);
        }
    }

    /// Vertices of the first non-root slot that must be available.
    pub fn available_slot(&self) -> Option<[u8; 3]> {
        self.steps.iter().find(|s| s.status == SlotStatus::Available).map(|s| s.verts)
    }

    fn extend<H: Host + ?Sized>(&self, host: &H, depth: usize, map: &mut [u32; 16], visit: &mut dyn FnMut(&[u32])) {
        let Some(step) = self.steps.get(depth) else {
            visit(&map[..self.nverts]);
            return;
        };
        let [x, y, z] = step.verts.map(|v| v as usize);
        let (mx, my, mz) = (map[x], map[y], map[z]);
        let used = |map: &[u32; 16], w: u32| map[..self.nverts].contains(&w);
        match (mx != UNMAPPED, my != UNMAPPED, mz != UNMAPPED) {
            (true, true, true) => {
                let t = Triple::from_sorted(sort3(mx, my, mz));
                let ok = match step.status {
                    SlotStatus::Chosen => host.is_chosen(t),
                    SlotStatus::Available => host.is_available(t),
                };
                if ok {
                    self.extend(host, depth + 1, map, visit);
                }
            }
            (mxs, mys, _) if [mxs, mys, mz != UNMAPPED].iter().filter(|&&b| b).count() == 2 => {
                // Two mapped vertices (a, b) and one free vertex f.
                let (a, b, f) = if !mxs {
                    (my, mz, x)
                } else if !mys {
                    (mx, mz, y)
                } else {
                    (mx, my, z)
                };
                match step.status {
                    SlotStatus::Chosen => {
                        if let Some(t) = host.chosen_on_pair(a.min(b), a.max(b)) {
                            let w = t.vertices().into_iter().find(|&w| w != a && w != b).unwrap();
                            if !used(map, w) {
                                map[f] = w;
                                self.extend(host, depth + 1, map, visit);
                                map[f] = UNMAPPED;
                            }
                        }
                    }
                    SlotStatus::Available => {
                        for w in 0..host.n() {
                            if used(map, w) {
                                continue;
                            }
                            if host.is_available(Triple::from_sorted(sort3(a, b, w))) {
                                map[f] = w;
                                self.extend(host, depth + 1, map, visit);
                                map[f] = UNMAPPED;
                            }
                        }
                    }
                }
            }
            _ => {
                // Exactly one mapped vertex a; free vertices f1, f2.
                let (a, f1, f2) = if mx != UNMAPPED {
                    (mx, y, z)
                } else if my != UNMAPPED {
                    (my, x, z)
                } else {
                    (mz, x, y)
                };
                match step.status {
                    SlotStatus::Chosen => {
                        for t in host.chosen_at(a) {
                            let mut it = t.vertices().into_iter().filter(|&w| w != a);
                            let (u, w) = (it.next().unwrap(), it.next().unwrap());
                            if used(map, u) || used(map, w) {
                                continue;
                            }
                            for (p, q) in [(u, w), (w, u)] {
                                map[f1] = p;
                                map[f2] = q;
                                self.extend(host, depth + 1, map, visit);
                            }
                            map[f1] = UNMAPPED;
                            map[f2] = UNMAPPED;
                        }
                    }
                    SlotStatus::Available => {
                        let n = host.n();
                        for u in 0..n {
                            if u == a || used(map, u) {
                                continue;
                            }
                            for w in u + 1..n {
                                if w == a || used(map, w) {
                                    continue;
                                }
                                if !host.is_available(Triple::from_sorted(sort3(a, u, w))) {
                                    continue;
                                }
                                for (p, q) in [(u, w), (w, u)] {
                                    map[f1] = p;
                                    map[f2] = q;
                                    self.extend(host, depth + 1, map, visit);
                                }
                                map[f1] = UNMAPPED;
                                map[f2] = UNMAPPED;
                            }
                        }
                    }
                }
            }
        }
    }

    /// Image of a slot under a complete vertex map.
    pub fn image(map: &[u32], verts: [u8; 3]) -> Triple {
        let [a, b, c] = verts.map(|v| map[v as usize]);
        Triple::from_sorted(sort3(a, b, c))
    }
}
