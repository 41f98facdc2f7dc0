//! Canonical labeling of small colored 3-graphs.
//!
//! Partition refinement plus a search over individualized vertices. The
//! certificate of a discrete leaf is its relabeled, sorted block list; the
//! lexicographically smallest certificate over the search tree is canonical.
//! Subtrees are pruned with automorphisms found along the way, which keeps
//! highly symmetric inputs (many isolated vertices, say) cheap.

/// A block with a color tag. Vertices are `< v`.
pub(crate) type ColoredBlock = (u8, [u8; 3]);

pub(crate) struct Canon {
    /// `perm[old] = new`.
    pub perm: Vec<u8>,
    /// Sorted relabeled blocks.
    pub cert: Vec<ColoredBlock>,
}

struct Graph<'a> {
    v: usize,
    vcolor: &'a [u8],
    blocks: &'a [ColoredBlock],
    inc: Vec<Vec<usize>>,
}

fn relabel(blocks: &[ColoredBlock], perm: &[u8]) -> Vec<ColoredBlock> {
    let mut out: Vec<ColoredBlock> = blocks
        .iter()
        .map(|&(c, [a, b, d])| {
            let mut t = [perm[a as usize], perm[b as usize], perm[d as usize]];
            t.sort_unstable();
            (c, t)
        })
        .collect();
    out.sort_unstable();
    out
}

/// Re-ranks `keys` into dense cell ids, returning the number of cells.
fn rank_cells<K: Ord + Clone>(keys: &[K], cells: &mut [u32]) -> usize {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    for (x, k) in keys.iter().enumerate() {
        cells[x] = sorted.binary_search(k).unwrap() as u32;
    }
    sorted.len()
}

impl Graph<'_> {
    fn refine(&self, cells: &mut [u32]) {
        let mut ncells = {
            let mut c: Vec<u32> = cells.to_vec();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let keys: Vec<(u32, Vec<(u8, u32, u32)>)> = (0..self.v)
                .map(|x| {
                    let mut sig: Vec<(u8, u32, u32)> = self.inc[x]
                        .iter()
                        .map(|&bi| {
                            let (col, t) = self.blocks[bi];
                            let others: Vec<u32> = t
                                .iter()
                                .filter(|&&y| y as usize != x)
                                .map(|&y| cells[y as usize])
                                .collect();
                            (col, others[0].min(others[1]), others[0].max(others[1]))
                        })
                        .collect();
                    sig.sort_unstable();
                    (cells[x], sig)
                })
                .collect();
            let next = rank_cells(&keys, cells);
            if next == ncells {
                return;
            }
            ncells = next;
        }
    }

    fn target_cell(&self, cells: &[u32]) -> Option<Vec<u8>> {
        let mut size = vec![0usize; self.v];
        for &c in cells {
            size[c as usize] += 1;
        }
        let c = (0..self.v).find(|&c| size[c] > 1)? as u32;
        Some((0..self.v as u8).filter(|&x| cells[x as usize] == c).collect())
    }
}

struct Search<'a> {
    g: Graph<'a>,
    best: Option<Canon>,
    autos: Vec<Vec<u8>>,
    prune: bool,
    /// All leaves reaching the best certificate (only when not pruning).
    best_leaves: Vec<Vec<u8>>,
}

fn find(parent: &mut [u8], x: u8) -> u8 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut y = x;
    while parent[y as usize] != r {
        let next = parent[y as usize];
        parent[y as usize] = r;
        y = next;
    }
    r
}

impl Search<'_> {
    fn leaf(&mut self, cells: &[u32]) {
        let perm: Vec<u8> = cells.iter().map(|&c| c as u8).collect();
        let cert = relabel(self.g.blocks, &perm);
        match &self.best {
            None => {
                self.best_leaves = vec![perm.clone()];
                self.best = Some(Canon { perm, cert });
            }
            Some(b) => match cert.cmp(&b.cert) {
                std::cmp::Ordering::Less => {
                    self.best_leaves = vec![perm.clone()];
                    self.best = Some(Canon { perm, cert });
                }
                std::cmp::Ordering::Equal => {
                    // b.perm^{-1} . perm is an automorphism.
                    let mut inv = vec![0u8; perm.len()];
                    for (x, &p) in b.perm.iter().enumerate() {
                        inv[p as usize] = x as u8;
                    }
                    let auto: Vec<u8> = perm.iter().map(|&p| inv[p as usize]).collect();
                    self.autos.push(auto);
                    if !self.prune {
                        self.best_leaves.push(perm);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }

    fn orbit_roots(&self, path: &[u8]) -> Vec<u8> {
        let v = self.g.v;
        let mut parent: Vec<u8> = (0..v as u8).collect();
        for a in &self.autos {
            if path.iter().any(|&p| a[p as usize] != p) {
                continue;
            }
            for x in 0..v {
                let (rx, ry) = (find(&mut parent, x as u8), find(&mut parent, a[x]));
                if rx != ry {
                    parent[rx.max(ry) as usize] = rx.min(ry);
                }
            }
        }
        (0..v as u8).map(|x| find(&mut parent, x)).collect()
    }

    fn dfs(&mut self, mut cells: Vec<u32>, path: &mut Vec<u8>) {
        self.g.refine(&mut cells);
        let Some(target) = self.g.target_cell(&cells) else {
            self.leaf(&cells);
            return;
        };
        let mut tried: Vec<u8> = Vec::new();
        for &x in &target {
            if self.prune && !tried.is_empty() {
                let roots = self.orbit_roots(path);
                if tried.iter().any(|&y| roots[y as usize] == roots[x as usize]) {
                    continue;
                }
            }
            let keys: Vec<(u32, bool)> = (0..self.g.v)
                .map(|y| (cells[y], y != x as usize))
                .collect();
            let mut child = vec![0u32; self.g.v];
            rank_cells(&keys, &mut child);
            path.push(x);
            self.dfs(child, path);
            path.pop();
            tried.push(x);
        }
    }
}

fn run<'a>(v: usize, vcolor: &'a [u8], blocks: &'a [ColoredBlock], prune: bool) -> Search<'a> {
    assert!(v <= u8::MAX as usize && vcolor.len() == v);
    let mut inc = vec![Vec::new(); v];
    for (bi, &(_, t)) in blocks.iter().enumerate() {
        for x in t {
            inc[x as usize].push(bi);
        }
    }
    let g = Graph {
        v,
        vcolor,
        blocks,
        inc,
    };
    let mut cells = vec![0u32; v];
    rank_cells(g.vcolor, &mut cells);
    let mut s = Search {
        g,
        best: None,
        autos: Vec::new(),
        prune,
        best_leaves: Vec::new(),
    };
    s.dfs(cells, &mut Vec::new());
    s
}

/// Canonical labeling of a colored 3-graph on `v` vertices.
pub(crate) fn canonize(v: usize, vcolor: &[u8], blocks: &[ColoredBlock]) -> Canon {
    if v == 0 {
        return Canon {
            perm: Vec::new(),
            cert: Vec::new(),
        };
    }
    run(v, vcolor, blocks, true).best.expect("search reaches a leaf")
}

/// The full automorphism group as vertex permutations (`auto[x]` is the
/// image of `x`), identity first.
pub(crate) fn automorphisms(v: usize, vcolor: &[u8], blocks: &[ColoredBlock]) -> Vec<Vec<u8>> {
    if v == 0 {
        return vec![Vec::new()];
    }
    let s = run(v, vcolor, blocks, false);
    let best = s.best.expect("search reaches a leaf");
    let mut inv = vec![0u8; v];
    for (x, &p) in best.perm.iter().enumerate() {
        inv[p as usize] = x as u8;
    }
    let mut out: Vec<Vec<u8>> = s
        .best_leaves
        .iter()
        .map(|leaf| leaf.iter().map(|&p| inv[p as usize]).collect())
        .collect();
    out.sort();
    out.dedup();
    let id: Vec<u8> = (0..v as u8).collect();
    let pos = out.iter().position(|a| *a == id).expect("identity is an automorphism");
    out.swap(0, pos);
    out
}
