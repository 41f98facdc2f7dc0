/// A subset of `0..universe` with O(1) membership, removal and uniform
/// indexing: a dense item array plus an index-of map, removal by swap.
#[derive(Clone, Debug)]
pub(crate) struct DenseSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl DenseSet {
    pub fn full(universe: usize) -> DenseSet {
        assert!(universe < ABSENT as usize);
        DenseSet {
            items: (0..universe as u32).collect(),
            pos: (0..universe as u32).collect(),
        }
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.pos.get(x).is_some_and(|&p| p != ABSENT)
    }

    /// Removes `x`; returns whether it was present.
    #[inline]
    pub fn remove(&mut self, x: usize) -> bool {
        let p = self.pos[x];
        if p == ABSENT {
            return false;
        }
        let last = *self.items.last().unwrap();
        self.items[p as usize] = last;
        self.pos[last as usize] = p;
        self.items.pop();
        self.pos[x] = ABSENT;
        true
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    #[inline]
    pub fn get(&self, idx: usize) -> usize {
        self.items[idx] as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().map(|&x| x as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_remove_keeps_index_consistent() {
        let mut s = DenseSet::full(10);
        assert!(s.remove(3));
        assert!(!s.remove(3));
        assert!(s.remove(9));
        assert!(s.remove(0));
        assert_eq!(s.len(), 7);
        let mut items: Vec<usize> = s.iter().collect();
        items.sort_unstable();
        assert_eq!(items, vec![1, 2, 4, 5, 6, 7, 8]);
        for idx in 0..s.len() {
            assert!(s.contains(s.get(idx)));
        }
        assert!(!s.contains(3) && !s.contains(42));
    }
}
