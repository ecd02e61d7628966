use itertools::Itertools;

/// Relabelings of `[k]` acting on masks, used to pick orbit representatives.
///
/// Holds every permutation for `k <= MAX_K`; above that only the identity, so
/// canonicalization degrades to a no-op instead of blowing up.
#[derive(Clone, Debug)]
pub struct Symmetry {
    k: u32,
    /// `tables[p][mask]` is the image of `mask` under permutation `p`; entry 0 is the identity.
    tables: Vec<Vec<u32>>,
}

impl Symmetry {
    pub const MAX_K: u32 = 6;

    pub fn full(k: u32) -> Self {
        if k > Self::MAX_K {
            return Self::trivial(k);
        }
        let tables = (0..k)
            .permutations(k as usize)
            .map(|perm| (0..1u32 << k).map(|m| apply_perm(&perm, m)).collect())
            .collect();
        Symmetry { k, tables }
    }

    pub fn trivial(k: u32) -> Self {
        Symmetry { k, tables: vec![(0..1u32 << k).collect()] }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn tables(&self) -> &[Vec<u32>] {
        &self.tables
    }
}

fn apply_perm(perm: &[u32], mask: u32) -> u32 {
    perm.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &to)| 1 << to).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_bijections_preserving_size() {
        let sym = Symmetry::full(4);
        assert_eq!(sym.len(), 24);
        assert_eq!(sym.tables()[0], (0..16).collect::<Vec<_>>());
        for t in sym.tables() {
            let mut img = t.clone();
            img.sort();
            assert_eq!(img, (0..16).collect::<Vec<_>>());
            assert!((0u32..16).all(|m| t[m as usize].count_ones() == m.count_ones()));
            // relabeling respects containment
            assert!((0..16u32).all(|a| (0..16u32).all(|b| (b & !a == 0) == (t[b as usize] & !t[a as usize] == 0))));
        }
        assert_eq!(Symmetry::full(7).len(), 1);
    }
}
