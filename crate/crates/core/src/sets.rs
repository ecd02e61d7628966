//! Subsets of a small ground set `[k]` as bitmasks, families of them, the
//! exceedance relation `⊢`, and down/up closures.
//!
//! Element `i` of `[k]` is stored in bit `i - 1`. A [`Family`] keeps its
//! members sorted ascending by mask, so two families are equal exactly when
//! their member lists are equal.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground size; `2^k` bit arrays must fit comfortably in memory.
pub const MAX_GROUND_SIZE: u32 = 24;

/// Number of elements `k` of the ground set `[k]`, with `1 <= k <= 24`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct GroundSize(u8);

impl GroundSize {
    pub fn new(k: u32) -> Result<Self> {
        if (1..=MAX_GROUND_SIZE).contains(&k) {
            Ok(GroundSize(k as u8))
        } else {
            Err(Error::GroundSizeOutOfRange(k))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0 as u32
    }

    /// `2^k`, the size of the powerset.
    #[inline]
    pub fn powerset_len(self) -> usize {
        1usize << self.0
    }

    /// Mask of the full ground set `[k]`.
    #[inline]
    pub fn full_mask(self) -> u32 {
        ((1u64 << self.0) - 1) as u32
    }

    #[inline]
    pub fn contains_mask(self, mask: u32) -> bool {
        (mask as u64) < (1u64 << self.0)
    }
}

impl TryFrom<u32> for GroundSize {
    type Error = Error;

    fn try_from(k: u32) -> Result<Self> {
        GroundSize::new(k)
    }
}

impl From<GroundSize> for u32 {
    fn from(k: GroundSize) -> u32 {
        k.get()
    }
}

impl fmt::Display for GroundSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `a ⊇ b` on raw masks.
#[inline(always)]
pub fn mask_superset(a: u32, b: u32) -> bool {
    b & !a == 0
}

/// Neither mask contains the other.
#[inline(always)]
pub fn mask_incomparable(a: u32, b: u32) -> bool {
    !mask_superset(a, b) && !mask_superset(b, a)
}

/// A subset of `[k]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset {
    k: GroundSize,
    mask: u32,
}

impl Subset {
    pub fn new(k: GroundSize, mask: u32) -> Result<Self> {
        if !k.contains_mask(mask) {
            return Err(Error::MaskOutOfRange { mask, k: k.get() });
        }
        Ok(Subset { k, mask })
    }

    /// Builds a subset from 1-based element labels.
    pub fn from_elements(k: GroundSize, elements: &[u32]) -> Result<Self> {
        let mut mask = 0u32;
        for &e in elements {
            if e == 0 || e > k.get() {
                return Err(Error::ElementOutOfRange { element: e, k: k.get() });
            }
            mask |= 1 << (e - 1);
        }
        Ok(Subset { k, mask })
    }

    pub fn empty(k: GroundSize) -> Self {
        Subset { k, mask: 0 }
    }

    #[inline]
    pub fn mask(self) -> u32 {
        self.mask
    }

    #[inline]
    pub fn ground(self) -> GroundSize {
        self.k
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.mask.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    /// 1-based element labels in ascending order.
    pub fn elements(self) -> Vec<u32> {
        (0..self.k.get()).filter(|i| self.mask >> i & 1 == 1).map(|i| i + 1).collect()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_word(self.mask))
    }
}

/// Renders a mask as an element word (`{2,3,4}` → `"234"`, `∅` → `"."`).
/// Elements above 9 are comma separated so the word stays unambiguous.
pub fn render_word(mask: u32) -> String {
    if mask == 0 {
        return ".".to_string();
    }
    let elems: Vec<u32> = (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
    if elems.iter().all(|&e| e <= 9) {
        elems.iter().map(|e| e.to_string()).collect()
    } else {
        elems.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn check_same_ground(a: GroundSize, b: GroundSize) -> Result<()> {
    if a != b {
        return Err(Error::GroundMismatch { left: a.get(), right: b.get() });
    }
    Ok(())
}

/// `a ⊇ b`.
pub fn superset(a: Subset, b: Subset) -> Result<bool> {
    check_same_ground(a.k, b.k)?;
    Ok(mask_superset(a.mask, b.mask))
}

/// `a ⊉ b` and `b ⊉ a`.
pub fn incomparable(a: Subset, b: Subset) -> Result<bool> {
    check_same_ground(a.k, b.k)?;
    Ok(mask_incomparable(a.mask, b.mask))
}

/// A deduplicated, ascending collection of subsets of `[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    k: GroundSize,
    members: Vec<u32>,
}

impl Family {
    /// Sorts and deduplicates `masks`; fails if any mask lies outside `[k]`.
    pub fn new(k: GroundSize, mut masks: Vec<u32>) -> Result<Self> {
        if let Some(&mask) = masks.iter().find(|&&m| !k.contains_mask(m)) {
            return Err(Error::MaskOutOfRange { mask, k: k.get() });
        }
        masks.sort_unstable();
        masks.dedup();
        Ok(Family { k, members: masks })
    }

    /// Caller guarantees masks are strictly increasing and below `2^k`.
    pub(crate) fn from_sorted_unchecked(k: GroundSize, members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|&m| k.contains_mask(m)));
        Family { k, members }
    }

    pub fn empty(k: GroundSize) -> Self {
        Family { k, members: Vec::new() }
    }

    pub fn powerset(k: GroundSize) -> Self {
        Family { k, members: (0..=k.full_mask()).collect() }
    }

    pub fn from_subsets(k: GroundSize, sets: &[Subset]) -> Result<Self> {
        for s in sets {
            check_same_ground(k, s.k)?;
        }
        Family::new(k, sets.iter().map(|s| s.mask).collect())
    }

    #[inline]
    pub fn ground(&self) -> GroundSize {
        self.k
    }

    #[inline]
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn subsets(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().map(move |&mask| Subset { k: self.k, mask })
    }

    /// Members as a `2^k` indicator array.
    pub fn indicator(&self) -> Vec<bool> {
        let mut marks = vec![false; self.k.powerset_len()];
        for &m in &self.members {
            marks[m as usize] = true;
        }
        marks
    }

    pub(crate) fn from_indicator(k: GroundSize, marks: &[bool]) -> Self {
        let members = marks
            .iter()
            .enumerate()
            .filter_map(|(m, &on)| on.then_some(m as u32))
            .collect();
        Family { k, members }
    }

    /// Members ordered by non-decreasing cardinality, ties by ascending mask.
    pub fn by_size(&self) -> Vec<u32> {
        let mut out = self.members.clone();
        out.sort_by_key(|&m| (m.count_ones(), m));
        out
    }

    pub fn intersection(&self, other: &Family) -> Result<Family> {
        check_same_ground(self.k, other.k)?;
        let members = self.members.iter().copied().filter(|&m| other.contains(m)).collect();
        Ok(Family { k: self.k, members })
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.k == other.k && self.members.iter().all(|&m| other.contains(m))
    }
}

/// Sweeps a `2^k` indicator so every subset of a marked set becomes marked.
pub(crate) fn sweep_down(k: GroundSize, marks: &mut [bool]) {
    for bit in 0..k.get() {
        let b = 1usize << bit;
        for m in 0..marks.len() {
            if m & b != 0 && marks[m] {
                marks[m ^ b] = true;
            }
        }
    }
}

/// Sweeps a `2^k` indicator so every superset of a marked set becomes marked.
pub(crate) fn sweep_up(k: GroundSize, marks: &mut [bool]) {
    for bit in 0..k.get() {
        let b = 1usize << bit;
        for m in 0..marks.len() {
            if m & b == 0 && marks[m] {
                marks[m | b] = true;
            }
        }
    }
}

/// All subsets of members of `f`.
pub fn down_closure(f: &Family) -> Family {
    if f.is_empty() {
        return Family::empty(f.k);
    }
    let mut marks = f.indicator();
    sweep_down(f.k, &mut marks);
    Family::from_indicator(f.k, &marks)
}

/// All supersets of members of `f`.
pub fn up_closure(f: &Family) -> Family {
    if f.is_empty() {
        return Family::empty(f.k);
    }
    let mut marks = f.indicator();
    sweep_up(f.k, &mut marks);
    Family::from_indicator(f.k, &marks)
}

/// `f ⊢ g`: no member of `f` contains a member of `g`. Vacuously true when
/// either side is empty.
pub fn vdash(f: &Family, g: &Family) -> Result<bool> {
    check_same_ground(f.k, g.k)?;
    Ok(first_containment(f, g).is_none())
}

/// First pair `(a, b)` with `a ∈ f`, `b ∈ g`, `a ⊇ b`, in `(a, b)` ascending order.
pub fn first_containment(f: &Family, g: &Family) -> Option<(u32, u32)> {
    let direct_cost = f.len().saturating_mul(g.len());
    if direct_cost <= f.k.powerset_len() * f.k.get() as usize {
        for &a in &f.members {
            for &b in &g.members {
                if mask_superset(a, b) {
                    return Some((a, b));
                }
            }
        }
        return None;
    }
    // g ∩ down(f) is empty iff f ⊢ g
    let mut marks = f.indicator();
    sweep_down(f.k, &mut marks);
    if !g.members.iter().any(|&b| marks[b as usize]) {
        return None;
    }
    f.members
        .iter()
        .find_map(|&a| g.members.iter().find(|&&b| mask_superset(a, b)).map(|&b| (a, b)))
}

/// Witness of a failed pairwise-incomparability check: indices of the two
/// families and the containing / contained members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Comparable {
    pub left_family: usize,
    pub right_family: usize,
    pub superset: u32,
    pub subset: u32,
}

/// Checks `fams[i] ⊢ fams[j]` for every ordered pair `i != j`. Fewer than two
/// families are vacuously pairwise incomparable.
pub fn pairwise_incomparable(fams: &[Family]) -> Result<bool> {
    Ok(first_comparable_pair(fams)?.is_none())
}

/// Like [`pairwise_incomparable`], but reports the first offending pair.
///
/// Each family's down-closure is computed once, so the cost is
/// `O(r·k·2^k + r·Σ|F|)` for `r` families rather than quadratic in members.
pub fn first_comparable_pair(fams: &[Family]) -> Result<Option<Comparable>> {
    let Some(first) = fams.first() else {
        return Ok(None);
    };
    for f in fams {
        check_same_ground(first.k, f.k)?;
    }
    if fams.len() < 2 {
        return Ok(None);
    }
    for (i, f) in fams.iter().enumerate() {
        let mut marks = f.indicator();
        sweep_down(f.k, &mut marks);
        for (j, g) in fams.iter().enumerate() {
            if i == j || !g.members.iter().any(|&b| marks[b as usize]) {
                continue;
            }
            let (a, b) = first_containment(f, g).expect("closure reported a containment");
            return Ok(Some(Comparable { left_family: i, right_family: j, superset: a, subset: b }));
        }
    }
    Ok(None)
}

/// Closure sizes of a family, each as an exact fraction of `2^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KleitmanRatios {
    pub down: Ratio<u64>,
    pub up: Ratio<u64>,
    pub meet: Ratio<u64>,
    pub family: Ratio<u64>,
}

impl KleitmanRatios {
    /// `down·up >= meet >= family`, compared exactly.
    pub fn holds(&self) -> bool {
        self.down * self.up >= self.meet && self.meet >= self.family
    }
}

/// `(|down(f)|, |up(f)|, |down(f) ∩ up(f)|, |f|)` divided by `2^k`.
pub fn kleitman_ratios(f: &Family) -> KleitmanRatios {
    let total = f.k.powerset_len() as u64;
    let mut down = f.indicator();
    let mut up = down.clone();
    sweep_down(f.k, &mut down);
    sweep_up(f.k, &mut up);
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as u64;
    let meet = down.iter().zip(&up).filter(|(&d, &u)| d && u).count() as u64;
    KleitmanRatios {
        down: Ratio::new(count(&down), total),
        up: Ratio::new(count(&up), total),
        meet: Ratio::new(meet, total),
        family: Ratio::new(f.len() as u64, total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: u32) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    fn set(n: u32, elems: &[u32]) -> Subset {
        Subset::from_elements(k(n), elems).unwrap()
    }

    fn fam(n: u32, sets: &[&[u32]]) -> Family {
        let subsets: Vec<Subset> = sets.iter().map(|e| set(n, e)).collect();
        Family::from_subsets(k(n), &subsets).unwrap()
    }

    #[test]
    fn ground_size_bounds() {
        assert!(GroundSize::new(0).is_err());
        assert!(GroundSize::new(25).is_err());
        assert_eq!(k(24).full_mask(), (1 << 24) - 1);
        assert!(Subset::new(k(3), 8).is_err());
        assert!(Subset::from_elements(k(3), &[4]).is_err());
    }

    #[test]
    fn superset_examples() {
        assert!(superset(set(2, &[1, 2]), set(2, &[1])).unwrap());
        assert!(!superset(set(2, &[1]), set(2, &[2])).unwrap());
        assert!(superset(set(2, &[]), set(2, &[])).unwrap());
        assert!(superset(set(2, &[1]), set(3, &[1])).is_err());
    }

    #[test]
    fn incomparable_examples() {
        assert!(incomparable(set(3, &[1]), set(3, &[2])).unwrap());
        assert!(!incomparable(set(3, &[1]), set(3, &[1, 2])).unwrap());
        assert!(incomparable(set(3, &[1, 3]), set(3, &[2, 3])).unwrap());
        assert!(incomparable(set(3, &[1]), set(2, &[2])).is_err());
    }

    #[test]
    fn vdash_examples() {
        assert!(vdash(&fam(2, &[&[1]]), &fam(2, &[&[2]])).unwrap());
        assert!(!vdash(&fam(2, &[&[1, 2]]), &fam(2, &[&[1]])).unwrap());
        assert!(vdash(&Family::empty(k(2)), &fam(2, &[&[1]])).unwrap());
        assert!(vdash(&fam(2, &[&[1]]), &fam(3, &[&[2]])).is_err());
    }

    #[test]
    fn pairwise_examples() {
        let bad = [fam(1, &[&[]]), fam(1, &[&[1]])];
        assert!(!pairwise_incomparable(&bad).unwrap());
        let hit = first_comparable_pair(&bad).unwrap().unwrap();
        assert_eq!((hit.superset, hit.subset), (1, 0));
        assert_eq!((hit.left_family, hit.right_family), (1, 0));

        let pairs: Vec<Family> = (0u32..16)
            .filter(|m| m.count_ones() == 2)
            .map(|m| Family::new(k(4), vec![m]).unwrap())
            .collect();
        assert_eq!(pairs.len(), 6);
        assert!(pairwise_incomparable(&pairs).unwrap());

        assert!(pairwise_incomparable(&[]).unwrap());
        assert!(pairwise_incomparable(&[Family::powerset(k(2))]).unwrap());
    }

    #[test]
    fn closures() {
        assert_eq!(down_closure(&fam(2, &[&[1, 2]])), Family::powerset(k(2)));
        assert!(down_closure(&Family::empty(k(3))).is_empty());
        assert!(up_closure(&Family::empty(k(3))).is_empty());
        assert_eq!(down_closure(&fam(3, &[&[1], &[2]])), fam(3, &[&[], &[1], &[2]]));
        assert_eq!(up_closure(&fam(2, &[&[1]])), fam(2, &[&[1], &[1, 2]]));
        assert_eq!(up_closure(&fam(3, &[&[]])).len(), 8);
        assert_eq!(up_closure(&fam(2, &[&[1], &[2]])), fam(2, &[&[1], &[2], &[1, 2]]));
    }

    #[test]
    fn kleitman_examples() {
        let r = kleitman_ratios(&fam(1, &[&[1]]));
        assert_eq!(
            (r.down, r.up, r.meet, r.family),
            (Ratio::new(1, 1), Ratio::new(1, 2), Ratio::new(1, 2), Ratio::new(1, 2))
        );
        assert!(r.holds());

        let r = kleitman_ratios(&fam(2, &[&[1], &[2]]));
        assert_eq!(
            (r.down, r.up, r.meet, r.family),
            (Ratio::new(3, 4), Ratio::new(3, 4), Ratio::new(1, 2), Ratio::new(1, 2))
        );
        assert!(r.down * r.up == Ratio::new(9, 16));

        let r = kleitman_ratios(&Family::powerset(k(5)));
        let one = Ratio::from_integer(1);
        assert_eq!((r.down, r.up, r.meet, r.family), (one, one, one, one));
    }

    #[test]
    fn large_family_containment_uses_closure_path() {
        // 2^10 direct products exceed k·2^k, exercising the closure branch
        let kk = k(6);
        let f = Family::new(kk, (0..64).filter(|m: &u32| m.count_ones() == 3).collect()).unwrap();
        let g = Family::new(kk, (0..64).filter(|m: &u32| m.count_ones() == 4).collect()).unwrap();
        assert!(vdash(&f, &g).unwrap());
        let h = Family::new(kk, (0..64).filter(|m: &u32| m.count_ones() == 2).collect()).unwrap();
        assert_eq!(first_containment(&f, &h), Some((0b000111, 0b000011)));
    }

    #[test]
    fn words() {
        assert_eq!(render_word(0), ".");
        assert_eq!(render_word(0b1110), "234");
        assert_eq!(set(4, &[1, 2, 3, 4]).to_string(), "1234");
        assert_eq!(render_word(1 << 9 | 1), "1,10");
    }
}
