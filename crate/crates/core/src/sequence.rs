//! d-exceeding sequences of sets and of families.
//!
//! A sequence `x_1, …, x_l` is d-exceeding when `x_i ⊢ x_j` for every
//! `i < j <= i + d`. Both sequence types re-verify their claimed `d` on
//! construction, so a value of either type is always a certificate.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets::{first_containment, mask_superset, pairwise_incomparable, Family, GroundSize};

/// Something that can stand at a position of an exceeding sequence.
pub trait Exceeds: Sync {
    /// `self ⊢ later`.
    fn exceeds(&self, later: &Self) -> bool;
}

impl Exceeds for u32 {
    #[inline]
    fn exceeds(&self, later: &u32) -> bool {
        !mask_superset(*self, *later)
    }
}

impl Exceeds for Family {
    fn exceeds(&self, later: &Family) -> bool {
        first_containment(self, later).is_none()
    }
}

/// Lexicographically smallest `(i, j)`, `i < j <= i + d`, where `items[i] ⊢ items[j]` fails.
pub fn first_violation<T: Exceeds>(items: &[T], d: usize) -> Option<(usize, usize)> {
    let n = items.len();
    let scan = |i: usize| {
        let end = n.min(i.saturating_add(d).saturating_add(1));
        (i + 1..end).find(|&j| !items[i].exceeds(&items[j])).map(|j| (i, j))
    };
    if n.saturating_mul(d.min(n)) < 1 << 14 {
        (0..n).find_map(scan)
    } else {
        (0..n).into_par_iter().find_map_first(scan)
    }
}

pub fn is_d_exceeding<T: Exceeds>(items: &[T], d: usize) -> bool {
    first_violation(items, d).is_none()
}

/// Largest `d` for which a set sequence is d-exceeding. A sequence that is
/// `(len-1)`-exceeding satisfies every `d`; that case returns `len` as a sentinel.
pub fn max_exceedance(items: &[u32]) -> usize {
    let n = items.len();
    let mut best = n;
    for i in 0..n {
        let horizon = n.min(i + best);
        if let Some(j) = (i + 1..horizon).find(|&j| mask_superset(items[i], items[j])) {
            best = j - i;
        }
    }
    if best == n { n } else { best - 1 }
}

/// A verified d-exceeding sequence of subsets of `[k]`, stored as masks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetSeq {
    k: GroundSize,
    items: Vec<u32>,
    d: usize,
}

impl SetSeq {
    pub fn new(k: GroundSize, items: Vec<u32>, d: usize) -> Result<Self> {
        if let Some(&mask) = items.iter().find(|&&m| !k.contains_mask(m)) {
            return Err(Error::MaskOutOfRange { mask, k: k.get() });
        }
        if let Some((i, j)) = first_violation(&items, d) {
            return Err(Error::NotExceeding { d, i, j });
        }
        Ok(SetSeq { k, items, d })
    }

    pub fn ground(&self) -> GroundSize {
        self.k
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The verified exceedance.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_exceedance(&self) -> usize {
        max_exceedance(&self.items)
    }

    pub fn into_items(self) -> Vec<u32> {
        self.items
    }
}

/// A verified d-exceeding sequence of families over a common `[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySeq {
    k: GroundSize,
    items: Vec<Family>,
    d: usize,
}

impl FamilySeq {
    pub fn new(k: GroundSize, items: Vec<Family>, d: usize) -> Result<Self> {
        if let Some(f) = items.iter().find(|f| f.ground() != k) {
            return Err(Error::GroundMismatch { left: k.get(), right: f.ground().get() });
        }
        if let Some((i, j)) = first_violation(&items, d) {
            return Err(Error::NotExceeding { d, i, j });
        }
        Ok(FamilySeq { k, items, d })
    }

    pub fn ground(&self) -> GroundSize {
        self.k
    }

    pub fn items(&self) -> &[Family] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// Repeats `r` pairwise incomparable families cyclically to length `l`,
/// giving an `(r-1)`-exceeding sequence.
pub fn cyclic_family_sequence(fams: &[Family], l: usize) -> Result<FamilySeq> {
    let Some(first) = fams.first() else {
        return Err(Error::InvalidParams("need at least one family".into()));
    };
    let k = first.ground();
    if !pairwise_incomparable(fams)? {
        let c = crate::sets::first_comparable_pair(fams)?.expect("pair exists");
        return Err(Error::NotIncomparable {
            left: c.left_family,
            right: c.right_family,
            superset: c.superset,
            subset: c.subset,
        });
    }
    let items = fams.iter().cycle().take(l).cloned().collect();
    FamilySeq::new(k, items, fams.len() - 1)
}

/// Concatenates the families of a d-exceeding sequence (each of size `b`),
/// every family by non-decreasing cardinality with ties by mask. The result is
/// `(d·b)`-exceeding.
pub fn flatten_to_sets(fseq: &FamilySeq, b: usize) -> Result<SetSeq> {
    if let Some((index, f)) = fseq.items.iter().enumerate().find(|(_, f)| f.len() != b) {
        return Err(Error::UnequalFamilySizes { expected: b, index, found: f.len() });
    }
    let items = fseq.items.iter().flat_map(|f| f.by_size()).collect();
    SetSeq::new(fseq.k, items, fseq.d * b)
}

/// `2^k - 2^⌊k/2⌋ - 2^⌈k/2⌉ + 1`, the largest d admitting a d-exceeding
/// sequence of length `2^k + 1`.
pub fn length_2k_plus_1_exceedance(k: u32) -> usize {
    (1usize << k) - (1usize << (k / 2)) - (1usize << k.div_ceil(2)) + 1
}

/// A sequence of length `2^k + 1` that is exactly `(2^k - 2^⌊k/2⌋ - 2^⌈k/2⌉ + 1)`-exceeding.
///
/// With `A = {1, …, ⌊k/2⌋}` it lists the subsets of `A`, then the sets
/// comparable to neither side of `A`, then the supersets of `A`; each block by
/// non-decreasing size. `A` itself appears twice.
pub fn long_sequence(k: GroundSize) -> Result<SetSeq> {
    let kk = k.get();
    if kk < 2 {
        return Err(Error::InvalidParams(format!("need k >= 2, got {kk}")));
    }
    let a = (1u32 << (kk / 2)) - 1;
    let by_size = |pred: &dyn Fn(u32) -> bool| {
        let mut v: Vec<u32> = (0..=k.full_mask()).filter(|&m| pred(m)).collect();
        v.sort_by_key(|&m| (m.count_ones(), m));
        v
    };
    let below = by_size(&|m| mask_superset(a, m));
    let above = by_size(&|m| mask_superset(m, a));
    let between = by_size(&|m| !mask_superset(a, m) && !mask_superset(m, a));
    let items: Vec<u32> = below.into_iter().chain(between).chain(above).collect();
    SetSeq::new(k, items, length_2k_plus_1_exceedance(kk))
}

/// Names of the two reference witness sequences.
pub const WITNESS_NAMES: [&str; 2] = ["k3_len10", "k4_len24"];

fn words_to_masks(words: &[&str]) -> Vec<u32> {
    words
        .iter()
        .map(|w| {
            w.chars()
                .filter(|c| *c != '.')
                .map(|c| 1u32 << (c.to_digit(10).expect("digit word") - 1))
                .sum()
        })
        .collect()
}

/// The reference sequence of the given name, verbatim. Its verified `d` is the
/// measured [`max_exceedance`] (capped at `len - 1`), never an assumed value.
pub fn reference_witness(name: &str) -> Result<SetSeq> {
    let (k, words): (u32, &[&str]) = match name {
        "k3_len10" => (3, &[".", "1", "2", "3", "23", "1", "12", "13", "23", "123"]),
        "k4_len24" => (
            4,
            &[
                ".", "1", "2", "3", "4", "23", "24", "34", "1", "12", "13", "14", "23", "24", "34",
                "234", "12", "13", "14", "123", "124", "134", "234", "1234",
            ],
        ),
        other => return Err(Error::UnknownWitness(other.to_string())),
    };
    let items = words_to_masks(words);
    let d = max_exceedance(&items).min(items.len().saturating_sub(1));
    SetSeq::new(GroundSize::new(k)?, items, d)
}

/// Measured exceedance of a reference witness next to the values stated for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessAudit {
    pub name: String,
    pub k: u32,
    pub length: usize,
    pub max_exceedance: usize,
    /// Exceedance claimed where the sequence is printed.
    pub stated_d: usize,
    /// Exceedance the enclosing statement is about.
    pub statement_d: usize,
    pub matches_stated: bool,
    pub matches_statement: bool,
}

pub fn witness_audit(name: &str) -> Result<WitnessAudit> {
    let seq = reference_witness(name)?;
    let (stated_d, statement_d) = match name {
        "k3_len10" => (3, 3),
        _ => (4, 6),
    };
    let max = seq.max_exceedance();
    Ok(WitnessAudit {
        name: name.to_string(),
        k: seq.ground().get(),
        length: seq.len(),
        max_exceedance: max,
        stated_d,
        statement_d,
        matches_stated: max == stated_d,
        matches_statement: max == statement_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: u32) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    #[test]
    fn exceeding_examples() {
        let seq = [0b00, 0b01, 0b10, 0b11];
        assert!(is_d_exceeding(&seq, 2));
        assert!(!is_d_exceeding(&[0b1u32, 0b1], 1));
        assert_eq!(first_violation(&[0b1u32, 0b1], 1), Some((0, 1)));
        assert!(is_d_exceeding(reference_witness("k3_len10").unwrap().items(), 3));
    }

    #[test]
    fn first_violation_is_lexicographic() {
        // (1,3) and (0,4) both violate at d=4; (0,4) comes first
        let seq = [0b011u32, 0b100, 0b110, 0b100, 0b001];
        assert_eq!(first_violation(&seq, 4), Some((0, 4)));
        assert_eq!(first_violation(&seq, 2), Some((1, 3)));
    }

    #[test]
    fn max_exceedance_examples() {
        assert_eq!(max_exceedance(&[0b11, 0b01]), 0);
        assert_eq!(max_exceedance(&[0b001, 0b010, 0b100]), 3);
        // sorted by size: every d holds, so the sentinel len is returned
        assert_eq!(max_exceedance(&[0b00, 0b01, 0b10, 0b11]), 4);
        assert_eq!(max_exceedance(&[0b01, 0b10, 0b01]), 1);
        assert_eq!(max_exceedance(&[0b01]), 1);
        assert_eq!(max_exceedance(&[]), 0);
    }

    #[test]
    fn set_seq_rejects_bad_claims() {
        assert!(SetSeq::new(k(2), vec![0b01, 0b01], 1).is_err());
        assert!(SetSeq::new(k(2), vec![0b01, 0b01], 0).is_ok());
        assert!(SetSeq::new(k(2), vec![0b100], 0).is_err());
    }

    #[test]
    fn cyclic_examples() {
        let f1 = Family::new(k(2), vec![0b01]).unwrap();
        let f2 = Family::new(k(2), vec![0b10]).unwrap();
        let seq = cyclic_family_sequence(&[f1.clone(), f2.clone()], 5).unwrap();
        assert_eq!(seq.items(), &[f1.clone(), f2.clone(), f1.clone(), f2, f1.clone()]);
        assert_eq!(seq.d(), 1);
        let constant = cyclic_family_sequence(std::slice::from_ref(&f1), 4).unwrap();
        assert_eq!(constant.d(), 0);
        assert_eq!(constant.len(), 4);
        let bad = Family::new(k(2), vec![0b11]).unwrap();
        assert!(matches!(cyclic_family_sequence(&[f1, bad], 3), Err(Error::NotIncomparable { .. })));
    }

    #[test]
    fn flatten_example() {
        let f1 = Family::new(k(3), vec![0b001, 0b010]).unwrap();
        let f2 = Family::new(k(3), vec![0b100, 0b011]).unwrap();
        let fseq = FamilySeq::new(k(3), vec![f1.clone(), f2], 1).unwrap();
        let flat = flatten_to_sets(&fseq, 2).unwrap();
        assert_eq!(flat.items(), &[0b001, 0b010, 0b100, 0b011]);
        assert_eq!(flat.d(), 2);
        assert!(flatten_to_sets(&fseq, 1).is_err());

        let single = FamilySeq::new(k(3), vec![Family::new(k(3), vec![0b001]).unwrap()], 0).unwrap();
        assert_eq!(flatten_to_sets(&single, 1).unwrap().items(), &[0b001]);
    }

    #[test]
    fn long_sequence_k2() {
        let seq = long_sequence(k(2)).unwrap();
        assert_eq!(seq.items(), &[0b00, 0b01, 0b10, 0b01, 0b11]);
        assert_eq!(seq.d(), 1);
        assert_eq!(seq.max_exceedance(), 1);
        assert!(long_sequence(k(1)).is_err());
    }

    #[test]
    fn long_sequence_exceedances() {
        assert_eq!(length_2k_plus_1_exceedance(3), 3);
        assert_eq!(length_2k_plus_1_exceedance(4), 9);
        for n in 2..=8 {
            let seq = long_sequence(k(n)).unwrap();
            assert_eq!(seq.len(), (1 << n) + 1);
            assert_eq!(seq.max_exceedance(), length_2k_plus_1_exceedance(n));
        }
    }

    #[test]
    fn witnesses() {
        let w3 = reference_witness("k3_len10").unwrap();
        assert_eq!(w3.len(), 10);
        assert_eq!(w3.items()[4], 0b110);
        let w4 = reference_witness("k4_len24").unwrap();
        assert_eq!(w4.len(), 24);
        assert_eq!(w4.items()[23], 0b1111);
        assert!(reference_witness("k5").is_err());
    }
}
