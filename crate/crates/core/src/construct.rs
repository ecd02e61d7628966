//! Pairwise incomparable families of equal size.
//!
//! Every construction here lays out blocks as consecutive runs of elements:
//! block `i` (0-based) covers bits `i·c .. (i+1)·c`. Families over `[s·c]`
//! are then lifted to `[k]` with [`upscale`].

use itertools::Itertools;
use num_integer::binomial;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets::{Family, GroundSize};

/// Lifts families over `[s]` to `[k]` by adjoining every subset of `[k] \ [s]`.
/// Sizes grow by exactly `2^(k-s)`; pairwise incomparability is preserved.
pub fn upscale(fams: &[Family], k: GroundSize) -> Result<Vec<Family>> {
    let Some(first) = fams.first() else {
        return Ok(Vec::new());
    };
    let s = first.ground();
    if let Some(f) = fams.iter().find(|f| f.ground() != s) {
        return Err(Error::GroundMismatch { left: s.get(), right: f.ground().get() });
    }
    if s > k {
        return Err(Error::InvalidParams(format!("cannot upscale from [{s}] down to [{k}]")));
    }
    Ok(fams.iter().map(|f| lift(f.members(), s.get(), k)).collect())
}

fn lift(members: &[u32], s: u32, k: GroundSize) -> Family {
    let extra = 1u32 << (k.get() - s);
    let mut out = Vec::with_capacity(members.len() * extra as usize);
    // high bits outer, low bits inner: output is already ascending
    for high in 0..extra {
        let base = high.checked_shl(s).unwrap_or(0);
        out.extend(members.iter().map(|&m| m | base));
    }
    Family::from_sorted_unchecked(k, out)
}

/// `C(s, ⌊s/2⌋)` families, one per middle-layer subset of `[s]`, each lifted
/// to `[k]` (size `2^(k-s)`). `s = 0` yields the single family `𝒫([k])`.
pub fn middle_layer(s: u32, k: GroundSize) -> Result<Vec<Family>> {
    if s > k.get() {
        return Err(Error::InvalidParams(format!("middle layer needs s <= k, got s={s}, k={k}")));
    }
    if s == 0 {
        return Ok(vec![Family::powerset(k)]);
    }
    let ground = GroundSize::new(s)?;
    let singletons: Vec<Family> = (0..1u32 << s)
        .filter(|m| m.count_ones() == s / 2)
        .map(|m| Family::from_sorted_unchecked(ground, vec![m]))
        .collect();
    upscale(&singletons, k)
}

/// Parameters of the block construction: `s` blocks of width `c`, each family
/// designated by an `a`-subset of block indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockParams {
    pub s: u32,
    pub a: u32,
    pub c: u32,
    pub k: GroundSize,
}

impl BlockParams {
    pub fn new(s: u32, a: u32, c: u32, k: GroundSize) -> Result<Self> {
        if a < 1 || 2 * a > s {
            return Err(Error::InvalidParams(format!("need 1 <= a <= s/2, got s={s}, a={a}")));
        }
        if c < 1 {
            return Err(Error::InvalidParams("block width c must be at least 1".into()));
        }
        if s.checked_mul(c).is_none_or(|sc| sc > k.get()) {
            return Err(Error::InvalidParams(format!("need s*c <= k, got s={s}, c={c}, k={k}")));
        }
        Ok(BlockParams { s, a, c, k })
    }

    /// `2^c = s/a`, the case where the size equals `a^a(s-a)^(s-a)/s^s · 2^k`.
    pub fn is_exact(&self) -> bool {
        (1u64 << self.c) * self.a as u64 == self.s as u64
    }

    pub fn family_count(&self) -> u64 {
        binomial(self.s as u64, self.a as u64)
    }

    /// `(2^c - 1)^(s-a) · 2^(k - s·c)`.
    pub fn expected_size(&self) -> u64 {
        ((1u64 << self.c) - 1).pow(self.s - self.a) << (self.k.get() - self.s * self.c)
    }
}

/// Threshold variant: block `i` is "low" when its trace is one of the `m`
/// smallest subsets of the block, `m = ⌈(a/s)·2^c⌉`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdParams {
    pub s: u32,
    pub a: u32,
    pub c: u32,
    pub k: GroundSize,
}

impl ThresholdParams {
    pub fn new(s: u32, a: u32, c: u32, k: GroundSize) -> Result<Self> {
        let p = ThresholdParams { s, a, c, k };
        if a < 1 || s < 1 || c < 1 || s.checked_mul(c).is_none_or(|sc| sc > k.get()) {
            return Err(Error::InvalidParams(format!(
                "need a >= 1, c >= 1, s*c <= k, got s={s}, a={a}, c={c}, k={k}"
            )));
        }
        if p.low_count() > 1u64 << (c - 1) {
            return Err(Error::InvalidParams(format!(
                "m = {} exceeds 2^(c-1) = {}",
                p.low_count(),
                1u64 << (c - 1)
            )));
        }
        if 2 * a > s {
            return Err(Error::InvalidParams(format!("need a <= s/2, got s={s}, a={a}")));
        }
        Ok(p)
    }

    /// `d = (a/s)·2^c`.
    pub fn threshold(&self) -> Ratio<u64> {
        Ratio::new(self.a as u64 * (1u64 << self.c), self.s as u64)
    }

    /// `m = ⌈d⌉`.
    pub fn low_count(&self) -> u64 {
        self.threshold().ceil().to_integer()
    }

    pub fn family_count(&self) -> u64 {
        binomial(self.s as u64, self.a as u64)
    }

    /// `m^a · (2^c - m)^(s-a) · 2^(k - s·c)`.
    pub fn expected_size(&self) -> u64 {
        let m = self.low_count();
        (m.pow(self.a) * ((1u64 << self.c) - m).pow(self.s - self.a)) << (self.k.get() - self.s * self.c)
    }

    /// The `m` block-local patterns of smallest cardinality, ties by mask.
    pub fn low_patterns(&self) -> Vec<u32> {
        (0..1u32 << self.c)
            .sorted_by_key(|&p| (p.count_ones(), p))
            .take(self.low_count() as usize)
            .sorted()
            .collect()
    }
}

/// Builds one family per `a`-subset of block indices (lexicographic order):
/// a member's trace on block `i` is in `low` when `i` is designated, and in
/// `high` otherwise.
fn designated_blocks(s: u32, a: u32, c: u32, k: GroundSize, low: &[u32], high: &[u32]) -> Result<Vec<Family>> {
    let inner = GroundSize::new(s * c)?;
    let fams: Vec<Family> = (0..s)
        .combinations(a as usize)
        .map(|designated| {
            let mut masks = vec![0u32];
            for block in 0..s {
                let patterns = if designated.contains(&block) { low } else { high };
                masks = masks
                    .iter()
                    .flat_map(|&m| patterns.iter().map(move |&p| m | p << (block * c)))
                    .collect();
            }
            masks.sort_unstable();
            Family::from_sorted_unchecked(inner, masks)
        })
        .collect();
    upscale(&fams, k)
}

/// A family for every `a`-subset `A` of blocks: `B ∩ C_i = ∅` iff `i ∈ A`.
pub fn block_construction(p: &BlockParams) -> Result<Vec<Family>> {
    let high: Vec<u32> = (1..1u32 << p.c).collect();
    designated_blocks(p.s, p.a, p.c, p.k, &[0], &high)
}

/// A family for every `a`-subset `A` of blocks: `B ∩ C_i` is a low pattern iff `i ∈ A`.
pub fn threshold_construction(p: &ThresholdParams) -> Result<Vec<Family>> {
    let low = p.low_patterns();
    let high: Vec<u32> = (0..1u32 << p.c).filter(|q| low.binary_search(q).is_err()).collect();
    designated_blocks(p.s, p.a, p.c, p.k, &low, &high)
}
