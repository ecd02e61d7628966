//! Searches over families: Seymour pairs and exceeding chains of equal-size
//! families. Families are `u64` bitsets over `𝒫([k])`, so `k <= 6`.

use itertools::Itertools;
use num_integer::binomial;
use rayon::prelude::*;
use serde_json::json;

use super::{Budget, Meter, SearchVerdict, VerdictKind, Witness};
use crate::error::{Error, Result};
use crate::sets::{mask_superset, GroundSize};

const MAX_FAMILY_K: u32 = 6;

fn check_k(k: GroundSize) -> Result<()> {
    if k.get() > MAX_FAMILY_K {
        return Err(Error::InvalidParams(format!("family searches support k <= {MAX_FAMILY_K}, got {k}")));
    }
    Ok(())
}

fn universe(k: GroundSize) -> u64 {
    if k.powerset_len() == 64 { u64::MAX } else { (1u64 << k.powerset_len()) - 1 }
}

fn bits(family: u64) -> Vec<u32> {
    (0..64).filter(|i| family >> i & 1 == 1).collect()
}

/// `down[x]` / `up[x]`: bitsets of the subsets / supersets of mask `x`.
fn closures(k: GroundSize) -> (Vec<u64>, Vec<u64>) {
    let n = k.powerset_len() as u32;
    let down = (0..n).map(|x| (0..n).filter(|&y| mask_superset(x, y)).fold(0u64, |b, y| b | 1 << y)).collect();
    let up = (0..n).map(|x| (0..n).filter(|&y| mask_superset(y, x)).fold(0u64, |b, y| b | 1 << y)).collect();
    (down, up)
}

/// Largest `b` with two incomparable families of size `b` in `𝒫([k])`.
///
/// For a family `F`, the sets incomparable to all of `F` form the largest
/// partner `I(F)`; the answer is `max_F min(|F|, |I(F)|)`. Families are grown
/// in (size, mask) order. Relabeling `[k]` maps the first member of `F` to
/// `{1, …, p}` without disturbing the order, so only those `k + 1` first
/// members are branched on. Branches run in parallel and are combined in
/// branch order, which keeps the witness independent of scheduling.
pub fn seymour_max_pair(k: GroundSize, budget: Budget) -> Result<SearchVerdict> {
    check_k(k)?;
    let meter = Meter::new(budget);
    let (down, up) = closures(k);
    let all = universe(k);
    let incomparable: Vec<u64> = down.iter().zip(&up).map(|(d, u)| all & !(d | u)).collect();
    let mut order: Vec<u32> = (0..=k.full_mask()).collect();
    order.sort_by_key(|&m| (m.count_ones(), m));

    struct Branch {
        best: usize,
        family: u64,
    }

    #[allow(clippy::too_many_arguments)]
    fn grow(
        order: &[u32],
        incomparable: &[u64],
        next: usize,
        family: u64,
        size: usize,
        partner: u64,
        out: &mut Branch,
        meter: &Meter,
    ) -> bool {
        if !meter.tick(1) {
            return false;
        }
        let value = size.min(partner.count_ones() as usize);
        if value > out.best {
            *out = Branch { best: value, family };
        }
        if partner.count_ones() as usize <= out.best || size + (order.len() - next) <= out.best {
            return true;
        }
        for i in next..order.len() {
            let x = order[i];
            if !grow(order, incomparable, i + 1, family | 1 << x, size + 1, partner & incomparable[x as usize], out, meter) {
                return false;
            }
        }
        true
    }

    let firsts: Vec<usize> = (0..=k.get()).map(|p| order.iter().position(|&m| m == (1u32 << p) - 1).unwrap()).collect();
    let branches: Vec<Option<Branch>> = firsts
        .par_iter()
        .map(|&pos| {
            let x = order[pos];
            let mut out = Branch { best: 0, family: 0 };
            grow(&order, &incomparable, pos + 1, 1 << x, 1, incomparable[x as usize], &mut out, &meter).then_some(out)
        })
        .collect();

    let mut v = SearchVerdict::new("seymour", k, None, VerdictKind::Value);
    if meter.exhausted() || branches.iter().any(Option::is_none) {
        v.kind = VerdictKind::Inconclusive;
        return Ok(v.finish(&meter));
    }
    let winner = branches
        .into_iter()
        .flatten()
        .fold(Branch { best: 0, family: 0 }, |acc, b| if b.best > acc.best { b } else { acc });
    let b = winner.best;
    let partner = bits(winner.family).iter().fold(all, |acc, &x| acc & incomparable[x as usize]);
    let left: Vec<u32> = bits(winner.family).into_iter().take(b).collect();
    let right: Vec<u32> = bits(partner).into_iter().take(b).collect();
    v.value = Some(b as u64);
    v.witness = Some(Witness::FamilyPair { k: k.get(), left, right });
    v.verify_witness().expect("seymour witness verifies");
    Ok(v.finish(&meter))
}

/// All families of `size` members, in lexicographic order of their member lists,
/// with precomputed down- and up-closures.
struct FamilyTable {
    k: GroundSize,
    members: Vec<u64>,
    down: Vec<u64>,
    up: Vec<u64>,
}

impl FamilyTable {
    fn new(k: GroundSize, size: usize, meter: &Meter) -> Option<Self> {
        let count = binomial(k.powerset_len() as u64, size as u64);
        if !meter.tick(count) {
            return None;
        }
        let (down1, up1) = closures(k);
        let members: Vec<u64> = (0..k.powerset_len() as u32)
            .combinations(size)
            .map(|c| c.iter().fold(0u64, |b, &x| b | 1 << x))
            .collect();
        let fold = |f: u64, table: &[u64]| bits(f).iter().fold(0u64, |acc, &x| acc | table[x as usize]);
        let down = members.iter().map(|&f| fold(f, &down1)).collect();
        let up = members.iter().map(|&f| fold(f, &up1)).collect();
        Some(FamilyTable { k, members, down, up })
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    /// `F ⊢ G` iff `G` avoids the down-closure of `F`.
    #[inline]
    fn exceeds(&self, f: usize, g: usize) -> bool {
        self.members[g] & self.down[f] == 0
    }

    /// `reach[t][f]`: a chain of `t + 1` families ends at `f` (forward) or
    /// starts at `f` (backward).
    fn chain_layers(&self, layers: usize, forward: bool, meter: &Meter) -> Option<Vec<Vec<bool>>> {
        let n = self.len();
        let mut reach = vec![vec![true; n]];
        for _ in 1..layers {
            let prev = reach.last().expect("non-empty");
            let sources: Vec<usize> = (0..n).filter(|&f| prev[f]).collect();
            if !meter.tick((sources.len() * n) as u64) {
                return None;
            }
            let next: Vec<bool> = (0..n)
                .into_par_iter()
                .map(|g| sources.iter().any(|&f| if forward { self.exceeds(f, g) } else { self.exceeds(g, f) }))
                .collect();
            reach.push(next);
        }
        Some(reach)
    }

    /// Lexicographically least chain of `len` families starting at a family
    /// satisfying `first`, given backward reachability layers.
    fn least_chain_from(&self, starts: impl Iterator<Item = usize>, backward: &[Vec<bool>]) -> Vec<usize> {
        let len = backward.len();
        let mut chain: Vec<usize> = Vec::with_capacity(len);
        let first = starts.into_iter().find(|&f| backward[len - 1][f]).expect("a chain exists");
        chain.push(first);
        for t in (0..len - 1).rev() {
            let prev = *chain.last().unwrap();
            let next = (0..self.len()).find(|&g| backward[t][g] && self.exceeds(prev, g)).expect("chain continues");
            chain.push(next);
        }
        chain
    }

    fn lists(&self, chain: &[usize]) -> Vec<Vec<u32>> {
        chain.iter().map(|&f| bits(self.members[f])).collect()
    }
}

/// Searches for an exceeding chain `B1 ⊢ B2 ⊢ B3 ⊢ B4` of families of size
/// `⌈2^k/3⌉`. None should exist; a witness would refute that.
pub fn exceeding_quad_search(k: GroundSize, budget: Budget) -> Result<SearchVerdict> {
    check_k(k)?;
    let meter = Meter::new(budget);
    let size = k.powerset_len().div_ceil(3);
    let mut v = SearchVerdict::new("quad", k, Some(1), VerdictKind::NotExists);
    v.details.insert("family_size".into(), json!(size));
    let Some(table) = FamilyTable::new(k, size, &meter) else {
        v.kind = VerdictKind::Inconclusive;
        return Ok(v.finish(&meter));
    };
    v.details.insert("families".into(), json!(table.len()));
    let Some(backward) = table.chain_layers(4, false, &meter) else {
        v.kind = VerdictKind::Inconclusive;
        return Ok(v.finish(&meter));
    };
    if backward[3].iter().any(|&b| b) {
        let chain = table.least_chain_from(0..table.len(), &backward);
        v.kind = VerdictKind::Exists;
        v.witness = Some(Witness::FamilyChain { k: k.get(), families: table.lists(&chain), squeezed: None, squeeze_after: None });
        v.verify_witness().expect("quad witness verifies");
    }
    Ok(v.finish(&meter))
}

/// `s = ⌊2^((k-1)/2)⌋`; the chain has `4s` families.
pub fn squeeze_length(k: GroundSize) -> usize {
    let kk = k.get();
    // ⌊2^((k-1)/2)⌋ = 2^((k-1)/2) for odd k, ⌊√2 · 2^((k-2)/2)⌋ for even k
    if kk % 2 == 1 {
        1 << ((kk - 1) / 2)
    } else {
        let half = 1u64 << ((kk - 2) / 2);
        // largest s with s^2 <= 2·half^2
        let target = 2 * half * half;
        let mut s = ((target as f64).sqrt()) as u64;
        while s * s > target {
            s -= 1;
        }
        while (s + 1) * (s + 1) <= target {
            s += 1;
        }
        s as usize
    }
}

/// Searches for an exceeding chain `B_1 ⊢ … ⊢ B_4s` of families of size
/// `2^k/4` with a set `B` such that `B_2s ⊢ {B} ⊢ B_2s+1`. None should exist.
/// As a sanity check the verdict also records whether the chain alone exists.
pub fn squeeze_search(k: GroundSize, budget: Budget) -> Result<SearchVerdict> {
    check_k(k)?;
    if k.get() < 2 {
        return Err(Error::InvalidParams("squeeze search needs k >= 2".into()));
    }
    let meter = Meter::new(budget);
    let s = squeeze_length(k);
    let size = k.powerset_len() / 4;
    let mut v = SearchVerdict::new("squeeze", k, Some(1), VerdictKind::NotExists);
    v.details.insert("s".into(), json!(s));
    v.details.insert("chain_length".into(), json!(4 * s));
    v.details.insert("family_size".into(), json!(size));
    let inconclusive = |mut v: SearchVerdict, meter: &Meter| {
        v.kind = VerdictKind::Inconclusive;
        v.finish(meter)
    };
    let Some(table) = FamilyTable::new(k, size, &meter) else {
        return Ok(inconclusive(v, &meter));
    };
    let (Some(forward), Some(backward)) = (table.chain_layers(2 * s, true, &meter), table.chain_layers(4 * s, false, &meter)) else {
        return Ok(inconclusive(v, &meter));
    };
    v.details.insert("unsqueezed_chain_exists".into(), json!(backward[4 * s - 1].iter().any(|&b| b)));

    let all = universe(k);
    let ends: Vec<usize> = (0..table.len()).filter(|&f| forward[2 * s - 1][f]).collect();
    let starts: Vec<usize> = (0..table.len()).filter(|&g| backward[2 * s - 1][g]).collect();
    if !meter.tick((ends.len() * starts.len()) as u64) {
        return Ok(inconclusive(v, &meter));
    }
    let found = ends.par_iter().find_map_first(|&f| {
        starts.iter().find_map(|&g| {
            // B ∉ down(B_2s) and B ∉ up(B_2s+1)
            let room = all & !table.down[f] & !table.up[g];
            (table.exceeds(f, g) && room != 0).then(|| (f, g, room.trailing_zeros()))
        })
    });
    if let Some((f, g, b)) = found {
        // walk back from f through the forward layers, then forward from g
        let mut left = vec![f];
        for t in (0..2 * s - 1).rev() {
            let cur = *left.last().unwrap();
            let prev = (0..table.len()).find(|&e| forward[t][e] && table.exceeds(e, cur)).expect("chain");
            left.push(prev);
        }
        left.reverse();
        let right = table.least_chain_from(std::iter::once(g), &backward[..2 * s]);
        let chain: Vec<usize> = left.into_iter().chain(right).collect();
        v.kind = VerdictKind::Exists;
        v.witness = Some(Witness::FamilyChain {
            k: table.k.get(),
            families: table.lists(&chain),
            squeezed: Some(b),
            squeeze_after: Some(2 * s - 1),
        });
        v.verify_witness().expect("squeeze witness verifies");
    }
    Ok(v.finish(&meter))
}
