//! Independent oracles: element-by-element definitions and plain loops,
//! sharing no code with the library under test.
#![allow(dead_code)]

use exceedkit::construct::{block_construction, middle_layer, threshold_construction, BlockParams, ThresholdParams};
use exceedkit::{Family, GroundSize};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `a ⊇ b`, straight from the definition: every element of `b` is in `a`.
pub fn contains(a: u32, b: u32) -> bool {
    (0..32).all(|i| b >> i & 1 == 0 || a >> i & 1 == 1)
}

pub fn all_sets(k: u32) -> Vec<u32> {
    (0..1u32 << k).collect()
}

pub fn down(k: u32, fam: &[u32]) -> Vec<u32> {
    all_sets(k).into_iter().filter(|&x| fam.iter().any(|&f| contains(f, x))).collect()
}

pub fn up(k: u32, fam: &[u32]) -> Vec<u32> {
    all_sets(k).into_iter().filter(|&x| fam.iter().any(|&f| contains(x, f))).collect()
}

/// No member of `f` contains a member of `g`.
pub fn vdash(f: &[u32], g: &[u32]) -> bool {
    f.iter().all(|&a| g.iter().all(|&b| !contains(a, b)))
}

pub fn incomparable(fams: &[Vec<u32>]) -> bool {
    (0..fams.len()).all(|i| (0..fams.len()).all(|j| i == j || vdash(&fams[i], &fams[j])))
}

pub fn exceeding(seq: &[u32], d: usize) -> bool {
    (0..seq.len()).all(|i| (i + 1..seq.len()).take(d).all(|j| !contains(seq[i], seq[j])))
}

pub fn families_exceeding(seq: &[Vec<u32>], d: usize) -> bool {
    (0..seq.len()).all(|i| (i + 1..seq.len()).take(d).all(|j| vdash(&seq[i], &seq[j])))
}

/// Length of the longest d-exceeding sequence over `[k]`, searched by plain
/// depth-first extension and stopped once `cap` is reached.
pub fn brute_longest(k: u32, d: usize, cap: usize) -> usize {
    fn go(k: u32, d: usize, cap: usize, seq: &mut Vec<u32>, best: &mut usize) {
        *best = (*best).max(seq.len());
        if *best >= cap {
            return;
        }
        for m in 0..1u32 << k {
            let from = seq.len().saturating_sub(d);
            if seq[from..].iter().all(|&p| p & m != m) {
                seq.push(m);
                go(k, d, cap, seq, best);
                seq.pop();
                if *best >= cap {
                    return;
                }
            }
        }
    }
    let mut best = 0;
    // the first set only matters up to its size
    for size in 0..=k {
        let mut seq = vec![(1u32 << size) - 1];
        go(k, d, cap, &mut seq, &mut best);
    }
    best
}

fn g(k: u32) -> GroundSize {
    GroundSize::new(k).unwrap()
}

/// Up to 48 random members over `[k]`.
pub fn random_family(rng: &mut ChaCha8Rng, k: u32) -> Family {
    let n = rng.gen_range(0..=(1usize << k).min(48));
    let masks = (0..n).map(|_| rng.gen_range(0..1u32 << k)).collect();
    Family::new(g(k), masks).unwrap()
}

/// A random choice of pairwise incomparable families over `[k]`, `k <= 8`,
/// each cut down to the same size `b`. Returns `(k, families, b)`.
pub fn random_incomparable(rng: &mut ChaCha8Rng) -> (u32, Vec<Family>, usize) {
    loop {
        let k = rng.gen_range(2..=8u32);
        let fams = if rng.gen_bool(1.0 / 3.0) {
            middle_layer(rng.gen_range(1..=k), g(k)).unwrap()
        } else {
            let c = rng.gen_range(1..=k / 2);
            let s = k / c;
            let s = rng.gen_range(2..=s);
            let a = rng.gen_range(1..=s / 2);
            if rng.gen_bool(0.5) {
                block_construction(&BlockParams::new(s, a, c, g(k)).unwrap()).unwrap()
            } else {
                threshold_construction(&ThresholdParams::new(s, a, c, g(k)).unwrap()).unwrap()
            }
        };
        if fams.len() < 2 && rng.gen_bool(0.5) {
            continue;
        }
        let b = rng.gen_range(1..=fams[0].len().min(12));
        let r = rng.gen_range(1..=fams.len().min(6));
        let picked = fams
            .choose_multiple(rng, r)
            .map(|f| Family::new(g(k), f.members().choose_multiple(rng, b).copied().collect()).unwrap())
            .collect();
        return (k, picked, b);
    }
}
