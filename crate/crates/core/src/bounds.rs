//! Closed-form bounds, densities and conjectured values.
//!
//! Anything expressible over the integers is computed exactly with
//! arbitrary-precision arithmetic. Square roots and `1/e` only appear in
//! entries explicitly typed as floating point.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sets::GroundSize;

/// `a^a (s-a)^(s-a) / s^s`, the density of each block-construction family.
pub fn density_exact(s: u32, a: u32) -> Result<BigRational> {
    if a < 1 || 2 * a > s {
        return Err(Error::InvalidParams(format!("need 1 <= a <= s/2, got s={s}, a={a}")));
    }
    let pow = |base: u32, exp: u32| BigInt::from(base).pow(exp);
    Ok(BigRational::new(pow(a, a) * pow(s - a, s - a), pow(s, s)))
}

/// `(r-1)^(r-1) / r^r` against its interval `(1/(e·r), 1/(e·(r-1)))`.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalCheck {
    pub r: u32,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

pub fn constant_r_interval_check(r: u32) -> Result<IntervalCheck> {
    if r < 2 {
        return Err(Error::InvalidParams(format!("need r >= 2, got {r}")));
    }
    let rf = r as f64;
    // (1/r)·(1 - 1/r)^(r-1), with ln_1p for accuracy at large r
    let value = ((rf - 1.0) * (-1.0 / rf).ln_1p()).exp() / rf;
    let e = std::f64::consts::E;
    let lower = 1.0 / (e * rf);
    let upper = 1.0 / (e * (rf - 1.0));
    Ok(IntervalCheck { r, value, lower, upper, holds: lower < value && value < upper })
}

/// The size threshold `β` for `(r-1)`-exceeding families.
#[derive(Clone, Debug, PartialEq)]
pub enum Beta {
    /// `1/(2r)` for even `r`.
    Exact(BigRational),
    /// `r - √(r²-1)` for odd `r`, with the residual of `β² - 2rβ + 1`.
    Float { value: f64, residual: f64 },
}

impl Beta {
    pub fn value(&self) -> f64 {
        match self {
            Beta::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Beta::Float { value, .. } => *value,
        }
    }
}

pub fn beta_general_r(r: u32) -> Result<Beta> {
    if r < 1 {
        return Err(Error::InvalidParams("need r >= 1".into()));
    }
    if r.is_multiple_of(2) {
        return Ok(Beta::Exact(BigRational::new(BigInt::one(), BigInt::from(2 * r))));
    }
    let rf = r as f64;
    // r - sqrt(r^2 - 1) = 1 / (r + sqrt(r^2 - 1)) without cancellation
    let value = 1.0 / (rf + (rf * rf - 1.0).sqrt());
    let residual = value * value - 2.0 * rf * value + 1.0;
    Ok(Beta::Float { value, residual })
}

/// Lower bounds on δ(k) from the four constructions, plus the best integer bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaLowerBounds {
    pub k: u32,
    /// `C(k, ⌊k/2⌋) - 1`.
    pub middle_layer: u64,
    /// `(5/16)·2^k` for `k >= 4`.
    pub six_families: Option<u64>,
    /// `(1 - 1/r)^r · 2^k` for the largest power of two `r >= 2` with `k >= r·log2 r`.
    pub block: Option<(u64, u64)>,
    /// `(1 - 2·log2(k)/k)·(1/e)·2^k`, only where the block bound applies.
    pub asymptotic: Option<f64>,
    /// Maximum of the above, with the floating entry rounded up (δ is an integer).
    pub best: u64,
}

pub fn delta_lower_bounds(k: GroundSize) -> DeltaLowerBounds {
    let kk = k.get();
    let pow2 = 1u64 << kk;
    let middle_layer = binomial(kk as u64, (kk / 2) as u64) - 1;
    let six_families = (kk >= 4).then(|| 5 * (pow2 >> 4));
    let mut block = None;
    let mut t = 1u32;
    while (1u64 << t) * t as u64 <= kk as u64 {
        let r = 1u64 << t;
        // (r-1)^r · 2^k / r^r with r^r = 2^(t·r)
        let value = BigUint::from(r - 1).pow(r as u32) << (kk as u64 - t as u64 * r);
        block = Some((r, value.to_u64().expect("bounded by 2^k")));
        t += 1;
    }
    let asymptotic = block.map(|_| {
        let kf = kk as f64;
        (1.0 - 2.0 * kf.log2() / kf) * pow2 as f64 / std::f64::consts::E
    });
    let mut best = middle_layer;
    best = best.max(six_families.unwrap_or(0));
    best = best.max(block.map_or(0, |(_, v)| v));
    if let Some(x) = asymptotic {
        best = best.max(x.max(0.0).ceil() as u64);
    }
    DeltaLowerBounds { k: kk, middle_layer, six_families, block, asymptotic, best }
}

/// `d^d · 2^k >= (d+1)^(d+1)`, decided exactly.
pub fn conjecture_condition(d: u64, k: u32) -> bool {
    if d == 0 {
        return true;
    }
    if d <= 256 {
        let lhs = BigUint::from(d).pow(d as u32) << k;
        return lhs >= BigUint::from(d + 1).pow(d as u32 + 1);
    }
    // Equivalent form (d+1)·((d+1)/d)^d <= 2^k, bracketed with fixed-point
    // floor/ceil powers; for d > 1 equality is impossible, so refinement ends.
    let target = BigUint::one() << k;
    let mut precision = 128u64;
    loop {
        let (lo, hi) = fixed_point_pow_bracket(d + 1, d, d, precision);
        let scaled = &target << precision;
        if BigUint::from(d + 1) * hi <= scaled {
            return true;
        }
        if BigUint::from(d + 1) * lo > scaled {
            return false;
        }
        precision *= 2;
    }
}

/// Bounds `lo <= (num/den)^exp · 2^p <= hi`.
fn fixed_point_pow_bracket(num: u64, den: u64, exp: u64, p: u64) -> (BigUint, BigUint) {
    let num_scaled = BigUint::from(num) << p;
    let den = BigUint::from(den);
    let base_lo = &num_scaled / &den;
    let base_hi = (&num_scaled + &den - 1u32) / &den;
    let mask_up = (BigUint::one() << p) - 1u32;
    let mul_lo = |x: &BigUint, y: &BigUint| (x * y) >> p;
    let mul_hi = |x: &BigUint, y: &BigUint| (x * y + &mask_up) >> p;
    let one = BigUint::one() << p;
    let (mut acc_lo, mut acc_hi) = (one.clone(), one);
    let (mut b_lo, mut b_hi) = (base_lo, base_hi);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc_lo = mul_lo(&acc_lo, &b_lo);
            acc_hi = mul_hi(&acc_hi, &b_hi);
        }
        e >>= 1;
        if e > 0 {
            b_lo = mul_lo(&b_lo, &b_lo);
            b_hi = mul_hi(&b_hi, &b_hi);
        }
    }
    (acc_lo, acc_hi)
}

/// `max{d : 1 <= d^d/(d+1)^(d+1) · 2^k}` by exact binary search.
pub fn conjecture_upper(k: GroundSize) -> u64 {
    let kk = k.get();
    let (mut lo, mut hi) = (0u64, 1u64 << kk);
    // invariant: condition(lo) holds, condition(hi) fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if conjecture_condition(mid, kk) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `2^(k-1) - 2`, defined for `k >= 3`.
pub fn upper_bound_thm(k: GroundSize) -> Result<u64> {
    let kk = k.get();
    if kk < 3 {
        return Err(Error::InvalidParams(format!("upper bound needs k >= 3, got {kk}")));
    }
    Ok((1u64 << (kk - 1)) - 2)
}

/// `⌈2^k / 3⌉`, the family size with no exceeding chain of four.
pub fn third_threshold(k: GroundSize) -> u64 {
    (1u64 << k.get()).div_ceil(3)
}

/// A single report value.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Integer(u64),
    Exact(BigRational),
    Float(f64),
    Flag(bool),
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundValue::Integer(n) => ser.serialize_u64(*n),
            BoundValue::Exact(q) => ser.serialize_str(&format!("{}/{}", q.numer(), q.denom())),
            BoundValue::Float(x) => ser.serialize_f64(*x),
            BoundValue::Flag(b) => ser.serialize_bool(*b),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: BoundValue,
    pub source: String,
}

/// Every evaluator applicable to the given parameters.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub k: u32,
    pub r: Option<u32>,
    pub s: Option<u32>,
    pub a: Option<u32>,
    pub entries: Vec<BoundEntry>,
}

impl BoundsReport {
    pub fn get(&self, name: &str) -> Option<&BoundValue> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.value)
    }
}

pub fn bounds_report(k: GroundSize, r: Option<u32>, sa: Option<(u32, u32)>) -> Result<BoundsReport> {
    let mut entries = Vec::new();
    let mut push = |name: &str, value: BoundValue, source: &str| {
        entries.push(BoundEntry { name: name.into(), value, source: source.into() });
    };
    let kk = k.get();
    let pow2 = 1u64 << kk;

    let lower = delta_lower_bounds(k);
    push("delta_lower_middle_layer", BoundValue::Integer(lower.middle_layer), "middle layer of [k] as singleton families");
    if let Some(v) = lower.six_families {
        push("delta_lower_six_families", BoundValue::Integer(v), "six 2-subset block families, s=4, a=2");
    }
    if let Some((rr, v)) = lower.block {
        push("delta_lower_block_r", BoundValue::Integer(rr), "largest power of two r with k >= r log2 r");
        push("delta_lower_block", BoundValue::Integer(v), "block construction with s=r, a=1");
    }
    if let Some(x) = lower.asymptotic {
        push("delta_lower_asymptotic", BoundValue::Float(x), "(1 - 2 log2 k / k) 2^k / e");
    }
    push("delta_lower", BoundValue::Integer(lower.best), "maximum applicable lower bound");

    let conj = conjecture_upper(k);
    push("conjecture_upper", BoundValue::Integer(conj), "max d with d^d/(d+1)^(d+1) 2^k >= 1");
    let e_bound = pow2 as f64 / std::f64::consts::E;
    push("two_pow_k_over_e", BoundValue::Float(e_bound), "2^k / e");
    push("conjecture_below_e_bound", BoundValue::Flag((conj as f64) < e_bound * (1.0 - 1e-9)), "conjecture_upper < 2^k / e");
    if let Ok(u) = upper_bound_thm(k) {
        push("upper_bound", BoundValue::Integer(u), "2^(k-1) - 2, k >= 3");
    }
    push("long_sequence_max_d", BoundValue::Integer(crate::sequence::length_2k_plus_1_exceedance(kk) as u64), "max d for length 2^k + 1");
    let third = third_threshold(k);
    push("third_threshold", BoundValue::Integer(third), "ceil(2^k / 3)");
    push(
        "third_threshold_strict",
        BoundValue::Flag(BigRational::from_integer(BigInt::from(3 * third)) > BigRational::from_integer(BigInt::from(pow2))),
        "ceil(2^k / 3) > 2^k / 3",
    );
    if kk >= 2 {
        push("seymour_pair_size", BoundValue::Integer(pow2 / 4), "2^k / 4");
    }

    if let Some(r) = r {
        if r >= 2 {
            let dens = density_exact(r, 1)?;
            push("r_family_density", BoundValue::Exact(dens), "(r-1)^(r-1) / r^r");
            let chk = constant_r_interval_check(r)?;
            push("r_interval_lower", BoundValue::Float(chk.lower), "1 / (e r)");
            push("r_interval_upper", BoundValue::Float(chk.upper), "1 / (e (r-1))");
            push("r_interval_holds", BoundValue::Flag(chk.holds), "strict sandwich");
        }
        match beta_general_r(r)? {
            Beta::Exact(q) => push("beta", BoundValue::Exact(q), "1 / (2r), r even"),
            Beta::Float { value, residual } => {
                push("beta", BoundValue::Float(value), "r - sqrt(r^2 - 1), r odd");
                push("beta_residual", BoundValue::Float(residual), "beta^2 - 2 r beta + 1");
            }
        }
    }
    if let Some((s, a)) = sa {
        let dens = density_exact(s, a)?;
        let size = &dens * BigRational::from_integer(BigInt::from(pow2));
        push("block_density", BoundValue::Exact(dens), "a^a (s-a)^(s-a) / s^s");
        push("block_density_size", BoundValue::Exact(size), "density times 2^k");
    }
    Ok(BoundsReport { k: kk, r, s: sa.map(|p| p.0), a: sa.map(|p| p.1), entries })
}

/// Cross-checks `conjecture_condition` against `f64` away from the crossover.
#[doc(hidden)]
pub fn conjecture_condition_float(d: u64, k: u32) -> f64 {
    if d == 0 {
        return f64::INFINITY;
    }
    let df = d as f64;
    // ln(2^k) - ln((d+1)^(d+1)/d^d)
    k as f64 * std::f64::consts::LN_2 - (df + 1.0).ln() - df * (1.0 / df).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: u32) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn densities() {
        assert_eq!(density_exact(4, 2).unwrap(), q(1, 16));
        assert_eq!(density_exact(2, 1).unwrap(), q(1, 4));
        assert_eq!(density_exact(3, 1).unwrap(), q(4, 27));
        assert!(density_exact(3, 2).is_err());
        assert!(density_exact(3, 0).is_err());
    }

    #[test]
    fn interval_small_r() {
        let c = constant_r_interval_check(2).unwrap();
        assert!((c.value - 0.25).abs() < 1e-15);
        assert!((c.lower - 0.18393972058572117).abs() < 1e-12);
        assert!((c.upper - 0.36787944117144233).abs() < 1e-12);
        assert!(c.holds);
        let c = constant_r_interval_check(3).unwrap();
        assert!((c.value - 4.0 / 27.0).abs() < 1e-15);
        assert!(c.holds);
        assert!(constant_r_interval_check(1).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let b = delta_lower_bounds(k(4));
        assert_eq!((b.middle_layer, b.six_families), (5, Some(5)));
        assert_eq!(b.best, 5);
        let b = delta_lower_bounds(k(8));
        assert_eq!(b.block, Some((4, 81)));
        assert_eq!(b.best, 81);
        let b = delta_lower_bounds(k(3));
        assert_eq!((b.middle_layer, b.best), (2, 2));
        let b = delta_lower_bounds(k(1));
        assert_eq!((b.middle_layer, b.block, b.asymptotic, b.best), (0, None, None, 0));
        // stated values for k = 5, 6, 7
        for (n, want) in [(5, 10), (6, 20), (7, 40)] {
            assert_eq!(delta_lower_bounds(k(n)).best, want);
        }
    }

    #[test]
    fn conjecture_small() {
        assert_eq!(conjecture_upper(k(1)), 0);
        assert_eq!(conjecture_upper(k(2)), 1);
        assert_eq!(conjecture_upper(k(3)), 2);
        assert_eq!(conjecture_upper(k(4)), 5);
        // equality case d=1, k=2: 1·4 = 4
        assert!(conjecture_condition(1, 2));
        assert!(!conjecture_condition(2, 2));
    }

    #[test]
    fn conjecture_exact_paths_agree() {
        // the bracketed fixed-point path must agree with the direct power
        for d in [257u64, 300, 700, 1500] {
            let kk = (1..40).find(|&kk| conjecture_condition_float(d, kk) > 0.0).unwrap();
            for kk in [kk - 1, kk] {
                let direct = BigUint::from(d).pow(d as u32) << kk >= BigUint::from(d + 1).pow(d as u32 + 1);
                assert_eq!(conjecture_condition(d, kk), direct, "d={d}, k={kk}");
            }
        }
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_general_r(2).unwrap(), Beta::Exact(q(1, 4)));
        match beta_general_r(3).unwrap() {
            Beta::Float { value, residual } => {
                assert!((value - (3.0 - 8f64.sqrt())).abs() < 1e-15);
                assert!((value - 0.17157287525381).abs() < 1e-12);
                assert!(residual.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(beta_general_r(1).unwrap().value(), 1.0);
    }

    #[test]
    fn upper_bounds() {
        assert_eq!(upper_bound_thm(k(3)).unwrap(), 2);
        assert_eq!(upper_bound_thm(k(4)).unwrap(), 6);
        assert_eq!(upper_bound_thm(k(10)).unwrap(), 510);
        assert!(upper_bound_thm(k(2)).is_err());
    }

    #[test]
    fn report_serializes_rationals_as_strings() {
        let rep = bounds_report(k(6), Some(3), Some((3, 1))).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        let dens = json["entries"].as_array().unwrap().iter().find(|e| e["name"] == "block_density").unwrap();
        assert_eq!(dens["value"], "4/27");
        assert_eq!(rep.get("conjecture_upper"), Some(&BoundValue::Integer(conjecture_upper(k(6)))));
    }
}
