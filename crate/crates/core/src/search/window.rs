//! δ(k) and longest d-exceeding sequences via the window graph.
//!
//! A node is the tail of at most `d` sets of a partial sequence, internally
//! consistent (no earlier entry contains a later one). An edge appends one
//! set that no window entry contains. Full windows are exactly the feasible
//! d-tails, and the constraint has horizon `d`, so:
//!
//! * a cycle through a full window repeats a tail, and pumping the cycle
//!   gives d-exceeding sequences of every length;
//! * conversely, a sequence longer than the number of windows plus `d`
//!   revisits a window, so without a cycle all sequences are bounded and the
//!   longest path from the empty window is the maximum length.
//!
//! Windows are stored modulo relabelings of `[k]` (orbit representatives).
//! A cycle in the quotient lifts to a path `W → π(W)`; applying `π` until it
//! returns to `W` closes a real cycle, so both questions have the same answer
//! in the quotient.

use std::collections::HashMap;

use serde_json::json;

use super::{Budget, Meter, SearchVerdict, Symmetry, VerdictKind, Witness};
use crate::bounds::{delta_lower_bounds, upper_bound_thm};
use crate::error::{Error, Result};
use crate::sequence::SetSeq;
use crate::sets::{mask_superset, GroundSize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Window {
    len: u8,
    packed: u128,
}

impl Window {
    const EMPTY: Window = Window { len: 0, packed: 0 };
}

enum CycleOutcome {
    Cycle(SetSeq),
    Acyclic,
    Exhausted,
}

/// Window-graph search for fixed `k` and `d`.
#[derive(Clone, Debug)]
pub struct WindowSearch {
    k: GroundSize,
    d: usize,
    sym: Symmetry,
}

impl WindowSearch {
    /// Fails when `d` windows of `k`-bit masks do not fit in 128 bits.
    pub fn new(k: GroundSize, d: usize) -> Result<Self> {
        if d < k.powerset_len() && d * k.get() as usize > 128 {
            return Err(Error::InvalidParams(format!("window of {d} sets over [{k}] is too wide")));
        }
        Ok(WindowSearch { k, d, sym: Symmetry::full(k.get()) })
    }

    /// Turns orbit canonicalization off (plain window graph).
    pub fn without_symmetry(mut self) -> Self {
        self.sym = Symmetry::trivial(self.k.get());
        self
    }

    #[inline]
    fn slot(&self, w: Window, i: usize) -> u32 {
        let bits = self.k.get() as usize;
        ((w.packed >> (i * bits)) as u32) & self.k.full_mask()
    }

    fn slots(&self, w: Window) -> Vec<u32> {
        (0..w.len as usize).map(|i| self.slot(w, i)).collect()
    }

    #[inline]
    fn accepts(&self, w: Window, x: u32) -> bool {
        (0..w.len as usize).all(|i| !mask_superset(self.slot(w, i), x))
    }

    #[inline]
    fn push(&self, w: Window, x: u32) -> Window {
        let bits = self.k.get() as usize;
        if self.d == 0 {
            w
        } else if (w.len as usize) < self.d {
            Window { len: w.len + 1, packed: w.packed | (x as u128) << (w.len as usize * bits) }
        } else {
            Window { len: w.len, packed: w.packed >> bits | (x as u128) << ((self.d - 1) * bits) }
        }
    }

    fn relabel(&self, table: &[u32], w: Window) -> Window {
        let bits = self.k.get() as usize;
        let packed = (0..w.len as usize)
            .fold(0u128, |acc, i| acc | (table[self.slot(w, i) as usize] as u128) << (i * bits));
        Window { len: w.len, packed }
    }

    fn canon(&self, w: Window) -> Window {
        let tables = self.sym.tables();
        if tables.len() == 1 {
            return w;
        }
        tables.iter().map(|t| self.relabel(t, w)).min_by_key(|c| c.packed).expect("identity present")
    }

    fn successors(&self, w: Window, from: u32) -> Option<u32> {
        (from..=self.k.full_mask()).find(|&x| self.accepts(w, x))
    }

    /// Every window of `d+1` consecutive sets must be distinct sets, which is
    /// impossible once `d >= 2^k`.
    fn trivially_bounded(&self) -> bool {
        self.d >= self.k.powerset_len()
    }

    fn find_cycle(&self, meter: &Meter) -> CycleOutcome {
        struct Frame {
            actual: Window,
            key: Window,
            via: u32,
            next: u32,
        }
        if self.trivially_bounded() {
            return CycleOutcome::Acyclic;
        }
        // true: on the DFS stack, false: finished
        let mut color: HashMap<Window, bool> = HashMap::new();
        let root = Window::EMPTY;
        color.insert(root, true);
        meter.tick(1);
        let mut stack = vec![Frame { actual: root, key: root, via: 0, next: 0 }];
        while let Some(top) = stack.last_mut() {
            let Some(x) = self.successors(top.actual, top.next) else {
                color.insert(top.key, false);
                stack.pop();
                continue;
            };
            top.next = x + 1;
            let next = self.push(top.actual, x);
            let key = self.canon(next);
            match color.get(&key) {
                Some(true) => {
                    let j = stack.iter().position(|f| f.key == key).expect("gray node is on the stack");
                    let appended: Vec<u32> = stack[j + 1..].iter().map(|f| f.via).chain([x]).collect();
                    return CycleOutcome::Cycle(self.close_cycle(stack[j].actual, appended, next));
                }
                Some(false) => {}
                None => {
                    if !meter.tick(1) {
                        return CycleOutcome::Exhausted;
                    }
                    color.insert(key, true);
                    stack.push(Frame { actual: next, key, via: x, next: 0 });
                }
            }
        }
        CycleOutcome::Acyclic
    }

    /// `start --appended--> end` where `end = π(start)`; repeats the segment
    /// under powers of `π` until the window returns to `start`.
    fn close_cycle(&self, start: Window, appended: Vec<u32>, end: Window) -> SetSeq {
        let table = self
            .sym
            .tables()
            .iter()
            .find(|t| self.relabel(t, start) == end)
            .expect("end lies in the orbit of start");
        let mut sets = self.slots(start);
        let mut segment = appended;
        sets.extend(&segment);
        let mut cur = end;
        while cur != start {
            segment = segment.iter().map(|&m| table[m as usize]).collect();
            sets.extend(&segment);
            cur = self.relabel(table, cur);
        }
        SetSeq::new(self.k, sets, self.d).expect("window-graph cycle is d-exceeding")
    }

    /// Longest path from the empty window; requires an acyclic graph.
    fn longest_path(&self, meter: &Meter) -> Option<Vec<u32>> {
        struct Frame {
            actual: Window,
            key: Window,
            next: u32,
            best: u32,
        }
        let mut memo: HashMap<Window, u32> = HashMap::new();
        let root = Window::EMPTY;
        meter.tick(1);
        let mut stack = vec![Frame { actual: root, key: root, next: 0, best: 0 }];
        while let Some(top) = stack.last_mut() {
            match self.successors(top.actual, top.next) {
                Some(x) => {
                    top.next = x + 1;
                    let next = self.push(top.actual, x);
                    let key = self.canon(next);
                    if let Some(&len) = memo.get(&key) {
                        top.best = top.best.max(len + 1);
                    } else {
                        if !meter.tick(1) {
                            return None;
                        }
                        stack.push(Frame { actual: next, key, next: 0, best: 0 });
                    }
                }
                None => {
                    let done = stack.pop().expect("non-empty");
                    memo.insert(done.key, done.best);
                    if let Some(parent) = stack.last_mut() {
                        parent.best = parent.best.max(done.best + 1);
                    }
                }
            }
        }
        // greedy smallest-first reconstruction gives the lexicographically least optimum
        let mut out = Vec::new();
        let mut cur = root;
        let mut remaining = memo[&root];
        while remaining > 0 {
            let (x, next) = (0..=self.k.full_mask())
                .filter(|&x| self.accepts(cur, x))
                .map(|x| (x, self.push(cur, x)))
                .find(|&(_, next)| memo[&self.canon(next)] + 1 == remaining)
                .expect("an optimal successor exists");
            out.push(x);
            cur = next;
            remaining -= 1;
        }
        Some(out)
    }

    /// Whether d-exceeding sequences of every length exist.
    pub fn exists(&self, budget: Budget) -> SearchVerdict {
        let meter = Meter::new(budget);
        self.exists_with(&meter).finish(&meter)
    }

    fn exists_with(&self, meter: &Meter) -> SearchVerdict {
        let mut v = SearchVerdict::new("exists", self.k, Some(self.d), VerdictKind::NotExists);
        match self.find_cycle(meter) {
            CycleOutcome::Cycle(seq) => {
                let period = seq.len() - self.d;
                v.kind = VerdictKind::Exists;
                v.witness = Some(Witness::pumpable(&seq, period));
            }
            CycleOutcome::Acyclic => {}
            CycleOutcome::Exhausted => v.kind = VerdictKind::Inconclusive,
        }
        v
    }

    /// Maximum length of a d-exceeding sequence, or `unbounded`.
    pub fn longest(&self, budget: Budget) -> SearchVerdict {
        let meter = Meter::new(budget);
        let mut v = SearchVerdict::new("longest", self.k, Some(self.d), VerdictKind::Value);
        if self.trivially_bounded() {
            // all 2^k sets by size: every d holds, and 2^k + 1 sets would need a repeat
            let mut sets: Vec<u32> = (0..=self.k.full_mask()).collect();
            sets.sort_by_key(|&m| (m.count_ones(), m));
            let seq = SetSeq::new(self.k, sets, self.d).expect("sorted powerset");
            v.value = Some(seq.len() as u64);
            v.witness = Some(Witness::finite(&seq));
            return v.finish(&meter);
        }
        match self.find_cycle(&meter) {
            CycleOutcome::Cycle(seq) => {
                v.kind = VerdictKind::Unbounded;
                v.witness = Some(Witness::pumpable(&seq, seq.len() - self.d));
                return v.finish(&meter);
            }
            CycleOutcome::Exhausted => {
                v.kind = VerdictKind::Inconclusive;
                return v.finish(&meter);
            }
            CycleOutcome::Acyclic => {}
        }
        match self.longest_path(&meter) {
            Some(sets) => {
                let seq = SetSeq::new(self.k, sets, self.d).expect("longest path is d-exceeding");
                v.value = Some(seq.len() as u64);
                v.witness = Some(Witness::finite(&seq));
            }
            None => v.kind = VerdictKind::Inconclusive,
        }
        v.finish(&meter)
    }
}

pub fn exists_arbitrarily_long(k: GroundSize, d: usize, budget: Budget) -> Result<SearchVerdict> {
    Ok(WindowSearch::new(k, d)?.exists(budget))
}

pub fn longest_sequence(k: GroundSize, d: usize, budget: Budget) -> Result<SearchVerdict> {
    Ok(WindowSearch::new(k, d)?.longest(budget))
}

/// δ(k): starts at the best constructive lower bound, walks down if that
/// bound is refuted, then up until the first `d` without a cycle.
pub fn delta(k: GroundSize, budget: Budget) -> Result<SearchVerdict> {
    let meter = Meter::new(budget);
    let lower = delta_lower_bounds(k).best as usize;
    // proven ceiling; below k = 3, d >= 2^k is trivially bounded
    let upper = upper_bound_thm(k).unwrap_or((1u64 << k.get()) - 1);
    let mut v = SearchVerdict::new("delta", k, None, VerdictKind::Value);
    v.details.insert("lower_bound".into(), json!(lower));

    let mut d = lower;
    let mut refuted = false;
    let mut best = loop {
        let step = WindowSearch::new(k, d)?.exists_with(&meter);
        match step.kind {
            VerdictKind::Exists => break step,
            VerdictKind::NotExists if d > 0 => {
                refuted = true;
                d -= 1;
            }
            _ => {
                v.kind = VerdictKind::Inconclusive;
                // a refutation so far caps δ at d; otherwise the proven bounds stand
                v.bracket = Some(if refuted { (0, d as u64) } else { (lower as u64, upper) });
                return Ok(v.finish(&meter));
            }
        }
    };
    if !refuted {
        loop {
            let step = WindowSearch::new(k, d + 1)?.exists_with(&meter);
            match step.kind {
                VerdictKind::Exists => {
                    d += 1;
                    best = step;
                }
                VerdictKind::NotExists => break,
                _ => {
                    v.kind = VerdictKind::Inconclusive;
                    v.bracket = Some((d as u64, upper.max(d as u64)));
                    v.witness = best.witness;
                    return Ok(v.finish(&meter));
                }
            }
        }
    }
    v.details.insert("refutes_lower_bound".into(), json!(refuted));
    v.details.insert("not_exists_at".into(), json!(d + 1));
    v.d = Some(d);
    v.value = Some(d as u64);
    v.witness = best.witness;
    Ok(v.finish(&meter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::is_d_exceeding;

    fn k(n: u32) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    /// Longest d-exceeding sequence by plain DFS over sequences, capped at `cap`.
    fn brute_longest(kk: u32, d: usize, cap: usize) -> usize {
        fn go(seq: &mut Vec<u32>, kk: u32, d: usize, cap: usize) -> usize {
            if seq.len() == cap {
                return cap;
            }
            let mut best = seq.len();
            for x in 0..1u32 << kk {
                let start = seq.len().saturating_sub(d);
                if seq[start..].iter().all(|&w| !mask_superset(w, x)) {
                    seq.push(x);
                    best = best.max(go(seq, kk, d, cap));
                    seq.pop();
                    if best == cap {
                        break;
                    }
                }
            }
            best
        }
        go(&mut Vec::new(), kk, d, cap)
    }

    #[test]
    fn small_exists_cases() {
        let b = Budget::default();
        let v = exists_arbitrarily_long(k(2), 1, b).unwrap();
        assert_eq!(v.kind, VerdictKind::Exists);
        v.verify_witness().unwrap();
        assert_eq!(exists_arbitrarily_long(k(2), 2, b).unwrap().kind, VerdictKind::NotExists);
        assert_eq!(exists_arbitrarily_long(k(3), 3, b).unwrap().kind, VerdictKind::NotExists);
        let v = exists_arbitrarily_long(k(3), 2, b).unwrap();
        assert_eq!(v.kind, VerdictKind::Exists);
        v.verify_witness().unwrap();
        let v = exists_arbitrarily_long(k(1), 0, b).unwrap();
        assert_eq!(v.kind, VerdictKind::Exists);
        v.verify_witness().unwrap();
        assert_eq!(exists_arbitrarily_long(k(2), 9, b).unwrap().kind, VerdictKind::NotExists);
    }

    #[test]
    fn small_longest_cases() {
        let b = Budget::default();
        let v = longest_sequence(k(2), 2, b).unwrap();
        assert_eq!(v.value, Some(4));
        v.verify_witness().unwrap();
        assert_eq!(longest_sequence(k(2), 1, b).unwrap().kind, VerdictKind::Unbounded);
        assert_eq!(longest_sequence(k(1), 1, b).unwrap().value, Some(2));
        assert_eq!(longest_sequence(k(2), 7, b).unwrap().value, Some(4));
    }

    #[test]
    fn pumped_witness_stays_exceeding() {
        let v = exists_arbitrarily_long(k(3), 2, Budget::default()).unwrap();
        let Some(Witness::Sequence { sets, period: Some(p), d, .. }) = v.witness else { panic!() };
        let cycle = &sets[sets.len() - p..];
        let mut long = sets.clone();
        for _ in 0..5 {
            long.extend_from_slice(cycle);
        }
        assert!(is_d_exceeding(&long, d));
    }

    #[test]
    fn matches_length_capped_brute_force() {
        // arbitrarily long ⇔ the capped brute force reaches the cap
        for kk in 1..=3u32 {
            for d in 0..=(1usize << kk) {
                let search = WindowSearch::new(k(kk), d).unwrap();
                let longest = search.longest(Budget::default());
                let brute = brute_longest(kk, d, 40);
                match longest.kind {
                    VerdictKind::Unbounded => assert_eq!(brute, 40, "k={kk} d={d}"),
                    VerdictKind::Value => assert_eq!(longest.value, Some(brute as u64), "k={kk} d={d}"),
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn symmetry_does_not_change_answers() {
        for kk in 2..=3u32 {
            for d in 1..=5usize {
                let with = WindowSearch::new(k(kk), d).unwrap();
                let without = with.clone().without_symmetry();
                let a = with.longest(Budget::default());
                let b = without.longest(Budget::default());
                assert_eq!((a.kind, a.value), (b.kind, b.value), "k={kk} d={d}");
                // the lexicographically least optimum does not depend on the quotient
                if a.kind == VerdictKind::Value {
                    assert_eq!(a.witness, b.witness);
                }
            }
        }
    }

    #[test]
    fn delta_small() {
        for (kk, want) in [(1, 0), (2, 1), (3, 2)] {
            let v = delta(k(kk), Budget::default()).unwrap();
            assert_eq!(v.value, Some(want), "k={kk}");
            v.verify_witness().unwrap();
        }
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let tiny = Budget { max_states: 5, max_secs: 60.0 };
        let v = exists_arbitrarily_long(k(3), 3, tiny).unwrap();
        assert_eq!(v.kind, VerdictKind::Inconclusive);
        // every budget that stops the search early still brackets δ(4) = 5
        for states in [5, 50, 500, 2000, 6000] {
            let v = delta(k(4), Budget { max_states: states, max_secs: 60.0 }).unwrap();
            if v.kind == VerdictKind::Inconclusive {
                let (lo, hi) = v.bracket.unwrap();
                assert!(lo <= 5 && 5 <= hi, "{states}: [{lo}, {hi}]");
            } else {
                assert_eq!(v.value, Some(5));
            }
        }
    }

    #[test]
    fn too_wide_windows_are_rejected() {
        assert!(WindowSearch::new(k(6), 30).is_err());
        assert!(WindowSearch::new(k(2), 1000).is_ok());
    }
}
