//! Exhaustive oracles.
//!
//! Every query runs under a [`Budget`]. A verdict of `not-exists` is only
//! produced after the whole state space has been explored; running out of
//! budget yields [`VerdictKind::Inconclusive`] instead. Every positive verdict
//! carries a witness that is re-verified before it is returned.

mod families;
mod symmetry;
mod window;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::Serialize;

pub use families::{exceeding_quad_search, seymour_max_pair, squeeze_search, squeeze_length};
pub use symmetry::Symmetry;
pub use window::{delta, exists_arbitrarily_long, longest_sequence, WindowSearch};

use crate::error::{Error, Result};
use crate::sequence::SetSeq;
use crate::sets::{first_containment, Family, GroundSize};

/// State and wall-clock limits for one query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub max_states: u64,
    pub max_secs: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_states: 100_000_000, max_secs: 600.0 }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { max_states: u64::MAX, max_secs: f64::INFINITY }
    }
}

/// Shared counter of explored states; safe to tick from worker threads.
pub(crate) struct Meter {
    budget: Budget,
    start: Instant,
    states: AtomicU64,
    exhausted: AtomicBool,
}

impl Meter {
    pub(crate) fn new(budget: Budget) -> Self {
        Meter { budget, start: Instant::now(), states: AtomicU64::new(0), exhausted: AtomicBool::new(false) }
    }

    /// Records `n` states; returns false once the budget is spent.
    pub(crate) fn tick(&self, n: u64) -> bool {
        let before = self.states.fetch_add(n, Ordering::Relaxed);
        let after = before.saturating_add(n);
        if after > self.budget.max_states {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        // time checks are comparatively expensive; sample them
        if before >> 12 != after >> 12 && self.elapsed().as_secs_f64() > self.budget.max_secs {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        !self.exhausted.load(Ordering::Relaxed)
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    pub(crate) fn states(&self) -> u64 {
        self.states.load(Ordering::Relaxed)
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Value,
    Exists,
    NotExists,
    /// Arbitrarily long sequences exist, so a longest one does not.
    Unbounded,
    Inconclusive,
}

/// Certificate attached to a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    /// A d-exceeding set sequence. With `period = Some(p)`, its last `d`
    /// entries equal its first `d`, so repeating the final `p` entries forever
    /// keeps it d-exceeding.
    Sequence { k: u32, d: usize, sets: Vec<u32>, period: Option<usize> },
    /// Two incomparable families of equal size.
    FamilyPair { k: u32, left: Vec<u32>, right: Vec<u32> },
    /// An exceeding chain of families, optionally with a set squeezed between
    /// positions `squeeze_after` and `squeeze_after + 1`.
    FamilyChain { k: u32, families: Vec<Vec<u32>>, squeezed: Option<u32>, squeeze_after: Option<usize> },
}

impl Witness {
    pub(crate) fn pumpable(seq: &SetSeq, period: usize) -> Witness {
        Witness::Sequence {
            k: seq.ground().get(),
            d: seq.d(),
            sets: seq.items().to_vec(),
            period: Some(period),
        }
    }

    pub(crate) fn finite(seq: &SetSeq) -> Witness {
        Witness::Sequence { k: seq.ground().get(), d: seq.d(), sets: seq.items().to_vec(), period: None }
    }

    /// Re-checks the certificate with the `sets`/`sequence` predicates.
    pub fn verify(&self) -> Result<()> {
        match self {
            Witness::Sequence { k, d, sets, period } => {
                let seq = SetSeq::new(GroundSize::new(*k)?, sets.clone(), *d)?;
                if let Some(p) = *period {
                    let n = seq.len();
                    if p == 0 || n != d + p || seq.items()[..*d] != seq.items()[n - d..] {
                        return Err(Error::InvalidParams(format!(
                            "sequence of length {n} is not a pumpable cycle of period {p} for d={d}"
                        )));
                    }
                }
                Ok(())
            }
            Witness::FamilyPair { k, left, right } => {
                let k = GroundSize::new(*k)?;
                let f = Family::new(k, left.clone())?;
                let g = Family::new(k, right.clone())?;
                if f.len() != left.len() || g.len() != right.len() || f.len() != g.len() {
                    return Err(Error::InvalidParams("family pair sizes differ or repeat members".into()));
                }
                if let Some((a, b)) = first_containment(&f, &g).or_else(|| first_containment(&g, &f)) {
                    return Err(Error::NotIncomparable { left: 0, right: 1, superset: a, subset: b });
                }
                Ok(())
            }
            Witness::FamilyChain { k, families, squeezed, squeeze_after } => {
                let k = GroundSize::new(*k)?;
                let fams = families
                    .iter()
                    .map(|f| Family::new(k, f.clone()))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(i) = (1..fams.len()).find(|&i| first_containment(&fams[i - 1], &fams[i]).is_some()) {
                    return Err(Error::NotExceeding { d: 1, i: i - 1, j: i });
                }
                if let (Some(b), Some(at)) = (squeezed, squeeze_after) {
                    let single = Family::new(k, vec![*b])?;
                    let before = fams.get(*at);
                    let after = fams.get(at + 1);
                    let ok = before.is_some_and(|f| first_containment(f, &single).is_none())
                        && after.is_some_and(|g| first_containment(&single, g).is_none());
                    if !ok {
                        return Err(Error::InvalidParams("squeezed set does not fit".into()));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Outcome of an exhaustive query.
#[derive(Clone, Debug, Serialize)]
pub struct SearchVerdict {
    pub query: String,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub kind: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// For an inconclusive δ(k): `lo <= δ(k)`, and `hi` is the first `d` left undecided.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<(u64, u64)>,
    pub states_explored: u64,
    pub elapsed_secs: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl SearchVerdict {
    pub(crate) fn new(query: &str, k: GroundSize, d: Option<usize>, kind: VerdictKind) -> Self {
        SearchVerdict {
            query: query.to_string(),
            k: k.get(),
            d,
            kind,
            value: None,
            witness: None,
            bracket: None,
            states_explored: 0,
            elapsed_secs: 0.0,
            details: BTreeMap::new(),
        }
    }

    pub(crate) fn finish(mut self, meter: &Meter) -> Self {
        self.states_explored = meter.states();
        self.elapsed_secs = meter.elapsed().as_secs_f64();
        self
    }

    pub fn is_conclusive(&self) -> bool {
        self.kind != VerdictKind::Inconclusive
    }

    pub fn verify_witness(&self) -> Result<()> {
        self.witness.as_ref().map_or(Ok(()), Witness::verify)
    }
}
