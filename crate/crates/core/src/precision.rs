//! Control-precision planning.
//!
//! [`greedy_precision_plan`] picks collapsing pairs one term at a time. Each
//! round it prices every remaining term against each of its three pairs with
//! `w(a, b) = α(b) + 3 + max(Σθ⁺, Σ-θ⁻)`, where θ ranges over the
//! coefficients already collapsed through `b` plus `α(a)`. Each term takes
//! its cheapest pair (fewest remaining occurrences on ties), and the term
//! whose cheapest pair is most expensive is committed first.
//!
//! [`arbitrary_plan`] is the unoptimized baseline: a uniformly random pair
//! per term.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gadget::{GadgetMode, ReductionPlan};
use crate::poly::{Coeff, Pair, Polynomial, Triple};

/// Partial assignment during the greedy loop.
#[derive(Clone, Debug)]
pub struct GreedyState {
    alpha_triple: BTreeMap<Triple, Coeff>,
    alpha_pair: BTreeMap<Pair, Coeff>,
    /// Terms without a pair yet.
    pub remaining: BTreeSet<Triple>,
    /// Committed collapse sets.
    pub collapse: BTreeMap<Pair, BTreeSet<u32>>,
    /// Σ of positive and Σ of -negative coefficients already on each pair.
    sums: BTreeMap<Pair, (Coeff, Coeff)>,
    /// Number of remaining terms containing each pair.
    occurrences: BTreeMap<Pair, usize>,
}

impl GreedyState {
    pub fn new(poly: &Polynomial) -> Result<Self> {
        if poly.degree() > 3 {
            return Err(Error::InvalidArgument(format!(
                "precision planning handles cubic terms; polynomial has degree {}",
                poly.degree()
            )));
        }
        let alpha_triple: BTreeMap<Triple, Coeff> = poly.cubic_terms().into_iter().collect();
        let mut alpha_pair = BTreeMap::new();
        for (m, c) in poly.terms().filter(|(m, _)| m.degree() == 2) {
            if let Some(idx) = m.comp_indices() {
                alpha_pair.insert(Pair::new(idx[0], idx[1])?, c);
            }
        }
        let mut occurrences: BTreeMap<Pair, usize> = BTreeMap::new();
        for t in alpha_triple.keys() {
            for p in t.pairs() {
                *occurrences.entry(p).or_default() += 1;
            }
        }
        Ok(GreedyState {
            remaining: alpha_triple.keys().copied().collect(),
            alpha_triple,
            alpha_pair,
            collapse: BTreeMap::new(),
            sums: BTreeMap::new(),
            occurrences,
        })
    }

    pub fn alpha(&self, t: Triple) -> Coeff {
        self.alpha_triple.get(&t).copied().unwrap_or(0)
    }

    pub fn alpha_pair(&self, p: Pair) -> Coeff {
        self.alpha_pair.get(&p).copied().unwrap_or(0)
    }

    /// Place the prior collapse of `{b, k}` through `b`. Used to set up a
    /// state by hand; the greedy loop calls it for each committed term.
    pub fn commit(&mut self, a: Triple, b: Pair) -> Result<()> {
        let k = a
            .complement(b)
            .ok_or_else(|| Error::InvalidArgument(format!("pair {b} is not inside {a}")))?;
        let alpha = self.alpha(a);
        self.collapse.entry(b).or_default().insert(k);
        let (pos, neg) = self.sums.entry(b).or_insert((0, 0));
        if alpha > 0 {
            *pos = pos.checked_add(alpha).ok_or(Error::Overflow)?;
        } else {
            *neg = neg.checked_sub(alpha).ok_or(Error::Overflow)?;
        }
        if self.remaining.remove(&a) {
            for p in a.pairs() {
                if let Some(c) = self.occurrences.get_mut(&p) {
                    *c -= 1;
                }
            }
        }
        Ok(())
    }

    fn occurrences(&self, p: Pair) -> usize {
        self.occurrences.get(&p).copied().unwrap_or(0)
    }
}

/// Cost of collapsing term `a` through its pair `b` given the current state.
pub fn cost_w(a: Triple, b: Pair, state: &GreedyState) -> Result<Coeff> {
    if !a.contains_pair(b) {
        return Err(Error::InvalidArgument(format!(
            "pair {b} is not inside {a}"
        )));
    }
    let (mut pos, mut neg) = state.sums.get(&b).copied().unwrap_or((0, 0));
    let alpha = state.alpha(a);
    if alpha > 0 {
        pos = pos.checked_add(alpha).ok_or(Error::Overflow)?;
    } else {
        neg = neg.checked_sub(alpha).ok_or(Error::Overflow)?;
    }
    state
        .alpha_pair(b)
        .checked_add(3)
        .and_then(|v| v.checked_add(pos.max(neg)))
        .ok_or(Error::Overflow)
}

/// Cheapest pair for `a`, fewest remaining occurrences on ties, then smallest.
fn best_pair(a: Triple, state: &GreedyState) -> Result<(Pair, Coeff)> {
    let mut best: Option<(Pair, Coeff, usize)> = None;
    for b in a.pairs() {
        let w = cost_w(a, b, state)?;
        let occ = state.occurrences(b);
        let better = match best {
            None => true,
            Some((_, bw, bocc)) => w < bw || (w == bw && occ < bocc),
        };
        if better {
            best = Some((b, w, occ));
        }
    }
    let (b, w, _) = best.expect("a triple has three pairs");
    Ok((b, w))
}

pub fn greedy_precision_plan(poly: &Polynomial, mode: GadgetMode) -> Result<ReductionPlan> {
    let mut state = GreedyState::new(poly)?;
    while !state.remaining.is_empty() {
        let mut pick: Option<(Triple, Pair, Coeff)> = None;
        for &a in &state.remaining {
            let (b, w) = best_pair(a, &state)?;
            // strict comparison keeps the lexicographically smallest term
            if pick.is_none_or(|(_, _, pw)| w > pw) {
                pick = Some((a, b, w));
            }
        }
        let (d, b, _) = pick.expect("remaining is nonempty");
        state.commit(d, b)?;
    }
    let mut plan = ReductionPlan::new(mode);
    for (pair, ks) in state.collapse {
        for k in ks {
            plan.assign(pair, k)?;
        }
    }
    Ok(plan)
}

/// Baseline: each term collapses through a uniformly random one of its pairs.
pub fn arbitrary_plan(poly: &Polynomial, seed: u64, mode: GadgetMode) -> Result<ReductionPlan> {
    if poly.degree() > 3 {
        return Err(Error::InvalidArgument(format!(
            "precision planning handles cubic terms; polynomial has degree {}",
            poly.degree()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plan = ReductionPlan::new(mode);
    for (t, _) in poly.cubic_terms() {
        let b = t.pairs()[rng.gen_range(0..3)];
        plan.assign(b, t.complement(b).expect("pair inside triple"))?;
    }
    Ok(plan)
}
