//! Minimum-ancilla planning.
//!
//! Choosing the fewest collapsing pairs for a set of cubic terms is set
//! cover: the universe is the set of cubic terms, and each pair inside some
//! term covers the terms containing it. The cover is written as a 0-1 ILP
//! `min cᵀv s.t. Mv ≥ b` and solved exactly by branch-and-bound, with the
//! ReduceMin greedy as starting incumbent and fallback.

mod bnb;
mod lp;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gadget::{GadgetMode, ReductionPlan};
use crate::poly::{Pair, Polynomial, Triple};

pub use bnb::{greedy_cover, solve_ilp_exact, IlpSolution, DEFAULT_NODE_BUDGET};
pub use lp::emit_lp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverInstance {
    /// Cubic terms, lexicographically ordered.
    pub universe: Vec<Triple>,
    /// Every pair inside some term, lexicographically ordered, with the
    /// indices of the universe elements it covers.
    pub candidates: Vec<(Pair, Vec<usize>)>,
}

impl SetCoverInstance {
    /// Whether the selected candidates cover every universe element.
    pub fn is_cover(&self, selected: &[bool]) -> bool {
        let mut covered = vec![false; self.universe.len()];
        for ((_, covers), on) in self.candidates.iter().zip(selected) {
            if *on {
                for &u in covers {
                    covered[u] = true;
                }
            }
        }
        covered.into_iter().all(|c| c)
    }
}

/// `min cᵀv` subject to `Mv ≥ b`, `v ∈ {0,1}^|S|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpInstance {
    pub c: Vec<u32>,
    /// `|U| × |S|`, row-major.
    pub m: Vec<Vec<u8>>,
    pub b: Vec<u32>,
}

impl IlpInstance {
    pub fn rows(&self) -> usize {
        self.m.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }

    pub fn is_feasible(&self, v: &[bool]) -> bool {
        self.m.iter().zip(&self.b).all(|(row, &b)| {
            let lhs: u32 = row
                .iter()
                .zip(v)
                .map(|(&m, &on)| if on { m as u32 } else { 0 })
                .sum();
            lhs >= b
        })
    }

    pub fn cost(&self, v: &[bool]) -> u32 {
        self.c
            .iter()
            .zip(v)
            .filter(|(_, on)| **on)
            .map(|(c, _)| c)
            .sum()
    }
}

pub fn build_set_cover(poly: &Polynomial) -> Result<SetCoverInstance> {
    if poly.degree() > 3 {
        return Err(Error::InvalidArgument(format!(
            "set cover planning handles cubic terms; polynomial has degree {}",
            poly.degree()
        )));
    }
    let universe: Vec<Triple> = poly.cubic_terms().into_iter().map(|(t, _)| t).collect();
    let mut covers: BTreeMap<Pair, Vec<usize>> = BTreeMap::new();
    for (u, t) in universe.iter().enumerate() {
        for p in t.pairs() {
            covers.entry(p).or_default().push(u);
        }
    }
    Ok(SetCoverInstance {
        universe,
        candidates: covers.into_iter().collect(),
    })
}

/// Columns follow candidate order. An empty universe gives the empty ILP.
pub fn set_cover_to_ilp(sc: &SetCoverInstance) -> IlpInstance {
    let cols = sc.candidates.len();
    let mut m = vec![vec![0u8; cols]; sc.universe.len()];
    for (j, (_, covers)) in sc.candidates.iter().enumerate() {
        for &u in covers {
            m[u][j] = 1;
        }
    }
    IlpInstance {
        c: vec![1; cols],
        b: vec![1; sc.universe.len()],
        m,
    }
}

/// Turn a cover into collapse sets; a term covered by several selected
/// pairs goes to the lexicographically smallest one.
pub fn plan_from_cover(
    sc: &SetCoverInstance,
    v: &[bool],
    poly: &Polynomial,
    mode: GadgetMode,
) -> Result<ReductionPlan> {
    if v.len() != sc.candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "cover vector has length {}, expected {}",
            v.len(),
            sc.candidates.len()
        )));
    }
    let selected: BTreeSet<Pair> = sc
        .candidates
        .iter()
        .zip(v)
        .filter(|(_, on)| **on)
        .map(|((p, _), _)| *p)
        .collect();
    let mut plan = ReductionPlan::new(mode);
    for (u, t) in sc.universe.iter().enumerate() {
        let pair = t
            .pairs()
            .into_iter()
            .find(|p| selected.contains(p))
            .ok_or(Error::InfeasibleCover(u))?;
        plan.assign(pair, t.complement(pair).expect("pair inside triple"))?;
    }
    plan.validate(poly)?;
    Ok(plan)
}

/// ReduceMin: repeatedly collapse every remaining term through the pair
/// occurring in the most remaining terms (ties: smallest pair).
pub fn reduce_min_greedy(poly: &Polynomial, mode: GadgetMode) -> Result<ReductionPlan> {
    if poly.degree() > 3 {
        return Err(Error::InvalidArgument(format!(
            "ReduceMin handles cubic terms; polynomial has degree {}",
            poly.degree()
        )));
    }
    let mut remaining: BTreeSet<Triple> = poly.cubic_terms().into_iter().map(|(t, _)| t).collect();
    let mut plan = ReductionPlan::new(mode);
    while !remaining.is_empty() {
        let mut counts: BTreeMap<Pair, usize> = BTreeMap::new();
        for t in &remaining {
            for p in t.pairs() {
                *counts.entry(p).or_default() += 1;
            }
        }
        // max_by_key keeps the last maximum; iterate in reverse for the smallest pair.
        let (&best, _) = counts
            .iter()
            .rev()
            .max_by_key(|(_, c)| **c)
            .expect("remaining is nonempty");
        let hit: Vec<Triple> = remaining
            .iter()
            .filter(|t| t.contains_pair(best))
            .copied()
            .collect();
        for t in hit {
            plan.assign(best, t.complement(best).expect("pair inside triple"))?;
            remaining.remove(&t);
        }
    }
    Ok(plan)
}

/// `⌊(n-1)²/4⌋`: ancillas needed to reduce every cubic term over `n` variables.
pub fn quarter_squares(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "quarter squares needs n >= 2, got {n}"
        )));
    }
    Ok((n - 1) * (n - 1) / 4)
}

/// Split `1..=n` into halves of sizes `⌈n/2⌉` and `⌊n/2⌋` and take every
/// pair inside a half. Every triple has two members in the same half, so
/// these pairs cover all cubic terms, and there are `⌊(n-1)²/4⌋` of them.
pub fn mantel_construction(n: u32) -> Vec<Pair> {
    let split = n.div_ceil(2);
    let mut pairs = Vec::new();
    for (lo, hi) in [(1, split), (split + 1, n)] {
        for i in lo..=hi {
            for j in i + 1..=hi {
                pairs.push(Pair::new(i, j).expect("i < j"));
            }
        }
    }
    pairs
}

/// Minimum-ancilla plan: exact set cover when the budget allows, otherwise
/// the best cover found (at worst ReduceMin's).
pub fn min_ancilla_plan(
    poly: &Polynomial,
    mode: GadgetMode,
    node_budget: u64,
) -> Result<(ReductionPlan, IlpSolution)> {
    let sc = build_set_cover(poly)?;
    let ilp = set_cover_to_ilp(&sc);
    let sol = solve_ilp_exact(&ilp, node_budget);
    let plan = plan_from_cover(&sc, &sol.v, poly, mode)?;
    Ok((plan, sol))
}
