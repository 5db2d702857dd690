//! Quartic reduction by weighted MaxSAT.
//!
//! Every candidate ancilla is a Boolean `r`: `r_ij` for a pair inside some
//! cubic or quartic term and `r_ijk` for a triple inside some quartic term.
//! Soft unit clauses `¬r` (weight 1) count ancillas used. Hard clauses say
//! that each triple ancilla has one of its sub-pairs available, that each
//! cubic term has one of its pairs, and that each quartic term has either a
//! disjoint pair of pairs or one of its triples.

mod apply;
mod solve;
mod wcnf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Pair, Polynomial, Triple};

pub use apply::apply_quartic_plan;
pub use solve::{solve_wmaxsat_exact, WMaxSatSolution, DEFAULT_WMAXSAT_BUDGET};
pub use wcnf::{emit_wcnf, parse_model, parse_wcnf};

/// Candidate ancilla. Pairs order before triples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RVar {
    Pair(Pair),
    Triple(Triple),
}

impl fmt::Display for RVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RVar::Pair(p) => write!(f, "r {} {}", p.lo(), p.hi()),
            RVar::Triple(t) => {
                let [i, j, k] = t.indices();
                write!(f, "r {i} {j} {k}")
            }
        }
    }
}

/// Weighted clause over DIMACS literals (1-based, negative = negated).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub lits: Vec<i32>,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WMaxSatInstance {
    /// Variable `v` (1-based) is `vars[v - 1]`.
    pub vars: Vec<RVar>,
    /// Soft clauses first, then the triple-availability clauses, then the
    /// term clauses.
    pub clauses: Vec<Clause>,
    pub hard_weight: u64,
}

impl WMaxSatInstance {
    pub fn is_hard(&self, c: &Clause) -> bool {
        c.weight >= self.hard_weight
    }

    pub fn soft_count(&self) -> usize {
        self.clauses.iter().filter(|c| !self.is_hard(c)).count()
    }

    pub fn hard_count(&self) -> usize {
        self.clauses.len() - self.soft_count()
    }

    pub fn var_index(&self, v: RVar) -> Option<i32> {
        self.vars.binary_search(&v).ok().map(|i| i as i32 + 1)
    }

    /// First hard clause the assignment leaves unsatisfied.
    pub fn violated_hard(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| self.is_hard(c) && !satisfied(c, assignment))
    }

    /// Total weight of satisfied clauses.
    pub fn satisfied_weight(&self, assignment: &[bool]) -> u64 {
        self.clauses
            .iter()
            .filter(|c| satisfied(c, assignment))
            .map(|c| c.weight)
            .sum()
    }
}

pub(crate) fn satisfied(c: &Clause, assignment: &[bool]) -> bool {
    c.lits.iter().any(|&l| {
        let value = assignment
            .get(l.unsigned_abs() as usize - 1)
            .copied()
            .unwrap_or(false);
        value == (l > 0)
    })
}

/// The three ways of splitting four indices into two disjoint pairs, in
/// lexicographic order.
pub fn disjoint_pairings(idx: [u32; 4]) -> [(Pair, Pair); 3] {
    let [i, j, k, l] = idx;
    let p = |a, b| Pair::new(a, b).expect("distinct indices");
    [(p(i, j), p(k, l)), (p(i, k), p(j, l)), (p(i, l), p(j, k))]
}

/// The four triples inside four indices, sorted.
pub fn sub_triples(idx: [u32; 4]) -> [Triple; 4] {
    let [i, j, k, l] = idx;
    let t = |a, b, c| Triple::new(a, b, c).expect("distinct indices");
    [t(i, j, k), t(i, j, l), t(i, k, l), t(j, k, l)]
}

fn sub_pairs(idx: &[u32]) -> Vec<Pair> {
    let mut out = Vec::new();
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            out.push(Pair::new(idx[a], idx[b]).expect("distinct indices"));
        }
    }
    out
}

/// Cubic and quartic terms of `poly` as sorted index lists.
pub(crate) fn high_terms(poly: &Polynomial) -> (Vec<[u32; 3]>, Vec<[u32; 4]>) {
    let mut cubic = Vec::new();
    let mut quartic = Vec::new();
    for (m, _) in poly.terms() {
        match m.comp_indices().as_deref() {
            Some(&[i, j, k]) => cubic.push([i, j, k]),
            Some(&[i, j, k, l]) => quartic.push([i, j, k, l]),
            _ => {}
        }
    }
    (cubic, quartic)
}

pub fn build_wmaxsat(poly: &Polynomial) -> Result<WMaxSatInstance> {
    if poly.variables().iter().any(|v| v.is_ancilla()) {
        return Err(Error::InvalidArgument(
            "polynomial already contains ancillas".into(),
        ));
    }
    let (cubic, quartic) = high_terms(poly);
    let mut vars: BTreeSet<RVar> = BTreeSet::new();
    for t in &cubic {
        vars.extend(sub_pairs(t).into_iter().map(RVar::Pair));
    }
    for q in &quartic {
        vars.extend(sub_pairs(q).into_iter().map(RVar::Pair));
        vars.extend(sub_triples(*q).into_iter().map(RVar::Triple));
    }
    let vars: Vec<RVar> = vars.into_iter().collect();
    let index: BTreeMap<RVar, i32> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i as i32 + 1))
        .collect();
    let hard_weight = vars.len() as u64 + 1;
    let pair = |p: Pair| index[&RVar::Pair(p)];

    let mut clauses: Vec<Clause> = index
        .values()
        .map(|&v| Clause {
            lits: vec![-v],
            weight: 1,
        })
        .collect();
    for (v, &i) in &index {
        if let RVar::Triple(t) = v {
            let mut lits = vec![-i];
            lits.extend(t.pairs().into_iter().map(pair));
            clauses.push(Clause {
                lits,
                weight: hard_weight,
            });
        }
    }
    for t in &cubic {
        clauses.push(Clause {
            lits: sub_pairs(t).into_iter().map(pair).collect(),
            weight: hard_weight,
        });
    }
    for q in &quartic {
        let triples: Vec<i32> = sub_triples(*q)
            .into_iter()
            .map(|t| index[&RVar::Triple(t)])
            .collect();
        let pairings = disjoint_pairings(*q);
        // distribute (a1 ∧ b1) ∨ (a2 ∧ b2) ∨ (a3 ∧ b3) into eight clauses
        for choice in 0..8u32 {
            let mut lits: Vec<i32> = pairings
                .iter()
                .enumerate()
                .map(|(m, (a, b))| pair(if choice >> (2 - m) & 1 == 0 { *a } else { *b }))
                .collect();
            lits.extend(&triples);
            clauses.push(Clause {
                lits,
                weight: hard_weight,
            });
        }
    }
    Ok(WMaxSatInstance {
        vars,
        clauses,
        hard_weight,
    })
}

/// Ancillas chosen for a quartic reduction. Each triple records the pair
/// ancilla it is built from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuarticAncillaSet {
    pub pairs: BTreeSet<Pair>,
    pub triples: BTreeMap<Triple, Pair>,
}

impl QuarticAncillaSet {
    pub fn len(&self) -> usize {
        self.pairs.len() + self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() && self.triples.is_empty()
    }

    pub fn check(&self) -> Result<()> {
        for (t, p) in &self.triples {
            if !t.contains_pair(*p) || !self.pairs.contains(p) {
                return Err(Error::InvalidArgument(format!(
                    "triple ancilla {t} needs a selected intermediate pair inside it, got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Read the chosen ancillas off a model. A triple takes as intermediate the
/// selected sub-pair shared with the most other selected triples, smallest
/// on ties.
pub fn decode_ancilla_set(
    inst: &WMaxSatInstance,
    assignment: &[bool],
) -> Result<QuarticAncillaSet> {
    if assignment.len() != inst.vars.len() {
        return Err(Error::InvalidArgument(format!(
            "model assigns {} variables, instance has {}",
            assignment.len(),
            inst.vars.len()
        )));
    }
    if let Some(c) = inst.violated_hard(assignment) {
        return Err(Error::HardClauseViolated(c + 1));
    }
    let mut set = QuarticAncillaSet::default();
    let mut chosen_triples = Vec::new();
    for (v, on) in inst.vars.iter().zip(assignment) {
        match (v, on) {
            (RVar::Pair(p), true) => {
                set.pairs.insert(*p);
            }
            (RVar::Triple(t), true) => chosen_triples.push(*t),
            _ => {}
        }
    }
    let mut shared: BTreeMap<Pair, usize> = BTreeMap::new();
    for t in &chosen_triples {
        for p in t.pairs() {
            *shared.entry(p).or_default() += 1;
        }
    }
    for t in chosen_triples {
        let best = t
            .pairs()
            .into_iter()
            .filter(|p| set.pairs.contains(p))
            .rev()
            .max_by_key(|p| shared[p])
            .ok_or_else(|| Error::InvalidArgument(format!("no intermediate pair for {t}")))?;
        set.triples.insert(t, best);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    fn quartic_term() -> Polynomial {
        Polynomial::from_terms(4, [(Monomial::comp(&[1, 2, 3, 4]), 1)]).unwrap()
    }

    #[test]
    fn single_quartic_counts() {
        let inst = build_wmaxsat(&quartic_term()).unwrap();
        let pairs = inst
            .vars
            .iter()
            .filter(|v| matches!(v, RVar::Pair(_)))
            .count();
        assert_eq!((pairs, inst.vars.len() - pairs), (6, 4));
        assert_eq!(inst.hard_weight, 11);
        assert_eq!(inst.soft_count(), 10);
        let f2 = inst
            .clauses
            .iter()
            .filter(|c| c.lits.iter().any(|l| *l < 0) && c.lits.len() == 4);
        assert_eq!(f2.count(), 4);
        let f3 = inst.clauses.iter().filter(|c| c.lits.len() == 7);
        assert_eq!(f3.count(), 8);
        assert_eq!(inst.hard_count(), 12);
    }

    #[test]
    fn single_cubic_clause() {
        let f = Polynomial::from_terms(3, [(Monomial::comp(&[1, 2, 3]), -2)]).unwrap();
        let inst = build_wmaxsat(&f).unwrap();
        assert_eq!(inst.vars.len(), 3);
        let hard: Vec<_> = inst.clauses.iter().filter(|c| inst.is_hard(c)).collect();
        assert_eq!(hard.len(), 1);
        assert_eq!(hard[0].lits, vec![1, 2, 3]);
    }

    #[test]
    fn trivial_without_high_terms() {
        let f = Polynomial::from_terms(2, [(Monomial::comp(&[1, 2]), 3)]).unwrap();
        let inst = build_wmaxsat(&f).unwrap();
        assert!(inst.vars.is_empty() && inst.clauses.is_empty());
        assert_eq!(inst.hard_weight, 1);
    }

    #[test]
    fn variable_bound() {
        let mut f = Polynomial::new(6);
        for q in [[1, 2, 3, 4], [3, 4, 5, 6], [1, 2, 5, 6], [2, 3, 4, 5]] {
            f.add_term(Monomial::comp(&q), 1).unwrap();
        }
        f.add_term(Monomial::comp(&[1, 3, 6]), 1).unwrap();
        let inst = build_wmaxsat(&f).unwrap();
        assert!(inst.vars.len() <= 20 + 15);
    }

    #[test]
    fn all_true_satisfies_hard_clauses() {
        let mut f = quartic_term();
        f.extend_n(6);
        f.add_term(Monomial::comp(&[2, 5, 6]), 3).unwrap();
        let inst = build_wmaxsat(&f).unwrap();
        assert_eq!(inst.violated_hard(&vec![true; inst.vars.len()]), None);
    }

    #[test]
    fn decode_pairs_and_triples() {
        let inst = build_wmaxsat(&quartic_term()).unwrap();
        let mut model = vec![false; inst.vars.len()];
        let on = |m: &mut Vec<bool>, v: RVar| m[inst.var_index(v).unwrap() as usize - 1] = true;
        on(&mut model, RVar::Pair(Pair::new(1, 2).unwrap()));
        on(&mut model, RVar::Pair(Pair::new(3, 4).unwrap()));
        let set = decode_ancilla_set(&inst, &model).unwrap();
        assert_eq!(set.pairs.len(), 2);
        assert!(set.triples.is_empty());

        let mut model = vec![false; inst.vars.len()];
        on(&mut model, RVar::Pair(Pair::new(2, 3).unwrap()));
        on(&mut model, RVar::Triple(Triple::new(1, 2, 3).unwrap()));
        let set = decode_ancilla_set(&inst, &model).unwrap();
        assert_eq!(
            set.triples[&Triple::new(1, 2, 3).unwrap()],
            Pair::new(2, 3).unwrap()
        );
        set.check().unwrap();

        let mut model = vec![false; inst.vars.len()];
        on(&mut model, RVar::Triple(Triple::new(1, 2, 3).unwrap()));
        assert!(matches!(
            decode_ancilla_set(&inst, &model),
            Err(Error::HardClauseViolated(_))
        ));
    }
}
