//! Exact weighted MaxSAT for instances whose soft clauses are unit clauses.
//!
//! Depth-first search with unit propagation on the hard clauses. The bound
//! adds, to the soft weight already lost, one cheapest forced loss per hard
//! clause in a set of unsatisfied clauses with pairwise disjoint free
//! variables.

use super::WMaxSatInstance;
use crate::error::{Error, Result};

pub const DEFAULT_WMAXSAT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WMaxSatSolution {
    pub assignment: Vec<bool>,
    /// Weight of the violated soft clauses.
    pub cost: u64,
    pub proven_optimal: bool,
    pub nodes: u64,
}

impl WMaxSatSolution {
    pub fn true_count(&self) -> usize {
        self.assignment.iter().filter(|b| **b).count()
    }
}

struct Search<'a> {
    hard: Vec<&'a [i32]>,
    /// Soft weight lost by setting a variable to false / true.
    pen: Vec<[u64; 2]>,
    val: Vec<Option<bool>>,
    best: Option<Vec<bool>>,
    best_cost: u64,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

fn var(l: i32) -> usize {
    l.unsigned_abs() as usize - 1
}

impl Search<'_> {
    fn lit(&self, l: i32) -> Option<bool> {
        self.val[var(l)].map(|b| b == (l > 0))
    }

    fn cheap(&self, v: usize) -> bool {
        self.pen[v][1] < self.pen[v][0]
    }

    fn extra(&self, l: i32) -> u64 {
        let v = var(l);
        self.pen[v][(l > 0) as usize] - self.pen[v][0].min(self.pen[v][1])
    }

    /// Assign forced literals until fixpoint. Returns false on conflict.
    fn propagate(&mut self, trail: &mut Vec<usize>) -> bool {
        loop {
            let mut changed = false;
            for c in 0..self.hard.len() {
                let mut free = None;
                let mut count = 0;
                let mut sat = false;
                for &l in self.hard[c] {
                    match self.lit(l) {
                        Some(true) => {
                            sat = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            count += 1;
                            free = Some(l);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match (count, free) {
                    (0, _) => return false,
                    (1, Some(l)) => {
                        self.val[var(l)] = Some(l > 0);
                        trail.push(var(l));
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn dfs(&mut self) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let mut trail = Vec::new();
        if self.propagate(&mut trail) {
            self.explore();
        }
        for v in trail {
            self.val[v] = None;
        }
    }

    fn explore(&mut self) {
        let mut cost = 0u64;
        for (v, value) in self.val.iter().enumerate() {
            cost += match value {
                Some(b) => self.pen[v][*b as usize],
                None => self.pen[v][0].min(self.pen[v][1]),
            };
        }
        let open: Vec<usize> = (0..self.hard.len())
            .filter(|&c| !self.hard[c].iter().any(|&l| self.lit(l) == Some(true)))
            .collect();
        if open.is_empty() {
            if cost < self.best_cost {
                self.best_cost = cost;
                let filled = (0..self.val.len())
                    .map(|v| self.val[v].unwrap_or_else(|| self.cheap(v)))
                    .collect();
                self.best = Some(filled);
            }
            return;
        }

        let mut used = vec![false; self.val.len()];
        let mut bound = cost;
        let mut by_size: Vec<(usize, usize)> = open
            .iter()
            .map(|&c| {
                (
                    self.hard[c]
                        .iter()
                        .filter(|&&l| self.lit(l).is_none())
                        .count(),
                    c,
                )
            })
            .collect();
        by_size.sort_unstable();
        for &(_, c) in &by_size {
            let free: Vec<i32> = self.hard[c]
                .iter()
                .copied()
                .filter(|&l| self.lit(l).is_none())
                .collect();
            if free.iter().any(|&l| used[var(l)]) {
                continue;
            }
            let loss = free.iter().map(|&l| self.extra(l)).min().unwrap_or(0);
            if loss > 0 {
                bound += loss;
                for &l in &free {
                    used[var(l)] = true;
                }
            }
        }
        if bound >= self.best_cost {
            return;
        }

        let mut occurrences = vec![0usize; self.val.len()];
        for &c in &open {
            for &l in self.hard[c] {
                if self.lit(l).is_none() {
                    occurrences[var(l)] += 1;
                }
            }
        }
        let mut branch = 0;
        for v in 1..occurrences.len() {
            if occurrences[v] > occurrences[branch] {
                branch = v;
            }
        }
        for value in [true, false] {
            self.val[branch] = Some(value);
            self.dfs();
            self.val[branch] = None;
        }
    }
}

/// Maximize satisfied weight. Every soft clause must be a unit clause; hard
/// clauses are those at or above `hard_weight`.
pub fn solve_wmaxsat_exact(inst: &WMaxSatInstance, node_budget: u64) -> Result<WMaxSatSolution> {
    let n = inst.vars.len();
    let mut pen = vec![[0u64; 2]; n];
    let mut hard = Vec::new();
    for c in &inst.clauses {
        if c.lits.iter().any(|&l| l == 0 || var(l) >= n) {
            return Err(Error::InvalidArgument(format!(
                "literal outside 1..={n} in {:?}",
                c.lits
            )));
        }
        if inst.is_hard(c) {
            hard.push(c.lits.as_slice());
        } else if let [l] = c.lits[..] {
            // the clause is lost when the variable takes the opposite value
            pen[var(l)][(l < 0) as usize] += c.weight;
        } else {
            return Err(Error::InvalidArgument(
                "soft clauses must be unit clauses".into(),
            ));
        }
    }
    let all_true = vec![true; n];
    let start_ok = inst.violated_hard(&all_true).is_none();
    let start_cost = pen.iter().map(|p| p[1]).sum::<u64>();
    let mut search = Search {
        hard,
        pen,
        val: vec![None; n],
        best: start_ok.then_some(all_true),
        best_cost: if start_ok { start_cost } else { u64::MAX },
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    search.dfs();
    let assignment = search.best.ok_or_else(|| {
        if search.exhausted {
            Error::BudgetExhausted("no assignment satisfies the hard clauses yet".into())
        } else {
            Error::InvalidArgument("hard clauses are unsatisfiable".into())
        }
    })?;
    Ok(WMaxSatSolution {
        assignment,
        cost: search.best_cost,
        proven_optimal: !search.exhausted,
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Monomial, Polynomial};
    use crate::quartic::{build_wmaxsat, Clause};

    fn brute_force(inst: &WMaxSatInstance) -> u64 {
        let n = inst.vars.len();
        (0u64..1 << n)
            .filter_map(|mask| {
                let a: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
                inst.violated_hard(&a)
                    .is_none()
                    .then(|| mask.count_ones() as u64)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn quartic_needs_two() {
        let f = Polynomial::from_terms(4, [(Monomial::comp(&[1, 2, 3, 4]), 1)]).unwrap();
        let inst = build_wmaxsat(&f).unwrap();
        let sol = solve_wmaxsat_exact(&inst, DEFAULT_WMAXSAT_BUDGET).unwrap();
        assert!(sol.proven_optimal);
        assert_eq!((sol.true_count(), sol.cost), (2, 2));
        assert_eq!(brute_force(&inst), 2);
        assert_eq!(inst.satisfied_weight(&sol.assignment), 11 * 12 + 10 - 2);
    }

    #[test]
    fn cubic_needs_one() {
        let f = Polynomial::from_terms(3, [(Monomial::comp(&[1, 2, 3]), 1)]).unwrap();
        let inst = build_wmaxsat(&f).unwrap();
        let sol = solve_wmaxsat_exact(&inst, DEFAULT_WMAXSAT_BUDGET).unwrap();
        assert_eq!(sol.true_count(), 1);
        assert_eq!(brute_force(&inst), 1);
    }

    #[test]
    fn budget_keeps_incumbent() {
        let mut f = Polynomial::new(6);
        for q in [[1, 2, 3, 4], [3, 4, 5, 6], [1, 2, 5, 6]] {
            f.add_term(Monomial::comp(&q), 1).unwrap();
        }
        let inst = build_wmaxsat(&f).unwrap();
        let sol = solve_wmaxsat_exact(&inst, 1).unwrap();
        assert!(!sol.proven_optimal);
        assert_eq!(inst.violated_hard(&sol.assignment), None);
    }

    #[test]
    fn rejects_non_unit_soft() {
        let inst = WMaxSatInstance {
            vars: Vec::new(),
            clauses: vec![Clause {
                lits: vec![1, 2],
                weight: 1,
            }],
            hard_weight: 5,
        };
        assert!(solve_wmaxsat_exact(&inst, 10).is_err());
    }
}
