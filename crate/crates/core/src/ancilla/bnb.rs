//! Branch-and-bound for unit-cost 0-1 covering programs.
//!
//! Each node branches on the free column covering the most uncovered rows:
//! include it first, then exclude it. Rows left with a single free column
//! force that column. The bound at a node is the larger of a dual-feasible
//! fractional bound and a packing of rows with pairwise disjoint columns.

use super::IlpInstance;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpSolution {
    pub v: Vec<bool>,
    pub cost: u32,
    /// No cheaper feasible vector exists.
    pub proven_optimal: bool,
    /// `Mv ≥ b` holds for `v`.
    pub feasible: bool,
    pub nodes: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Free,
    In,
    Out,
}

struct Search {
    row_cols: Vec<Vec<usize>>,
    col_rows: Vec<Vec<usize>>,
    status: Vec<Status>,
    cover_count: Vec<u32>,
    uncovered: usize,
    chosen: usize,
    best: Vec<bool>,
    best_cost: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search {
    fn include(&mut self, col: usize) {
        self.status[col] = Status::In;
        self.chosen += 1;
        for &r in &self.col_rows[col] {
            if self.cover_count[r] == 0 {
                self.uncovered -= 1;
            }
            self.cover_count[r] += 1;
        }
    }

    fn uninclude(&mut self, col: usize) {
        self.status[col] = Status::Free;
        self.chosen -= 1;
        for &r in &self.col_rows[col] {
            self.cover_count[r] -= 1;
            if self.cover_count[r] == 0 {
                self.uncovered += 1;
            }
        }
    }

    fn lower_bound(&self, coverage: &[usize]) -> Option<usize> {
        let mut dual = 0.0f64;
        let mut rows: Vec<(usize, usize)> = Vec::new();
        for (r, cols) in self.row_cols.iter().enumerate() {
            if self.cover_count[r] > 0 {
                continue;
            }
            let free = cols.iter().filter(|&&c| self.status[c] == Status::Free);
            let (count, best) = free.fold((0, 0), |(n, b), &c| (n + 1, b.max(coverage[c])));
            if count == 0 {
                return None;
            }
            dual += 1.0 / best as f64;
            rows.push((count, r));
        }
        rows.sort_unstable();
        let mut used = vec![false; self.status.len()];
        let mut packing = 0;
        for (_, r) in rows {
            let cols = &self.row_cols[r];
            let free = || cols.iter().filter(|&&c| self.status[c] == Status::Free);
            if free().all(|&c| !used[c]) {
                packing += 1;
                for &c in free() {
                    used[c] = true;
                }
            }
        }
        let dual = (dual - 1e-9).ceil().max(0.0) as usize;
        Some(dual.max(packing))
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
        if self.uncovered == 0 {
            if self.chosen < self.best_cost {
                self.best_cost = self.chosen;
                self.best = self.status.iter().map(|s| *s == Status::In).collect();
            }
            return;
        }
        let coverage: Vec<usize> = self
            .col_rows
            .iter()
            .enumerate()
            .map(|(c, rows)| {
                if self.status[c] != Status::Free {
                    return 0;
                }
                rows.iter().filter(|&&r| self.cover_count[r] == 0).count()
            })
            .collect();
        let Some(bound) = self.lower_bound(&coverage) else {
            return;
        };
        if self.chosen + bound >= self.best_cost {
            return;
        }

        let forced = self.row_cols.iter().enumerate().find_map(|(r, cols)| {
            if self.cover_count[r] > 0 {
                return None;
            }
            let mut free = cols.iter().filter(|&&c| self.status[c] == Status::Free);
            match (free.next(), free.next()) {
                (Some(&c), None) => Some(c),
                _ => None,
            }
        });
        if let Some(col) = forced {
            self.include(col);
            self.dfs();
            self.uninclude(col);
            return;
        }

        let mut col = 0;
        for c in 1..coverage.len() {
            if coverage[c] > coverage[col] {
                col = c;
            }
        }
        self.include(col);
        self.dfs();
        self.uninclude(col);

        self.status[col] = Status::Out;
        self.dfs();
        self.status[col] = Status::Free;
    }
}

fn adjacency(ilp: &IlpInstance) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut row_cols = vec![Vec::new(); ilp.rows()];
    let mut col_rows = vec![Vec::new(); ilp.cols()];
    for (r, row) in ilp.m.iter().enumerate() {
        for (c, &entry) in row.iter().enumerate() {
            if entry != 0 {
                row_cols[r].push(c);
                col_rows[c].push(r);
            }
        }
    }
    (row_cols, col_rows)
}

/// Greedy cover: repeatedly take the column covering the most uncovered
/// rows, lowest index on ties. `None` if some row cannot be covered.
pub fn greedy_cover(ilp: &IlpInstance) -> Option<Vec<bool>> {
    let (row_cols, col_rows) = adjacency(ilp);
    if row_cols.iter().any(Vec::is_empty) {
        return None;
    }
    let mut covered = vec![false; ilp.rows()];
    let mut left = ilp.rows();
    let mut v = vec![false; ilp.cols()];
    while left > 0 {
        let mut best = (0, 0);
        for (c, rows) in col_rows.iter().enumerate() {
            let gain = rows.iter().filter(|&&r| !covered[r]).count();
            if gain > best.1 {
                best = (c, gain);
            }
        }
        v[best.0] = true;
        for &r in &col_rows[best.0] {
            if !covered[r] {
                covered[r] = true;
                left -= 1;
            }
        }
    }
    Some(v)
}

/// Solve a unit-cost covering ILP exactly within `node_budget` search nodes.
/// On exhaustion the best cover found so far is returned unproven.
pub fn solve_ilp_exact(ilp: &IlpInstance, node_budget: u64) -> IlpSolution {
    debug_assert!(ilp.c.iter().all(|&c| c == 1), "covering ILP has unit costs");
    let Some(start) = greedy_cover(ilp) else {
        return IlpSolution {
            v: vec![true; ilp.cols()],
            cost: ilp.cols() as u32,
            proven_optimal: false,
            feasible: false,
            nodes: 0,
        };
    };
    let (row_cols, col_rows) = adjacency(ilp);
    let best_cost = start.iter().filter(|b| **b).count();
    let mut search = Search {
        status: vec![Status::Free; ilp.cols()],
        cover_count: vec![0; ilp.rows()],
        uncovered: ilp.rows(),
        chosen: 0,
        best: start,
        best_cost,
        nodes: 0,
        budget: node_budget,
        exhausted: false,
        row_cols,
        col_rows,
    };
    search.dfs();
    IlpSolution {
        cost: search.best_cost as u32,
        v: search.best,
        proven_optimal: !search.exhausted,
        feasible: true,
        nodes: search.nodes,
    }
}
