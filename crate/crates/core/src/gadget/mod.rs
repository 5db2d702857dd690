//! Exact classical gadgets.
//!
//! A cubic term `α x_i x_j x_k` is rewritten as `α y x_k` where the ancilla
//! `y` stands for `x_i x_j`, and a scaled penalty `δ s(x_i, x_j, y)` makes
//! every assignment with `y ≠ x_i x_j` strictly worse. Terms sharing a pair
//! share its ancilla. The triple-ancilla variant splits each coefficient
//! three ways over copies `y^(1..3)` of the same conjunction, which cuts the
//! largest penalty coefficient roughly by three.

mod apply;
mod penalty;
mod qubo;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Pair, Polynomial, Triple, VarRef};

pub use apply::{
    apply_plan, apply_plan_with_deltas, beta_split, delta_for_group, max_introduced_coefficient,
    plan_deltas, reduce_single_term, DeltaKey,
};
pub use penalty::{penalty_s, search_penalties, verify_penalty_minimality, PenaltySearch};
pub use qubo::{emit_qubo, parse_qubo};

/// What an ancilla variable stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AncillaDef {
    /// `x_i x_j`.
    Pair(Pair),
    /// Copy `m ∈ {1, 2, 3}` of `x_i x_j` used by the triple-ancilla gadget.
    PairCopy(Pair, u8),
    /// `x_i x_j x_k`, built from the `Pair(base)` ancilla and `x_k`.
    TripleViaPair { base: Pair, k: u32 },
}

impl AncillaDef {
    /// The computational variables whose conjunction this ancilla encodes.
    pub fn support(self) -> Vec<u32> {
        match self {
            AncillaDef::Pair(p) | AncillaDef::PairCopy(p, _) => vec![p.lo(), p.hi()],
            AncillaDef::TripleViaPair { base, k } => {
                let mut v = vec![base.lo(), base.hi(), k];
                v.sort_unstable();
                v
            }
        }
    }

    pub fn triple(self) -> Option<Triple> {
        match self {
            AncillaDef::TripleViaPair { base, k } => Triple::new(base.lo(), base.hi(), k).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for AncillaDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AncillaDef::Pair(p) => write!(f, "x{}x{}", p.lo(), p.hi()),
            AncillaDef::PairCopy(p, m) => write!(f, "x{}x{}^({m})", p.lo(), p.hi()),
            AncillaDef::TripleViaPair { base, k } => {
                write!(f, "x{}x{}^{k}", base.lo(), base.hi())
            }
        }
    }
}

/// Ordered ancilla namespace; index `a` is the variable `VarRef::Anc(a)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AncillaRegistry {
    entries: Vec<AncillaDef>,
    lookup: BTreeMap<AncillaDef, u32>,
}

impl AncillaRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register `def`, returning its index. Re-registering returns the
    /// existing index. A triple ancilla needs its base pair registered first.
    pub fn insert(&mut self, def: AncillaDef) -> Result<u32> {
        if let Some(&idx) = self.lookup.get(&def) {
            return Ok(idx);
        }
        match def {
            AncillaDef::PairCopy(_, m) if !(1..=3).contains(&m) => {
                return Err(Error::InvalidArgument(format!(
                    "ancilla copy index {m} outside 1..=3"
                )))
            }
            AncillaDef::TripleViaPair { base, k } => {
                if base.contains(k) {
                    return Err(Error::InvalidArgument(format!(
                        "triple ancilla third index {k} lies inside base pair {base}"
                    )));
                }
                if !self.lookup.contains_key(&AncillaDef::Pair(base)) {
                    return Err(Error::InvalidArgument(format!(
                        "triple ancilla {def} registered before its base pair"
                    )));
                }
            }
            _ => {}
        }
        let idx = self.entries.len() as u32;
        self.entries.push(def);
        self.lookup.insert(def, idx);
        Ok(idx)
    }

    pub fn index_of(&self, def: &AncillaDef) -> Option<u32> {
        self.lookup.get(def).copied()
    }

    pub fn get(&self, idx: u32) -> Option<AncillaDef> {
        self.entries.get(idx as usize).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, AncillaDef)> + '_ {
        self.entries.iter().enumerate().map(|(i, d)| (i as u32, *d))
    }

    /// Variables whose consistency the penalty on ancilla `idx` enforces:
    /// `(lhs, rhs)` such that the ancilla must equal `lhs · rhs`.
    pub fn inputs(&self, idx: u32) -> Option<(VarRef, VarRef)> {
        match self.get(idx)? {
            AncillaDef::Pair(p) | AncillaDef::PairCopy(p, _) => {
                Some((VarRef::Comp(p.lo()), VarRef::Comp(p.hi())))
            }
            AncillaDef::TripleViaPair { base, k } => {
                let base_idx = self.index_of(&AncillaDef::Pair(base))?;
                Some((VarRef::Anc(base_idx), VarRef::Comp(k)))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GadgetMode {
    /// One ancilla per collapsing pair, scaled by the grouped optimal δ.
    #[default]
    SingleAncilla,
    /// Three ancilla copies per collapsing pair carrying the split coefficients.
    TripleAncilla,
}

impl GadgetMode {
    pub fn copies(self) -> u8 {
        match self {
            GadgetMode::SingleAncilla => 1,
            GadgetMode::TripleAncilla => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GadgetMode::SingleAncilla => "single",
            GadgetMode::TripleAncilla => "triple",
        }
    }
}

/// Assignment of each cubic term to the pair whose ancilla collapses it:
/// `collapse[{i,j}]` is the set `K_ij` of third indices `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionPlan {
    pub mode: GadgetMode,
    collapse: BTreeMap<Pair, BTreeSet<u32>>,
}

impl ReductionPlan {
    pub fn new(mode: GadgetMode) -> Self {
        ReductionPlan {
            mode,
            collapse: BTreeMap::new(),
        }
    }

    /// Collapse the term `{pair, k}` through `pair`'s ancilla.
    pub fn assign(&mut self, pair: Pair, k: u32) -> Result<()> {
        if pair.contains(k) {
            return Err(Error::InvalidPlan(format!(
                "index {k} cannot be collapsed through its own pair {pair}"
            )));
        }
        self.collapse.entry(pair).or_default().insert(k);
        Ok(())
    }

    pub fn with_mode(mut self, mode: GadgetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn collapse(&self) -> &BTreeMap<Pair, BTreeSet<u32>> {
        &self.collapse
    }

    /// Number of distinct collapsing pairs (ancillas in single mode).
    pub fn pair_count(&self) -> usize {
        self.collapse.values().filter(|k| !k.is_empty()).count()
    }

    pub fn ancilla_count(&self) -> usize {
        self.pair_count() * self.mode.copies() as usize
    }

    /// Pair assigned to each covered triple.
    pub fn assignments(&self) -> BTreeMap<Triple, Vec<Pair>> {
        let mut out: BTreeMap<Triple, Vec<Pair>> = BTreeMap::new();
        for (pair, ks) in &self.collapse {
            for &k in ks {
                let t = Triple::new(pair.lo(), pair.hi(), k).expect("k outside pair");
                out.entry(t).or_default().push(*pair);
            }
        }
        out
    }

    /// Every cubic term of `poly` is collapsed by exactly one pair, and
    /// nothing else is.
    pub fn validate(&self, poly: &Polynomial) -> Result<()> {
        if poly.degree() > 3 {
            return Err(Error::InvalidPlan(format!(
                "polynomial has degree {}; cubic gadgets need degree <= 3",
                poly.degree()
            )));
        }
        let assigned = self.assignments();
        for (t, _) in poly.cubic_terms() {
            match assigned.get(&t).map(Vec::len) {
                None => return Err(Error::InvalidPlan(format!("cubic term {t} is not covered"))),
                Some(1) => {}
                Some(_) => {
                    return Err(Error::InvalidPlan(format!(
                        "cubic term {t} is covered more than once"
                    )))
                }
            }
        }
        for t in assigned.keys() {
            if poly.coefficient(&t.monomial()) == 0 {
                return Err(Error::InvalidPlan(format!(
                    "plan collapses {t}, which is not a term of the polynomial"
                )));
            }
        }
        Ok(())
    }
}

/// Quadratic polynomial over computational and ancilla variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedInstance {
    pub quadratic: Polynomial,
    pub registry: AncillaRegistry,
    pub source_n: u32,
}

impl ReducedInstance {
    /// Identity reduction of a polynomial that is already quadratic.
    pub fn identity(poly: &Polynomial) -> Result<Self> {
        if poly.degree() > 2 {
            return Err(Error::InvalidArgument(format!(
                "identity reduction needs degree <= 2, got {}",
                poly.degree()
            )));
        }
        Ok(ReducedInstance {
            quadratic: poly.clone(),
            registry: AncillaRegistry::new(),
            source_n: poly.n(),
        })
    }

    pub fn ancilla_count(&self) -> usize {
        self.registry.len()
    }

    pub fn total_vars(&self) -> usize {
        self.source_n as usize + self.registry.len()
    }

    /// Check the structural invariants: degree at most two, and every
    /// referenced ancilla is registered.
    pub fn check(&self) -> Result<()> {
        if self.quadratic.degree() > 2 {
            return Err(Error::InvalidArgument(format!(
                "reduced polynomial has degree {}",
                self.quadratic.degree()
            )));
        }
        for v in self.quadratic.variables() {
            if let VarRef::Anc(a) = v {
                if a as usize >= self.registry.len() {
                    return Err(Error::InvalidArgument(format!(
                        "ancilla {v} missing from registry"
                    )));
                }
            }
        }
        Ok(())
    }
}
