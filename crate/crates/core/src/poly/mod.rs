//! Exact integer multilinear pseudo-Boolean polynomials.
//!
//! A [`Polynomial`] is the unique multilinear representation
//! `f(x) = Σ_S c_S Π_{i∈S} x_i` of a pseudo-Boolean function with integer
//! coefficients. Variables are either computational (`x1..xn`, 1-based) or
//! ancillas introduced by a reduction; ancillas sort after every
//! computational variable.

mod brute;
mod ising;
mod precision;
mod pubo;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub use brute::{brute_force_minima, Minima, DEFAULT_ENUMERATION_CAP};
pub use ising::{to_ising, IsingForm};
pub use precision::{control_precision, OffsetPolicy, PrecisionReport};
pub use pubo::{emit_polynomial, parse_polynomial};

/// Integer coefficient type. All coefficient arithmetic is checked.
pub type Coeff = i64;

/// Highest monomial degree accepted anywhere in the crate.
pub const MAX_DEGREE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRef {
    /// 1-based computational variable.
    Comp(u32),
    /// Dense 0-based index into an ancilla registry.
    Anc(u32),
}

impl VarRef {
    pub fn is_ancilla(self) -> bool {
        matches!(self, VarRef::Anc(_))
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRef::Comp(i) => write!(f, "x{i}"),
            VarRef::Anc(a) => write!(f, "y{a}"),
        }
    }
}

/// A sorted set of distinct variables. `x·x` collapses to `x` on construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<VarRef>);

impl Monomial {
    pub fn new(vars: impl IntoIterator<Item = VarRef>) -> Self {
        let mut vars: Vec<VarRef> = vars.into_iter().collect();
        vars.sort_unstable();
        vars.dedup();
        Monomial(vars)
    }

    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn comp(indices: &[u32]) -> Self {
        Self::new(indices.iter().map(|&i| VarRef::Comp(i)))
    }

    pub fn vars(&self) -> &[VarRef] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: VarRef) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Computational indices when the monomial has no ancilla factor.
    pub fn comp_indices(&self) -> Option<Vec<u32>> {
        self.0
            .iter()
            .map(|v| match v {
                VarRef::Comp(i) => Some(*i),
                VarRef::Anc(_) => None,
            })
            .collect()
    }

    pub fn product(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (pos, v) in self.0.iter().enumerate() {
            if pos > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Unordered pair of computational indices, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair(u32, u32);

impl Pair {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Pair(a, b)),
            std::cmp::Ordering::Greater => Ok(Pair(b, a)),
            std::cmp::Ordering::Equal => Err(Error::InvalidArgument(format!(
                "pair needs two distinct indices, got {a} twice"
            ))),
        }
    }

    pub fn lo(self) -> u32 {
        self.0
    }

    pub fn hi(self) -> u32 {
        self.1
    }

    pub fn contains(self, i: u32) -> bool {
        self.0 == i || self.1 == i
    }

    pub fn disjoint(self, other: Pair) -> bool {
        !other.contains(self.0) && !other.contains(self.1)
    }

    pub fn monomial(self) -> Monomial {
        Monomial::comp(&[self.0, self.1])
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// Unordered triple of distinct computational indices, stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple([u32; 3]);

impl Triple {
    pub fn new(a: u32, b: u32, c: u32) -> Result<Self> {
        let mut t = [a, b, c];
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] {
            return Err(Error::InvalidArgument(format!(
                "triple needs three distinct indices, got {a}, {b}, {c}"
            )));
        }
        Ok(Triple(t))
    }

    pub fn indices(self) -> [u32; 3] {
        self.0
    }

    /// The three pairs inside the triple, lexicographically ordered.
    pub fn pairs(self) -> [Pair; 3] {
        let [a, b, c] = self.0;
        [Pair(a, b), Pair(a, c), Pair(b, c)]
    }

    pub fn contains_pair(self, p: Pair) -> bool {
        self.0.contains(&p.0) && self.0.contains(&p.1)
    }

    /// The index left over after removing `p`, if `p` lies inside the triple.
    pub fn complement(self, p: Pair) -> Option<u32> {
        if !self.contains_pair(p) {
            return None;
        }
        self.0.iter().copied().find(|&i| !p.contains(i))
    }

    pub fn monomial(self) -> Monomial {
        Monomial::comp(&self.0)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{},{}}}", self.0[0], self.0[1], self.0[2])
    }
}

/// Multilinear polynomial with nonzero integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    n: u32,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    /// Empty polynomial over `n` computational variables.
    pub fn new(n: u32) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(n: u32, terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Result<Self> {
        let mut p = Polynomial::new(n);
        for (m, c) in terms {
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    /// Number of declared computational variables.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Raise the declared computational variable count.
    pub fn extend_n(&mut self, n: u32) {
        self.n = self.n.max(n);
    }

    /// Add `coeff` to the coefficient of `mono`, dropping it if it cancels.
    pub fn add_term(&mut self, mono: Monomial, coeff: Coeff) -> Result<()> {
        if mono.degree() > MAX_DEGREE {
            return Err(Error::DegreeTooHigh {
                term: mono.to_string(),
                degree: mono.degree(),
                max: MAX_DEGREE,
            });
        }
        for v in mono.vars() {
            if let VarRef::Comp(i) = *v {
                if i == 0 || i > self.n {
                    return Err(Error::VariableOutOfRange {
                        index: i as i64,
                        n: self.n,
                    });
                }
            }
        }
        if coeff == 0 {
            return Ok(());
        }
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().checked_add(coeff).ok_or(Error::Overflow)?;
                if sum == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    /// `self += factor * other`. The computational range widens to cover `other`.
    pub fn add_scaled(&mut self, other: &Polynomial, factor: Coeff) -> Result<()> {
        self.extend_n(other.n);
        for (m, c) in &other.terms {
            let scaled = c.checked_mul(factor).ok_or(Error::Overflow)?;
            self.add_term(m.clone(), scaled)?;
        }
        Ok(())
    }

    pub fn coefficient(&self, mono: &Monomial) -> Coeff {
        self.terms.get(mono).copied().unwrap_or(0)
    }

    pub fn constant(&self) -> Coeff {
        self.coefficient(&Monomial::one())
    }

    /// Terms in lexicographic monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Coeff)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Every variable appearing in some term.
    pub fn variables(&self) -> BTreeSet<VarRef> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().iter().copied())
            .collect()
    }

    /// Nonzero terms whose variables are exactly three computational indices.
    pub fn cubic_terms(&self) -> Vec<(Triple, Coeff)> {
        self.terms
            .iter()
            .filter(|(m, _)| m.degree() == 3)
            .filter_map(|(m, c)| {
                let idx = m.comp_indices()?;
                Triple::new(idx[0], idx[1], idx[2]).ok().map(|t| (t, *c))
            })
            .collect()
    }

    /// Coefficient on the computational quadratic term `x_i x_j`.
    pub fn pair_coefficient(&self, p: Pair) -> Coeff {
        self.coefficient(&p.monomial())
    }

    /// Exact value at an assignment given as a lookup function.
    pub fn evaluate_with(&self, lookup: impl Fn(VarRef) -> Option<bool>) -> Result<i128> {
        let mut total: i128 = 0;
        for (m, c) in &self.terms {
            let mut on = true;
            for v in m.vars() {
                let bit = lookup(*v).ok_or(Error::MissingVariable(*v))?;
                on &= bit;
            }
            if on {
                total += *c as i128;
            }
        }
        Ok(total)
    }

    pub fn evaluate(&self, x: &BTreeMap<VarRef, bool>) -> Result<i128> {
        self.evaluate_with(|v| x.get(&v).copied())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.terms.iter().enumerate() {
            if pos > 0 {
                write!(f, " ")?;
                if *c >= 0 {
                    write!(f, "+")?;
                }
            }
            if m.degree() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}
