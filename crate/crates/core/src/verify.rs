//! Brute-force verification of reductions.
//!
//! The pointwise check asserts that for every computational assignment `x`,
//! minimizing the reduced polynomial over its ancillas gives back the source
//! value at `x`, and that each independent group of ancillas reaches that
//! minimum at exactly one assignment (a wrong ancilla value must cost
//! strictly more). Equal values everywhere imply equal argmin sets, so the
//! ground-state projection is only enumerated separately when the pointwise
//! check fails.
//!
//! Ancillas that never share a term are independent once `x` is fixed, so
//! the ancillas are split into connected components and each component is
//! minimized on its own. The enumeration cap applies to `n` plus the largest
//! component.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::ancilla::{build_set_cover, quarter_squares, set_cover_to_ilp, solve_ilp_exact};
use crate::error::{Error, Result};
use crate::gadget::ReducedInstance;
use crate::poly::{
    control_precision, Monomial, OffsetPolicy, Polynomial, PrecisionReport, VarRef,
    DEFAULT_ENUMERATION_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// Minimum over ancillas differs from the source value.
    Pointwise,
    /// Values agree but a wrong ancilla assignment ties the right one, so
    /// the penalty does not strictly enforce the ancilla definitions.
    AncillaTie,
    GroundState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: FailureKind,
    /// Values of `x1..xn`.
    pub assignment: Vec<bool>,
    pub source_value: i128,
    pub reduced_min: i128,
}

impl Counterexample {
    pub fn bits(&self) -> String {
        self.assignment
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub pointwise_ok: bool,
    pub ground_state_ok: bool,
    pub counterexample: Option<Counterexample>,
    /// `None` for the zero polynomial.
    pub precision_before: Option<PrecisionReport>,
    pub precision_after: Option<PrecisionReport>,
    pub ancilla_count: usize,
    pub assignments_checked: u64,
    pub largest_component: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.pointwise_ok && self.ground_state_ok
    }
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pointwise: {}", flag(self.pointwise_ok))?;
        writeln!(f, "ground_state: {}", flag(self.ground_state_ok))?;
        writeln!(f, "ancilla: {}", self.ancilla_count)?;
        writeln!(f, "assignments_checked: {}", self.assignments_checked)?;
        writeln!(f, "largest_ancilla_component: {}", self.largest_component)?;
        let prec = |p: &Option<PrecisionReport>| {
            p.as_ref()
                .map_or("n/a".to_string(), |p| p.control_precision.to_string())
        };
        writeln!(f, "precision_before: {}", prec(&self.precision_before))?;
        writeln!(f, "precision_after: {}", prec(&self.precision_after))?;
        if let Some(c) = &self.counterexample {
            let kind = match c.kind {
                FailureKind::Pointwise => "pointwise",
                FailureKind::AncillaTie => "ancilla_tie",
                FailureKind::GroundState => "ground_state",
            };
            writeln!(
                f,
                "counterexample: {kind} x={} source={} reduced_min={}",
                c.bits(),
                c.source_value,
                c.reduced_min
            )?;
        }
        Ok(())
    }
}

/// Terms as bit masks: bit `i-1` of `comp` is `x_i`, bit `b` of `anc` is the
/// `b`-th ancilla of the owning component.
struct MaskedTerm {
    comp: u64,
    anc: u64,
    coeff: i128,
}

struct Compiled {
    n: u32,
    free: Vec<MaskedTerm>,
    components: Vec<(usize, Vec<MaskedTerm>)>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn comp_mask(m: &Monomial) -> u64 {
    m.vars().iter().fold(0, |acc, v| match v {
        VarRef::Comp(i) => acc | 1 << (i - 1),
        VarRef::Anc(_) => acc,
    })
}

fn compile(poly: &Polynomial, n: u32) -> Compiled {
    let ancillas: Vec<u32> = poly
        .variables()
        .into_iter()
        .filter_map(|v| match v {
            VarRef::Anc(a) => Some(a),
            VarRef::Comp(_) => None,
        })
        .collect();
    let slot: BTreeMap<u32, usize> = ancillas.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut parent: Vec<usize> = (0..ancillas.len()).collect();
    for (m, _) in poly.terms() {
        let mut first = None;
        for v in m.vars() {
            if let VarRef::Anc(a) = v {
                let s = slot[a];
                match first {
                    None => first = Some(s),
                    Some(f) => {
                        let (ra, rb) = (find(&mut parent, f), find(&mut parent, s));
                        parent[ra] = rb;
                    }
                }
            }
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for s in 0..ancillas.len() {
        let root = find(&mut parent, s);
        members.entry(root).or_default().push(s);
    }
    let mut position = vec![(0usize, 0usize); ancillas.len()];
    let mut components: Vec<(usize, Vec<MaskedTerm>)> = Vec::new();
    for (ci, group) in members.values().enumerate() {
        for (bit, s) in group.iter().enumerate() {
            position[*s] = (ci, bit);
        }
        components.push((group.len(), Vec::new()));
    }
    let mut free = Vec::new();
    for (m, c) in poly.terms() {
        let comp = comp_mask(m);
        let mut owner = None;
        let mut anc = 0u64;
        for v in m.vars() {
            if let VarRef::Anc(a) = v {
                let (ci, bit) = position[slot[a]];
                owner = Some(ci);
                anc |= 1 << bit;
            }
        }
        let term = MaskedTerm {
            comp,
            anc,
            coeff: c as i128,
        };
        match owner {
            None => free.push(term),
            Some(ci) => components[ci].1.push(term),
        }
    }
    Compiled {
        n,
        free,
        components,
    }
}

impl Compiled {
    fn largest_component(&self) -> usize {
        self.components.iter().map(|(k, _)| *k).max().unwrap_or(0)
    }

    /// Minimum over ancillas at `x`, and whether every component attains it
    /// at a single ancilla assignment.
    fn min_at(&self, x: u64, scratch: &mut Vec<(u64, i128)>) -> (i128, bool) {
        let mut total: i128 = self
            .free
            .iter()
            .filter(|t| x & t.comp == t.comp)
            .map(|t| t.coeff)
            .sum();
        let mut unique = true;
        for (k, terms) in &self.components {
            scratch.clear();
            scratch.extend(
                terms
                    .iter()
                    .filter(|t| x & t.comp == t.comp)
                    .map(|t| (t.anc, t.coeff)),
            );
            let mut best = i128::MAX;
            let mut ties = 0u32;
            for y in 0u64..1 << k {
                let v: i128 = scratch
                    .iter()
                    .filter(|(mask, _)| y & mask == *mask)
                    .map(|(_, c)| c)
                    .sum();
                if v < best {
                    best = v;
                    ties = 1;
                } else if v == best {
                    ties += 1;
                }
            }
            unique &= ties == 1;
            total += best;
        }
        (total, unique)
    }
}

fn source_at(source: &[MaskedTerm], x: u64) -> i128 {
    source
        .iter()
        .filter(|t| x & t.comp == t.comp)
        .map(|t| t.coeff)
        .sum()
}

const CHUNK: u64 = 1 << 12;

#[derive(Default)]
struct Scan {
    mismatch: Option<(u64, i128, i128)>,
    source_min: Option<i128>,
    reduced_min: Option<i128>,
}

fn merge_min(a: Option<i128>, b: Option<i128>) -> Option<i128> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

pub fn verify_reduction(
    original: &Polynomial,
    reduced: &ReducedInstance,
    cap: usize,
) -> Result<VerificationReport> {
    if original.variables().iter().any(|v| v.is_ancilla()) {
        return Err(Error::InvalidArgument(
            "source polynomial must not contain ancillas".into(),
        ));
    }
    let max_comp = reduced
        .quadratic
        .variables()
        .into_iter()
        .filter_map(|v| match v {
            VarRef::Comp(i) => Some(i),
            VarRef::Anc(_) => None,
        })
        .max()
        .unwrap_or(0);
    let n = original.n().max(reduced.source_n).max(max_comp);
    let compiled = compile(&reduced.quadratic, n);
    let count = n as usize + compiled.largest_component();
    if count > cap || count > 63 {
        return Err(Error::TooManyVariables { count, cap });
    }
    let source: Vec<MaskedTerm> = original
        .terms()
        .map(|(m, c)| MaskedTerm {
            comp: comp_mask(m),
            anc: 0,
            coeff: c as i128,
        })
        .collect();

    let total = 1u64 << compiled.n;
    let chunks = total.div_ceil(CHUNK);
    let scans: Vec<Scan> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut scan = Scan::default();
            let mut scratch = Vec::new();
            for x in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                let want = source_at(&source, x);
                let (got, unique) = compiled.min_at(x, &mut scratch);
                if (want != got || !unique) && scan.mismatch.is_none() {
                    scan.mismatch = Some((x, want, got));
                }
                scan.source_min = merge_min(scan.source_min, Some(want));
                scan.reduced_min = merge_min(scan.reduced_min, Some(got));
            }
            scan
        })
        .collect();
    let mut all = Scan::default();
    for s in scans {
        if all.mismatch.is_none() {
            all.mismatch = s.mismatch;
        }
        all.source_min = merge_min(all.source_min, s.source_min);
        all.reduced_min = merge_min(all.reduced_min, s.reduced_min);
    }

    let to_bits = |x: u64| (0..compiled.n).map(|b| x >> b & 1 == 1).collect::<Vec<_>>();
    let pointwise_ok = all.mismatch.is_none();
    let mut counterexample = all.mismatch.map(|(x, want, got)| Counterexample {
        kind: if want == got {
            FailureKind::AncillaTie
        } else {
            FailureKind::Pointwise
        },
        assignment: to_bits(x),
        source_value: want,
        reduced_min: got,
    });
    let mut ground_state_ok = true;
    if !pointwise_ok {
        let (smin, rmin) = (all.source_min.unwrap(), all.reduced_min.unwrap());
        let differs = (0..total).into_par_iter().find_first(|&x| {
            let mut scratch = Vec::new();
            (source_at(&source, x) == smin) != (compiled.min_at(x, &mut scratch).0 == rmin)
        });
        if let Some(x) = differs {
            ground_state_ok = false;
            let mut scratch = Vec::new();
            counterexample.get_or_insert(Counterexample {
                kind: FailureKind::GroundState,
                assignment: to_bits(x),
                source_value: source_at(&source, x),
                reduced_min: compiled.min_at(x, &mut scratch).0,
            });
        }
    }

    let precision = |p: &Polynomial| match control_precision(p, OffsetPolicy::Include) {
        Ok(r) => Ok(Some(r)),
        Err(Error::EmptyPolynomial) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(VerificationReport {
        pointwise_ok,
        ground_state_ok,
        counterexample,
        precision_before: precision(original)?,
        precision_after: precision(&reduced.quadratic)?,
        ancilla_count: reduced.registry.len(),
        assignments_checked: total,
        largest_component: compiled.largest_component(),
    })
}

/// [`verify_reduction`] with the default cap.
pub fn verify_default(
    original: &Polynomial,
    reduced: &ReducedInstance,
) -> Result<VerificationReport> {
    verify_reduction(original, reduced, DEFAULT_ENUMERATION_CAP)
}

/// The exact minimum number of pairs covering every cubic term over `n`
/// variables equals `⌊(n-1)²/4⌋`.
pub fn verify_saturation(n: u32, node_budget: u64) -> Result<bool> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "saturation needs n >= 3, got {n}"
        )));
    }
    let mut poly = Polynomial::new(n);
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                poly.add_term(Monomial::comp(&[i, j, k]), 1)?;
            }
        }
    }
    let ilp = set_cover_to_ilp(&build_set_cover(&poly)?);
    let sol = solve_ilp_exact(&ilp, node_budget);
    if !sol.proven_optimal {
        return Err(Error::BudgetExhausted(format!(
            "complete cubic cover on {n} variables: best {} after {} nodes",
            sol.cost, sol.nodes
        )));
    }
    Ok(sol.cost as u64 == quarter_squares(n as u64)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ancilla::{mantel_construction, DEFAULT_NODE_BUDGET};
    use crate::gadget::{
        apply_plan, apply_plan_with_deltas, plan_deltas, GadgetMode, ReductionPlan,
    };
    use crate::poly::{Coeff, Pair};

    fn cubic(n: u32, terms: &[([u32; 3], Coeff)]) -> Polynomial {
        Polynomial::from_terms(n, terms.iter().map(|(t, c)| (Monomial::comp(t), *c))).unwrap()
    }

    fn shared_plan(mode: GadgetMode) -> (Polynomial, ReductionPlan) {
        let f = cubic(4, &[([1, 2, 3], 3), ([1, 2, 4], -2)]);
        let mut plan = ReductionPlan::new(mode);
        plan.assign(Pair::new(1, 2).unwrap(), 3).unwrap();
        plan.assign(Pair::new(1, 2).unwrap(), 4).unwrap();
        (f, plan)
    }

    #[test]
    fn sound_plans_pass() {
        for mode in [GadgetMode::SingleAncilla, GadgetMode::TripleAncilla] {
            let (f, plan) = shared_plan(mode);
            let r = verify_default(&f, &apply_plan(&f, &plan).unwrap()).unwrap();
            assert!(r.passed(), "{r}");
            assert!(r.counterexample.is_none());
        }
    }

    #[test]
    fn lowered_delta_is_caught() {
        let f = cubic(3, &[([1, 2, 3], -5)]);
        let mut plan = ReductionPlan::new(GadgetMode::SingleAncilla);
        plan.assign(Pair::new(1, 2).unwrap(), 3).unwrap();
        let mut deltas = plan_deltas(&f, &plan).unwrap();
        for d in deltas.values_mut() {
            *d -= 1;
        }
        let reduced = apply_plan_with_deltas(&f, &plan, &deltas).unwrap();
        let r = verify_default(&f, &reduced).unwrap();
        assert!(!r.pointwise_ok);
        let c = r.counterexample.unwrap();
        assert_eq!(c.kind, FailureKind::AncillaTie);
        // x1 = 1, x2 = 0, x3 = 1: switching the ancilla on costs nothing
        assert_eq!(c.bits(), "101");
        assert_eq!((c.source_value, c.reduced_min), (0, 0));

        for d in deltas.values_mut() {
            *d -= 1;
        }
        let reduced = apply_plan_with_deltas(&f, &plan, &deltas).unwrap();
        let c = verify_default(&f, &reduced)
            .unwrap()
            .counterexample
            .unwrap();
        assert_eq!(c.kind, FailureKind::Pointwise);
        assert_eq!(
            (c.bits().as_str(), c.source_value, c.reduced_min),
            ("101", 0, -1)
        );
    }

    #[test]
    fn identity_on_quadratic() {
        let f = Polynomial::from_terms(
            3,
            [(Monomial::comp(&[1, 2]), -3), (Monomial::comp(&[3]), 2)],
        )
        .unwrap();
        let reduced = ReducedInstance::identity(&f).unwrap();
        assert_eq!(reduced.quadratic, f);
        let r = verify_default(&f, &reduced).unwrap();
        assert!(r.passed());
        assert_eq!(r.ancilla_count, 0);
    }

    #[test]
    fn ground_state_mismatch_reported() {
        let f = Polynomial::from_terms(2, [(Monomial::comp(&[1]), -1)]).unwrap();
        let g = Polynomial::from_terms(2, [(Monomial::comp(&[2]), -1)]).unwrap();
        let r = verify_default(&f, &ReducedInstance::identity(&g).unwrap()).unwrap();
        assert!(!r.pointwise_ok && !r.ground_state_ok);
    }

    #[test]
    fn cap_counts_largest_component() {
        let f = cubic(3, &[([1, 2, 3], 1)]);
        let mut plan = ReductionPlan::new(GadgetMode::TripleAncilla);
        plan.assign(Pair::new(1, 2).unwrap(), 3).unwrap();
        let reduced = apply_plan(&f, &plan).unwrap();
        assert_eq!(reduced.ancilla_count(), 3);
        let r = verify_reduction(&f, &reduced, 4).unwrap();
        assert_eq!(r.largest_component, 1);
        assert!(matches!(
            verify_reduction(&f, &reduced, 3),
            Err(Error::TooManyVariables { count: 4, cap: 3 })
        ));
    }

    #[test]
    fn saturation_small() {
        assert!(verify_saturation(6, DEFAULT_NODE_BUDGET).unwrap());
        assert!(verify_saturation(7, DEFAULT_NODE_BUDGET).unwrap());
        assert!(matches!(
            verify_saturation(7, 2),
            Err(Error::BudgetExhausted(_))
        ));
        assert_eq!(mantel_construction(7).len(), 9);
    }
}
