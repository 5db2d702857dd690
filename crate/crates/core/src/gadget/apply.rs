use std::collections::BTreeMap;

use super::{penalty_s, AncillaDef, AncillaRegistry, GadgetMode, ReducedInstance, ReductionPlan};
use crate::error::{Error, Result};
use crate::poly::{Coeff, Monomial, Pair, Polynomial, Triple, VarRef};

/// `(pair, m)`: the penalty scale of copy `m` of the pair's ancilla.
/// `m` is always 1 in single-ancilla mode.
pub type DeltaKey = (Pair, u8);

fn group_delta(coeffs: impl IntoIterator<Item = Coeff>) -> Result<Coeff> {
    let (mut pos, mut neg) = (0 as Coeff, 0 as Coeff);
    for c in coeffs {
        if c > 0 {
            pos = pos.checked_add(c).ok_or(Error::Overflow)?;
        } else {
            neg = neg.checked_sub(c).ok_or(Error::Overflow)?;
        }
    }
    pos.max(neg).checked_add(1).ok_or(Error::Overflow)
}

/// Smallest sound penalty scale for a group of terms sharing one ancilla:
/// `1 + max(Σ positive, Σ -negative)`.
pub fn delta_for_group(coeffs: &[Coeff]) -> Result<Coeff> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("empty coefficient group".into()));
    }
    if coeffs.contains(&0) {
        return Err(Error::InvalidArgument("zero coefficient in group".into()));
    }
    group_delta(coeffs.iter().copied())
}

/// Three-way integer split of `alpha` keyed on `alpha mod 3` (taken in
/// `{0, 1, 2}` for every sign), summing back to `alpha`.
pub fn beta_split(alpha: Coeff) -> Result<[Coeff; 3]> {
    if alpha == 0 {
        return Err(Error::InvalidArgument(
            "cannot split a zero coefficient".into(),
        ));
    }
    Ok(match alpha.rem_euclid(3) {
        0 => [alpha / 3, alpha / 3, alpha / 3],
        1 => [(alpha + 2) / 3, (alpha - 1) / 3, (alpha - 1) / 3],
        _ => [(alpha + 1) / 3, (alpha + 1) / 3, (alpha - 2) / 3],
    })
}

/// Collapse one term `alpha x_i x_j x_k` through the pair `collapse`:
/// `alpha y x_k + (1 + |alpha|) s(x_i, x_j, y)` with the ancilla `y = Anc(0)`.
pub fn reduce_single_term(
    alpha: Coeff,
    triple: Triple,
    collapse: Pair,
) -> Result<(Polynomial, AncillaDef)> {
    if alpha == 0 {
        return Err(Error::InvalidArgument("zero coefficient".into()));
    }
    let k = triple
        .complement(collapse)
        .ok_or_else(|| Error::InvalidArgument(format!("pair {collapse} is not inside {triple}")))?;
    let y = VarRef::Anc(0);
    let mut out = Polynomial::new(triple.indices()[2]);
    out.add_term(Monomial::new([y, VarRef::Comp(k)]), alpha)?;
    let s = penalty_s(VarRef::Comp(collapse.lo()), VarRef::Comp(collapse.hi()), y)?;
    let scale = alpha
        .checked_abs()
        .and_then(|a| a.checked_add(1))
        .ok_or(Error::Overflow)?;
    out.add_scaled(&s, scale)?;
    Ok((out, AncillaDef::Pair(collapse)))
}

/// Coefficient carried by copy `m` for a term with coefficient `alpha`.
fn carried(mode: GadgetMode, alpha: Coeff, m: u8) -> Result<Coeff> {
    match mode {
        GadgetMode::SingleAncilla => Ok(alpha),
        GadgetMode::TripleAncilla => Ok(beta_split(alpha)?[m as usize - 1]),
    }
}

fn triple_coefficient(poly: &Polynomial, pair: Pair, k: u32) -> Result<Coeff> {
    let t = Triple::new(pair.lo(), pair.hi(), k)?;
    Ok(poly.coefficient(&t.monomial()))
}

/// Optimal penalty scales for every `(pair, copy)` of a valid plan.
pub fn plan_deltas(poly: &Polynomial, plan: &ReductionPlan) -> Result<BTreeMap<DeltaKey, Coeff>> {
    plan.validate(poly)?;
    let mut out = BTreeMap::new();
    for (pair, ks) in plan.collapse() {
        if ks.is_empty() {
            continue;
        }
        for m in 1..=plan.mode.copies() {
            let mut carried_coeffs = Vec::with_capacity(ks.len());
            for &k in ks {
                carried_coeffs.push(carried(plan.mode, triple_coefficient(poly, *pair, k)?, m)?);
            }
            out.insert((*pair, m), group_delta(carried_coeffs)?);
        }
    }
    Ok(out)
}

pub fn apply_plan(poly: &Polynomial, plan: &ReductionPlan) -> Result<ReducedInstance> {
    let deltas = plan_deltas(poly, plan)?;
    apply_plan_with_deltas(poly, plan, &deltas)
}

/// Apply `plan` with caller-chosen penalty scales. Scales below the optimum
/// break soundness; this entry point exists to exhibit exactly that.
pub fn apply_plan_with_deltas(
    poly: &Polynomial,
    plan: &ReductionPlan,
    deltas: &BTreeMap<DeltaKey, Coeff>,
) -> Result<ReducedInstance> {
    plan.validate(poly)?;
    let mut out = Polynomial::new(poly.n());
    for (m, c) in poly.terms().filter(|(m, _)| m.degree() <= 2) {
        out.add_term(m.clone(), c)?;
    }
    let mut registry = AncillaRegistry::new();
    for (pair, ks) in plan.collapse() {
        if ks.is_empty() {
            continue;
        }
        for m in 1..=plan.mode.copies() {
            let def = match plan.mode {
                GadgetMode::SingleAncilla => AncillaDef::Pair(*pair),
                GadgetMode::TripleAncilla => AncillaDef::PairCopy(*pair, m),
            };
            let y = VarRef::Anc(registry.insert(def)?);
            for &k in ks {
                let c = carried(plan.mode, triple_coefficient(poly, *pair, k)?, m)?;
                out.add_term(Monomial::new([y, VarRef::Comp(k)]), c)?;
            }
            let delta = *deltas.get(&(*pair, m)).ok_or_else(|| {
                Error::InvalidPlan(format!("no penalty scale for pair {pair} copy {m}"))
            })?;
            let s = penalty_s(VarRef::Comp(pair.lo()), VarRef::Comp(pair.hi()), y)?;
            out.add_scaled(&s, delta)?;
        }
    }
    Ok(ReducedInstance {
        quadratic: out,
        registry,
        source_n: poly.n(),
    })
}

/// Largest coefficient magnitude the plan introduces:
/// `max(max 3δ_ij^(m), max |α_ij + Σ_m δ_ij^(m)|)`.
pub fn max_introduced_coefficient(plan: &ReductionPlan, poly: &Polynomial) -> Result<Coeff> {
    let deltas = plan_deltas(poly, plan)?;
    let mut best: Coeff = 0;
    let mut pair_sums: BTreeMap<Pair, Coeff> = BTreeMap::new();
    for ((pair, _), d) in &deltas {
        best = best.max(d.checked_mul(3).ok_or(Error::Overflow)?);
        let sum = pair_sums.entry(*pair).or_insert(0);
        *sum = sum.checked_add(*d).ok_or(Error::Overflow)?;
    }
    for (pair, sum) in pair_sums {
        let total = poly
            .pair_coefficient(pair)
            .checked_add(sum)
            .ok_or(Error::Overflow)?;
        best = best.max(total.checked_abs().ok_or(Error::Overflow)?);
    }
    Ok(best)
}
