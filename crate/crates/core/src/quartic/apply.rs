use std::collections::{BTreeMap, BTreeSet};

use super::{disjoint_pairings, sub_triples, QuarticAncillaSet};
use crate::error::{Error, Result};
use crate::gadget::{penalty_s, AncillaDef, AncillaRegistry, ReducedInstance};
use crate::poly::{Coeff, Monomial, Pair, Polynomial, Triple, VarRef};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Used {
    Pair(Pair),
    Triple(Triple),
}

/// How one term is rewritten.
enum Rewrite {
    /// `x_p · x_k`
    PairTimesVar(Pair, u32),
    /// `x_p · x_q`
    PairTimesPair(Pair, Pair),
    /// `x_t · x_l`
    TripleTimesVar(Triple, u32),
}

fn choose(idx: &[u32], set: &QuarticAncillaSet) -> Result<Rewrite> {
    let name = || Monomial::comp(idx).to_string();
    match *idx {
        [i, j, k] => {
            let t = Triple::new(i, j, k)?;
            t.pairs()
                .into_iter()
                .find(|p| set.pairs.contains(p))
                .map(|p| Rewrite::PairTimesVar(p, t.complement(p).expect("pair inside triple")))
                .ok_or_else(|| Error::InsufficientAncillas(name()))
        }
        [i, j, k, l] => {
            let q = [i, j, k, l];
            if let Some((a, b)) = disjoint_pairings(q)
                .into_iter()
                .find(|(a, b)| set.pairs.contains(a) && set.pairs.contains(b))
            {
                return Ok(Rewrite::PairTimesPair(a, b));
            }
            sub_triples(q)
                .into_iter()
                .find(|t| set.triples.contains_key(t))
                .map(|t| {
                    let rest = q
                        .into_iter()
                        .find(|v| !t.indices().contains(v))
                        .expect("four indices");
                    Rewrite::TripleTimesVar(t, rest)
                })
                .ok_or_else(|| Error::InsufficientAncillas(name()))
        }
        _ => unreachable!("only cubic and quartic terms are rewritten"),
    }
}

/// Rewrite every cubic and quartic term with the ancillas in `set` and add
/// a penalty per used ancilla. Each penalty is scaled by one plus the sum of
/// `|α|` over the terms that depend on the ancilla, directly or through a
/// triple built on it.
pub fn apply_quartic_plan(poly: &Polynomial, set: &QuarticAncillaSet) -> Result<ReducedInstance> {
    set.check()?;
    let mut out = Polynomial::new(poly.n());
    let mut rewrites = Vec::new();
    for (m, c) in poly.terms() {
        if m.degree() <= 2 {
            out.add_term(m.clone(), c)?;
            continue;
        }
        let idx = m
            .comp_indices()
            .ok_or_else(|| Error::InvalidArgument("polynomial already contains ancillas".into()))?;
        rewrites.push((choose(&idx, set)?, c));
    }

    let mut weight: BTreeMap<Used, Coeff> = BTreeMap::new();
    let mut bump = |u: Used, c: Coeff| -> Result<()> {
        let w = weight.entry(u).or_insert(1);
        *w = w
            .checked_add(c.checked_abs().ok_or(Error::Overflow)?)
            .ok_or(Error::Overflow)?;
        Ok(())
    };
    for (r, c) in &rewrites {
        match *r {
            Rewrite::PairTimesVar(p, _) => bump(Used::Pair(p), *c)?,
            Rewrite::PairTimesPair(a, b) => {
                bump(Used::Pair(a), *c)?;
                bump(Used::Pair(b), *c)?;
            }
            Rewrite::TripleTimesVar(t, _) => {
                bump(Used::Triple(t), *c)?;
                bump(Used::Pair(set.triples[&t]), *c)?;
            }
        }
    }

    // pairs precede triples in `Used` order, so every base pair is registered first
    let mut registry = AncillaRegistry::new();
    let mut var_of: BTreeMap<Used, VarRef> = BTreeMap::new();
    let used: BTreeSet<Used> = weight.keys().copied().collect();
    for u in &used {
        let def = match *u {
            Used::Pair(p) => AncillaDef::Pair(p),
            Used::Triple(t) => {
                let base = set.triples[&t];
                AncillaDef::TripleViaPair {
                    base,
                    k: t.complement(base).expect("base inside triple"),
                }
            }
        };
        var_of.insert(*u, VarRef::Anc(registry.insert(def)?));
    }

    for (r, c) in rewrites {
        let mono = match r {
            Rewrite::PairTimesVar(p, k) => Monomial::new([var_of[&Used::Pair(p)], VarRef::Comp(k)]),
            Rewrite::PairTimesPair(a, b) => {
                Monomial::new([var_of[&Used::Pair(a)], var_of[&Used::Pair(b)]])
            }
            Rewrite::TripleTimesVar(t, l) => {
                Monomial::new([var_of[&Used::Triple(t)], VarRef::Comp(l)])
            }
        };
        out.add_term(mono, c)?;
    }
    for (u, delta) in &weight {
        let s = match *u {
            Used::Pair(p) => penalty_s(VarRef::Comp(p.lo()), VarRef::Comp(p.hi()), var_of[u])?,
            Used::Triple(t) => {
                let base = set.triples[&t];
                let k = t.complement(base).expect("base inside triple");
                penalty_s(var_of[&Used::Pair(base)], VarRef::Comp(k), var_of[u])?
            }
        };
        out.add_scaled(&s, *delta)?;
    }
    Ok(ReducedInstance {
        quadratic: out,
        registry,
        source_n: poly.n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::{
        build_wmaxsat, decode_ancilla_set, solve_wmaxsat_exact, DEFAULT_WMAXSAT_BUDGET,
    };
    use crate::verify::verify_default;

    fn pair(a: u32, b: u32) -> Pair {
        Pair::new(a, b).unwrap()
    }

    #[test]
    fn two_pairs_expansion() {
        let f = Polynomial::from_terms(4, [(Monomial::comp(&[1, 2, 3, 4]), 1)]).unwrap();
        let set = QuarticAncillaSet {
            pairs: [pair(1, 2), pair(3, 4)].into(),
            triples: BTreeMap::new(),
        };
        let r = apply_quartic_plan(&f, &set).unwrap();
        let (a, b) = (VarRef::Anc(0), VarRef::Anc(1));
        let mut expected = Polynomial::new(4);
        expected.add_term(Monomial::new([a, b]), 1).unwrap();
        expected
            .add_scaled(&penalty_s(VarRef::Comp(1), VarRef::Comp(2), a).unwrap(), 2)
            .unwrap();
        expected
            .add_scaled(&penalty_s(VarRef::Comp(3), VarRef::Comp(4), b).unwrap(), 2)
            .unwrap();
        assert_eq!(r.quadratic, expected);
        assert!(verify_default(&f, &r).unwrap().passed());
    }

    #[test]
    fn via_triple() {
        let f = Polynomial::from_terms(4, [(Monomial::comp(&[1, 2, 3, 4]), -3)]).unwrap();
        let set = QuarticAncillaSet {
            pairs: [pair(1, 2)].into(),
            triples: [(Triple::new(1, 2, 3).unwrap(), pair(1, 2))].into(),
        };
        let r = apply_quartic_plan(&f, &set).unwrap();
        assert_eq!(r.ancilla_count(), 2);
        assert_eq!(
            r.registry.get(1),
            Some(AncillaDef::TripleViaPair {
                base: pair(1, 2),
                k: 3
            })
        );
        assert_eq!(
            r.quadratic
                .coefficient(&Monomial::new([VarRef::Anc(1), VarRef::Comp(4)])),
            -3
        );
        assert!(verify_default(&f, &r).unwrap().passed());
    }

    #[test]
    fn insufficient_set_names_term() {
        let f = Polynomial::from_terms(4, [(Monomial::comp(&[1, 2, 3, 4]), 1)]).unwrap();
        let set = QuarticAncillaSet {
            pairs: [pair(1, 2)].into(),
            triples: BTreeMap::new(),
        };
        assert_eq!(
            apply_quartic_plan(&f, &set),
            Err(Error::InsufficientAncillas("x1*x2*x3*x4".into()))
        );
    }

    #[test]
    fn mixed_polynomial_pipeline() {
        let f = Polynomial::from_terms(
            6,
            [
                (Monomial::comp(&[1, 2, 3, 4]), 5),
                (Monomial::comp(&[2, 3, 4, 5]), -4),
                (Monomial::comp(&[1, 5, 6]), 3),
                (Monomial::comp(&[3, 4, 6]), -7),
                (Monomial::comp(&[2, 6]), 2),
                (Monomial::comp(&[5]), -1),
            ],
        )
        .unwrap();
        let inst = build_wmaxsat(&f).unwrap();
        let sol = solve_wmaxsat_exact(&inst, DEFAULT_WMAXSAT_BUDGET).unwrap();
        let set = decode_ancilla_set(&inst, &sol.assignment).unwrap();
        let r = apply_quartic_plan(&f, &set).unwrap();
        assert!(r.quadratic.degree() <= 2);
        assert_eq!(r.ancilla_count(), sol.true_count());
        assert!(verify_default(&f, &r).unwrap().passed());
    }
}
