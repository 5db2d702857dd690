use std::collections::BTreeMap;

use num_rational::Rational64;

use super::{Polynomial, VarRef};
use crate::error::{Error, Result};

/// Spin form of a quadratic polynomial under `x_i = (1 - z_i) / 2`,
/// so `x_i = 0` maps to spin `+1` and `x_i = 1` to spin `-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IsingForm {
    pub offset: Rational64,
    pub h: BTreeMap<VarRef, Rational64>,
    pub j: BTreeMap<(VarRef, VarRef), Rational64>,
}

impl IsingForm {
    /// Energy at spins given by `spin(v) ∈ {+1, -1}`.
    pub fn evaluate_with(&self, spin: impl Fn(VarRef) -> Option<i8>) -> Result<Rational64> {
        let z =
            |v: VarRef| -> Result<i64> { spin(v).map(i64::from).ok_or(Error::MissingVariable(v)) };
        let mut total = self.offset;
        for (v, h) in &self.h {
            total += *h * z(*v)?;
        }
        for ((a, b), j) in &self.j {
            total += *j * (z(*a)? * z(*b)?);
        }
        Ok(total)
    }
}

fn bump<K: Ord>(map: &mut BTreeMap<K, Rational64>, key: K, delta: Rational64) {
    let slot = map
        .entry(key)
        .or_insert_with(|| Rational64::from_integer(0));
    *slot += delta;
}

pub fn to_ising(poly: &Polynomial) -> Result<IsingForm> {
    if poly.degree() > 2 {
        return Err(Error::InvalidArgument(format!(
            "Ising conversion needs degree <= 2, polynomial has degree {}",
            poly.degree()
        )));
    }
    let mut form = IsingForm::default();
    for (m, c) in poly.terms() {
        let c = Rational64::from_integer(c);
        match m.vars() {
            [] => form.offset += c,
            [v] => {
                // c (1 - z) / 2
                form.offset += c / 2;
                bump(&mut form.h, *v, -c / 2);
            }
            [a, b] => {
                // c (1 - z_a)(1 - z_b) / 4
                form.offset += c / 4;
                bump(&mut form.h, *a, -c / 4);
                bump(&mut form.h, *b, -c / 4);
                bump(&mut form.j, (*a, *b), c / 4);
            }
            _ => unreachable!("degree checked above"),
        }
    }
    form.h.retain(|_, v| *v != Rational64::from_integer(0));
    form.j.retain(|_, v| *v != Rational64::from_integer(0));
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn single_variable() {
        let p = Polynomial::from_terms(1, [(Monomial::comp(&[1]), 1)]).unwrap();
        let f = to_ising(&p).unwrap();
        assert_eq!(f.offset, r(1, 2));
        assert_eq!(f.h[&VarRef::Comp(1)], r(-1, 2));
        assert!(f.j.is_empty());
    }

    #[test]
    fn product_of_two() {
        let p = Polynomial::from_terms(2, [(Monomial::comp(&[1, 2]), 1)]).unwrap();
        let f = to_ising(&p).unwrap();
        assert_eq!(f.offset, r(1, 4));
        assert_eq!(f.h[&VarRef::Comp(1)], r(-1, 4));
        assert_eq!(f.h[&VarRef::Comp(2)], r(-1, 4));
        assert_eq!(f.j[&(VarRef::Comp(1), VarRef::Comp(2))], r(1, 4));
    }

    #[test]
    fn constant_only() {
        let p = Polynomial::from_terms(0, [(Monomial::one(), 5)]).unwrap();
        let f = to_ising(&p).unwrap();
        assert_eq!(f.offset, r(5, 1));
        assert!(f.h.is_empty() && f.j.is_empty());
    }

    #[test]
    fn rejects_cubic() {
        let p = Polynomial::from_terms(3, [(Monomial::comp(&[1, 2, 3]), 1)]).unwrap();
        assert!(to_ising(&p).is_err());
    }

    proptest! {
        #[test]
        fn agrees_on_every_assignment(
            n in 1u32..=10,
            raw in proptest::collection::vec((-9i64..=9, 0u32..10, 0u32..10, 0u8..3), 0..20),
        ) {
            let terms = raw.into_iter().map(|(c, a, b, deg)| {
                let (a, b) = (a % n + 1, b % n + 1);
                let idx: Vec<u32> = match deg { 0 => vec![], 1 => vec![a], _ => vec![a, b] };
                (Monomial::comp(&idx), c)
            });
            let p = Polynomial::from_terms(n, terms).unwrap();
            let f = to_ising(&p).unwrap();
            for x in 0u32..1 << n {
                let bit = |v: VarRef| match v { VarRef::Comp(i) => Some(x >> (i - 1) & 1 == 1), _ => None };
                let spin = |v: VarRef| bit(v).map(|b| if b { -1 } else { 1 });
                prop_assert_eq!(
                    f.evaluate_with(spin).unwrap(),
                    Rational64::from_integer(p.evaluate_with(bit).unwrap() as i64)
                );
            }
        }
    }
}
