use super::{Polynomial, VarRef};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Complete argmin of a polynomial found by exhaustive enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minima {
    pub value: i128,
    /// Bit `b` of each minimizer is the value of `vars[b]`.
    pub vars: Vec<VarRef>,
    pub minimizers: Vec<u64>,
}

impl Minima {
    /// Render a minimizer as a `0/1` string in `vars` order.
    pub fn bits(&self, mask: u64) -> String {
        (0..self.vars.len())
            .map(|b| if mask >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Enumerate every assignment of `x1..xn` plus all referenced ancillas.
pub fn brute_force_minima(poly: &Polynomial, cap: usize) -> Result<Minima> {
    let mut vars: Vec<VarRef> = (1..=poly.n()).map(VarRef::Comp).collect();
    vars.extend(poly.variables().into_iter().filter(|v| v.is_ancilla()));
    if vars.len() > cap || vars.len() > 63 {
        return Err(Error::TooManyVariables {
            count: vars.len(),
            cap,
        });
    }
    let terms: Vec<(u64, i128)> = poly
        .terms()
        .map(|(m, c)| {
            let mask = m.vars().iter().fold(0u64, |acc, v| {
                let pos = vars.binary_search(v).expect("variable is listed");
                acc | 1 << pos
            });
            (mask, c as i128)
        })
        .collect();

    let mut best = i128::MAX;
    let mut minimizers = Vec::new();
    for x in 0u64..1 << vars.len() {
        let value: i128 = terms
            .iter()
            .filter(|(mask, _)| x & mask == *mask)
            .map(|(_, c)| c)
            .sum();
        if value < best {
            best = value;
            minimizers.clear();
        }
        if value == best {
            minimizers.push(x);
        }
    }
    Ok(Minima {
        value: best,
        vars,
        minimizers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    #[test]
    fn product_of_two() {
        let p = Polynomial::from_terms(2, [(Monomial::comp(&[1, 2]), 1)]).unwrap();
        let m = brute_force_minima(&p, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(m.value, 0);
        assert_eq!(m.minimizers, vec![0b00, 0b01, 0b10]);
    }

    #[test]
    fn negative_cubic() {
        let p = Polynomial::from_terms(3, [(Monomial::comp(&[1, 2, 3]), -1)]).unwrap();
        let m = brute_force_minima(&p, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(m.value, -1);
        assert_eq!(m.minimizers, vec![0b111]);
        assert_eq!(m.bits(0b111), "111");
    }

    #[test]
    fn cap_is_enforced() {
        let p = Polynomial::new(30);
        assert_eq!(
            brute_force_minima(&p, DEFAULT_ENUMERATION_CAP),
            Err(Error::TooManyVariables { count: 30, cap: 24 })
        );
    }
}
