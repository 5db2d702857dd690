use crate::error::{Error, Result};
use crate::poly::{Coeff, Monomial, Polynomial, VarRef};

/// `s(x, y, z) = 3z + xy - 2xz - 2yz`: zero when `z = xy`, at least one otherwise.
pub fn penalty_s(x: VarRef, y: VarRef, z: VarRef) -> Result<Polynomial> {
    if x == y || x == z || y == z {
        return Err(Error::InvalidArgument(format!(
            "penalty needs distinct variables, got {x}, {y}, {z}"
        )));
    }
    let n = [x, y, z]
        .iter()
        .filter_map(|v| match v {
            VarRef::Comp(i) => Some(*i),
            VarRef::Anc(_) => None,
        })
        .max()
        .unwrap_or(0);
    Polynomial::from_terms(
        n,
        [
            (Monomial::new([z]), 3),
            (Monomial::new([x, y]), 1),
            (Monomial::new([x, z]), -2),
            (Monomial::new([y, z]), -2),
        ],
    )
}

/// Result of enumerating integer quadratic penalties `f(x1, x2, x3)` with
/// `f = 0` iff `x3 = x1 x2` and `f >= 1` otherwise.
///
/// Coefficients are ordered `[a1, a2, a3, a12, a13, a23]`; the constant
/// is forced to zero by `f(0,0,0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PenaltySearch {
    pub bound: Coeff,
    /// Smallest achievable largest |coefficient|, if any valid penalty exists.
    pub best_max_coeff: Option<Coeff>,
    pub optima: Vec<[Coeff; 6]>,
}

fn penalty_value(c: &[Coeff; 6], x: u8) -> Coeff {
    let b = |i: u8| Coeff::from(x >> i & 1);
    let (x1, x2, x3) = (b(0), b(1), b(2));
    c[0] * x1 + c[1] * x2 + c[2] * x3 + c[3] * x1 * x2 + c[4] * x1 * x3 + c[5] * x2 * x3
}

fn is_valid_penalty(c: &[Coeff; 6]) -> bool {
    (0u8..8).all(|x| {
        let consistent = (x >> 2 & 1) == (x & 1) & (x >> 1 & 1);
        let v = penalty_value(c, x);
        if consistent {
            v == 0
        } else {
            v >= 1
        }
    })
}

/// Exhaustively search `[-bound, bound]^6`.
pub fn search_penalties(bound: Coeff) -> PenaltySearch {
    let width = (2 * bound + 1) as usize;
    let total = width.pow(6);
    let mut best: Option<Coeff> = None;
    let mut optima = Vec::new();
    for code in 0..total {
        let mut rest = code;
        let mut c = [0; 6];
        for slot in c.iter_mut() {
            *slot = (rest % width) as Coeff - bound;
            rest /= width;
        }
        if !is_valid_penalty(&c) {
            continue;
        }
        let max = c.iter().map(|v| v.abs()).max().unwrap_or(0);
        match best {
            Some(b) if max > b => {}
            Some(b) if max == b => optima.push(c),
            _ => {
                best = Some(max);
                optima.clear();
                optima.push(c);
            }
        }
    }
    PenaltySearch {
        bound,
        best_max_coeff: best,
        optima,
    }
}

/// Smallest largest-coefficient of any valid quadratic penalty with
/// coefficients in `[-6, 6]`. The answer is 3, attained by `s`.
pub fn verify_penalty_minimality() -> Coeff {
    search_penalties(6)
        .best_max_coeff
        .expect("s itself lies inside the search box")
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: [Coeff; 6] = [0, 0, 3, 1, -2, -2];

    #[test]
    fn truth_table() {
        let (x, y, z) = (VarRef::Comp(1), VarRef::Comp(2), VarRef::Comp(3));
        let s = penalty_s(x, y, z).unwrap();
        let rows = [
            (0, 0, 0, 0),
            (0, 1, 0, 0),
            (1, 0, 0, 0),
            (1, 1, 1, 0),
            (0, 0, 1, 3),
            (0, 1, 1, 1),
            (1, 0, 1, 1),
            (1, 1, 0, 1),
        ];
        for (a, b, c, want) in rows {
            let bits = [a == 1, b == 1, c == 1];
            let got = s
                .evaluate_with(|v| match v {
                    VarRef::Comp(i) => Some(bits[i as usize - 1]),
                    VarRef::Anc(_) => None,
                })
                .unwrap();
            assert_eq!(got, want, "row {a}{b}{c}");
        }
    }

    #[test]
    fn rejects_repeated_variables() {
        assert!(penalty_s(VarRef::Comp(1), VarRef::Comp(1), VarRef::Anc(0)).is_err());
    }

    #[test]
    fn works_with_ancilla_target() {
        let s = penalty_s(VarRef::Comp(4), VarRef::Comp(2), VarRef::Anc(0)).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.coefficient(&Monomial::new([VarRef::Anc(0)])), 3);
    }

    #[test]
    fn s_is_valid_and_optimal() {
        assert!(is_valid_penalty(&S));
        let search = search_penalties(4);
        assert_eq!(search.best_max_coeff, Some(3));
        assert!(search.optima.contains(&S));
    }

    #[test]
    fn nothing_valid_with_coefficients_up_to_two() {
        let search = search_penalties(2);
        assert_eq!(search.best_max_coeff, None);
        assert!(search.optima.is_empty());
    }
}
