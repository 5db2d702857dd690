use num_integer::Integer;

use super::{Coeff, Monomial, Polynomial};
use crate::error::{Error, Result};

/// Whether the constant term takes part in the gcd and maximum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OffsetPolicy {
    #[default]
    Include,
    Ignore,
}

/// Control precision: largest coefficient magnitude over the gcd of all
/// coefficients, i.e. the number of distinct field values hardware must resolve.
///
/// Four bits of hardware precision resolve 16 magnitudes per sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionReport {
    pub max_abs_coeff: u64,
    pub gcd_all: u64,
    pub control_precision: u64,
    pub per_pair_breakdown: Vec<(Monomial, Coeff)>,
}

pub fn control_precision(poly: &Polynomial, offset: OffsetPolicy) -> Result<PrecisionReport> {
    let included = poly
        .terms()
        .filter(|(m, _)| offset == OffsetPolicy::Include || m.degree() > 0);
    let mut max_abs = 0u64;
    let mut gcd = 0u64;
    for (_, c) in included {
        let a = c.unsigned_abs();
        max_abs = max_abs.max(a);
        gcd = gcd.gcd(&a);
    }
    if gcd == 0 {
        return Err(Error::EmptyPolynomial);
    }
    let per_pair_breakdown = poly
        .terms()
        .filter(|(m, _)| m.degree() == 2)
        .map(|(m, c)| (m.clone(), c))
        .collect();
    Ok(PrecisionReport {
        max_abs_coeff: max_abs,
        gcd_all: gcd,
        control_precision: max_abs / gcd,
        per_pair_breakdown,
    })
}
