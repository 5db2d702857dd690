use super::{IlpInstance, SetCoverInstance};

/// LP-format text of the covering program for external 0-1 ILP solvers.
/// Column `v{j}` (1-based) selects candidate pair `j`.
pub fn emit_lp(sc: &SetCoverInstance, ilp: &IlpInstance) -> String {
    let mut out = String::from("/* minimum-ancilla set cover */\n");
    for (j, (pair, _)) in sc.candidates.iter().enumerate() {
        out.push_str(&format!(
            "/* v{} = x{}x{} */\n",
            j + 1,
            pair.lo(),
            pair.hi()
        ));
    }
    out.push_str("min:");
    for (j, c) in ilp.c.iter().enumerate() {
        if *c == 1 {
            out.push_str(&format!(" +v{}", j + 1));
        } else {
            out.push_str(&format!(" +{c} v{}", j + 1));
        }
    }
    out.push_str(";\n");
    for (i, (row, b)) in ilp.m.iter().zip(&ilp.b).enumerate() {
        out.push_str(&format!("cover_{}:", i + 1));
        for (j, &entry) in row.iter().enumerate() {
            if entry != 0 {
                out.push_str(&format!(" +v{}", j + 1));
            }
        }
        out.push_str(&format!(" >= {b};\n"));
    }
    if !ilp.c.is_empty() {
        let vars: Vec<String> = (1..=ilp.c.len()).map(|j| format!("v{j}")).collect();
        out.push_str(&format!("binary {};\n", vars.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ancilla::{build_set_cover, set_cover_to_ilp};
    use crate::poly::{Monomial, Polynomial};

    #[test]
    fn single_triple() {
        let p = Polynomial::from_terms(3, [(Monomial::comp(&[1, 2, 3]), 2)]).unwrap();
        let sc = build_set_cover(&p).unwrap();
        let text = emit_lp(&sc, &set_cover_to_ilp(&sc));
        assert_eq!(
            text,
            "/* minimum-ancilla set cover */\n\
             /* v1 = x1x2 */\n/* v2 = x1x3 */\n/* v3 = x2x3 */\n\
             min: +v1 +v2 +v3;\n\
             cover_1: +v1 +v2 +v3 >= 1;\n\
             binary v1, v2, v3;\n"
        );
    }
}
