//! The `.qubo` text format.
//!
//! Variables are numbered `1..=n` for computational variables followed by
//! ancillas in registry order.
//!
//! ```text
//! p qubo <total_vars> <computational_vars>
//! a <var> pair <i> <j> [m]
//! a <var> triple <i> <j> <k> via <p> <q>
//! c <offset>
//! <coeff> <i> <j>      # i <= j; i == j is a linear term
//! ```

use super::{AncillaDef, AncillaRegistry, ReducedInstance};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Pair, Polynomial, Triple, VarRef};

fn var_number(v: VarRef, n: u32) -> u64 {
    match v {
        VarRef::Comp(i) => i as u64,
        VarRef::Anc(a) => n as u64 + 1 + a as u64,
    }
}

pub fn emit_qubo(reduced: &ReducedInstance) -> Result<String> {
    reduced.check()?;
    let n = reduced.source_n;
    let mut out = format!("p qubo {} {}\n", reduced.total_vars(), n);
    for (idx, def) in reduced.registry.iter() {
        let var = var_number(VarRef::Anc(idx), n);
        match def {
            AncillaDef::Pair(p) => out.push_str(&format!("a {var} pair {} {}\n", p.lo(), p.hi())),
            AncillaDef::PairCopy(p, m) => {
                out.push_str(&format!("a {var} pair {} {} {m}\n", p.lo(), p.hi()))
            }
            AncillaDef::TripleViaPair { base, k } => {
                let t = Triple::new(base.lo(), base.hi(), k)?.indices();
                out.push_str(&format!(
                    "a {var} triple {} {} {} via {} {}\n",
                    t[0],
                    t[1],
                    t[2],
                    base.lo(),
                    base.hi()
                ));
            }
        }
    }
    let offset = reduced.quadratic.constant();
    if offset != 0 {
        out.push_str(&format!("c {offset}\n"));
    }
    for (m, c) in reduced.quadratic.terms() {
        match m.vars() {
            [] => {}
            [v] => {
                let i = var_number(*v, n);
                out.push_str(&format!("{c} {i} {i}\n"));
            }
            [a, b] => {
                out.push_str(&format!(
                    "{c} {} {}\n",
                    var_number(*a, n),
                    var_number(*b, n)
                ));
            }
            _ => unreachable!("checked degree"),
        }
    }
    Ok(out)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_qubo(text: &str) -> Result<ReducedInstance> {
    let mut header: Option<(u64, u32)> = None;
    let mut registry = AncillaRegistry::new();
    let mut terms: Vec<(usize, i64, u64, u64)> = Vec::new();
    let mut offset: Option<i64> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let first = toks.next().unwrap_or_default();
        match first {
            "p" => {
                if header.is_some() {
                    return Err(parse_err(line_no, "duplicate header"));
                }
                if toks.next() != Some("qubo") {
                    return Err(parse_err(line_no, "expected header `p qubo <total> <n>`"));
                }
                let total: u64 = field(toks.next(), line_no, "total variable count")?;
                let n: u32 = field(toks.next(), line_no, "computational variable count")?;
                if total < n as u64 {
                    return Err(parse_err(
                        line_no,
                        "total variable count below computational count",
                    ));
                }
                header = Some((total, n));
            }
            "a" => {
                let (_, n) = header.ok_or_else(|| parse_err(line_no, "ancilla before header"))?;
                let var: u64 = field(toks.next(), line_no, "ancilla variable")?;
                let expected = n as u64 + 1 + registry.len() as u64;
                if var != expected {
                    return Err(parse_err(
                        line_no,
                        format!("ancilla variable {var} out of order, expected {expected}"),
                    ));
                }
                let kind = toks.next().unwrap_or_default();
                let rest: Vec<&str> = toks.collect();
                let comp = |pos: usize| -> Result<u32> {
                    let i: u32 = field(rest.get(pos).copied(), line_no, "index")?;
                    if i == 0 || i > n {
                        return Err(parse_err(line_no, format!("index {i} outside [1, {n}]")));
                    }
                    Ok(i)
                };
                let bad = |e: Error| parse_err(line_no, e.to_string());
                let def = match (kind, rest.len()) {
                    ("pair", 2) => AncillaDef::Pair(Pair::new(comp(0)?, comp(1)?).map_err(bad)?),
                    ("pair", 3) => {
                        let p = Pair::new(comp(0)?, comp(1)?).map_err(bad)?;
                        let m: u8 = field(Some(rest[2]), line_no, "copy index")?;
                        AncillaDef::PairCopy(p, m)
                    }
                    ("triple", 6) if rest[3] == "via" => {
                        let t = Triple::new(comp(0)?, comp(1)?, comp(2)?).map_err(bad)?;
                        let base = Pair::new(comp(4)?, comp(5)?).map_err(bad)?;
                        let k = t.complement(base).ok_or_else(|| {
                            parse_err(line_no, format!("via pair {base} not inside {t}"))
                        })?;
                        AncillaDef::TripleViaPair { base, k }
                    }
                    _ => {
                        return Err(parse_err(
                            line_no,
                            "expected `a <var> pair <i> <j> [m]` or `a <var> triple <i> <j> <k> via <p> <q>`",
                        ))
                    }
                };
                registry
                    .insert(def)
                    .map_err(|e| parse_err(line_no, e.to_string()))?;
            }
            "c" => {
                if offset.is_some() {
                    return Err(parse_err(line_no, "duplicate constant line"));
                }
                offset = Some(field(toks.next(), line_no, "constant")?);
            }
            _ => {
                if header.is_none() {
                    return Err(parse_err(line_no, "term before header"));
                }
                let c: i64 = field(Some(first), line_no, "coefficient")?;
                let i: u64 = field(toks.next(), line_no, "variable")?;
                let j: u64 = field(toks.next(), line_no, "variable")?;
                if toks.next().is_some() || i > j {
                    return Err(parse_err(
                        line_no,
                        "term lines are `<coeff> <i> <j>` with i <= j",
                    ));
                }
                terms.push((line_no, c, i, j));
            }
        }
    }

    let (total, n) = header.ok_or_else(|| parse_err(0, "missing `p qubo` header"))?;
    if total != n as u64 + registry.len() as u64 {
        return Err(parse_err(
            0,
            format!(
                "header declares {total} variables but {n} computational + {} ancillas are defined",
                registry.len()
            ),
        ));
    }
    let to_var = |v: u64, line: usize| -> Result<VarRef> {
        if v == 0 || v > total {
            Err(parse_err(
                line,
                format!("variable {v} outside [1, {total}]"),
            ))
        } else if v <= n as u64 {
            Ok(VarRef::Comp(v as u32))
        } else {
            Ok(VarRef::Anc((v - n as u64 - 1) as u32))
        }
    };
    let mut quadratic = Polynomial::new(n);
    if let Some(c) = offset {
        quadratic.add_term(Monomial::one(), c)?;
    }
    for (line, c, i, j) in terms {
        let m = Monomial::new([to_var(i, line)?, to_var(j, line)?]);
        quadratic
            .add_term(m, c)
            .map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(ReducedInstance {
        quadratic,
        registry,
        source_n: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{apply_plan, GadgetMode, ReductionPlan};

    fn sample(mode: GadgetMode) -> ReducedInstance {
        let mut poly = Polynomial::from_terms(
            4,
            [
                (Monomial::comp(&[1, 2, 3]), 4),
                (Monomial::comp(&[1, 2, 4]), -2),
                (Monomial::comp(&[2, 4]), 3),
            ],
        )
        .unwrap();
        poly.add_term(Monomial::one(), -5).unwrap();
        let mut plan = ReductionPlan::new(mode);
        plan.assign(Pair::new(1, 2).unwrap(), 3).unwrap();
        plan.assign(Pair::new(1, 2).unwrap(), 4).unwrap();
        apply_plan(&poly, &plan).unwrap()
    }

    #[test]
    fn emits_expected_layout() {
        let text = emit_qubo(&sample(GadgetMode::SingleAncilla)).unwrap();
        let expected = "p qubo 5 4\n\
                        a 5 pair 1 2\n\
                        c -5\n\
                        5 1 2\n\
                        -10 1 5\n\
                        3 2 4\n\
                        -10 2 5\n\
                        4 3 5\n\
                        -2 4 5\n\
                        15 5 5\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trips_both_modes() {
        for mode in [GadgetMode::SingleAncilla, GadgetMode::TripleAncilla] {
            let r = sample(mode);
            let text = emit_qubo(&r).unwrap();
            let back = parse_qubo(&text).unwrap();
            assert_eq!(back, r);
            assert_eq!(emit_qubo(&back).unwrap(), text);
        }
    }

    #[test]
    fn triple_ancilla_lines() {
        let mut registry = AncillaRegistry::new();
        registry
            .insert(AncillaDef::Pair(Pair::new(1, 2).unwrap()))
            .unwrap();
        registry
            .insert(AncillaDef::TripleViaPair {
                base: Pair::new(1, 2).unwrap(),
                k: 3,
            })
            .unwrap();
        let mut quadratic = Polynomial::new(4);
        quadratic
            .add_term(Monomial::new([VarRef::Anc(1), VarRef::Comp(4)]), 1)
            .unwrap();
        let r = ReducedInstance {
            quadratic,
            registry,
            source_n: 4,
        };
        let text = emit_qubo(&r).unwrap();
        assert!(text.contains("a 6 triple 1 2 3 via 1 2\n"), "{text}");
        assert_eq!(parse_qubo(&text).unwrap(), r);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "p qubo 3 2\n1 1 3",
            "p qubo 2 2\n1 2 1",
            "p qubo 3 2\na 4 pair 1 2",
            "p qubo 3 2\na 3 pair 1 3",
            "p qubo 4 3\na 4 triple 1 2 3 via 1 2",
            "1 1 1",
            "p qubo 2 2\n1 1 3",
        ] {
            assert!(parse_qubo(bad).is_err(), "{bad:?}");
        }
    }
}
