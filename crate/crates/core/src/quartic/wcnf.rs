use super::{Clause, RVar, WMaxSatInstance};
use crate::error::{Error, Result};
use crate::poly::{Pair, Triple};

/// DIMACS WCNF with a `c var` comment per variable naming its ancilla.
pub fn emit_wcnf(inst: &WMaxSatInstance) -> String {
    let mut out = String::from("c quartic ancilla selection\n");
    for (i, v) in inst.vars.iter().enumerate() {
        out.push_str(&format!("c var {} {v}\n", i + 1));
    }
    out.push_str(&format!(
        "p wcnf {} {} {}\n",
        inst.vars.len(),
        inst.clauses.len(),
        inst.hard_weight
    ));
    for c in &inst.clauses {
        out.push_str(&c.weight.to_string());
        for l in &c.lits {
            out.push_str(&format!(" {l}"));
        }
        out.push_str(" 0\n");
    }
    out
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| err(line, format!("invalid number `{tok}`")))
}

fn parse_var(toks: &[&str], line: usize) -> Result<RVar> {
    let idx: Vec<u32> = toks.iter().map(|t| num(t, line)).collect::<Result<_>>()?;
    let bad = |e: Error| err(line, e.to_string());
    match idx[..] {
        [i, j] => Ok(RVar::Pair(Pair::new(i, j).map_err(bad)?)),
        [i, j, k] => Ok(RVar::Triple(Triple::new(i, j, k).map_err(bad)?)),
        _ => Err(err(line, "expected `c var <v> r <i> <j> [<k>]`")),
    }
}

pub fn parse_wcnf(text: &str) -> Result<WMaxSatInstance> {
    let mut vars = Vec::new();
    let mut header: Option<(usize, usize, u64)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i32> = Vec::new();
    let mut weight: Option<u64> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "c" {
            if toks.get(1) == Some(&"var") {
                let v: usize = num(toks.get(2).copied().unwrap_or(""), line_no)?;
                if v != vars.len() + 1 || toks.get(3) != Some(&"r") {
                    return Err(err(
                        line_no,
                        format!("expected `c var {} r ...`", vars.len() + 1),
                    ));
                }
                vars.push(parse_var(&toks[4..], line_no)?);
            }
            continue;
        }
        if toks[0] == "p" {
            if header.is_some() || toks.len() != 5 || toks[1] != "wcnf" {
                return Err(err(
                    line_no,
                    "expected a single `p wcnf <vars> <clauses> <top>`",
                ));
            }
            header = Some((
                num(toks[2], line_no)?,
                num(toks[3], line_no)?,
                num(toks[4], line_no)?,
            ));
            continue;
        }
        let (nvars, _, _) = header.ok_or_else(|| err(line_no, "clause before header"))?;
        for tok in toks {
            if weight.is_none() {
                weight = Some(num(tok, line_no)?);
                continue;
            }
            let l: i32 = num(tok, line_no)?;
            if l == 0 {
                clauses.push(Clause {
                    lits: std::mem::take(&mut pending),
                    weight: weight.take().expect("weight read first"),
                });
            } else if l.unsigned_abs() as usize > nvars {
                return Err(err(line_no, format!("literal {l} outside 1..={nvars}")));
            } else {
                pending.push(l);
            }
        }
    }
    let (nvars, nclauses, top) = header.ok_or_else(|| err(0, "missing `p wcnf` header"))?;
    if weight.is_some() || !pending.is_empty() {
        return Err(err(0, "last clause is not terminated by 0"));
    }
    if clauses.len() != nclauses {
        return Err(err(
            0,
            format!(
                "header declares {nclauses} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    if vars.len() != nvars {
        return Err(err(
            0,
            format!(
                "header declares {nvars} variables, {} are named",
                vars.len()
            ),
        ));
    }
    if vars.windows(2).any(|w| w[0] >= w[1]) {
        return Err(err(
            0,
            "variables must be listed pairs first, each group sorted",
        ));
    }
    Ok(WMaxSatInstance {
        vars,
        clauses,
        hard_weight: top,
    })
}

/// Read a model from a MaxSAT solver: signed literals separated by
/// whitespace, optionally on `v` lines. `c`, `s` and `o` lines are skipped.
/// Variables not mentioned are false.
pub fn parse_model(text: &str, nvars: usize) -> Result<Vec<bool>> {
    let mut model = vec![false; nvars];
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let mut toks = raw.split_whitespace().peekable();
        match toks.peek() {
            Some(&"c") | Some(&"s") | Some(&"o") | None => continue,
            Some(&"v") => {
                toks.next();
            }
            _ => {}
        }
        for tok in toks {
            let l: i64 = num(tok, line_no)?;
            if l == 0 {
                continue;
            }
            let v = l.unsigned_abs() as usize;
            if v > nvars {
                return Err(err(line_no, format!("literal {l} outside 1..={nvars}")));
            }
            model[v - 1] = l > 0;
        }
    }
    Ok(model)
}
