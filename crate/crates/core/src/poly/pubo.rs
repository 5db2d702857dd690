//! The `.pubo` text format.
//!
//! ```text
//! # comment
//! p pubo 3
//! 3 1 2 3
//! -2 1
//! 5
//! ```
//!
//! A term line is an integer coefficient followed by zero to four 1-based
//! variable indices; a bare coefficient is the constant term.

use super::{Monomial, Polynomial, VarRef};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let mut poly: Option<Polynomial> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let first = fields.next().unwrap_or_default();
        if first == "p" {
            if poly.is_some() {
                return Err(parse_err(line_no, "duplicate header"));
            }
            let (Some("pubo"), Some(n), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(parse_err(line_no, "expected header `p pubo <n>`"));
            };
            let n: u32 = n
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid variable count `{n}`")))?;
            poly = Some(Polynomial::new(n));
            continue;
        }
        let Some(p) = poly.as_mut() else {
            return Err(parse_err(line_no, "term before `p pubo <n>` header"));
        };
        let coeff: i64 = first
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid coefficient `{first}`")))?;
        let mut vars = Vec::new();
        for field in fields {
            let index: i64 = field
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid variable index `{field}`")))?;
            if index < 1 || index > p.n() as i64 {
                let e = Error::VariableOutOfRange { index, n: p.n() };
                return Err(parse_err(line_no, e.to_string()));
            }
            vars.push(VarRef::Comp(index as u32));
        }
        p.add_term(Monomial::new(vars), coeff)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    poly.ok_or_else(|| parse_err(0, "missing `p pubo <n>` header"))
}

/// Serialize a polynomial over computational variables only.
pub fn emit_polynomial(poly: &Polynomial) -> Result<String> {
    let mut out = format!("p pubo {}\n", poly.n());
    for (m, c) in poly.terms() {
        out.push_str(&c.to_string());
        for v in m.vars() {
            match v {
                VarRef::Comp(i) => {
                    out.push(' ');
                    out.push_str(&i.to_string());
                }
                VarRef::Anc(_) => {
                    return Err(Error::InvalidArgument(format!(
                        "term {m} references an ancilla; .pubo holds computational variables only"
                    )))
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}
