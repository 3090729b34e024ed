use super::{Clause, CnfFormula, Literal};
use crate::{Error, Result};

/// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends the
/// clause section (SATLIB convention). Clauses may span lines. CRLF is
/// accepted.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse { line: line_no, message: "duplicate header".into() });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse {
                line: line_no,
                message: format!("expected `p cnf <vars> <clauses>`, got {line:?}"),
            };
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(bad());
            }
            let n = parts[2].parse().map_err(|_| bad())?;
            let m = parts[3].parse().map_err(|_| bad())?;
            header = Some((n, m, line_no));
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(Error::Parse { line: line_no, message: "clause before `p cnf` header".into() });
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid literal {token:?}"),
            })?;
            if value == 0 {
                if current.is_empty() {
                    return Err(Error::Parse { line: line_no, message: "empty clause".into() });
                }
                clauses.push(
                    Clause::new(std::mem::take(&mut current))
                        .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?,
                );
                continue;
            }
            let var = (value.unsigned_abs() - 1) as usize;
            if var >= n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("literal {value} exceeds declared {n} variables"),
                });
            }
            if current.is_empty() {
                current_line = line_no;
            }
            current.push(Literal { var, negated: value < 0 });
        }
    }

    let Some((n, m, header_line)) = header else {
        return Err(Error::Parse { line: 1, message: "missing `p cnf` header".into() });
    };
    if !current.is_empty() {
        return Err(Error::Parse { line: current_line, message: "clause not terminated by 0".into() });
    }
    if clauses.len() != m {
        return Err(Error::HeaderMismatch { declared: m, found: clauses.len() });
    }
    CnfFormula::new(n, clauses).map_err(|e| Error::Parse { line: header_line, message: e.to_string() })
}

/// Writes DIMACS CNF with LF line endings, one clause per line.
pub fn emit_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.n(), f.m());
    for c in f.clauses() {
        for l in c.literals() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}
