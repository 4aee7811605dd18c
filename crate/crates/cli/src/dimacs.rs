//! DIMACS CNF reading and writing.
//!
//! The projection prefix of a [`SatProblem`] is kept in a `c projection N`
//! comment; files without it project onto every variable.

use std::fmt::Write as _;

use locksynth_core::sat::{Lit, SatProblem};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {line}: bad literal `{token}`")]
    Literal { line: usize, token: String },
    #[error("line {line}: variable {var} exceeds the declared {declared}")]
    Range { line: usize, var: u32, declared: u32 },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

pub fn write(p: &SatProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "c projection {}", p.projection);
    let _ = writeln!(out, "p cnf {} {}", p.num_vars, p.clauses.len());
    for c in &p.clauses {
        for l in c {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

pub fn read(src: &str) -> Result<SatProblem, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut projection = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if let Some(k) = rest.trim().strip_prefix("projection") {
                projection = k.trim().parse::<u32>().ok();
            }
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            header = match parts.as_slice() {
                ["p", "cnf", v, c] => Some((
                    v.parse().map_err(|_| DimacsError::Header(line_no))?,
                    c.parse().map_err(|_| DimacsError::Header(line_no))?,
                )),
                _ => return Err(DimacsError::Header(line_no)),
            };
            continue;
        }
        let Some((vars, _)) = header else { return Err(DimacsError::Header(line_no)) };
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| DimacsError::Literal { line: line_no, token: tok.to_string() })?;
            if x == 0 {
                clauses.push(std::mem::take(&mut cur));
                continue;
            }
            let l = Lit::from_dimacs(x).ok_or_else(|| DimacsError::Literal { line: line_no, token: tok.to_string() })?;
            if l.var() >= vars {
                return Err(DimacsError::Range { line: line_no, var: l.var() + 1, declared: vars });
            }
            cur.push(l);
        }
    }
    let (vars, count) = header.ok_or(DimacsError::Header(0))?;
    if !cur.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != count {
        return Err(DimacsError::ClauseCount { declared: count, found: clauses.len() });
    }
    Ok(SatProblem::new(vars, projection.unwrap_or(vars).min(vars), clauses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use locksynth_core::sat::SolveResult;

    #[test]
    fn reads_plain_files() {
        let p = read("c example\np cnf 3 2\n1 -3 0\n2 3\n-1 0\n").unwrap();
        assert_eq!(p.num_vars, 3);
        assert_eq!(p.projection, 3);
        assert_eq!(p.clauses, vec![vec![Lit::pos(0), Lit::neg(2)], vec![Lit::pos(1), Lit::pos(2), Lit::neg(0)]]);
    }

    #[test]
    fn round_trip_keeps_projection() {
        let p = SatProblem::new(4, 2, vec![vec![Lit::pos(0)], vec![Lit::neg(1), Lit::pos(3)], vec![]]);
        assert_eq!(read(&write(&p)).unwrap(), p);
    }

    #[test]
    fn errors() {
        assert_eq!(read("1 0\n"), Err(DimacsError::Header(1)));
        assert_eq!(read("p cnf x 1\n"), Err(DimacsError::Header(1)));
        assert!(matches!(read("p cnf 2 1\n1 y 0\n"), Err(DimacsError::Literal { line: 2, .. })));
        assert_eq!(read("p cnf 2 1\n3 0\n"), Err(DimacsError::Range { line: 2, var: 3, declared: 2 }));
        assert_eq!(read("p cnf 2 2\n1 0\n"), Err(DimacsError::ClauseCount { declared: 2, found: 1 }));
        assert_eq!(read("p cnf 2 1\n1 2\n"), Err(DimacsError::Unterminated));
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // Three pigeons, two holes; variable 2i+h means pigeon i in hole h.
        let mut s = String::from("p cnf 6 9\n1 2 0\n3 4 0\n5 6 0\n");
        for h in 1..=2 {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                s += &format!("-{} -{} 0\n", 2 * a + h, 2 * b + h);
            }
        }
        assert!(matches!(read(&s).unwrap().solve(), SolveResult::Unsat));
    }
}
