//! Concrete syntax for [`RelFormula`].
//!
//! ```text
//! formula := ("forall" | "exists") var ("," var)* "." formula | iff
//! iff     := imp (("iff" | "<->") imp)*
//! imp     := or (("implies" | "->") imp)?
//! or      := and (("or" | "|") and)*
//! and     := unary (("and" | "&") unary)*
//! unary   := ("not" | "!") unary | quantified formula | primary
//! primary := "true" | "false" | "(" formula ")"
//!          | "init" "(" term ")" | "reach" "(" term "," term ")"
//!          | "post" "(" term "," term ")" | "star" "(" name ")" "(" term "," term ")"
//!          | name "(" term ")" | name "(" term "," term ")"
//!          | term ("=" | "!=") term
//! term    := var | "#" int
//! ```
//! Names may carry literal indices, as in `own_fork[1](s)`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::formula::{Rel, RelFormula, Term};
use crate::syntax::{tokenize, Cursor, ParseError, Tok, Token};

/// Words with a fixed meaning in formula syntax; unusable as names.
pub const FORMULA_KEYWORDS: [&str; 13] = [
    "forall", "exists", "not", "and", "or", "implies", "iff", "true", "false", "init", "star",
    "reach", "post",
];

pub fn parse_formula(src: &str) -> Result<RelFormula, ParseError> {
    let toks = tokenize(src)?;
    parse_formula_tokens(&toks)
}

/// Parses a whole token slice (ending in `Eof`).
pub fn parse_formula_tokens(toks: &[Token]) -> Result<RelFormula, ParseError> {
    let mut c = Cursor::new(toks);
    let f = formula(&mut c)?;
    c.expect_eof()?;
    Ok(f)
}

/// Parses one formula at the cursor, leaving the cursor after it.
pub fn formula(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    if c.is_keyword("forall") || c.is_keyword("exists") {
        return quantified(c);
    }
    iff(c)
}

fn quantified(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    let universal = c.is_keyword("forall");
    c.next();
    let mut vars = Vec::new();
    loop {
        vars.push(variable(c)?);
        if !c.eat_punct(",") {
            break;
        }
    }
    c.expect_punct(".")?;
    let body = formula(c)?;
    Ok(vars.into_iter().rev().fold(body, |b, v| {
        if universal {
            RelFormula::Forall(v, Box::new(b))
        } else {
            RelFormula::Exists(v, Box::new(b))
        }
    }))
}

fn variable(c: &mut Cursor<'_>) -> Result<String, ParseError> {
    let span = c.span();
    let (v, _) = c.expect_ident()?;
    if FORMULA_KEYWORDS.contains(&v.as_str()) {
        return Err(ParseError::new(span, alloc::format!("`{v}` is a keyword")));
    }
    Ok(v)
}

fn iff(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    let mut lhs = implies(c)?;
    while c.eat_keyword("iff") || c.eat_punct("<->") {
        let rhs = implies(c)?;
        lhs = RelFormula::iff(lhs, rhs);
    }
    Ok(lhs)
}

fn implies(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    let lhs = or(c)?;
    if c.eat_keyword("implies") || c.eat_punct("->") {
        let rhs = if c.is_keyword("forall") || c.is_keyword("exists") {
            quantified(c)?
        } else {
            implies(c)?
        };
        return Ok(RelFormula::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn or(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    let mut parts = alloc::vec![and(c)?];
    while c.eat_keyword("or") || c.eat_punct("|") {
        parts.push(and(c)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RelFormula::Or(parts) })
}

fn and(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    let mut parts = alloc::vec![unary(c)?];
    while c.eat_keyword("and") || c.eat_punct("&") {
        parts.push(unary(c)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RelFormula::And(parts) })
}

fn unary(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    if c.eat_keyword("not") || c.eat_punct("!") {
        return Ok(RelFormula::not(unary(c)?));
    }
    if c.is_keyword("forall") || c.is_keyword("exists") {
        return quantified(c);
    }
    primary(c)
}

fn term(c: &mut Cursor<'_>) -> Result<Term, ParseError> {
    if c.eat_punct("#") {
        let span = c.span();
        let n = c.expect_int()?;
        if n < 0 {
            return Err(ParseError::new(span, "state constant must be nonnegative"));
        }
        return Ok(Term::State(n as usize));
    }
    Ok(Term::Var(variable(c)?))
}

fn pair(c: &mut Cursor<'_>) -> Result<(Term, Term), ParseError> {
    c.expect_punct("(")?;
    let a = term(c)?;
    c.expect_punct(",")?;
    let b = term(c)?;
    c.expect_punct(")")?;
    Ok((a, b))
}

fn primary(c: &mut Cursor<'_>) -> Result<RelFormula, ParseError> {
    if c.eat_punct("(") {
        let f = formula(c)?;
        c.expect_punct(")")?;
        return Ok(f);
    }
    if c.eat_keyword("true") {
        return Ok(RelFormula::True);
    }
    if c.eat_keyword("false") {
        return Ok(RelFormula::False);
    }
    if c.eat_keyword("init") {
        c.expect_punct("(")?;
        let t = term(c)?;
        c.expect_punct(")")?;
        return Ok(RelFormula::Init(t));
    }
    if c.eat_keyword("reach") {
        let (from, to) = pair(c)?;
        return Ok(RelFormula::Closure { rel: Rel::Post, from, to });
    }
    if c.eat_keyword("post") {
        let (from, to) = pair(c)?;
        return Ok(RelFormula::Edge { rel: Rel::Post, from, to });
    }
    if c.eat_keyword("star") {
        c.expect_punct("(")?;
        let (a, _) = c.expect_name()?;
        c.expect_punct(")")?;
        let (from, to) = pair(c)?;
        return Ok(RelFormula::Closure { rel: Rel::Action(a), from, to });
    }
    let is_call = match c.peek() {
        Tok::Ident(_) => {
            // Skip over literal index groups to find the `(`.
            let mut k = 1;
            while matches!(c.peek_at(k), Tok::Punct("["))
                && matches!(c.peek_at(k + 1), Tok::Int(_))
                && matches!(c.peek_at(k + 2), Tok::Punct("]"))
            {
                k += 3;
            }
            matches!(c.peek_at(k), Tok::Punct("("))
        }
        _ => false,
    };
    if is_call {
        let span = c.span();
        let (name, _) = c.expect_name()?;
        if FORMULA_KEYWORDS.contains(&name.as_str()) {
            return Err(ParseError::new(span, alloc::format!("`{name}` is a keyword")));
        }
        c.expect_punct("(")?;
        let a = term(c)?;
        if c.eat_punct(",") {
            let b = term(c)?;
            c.expect_punct(")")?;
            return Ok(RelFormula::Edge { rel: Rel::Action(name), from: a, to: b });
        }
        c.expect_punct(")")?;
        return Ok(RelFormula::Prop(name, a));
    }
    if matches!(c.peek(), Tok::Ident(_) | Tok::Punct("#")) {
        let a = term(c)?;
        if c.eat_punct("=") {
            return Ok(RelFormula::Eq(a, term(c)?));
        }
        if c.eat_punct("!=") {
            return Ok(RelFormula::not(RelFormula::Eq(a, term(c)?)));
        }
        return Err(c.unexpected("`=`, `!=` or `(`"));
    }
    Err(c.unexpected("formula"))
}
