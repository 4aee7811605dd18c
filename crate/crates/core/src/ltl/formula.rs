use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use crate::syntax::{tokenize, Cursor, ParseError, Tok, Token};

/// LTL without the next operator. `F`, `G`, `W` and `->` are desugared by
/// the parser; `Release` only appears after negation normalization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    False,
    /// `name` or `name@i`.
    Atom(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn atom(name: &str) -> Ltl {
        Ltl::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }

    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::or(Ltl::not(a), b)
    }

    /// `F f = true U f`
    pub fn eventually(f: Ltl) -> Ltl {
        Ltl::until(Ltl::True, f)
    }

    /// `G f = !(true U !f)`
    pub fn always(f: Ltl) -> Ltl {
        Ltl::not(Ltl::until(Ltl::True, Ltl::not(f)))
    }

    /// `a W b = (a U b) | G a`
    pub fn weak_until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::or(Ltl::until(a.clone(), b), Ltl::always(a))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(a) => {
                out.insert(a.clone());
            }
            Ltl::Not(f) => f.collect_atoms(out),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Negation normal form: negations only on atoms, using `Release` as the
    /// dual of `Until`.
    pub fn nnf(&self) -> Ltl {
        self.push_neg(false)
    }

    fn push_neg(&self, neg: bool) -> Ltl {
        match (self, neg) {
            (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
            (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
            (Ltl::Atom(_), false) => self.clone(),
            (Ltl::Atom(_), true) => Ltl::not(self.clone()),
            (Ltl::Not(f), _) => f.push_neg(!neg),
            (Ltl::And(a, b), false) => Ltl::and(a.push_neg(false), b.push_neg(false)),
            (Ltl::And(a, b), true) => Ltl::or(a.push_neg(true), b.push_neg(true)),
            (Ltl::Or(a, b), false) => Ltl::or(a.push_neg(false), b.push_neg(false)),
            (Ltl::Or(a, b), true) => Ltl::and(a.push_neg(true), b.push_neg(true)),
            (Ltl::Until(a, b), false) => Ltl::until(a.push_neg(false), b.push_neg(false)),
            (Ltl::Until(a, b), true) => Ltl::release(a.push_neg(true), b.push_neg(true)),
            (Ltl::Release(a, b), false) => Ltl::release(a.push_neg(false), b.push_neg(false)),
            (Ltl::Release(a, b), true) => Ltl::until(a.push_neg(true), b.push_neg(true)),
        }
    }

    /// Renames atoms through `map`; atoms without an entry are kept.
    pub fn rename_atoms(&self, map: &dyn Fn(&str) -> Option<String>) -> Ltl {
        match self {
            Ltl::Atom(a) => Ltl::Atom(map(a).unwrap_or_else(|| a.clone())),
            Ltl::Not(f) => Ltl::not(f.rename_atoms(map)),
            Ltl::And(a, b) => Ltl::and(a.rename_atoms(map), b.rename_atoms(map)),
            Ltl::Or(a, b) => Ltl::or(a.rename_atoms(map), b.rename_atoms(map)),
            Ltl::Until(a, b) => Ltl::until(a.rename_atoms(map), b.rename_atoms(map)),
            Ltl::Release(a, b) => Ltl::release(a.rename_atoms(map), b.rename_atoms(map)),
            other => other.clone(),
        }
    }
}

/// Prints in concrete syntax; `Release` is written as `!(!a U !b)`.
impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => f.write_str("true"),
            Ltl::False => f.write_str("false"),
            Ltl::Atom(a) => f.write_str(a),
            Ltl::Not(g) => write!(f, "!{g}"),
            Ltl::And(a, b) => write!(f, "({a} & {b})"),
            Ltl::Or(a, b) => write!(f, "({a} | {b})"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
            Ltl::Release(a, b) => write!(f, "!(!{a} U !{b})"),
        }
    }
}

/// Words reserved by the LTL syntax.
pub const LTL_KEYWORDS: [&str; 7] = ["true", "false", "U", "W", "G", "F", "X"];

/// True for identifiers that the parser reads as a run of unary temporal
/// operators (`G`, `F`, `GF`, `FG`, ...) or that are binary operators.
pub fn is_operator_run(s: &str) -> bool {
    LTL_KEYWORDS.contains(&s) || is_unary_run(s)
}

fn is_unary_run(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| matches!(c, 'G' | 'F' | 'X'))
}

/// Parses LTL\X. Grammar, loosest first: `->` (right associative), `|`,
/// `&`, `U`/`W` (right associative), then unary `!`, `G`, `F`.
pub fn parse_ltl(src: &str) -> Result<Ltl, ParseError> {
    let toks = tokenize(src)?;
    parse_ltl_tokens(&toks)
}

pub fn parse_ltl_tokens(toks: &[Token]) -> Result<Ltl, ParseError> {
    let mut c = Cursor::new(toks);
    let f = ltl(&mut c)?;
    c.expect_eof()?;
    Ok(f)
}

/// Parses one formula at the cursor.
pub fn ltl(c: &mut Cursor<'_>) -> Result<Ltl, ParseError> {
    implication(c)
}

fn implication(c: &mut Cursor<'_>) -> Result<Ltl, ParseError> {
    let lhs = disjunction(c)?;
    if c.eat_punct("->") {
        let rhs = implication(c)?;
        return Ok(Ltl::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn disjunction(c: &mut Cursor<'_>) -> Result<Ltl, ParseError> {
    let mut lhs = conjunction(c)?;
    while c.eat_punct("|") {
        lhs = Ltl::or(lhs, conjunction(c)?);
    }
    Ok(lhs)
}

fn conjunction(c: &mut Cursor<'_>) -> Result<Ltl, ParseError> {
    let mut lhs = binary_temporal(c)?;
    while c.eat_punct("&") {
        lhs = Ltl::and(lhs, binary_temporal(c)?);
    }
    Ok(lhs)
}

fn binary_temporal(c: &mut Cursor<'_>) -> Result<Ltl, ParseError> {
    let lhs = unary(c)?;
    if c.eat_keyword("U") {
        return Ok(Ltl::until(lhs, binary_temporal(c)?));
    }
    if c.eat_keyword("W") {
        return Ok(Ltl::weak_until(lhs, binary_temporal(c)?));
    }
    Ok(lhs)
}

fn unary(c: &mut Cursor<'_>) -> Result<Ltl, ParseError> {
    if c.eat_punct("!") {
        return Ok(Ltl::not(unary(c)?));
    }
    if let Tok::Ident(word) = c.peek() {
        if is_unary_run(word) && !matches!(c.peek_at(1), Tok::Punct("@")) {
            let span = c.span();
            if word.contains('X') {
                return Err(ParseError::new(
                    span,
                    "the next operator X is not supported (only LTL without next is accepted)",
                ));
            }
            c.next();
            let mut body = unary(c)?;
            for op in word.chars().rev() {
                body = if op == 'G' { Ltl::always(body) } else { Ltl::eventually(body) };
            }
            return Ok(body);
        }
    }
    primary(c)
}

fn primary(c: &mut Cursor<'_>) -> Result<Ltl, ParseError> {
    if c.eat_punct("(") {
        let f = ltl(c)?;
        c.expect_punct(")")?;
        return Ok(f);
    }
    if c.eat_keyword("true") {
        return Ok(Ltl::True);
    }
    if c.eat_keyword("false") {
        return Ok(Ltl::False);
    }
    if c.is_keyword("U") || c.is_keyword("W") {
        return Err(c.unexpected("formula"));
    }
    let (name, _) = c.expect_name().map_err(|_| c.unexpected("formula"))?;
    if c.eat_punct("@") {
        let span = c.span();
        let i = c.expect_int()?;
        if i < 0 {
            return Err(ParseError::new(span, "process index must be nonnegative"));
        }
        return Ok(Ltl::Atom(format!("{name}@{i}")));
    }
    Ok(Ltl::Atom(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn mutual_exclusion_property() {
        let f = parse_ltl("G !(cs@0 & cs@1)").unwrap();
        let expected = Ltl::always(Ltl::not(Ltl::and(Ltl::atom("cs@0"), Ltl::atom("cs@1"))));
        assert_eq!(f, expected);
    }

    #[test]
    fn eventually_desugars() {
        assert_eq!(parse_ltl("F p").unwrap(), Ltl::until(Ltl::True, Ltl::atom("p")));
    }

    #[test]
    fn next_is_rejected() {
        let e = parse_ltl("X p").unwrap_err();
        assert!(e.message.contains("next"));
        assert!(parse_ltl("G X p").is_err());
    }

    #[test]
    fn precedence() {
        // U binds tighter than &, which binds tighter than |, then ->.
        let f = parse_ltl("a U b & c | d -> e").unwrap();
        let expected = Ltl::implies(
            Ltl::or(Ltl::and(Ltl::until(Ltl::atom("a"), Ltl::atom("b")), Ltl::atom("c")), Ltl::atom("d")),
            Ltl::atom("e"),
        );
        assert_eq!(f, expected);
        assert_eq!(parse_ltl("GF p").unwrap(), Ltl::always(Ltl::eventually(Ltl::atom("p"))));
        assert_eq!(
            parse_ltl("p W q").unwrap(),
            Ltl::weak_until(Ltl::atom("p"), Ltl::atom("q"))
        );
        assert!(parse_ltl("p U").is_err());
    }

    #[test]
    fn display_round_trip() {
        for src in ["G !(cs@0 & cs@1)", "GF p -> (q U r)", "p W !q", "own_fork[1]@2 U true"] {
            let f = parse_ltl(src).unwrap();
            assert_eq!(parse_ltl(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn nnf_has_no_inner_negation() {
        let f = parse_ltl("!(G p -> F (q & !r))").unwrap().nnf();
        fn ok(f: &Ltl) -> bool {
            match f {
                Ltl::Not(g) => matches!(**g, Ltl::Atom(_)),
                Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => ok(a) && ok(b),
                _ => true,
            }
        }
        assert!(ok(&f));
    }
}
