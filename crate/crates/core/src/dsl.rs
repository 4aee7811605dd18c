//! Text format for system specifications.
//!
//! ```text
//! file     := "system" name ";" ("bound" int ";")? process+ "property" ltl ";"
//! process  := "process" name ("(" ident "in" int ".." int ")")? "{" item* "}"
//! item     := ("shared" | "locals" | "locks" | "actions") name ("," name)* ";"
//!           | "alias" ident "=" name ";"
//!           | "axiom" ident ":" formula ";"
//!           | "pre" name ":" formula ";"
//! ```
//!
//! A process with a parameter `(i in a..b)` is a template, expanded once for
//! every `i` in the half-open range. Inside a template, a bracketed index
//! such as `fork[i+1]` is evaluated modulo the number of copies. Expanded
//! copies are named `P[0]`, `P[1]`, ... and numbered in file order; the
//! property refers to local propositions of copy `j` as `p@j`.
//!
//! `pre a: f` gives the enabling condition of action `a` over the free state
//! variable `s`; it is used to saturate starting instances. Aliases are
//! textual and also apply to property atoms (`ownLeft@0`).
//!
//! The lock and shared-variable axioms are added to every process.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::logic::{parse_formula_tokens, RelFormula};
use crate::ltl::{parse_ltl_tokens, Ltl};
use crate::lts::Vocabulary;
use crate::product::tagged;
use crate::spec::{sync_axioms, NamedFormula, ProcessSpec, SystemSpec};
use crate::syntax::{tokenize, Cursor, ParseError, Span, Tok, Token};

pub const MUTEX_DSPEC: &str = include_str!("../specs/mutex.dspec");
pub const PHIL_DSPEC: &str = include_str!("../specs/phil.dspec");
pub const RW_DSPEC: &str = include_str!("../specs/rw.dspec");

/// Parses and validates a specification file.
pub fn parse_spec(src: &str) -> Result<SystemSpec, ParseError> {
    let toks = tokenize(src)?;
    let mut c = Cursor::new(&toks);
    c.expect_keyword("system")?;
    let (name, _) = c.expect_name()?;
    c.expect_punct(";")?;
    let mut bound = None;
    if c.eat_keyword("bound") {
        let span = c.span();
        let k = c.expect_int()?;
        if k < 1 {
            return Err(ParseError::new(span, "bound must be positive"));
        }
        bound = Some(k as usize);
        c.expect_punct(";")?;
    }
    let mut processes = Vec::new();
    let mut aliases = Vec::new();
    while c.is_keyword("process") {
        for (p, a) in process(&mut c)? {
            processes.push(p);
            aliases.push(a);
        }
    }
    if processes.is_empty() {
        return Err(c.error("no processes"));
    }
    let mut seen = BTreeSet::new();
    for p in &processes {
        if !seen.insert(p.name.clone()) {
            return Err(c.error(format!("process `{}` is declared more than once", p.name)));
        }
    }
    c.expect_keyword("property")?;
    let start = c.position();
    let body = statement(&mut c)?;
    let property = parse_ltl_tokens(&body)?;
    let property = resolve_property(&property, &processes, &aliases, &toks[start..])?;
    if !c.at_eof() {
        return Err(c.unexpected("end of input"));
    }
    Ok(SystemSpec { name, processes, property, bound })
}

type Aliases = BTreeMap<String, Vec<Tok>>;

/// Tokens up to the next `;` (consumed), with an `Eof` appended.
fn statement(c: &mut Cursor<'_>) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    loop {
        match c.peek() {
            Tok::Eof => return Err(c.unexpected("`;`")),
            Tok::Punct(";") if depth == 0 => {
                let span = c.span();
                c.next();
                out.push(Token { tok: Tok::Eof, span });
                return Ok(out);
            }
            Tok::Punct("(") => depth += 1,
            Tok::Punct(")") => depth -= 1,
            _ => {}
        }
        out.push(c.next().clone());
    }
}

fn process(c: &mut Cursor<'_>) -> Result<Vec<(ProcessSpec, Aliases)>, ParseError> {
    c.expect_keyword("process")?;
    let (name, name_span) = c.expect_name()?;
    let mut param = None;
    if c.eat_punct("(") {
        let (var, _) = c.expect_ident()?;
        c.expect_keyword("in")?;
        let span = c.span();
        let lo = c.expect_int()?;
        c.expect_punct("..")?;
        let hi = c.expect_int()?;
        if hi <= lo {
            return Err(ParseError::new(span, format!("empty range {lo}..{hi}")));
        }
        c.expect_punct(")")?;
        param = Some((var, lo, hi));
    }
    c.expect_punct("{")?;
    let open = c.position();
    let mut depth = 1;
    while depth > 0 {
        match c.next().tok {
            Tok::Punct("{") => depth += 1,
            Tok::Punct("}") => depth -= 1,
            Tok::Eof => return Err(ParseError::new(name_span, format!("process `{name}` is not closed"))),
            _ => {}
        }
    }
    let close = c.position() - 1;
    let raw = &c.tokens()[open..close];
    let Some((var, lo, hi)) = param else {
        return Ok(vec![process_body(&name, raw, c.tokens()[close].span)?]);
    };
    let n = hi - lo;
    (lo..hi)
        .map(|i| {
            let body = instantiate(raw, &var, i, n)?;
            process_body(&format!("{name}[{i}]"), &body, c.tokens()[close].span)
        })
        .collect()
}

/// Replaces every bracketed index expression by its value modulo `n`.
fn instantiate(raw: &[Token], var: &str, value: i64, n: i64) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        if raw[i].tok == Tok::Punct("[") {
            let Some(len) = raw[i + 1..].iter().position(|t| t.tok == Tok::Punct("]")) else {
                return Err(ParseError::new(raw[i].span, "unclosed `[`"));
            };
            let inner = &raw[i + 1..i + 1 + len];
            let mut e = IndexExpr { toks: inner, pos: 0, var, value };
            let v = e.sum()?;
            if e.pos != inner.len() {
                return Err(ParseError::new(inner[e.pos].span, "malformed index expression"));
            }
            out.push(raw[i].clone());
            out.push(Token { tok: Tok::Int(v.rem_euclid(n)), span: raw[i + 1].span });
            out.push(raw[i + 1 + len].clone());
            i += len + 2;
        } else {
            if raw[i].tok == Tok::Ident(var.to_string()) {
                return Err(ParseError::new(raw[i].span, format!("`{var}` may only be used inside an index `[...]`")));
            }
            out.push(raw[i].clone());
            i += 1;
        }
    }
    Ok(out)
}

struct IndexExpr<'a> {
    toks: &'a [Token],
    pos: usize,
    var: &'a str,
    value: i64,
}

impl IndexExpr<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn err(&self, msg: &str) -> ParseError {
        let span = self.toks.get(self.pos).or(self.toks.last()).map(|t| t.span).unwrap_or_default();
        ParseError::new(span, msg)
    }

    fn sum(&mut self) -> Result<i64, ParseError> {
        let mut v = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Punct("+")) => {
                    self.pos += 1;
                    v += self.product()?;
                }
                Some(Tok::Punct("-")) => {
                    self.pos += 1;
                    v -= self.product()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn product(&mut self) -> Result<i64, ParseError> {
        let mut v = self.atom()?;
        while let Some(Tok::Punct(op @ ("*" | "%"))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.atom()?;
            v = if op == "*" {
                v * rhs
            } else if rhs == 0 {
                return Err(self.err("modulo by zero"));
            } else {
                v.rem_euclid(rhs)
            };
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Ident(s)) if s == self.var => {
                self.pos += 1;
                Ok(self.value)
            }
            Some(Tok::Punct("(")) => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(&Tok::Punct(")")) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("malformed index expression")),
        }
    }
}

fn process_body(name: &str, body: &[Token], end: Span) -> Result<(ProcessSpec, Aliases), ParseError> {
    let mut toks = body.to_vec();
    toks.push(Token { tok: Tok::Eof, span: end });
    let mut c = Cursor::new(&toks);
    let mut lists: [Vec<String>; 4] = Default::default();
    let mut aliases = Aliases::new();
    let mut axioms: Vec<(NamedFormula, Vec<Token>)> = Vec::new();
    let mut pres: Vec<(String, Span, RelFormula, Vec<Token>)> = Vec::new();
    while !c.at_eof() {
        let span = c.span();
        let (kw, _) = c.expect_ident()?;
        match kw.as_str() {
            "shared" | "locals" | "locks" | "actions" => {
                let slot = ["shared", "locals", "locks", "actions"].iter().position(|k| *k == kw).unwrap();
                loop {
                    lists[slot].push(c.expect_name()?.0);
                    if !c.eat_punct(",") {
                        break;
                    }
                }
                c.expect_punct(";")?;
            }
            "alias" => {
                let (a, a_span) = c.expect_ident()?;
                c.expect_punct("=")?;
                let mut target = Vec::new();
                while !c.is_punct(";") && !c.at_eof() {
                    target.push(c.next().tok.clone());
                }
                c.expect_punct(";")?;
                if aliases.insert(a.clone(), target).is_some() {
                    return Err(ParseError::new(a_span, format!("alias `{a}` is declared more than once")));
                }
            }
            "axiom" => {
                let (n, n_span) = c.expect_ident()?;
                c.expect_punct(":")?;
                let ftoks = substitute(&statement(&mut c)?, &aliases);
                let f = parse_formula_tokens(&ftoks)?;
                if let Some(v) = f.free_vars().into_iter().next() {
                    return Err(ParseError::new(n_span, format!("axiom `{n}` has free variable `{v}`")));
                }
                if axioms.iter().any(|(a, _)| a.name == n) {
                    return Err(ParseError::new(n_span, format!("axiom `{n}` is declared more than once")));
                }
                axioms.push((NamedFormula::new(n, f), ftoks));
            }
            "pre" => {
                let (a, a_span) = c.expect_name()?;
                c.expect_punct(":")?;
                let ftoks = substitute(&statement(&mut c)?, &aliases);
                let f = parse_formula_tokens(&ftoks)?;
                if let Some(v) = f.free_vars().into_iter().find(|v| v != "s") {
                    return Err(ParseError::new(a_span, format!("precondition of `{a}` has free variable `{v}` (only `s` is allowed)")));
                }
                pres.push((a, a_span, f, ftoks));
            }
            other => {
                return Err(ParseError::new(
                    span,
                    format!("expected `shared`, `locals`, `locks`, `actions`, `alias`, `axiom` or `pre`, found `{other}`"),
                ))
            }
        }
    }
    let [shared, locals, locks, actions] = lists;
    let vocab = Vocabulary::new(shared, locals, locks, actions)
        .map_err(|e| ParseError::new(toks[0].span, format!("process `{name}`: {e}")))?;
    let props = vocab.props();
    let acts: Vec<String> = vocab.all_actions().into_iter().map(|a| a.name).collect();
    for a in aliases.keys() {
        if props.contains(a) || acts.contains(a) {
            return Err(ParseError::new(toks[0].span, format!("alias `{a}` shadows a declared name")));
        }
    }
    let generated: Vec<String> = sync_axioms(&vocab).into_iter().map(|n| n.name).collect();
    let check_symbols = |f: &RelFormula, ftoks: &[Token]| -> Result<(), ParseError> {
        let (ps, as_) = f.symbols();
        for p in ps.iter().filter(|p| !props.contains(p)) {
            return Err(ParseError::new(locate(ftoks, p), format!("undeclared proposition `{p}` in process `{name}`")));
        }
        for a in as_.iter().filter(|a| !acts.contains(a)) {
            return Err(ParseError::new(locate(ftoks, a), format!("undeclared action `{a}` in process `{name}`")));
        }
        Ok(())
    };
    let mut formulas = Vec::new();
    for (nf, ftoks) in axioms {
        if generated.contains(&nf.name) {
            return Err(ParseError::new(ftoks[0].span, format!("axiom name `{}` is reserved", nf.name)));
        }
        check_symbols(&nf.formula, &ftoks)?;
        formulas.push(nf);
    }
    let mut spec = ProcessSpec::new(name, vocab, formulas);
    for (a, span, f, ftoks) in pres {
        if !spec.vocab.actions().contains(&a) {
            return Err(ParseError::new(span, format!("precondition for undeclared action `{a}`")));
        }
        check_symbols(&f, &ftoks)?;
        if spec.preconditions.insert(a.clone(), f).is_some() {
            return Err(ParseError::new(span, format!("action `{a}` has two preconditions")));
        }
    }
    Ok((spec, aliases))
}

/// Expands aliases in a token run.
fn substitute(toks: &[Token], aliases: &Aliases) -> Vec<Token> {
    let mut out = Vec::with_capacity(toks.len());
    for t in toks {
        match &t.tok {
            Tok::Ident(s) if aliases.contains_key(s) => {
                out.extend(aliases[s].iter().map(|tok| Token { tok: tok.clone(), span: t.span }));
            }
            _ => out.push(t.clone()),
        }
    }
    out
}

/// Span of the first occurrence of `name` (with folded indices) in `toks`.
fn locate(toks: &[Token], name: &str) -> Span {
    let mut c = Cursor::new(toks);
    while !c.at_eof() {
        let span = c.span();
        if matches!(c.peek(), Tok::Ident(_)) {
            if let Ok((n, _)) = c.expect_name() {
                if n == name {
                    return span;
                }
            }
        } else {
            c.next();
        }
    }
    toks.first().map(|t| t.span).unwrap_or_default()
}

fn resolve_property(
    f: &Ltl,
    processes: &[ProcessSpec],
    aliases: &[Aliases],
    toks: &[Token],
) -> Result<Ltl, ParseError> {
    let mut valid = BTreeSet::new();
    for (i, p) in processes.iter().enumerate() {
        valid.extend(p.vocab.shared_props());
        valid.extend(p.vocab.local_props().iter().map(|l| tagged(l, i)));
    }
    let resolve = |a: &str| -> String {
        let Some((base, idx)) = a.rsplit_once('@') else { return a.to_string() };
        let Some(target) = idx.parse::<usize>().ok().and_then(|i| aliases.get(i)).and_then(|al| al.get(base)) else {
            return a.to_string();
        };
        let mut name = String::new();
        for t in target {
            match t {
                Tok::Ident(s) => name.push_str(s),
                Tok::Int(n) => {
                    let _ = write!(name, "{n}");
                }
                Tok::Punct(p) => name.push_str(p),
                Tok::Eof => {}
            }
        }
        format!("{name}@{idx}")
    };
    if let Some(a) = f.atoms().into_iter().find(|a| !valid.contains(&resolve(a))) {
        let (base, idx) = a.rsplit_once('@').map_or((a.as_str(), None), |(b, i)| (b, Some(i)));
        let msg = match idx {
            Some(i) if i.parse::<usize>().map_or(true, |i| i >= processes.len()) => {
                format!("property refers to process {i}, but there are {} processes", processes.len())
            }
            _ => format!("undeclared proposition `{a}` in property"),
        };
        return Err(ParseError::new(locate(toks, base), msg));
    }
    Ok(f.rename_atoms(&|a| Some(resolve(a))))
}

/// Prints `s` in the format read by [`parse_spec`], templates expanded and
/// the generated synchronization axioms left out.
pub fn print_spec(s: &SystemSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {};", s.name);
    if let Some(k) = s.bound {
        let _ = writeln!(out, "bound {k};");
    }
    for p in &s.processes {
        let _ = writeln!(out, "\nprocess {} {{", p.name);
        let v = &p.vocab;
        for (kw, names) in [("shared", v.shared()), ("locals", v.locals()), ("locks", v.locks()), ("actions", v.actions())] {
            if !names.is_empty() {
                let _ = writeln!(out, "  {kw} {};", names.join(", "));
            }
        }
        let generated: Vec<String> = sync_axioms(v).into_iter().map(|n| n.name).collect();
        for n in p.formulas.iter().filter(|n| !generated.contains(&n.name)) {
            let _ = writeln!(out, "  axiom {}: {};", n.name, n.formula);
        }
        for (a, f) in &p.preconditions {
            let _ = writeln!(out, "  pre {a}: {f};");
        }
        out.push_str("}\n");
    }
    let _ = writeln!(out, "\nproperty {};", s.property);
    out
}

fn replace_line(src: &str, prefix: &str, line: &str) -> String {
    let mut out = String::new();
    for l in src.lines() {
        out.push_str(if l.starts_with(prefix) { line } else { l });
        out.push('\n');
    }
    out
}

fn conj(parts: &[String], op: &str) -> String {
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        parts.iter().map(|p| format!("({p})")).collect::<Vec<_>>().join(op)
    }
}

/// Mutual exclusion for `n >= 2` processes.
pub fn mutex(n: usize) -> String {
    assert!(n >= 2, "mutex needs two processes");
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push(format!("cs@{a} & cs@{b}"));
        }
    }
    let src = replace_line(MUTEX_DSPEC, "process P(", &format!("process P(i in 0..{n}) {{"));
    let src = replace_line(&src, "// ", &format!("// {n} processes sharing one try-lock `m`."));
    replace_line(&src, "property", &format!("property G !({});", conj(&pairs, " | ")))
}

/// Dining philosophers, `n >= 2`.
pub fn phil(n: usize) -> String {
    assert!(n >= 2, "phil needs two philosophers");
    let all = |p: &str| (0..n).map(|i| format!("{p}@{i}")).collect::<Vec<_>>().join(" & ");
    let src = replace_line(PHIL_DSPEC, "process Phil(", &format!("process Phil(i in 0..{n}) {{"));
    let src = replace_line(&src, "// ", &format!("// {n} dining philosophers; fork[i] lies between philosophers i-1 and i."));
    replace_line(&src, "property", &format!("property G (!({}) & !({}));", all("ownRight"), all("ownLeft")))
}

/// `readers` readers and `writers` writers, both at least one. Readers are
/// processes `0..readers`.
pub fn rw(readers: usize, writers: usize) -> String {
    assert!(readers >= 1 && writers >= 1, "rw needs a reader and a writer");
    let mut parts = Vec::new();
    for w in readers..readers + writers {
        for r in 0..readers {
            parts.push(format!("!(reading@{r} & writing@{w})"));
        }
        for v in w + 1..readers + writers {
            parts.push(format!("!(writing@{w} & writing@{v})"));
        }
    }
    let src = replace_line(RW_DSPEC, "process Reader(", &format!("process Reader(i in 0..{readers}) {{"));
    let src = replace_line(&src, "process Writer(", &format!("process Writer(i in 0..{writers}) {{"));
    let src = replace_line(&src, "// ", &format!("// {readers} readers and {writers} writers sharing the lock `db`."));
    let body = if parts.len() == 1 { parts[0].clone() } else { format!("({})", parts.join(" & ")) };
    replace_line(&src, "property", &format!("property G {body};"))
}

/// Bundled benchmark by name: `mutex`, `phil`, `rw`, or a sized form such
/// as `mutex3`, `phil2` or `rw1_2`.
pub fn bundled(name: &str) -> Option<String> {
    let num = |s: &str| s.parse::<usize>().ok();
    match name {
        "mutex" => Some(MUTEX_DSPEC.to_string()),
        "phil" => Some(PHIL_DSPEC.to_string()),
        "rw" => Some(RW_DSPEC.to_string()),
        _ => {
            if let Some(n) = name.strip_prefix("mutex").and_then(num).filter(|n| *n >= 2) {
                Some(mutex(n))
            } else if let Some(n) = name.strip_prefix("phil").and_then(num).filter(|n| *n >= 2) {
                Some(phil(n))
            } else {
                let (r, w) = name.strip_prefix("rw")?.split_once('_')?;
                Some(rw(num(r).filter(|r| *r >= 1)?, num(w).filter(|w| *w >= 1)?))
            }
        }
    }
}
