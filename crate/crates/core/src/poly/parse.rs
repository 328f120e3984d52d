//! Reader for the polynomial-system text format.
//!
//! A file is a sequence of `;`-terminated statements. `#` starts a comment
//! running to the end of the line. Two optional headers may precede the
//! polynomials:
//!
//! ```text
//! vars: x,y,z;        # declare variable names (default: x0..x{n-1})
//! root-order: 3;      # order of the root of unity written as plain `u`
//! ```
//!
//! Each remaining statement is a polynomial expression built from `+ - * / ^`
//! and parentheses. Atoms are integers, decimals (read exactly as rationals),
//! fractions via `/`, variables, `i` for the fourth root of unity, `u` for
//! the declared root of unity, and `u<m>` for an explicit order-`m` root.
//! Exponents are integer literals and may be negative.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};

use super::{default_names, LaurentPolynomial, PolySystem};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// Upper bound on `x<k>` indices, so a typo cannot allocate gigantic
/// exponent vectors.
const MAX_VAR_INDEX: usize = 10_000;

/// Upper bound on exponents of multi-term bases, so parsing cannot be made
/// to expand astronomically large products.
const MAX_EXPANSION_POW: i64 = 1_000;

pub fn parse_system<C: Coeff>(text: &str) -> Result<PolySystem<C>> {
    let chars = positioned(text);
    let statements = split_statements(&chars)?;

    let mut declared: Option<Vec<String>> = None;
    let mut root_order: Option<u32> = None;
    let mut poly_statements: Vec<&[PChar]> = Vec::new();
    for stmt in &statements {
        if let Some(rest) = header_body(stmt, "vars") {
            check_header_position(&poly_statements, stmt)?;
            if declared.is_some() {
                return Err(syntax(stmt, "duplicate 'vars:' header"));
            }
            declared = Some(parse_vars_header(rest)?);
        } else if let Some(rest) = header_body(stmt, "root-order") {
            check_header_position(&poly_statements, stmt)?;
            if root_order.is_some() {
                return Err(syntax(stmt, "duplicate 'root-order:' header"));
            }
            root_order = Some(parse_root_order_header(rest)?);
        } else {
            poly_statements.push(stmt);
        }
    }
    if poly_statements.is_empty() {
        return Err(Error::EmptySystem);
    }

    let token_lists: Vec<Vec<Tok>> =
        poly_statements.iter().map(|s| lex(s)).collect::<Result<_>>()?;

    let (table, names) = match declared {
        Some(names) => (VarTable::Named(names.clone()), names),
        None => {
            let mut max_index: Option<usize> = None;
            for toks in &token_lists {
                for t in toks {
                    if let K::Ident(name) = &t.kind {
                        if let Some(ix) = implicit_index(name) {
                            if ix > MAX_VAR_INDEX {
                                return Err(Error::Syntax {
                                    line: t.line,
                                    col: t.col,
                                    msg: format!("variable index in '{}' is too large", name),
                                });
                            }
                            max_index = Some(max_index.map_or(ix, |m| m.max(ix)));
                        }
                    }
                }
            }
            let n = max_index.map_or(0, |m| m + 1);
            (VarTable::Implicit(n), default_names(n))
        }
    };
    let nvars = names.len();

    let mut polys = Vec::new();
    for toks in &token_lists {
        let mut p = Parser::<C> {
            toks,
            i: 0,
            nvars,
            table: &table,
            root_order,
            _marker: std::marker::PhantomData,
        };
        let poly = p.expr()?;
        p.expect_end()?;
        polys.push(poly);
    }
    PolySystem::with_names(polys, names)
}

/// Reads a single coefficient value: an expression with no variables.
pub fn parse_coefficient<C: Coeff>(text: &str, root_order: Option<u32>) -> Result<C> {
    let chars = positioned(text);
    let toks = lex(&chars)?;
    let table = VarTable::Named(Vec::new());
    let mut p = Parser::<C> {
        toks: &toks,
        i: 0,
        nvars: 0,
        table: &table,
        root_order,
        _marker: std::marker::PhantomData,
    };
    let poly = p.expr()?;
    p.expect_end()?;
    let value = poly.terms().next().map(|(_, c)| c.clone());
    Ok(value.unwrap_or_else(C::zero))
}

/// A character with its 1-based source position.
#[derive(Clone, Copy)]
struct PChar {
    ch: char,
    line: usize,
    col: usize,
}

/// Positions every character and strips comments.
fn positioned(text: &str) -> Vec<PChar> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut in_comment = false;
    for ch in text.chars() {
        if ch == '\n' {
            in_comment = false;
            out.push(PChar { ch, line, col });
            line += 1;
            col = 1;
            continue;
        }
        if ch == '#' {
            in_comment = true;
        }
        if !in_comment {
            out.push(PChar { ch, line, col });
        }
        col += 1;
    }
    out
}

/// Splits on `;`, dropping empty segments. Trailing non-whitespace with no
/// final `;` is an error.
fn split_statements(chars: &[PChar]) -> Result<Vec<&[PChar]>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, pc) in chars.iter().enumerate() {
        if pc.ch == ';' {
            let seg = &chars[start..i];
            if seg.iter().any(|p| !p.ch.is_whitespace()) {
                out.push(seg);
            }
            start = i + 1;
        }
    }
    if let Some(pc) = chars[start..].iter().find(|p| !p.ch.is_whitespace()) {
        return Err(Error::Syntax {
            line: pc.line,
            col: pc.col,
            msg: "statement is not terminated by ';'".into(),
        });
    }
    Ok(out)
}

fn syntax(stmt: &[PChar], msg: &str) -> Error {
    let pc = stmt.iter().find(|p| !p.ch.is_whitespace()).or(stmt.first());
    Error::Syntax {
        line: pc.map_or(1, |p| p.line),
        col: pc.map_or(1, |p| p.col),
        msg: msg.into(),
    }
}

fn check_header_position(poly_statements: &[&[PChar]], stmt: &[PChar]) -> Result<()> {
    if poly_statements.is_empty() {
        Ok(())
    } else {
        Err(syntax(stmt, "headers must appear before the first polynomial"))
    }
}

/// If the statement starts with `keyword` followed by `:`, returns the part
/// after the colon.
fn header_body<'a>(stmt: &'a [PChar], keyword: &str) -> Option<&'a [PChar]> {
    let mut i = 0;
    while i < stmt.len() && stmt[i].ch.is_whitespace() {
        i += 1;
    }
    for kc in keyword.chars() {
        if i >= stmt.len() || stmt[i].ch != kc {
            return None;
        }
        i += 1;
    }
    while i < stmt.len() && stmt[i].ch.is_whitespace() {
        i += 1;
    }
    if i < stmt.len() && stmt[i].ch == ':' {
        Some(&stmt[i + 1..])
    } else {
        None
    }
}

fn parse_vars_header(body: &[PChar]) -> Result<Vec<String>> {
    let mut names = Vec::new();
    let mut i = 0;
    loop {
        while i < body.len() && body[i].ch.is_whitespace() {
            i += 1;
        }
        let start = i;
        while i < body.len() && (body[i].ch.is_alphanumeric() || body[i].ch == '_') {
            i += 1;
        }
        if start == i || body[start].ch.is_ascii_digit() {
            return Err(syntax(&body[start.min(body.len())..], "expected a variable name"));
        }
        let name: String = body[start..i].iter().map(|p| p.ch).collect();
        if names.contains(&name) {
            return Err(syntax(&body[start..], "duplicate variable name"));
        }
        names.push(name);
        while i < body.len() && body[i].ch.is_whitespace() {
            i += 1;
        }
        if i >= body.len() {
            return Ok(names);
        }
        if body[i].ch != ',' {
            return Err(syntax(&body[i..], "expected ',' between variable names"));
        }
        i += 1;
    }
}

fn parse_root_order_header(body: &[PChar]) -> Result<u32> {
    let digits: String = body.iter().filter(|p| !p.ch.is_whitespace()).map(|p| p.ch).collect();
    match digits.parse::<u32>() {
        Ok(m) if m >= 1 => Ok(m),
        _ => Err(syntax(body, "root order must be a positive integer")),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum K {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Tok {
    kind: K,
    line: usize,
    col: usize,
}

fn lex(stmt: &[PChar]) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut i = 0;
    while i < stmt.len() {
        let PChar { ch, line, col } = stmt[i];
        let single = |kind| Tok { kind, line, col };
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' => {
                toks.push(single(K::Plus));
                i += 1;
            }
            '-' => {
                toks.push(single(K::Minus));
                i += 1;
            }
            '*' => {
                toks.push(single(K::Star));
                i += 1;
            }
            '/' => {
                toks.push(single(K::Slash));
                i += 1;
            }
            '^' => {
                toks.push(single(K::Caret));
                i += 1;
            }
            '(' => {
                toks.push(single(K::LParen));
                i += 1;
            }
            ')' => {
                toks.push(single(K::RParen));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < stmt.len() && (stmt[i].ch.is_ascii_digit() || stmt[i].ch == '.') {
                    i += 1;
                }
                let text: String = stmt[start..i].iter().map(|p| p.ch).collect();
                let q = parse_number(&text).ok_or(Error::Syntax {
                    line,
                    col,
                    msg: format!("malformed number '{}'", text),
                })?;
                toks.push(Tok { kind: K::Num(q), line, col });
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < stmt.len()
                    && (stmt[i].ch.is_alphanumeric() || stmt[i].ch == '_')
                {
                    i += 1;
                }
                let name: String = stmt[start..i].iter().map(|p| p.ch).collect();
                toks.push(Tok { kind: K::Ident(name), line, col });
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character '{}'", other),
                })
            }
        }
    }
    Ok(toks)
}

/// Integer or decimal literal, read exactly.
fn parse_number(text: &str) -> Option<BigRational> {
    let mut parts = text.splitn(3, '.');
    let whole = parts.next().unwrap_or("");
    let frac = parts.next().unwrap_or("");
    if parts.next().is_some() || (whole.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits: String = format!("{}{}", whole, frac);
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = digits.parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac.len());
    Some(BigRational::new(numer, denom))
}

enum VarTable {
    Named(Vec<String>),
    Implicit(usize),
}

impl VarTable {
    fn resolve(&self, name: &str) -> Option<usize> {
        match self {
            VarTable::Named(names) => names.iter().position(|n| n == name),
            VarTable::Implicit(n) => implicit_index(name).filter(|ix| ix < n),
        }
    }
}

/// `x<digits>` names used when no `vars:` header is present.
fn implicit_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

struct Parser<'a, C: Coeff> {
    toks: &'a [Tok],
    i: usize,
    nvars: usize,
    table: &'a VarTable,
    root_order: Option<u32>,
    _marker: std::marker::PhantomData<C>,
}

type Poly<C> = LaurentPolynomial<C>;

impl<'a, C: Coeff> Parser<'a, C> {
    fn peek(&self) -> Option<&'a K> {
        self.toks.get(self.i).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.i);
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.i)
            .or_else(|| self.toks.last())
            .map_or((1, 1), |t| (t.line, t.col))
    }

    fn fail(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::Syntax { line, col, msg: msg.into() }
    }

    fn expect_end(&self) -> Result<()> {
        if self.i == self.toks.len() {
            Ok(())
        } else {
            Err(self.fail("unexpected trailing input after expression"))
        }
    }

    fn expr(&mut self) -> Result<Poly<C>> {
        let mut negate = false;
        match self.peek() {
            Some(K::Plus) => {
                self.bump();
            }
            Some(K::Minus) => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(K::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(K::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly<C>> {
        let mut acc = self.signed_factor()?;
        loop {
            match self.peek() {
                Some(K::Star) => {
                    self.bump();
                    acc = acc.mul(&self.signed_factor()?);
                }
                Some(K::Slash) => {
                    let (line, col) = self.here();
                    self.bump();
                    let rhs = self.signed_factor()?;
                    acc = divide(acc, rhs).map_err(|msg| Error::Syntax { line, col, msg })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed_factor(&mut self) -> Result<Poly<C>> {
        if matches!(self.peek(), Some(K::Minus)) {
            self.bump();
            Ok(self.factor()?.neg())
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Poly<C>> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(K::Caret)) {
            return Ok(base);
        }
        let (line, col) = self.here();
        self.bump();
        let mut sign = 1i64;
        if matches!(self.peek(), Some(K::Minus)) {
            self.bump();
            sign = -1;
        }
        let Some(Tok { kind: K::Num(q), .. }) = self.bump() else {
            return Err(Error::Syntax { line, col, msg: "malformed exponent".into() });
        };
        if !q.is_integer() {
            return Err(Error::Syntax {
                line,
                col,
                msg: format!("malformed exponent {}: must be an integer", q),
            });
        }
        let k = q.to_integer().to_i64().filter(|k| k.abs() <= i64::MAX / 2).ok_or(
            Error::Syntax { line, col, msg: "exponent is too large".into() },
        )? * sign;
        if base.num_terms() > 1 && k > MAX_EXPANSION_POW {
            return Err(Error::Syntax { line, col, msg: "exponent is too large".into() });
        }
        base.pow(k).map_err(|e| match e {
            Error::Invalid(msg) => Error::Syntax { line, col, msg },
            other => other,
        })
    }

    fn atom(&mut self) -> Result<Poly<C>> {
        let Some(tok) = self.bump() else {
            return Err(self.fail("expected a term"));
        };
        let (line, col) = (tok.line, tok.col);
        match tok.kind.clone() {
            K::Num(q) => Ok(Poly::constant(self.nvars, C::from_rational(&q))),
            K::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok { kind: K::RParen, .. }) => Ok(inner),
                    _ => Err(Error::Syntax {
                        line,
                        col,
                        msg: "unclosed parenthesis".into(),
                    }),
                }
            }
            K::Ident(name) => self.resolve_ident(&name, line, col),
            _ => Err(Error::Syntax { line, col, msg: "expected a term".into() }),
        }
    }

    fn resolve_ident(&self, name: &str, line: usize, col: usize) -> Result<Poly<C>> {
        if let Some(ix) = self.table.resolve(name) {
            return Ok(Poly::variable(self.nvars, ix));
        }
        if name == "i" {
            return Ok(Poly::constant(self.nvars, C::root_of_unity(4, 1)));
        }
        if name == "u" {
            return match self.root_order {
                Some(m) => Ok(Poly::constant(self.nvars, C::root_of_unity(m, 1))),
                None => Err(Error::Syntax {
                    line,
                    col,
                    msg: "'u' requires a 'root-order:' header".into(),
                }),
            };
        }
        if let Some(rest) = name.strip_prefix('u') {
            if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                return match rest.parse::<u32>() {
                    Ok(m) if m >= 1 => Ok(Poly::constant(self.nvars, C::root_of_unity(m, 1))),
                    _ => Err(Error::Syntax {
                        line,
                        col,
                        msg: format!("invalid root-of-unity order in '{}'", name),
                    }),
                };
            }
        }
        Err(Error::Syntax { line, col, msg: format!("unknown variable '{}'", name) })
    }
}

/// Division: the divisor must be a nonzero monomial.
fn divide<C: Coeff>(lhs: Poly<C>, rhs: Poly<C>) -> std::result::Result<Poly<C>, String> {
    if rhs.is_zero() {
        return Err("division by zero".into());
    }
    if rhs.num_terms() > 1 {
        return Err("division by a polynomial with several terms is not supported".into());
    }
    let inv = rhs.pow(-1).map_err(|e| e.to_string())?;
    Ok(lhs.mul(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Cyclotomic;

    fn q(text: &str) -> Result<PolySystem<Cyclotomic>> {
        parse_system(text)
    }

    #[test]
    fn empty_input_is_an_empty_system_error() {
        assert!(matches!(q("").unwrap_err(), Error::EmptySystem));
        assert!(matches!(q("  # just a comment\n").unwrap_err(), Error::EmptySystem));
        assert!(matches!(q("vars: x,y;").unwrap_err(), Error::EmptySystem));
    }

    #[test]
    fn missing_semicolon_reports_position() {
        let err = q("x0 + 1").unwrap_err();
        match err {
            Error::Syntax { line: 1, col, .. } => assert_eq!(col, 1),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn unknown_variable_and_malformed_exponent() {
        assert!(matches!(
            q("y0 + 1;").unwrap_err(),
            Error::Syntax { line: 1, col: 1, .. }
        ));
        let err = q("x0^1.5;").unwrap_err();
        match err {
            Error::Syntax { msg, .. } => assert!(msg.contains("exponent")),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn plain_u_needs_a_header() {
        assert!(q("u*x0 + 1;").is_err());
        let sys = q("root-order: 3; u*x0 + 1;").unwrap();
        assert_eq!(
            sys.polys[0].coefficient(&[1]),
            Some(&Cyclotomic::root_of_unity(3, 1))
        );
        // Order-qualified generators need no header.
        let sys = q("u3^2*x0 - u4;").unwrap();
        assert_eq!(
            sys.polys[0].coefficient(&[1]),
            Some(&Cyclotomic::root_of_unity(3, 2))
        );
    }

    #[test]
    fn headers_after_polynomials_are_rejected() {
        assert!(q("x0 + 1; vars: a,b;").is_err());
        assert!(q("vars: a,b; vars: c,d; a + b;").is_err());
    }

    #[test]
    fn comments_and_positions() {
        let sys = q("# leading comment\nx0 # inline\n + x1;\n").unwrap();
        assert_eq!(sys.nvars, 2);
        // An error after a comment still points at the real source position.
        let err = q("# comment\nx0 + $;").unwrap_err();
        match err {
            Error::Syntax { line, col, .. } => {
                assert_eq!((line, col), (2, 6));
            }
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn division_rules() {
        let sys = q("x0/2 + 1/4;").unwrap();
        let half = Cyclotomic::from_rational(&BigRational::new(1.into(), 2.into()));
        assert_eq!(sys.polys[0].coefficient(&[1]), Some(&half));
        assert!(q("1/(x0 + 1);").is_err());
        assert!(q("1/0;").is_err());
        // Dividing by a monomial shifts exponents.
        let sys = q("x1/x0;").unwrap();
        assert_eq!(sys.polys[0].support(), vec![vec![-1, 1]]);
    }

    #[test]
    fn coefficient_reader_round_trips_displays() {
        for text in ["0", "7", "-3/4", "u3^2", "-u3", "1/2*u12+3", "u4"] {
            let c: Cyclotomic = parse_coefficient(text, None).unwrap();
            assert_eq!(c.to_string(), text);
        }
        let c: Cyclotomic = parse_coefficient("u", Some(6)).unwrap();
        assert_eq!(c, Cyclotomic::root_of_unity(6, 1));
        assert!(parse_coefficient::<Cyclotomic>("x0", None).is_err());
    }

    #[test]
    fn implicit_variable_indices_bound_nvars() {
        let sys = q("x0 + x5;").unwrap();
        assert_eq!(sys.nvars, 6);
        assert!(q("x999999;").is_err());
    }
}
