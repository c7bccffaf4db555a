//! Expression language: parser, canonical printer and evaluator.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' ['-'] int)?
//! atom   := ident | int ['/' int] | '(' expr ')' | '[' expr ',' expr ']'
//! ```
//!
//! `[u, v]` is the plain commutator `uv - vu`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coeff::{RatFunc, TruncLaurent};
use crate::mside::{MCoefficient, MElement};
use crate::nc::{Element, Monomial, NcError};
use crate::series::element::{Affine, TruncElement};
use crate::tside::TSide;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax { pos: usize, expected: Vec<String>, found: String },
    #[error("unknown identifier `{name}` in context {context}")]
    UnknownIdentifier { name: String, context: Context },
    #[error("evaluation failed: {0}")]
    Eval(String),
}

impl From<NcError> for DslError {
    fn from(e: NcError) -> Self {
        DslError::Eval(e.to_string())
    }
}

/// Which algebra an expression lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Context {
    Tside,
    Mside,
    Series,
}

impl Context {
    pub fn identifiers(self) -> &'static [&'static str] {
        match self {
            Context::Tside => &["a", "d", "beta", "gamma", "p", "q"],
            Context::Mside => &["x", "y", "mu", "nu", "phi", "psi", "p", "q", "E1", "E2"],
            Context::Series => &["A", "D", "beta", "gamma", "t", "p", "q"],
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Context::Tside => "tside",
            Context::Mside => "mside",
            Context::Series => "series",
        })
    }
}

impl std::str::FromStr for Context {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tside" => Ok(Context::Tside),
            "mside" => Ok(Context::Mside),
            "series" => Ok(Context::Series),
            _ => Err(format!("unknown context `{}` (tside, mside, series)", s)),
        }
    }
}

/// Parsed expression. Literals are nonnegative; signs live in `Neg`/`Sub`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(BigRational),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Bracket(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) => 1,
            Expr::Mul(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Num(r) if !r.is_integer() => 3,
            _ => 4,
        }
    }

    /// `leading`: whether a unary minus may appear here without parentheses.
    fn write(&self, out: &mut String, min: u8, leading: bool) {
        if self.prec() < min || (matches!(self, Expr::Neg(_)) && !leading) {
            out.push('(');
            self.write(out, 1, true);
            out.push(')');
            return;
        }
        match self {
            Expr::Num(r) => {
                if r.is_integer() {
                    out.push_str(&r.numer().to_string());
                } else {
                    out.push_str(&format!("{}/{}", r.numer(), r.denom()));
                }
            }
            Expr::Ident(s) => out.push_str(s),
            Expr::Neg(e) => {
                out.push('-');
                e.write(out, 2, false);
            }
            Expr::Add(l, r) | Expr::Sub(l, r) => {
                l.write(out, 1, leading);
                out.push_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " });
                r.write(out, 2, false);
            }
            Expr::Mul(l, r) => {
                l.write(out, 2, false);
                out.push('*');
                r.write(out, 3, false);
            }
            Expr::Pow(b, k) => {
                b.write(out, 4, false);
                out.push_str(&format!("^{}", k));
            }
            Expr::Bracket(l, r) => {
                out.push('[');
                l.write(out, 1, true);
                out.push_str(", ");
                r.write(out, 1, true);
                out.push(']');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 1, true);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{}`", n),
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Sym(c) => write!(f, "`{}`", c),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, DslError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else if "+-*^/()[],".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(DslError::Syntax { pos, expected: vec!["a token".into()], found: format!("`{}`", c) });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    ctx: Context,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, DslError> {
        let (pos, tok) = &self.toks[self.at];
        Err(DslError::Syntax { pos: *pos, expected: expected.iter().map(|s| s.to_string()).collect(), found: tok.to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DslError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&[&format!("`{}`", c)])
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let neg = self.eat('-');
        let mut e = self.term()?;
        if neg {
            e = Expr::Neg(Box::new(e));
        }
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut e = self.factor()?;
        while self.eat('*') {
            e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr, DslError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().clone() {
            Tok::Int(n) => {
                self.at += 1;
                let k: i64 = (&n).try_into().map_err(|_| DslError::Syntax { pos: self.toks[self.at - 1].0, expected: vec!["a small exponent".into()], found: n.to_string() })?;
                Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }))
            }
            _ => self.fail(&["an integer exponent"]),
        }
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.at += 1;
                if self.eat('/') {
                    match self.peek().clone() {
                        Tok::Int(d) if !d.is_zero() => {
                            self.at += 1;
                            Ok(Expr::Num(BigRational::new(n, d)))
                        }
                        _ => self.fail(&["a nonzero denominator"]),
                    }
                } else {
                    Ok(Expr::Num(BigRational::from_integer(n)))
                }
            }
            Tok::Ident(s) => {
                if !self.ctx.identifiers().contains(&s.as_str()) {
                    return Err(DslError::UnknownIdentifier { name: s, context: self.ctx });
                }
                self.at += 1;
                Ok(Expr::Ident(s))
            }
            Tok::Sym('(') => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('[') => {
                self.at += 1;
                let l = self.expr()?;
                self.expect(',')?;
                let r = self.expr()?;
                self.expect(']')?;
                Ok(Expr::Bracket(Box::new(l), Box::new(r)))
            }
            _ => self.fail(&["an identifier", "a number", "`(`", "`[`"]),
        }
    }
}

/// Parses `text`, resolving identifiers against `ctx`.
pub fn parse(text: &str, ctx: Context) -> Result<Expr, DslError> {
    let mut p = Parser { toks: lex(text)?, at: 0, ctx };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["an operator", "end of input"]);
    }
    Ok(e)
}

/// An algebra the evaluator can target.
pub trait Algebra {
    type Value: Clone;
    fn ident(&self, name: &str) -> Result<Self::Value, DslError>;
    fn number(&self, r: &BigRational) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError>;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    /// `a^-1` for units.
    fn invert(&self, a: &Self::Value) -> Result<Self::Value, DslError>;
    fn print(&self, a: &Self::Value) -> String;

    fn pow(&self, a: &Self::Value, k: i64) -> Result<Self::Value, DslError> {
        let base = if k < 0 { self.invert(a)? } else { a.clone() };
        let mut acc = self.number(&BigRational::one());
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base)?;
        }
        Ok(acc)
    }
}

pub fn eval<A: Algebra>(e: &Expr, alg: &A) -> Result<A::Value, DslError> {
    Ok(match e {
        Expr::Num(r) => alg.number(r),
        Expr::Ident(s) => alg.ident(s)?,
        Expr::Neg(x) => alg.neg(&eval(x, alg)?),
        Expr::Add(l, r) => alg.add(&eval(l, alg)?, &eval(r, alg)?)?,
        Expr::Sub(l, r) => alg.sub(&eval(l, alg)?, &eval(r, alg)?)?,
        Expr::Mul(l, r) => alg.mul(&eval(l, alg)?, &eval(r, alg)?)?,
        Expr::Pow(b, k) => alg.pow(&eval(b, alg)?, *k)?,
        Expr::Bracket(l, r) => {
            let (u, v) = (eval(l, alg)?, eval(r, alg)?);
            alg.sub(&alg.mul(&u, &v)?, &alg.mul(&v, &u)?)?
        }
    })
}

/// The defining algebra with generators `a, d, beta, gamma` over `Q(p, q)`.
pub struct TsideAlgebra<'a>(pub &'a TSide);

impl Algebra for TsideAlgebra<'_> {
    type Value = Element<RatFunc>;
    fn ident(&self, name: &str) -> Result<Self::Value, DslError> {
        match name {
            "p" | "q" => Ok(self.0.scalar(self.0.sym(name, 1))),
            "a" | "d" | "beta" | "gamma" => Ok(self.0.gen(name, 1)),
            _ => Err(DslError::UnknownIdentifier { name: name.into(), context: Context::Tside }),
        }
    }
    fn number(&self, r: &BigRational) -> Self::Value {
        self.0.scalar(RatFunc::from_rational(self.0.symbols(), r))
    }
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.try_add(b)?)
    }
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.try_sub(b)?)
    }
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.try_mul(b)?)
    }
    fn neg(&self, a: &Self::Value) -> Self::Value {
        a.neg()
    }
    fn invert(&self, a: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.invert_even_unit()?)
    }
    fn pow(&self, a: &Self::Value, k: i64) -> Result<Self::Value, DslError> {
        Ok(a.pow(k)?)
    }
    fn print(&self, a: &Self::Value) -> String {
        a.to_dsl()
    }
}

/// The exponent algebra `x, y, mu, nu` with central units `E1, E2`.
pub struct MsideAlgebra;

impl Algebra for MsideAlgebra {
    type Value = MElement;
    fn ident(&self, name: &str) -> Result<Self::Value, DslError> {
        Ok(match name {
            "mu" => MElement::mu(),
            "nu" => MElement::nu(),
            "psi" => MElement::scalar(MCoefficient::from_ratfunc(RatFunc::from_int(crate::mside::symbols(), 2))).sub(&MElement::scalar(MCoefficient::symbol("phi"))),
            "E1" => MElement::scalar(MCoefficient::e_power(1, 0)),
            "E2" => MElement::scalar(MCoefficient::e_power(0, 1)),
            "x" | "y" | "p" | "q" | "phi" => MElement::scalar(MCoefficient::symbol(name)),
            _ => return Err(DslError::UnknownIdentifier { name: name.into(), context: Context::Mside }),
        })
    }
    fn number(&self, r: &BigRational) -> Self::Value {
        MElement::ratfunc(RatFunc::from_rational(crate::mside::symbols(), r))
    }
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.add(b))
    }
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.sub(b))
    }
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.mul(b))
    }
    fn neg(&self, a: &Self::Value) -> Self::Value {
        a.neg()
    }
    fn invert(&self, a: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.invert_unit()?)
    }
    fn print(&self, a: &Self::Value) -> String {
        a.to_dsl()
    }
}

/// The affine algebra `A = a - 1`, `D = d - 1`, `beta, gamma` over truncated
/// Laurent series in `t`, with `q`, `p` the context's exponentials.
pub struct SeriesAlgebra {
    pub affine: Arc<Affine>,
    pub q: TruncLaurent,
    pub p: TruncLaurent,
}

impl Algebra for SeriesAlgebra {
    type Value = TruncElement;
    fn ident(&self, name: &str) -> Result<Self::Value, DslError> {
        Ok(match name {
            "t" => TruncElement::scalar(&self.affine, TruncLaurent::monomial(BigRational::one(), 1)),
            "q" => TruncElement::scalar(&self.affine, self.q.clone()),
            "p" => TruncElement::scalar(&self.affine, self.p.clone()),
            "A" | "D" | "beta" | "gamma" => TruncElement::gen(&self.affine, name)?,
            _ => return Err(DslError::UnknownIdentifier { name: name.into(), context: Context::Series }),
        })
    }
    fn number(&self, r: &BigRational) -> Self::Value {
        TruncElement::scalar(&self.affine, TruncLaurent::exact(r.clone()))
    }
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.try_add(b)?)
    }
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.try_sub(b)?)
    }
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, DslError> {
        Ok(a.try_mul(b)?)
    }
    fn neg(&self, a: &Self::Value) -> Self::Value {
        a.neg()
    }
    fn invert(&self, a: &Self::Value) -> Result<Self::Value, DslError> {
        // pure scalars (e.g. `t^-1`) invert in the Laurent ring
        let id = Monomial::identity(self.affine.pres.n_even());
        if a.len() == 1 && a.terms().all(|(m, _)| *m == id) {
            let c = a.coeff(&id).inv_capped(self.affine.order).map_err(|e| DslError::Eval(e.to_string()))?;
            return Ok(TruncElement::scalar(&self.affine, c));
        }
        Ok(a.invert_unit()?)
    }
    fn print(&self, a: &Self::Value) -> String {
        a.to_dsl()
    }
}

/// Parses, evaluates and prints the normal form.
pub fn normalize_with<A: Algebra>(text: &str, ctx: Context, alg: &A) -> Result<String, DslError> {
    let e = parse(text, ctx)?;
    Ok(alg.print(&eval(&e, alg)?))
}

/// [`normalize_with`] in the tside or mside context.
pub fn normalize(text: &str, ctx: Context) -> Result<String, DslError> {
    match ctx {
        Context::Tside => normalize_with(text, ctx, &TsideAlgebra(TSide::shared())),
        Context::Mside => normalize_with(text, ctx, &MsideAlgebra),
        Context::Series => Err(DslError::Eval("the series context needs a ray and truncation; use normalize_with".into())),
    }
}

/// Literal helper for tests and callers: `n/d` as a tree.
pub fn rational(n: i64, d: i64) -> Expr {
    let r = BigRational::new(n.into(), d.into());
    if r.is_negative() {
        Expr::Neg(Box::new(Expr::Num(-r)))
    } else {
        Expr::Num(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn commutation_example() {
        assert_eq!(normalize("d*a", Context::Tside).unwrap(), "a*d + (q - p^-1)*beta*gamma");
        assert_eq!(normalize("[a,d] - (p - q^-1)*gamma*beta", Context::Tside).unwrap(), "0");
        assert_eq!(normalize("beta^2", Context::Tside).unwrap(), "0");
        assert_eq!(normalize("[x,y]", Context::Mside).unwrap(), "0");
        assert_eq!(normalize("0", Context::Tside).unwrap(), "0");
    }

    #[test]
    fn shapes() {
        let e = parse("d*a", Context::Tside).unwrap();
        assert_eq!(e, Expr::Mul(Box::new(Expr::Ident("d".into())), Box::new(Expr::Ident("a".into()))));
        assert_eq!(parse("-a*d", Context::Tside).unwrap().to_string(), "-a*d");
        assert_eq!(parse("a - (-d)", Context::Tside).unwrap().to_string(), "a - (-d)");
        assert_eq!(parse("(a^2)^3", Context::Tside).unwrap().to_string(), "(a^2)^3");
        assert_eq!(parse("a*(d*beta)", Context::Tside).unwrap().to_string(), "a*(d*beta)");
        assert_eq!(parse("6/4*a^-2", Context::Tside).unwrap().to_string(), "3/2*a^-2");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("a +", Context::Tside), Err(DslError::Syntax { pos: 3, .. })));
        assert!(matches!(parse("x*a", Context::Tside), Err(DslError::UnknownIdentifier { .. })));
        assert!(matches!(parse("a b", Context::Tside), Err(DslError::Syntax { .. })));
        assert!(matches!(parse("1/0", Context::Tside), Err(DslError::Syntax { .. })));
        assert!(matches!(parse("a^b", Context::Tside), Err(DslError::Syntax { .. })));
        assert!(matches!(normalize("beta^-1", Context::Tside), Err(DslError::Eval(_))));
    }

    #[test]
    fn printed_fractions_reparse() {
        let s = normalize("(p + q)^-1*a + beta", Context::Tside).unwrap();
        assert_eq!(normalize(&s, Context::Tside).unwrap(), s);
        let m = normalize("(x - y + phi)^-1*mu*E1*E2^-2 - nu*x", Context::Mside).unwrap();
        assert_eq!(normalize(&m, Context::Mside).unwrap(), m);
    }

    #[test]
    fn series_context() {
        let cfg = crate::series::SeriesConfig::from_ints(4, 8, 1, 2).unwrap();
        let sc = crate::series::SeriesContext::new(&cfg).unwrap();
        let alg = SeriesAlgebra { affine: sc.affine().clone(), q: sc.q().clone(), p: sc.p().clone() };
        assert_eq!(normalize_with("[D, A] - (q - p^-1)*beta*gamma", Context::Series, &alg).unwrap(), "0");
        let once = normalize_with("beta*A*D + gamma*beta*t^-1 - 1/3", Context::Series, &alg).unwrap();
        assert_eq!(normalize_with(&once, Context::Series, &alg).unwrap(), once);
    }

    fn arb_expr(ctx: Context) -> impl Strategy<Value = Expr> {
        let ids: Vec<&'static str> = ctx.identifiers().to_vec();
        let leaf = prop_oneof![
            prop::sample::select(ids).prop_map(|s| Expr::Ident(s.to_string())),
            (0i64..20, 1i64..5).prop_map(|(n, d)| Expr::Num(BigRational::new(n.into(), d.into()))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            let b = |e: Expr| Box::new(e);
            prop_oneof![
                inner.clone().prop_map(move |e| Expr::Neg(b(e))),
                (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Add(b(l), b(r))),
                (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Sub(b(l), b(r))),
                (inner.clone(), inner.clone()).prop_map(move |(l, r)| Expr::Mul(b(l), b(r))),
                (inner.clone(), -3i64..4).prop_map(move |(e, k)| Expr::Pow(b(e), k)),
                (inner.clone(), inner).prop_map(move |(l, r)| Expr::Bracket(b(l), b(r))),
            ]
        })
    }

    proptest! {
        #[test]
        fn tree_round_trip(e in arb_expr(Context::Tside)) {
            let printed = e.to_string();
            prop_assert_eq!(parse(&printed, Context::Tside).unwrap(), e, "{}", printed);
        }

        #[test]
        fn mside_tree_round_trip(e in arb_expr(Context::Mside)) {
            prop_assert_eq!(parse(&e.to_string(), Context::Mside).unwrap(), e);
        }

        #[test]
        fn canonical_print_reparses(
            terms in prop::collection::vec((prop::sample::select(vec!["a", "d", "beta", "gamma", "a^-1", "d^-2", "p*a", "(p - q)^-1*d"]), -3i64..4), 1..5)
        ) {
            let text = terms.iter().map(|(g, c)| format!("({})*{}", c, g)).collect::<Vec<_>>().join("*");
            let once = normalize(&text, Context::Tside).unwrap();
            prop_assert_eq!(normalize(&once, Context::Tside).unwrap(), once.clone());
        }

        #[test]
        fn mside_canonical_print_reparses(
            terms in prop::collection::vec(prop::sample::select(vec!["x", "y", "mu", "nu", "E1", "E2^-1", "(x - y + phi)^-1", "q*psi"]), 1..5)
        ) {
            let text = terms.join("*") + " + " + &terms.iter().rev().cloned().collect::<Vec<_>>().join("*");
            let once = normalize(&text, Context::Mside).unwrap();
            prop_assert_eq!(normalize(&once, Context::Mside).unwrap(), once.clone());
        }
    }
}
