//! Reduced multivariate rational functions over a fixed [`SymbolSet`].

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{Exps, Poly};
use super::{Assignment, CoeffError, EvalError, Scalar};

/// Ordered list of distinct commuting symbol names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolSet {
    names: Vec<String>,
}

impl SymbolSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>, CoeffError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(CoeffError::DuplicateSymbol(n.clone()));
            }
        }
        Ok(Arc::new(SymbolSet { names }))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A fraction `num / den` of integer polynomials, kept fully reduced with
/// the denominator's leading coefficient positive, so structural equality
/// is mathematical equality.
#[derive(Clone)]
pub struct RatFunc {
    syms: Arc<SymbolSet>,
    num: Poly,
    den: Poly,
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        same_set(&self.syms, &other.syms) && self.num == other.num && self.den == other.den
    }
}

impl Eq for RatFunc {}

impl std::hash::Hash for RatFunc {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

fn same_set(a: &Arc<SymbolSet>, b: &Arc<SymbolSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self)
    }
}

impl RatFunc {
    pub fn from_parts(syms: &Arc<SymbolSet>, num: Poly, den: Poly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Self::reduce(syms.clone(), num, den))
    }

    fn reduce(syms: Arc<SymbolSet>, num: Poly, den: Poly) -> Self {
        let nv = syms.len();
        if num.is_zero() {
            return RatFunc { syms, num: Poly::zero(nv), den: Poly::one(nv) };
        }
        if den.is_one() {
            return RatFunc { syms, num, den };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides numerator"), den.div_exact(&g).expect("gcd divides denominator"))
        };
        if den.leading_sign_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { syms, num, den }
    }

    pub fn zero(syms: &Arc<SymbolSet>) -> Self {
        let nv = syms.len();
        RatFunc { syms: syms.clone(), num: Poly::zero(nv), den: Poly::one(nv) }
    }

    pub fn one(syms: &Arc<SymbolSet>) -> Self {
        Self::from_int(syms, 1)
    }

    pub fn from_int(syms: &Arc<SymbolSet>, n: i64) -> Self {
        let nv = syms.len();
        RatFunc { syms: syms.clone(), num: Poly::constant(nv, BigInt::from(n)), den: Poly::one(nv) }
    }

    pub fn from_rational(syms: &Arc<SymbolSet>, r: &BigRational) -> Self {
        let nv = syms.len();
        Self::reduce(syms.clone(), Poly::constant(nv, r.numer().clone()), Poly::constant(nv, r.denom().clone()))
    }

    /// `name^pow`; negative powers become denominators.
    pub fn symbol_pow(syms: &Arc<SymbolSet>, name: &str, pow: i32) -> Result<Self, CoeffError> {
        let i = syms.index_of(name).ok_or_else(|| CoeffError::UnknownSymbol(name.to_string()))?;
        let nv = syms.len();
        let v = Poly::var(nv, i, pow.unsigned_abs());
        Ok(if pow >= 0 {
            RatFunc { syms: syms.clone(), num: v, den: Poly::one(nv) }
        } else {
            RatFunc { syms: syms.clone(), num: Poly::one(nv), den: v }
        })
    }

    pub fn symbol(syms: &Arc<SymbolSet>, name: &str) -> Result<Self, CoeffError> {
        Self::symbol_pow(syms, name, 1)
    }

    pub fn symbols(&self) -> &Arc<SymbolSet> {
        &self.syms
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    fn check(&self, other: &Self) -> Result<(), CoeffError> {
        if same_set(&self.syms, &other.syms) {
            Ok(())
        } else {
            Err(CoeffError::SymbolSetMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    fn add_unchecked(&self, other: &Self, negate: bool) -> Self {
        if other.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return if negate { other.neg_value() } else { other.clone() };
        }
        let combine = |a: &Poly, b: &Poly| if negate { a.sub(b) } else { a.add(b) };
        if self.den == other.den {
            return Self::reduce(self.syms.clone(), combine(&self.num, &other.num), self.den.clone());
        }
        let num = combine(&self.num.mul(&other.den), &other.num.mul(&self.den));
        Self::reduce(self.syms.clone(), num, self.den.mul(&other.den))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.num.is_zero() || other.num.is_zero() {
            return Self::zero(&self.syms);
        }
        // (a/b)(c/d) with a/b, c/d reduced: cancel gcd(a, d) and gcd(c, b).
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let a = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d = if g1.is_one() { other.den.clone() } else { other.den.div_exact(&g1).unwrap() };
        let c = if g2.is_one() { other.num.clone() } else { other.num.div_exact(&g2).unwrap() };
        let b = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        let mut num = a.mul(&c);
        let mut den = b.mul(&d);
        if den.leading_sign_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { syms: self.syms.clone(), num, den }
    }

    fn neg_value(&self) -> Self {
        RatFunc { syms: self.syms.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    pub fn inverse(&self) -> Result<Self, CoeffError> {
        if self.num.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        let (mut num, mut den) = (self.den.clone(), self.num.clone());
        if den.leading_sign_negative() {
            num = num.neg();
            den = den.neg();
        }
        Ok(RatFunc { syms: self.syms.clone(), num, den })
    }

    pub fn powi(&self, n: i64) -> Result<Self, CoeffError> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Ok(RatFunc { syms: self.syms.clone(), num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if !self.is_constant() {
            return None;
        }
        Some(BigRational::new(self.num.constant_value()?, self.den.constant_value()?))
    }

    /// Substitutes a polynomial for each symbol (same symbol set).
    pub fn compose(&self, subs: &[Poly]) -> Result<Self, CoeffError> {
        let num = self.num.compose(subs);
        let den = self.den.compose(subs);
        Self::from_parts(&self.syms, num, den)
    }

    pub fn eval(&self, assignment: &Assignment, epsilon: f64) -> Result<f64, EvalError> {
        let values = self
            .syms
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let used = self.num.degree_in(i) > 0 || self.den.degree_in(i) > 0;
                match assignment.get(n) {
                    Some(v) => Ok(*v),
                    None if !used => Ok(0.0),
                    None => Err(EvalError::MissingSymbol(n.clone())),
                }
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let d = self.den.eval_f64(&values);
        if !d.is_finite() || d.abs() < epsilon {
            return Err(EvalError::NearPole);
        }
        Ok(self.num.eval_f64(&values) / d)
    }

    /// Laurent terms `(exponents, coefficient)` when the denominator is a
    /// monomial, sorted for display: descending total degree, then lex.
    fn laurent_terms(&self) -> Option<Vec<(Vec<i64>, BigRational)>> {
        if !self.den.is_monomial() {
            return None;
        }
        let (de, dc) = &self.den.terms()[0];
        let mut out: Vec<(Vec<i64>, BigRational)> = self
            .num
            .terms()
            .iter()
            .map(|(e, c)| {
                let ex: Vec<i64> = e.iter().zip(de.iter()).map(|(a, b)| *a as i64 - *b as i64).collect();
                (ex, BigRational::new(c.clone(), dc.clone()))
            })
            .collect();
        out.sort_by(|(a, _), (b, _)| {
            let da: i64 = a.iter().sum();
            let db: i64 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        Some(out)
    }

    fn fmt_poly(&self, p: &Poly) -> String {
        let terms: Vec<(Vec<i64>, BigRational)> = p
            .terms()
            .iter()
            .map(|(e, c)| (e.iter().map(|&x| x as i64).collect(), BigRational::from_integer(c.clone())))
            .collect();
        fmt_terms(&self.syms, &terms)
    }

    /// Single-term view: `Some((coefficient, exponents))` when this is `c * monomial`.
    pub fn as_single_term(&self) -> Option<(BigRational, Vec<i64>)> {
        let terms = self.laurent_terms()?;
        if terms.len() == 1 {
            let (e, c) = terms.into_iter().next().unwrap();
            Some((c, e))
        } else {
            None
        }
    }

    pub fn fmt_monomial(&self, exps: &[i64]) -> String {
        fmt_monomial(&self.syms, exps)
    }
}

pub(crate) fn fmt_rational_abs(c: &BigRational) -> String {
    let c = c.abs();
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(syms: &SymbolSet, exps: &[i64]) -> String {
    let mut parts = Vec::new();
    for (name, &k) in syms.names.iter().zip(exps.iter()) {
        match k.cmp(&0) {
            Ordering::Equal => {}
            _ if k == 1 => parts.push(name.clone()),
            _ => parts.push(format!("{}^{}", name, k)),
        }
    }
    parts.join("*")
}

fn fmt_terms(syms: &SymbolSet, terms: &[(Vec<i64>, BigRational)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mon = fmt_monomial(syms, e);
        let abs_one = c.abs().is_one();
        if mon.is_empty() {
            s.push_str(&fmt_rational_abs(c));
        } else if abs_one {
            s.push_str(&mon);
        } else {
            s.push_str(&fmt_rational_abs(c));
            s.push('*');
            s.push_str(&mon);
        }
    }
    s
}

impl fmt::Display for RatFunc {
    /// Laurent-polynomial form when the denominator is a monomial, else
    /// `(num)*(den)^-1`; either way the text reparses in the expression DSL.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(terms) = self.laurent_terms() {
            return write!(f, "{}", fmt_terms(&self.syms, &terms));
        }
        let n = self.fmt_poly(&self.num);
        let d = self.fmt_poly(&self.den);
        let n = if self.num.is_monomial() && !n.starts_with('-') { n } else { format!("({})", n) };
        write!(f, "{}*({})^-1", n, d)
    }
}

impl Scalar for RatFunc {
    fn zero_like(&self) -> Self {
        Self::zero(&self.syms)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.syms)
    }
    fn from_rational_like(&self, r: &BigRational) -> Self {
        Self::from_rational(&self.syms, r)
    }
    fn is_nil(&self) -> bool {
        self.num.is_zero()
    }
    fn is_unity(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("symbol sets agree")
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("symbol sets agree")
    }
    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("symbol sets agree")
    }
    fn neg(&self) -> Self {
        self.neg_value()
    }
    fn inv(&self) -> Result<Self, CoeffError> {
        self.inverse()
    }
    fn is_single_term(&self) -> bool {
        self.laurent_terms().map(|t| t.len() == 1).unwrap_or(false)
    }
    fn is_negative_term(&self) -> bool {
        self.as_single_term().map(|(c, _)| c.is_negative()).unwrap_or(false)
    }
    fn to_dsl(&self) -> String {
        self.to_string()
    }
    fn eval_f64(&self, assignment: &Assignment, epsilon: f64) -> Result<f64, EvalError> {
        self.eval(assignment, epsilon)
    }
}

/// Convenience: exponent vector for a single-variable power.
pub fn unit_exps(n: usize, i: usize, k: u32) -> Exps {
    let mut e: Exps = smallvec::SmallVec::from_elem(0, n);
    e[i] = k;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> Arc<SymbolSet> {
        SymbolSet::new(&["p", "q"]).unwrap()
    }

    fn sym(s: &Arc<SymbolSet>, n: &str, k: i32) -> RatFunc {
        RatFunc::symbol_pow(s, n, k).unwrap()
    }

    #[test]
    fn field_axioms_round_trip() {
        let s = pq();
        let a = sym(&s, "p", 1).sub(&sym(&s, "q", -1));
        let b = a.mul(&sym(&s, "q", 1));
        assert_eq!(b, sym(&s, "p", 1).mul(&sym(&s, "q", 1)).sub(&RatFunc::one(&s)));
        assert_eq!(b.try_div(&sym(&s, "q", 1)).unwrap(), a);
    }

    #[test]
    fn pq_bracket_two_reduces() {
        // (1 - (pq)^-2) / (1 - (pq)^-1) = 1 + (pq)^-1
        let s = pq();
        let pq_inv = sym(&s, "p", -1).mul(&sym(&s, "q", -1));
        let one = RatFunc::one(&s);
        let n = one.sub(&pq_inv.mul(&pq_inv));
        let d = one.sub(&pq_inv);
        let r = n.try_div(&d).unwrap();
        assert_eq!(r, one.add(&pq_inv));
        assert_eq!(r.to_string(), "1 + p^-1*q^-1");
    }

    #[test]
    fn display_laurent_and_fraction() {
        let s = pq();
        let a = sym(&s, "q", 1).sub(&sym(&s, "p", -1));
        assert_eq!(a.to_string(), "q - p^-1");
        let b = RatFunc::one(&s).try_div(&sym(&s, "p", 1).add(&sym(&s, "q", 1))).unwrap();
        assert_eq!(b.to_string(), "1*(p + q)^-1");
        assert_eq!(RatFunc::zero(&s).to_string(), "0");
    }

    #[test]
    fn eval_examples() {
        let s = pq();
        let mut asg = Assignment::new();
        asg.insert("p".into(), 2.0);
        asg.insert("q".into(), 3.0);
        let pq1 = sym(&s, "p", 1).mul(&sym(&s, "q", 1)).sub(&RatFunc::one(&s));
        let den = sym(&s, "p", 1).sub(&sym(&s, "q", -1));
        let v = pq1.try_div(&den).unwrap().eval(&asg, 1e-12).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        asg.insert("q".into(), 2.0);
        let br = RatFunc::one(&s).add(&sym(&s, "p", -1).mul(&sym(&s, "q", -1)));
        assert!((br.eval(&asg, 1e-12).unwrap() - 1.25).abs() < 1e-12);
        assert_eq!(RatFunc::zero(&s).eval(&asg, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let s = pq();
        let other = SymbolSet::new(&["x"]).unwrap();
        assert_eq!(RatFunc::one(&s).try_div(&RatFunc::zero(&s)), Err(CoeffError::DivisionByZero));
        assert_eq!(RatFunc::one(&s).try_add(&RatFunc::one(&other)), Err(CoeffError::SymbolSetMismatch));
        let asg = Assignment::new();
        assert_eq!(sym(&s, "p", 1).eval(&asg, 1e-9), Err(EvalError::MissingSymbol("p".into())));
        let mut asg = Assignment::new();
        asg.insert("p".into(), 1.0);
        asg.insert("q".into(), 1.0);
        let near = RatFunc::one(&s).try_div(&sym(&s, "p", 1).mul(&sym(&s, "q", 1)).sub(&RatFunc::one(&s))).unwrap();
        assert_eq!(near.eval(&asg, 1e-9), Err(EvalError::NearPole));
    }
}
