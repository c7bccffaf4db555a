use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::presentation::{Monomial, Parity, Presentation, Strategy};
use super::NcError;
use crate::coeff::{Assignment, EvalError, Scalar};

/// Grading of an element: homogeneous, mixed, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementParity {
    Zero,
    Even,
    Odd,
    Mixed,
}

/// A finite linear combination of normal-form monomials.
#[derive(Clone)]
pub struct Element<C: Scalar> {
    pres: Arc<Presentation<C>>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> PartialEq for Element<C> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.pres, &other.pres) && self.terms == other.terms
    }
}

impl<C: Scalar> fmt::Debug for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dsl())
    }
}

impl<C: Scalar> fmt::Display for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dsl())
    }
}

fn accumulate<C: Scalar>(map: &mut BTreeMap<Monomial, C>, m: Monomial, c: C) {
    if c.is_nil() {
        return;
    }
    match map.get_mut(&m) {
        Some(acc) => {
            *acc = acc.add(&c);
            if acc.is_nil() {
                map.remove(&m);
            }
        }
        None => {
            map.insert(m, c);
        }
    }
}

impl<C: Scalar> Element<C> {
    pub fn from_terms(pres: Arc<Presentation<C>>, mut terms: BTreeMap<Monomial, C>) -> Self {
        terms.retain(|_, c| !c.is_nil());
        Element { pres, terms }
    }

    pub fn zero(pres: &Arc<Presentation<C>>) -> Self {
        Element { pres: pres.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(pres: &Arc<Presentation<C>>, c: C) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::identity(pres.n_even()), c);
        Self::from_terms(pres.clone(), terms)
    }

    pub fn one(pres: &Arc<Presentation<C>>) -> Self {
        Self::scalar(pres, pres.one_scalar().clone())
    }

    pub fn monomial(pres: &Arc<Presentation<C>>, m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, c);
        Self::from_terms(pres.clone(), terms)
    }

    /// `name^k`; negative powers need an invertible even generator.
    pub fn generator(pres: &Arc<Presentation<C>>, name: &str, k: i64) -> Result<Self, NcError> {
        pres.normalize(&[(name, k)], pres.one_scalar().clone())
    }

    pub fn presentation(&self) -> &Arc<Presentation<C>> {
        &self.pres
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(|| self.zero_scalar())
    }

    pub fn zero_scalar(&self) -> C {
        self.pres.one_scalar().zero_like()
    }

    /// Coefficient of the identity monomial.
    pub fn scalar_part(&self) -> C {
        self.coeff(&Monomial::identity(self.pres.n_even()))
    }

    /// The scalar if this element is a multiple of the identity.
    pub fn as_scalar(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(self.zero_scalar()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_identity().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<(), NcError> {
        if Arc::ptr_eq(&self.pres, &other.pres) {
            Ok(())
        } else {
            Err(NcError::PresentationMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, NcError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(Element { pres: self.pres.clone(), terms })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, NcError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Element { pres: self.pres.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.pres.clone(), self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect())
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        Self::from_terms(self.pres.clone(), self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, NcError> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c12 = c1.mul(c2);
                for (m, k) in self.pres.mul_monomials(m1, m2).iter() {
                    let c = if k.is_unity() { c12.clone() } else { c12.mul(k) };
                    accumulate(&mut terms, m.clone(), c);
                }
            }
        }
        Ok(Element { pres: self.pres.clone(), terms })
    }

    /// Product computed by rewriting concatenated words with an explicit
    /// strategy, bypassing the product cache.
    pub fn mul_with(&self, other: &Self, strategy: Strategy) -> Result<Self, NcError> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut w = self.pres.letters_of(m1);
                w.extend(self.pres.letters_of(m2));
                for (m, c) in self.pres.normalize_letters(w, c1.mul(c2), strategy)? {
                    accumulate(&mut terms, m, c);
                }
            }
        }
        Ok(Element { pres: self.pres.clone(), terms })
    }

    pub fn pow(&self, n: i64) -> Result<Self, NcError> {
        let base = if n < 0 { self.invert_even_unit()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(&self.pres);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.try_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn parity(&self) -> ElementParity {
        let mut seen: Option<Parity> = None;
        for m in self.terms.keys() {
            let p = m.parity();
            match seen {
                None => seen = Some(p),
                Some(s) if s != p => return ElementParity::Mixed,
                _ => {}
            }
        }
        match seen {
            None => ElementParity::Zero,
            Some(Parity::Even) => ElementParity::Even,
            Some(Parity::Odd) => ElementParity::Odd,
        }
    }

    /// `xy - yx`.
    pub fn commutator(&self, other: &Self) -> Result<Self, NcError> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// `xy + yx`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self, NcError> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    /// `xy - (-1)^{|x||y|} yx` for homogeneous operands.
    pub fn supercommutator(&self, other: &Self) -> Result<Self, NcError> {
        if self.parity() == ElementParity::Odd && other.parity() == ElementParity::Odd {
            self.anticommutator(other)
        } else {
            self.commutator(other)
        }
    }

    /// Inverse of an even element `c0 * m0 + (terms with odd content)` where
    /// `m0` is a product of invertible even generators.
    pub fn invert_even_unit(&self) -> Result<Self, NcError> {
        if !matches!(self.parity(), ElementParity::Even) {
            return Err(NcError::NotAUnit);
        }
        let mut body = self.terms.iter().filter(|(m, _)| m.odds() == 0);
        let (m0, c0) = body.next().ok_or(NcError::NotAUnit)?;
        if body.next().is_some() {
            return Err(NcError::NotAUnit);
        }
        let gens = self.pres.generators();
        let mut inv_word: Vec<(&str, i64)> = Vec::new();
        for (i, &e) in m0.evens().iter().enumerate().rev() {
            if e != 0 {
                if !gens[i].invertible {
                    return Err(NcError::NotAUnit);
                }
                inv_word.push((gens[i].name.as_str(), -(e as i64)));
            }
        }
        let c0inv = c0.inv().map_err(|_| NcError::NotAUnit)?;
        let v0 = self.pres.normalize(&inv_word, c0inv)?;
        let one = Self::one(&self.pres);
        let nil = self.try_mul(&v0)?.try_sub(&one)?;
        let mut sum = one.clone();
        let mut term = one;
        let minus = nil.neg();
        for _ in 0..=self.pres.n_odd() {
            term = term.try_mul(&minus)?;
            if term.is_zero() {
                return v0.try_mul(&sum);
            }
            sum = sum.try_add(&term)?;
        }
        Err(NcError::NotAUnit)
    }

    /// Canonical text: odd part ascending (none, first odd, ...), then even
    /// exponents descending.
    pub fn to_dsl(&self) -> String {
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| a.odds().cmp(&b.odds()).then_with(|| b.evens().cmp(a.evens())));
        let mut out = String::new();
        for (i, m) in keys.iter().enumerate() {
            let c = &self.terms[*m];
            let (neg, body) = if c.is_single_term() {
                if c.is_negative_term() {
                    (true, c.neg().to_dsl())
                } else {
                    (false, c.to_dsl())
                }
            } else {
                (false, format!("({})", c.to_dsl()))
            };
            let mon = self.monomial_text(m);
            let piece = match (mon.is_empty(), body == "1") {
                (true, _) => body,
                (false, true) => mon,
                (false, false) => format!("{}*{}", body, mon),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&piece);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn monomial_text(&self, m: &Monomial) -> String {
        let gens = self.pres.generators();
        let mut parts: Vec<String> = Vec::new();
        for (i, &e) in m.evens().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(gens[i].name.clone()),
                _ => parts.push(format!("{}^{}", gens[i].name, e)),
            }
        }
        for j in 0..self.pres.n_odd() {
            if m.odds() & (1 << j) != 0 {
                parts.push(gens[self.pres.n_even() + j].name.clone());
            }
        }
        parts.join("*")
    }

    /// Evaluates the coefficients numerically, keeping monomials symbolic.
    pub fn eval_coeffs(&self, assignment: &Assignment, epsilon: f64) -> Result<Vec<(Monomial, f64)>, EvalError> {
        self.terms.iter().map(|(m, c)| Ok((m.clone(), c.eval_f64(assignment, epsilon)?))).collect()
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:ident) => {
        impl<C: Scalar> std::ops::$tr<&Element<C>> for &Element<C> {
            type Output = Element<C>;
            fn $f(self, rhs: &Element<C>) -> Element<C> {
                self.$op(rhs).expect("operands share a presentation")
            }
        }
        impl<C: Scalar> std::ops::$tr<Element<C>> for Element<C> {
            type Output = Element<C>;
            fn $f(self, rhs: Element<C>) -> Element<C> {
                self.$op(&rhs).expect("operands share a presentation")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<C: Scalar> std::ops::Neg for &Element<C> {
    type Output = Element<C>;
    fn neg(self) -> Element<C> {
        Element::neg(self)
    }
}

impl<C: Scalar> std::ops::Neg for Element<C> {
    type Output = Element<C>;
    fn neg(self) -> Element<C> {
        Element::neg(&self)
    }
}
