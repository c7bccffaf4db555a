//! Elements of the affine presentation (`A = a - 1`, `D = d - 1`, `beta`,
//! `gamma`) with truncated Laurent coefficients, filtered by weight.
//!
//! The weight of `c t^j A^i D^k (odd part)` is `j + i + k + #odd`. Every
//! rewriting rule preserves or raises it, so truncating by weight is
//! compatible with multiplication even though coefficients may carry
//! negative powers of `t`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::coeff::laurent::EXACT;
use crate::coeff::{Assignment, EvalError, Scalar, TruncLaurent};
use crate::nc::{Element, ElementParity, Monomial, NcError, Presentation};
use crate::report::SideValue;
use crate::supermatrix::MatrixEntry;

/// Precision marker for elements known exactly.
pub const EXACT_WEIGHT: i32 = 1 << 20;

/// The affine presentation together with the t-order of its rule coefficients.
#[derive(Debug)]
pub struct Affine {
    pub pres: Arc<Presentation<TruncLaurent>>,
    /// Rule coefficients are known to this t-order, so every rewritten
    /// coefficient is reliable up to weight `order`.
    pub order: i32,
}

/// A truncated element: exact for all weights `<= prec`.
#[derive(Clone)]
pub struct TruncElement {
    ctx: Arc<Affine>,
    terms: BTreeMap<Monomial, TruncLaurent>,
    prec: i32,
}

fn deg(m: &Monomial) -> i32 {
    m.degree() as i32
}

fn clamp(x: i64) -> i32 {
    x.clamp(-(EXACT_WEIGHT as i64), EXACT_WEIGHT as i64) as i32
}

impl TruncElement {
    fn build(ctx: &Arc<Affine>, raw: BTreeMap<Monomial, TruncLaurent>, prec: i32) -> Self {
        let mut eff = prec.min(EXACT_WEIGHT);
        for (m, c) in &raw {
            if !c.is_exact() {
                eff = eff.min(clamp(deg(m) as i64 + c.order() as i64));
            }
        }
        let terms = raw
            .into_iter()
            .filter_map(|(m, c)| {
                let c = if eff >= EXACT_WEIGHT { c } else { c.truncated(eff - deg(&m)) };
                (!c.is_nil()).then_some((m, c))
            })
            .collect();
        TruncElement { ctx: ctx.clone(), terms, prec: eff }
    }

    pub fn zero(ctx: &Arc<Affine>) -> Self {
        TruncElement { ctx: ctx.clone(), terms: BTreeMap::new(), prec: EXACT_WEIGHT }
    }

    pub fn scalar(ctx: &Arc<Affine>, c: TruncLaurent) -> Self {
        let m = Monomial::identity(ctx.pres.n_even());
        Self::build(ctx, BTreeMap::from([(m, c)]), EXACT_WEIGHT)
    }

    pub fn one(ctx: &Arc<Affine>) -> Self {
        Self::scalar(ctx, TruncLaurent::exact_int(1))
    }

    pub fn from_element(ctx: &Arc<Affine>, e: &Element<TruncLaurent>, prec: i32) -> Self {
        Self::build(ctx, e.terms().map(|(m, c)| (m.clone(), c.clone())).collect(), prec)
    }

    /// A normal-ordered word such as `[("A", 2), ("beta", 1)]`, exact.
    pub fn word(ctx: &Arc<Affine>, word: &[(&str, i64)]) -> Result<Self, NcError> {
        let e = ctx.pres.normalize(word, TruncLaurent::exact_int(1))?;
        Ok(Self::from_element(ctx, &e, EXACT_WEIGHT))
    }

    pub fn gen(ctx: &Arc<Affine>, name: &str) -> Result<Self, NcError> {
        Self::word(ctx, &[(name, 1)])
    }

    pub fn context(&self) -> &Arc<Affine> {
        &self.ctx
    }

    pub fn prec(&self) -> i32 {
        self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &TruncLaurent)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero at every weight up to the precision.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> TruncLaurent {
        self.terms.get(m).cloned().unwrap_or_else(|| TruncLaurent::zero_to(EXACT))
    }

    /// Lowest weight of a stored term (`prec + 1` for zero).
    pub fn valuation(&self) -> i32 {
        self.terms.iter().map(|(m, c)| deg(m) + c.valuation()).min().unwrap_or(clamp(self.prec as i64 + 1))
    }

    /// Drops everything above weight `p`.
    pub fn truncate(&self, p: i32) -> Self {
        if p >= self.prec {
            return self.clone();
        }
        Self::build(&self.ctx, self.terms.clone(), p)
    }

    fn check(&self, o: &Self) -> Result<(), NcError> {
        if Arc::ptr_eq(&self.ctx, &o.ctx) {
            Ok(())
        } else {
            Err(NcError::PresentationMismatch)
        }
    }

    fn combine(&self, o: &Self, negate: bool) -> Result<Self, NcError> {
        self.check(o)?;
        let mut raw = self.terms.clone();
        for (m, c) in &o.terms {
            let e = raw.entry(m.clone()).or_insert_with(|| TruncLaurent::zero_to(EXACT));
            *e = if negate { e.sub(c) } else { e.add(c) };
        }
        Ok(Self::build(&self.ctx, raw, self.prec.min(o.prec)))
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, NcError> {
        self.combine(o, false)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, NcError> {
        self.combine(o, true)
    }

    pub fn neg(&self) -> Self {
        TruncElement { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(), prec: self.prec }
    }

    /// Multiplication by a central scalar.
    pub fn scale(&self, k: &TruncLaurent) -> Self {
        if k.is_nil() && k.is_exact() {
            return Self::zero(&self.ctx);
        }
        let prec = clamp((self.prec as i64 + k.valuation() as i64).min(k.order() as i64 + self.valuation() as i64));
        Self::build(&self.ctx, self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect(), prec)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, NcError> {
        self.check(o)?;
        let cap = clamp((self.prec as i64 + o.valuation() as i64).min(o.prec as i64 + self.valuation() as i64));
        let mut eff = cap;
        let mut raw: BTreeMap<Monomial, TruncLaurent> = BTreeMap::new();
        let pres = &self.ctx.pres;
        for (m1, c1) in &self.terms {
            let w1 = deg(m1) + c1.valuation();
            for (m2, c2) in &o.terms {
                if w1 + deg(m2) + c2.valuation() > cap {
                    continue;
                }
                let c12 = c1.mul_capped(c2, cap);
                let prod = pres.mul_monomials(m1, m2);
                if prod.len() != 1 || prod[0].1 != TruncLaurent::exact_int(1) {
                    // cancelled rewriting terms are only known up to the rule order
                    eff = eff.min(clamp(c12.valuation() as i64 + self.ctx.order as i64));
                }
                for (m, k) in prod.iter() {
                    let c = c12.mul_capped(k, cap - deg(m));
                    if !c.is_exact() {
                        eff = eff.min(clamp(deg(m) as i64 + c.order() as i64));
                    }
                    let e = raw.entry(m.clone()).or_insert_with(|| TruncLaurent::zero_to(EXACT));
                    *e = e.add(&c);
                }
            }
        }
        Ok(Self::build(&self.ctx, raw, eff))
    }

    pub fn pow(&self, n: u32) -> Result<Self, NcError> {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, o: &Self) -> Result<Self, NcError> {
        self.try_mul(o)?.try_sub(&o.try_mul(self)?)
    }

    pub fn anticommutator(&self, o: &Self) -> Result<Self, NcError> {
        self.try_mul(o)?.try_add(&o.try_mul(self)?)
    }

    pub fn parity(&self) -> ElementParity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            if m.odd_count() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (false, false) => ElementParity::Zero,
            (true, false) => ElementParity::Even,
            (false, true) => ElementParity::Odd,
            (true, true) => ElementParity::Mixed,
        }
    }

    /// Inverse of `c + r` with `c` a scalar of valuation 0 and `r` of positive weight.
    pub fn invert_unit(&self) -> Result<Self, NcError> {
        let id = Monomial::identity(self.ctx.pres.n_even());
        let c0 = self.coeff(&id);
        if c0.is_nil() || c0.valuation() != 0 {
            return Err(NcError::NotAUnit);
        }
        let c0inv = c0.inv_capped(c0.order().min(self.ctx.order))?;
        let mut r = self.clone();
        r.terms.remove(&id);
        let step = r.scale(&c0inv).neg();
        if step.valuation() < 1 {
            return Err(NcError::NotAUnit);
        }
        let mut acc = Self::one(&self.ctx);
        let mut term = Self::one(&self.ctx);
        let limit = self.prec.min(self.ctx.order).max(0);
        for _ in 0..limit {
            term = term.try_mul(&step)?;
            if term.is_zero() && term.prec >= limit {
                break;
            }
            acc = acc.try_add(&term)?;
        }
        Ok(acc.truncate(limit).scale(&c0inv))
    }

    pub fn to_element(&self) -> Element<TruncLaurent> {
        Element::from_terms(self.ctx.pres.clone(), self.terms.clone())
    }

    pub fn to_dsl(&self) -> String {
        self.to_element().to_dsl()
    }

    pub fn monomial_text(&self, m: &Monomial) -> String {
        self.to_element().monomial_text(m)
    }
}

impl PartialEq for TruncElement {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &o.ctx) && self.prec == o.prec && self.terms == o.terms
    }
}

impl std::fmt::Debug for TruncElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + O(w^{})", self.to_dsl(), self.prec.saturating_add(1))
    }
}

impl MatrixEntry for TruncElement {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.ctx)
    }
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
    fn entry_parity(&self) -> ElementParity {
        self.parity()
    }
    fn add_entry(&self, o: &Self) -> Result<Self, NcError> {
        self.try_add(o)
    }
    fn sub_entry(&self, o: &Self) -> Result<Self, NcError> {
        self.try_sub(o)
    }
    fn mul_entry(&self, o: &Self) -> Result<Self, NcError> {
        self.try_mul(o)
    }
    fn neg_entry(&self) -> Self {
        self.neg()
    }
    fn invert_entry(&self) -> Result<Self, NcError> {
        self.invert_unit()
    }
    fn entry_dsl(&self) -> String {
        self.to_dsl()
    }
}

/// A truncated element compared at a required weight: it counts as zero
/// only if it vanishes and is known at least up to `target`.
#[derive(Clone, Debug)]
pub struct AtWeight {
    pub value: TruncElement,
    pub target: i32,
}

impl AtWeight {
    /// Both sides cut to their common precision, so that numeric
    /// re-evaluation compares the same truncations.
    pub fn pair(lhs: &TruncElement, rhs: &TruncElement, target: i32) -> (AtWeight, AtWeight) {
        let p = lhs.prec.min(rhs.prec);
        (AtWeight { value: lhs.truncate(p), target }, AtWeight { value: rhs.truncate(p), target })
    }
}

impl SideValue for AtWeight {
    fn difference(&self, other: &Self) -> Result<Self, String> {
        let value = self.value.try_sub(&other.value).map_err(|e| e.to_string())?;
        Ok(AtWeight { value, target: self.target.max(other.target) })
    }
    fn is_zero_value(&self) -> bool {
        self.value.is_zero() && self.value.prec >= self.target
    }
    fn to_dsl(&self) -> String {
        if self.value.prec < self.target {
            format!("{} (known only to weight {}, need {})", self.value.to_dsl(), self.value.prec, self.target)
        } else {
            self.value.to_dsl()
        }
    }
    fn numeric_terms(&self, assignment: &Assignment, epsilon: f64) -> Result<BTreeMap<String, f64>, EvalError> {
        self.value.terms.iter().map(|(m, c)| Ok((self.value.monomial_text(m), c.eval_f64(assignment, epsilon)?))).collect()
    }
}
