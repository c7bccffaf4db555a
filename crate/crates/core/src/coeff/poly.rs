//! Sparse multivariate polynomials with arbitrary-precision integer
//! coefficients, plus the recursive GCD used to keep rational functions
//! reduced.
//!
//! Terms are kept sorted by a graded-lexicographic order (total degree
//! first, then lexicographic with variable 0 largest), highest term first.
//! Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

pub type Exps = SmallVec<[u32; 6]>;

/// Exponent vector ordered by graded lex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrLex(pub Exps);

impl Ord for GrLex {
    fn cmp(&self, other: &Self) -> Ordering {
        let da: u64 = self.0.iter().map(|&e| e as u64).sum();
        let db: u64 = other.0.iter().map(|&e| e as u64).sum();
        da.cmp(&db).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for GrLex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    /// Sorted descending in graded-lex order.
    terms: Vec<(Exps, BigInt)>,
}

fn exps_zero(n: usize) -> Exps {
    SmallVec::from_elem(0, n)
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Poly { nvars, terms: vec![(exps_zero(nvars), c)] }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn monomial(exps: Exps, c: BigInt) -> Self {
        let nvars = exps.len();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Poly { nvars, terms: vec![(exps, c)] }
    }

    pub fn var(nvars: usize, i: usize, pow: u32) -> Self {
        let mut e = exps_zero(nvars);
        e[i] = pow;
        Self::monomial(e, BigInt::one())
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exps, BigInt)>) -> Self {
        let mut acc: BTreeMap<GrLex, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), nvars);
            if c.is_zero() {
                continue;
            }
            *acc.entry(GrLex(e)).or_insert_with(BigInt::zero) += c;
        }
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e.0, c))
            .collect();
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Exps, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.is_one() && self.terms[0].0.iter().all(|&e| e == 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Exps, BigInt)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            match GrLex(ea.clone()).cmp(&GrLex(eb.clone())) {
                Ordering::Greater => {
                    out.push((ea.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((eb.clone(), if negate { -cb } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ea.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(e, c)| (e.clone(), if negate { -c } else { c.clone() })));
        Poly { nvars: self.nvars, terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if other.is_monomial() {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.is_monomial() {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: BTreeMap<GrLex, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                *acc.entry(GrLex(e)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e.0, c)).collect();
        Poly { nvars: self.nvars, terms }
    }

    /// Multiplication by a single term keeps the term order.
    pub fn mul_term(&self, exps: &Exps, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, k)| (e.iter().zip(exps.iter()).map(|(x, y)| x + y).collect(), k * c))
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division by an integer; panics if some coefficient is not divisible.
    pub fn div_int(&self, c: &BigInt) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, k)| {
                let (q, r) = k.div_rem(c);
                assert!(r.is_zero(), "inexact integer division");
                (e.clone(), q)
            })
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    /// GCD of the integer coefficients, always non-negative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Componentwise minimum of exponents: the largest monomial dividing every term.
    pub fn min_exps(&self) -> Exps {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return exps_zero(self.nvars);
        };
        let mut m = first.clone();
        for (e, _) in it {
            for (mi, ei) in m.iter_mut().zip(e.iter()) {
                *mi = (*mi).min(*ei);
            }
        }
        m
    }

    pub fn div_monomial(&self, exps: &Exps) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(exps.iter()).map(|(x, y)| x - y).collect(), c.clone()))
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    /// Normalizes the sign so that the leading coefficient is positive.
    pub fn sign_normalized(self) -> Poly {
        match self.terms.first() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self,
        }
    }

    pub fn leading_sign_negative(&self) -> bool {
        matches!(self.terms.first(), Some((_, c)) if c.is_negative())
    }

    /// Exact multivariate division; `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if other.is_monomial() {
            let (be, bc) = &other.terms[0];
            let mut terms = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                if e.iter().zip(be.iter()).any(|(x, y)| x < y) {
                    return None;
                }
                let (q, r) = c.div_rem(bc);
                if !r.is_zero() {
                    return None;
                }
                terms.push((e.iter().zip(be.iter()).map(|(x, y)| x - y).collect(), q));
            }
            return Some(Poly { nvars: self.nvars, terms });
        }
        let (lb_e, lb_c) = &other.terms[0];
        let mut rem = self.clone();
        let mut quot: Vec<(Exps, BigInt)> = Vec::new();
        while let Some((re, rc)) = rem.terms.first().cloned() {
            if re.iter().zip(lb_e.iter()).any(|(x, y)| x < y) {
                return None;
            }
            let (q, r) = rc.div_rem(lb_c);
            if !r.is_zero() {
                return None;
            }
            let qe: Exps = re.iter().zip(lb_e.iter()).map(|(x, y)| x - y).collect();
            rem = rem.sub(&other.mul_term(&qe, &q));
            quot.push((qe, q));
        }
        Some(Poly::from_terms(self.nvars, quot))
    }

    /// Coefficients with respect to `var`, indexed by the power of `var`.
    /// The returned polynomials do not involve `var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Exps, BigInt)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var] as usize;
            e2[var] = 0;
            buckets[k].push((e2, c.clone()));
        }
        buckets.into_iter().map(|t| Poly::from_terms(self.nvars, t)).collect()
    }

    fn leading_coeff_in(&self, var: usize) -> Poly {
        let d = self.degree_in(var);
        let terms = self.terms.iter().filter(|(e, _)| e[var] == d).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[var] = 0;
            (e2, c.clone())
        });
        Poly::from_terms(self.nvars, terms)
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (v, &k) in values.iter().zip(e.iter()) {
                    if k > 0 {
                        t *= v.powi(k as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes polynomial `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map(|s| s.nvars).unwrap_or(self.nvars);
        let mut cache: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(nv), s.clone()]).collect();
        let mut acc = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&subs[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][k as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Greatest common divisor with positive leading coefficient.
    /// `gcd(0, 0)` is `0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.clone().sign_normalized();
        }
        if other.is_zero() {
            return self.clone().sign_normalized();
        }
        let ma = self.min_exps();
        let mb = other.min_exps();
        let mon: Exps = ma.iter().zip(mb.iter()).map(|(x, y)| *x.min(y)).collect();
        let ca = self.content();
        let cb = other.content();
        let c = ca.gcd(&cb);
        if self.is_monomial() || other.is_monomial() {
            return Poly::monomial(mon, c);
        }
        let a = self.div_monomial(&ma).div_int(&ca);
        let b = other.div_monomial(&mb).div_int(&cb);
        let g = gcd_primitive(&a, &b);
        g.mul_term(&mon, &c).sign_normalized()
    }
}

/// GCD of two integer-primitive polynomials; the result is primitive with
/// positive leading coefficient.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    let nv = a.nvars;
    if a.is_zero() {
        return b.clone().sign_normalized();
    }
    if b.is_zero() {
        return a.clone().sign_normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(nv);
    }
    if a == b || *a == b.neg() {
        return a.clone().sign_normalized();
    }
    let Some(var) = (0..nv).find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0) else {
        return Poly::one(nv);
    };
    let da = a.degree_in(var);
    let db = b.degree_in(var);
    if da == 0 {
        return gcd_with_coeffs(a, b, var);
    }
    if db == 0 {
        return gcd_with_coeffs(b, a, var);
    }
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = ca.gcd(&cb);
    let g = subresultant_gcd(&pa, &pb, var);
    c.mul(&g).sign_normalized()
}

/// gcd(a, b) where `a` does not involve `var`: gcd(a, coefficients of b).
fn gcd_with_coeffs(a: &Poly, b: &Poly, var: usize) -> Poly {
    let mut g = a.clone();
    for c in b.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = g.gcd(&c);
        if g.is_constant() {
            return Poly::one(a.nvars);
        }
    }
    g.sign_normalized()
}

/// GCD of the coefficients of `a` viewed as a polynomial in `var`.
fn content_in(a: &Poly, var: usize) -> Poly {
    let mut g = Poly::zero(a.nvars);
    for c in a.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = g.gcd(&c);
        if g.is_one() {
            break;
        }
    }
    g.sign_normalized()
}

fn prem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let db = b.degree_in(var);
    let lcb = b.leading_coeff_in(var);
    let mut r = a.clone();
    let mut e = a.degree_in(var) as i64 - db as i64 + 1;
    while !r.is_zero() && r.degree_in(var) >= db {
        let lr = r.leading_coeff_in(var);
        let d = r.degree_in(var) - db;
        let shift = Poly::var(a.nvars, var, d);
        r = lcb.mul(&r).sub(&lr.mul(&shift).mul(b));
        e -= 1;
    }
    if e > 0 {
        r = lcb.pow(e as u32).mul(&r);
    }
    r
}

/// Subresultant PRS on polynomials that are primitive with respect to `var`.
fn subresultant_gcd(a: &Poly, b: &Poly, var: usize) -> Poly {
    let nv = a.nvars;
    let (mut a, mut b) = if a.degree_in(var) >= b.degree_in(var) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let mut g = Poly::one(nv);
    let mut h = Poly::one(nv);
    loop {
        let d = a.degree_in(var) - b.degree_in(var);
        let r = prem(&a, &b, var);
        if r.is_zero() {
            let cb = content_in(&b, var);
            return b.div_exact(&cb).expect("content divides").sign_normalized();
        }
        if r.degree_in(var) == 0 {
            return Poly::one(nv);
        }
        a = b;
        let divisor = g.mul(&h.pow(d));
        b = r.div_exact(&divisor).expect("subresultant division is exact");
        g = a.leading_coeff_in(var);
        if d > 0 {
            let num = g.pow(d);
            let den = h.pow(d - 1);
            h = num.div_exact(&den).expect("subresultant h update is exact");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(nv: usize, terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_terms(nv, terms.iter().map(|(e, c)| (Exps::from_slice(e), BigInt::from(*c))))
    }

    #[test]
    fn gcd_of_common_factor() {
        // (x + y)(x - 2y) and (x + y)(x^2 + 1)
        let f = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let a = f.mul(&p(2, &[(&[1, 0], 1), (&[0, 1], -2)]));
        let b = f.mul(&p(2, &[(&[2, 0], 1), (&[0, 0], 1)]));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn gcd_content_and_monomial_parts() {
        let a = p(2, &[(&[2, 1], 6), (&[1, 2], 4)]);
        let b = p(2, &[(&[1, 1], 4)]);
        assert_eq!(a.gcd(&b), p(2, &[(&[1, 1], 2)]));
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = p(2, &[(&[1, 1], 1), (&[0, 0], -1)]);
        let b = p(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert!(a.gcd(&b).is_one());
    }

    #[test]
    fn exact_division_detects_non_divisibility() {
        let a = p(2, &[(&[2, 0], 1), (&[0, 0], 1)]);
        let b = p(2, &[(&[1, 0], 1), (&[0, 0], 1)]);
        assert!(a.div_exact(&b).is_none());
        let c = a.mul(&b);
        assert_eq!(c.div_exact(&b).unwrap(), a);
    }

    #[test]
    fn compose_shift() {
        // x^2 with x -> x + z
        let a = Poly::var(2, 0, 2);
        let sub = vec![p(2, &[(&[1, 0], 1), (&[0, 1], 1)]), Poly::var(2, 1, 1)];
        assert_eq!(a.compose(&sub), p(2, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));
    }

    fn arb_poly(nv: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec((prop::collection::vec(0u32..3, nv), -4i64..5), 0..4).prop_map(move |ts| {
            Poly::from_terms(nv, ts.into_iter().map(|(e, c)| (Exps::from_vec(e), BigInt::from(c))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gcd_divides_and_recovers_common_factor(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            prop_assume!(!c.is_zero() && !a.is_zero() && !b.is_zero());
            let ac = a.mul(&c);
            let bc = b.mul(&c);
            let g = ac.gcd(&bc);
            prop_assert!(ac.div_exact(&g).is_some());
            prop_assert!(bc.div_exact(&g).is_some());
            prop_assert!(g.div_exact(&c).is_some(), "gcd {:?} not a multiple of {:?}", g, c);
        }
    }
}
