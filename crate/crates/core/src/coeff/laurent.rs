//! Truncated Laurent series in one formal parameter `t` with exact
//! rational coefficients and explicit precision tracking.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ratfunc::fmt_rational_abs;
use super::{Assignment, CoeffError, EvalError, Scalar};

/// Precision marker for values known exactly (finite Laurent polynomials).
pub const EXACT: i32 = 1 << 24;

/// Default truncation order.
pub const DEFAULT_ORDER: i32 = 12;

/// `sum coeffs[i] * t^(lead + i) + O(t^(order + 1))`.
///
/// `coeffs` never has a leading or trailing zero, and every stored exponent
/// is `<= order`. Zero is the empty list.
#[derive(Clone)]
pub struct TruncLaurent {
    lead: i32,
    coeffs: Vec<BigRational>,
    order: i32,
}

fn sat(x: i64) -> i32 {
    if x >= EXACT as i64 {
        EXACT
    } else {
        x.max(-(EXACT as i64)) as i32
    }
}

impl TruncLaurent {
    pub fn new(lead: i32, coeffs: Vec<BigRational>, order: i32) -> Self {
        let mut s = TruncLaurent { lead, coeffs, order };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let keep = (self.order as i64 - self.lead as i64 + 1).max(0) as usize;
        if self.coeffs.len() > keep {
            self.coeffs.truncate(keep);
        }
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
        let lz = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lz == self.coeffs.len() {
            self.coeffs.clear();
            self.lead = 0;
        } else if lz > 0 {
            self.coeffs.drain(..lz);
            self.lead += lz as i32;
        }
    }

    pub fn exact(r: BigRational) -> Self {
        Self::new(0, vec![r], EXACT)
    }

    pub fn exact_int(n: i64) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// `c * t^k`, exact.
    pub fn monomial(c: BigRational, k: i32) -> Self {
        Self::new(k, vec![c], EXACT)
    }

    /// Zero known up to `order`.
    pub fn zero_to(order: i32) -> Self {
        TruncLaurent { lead: 0, coeffs: Vec::new(), order }
    }

    /// `exp(c t)` up to `t^order`.
    pub fn exp_linear(c: &BigRational, order: i32) -> Self {
        let mut coeffs = Vec::with_capacity(order.max(0) as usize + 1);
        let mut term = BigRational::one();
        for k in 0..=order.max(0) {
            if k > 0 {
                term = term * c / BigRational::from_integer(BigInt::from(k));
            }
            coeffs.push(term.clone());
        }
        Self::new(0, coeffs, order)
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order >= EXACT
    }

    /// Lowest exponent with a nonzero coefficient, or `order + 1` for a zero.
    pub fn valuation(&self) -> i32 {
        if self.coeffs.is_empty() {
            sat(self.order as i64 + 1)
        } else {
            self.lead
        }
    }

    pub fn coeff(&self, k: i32) -> BigRational {
        if k < self.lead || self.coeffs.is_empty() {
            return BigRational::zero();
        }
        self.coeffs.get((k - self.lead) as usize).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.lead + i as i32, c))
    }

    pub fn truncated(&self, order: i32) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self::new(self.lead, self.coeffs.clone(), order)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let order = self.order.min(other.order);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return Self::zero_to(order);
        }
        let lo = if self.coeffs.is_empty() {
            other.lead
        } else if other.coeffs.is_empty() {
            self.lead
        } else {
            self.lead.min(other.lead)
        };
        let hi_a = self.lead as i64 + self.coeffs.len() as i64 - 1;
        let hi_b = other.lead as i64 + other.coeffs.len() as i64 - 1;
        let hi = hi_a.max(hi_b).min(order as i64);
        if hi < lo as i64 {
            return Self::zero_to(order);
        }
        let coeffs = (lo as i64..=hi)
            .map(|k| {
                let a = self.coeff(k as i32);
                let b = other.coeff(k as i32);
                if negate {
                    a - b
                } else {
                    a + b
                }
            })
            .collect();
        Self::new(lo, coeffs, order)
    }

    /// Product known up to `min(order_a + val_b, order_b + val_a)`, further
    /// capped at `cap`.
    pub fn mul_capped(&self, other: &Self, cap: i32) -> Self {
        let va = self.valuation() as i64;
        let vb = other.valuation() as i64;
        let order = sat((self.order as i64 + vb).min(other.order as i64 + va)).min(cap);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero_to(order);
        }
        let lead = self.lead as i64 + other.lead as i64;
        let max_len = (order as i64 - lead + 1).max(0) as usize;
        let len = (self.coeffs.len() + other.coeffs.len() - 1).min(max_len);
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Self::new(lead as i32, coeffs, order)
    }

    /// Inverse; an exact non-monomial input is expanded up to `cap`.
    pub fn inv_capped(&self, cap: i32) -> Result<Self, CoeffError> {
        if self.coeffs.is_empty() {
            return Err(CoeffError::TruncationUnderflow);
        }
        let v = self.lead;
        if self.coeffs.len() == 1 && self.is_exact() {
            return Ok(Self::monomial(self.coeffs[0].recip(), -v));
        }
        let rel = if self.is_exact() { (cap as i64 + v as i64).max(0) } else { self.order as i64 - v as i64 };
        let order = sat(rel - v as i64).min(if self.is_exact() { cap } else { EXACT });
        let n = (rel + 1).max(1) as usize;
        let c0inv = self.coeffs[0].recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                out.push(c0inv.clone());
                continue;
            }
            let mut acc = BigRational::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[k - j];
                }
            }
            out.push(-acc * &c0inv);
        }
        Ok(Self::new(-v, out, order))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.lead, self.coeffs.iter().map(|c| c * r).collect(), self.order)
    }

    pub fn shift(&self, k: i32) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero_to(sat(self.order as i64 + k as i64));
        }
        Self::new(self.lead + k, self.coeffs.clone(), sat(self.order as i64 + k as i64))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms().map(|(k, c)| c.to_f64().unwrap_or(f64::NAN) * t.powi(k)).sum()
    }
}

impl PartialEq for TruncLaurent {
    /// Equality at the common precision.
    fn eq(&self, other: &Self) -> bool {
        self.combine(other, true).coeffs.is_empty()
    }
}

impl fmt::Debug for TruncLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self)
        } else {
            write!(f, "{} + O(t^{})", self, self.order as i64 + 1)
        }
    }
}

impl fmt::Display for TruncLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mon = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{}", k),
            };
            if mon.is_empty() {
                write!(f, "{}", fmt_rational_abs(c))?;
            } else if c.abs().is_one() {
                write!(f, "{}", mon)?;
            } else {
                write!(f, "{}*{}", fmt_rational_abs(c), mon)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Scalar for TruncLaurent {
    fn zero_like(&self) -> Self {
        Self::zero_to(EXACT)
    }
    fn one_like(&self) -> Self {
        Self::exact_int(1)
    }
    fn from_rational_like(&self, r: &BigRational) -> Self {
        Self::exact(r.clone())
    }
    fn is_nil(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn is_unity(&self) -> bool {
        self.coeffs.len() == 1 && self.lead == 0 && self.coeffs[0].is_one()
    }
    fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }
    fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_capped(o, EXACT)
    }
    fn neg(&self) -> Self {
        Self::new(self.lead, self.coeffs.iter().map(|c| -c).collect(), self.order)
    }
    fn inv(&self) -> Result<Self, CoeffError> {
        self.inv_capped(DEFAULT_ORDER)
    }
    fn is_single_term(&self) -> bool {
        self.terms().count() == 1
    }
    fn is_negative_term(&self) -> bool {
        self.is_single_term() && self.terms().next().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }
    fn to_dsl(&self) -> String {
        self.to_string()
    }
    fn eval_f64(&self, assignment: &Assignment, _epsilon: f64) -> Result<f64, EvalError> {
        if self.terms().all(|(k, _)| k == 0) {
            return Ok(self.eval(1.0));
        }
        let t = assignment.get("t").ok_or_else(|| EvalError::MissingSymbol("t".into()))?;
        Ok(self.eval(*t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exp_times_exp_neg_is_one() {
        let a = r(3, 2);
        let e1 = TruncLaurent::exp_linear(&a, 4);
        let e2 = TruncLaurent::exp_linear(&-a, 4);
        let prod = e1.mul(&e2);
        assert_eq!(prod.order(), 4);
        assert_eq!(prod.terms().collect::<Vec<_>>(), vec![(0, &BigRational::one())]);
    }

    #[test]
    fn inverse_of_positive_valuation_loses_precision() {
        // q - 1 with q = exp(t) known to t^6: inverse starts at t^-1, known to t^4
        let q = TruncLaurent::exp_linear(&BigRational::one(), 6);
        let d = q.sub(&TruncLaurent::exact_int(1));
        let inv = d.inv().unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_eq!(inv.order(), 4);
        // t/(e^t - 1) = 1 - t/2 + t^2/12 - ...
        assert_eq!(inv.coeff(-1), r(1, 1));
        assert_eq!(inv.coeff(0), r(-1, 2));
        assert_eq!(inv.coeff(1), r(1, 12));
        assert_eq!(inv.coeff(2), r(0, 1));
        assert_eq!(inv.coeff(3), r(-1, 720));
        assert_eq!(inv.mul(&d), TruncLaurent::exact_int(1));
    }

    #[test]
    fn underflow() {
        let z = TruncLaurent::zero_to(5);
        assert_eq!(z.inv().unwrap_err(), CoeffError::TruncationUnderflow);
    }

    #[test]
    fn display() {
        let s = TruncLaurent::new(-1, vec![r(1, 1), r(0, 1), r(-1, 2)], 3);
        assert_eq!(s.to_string(), "t^-1 - 1/2*t");
    }

    fn arb_series() -> impl Strategy<Value = TruncLaurent> {
        (-2i32..3, prop::collection::vec(-5i64..6, 1..6), 4i32..10).prop_map(|(lead, cs, ord)| {
            TruncLaurent::new(lead, cs.into_iter().map(|c| r(c, 1)).collect(), ord)
        })
    }

    proptest! {
        #[test]
        fn inverse_is_inverse(s in arb_series()) {
            prop_assume!(!s.is_nil());
            let i = s.inv().unwrap();
            let one = i.mul(&s);
            prop_assert_eq!(one, TruncLaurent::exact_int(1));
        }

        #[test]
        fn mul_commutes(a in arb_series(), b in arb_series()) {
            let x = a.mul(&b);
            let y = b.mul(&a);
            prop_assert_eq!(x.order(), y.order());
            prop_assert_eq!(x, y);
        }
    }
}
