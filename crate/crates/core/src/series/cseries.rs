//! Commutative power series in `A, D` with truncated Laurent coefficients,
//! used for the closed-form scalar functions of `a = 1 + A`, `d = 1 + D`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coeff::laurent::EXACT;
use crate::coeff::{CoeffError, Scalar, TruncLaurent};

/// `sum c[i][j] A^i D^j` over `i + j <= cap`; exact in the adic degree up to `cap`.
#[derive(Clone, Debug)]
pub struct CSeries {
    cap: usize,
    c: Vec<Vec<TruncLaurent>>,
}

impl CSeries {
    pub fn zero(cap: usize) -> Self {
        let c = (0..=cap).map(|i| vec![TruncLaurent::zero_to(EXACT); cap - i + 1]).collect();
        CSeries { cap, c }
    }

    pub fn constant(cap: usize, v: TruncLaurent) -> Self {
        let mut s = Self::zero(cap);
        s.c[0][0] = v;
        s
    }

    pub fn one(cap: usize) -> Self {
        Self::constant(cap, TruncLaurent::exact_int(1))
    }

    /// `A` (`which = 0`) or `D` (`which = 1`).
    pub fn var(cap: usize, which: usize) -> Self {
        let mut s = Self::zero(cap);
        if cap >= 1 {
            if which == 0 {
                s.c[1][0] = TruncLaurent::exact_int(1);
            } else {
                s.c[0][1] = TruncLaurent::exact_int(1);
            }
        }
        s
    }

    /// `ln(1 + V)` for the variable `V`.
    pub fn ln1p_var(cap: usize, which: usize) -> Self {
        let mut s = Self::zero(cap);
        for n in 1..=cap {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            let v = TruncLaurent::exact(BigRational::new(sign.into(), (n as i64).into()));
            if which == 0 {
                s.c[n][0] = v;
            } else {
                s.c[0][n] = v;
            }
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeff(&self, i: usize, j: usize) -> &TruncLaurent {
        &self.c[i][j]
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &TruncLaurent)> {
        self.c.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (i, j, v)))
    }

    fn zip(&self, o: &Self, f: impl Fn(&TruncLaurent, &TruncLaurent) -> TruncLaurent) -> Self {
        let cap = self.cap.min(o.cap);
        let c = (0..=cap).map(|i| (0..=cap - i).map(|j| f(&self.c[i][j], &o.c[i][j])).collect()).collect();
        CSeries { cap, c }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, k: &TruncLaurent) -> Self {
        CSeries { cap: self.cap, c: self.c.iter().map(|row| row.iter().map(|v| v.mul(k)).collect()).collect() }
    }

    pub fn add_constant(&self, k: &TruncLaurent) -> Self {
        let mut s = self.clone();
        s.c[0][0] = s.c[0][0].add(k);
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let mut out = Self::zero(cap);
        for i1 in 0..=cap {
            for j1 in 0..=cap - i1 {
                let x = &self.c[i1][j1];
                if x.is_nil() && x.is_exact() {
                    continue;
                }
                for i2 in 0..=cap - i1 - j1 {
                    for j2 in 0..=cap - i1 - j1 - i2 {
                        let y = &o.c[i2][j2];
                        if x.is_nil() && y.is_nil() && y.is_exact() {
                            continue;
                        }
                        let cell = &mut out.c[i1 + i2][j1 + j2];
                        *cell = cell.add(&x.mul(y));
                    }
                }
            }
        }
        out
    }

    /// Inverse of a series whose constant coefficient is a nonzero series.
    pub fn inv(&self, order_cap: i32) -> Result<Self, CoeffError> {
        let c0 = &self.c[0][0];
        let c0inv = c0.inv_capped(order_cap)?;
        // u = c0 (1 + r), u^-1 = c0^-1 sum (-r)^k
        let mut r = self.clone();
        r.c[0][0] = TruncLaurent::zero_to(EXACT);
        let r = r.scale(&c0inv);
        let mut acc = Self::one(self.cap);
        let mut term = Self::one(self.cap);
        let minus_r = r.scale(&TruncLaurent::exact_int(-1));
        for _ in 0..self.cap {
            term = term.mul(&minus_r);
            acc = acc.add(&term);
        }
        Ok(acc.scale(&c0inv))
    }

    pub fn div(&self, o: &Self, order_cap: i32) -> Result<Self, CoeffError> {
        Ok(self.mul(&o.inv(order_cap)?))
    }

    /// Smallest t-valuation over the stored coefficients.
    pub fn min_valuation(&self) -> i32 {
        self.terms().filter(|(_, _, v)| !v.is_nil()).map(|(_, _, v)| v.valuation()).min().unwrap_or(0)
    }

    /// Smallest `i + j + order` over the coefficients: the weight up to
    /// which the computed coefficients are reliable.
    pub fn weight_precision(&self) -> i32 {
        self.terms().map(|(i, j, v)| (i + j) as i32 + v.order().min(EXACT / 2)).min().unwrap_or(EXACT)
    }

    /// Evaluation at numeric `A, D, t` (truncated coefficients).
    pub fn eval(&self, a: f64, d: f64, t: f64) -> f64 {
        self.terms().map(|(i, j, v)| v.eval(t) * a.powi(i as i32) * d.powi(j as i32)).sum()
    }

    pub fn is_constant_one(&self) -> bool {
        self.terms().all(|(i, j, v)| if i == 0 && j == 0 { v.terms().all(|(k, c)| k == 0 && c.is_one()) } else { v.is_nil() })
    }
}

/// Exact `c * t`.
pub fn linear_t(c: &BigRational) -> TruncLaurent {
    if c.is_zero() {
        TruncLaurent::zero_to(EXACT)
    } else {
        TruncLaurent::monomial(c.clone(), 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let cap = 5;
        let q = TruncLaurent::exp_linear(&BigRational::one(), 12);
        // q (1 + A) - (1 + D) = (q - 1) + q A - D
        let u = CSeries::var(cap, 0).scale(&q).sub(&CSeries::var(cap, 1)).add_constant(&q.sub(&TruncLaurent::exact_int(1)));
        let ui = u.inv(12).unwrap();
        let one = u.mul(&ui);
        assert!(one.is_constant_one(), "{:?}", one);
    }

    #[test]
    fn log_series() {
        let l = CSeries::ln1p_var(4, 0);
        assert_eq!(l.coeff(2, 0), &TruncLaurent::exact(BigRational::new((-1).into(), 2.into())));
        assert!((l.eval(0.1, 0.0, 0.0) - (1.1f64).ln()).abs() < 1e-5);
    }
}
