//! Exact scalar towers shared by every algebra: rationals, reduced
//! multivariate rational functions, and truncated Laurent series in `t`.

pub mod laurent;
pub mod poly;
pub mod ratfunc;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use laurent::TruncLaurent;
pub use ratfunc::{RatFunc, SymbolSet};

/// Numeric values for symbols, used only by floating spot checks.
pub type Assignment = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands use different symbol sets")]
    SymbolSetMismatch,
    #[error("operands come from different scalar towers")]
    TowerMismatch,
    #[error("series divisor is indistinguishable from zero at the working order")]
    TruncationUnderflow,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation too close to a pole")]
    NearPole,
    #[error("no value assigned to symbol `{0}`")]
    MissingSymbol(String),
}

/// Coefficient arithmetic used by the normal-ordering engine.
///
/// Values carry their own context (symbol set, precision), so constants are
/// produced from an existing value via the `*_like` constructors.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rational_like(&self, r: &BigRational) -> Self;
    fn from_int_like(&self, n: i64) -> Self {
        self.from_rational_like(&BigRational::from_integer(n.into()))
    }
    fn is_nil(&self) -> bool;
    fn is_unity(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, CoeffError>;
    fn div(&self, o: &Self) -> Result<Self, CoeffError> {
        Ok(self.mul(&o.inv()?))
    }
    fn powi(&self, n: i64) -> Result<Self, CoeffError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.one_like();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
    /// True when the value prints as a single signed term (no parentheses needed).
    fn is_single_term(&self) -> bool;
    fn is_negative_term(&self) -> bool;
    /// Text that reparses in the expression DSL.
    fn to_dsl(&self) -> String;
    fn eval_f64(&self, assignment: &Assignment, epsilon: f64) -> Result<f64, EvalError>;
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::from_integer(1.into())
    }
    fn from_rational_like(&self, r: &BigRational) -> Self {
        r.clone()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unity(&self) -> bool {
        num_traits::One::is_one(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, CoeffError> {
        if Zero::is_zero(self) {
            Err(CoeffError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn is_single_term(&self) -> bool {
        true
    }
    fn is_negative_term(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
    fn to_dsl(&self) -> String {
        let s = ratfunc::fmt_rational_abs(self);
        if num_traits::Signed::is_negative(self) {
            format!("-{}", s)
        } else {
            s
        }
    }
    fn eval_f64(&self, _assignment: &Assignment, _epsilon: f64) -> Result<f64, EvalError> {
        Ok(self.to_f64().unwrap_or(f64::NAN))
    }
}

/// A scalar from any of the three towers.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyScalar {
    Rational(BigRational),
    Func(RatFunc),
    Series(TruncLaurent),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn apply<S: Scalar>(a: &S, b: &S, op: ArithOp) -> Result<S, CoeffError> {
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b)?,
    })
}

/// Tower-closed binary arithmetic on scalars.
pub fn scalar_arith(lhs: &AnyScalar, rhs: &AnyScalar, op: ArithOp) -> Result<AnyScalar, CoeffError> {
    match (lhs, rhs) {
        (AnyScalar::Rational(a), AnyScalar::Rational(b)) => apply(a, b, op).map(AnyScalar::Rational),
        (AnyScalar::Func(a), AnyScalar::Func(b)) => {
            let r = match op {
                ArithOp::Add => a.try_add(b)?,
                ArithOp::Sub => a.try_sub(b)?,
                ArithOp::Mul => a.try_mul(b)?,
                ArithOp::Div => a.try_div(b)?,
            };
            Ok(AnyScalar::Func(r))
        }
        (AnyScalar::Series(a), AnyScalar::Series(b)) => apply(a, b, op).map(AnyScalar::Series),
        _ => Err(CoeffError::TowerMismatch),
    }
}

/// Floating evaluation of an exact scalar; denominators below `epsilon` in
/// magnitude are reported as [`EvalError::NearPole`].
pub fn eval_numeric(s: &AnyScalar, assignment: &Assignment, epsilon: f64) -> Result<f64, EvalError> {
    match s {
        AnyScalar::Rational(r) => r.eval_f64(assignment, epsilon),
        AnyScalar::Func(f) => f.eval(assignment, epsilon),
        AnyScalar::Series(s) => s.eval_f64(assignment, epsilon),
    }
}

/// Relative deviation used by every numeric cross-check.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1e-300);
    if a == b {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn syms() -> Arc<SymbolSet> {
        SymbolSet::new(&["p", "q", "x"]).unwrap()
    }

    fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
        let s = syms();
        (
            prop::collection::vec((0u32..3, 0u32..3, 0u32..2, -3i64..4), 1..4),
            prop::collection::vec((0u32..2, 0u32..3, 0u32..2, 1i64..3), 1..3),
        )
            .prop_map(move |(n, d)| {
                let mk = |ts: Vec<(u32, u32, u32, i64)>| {
                    poly::Poly::from_terms(
                        3,
                        ts.into_iter().map(|(a, b, c, k)| (poly::Exps::from_slice(&[a, b, c]), num_bigint::BigInt::from(k))),
                    )
                };
                let den = mk(d);
                let den = if den.is_zero() { poly::Poly::one(3) } else { den };
                RatFunc::from_parts(&s, mk(n), den).unwrap()
            })
    }

    fn asg(p: f64, q: f64, x: f64) -> Assignment {
        [("p".to_string(), p), ("q".to_string(), q), ("x".to_string(), x)].into_iter().collect()
    }

    #[test]
    fn scalar_arith_tower_mismatch() {
        let a = AnyScalar::Rational(BigRational::from_integer(1.into()));
        let b = AnyScalar::Series(TruncLaurent::exact_int(1));
        assert_eq!(scalar_arith(&a, &b, ArithOp::Add), Err(CoeffError::TowerMismatch));
        let z = AnyScalar::Rational(BigRational::zero());
        assert_eq!(scalar_arith(&a, &z, ArithOp::Div), Err(CoeffError::DivisionByZero));
    }

    #[test]
    fn series_division_underflow() {
        let a = AnyScalar::Series(TruncLaurent::exact_int(1));
        let z = AnyScalar::Series(TruncLaurent::zero_to(12));
        assert_eq!(scalar_arith(&a, &z, ArithOp::Div), Err(CoeffError::TruncationUnderflow));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn canonical_form_soundness(a in arb_ratfunc(), b in arb_ratfunc()) {
            prop_assume!(!b.is_nil());
            let back = a.mul(&b).div(&b).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn eval_is_a_homomorphism(a in arb_ratfunc(), b in arb_ratfunc(), p in 0.5f64..2.0, q in 0.5f64..2.0, x in -2.0f64..2.0) {
            let asg = asg(p, q, x);
            let (Ok(va), Ok(vb)) = (a.eval(&asg, 1e-6), b.eval(&asg, 1e-6)) else { return Ok(()); };
            if let Ok(v) = a.add(&b).eval(&asg, 1e-6) {
                prop_assert!((v - (va + vb)).abs() <= 1e-9 * (1.0 + va.abs() + vb.abs()));
            }
            if let Ok(v) = a.mul(&b).eval(&asg, 1e-6) {
                prop_assert!((v - va * vb).abs() <= 1e-9 * (1.0 + (va * vb).abs()));
            }
        }
    }
}
