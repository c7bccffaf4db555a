//! 2x2 supermatrices (even diagonal, odd off-diagonal) over any algebra
//! whose elements support ring operations and inversion of even units.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeff::{Assignment, EvalError, Scalar};
use crate::nc::{Element, ElementParity, NcError};
use crate::report::SideValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("entry ({0}) has the wrong parity for a supermatrix")]
    Layout(&'static str),
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// Ring operations needed by supermatrix arithmetic.
pub trait MatrixEntry: Clone + PartialEq + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_entry(&self) -> bool;
    fn entry_parity(&self) -> ElementParity;
    fn add_entry(&self, o: &Self) -> Result<Self, NcError>;
    fn sub_entry(&self, o: &Self) -> Result<Self, NcError>;
    fn mul_entry(&self, o: &Self) -> Result<Self, NcError>;
    fn neg_entry(&self) -> Self;
    fn invert_entry(&self) -> Result<Self, NcError>;
    fn entry_dsl(&self) -> String;
}

impl<C: Scalar> MatrixEntry for Element<C> {
    fn zero_like(&self) -> Self {
        Element::zero(self.presentation())
    }
    fn one_like(&self) -> Self {
        Element::one(self.presentation())
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
        self.invert_even_unit()
    }
    fn entry_dsl(&self) -> String {
        self.to_dsl()
    }
}

impl<C: Scalar> SideValue for Element<C> {
    fn difference(&self, other: &Self) -> Result<Self, String> {
        self.try_sub(other).map_err(|e| e.to_string())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn to_dsl(&self) -> String {
        Element::to_dsl(self)
    }
    fn numeric_terms(&self, assignment: &Assignment, epsilon: f64) -> Result<BTreeMap<String, f64>, EvalError> {
        Ok(self.eval_coeffs(assignment, epsilon)?.into_iter().map(|(m, v)| (self.monomial_text(&m), v)).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix<E: MatrixEntry> {
    pub a11: E,
    pub a12: E,
    pub a21: E,
    pub a22: E,
}

fn even_ok(p: ElementParity) -> bool {
    matches!(p, ElementParity::Zero | ElementParity::Even)
}

fn odd_ok(p: ElementParity) -> bool {
    matches!(p, ElementParity::Zero | ElementParity::Odd)
}

impl<E: MatrixEntry> SuperMatrix<E> {
    /// Checks the parity layout.
    pub fn new(a11: E, a12: E, a21: E, a22: E) -> Result<Self, MatrixError> {
        if !even_ok(a11.entry_parity()) {
            return Err(MatrixError::Layout("1,1"));
        }
        if !odd_ok(a12.entry_parity()) {
            return Err(MatrixError::Layout("1,2"));
        }
        if !odd_ok(a21.entry_parity()) {
            return Err(MatrixError::Layout("2,1"));
        }
        if !even_ok(a22.entry_parity()) {
            return Err(MatrixError::Layout("2,2"));
        }
        Ok(SuperMatrix { a11, a12, a21, a22 })
    }

    /// Builds without the layout check; the caller guarantees the parities.
    pub fn from_blocks(a11: E, a12: E, a21: E, a22: E) -> Self {
        SuperMatrix { a11, a12, a21, a22 }
    }

    pub fn identity_like(e: &E) -> Self {
        let z = e.zero_like();
        let o = e.one_like();
        SuperMatrix { a11: o.clone(), a12: z.clone(), a21: z, a22: o }
    }

    pub fn entries(&self) -> [&E; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn map(&self, f: impl Fn(&E) -> E) -> Self {
        SuperMatrix { a11: f(&self.a11), a12: f(&self.a12), a21: f(&self.a21), a22: f(&self.a22) }
    }

    pub fn try_map(&self, f: impl Fn(&E) -> Result<E, NcError>) -> Result<Self, NcError> {
        Ok(SuperMatrix { a11: f(&self.a11)?, a12: f(&self.a12)?, a21: f(&self.a21)?, a22: f(&self.a22)? })
    }

    pub fn mul(&self, o: &Self) -> Result<Self, NcError> {
        let e = |x: &E, y: &E, z: &E, w: &E| x.mul_entry(y)?.add_entry(&z.mul_entry(w)?);
        Ok(SuperMatrix {
            a11: e(&self.a11, &o.a11, &self.a12, &o.a21)?,
            a12: e(&self.a11, &o.a12, &self.a12, &o.a22)?,
            a21: e(&self.a21, &o.a11, &self.a22, &o.a21)?,
            a22: e(&self.a21, &o.a12, &self.a22, &o.a22)?,
        })
    }

    pub fn add(&self, o: &Self) -> Result<Self, NcError> {
        Ok(SuperMatrix {
            a11: self.a11.add_entry(&o.a11)?,
            a12: self.a12.add_entry(&o.a12)?,
            a21: self.a21.add_entry(&o.a21)?,
            a22: self.a22.add_entry(&o.a22)?,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, NcError> {
        Ok(SuperMatrix {
            a11: self.a11.sub_entry(&o.a11)?,
            a12: self.a12.sub_entry(&o.a12)?,
            a21: self.a21.sub_entry(&o.a21)?,
            a22: self.a22.sub_entry(&o.a22)?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero_entry())
    }

    pub fn is_identity(&self) -> bool {
        let one = self.a11.one_like();
        self.a11 == one && self.a22 == one && self.a12.is_zero_entry() && self.a21.is_zero_entry()
    }

    /// `a11 a22^-1 - a12 a22^-1 a21 a22^-1`.
    pub fn sdet(&self) -> Result<E, NcError> {
        let dinv = self.a22.invert_entry()?;
        let first = self.a11.mul_entry(&dinv)?;
        let second = self.a12.mul_entry(&dinv)?.mul_entry(&self.a21)?.mul_entry(&dinv)?;
        first.sub_entry(&second)
    }

    /// Block inverse through the two Schur complements.
    pub fn sinverse(&self) -> Result<Self, NcError> {
        let ainv = self.a11.invert_entry()?;
        let dinv = self.a22.invert_entry()?;
        let s_a = self.a11.sub_entry(&self.a12.mul_entry(&dinv)?.mul_entry(&self.a21)?)?;
        let s_d = self.a22.sub_entry(&self.a21.mul_entry(&ainv)?.mul_entry(&self.a12)?)?;
        let s_a_inv = s_a.invert_entry()?;
        let s_d_inv = s_d.invert_entry()?;
        Ok(SuperMatrix {
            a12: ainv.mul_entry(&self.a12)?.mul_entry(&s_d_inv)?.neg_entry(),
            a21: dinv.mul_entry(&self.a21)?.mul_entry(&s_a_inv)?.neg_entry(),
            a11: s_a_inv,
            a22: s_d_inv,
        })
    }

    /// `self^n`; negative powers go through [`SuperMatrix::sinverse`].
    pub fn power(&self, n: i64) -> Result<Self, NcError> {
        let base = if n < 0 { self.sinverse()? } else { self.clone() };
        let mut acc = Self::identity_like(&self.a11);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// `(A 0; C D - C A^-1 B) (1 A^-1 B; 0 1)`.
    pub fn crout(&self) -> Result<(Self, Self), NcError> {
        let ainv = self.a11.invert_entry()?;
        let corner = ainv.mul_entry(&self.a12)?;
        let schur = self.a22.sub_entry(&self.a21.mul_entry(&corner)?)?;
        let zero = self.a11.zero_like();
        let one = self.a11.one_like();
        let lower = SuperMatrix { a11: self.a11.clone(), a12: zero.clone(), a21: self.a21.clone(), a22: schur };
        let upper = SuperMatrix { a11: one.clone(), a12: corner, a21: zero, a22: one };
        Ok((lower, upper))
    }

    /// The two sdet factorizations: `A (D - C A^-1 B)^-1` and `(A - B D^-1 C) D^-1`.
    pub fn sdet_factorizations(&self) -> Result<(E, E), NcError> {
        let (lower, _) = self.crout()?;
        let first = self.a11.mul_entry(&lower.a22.invert_entry()?)?;
        let dinv = self.a22.invert_entry()?;
        let second = self.a11.sub_entry(&self.a12.mul_entry(&dinv)?.mul_entry(&self.a21)?)?.mul_entry(&dinv)?;
        Ok((first, second))
    }

    /// Supertrace `a11 - a22`.
    pub fn str(&self) -> Result<E, NcError> {
        self.a11.sub_entry(&self.a22)
    }

    pub fn to_dsl(&self) -> [String; 4] {
        [self.a11.entry_dsl(), self.a12.entry_dsl(), self.a21.entry_dsl(), self.a22.entry_dsl()]
    }
}
