//! Normal ordering for finitely presented graded algebras with twisted
//! commutation rules and invertible even generators.

mod element;
mod presentation;

pub use element::{Element, ElementParity};
pub use presentation::{Generator, Letter, Monomial, Parity, Presentation, PresentationBuilder, RawCorrection, Rule, Strategy};

use thiserror::Error;

use crate::coeff::CoeffError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error("negative power of `{0}`, which is not invertible")]
    NonInvertibleNegativePower(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands belong to different presentations")]
    PresentationMismatch,
    #[error("element is not an invertible even unit")]
    NotAUnit,
    #[error("no rewriting rule for {left}*{right}")]
    MissingRule { left: String, right: String },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use std::sync::Arc;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// x y = 2 y x + e f in order y < x; e, f odd and commuting with x, y.
    fn toy() -> Arc<Presentation<BigRational>> {
        PresentationBuilder::new("toy", r(1, 1))
            .even("y", true)
            .even("x", true)
            .odd("e")
            .odd("f")
            .rule("x", "y", r(2, 1), vec![(vec![("e", 1), ("f", 1)], r(1, 1))])
            .rule("e", "y", r(1, 1), vec![])
            .rule("e", "x", r(1, 1), vec![])
            .rule("f", "y", r(1, 1), vec![])
            .rule("f", "x", r(1, 1), vec![])
            .rule("f", "e", r(-1, 1), vec![])
            .build()
            .unwrap()
    }

    #[test]
    fn inverse_rules_are_consistent() {
        let p = toy();
        let one = Element::one(&p);
        for g in ["x", "y"] {
            let a = Element::generator(&p, g, 1).unwrap();
            let ai = Element::generator(&p, g, -1).unwrap();
            assert_eq!(&a * &ai, one);
            assert_eq!(&ai * &a, one);
        }
        let x = Element::generator(&p, "x", 1).unwrap();
        let y = Element::generator(&p, "y", 1).unwrap();
        let yi = Element::generator(&p, "y", -1).unwrap();
        let xi = Element::generator(&p, "x", -1).unwrap();
        // associativity through the derived rules
        assert_eq!(&(&x * &yi) * &y, x);
        assert_eq!(&(&xi * &y) * &x, &xi * &(&y * &x));
        assert_eq!(&(&yi * &xi) * &x, yi);
        assert_eq!(&(&(&xi * &yi) * &y) * &x, one);
    }

    #[test]
    fn odd_squares_vanish_and_negative_odd_rejected() {
        let p = toy();
        assert!(p.normalize(&[("e", 2)], r(1, 1)).unwrap().is_zero());
        assert_eq!(p.normalize(&[("e", -1)], r(1, 1)).unwrap_err(), NcError::NonInvertibleNegativePower("e".into()));
        assert_eq!(p.normalize(&[("z", 1)], r(1, 1)).unwrap_err(), NcError::UnknownGenerator("z".into()));
    }

    #[test]
    fn strategies_agree() {
        let p = toy();
        let w = [("f", 1), ("x", -2), ("e", 1), ("y", 1), ("x", 1), ("y", -1)];
        let a = p.normalize_with(&w, r(1, 1), Strategy::Leftmost).unwrap();
        let b = p.normalize_with(&w, r(1, 1), Strategy::Rightmost).unwrap();
        let c = p.normalize_with(&w, r(1, 1), Strategy::Incremental).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn unit_inverse() {
        let p = toy();
        let x = Element::generator(&p, "x", 1).unwrap();
        let ef = p.normalize(&[("e", 1), ("f", 1)], r(1, 1)).unwrap();
        let u = &x.scale(&r(3, 1)) + &ef;
        let ui = u.invert_even_unit().unwrap();
        assert_eq!(&u * &ui, Element::one(&p));
        assert_eq!(&ui * &u, Element::one(&p));
        let e = Element::generator(&p, "e", 1).unwrap();
        assert_eq!(e.invert_even_unit().unwrap_err(), NcError::NotAUnit);
        assert_eq!((&x + &Element::one(&p)).invert_even_unit().unwrap_err(), NcError::NotAUnit);
    }

    #[test]
    fn mismatch() {
        let a = Element::one(&toy());
        let b = Element::one(&toy());
        assert_eq!(a.try_add(&b).unwrap_err(), NcError::PresentationMismatch);
    }

    #[test]
    fn printing() {
        let p = toy();
        let e = p.normalize(&[("x", 1), ("y", 1)], r(1, 1)).unwrap();
        assert_eq!(e.to_dsl(), "2*y*x + e*f");
        let f = p.normalize(&[("f", 1), ("x", -1), ("e", 1)], r(-1, 1)).unwrap();
        assert_eq!(f.to_dsl(), "x^-1*e*f");
    }
}
