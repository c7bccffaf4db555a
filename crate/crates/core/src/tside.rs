//! The two-parameter (1|1) quantum supermatrix algebra over Q(p, q):
//! presentation, superdeterminant, super-inverse, powers, and the
//! verification suites for its identities.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::coeff::{RatFunc, Scalar, SymbolSet};
use crate::nc::{Element, NcError, Presentation, PresentationBuilder};
use crate::report::{Check, Report, SymbolRange};
use crate::supermatrix::SuperMatrix;

pub type TElement = Element<RatFunc>;
pub type TMatrix = SuperMatrix<TElement>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsideError {
    #[error("closed power forms are only defined for n >= 1 (got {0})")]
    UnsupportedNegativeN(i64),
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// Closed-form blocks of `T^n`.
#[derive(Clone, Debug)]
pub struct PowerBlocks {
    pub n: i64,
    pub a: TElement,
    pub b: TElement,
    pub c: TElement,
    pub d: TElement,
}

impl PowerBlocks {
    pub fn matrix(&self) -> TMatrix {
        SuperMatrix::from_blocks(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
    }
}

/// The algebra generated by `a, d` (even, invertible) and `beta, gamma` (odd).
pub struct TSide {
    pres: Arc<Presentation<RatFunc>>,
    syms: Arc<SymbolSet>,
}

static SHARED: OnceLock<TSide> = OnceLock::new();

impl Default for TSide {
    fn default() -> Self {
        Self::new()
    }
}

impl TSide {
    pub fn new() -> Self {
        let syms = SymbolSet::new(&["p", "q"]).expect("distinct symbols");
        let s = |n: &str, k: i32| RatFunc::symbol_pow(&syms, n, k).expect("known symbol");
        let one = RatFunc::one(&syms);
        // d a = a d - (p - q^-1) gamma beta
        let p_minus_qinv = s("p", 1).sub(&s("q", -1));
        let pres = PresentationBuilder::new("tside", one)
            .even("a", true)
            .even("d", true)
            .odd("beta")
            .odd("gamma")
            .rule("d", "a", RatFunc::one(&syms), vec![(vec![("gamma", 1), ("beta", 1)], p_minus_qinv.neg())])
            .rule("beta", "a", s("q", -1), vec![])
            .rule("beta", "d", s("q", -1), vec![])
            .rule("gamma", "a", s("p", -1), vec![])
            .rule("gamma", "d", s("p", -1), vec![])
            .rule("gamma", "beta", s("q", 1).mul(&s("p", -1)).neg(), vec![])
            .build()
            .expect("the relations form a complete rewriting system");
        TSide { pres, syms }
    }

    /// Process-wide instance, so elements built in different places share a
    /// presentation and its product cache.
    pub fn shared() -> &'static TSide {
        SHARED.get_or_init(TSide::new)
    }

    pub fn presentation(&self) -> &Arc<Presentation<RatFunc>> {
        &self.pres
    }

    pub fn symbols(&self) -> &Arc<SymbolSet> {
        &self.syms
    }

    /// `name^k` for `name` in `{p, q}`.
    pub fn sym(&self, name: &str, k: i64) -> RatFunc {
        RatFunc::symbol_pow(&self.syms, name, k as i32).expect("known symbol")
    }

    pub fn int(&self, n: i64) -> RatFunc {
        RatFunc::from_int(&self.syms, n)
    }

    pub fn scalar(&self, c: RatFunc) -> TElement {
        Element::scalar(&self.pres, c)
    }

    pub fn gen(&self, name: &str, k: i64) -> TElement {
        Element::generator(&self.pres, name, k).expect("generator with a valid exponent")
    }

    pub fn a(&self) -> TElement {
        self.gen("a", 1)
    }
    pub fn d(&self) -> TElement {
        self.gen("d", 1)
    }
    pub fn beta(&self) -> TElement {
        self.gen("beta", 1)
    }
    pub fn gamma(&self) -> TElement {
        self.gen("gamma", 1)
    }

    /// Normal form of a word with coefficient 1.
    pub fn word(&self, w: &[(&str, i64)]) -> Result<TElement, NcError> {
        self.pres.normalize(w, RatFunc::one(&self.syms))
    }

    /// Product of elements in the given order.
    pub fn prod(&self, factors: &[&TElement]) -> Result<TElement, NcError> {
        let mut acc = Element::one(&self.pres);
        for f in factors {
            acc = acc.try_mul(f)?;
        }
        Ok(acc)
    }

    pub fn identity(&self) -> TMatrix {
        SuperMatrix::identity_like(&Element::one(&self.pres))
    }

    /// `T = (a beta; gamma d)`.
    pub fn t_matrix(&self) -> TMatrix {
        SuperMatrix::new(self.a(), self.beta(), self.gamma(), self.d()).expect("layout")
    }

    /// `a d - p^-1 beta gamma`.
    pub fn delta1(&self) -> TElement {
        &(&self.a() * &self.d()) - &(&self.beta() * &self.gamma()).scale(&self.sym("p", -1))
    }

    /// `d a - q^-1 gamma beta`.
    pub fn delta2(&self) -> TElement {
        &(&self.d() * &self.a()) - &(&self.gamma() * &self.beta()).scale(&self.sym("q", -1))
    }

    /// Super-inverse of `T` through `delta1` and `delta2`.
    pub fn sinverse_closed(&self) -> Result<TMatrix, NcError> {
        let d1i = self.delta1().invert_even_unit()?;
        let d2i = self.delta2().invert_even_unit()?;
        Ok(SuperMatrix::from_blocks(
            &self.d() * &d1i,
            (&self.beta() * &d2i).scale(&self.sym("q", -1).neg()),
            (&self.gamma() * &d1i).scale(&self.sym("p", -1).neg()),
            &self.a() * &d2i,
        ))
    }

    /// `<N>_{pq} = (1 - (pq)^-N) / (1 - (pq)^-1)`.
    pub fn bracket(&self, n: i64) -> RatFunc {
        let pq_inv = self.sym("p", -1).mul(&self.sym("q", -1));
        let one = self.int(1);
        let num = one.sub(&pq_inv.powi(n).expect("nonzero"));
        num.div(&one.sub(&pq_inv)).expect("1 - (pq)^-1 is nonzero")
    }

    /// `sum_{k=0}^{n-2} <n-k-1> u^{n-k-2} v^k`, multiplied on the right by `tail`.
    fn f_sum(&self, n: i64, u: &TElement, v: &TElement, tail: &TElement) -> Result<TElement, NcError> {
        let mut acc = Element::zero(&self.pres);
        for k in 0..=(n - 2) {
            let term = self.prod(&[&u.pow(n - k - 2)?, &v.pow(k)?, tail])?.scale(&self.bracket(n - k - 1));
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    /// `sum_{k=0}^{n-1} u^{n-k-1} v^k`, multiplied on the right by `tail`.
    fn g_sum(&self, n: i64, u: &TElement, v: &TElement, tail: &TElement) -> Result<TElement, NcError> {
        let mut acc = Element::zero(&self.pres);
        for k in 0..n {
            acc = acc.try_add(&self.prod(&[&u.pow(n - k - 1)?, &v.pow(k)?, tail])?)?;
        }
        Ok(acc)
    }

    /// Blocks of `T^n` from the closed sums.
    pub fn closed_power_blocks(&self, n: i64) -> Result<PowerBlocks, TsideError> {
        if n < 1 {
            return Err(TsideError::UnsupportedNegativeN(n));
        }
        let (a, d, b, g) = (self.a(), self.d(), self.beta(), self.gamma());
        let qd = d.scale(&self.sym("q", -1));
        let pa = a.scale(&self.sym("p", -1));
        let bg = &b * &g;
        let gb = &g * &b;
        Ok(PowerBlocks {
            n,
            a: a.pow(n)?.try_add(&self.f_sum(n, &a, &qd, &bg)?)?,
            b: self.g_sum(n, &a, &qd, &b)?,
            c: self.g_sum(n, &d, &pa, &g)?,
            d: d.pow(n)?.try_add(&self.f_sum(n, &d, &pa, &gb)?)?,
        })
    }

    /// `(p^n - q^-n) (p^m - q^-m) / (p - q^-1)`.
    fn reorder_coeff(&self, n: i64, m: i64) -> RatFunc {
        let pn = |k: i64| self.sym("p", k).sub(&self.sym("q", -k));
        pn(n).mul(&pn(m)).div(&pn(1)).expect("nonzero")
    }

    /// Closed form of `sdet(T)^n`: `a^n d^-n - p (p^-n - q^n)/(p - q^-1) a^{n-1} gamma d^{-n-1} beta`.
    pub fn sdet_power_closed(&self, n: i64) -> Result<TElement, NcError> {
        let c = self.sym("p", 1).mul(&self.sym("p", -n).sub(&self.sym("q", n))).div(&self.p_minus_qinv()).expect("nonzero");
        let head = self.word(&[("a", n), ("d", -n)])?;
        let tail = self.word(&[("a", n - 1), ("gamma", 1), ("d", -n - 1), ("beta", 1)])?;
        head.try_sub(&tail.scale(&c))
    }

    /// `Delta2^n = a^n d^n - p (p^n - q^-n)/(p - q^-1) a^{n-1} gamma d^{n-1} beta`.
    pub fn delta2_power_closed(&self, n: i64) -> Result<TElement, NcError> {
        let c = self.sym("p", 1).mul(&self.sym("p", n).sub(&self.sym("q", -n))).div(&self.p_minus_qinv()).expect("nonzero");
        let head = self.word(&[("a", n), ("d", n)])?;
        let tail = self.word(&[("a", n - 1), ("gamma", 1), ("d", n - 1), ("beta", 1)])?;
        head.try_sub(&tail.scale(&c))
    }

    fn p_minus_qinv(&self) -> RatFunc {
        self.sym("p", 1).sub(&self.sym("q", -1))
    }

    /// Numeric ranges for spot checks: `p, q` away from 0 and from `pq = ±1`
    /// only through the pole guard.
    pub fn spot_ranges() -> Vec<SymbolRange> {
        vec![SymbolRange::signed("p", 0.4, 2.5), SymbolRange::signed("q", 0.4, 2.5)]
    }

    /// Relations of the algebra with parameters `(p^n, q^n)` on the blocks of a matrix.
    pub fn relation_checks(&self, prefix: &str, m: &TMatrix, n: i64) -> Vec<Check> {
        let (pn, qn) = (self.sym("p", n), self.sym("q", n));
        let (a, b, c, d) = (&m.a11, &m.a12, &m.a21, &m.a22);
        let anchor = "power closure: T^n satisfies the relations with (p^n, q^n)";
        let rel = |id: &str, lhs: TElement, rhs: TElement| Check::identity(format!("{}/{}", prefix, id), anchor, lhs, rhs);
        vec![
            rel("AB=q^nBA", a * b, (b * a).scale(&qn)),
            rel("DB=q^nBD", d * b, (b * d).scale(&qn)),
            rel("AC=p^nCA", a * c, (c * a).scale(&pn)),
            rel("DC=p^nCD", d * c, (c * d).scale(&pn)),
            Check::vanishes(format!("{}/B^2=0", prefix), anchor, b * b),
            Check::vanishes(format!("{}/C^2=0", prefix), anchor, c * c),
            Check::vanishes(format!("{}/q^nBC+p^nCB=0", prefix), anchor, &(b * c).scale(&qn) + &(c * b).scale(&pn)),
            Check::identity(
                format!("{}/[A,D]=(p^n-q^-n)CB", prefix),
                "commutator of the diagonal blocks of T^n",
                a.commutator(d).expect("same presentation"),
                (c * b).scale(&pn.sub(&self.sym("q", -n))),
            ),
        ]
    }

    /// Superdeterminant identities, super-inverse, and the three power identities of
    /// the defining algebra, for `n` in `[n_lo, n_hi]` (`n, m` in the
    /// intersection with `[-4, 4]` for the reordering identity).
    pub fn verify_defining(&self, n_lo: i64, n_hi: i64) -> Report {
        let start = Instant::now();
        let mut rep = Report::new("section2", json!({"n_range": [n_lo, n_hi], "m_range": [n_lo.max(-4), n_hi.min(4)]}));
        rep.extend(self.defining_fixed());
        let per_n: Vec<Vec<Check>> = (n_lo..=n_hi).into_par_iter().map(|n| self.defining_for_n(n)).collect();
        rep.extend(per_n.into_iter().flatten());
        let (m_lo, m_hi) = (n_lo.max(-4), n_hi.min(4));
        let pairs: Vec<(i64, i64)> = (m_lo..=m_hi).flat_map(|n| (m_lo..=m_hi).map(move |m| (n, m))).collect();
        let per_pair: Vec<Check> = pairs.into_par_iter().map(|(n, m)| self.reorder_check(n, m)).collect();
        rep.extend(per_pair);
        rep.elapsed_ms = start.elapsed().as_millis() as u64;
        rep
    }

    fn defining_fixed(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let t = self.t_matrix();
        let sdet = match t.sdet() {
            Ok(s) => s,
            Err(e) => return vec![Check::error("sdet", "superdeterminant", e)],
        };
        // a d^-1 - p q^2 d^-2 beta gamma
        let expected = self.word(&[("a", 1), ("d", -1)]).unwrap().try_sub(
            &self.word(&[("d", -2), ("beta", 1), ("gamma", 1)]).unwrap().scale(&self.sym("p", 1).mul(&self.sym("q", 2))),
        );
        out.push(Check::identity("sdet/normal-form", "superdeterminant a d^-1 - beta d^-1 gamma d^-1", sdet.clone(), expected.unwrap()));
        for (name, g) in [
            ("a", self.gen("a", 1)),
            ("a^-1", self.gen("a", -1)),
            ("d", self.gen("d", 1)),
            ("d^-1", self.gen("d", -1)),
            ("beta", self.beta()),
            ("gamma", self.gamma()),
        ] {
            out.push(Check::vanishes(
                format!("sdet/central/{}", name),
                "superdeterminant is central",
                sdet.commutator(&g).unwrap(),
            ));
        }
        let anchor_inv = "super-inverse through delta1, delta2";
        match self.sinverse_closed() {
            Ok(ti) => {
                let id = self.identity();
                for (label, prod) in [("T*Tinv", t.mul(&ti).unwrap()), ("Tinv*T", ti.mul(&t).unwrap())] {
                    for (pos, (u, v)) in prod.entries().iter().zip(id.entries().iter()).enumerate() {
                        out.push(Check::identity(format!("inverse/{}/entry{}", label, pos + 1), anchor_inv, (*u).clone(), (*v).clone()));
                    }
                }
                match t.sinverse() {
                    Ok(block) => {
                        for (pos, (u, v)) in ti.entries().iter().zip(block.entries().iter()).enumerate() {
                            out.push(Check::identity(
                                format!("inverse/closed-vs-block/entry{}", pos + 1),
                                anchor_inv,
                                (*u).clone(),
                                (*v).clone(),
                            ));
                        }
                    }
                    Err(e) => out.push(Check::error("inverse/closed-vs-block", anchor_inv, e)),
                }
                let a2 = self.gen("a", 2);
                let d2 = self.gen("d", 2);
                let d1i = self.delta1().invert_even_unit().unwrap();
                let d2i = self.delta2().invert_even_unit().unwrap();
                let a2d2i = &a2 * &d2i;
                let d2d1i = &d2 * &d1i;
                out.push(Check::identity("sdet/a^2*delta2^-1", "superdeterminant equals a^2 delta2^-1", sdet.clone(), a2d2i.clone()));
                match ti.sdet() {
                    Ok(sdi) => {
                        out.push(Check::identity(
                            "sdet-of-inverse/d^2*delta1^-1",
                            "superdeterminant of the inverse equals d^2 delta1^-1",
                            sdi.clone(),
                            d2d1i.clone(),
                        ));
                        out.push(Check::identity(
                            "sdet-of-inverse/inverse-of-sdet",
                            "superdeterminant of the inverse is the inverse of the superdeterminant",
                            sdi,
                            sdet.invert_even_unit().unwrap(),
                        ));
                    }
                    Err(e) => out.push(Check::error("sdet-of-inverse", "superdeterminant of the inverse", e)),
                }
                out.push(Check::identity(
                    "inverse-of-a^2*delta2^-1",
                    "(a^2 delta2^-1)^-1 = d^2 delta1^-1",
                    a2d2i.invert_even_unit().unwrap(),
                    d2d1i,
                ));
            }
            Err(e) => out.push(Check::error("inverse", anchor_inv, e)),
        }
        out
    }

    fn defining_for_n(&self, n: i64) -> Vec<Check> {
        let mut out = Vec::new();
        let run = || -> Result<Vec<Check>, NcError> {
            let mut v = Vec::new();
            // (a - beta d^-1 gamma)^n
            let base = self.a().try_sub(&self.word(&[("beta", 1), ("d", -1), ("gamma", 1)])?)?;
            let lhs = base.pow(n)?;
            let c = self.sym("q", n).sub(&self.sym("p", -n)).div(&self.sym("q", 1).sub(&self.sym("p", -1))).expect("nonzero");
            let rhs = self.gen("a", n).try_sub(&self.word(&[("beta", 1), ("a", n - 1), ("d", -1), ("gamma", 1)])?.scale(&c))?;
            v.push(Check::identity(format!("power-a-minus-beta-dinv-gamma/n={}", n), "(a - beta d^-1 gamma)^n closed form", lhs, rhs));
            let sdet = self.t_matrix().sdet()?;
            let sdet_n = sdet.pow(n)?;
            v.push(Check::identity(format!("sdet-power/n={}", n), "sdet(T)^n closed form", sdet_n.clone(), self.sdet_power_closed(n)?));
            let via_delta = self.gen("a", 2 * n).try_mul(&self.delta2().pow(-n)?)?;
            v.push(Check::identity(format!("sdet-power-via-delta2/n={}", n), "sdet(T)^n = a^2n delta2^-n", sdet_n, via_delta));
            v.push(Check::identity(
                format!("delta2-power/n={}", n),
                "delta2^n closed form",
                self.delta2().pow(n)?,
                self.delta2_power_closed(n)?,
            ));
            Ok(v)
        };
        match run() {
            Ok(v) => out.extend(v),
            Err(e) => out.push(Check::error(format!("section2/n={}", n), "sdet(T)^n closed form", e)),
        }
        out
    }

    fn reorder_check(&self, n: i64, m: i64) -> Check {
        let id = format!("reorder-a^n-d^m/n={},m={}", n, m);
        let anchor = "a^n d^m = d^m a^n + correction";
        let run = || -> Result<Check, NcError> {
            let lhs = self.gen("a", n).try_mul(&self.gen("d", m))?;
            let swapped = self.gen("d", m).try_mul(&self.gen("a", n))?;
            let corr = self
                .prod(&[&self.gamma(), &self.gen("a", n - 1), &self.gen("d", m - 1), &self.beta()])?
                .scale(&self.reorder_coeff(n, m));
            Ok(Check::identity(id.clone(), anchor, lhs, swapped.try_add(&corr)?))
        };
        run().unwrap_or_else(|e| Check::error(id.clone(), anchor, e))
    }

    /// Powers of `T` against the closed blocks, their algebra relations,
    /// and the superdeterminant of `T^n`, for `n` in `1..=n_max`; plus the
    /// closure of the negative powers.
    pub fn verify_powers(&self, n_max: i64) -> Report {
        let start = Instant::now();
        let mut rep = Report::new("section3", json!({"n_max": n_max, "negative_n": [-1, -2, -3]}));
        let t = self.t_matrix();
        let mut powers = vec![self.identity()];
        for _ in 0..n_max.max(1) {
            let next = powers.last().unwrap().mul(&t).expect("same presentation");
            powers.push(next);
        }
        let sdet = t.sdet().expect("d is invertible");
        let per_n: Vec<Vec<Check>> = (1..=n_max).into_par_iter().map(|n| self.powers_for_n(n, &powers[n as usize], &sdet)).collect();
        rep.extend(per_n.into_iter().flatten());
        let neg: Vec<Vec<Check>> = (1..=3i64).into_par_iter().map(|k| self.powers_negative(-k, &sdet)).collect();
        rep.extend(neg.into_iter().flatten());
        let pairs: Vec<(i64, i64)> = (-3..=3i64).flat_map(|m| (-3..=3i64).map(move |n| (m, n))).collect();
        let mult: Vec<Check> = pairs
            .into_par_iter()
            .map(|(m, n)| {
                let id = format!("power-multiplicative/m={},n={}", m, n);
                let anchor = "T^(m+n) = T^m T^n";
                let run = || -> Result<Check, NcError> {
                    let lhs = t.power(m + n)?;
                    let rhs = t.power(m)?.mul(&t.power(n)?)?;
                    let diff = lhs.sub(&rhs)?;
                    Ok(Check::condition(id.clone(), anchor, diff.is_zero(), Some(format!("{:?}", diff.to_dsl()))))
                };
                run().unwrap_or_else(|e| Check::error(id.clone(), anchor, e))
            })
            .collect();
        rep.extend(mult);
        rep.elapsed_ms = start.elapsed().as_millis() as u64;
        rep
    }

    fn powers_for_n(&self, n: i64, tn: &TMatrix, sdet: &TElement) -> Vec<Check> {
        let mut out = Vec::new();
        let anchor_blocks = "closed blocks of T^n";
        match self.closed_power_blocks(n) {
            Ok(pb) => {
                let closed = pb.matrix();
                for (name, (u, v)) in ["A", "B", "C", "D"].iter().zip(tn.entries().iter().zip(closed.entries().iter())) {
                    out.push(Check::identity(format!("power-blocks/n={}/{}", n, name), anchor_blocks, (*u).clone(), (*v).clone()));
                }
            }
            Err(e) => out.push(Check::error(format!("power-blocks/n={}", n), anchor_blocks, e)),
        }
        out.extend(self.relation_checks(&format!("power-relations/n={}", n), tn, n));
        let run = || -> Result<Vec<Check>, NcError> {
            let mut v = Vec::new();
            let sd = tn.sdet()?;
            v.push(Check::identity(format!("sdet-of-power/n={}", n), "sdet(T^n) closed form", sd.clone(), self.sdet_power_closed(n)?));
            v.push(Check::identity(format!("sdet-of-power-is-power/n={}", n), "sdet(T^n) = sdet(T)^n", sd.clone(), sdet.pow(n)?));
            let (f1, f2) = tn.sdet_factorizations()?;
            v.push(Check::identity(format!("sdet-factorizations-agree/n={}", n), "sdet(T^n) through both Crout factorizations", f1.clone(), f2));
            v.push(Check::identity(format!("sdet-factorization-closed/n={}", n), "sdet(T^n) through both Crout factorizations", f1, sd));
            let (lower, upper) = tn.crout()?;
            let back = lower.mul(&upper)?;
            for (name, (u, w)) in ["A", "B", "C", "D"].iter().zip(back.entries().iter().zip(tn.entries().iter())) {
                v.push(Check::identity(format!("crout-product/n={}/{}", n, name), "Crout decomposition of T^n", (*u).clone(), (*w).clone()));
            }
            Ok(v)
        };
        match run() {
            Ok(v) => out.extend(v),
            Err(e) => out.push(Check::error(format!("sdet-of-power/n={}", n), "sdet(T^n) closed form", e)),
        }
        out
    }

    fn powers_negative(&self, n: i64, sdet: &TElement) -> Vec<Check> {
        let mut out = Vec::new();
        let run = || -> Result<Vec<Check>, NcError> {
            let tn = self.t_matrix().power(n)?;
            let mut v = self.relation_checks(&format!("power-relations/n={}", n), &tn, n);
            v.push(Check::identity(format!("sdet-of-power-is-power/n={}", n), "sdet(T^n) = sdet(T)^n", tn.sdet()?, sdet.pow(n)?));
            v.push(Check::identity(format!("sdet-of-power/n={}", n), "sdet(T^n) closed form", tn.sdet()?, self.sdet_power_closed(n)?));
            Ok(v)
        };
        match run() {
            Ok(v) => out.extend(v),
            Err(e) => out.push(Check::error(format!("power-relations/n={}", n), "power closure", e)),
        }
        out
    }

    /// The induction step for the diagonal commutator of `T^n`: block
    /// recurrences, the `K` and `L` combinations, and `K - L = 0`.
    pub fn verify_recurrences(&self, k_max: i64) -> Report {
        let start = Instant::now();
        let mut rep = Report::new("appendix", json!({"k_max": k_max}));
        let t = self.t_matrix();
        let mut powers = vec![self.identity()];
        for _ in 0..=k_max.max(1) {
            let next = powers.last().unwrap().mul(&t).expect("same presentation");
            powers.push(next);
        }
        let per_k: Vec<Vec<Check>> = (1..=k_max).into_par_iter().map(|k| self.recurrence_for_k(k, &powers)).collect();
        rep.extend(per_k.into_iter().flatten());
        rep.elapsed_ms = start.elapsed().as_millis() as u64;
        rep
    }

    fn recurrence_for_k(&self, k: i64, powers: &[TMatrix]) -> Vec<Check> {
        let run = || -> Result<Vec<Check>, NcError> {
            let mut v = Vec::new();
            let t1 = &powers[1];
            let tk = &powers[k as usize];
            let tk1 = &powers[k as usize + 1];
            let (a1, b1, c1, d1) = (&t1.a11, &t1.a12, &t1.a21, &t1.a22);
            let (ak, bk, ck, dk) = (&tk.a11, &tk.a12, &tk.a21, &tk.a22);
            let anchor_rec = "block recurrences from T^(k+1) = T T^k = T^k T";
            let rec = |id: &str, lhs: &TElement, rhs: TElement| Check::identity(format!("recurrence/k={}/{}", k, id), anchor_rec, lhs.clone(), rhs);
            v.push(rec("A=A1Ak+B1Ck", &tk1.a11, a1 * ak + b1 * ck));
            v.push(rec("C=C1Ak+D1Ck", &tk1.a21, c1 * ak + d1 * ck));
            v.push(rec("B=A1Bk+B1Dk", &tk1.a12, a1 * bk + b1 * dk));
            v.push(rec("D=D1Dk+C1Bk", &tk1.a22, d1 * dk + c1 * bk));
            let right = tk.mul(t1)?;
            for (name, (u, w)) in ["A", "B", "C", "D"].iter().zip(right.entries().iter().zip(tk1.entries().iter())) {
                v.push(Check::identity(format!("recurrence/k={}/{}-right", k, name), anchor_rec, (*u).clone(), (*w).clone()));
            }

            let s = |name: &str, e: i64| self.sym(name, e);
            let p = |e: i64| s("p", e);
            let q = |e: i64| s("q", e);
            let pq = |e: i64| p(e).mul(&q(e));
            let c1akb1dk = self.prod(&[c1, ak, b1, dk])?;
            let cka1bkd1 = self.prod(&[ck, a1, bk, d1])?;
            let cross_a = self.prod(&[ck, a1, ak, b1])?.try_sub(&self.prod(&[c1, ak, a1, bk])?)?;
            let cross_d = self.prod(&[dk, c1, bk, d1])?.try_sub(&self.prod(&[d1, ck, b1, dk])?)?;
            // K = (p^{2k+1} q^k - q^{-k-1}) C1 Ak B1 Dk + (p^{k+1} - p q^{-k}) Ck A1 Bk D1
            //     + p^{k+1} (Ck A1 Ak B1 - C1 Ak A1 Bk) + p^{k+1} (Dk C1 Bk D1 - D1 Ck B1 Dk)
            let kk = c1akb1dk
                .scale(&p(2 * k + 1).mul(&q(k)).sub(&q(-k - 1)))
                .try_add(&cka1bkd1.scale(&p(k + 1).sub(&p(1).mul(&q(-k)))))?
                .try_add(&cross_a.scale(&p(k + 1)))?
                .try_add(&cross_d.scale(&p(k + 1)))?;
            // L = (p^{k+2} q - p q^{-k}) Ck A1 Bk D1 + (p^{k+1} - q^{-k-1}) C1 Ak B1 Dk
            let ll = cka1bkd1
                .scale(&p(k + 2).mul(&q(1)).sub(&p(1).mul(&q(-k))))
                .try_add(&c1akb1dk.scale(&p(k + 1).sub(&q(-k - 1))))?;
            let anchor_kl = "K - L = 0 in the induction step";
            v.push(Check::identity(format!("K-L/k={}", k), anchor_kl, kk.clone(), ll.clone()));
            // the expanded form of K - L
            let expanded = c1akb1dk
                .scale(&p(k + 1).mul(&pq(k).sub(&self.int(1))))
                .try_add(&cka1bkd1.scale(&p(k + 1).mul(&self.int(1).sub(&pq(1)))))?
                .try_add(&cross_a.scale(&p(k + 1)))?
                .try_add(&cross_d.scale(&p(k + 1)))?;
            v.push(Check::identity(format!("K-L-expanded/k={}", k), anchor_kl, kk.try_sub(&ll)?, expanded));
            let anchor_comm = "[A_n, D_n] = (p^n - q^-n) C_n B_n";
            for (idx, m) in [(k, tk), (k + 1, tk1)] {
                v.push(Check::identity(
                    format!("diagonal-commutator/k={}/n={}", k, idx),
                    anchor_comm,
                    m.a11.commutator(&m.a22)?,
                    (&m.a21 * &m.a12).scale(&p(idx).sub(&q(-idx))),
                ));
            }
            // [A_{k+1}, D_{k+1}] = ((pq)^{k+1} - 1) (C1 Bk A1 Ak - (pq)^{-k-1} D1 Dk B1 Ck) + K
            let grouped = self
                .prod(&[c1, bk, a1, ak])?
                .try_sub(&self.prod(&[d1, dk, b1, ck])?.scale(&pq(-k - 1)))?
                .scale(&pq(k + 1).sub(&self.int(1)))
                .try_add(&kk)?;
            v.push(Check::identity(format!("induction-step-grouped/k={}", k), anchor_comm, tk1.a11.commutator(&tk1.a22)?, grouped));
            // [A_{k+1}, D_{k+1}] = (p^{k+1} - q^{-k-1}) C_{k+1} B_{k+1} + K - L
            let step = (&tk1.a21 * &tk1.a12).scale(&p(k + 1).sub(&q(-k - 1))).try_add(&kk.try_sub(&ll)?)?;
            v.push(Check::identity(format!("induction-step/k={}", k), anchor_comm, tk1.a11.commutator(&tk1.a22)?, step));
            Ok(v)
        };
        run().unwrap_or_else(|e| vec![Check::error(format!("induction/k={}", k), "K - L = 0 in the induction step", e)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts() -> &'static TSide {
        TSide::shared()
    }

    #[test]
    fn reorder_d_a() {
        let t = ts();
        let e = t.word(&[("d", 1), ("a", 1)]).unwrap();
        assert_eq!(e.to_dsl(), "a*d + (q - p^-1)*beta*gamma");
        assert_eq!(t.word(&[("beta", 1), ("a", 1)]).unwrap().to_dsl(), "q^-1*a*beta");
        assert!(t.word(&[("beta", 2)]).unwrap().is_zero());
    }

    #[test]
    fn twisted_inverse_word() {
        let t = ts();
        let e = t.word(&[("beta", 1), ("d", -1), ("gamma", 1), ("d", -1)]).unwrap();
        let pq2 = t.sym("p", 1).mul(&t.sym("q", 2));
        assert_eq!(e, t.word(&[("d", -2), ("beta", 1), ("gamma", 1)]).unwrap().scale(&pq2));
        assert_eq!(t.word(&[("beta", 1), ("d", -1)]).unwrap(), t.word(&[("d", -1), ("beta", 1)]).unwrap().scale(&t.sym("q", 1)));
    }

    #[test]
    fn mul_against_word_oracle() {
        let t = ts();
        let lhs = &(&t.a() + &t.beta()) * &(&t.a() - &t.beta());
        let oracle = t.word(&[("a", 2)]).unwrap() - t.word(&[("a", 1), ("beta", 1)]).unwrap() + t.word(&[("beta", 1), ("a", 1)]).unwrap()
            - t.word(&[("beta", 2)]).unwrap();
        assert_eq!(lhs, oracle);
        assert!((&t.word(&[("beta", 1), ("gamma", 1)]).unwrap() * &t.word(&[("gamma", 1), ("beta", 1)]).unwrap()).is_zero());
    }

    #[test]
    fn commutator_a_d() {
        let t = ts();
        let c = t.a().commutator(&t.d()).unwrap();
        let rhs = (&t.gamma() * &t.beta()).scale(&t.sym("p", 1).sub(&t.sym("q", -1)));
        assert_eq!(c, rhs);
    }

    #[test]
    fn sdet_examples() {
        let t = ts();
        assert_eq!(t.identity().sdet().unwrap(), Element::one(t.presentation()));
        let s = t.t_matrix().sdet().unwrap();
        assert_eq!(s.to_dsl(), "a*d^-1 - p*q^2*d^-2*beta*gamma");
        let inv = t.sinverse_closed().unwrap();
        assert!(t.t_matrix().mul(&inv).unwrap().is_identity());
        assert_eq!(&s * &inv.sdet().unwrap(), Element::one(t.presentation()));
        assert!(t.identity().sinverse().unwrap().is_identity());
        assert_eq!(t.beta().invert_even_unit().unwrap_err(), NcError::NotAUnit);
        let d2 = t.delta2();
        assert_eq!(&d2 * &d2.invert_even_unit().unwrap(), Element::one(t.presentation()));
    }

    #[test]
    fn power_examples() {
        let t = ts();
        let t2 = t.t_matrix().power(2).unwrap();
        assert_eq!(t2.a11, t.word(&[("a", 2)]).unwrap() + t.word(&[("beta", 1), ("gamma", 1)]).unwrap());
        let b2 = &(&t.a() + &t.d().scale(&t.sym("q", -1))) * &t.beta();
        assert_eq!(t2.a12, b2);
        assert_eq!(t.t_matrix().power(-1).unwrap(), t.t_matrix().sinverse().unwrap());
        assert!(t.t_matrix().power(0).unwrap().is_identity());
        assert_eq!(t.bracket(1).to_string(), "1");
        assert_eq!(t.bracket(2).to_string(), "1 + p^-1*q^-1");
        let pb = t.closed_power_blocks(2).unwrap();
        assert_eq!(pb.d.to_dsl(), "d^2 - p^-1*q*beta*gamma");
        assert_eq!(t.closed_power_blocks(0).unwrap_err(), TsideError::UnsupportedNegativeN(0));
        let (lo, up) = t.t_matrix().crout().unwrap();
        assert_eq!(lo.mul(&up).unwrap(), t.t_matrix());
        let (l2, u2) = t.identity().crout().unwrap();
        assert!(l2.is_identity() && u2.is_identity());
    }

    #[test]
    fn layout_is_enforced() {
        let t = ts();
        assert!(SuperMatrix::new(t.beta(), t.a(), t.gamma(), t.d()).is_err());
    }
}
