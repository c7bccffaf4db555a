//! Exact model of the exponent algebra: `x, y` commuting, `mu, nu` odd,
//! `[x, mu] = phi mu`, `[x, nu] = psi nu` (same for `y`), `psi = 2 - phi`.
//!
//! Coefficients are rational functions in `p, q, phi, x, y` times powers of
//! two central units `E1`, `E2` standing for `exp(h x)`, `exp(h y)`. They
//! sit to the left of the odd part; moving one across `mu` (resp. `nu`)
//! applies the shift `x, y -> x, y + phi`, `E -> q E` (resp. `+ psi`, `p E`).

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use serde_json::json;

use crate::coeff::poly::Poly;
use crate::coeff::{Assignment, EvalError, RatFunc, Scalar, SymbolSet};
use crate::nc::{Element, ElementParity, NcError, Presentation, PresentationBuilder};
use crate::report::{Check, Report, SideValue, SymbolRange};
use crate::supermatrix::{MatrixEntry, SuperMatrix};

pub type MMatrix = SuperMatrix<MElement>;

const SYMBOLS: [&str; 5] = ["p", "q", "phi", "x", "y"];
const P: usize = 0;
const Q: usize = 1;
const PHI: usize = 2;
const X: usize = 3;
const Y: usize = 4;

/// The shared symbol set `{p, q, phi, x, y}`.
pub fn symbols() -> &'static Arc<SymbolSet> {
    static SYMS: OnceLock<Arc<SymbolSet>> = OnceLock::new();
    SYMS.get_or_init(|| SymbolSet::new(&SYMBOLS).expect("distinct symbols"))
}

fn rf(name: &str) -> RatFunc {
    RatFunc::symbol(symbols(), name).expect("known symbol")
}

fn rint(n: i64) -> RatFunc {
    RatFunc::from_int(symbols(), n)
}

fn var(i: usize) -> Poly {
    Poly::var(SYMBOLS.len(), i, 1)
}

fn constant(n: i64) -> Poly {
    Poly::constant(SYMBOLS.len(), BigInt::from(n))
}

/// `sum r_{k,l} E1^k E2^l`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MCoefficient {
    terms: BTreeMap<(i32, i32), RatFunc>,
}

impl std::fmt::Debug for MCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", MElement::scalar(self.clone()).to_dsl())
    }
}

/// Which odd generator a shift belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Mu,
    Nu,
}

impl MCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_ratfunc(r: RatFunc) -> Self {
        Self::term(r, 0, 0)
    }

    pub fn term(r: RatFunc, k: i32, l: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_nil() {
            terms.insert((k, l), r);
        }
        MCoefficient { terms }
    }

    pub fn one() -> Self {
        Self::from_ratfunc(rint(1))
    }

    pub fn symbol(name: &str) -> Self {
        Self::from_ratfunc(rf(name))
    }

    /// `E1^k E2^l`.
    pub fn e_power(k: i32, l: i32) -> Self {
        Self::term(rint(1), k, l)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &RatFunc)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_add(terms: &mut BTreeMap<(i32, i32), RatFunc>, key: (i32, i32), v: RatFunc) {
        match terms.get_mut(&key) {
            Some(acc) => {
                *acc = acc.add(&v);
                if acc.is_nil() {
                    terms.remove(&key);
                }
            }
            None => {
                if !v.is_nil() {
                    terms.insert(key, v);
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            Self::insert_add(&mut terms, *k, v.clone());
        }
        MCoefficient { terms }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        MCoefficient { terms: self.terms.iter().map(|(k, v)| (*k, v.neg())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for ((k1, l1), a) in &self.terms {
            for ((k2, l2), b) in &o.terms {
                Self::insert_add(&mut terms, (k1 + k2, l1 + l2), a.mul(b));
            }
        }
        MCoefficient { terms }
    }

    pub fn scale(&self, r: &RatFunc) -> Self {
        self.mul(&Self::from_ratfunc(r.clone()))
    }

    /// Inverse of a single term `r E1^k E2^l`.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let ((k, l), r) = self.terms.iter().next()?;
        Some(Self::term(r.inverse().ok()?, -k, -l))
    }

    /// The shift for `mu` or `nu` applied `times` times (negative: inverse).
    pub fn shift(&self, which: Shift, times: i32) -> Self {
        if times == 0 {
            return self.clone();
        }
        let (step, base) = match which {
            Shift::Mu => (var(PHI), rf("q")),
            Shift::Nu => (constant(2).sub(&var(PHI)), rf("p")),
        };
        let delta = step.scale(&BigInt::from(times));
        let mut subs: Vec<Poly> = (0..SYMBOLS.len()).map(var).collect();
        subs[X] = var(X).add(&delta);
        subs[Y] = var(Y).add(&delta);
        let mut terms = BTreeMap::new();
        for ((k, l), r) in &self.terms {
            let moved = r.compose(&subs).expect("same symbol set");
            let factor = base.powi(((k + l) * times) as i64).expect("nonzero base");
            Self::insert_add(&mut terms, (*k, *l), moved.mul(&factor));
        }
        MCoefficient { terms }
    }

    /// `x <-> y`, `phi <-> psi`, `p <-> q`, `E1 <-> E2`.
    pub fn tau(&self) -> Self {
        let mut subs: Vec<Poly> = (0..SYMBOLS.len()).map(var).collect();
        subs[P] = var(Q);
        subs[Q] = var(P);
        subs[PHI] = constant(2).sub(&var(PHI));
        subs[X] = var(Y);
        subs[Y] = var(X);
        MCoefficient { terms: self.terms.iter().map(|((k, l), r)| ((*l, *k), r.compose(&subs).expect("same symbol set"))).collect() }
    }

    pub fn eval(&self, assignment: &Assignment, epsilon: f64) -> Result<f64, EvalError> {
        let e1 = *assignment.get("E1").ok_or_else(|| EvalError::MissingSymbol("E1".into()))?;
        let e2 = *assignment.get("E2").ok_or_else(|| EvalError::MissingSymbol("E2".into()))?;
        let mut acc = 0.0;
        for ((k, l), r) in &self.terms {
            acc += r.eval(assignment, epsilon)? * e1.powi(*k) * e2.powi(*l);
        }
        Ok(acc)
    }
}

/// `f0 + f1 mu + f2 nu + f3 mu nu`, coefficients on the left.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MElement {
    parts: [MCoefficient; 4],
}

const BASIS: [&str; 4] = ["", "mu", "nu", "mu*nu"];

impl std::fmt::Debug for MElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_dsl())
    }
}

impl MElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: MCoefficient) -> Self {
        Self::with_part(0, c)
    }

    pub fn one() -> Self {
        Self::scalar(MCoefficient::one())
    }

    /// `c` times the basis element `1, mu, nu, mu nu` (index 0..4).
    pub fn with_part(index: usize, c: MCoefficient) -> Self {
        let mut e = Self::zero();
        e.parts[index] = c;
        e
    }

    pub fn x() -> Self {
        Self::scalar(MCoefficient::symbol("x"))
    }

    pub fn y() -> Self {
        Self::scalar(MCoefficient::symbol("y"))
    }

    pub fn mu() -> Self {
        Self::with_part(1, MCoefficient::one())
    }

    pub fn nu() -> Self {
        Self::with_part(2, MCoefficient::one())
    }

    pub fn ratfunc(r: RatFunc) -> Self {
        Self::scalar(MCoefficient::from_ratfunc(r))
    }

    pub fn part(&self, index: usize) -> &MCoefficient {
        &self.parts[index]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(MCoefficient::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        MElement { parts: std::array::from_fn(|i| self.parts[i].add(&o.parts[i])) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        MElement { parts: std::array::from_fn(|i| self.parts[i].sub(&o.parts[i])) }
    }

    pub fn neg(&self) -> Self {
        MElement { parts: std::array::from_fn(|i| self.parts[i].neg()) }
    }

    pub fn scale(&self, c: &MCoefficient) -> Self {
        MElement::scalar(c.clone()).mul(self)
    }

    /// `(f mu^a1 nu^a2)(g mu^b1 nu^b2) = f s(g) mu^a1 nu^a2 mu^b1 nu^b2`
    /// with `s` the inverse shifts for the odd letters crossed.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (i, f) in self.parts.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let (a1, a2) = (i & 1, i >> 1);
            for (j, g) in o.parts.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                let (b1, b2) = (j & 1, j >> 1);
                if a1 & b1 == 1 || a2 & b2 == 1 {
                    continue;
                }
                let moved = g.shift(Shift::Mu, -(a1 as i32)).shift(Shift::Nu, -(a2 as i32));
                let mut c = f.mul(&moved);
                if a2 == 1 && b1 == 1 {
                    c = c.neg();
                }
                let k = (a1 | b1) | ((a2 | b2) << 1);
                out.parts[k] = out.parts[k].add(&c);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn anticommutator(&self, o: &Self) -> Self {
        self.mul(o).add(&o.mul(self))
    }

    pub fn parity(&self) -> ElementParity {
        let even = !self.parts[0].is_zero() || !self.parts[3].is_zero();
        let odd = !self.parts[1].is_zero() || !self.parts[2].is_zero();
        match (even, odd) {
            (false, false) => ElementParity::Zero,
            (true, false) => ElementParity::Even,
            (false, true) => ElementParity::Odd,
            (true, true) => ElementParity::Mixed,
        }
    }

    /// Inverse of `f0 + f3 mu nu` with `f0` a single unit term.
    pub fn invert_unit(&self) -> Result<Self, NcError> {
        if !self.parts[1].is_zero() || !self.parts[2].is_zero() {
            return Err(NcError::NotAUnit);
        }
        let f0inv = MElement::scalar(self.parts[0].inverse().ok_or(NcError::NotAUnit)?);
        // u = f0 (1 + n), u^-1 = (1 - n) f0^-1, n^2 = 0
        let n = f0inv.mul(&MElement::with_part(3, self.parts[3].clone()));
        Ok(MElement::one().sub(&n).mul(&f0inv))
    }

    /// `x <-> y`, `mu <-> nu`, `phi <-> psi`, `p <-> q`, `E1 <-> E2`.
    pub fn tau(&self) -> Self {
        MElement { parts: [self.parts[0].tau(), self.parts[2].tau(), self.parts[1].tau(), self.parts[3].tau().neg()] }
    }

    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        for (i, part) in self.parts.iter().enumerate() {
            for ((k, l), r) in part.terms.iter().rev() {
                let mut mon: Vec<String> = Vec::new();
                for (name, e) in [("E1", *k), ("E2", *l)] {
                    match e {
                        0 => {}
                        1 => mon.push(name.to_string()),
                        _ => mon.push(format!("{}^{}", name, e)),
                    }
                }
                if !BASIS[i].is_empty() {
                    mon.push(BASIS[i].to_string());
                }
                let (neg, body) = if r.is_single_term() {
                    if r.is_negative_term() {
                        (true, r.neg().to_dsl())
                    } else {
                        (false, r.to_dsl())
                    }
                } else {
                    (false, format!("({})", r.to_dsl()))
                };
                let mon = mon.join("*");
                let piece = match (mon.is_empty(), body == "1") {
                    (true, _) => body,
                    (false, true) => mon,
                    (false, false) => format!("{}*{}", body, mon),
                };
                if out.is_empty() {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                out.push_str(&piece);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl MatrixEntry for MElement {
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn one_like(&self) -> Self {
        Self::one()
    }
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
    fn entry_parity(&self) -> ElementParity {
        self.parity()
    }
    fn add_entry(&self, o: &Self) -> Result<Self, NcError> {
        Ok(self.add(o))
    }
    fn sub_entry(&self, o: &Self) -> Result<Self, NcError> {
        Ok(self.sub(o))
    }
    fn mul_entry(&self, o: &Self) -> Result<Self, NcError> {
        Ok(self.mul(o))
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

impl SideValue for MElement {
    fn difference(&self, other: &Self) -> Result<Self, String> {
        Ok(self.sub(other))
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn to_dsl(&self) -> String {
        MElement::to_dsl(self)
    }
    fn numeric_terms(&self, assignment: &Assignment, epsilon: f64) -> Result<BTreeMap<String, f64>, EvalError> {
        let mut out = BTreeMap::new();
        for (i, part) in self.parts.iter().enumerate() {
            if !part.is_zero() {
                out.insert(if i == 0 { "1".to_string() } else { BASIS[i].to_string() }, part.eval(assignment, epsilon)?);
            }
        }
        Ok(out)
    }
}

/// `M = (x, mu; nu, y)`.
pub fn m_matrix() -> MMatrix {
    SuperMatrix::from_blocks(MElement::x(), MElement::mu(), MElement::nu(), MElement::y())
}

/// `M^n` by iterated multiplication.
pub fn m_power(n: u32) -> MMatrix {
    let m = m_matrix();
    let mut acc = SuperMatrix::identity_like(&m.a11);
    for _ in 0..n {
        acc = acc.mul(&m).expect("infallible entries");
    }
    acc
}

fn s() -> RatFunc {
    rf("x").sub(&rf("y"))
}

fn psi() -> RatFunc {
    rint(2).sub(&rf("phi"))
}

fn powu(r: &RatFunc, n: u32) -> RatFunc {
    r.powi(n as i64).expect("nonnegative power")
}

/// `F_n`: the scalar multiplying `mu nu` (from the right) in the top-left entry of `M^n`.
pub fn f_closed(n: u32) -> RatFunc {
    let (x, y, phi, psi) = (rf("x"), rf("y"), rf("phi"), psi());
    let s_plus = s().add(&phi);
    let s_minus = s().sub(&psi);
    let two = rint(2);
    let t1 = powu(&x, n).div(&two.mul(&s_minus)).expect("nonzero");
    let t2 = powu(&x.add(&phi).add(&psi), n).div(&two.mul(&s_plus)).expect("nonzero");
    let t3 = powu(&y.add(&psi), n).div(&s_plus.mul(&s_minus)).expect("nonzero");
    t1.sub(&t2).sub(&t3)
}

/// `G_n = ((x + phi)^n - y^n) / (x - y + phi)`.
pub fn g_closed(n: u32) -> RatFunc {
    let (x, y, phi) = (rf("x"), rf("y"), rf("phi"));
    powu(&x.add(&phi), n).sub(&powu(&y, n)).div(&s().add(&phi)).expect("nonzero")
}

fn shift_both(c: &MCoefficient, times: i32) -> MCoefficient {
    c.shift(Shift::Mu, times).shift(Shift::Nu, times)
}

/// Powers `M^n`: closed forms against iterated products, both readings of
/// where `F_n` sits relative to `mu nu`.
pub fn verify_powers(n_max: u32) -> Report {
    let start = Instant::now();
    let mut report = Report::new("mside-powers", json!({ "n_max": n_max }));
    let anchor = "closed form of the powers of M";
    let mut placements = serde_json::Map::new();
    let denom = MCoefficient::from_ratfunc(rint(2).mul(&s().add(&rf("phi"))).mul(&s().sub(&psi())));
    let cleared = |c: &MCoefficient| MElement::scalar(c.mul(&denom));
    let engine = EngineM::new();
    for n in 1..=n_max {
        let mn = m_power(n);
        let f = MCoefficient::from_ratfunc(f_closed(n));
        let g = MCoefficient::from_ratfunc(g_closed(n));
        // x^n - mu nu F_n with F_n right of mu nu: coefficient -shift^-1(F_n)
        let right = shift_both(&f, -1).neg();
        let left = f.neg();
        let got = mn.a11.part(3);
        let reading = match (got == &right, got == &left) {
            (true, true) => "both",
            (true, false) => "right of mu nu",
            (false, true) => "left of mu nu",
            (false, false) => "neither",
        };
        placements.insert(format!("n={}", n), json!(reading));
        report.push(Check::identity(format!("powers/n={}/top-left/mu-nu", n), anchor, cleared(got), cleared(&right)));
        report.push(Check::identity(format!("powers/n={}/top-left/even", n), anchor, MElement::scalar(mn.a11.part(0).clone()), MElement::scalar(MCoefficient::symbol("x").pow(n))));
        report.push(Check::condition(format!("powers/n={}/top-left/odd", n), anchor, mn.a11.part(1).is_zero() && mn.a11.part(2).is_zero(), None));
        // mu G_n: coefficient shift_mu^-1(G_n)
        let b = MElement::with_part(1, g.shift(Shift::Mu, -1));
        report.push(Check::identity(format!("powers/n={}/top-right", n), anchor, cleared_elem(&mn.a12, &denom), cleared_elem(&b, &denom)));
        let c = MElement::with_part(2, g.tau().shift(Shift::Nu, -1));
        report.push(Check::identity(format!("powers/n={}/bottom-left", n), anchor, cleared_elem(&mn.a21, &denom), cleared_elem(&c, &denom)));
        // y^n - nu mu F_n^tau = y^n + mu nu F_n^tau
        let d = MElement::scalar(MCoefficient::symbol("y").pow(n)).add(&MElement::with_part(3, shift_both(&f.tau(), -1)));
        report.push(Check::identity(format!("powers/n={}/bottom-right", n), anchor, cleared_elem(&mn.a22, &denom), cleared_elem(&d, &denom)));
        report.push(Check::identity(format!("powers/n={}/tau/top-left", n), "tau maps the top-left entry of M^n to the bottom-right", mn.a11.tau(), mn.a22.clone()));
        report.push(Check::identity(format!("powers/n={}/tau/top-right", n), "tau maps the top-left entry of M^n to the bottom-right", mn.a12.tau(), mn.a21.clone()));
        match &engine {
            Ok(e) => match e.power(n) {
                Ok(em) => {
                    for (nm, (a, b)) in ["A", "B", "C", "D"].iter().zip(mn.entries().iter().zip(em.entries().iter())) {
                        report.push(Check::identity(format!("powers/n={}/engine/{}", n, nm), "powers of M agree with the rewriting engine", (*a).clone(), (*b).clone()));
                    }
                }
                Err(err) => report.push(Check::error(format!("powers/n={}/engine", n), "powers of M agree with the rewriting engine", err)),
            },
            Err(err) => report.push(Check::error(format!("powers/n={}/engine", n), "powers of M agree with the rewriting engine", err)),
        }
    }
    for m in 1..n_max {
        for k in 1..=n_max - m {
            let prod = m_power(m).mul(&m_power(k)).expect("infallible entries");
            let whole = m_power(m + k);
            let ok = prod == whole;
            report.push(Check::condition(format!("powers/multiplicative/{}+{}", m, k), "M^(m+n) = M^m M^n", ok, Some("entries differ".into())));
        }
    }
    report.params = json!({ "n_max": n_max, "F_n placement": placements });
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn cleared_elem(e: &MElement, denom: &MCoefficient) -> MElement {
    MElement { parts: std::array::from_fn(|i| e.parts[i].mul(denom)) }
}

impl MCoefficient {
    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }
}

/// `T` from `M`: the entries `a, beta, gamma, d` in terms of `x, y, mu, nu, E1, E2`.
pub fn build_t_from_m() -> MMatrix {
    let (p, q, phi, psi) = (rf("p"), rf("q"), rf("phi"), psi());
    let s = s();
    let pq = p.mul(&q);
    let half = |r: RatFunc| r.div(&rint(2)).expect("nonzero");
    let e1 = MCoefficient::e_power(1, 0);
    let e2 = MCoefficient::e_power(0, 1);
    let den = s.add(&phi).mul(&s.sub(&psi)).inverse().expect("nonzero");
    let pq1 = pq.sub(&rint(1));
    // a = E1 - mu nu den {((phi + pq psi)/2 - (pq - 1)/2 s) E1 - p E2}
    let brace_a = e1
        .scale(&half(phi.add(&pq.mul(&psi))).sub(&half(pq1.clone()).mul(&s)))
        .sub(&e2.scale(&p))
        .scale(&den);
    let a = MElement::scalar(e1.clone()).sub(&MElement::with_part(3, MCoefficient::one()).mul(&MElement::scalar(brace_a)));
    // d = E2 - nu mu den {((psi + pq phi)/2 + (pq - 1)/2 s) E2 - q E1}
    let brace_d = e2
        .scale(&half(psi.add(&pq.mul(&phi))).add(&half(pq1).mul(&s)))
        .sub(&e1.scale(&q))
        .scale(&den);
    let nu_mu = MElement::nu().mul(&MElement::mu());
    let d = MElement::scalar(e2.clone()).sub(&nu_mu.mul(&MElement::scalar(brace_d)));
    // beta = mu (s + phi)^-1 (q E1 - E2), gamma = nu (psi - s)^-1 (p E2 - E1)
    let beta = MElement::mu().mul(&MElement::scalar(e1.scale(&q).sub(&e2).scale(&s.add(&phi).inverse().expect("nonzero"))));
    let gamma = MElement::nu().mul(&MElement::scalar(e2.scale(&p).sub(&e1).scale(&psi.sub(&s).inverse().expect("nonzero"))));
    SuperMatrix::from_blocks(a, beta, gamma, d)
}

/// The defining relations for the entries of `T` built from `M`, and `sdet T = E1 E2^-1`.
pub fn verify_built_t() -> Report {
    let start = Instant::now();
    let mut report = Report::new("mside-group", json!({}));
    let t = build_t_from_m();
    let (a, b, g, d) = (&t.a11, &t.a12, &t.a21, &t.a22);
    let (p, q) = (MElement::ratfunc(rf("p")), MElement::ratfunc(rf("q")));
    let anchor = "T built from M satisfies the defining relations";
    let rel = |id: &str, lhs: MElement, rhs: MElement| Check::identity(format!("group/{}", id), anchor, lhs, rhs);
    report.push(rel("a*beta", a.mul(b), q.mul(b).mul(a)));
    report.push(rel("d*beta", d.mul(b), q.mul(b).mul(d)));
    report.push(rel("a*gamma", a.mul(g), p.mul(g).mul(a)));
    report.push(rel("d*gamma", d.mul(g), p.mul(g).mul(d)));
    let pq_inv = MElement::ratfunc(rf("p").div(&rf("q")).expect("nonzero"));
    report.push(rel("beta*gamma", b.mul(g), pq_inv.mul(&g.mul(b)).neg()));
    report.push(rel("beta^2", b.mul(b), MElement::zero()));
    report.push(rel("gamma^2", g.mul(g), MElement::zero()));
    let p_minus = MElement::ratfunc(rf("p").sub(&rf("q").inverse().expect("nonzero")));
    report.push(rel("[a,d]", a.commutator(d), p_minus.mul(&g.mul(b))));
    let sdet_anchor = "superdeterminant of T equals exp(h str M) = E1 E2^-1";
    match t.sdet() {
        Ok(sd) => report.push(Check::identity("group/sdet", sdet_anchor, sd, MElement::scalar(MCoefficient::e_power(1, -1)))),
        Err(e) => report.push(Check::error("group/sdet", sdet_anchor, e)),
    }
    // x - y central, tau an involution that maps relations to relations
    let str_m = MElement::x().sub(&MElement::y());
    for (n, e) in [("x", MElement::x()), ("y", MElement::y()), ("mu", MElement::mu()), ("nu", MElement::nu())] {
        report.push(Check::identity(format!("central/x-y/{}", n), "the supertrace x - y of M is central", str_m.commutator(&e), MElement::zero()));
    }
    for (id, lhs, rhs) in exponent_relations(&Generators::standard()) {
        report.push(Check::identity(format!("relations/{}", id), "defining relations of the exponent algebra", lhs, rhs));
    }
    let images = Generators::standard().tau();
    for ((id, lhs, rhs), (_, tl, tr)) in exponent_relations(&Generators::standard()).into_iter().zip(exponent_relations(&images)) {
        report.push(Check::identity(format!("tau/relations/{}/image", id), "tau preserves the defining relations of the exponent algebra", tl.clone(), tr.clone()));
        report.push(Check::identity(format!("tau/relations/{}/lhs", id), "tau preserves the defining relations of the exponent algebra", lhs.tau(), tl));
        report.push(Check::identity(format!("tau/relations/{}/rhs", id), "tau preserves the defining relations of the exponent algebra", rhs.tau(), tr));
    }
    for (nm, e) in t.entries().iter().enumerate() {
        report.push(Check::identity(format!("tau/involution/{}", ["a", "beta", "gamma", "d"][nm]), "tau is an involution", e.tau().tau(), (*e).clone()));
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

/// `x, y, mu, nu, phi` as elements, or their images under `tau`.
struct Generators {
    x: MElement,
    y: MElement,
    mu: MElement,
    nu: MElement,
    phi: MElement,
    psi: MElement,
}

impl Generators {
    fn standard() -> Self {
        Generators { x: MElement::x(), y: MElement::y(), mu: MElement::mu(), nu: MElement::nu(), phi: MElement::ratfunc(rf("phi")), psi: MElement::ratfunc(psi()) }
    }

    fn tau(&self) -> Self {
        Generators { x: self.x.tau(), y: self.y.tau(), mu: self.mu.tau(), nu: self.nu.tau(), phi: self.phi.tau(), psi: self.psi.tau() }
    }
}

/// `(id, lhs, rhs)` for `[x,y] = 0`, `[x,mu] = phi mu`, ..., `mu nu + nu mu = 0`.
fn exponent_relations(g: &Generators) -> Vec<(&'static str, MElement, MElement)> {
    vec![
        ("[x,y]", g.x.commutator(&g.y), MElement::zero()),
        ("[x,mu]", g.x.commutator(&g.mu), g.phi.mul(&g.mu)),
        ("[y,mu]", g.y.commutator(&g.mu), g.phi.mul(&g.mu)),
        ("[x,nu]", g.x.commutator(&g.nu), g.psi.mul(&g.nu)),
        ("[y,nu]", g.y.commutator(&g.nu), g.psi.mul(&g.nu)),
        ("mu^2", g.mu.mul(&g.mu), MElement::zero()),
        ("nu^2", g.nu.mul(&g.nu), MElement::zero()),
        ("{mu,nu}", g.mu.anticommutator(&g.nu), MElement::zero()),
    ]
}

/// Both M-side reports.
pub fn verify_mside(n_max: u32) -> Report {
    let start = Instant::now();
    let mut r = Report::merge("mside", vec![verify_powers(n_max), verify_built_t()]);
    r.elapsed_ms = start.elapsed().as_millis() as u64;
    r
}

/// Sampling ranges for numeric re-evaluation of M-side checks.
pub fn spot_ranges() -> Vec<SymbolRange> {
    vec![
        SymbolRange::new("p", 0.5, 2.0),
        SymbolRange::new("q", 0.5, 2.0),
        SymbolRange::new("phi", 0.2, 1.8),
        SymbolRange::new("x", -2.0, 2.0),
        SymbolRange::new("y", -2.0, 2.0),
        SymbolRange::new("E1", 0.5, 2.0),
        SymbolRange::new("E2", 0.5, 2.0),
    ]
}

/// The exponent algebra as a presentation for the rewriting engine, used as
/// an independent oracle for powers of `M`.
struct EngineM {
    pres: Arc<Presentation<RatFunc>>,
}

impl EngineM {
    fn new() -> Result<Self, NcError> {
        let phi = rf("phi");
        let pres = PresentationBuilder::new("exponent", rint(1))
            .even("x", false)
            .even("y", false)
            .odd("mu")
            .odd("nu")
            .rule("y", "x", rint(1), vec![])
            // mu x = x mu - phi mu
            .rule("mu", "x", rint(1), vec![(vec![("mu", 1)], phi.neg())])
            .rule("mu", "y", rint(1), vec![(vec![("mu", 1)], phi.neg())])
            .rule("nu", "x", rint(1), vec![(vec![("nu", 1)], psi().neg())])
            .rule("nu", "y", rint(1), vec![(vec![("nu", 1)], psi().neg())])
            .rule("nu", "mu", rint(-1), vec![])
            .build()?;
        Ok(EngineM { pres })
    }

    fn power(&self, n: u32) -> Result<MMatrix, NcError> {
        let g = |name: &str| Element::generator(&self.pres, name, 1);
        let m = SuperMatrix::from_blocks(g("x")?, g("mu")?, g("nu")?, g("y")?);
        let p = m.power(n as i64)?;
        Ok(p.map_into(|e| self.to_melement(e)))
    }

    fn to_melement(&self, e: &Element<RatFunc>) -> MElement {
        let mut out = MElement::zero();
        for (m, c) in e.terms() {
            let ev = m.evens();
            let mono = rf("x").powi(ev[0] as i64).unwrap().mul(&rf("y").powi(ev[1] as i64).unwrap());
            let idx = m.odds() as usize;
            out.parts[idx] = out.parts[idx].add(&MCoefficient::from_ratfunc(mono.mul(c)));
        }
        out
    }
}

impl<E: MatrixEntry> SuperMatrix<E> {
    /// Entrywise conversion into another entry type.
    pub fn map_into<F: MatrixEntry>(&self, f: impl Fn(&E) -> F) -> SuperMatrix<F> {
        SuperMatrix::from_blocks(f(&self.a11), f(&self.a12), f(&self.a21), f(&self.a22))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifts_follow_relations() {
        // x mu = mu (x + phi)
        let lhs = MElement::x().mul(&MElement::mu());
        let rhs = MElement::mu().mul(&MElement::scalar(MCoefficient::symbol("x").add(&MCoefficient::symbol("phi"))));
        assert_eq!(lhs, rhs);
        // E1 mu = q mu E1
        let e1 = MElement::scalar(MCoefficient::e_power(1, 0));
        assert_eq!(e1.mul(&MElement::mu()), MElement::ratfunc(rf("q")).mul(&MElement::mu()).mul(&e1));
        assert!(MElement::mu().mul(&MElement::mu()).is_zero());
        assert_eq!(MElement::nu().mul(&MElement::mu()), MElement::mu().mul(&MElement::nu()).neg());
    }

    #[test]
    fn second_power() {
        let m2 = m_power(2);
        let g2 = MElement::mu().mul(&MElement::ratfunc(rf("x").add(&rf("y")).add(&rf("phi"))));
        assert_eq!(m2.a12, g2);
        let top_left = MElement::x().mul(&MElement::x()).add(&MElement::mu().mul(&MElement::nu()));
        assert_eq!(m2.a11, top_left);
        assert_eq!(f_closed(2), rint(-1));
    }

    #[test]
    fn f2_oracle_numeric() {
        // x^2(s+phi) - (x+2)^2(s-psi) - 2(y+psi)^2 = -2(s+phi)(s-psi)
        let mut rng = 0.3f64;
        for _ in 0..10 {
            rng = (rng * 7.13 + 0.37).fract();
            let (x, y, phi) = (rng * 3.0 - 1.5, (rng * 5.7).fract() * 2.0 - 1.0, 0.2 + rng);
            let psi = 2.0 - phi;
            let s = x - y;
            let lhs = x * x * (s + phi) - (x + 2.0).powi(2) * (s - psi) - 2.0 * (y + psi).powi(2);
            let rhs = -2.0 * (s + phi) * (s - psi);
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn tau_is_involution_and_maps_mu_block() {
        let e = MElement::mu().mul(&MElement::ratfunc(rf("x").add(&rf("y")).add(&rf("phi"))));
        let t = e.tau();
        assert_eq!(t, MElement::nu().mul(&MElement::ratfunc(rf("x").add(&rf("y")).add(&psi()))));
        assert_eq!(t.tau(), e);
        let mn = MElement::mu().mul(&MElement::nu()).scale(&MCoefficient::e_power(2, -1));
        assert_eq!(mn.tau().tau(), mn);
    }

    #[test]
    fn built_t_entries() {
        let t = build_t_from_m();
        let expect_beta = MElement::mu().mul(&MElement::scalar(MCoefficient::e_power(1, 0).scale(&rf("q")).sub(&MCoefficient::e_power(0, 1)).scale(&s().add(&rf("phi")).inverse().unwrap())));
        assert_eq!(t.a12, expect_beta);
    }

    #[test]
    fn unit_inverse() {
        let t = build_t_from_m();
        let di = t.a22.invert_unit().unwrap();
        assert_eq!(t.a22.mul(&di), MElement::one());
        assert_eq!(di.mul(&t.a22), MElement::one());
    }
}
