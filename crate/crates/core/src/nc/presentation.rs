use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use smallvec::SmallVec;

use super::{Element, NcError};
use crate::coeff::Scalar;

/// Rewriting steps allowed for a single word before giving up.
const STEP_LIMIT: u64 = 2_000_000;
const MAX_DEPTH: u32 = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub parity: Parity,
    pub invertible: bool,
}

/// A canonical word: exponents on the even generators (in presentation
/// order) followed by one bit per odd generator (bit `i` is odd generator `i`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub(crate) evens: SmallVec<[i32; 4]>,
    pub(crate) odds: u8,
}

impl Monomial {
    pub fn identity(n_even: usize) -> Self {
        Monomial { evens: SmallVec::from_elem(0, n_even), odds: 0 }
    }

    pub fn new(evens: &[i32], odds: u8) -> Self {
        Monomial { evens: SmallVec::from_slice(evens), odds }
    }

    pub fn evens(&self) -> &[i32] {
        &self.evens
    }

    pub fn odds(&self) -> u8 {
        self.odds
    }

    pub fn is_identity(&self) -> bool {
        self.odds == 0 && self.evens.iter().all(|&e| e == 0)
    }

    pub fn odd_count(&self) -> u32 {
        self.odds.count_ones()
    }

    pub fn parity(&self) -> Parity {
        if self.odd_count() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Sum of absolute even exponents plus the number of odd generators.
    pub fn degree(&self) -> u32 {
        self.evens.iter().map(|e| e.unsigned_abs()).sum::<u32>() + self.odd_count()
    }
}

/// One letter of a word: a generator, or the inverse of an invertible even generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: u8,
    pub inv: bool,
}

/// `u * v -> twist * v * u + correction` for a letter pair with `u` after `v`
/// in canonical order.
#[derive(Clone, Debug)]
pub struct Rule<C: Scalar> {
    pub twist: C,
    pub correction: Vec<(Monomial, C)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Always rewrite the leftmost reducible pair.
    Leftmost,
    /// Always rewrite the rightmost reducible pair.
    Rightmost,
    /// Multiply letter by letter onto a normal monomial, memoizing each
    /// `monomial * letter` product.
    Incremental,
}

/// A finitely presented graded algebra whose rewriting system is complete
/// by construction: even generators first, then at most 8 odd generators,
/// with an explicit rule for every out-of-order letter pair.
pub struct Presentation<C: Scalar> {
    name: String,
    gens: Vec<Generator>,
    n_even: usize,
    one: C,
    rules: HashMap<(Letter, Letter), Rule<C>>,
    /// Every rule output keeps the odd letters of its input, so a word with a
    /// repeated odd generator is zero.
    odd_monotone: bool,
    product_cache: RwLock<HashMap<(Monomial, Monomial), Arc<Vec<(Monomial, C)>>>>,
    letter_cache: RwLock<HashMap<(Monomial, Letter), Arc<Vec<(Monomial, C)>>>>,
}

impl<C: Scalar> fmt::Debug for Presentation<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation").field("name", &self.name).field("gens", &self.gens).finish()
    }
}

impl<C: Scalar> Presentation<C> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn n_even(&self) -> usize {
        self.n_even
    }

    pub fn n_odd(&self) -> usize {
        self.gens.len() - self.n_even
    }

    pub fn one_scalar(&self) -> &C {
        &self.one
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn rule(&self, u: Letter, v: Letter) -> Option<&Rule<C>> {
        self.rules.get(&(u, v))
    }

    /// Expands a monomial into its canonical letter sequence.
    pub fn letters_of(&self, m: &Monomial) -> Vec<Letter> {
        let mut out = Vec::new();
        for (i, &e) in m.evens.iter().enumerate() {
            for _ in 0..e.unsigned_abs() {
                out.push(Letter { gen: i as u8, inv: e < 0 });
            }
        }
        for j in 0..self.n_odd() {
            if m.odds & (1 << j) != 0 {
                out.push(Letter { gen: (self.n_even + j) as u8, inv: false });
            }
        }
        out
    }

    /// Letters for a `(generator, exponent)` word, validating exponents.
    pub fn letters_of_word(&self, word: &[(&str, i64)]) -> Result<Vec<Letter>, NcError> {
        let mut out = Vec::new();
        for &(name, k) in word {
            let g = self.generator_index(name).ok_or_else(|| NcError::UnknownGenerator(name.to_string()))?;
            let gen = &self.gens[g];
            if k < 0 && !(gen.parity == Parity::Even && gen.invertible) {
                return Err(NcError::NonInvertibleNegativePower(name.to_string()));
            }
            for _ in 0..k.unsigned_abs() {
                out.push(Letter { gen: g as u8, inv: k < 0 });
            }
        }
        Ok(out)
    }

    fn is_odd(&self, l: Letter) -> bool {
        l.gen as usize >= self.n_even
    }

    /// Position of the next reducible adjacent pair, if any.
    fn find_redex(&self, w: &[Letter], strategy: Strategy) -> Option<usize> {
        let reducible = |i: usize| {
            let (u, v) = (w[i], w[i + 1]);
            u.gen > v.gen || (u.gen == v.gen && (self.is_odd(u) || u.inv != v.inv))
        };
        let n = w.len();
        if n < 2 {
            return None;
        }
        match strategy {
            Strategy::Leftmost => (0..n - 1).find(|&i| reducible(i)),
            Strategy::Rightmost => (0..n - 1).rev().find(|&i| reducible(i)),
            Strategy::Incremental => unreachable!("incremental products do not search for redexes"),
        }
    }

    fn monomial_of_sorted(&self, w: &[Letter]) -> Monomial {
        let mut m = Monomial::identity(self.n_even);
        for l in w {
            let g = l.gen as usize;
            if g < self.n_even {
                m.evens[g] += if l.inv { -1 } else { 1 };
            } else {
                m.odds |= 1 << (g - self.n_even);
            }
        }
        m
    }

    /// Rewrites `coeff * word` to normal form with the given strategy.
    pub(crate) fn normalize_letters(
        &self,
        word: Vec<Letter>,
        coeff: C,
        strategy: Strategy,
    ) -> Result<BTreeMap<Monomial, C>, NcError> {
        if strategy == Strategy::Incremental {
            let start = vec![(Monomial::identity(self.n_even), coeff)];
            let terms = self.mul_letters(start, &word, 0)?;
            return Ok(terms.into_iter().filter(|(_, c)| !c.is_nil()).collect());
        }
        let mut out: BTreeMap<Monomial, C> = BTreeMap::new();
        let mut stack: Vec<(C, Vec<Letter>)> = Vec::new();
        if !self.repeats_odd(&word) {
            stack.push((coeff, word));
        }
        let mut steps: u64 = 0;
        while let Some((mut c, mut w)) = stack.pop() {
            loop {
                steps += 1;
                if steps > STEP_LIMIT {
                    return Err(NcError::InvalidPresentation("rewriting does not terminate".into()));
                }
                if c.is_nil() {
                    break;
                }
                let Some(i) = self.find_redex(&w, strategy) else {
                    let m = self.monomial_of_sorted(&w);
                    match out.get_mut(&m) {
                        Some(acc) => *acc = acc.add(&c),
                        None => {
                            out.insert(m, c);
                        }
                    }
                    break;
                };
                let (u, v) = (w[i], w[i + 1]);
                if u.gen == v.gen {
                    if self.is_odd(u) {
                        break;
                    }
                    w.drain(i..i + 2);
                    continue;
                }
                let rule = self.rules.get(&(u, v)).ok_or(NcError::MissingRule {
                    left: self.letter_name(u),
                    right: self.letter_name(v),
                })?;
                for (m, k) in &rule.correction {
                    let mut nw = Vec::with_capacity(w.len() + 4);
                    nw.extend_from_slice(&w[..i]);
                    nw.extend(self.letters_of(m));
                    nw.extend_from_slice(&w[i + 2..]);
                    if !self.repeats_odd(&nw) {
                        stack.push((c.mul(k), nw));
                    }
                }
                w.swap(i, i + 1);
                if !rule.twist.is_unity() {
                    c = c.mul(&rule.twist);
                }
            }
        }
        out.retain(|_, c| !c.is_nil());
        Ok(out)
    }

    fn repeats_odd(&self, w: &[Letter]) -> bool {
        if !self.odd_monotone {
            return false;
        }
        let mut seen = 0u8;
        for l in w {
            if self.is_odd(*l) {
                let bit = 1u8 << (l.gen as usize - self.n_even);
                if seen & bit != 0 {
                    return true;
                }
                seen |= bit;
            }
        }
        false
    }

    fn letter_name(&self, l: Letter) -> String {
        let n = &self.gens[l.gen as usize].name;
        if l.inv {
            format!("{}^-1", n)
        } else {
            n.clone()
        }
    }

    /// Normal form of the product of two canonical monomials (memoized).
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Arc<Vec<(Monomial, C)>> {
        if a.is_identity() {
            return Arc::new(vec![(b.clone(), self.one.clone())]);
        }
        if b.is_identity() {
            return Arc::new(vec![(a.clone(), self.one.clone())]);
        }
        let key = (a.clone(), b.clone());
        if let Some(hit) = self.product_cache.read().unwrap().get(&key) {
            return hit.clone();
        }
        let terms = self
            .mul_letters(vec![(a.clone(), self.one.clone())], &self.letters_of(b), 0)
            .expect("presentation rules are complete after build");
        let v = Arc::new(terms.into_iter().filter(|(_, c)| !c.is_nil()).collect::<Vec<_>>());
        self.product_cache.write().unwrap().insert(key, v.clone());
        v
    }

    /// `terms * letters`, one letter at a time.
    fn mul_letters(&self, terms: Vec<(Monomial, C)>, letters: &[Letter], depth: u32) -> Result<BTreeMap<Monomial, C>, NcError> {
        let mut cur: BTreeMap<Monomial, C> = terms.into_iter().collect();
        // odd letters still to come; a term already holding one of them is zero
        let mut ahead = vec![0u8; letters.len() + 1];
        for (i, l) in letters.iter().enumerate().rev() {
            ahead[i] = ahead[i + 1] | if self.is_odd(*l) { 1 << (l.gen as usize - self.n_even) } else { 0 };
        }
        for (i, &l) in letters.iter().enumerate() {
            let mut next: BTreeMap<Monomial, C> = BTreeMap::new();
            for (m, c) in &cur {
                if c.is_nil() || (self.odd_monotone && m.odds & ahead[i] != 0) {
                    continue;
                }
                for (m2, k) in self.mul_letter(m, l, depth + 1)?.iter() {
                    let v = c.mul(k);
                    match next.get_mut(m2) {
                        Some(x) => *x = x.add(&v),
                        None => {
                            next.insert(m2.clone(), v);
                        }
                    }
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Last letter of a nonempty normal monomial and the monomial without it.
    fn split_last(&self, m: &Monomial) -> (Monomial, Letter) {
        let mut rest = m.clone();
        if m.odds != 0 {
            let j = 7 - m.odds.leading_zeros() as usize;
            rest.odds &= !(1 << j);
            return (rest, Letter { gen: (self.n_even + j) as u8, inv: false });
        }
        let g = m.evens.iter().rposition(|&e| e != 0).expect("nonempty monomial");
        let e = m.evens[g];
        rest.evens[g] -= e.signum();
        (rest, Letter { gen: g as u8, inv: e < 0 })
    }

    /// `m * l` in normal form (memoized).
    fn mul_letter(&self, m: &Monomial, l: Letter, depth: u32) -> Result<Arc<Vec<(Monomial, C)>>, NcError> {
        if depth > MAX_DEPTH {
            return Err(NcError::InvalidPresentation("rewriting does not terminate".into()));
        }
        let key = (m.clone(), l);
        if let Some(hit) = self.letter_cache.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let v = Arc::new(self.mul_letter_uncached(m, l, depth)?);
        self.letter_cache.write().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn mul_letter_uncached(&self, m: &Monomial, l: Letter, depth: u32) -> Result<Vec<(Monomial, C)>, NcError> {
        let g = l.gen as usize;
        if self.is_odd(l) {
            let j = g - self.n_even;
            if m.odds >> j == 0 {
                let mut out = m.clone();
                out.odds |= 1 << j;
                return Ok(vec![(out, self.one.clone())]);
            }
            if self.odd_monotone && m.odds & (1 << j) != 0 {
                return Ok(Vec::new());
            }
        } else if m.odds == 0 && m.evens[g + 1..].iter().all(|&e| e == 0) {
            let mut out = m.clone();
            out.evens[g] += if l.inv { -1 } else { 1 };
            return Ok(vec![(out, self.one.clone())]);
        }
        let (rest, x) = self.split_last(m);
        if x.gen == l.gen {
            // only an odd letter can meet itself here
            return Ok(Vec::new());
        }
        let rule = self.rules.get(&(x, l)).ok_or(NcError::MissingRule { left: self.letter_name(x), right: self.letter_name(l) })?;
        // rest * x * l = twist * (rest * l) * x + rest * correction
        let mut acc = self.mul_letters(vec![(rest.clone(), rule.twist.clone())], &[l, x], depth)?;
        for (cm, k) in &rule.correction {
            for (m2, v) in self.mul_letters(vec![(rest.clone(), k.clone())], &self.letters_of(cm), depth)? {
                match acc.get_mut(&m2) {
                    Some(a) => *a = a.add(&v),
                    None => {
                        acc.insert(m2, v);
                    }
                }
            }
        }
        Ok(acc.into_iter().filter(|(_, c)| !c.is_nil()).collect())
    }

    pub fn cache_len(&self) -> usize {
        self.product_cache.read().unwrap().len()
    }
}

/// Correction supplied to the builder as raw words, normalized at build time.
pub type RawCorrection<'a, C> = Vec<(Vec<(&'a str, i64)>, C)>;

pub struct PresentationBuilder<C: Scalar> {
    name: String,
    evens: Vec<Generator>,
    odds: Vec<Generator>,
    one: C,
    raw_rules: Vec<(String, String, C, Vec<(Vec<(String, i64)>, C)>)>,
}

impl<C: Scalar> PresentationBuilder<C> {
    pub fn new(name: &str, one: C) -> Self {
        PresentationBuilder { name: name.to_string(), evens: Vec::new(), odds: Vec::new(), one, raw_rules: Vec::new() }
    }

    pub fn even(mut self, name: &str, invertible: bool) -> Self {
        self.evens.push(Generator { name: name.to_string(), parity: Parity::Even, invertible });
        self
    }

    pub fn odd(mut self, name: &str) -> Self {
        self.odds.push(Generator { name: name.to_string(), parity: Parity::Odd, invertible: false });
        self
    }

    /// `left * right -> twist * right * left + correction`, where `left`
    /// comes after `right` in canonical order.
    pub fn rule(mut self, left: &str, right: &str, twist: C, correction: RawCorrection<'_, C>) -> Self {
        let corr = correction
            .into_iter()
            .map(|(w, c)| (w.into_iter().map(|(g, k)| (g.to_string(), k)).collect(), c))
            .collect();
        self.raw_rules.push((left.to_string(), right.to_string(), twist, corr));
        self
    }

    pub fn build(self) -> Result<Arc<Presentation<C>>, NcError> {
        let n_even = self.evens.len();
        let mut gens = self.evens;
        gens.extend(self.odds);
        if gens.len() - n_even > 8 {
            return Err(NcError::InvalidPresentation("at most 8 odd generators".into()));
        }
        let mut pres = Presentation {
            name: self.name,
            gens,
            n_even,
            one: self.one,
            rules: HashMap::new(),
            odd_monotone: false,
            product_cache: RwLock::new(HashMap::new()),
            letter_cache: RwLock::new(HashMap::new()),
        };
        let idx = |p: &Presentation<C>, n: &str| p.generator_index(n).ok_or_else(|| NcError::UnknownGenerator(n.to_string()));

        // Base rules with their twists first, corrections pending.
        let mut pending: Vec<((Letter, Letter), Vec<(Vec<(String, i64)>, C)>)> = Vec::new();
        for (l, r, twist, corr) in self.raw_rules {
            let (li, ri) = (idx(&pres, &l)?, idx(&pres, &r)?);
            if li <= ri {
                return Err(NcError::InvalidPresentation(format!("rule {}*{} is not an inversion", l, r)));
            }
            if twist.is_nil() {
                return Err(NcError::InvalidPresentation(format!("rule {}*{} has zero twist", l, r)));
            }
            let key = (Letter { gen: li as u8, inv: false }, Letter { gen: ri as u8, inv: false });
            pres.rules.insert(key, Rule { twist, correction: Vec::new() });
            pending.push((key, corr));
        }
        for (i, gi) in pres.gens.iter().enumerate() {
            for (j, _) in pres.gens.iter().enumerate().take(i) {
                let key = (Letter { gen: i as u8, inv: false }, Letter { gen: j as u8, inv: false });
                if !pres.rules.contains_key(&key) {
                    return Err(NcError::InvalidPresentation(format!(
                        "no rule for {}*{}",
                        gi.name, pres.gens[j].name
                    )));
                }
            }
        }
        // Corrections may themselves need rewriting (e.g. a correction written
        // in a non-canonical order); resolve to a fixed point.
        let base_corrs: Vec<((Letter, Letter), Vec<(Vec<Letter>, C)>)> = pending
            .into_iter()
            .map(|(k, corr)| {
                let words = corr
                    .into_iter()
                    .map(|(w, c)| {
                        let ws: Vec<(&str, i64)> = w.iter().map(|(g, e)| (g.as_str(), *e)).collect();
                        Ok((pres.letters_of_word(&ws)?, c))
                    })
                    .collect::<Result<Vec<_>, NcError>>()?;
                Ok((k, words))
            })
            .collect::<Result<_, NcError>>()?;
        pres.odd_monotone = base_corrs.iter().all(|((u, v), words)| {
            let need: u8 = [*u, *v]
                .iter()
                .filter(|l| pres.is_odd(**l))
                .fold(0, |acc, l| acc | 1 << (l.gen as usize - n_even));
            words.iter().all(|(w, _)| {
                let have = w.iter().filter(|l| pres.is_odd(**l)).fold(0u8, |acc, l| acc | 1 << (l.gen as usize - n_even));
                have & need == need
            })
        });
        let mut derived: Vec<((Letter, Letter), Derivation<C>)> = Vec::new();
        for (key, words) in &base_corrs {
            derived.push((*key, Derivation::Base(words.clone())));
        }
        // Rules involving inverse letters, derived by conjugation.
        for (key, _) in &base_corrs {
            let (u, v) = *key;
            let u_inv = pres.gens[u.gen as usize].invertible && !pres.is_odd(u);
            let v_inv = pres.gens[v.gen as usize].invertible && !pres.is_odd(v);
            let lambda = pres.rules[key].twist.clone();
            let lambda_inv = lambda.inv().map_err(|_| NcError::InvalidPresentation("twist not invertible".into()))?;
            if v_inv {
                let k = (u, Letter { inv: true, ..v });
                pres.rules.insert(k, Rule { twist: lambda_inv.clone(), correction: Vec::new() });
                derived.push((k, Derivation::RightInverse { base: *key }));
            }
            if u_inv {
                let k = (Letter { inv: true, ..u }, v);
                pres.rules.insert(k, Rule { twist: lambda_inv.clone(), correction: Vec::new() });
                derived.push((k, Derivation::LeftInverse { base: *key }));
            }
            if u_inv && v_inv {
                let k = (Letter { inv: true, ..u }, Letter { inv: true, ..v });
                pres.rules.insert(k, Rule { twist: lambda.clone(), correction: Vec::new() });
                derived.push((k, Derivation::BothInverse { base: (u, Letter { inv: true, ..v }) }));
            }
        }
        for _round in 0..16 {
            let mut changed = false;
            for (key, how) in &derived {
                let corr = pres.derive_correction(*key, how)?;
                let rule = pres.rules.get_mut(key).unwrap();
                if !same_terms(&rule.correction, &corr) {
                    rule.correction = corr;
                    changed = true;
                }
            }
            if !changed {
                return Ok(Arc::new(pres));
            }
        }
        Err(NcError::InvalidPresentation("rule corrections do not stabilize".into()))
    }
}

enum Derivation<C: Scalar> {
    Base(Vec<(Vec<Letter>, C)>),
    /// `u v^-1 = l^-1 v^-1 u - l^-1 v^-1 C v^-1`
    RightInverse { base: (Letter, Letter) },
    /// `u^-1 v = l^-1 v u^-1 - l^-1 u^-1 C u^-1`
    LeftInverse { base: (Letter, Letter) },
    /// Left-inverse derivation applied to the rule for `(u, v^-1)`.
    BothInverse { base: (Letter, Letter) },
}

fn same_terms<C: Scalar>(a: &[(Monomial, C)], b: &[(Monomial, C)]) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|((m1, c1), (m2, c2))| m1 == m2 && c1 == c2)
}

impl<C: Scalar> Presentation<C> {
    fn derive_correction(&self, key: (Letter, Letter), how: &Derivation<C>) -> Result<Vec<(Monomial, C)>, NcError> {
        let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
        let add_all = |acc: &mut BTreeMap<Monomial, C>, terms: BTreeMap<Monomial, C>| {
            for (m, c) in terms {
                match acc.get_mut(&m) {
                    Some(x) => *x = x.add(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        };
        let conj = |outer: Letter, base: (Letter, Letter), scale: &C, _acc: &mut BTreeMap<Monomial, C>| -> Result<BTreeMap<Monomial, C>, NcError> {
            let rule = &self.rules[&base];
            let mut total: BTreeMap<Monomial, C> = BTreeMap::new();
            for (m, c) in &rule.correction {
                let mut w = vec![outer];
                w.extend(self.letters_of(m));
                w.push(outer);
                let t = self.normalize_letters(w, c.mul(scale), Strategy::Leftmost)?;
                for (m2, c2) in t {
                    match total.get_mut(&m2) {
                        Some(x) => *x = x.add(&c2),
                        None => {
                            total.insert(m2, c2);
                        }
                    }
                }
            }
            Ok(total)
        };
        match how {
            Derivation::Base(words) => {
                for (w, c) in words {
                    let t = self.normalize_letters(w.clone(), c.clone(), Strategy::Leftmost)?;
                    add_all(&mut acc, t);
                }
            }
            Derivation::RightInverse { base } => {
                let scale = self.rules[base].twist.inv().unwrap().neg();
                let t = conj(key.1, *base, &scale, &mut acc)?;
                add_all(&mut acc, t);
            }
            Derivation::LeftInverse { base } | Derivation::BothInverse { base } => {
                let scale = self.rules[base].twist.inv().unwrap().neg();
                let t = conj(key.0, *base, &scale, &mut acc)?;
                add_all(&mut acc, t);
            }
        }
        Ok(acc.into_iter().filter(|(_, c)| !c.is_nil()).collect())
    }
}

impl<C: Scalar> Presentation<C> {
    /// `coeff * word` in normal form.
    pub fn normalize(self: &Arc<Self>, word: &[(&str, i64)], coeff: C) -> Result<Element<C>, NcError> {
        self.normalize_with(word, coeff, Strategy::Incremental)
    }

    pub fn normalize_with(self: &Arc<Self>, word: &[(&str, i64)], coeff: C, strategy: Strategy) -> Result<Element<C>, NcError> {
        let letters = self.letters_of_word(word)?;
        let terms = self.normalize_letters(letters, coeff, strategy)?;
        Ok(Element::from_terms(self.clone(), terms))
    }
}
