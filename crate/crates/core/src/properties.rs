//! Randomized properties of the rewriting engine on the defining algebra
//! `a, d, beta, gamma` over `Q(p, q)`.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::coeff::{RatFunc, Scalar};
use crate::nc::{Element, ElementParity, Monomial, NcError, Strategy};
use crate::report::{Check, Report};
use crate::tside::TSide;

type Word = Vec<(&'static str, i64)>;

const EVENS: [&str; 2] = ["a", "d"];
const ODDS: [&str; 2] = ["beta", "gamma"];

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.35) {
                (*ODDS.choose(rng).unwrap(), 1)
            } else {
                let k = rng.gen_range(-3..=3);
                (*EVENS.choose(rng).unwrap(), if k == 0 { 1 } else { k })
            }
        })
        .collect()
}

fn random_scalar(t: &TSide, rng: &mut ChaCha8Rng) -> RatFunc {
    let c = t.int(rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 });
    let c = c.mul(&t.sym("p", rng.gen_range(-1..=1))).mul(&t.sym("q", rng.gen_range(-1..=1)));
    if rng.gen_bool(0.2) {
        c.add(&t.int(1))
    } else {
        c
    }
}

fn random_element(t: &TSide, rng: &mut ChaCha8Rng) -> Result<Element<RatFunc>, NcError> {
    let mut e = Element::zero(t.presentation());
    for _ in 0..rng.gen_range(1..=2) {
        let w = random_word(rng, 3);
        e = e.try_add(&t.presentation().normalize(&w, random_scalar(t, rng))?)?;
    }
    Ok(e)
}

/// The word `a^i d^j beta^e gamma^f` spelling a normal monomial.
fn word_of(t: &TSide, m: &Monomial) -> Vec<(String, i64)> {
    let gens = t.presentation().generators();
    let n_even = t.presentation().n_even();
    let mut w: Vec<(String, i64)> = m.evens().iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, &k)| (gens[i].name.clone(), k as i64)).collect();
    for j in 0..t.presentation().n_odd() {
        if m.odds() & (1 << j) != 0 {
            w.push((gens[n_even + j].name.clone(), 1));
        }
    }
    w
}

fn normalize_owned(t: &TSide, w: &[(String, i64)], c: RatFunc, s: Strategy) -> Result<Element<RatFunc>, NcError> {
    let borrowed: Vec<(&str, i64)> = w.iter().map(|(n, k)| (n.as_str(), *k)).collect();
    t.presentation().normalize_with(&borrowed, c, s)
}

fn text(w: &[(&str, i64)]) -> String {
    w.iter().map(|(n, k)| if *k == 1 { n.to_string() } else { format!("{}^{}", n, k) }).collect::<Vec<_>>().join("*")
}

fn combine(l: ElementParity, r: ElementParity) -> ElementParity {
    use ElementParity::*;
    match (l, r) {
        (Even, Even) | (Odd, Odd) => Even,
        (Even, Odd) | (Odd, Even) => Odd,
        _ => Mixed,
    }
}

fn run(t: &TSide, rng: &mut ChaCha8Rng, i: usize, report: &mut Report) -> Result<(), NcError> {
    let one = t.int(1);
    // idempotence: every normal monomial is a fixed point
    let w = random_word(rng, 5);
    let e = t.presentation().normalize(&w, one.clone())?;
    let mut refolded = Element::zero(t.presentation());
    let mut fixed = true;
    for (m, c) in e.terms() {
        let again = normalize_owned(t, &word_of(t, m), c.clone(), Strategy::Incremental)?;
        fixed &= again == Element::monomial(t.presentation(), m.clone(), c.clone());
        refolded = refolded.try_add(&again)?;
    }
    report.push(Check::condition(format!("idempotence/{}", i), "normal forms are fixed by normalization", fixed, Some(text(&w))));
    report.push(Check::identity(format!("idempotence/{}/sum", i), "normal forms are fixed by normalization", refolded, e.clone()));

    // confluence: leftmost, rightmost and incremental agree
    let w = random_word(rng, 6);
    let c = random_scalar(t, rng);
    let l = t.presentation().normalize_with(&w, c.clone(), Strategy::Leftmost)?;
    let r = t.presentation().normalize_with(&w, c.clone(), Strategy::Rightmost)?;
    let inc = t.presentation().normalize_with(&w, c, Strategy::Incremental)?;
    let anchor = "rewriting order does not change the normal form";
    report.push(Check::identity(format!("confluence/{}/rightmost", i), anchor, l.clone(), r));
    report.push(Check::identity(format!("confluence/{}/incremental", i), anchor, l, inc));

    // ring axioms
    let (x, y, z) = (random_element(t, rng)?, random_element(t, rng)?, random_element(t, rng)?);
    let anchor = "normal-form product is associative, distributive and unital";
    report.push(Check::identity(format!("ring/{}/associative", i), anchor, x.try_mul(&y)?.try_mul(&z)?, x.try_mul(&y.try_mul(&z)?)?));
    report.push(Check::identity(format!("ring/{}/left-distributive", i), anchor, x.try_mul(&y.try_add(&z)?)?, x.try_mul(&y)?.try_add(&x.try_mul(&z)?)?));
    report.push(Check::identity(format!("ring/{}/right-distributive", i), anchor, x.try_add(&y)?.try_mul(&z)?, x.try_mul(&z)?.try_add(&y.try_mul(&z)?)?));
    let unit = Element::one(t.presentation());
    report.push(Check::condition(format!("ring/{}/unit", i), anchor, unit.try_mul(&x)? == x && x.try_mul(&unit)? == x, None));

    // parity grading on homogeneous words
    let (u, v) = (random_word(rng, 3), random_word(rng, 3));
    let (eu, ev) = (t.presentation().normalize(&u, one.clone())?, t.presentation().normalize(&v, one.clone())?);
    let prod = eu.try_mul(&ev)?;
    let ok = prod.is_zero() || prod.parity() == combine(eu.parity(), ev.parity());
    report.push(Check::condition(format!("parity/{}", i), "parity is additive under products", ok, Some(format!("{} * {}", text(&u), text(&v)))));

    // commuting quantities: a^n and d^m commute once beta (or gamma) is in front
    let (n, m) = (rng.gen_range(-4..=4i64), rng.gen_range(-4..=4i64));
    let odd = *ODDS.choose(rng).unwrap();
    let lhs = t.presentation().normalize(&[(odd, 1), ("a", n), ("d", m)], one.clone())?;
    let rhs = t.presentation().normalize(&[(odd, 1), ("d", m), ("a", n)], one.clone())?;
    report.push(Check::identity(format!("commuting/{}/{}", i, odd), "a^n and d^m commute when multiplied by beta or gamma", lhs, rhs));
    Ok(())
}

/// `instances` random draws of each property, deterministic in `seed`.
pub fn verify_engine(instances: usize, seed: u64) -> Report {
    let start = Instant::now();
    let t = TSide::shared();
    let mut report = Report::new("engine", json!({ "instances": instances, "seed": seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        if let Err(e) = run(t, &mut rng, i, &mut report) {
            report.push(Check::error(format!("engine/{}", i), "randomized engine properties", e));
        }
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let r = verify_engine(20, 7);
        assert!(r.all_passed(), "{:?}", r.failures().take(3).collect::<Vec<_>>());
        assert_eq!(r.count().0, 20 * 10);
    }
}
