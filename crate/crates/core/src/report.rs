//! Structured verification outcomes and the numeric cross-check layer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeff::{Assignment, EvalError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A value that can take part in an identity check.
pub trait SideValue: Clone + Send + Sync + 'static {
    /// `self - other`, or an error text if the two are not comparable.
    fn difference(&self, other: &Self) -> Result<Self, String>;
    fn is_zero_value(&self) -> bool;
    fn to_dsl(&self) -> String;
    /// Numeric values of the coefficients, keyed by a basis label.
    fn numeric_terms(&self, assignment: &Assignment, epsilon: f64) -> Result<BTreeMap<String, f64>, EvalError>;
}

/// Two sides of a checked identity, kept for numeric re-evaluation.
pub trait Comparison: Send + Sync {
    fn deviation(&self, assignment: &Assignment, epsilon: f64) -> Result<f64, EvalError>;
}

struct Sides<E: SideValue> {
    lhs: E,
    rhs: E,
}

impl<E: SideValue> Comparison for Sides<E> {
    fn deviation(&self, assignment: &Assignment, epsilon: f64) -> Result<f64, EvalError> {
        let l = self.lhs.numeric_terms(assignment, epsilon)?;
        let r = self.rhs.numeric_terms(assignment, epsilon)?;
        let keys: BTreeSet<&String> = l.keys().chain(r.keys()).collect();
        let mut scale: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for k in keys {
            let a = l.get(k).copied().unwrap_or(0.0);
            let b = r.get(k).copied().unwrap_or(0.0);
            if !a.is_finite() || !b.is_finite() {
                return Err(EvalError::NearPole);
            }
            scale = scale.max(a.abs()).max(b.abs());
            worst = worst.max((a - b).abs());
        }
        Ok(if worst == 0.0 { 0.0 } else { worst / scale.max(f64::MIN_POSITIVE) })
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub witness: Option<String>,
    #[serde(skip)]
    sides: Option<Arc<dyn Comparison>>,
}

impl fmt::Debug for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Check")
            .field("id", &self.id)
            .field("anchor", &self.anchor)
            .field("status", &self.status)
            .field("witness", &self.witness)
            .finish()
    }
}

impl Check {
    /// Exact comparison of `lhs` and `rhs`; the witness is the nonzero difference.
    pub fn identity<E: SideValue>(id: impl Into<String>, anchor: impl Into<String>, lhs: E, rhs: E) -> Self {
        let (status, witness) = match lhs.difference(&rhs) {
            Ok(d) if d.is_zero_value() => (Status::Pass, None),
            Ok(d) => (Status::Fail, Some(d.to_dsl())),
            Err(e) => (Status::Fail, Some(e)),
        };
        Check { id: id.into(), anchor: anchor.into(), status, witness, sides: Some(Arc::new(Sides { lhs, rhs })) }
    }

    /// `value == 0` exactly.
    pub fn vanishes<E: SideValue>(id: impl Into<String>, anchor: impl Into<String>, value: E) -> Self {
        let (status, witness) = if value.is_zero_value() { (Status::Pass, None) } else { (Status::Fail, Some(value.to_dsl())) };
        let zero = value.difference(&value).unwrap_or_else(|_| value.clone());
        Check { id: id.into(), anchor: anchor.into(), status, witness, sides: Some(Arc::new(Sides { lhs: value, rhs: zero })) }
    }

    /// A check without algebraic sides (e.g. a precision or structural condition).
    pub fn condition(id: impl Into<String>, anchor: impl Into<String>, ok: bool, witness: Option<String>) -> Self {
        Check {
            id: id.into(),
            anchor: anchor.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: if ok { None } else { witness.or_else(|| Some("condition violated".into())) },
            sides: None,
        }
    }

    /// A failure raised by an error while building the check.
    pub fn error(id: impl Into<String>, anchor: impl Into<String>, err: impl fmt::Display) -> Self {
        Check { id: id.into(), anchor: anchor.into(), status: Status::Fail, witness: Some(format!("error: {}", err)), sides: None }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn has_sides(&self) -> bool {
        self.sides.is_some()
    }

    pub fn deviation(&self, assignment: &Assignment, epsilon: f64) -> Option<Result<f64, EvalError>> {
        self.sides.as_ref().map(|s| s.deviation(assignment, epsilon))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub params: serde_json::Value,
    pub checks: Vec<Check>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(suite: impl Into<String>, params: serde_json::Value) -> Self {
        Report { suite: suite.into(), params, checks: Vec::new(), elapsed_ms: 0 }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn count(&self) -> (usize, usize) {
        let pass = self.checks.iter().filter(|c| c.passed()).count();
        (pass, self.checks.len() - pass)
    }

    /// Checks whose id starts with `prefix`.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// Distinct anchors, in first-seen order.
    pub fn anchors(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.checks.iter().filter(|c| seen.insert(c.anchor.clone())).map(|c| c.anchor.clone()).collect()
    }

    pub fn merge(suite: &str, parts: Vec<Report>) -> Report {
        let mut params = serde_json::Map::new();
        let mut checks = Vec::new();
        let mut elapsed = 0;
        for r in parts {
            params.insert(r.suite.clone(), r.params);
            checks.extend(r.checks);
            elapsed += r.elapsed_ms;
        }
        Report { suite: suite.to_string(), params: serde_json::Value::Object(params), checks, elapsed_ms: elapsed }
    }

    pub fn summary(&self) -> String {
        let (p, f) = self.count();
        let mut s = format!("suite {}: {} passed, {} failed ({} ms)\n", self.suite, p, f, self.elapsed_ms);
        for c in &self.checks {
            let mark = if c.passed() { "ok  " } else { "FAIL" };
            s.push_str(&format!("  {} {} [{}]", mark, c.id, c.anchor));
            if let Some(w) = &c.witness {
                s.push_str(&format!("\n       witness: {}", w));
            }
            s.push('\n');
        }
        s
    }
}

/// How to draw one numeric value for a symbol.
#[derive(Clone, Debug)]
pub struct SymbolRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    /// Values with magnitude below this are redrawn.
    pub min_abs: f64,
    pub random_sign: bool,
}

impl SymbolRange {
    pub fn new(name: &str, lo: f64, hi: f64) -> Self {
        SymbolRange { name: name.to_string(), lo, hi, min_abs: 0.0, random_sign: false }
    }

    pub fn signed(name: &str, lo: f64, hi: f64) -> Self {
        SymbolRange { name: name.to_string(), lo, hi, min_abs: 0.0, random_sign: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpotSkip {
    pub check: String,
    pub trial: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpotReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
    pub checks_evaluated: usize,
    pub evaluations: usize,
    pub max_deviation: f64,
    pub worst_check: Option<String>,
    pub skipped: Vec<SpotSkip>,
}

impl SpotReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.threshold
    }
}

pub const SPOT_THRESHOLD: f64 = 1e-9;
pub const POLE_EPSILON: f64 = 1e-6;

/// Re-evaluates every identity of `report` at `trials` random assignments.
/// Evaluations that come too close to a pole are skipped and logged.
pub fn spot_check(report: &Report, ranges: &[SymbolRange], trials: usize, seed: u64) -> SpotReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignments: Vec<Assignment> = (0..trials)
        .map(|_| {
            ranges
                .iter()
                .map(|r| {
                    let v = loop {
                        let mut v = rng.gen_range(r.lo..r.hi);
                        if r.random_sign && rng.gen_bool(0.5) {
                            v = -v;
                        }
                        if v.abs() >= r.min_abs {
                            break v;
                        }
                    };
                    (r.name.clone(), v)
                })
                .collect()
        })
        .collect();
    let mut out = SpotReport {
        suite: report.suite.clone(),
        trials,
        seed,
        threshold: SPOT_THRESHOLD,
        checks_evaluated: 0,
        evaluations: 0,
        max_deviation: 0.0,
        worst_check: None,
        skipped: Vec::new(),
    };
    for c in &report.checks {
        if !c.has_sides() {
            continue;
        }
        out.checks_evaluated += 1;
        for (i, asg) in assignments.iter().enumerate() {
            match c.deviation(asg, POLE_EPSILON).unwrap() {
                Ok(dev) => {
                    out.evaluations += 1;
                    if dev > out.max_deviation || dev.is_nan() {
                        out.max_deviation = if dev.is_nan() { f64::INFINITY } else { dev };
                        out.worst_check = Some(c.id.clone());
                    }
                }
                Err(e) => out.skipped.push(SpotSkip { check: c.id.clone(), trial: i, reason: e.to_string() }),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone)]
    struct Num(f64);

    impl SideValue for Num {
        fn difference(&self, o: &Self) -> Result<Self, String> {
            Ok(Num(self.0 - o.0))
        }
        fn is_zero_value(&self) -> bool {
            self.0 == 0.0
        }
        fn to_dsl(&self) -> String {
            self.0.to_string()
        }
        fn numeric_terms(&self, a: &Assignment, _e: f64) -> Result<BTreeMap<String, f64>, EvalError> {
            let p = a["p"];
            if (p - 1.0).abs() < 1e-3 {
                return Err(EvalError::NearPole);
            }
            Ok([("1".to_string(), self.0 * p)].into_iter().collect())
        }
    }

    #[test]
    fn report_json_schema() {
        let mut r = Report::new("demo", serde_json::json!({"n": 1}));
        r.push(Check::identity("one", "(1)", Num(1.0), Num(1.0)));
        r.push(Check::identity("two", "(2)", Num(1.0), Num(2.0)));
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["checks"][0]["status"], "pass");
        assert_eq!(v["checks"][0]["witness"], serde_json::Value::Null);
        assert_eq!(v["checks"][1]["status"], "fail");
        assert_eq!(v["checks"][1]["witness"], "-1");
        assert!(!r.all_passed());
    }

    #[test]
    fn spot_check_is_deterministic() {
        let mut r = Report::new("demo", serde_json::json!({}));
        r.push(Check::identity("one", "(1)", Num(1.0), Num(1.0)));
        let ranges = [SymbolRange::new("p", 0.999, 1.5)];
        let a = spot_check(&r, &ranges, 20, 7);
        let b = spot_check(&r, &ranges, 20, 7);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.passed());
    }
}
