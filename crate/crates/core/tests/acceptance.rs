//! One line per acceptance criterion, pass or fail, with pinned limits.

use std::io::Write;
use std::time::{Duration, Instant};

use qsuper::report::{Report, SPOT_THRESHOLD};
use qsuper::suites::{run, spotcheck, Suite, SuiteOptions};

const SPOT_TRIALS: usize = 20;
const SPOT_SEED: u64 = 20_240_601;
const ENGINE_INSTANCES: usize = 500;

struct Outcome {
    id: u8,
    title: &'static str,
    ok: bool,
    detail: String,
}

/// Written straight to the process stdout so the lines survive output capture.
fn emit(o: &Outcome) {
    let line = format!("criterion {} [{}]: {} - {}\n", o.id, o.title, if o.ok { "PASS" } else { "FAIL" }, o.detail);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn timed(suite: Suite, opts: &SuiteOptions) -> (Report, Duration) {
    let start = Instant::now();
    let r = run(suite, opts);
    (r, start.elapsed())
}

fn exact(id: u8, title: &'static str, r: &Report, took: Duration, limit: Duration) -> Outcome {
    let (pass, fail) = r.count();
    let first = r.failures().next().map(|c| format!("; first failure {}", c.id)).unwrap_or_default();
    Outcome {
        id,
        title,
        ok: fail == 0 && pass > 0 && took < limit,
        detail: format!("{} passed, {} failed, {:.1} s (limit {} s){}", pass, fail, took.as_secs_f64(), limit.as_secs(), first),
    }
}

#[test]
fn acceptance_criteria() {
    let opts = SuiteOptions { instances: ENGINE_INSTANCES, ..SuiteOptions::default() };
    let mut outcomes = Vec::new();
    let mut reports: Vec<(Suite, Report)> = Vec::new();

    let (r, took) = timed(Suite::Section2, &opts);
    let mut o = exact(1, "defining algebra identities, n in [-6, 6]", &r, took, Duration::from_secs(10));
    let sdet_central = ["a", "d", "beta", "gamma", "a^-1", "d^-1"].iter().all(|g| r.checks.iter().any(|c| c.id == format!("sdet/central/{}", g) && c.passed()));
    o.ok &= sdet_central;
    outcomes.push(o);
    reports.push((Suite::Section2, r));

    let (r, took) = timed(Suite::Section3, &opts);
    outcomes.push(exact(2, "powers of T, n = 1..8", &r, took, Duration::from_secs(30)));
    reports.push((Suite::Section3, r));

    let (r, took) = timed(Suite::Appendix, &opts);
    outcomes.push(exact(3, "induction recurrences, k = 1..6", &r, took, Duration::from_secs(30)));
    reports.push((Suite::Appendix, r));

    let (r, took) = timed(Suite::Series, &opts);
    let mut o = exact(4, "series on 5 rays, N = 6, K = 12", &r, took, Duration::from_secs(60 * 5));
    let ray_ms: Vec<u64> = r.params["ray_ms"].as_object().map(|m| m.values().filter_map(|v| v.as_u64()).collect()).unwrap_or_default();
    let slowest = ray_ms.iter().copied().max().unwrap_or(u64::MAX);
    o.ok &= ray_ms.len() == 5 && slowest < 60_000;
    o.detail.push_str(&format!(", slowest ray {:.1} s (limit 60 s per ray)", slowest as f64 / 1000.0));
    outcomes.push(o);

    let special: Vec<_> = r.checks.iter().filter(|c| c.id.contains("(1,1)") && c.id.contains("one-parameter")).collect();
    let ok = special.len() >= 5 && special.iter().all(|c| c.passed());
    outcomes.push(Outcome { id: 6, title: "one-parameter specialization on ray (1,1)", ok, detail: format!("{} checks, {} passed", special.len(), special.iter().filter(|c| c.passed()).count()) });
    reports.push((Suite::Series, r));

    let (r, took) = timed(Suite::Mside, &opts);
    let mut o = exact(5, "exponent algebra, n = 1..8", &r, took, Duration::from_secs(60));
    o.detail.push_str(&format!(", F_n placement {}", r.params["mside-powers"]["F_n placement"]["n=8"]));
    outcomes.push(o);
    reports.push((Suite::Mside, r));

    let (r, took) = timed(Suite::Engine, &opts);
    let mut o = exact(7, "engine properties, 500 instances each", &r, took, Duration::from_secs(60));
    for prop in ["idempotence/", "confluence/", "ring/", "parity/", "commuting/"] {
        let n = r.checks.iter().filter(|c| c.id.starts_with(prop)).map(|c| c.id.split('/').nth(1).unwrap_or("").to_string()).collect::<std::collections::BTreeSet<_>>().len();
        o.ok &= n >= ENGINE_INSTANCES;
    }
    outcomes.push(o);
    reports.push((Suite::Engine, r));

    let mut worst = 0.0f64;
    let mut worst_id = None;
    let mut evaluations = 0;
    let mut skipped = 0;
    for (suite, r) in &reports {
        let s = spotcheck(*suite, r, SPOT_TRIALS, SPOT_SEED);
        evaluations += s.evaluations;
        skipped += s.skipped.len();
        if s.max_deviation > worst || !s.passed() {
            worst = worst.max(s.max_deviation);
            worst_id = s.worst_check.clone();
        }
    }
    outcomes.push(Outcome {
        id: 8,
        title: "numeric spot checks, 20 assignments",
        ok: worst < SPOT_THRESHOLD && evaluations > 0,
        detail: format!("{} evaluations, {} pole-guarded skips, max relative deviation {:e} (limit {:e}){}", evaluations, skipped, worst, SPOT_THRESHOLD, worst_id.map(|w| format!(" at {}", w)).unwrap_or_default()),
    });

    outcomes.sort_by_key(|o| o.id);
    for o in &outcomes {
        emit(o);
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.ok).map(|o| o.id).collect();
    assert!(failed.is_empty(), "criteria failed: {:?}", failed);
}
