use qsuper::dsl::{normalize, Context};
use qsuper::series::default_rays;
use qsuper::suites::{run, spotcheck, Suite, SuiteOptions};

fn small() -> SuiteOptions {
    SuiteOptions { n_range: (-2, 2), n_max: Some(3), k_max: 2, series_n: 2, series_k: 4, rays: default_rays()[..2].to_vec(), instances: 20, seed: 3 }
}

#[test]
fn every_suite_passes_at_small_parameters() {
    let opts = small();
    let all = run(Suite::All, &opts);
    assert!(all.all_passed(), "{:?}", all.failures().take(3).collect::<Vec<_>>());
    for part in Suite::ALL_PARTS {
        assert!(all.with_prefix(&format!("{}/", part.name())).count() > 0, "no checks from {}", part);
    }
    let spot = spotcheck(Suite::All, &all, 3, 11);
    assert!(spot.passed() && spot.evaluations > 0);
}

#[test]
fn witnesses_of_a_wrong_identity_reparse() {
    // d*a is not a*d: the difference is the correction term
    let w = normalize("d*a - a*d", Context::Tside).unwrap();
    assert_eq!(w, "(q - p^-1)*beta*gamma");
    assert_eq!(normalize(&w, Context::Tside).unwrap(), w);
}

#[test]
fn anchors_are_descriptive() {
    let r = run(Suite::Mside, &small());
    for a in r.anchors() {
        assert!(!a.is_empty() && !a.chars().next().unwrap().is_ascii_digit(), "{}", a);
    }
}
