//! Named verification suites with their default parameters, shared by the
//! command line and the acceptance tests.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::BigRational;
use serde_json::json;

use crate::report::{spot_check, Report, SpotReport, SymbolRange};
use crate::series;
use crate::tside::TSide;
use crate::{mside, properties};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Section2,
    Section3,
    Appendix,
    Series,
    Mside,
    Engine,
    All,
}

impl Suite {
    pub const ALL_PARTS: [Suite; 6] = [Suite::Section2, Suite::Section3, Suite::Appendix, Suite::Series, Suite::Mside, Suite::Engine];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Section2 => "section2",
            Suite::Section3 => "section3",
            Suite::Appendix => "appendix",
            Suite::Series => "series",
            Suite::Mside => "mside",
            Suite::Engine => "engine",
            Suite::All => "all",
        }
    }

    /// Numeric ranges for the symbols appearing in this suite's identities.
    pub fn spot_ranges(self) -> Vec<SymbolRange> {
        match self {
            Suite::Section2 | Suite::Section3 | Suite::Appendix | Suite::Engine => TSide::spot_ranges(),
            Suite::Series => series::spot_ranges(),
            Suite::Mside => mside::spot_ranges(),
            Suite::All => Vec::new(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [Suite::All].into_iter().chain(Suite::ALL_PARTS).find(|x| x.name() == s).ok_or_else(|| format!("unknown suite `{}`", s))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// `n` range of the defining-algebra identities.
    pub n_range: (i64, i64),
    /// Largest power for section3 and the M-side.
    pub n_max: Option<u32>,
    pub k_max: u32,
    pub series_n: u32,
    pub series_k: u32,
    pub rays: Vec<(BigRational, BigRational)>,
    pub instances: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { n_range: (-6, 6), n_max: None, k_max: 6, series_n: 6, series_k: 12, rays: series::default_rays(), instances: 500, seed: 1 }
    }
}

impl SuiteOptions {
    fn n_max_or(&self, default: u32) -> u32 {
        self.n_max.unwrap_or(default)
    }
}

/// Runs one suite (or all of them, merged).
pub fn run(suite: Suite, opts: &SuiteOptions) -> Report {
    let t = TSide::shared();
    match suite {
        Suite::Section2 => t.verify_defining(opts.n_range.0, opts.n_range.1),
        Suite::Section3 => t.verify_powers(opts.n_max_or(8) as i64),
        Suite::Appendix => t.verify_recurrences(opts.k_max as i64),
        Suite::Series => series::verify_series(opts.series_n, opts.series_k, &opts.rays),
        Suite::Mside => mside::verify_mside(opts.n_max_or(8)),
        Suite::Engine => properties::verify_engine(opts.instances, opts.seed),
        Suite::All => {
            let start = Instant::now();
            let parts: Vec<Report> = Suite::ALL_PARTS
                .iter()
                .map(|s| {
                    let mut r = run(*s, opts);
                    for c in &mut r.checks {
                        c.id = format!("{}/{}", s.name(), c.id);
                    }
                    r
                })
                .collect();
            let mut r = Report::merge("all", parts);
            r.elapsed_ms = start.elapsed().as_millis() as u64;
            r
        }
    }
}

/// Spot checks of every identity in `report`, which must come from `suite`.
/// For `all`, the parts are checked separately and the worst result kept.
pub fn spotcheck(suite: Suite, report: &Report, trials: usize, seed: u64) -> SpotReport {
    if suite != Suite::All {
        return spot_check(report, &suite.spot_ranges(), trials, seed);
    }
    let mut acc: Option<SpotReport> = None;
    for part in Suite::ALL_PARTS {
        let prefix = format!("{}/", part.name());
        let sub = Report { suite: part.name().into(), params: json!({}), checks: report.with_prefix(&prefix).cloned().collect(), elapsed_ms: 0 };
        let s = spot_check(&sub, &part.spot_ranges(), trials, seed);
        acc = Some(match acc {
            None => s,
            Some(mut a) => {
                a.checks_evaluated += s.checks_evaluated;
                a.evaluations += s.evaluations;
                if s.max_deviation > a.max_deviation {
                    a.max_deviation = s.max_deviation;
                    a.worst_check = s.worst_check;
                }
                a.skipped.extend(s.skipped);
                a
            }
        });
    }
    let mut out = acc.expect("at least one part");
    out.suite = "all".into();
    out
}

/// `"a,b"` with integer or `n/m` components.
pub fn parse_ray(s: &str) -> Result<(BigRational, BigRational), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("ray `{}` is not of the form a,b", s))?;
    let num = |t: &str| t.trim().parse::<BigRational>().map_err(|_| format!("`{}` is not a rational number", t.trim()));
    Ok((num(a)?, num(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_parsing() {
        let (a, b) = parse_ray("1,-3").unwrap();
        assert_eq!((a.to_string(), b.to_string()), ("1".to_string(), "-3".to_string()));
        assert_eq!(parse_ray("1/2, 2").unwrap().0.to_string(), "1/2");
        assert!(parse_ray("1").is_err());
        assert!(parse_ray("x,1").is_err());
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL_PARTS.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("section9".parse::<Suite>().is_err());
    }
}
