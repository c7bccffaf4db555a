//! `qsuper`: normal forms and verification suites from the command line.
//!
//! Exit codes: 0 when everything passes, 1 when a check fails, 2 on usage
//! or input errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsuper::dsl::{self, Algebra, Context, MsideAlgebra, SeriesAlgebra, TsideAlgebra};
use qsuper::report::{Report, SideValue, SpotReport, POLE_EPSILON};
use qsuper::series::element::AtWeight;
use qsuper::series::{SeriesConfig, SeriesContext};
use qsuper::suites::{self, parse_ray, Suite, SuiteOptions};
use qsuper::tside::TSide;

#[derive(Parser)]
#[command(name = "qsuper", version, about = "Exact arithmetic and identity checks for GL_{p,q}(1|1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of an expression.
    Normalize {
        #[command(flatten)]
        expr: ExprArgs,
    },
    /// Evaluate the normal form numerically, one value per monomial.
    Eval {
        #[command(flatten)]
        expr: ExprArgs,
        /// Symbol values, e.g. `p=2,q=1/3` (t for the series context).
        #[arg(long, value_parser = parse_assignment)]
        at: BTreeMap<String, f64>,
    },
    /// Run a verification suite.
    Suite {
        #[arg(value_parser = parse_suite)]
        name: Suite,
        #[command(flatten)]
        opts: SuiteArgs,
        /// Print every check, not only failures.
        #[arg(long)]
        verbose: bool,
    },
    /// Re-evaluate a suite's identities at random numeric points.
    Spotcheck {
        #[arg(value_parser = parse_suite)]
        name: Suite,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[command(flatten)]
        opts: SuiteArgs,
    },
}

#[derive(Args)]
struct ExprArgs {
    #[arg(long = "ctx", value_parser = parse_context)]
    ctx: Context,
    expr: String,
    /// Series context: truncation weight.
    #[arg(long = "N", default_value_t = 6)]
    n: u32,
    /// Series context: order of the expansions in t.
    #[arg(long = "K", default_value_t = 12)]
    k: u32,
    /// Series context: ray `alpha,beta`.
    #[arg(long, default_value = "1,1")]
    ray: String,
}

#[derive(Args)]
struct SuiteArgs {
    /// Lower end of the n range (section2).
    #[arg(long, default_value_t = -6, allow_hyphen_values = true)]
    n_min: i64,
    /// Upper end of the n range (section2) or largest power (section3, mside).
    #[arg(long)]
    n_max: Option<i64>,
    #[arg(long, default_value_t = 6)]
    k_max: u32,
    #[arg(long = "N", default_value_t = 6)]
    series_n: u32,
    #[arg(long = "K", default_value_t = 12)]
    series_k: u32,
    /// Rays `alpha,beta`, e.g. `--rays 1,1 1,2`.
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    rays: Vec<String>,
    /// Random instances per engine property.
    #[arg(long, default_value_t = 500)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_context(s: &str) -> Result<Context, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn parse_assignment(s: &str) -> Result<BTreeMap<String, f64>, String> {
    s.split(',')
        .filter(|kv| !kv.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("`{}` is not name=value", kv))?;
            let v = v.trim();
            let x = match v.split_once('/') {
                Some((n, d)) => n.trim().parse::<f64>().ok().zip(d.trim().parse::<f64>().ok()).map(|(n, d)| n / d),
                None => v.parse::<f64>().ok(),
            };
            Ok((k.trim().to_string(), x.ok_or_else(|| format!("`{}` is not a number", v))?))
        })
        .collect()
}

/// Usage or input error: message already formatted.
struct Usage(String);

impl SuiteArgs {
    fn options(&self, suite: Suite) -> Result<SuiteOptions, Usage> {
        let mut o = SuiteOptions { k_max: self.k_max, series_n: self.series_n, series_k: self.series_k, instances: self.instances, seed: self.seed, ..SuiteOptions::default() };
        match suite {
            Suite::Section2 | Suite::All => o.n_range = (self.n_min, self.n_max.unwrap_or(6)),
            _ => {}
        }
        if let Some(n) = self.n_max {
            if suite != Suite::Section2 {
                o.n_max = Some(u32::try_from(n).map_err(|_| Usage("--n-max must be nonnegative for this suite".into()))?);
            }
        }
        if o.n_range.0 > o.n_range.1 {
            return Err(Usage(format!("empty n range [{}, {}]", o.n_range.0, o.n_range.1)));
        }
        if !self.rays.is_empty() {
            o.rays = self.rays.iter().map(|r| parse_ray(r)).collect::<Result<_, _>>().map_err(Usage)?;
        }
        if matches!(suite, Suite::Series | Suite::All) {
            for (a, b) in &o.rays {
                SeriesConfig::new(o.series_n, o.series_k, a.clone(), b.clone()).map_err(|e| Usage(e.to_string()))?;
            }
        }
        Ok(o)
    }
}

fn series_algebra(e: &ExprArgs) -> Result<SeriesAlgebra, Usage> {
    let (a, b) = parse_ray(&e.ray).map_err(Usage)?;
    let cfg = SeriesConfig::new(e.n, e.k, a, b).map_err(|err| Usage(err.to_string()))?;
    let ctx = SeriesContext::new(&cfg).map_err(|err| Usage(err.to_string()))?;
    Ok(SeriesAlgebra { affine: ctx.affine().clone(), q: ctx.q().clone(), p: ctx.p().clone() })
}

fn evaluate<A: Algebra>(e: &ExprArgs, alg: &A, show: impl Fn(&A::Value) -> Result<String, Usage>) -> Result<String, Usage> {
    let tree = dsl::parse(&e.expr, e.ctx).map_err(|err| Usage(err.to_string()))?;
    let v = dsl::eval(&tree, alg).map_err(|err| Usage(err.to_string()))?;
    show(&v)
}

fn numeric<V: SideValue>(v: &V, at: &BTreeMap<String, f64>) -> Result<String, Usage> {
    let terms = v.numeric_terms(at, POLE_EPSILON).map_err(|e| Usage(e.to_string()))?;
    if terms.is_empty() {
        return Ok("0".into());
    }
    Ok(terms.iter().map(|(m, x)| format!("{}\t{}", m, x)).collect::<Vec<_>>().join("\n"))
}

fn write_json(path: &Option<PathBuf>, value: &impl serde::Serialize) -> Result<(), Usage> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(value).map_err(|e| Usage(e.to_string()))?;
        std::fs::write(p, text + "\n").map_err(|e| Usage(format!("cannot write {}: {}", p.display(), e)))?;
    }
    Ok(())
}

fn print_report(r: &Report, verbose: bool) {
    if verbose {
        print!("{}", r.summary());
        return;
    }
    let (p, f) = r.count();
    println!("suite {}: {} passed, {} failed ({} ms)", r.suite, p, f, r.elapsed_ms);
    for c in r.failures() {
        println!("  FAIL {} [{}]", c.id, c.anchor);
        if let Some(w) = &c.witness {
            println!("       witness: {}", w);
        }
    }
}

fn print_spot(s: &SpotReport) {
    println!(
        "spotcheck {}: {} checks, {} evaluations, max relative deviation {:e} (threshold {:e}), {} skipped near poles",
        s.suite, s.checks_evaluated, s.evaluations, s.max_deviation, s.threshold, s.skipped.len()
    );
    if let Some(w) = &s.worst_check {
        println!("  worst check: {}", w);
    }
    for k in &s.skipped {
        println!("  skipped {} (trial {}): {}", k.check, k.trial, k.reason);
    }
}

fn run(cli: Cli) -> Result<bool, Usage> {
    match cli.command {
        Command::Normalize { expr } => {
            let out = match expr.ctx {
                Context::Tside => evaluate(&expr, &TsideAlgebra(TSide::shared()), |v| Ok(v.to_dsl()))?,
                Context::Mside => evaluate(&expr, &MsideAlgebra, |v| Ok(v.to_dsl()))?,
                Context::Series => evaluate(&expr, &series_algebra(&expr)?, |v| Ok(v.to_dsl()))?,
            };
            println!("{}", out);
            Ok(true)
        }
        Command::Eval { expr, at } => {
            let out = match expr.ctx {
                Context::Tside => evaluate(&expr, &TsideAlgebra(TSide::shared()), |v| numeric(v, &at))?,
                Context::Mside => evaluate(&expr, &MsideAlgebra, |v| numeric(v, &at))?,
                Context::Series => evaluate(&expr, &series_algebra(&expr)?, |v| numeric(&AtWeight { value: v.clone(), target: 0 }, &at))?,
            };
            println!("{}", out);
            Ok(true)
        }
        Command::Suite { name, opts, verbose } => {
            let report = suites::run(name, &opts.options(name)?);
            print_report(&report, verbose);
            write_json(&opts.json, &report)?;
            Ok(report.all_passed())
        }
        Command::Spotcheck { name, trials, opts } => {
            let report = suites::run(name, &opts.options(name)?);
            let spot = suites::spotcheck(name, &report, trials as usize, opts.seed);
            print_spot(&spot);
            write_json(&opts.json, &spot)?;
            Ok(spot.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
