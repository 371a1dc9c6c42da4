use crate::descriptor::{parse_extension, parse_ring, parse_tower};
use crate::error::{CliError, CliResult};
use crate::eval::{parse_element, parse_etale_form, parse_form, parse_series, parse_series_polynomial};
use crate::report::{LogEntry, Report};
use cartier_core::suites::run_named;
use cartier_core::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::Read;
use std::time::Instant;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cartier", version, about = "Differential forms, H_p classes, traces and Weierstrass division in characteristic p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Default Laurent precision of the tower, or the truncation degree D
    /// of a series ring.
    #[arg(long, global = true)]
    pub precision: Option<i64>,

    /// Include the reduction log.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct TowerArg {
    /// Tower descriptor, e.g. "GF(4)((t1))((t2)) P=20" or "Frac GF(3)[b1,b2]".
    #[arg(long)]
    pub tower: String,
}

#[derive(Debug, Args)]
pub struct RingArg {
    /// Series ring descriptor, e.g. "GF(5)[[u]][[X,T]] D=12".
    #[arg(long)]
    pub ring: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Schedule {
    WeightByWeight,
    SuccessiveApproximation,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class of a top form in H_p^(r+1).
    HpClass {
        #[command(flatten)]
        tower: TowerArg,
        /// Top-degree form; "-" reads it from stdin.
        #[arg(long)]
        form: String,
    },
    /// Class of an element in H_p^1 = k / wp(k).
    Hp1Class {
        #[command(flatten)]
        tower: TowerArg,
        /// Element; "-" reads it from stdin.
        #[arg(long)]
        element: String,
    },
    /// Class of a top form modulo exact forms.
    ReduceForm {
        #[command(flatten)]
        tower: TowerArg,
        #[arg(long)]
        form: String,
    },
    /// Trace of a form along a radicial ("a^p = b") or etale ("y: f(y)")
    /// extension of the tower.
    Trace {
        #[command(flatten)]
        tower: TowerArg,
        #[arg(long)]
        extension: String,
        /// Form over the extension.
        #[arg(long)]
        form: String,
    },
    /// Weierstrass division g = q f + r.
    Wdiv {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// Regularity order of f; computed when omitted.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value_t = Schedule::WeightByWeight)]
        schedule: Schedule,
    },
    /// Weierstrass preparation f = u P.
    Wprep {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        f: String,
    },
    /// Change of variables X_i -> X_i + T^(N_i) making f regular in T.
    Wreg {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        f: String,
    },
    /// The solution in the maximal ideal of b - b^p = a.
    AsSolve {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        a: String,
        /// Degree to which the solution is reported; defaults to D.
        #[arg(long)]
        order: Option<u32>,
    },
    /// Newton lift of a simple root of a polynomial over the ring.
    Hensel {
        #[command(flatten)]
        ring: RingArg,
        /// Polynomial in --var with series coefficients.
        #[arg(long)]
        poly: String,
        #[arg(long, default_value = "X")]
        var: String,
        /// Approximate root.
        #[arg(long)]
        x0: String,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Runs a named property suite.
    Check {
        /// One of lemma-2-2-4, exact-top-forms, hp-roundtrip, hp1-exhaustive,
        /// trace-axioms, t-power, weierstrass, solvers.
        suite: String,
        #[arg(long)]
        tower: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Replaces a "-" argument by the text read from `stdin`.
struct Input<R: Read> {
    stdin: Option<R>,
}

impl<R: Read> Input<R> {
    fn text(&mut self, arg: &str) -> CliResult<String> {
        if arg != "-" {
            return Ok(arg.to_string());
        }
        let mut r = self.stdin.take().ok_or_else(|| CliError::usage("only one argument can be read from stdin"))?;
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Ok(s.trim().to_string())
    }
}

fn decision_name(d: Decision) -> &'static str {
    match d {
        Decision::Decided(_) => "decided",
        Decision::Unavailable => "unavailable",
        Decision::NonzeroUndecided => "nonzero-undecided",
    }
}

fn reduction_report(report: &mut Report, red: &Reduction, verbose: bool) {
    let rep = &red.representative;
    report.decided = rep.decided_value();
    report.representative = Some(rep.to_string());
    report.value("decision", decision_name(rep.decision));
    if verbose {
        report.log = Some(red.log.iter().map(LogEntry::from).collect());
    }
    if rep.decision == Decision::Unavailable {
        report.exit_code = 2;
    }
}

fn truncation(cli: &Cli) -> CliResult<Option<u32>> {
    cli.precision
        .map(|p| u32::try_from(p).map_err(|_| CliError::usage("--precision must be nonnegative")))
        .transpose()
}

pub fn run<R: Read>(cli: &Cli, stdin: R) -> CliResult<Report> {
    let start = Instant::now();
    let mut input = Input { stdin: Some(stdin) };
    let name = command_name(&cli.command);
    let mut report = Report::new(name);
    match &cli.command {
        Command::HpClass { tower, form } => {
            let tower = parse_tower(&tower.tower, cli.precision)?;
            report.precision = Some(tower.default_precision());
            let omega = parse_form(&tower, &input.text(form)?)?;
            reduction_report(&mut report, &hp_class(&omega)?, cli.verbose);
        }
        Command::Hp1Class { tower, element } => {
            let tower = parse_tower(&tower.tower, cli.precision)?;
            report.precision = Some(tower.default_precision());
            let a = parse_element(&tower, &input.text(element)?)?;
            reduction_report(&mut report, &hp1_class(&a)?, cli.verbose);
        }
        Command::ReduceForm { tower, form } => {
            let tower = parse_tower(&tower.tower, cli.precision)?;
            report.precision = Some(tower.default_precision());
            let omega = parse_form(&tower, &input.text(form)?)?;
            let class = omega.reduce_mod_exact()?;
            report.representative = Some(class.to_form().to_string());
            report.value("zero", class.is_zero());
        }
        Command::Trace { tower, extension, form } => {
            let tower = parse_tower(&tower.tower, cli.precision)?;
            report.precision = Some(tower.default_precision());
            let ext = parse_extension(&tower, extension)?;
            let text = input.text(form)?;
            let upper = match &ext {
                ExtensionDescriptor::Radicial(r) => UpperForm::Radicial(parse_form(r.upper(), &text)?),
                ExtensionDescriptor::Etale(e) => UpperForm::Etale(parse_etale_form(e, &text)?),
            };
            let traced = ext.trace_form(&upper)?;
            report.representative = Some(traced.to_string());
            report.value("degree", ext.degree());
            report.value("lifted", upper.to_string());
            if traced.degree() == tower.p_rank() {
                let rep = ext.trace_hp(&upper)?;
                report.decided = rep.decided_value();
                report.value("class", rep.to_string());
                report.value("decision", decision_name(rep.decision));
            }
        }
        Command::Wdiv { ring, f, g, k, schedule } => {
            let ring = parse_ring(&ring.ring, truncation(cli)?)?;
            report.precision = Some(ring.truncation() as i64);
            let f = parse_series(&ring, &input.text(f)?)?;
            let g = parse_series(&ring, &input.text(g)?)?;
            let k = match k {
                Some(k) => *k,
                None => regularity_order(&f).ok_or(Error::NotRegular)?,
            };
            let schedule = match schedule {
                Schedule::WeightByWeight => DivisionSchedule::WeightByWeight,
                Schedule::SuccessiveApproximation => DivisionSchedule::SuccessiveApproximation,
            };
            let (q, r) = weierstrass_divide_with(&g, &f, k, schedule)?;
            report.representative = Some(r.to_string());
            report.value("k", k);
            report.value("q", q.to_string());
            report.value("r", r.to_string());
        }
        Command::Wprep { ring, f } => {
            let ring = parse_ring(&ring.ring, truncation(cli)?)?;
            report.precision = Some(ring.truncation() as i64);
            let f = parse_series(&ring, &input.text(f)?)?;
            let prep = weierstrass_prepare(&f)?;
            report.representative = Some(prep.distinguished.to_string());
            report.value("k", prep.order);
            report.value("P", prep.distinguished.to_string());
            report.value("u", prep.unit.to_string());
        }
        Command::Wreg { ring, f } => {
            let ring = parse_ring(&ring.ring, truncation(cli)?)?;
            report.precision = Some(ring.truncation() as i64);
            let f = parse_series(&ring, &input.text(f)?)?;
            let reg = regularize(&f)?;
            report.representative = Some(reg.transformed.to_string());
            report.value("k", reg.order);
            let exps: Value = ring.x_vars().iter().zip(&reg.exponents).map(|(x, n)| (x.clone(), json!(n))).collect::<serde_json::Map<_, _>>().into();
            report.value("exponents", exps);
        }
        Command::AsSolve { ring, a, order } => {
            let ring = parse_ring(&ring.ring, truncation(cli)?)?;
            report.precision = Some(ring.truncation() as i64);
            let a = parse_series(&ring, &input.text(a)?)?;
            let b = artin_schreier_solve(&a, order.unwrap_or(ring.truncation()))?;
            report.representative = Some(b.to_string());
            report.value("b", b.to_string());
        }
        Command::Hensel { ring, poly, var, x0, order } => {
            let ring = parse_ring(&ring.ring, truncation(cli)?)?;
            report.precision = Some(ring.truncation() as i64);
            let g = parse_series_polynomial(&ring, var, &input.text(poly)?)?;
            let x0 = parse_series(&ring, &input.text(x0)?)?;
            let root = hensel_lift(&g, &x0, order.unwrap_or(ring.truncation()))?;
            report.representative = Some(root.to_string());
            report.value("root", root.to_string());
        }
        Command::Check { suite, tower, trials, seed } => {
            let tower = tower.as_deref().map(|t| parse_tower(t, cli.precision)).transpose()?;
            report.precision = tower.as_ref().map(|t| t.default_precision());
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let res = run_named(suite, tower.as_ref(), *trials, &mut rng)?;
            report.value("suite", res.suite.clone());
            report.value("passed", res.passed());
            report.value("trials", res.trials());
            report.value("failures", res.failures());
            let checks: Vec<Value> = res
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "passed": c.passed(),
                        "trials": c.trials,
                        "failures": c.failures,
                        "first_failure": c.first_failure,
                    })
                })
                .collect();
            report.value("checks", checks);
            if !res.passed() {
                report.exit_code = 1;
            }
        }
    }
    report.timing_us = start.elapsed().as_micros() as u64;
    Ok(report)
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::HpClass { .. } => "hp-class",
        Command::Hp1Class { .. } => "hp1-class",
        Command::ReduceForm { .. } => "reduce-form",
        Command::Trace { .. } => "trace",
        Command::Wdiv { .. } => "wdiv",
        Command::Wprep { .. } => "wprep",
        Command::Wreg { .. } => "wreg",
        Command::AsSolve { .. } => "as-solve",
        Command::Hensel { .. } => "hensel",
        Command::Check { .. } => "check",
    }
}
