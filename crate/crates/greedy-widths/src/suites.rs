//! The verification suites behind `verify --suite`.
//!
//! Each suite is a list of independent instances. Instances run on the rayon
//! pool and are merged in their listed order, so the output depends only on
//! the configuration and the seed.

use std::path::{Path, PathBuf};

use greedy_widths_core::greedy::{run_greedy_on_points, GreedyOptions};
use greedy_widths_core::grothendieck::{
    build_a_b, two_summing_lower, two_summing_upper, verify_lemma1, verify_lemma2,
};
use greedy_widths_core::linalg::{self, Vector};
use greedy_widths_core::sampling::derive_seed;
use greedy_widths_core::subspaces::Subspace;
use greedy_widths_core::verify::{
    dalpha_points, run_example_dalpha, trace_proof_31_unchecked, verify_cor35, verify_cor35_lp,
    verify_cor_lp, verify_thm2n, verify_thm31, verify_thm32, BoundReport, Estimate, ImageSet,
    Outcome, ProofTrace31, Strategy, TheoremId, Thm31Params, TraceOptions, TRACE_TOL,
};
use greedy_widths_core::widths::{kolmogorov_widths, WidthOptions};
use greedy_widths_core::NormedSpace;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::Result;
use crate::formats::{json_document, num, write_file, Table};
use crate::instances;

/// Seed streams, one per family of instances.
const STREAM_OPERATORS: u64 = 0x100;
const STREAM_ROTATED: u64 = 0x200;
const STREAM_TRACE: u64 = 0x300;
const STREAM_WIDTHS: u64 = 0x400;
const STREAM_TWO_SUMMING: u64 = 0x500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Example,
    Thm31,
    Thm32,
    Cor35,
    Thm2n,
    Trace31,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Example,
        Suite::Thm31,
        Suite::Thm32,
        Suite::Cor35,
        Suite::Thm2n,
        Suite::Trace31,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Example => "example",
            Suite::Thm31 => "thm31",
            Suite::Thm32 => "thm32",
            Suite::Cor35 => "cor35",
            Suite::Thm2n => "thm2n",
            Suite::Trace31 => "trace31",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }
}

/// A report with the file stem and instance label it is written under.
#[derive(Clone, Debug)]
pub struct NamedReport {
    pub name: String,
    pub instance: String,
    pub report: BoundReport,
}

/// An extra output file, relative to the suite directory.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

/// Header of the per-suite numeric series used for plotting.
pub const SERIES_HEADER: [&str; 5] = ["instance", "n", "lhs", "width", "rhs"];

#[derive(Debug, Default)]
struct InstanceOutput {
    reports: Vec<NamedReport>,
    series: Vec<Vec<String>>,
    artifacts: Vec<Artifact>,
    failures: Vec<String>,
}

#[derive(Debug)]
pub struct SuiteRun {
    pub suite: Suite,
    pub reports: Vec<NamedReport>,
    pub series: Table,
    pub artifacts: Vec<Artifact>,
    /// Certified failures that are not bound reports.
    pub failures: Vec<String>,
}

impl SuiteRun {
    fn merge(suite: Suite, parts: Vec<InstanceOutput>) -> Self {
        let mut run = SuiteRun {
            suite,
            reports: Vec::new(),
            series: Table::new(&SERIES_HEADER),
            artifacts: Vec::new(),
            failures: Vec::new(),
        };
        for part in parts {
            run.reports.extend(part.reports);
            for row in part.series {
                run.series.push(row);
            }
            run.artifacts.extend(part.artifacts);
            run.failures.extend(part.failures);
        }
        run
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.reports
            .iter()
            .filter(|r| r.report.outcome == outcome)
            .count()
    }

    pub fn violations(&self) -> usize {
        self.count(Outcome::Violated) + self.failures.len()
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} reports, {} certified, {} consistent, {} inconclusive, {} violated{}",
            self.suite.name(),
            self.reports.len(),
            self.count(Outcome::Certified),
            self.count(Outcome::Consistent),
            self.count(Outcome::Inconclusive),
            self.count(Outcome::Violated),
            if self.failures.is_empty() {
                String::new()
            } else {
                format!(", {} other failures", self.failures.len())
            }
        )
    }

    /// Writes the suite directory: reports (JSON files or one CSV table), series and artifacts.
    pub fn write(&self, out: &Path, format: Format) -> Result<()> {
        let dir = out.join(self.suite.name());
        match format {
            Format::Json => {
                for r in &self.reports {
                    let record = ReportRecord {
                        suite: self.suite.name(),
                        instance: &r.instance,
                        report: &r.report,
                    };
                    write_file(
                        &dir.join("reports").join(format!("{}.json", r.name)),
                        &json_document("bound_report", &record),
                    )?;
                }
            }
            Format::Csv => write_file(
                &dir.join("summary.csv"),
                &summary_table(&self.reports).to_csv(),
            )?,
        }
        write_file(&dir.join("series.csv"), &self.series.to_csv())?;
        for a in &self.artifacts {
            write_file(&dir.join(&a.path), &a.contents)?;
        }
        if !self.failures.is_empty() {
            let mut t = Table::new(&["failure"]);
            for f in &self.failures {
                t.push(vec![f.clone()]);
            }
            write_file(&dir.join("failures.csv"), &t.to_csv())?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    suite: &'a str,
    instance: &'a str,
    report: &'a BoundReport,
}

/// The flat table written with `--format csv`.
pub fn summary_table(reports: &[NamedReport]) -> Table {
    let mut t = Table::new(&[
        "theorem_id",
        "n",
        "lhs",
        "rhs",
        "slack",
        "pass",
        "outcome",
        "instance",
    ]);
    for r in reports {
        let rep = &r.report;
        t.push(vec![
            rep.theorem_id.as_str().into(),
            rep.n.to_string(),
            num(rep.lhs),
            num(rep.rhs),
            num(rep.slack),
            rep.pass.to_string(),
            outcome_name(rep.outcome).into(),
            r.instance.clone(),
        ]);
    }
    t
}

pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Certified => "certified",
        Outcome::Consistent => "consistent",
        Outcome::Inconclusive => "inconclusive",
        Outcome::Violated => "violated",
    }
}

/// Re-decides a report at tolerance `tol`, keeping a forced inconclusive outcome.
pub fn retolerate(r: BoundReport, tol: f64) -> BoundReport {
    if r.tolerance == tol {
        return r;
    }
    let forced = r.outcome == Outcome::Inconclusive
        && Outcome::decide(r.pass, r.lhs_kind, r.rhs_kind) != Outcome::Inconclusive;
    let mut r = r.with_tolerance(tol);
    if forced {
        r.outcome = Outcome::Inconclusive;
    }
    r
}

fn named(instance: &str, report: BoundReport) -> NamedReport {
    NamedReport {
        name: format!(
            "{}-{}-n{:02}",
            report.theorem_id.as_str(),
            instance,
            report.n
        ),
        instance: instance.into(),
        report,
    }
}

fn series_row(
    instance: &str,
    n: usize,
    lhs: f64,
    width: Option<f64>,
    rhs: Option<f64>,
) -> Vec<String> {
    vec![
        instance.into(),
        n.to_string(),
        num(lhs),
        width.map(num).unwrap_or_default(),
        rhs.map(num).unwrap_or_default(),
    ]
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<SuiteRun> {
    let parts = match suite {
        Suite::Example => example(cfg)?,
        Suite::Thm31 => thm31(cfg)?,
        Suite::Thm32 | Suite::Cor35 | Suite::Thm2n => operator_suite(suite, cfg)?,
        Suite::Trace31 => trace31(cfg)?,
        Suite::All => unreachable!("`all` is expanded before running"),
    };
    Ok(SuiteRun::merge(suite, parts))
}

fn grid(alphas: &[f64], qs: &[f64]) -> Vec<(f64, f64)> {
    alphas
        .iter()
        .flat_map(|&a| qs.iter().map(move |&q| (a, q)))
        .collect()
}

fn example(cfg: &RunConfig) -> Result<Vec<InstanceOutput>> {
    let ex = &cfg.example;
    let n_max = ex.n_max.unwrap_or(ex.m);
    grid(&ex.alphas, &ex.qs)
        .par_iter()
        .map(|&(alpha, q)| {
            let label = format!("a{alpha}-q{q}");
            let run = run_example_dalpha(alpha, q, ex.m, n_max)?;
            let mut out = InstanceOutput::default();
            let mut sigmas = Table::new(&["n", "sigma", "expected", "abs_error"]);
            for (n, (&s, &e)) in run.sigmas.iter().zip(&run.expected).enumerate() {
                sigmas.push(vec![n.to_string(), num(s), num(e), num((s - e).abs())]);
                out.series.push(series_row(&label, n, s, Some(e), None));
            }
            let mut sharp = Table::new(&["n", "sigma_3n_minus_1_times_n_alpha"]);
            for &(n, r) in &run.sharpness {
                sharp.push(vec![n.to_string(), num(r)]);
            }
            out.artifacts.push(Artifact {
                path: format!("sigmas-{label}.csv").into(),
                contents: sigmas.to_csv(),
            });
            out.artifacts.push(Artifact {
                path: format!("sharpness-{label}.csv").into(),
                contents: sharp.to_csv(),
            });
            out.reports.push(NamedReport {
                name: format!("example_dalpha-{label}"),
                instance: label,
                report: run.report,
            });
            Ok(out)
        })
        .collect()
}

fn thm31(cfg: &RunConfig) -> Result<Vec<InstanceOutput>> {
    let t = &cfg.thm31;
    let mut jobs: Vec<Option<(f64, f64)>> = grid(&t.alphas, &t.qs).into_iter().map(Some).collect();
    if t.hilbert_dim > 2 {
        jobs.push(None);
    }
    jobs.par_iter()
        .map(|job| {
            let (label, reports, s) = match *job {
                Some((alpha, q)) => {
                    let space = NormedSpace::lp(t.m, q)?;
                    let reports = verify_cor_lp(
                        &dalpha_points(alpha, t.m),
                        &space,
                        t.c0,
                        alpha,
                        cfg.log_base,
                        t.n_min..=t.n_max,
                    )?;
                    (format!("scaled-a{alpha}-q{q}-m{}", t.m), reports, alpha)
                }
                None => {
                    let m = t.hilbert_dim;
                    let s = t.hilbert_alpha;
                    let points = instances::rotated_scaled_basis(
                        s,
                        m,
                        derive_seed(cfg.seed, STREAM_ROTATED),
                    );
                    let params = Thm31Params {
                        s,
                        c0: t.c0,
                        mu: 0.0,
                        c1: 1.0,
                        log_base: cfg.log_base,
                    };
                    let top = t.n_max.min(m - 1);
                    let reports = verify_thm31(
                        &points,
                        &NormedSpace::euclidean(m)?,
                        &params,
                        t.n_min.min(top)..=top,
                    )?;
                    (format!("rotated-a{s}-m{m}"), reports, s)
                }
            };
            let mut out = InstanceOutput::default();
            for r in reports {
                let r = retolerate(r, cfg.tol);
                let premise = t.c0 * (r.n as f64).powf(-s);
                out.series
                    .push(series_row(&label, r.n, r.lhs, Some(premise), Some(r.rhs)));
                out.reports.push(named(&label, r));
            }
            Ok(out)
        })
        .collect()
}

/// An operator instance of the thm32, cor35 and thm2n suites.
#[derive(Clone, Copy, Debug)]
enum OperatorJob {
    Gaussian { index: usize, m: usize },
    Diagonal { alpha: f64, q: f64 },
}

fn operator_jobs(cfg: &RunConfig) -> Vec<OperatorJob> {
    let o = &cfg.operators;
    let mut jobs: Vec<OperatorJob> = (0..o.count)
        .map(|index| OperatorJob::Gaussian {
            index,
            m: instances::cycled_dim(index, o.min_dim, o.max_dim),
        })
        .collect();
    jobs.extend(
        grid(&o.alphas, &o.qs)
            .into_iter()
            .map(|(alpha, q)| OperatorJob::Diagonal { alpha, q }),
    );
    jobs
}

/// Seed of the Gaussian operator with this index; shared by every operator suite.
pub fn operator_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, STREAM_OPERATORS + index as u64)
}

impl OperatorJob {
    fn label(&self, cfg: &RunConfig) -> String {
        match *self {
            OperatorJob::Gaussian { index, m } => format!("gauss{index:02}-m{m}"),
            OperatorJob::Diagonal { alpha, q } => {
                format!("diag-a{alpha}-q{q}-m{}", cfg.operators.diagonal_dim)
            }
        }
    }

    fn build(&self, cfg: &RunConfig) -> Result<ImageSet> {
        Ok(match *self {
            OperatorJob::Gaussian { index, m } => instances::gaussian_image(
                m,
                cfg.operators.sphere_samples,
                operator_seed(cfg.seed, index),
            )?,
            OperatorJob::Diagonal { alpha, q } => {
                instances::diagonal_image(alpha, q, cfg.operators.diagonal_dim)?
            }
        })
    }

    fn seed(&self, cfg: &RunConfig, stream: u64) -> u64 {
        let tag = match *self {
            OperatorJob::Gaussian { index, .. } => index as u64,
            OperatorJob::Diagonal { alpha, q } => alpha.to_bits() ^ q.to_bits().rotate_left(17),
        };
        derive_seed(derive_seed(cfg.seed, stream), tag)
    }
}

fn operator_suite(suite: Suite, cfg: &RunConfig) -> Result<Vec<InstanceOutput>> {
    let o = &cfg.operators;
    operator_jobs(cfg)
        .par_iter()
        .map(|job| {
            let label = job.label(cfg);
            let set = job.build(cfg)?;
            let opts = WidthOptions {
                restarts: o.restarts,
                seed: job.seed(cfg, STREAM_WIDTHS),
                ..WidthOptions::default()
            };
            let top = o.n_max.min(set.operator.nrows()).min(set.operator.ncols());
            let widths = kolmogorov_widths(&set.operator, &set.domain, &set.target, 0..=top - 1, &opts)?;
            let mut out = InstanceOutput::default();
            let mut lift_audit = Table::new(&["n", "applicable", "gram_deviation"]);
            let mut two_summing = Table::new(&["n", "steps", "lower", "upper", "root_steps"]);
            for n in 1..=top {
                let mut reports = Vec::new();
                match suite {
                    Suite::Thm32 => {
                        reports.extend(verify_thm32(&set, n, &opts)?);
                        if matches!(job, OperatorJob::Gaussian { .. }) {
                            let lemma = verify_lemma1(&set.operator, &set.domain, &set.target, n, &opts)?;
                            reports.push(lemma.kolmogorov);
                            reports.push(lemma.gelfand);
                        }
                    }
                    Suite::Cor35 => {
                        reports.push(verify_cor35(&set, n, &opts)?);
                        if let OperatorJob::Diagonal { alpha, .. } = *job {
                            reports.push(verify_cor35_lp(&set, n, 1.0, alpha, &opts)?);
                        }
                        let seed = derive_seed(job.seed(cfg, STREAM_TWO_SUMMING), n as u64);
                        let (report, row) = certificate_operator_checks(&set, n, seed)?;
                        if let Some(report) = report {
                            reports.push(report);
                        }
                        if row.lower > row.root_steps + 1e-8 {
                            out.failures.push(format!(
                                "{label} n={n}: sampled 2-summing norm {} of the certificate operator exceeds {}",
                                row.lower, row.root_steps
                            ));
                        }
                        two_summing.push(vec![
                            n.to_string(),
                            row.steps.to_string(),
                            num(row.lower),
                            num(row.upper),
                            num(row.root_steps),
                        ]);
                    }
                    Suite::Thm2n => {
                        let outcome = verify_thm2n(&set, n, &opts)?;
                        lift_audit.push(vec![
                            n.to_string(),
                            outcome.lifts.is_some().to_string(),
                            outcome.gram_deviation.map(num).unwrap_or_default(),
                        ]);
                        reports.push(outcome.report);
                    }
                    _ => unreachable!("not an operator suite"),
                }
                let width = widths[n - 1].value;
                for r in reports {
                    let r = retolerate(r, cfg.tol);
                    if matches!(r.theorem_id, TheoremId::Thm32 | TheoremId::Cor35 | TheoremId::Thm2n) {
                        out.series.push(series_row(&label, r.n, r.lhs, Some(width), Some(r.rhs)));
                    }
                    out.reports.push(named(&label, r));
                }
            }
            if suite == Suite::Thm2n {
                out.artifacts.push(Artifact {
                    path: format!("lift-audit-{label}.csv").into(),
                    contents: lift_audit.to_csv(),
                });
            }
            if suite == Suite::Cor35 {
                out.artifacts.push(Artifact {
                    path: format!("two-summing-{label}.csv").into(),
                    contents: two_summing.to_csv(),
                });
            }
            Ok(out)
        })
        .collect()
}

struct TwoSummingRow {
    steps: usize,
    lower: f64,
    upper: f64,
    root_steps: f64,
}

/// Builds B from 3n greedy steps on the image set and checks its 2-summing norm.
fn certificate_operator_checks(
    set: &ImageSet,
    n: usize,
    seed: u64,
) -> Result<(Option<BoundReport>, TwoSummingRow)> {
    let trace = run_greedy_on_points(&set.points, &set.target, &GreedyOptions::new(3 * n))?;
    let steps = trace.selected.len();
    let lifts: Vec<Vector> = trace
        .selected_indices
        .iter()
        .map(|&i| set.lifts[i].clone())
        .collect();
    let ops = build_a_b(&trace, &set.operator, &set.domain, &lifts)?;
    let ell2 = NormedSpace::euclidean(steps)?;
    let lower = two_summing_lower(&ops.b, &set.target, &ell2, 8, seed)?;
    let upper = two_summing_upper(&ops.b, &set.target, &ell2)?;
    let report = if n <= steps.min(set.target.dim()) {
        Some(verify_lemma2(&ops.b, &set.target, &ell2, n, seed)?.0)
    } else {
        None
    };
    Ok((
        report,
        TwoSummingRow {
            steps,
            lower: lower.value,
            upper: upper.value,
            root_steps: (steps as f64).sqrt(),
        },
    ))
}

/// A proof-trace fixture.
#[derive(Clone, Copy, Debug)]
enum TraceJob {
    Euclidean,
    ScaledBasis,
    CoordinateBlocks,
    Planar,
}

impl TraceJob {
    const ALL: [TraceJob; 4] = [
        TraceJob::Euclidean,
        TraceJob::ScaledBasis,
        TraceJob::CoordinateBlocks,
        TraceJob::Planar,
    ];

    fn label(self) -> &'static str {
        match self {
            TraceJob::Euclidean => "euclidean",
            TraceJob::ScaledBasis => "scaled-basis",
            TraceJob::CoordinateBlocks => "coordinate-blocks",
            TraceJob::Planar => "planar",
        }
    }
}

/// Runs one trace fixture of the configured size.
pub fn trace_fixture(cfg: &RunConfig, index: usize) -> Result<(String, ProofTrace31)> {
    let tr = &cfg.trace31;
    let job = TraceJob::ALL[index];
    let seed = derive_seed(cfg.seed, STREAM_TRACE + index as u64);
    let opts = TraceOptions {
        strategy: Strategy::Minimax,
        restarts: tr.restarts,
        seed,
        ellipsoid_samples: tr.ellipsoid_samples,
    };
    let params = |s: f64, mu: f64| Thm31Params {
        s,
        c0: 1.0,
        mu,
        c1: 1.0,
        log_base: cfg.log_base,
    };
    let lp_mu = (0.5 - 1.0 / tr.q).abs();
    let trace = match job {
        TraceJob::Euclidean => {
            let m = tr.hilbert_dim;
            let points = instances::rotated_decay(m, tr.hilbert_points, tr.hilbert_s, seed);
            trace_proof_31_unchecked(
                &points,
                &NormedSpace::euclidean(m)?,
                &params(tr.hilbert_s, 0.0),
                tr.n,
                &opts,
            )?
        }
        TraceJob::ScaledBasis => trace_proof_31_unchecked(
            &dalpha_points(tr.alpha, tr.m),
            &NormedSpace::lp(tr.m, tr.q)?,
            &params(tr.alpha, lp_mu),
            tr.n,
            &TraceOptions {
                strategy: Strategy::Leading,
                ..opts
            },
        )?,
        TraceJob::CoordinateBlocks => {
            let space = NormedSpace::lp(tr.m, tr.q)?;
            // dim T_0 = 0 and dim T_k = 2^k starts the h-sequence at zero.
            let blocks = (0..tr.n)
                .map(|k| {
                    let dim = if k == 0 { 0 } else { (1usize << k).min(tr.m) };
                    let cols: Vec<Vector> = (0..dim).map(|i| instances::unit(tr.m, i)).collect();
                    Subspace::new(linalg::from_columns(&cols, tr.m), space.clone())
                })
                .collect::<greedy_widths_core::Result<Vec<_>>>()?;
            trace_proof_31_unchecked(
                &dalpha_points(tr.alpha, tr.m),
                &space,
                &params(tr.alpha, lp_mu),
                tr.n,
                &TraceOptions {
                    strategy: Strategy::Explicit(blocks),
                    ..opts
                },
            )?
        }
        TraceJob::Planar => {
            let m = 6;
            trace_proof_31_unchecked(
                &instances::planar_ellipse(m, 12),
                &NormedSpace::lp(m, 3.0)?,
                &params(1.0, 1.0 / 6.0),
                tr.n,
                &opts,
            )?
        }
    };
    Ok((job.label().into(), trace))
}

/// Summarizes a trace as a report with left side 0 and right side its smallest check slack.
pub fn trace_report(label: &str, trace: &ProofTrace31) -> BoundReport {
    let missing = trace.missing_tags();
    let rhs = if missing.is_empty() {
        trace.min_slack()
    } else {
        f64::NEG_INFINITY
    };
    let report = BoundReport::compare(
        TheoremId::ProofTrace31,
        &format!("trace|{label}|{}", trace.n),
        trace.n,
        Estimate::exact(0.0),
        Estimate::exact(rhs),
    )
    .with_tolerance(TRACE_TOL)
    .with_constant(
        "C_eff",
        format!(
            "measured: max(C0, d_0, achieved widths scaled by 2^(s k)) = {}",
            trace.c_eff
        ),
    )
    .with_constant(
        "A",
        format!("gamma table bound C1 (2^(n+1))^mu = {}", trace.a),
    )
    .with_constant(
        "lambda",
        format!(
            "{:?} John ellipsoid ratio {}",
            trace.lambda_kind, trace.lambda
        ),
    );
    let note = match (missing.is_empty(), trace.first_failure()) {
        (false, _) => format!("missing checks: {}", missing.join(", ")),
        (true, Some(c)) => format!(
            "first failing check ({}) {}: slack {}",
            c.tag, c.label, c.slack
        ),
        (true, None) => format!("branch {:?}, {} checks", trace.branch, trace.checks.len()),
    };
    report.with_note(note)
}

fn trace31(cfg: &RunConfig) -> Result<Vec<InstanceOutput>> {
    (0..TraceJob::ALL.len())
        .into_par_iter()
        .map(|index| {
            let (label, trace) = trace_fixture(cfg, index)?;
            let mut out = InstanceOutput::default();
            for (k, &s) in trace.sigmas.iter().enumerate() {
                out.series.push(series_row(&label, k, s, None, None));
            }
            let mut checks = Table::new(&[
                "tag",
                "label",
                "lhs",
                "rhs",
                "relation",
                "log_domain",
                "slack",
                "holds",
            ]);
            for c in &trace.checks {
                checks.push(vec![
                    c.tag.clone(),
                    c.label.clone(),
                    num(c.lhs),
                    num(c.rhs),
                    format!("{:?}", c.relation),
                    c.log_domain.to_string(),
                    num(c.slack),
                    c.holds().to_string(),
                ]);
            }
            out.artifacts.push(Artifact {
                path: format!("trace-{label}.json").into(),
                contents: json_document("proof_trace", &trace),
            });
            out.artifacts.push(Artifact {
                path: format!("checks-{label}.csv").into(),
                contents: checks.to_csv(),
            });
            out.reports.push(NamedReport {
                name: format!("proof_trace_31-{label}-n{:02}", trace.n),
                instance: label.clone(),
                report: trace_report(&label, &trace),
            });
            Ok(out)
        })
        .collect()
}
