//! The single-instance theorem checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{E, SQRT_2};
use core::ops::RangeInclusive;
use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{gamma_table, GammaSpaceKind};
use crate::greedy::{run_greedy_on_points, GreedyOptions, GreedyTrace};
use crate::grothendieck::{
    combine_same_direction, gamma_n_of_space, geometric_mean, orthonormal_lift,
};
use crate::linalg::{self, Matrix, Vector};
use crate::sampling::derive_seed;
use crate::spaces::{fingerprint_points, NormedSpace, OperatorBall};
use crate::widths::{
    alternating_minimax, coordinate_subspace_width, gelfand_width, kolmogorov_widths,
    operator_norm_upper, EstimateKind, WidthEstimate, WidthOptions,
};

use super::{BoundReport, Estimate, TheoremId};

/// Largest preimage norm accepted as lying in the unit ball.
pub const LIFT_NORM_TOL: f64 = 1e-9;
/// Orthonormality tolerance of the lift audit behind the 2n bound.
pub const LIFT_AUDIT_TOL: f64 = 1e-6;
/// Accuracy to which the diagonal example must reproduce its closed form.
pub const DALPHA_TOL: f64 = 1e-10;

/// Base of the logarithm in √log(2n).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LogBase {
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "e"))]
    E,
    #[cfg_attr(feature = "serde", serde(rename = "2"))]
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.log2(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        }
    }
}

/// Constants of the power-law bound: dₙ ≤ C₀max(1,n)^{−s} and γₙ(X) ≤ C₁n^μ.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Thm31Params {
    pub s: f64,
    pub c0: f64,
    pub mu: f64,
    pub c1: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub log_base: LogBase,
}

impl Thm31Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c0.is_finite()) || !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::config("C0 and C1 must be positive and finite"));
        }
        if !(0.0..=0.5).contains(&self.mu) {
            return Err(Error::config(format!(
                "mu = {} must lie in [0, 1/2]",
                self.mu
            )));
        }
        if !(self.s > self.mu) || !self.s.is_finite() {
            return Err(Error::config(format!(
                "s = {} must exceed mu = {}",
                self.s, self.mu
            )));
        }
        Ok(())
    }

    /// 2^μ16^s.
    pub fn dyadic_constant(&self) -> f64 {
        2f64.powf(self.mu) * 16f64.powf(self.s)
    }

    /// C₀C₁2^μ16^s √log(2n) n^{μ−s}.
    pub fn bound(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.c0
            * self.c1
            * self.dyadic_constant()
            * self.log_base.log(2.0 * nf).sqrt()
            * nf.powf(self.mu - self.s)
    }
}

/// Certifies dₙ ≤ C₀max(1,n)^{−s} below the rank; widths vanish beyond it.
fn certify_power_law(
    points: &[Vector],
    space: &NormedSpace,
    c0: f64,
    s: f64,
    seed: u64,
) -> Result<Vec<WidthEstimate>> {
    let rank = linalg::numerical_rank(&linalg::from_columns(points, space.dim()), 1e-12);
    let mut out = Vec::with_capacity(rank);
    for n in 0..rank {
        let target = c0 * (n.max(1) as f64).powf(-s);
        let mut est = coordinate_subspace_width(points, space, n)?;
        if est.value > target {
            let alt = alternating_minimax(points, space, n, 4, derive_seed(seed, n as u64))?;
            if alt.value < est.value {
                est = alt;
            }
        }
        if est.value > target * (1.0 + 1e-12) {
            return Err(Error::Premise {
                n,
                detail: format!(
                    "best upper width bound {:e} exceeds C0·max(1,n)^-s = {target:e}",
                    est.value
                ),
            });
        }
        out.push(est);
    }
    Ok(out)
}

/// Provenance of C₁ and whether the γ table implies γₙ(X) ≤ C₁n^μ for every n.
fn gamma_provenance(space: &NormedSpace, c1: f64, mu: f64) -> (String, bool) {
    let kind = GammaSpaceKind::of(space);
    let exponent = match kind {
        GammaSpaceKind::Hilbert => 0.0,
        GammaSpaceKind::Lp(p) => p.euclidean_distortion_exponent(),
        GammaSpaceKind::Generic => 0.5,
    };
    let implied = c1 >= 1.0 && mu >= exponent - 1e-15;
    let table = gamma_table(kind, 2);
    let text = if implied {
        format!("gamma table: γₙ(X) ≤ n^{exponent} ≤ C1·n^mu (γ₂ = {table})")
    } else {
        format!("caller-supplied; the gamma table gives only γₙ(X) ≤ n^{exponent}")
    };
    (text, implied)
}

fn greedy_steps(points: &[Vector], space: &NormedSpace, steps: usize) -> Result<GreedyTrace> {
    run_greedy_on_points(points, space, &GreedyOptions::new(steps.min(points.len())))
}

/// σ_k of a trace, zero once the surrogate set is used up.
fn sigma_at(trace: &GreedyTrace, k: usize) -> f64 {
    trace.sigmas.get(k).copied().unwrap_or(0.0)
}

fn run_power_law(
    id: TheoremId,
    points: &[Vector],
    space: &NormedSpace,
    params: &Thm31Params,
    n_range: RangeInclusive<usize>,
    seed: u64,
) -> Result<Vec<BoundReport>> {
    params.validate()?;
    if points.is_empty() {
        return Err(Error::config("the set is empty"));
    }
    for p in points {
        check_dim(space.dim(), p.len())?;
    }
    let premise = certify_power_law(points, space, params.c0, params.s, seed)?;
    let ns: Vec<usize> = n_range.filter(|&n| n >= 2).collect();
    let Some(&last) = ns.last() else {
        return Ok(Vec::new());
    };
    let trace = greedy_steps(points, space, last + 1)?;
    let (c1_text, implied) = gamma_provenance(space, params.c1, params.mu);
    let rhs_kind = if implied {
        EstimateKind::Exact
    } else {
        EstimateKind::Heuristic
    };
    let descriptor = format!(
        "{}|{}|{params:?}",
        fingerprint_points(points),
        space.describe()
    );
    let premise_text = format!(
        "dₙ ≤ C0·max(1,n)^-s certified for n < {} by upper width bounds; dₙ = 0 beyond",
        premise.len()
    );
    Ok(ns
        .into_iter()
        .map(|n| {
            BoundReport::compare(
                id,
                &descriptor,
                n,
                Estimate::exact(sigma_at(&trace, n)),
                Estimate::new(params.bound(n), rhs_kind),
            )
            .with_constant("C0", premise_text.clone())
            .with_constant("C1", c1_text.clone())
            .with_constant("s", "caller-supplied decay exponent")
            .with_constant("mu", "caller-supplied growth exponent of γₙ")
            .with_constant(
                "2^mu16^s",
                format!("{} (arithmetic)", params.dyadic_constant()),
            )
            .with_constant("log", format!("base {}", params.log_base.as_str()))
        })
        .collect())
}

/// σₙ ≤ C₀C₁2^μ16^s√log(2n)·n^{μ−s} for every n ≥ 2 in the range.
pub fn verify_thm31(
    points: &[Vector],
    space: &NormedSpace,
    params: &Thm31Params,
    n_range: RangeInclusive<usize>,
) -> Result<Vec<BoundReport>> {
    run_power_law(TheoremId::Thm31, points, space, params, n_range, 0)
}

/// The ℓ_p case of [`verify_thm31`] with μ = |1/2 − 1/p| and C₁ = 1.
pub fn verify_cor_lp(
    points: &[Vector],
    space: &NormedSpace,
    c0: f64,
    s: f64,
    log_base: LogBase,
    n_range: RangeInclusive<usize>,
) -> Result<Vec<BoundReport>> {
    let p = space
        .exponent()
        .ok_or_else(|| Error::config("the ℓ_p corollary needs an ℓ_p space"))?;
    let params = Thm31Params {
        s,
        c0,
        mu: p.euclidean_distortion_exponent(),
        c1: 1.0,
        log_base,
    };
    run_power_law(TheoremId::CorLp, points, space, &params, n_range, 0)
}

/// A finite subset of T(B_E) given through preimages in the domain unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageSet {
    pub operator: Matrix,
    pub domain: NormedSpace,
    pub target: NormedSpace,
    pub lifts: Vec<Vector>,
    /// T applied to each lift.
    pub points: Vec<Vector>,
}

impl ImageSet {
    pub fn new(
        operator: Matrix,
        domain: NormedSpace,
        target: NormedSpace,
        lifts: Vec<Vector>,
    ) -> Result<Self> {
        check_dim(domain.dim(), operator.ncols())?;
        check_dim(target.dim(), operator.nrows())?;
        if lifts.is_empty() {
            return Err(Error::config("the image set is empty"));
        }
        for (i, x) in lifts.iter().enumerate() {
            let norm = domain.norm(x)?;
            if !(norm <= 1.0 + LIFT_NORM_TOL) {
                return Err(Error::config(format!(
                    "lift {i} has domain norm {norm}, outside the unit ball"
                )));
            }
        }
        let points = lifts.iter().map(|x| &operator * x).collect();
        Ok(ImageSet {
            operator,
            domain,
            target,
            lifts,
            points,
        })
    }

    /// The sampled surrogate of an operator ball, with the sphere sample as lifts.
    pub fn from_ball(ball: &OperatorBall, target: NormedSpace) -> Result<Self> {
        ImageSet::new(
            ball.matrix.clone(),
            ball.domain.clone(),
            target,
            ball.domain_sample(),
        )
    }

    fn descriptor(&self) -> String {
        format!(
            "{}|{}|{}|{}",
            fingerprint_points(&linalg::columns(&self.operator)),
            fingerprint_points(&self.lifts),
            self.domain.describe(),
            self.target.describe()
        )
    }
}

/// Width estimates d_0..d_{n−1} of the operator, made non-increasing.
fn operator_widths(set: &ImageSet, n: usize, opts: &WidthOptions) -> Result<Vec<Estimate>> {
    Ok(
        kolmogorov_widths(&set.operator, &set.domain, &set.target, 0..=n - 1, opts)?
            .into_iter()
            .map(|w| Estimate::new(w.value, w.kind))
            .collect(),
    )
}

fn gelfand_widths(set: &ImageSet, n: usize, opts: &WidthOptions) -> Result<Vec<Estimate>> {
    (0..n)
        .map(|k| {
            let sub = WidthOptions {
                seed: derive_seed(opts.seed, k as u64),
                ..opts.clone()
            };
            gelfand_width(&set.operator, &set.domain, &set.target, k, &sub)
                .map(|w| Estimate::new(w.value, w.kind))
        })
        .collect()
}

fn product(a: Estimate, b: Estimate) -> Estimate {
    Estimate::new(a.value * b.value, combine_same_direction(a.kind, b.kind))
}

fn scaled(c: f64, a: Estimate) -> Estimate {
    Estimate::new(c * a.value, a.kind)
}

fn gamma_text(e: Estimate) -> String {
    match e.kind {
        EstimateKind::Exact => format!("{} (Euclidean-type space)", e.value),
        _ => format!("{} = n^|1/2-1/p| upper bound", e.value),
    }
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config("n must be at least 1"));
    }
    Ok(())
}

/// (∏_{k<3n} σ_k)^{1/3n} ≤ 3e²Γₙ(E)Γₙ(X)(∏_{k<n} d_k(T))^{1/n}, with Kolmogorov then Gelfand widths.
pub fn verify_thm32(set: &ImageSet, n: usize, opts: &WidthOptions) -> Result<Vec<BoundReport>> {
    require_n(n)?;
    let trace = greedy_steps(&set.points, &set.target, 3 * n)?;
    let sigmas: Vec<Estimate> = (0..3 * n)
        .map(|k| Estimate::exact(sigma_at(&trace, k)))
        .collect();
    let lhs = geometric_mean(&sigmas);
    let gamma_e = gamma_n_of_space(&set.domain, n);
    let gamma_x = gamma_n_of_space(&set.target, n);
    let factor = scaled(3.0 * E * E, product(gamma_e, gamma_x));
    let descriptor = set.descriptor();
    let mut out = Vec::with_capacity(2);
    for (id, widths) in [
        (TheoremId::Thm32, operator_widths(set, n, opts)?),
        (TheoremId::Thm32Gelfand, gelfand_widths(set, n, opts)?),
    ] {
        let rhs = product(factor, geometric_mean(&widths));
        out.push(
            BoundReport::compare(id, &descriptor, n, lhs, rhs)
                .with_constant("3e^2", format!("{}", 3.0 * E * E))
                .with_constant("Gamma_n(E)", gamma_text(gamma_e))
                .with_constant("Gamma_n(X)", gamma_text(gamma_x))
                .with_constant(
                    "widths",
                    format!("{:?}", widths.iter().map(|w| w.kind).collect::<Vec<_>>()),
                ),
        );
    }
    Ok(out)
}

/// σ_{3n−1} ≤ 3e²Γₙ(X)(∏_{k<n} d_k(T))^{1/n} for a Euclidean-type domain.
pub fn verify_cor35(set: &ImageSet, n: usize, opts: &WidthOptions) -> Result<BoundReport> {
    require_n(n)?;
    if !set.domain.is_inner_product() {
        return Err(Error::config(
            "the single-index bound needs a Euclidean-type domain",
        ));
    }
    let trace = greedy_steps(&set.points, &set.target, 3 * n)?;
    let gamma_x = gamma_n_of_space(&set.target, n);
    let widths = operator_widths(set, n, opts)?;
    let rhs = scaled(3.0 * E * E, product(gamma_x, geometric_mean(&widths)));
    Ok(BoundReport::compare(
        TheoremId::Cor35,
        &set.descriptor(),
        n,
        Estimate::exact(sigma_at(&trace, 3 * n - 1)),
        rhs,
    )
    .with_constant("3e^2", format!("{}", 3.0 * E * E))
    .with_constant("Gamma_n(X)", gamma_text(gamma_x))
    .with_constant(
        "widths",
        format!("{:?}", widths.iter().map(|w| w.kind).collect::<Vec<_>>()),
    ))
}

/// σ_{3n−1} ≤ C·3e²·n^{|1/p−1/2|−s} once d_k(T) ≤ C₀k^{−s} is certified for 1 ≤ k < n.
///
/// C = C₀′e^{s(1+1/e)} with C₀′ = max(C₀, ‖T‖) covering d₀, from ((n−1)!)^{1/n} ≥ n/e^{1+1/e}.
pub fn verify_cor35_lp(
    set: &ImageSet,
    n: usize,
    c0: f64,
    s: f64,
    opts: &WidthOptions,
) -> Result<BoundReport> {
    require_n(n)?;
    if !set.domain.is_inner_product() {
        return Err(Error::config(
            "the single-index bound needs a Euclidean-type domain",
        ));
    }
    let p = set
        .target
        .exponent()
        .ok_or_else(|| Error::config("the power-law tail needs an ℓ_p target"))?;
    if !(c0 > 0.0) || !(s > 0.0) {
        return Err(Error::config("C0 and s must be positive"));
    }
    let widths = kolmogorov_widths(&set.operator, &set.domain, &set.target, 0..=n - 1, opts)?;
    for w in widths.iter().skip(1) {
        let target = c0 * (w.n as f64).powf(-s);
        if !w.kind.is_upper() || w.value > target * (1.0 + 1e-12) {
            return Err(Error::Premise {
                n: w.n,
                detail: format!(
                    "width bound {:e} ({:?}) does not certify ≤ {target:e}",
                    w.value, w.kind
                ),
            });
        }
    }
    let (norm, _) = operator_norm_upper(&set.operator, &set.domain, &set.target)?;
    let c0_prime = c0.max(norm);
    let c = c0_prime * (s * (1.0 + 1.0 / E)).exp();
    let exponent = p.euclidean_distortion_exponent() - s;
    let trace = greedy_steps(&set.points, &set.target, 3 * n)?;
    Ok(BoundReport::compare(
        TheoremId::Cor35Lp,
        &set.descriptor(),
        n,
        Estimate::exact(sigma_at(&trace, 3 * n - 1)),
        Estimate::exact(c * 3.0 * E * E * (n as f64).powf(exponent)),
    )
    .with_constant(
        "C0",
        format!("caller-supplied, d_k ≤ C0·k^-s certified for 1 ≤ k < {n}"),
    )
    .with_constant(
        "C0'",
        format!("max(C0, ‖T‖ upper bound {norm}) = {c0_prime}"),
    )
    .with_constant("C", format!("C0'·e^(s(1+1/e)) = {c}"))
    .with_constant("3e^2", format!("{}", 3.0 * E * E))
    .with_constant("s", "caller-supplied decay exponent"))
}

/// The 2n bound together with what the orthonormal lift audit found.
#[derive(Clone, Debug)]
pub struct ThmTwoNOutcome {
    pub report: BoundReport,
    /// e_k with T e_k = f_k, when the audit passed.
    pub lifts: Option<Vec<Vector>>,
    pub gram_deviation: Option<f64>,
}

/// σ_{2n−1} ≤ e√2 Γₙ(X)(∏_{k<n} d_k(T))^{1/n} for the image of the ℓ₂ ball.
///
/// The argument needs orthonormal preimages of the greedy elements; when the
/// surrogate does not provide them the report is inconclusive.
pub fn verify_thm2n(set: &ImageSet, n: usize, opts: &WidthOptions) -> Result<ThmTwoNOutcome> {
    require_n(n)?;
    if !set.domain.is_lp(2.0) {
        return Err(Error::config("the 2n bound needs an ℓ₂ domain"));
    }
    let trace = greedy_steps(&set.points, &set.target, 2 * n)?;
    let gamma_x = gamma_n_of_space(&set.target, n);
    let widths = operator_widths(set, n, opts)?;
    let rhs = scaled(E * SQRT_2, product(gamma_x, geometric_mean(&widths)));
    let report = BoundReport::compare(
        TheoremId::Thm2n,
        &set.descriptor(),
        n,
        Estimate::exact(sigma_at(&trace, 2 * n - 1)),
        rhs,
    )
    .with_constant("e*sqrt2", format!("{}", E * SQRT_2))
    .with_constant("Gamma_n(X)", gamma_text(gamma_x))
    .with_constant(
        "widths",
        format!("{:?}", widths.iter().map(|w| w.kind).collect::<Vec<_>>()),
    );
    Ok(
        match orthonormal_lift(&set.operator, &trace, LIFT_AUDIT_TOL) {
            Ok(lifts) => {
                let deviation = linalg::gram_deviation(&lifts);
                ThmTwoNOutcome {
                    report,
                    lifts: Some(lifts),
                    gram_deviation: Some(deviation),
                }
            }
            Err(Error::Lift(detail)) => ThmTwoNOutcome {
                report: report.inconclusive(format!("not applicable on this surrogate: {detail}")),
                lifts: None,
                gram_deviation: None,
            },
            Err(e) => return Err(e),
        },
    )
}

/// The scaled canonical basis {(k+1)^{−α}u_k} in ℓ_q^m.
#[derive(Clone, Debug)]
pub struct DalphaExample {
    /// max_n |σₙ − (n+1)^{−α}| against [`DALPHA_TOL`].
    pub report: BoundReport,
    pub sigmas: Vec<f64>,
    pub expected: Vec<f64>,
    /// (n, σ_{3n−1}·n^α) for every n with 3n ≤ n_max.
    pub sharpness: Vec<(usize, f64)>,
}

pub fn dalpha_points(alpha: f64, m: usize) -> Vec<Vector> {
    (0..m)
        .map(|k| {
            let mut u = Vector::zeros(m);
            u[k] = ((k + 1) as f64).powf(-alpha);
            u
        })
        .collect()
}

pub fn run_example_dalpha(alpha: f64, q: f64, m: usize, n_max: usize) -> Result<DalphaExample> {
    if !(q > 2.0) {
        return Err(Error::config(format!("the example needs q > 2, got {q}")));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::config("alpha must be positive and finite"));
    }
    if n_max == 0 || m < n_max {
        return Err(Error::config(format!(
            "need 1 ≤ n_max ≤ m, got n_max = {n_max}, m = {m}"
        )));
    }
    let space = NormedSpace::lp(m, q)?;
    let points = dalpha_points(alpha, m);
    let trace = greedy_steps(&points, &space, n_max)?;
    let sigmas: Vec<f64> = (0..n_max).map(|k| sigma_at(&trace, k)).collect();
    let expected: Vec<f64> = (0..n_max).map(|k| ((k + 1) as f64).powf(-alpha)).collect();
    let error = sigmas
        .iter()
        .zip(&expected)
        .map(|(s, e)| (s - e).abs())
        .fold(0.0, f64::max);
    let sharpness = (1..)
        .take_while(|&n| 3 * n <= n_max)
        .map(|n| (n, sigmas[3 * n - 1] * (n as f64).powf(alpha)))
        .collect();
    let report = BoundReport::compare(
        TheoremId::ExampleDalpha,
        &format!("dalpha|{alpha}|{q}|{m}|{n_max}"),
        n_max,
        Estimate::exact(error),
        Estimate::exact(DALPHA_TOL),
    )
    .with_tolerance(0.0)
    .with_constant(
        "tolerance",
        format!("{DALPHA_TOL:e} on max |σₙ − (n+1)^-α|"),
    );
    Ok(DalphaExample {
        report,
        sigmas,
        expected,
        sharpness,
    })
}
