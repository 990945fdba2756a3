//! A step-by-step numerical replay of the dyadic width-decay argument behind
//! the power-law bound, recording every displayed inequality with its slack.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::LN_2;
use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{john_ellipsoid, tilted_norm};
use crate::greedy::{run_greedy_on_points, GreedyOptions};
use crate::linalg::{self, Matrix, Vector};
use crate::sampling::derive_seed;
use crate::spaces::{Norm, NormedSpace};
use crate::subspaces::{dist_to_subspace, gram_schmidt, orthogonal_project, Subspace};
use crate::widths::{coordinate_subspace, minimax_subspace, EstimateKind};

use super::Thm31Params;

/// Tags of the displayed inequalities, in the order the argument uses them.
pub const TRACE_TAGS: [&str; 12] = [
    "kol", "k-01", "k-02", "k-03", "d", "k-04", "k-05", "com", "k-31", "k-32", "k-33", "log",
];
/// A check fails when its slack falls below −TRACE_TOL.
pub const TRACE_TOL: f64 = 1e-7;
/// Fraction of a check's natural scale below which differences count as rounding.
const SCALE_FLOOR: f64 = 1e-6;
/// Singular values of unit-scale block generators below this are rounding.
const BLOCK_RANK_TOL: f64 = 1e-9;
const SPAN_TOL: f64 = 1e-10;
const MAX_LEVEL: usize = 10;

/// How the near-optimal subspaces T_k with dim T_k ≤ 2^k are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Subgradient minimax from several starts.
    Minimax,
    /// Spans of the coordinates on which the points are largest.
    Leading,
    /// Caller-supplied T_0, …, T_{n−1}.
    Explicit(Vec<Subspace>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceOptions {
    pub strategy: Strategy,
    pub restarts: usize,
    pub seed: u64,
    /// Sample size of the John ellipsoid on Y when no vertex description exists.
    pub ellipsoid_samples: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            strategy: Strategy::Minimax,
            restarts: 4,
            seed: 0,
            ellipsoid_samples: 2000,
        }
    }
}

/// Which case of the block decomposition the instance falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Branch {
    /// h₁ > 0: a leading block bounded by the norms of the f's.
    Step2,
    /// h₁ = 0 and some h_k > 0.
    Step3,
    /// h₁ = … = hₙ = 0: one block, no logarithmic factor.
    AllZero,
    /// Fewer than 2ⁿ greedy elements exist; σ vanishes from some index on.
    Exhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Relation {
    AtMost,
    Equal,
}

/// One recorded inequality or identity.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceCheck {
    pub tag: String,
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// lhs and rhs are natural logarithms.
    pub log_domain: bool,
    /// Relative margin; negative when the relation is violated.
    pub slack: f64,
}

impl TraceCheck {
    pub fn holds(&self) -> bool {
        self.slack >= -TRACE_TOL
    }
}

/// Rows [start, end) of the block basis, bounded through dist_e(f, Q(V_k)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceBlock {
    pub start: usize,
    pub end: usize,
    /// k of the bounding subspace Q(V_k); none for the leading block, bounded by ‖f‖_e.
    pub bounding_level: Option<usize>,
    /// The block bound carries the factor 2^{−2s·decay}.
    pub decay: usize,
}

impl TraceBlock {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProofTrace31 {
    pub n: usize,
    /// N = 2ⁿ.
    pub big_n: usize,
    /// Greedy elements available among the first N, equal to N unless exhausted.
    pub selected: usize,
    pub branch: Branch,
    pub params: Thm31Params,
    /// C₀ + ε: the achieved width decay constant of the subspaces used.
    pub c_eff: f64,
    pub epsilon: f64,
    /// A = C₁2^{μ(n+1)}.
    pub a: f64,
    /// Banach–Mazur bound of the tilted norm on Y.
    pub lambda: f64,
    pub lambda_kind: EstimateKind,
    pub t_dims: Vec<usize>,
    /// sup_{x∈K} dist(x, T_k).
    pub t_achieved: Vec<f64>,
    /// dim V_k for k = 1..n.
    pub v_dims: Vec<usize>,
    pub y_dim: usize,
    /// dist(f_ℓ, V_k)_X, row ℓ, column k−1.
    pub approximation_errors: Vec<Vec<f64>>,
    /// h_k = dim Q(V_k) for k = 1..n.
    pub h: Vec<usize>,
    /// The indices m_1 = 1 < m_2 < … < m_L where h changes.
    pub runs: Vec<usize>,
    pub blocks: Vec<TraceBlock>,
    pub sigmas: Vec<f64>,
    pub log_m: f64,
    pub log2_u: f64,
    pub checks: Vec<TraceCheck>,
}

impl ProofTrace31 {
    pub fn min_slack(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn first_failure(&self) -> Option<&TraceCheck> {
        self.checks.iter().find(|c| !c.holds())
    }

    /// Tags from [`TRACE_TAGS`] without a recorded check.
    pub fn missing_tags(&self) -> Vec<&'static str> {
        TRACE_TAGS
            .iter()
            .copied()
            .filter(|t| !self.checks.iter().any(|c| c.tag == *t))
            .collect()
    }
}

fn relative_slack(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let d = lhs.abs().max(rhs.abs()).max(SCALE_FLOOR * scale);
    if d == 0.0 {
        0.0
    } else {
        (rhs - lhs) / d
    }
}

/// Slack of ln L ≤ ln R on the relative scale of L and R.
fn log_slack(ln_lhs: f64, ln_rhs: f64) -> f64 {
    if ln_lhs == f64::NEG_INFINITY {
        return 1.0;
    }
    let delta = ln_lhs - ln_rhs;
    if delta <= 0.0 {
        1.0 - delta.exp()
    } else {
        (-delta).exp() - 1.0
    }
}

#[derive(Default)]
struct Checks(Vec<TraceCheck>);

impl Checks {
    fn push(
        &mut self,
        tag: &str,
        label: String,
        (lhs, rhs): (f64, f64),
        relation: Relation,
        log_domain: bool,
        slack: f64,
    ) {
        self.0.push(TraceCheck {
            tag: tag.to_string(),
            label,
            lhs,
            rhs,
            relation,
            log_domain,
            slack,
        });
    }

    fn at_most(&mut self, tag: &str, label: String, lhs: f64, rhs: f64, scale: f64) {
        let slack = relative_slack(lhs, rhs, scale);
        self.push(tag, label, (lhs, rhs), Relation::AtMost, false, slack);
    }

    fn equal(&mut self, tag: &str, label: String, a: f64, b: f64, scale: f64) {
        let slack = -relative_slack(a, b, scale).abs();
        self.push(tag, label, (a, b), Relation::Equal, false, slack);
    }

    fn log_at_most(&mut self, tag: &str, label: String, ln_lhs: f64, ln_rhs: f64) {
        let slack = log_slack(ln_lhs, ln_rhs);
        self.push(tag, label, (ln_lhs, ln_rhs), Relation::AtMost, true, slack);
    }

    fn log_equal(&mut self, tag: &str, label: String, ln_a: f64, ln_b: f64) {
        let slack = if ln_a == f64::NEG_INFINITY && ln_b == f64::NEG_INFINITY {
            0.0
        } else {
            -(1.0 - (-(ln_a - ln_b).abs()).exp())
        };
        self.push(tag, label, (ln_a, ln_b), Relation::Equal, true, slack);
    }
}

fn worst_distance(points: &[Vector], v: &Subspace) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max(dist_to_subspace(p, v)?.value);
    }
    Ok(worst)
}

/// Columns of an orthonormal basis for the singular directions above `abs_tol`.
fn span_above(m: &Matrix, abs_tol: f64) -> Vec<Vector> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Vec::new();
    }
    let dec = linalg::svd(m);
    let r = dec.singular_values.iter().filter(|&&s| s > abs_tol).count();
    (0..r).map(|j| dec.u.column(j).into_owned()).collect()
}

/// Removes the span of the orthonormal `w` from every column, twice.
fn deflate(m: &Matrix, w: &[Vector]) -> Matrix {
    let mut r = m.clone();
    for _ in 0..2 {
        for x in w {
            let c = x.transpose() * &r;
            r -= x * c;
        }
    }
    r
}

fn ln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn build_t(
    points: &[Vector],
    space: &NormedSpace,
    n: usize,
    rank: usize,
    opts: &TraceOptions,
) -> Result<Vec<Subspace>> {
    let m = space.dim();
    let mut ts = Vec::with_capacity(n);
    match &opts.strategy {
        Strategy::Explicit(list) => {
            if list.len() != n {
                return Err(Error::config(format!(
                    "expected {n} explicit subspaces, got {}",
                    list.len()
                )));
            }
            for (k, t) in list.iter().enumerate() {
                check_dim(m, t.ambient_dim())?;
                if t.dim() > 1 << k {
                    return Err(Error::config(format!(
                        "T_{k} has dimension {} > 2^{k}",
                        t.dim()
                    )));
                }
                ts.push(Subspace::new(t.basis().clone(), space.clone())?);
            }
        }
        Strategy::Leading => {
            for k in 0..n {
                ts.push(coordinate_subspace(points, space, (1usize << k).min(rank))?);
            }
        }
        Strategy::Minimax => {
            for k in 0..n {
                let dim = (1usize << k).min(rank);
                ts.push(
                    minimax_subspace(
                        points,
                        space,
                        dim,
                        opts.restarts,
                        derive_seed(opts.seed, k as u64),
                    )?
                    .0,
                );
            }
        }
    }
    Ok(ts)
}

/// Replays the argument and fails on the first check with slack below −[`TRACE_TOL`].
pub fn trace_proof_31(
    points: &[Vector],
    space: &NormedSpace,
    params: &Thm31Params,
    n: usize,
    opts: &TraceOptions,
) -> Result<ProofTrace31> {
    let trace = trace_proof_31_unchecked(points, space, params, n, opts)?;
    if let Some(c) = trace.first_failure() {
        return Err(Error::TraceFailure {
            tag: c.tag.clone(),
            detail: format!(
                "{}: lhs {:e}, rhs {:e}, slack {:e}",
                c.label, c.lhs, c.rhs, c.slack
            ),
        });
    }
    Ok(trace)
}

/// Replays the argument and records every check, whether or not it holds.
pub fn trace_proof_31_unchecked(
    points: &[Vector],
    space: &NormedSpace,
    params: &Thm31Params,
    n: usize,
    opts: &TraceOptions,
) -> Result<ProofTrace31> {
    params.validate()?;
    if n == 0 || n > MAX_LEVEL {
        return Err(Error::config(format!(
            "the trace needs 1 ≤ n ≤ {MAX_LEVEL}, got {n}"
        )));
    }
    if points.is_empty() {
        return Err(Error::config("the set is empty"));
    }
    let m = space.dim();
    for p in points {
        check_dim(m, p.len())?;
    }
    let big_n = 1usize << n;
    let nf = big_n as f64;
    let s = params.s;
    let mut checks = Checks::default();

    // Step 1: near-optimal subspaces and their sums.
    let rank = linalg::numerical_rank(&linalg::from_columns(points, m), 1e-12);
    let ts = build_t(points, space, n, rank, opts)?;
    let t_achieved = ts
        .iter()
        .map(|t| worst_distance(points, t))
        .collect::<Result<Vec<_>>>()?;
    let d0 = points
        .iter()
        .map(|p| space.norm_unchecked(p))
        .fold(0.0, f64::max);
    let c_eff = t_achieved
        .iter()
        .enumerate()
        .map(|(k, &d)| d * 2f64.powf(s * k as f64))
        .fold(params.c0.max(d0), f64::max);
    let decay = |k: usize| 2f64.powf(-s * (k as f64 - 1.0));

    let mut vs: Vec<Subspace> = Vec::with_capacity(n);
    let mut generators: Vec<Vector> = Vec::new();
    for t in &ts {
        generators.extend(t.basis_vectors());
        vs.push(Subspace::spanned_by(&generators, space.clone(), SPAN_TOL)?);
    }
    for k in 1..=n {
        let sup_v = worst_distance(points, &vs[k - 1])?;
        checks.at_most(
            "kol",
            format!("sup dist(K, V_{k}) ≤ sup dist(K, T_{})", k - 1),
            sup_v,
            t_achieved[k - 1],
            c_eff,
        );
        checks.at_most(
            "kol",
            format!("sup dist(K, T_{}) ≤ (C0+ε)·2^(−s·{})", k - 1, k - 1),
            t_achieved[k - 1],
            c_eff * decay(k),
            c_eff,
        );
    }

    // The greedy elements f_0, …, f_{N−1}, and σ up to 2N.
    let steps = (2 * big_n).min(points.len());
    let greedy = run_greedy_on_points(points, space, &GreedyOptions::new(steps))?;
    let sigmas = greedy.sigmas.clone();
    if sigmas.first().is_none_or(|&s0| s0 == 0.0) {
        return Err(Error::config("the set is {0}"));
    }
    let selected = big_n.min(greedy.selected.len());
    let fs = &greedy.selected[..selected];
    let exhausted = selected < big_n;

    let mut approximation_errors = Vec::with_capacity(selected);
    let mut approximants: Vec<Vec<Vector>> = Vec::with_capacity(selected);
    for (l, f) in fs.iter().enumerate() {
        let mut errs = Vec::with_capacity(n);
        let mut gs = Vec::with_capacity(n);
        for k in 1..=n {
            let d = dist_to_subspace(f, &vs[k - 1])?;
            checks.at_most(
                "k-01",
                format!(
                    "dist(f_{l}, V_{k}) = ‖f_{l} − g_{l}^{k}‖ ≤ (C0+ε)·2^(−s·{})",
                    k - 1
                ),
                d.value,
                c_eff * decay(k),
                c_eff,
            );
            errs.push(d.value);
            gs.push(d.approximant(&vs[k - 1]));
        }
        approximation_errors.push(errs);
        approximants.push(gs);
    }

    // Step 2: the tilted Euclidean norm on Y = V_n + span{f}.
    let mut y_gens = vs[n - 1].basis_vectors();
    y_gens.extend(fs.iter().cloned());
    let y = Subspace::spanned_by(&y_gens, space.clone(), SPAN_TOL)?;
    let y_dim = y.dim();
    let sandwich = john_ellipsoid(&y, opts.ellipsoid_samples, opts.seed)?;
    let tilted = tilted_norm(&y, &sandwich)?;
    let lambda = tilted.lambda;
    let metric = tilted.space;
    let gram = match metric.norm_kind() {
        Norm::WeightedEuclidean(w) => w.gram().clone(),
        Norm::Lp(_) => Matrix::identity(y_dim, y_dim),
    };
    let a = params.c1 * 2f64.powf(params.mu * (n as f64 + 1.0));
    let frame = y.orthonormal().clone();
    let coord = |v: &Vector| frame.tr_mul(v);
    let enorm = |c: &Vector| metric.norm_unchecked(c);
    let escale = c_eff * lambda.max(1.0);

    checks.at_most(
        "k-02",
        "d(Y, ℓ₂) ≤ λ ≤ A = C1·2^(μ(n+1))".into(),
        lambda,
        a,
        1.0,
    );
    if !exhausted {
        checks.at_most("k-02", "2^n ≤ dim Y".into(), nf, y_dim as f64, 1.0);
    }
    checks.at_most(
        "k-02",
        "dim Y ≤ 2^(n+1) − 1".into(),
        y_dim as f64,
        2.0 * nf - 1.0,
        1.0,
    );
    for (l, f) in fs.iter().enumerate() {
        let mut probes = Vec::with_capacity(n + 1);
        probes.push((format!("f_{l}"), f.clone()));
        for (k, g) in approximants[l].iter().enumerate() {
            probes.push((format!("f_{l} − g_{l}^{}", k + 1), f - g));
        }
        for (name, v) in probes {
            let x = space.norm_unchecked(&v);
            let e = enorm(&coord(&v));
            checks.at_most("k-02", format!("‖{name}‖_X ≤ ‖{name}‖_e"), x, e, escale);
            checks.at_most(
                "k-02",
                format!("‖{name}‖_e ≤ λ‖{name}‖_X"),
                e,
                lambda * x,
                escale,
            );
        }
    }

    // The e-orthonormal basis φ of span{f} and the projection Q onto it.
    let fc: Vec<Vector> = fs.iter().map(&coord).collect();
    let gs = gram_schmidt(&fc, &metric, false)?;
    if gs.orthonormal.len() != selected {
        return Err(Error::Rank(format!(
            "{} of {selected} greedy elements are independent in the tilted norm",
            gs.orthonormal.len()
        )));
    }
    let r = selected;
    let phi = linalg::from_columns(&gs.orthonormal, y_dim);
    let phi_g = phi.transpose() * &gram;
    let project = |c: &Vector| &phi * (&phi_g * c);
    let coefficients = &gs.coefficients;

    // Block-orthonormal basis x_j adapted to Q(V_1) ⊆ … ⊆ Q(V_n), in φ coordinates.
    let mut w: Vec<Vector> = Vec::with_capacity(r);
    let mut h = Vec::with_capacity(n);
    for v in &vs {
        let b = frame.tr_mul(v.orthonormal());
        let images = &phi_g * b;
        let top = linalg::singular_values(&images)
            .first()
            .copied()
            .unwrap_or(0.0);
        if top > BLOCK_RANK_TOL {
            let u = linalg::from_columns(&span_above(&images, BLOCK_RANK_TOL * top.max(1.0)), r);
            let fresh = span_above(&deflate(&u, &w), BLOCK_RANK_TOL);
            w.extend(fresh);
        }
        h.push(w.len());
    }
    let complement = span_above(&deflate(&Matrix::identity(r, r), &w), 0.5);
    w.extend(complement);
    if w.len() != r {
        return Err(Error::Rank(format!(
            "block basis has {} vectors for a span of dimension {r}",
            w.len()
        )));
    }
    let wm = linalg::from_columns(&w, r);
    // Entry (j, ℓ) is x_j(f_ℓ); row j is k_j.
    let x = wm.transpose() * coefficients.transpose();

    // Step 3: distances to the projected subspaces.
    let q_subspaces: Vec<Subspace> = (0..n)
        .map(|k| Subspace::new(&phi * wm.columns(0, h[k]), metric.clone()))
        .collect::<Result<_>>()?;
    let mut dist_e = Vec::with_capacity(r);
    for (l, f) in fc.iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for k in 1..=n {
            let q = &q_subspaces[k - 1];
            let near = orthogonal_project(q, &metric, f)?;
            let dist = enorm(&(f - near));
            let g = coord(&approximants[l][k - 1]);
            let b = enorm(&(f - project(&g)));
            let c = enorm(&project(&(f - &g)));
            let d = enorm(&(f - &g));
            checks.at_most(
                "k-03",
                format!("dist(f_{l}, Q(V_{k}))_e ≤ ‖f_{l} − Q g_{l}^{k}‖_e"),
                dist,
                b,
                escale,
            );
            checks.equal(
                "k-03",
                format!("‖f_{l} − Q g_{l}^{k}‖_e = ‖Q(f_{l} − g_{l}^{k})‖_e"),
                b,
                c,
                escale,
            );
            checks.at_most(
                "k-03",
                format!("‖Q(f_{l} − g_{l}^{k})‖_e ≤ ‖f_{l} − g_{l}^{k}‖_e"),
                c,
                d,
                escale,
            );
            checks.at_most(
                "k-03",
                format!("‖f_{l} − g_{l}^{k}‖_e ≤ (C0+ε)·A·2^(−s·{})", k - 1),
                d,
                c_eff * a * decay(k),
                escale,
            );
            row.push(dist);
        }
        dist_e.push(row);
    }

    // (d): the triangular diagonal dominates σ.
    for (l, f) in fs.iter().enumerate() {
        let prior = Subspace::from_vectors(&fs[..l], space.clone())?;
        let dist_x = dist_to_subspace(f, &prior)?.value;
        let diag = coefficients[(l, l)].abs();
        checks.at_most(
            "d",
            format!("dist(f_{l}, F_{l})_X ≤ dist(f_{l}, F_{l})_e = |φ_{l}(f_{l})|"),
            dist_x,
            diag,
            escale,
        );
        checks.equal(
            "d",
            format!("dist(f_{l}, F_{l})_X = σ_{l}"),
            dist_x,
            sigmas[l],
            c_eff,
        );
        let above = (l + 1..r)
            .map(|j| coefficients[(l, j)].abs())
            .fold(0.0, f64::max);
        checks.equal(
            "d",
            format!("φ_j(f_{l}) = 0 for j > {l}"),
            above,
            0.0,
            escale,
        );
    }

    // Blocks of rows between consecutive distinct values of h.
    let mut runs = alloc::vec![1usize];
    for k in 2..=n {
        if h[k - 1] != h[k - 2] {
            runs.push(k);
        }
    }
    let big_l = runs.len();
    let mut blocks = Vec::new();
    if h[0] > 0 {
        blocks.push(TraceBlock {
            start: 0,
            end: h[0],
            bounding_level: None,
            decay: 0,
        });
    }
    for i in 1..big_l {
        blocks.push(TraceBlock {
            start: h[runs[i - 1] - 1],
            end: h[runs[i] - 1],
            bounding_level: Some(runs[i] - 1),
            decay: runs[i] - 2,
        });
    }
    blocks.push(TraceBlock {
        start: h[runs[big_l - 1] - 1],
        end: r,
        bounding_level: Some(n),
        decay: n - 1,
    });
    blocks.retain(|b| !b.is_empty());
    let branch = if exhausted {
        Branch::Exhausted
    } else if h.iter().all(|&v| v == 0) {
        Branch::AllZero
    } else if h[0] == 0 {
        Branch::Step3
    } else {
        Branch::Step2
    };
    let bound_dist = |l: usize, b: &TraceBlock| match b.bounding_level {
        None => enorm(&fc[l]),
        Some(k) => dist_e[l][k - 1],
    };
    let bound_name = |b: &TraceBlock| match b.bounding_level {
        None => "‖f‖_e".to_string(),
        Some(k) => format!("dist(f, Q(V_{k}))_e"),
    };
    let row_sq = |j: usize| x.row(j).norm_squared();
    let block_sq =
        |l: usize, b: &TraceBlock| (b.start..b.end).map(|j| x[(j, l)] * x[(j, l)]).sum::<f64>();

    let hn = h[n - 1];
    for l in 0..r {
        let tail = (hn..r).map(|j| x[(j, l)] * x[(j, l)]).sum::<f64>();
        checks.equal(
            "k-04",
            format!("Σ_(j≥h_n) |x_j(f_{l})|² = dist(f_{l}, Q(V_n))_e²"),
            tail,
            dist_e[l][n - 1].powi(2),
            escale * escale,
        );
        let norm_sq = enorm(&fc[l]).powi(2);
        checks.at_most(
            "k-05",
            format!("|x_0(f_{l})|² ≤ ‖f_{l}‖_e²"),
            x[(0, l)].powi(2),
            norm_sq,
            escale * escale,
        );
        for b in &blocks {
            checks.at_most(
                "k-05",
                format!(
                    "Σ_(j∈[{},{})) |x_j(f_{l})|² ≤ {}²",
                    b.start,
                    b.end,
                    bound_name(b)
                ),
                block_sq(l, b),
                bound_dist(l, b).powi(2),
                escale * escale,
            );
        }
    }

    // (com): determinant, Hadamard and AM-GM.
    let ln_prod_sigma: f64 = (0..big_n)
        .map(|j| ln(sigmas.get(j).copied().unwrap_or(0.0)))
        .sum();
    let ln_diag: f64 = (0..r).map(|j| ln(coefficients[(j, j)].abs())).sum();
    let ln_det_phi = linalg::log_abs_det(coefficients);
    let ln_det_x = linalg::log_abs_det(&x);
    let ln_rows: f64 = (0..r).map(|j| 0.5 * ln(row_sq(j))).sum();
    checks.log_at_most("com", "∏σ_j ≤ ∏|φ_j(f_j)|".into(), ln_prod_sigma, ln_diag);
    checks.log_equal(
        "com",
        "∏|φ_j(f_j)| = |det[φ_j(f_ℓ)]|".into(),
        ln_diag,
        ln_det_phi,
    );
    checks.log_equal(
        "com",
        "|det[φ_j(f_ℓ)]| = |det[x_j(f_ℓ)]|".into(),
        ln_det_phi,
        ln_det_x,
    );
    checks.log_at_most(
        "com",
        "|det[x_j(f_ℓ)]| ≤ ∏‖k_j‖ (Hadamard)".into(),
        ln_det_x,
        ln_rows,
    );
    let mut ln_amgm = 0.0;
    for b in &blocks {
        let size = b.len() as f64;
        let sum: f64 = (b.start..b.end).map(row_sq).sum();
        let lhs: f64 = (b.start..b.end).map(|j| ln(row_sq(j))).sum();
        let rhs = size * ln(sum / size);
        checks.log_at_most(
            "com",
            format!(
                "∏_(j∈[{},{})) ‖k_j‖² ≤ (Σ‖k_j‖²/{})^{} (AM-GM)",
                b.start,
                b.end,
                b.len(),
                b.len()
            ),
            lhs,
            rhs,
        );
        ln_amgm += rhs;
    }
    checks.log_at_most(
        "com",
        "∏‖k_j‖² ≤ ∏_blocks (Σ‖k_j‖²/|B|)^|B|".into(),
        2.0 * ln_rows,
        ln_amgm,
    );

    // (k-31): block sums and the product bound.
    let nb_f = r as f64;
    let ln_c = c_eff.ln();
    let ln_a = a.ln();
    let mut ln_block_bound = 0.0;
    let mut log_m = 0.0;
    let mut log2_u = 0.0;
    for b in &blocks {
        let size = b.len() as f64;
        let rows: f64 = (b.start..b.end).map(row_sq).sum();
        let cols: f64 = (0..r).map(|l| bound_dist(l, b).powi(2)).sum();
        let cap = nb_f * (c_eff * a).powi(2) * 2f64.powf(-2.0 * s * b.decay as f64);
        let scale = nb_f * escale * escale;
        checks.at_most(
            "k-31",
            format!(
                "Σ_(j∈[{},{})) ‖k_j‖² ≤ Σ_ℓ {}²",
                b.start,
                b.end,
                bound_name(b)
            ),
            rows,
            cols,
            scale,
        );
        if b.bounding_level.is_none() {
            checks.at_most(
                "k-31",
                "Σ_ℓ ‖f_ℓ‖_e² ≤ N·A²·d_0²".into(),
                cols,
                nb_f * (a * d0).powi(2),
                scale,
            );
            checks.at_most("k-31", "d_0 ≤ C0+ε".into(), d0, c_eff, c_eff);
        }
        checks.at_most(
            "k-31",
            format!("Σ_ℓ {}² ≤ N·(C0+ε)²·A²·2^(−2s·{})", bound_name(b), b.decay),
            cols,
            cap,
            scale,
        );
        ln_block_bound += size * (cap / size).ln();
        log_m += size * (nb_f / size).ln();
        log2_u += -2.0 * s * b.decay as f64 * size;
    }
    let ln_u = log2_u * LN_2;
    let ln_product_form = log_m + 2.0 * nb_f * (ln_a + ln_c) + ln_u;
    checks.log_at_most(
        "k-31",
        "∏_blocks (Σ‖k_j‖²/|B|)^|B| ≤ ∏_blocks (cap_B/|B|)^|B|".into(),
        ln_amgm,
        ln_block_bound,
    );
    checks.log_equal(
        "k-31",
        "∏_blocks (cap_B/|B|)^|B| = M·A^(2N)·(C0+ε)^(2N)·U".into(),
        ln_block_bound,
        ln_product_form,
    );
    checks.log_at_most(
        "k-31",
        "(∏σ_j)² ≤ M·A^(2N)·(C0+ε)^(2N)·U".into(),
        2.0 * ln_prod_sigma,
        ln_product_form,
    );

    // (k-32): M ≤ (#blocks)^N ≤ (L+1)^N ≤ (n+1)^N.
    let block_count = blocks.len() as f64;
    checks.log_at_most(
        "k-32",
        "M ≤ (#blocks)^N (weighted AM-GM)".into(),
        log_m,
        nb_f * block_count.ln(),
    );
    checks.at_most(
        "k-32",
        "#blocks ≤ L+1".into(),
        block_count,
        big_l as f64 + 1.0,
        1.0,
    );
    checks.at_most(
        "k-32",
        "L+1 ≤ n+1".into(),
        big_l as f64 + 1.0,
        n as f64 + 1.0,
        1.0,
    );
    checks.log_at_most(
        "k-32",
        "M ≤ (n+1)^N".into(),
        log_m,
        nb_f * (n as f64 + 1.0).ln(),
    );

    // (k-33): the dyadic exponent of U.
    let two_s = 2.0 * s;
    let h_last = h[runs[big_l - 1] - 1] as f64;
    let middle: f64 = (1..big_l)
        .map(|i| (runs[i] as f64 - 2.0) * (h[runs[i] - 1] as f64 - h[runs[i - 1] - 1] as f64))
        .sum();
    let regrouped = two_s * (-(n as f64 - 1.0) * nb_f + (n as f64 - 1.0) * h_last - middle);
    let exponent_scale = two_s * nf * n as f64;
    checks.equal(
        "k-33",
        "log₂U = 2s[−(n−1)N + (n−1)h_(m_L) − Σ(m_i−2)(h_(m_i) − h_(m_(i−1)))]".into(),
        log2_u,
        regrouped,
        exponent_scale,
    );
    let intermediate = two_s * (-(n as f64 - 1.0) * nb_f + 2.0 * nf - 2.0);
    checks.at_most(
        "k-33",
        "log₂U ≤ 2s[−(n−1)N + 2^(n+1) − 2]".into(),
        log2_u,
        intermediate,
        exponent_scale,
    );
    if !exhausted {
        checks.at_most(
            "k-33",
            "2s[−(n−1)N + 2^(n+1) − 2] ≤ 2s[−(n−3)N]".into(),
            intermediate,
            two_s * (-(n as f64 - 3.0) * nf),
            exponent_scale,
        );
    }

    // (log): from the product bound to single indices.
    let ln_chain = nf * (n as f64 + 1.0).ln()
        + 2.0 * nf * (ln_a + ln_c)
        + two_s * (3.0 - n as f64) * nf * LN_2;
    checks.log_at_most(
        "log",
        "(∏σ_j)² ≤ (n+1)^N A^(2N) (C0+ε)^(2N) 2^(2s(3−n)N)".into(),
        2.0 * ln_prod_sigma,
        ln_chain,
    );
    let sigma_last = sigmas.get(big_n - 1).copied().unwrap_or(0.0);
    checks.log_at_most(
        "log",
        "σ_(N−1)^N ≤ ∏σ_j".into(),
        nf * ln(sigma_last),
        ln_prod_sigma,
    );
    let derived = c_eff
        * params.c1
        * (n as f64 + 1.0).sqrt()
        * 2f64.powf((n as f64 + 1.0) * params.mu)
        * 2f64.powf((3.0 - n as f64) * s);
    checks.at_most(
        "log",
        "σ_(N−1) ≤ (C0+ε)·C1·√(n+1)·2^((n+1)μ)·2^((3−n)s)".into(),
        sigma_last,
        derived,
        c_eff,
    );
    let with_c = Thm31Params {
        c0: c_eff,
        ..*params
    };
    for j in big_n..2 * big_n {
        let sigma_j = sigmas.get(j).copied().unwrap_or(0.0);
        let rhs = with_c.bound(j);
        checks.at_most(
            "log",
            format!("σ_{j} ≤ σ_(N−1)"),
            sigma_j,
            sigma_last,
            c_eff,
        );
        checks.at_most(
            "log",
            format!("σ_{j} ≤ (C0+ε)·C1·√(n+1)·2^((n+1)μ)·2^((3−n)s)"),
            sigma_j,
            derived,
            c_eff,
        );
        if with_c.log_base == super::LogBase::Two {
            checks.at_most(
                "log",
                format!("(C0+ε)·C1·√(n+1)·2^((n+1)μ)·2^((3−n)s) ≤ bound({j})"),
                derived,
                rhs,
                c_eff,
            );
        }
        checks.at_most(
            "log",
            format!("σ_{j} ≤ (C0+ε)·C1·2^μ·16^s·√log(2·{j})·{j}^(μ−s)"),
            sigma_j,
            rhs,
            c_eff,
        );
    }

    Ok(ProofTrace31 {
        n,
        big_n,
        selected,
        branch,
        params: *params,
        c_eff,
        epsilon: c_eff - params.c0,
        a,
        lambda,
        lambda_kind: sandwich.lambda_kind,
        t_dims: ts.iter().map(Subspace::dim).collect(),
        t_achieved,
        v_dims: vs.iter().map(Subspace::dim).collect(),
        y_dim,
        approximation_errors,
        h,
        runs,
        blocks,
        sigmas,
        log_m,
        log2_u,
        checks: checks.0,
    })
}
