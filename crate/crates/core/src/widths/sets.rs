//! Widths of finite point sets: brute force in tiny dimensions, coordinate
//! subspaces, and an alternating minimax search over orthonormal frames.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use super::{EstimateKind, WidthEstimate, WidthMethod};
use crate::error::{check_dim, Error, Result};
use crate::greedy::{run_greedy_on_points, GreedyOptions};
use crate::linalg::{self, Matrix, Vector};
use crate::sampling::{derive_seed, gaussian_vector, rng};
use crate::spaces::{lp_norm, NormedSpace};
use crate::subspaces::{dist_to_subspace, Subspace};

const BRUTE_FORCE_MAX_DIM: usize = 4;
const BRUTE_FORCE_MAX_N: usize = 2;
const BRUTE_FORCE_MAX_POINTS: usize = 16;
const REFINE_CANDIDATES: usize = 4;
const REFINE_MAX_EVALS: usize = 4000;

/// Resolution of the brute-force subspace search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteForceGrid {
    /// Grid points per chart coordinate in [−1, 1].
    pub per_axis: usize,
    /// Cap on grid subspaces across all charts; `per_axis` shrinks to fit.
    pub max_subspaces: usize,
    /// Compass step below which a refined optimum counts as exact.
    pub resolution: f64,
}

impl Default for BruteForceGrid {
    fn default() -> Self {
        BruteForceGrid {
            per_axis: 9,
            max_subspaces: 6000,
            resolution: 1e-6,
        }
    }
}

fn check_points(points: &[Vector], space: &NormedSpace) -> Result<()> {
    if points.is_empty() {
        return Err(Error::config("point set is empty"));
    }
    for p in points {
        check_dim(space.dim(), p.len())?;
    }
    Ok(())
}

fn max_norm(points: &[Vector], space: &NormedSpace) -> f64 {
    points
        .iter()
        .map(|p| space.norm_unchecked(p))
        .fold(0.0, f64::max)
}

/// max_i dist(points_i, V), or infinity if some distance solve fails.
fn worst_distance(points: &[Vector], v: &Subspace) -> f64 {
    let mut worst = 0.0;
    for p in points {
        match dist_to_subspace(p, v) {
            Ok(d) => worst = f64::max(worst, d.value),
            Err(_) => return f64::INFINITY,
        }
    }
    worst
}

fn points_rank(points: &[Vector], m: usize) -> usize {
    linalg::numerical_rank(&linalg::from_columns(points, m), 1e-12)
}

/// Basis with identity rows on `chart` and free rows `params` (row-major) elsewhere.
fn chart_basis(m: usize, n: usize, chart: &[usize], params: &[f64]) -> Matrix {
    let mut b = Matrix::zeros(m, n);
    let mut free = 0;
    for i in 0..m {
        if let Some(j) = chart.iter().position(|&c| c == i) {
            b[(i, j)] = 1.0;
        } else {
            for j in 0..n {
                b[(i, j)] = params[free * n + j];
            }
            free += 1;
        }
    }
    b
}

/// d_n of a finite set by exhaustive search over charts of the Grassmannian.
///
/// Every n-dimensional subspace has a basis equal to the identity on some n
/// rows with all other entries in [−1, 1] (take rows of maximal volume), so
/// the charts cover all subspaces. The best grid points are refined by a
/// compass search; the result is exact when every refinement step shrinks
/// below the grid resolution.
pub fn brute_force_width(
    points: &[Vector],
    space: &NormedSpace,
    n: usize,
    grid: &BruteForceGrid,
) -> Result<WidthEstimate> {
    check_points(points, space)?;
    let m = space.dim();
    if m > BRUTE_FORCE_MAX_DIM || n > BRUTE_FORCE_MAX_N || points.len() > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::Regime(alloc::format!(
            "brute force needs m ≤ {BRUTE_FORCE_MAX_DIM}, n ≤ {BRUTE_FORCE_MAX_N} and at most \
             {BRUTE_FORCE_MAX_POINTS} points (got m = {m}, n = {n}, {} points)",
            points.len()
        )));
    }
    let exact = |value| WidthEstimate::new(n, value, EstimateKind::Exact, WidthMethod::BruteForce);
    if n == 0 {
        return Ok(exact(max_norm(points, space)));
    }
    if n >= points_rank(points, m) {
        return Ok(exact(0.0));
    }

    let mut charts = Vec::new();
    linalg::for_each_subset(m, n, |s| {
        charts.push(s.to_vec());
        true
    });
    let params = (m - n) * n;
    let per_chart = (grid.max_subspaces / charts.len()).max(1) as f64;
    let mut per_axis = grid.per_axis.max(2);
    while per_axis > 2 && (per_axis as f64).powi(params as i32) > per_chart {
        per_axis -= 1;
    }
    let spacing = 2.0 / (per_axis - 1) as f64;

    let evaluate = |chart: &[usize], x: &[f64]| -> f64 {
        match Subspace::new(chart_basis(m, n, chart, x), space.clone()) {
            Ok(v) => worst_distance(points, &v),
            Err(_) => f64::INFINITY,
        }
    };

    // (value, chart index, parameters), kept sorted and truncated.
    let mut best: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    let total = per_axis.pow(params as u32);
    for (ci, chart) in charts.iter().enumerate() {
        let mut x = vec![0.0; params];
        for idx in 0..total {
            let mut rest = idx;
            for xi in x.iter_mut() {
                *xi = -1.0 + spacing * (rest % per_axis) as f64;
                rest /= per_axis;
            }
            let val = evaluate(chart, &x);
            let pos = best.partition_point(|b| b.0 <= val);
            if pos < REFINE_CANDIDATES {
                best.insert(pos, (val, ci, x.clone()));
                best.truncate(REFINE_CANDIDATES);
            }
        }
    }

    let mut value = f64::INFINITY;
    let mut converged = true;
    for (start_val, ci, start) in best {
        let chart = &charts[ci];
        let mut x = start;
        let mut fx = start_val;
        let mut step = spacing / 2.0;
        let mut evals = 0;
        while step >= grid.resolution && evals < REFINE_MAX_EVALS {
            let mut improved = false;
            for k in 0..params {
                for dir in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[k] += dir * step;
                    let fy = evaluate(chart, &y);
                    evals += 1;
                    if fy < fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        converged &= step < grid.resolution;
        value = value.min(fx);
    }
    let kind = if converged {
        EstimateKind::Exact
    } else {
        EstimateKind::Upper
    };
    Ok(WidthEstimate::new(n, value, kind, WidthMethod::BruteForce))
}

/// Coordinates ordered by their largest magnitude over the points, ties by index.
fn coordinate_order(points: &[Vector], m: usize) -> Vec<usize> {
    let mut scores: Vec<(usize, f64)> = (0..m)
        .map(|i| (i, points.iter().map(|p| p[i].abs()).fold(0.0, f64::max)))
        .collect();
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scores.into_iter().map(|(i, _)| i).collect()
}

/// The span of the n coordinates on which the points are largest.
pub fn coordinate_subspace(points: &[Vector], space: &NormedSpace, n: usize) -> Result<Subspace> {
    check_points(points, space)?;
    let m = space.dim();
    let mut basis = Matrix::zeros(m, n.min(m));
    for (j, &i) in coordinate_order(points, m).iter().take(n).enumerate() {
        basis[(i, j)] = 1.0;
    }
    Subspace::new(basis, space.clone())
}

/// Upper bound on dₙ from the span of the n coordinates with the largest entries.
pub fn coordinate_subspace_width(
    points: &[Vector],
    space: &NormedSpace,
    n: usize,
) -> Result<WidthEstimate> {
    check_points(points, space)?;
    let m = space.dim();
    let upper = |value| {
        WidthEstimate::new(
            n,
            value,
            EstimateKind::Upper,
            WidthMethod::CoordinateSubspace,
        )
    };
    if n >= m {
        return Ok(upper(0.0));
    }
    let order = coordinate_order(points, m);
    if let Some(p) = space.exponent() {
        // In ℓ_p the best approximation copies the kept coordinates.
        let worst = points
            .iter()
            .map(|x| lp_norm(&order[n..].iter().map(|&i| x[i]).collect::<Vec<_>>(), p))
            .fold(0.0, f64::max);
        return Ok(upper(worst));
    }
    let v = coordinate_subspace(points, space, n)?;
    let mut worst = 0.0;
    for p in points {
        worst = f64::max(worst, dist_to_subspace(p, &v)?.value);
    }
    Ok(upper(worst))
}

const MINIMAX_MAX_ITER: usize = 300;
const MINIMAX_MIN_STEP: f64 = 1e-7;
const ACTIVE_TOL: f64 = 1e-6;

struct Evaluation {
    value: f64,
    /// Descent direction Σ_active b cᵀ in orthonormal-frame coordinates.
    direction: Matrix,
}

fn evaluate_frame(points: &[Vector], q: &Matrix, space: &NormedSpace) -> Result<Evaluation> {
    let v = Subspace::new(q.clone(), space.clone())?;
    let mut results = Vec::with_capacity(points.len());
    for p in points {
        results.push(dist_to_subspace(p, &v)?);
    }
    let value = results.iter().map(|d| d.value).fold(0.0, f64::max);
    let mut direction = Matrix::zeros(q.nrows(), q.ncols());
    for d in &results {
        if d.value >= value * (1.0 - ACTIVE_TOL) {
            if let Some(b) = &d.certificate {
                // Coefficients against the orthonormal frame rather than the stored basis.
                let c = v.orthonormal().tr_mul(&d.approximant(&v));
                direction += b * c.transpose();
            }
        }
    }
    Ok(Evaluation { value, direction })
}

fn orthonormalize(b: &Matrix) -> Option<Matrix> {
    let n = b.ncols();
    (linalg::numerical_rank(b, 1e-10) == n).then(|| b.clone().qr().q())
}

/// Local descent on orthonormal frames from `start`; returns the final frame and value.
fn descend(points: &[Vector], space: &NormedSpace, start: Matrix) -> Result<(Matrix, f64)> {
    let mut q = start;
    let mut eval = evaluate_frame(points, &q, space)?;
    let mut step = 0.5;
    for _ in 0..MINIMAX_MAX_ITER {
        if step < MINIMAX_MIN_STEP || eval.value == 0.0 {
            break;
        }
        let dir_norm = eval.direction.norm();
        if dir_norm == 0.0 {
            break;
        }
        let trial = &q + &eval.direction * (step / dir_norm);
        let accepted = orthonormalize(&trial)
            .map(|q_new| evaluate_frame(points, &q_new, space).map(|e| (q_new, e)))
            .transpose()?;
        match accepted {
            Some((q_new, e)) if e.value < eval.value => {
                q = q_new;
                eval = e;
                step *= 1.5;
            }
            _ => step *= 0.4,
        }
    }
    Ok((q, eval.value))
}

/// The best subspace found by [`alternating_minimax`], with its estimate.
///
/// Starts from the principal components, the greedy span and `restarts`
/// random frames; the reduction keeps the smallest value and, among ties, the
/// earliest start, so the output depends only on the seed.
pub fn minimax_subspace(
    points: &[Vector],
    space: &NormedSpace,
    n: usize,
    restarts: usize,
    seed: u64,
) -> Result<(Subspace, WidthEstimate)> {
    check_points(points, space)?;
    let m = space.dim();
    let upper = |value| {
        WidthEstimate::new(
            n,
            value,
            EstimateKind::Upper,
            WidthMethod::AlternatingMinimax,
        )
    };
    if n == 0 {
        return Ok((
            Subspace::zero(space.clone()),
            upper(max_norm(points, space)),
        ));
    }
    let rank = points_rank(points, m);
    if n >= rank {
        let v = Subspace::spanned_by(points, space.clone(), 1e-12)?;
        return Ok((v, upper(0.0)));
    }

    let mut starts: Vec<Matrix> = Vec::new();
    let dec = linalg::svd(&linalg::from_columns(points, m));
    starts.push(dec.u.columns(0, n).into_owned());
    let trace = run_greedy_on_points(points, space, &GreedyOptions::new(n))?;
    if trace.selected.len() >= n {
        if let Some(q) = orthonormalize(&linalg::from_columns(&trace.selected[..n], m)) {
            starts.push(q);
        }
    }
    for r in 0..restarts {
        let mut g = rng(derive_seed(seed, r as u64));
        let cols: Vec<Vector> = (0..n).map(|_| gaussian_vector(&mut g, m)).collect();
        if let Some(q) = orthonormalize(&linalg::from_columns(&cols, m)) {
            starts.push(q);
        }
    }

    let mut best: Option<(Matrix, f64)> = None;
    for start in starts {
        let (q, value) = descend(points, space, start)?;
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((q, value));
        }
    }
    let (q, value) = best.expect("at least the principal start exists");
    Ok((Subspace::new(q, space.clone())?, upper(value)))
}

/// Heuristic upper bound on d_n of a finite set by subgradient descent over frames.
pub fn alternating_minimax(
    points: &[Vector],
    space: &NormedSpace,
    n: usize,
    restarts: usize,
    seed: u64,
) -> Result<WidthEstimate> {
    minimax_subspace(points, space, n, restarts, seed).map(|(_, e)| e)
}
