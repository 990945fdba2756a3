//! Maximal-volume inscribed ellipsoids of subspace sections, the Euclidean
//! norms they induce, and analytic bounds on Banach–Mazur distances.
//!
//! Coordinates on a subspace V are taken in its orthonormal frame Q, so a
//! point of V is y = Qc and the section's unit ball is K = {c : ‖Qc‖ ≤ 1}.
//! The inscribed ellipsoid {c : cᵀEc ≤ 1} is the polar of the minimum-volume
//! ellipsoid enclosing K° = Qᵀ B_{X′}, computed by Frank–Wolfe with away steps.

use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::sampling::{derive_seed, HaltonGaussian};
use crate::spaces::{LpExponent, NormedSpace};
use crate::subspaces::Subspace;
use crate::widths::EstimateKind;

/// E ⊆ K ⊆ λE for the unit ball K of a subspace section.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidSandwich {
    pub subspace: Subspace,
    /// k×k SPD matrix of {c : cᵀEc ≤ 1} in the orthonormal frame of the subspace.
    pub ellipsoid: Matrix,
    pub lambda: f64,
    /// Exact when λ comes from the section's vertices or the section is Euclidean.
    pub lambda_kind: EstimateKind,
    /// Boundary points of E, all of norm at most 1 + 1e−7.
    pub inner_certificates: Vec<Vector>,
    /// Extreme points of K, all of ellipsoid gauge at most λ + 1e−7.
    pub outer_certificates: Vec<Vector>,
    pub seed: u64,
}

impl EllipsoidSandwich {
    /// √(cᵀEc).
    pub fn gauge(&self, c: &Vector) -> f64 {
        c.dot(&(&self.ellipsoid * c)).max(0.0).sqrt()
    }

    /// ‖Qc‖ in the ambient norm.
    pub fn section_norm(&self, c: &Vector) -> f64 {
        self.subspace
            .space()
            .norm_unchecked(&(self.subspace.orthonormal() * c))
    }
}

/// Optimality tolerance on max g / k − 1 for vertex and sampled polar bodies.
const MVEE_TOL_EXACT: f64 = 1e-11;
const MVEE_TOL_SAMPLED: f64 = 1e-4;
const CUTTING_TOL: f64 = 1e-6;
const MVEE_MAX_ITER: usize = 200_000;
const CUTTING_ROUNDS: usize = 60;
const VERTEX_CAP: f64 = 50_000.0;
const POLAR_VERTEX_MAX_DIM: usize = 14;

/// Weights u maximizing log det Σ u_i w_i w_iᵀ (the centered MVEE dual problem),
/// starting from `init` when it is a feasible weight vector for a prefix of the points.
fn mvee_weights(points: &[Vector], k: usize, init: Option<&Vector>, tol: f64) -> Result<Vector> {
    let n = points.len();
    let mut u = match init {
        Some(w) if w.len() <= n && w.sum() > 0.0 => {
            let mut u = Vector::zeros(n);
            u.rows_mut(0, w.len()).copy_from(&(w / w.sum()));
            u
        }
        _ => Vector::from_element(n, 1.0 / n as f64),
    };
    let kf = k as f64;
    let rank_error = || Error::Rank("polar points do not span the subspace".into());
    let weighted = |u: &Vector| {
        let mut m = Matrix::zeros(k, k);
        for (w, &ui) in points.iter().zip(u.iter()) {
            if ui > 0.0 {
                m.ger(ui, w, w, 1.0);
            }
        }
        m
    };
    let mut m = weighted(&u);
    for iter in 0..MVEE_MAX_ITER {
        if iter % 64 == 63 {
            m = weighted(&u);
        }
        let chol = m.clone().cholesky().ok_or_else(rank_error)?;
        let g: Vec<f64> = points.iter().map(|w| w.dot(&chol.solve(w))).collect();
        let (j_up, g_up) =
            g.iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |b, (i, v)| if v > b.1 { (i, v) } else { b },
                );
        let (j_down, g_down) = g
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| u[i] > 0.0)
            .fold(
                (0, f64::INFINITY),
                |b, (i, v)| if v < b.1 { (i, v) } else { b },
            );
        let up = g_up / kf - 1.0;
        let down = 1.0 - g_down / kf;
        if up.max(down) <= tol {
            break;
        }
        // Exact line search on log det along e_j − u: τ = (g_j − k)/(k(g_j − 1)),
        // clamped so that an away step at most removes the point.
        let (j, gj) = if up >= down {
            (j_up, g_up)
        } else {
            (j_down, g_down)
        };
        let floor = -u[j] / (1.0 - u[j]);
        let tau = if gj <= 1.0 {
            floor
        } else {
            ((gj - kf) / (kf * (gj - 1.0))).max(floor)
        };
        u *= 1.0 - tau;
        m *= 1.0 - tau;
        u[j] += tau;
        m.ger(tau, &points[j], &points[j], 1.0);
        if u[j] < 1e-14 {
            u[j] = 0.0;
            m = weighted(&u);
        }
    }
    Ok(u)
}

/// Inscribed-ellipsoid matrix E with wᵀE⁻¹w ≤ 1 on every given polar point, with the weights.
fn inscribed_from_polar(
    points: &[Vector],
    k: usize,
    init: Option<&Vector>,
    tol: f64,
) -> Result<(Matrix, Vector)> {
    let u = mvee_weights(points, k, init, tol)?;
    let mut m = Matrix::zeros(k, k);
    for (w, &ui) in points.iter().zip(u.iter()) {
        m.ger(ui, w, w, 1.0);
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Rank("degenerate polar body".into()))?;
    let gmax = points
        .iter()
        .map(|w| w.dot(&chol.solve(w)))
        .fold(0.0, f64::max);
    Ok((linalg::symmetrize(&(m * gmax)), u))
}

fn canonical(m: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(m);
    e[i] = 1.0;
    e
}

/// Extreme points of K° = Qᵀ B_{X′} up to sign when the dual ball is a polytope.
fn polar_vertices(q: &Matrix, p: LpExponent) -> Option<Vec<Vector>> {
    let m = q.nrows();
    if p.is_infinite() {
        return Some((0..m).map(|i| q.row(i).transpose()).collect());
    }
    if p.is_one() && m <= POLAR_VERTEX_MAX_DIM {
        let count = 1usize << (m - 1);
        return Some(
            (0..count)
                .map(|bits| {
                    let s = Vector::from_fn(m, |i, _| {
                        if i > 0 && bits >> (i - 1) & 1 == 1 {
                            -1.0
                        } else {
                            1.0
                        }
                    });
                    q.tr_mul(&s)
                })
                .collect(),
        );
    }
    None
}

/// The boundary point of K° exposed by direction c: Qᵀ J(Qc).
fn polar_point(q: &Matrix, space: &NormedSpace, c: &Vector) -> Vector {
    q.tr_mul(&space.norming_functional(&(q * c)))
}

/// max over cᵀEc ≤ 1 of ‖Qc‖ by multistart fixed-point ascent, with the maximizer.
fn max_norm_on_ellipsoid(q: &Matrix, space: &NormedSpace, e: &Matrix, seed: u64) -> (f64, Vector) {
    let k = e.nrows();
    let Ok((_, e_inv_sqrt)) = linalg::spd_sqrt_pair(e) else {
        return (f64::INFINITY, Vector::zeros(k));
    };
    let map = q * &e_inv_sqrt;
    let mut starts: Vec<Vector> = (0..k).map(|i| canonical(k, i)).collect();
    let mut halton = HaltonGaussian::new(k, seed);
    starts.extend((0..24).map(|_| halton.next_gaussian()));
    let mut best = (0.0, Vector::zeros(k));
    for s in starts {
        let mut v = s.normalize();
        let mut val = space.norm_unchecked(&(&map * &v));
        for _ in 0..300 {
            let g = map.tr_mul(&space.norming_functional(&(&map * &v)));
            let gn = g.norm();
            if gn == 0.0 {
                break;
            }
            let v_new = g / gn;
            let new_val = space.norm_unchecked(&(&map * &v_new));
            if new_val <= val * (1.0 + 1e-15) {
                break;
            }
            v = v_new;
            val = new_val;
        }
        if val > best.0 {
            best = (val, &e_inv_sqrt * v);
        }
    }
    best
}

/// Vertices of K when the section's ball is a polytope and there are few enough candidates.
fn section_vertices(q: &Matrix, p: LpExponent) -> Option<Vec<Vector>> {
    let (m, k) = q.shape();
    let mut out = Vec::new();
    if p.is_infinite() {
        // k active rows with prescribed signs; the first sign is fixed by symmetry.
        if linalg::binomial(m, k) * (1u64 << (k - 1)) as f64 > VERTEX_CAP {
            return None;
        }
        linalg::for_each_subset(m, k, |rows| {
            let qs = Matrix::from_fn(k, k, |i, j| q[(rows[i], j)]);
            if qs.determinant().abs() > 1e-12 {
                let lu = qs.lu();
                for bits in 0..(1usize << (k - 1)) {
                    let sigma = Vector::from_fn(k, |i, _| {
                        if i > 0 && bits >> (i - 1) & 1 == 1 {
                            -1.0
                        } else {
                            1.0
                        }
                    });
                    if let Some(c) = lu.solve(&sigma) {
                        if (q * &c).amax() <= 1.0 + 1e-10 {
                            out.push(c);
                        }
                    }
                }
            }
            true
        });
        return Some(out);
    }
    if p.is_one() {
        // k − 1 vanishing coordinates pin down a line in the section.
        if linalg::binomial(m, k - 1) > VERTEX_CAP {
            return None;
        }
        linalg::for_each_subset(m, k - 1, |zeros| {
            let padded =
                Matrix::from_fn(k, k, |i, j| if i < k - 1 { q[(zeros[i], j)] } else { 0.0 });
            let dec = linalg::svd(&padded);
            if k == 1 || dec.singular_values[k - 2] > 1e-10 {
                let c = dec.v_t.row(k - 1).transpose();
                let n1 = (q * &c).abs().sum();
                if n1 > 0.0 {
                    out.push(c / n1);
                }
            }
            true
        });
        return Some(out);
    }
    None
}

/// max of cᵀEc / ‖Qc‖² by sampling followed by gradient ascent on its logarithm.
fn sampled_lambda(
    q: &Matrix,
    space: &NormedSpace,
    e: &Matrix,
    samples: usize,
    seed: u64,
) -> (f64, Vec<Vector>) {
    let k = e.nrows();
    let ratio = |c: &Vector| {
        let n = space.norm_unchecked(&(q * c));
        if n == 0.0 {
            0.0
        } else {
            c.dot(&(e * c)) / (n * n)
        }
    };
    let mut halton = HaltonGaussian::new(k, seed);
    let mut scored: Vec<(f64, Vector)> = (0..samples.max(k))
        .map(|_| {
            let c = halton.next_gaussian();
            (ratio(&c), c)
        })
        .collect();
    scored.extend((0..k).map(|i| (ratio(&canonical(k, i)), canonical(k, i))));
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(8);
    let mut refined = Vec::new();
    for (mut f, mut c) in scored {
        c = c.normalize();
        let mut step = 0.1;
        for _ in 0..500 {
            let y = q * &c;
            let ny = space.norm_unchecked(&y);
            let grad = (e * &c) * (2.0 / c.dot(&(e * &c)))
                - q.tr_mul(&space.norming_functional(&y)) * (2.0 / ny);
            let tangent = &grad - &c * c.dot(&grad);
            if tangent.norm() < 1e-14 {
                break;
            }
            let trial = (&c + tangent * step).normalize();
            let ft = ratio(&trial);
            if ft > f {
                c = trial;
                f = ft;
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        refined.push((f, c));
    }
    let best = refined.iter().map(|r| r.0).fold(0.0, f64::max);
    let points = refined
        .into_iter()
        .map(|(_, c)| &c / space.norm_unchecked(&(q * &c)))
        .collect();
    (best.sqrt(), points)
}

/// The maximal-volume ellipsoid inscribed in the unit ball of V, with λ.
///
/// Euclidean-type norms give the exact section ellipsoid and λ = 1. For ℓ_∞
/// and ℓ₁ the polar body and the section are polytopes whose vertices are
/// enumerated, so E and λ are exact up to solver tolerance. Other ℓ_p norms
/// use `samples` polar boundary points plus cutting planes for E, and a
/// sampled ratio ascent for λ (a lower estimate of the exact ratio).
pub fn john_ellipsoid(v: &Subspace, samples: usize, seed: u64) -> Result<EllipsoidSandwich> {
    let k = v.dim();
    if k == 0 {
        return Err(Error::Rank("the subspace is zero-dimensional".into()));
    }
    let space = v.space();
    let q = v.orthonormal().clone();
    let (ellipsoid, lambda, lambda_kind, outer) = if let Some(r) = space.euclidean_factor() {
        let rq = r * &q;
        (
            linalg::symmetrize(&rq.tr_mul(&rq)),
            1.0,
            EstimateKind::Exact,
            Vec::new(),
        )
    } else {
        let p = space.exponent().expect("non-Euclidean norms are ℓ_p norms");
        let e = match polar_vertices(&q, p) {
            Some(points) => inscribed_from_polar(&points, k, None, MVEE_TOL_EXACT)?.0,
            None => polar_cutting_planes(&q, space, k, samples, seed)?,
        };
        match section_vertices(&q, p) {
            Some(vertices) if !vertices.is_empty() => {
                let lam = vertices
                    .iter()
                    .map(|c| c.dot(&(&e * c)).max(0.0).sqrt())
                    .fold(0.0, f64::max);
                (e, lam, EstimateKind::Exact, vertices)
            }
            _ => {
                let (lam, pts) = sampled_lambda(&q, space, &e, samples, derive_seed(seed, 2));
                (e, lam, EstimateKind::Lower, pts)
            }
        }
    };
    let mut inner = Vec::new();
    if let Ok((_, e_inv_sqrt)) = linalg::spd_sqrt_pair(&ellipsoid) {
        let mut halton = HaltonGaussian::new(k, derive_seed(seed, 3));
        inner.extend((0..k).map(|i| &e_inv_sqrt * canonical(k, i)));
        inner.extend((0..32).map(|_| &e_inv_sqrt * halton.next_gaussian().normalize()));
    }
    Ok(EllipsoidSandwich {
        subspace: v.clone(),
        ellipsoid,
        lambda,
        lambda_kind,
        inner_certificates: inner,
        outer_certificates: outer,
        seed,
    })
}

fn polar_cutting_planes(
    q: &Matrix,
    space: &NormedSpace,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<Matrix> {
    let mut halton = HaltonGaussian::new(k, derive_seed(seed, 1));
    let mut points: Vec<Vector> = (0..k)
        .map(|i| polar_point(q, space, &canonical(k, i)))
        .collect();
    points.extend((0..samples.max(2 * k)).map(|_| polar_point(q, space, &halton.next_gaussian())));
    let (mut e, mut u) = inscribed_from_polar(&points, k, None, MVEE_TOL_SAMPLED)?;
    let mut round = 0;
    loop {
        let (rho, c) = max_norm_on_ellipsoid(q, space, &e, derive_seed(seed, 100 + round as u64));
        if rho <= 1.0 + CUTTING_TOL || round == CUTTING_ROUNDS {
            // Shrink onto the residual violation.
            return Ok(e * rho.max(1.0).powi(2));
        }
        points.push(polar_point(q, space, &c));
        (e, u) = inscribed_from_polar(&points, k, Some(&u), MVEE_TOL_SAMPLED)?;
        round += 1;
    }
}

/// A Euclidean norm ‖c‖_e = √(cᵀGc) on the frame coordinates of a subspace with
/// ‖Qc‖ ≤ ‖c‖_e ≤ λ‖Qc‖.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltedNorm {
    pub space: NormedSpace,
    pub lambda: f64,
    /// Largest ‖Qc‖ / ‖c‖_E seen on the validation sample before rescaling.
    pub inner_ratio: f64,
}

const TILT_VALIDATION_SAMPLES: usize = 10_000;
const TILT_TOL: f64 = 1e-7;

/// The Euclidean norm of a sandwich, validated on a fresh sample.
///
/// If the inner containment fails on the fresh sample the norm is rescaled so
/// the left inequality holds there, and λ grows by the same factor. The right
/// inequality is then checked against that λ.
pub fn tilted_norm(v: &Subspace, sandwich: &EllipsoidSandwich) -> Result<TiltedNorm> {
    if v.orthonormal() != sandwich.subspace.orthonormal() {
        return Err(Error::Sandwich(
            "the sandwich belongs to a different subspace".into(),
        ));
    }
    let k = v.dim();
    let mut halton = HaltonGaussian::new(k, derive_seed(sandwich.seed, 0xf00d));
    let sample: Vec<Vector> = (0..TILT_VALIDATION_SAMPLES)
        .map(|_| halton.next_gaussian())
        .collect();
    let inner_ratio = sample
        .iter()
        .map(|c| sandwich.section_norm(c) / sandwich.gauge(c))
        .fold(0.0, f64::max);
    let scale = inner_ratio.max(1.0);
    let lambda = sandwich.lambda * scale;
    for c in &sample {
        let e = sandwich.gauge(c) * scale;
        let x = sandwich.section_norm(c);
        if x > e * (1.0 + TILT_TOL) || e > lambda * x * (1.0 + TILT_TOL) {
            return Err(Error::Sandwich(format!(
                "fresh sample violates ‖x‖ ≤ ‖x‖_e ≤ λ‖x‖: ‖x‖ = {x}, ‖x‖_e = {e}, λ = {lambda}"
            )));
        }
    }
    let space =
        NormedSpace::weighted(linalg::symmetrize(&(&sandwich.ellipsoid * (scale * scale))))?;
    Ok(TiltedNorm {
        space,
        lambda,
        inner_ratio,
    })
}

/// Families of spaces with a closed-form bound on γₙ and Γₙ.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GammaSpaceKind {
    Hilbert,
    Lp(LpExponent),
    /// Any Banach space: γₙ ≤ √n.
    Generic,
}

impl GammaSpaceKind {
    pub fn of(space: &NormedSpace) -> Self {
        if space.is_inner_product() {
            return GammaSpaceKind::Hilbert;
        }
        match space.exponent() {
            Some(p) => GammaSpaceKind::Lp(p),
            None => GammaSpaceKind::Generic,
        }
    }
}

/// Closed-form upper bound on γₙ: 1, n^{|1/2−1/p|}, or √n.
pub fn gamma_table(kind: GammaSpaceKind, n: usize) -> f64 {
    let n = n as f64;
    match kind {
        GammaSpaceKind::Hilbert => 1.0,
        GammaSpaceKind::Lp(p) => n.powf(p.euclidean_distortion_exponent()),
        GammaSpaceKind::Generic => n.sqrt(),
    }
}

#[cfg(test)]
mod tests;
