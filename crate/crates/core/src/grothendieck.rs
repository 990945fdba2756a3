//! Grothendieck numbers Γₙ(T), absolutely 2-summing norm bounds, and the
//! operators A, B built from a greedy run.

use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::greedy::GreedyTrace;
use crate::linalg::{self, Matrix, Vector};
use crate::sampling::{derive_seed, gaussian_vector, rng};
use crate::spaces::NormedSpace;
use crate::verify::{BoundReport, Estimate, TheoremId};
use crate::widths::{self, EstimateKind, WidthOptions};

/// How a Grothendieck estimate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GammaMethod {
    Svd,
    VertexEnumeration,
    CoordinateAscent,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrothendieckEstimate {
    pub n: usize,
    pub value: f64,
    pub kind: EstimateKind,
    pub method: GammaMethod,
    /// x_1, …, x_n in the domain unit ball.
    #[cfg_attr(feature = "serde", serde(with = "crate::linalg::serde_vectors"))]
    pub witness_x: Vec<Vector>,
    /// b_1, …, b_n in the unit ball of the target's dual.
    #[cfg_attr(feature = "serde", serde(with = "crate::linalg::serde_vectors"))]
    pub witness_b: Vec<Vector>,
}

/// The n×n matrix ⟨T x_i, b_j⟩.
pub fn pairing_determinant_matrix(t: &Matrix, xs: &[Vector], bs: &[Vector]) -> Matrix {
    let n = xs.len();
    let images: Vec<Vector> = xs.iter().map(|x| t * x).collect();
    Matrix::from_fn(n, n, |i, j| images[i].dot(&bs[j]))
}

/// |det⟨T x_i, b_j⟩|^{1/n}.
pub fn witness_value(t: &Matrix, xs: &[Vector], bs: &[Vector]) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 1.0;
    }
    linalg::determinant(&pairing_determinant_matrix(t, xs, bs))
        .abs()
        .powf(1.0 / n as f64)
}

/// Extreme points of the unit ball up to sign, when finite and at most `cap`.
fn ball_vertices(space: &NormedSpace, cap: usize) -> Option<Vec<Vector>> {
    let m = space.dim();
    let p = space.exponent()?;
    if p.is_one() {
        return Some(
            (0..m)
                .map(|j| {
                    let mut e = Vector::zeros(m);
                    e[j] = 1.0;
                    e
                })
                .collect(),
        );
    }
    if p.is_infinite() && m <= 30 && (1usize << (m - 1)) <= cap {
        let count = 1usize << (m - 1);
        return Some(
            (0..count)
                .map(|bits| {
                    Vector::from_fn(m, |i, _| {
                        if i > 0 && bits >> (i - 1) & 1 == 1 {
                            -1.0
                        } else {
                            1.0
                        }
                    })
                })
                .collect(),
        );
    }
    None
}

enum Side {
    Euclidean { r: Matrix },
    Vertices(Vec<Vector>),
    Smooth,
}

fn side(space: &NormedSpace, cap: usize) -> Side {
    if let Some(r) = space.euclidean_factor() {
        return Side::Euclidean { r };
    }
    match ball_vertices(space, cap) {
        Some(v) => Side::Vertices(v),
        None => Side::Smooth,
    }
}

const ENUMERATION_CAP: f64 = 2.0e6;

/// Γₙ(T) for T from `domain` to `target`.
///
/// Exact for Euclidean-type spaces (singular values) and whenever the
/// determinant's multilinearity reduces the supremum to a vertex enumeration
/// of at most 2·10⁶ terms; otherwise a lower bound by block-coordinate ascent
/// from `budget` sweeps spread over several seeded starts.
pub fn gamma_n(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<GrothendieckEstimate> {
    check_dim(domain.dim(), t.ncols())?;
    check_dim(target.dim(), t.nrows())?;
    if n == 0 || n > t.nrows().min(t.ncols()) {
        return Err(Error::config(format!(
            "n = {n} must lie in 1..={}",
            t.nrows().min(t.ncols())
        )));
    }
    let cap = ENUMERATION_CAP as usize;
    let dual_target = target.dual();
    match (side(domain, cap), side(&dual_target, cap)) {
        (Side::Euclidean { r: rd }, Side::Euclidean { .. }) => {
            let rt = target
                .euclidean_factor()
                .expect("dual of a Euclidean space is Euclidean");
            Ok(hilbert_gamma(t, &rd, &rt, n))
        }
        (Side::Vertices(xv), Side::Vertices(bv)) => {
            let count = linalg::binomial(xv.len(), n) * linalg::binomial(bv.len(), n);
            if count <= ENUMERATION_CAP {
                return Ok(enumerate_both(t, &xv, &bv, n));
            }
            Ok(ascent(t, domain, target, n, budget, seed))
        }
        (Side::Vertices(xv), Side::Euclidean { .. })
            if linalg::binomial(xv.len(), n) <= ENUMERATION_CAP =>
        {
            let rt = target.euclidean_factor().expect("Euclidean target");
            Ok(enumerate_domain(t, &xv, &rt, n))
        }
        (Side::Euclidean { r: rd }, Side::Vertices(bv))
            if linalg::binomial(bv.len(), n) <= ENUMERATION_CAP =>
        {
            Ok(enumerate_target(t, &rd, &bv, n))
        }
        _ => Ok(ascent(t, domain, target, n, budget, seed)),
    }
}

fn hilbert_gamma(t: &Matrix, rd: &Matrix, rt: &Matrix, n: usize) -> GrothendieckEstimate {
    let rd_inv = rd
        .clone()
        .try_inverse()
        .expect("Cholesky factors are invertible");
    let model = rt * t * &rd_inv;
    let dec = linalg::svd(&model);
    let witness_x = (0..n)
        .map(|i| &rd_inv * dec.v_t.row(i).transpose())
        .collect();
    let witness_b = (0..n)
        .map(|j| rt.tr_mul(&dec.u.column(j).into_owned()))
        .collect();
    let log_sum: f64 = dec.singular_values[..n].iter().map(|s| s.ln()).sum();
    GrothendieckEstimate {
        n,
        value: (log_sum / n as f64).exp(),
        kind: EstimateKind::Exact,
        method: GammaMethod::Svd,
        witness_x,
        witness_b,
    }
}

fn subsets(count: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    linalg::for_each_subset(count, n, |s| {
        out.push(s.to_vec());
        true
    });
    out
}

fn enumerate_both(t: &Matrix, xv: &[Vector], bv: &[Vector], n: usize) -> GrothendieckEstimate {
    let images: Vec<Vector> = xv.iter().map(|x| t * x).collect();
    let b_sets = subsets(bv.len(), n);
    let mut best = (-1.0, Vec::new(), Vec::new());
    linalg::for_each_subset(xv.len(), n, |xs| {
        for bs in &b_sets {
            let d = Matrix::from_fn(n, n, |i, j| images[xs[i]].dot(&bv[bs[j]]));
            let v = linalg::determinant(&d).abs();
            if v > best.0 {
                best = (v, xs.to_vec(), bs.clone());
            }
        }
        true
    });
    let witness_x: Vec<Vector> = best.1.iter().map(|&i| xv[i].clone()).collect();
    let witness_b: Vec<Vector> = best.2.iter().map(|&j| bv[j].clone()).collect();
    finish(
        t,
        witness_x,
        witness_b,
        EstimateKind::Exact,
        GammaMethod::VertexEnumeration,
    )
}

/// Domain vertices with a Euclidean target: the best b's for fixed x's give √det(YᵀY).
fn enumerate_domain(t: &Matrix, xv: &[Vector], rt: &Matrix, n: usize) -> GrothendieckEstimate {
    let images: Vec<Vector> = xv.iter().map(|x| rt * (t * x)).collect();
    let mut best = (-1.0, Vec::new());
    linalg::for_each_subset(xv.len(), n, |xs| {
        let y = Matrix::from_fn(images[0].len(), n, |r, c| images[xs[c]][r]);
        let v = linalg::determinant(&y.tr_mul(&y)).abs();
        if v > best.0 {
            best = (v, xs.to_vec());
        }
        true
    });
    let witness_x: Vec<Vector> = best.1.iter().map(|&i| xv[i].clone()).collect();
    let y = Matrix::from_fn(images[0].len(), n, |r, c| images[best.1[c]][r]);
    let dec = linalg::svd(&y);
    let witness_b = (0..n)
        .map(|j| rt.tr_mul(&dec.u.column(j).into_owned()))
        .collect();
    finish(
        t,
        witness_x,
        witness_b,
        EstimateKind::Exact,
        GammaMethod::VertexEnumeration,
    )
}

/// Dual-ball vertices with a Euclidean domain: the best x's for fixed b's give √det(MMᵀ).
fn enumerate_target(t: &Matrix, rd: &Matrix, bv: &[Vector], n: usize) -> GrothendieckEstimate {
    let rd_inv = rd
        .clone()
        .try_inverse()
        .expect("Cholesky factors are invertible");
    let t_model = t * &rd_inv;
    let rows: Vec<Vector> = bv.iter().map(|b| t_model.tr_mul(b)).collect();
    let mut best = (-1.0, Vec::new());
    linalg::for_each_subset(bv.len(), n, |bs| {
        let m = Matrix::from_fn(n, rows[0].len(), |r, c| rows[bs[r]][c]);
        let v = linalg::determinant(&(&m * m.transpose())).abs();
        if v > best.0 {
            best = (v, bs.to_vec());
        }
        true
    });
    let witness_b: Vec<Vector> = best.1.iter().map(|&j| bv[j].clone()).collect();
    let m = Matrix::from_fn(n, rows[0].len(), |r, c| rows[best.1[r]][c]);
    let dec = linalg::svd(&m);
    let witness_x = (0..n)
        .map(|i| &rd_inv * dec.v_t.row(i).transpose())
        .collect();
    finish(
        t,
        witness_x,
        witness_b,
        EstimateKind::Exact,
        GammaMethod::VertexEnumeration,
    )
}

fn finish(
    t: &Matrix,
    witness_x: Vec<Vector>,
    witness_b: Vec<Vector>,
    kind: EstimateKind,
    method: GammaMethod,
) -> GrothendieckEstimate {
    GrothendieckEstimate {
        n: witness_x.len(),
        value: witness_value(t, &witness_x, &witness_b),
        kind,
        method,
        witness_x,
        witness_b,
    }
}

/// Cofactor matrix of a nonsingular matrix.
fn cofactors(d: &Matrix) -> Option<Matrix> {
    let det = linalg::determinant(d);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    d.clone().try_inverse().map(|inv| inv.transpose() * det)
}

const ASCENT_RESTARTS: usize = 4;

/// Block-coordinate ascent: |det| is linear in each x_i and each b_j, so each
/// block update is a norming-functional evaluation and never decreases it.
fn ascent(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    n: usize,
    budget: usize,
    seed: u64,
) -> GrothendieckEstimate {
    let dual_domain = domain.dual();
    let dual_target = target.dual();
    let sweeps = (budget / ASCENT_RESTARTS).max(1);
    let dec = linalg::svd(t);
    let mut best: Option<(f64, Vec<Vector>, Vec<Vector>)> = None;
    for restart in 0..ASCENT_RESTARTS {
        let (mut xs, mut bs): (Vec<Vector>, Vec<Vector>) = if restart == 0 {
            (
                (0..n)
                    .map(|i| domain.normalize(&dec.v_t.row(i).transpose()))
                    .collect(),
                (0..n)
                    .map(|j| dual_target.normalize(&dec.u.column(j).into_owned()))
                    .collect(),
            )
        } else {
            let mut g = rng(derive_seed(seed, restart as u64));
            (
                (0..n)
                    .map(|_| domain.normalize(&gaussian_vector(&mut g, t.ncols())))
                    .collect(),
                (0..n)
                    .map(|_| dual_target.normalize(&gaussian_vector(&mut g, t.nrows())))
                    .collect(),
            )
        };
        let mut value = linalg::determinant(&pairing_determinant_matrix(t, &xs, &bs)).abs();
        for _ in 0..sweeps {
            let before = value;
            for i in 0..n {
                let d = pairing_determinant_matrix(t, &xs, &bs);
                let Some(c) = cofactors(&d) else { break };
                let g = bs
                    .iter()
                    .enumerate()
                    .fold(Vector::zeros(t.nrows()), |acc, (j, b)| acc + b * c[(i, j)]);
                xs[i] = dual_domain.norming_functional(&t.tr_mul(&g));
            }
            for j in 0..n {
                let d = pairing_determinant_matrix(t, &xs, &bs);
                let Some(c) = cofactors(&d) else { break };
                let h = xs
                    .iter()
                    .enumerate()
                    .fold(Vector::zeros(t.nrows()), |acc, (i, x)| {
                        acc + (t * x) * c[(i, j)]
                    });
                bs[j] = target.norming_functional(&h);
            }
            value = linalg::determinant(&pairing_determinant_matrix(t, &xs, &bs)).abs();
            if value <= before * (1.0 + 1e-13) {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, xs, bs));
        }
    }
    let (_, xs, bs) = best.expect("at least one restart ran");
    finish(
        t,
        xs,
        bs,
        EstimateKind::Lower,
        GammaMethod::CoordinateAscent,
    )
}

/// An upper bound on Γₙ of the identity of a space: 1 for Euclidean-type norms, n^{|1/2−1/p|} for ℓ_p.
pub fn gamma_n_of_space(space: &NormedSpace, n: usize) -> Estimate {
    if space.is_inner_product() {
        return Estimate::new(1.0, EstimateKind::Exact);
    }
    let p = space
        .exponent()
        .expect("every non-Euclidean norm here is an ℓ_p norm");
    Estimate::new(
        (n as f64).powf(p.euclidean_distortion_exponent()),
        EstimateKind::Upper,
    )
}

/// The pair of reports for (∏ d_k)^{1/n} ≤ Γₙ and (∏ dᵏ)^{1/n} ≤ Γₙ.
#[derive(Clone, Debug)]
pub struct LemmaOneReports {
    pub kolmogorov: BoundReport,
    pub gelfand: BoundReport,
    pub gamma: GrothendieckEstimate,
}

pub(crate) fn geometric_mean(values: &[Estimate]) -> Estimate {
    let n = values.len() as f64;
    let kind = values
        .iter()
        .map(|e| e.kind)
        .fold(EstimateKind::Exact, combine_same_direction);
    if values.iter().any(|e| e.value == 0.0) {
        return Estimate::new(0.0, kind);
    }
    let log: f64 = values.iter().map(|e| e.value.ln()).sum();
    Estimate::new((log / n).exp(), kind)
}

/// Kind of a product of nonnegative factors.
pub(crate) fn combine_same_direction(a: EstimateKind, b: EstimateKind) -> EstimateKind {
    use EstimateKind::*;
    match (a, b) {
        (Exact, k) | (k, Exact) => k,
        (Upper, Upper) => Upper,
        (Lower, Lower) => Lower,
        _ => Heuristic,
    }
}

/// Checks both inequalities relating widths and Γₙ on a single operator.
pub fn verify_lemma1(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    n: usize,
    opts: &WidthOptions,
) -> Result<LemmaOneReports> {
    let gamma = gamma_n(t, domain, target, n, 400, opts.seed)?;
    let rhs = Estimate::new(gamma.value, gamma.kind);
    let instance = format!("{t:?}|{}|{}|{n}", domain.describe(), target.describe());
    let mut kol = Vec::new();
    let mut gel = Vec::new();
    for k in 0..n {
        let d = widths::kolmogorov_width(t, domain, target, k, opts)?;
        kol.push(Estimate::new(d.value, d.kind));
        let g = widths::gelfand_width(t, domain, target, k, opts)?;
        gel.push(Estimate::new(g.value, g.kind));
    }
    let mut constants = alloc::collections::BTreeMap::new();
    constants.insert(
        "gamma_n".into(),
        format!("{:?} via {:?}", gamma.kind, gamma.method),
    );
    let kolmogorov =
        BoundReport::compare(TheoremId::Lemma1, &instance, n, geometric_mean(&kol), rhs)
            .with_constants(constants.clone());
    let gelfand = BoundReport::compare(
        TheoremId::Lemma1Gelfand,
        &instance,
        n,
        geometric_mean(&gel),
        rhs,
    )
    .with_constants(constants);
    Ok(LemmaOneReports {
        kolmogorov,
        gelfand,
        gamma,
    })
}

/// Whether a 2-summing estimate bounds the norm from below or above.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TwoSummingKind {
    Lower,
    AnalyticUpper,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoSummingEstimate {
    pub value: f64,
    pub kind: TwoSummingKind,
    /// The family (x_i) realizing a lower bound; empty for analytic bounds.
    #[cfg_attr(feature = "serde", serde(with = "crate::linalg::serde_vectors"))]
    pub family: Vec<Vector>,
}

/// The ratio (Σ‖Tx_i‖²)^{1/2} / sup_{‖b‖′≤1} (Σ⟨x_i,b⟩²)^{1/2} for a family.
///
/// The denominator is the norm of b ↦ (⟨x_i, b⟩)_i from the dual of the
/// domain into ℓ₂, taken exact where available and otherwise bounded from
/// above, so the ratio is always a lower bound on the 2-summing norm.
pub fn two_summing_ratio(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    family: &[Vector],
) -> Result<f64> {
    if family.is_empty() {
        return Ok(0.0);
    }
    for x in family {
        check_dim(domain.dim(), x.len())?;
    }
    let numerator: f64 = family
        .iter()
        .map(|x| target.norm_unchecked(&(t * x)).powi(2))
        .sum::<f64>()
        .sqrt();
    let f_t = linalg::from_columns(family, domain.dim()).transpose();
    let ell2 = NormedSpace::euclidean(family.len())?;
    let (denominator, _) = widths::operator_norm_upper(&f_t, &domain.dual(), &ell2)?;
    Ok(if denominator > 0.0 {
        numerator / denominator
    } else {
        0.0
    })
}

const HILL_CLIMB_STEPS: usize = 200;

/// A lower bound on ‖T|B₂‖ from canonical, singular-vector and `families`
/// random families, followed by a seeded local search on the best one.
pub fn two_summing_lower(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    families: usize,
    seed: u64,
) -> Result<TwoSummingEstimate> {
    check_dim(domain.dim(), t.ncols())?;
    check_dim(target.dim(), t.nrows())?;
    let m = domain.dim();
    let mut candidates: Vec<Vec<Vector>> = Vec::new();
    let canonical: Vec<Vector> = (0..m)
        .map(|i| {
            let mut e = Vector::zeros(m);
            e[i] = 1.0;
            e
        })
        .collect();
    candidates.extend(canonical.iter().map(|e| alloc::vec![e.clone()]));
    candidates.push(canonical);
    let dec = linalg::svd(t);
    let singular: Vec<Vector> = (0..dec.v_t.nrows())
        .map(|i| dec.v_t.row(i).transpose())
        .collect();
    if let Some(top) = singular.first() {
        candidates.push(alloc::vec![top.clone()]);
    }
    candidates.push(singular);
    let mut g = rng(seed);
    for _ in 0..families {
        candidates.push((0..m).map(|_| gaussian_vector(&mut g, m)).collect());
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for family in candidates {
        if family.is_empty() {
            continue;
        }
        let r = two_summing_ratio(t, domain, target, &family)?;
        if r > best.0 {
            best = (r, family);
        }
    }
    let mut scale = 0.3;
    for _ in 0..HILL_CLIMB_STEPS {
        let mut trial = best.1.clone();
        let i = g.random_range(0..trial.len());
        let noise = gaussian_vector(&mut g, m);
        trial[i] = &trial[i] + noise * (scale * trial[i].norm().max(1e-3));
        let r = two_summing_ratio(t, domain, target, &trial)?;
        if r > best.0 {
            best = (r, trial);
        } else {
            scale = (scale * 0.97).max(1e-4);
        }
    }
    Ok(TwoSummingEstimate {
        value: best.0.max(0.0),
        kind: TwoSummingKind::Lower,
        family: best.1,
    })
}

/// An analytic upper bound on ‖T|B₂‖.
///
/// Into a Euclidean-type target, Σ‖Tx_i‖² = Σ_r Σ_i ⟨t_r, x_i⟩² bounds it by
/// the ℓ₂ norm of the dual norms of the rows t_r of R·T. In general
/// ‖T|B₂‖ ≤ ‖T‖·‖id_X|B₂‖ = ‖T‖·√(dim X). The smaller bound is returned.
pub fn two_summing_upper(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
) -> Result<TwoSummingEstimate> {
    check_dim(domain.dim(), t.ncols())?;
    check_dim(target.dim(), t.nrows())?;
    let (norm, _) = widths::operator_norm_upper(t, domain, target)?;
    let mut value = norm * (domain.dim() as f64).sqrt();
    if let Some(r) = target.euclidean_factor() {
        let rt = r * t;
        let dual = domain.dual();
        let rows: f64 = (0..rt.nrows())
            .map(|i| dual.norm_unchecked(&rt.row(i).transpose()).powi(2))
            .sum();
        value = value.min(rows.sqrt());
    }
    Ok(TwoSummingEstimate {
        value,
        kind: TwoSummingKind::AnalyticUpper,
        family: Vec::new(),
    })
}

/// Checks Γₙ(T) ≤ e·n^{−1/2}·‖T|B₂‖·Γₙ(X) with X the domain.
pub fn verify_lemma2(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    n: usize,
    seed: u64,
) -> Result<(BoundReport, GrothendieckEstimate)> {
    let gamma = gamma_n(t, domain, target, n, 400, seed)?;
    let pi2 = two_summing_upper(t, domain, target)?;
    let gx = gamma_n_of_space(domain, n);
    let factor = core::f64::consts::E / (n as f64).sqrt();
    let rhs = Estimate::new(
        factor * pi2.value * gx.value,
        combine_same_direction(EstimateKind::Upper, gx.kind),
    );
    let mut constants = alloc::collections::BTreeMap::new();
    constants.insert("e".into(), "Euler's number".into());
    constants.insert("pi2".into(), format!("analytic upper bound {}", pi2.value));
    constants.insert("gamma_n(X)".into(), format!("{:?} {}", gx.kind, gx.value));
    let instance = format!("{t:?}|{}|{}|{n}", domain.describe(), target.describe());
    let report = BoundReport::compare(
        TheoremId::Lemma2,
        &instance,
        n,
        Estimate::new(gamma.value, gamma.kind),
        rhs,
    )
    .with_constants(constants);
    Ok((report, gamma))
}

/// The operators A = Σ u_k ⊗ e_k and B = Σ b_k ⊗ u_k of a greedy run.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyOperators {
    /// domain dim × N, column k is the lift e_k.
    pub a: Matrix,
    /// N × target dim, row k is the certificate b_k.
    pub b: Matrix,
}

impl GreedyOperators {
    /// B·T·A, whose (j, k) entry is ⟨f_k, b_j⟩; zero below the diagonal.
    pub fn compose(&self, t: &Matrix) -> Matrix {
        &self.b * t * &self.a
    }
}

/// ⟨f_i, b_j⟩ for the greedy elements and certificates; zero above the diagonal.
pub fn pairing_matrix(trace: &GreedyTrace) -> Result<Matrix> {
    let certs = trace
        .certificates
        .as_ref()
        .ok_or(Error::MissingCertificate(0))?;
    let n = trace.selected.len();
    if certs.len() < n {
        return Err(Error::MissingCertificate(certs.len()));
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        trace.selected[i].dot(&certs[j])
    }))
}

const LIFT_TOL: f64 = 1e-9;

/// Builds A and B from a greedy trace and lifts e_k with T e_k = f_k, ‖e_k‖ ≤ 1.
pub fn build_a_b(
    trace: &GreedyTrace,
    t: &Matrix,
    domain: &NormedSpace,
    lifts: &[Vector],
) -> Result<GreedyOperators> {
    let certs = trace
        .certificates
        .as_ref()
        .ok_or(Error::MissingCertificate(0))?;
    let n = trace.selected.len();
    if certs.len() < n {
        return Err(Error::MissingCertificate(certs.len()));
    }
    check_dim(n, lifts.len())?;
    check_dim(domain.dim(), t.ncols())?;
    check_dim(trace.space.dim(), t.nrows())?;
    for (k, (e, f)) in lifts.iter().zip(&trace.selected).enumerate() {
        check_dim(domain.dim(), e.len())?;
        let norm = domain.norm_unchecked(e);
        if norm > 1.0 + LIFT_TOL {
            return Err(Error::Lift(format!("lift {k} has norm {norm}")));
        }
        let miss = (t * e - f).norm();
        if miss > LIFT_TOL * f.norm().max(1.0) {
            return Err(Error::Lift(format!("lift {k} misses f_{k} by {miss:e}")));
        }
    }
    Ok(GreedyOperators {
        a: linalg::from_columns(lifts, domain.dim()),
        b: linalg::from_columns(&certs[..n], trace.space.dim()).transpose(),
    })
}

/// The sampled domain points behind the selected elements of an operator-ball trace.
pub fn sample_lifts(ball: &crate::spaces::OperatorBall, trace: &GreedyTrace) -> Vec<Vector> {
    let sample = ball.domain_sample();
    trace
        .selected_indices
        .iter()
        .map(|&i| sample[i].clone())
        .collect()
}

/// Minimum-norm preimages e_k = T⁺ f_k, audited for orthonormality and exactness.
pub fn orthonormal_lift(t: &Matrix, trace: &GreedyTrace, tol: f64) -> Result<Vec<Vector>> {
    check_dim(trace.space.dim(), t.nrows())?;
    let pinv = linalg::pseudo_inverse(t, 1e-12);
    let lifts: Vec<Vector> = trace.selected.iter().map(|f| &pinv * f).collect();
    for (k, (e, f)) in lifts.iter().zip(&trace.selected).enumerate() {
        let miss = (t * e - f).norm();
        if miss > tol * f.norm().max(1.0) {
            return Err(Error::Lift(format!("T e_{k} misses f_{k} by {miss:e}")));
        }
    }
    let deviation = linalg::gram_deviation(&lifts);
    if deviation > tol {
        return Err(Error::Lift(format!(
            "Gram matrix deviates from the identity by {deviation:e}"
        )));
    }
    Ok(lifts)
}

#[cfg(test)]
mod tests;
