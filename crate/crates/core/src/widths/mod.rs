//! Kolmogorov and Gelfand widths of operators and finite sets.
//!
//! Index convention: d_n uses n-dimensional subspaces and d₀ = ‖T‖.
//! Exact values come from singular values (Euclidean spaces on both sides)
//! or from the certified brute-force regime; everything else is an honest
//! upper bound or a heuristic tagged as such.

mod sets;

pub use sets::{
    alternating_minimax, brute_force_width, coordinate_subspace, coordinate_subspace_width,
    minimax_subspace, BruteForceGrid,
};

use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::sampling::{derive_seed, gaussian_vector, rng};
use crate::spaces::NormedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EstimateKind {
    Exact,
    /// The value is at least the true quantity.
    Upper,
    /// The value is at most the true quantity.
    Lower,
    /// No certified direction.
    Heuristic,
}

impl EstimateKind {
    pub fn is_upper(self) -> bool {
        matches!(self, EstimateKind::Exact | EstimateKind::Upper)
    }

    pub fn is_lower(self) -> bool {
        matches!(self, EstimateKind::Exact | EstimateKind::Lower)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WidthMethod {
    Svd,
    DiagonalFormula,
    CoordinateSubspace,
    AlternatingMinimax,
    BruteForce,
    Duality,
    NormComparison,
    VertexEnumeration,
    MultistartAscent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WidthEstimate {
    pub n: usize,
    pub value: f64,
    pub kind: EstimateKind,
    pub method: WidthMethod,
}

impl WidthEstimate {
    pub fn new(n: usize, value: f64, kind: EstimateKind, method: WidthMethod) -> Self {
        WidthEstimate {
            n,
            value,
            kind,
            method,
        }
    }
}

/// Picks the tightest certified upper bound; exact estimates win outright.
pub fn best_upper(candidates: &[WidthEstimate]) -> Option<WidthEstimate> {
    if let Some(e) = candidates.iter().find(|e| e.kind == EstimateKind::Exact) {
        return Some(*e);
    }
    candidates
        .iter()
        .filter(|e| e.kind == EstimateKind::Upper)
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .copied()
}

fn check_shapes(t: &Matrix, domain: &NormedSpace, target: &NormedSpace) -> Result<()> {
    check_dim(domain.dim(), t.ncols())?;
    check_dim(target.dim(), t.nrows())
}

/// R_t T R_d⁻¹ for Euclidean-type spaces, whose singular values are the widths of T.
pub fn euclidean_model(t: &Matrix, domain: &NormedSpace, target: &NormedSpace) -> Option<Matrix> {
    let rd = domain.euclidean_factor()?;
    let rt = target.euclidean_factor()?;
    let rd_inv = rd.try_inverse()?;
    Some(rt * t * rd_inv)
}

/// Largest ‖Tx‖ over sign vectors x ∈ {±1}^m, with the maximizing x.
fn sign_vertex_max(t: &Matrix, target: &NormedSpace) -> (f64, Vector) {
    let m = t.ncols();
    let mut x = Vector::from_element(m, 1.0);
    let mut y = t * &x;
    let mut best = target.norm_unchecked(&y);
    let mut best_x = x.clone();
    // Gray code over the last m − 1 signs; x and −x give the same norm.
    let count: u64 = 1 << (m.saturating_sub(1));
    for step in 1..count {
        let bit = step.trailing_zeros() as usize + 1;
        x[bit] = -x[bit];
        let col = t.column(bit);
        y += col * (2.0 * x[bit]);
        let v = target.norm_unchecked(&y);
        if v > best {
            best = v;
            best_x = x.clone();
        }
    }
    (best, best_x)
}

const VERTEX_ENUMERATION_MAX_DIM: usize = 20;

/// ‖T‖ from the domain to the target (the width d₀).
///
/// Exact for Euclidean-type spaces (SVD), ℓ₁ domains (columns), ℓ_∞ targets
/// (rows) and ℓ_∞ domains with m ≤ 20 (vertex enumeration); otherwise a
/// multistart ascent value tagged heuristic.
pub fn operator_norm(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
) -> Result<WidthEstimate> {
    check_shapes(t, domain, target)?;
    if let Some(model) = euclidean_model(t, domain, target) {
        let s = linalg::singular_values(&model);
        return Ok(WidthEstimate::new(
            0,
            s.first().copied().unwrap_or(0.0),
            EstimateKind::Exact,
            WidthMethod::Svd,
        ));
    }
    if let Some(v) = exact_polyhedral_norm(t, domain, target) {
        return Ok(WidthEstimate::new(
            0,
            v,
            EstimateKind::Exact,
            WidthMethod::VertexEnumeration,
        ));
    }
    let (v, _) = multistart_norm(t, domain, target, 8, 0x5eed);
    Ok(WidthEstimate::new(
        0,
        v,
        EstimateKind::Heuristic,
        WidthMethod::MultistartAscent,
    ))
}

fn exact_polyhedral_norm(t: &Matrix, domain: &NormedSpace, target: &NormedSpace) -> Option<f64> {
    if domain.exponent().is_some_and(|p| p.is_one()) {
        let v = (0..t.ncols())
            .map(|j| target.norm_unchecked(&t.column(j).into_owned()))
            .fold(0.0, f64::max);
        return Some(v);
    }
    if target.exponent().is_some_and(|p| p.is_infinite()) {
        let dual = domain.dual();
        let v = (0..t.nrows())
            .map(|i| dual.norm_unchecked(&t.row(i).transpose()))
            .fold(0.0, f64::max);
        return Some(v);
    }
    if domain.exponent().is_some_and(|p| p.is_infinite()) && t.ncols() <= VERTEX_ENUMERATION_MAX_DIM
    {
        return Some(sign_vertex_max(t, target).0);
    }
    None
}

/// A certified upper bound on ‖T‖ (exact where available, else norm comparison with ℓ₂).
pub fn operator_norm_upper(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
) -> Result<(f64, EstimateKind)> {
    let est = operator_norm(t, domain, target)?;
    if est.kind == EstimateKind::Exact {
        return Ok((est.value, EstimateKind::Exact));
    }
    let (a_dom, _) = domain.euclidean_equivalence();
    let (_, b_tgt) = target.euclidean_equivalence();
    let s = linalg::singular_values(t).first().copied().unwrap_or(0.0);
    Ok((s * b_tgt / a_dom, EstimateKind::Upper))
}

/// Boyd-style fixed-point ascent for max ‖Tx‖ over the domain ball.
pub(crate) fn multistart_norm(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    random_starts: usize,
    seed: u64,
) -> (f64, Vector) {
    let m = t.ncols();
    let dual_domain = domain.dual();
    let mut starts: Vec<Vector> = Vec::new();
    for j in 0..m {
        let mut e = Vector::zeros(m);
        e[j] = 1.0;
        starts.push(e);
    }
    let dec = linalg::svd(t);
    if !dec.singular_values.is_empty() {
        starts.push(dec.v_t.row(0).transpose());
    }
    let mut r = rng(seed);
    for _ in 0..random_starts {
        starts.push(gaussian_vector(&mut r, m));
    }
    let mut best = 0.0;
    let mut best_x = Vector::zeros(m);
    for s in starts {
        let mut x = domain.normalize(&s);
        let mut val = target.norm_unchecked(&(t * &x));
        for _ in 0..200 {
            let y = t * &x;
            let g = t.tr_mul(&target.norming_functional(&y));
            let x_new = dual_domain.norming_functional(&g);
            let x_new = domain.normalize(&x_new);
            let v_new = target.norm_unchecked(&(t * &x_new));
            if v_new <= val * (1.0 + 1e-14) {
                if v_new > val {
                    val = v_new;
                    x = x_new;
                }
                break;
            }
            val = v_new;
            x = x_new;
        }
        if val > best {
            best = val;
            best_x = x;
        }
    }
    (best, best_x)
}

/// Kolmogorov widths d_k = s_{k+1}(T) of an ℓ₂ → ℓ₂ operator for k = 0..=min(rows, cols).
pub fn hilbert_widths(t: &Matrix) -> Vec<WidthEstimate> {
    let s = linalg::singular_values(t);
    (0..=s.len())
        .map(|k| {
            WidthEstimate::new(
                k,
                s.get(k).copied().unwrap_or(0.0),
                EstimateKind::Exact,
                WidthMethod::Svd,
            )
        })
        .collect()
}

/// Coordinate-subspace bound d_n(D_α: ℓ₂^m → ℓ_q^m) ≤ (n+1)^{−α} for q > 2.
pub fn diagonal_width_upper(alpha: f64, q: f64, n: usize, m: usize) -> Result<WidthEstimate> {
    if !(q > 2.0) {
        return Err(Error::config("the diagonal formula needs q > 2"));
    }
    if !(alpha > 0.0) {
        return Err(Error::config("alpha must be positive"));
    }
    if n >= m {
        return Err(Error::config(
            "n must be smaller than the ambient dimension",
        ));
    }
    Ok(WidthEstimate::new(
        n,
        ((n + 1) as f64).powf(-alpha),
        EstimateKind::Upper,
        WidthMethod::CoordinateSubspace,
    ))
}

/// Search effort for widths outside the exact regimes.
#[derive(Clone, Debug, PartialEq)]
pub struct WidthOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Largest ℓ_∞ domain dimension whose sign vertices are enumerated.
    pub max_vertex_dim: usize,
}

impl Default for WidthOptions {
    fn default() -> Self {
        WidthOptions {
            restarts: 4,
            seed: 0,
            max_vertex_dim: 10,
        }
    }
}

/// Extreme points of the domain ball, up to sign, when there are finitely many.
fn domain_extreme_points(domain: &NormedSpace, max_vertex_dim: usize) -> Option<Vec<Vector>> {
    let m = domain.dim();
    let p = domain.exponent()?;
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
    if p.is_infinite() && m <= max_vertex_dim {
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

/// The best certified estimate of d_n(T) available for this pair of spaces.
pub fn kolmogorov_width(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    n: usize,
    opts: &WidthOptions,
) -> Result<WidthEstimate> {
    check_shapes(t, domain, target)?;
    if let Some(model) = euclidean_model(t, domain, target) {
        let s = linalg::singular_values(&model);
        return Ok(WidthEstimate::new(
            n,
            s.get(n).copied().unwrap_or(0.0),
            EstimateKind::Exact,
            WidthMethod::Svd,
        ));
    }
    let rank = linalg::numerical_rank(t, 1e-12);
    if n >= rank {
        return Ok(WidthEstimate::new(
            n,
            0.0,
            EstimateKind::Exact,
            WidthMethod::Svd,
        ));
    }
    if n == 0 {
        let est = operator_norm(t, domain, target)?;
        if est.kind == EstimateKind::Exact {
            return Ok(est);
        }
    }
    let mut candidates = Vec::new();
    // d_n(T: X → Y) ≤ (b_Y / a_X) · s_{n+1}(T) from a_X‖x‖₂ ≤ ‖x‖_X and ‖y‖_Y ≤ b_Y‖y‖₂.
    let (a_dom, _) = domain.euclidean_equivalence();
    let (_, b_tgt) = target.euclidean_equivalence();
    let s = linalg::singular_values(t);
    candidates.push(WidthEstimate::new(
        n,
        s.get(n).copied().unwrap_or(0.0) * b_tgt / a_dom,
        EstimateKind::Upper,
        WidthMethod::NormComparison,
    ));
    if let Some(ext) = domain_extreme_points(domain, opts.max_vertex_dim) {
        let images: Vec<Vector> = ext.iter().map(|x| t * x).collect();
        let est = match brute_force_width(&images, target, n, &BruteForceGrid::default()) {
            Ok(e) => e,
            Err(Error::Regime(_)) => {
                alternating_minimax(&images, target, n, opts.restarts, opts.seed)?
            }
            Err(e) => return Err(e),
        };
        candidates.push(WidthEstimate { n, ..est });
    }
    Ok(best_upper(&candidates).expect("norm comparison always applies"))
}

/// d_n(T) for n in `ns`, made non-increasing by carrying smaller earlier bounds forward.
pub fn kolmogorov_widths(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    ns: core::ops::RangeInclusive<usize>,
    opts: &WidthOptions,
) -> Result<Vec<WidthEstimate>> {
    let mut out: Vec<WidthEstimate> = Vec::new();
    for n in ns {
        let sub = WidthOptions {
            seed: derive_seed(opts.seed, n as u64),
            ..opts.clone()
        };
        let mut est = kolmogorov_width(t, domain, target, n, &sub)?;
        if let Some(prev) = out.last() {
            if prev.value < est.value && prev.kind.is_upper() && est.kind != EstimateKind::Exact {
                est = WidthEstimate { n, ..*prev };
            }
        }
        out.push(est);
    }
    Ok(out)
}

/// Gelfand width dⁿ(T) computed as the Kolmogorov width of the transpose between dual spaces.
pub fn gelfand_width(
    t: &Matrix,
    domain: &NormedSpace,
    target: &NormedSpace,
    n: usize,
    opts: &WidthOptions,
) -> Result<WidthEstimate> {
    check_shapes(t, domain, target)?;
    let est = kolmogorov_width(&t.transpose(), &target.dual(), &domain.dual(), n, opts)?;
    Ok(WidthEstimate {
        method: WidthMethod::Duality,
        ..est
    })
}

/// True when both spaces are Euclidean-type, so widths are singular values.
pub fn is_hilbert_pair(domain: &NormedSpace, target: &NormedSpace) -> bool {
    domain.is_inner_product() && target.is_inner_product()
}

#[cfg(test)]
mod tests;
