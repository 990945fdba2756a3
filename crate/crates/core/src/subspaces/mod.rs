//! Subspaces, best-approximation distances with dual certificates, and
//! Gram–Schmidt / orthogonal projection in Euclidean metrics.

mod solvers;

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::spaces::{Norm, NormedSpace};

/// Relative singular-value threshold for accepting a basis.
pub const RANK_TOL: f64 = 1e-10;
/// Relative drop threshold for dependent inputs in Gram–Schmidt.
pub const GRAM_SCHMIDT_DROP_TOL: f64 = 1e-12;

/// The column span of an m×k basis inside a normed space.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Matrix,
    orthonormal: Matrix,
    /// basis = orthonormal · r_factor
    r_factor: Matrix,
    space: NormedSpace,
}

impl Subspace {
    pub fn new(basis: Matrix, space: NormedSpace) -> Result<Self> {
        check_dim(space.dim(), basis.nrows())?;
        let k = basis.ncols();
        if k == 0 {
            return Ok(Subspace::zero(space));
        }
        if k > basis.nrows() {
            return Err(Error::Rank(alloc::format!(
                "{k} vectors cannot be independent in dimension {}",
                basis.nrows()
            )));
        }
        let rank = linalg::numerical_rank(&basis, RANK_TOL);
        if rank < k {
            return Err(Error::Rank(alloc::format!(
                "basis of {k} columns has numerical rank {rank}"
            )));
        }
        let qr = basis.clone().qr();
        let orthonormal = qr.q();
        let r_factor = qr.r();
        Ok(Subspace {
            basis,
            orthonormal,
            r_factor,
            space,
        })
    }

    pub fn from_vectors(vectors: &[Vector], space: NormedSpace) -> Result<Self> {
        let m = space.dim();
        for v in vectors {
            check_dim(m, v.len())?;
        }
        Subspace::new(linalg::from_columns(vectors, m), space)
    }

    /// Span of arbitrary (possibly dependent) vectors, with an orthonormal basis.
    pub fn spanned_by(vectors: &[Vector], space: NormedSpace, rel_tol: f64) -> Result<Self> {
        let m = space.dim();
        for v in vectors {
            check_dim(m, v.len())?;
        }
        if vectors.is_empty() {
            return Ok(Subspace::zero(space));
        }
        let q = linalg::column_space(&linalg::from_columns(vectors, m), rel_tol);
        Subspace::new(q, space)
    }

    pub fn zero(space: NormedSpace) -> Self {
        let m = space.dim();
        Subspace {
            basis: Matrix::zeros(m, 0),
            orthonormal: Matrix::zeros(m, 0),
            r_factor: Matrix::zeros(0, 0),
            space,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn orthonormal(&self) -> &Matrix {
        &self.orthonormal
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    /// The same column span measured in another norm.
    pub fn with_space(&self, space: NormedSpace) -> Result<Self> {
        check_dim(self.ambient_dim(), space.dim())?;
        Ok(Subspace {
            space,
            ..self.clone()
        })
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        linalg::columns(&self.basis)
    }

    /// Coefficients c with basis·c = y for y in the span.
    pub fn coefficients_of(&self, y: &Vector) -> Vector {
        if self.dim() == 0 {
            return Vector::zeros(0);
        }
        let a = self.orthonormal.tr_mul(y);
        self.r_factor
            .solve_upper_triangular(&a)
            .unwrap_or_else(|| Vector::zeros(self.dim()))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        let r = x - &self.orthonormal * self.orthonormal.tr_mul(x);
        r.norm() <= tol * x.norm().max(1.0)
    }

    /// Span of this basis plus `v`.
    pub fn extended(&self, v: &Vector) -> Result<Self> {
        let mut vs = self.basis_vectors();
        vs.push(v.clone());
        Subspace::from_vectors(&vs, self.space.clone())
    }
}

/// A best approximation of f from a subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceResult {
    pub value: f64,
    /// Coefficients c in the subspace basis of the best approximation.
    pub minimizer: Vector,
    /// A functional b with ‖b‖′ = 1, b ⟂ V and ⟨f, b⟩ = value; absent when f ∈ V.
    pub certificate: Option<Vector>,
}

impl DistanceResult {
    pub fn approximant(&self, v: &Subspace) -> Vector {
        v.basis() * &self.minimizer
    }
}

/// dist(f, V) in the norm of V's space.
///
/// ℓ₂ and weighted Euclidean norms use orthogonal projection, ℓ₁ and ℓ_∞ a
/// linear program, other ℓ_p damped Newton on the smooth objective.
pub fn dist_to_subspace(f: &Vector, v: &Subspace) -> Result<DistanceResult> {
    check_dim(v.ambient_dim(), f.len())?;
    let space = v.space();
    let (approximant, certificate) = if v.dim() == 0 {
        (Vector::zeros(f.len()), space.norming_functional(f))
    } else {
        match space.norm_kind() {
            Norm::Lp(p) if p.is_two() => solvers::euclidean(f, v.orthonormal()),
            Norm::WeightedEuclidean(w) => solvers::weighted(f, v.orthonormal(), w),
            Norm::Lp(p) if p.is_infinite() => solvers::linf(f, v.orthonormal())?,
            Norm::Lp(p) if p.is_one() => solvers::l1(f, v.orthonormal())?,
            Norm::Lp(p) => solvers::lp_newton(f, v.orthonormal(), *p)?,
        }
    };
    let residual = f - &approximant;
    let value = space.norm_unchecked(&residual);
    let degenerate = value <= 1e-12 * space.norm_unchecked(f).max(1.0);
    let certificate = if degenerate {
        None
    } else {
        let n = space.dual_norm_unchecked(&certificate);
        (n > 0.0).then(|| certificate / n)
    };
    Ok(DistanceResult {
        value,
        minimizer: v.coefficients_of(&approximant),
        certificate,
    })
}

/// A norm-one functional vanishing on V and attaining dist(f, V).
pub fn dual_certificate(f: &Vector, v: &Subspace) -> Result<Vector> {
    let d = dist_to_subspace(f, v)?;
    match d.certificate {
        Some(b) => Ok(b),
        None => Err(Error::DegenerateCertificate {
            fallback: annihilator(v).iter().copied().collect(),
        }),
    }
}

/// Some functional of dual norm one vanishing on V (zero if V is everything).
pub fn annihilator(v: &Subspace) -> Vector {
    let m = v.ambient_dim();
    let q = v.orthonormal();
    let mut best = Vector::zeros(m);
    let mut best_norm = 0.0;
    for i in 0..m {
        let mut e = Vector::zeros(m);
        e[i] = 1.0;
        let r = &e - q * q.tr_mul(&e);
        let n = r.norm();
        if n > best_norm + 1e-12 {
            best_norm = n;
            best = r;
        }
    }
    if best_norm <= 1e-12 {
        return Vector::zeros(m);
    }
    let n = v.space().dual_norm_unchecked(&best);
    best / n
}

fn metric_gram(metric: &NormedSpace) -> Result<Option<&Matrix>> {
    match metric.norm_kind() {
        Norm::Lp(p) if p.is_two() => Ok(None),
        Norm::WeightedEuclidean(w) => Ok(Some(w.gram())),
        Norm::Lp(_) => Err(Error::config("metric must come from an inner product")),
    }
}

/// Output of [`gram_schmidt`].
#[derive(Clone, Debug)]
pub struct GramSchmidt {
    /// φ_j, orthonormal in the metric.
    pub orthonormal: Vec<Vector>,
    /// Entry (ℓ, j) is ⟨f_ℓ, φ_j⟩; zero above the diagonal of the kept rows.
    pub coefficients: Matrix,
    /// Input indices that produced each φ_j.
    pub kept: Vec<usize>,
    /// Input indices dropped as dependent.
    pub dropped: Vec<usize>,
}

/// Modified Gram–Schmidt with one reorthogonalization pass in ⟨x, y⟩ = xᵀGy.
///
/// Inputs whose residual falls below 1e−12 of their own norm are dropped,
/// or rejected with [`Error::Rank`] when `strict` is set.
pub fn gram_schmidt(vectors: &[Vector], metric: &NormedSpace, strict: bool) -> Result<GramSchmidt> {
    metric_gram(metric)?;
    let mut phis: Vec<Vector> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (l, f) in vectors.iter().enumerate() {
        check_dim(metric.dim(), f.len())?;
        let input_norm = metric.norm_unchecked(f);
        let mut r = f.clone();
        for _ in 0..2 {
            for phi in &phis {
                let c = metric.inner(&r, phi).unwrap_or(0.0);
                r -= phi * c;
            }
        }
        let n = metric.norm_unchecked(&r);
        if n <= GRAM_SCHMIDT_DROP_TOL * input_norm || n == 0.0 {
            if strict {
                return Err(Error::Rank(alloc::format!(
                    "input vector {l} is dependent on its predecessors"
                )));
            }
            dropped.push(l);
            continue;
        }
        phis.push(r / n);
        kept.push(l);
    }
    let mut coefficients = Matrix::zeros(vectors.len(), phis.len());
    for (l, f) in vectors.iter().enumerate() {
        for (j, phi) in phis.iter().enumerate() {
            coefficients[(l, j)] = metric.inner(f, phi).unwrap_or(0.0);
        }
    }
    Ok(GramSchmidt {
        orthonormal: phis,
        coefficients,
        kept,
        dropped,
    })
}

/// Orthogonal projection onto `target` in the metric's inner product.
pub fn orthogonal_project(target: &Subspace, metric: &NormedSpace, y: &Vector) -> Result<Vector> {
    check_dim(target.ambient_dim(), y.len())?;
    check_dim(metric.dim(), y.len())?;
    if target.dim() == 0 {
        return Ok(Vector::zeros(y.len()));
    }
    let q = target.orthonormal();
    Ok(match metric_gram(metric)? {
        None => {
            let mut p = q * q.tr_mul(y);
            let r = y - &p;
            p += q * q.tr_mul(&r);
            p
        }
        Some(g) => {
            let (a, _) = solvers::weighted_coefficients(y, q, g);
            q * a
        }
    })
}
