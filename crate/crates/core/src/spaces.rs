//! Normed spaces ℝ^m, dual exponents and compact-set representations.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
use num_traits::Float;
use sha2::{Digest, Sha256};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::sampling::HaltonGaussian;

/// An exponent p ∈ [1, ∞]. The endpoints are stored exactly.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LpExponent(f64);

impl LpExponent {
    pub const ONE: LpExponent = LpExponent(1.0);
    pub const TWO: LpExponent = LpExponent(2.0);
    pub const INFINITY: LpExponent = LpExponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::config(format!("exponent p = {p} is not in [1, ∞]")));
        }
        Ok(LpExponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    /// Conjugate exponent p′ with 1/p + 1/p′ = 1.
    pub fn conjugate(self) -> LpExponent {
        if self.is_one() {
            LpExponent::INFINITY
        } else if self.is_infinite() {
            LpExponent::ONE
        } else if self.is_two() {
            LpExponent::TWO
        } else {
            LpExponent(self.0 / (self.0 - 1.0))
        }
    }

    /// |1/2 − 1/p|, the exponent in the ℓ_p Banach–Mazur and Grothendieck bounds.
    pub fn euclidean_distortion_exponent(self) -> f64 {
        (0.5 - self.reciprocal()).abs()
    }

    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl core::fmt::Display for LpExponent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for LpExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for LpExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = LpExponent;
            fn expecting(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                f.write_str("a number p >= 1 or the string \"inf\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> core::result::Result<LpExponent, E> {
                LpExponent::new(v).map_err(E::custom)
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> core::result::Result<LpExponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> core::result::Result<LpExponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: serde::de::Error>(
                self,
                v: &str,
            ) -> core::result::Result<LpExponent, E> {
                match v {
                    "inf" | "infinity" | "∞" => Ok(LpExponent::INFINITY),
                    other => other
                        .parse::<f64>()
                        .map_err(E::custom)
                        .and_then(|p| self.visit_f64(p)),
                }
            }
        }
        d.deserialize_any(Visitor)
    }
}

/// A pair (p, p′) of conjugate exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualExponent {
    pub p: LpExponent,
    pub p_prime: LpExponent,
}

impl DualExponent {
    pub fn new(p: LpExponent) -> Self {
        DualExponent {
            p,
            p_prime: p.conjugate(),
        }
    }

    pub fn swapped(self) -> Self {
        DualExponent {
            p: self.p_prime,
            p_prime: self.p,
        }
    }
}

/// Euclidean norm ‖x‖ = √(xᵀGx) for a symmetric positive-definite G.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEuclidean {
    gram: Matrix,
    /// Lower Cholesky factor L with G = LLᵀ.
    chol: Matrix,
}

impl WeightedEuclidean {
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::dim(gram.nrows(), gram.ncols()));
        }
        if !linalg::is_symmetric(&gram, 1e-10) {
            return Err(Error::config("weighted norm matrix is not symmetric"));
        }
        let gram = linalg::symmetrize(&gram);
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::config("weighted norm matrix is not positive definite"))?
            .l();
        Ok(WeightedEuclidean { gram, chol })
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn cholesky_factor(&self) -> &Matrix {
        &self.chol
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        (self.chol.transpose() * x).dot(&(self.chol.transpose() * y))
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        scaled_l2(self.chol.tr_mul(x).as_slice())
    }

    /// √(bᵀG⁻¹b), computed by one triangular solve.
    pub fn dual_norm(&self, b: &Vector) -> f64 {
        let z = self
            .chol
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a positive diagonal");
        scaled_l2(z.as_slice())
    }

    pub fn inverse(&self) -> WeightedEuclidean {
        let n = self.gram.nrows();
        let l_inv = self
            .chol
            .solve_lower_triangular(&Matrix::identity(n, n))
            .expect("Cholesky factor has a positive diagonal");
        WeightedEuclidean::new(l_inv.transpose() * l_inv).expect("inverse of an SPD matrix is SPD")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Norm {
    Lp(LpExponent),
    WeightedEuclidean(WeightedEuclidean),
}

/// ℝ^m with an ℓ_p or weighted Euclidean norm.
#[derive(Clone, Debug, PartialEq)]
pub struct NormedSpace {
    dim: usize,
    norm: Norm,
}

fn scaled_l2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale
        * x.iter()
            .map(|v| (v / scale) * (v / scale))
            .sum::<f64>()
            .sqrt()
}

pub(crate) fn lp_norm(x: &[f64], p: LpExponent) -> f64 {
    if p.is_infinite() {
        return x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    if p.is_one() {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p.is_two() {
        return scaled_l2(x);
    }
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let pv = p.value();
    scale
        * x.iter()
            .map(|v| (v.abs() / scale).powf(pv))
            .sum::<f64>()
            .powf(1.0 / pv)
}

/// b with ‖b‖_{p′} = 1 and ⟨x, b⟩ = ‖x‖_p; zero for x = 0.
pub(crate) fn lp_norming_functional(x: &Vector, p: LpExponent) -> Vector {
    let n = lp_norm(x.as_slice(), p);
    if n == 0.0 {
        return Vector::zeros(x.len());
    }
    if p.is_one() {
        return x.map(|v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        });
    }
    if p.is_infinite() {
        let mut best = 0;
        for i in 0..x.len() {
            if x[i].abs() > x[best].abs() {
                best = i;
            }
        }
        let mut b = Vector::zeros(x.len());
        b[best] = x[best].signum();
        return b;
    }
    if p.is_two() {
        return x / n;
    }
    let pv = p.value();
    x.map(|v| v.signum() * (v.abs() / n).powf(pv - 1.0))
}

impl NormedSpace {
    pub fn new(dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("space dimension must be positive"));
        }
        if let Norm::WeightedEuclidean(w) = &norm {
            check_dim(dim, w.gram.nrows())?;
        }
        Ok(NormedSpace { dim, norm })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        NormedSpace::new(dim, Norm::Lp(LpExponent::new(p)?))
    }

    pub fn with_exponent(dim: usize, p: LpExponent) -> Result<Self> {
        NormedSpace::new(dim, Norm::Lp(p))
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        NormedSpace::new(dim, Norm::Lp(LpExponent::TWO))
    }

    pub fn weighted(gram: Matrix) -> Result<Self> {
        let dim = gram.nrows();
        NormedSpace::new(dim, Norm::WeightedEuclidean(WeightedEuclidean::new(gram)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> &Norm {
        &self.norm
    }

    pub fn exponent(&self) -> Option<LpExponent> {
        match self.norm {
            Norm::Lp(p) => Some(p),
            Norm::WeightedEuclidean(_) => None,
        }
    }

    /// True for ℓ₂ and weighted Euclidean norms.
    pub fn is_inner_product(&self) -> bool {
        match &self.norm {
            Norm::Lp(p) => p.is_two(),
            Norm::WeightedEuclidean(_) => true,
        }
    }

    pub fn is_lp(&self, p: f64) -> bool {
        matches!(self.norm, Norm::Lp(q) if q.value() == p)
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &Vector) -> f64 {
        match &self.norm {
            Norm::Lp(p) => lp_norm(x.as_slice(), *p),
            Norm::WeightedEuclidean(w) => w.norm(x),
        }
    }

    /// Norm of a functional b ∈ X′ under the pairing ⟨x, b⟩ = Σ xᵢbᵢ.
    pub fn dual_norm(&self, b: &Vector) -> Result<f64> {
        check_dim(self.dim, b.len())?;
        Ok(self.dual_norm_unchecked(b))
    }

    pub(crate) fn dual_norm_unchecked(&self, b: &Vector) -> f64 {
        match &self.norm {
            Norm::Lp(p) => lp_norm(b.as_slice(), p.conjugate()),
            Norm::WeightedEuclidean(w) => w.dual_norm(b),
        }
    }

    /// The dual space X′ realized on the same coordinates.
    pub fn dual(&self) -> NormedSpace {
        let norm = match &self.norm {
            Norm::Lp(p) => Norm::Lp(p.conjugate()),
            Norm::WeightedEuclidean(w) => Norm::WeightedEuclidean(w.inverse()),
        };
        NormedSpace {
            dim: self.dim,
            norm,
        }
    }

    /// Inner product for inner-product norms, `None` otherwise.
    pub fn inner(&self, x: &Vector, y: &Vector) -> Option<f64> {
        match &self.norm {
            Norm::Lp(p) if p.is_two() => Some(x.dot(y)),
            Norm::Lp(_) => None,
            Norm::WeightedEuclidean(w) => Some(w.inner(x, y)),
        }
    }

    /// A functional b with ‖b‖_{X′} = 1 and ⟨x, b⟩ = ‖x‖; zero for x = 0.
    ///
    /// For smooth norms this is the gradient of the norm at x.
    pub fn norming_functional(&self, x: &Vector) -> Vector {
        match &self.norm {
            Norm::Lp(p) => lp_norming_functional(x, *p),
            Norm::WeightedEuclidean(w) => {
                let n = w.norm(x);
                if n == 0.0 {
                    Vector::zeros(x.len())
                } else {
                    &w.gram * x / n
                }
            }
        }
    }

    /// R with ‖x‖ = ‖Rx‖₂ for inner-product norms.
    pub fn euclidean_factor(&self) -> Option<Matrix> {
        match &self.norm {
            Norm::Lp(p) if p.is_two() => Some(Matrix::identity(self.dim, self.dim)),
            Norm::Lp(_) => None,
            Norm::WeightedEuclidean(w) => Some(w.chol.transpose()),
        }
    }

    /// Constants (a, b) with a‖x‖₂ ≤ ‖x‖ ≤ b‖x‖₂ for every x.
    pub fn euclidean_equivalence(&self) -> (f64, f64) {
        let m = self.dim as f64;
        match &self.norm {
            Norm::Lp(p) => {
                let e = 1.0 / p.value().max(1.0) - 0.5;
                let e = if p.is_infinite() { -0.5 } else { e };
                if e >= 0.0 {
                    (1.0, m.powf(e))
                } else {
                    (m.powf(e), 1.0)
                }
            }
            Norm::WeightedEuclidean(w) => {
                let eig = w.gram.clone().symmetric_eigenvalues();
                let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = eig.iter().copied().fold(0.0, f64::max);
                (lo.max(0.0).sqrt(), hi.sqrt())
            }
        }
    }

    /// Rescales x onto the unit sphere; zero stays zero.
    pub fn normalize(&self, x: &Vector) -> Vector {
        let n = self.norm_unchecked(x);
        if n == 0.0 {
            x.clone()
        } else {
            x / n
        }
    }

    pub fn describe(&self) -> String {
        match &self.norm {
            Norm::Lp(p) => format!("l{p}^{}", self.dim),
            Norm::WeightedEuclidean(_) => format!("weighted-euclidean^{}", self.dim),
        }
    }
}

/// Σ bᵢxᵢ.
pub fn dual_pairing(b: &Vector, x: &Vector) -> Result<f64> {
    check_dim(b.len(), x.len())?;
    Ok(b.dot(x))
}

/// The image T(B_E) of a domain unit ball, discretized on the domain sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorBall {
    pub matrix: Matrix,
    pub domain: NormedSpace,
    pub sphere_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CompactSet {
    PointCloud(Vec<Vector>),
    OperatorBall(OperatorBall),
}

impl CompactSet {
    pub fn point_cloud(points: Vec<Vector>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::config("point cloud is empty"))?
            .len();
        if first == 0 {
            return Err(Error::config("points must have positive dimension"));
        }
        for p in &points {
            check_dim(first, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("point cloud contains a non-finite entry"));
            }
        }
        Ok(CompactSet::PointCloud(points))
    }

    pub fn operator_ball(
        matrix: Matrix,
        domain: NormedSpace,
        sphere_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        check_dim(domain.dim(), matrix.ncols())?;
        if matrix.nrows() == 0 {
            return Err(Error::config("operator has no rows"));
        }
        if sphere_samples == 0 {
            return Err(Error::config("sphere_samples must be positive"));
        }
        if sphere_samples % 2 == 1 {
            return Err(Error::config(
                "sphere_samples must be even for a symmetric sample",
            ));
        }
        Ok(CompactSet::OperatorBall(OperatorBall {
            matrix,
            domain,
            sphere_samples,
            seed,
        }))
    }

    pub fn target_dim(&self) -> usize {
        match self {
            CompactSet::PointCloud(points) => points[0].len(),
            CompactSet::OperatorBall(ball) => ball.matrix.nrows(),
        }
    }

    /// The finite point list standing in for the set.
    ///
    /// An operator ball maps a symmetric, deterministic sample of the domain
    /// sphere. The sample starts with the canonical basis vectors and, for an
    /// ℓ₂ domain, the right singular vectors of the operator, followed by
    /// shifted-Halton directions; each direction is followed by its negation.
    /// A larger `sphere_samples` extends the same list.
    pub fn materialize(&self) -> Result<Vec<Vector>> {
        match self {
            CompactSet::PointCloud(points) => Ok(points.clone()),
            CompactSet::OperatorBall(ball) => {
                if ball.sphere_samples == 0 {
                    return Err(Error::config("sphere_samples must be positive"));
                }
                Ok(ball
                    .domain_sample()
                    .iter()
                    .map(|s| &ball.matrix * s)
                    .collect())
            }
        }
    }

    /// SHA-256 over the bit patterns of the materialized points, hex encoded.
    pub fn fingerprint(&self) -> Result<String> {
        Ok(fingerprint_points(&self.materialize()?))
    }
}

pub fn fingerprint_points(points: &[Vector]) -> String {
    let mut h = Sha256::new();
    h.update((points.len() as u64).to_le_bytes());
    for p in points {
        h.update((p.len() as u64).to_le_bytes());
        for v in p.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest.iter() {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

impl OperatorBall {
    /// Unit-sphere points of the domain whose images form the surrogate set.
    pub fn domain_sample(&self) -> Vec<Vector> {
        let m = self.domain.dim();
        let mut directions: Vec<Vector> = Vec::new();
        let push_unique = |v: Vector, dirs: &mut Vec<Vector>| {
            let v = canonical_sign(&self.domain.normalize(&v));
            let duplicate = dirs.iter().any(|d| (d - &v).amax() < 1e-12);
            if !duplicate && v.amax() > 0.0 {
                dirs.push(v);
            }
        };
        for i in 0..m {
            let mut e = Vector::zeros(m);
            e[i] = 1.0;
            push_unique(e, &mut directions);
        }
        if self.domain.is_lp(2.0) {
            let dec = linalg::svd(&self.matrix);
            for (i, &s) in dec.singular_values.iter().enumerate() {
                if s > 0.0 {
                    push_unique(dec.v_t.row(i).transpose(), &mut directions);
                }
            }
        }
        let pairs = self.sphere_samples / 2;
        directions.truncate(pairs);
        let mut halton = HaltonGaussian::new(m, self.seed);
        while directions.len() < pairs {
            let g = halton.next_gaussian();
            if g.amax() > 0.0 {
                directions.push(self.domain.normalize(&g));
            }
        }
        let mut out = Vec::with_capacity(2 * pairs);
        for d in directions {
            let neg = -&d;
            out.push(d);
            out.push(neg);
        }
        out
    }
}

/// Flips v so that its largest-magnitude entry (first on ties) is positive.
fn canonical_sign(v: &Vector) -> Vector {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() + 1e-14 {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        -v
    } else {
        v.clone()
    }
}
