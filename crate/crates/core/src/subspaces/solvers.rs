//! Best-approximation solvers on a Euclidean-orthonormal basis Q.
//!
//! Each solver returns the best approximation of f from span(Q) and an
//! (unnormalized) dual functional vanishing on span(Q).

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::lp;
use crate::spaces::{lp_norm, LpExponent, WeightedEuclidean};

pub(super) fn euclidean(f: &Vector, q: &Matrix) -> (Vector, Vector) {
    let mut a = q.tr_mul(f);
    let r = f - q * &a;
    a += q.tr_mul(&r);
    let y = q * a;
    let r = f - &y;
    (y, r)
}

/// Coefficients a minimizing ‖f − Qa‖_G, with one refinement step.
pub(super) fn weighted_coefficients(f: &Vector, q: &Matrix, g: &Matrix) -> (Vector, Vector) {
    let gq = g * q;
    let m = q.tr_mul(&gq);
    let chol = m
        .cholesky()
        .expect("QᵀGQ is positive definite for orthonormal Q");
    let mut a = chol.solve(&gq.tr_mul(f));
    let r = f - q * &a;
    a += chol.solve(&gq.tr_mul(&r));
    let r = f - q * &a;
    (a, r)
}

pub(super) fn weighted(f: &Vector, q: &Matrix, w: &WeightedEuclidean) -> (Vector, Vector) {
    let (a, r) = weighted_coefficients(f, q, w.gram());
    (q * a, w.gram() * r)
}

fn scale_of(f: &Vector) -> f64 {
    f.amax()
}

/// min t subject to −t ≤ f − Qa ≤ t, written with a = a⁺ − a⁻ and surplus variables.
pub(super) fn linf(f: &Vector, q: &Matrix) -> Result<(Vector, Vector)> {
    let (m, k) = q.shape();
    let s = scale_of(f);
    if s == 0.0 {
        return Ok((Vector::zeros(m), Vector::zeros(m)));
    }
    let fs = f / s;
    // columns: a⁺ (k), a⁻ (k), t, s1 (m), s2 (m)
    let n = 2 * k + 1 + 2 * m;
    let mut a = Matrix::zeros(2 * m, n);
    let mut b = vec![0.0; 2 * m];
    for i in 0..m {
        for j in 0..k {
            a[(i, j)] = q[(i, j)];
            a[(i, k + j)] = -q[(i, j)];
            a[(m + i, j)] = -q[(i, j)];
            a[(m + i, k + j)] = q[(i, j)];
        }
        a[(i, 2 * k)] = 1.0;
        a[(m + i, 2 * k)] = 1.0;
        a[(i, 2 * k + 1 + i)] = -1.0;
        a[(m + i, 2 * k + 1 + m + i)] = -1.0;
        b[i] = fs[i];
        b[m + i] = -fs[i];
    }
    let mut c = vec![0.0; n];
    c[2 * k] = 1.0;
    let sol = lp::solve_standard(&a, &b, &c)?;
    Ok(finish_polyhedral(&sol, q, s, m, k))
}

/// min Σ tᵢ subject to −t ≤ f − Qa ≤ t.
pub(super) fn l1(f: &Vector, q: &Matrix) -> Result<(Vector, Vector)> {
    let (m, k) = q.shape();
    let s = scale_of(f);
    if s == 0.0 {
        return Ok((Vector::zeros(m), Vector::zeros(m)));
    }
    let fs = f / s;
    // columns: a⁺ (k), a⁻ (k), t (m), s1 (m), s2 (m)
    let n = 2 * k + 3 * m;
    let mut a = Matrix::zeros(2 * m, n);
    let mut b = vec![0.0; 2 * m];
    for i in 0..m {
        for j in 0..k {
            a[(i, j)] = q[(i, j)];
            a[(i, k + j)] = -q[(i, j)];
            a[(m + i, j)] = -q[(i, j)];
            a[(m + i, k + j)] = q[(i, j)];
        }
        a[(i, 2 * k + i)] = 1.0;
        a[(m + i, 2 * k + i)] = 1.0;
        a[(i, 2 * k + m + i)] = -1.0;
        a[(m + i, 2 * k + 2 * m + i)] = -1.0;
        b[i] = fs[i];
        b[m + i] = -fs[i];
    }
    let mut c = vec![0.0; n];
    for v in c.iter_mut().skip(2 * k).take(m) {
        *v = 1.0;
    }
    let sol = lp::solve_standard(&a, &b, &c)?;
    Ok(finish_polyhedral(&sol, q, s, m, k))
}

fn finish_polyhedral(
    sol: &lp::LpSolution,
    q: &Matrix,
    s: f64,
    m: usize,
    k: usize,
) -> (Vector, Vector) {
    let coeffs = Vector::from_fn(k, |j, _| sol.x[j] - sol.x[k + j]);
    let y = q * coeffs * s;
    let b = Vector::from_fn(m, |i, _| sol.duals[i] - sol.duals[m + i]);
    (y, b)
}

struct Objective {
    p: f64,
    eps: f64,
}

impl Objective {
    fn value(&self, r: &Vector) -> f64 {
        let half = self.p / 2.0;
        r.iter()
            .map(|&v| {
                if self.eps == 0.0 {
                    v.abs().powf(self.p)
                } else {
                    (v * v + self.eps * self.eps).powf(half)
                }
            })
            .sum()
    }

    fn derivatives(&self, r: &Vector) -> (Vector, Vector) {
        let p = self.p;
        if self.eps == 0.0 {
            let d1 = r.map(|v| p * v.abs().powf(p - 1.0) * v.signum());
            let d2 = r.map(|v| p * (p - 1.0) * v.abs().powf(p - 2.0));
            (d1, d2)
        } else {
            let e2 = self.eps * self.eps;
            let d1 = r.map(|v| p * v * (v * v + e2).powf(p / 2.0 - 1.0));
            let d2 = r.map(|v| p * (v * v + e2).powf(p / 2.0 - 2.0) * ((p - 1.0) * v * v + e2));
            (d1, d2)
        }
    }
}

const NEWTON_MAX_ITER: usize = 400;

/// Damped Newton with Armijo backtracking. Returns the number of iterations used
/// or the best iterate on failure.
fn newton(
    fs: &Vector,
    q: &Matrix,
    a: &mut Vector,
    obj: &Objective,
) -> core::result::Result<usize, ()> {
    let k = q.ncols();
    let mut r = fs - q * &*a;
    let mut fval = obj.value(&r);
    let mut stalled = 0;
    for it in 0..NEWTON_MAX_ITER {
        let (d1, d2) = obj.derivatives(&r);
        // gradient of F(a) is −Qᵀφ′(r)
        let neg_grad = q.tr_mul(&d1);
        let mut h = Matrix::zeros(k, k);
        for i in 0..q.nrows() {
            let w = d2[i];
            if w != 0.0 {
                let row = q.row(i);
                h += row.transpose() * row * w;
            }
        }
        let trace = h.trace().max(f64::MIN_POSITIVE);
        let mut reg = 1e-14 * trace / k as f64;
        let dir = loop {
            let mut hr = h.clone();
            for j in 0..k {
                hr[(j, j)] += reg;
            }
            if let Some(ch) = hr.cholesky() {
                break ch.solve(&neg_grad);
            }
            reg = (reg * 100.0).max(1e-300);
            if reg > trace {
                return Err(());
            }
        };
        let decrement = neg_grad.dot(&dir);
        if !(decrement.is_finite()) {
            return Err(());
        }
        if decrement <= 1e-26 * fval.max(f64::MIN_POSITIVE) {
            return Ok(it);
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &*a + &dir * t;
            let rt = fs - q * &trial;
            let ft = obj.value(&rt);
            if ft <= fval - 1e-4 * t * decrement {
                let improvement = fval - ft;
                *a = trial;
                r = rt;
                if improvement <= 1e-15 * fval {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                fval = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || stalled >= 3 {
            return Ok(it);
        }
    }
    Err(())
}

/// ℓ_p distance for 1 < p < ∞, p ≠ 2, warm-started from the Euclidean projection.
/// For p < 2 the objective is smoothed with ε annealed from 1e−2 to 1e−10.
pub(super) fn lp_newton(f: &Vector, q: &Matrix, p: LpExponent) -> Result<(Vector, Vector)> {
    let m = q.nrows();
    let s = scale_of(f);
    if s == 0.0 {
        return Ok((Vector::zeros(m), Vector::zeros(m)));
    }
    let fs = f / s;
    let pv = p.value();
    let mut a = q.tr_mul(&fs);
    let schedule: Vec<f64> = if pv < 2.0 {
        (2..=10).map(|e| 10f64.powi(-e)).collect()
    } else {
        vec![0.0]
    };
    for eps in schedule {
        let obj = Objective { p: pv, eps };
        if newton(&fs, q, &mut a, &obj).is_err() {
            let r = &fs - q * &a;
            return Err(Error::Solver {
                iterations: NEWTON_MAX_ITER,
                best_value: s * lp_norm(r.as_slice(), p),
                best_iterate: a.iter().map(|v| v * s).collect(),
            });
        }
    }
    let r = &fs - q * &a;
    let rn = lp_norm(r.as_slice(), p);
    let b = if rn > 0.0 {
        let w = r.map(|v| v.signum() * (v.abs() / rn).powf(pv - 1.0));
        // Smoothing leaves w slightly off V⊥; the projection costs only second order in ⟨r, b⟩.
        &w - q * q.tr_mul(&w)
    } else {
        Vector::zeros(m)
    };
    Ok((q * a * s, b))
}
