//! Dense two-phase simplex method with Bland's rule.
//!
//! Solves min cᵀx subject to Ax = b, x ≥ 0. The final basis is re-solved
//! with an LU factorization so primal and dual values do not carry the
//! tableau's accumulated rounding.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

const REDUCED_COST_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Debug)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    /// Multipliers y of the equality constraints: cᵀx = bᵀy at optimality.
    pub duals: Vec<f64>,
}

struct Tableau {
    t: Matrix,
    basis: Vec<usize>,
    z: Vec<f64>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let width = self.t.ncols();
        let p = self.t[(r, col)];
        for j in 0..width {
            self.t[(r, j)] /= p;
        }
        for i in 0..self.t.nrows() {
            if i == r {
                continue;
            }
            let f = self.t[(i, col)];
            if f != 0.0 {
                for j in 0..width {
                    let v = self.t[(r, j)];
                    if v != 0.0 {
                        self.t[(i, j)] -= f * v;
                    }
                }
                self.t[(i, col)] = 0.0;
            }
        }
        let f = self.z[col];
        if f != 0.0 {
            for j in 0..width {
                self.z[j] -= f * self.t[(r, j)];
            }
            self.z[col] = 0.0;
        }
        self.basis[r] = col;
    }

    fn price(&mut self, cost: &[f64]) {
        let width = self.t.ncols();
        self.z = vec![0.0; width];
        self.z[..cost.len()].copy_from_slice(cost);
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost.get(bi).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..width {
                    self.z[j] -= cb * self.t[(i, j)];
                }
            }
        }
    }

    /// Runs Bland's rule over columns `< allowed`; returns false if unbounded.
    fn iterate(&mut self, allowed: usize, pivots: &mut usize) -> Result<bool> {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.z[j] < -REDUCED_COST_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.nrows() {
                let a = self.t[(i, col)];
                if a > PIVOT_TOL {
                    let ratio = self.t[(i, self.rhs)].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1e-300);
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[r] {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, col);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::Solver {
                    iterations: *pivots,
                    best_value: -self.z[self.rhs],
                    best_iterate: Vec::new(),
                });
            }
        }
    }
}

pub(crate) fn solve_standard(a: &Matrix, b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let (m, n) = a.shape();
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(c.len(), n);
    let sign: Vec<f64> = b
        .iter()
        .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let rhs = n + m;
    let mut t = Matrix::zeros(m, n + m + 1);
    for i in 0..m {
        for j in 0..n {
            t[(i, j)] = sign[i] * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, rhs)] = sign[i] * b[i];
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        z: Vec::new(),
        rhs,
    };

    let mut phase1_cost = vec![0.0; n + m];
    for v in phase1_cost.iter_mut().skip(n) {
        *v = 1.0;
    }
    tab.price(&phase1_cost);
    let mut pivots = 0;
    tab.iterate(n + m, &mut pivots)?;
    let infeasibility: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.t[(i, rhs)])
        .sum();
    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    if infeasibility > 1e-9 * scale {
        return Err(Error::Solver {
            iterations: pivots,
            best_value: infeasibility,
            best_iterate: Vec::new(),
        });
    }
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[(i, j)].abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }

    tab.price(c);
    if !tab.iterate(n, &mut pivots)? {
        return Err(Error::config("linear program is unbounded"));
    }

    // Re-solve the optimal basis.
    let mut basis_matrix = Matrix::zeros(m, m);
    let mut c_b = Vector::zeros(m);
    for (k, &col) in tab.basis.iter().enumerate() {
        if col < n {
            for i in 0..m {
                basis_matrix[(i, k)] = sign[i] * a[(i, col)];
            }
            c_b[k] = c[col];
        } else {
            basis_matrix[(col - n, k)] = 1.0;
        }
    }
    let b_flipped = Vector::from_fn(m, |i, _| sign[i] * b[i]);
    let lu = basis_matrix.clone().lu();
    let refined_x = lu.solve(&b_flipped);
    let refined_y = basis_matrix.transpose().lu().solve(&c_b);

    let mut x = vec![0.0; n];
    match refined_x {
        Some(xb) if xb.iter().all(|v| v.is_finite() && *v > -1e-9) => {
            for (k, &col) in tab.basis.iter().enumerate() {
                if col < n {
                    x[col] = xb[k].max(0.0);
                }
            }
        }
        _ => {
            for (k, &col) in tab.basis.iter().enumerate() {
                if col < n {
                    x[col] = tab.t[(k, rhs)].max(0.0);
                }
            }
        }
    }
    let y_flipped: Vec<f64> = match refined_y {
        Some(y) if y.iter().all(|v| v.is_finite()) => y.iter().copied().collect(),
        _ => (0..m)
            .map(|i| {
                tab.basis
                    .iter()
                    .enumerate()
                    .map(|(k, &col)| c.get(col).copied().unwrap_or(0.0) * tab.t[(k, n + i)])
                    .sum()
            })
            .collect(),
    };
    let duals = (0..m).map(|i| sign[i] * y_flipped[i]).collect();
    Ok(LpSolution { x, duals })
}
