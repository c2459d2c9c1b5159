use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{vec_norm, ComplexMatrix};
use crate::error::{Error, Result};

/// Absolute Hermiticity tolerance used for validation and eigensolver input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Off-diagonal mass (relative to the Frobenius norm) at which the Hermitian
/// eigensolver runs its final sweep.
const EIGEN_TOL: f64 = 1e-12;

/// Real spectrum in descending order, optionally with eigenvectors as columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<ComplexMatrix>,
}

fn sweep_limit(side: usize) -> usize {
    100 * side.max(1)
}

/// Singular values by one-sided (Hestenes) Jacobi, descending, `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMatrix) -> Result<Spectrum> {
    if let Some((row, col)) = m.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    // Orthogonalize the shorter side: columns of M, or columns of M^H.
    let mut cols: Vec<Vec<Complex64>> = if m.rows() >= m.cols() {
        (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect())
            .collect()
    } else {
        (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.conj()).collect()).collect()
    };
    let len = cols.first().map_or(0, Vec::len);
    let k = cols.len();
    let tol = (len.max(1) as f64) * f64::EPSILON;
    let max_sweeps = sweep_limit(m.rows().max(m.cols()));

    let mut norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    // Columns below this squared norm are rounding noise; their singular
    // values are already resolved to working precision.
    let negligible = norms.iter().sum::<f64>() * f64::EPSILON * f64::EPSILON;
    let mut converged = k < 2;
    let mut residual = 0.0;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        residual = 0.0_f64;
        for p in 0..k {
            for q in p + 1..k {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                let rel = g / (alpha * beta).sqrt();
                residual = residual.max(rel);
                if rel <= tol {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let xv = *x;
                    let yv = *y * phase;
                    *x = xv * c - yv * s;
                    *y = xv * s + yv * c;
                }
                norms[p] = cp.iter().map(|z| z.norm_sqr()).sum();
                norms[q] = cq.iter().map(|z| z.norm_sqr()).sum();
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::ConvergenceFailure { max_iter: max_sweeps, residual });
    }
    let mut values: Vec<f64> = cols.iter().map(|c| vec_norm(c)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum { values, vectors: None })
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.values.iter().sum())
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Spectrum> {
    hermitian_eigen(h, false)
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// With `want_vectors`, the returned matrix holds the eigenvector of
/// `values[k]` in column `k`.
pub fn hermitian_eigen(h: &ComplexMatrix, want_vectors: bool) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    if let Some((row, col)) = h.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let (res, row, col) = h.hermiticity_residual();
    if res > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual: res, row, col });
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let fro = a.frobenius_norm();
    let max_sweeps = sweep_limit(n);

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut final_sweep = false;
    let mut done = n < 2 || fro == 0.0;
    let mut sweeps = 0;
    while !done {
        if sweeps == max_sweeps {
            return Err(Error::ConvergenceFailure { max_iter: max_sweeps, residual: off(&a) / fro });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let hpq = a[(p, q)];
                let g = hpq.norm();
                if g < f64::MIN_POSITIVE {
                    continue;
                }
                let e_bar = (hpq / g).conj();
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let vpp = Complex64::new(c, 0.0);
                let vpq = Complex64::new(s, 0.0);
                let vqp = e_bar * -s;
                let vqq = e_bar * c;
                rotate_columns(&mut a, p, q, vpp, vpq, vqp, vqq);
                for k in 0..n {
                    let (hp, hq) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = vpp.conj() * hp + vqp.conj() * hq;
                    a[(q, k)] = vpq.conj() * hp + vqq.conj() * hq;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, vpp, vpq, vqp, vqq);
                }
            }
        }
        if final_sweep {
            done = true;
        } else if off(&a) <= EIGEN_TOL * fro {
            final_sweep = true;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]));
    Ok(Spectrum { values, vectors })
}

fn rotate_columns(
    m: &mut ComplexMatrix,
    p: usize,
    q: usize,
    vpp: Complex64,
    vpq: Complex64,
    vqp: Complex64,
    vqq: Complex64,
) {
    for k in 0..m.rows() {
        let (mp, mq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mp * vpp + mq * vqp;
        m[(k, q)] = mp * vpq + mq * vqq;
    }
}

/// Schmidt coefficients `lambda_i` of a normalized bipartite pure state, descending.
///
/// Entry `psi[i * d_b + j]` is the amplitude of `|i>_A |j>_B`.
pub fn schmidt_coefficients(psi: &[Complex64], d_a: usize, d_b: usize) -> Result<Vec<f64>> {
    if psi.len() != d_a * d_b {
        return Err(Error::DimMismatch { expected: d_a * d_b, found: psi.len() });
    }
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let m = ComplexMatrix::from_fn(d_a, d_b, |i, j| psi[i * d_b + j]);
    Ok(singular_values(&m)?.values.into_iter().map(|s| s * s).collect())
}
