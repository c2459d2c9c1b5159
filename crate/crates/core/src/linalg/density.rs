use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::decomp::{hermitian_eigenvalues, HERMITIAN_TOL};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Trace tolerance for validated states.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a validated state.
pub const PSD_TOL: f64 = 1e-9;

/// A validated density matrix on `dims[0] x dims[1] x ...`.
///
/// Subsystem 0 is the most significant Kronecker factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks shape, Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, mat: ComplexMatrix) -> Result<Self> {
        validate_density(dims, mat)
    }

    /// Wraps a matrix that is a density matrix by construction.
    pub(crate) fn new_unchecked(dims: Vec<usize>, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.rows());
        Self { dims, mat }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// `(d_A, d_B)` for a bipartite state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims[..] {
            [a, b] => Ok((a, b)),
            _ => Err(Error::NotBipartite(self.dims.len())),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::BadSubsystemIndex { index: usize::MAX, count: self.dims.len() });
        }
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let mat = partial_trace_raw(&self.mat, &self.dims, &kept)?;
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::new_unchecked(dims, mat))
    }

    /// Reduced state of a single subsystem.
    pub fn reduced(&self, sys: usize) -> Result<DensityMatrix> {
        self.partial_trace(&[sys])
    }

    pub fn partial_transpose(&self, sys: usize) -> Result<ComplexMatrix> {
        partial_transpose_raw(&self.mat, &self.dims, sys)
    }

    /// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let mat = permute_raw(&self.mat, &self.dims, perm)?;
        let dims = perm.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::new_unchecked(dims, mat))
    }

    /// Merges adjacent factors into coarser subsystems; `groups` lists how many
    /// consecutive factors each new subsystem absorbs.
    pub fn regroup(&self, groups: &[usize]) -> Result<DensityMatrix> {
        if groups.iter().sum::<usize>() != self.dims.len() || groups.contains(&0) {
            return Err(Error::BadParams(format!(
                "grouping {groups:?} does not cover {} subsystems",
                self.dims.len()
            )));
        }
        let mut dims = Vec::with_capacity(groups.len());
        let mut at = 0;
        for &g in groups {
            dims.push(self.dims[at..at + g].iter().product());
            at += g;
        }
        Ok(Self::new_unchecked(dims, self.mat.clone()))
    }

    /// Purity `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.mat[(i, j)] * self.mat[(j, i)]).re;
            }
        }
        s
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigenvalues(&self.mat)?.values)
    }

    /// `sum_i w_i rho_i`; weights are not required to be convex, but the result
    /// must again be a valid state.
    pub fn mix(terms: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = terms.first().ok_or_else(|| Error::BadParams("empty mixture".into()))?.1;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in terms {
            if rho.dims != first.dims {
                return Err(Error::DimMismatch { expected: first.dim(), found: rho.dim() });
            }
            acc = &acc + &rho.mat.scale(*w);
        }
        DensityMatrix::new(first.dims.clone(), acc)
    }
}

/// Builds a [`DensityMatrix`] after checking every state invariant.
pub fn validate_density(dims: Vec<usize>, mat: ComplexMatrix) -> Result<DensityMatrix> {
    if !mat.is_square() {
        return Err(Error::NotSquare { rows: mat.rows(), cols: mat.cols() });
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::BadParams(format!("invalid subsystem dimensions {dims:?}")));
    }
    let side: usize = dims.iter().product();
    if side != mat.rows() {
        return Err(Error::DimMismatch { expected: side, found: mat.rows() });
    }
    if let Some((row, col)) = mat.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let (residual, row, col) = mat.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual, row, col });
    }
    let trace = mat.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceNotOne { trace, residual: (trace - 1.0).abs() });
    }
    let min = hermitian_eigenvalues(&mat)?.values.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(DensityMatrix { dims, mat })
}

fn check_dims(mat: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let side: usize = dims.iter().product();
    if !mat.is_square() {
        return Err(Error::NotSquare { rows: mat.rows(), cols: mat.cols() });
    }
    if side != mat.rows() {
        return Err(Error::DimMismatch { expected: side, found: mat.rows() });
    }
    Ok(())
}

/// Mixed-radix digits of `index` for `dims`, most significant first.
pub(crate) fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

pub(crate) fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Partial trace of any square matrix over the complement of `keep` (sorted,
/// unique). An empty `keep` yields the 1x1 full trace.
pub fn partial_trace_raw(mat: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(mat, dims)?;
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::BadSubsystemIndex { index: bad, count: dims.len() });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kn: usize = kdims.iter().product();
    let tn: usize = tdims.iter().product();

    // full index of (kept a, traced t)
    let mut table = vec![0usize; kn * tn];
    let mut full = vec![0usize; dims.len()];
    let mut kd = vec![0usize; kdims.len()];
    let mut td = vec![0usize; tdims.len()];
    for a in 0..kn {
        digits(a, &kdims, &mut kd);
        for t in 0..tn {
            digits(t, &tdims, &mut td);
            for (slot, &k) in keep.iter().enumerate() {
                full[k] = kd[slot];
            }
            for (slot, &k) in traced.iter().enumerate() {
                full[k] = td[slot];
            }
            table[a * tn + t] = compose(&full, dims);
        }
    }
    let mut out = ComplexMatrix::zeros(kn, kn);
    for t in 0..tn {
        for a in 0..kn {
            let i = table[a * tn + t];
            for b in 0..kn {
                out[(a, b)] += mat[(i, table[b * tn + t])];
            }
        }
    }
    Ok(out)
}

/// Transposes tensor factor `sys` of a square matrix.
pub fn partial_transpose_raw(mat: &ComplexMatrix, dims: &[usize], sys: usize) -> Result<ComplexMatrix> {
    check_dims(mat, dims)?;
    if sys >= dims.len() {
        return Err(Error::BadSubsystemIndex { index: sys, count: dims.len() });
    }
    let n = mat.rows();
    let mut di = vec![0usize; dims.len()];
    let mut dj = vec![0usize; dims.len()];
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            std::mem::swap(&mut di[sys], &mut dj[sys]);
            out[(compose(&di, dims), compose(&dj, dims))] = mat[(i, j)];
            std::mem::swap(&mut di[sys], &mut dj[sys]);
        }
    }
    Ok(out)
}

/// Reorders tensor factors of a square matrix: new factor `k` is old factor `perm[k]`.
pub fn permute_raw(mat: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    check_dims(mat, dims)?;
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::BadPermutation(perm.to_vec()));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n = mat.rows();
    let mut old = vec![0usize; dims.len()];
    let mut new = vec![0usize; dims.len()];
    let map: Vec<usize> = (0..n)
        .map(|i| {
            digits(i, dims, &mut old);
            for (k, &p) in perm.iter().enumerate() {
                new[k] = old[p];
            }
            compose(&new, &new_dims)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = mat[(i, j)];
        }
    }
    Ok(out)
}

/// `|psi><psi|` as a density matrix after checking normalization.
pub fn pure_state(dims: Vec<usize>, psi: &[Complex64]) -> Result<DensityMatrix> {
    let side: usize = dims.iter().product();
    if psi.len() != side {
        return Err(Error::DimMismatch { expected: side, found: psi.len() });
    }
    let norm = super::matrix::vec_norm(psi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    DensityMatrix::new(dims, ComplexMatrix::projector(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::kron;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        pure_state(vec![2, 2], &[c(h), c(0.0), c(0.0), c(h)]).unwrap()
    }

    #[test]
    fn maximally_mixed_qubit_is_valid() {
        assert!(validate_density(vec![2], ComplexMatrix::identity(2).scale(0.5)).is_ok());
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = ComplexMatrix::diag_real(&[1.0001, -0.0001]);
        assert!(matches!(validate_density(vec![2], m), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn validation_error_order() {
        assert!(matches!(
            validate_density(vec![2], ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            validate_density(vec![2, 3], ComplexMatrix::identity(5).scale(0.2)),
            Err(Error::DimMismatch { expected: 6, found: 5 })
        ));
        let mut m = ComplexMatrix::identity(2).scale(0.5);
        m[(0, 1)] = c(0.1);
        assert!(matches!(validate_density(vec![2], m), Err(Error::NotHermitian { row: 0, col: 1, .. })));
        match validate_density(vec![2], ComplexMatrix::identity(2).scale(0.45)) {
            Err(Error::TraceNotOne { residual, .. }) => assert!((residual - 0.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bell_projector_is_valid() {
        assert_eq!(bell().dims(), &[2, 2]);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = bell().partial_trace(&[1]).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        let r = bell().partial_trace(&[0]).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_bad_index() {
        assert!(matches!(bell().partial_trace(&[2]), Err(Error::BadSubsystemIndex { index: 2, .. })));
        assert!(bell().partial_trace(&[]).is_err());
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let pt = bell().partial_transpose(1).unwrap();
        let ev = hermitian_eigenvalues(&pt).unwrap().values;
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn partial_transpose_of_product() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new((i + j) as f64, i as f64));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 * 2.0, j as f64));
        let pt = partial_transpose_raw(&kron(&a, &b), &[2, 3], 1).unwrap();
        assert_eq!(pt, kron(&a, &b.transpose()));
        let pt = partial_transpose_raw(&kron(&a, &b), &[2, 3], 0).unwrap();
        assert_eq!(pt, kron(&a.transpose(), &b));
    }

    #[test]
    fn permute_swaps_product() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 3 * j) as f64, 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, (j * j) as f64));
        let swapped = permute_raw(&kron(&a, &b), &[2, 3], &[1, 0]).unwrap();
        assert_eq!(swapped, kron(&b, &a));
        assert_eq!(permute_raw(&kron(&a, &b), &[2, 3], &[0, 1]).unwrap(), kron(&a, &b));
        assert!(matches!(permute_raw(&kron(&a, &b), &[2, 3], &[0, 0]), Err(Error::BadPermutation(_))));
    }

    #[test]
    fn regroup_merges_dims() {
        let rho = DensityMatrix::new(vec![2, 2, 2], ComplexMatrix::identity(8).scale(0.125)).unwrap();
        assert_eq!(rho.regroup(&[1, 2]).unwrap().dims(), &[2, 4]);
        assert!(rho.regroup(&[1, 1]).is_err());
    }

    #[test]
    fn empty_keep_gives_trace() {
        let rho = bell();
        let t = partial_trace_raw(rho.matrix(), rho.dims(), &[]).unwrap();
        assert_eq!((t.rows(), t.cols()), (1, 1));
        assert_eq!(t[(0, 0)], rho.matrix().trace());
    }
}
