//! Shared helpers for the integration targets.
#![allow(dead_code)]

use realign::criteria::ParamPair;
use realign::linalg::{kron, vectorize, ComplexMatrix};
use realign::multipartite::MuFamily;
use realign::states::{Seed, StreamRng};
use realign::Complex64;

pub fn rng(seed: u64) -> StreamRng {
    StreamRng::new(Seed(seed), 0xacce)
}

pub fn gaussian_matrix(rng: &mut StreamRng, rows: usize, cols: usize) -> ComplexMatrix {
    rng.complex_matrix(rows, cols)
}

pub fn hermitian(rng: &mut StreamRng, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

pub fn random_vec(rng: &mut StreamRng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * rng.gaussian()).collect()
}

pub fn random_pair(rng: &mut StreamRng, max_len: usize) -> ParamPair {
    let n = 1 + (rng.uniform() * max_len as f64) as usize % max_len;
    let m = 1 + (rng.uniform() * max_len as f64) as usize % max_len;
    let scale = if rng.uniform() < 0.5 { 1.0 } else { 10.0 };
    ParamPair::new(random_vec(rng, n, scale), random_vec(rng, m, scale)).unwrap()
}

pub fn random_family(rng: &mut StreamRng, parties: usize, first: usize, max_len: usize) -> MuFamily {
    let vectors = (first..parties)
        .map(|_| {
            let len = 1 + (rng.uniform() * max_len as f64) as usize % max_len;
            random_vec(rng, len, 2.0)
        })
        .collect();
    MuFamily::new(vectors, first).unwrap()
}

pub fn pick(rng: &mut StreamRng, lo: usize, hi: usize) -> usize {
    lo + ((rng.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
}

/// `[tr(X) mu ; Vec(X)]` as a column.
fn augmented(x: &ComplexMatrix, mu: &[f64]) -> Vec<Complex64> {
    let tr = x.trace();
    mu.iter().map(|&m| tr * m).chain(vectorize(x)).collect()
}

/// Generalized realignment of one product term `X_1 (x) ... (x) X_n`, built
/// directly from its factors.
pub fn product_qr(factors: &[ComplexMatrix], fam: &MuFamily) -> ComplexMatrix {
    let q = fam.first();
    let mut out = ComplexMatrix::identity(1);
    for x in &factors[..q] {
        out = kron(&out, x);
    }
    let col = augmented(&factors[q], &fam.vectors()[0]);
    out = kron(&out, &ComplexMatrix::from_vec(col.len(), 1, col).unwrap());
    for (k, x) in factors.iter().enumerate().skip(q + 1) {
        let row = augmented(x, &fam.vectors()[k - q]);
        out = kron(&out, &ComplexMatrix::from_vec(1, row.len(), row).unwrap());
    }
    out
}

pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors.iter().fold(ComplexMatrix::identity(1), |acc, x| kron(&acc, x))
}
