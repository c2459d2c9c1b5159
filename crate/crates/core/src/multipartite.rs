//! Tripartite bipartitions, the biseparability criterion, the GME concurrence
//! bound, and the n-partite generalized realignment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{build_q_matrix, CriterionReport, ParamPair, DEFAULT_TAU};
use crate::error::{Error, Result};
use crate::linalg::{compose, digits, partial_trace_raw, trace_norm, ComplexMatrix, DensityMatrix};
use crate::measures::BoundReport;

/// Largest party count accepted by [`generalized_qr`].
pub const MAX_PARTIES: usize = 6;

/// A cut `solo | rest` of a tripartite system (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub solo: usize,
    /// Complement in ascending order.
    pub rest: [usize; 2],
}

impl Bipartition {
    pub fn new(solo: usize) -> Result<Self> {
        let rest = match solo {
            0 => [1, 2],
            1 => [0, 2],
            2 => [0, 1],
            _ => return Err(Error::BadSubsystemIndex { index: solo, count: 3 }),
        };
        Ok(Self { solo, rest })
    }

    /// `1|23`, `2|13`, `3|12`.
    pub fn all() -> [Bipartition; 3] {
        [0, 1, 2].map(|k| Self::new(k).expect("index below 3"))
    }

    pub fn perm(&self) -> [usize; 3] {
        [self.solo, self.rest[0], self.rest[1]]
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}|{}{}", self.solo + 1, self.rest[0] + 1, self.rest[1] + 1)
    }
}

pub fn permute_systems(rho: &DensityMatrix, perm: &[usize]) -> Result<DensityMatrix> {
    rho.permute(perm)
}

fn require_parties(rho: &DensityMatrix, n: usize) -> Result<()> {
    if rho.parties() != n {
        return Err(Error::WrongPartyCount { expected: n, found: rho.parties() });
    }
    Ok(())
}

fn common_dim(rho: &DensityMatrix) -> Result<usize> {
    let dims = rho.dims();
    if dims.iter().any(|&d| d != dims[0]) {
        return Err(Error::UnequalLocalDims(dims.to_vec()));
    }
    Ok(dims[0])
}

/// `rho` reordered so `b.solo` comes first, viewed as `d_solo x (d_j d_k)`.
pub fn as_bipartite(rho: &DensityMatrix, b: Bipartition) -> Result<DensityMatrix> {
    require_parties(rho, 3)?;
    permute_systems(rho, &b.perm())?.regroup(&[1, 2])
}

/// `||Q_{mu,nu}||_Tr` of `rho` across the cut `b`.
pub fn bipartition_q_norm(rho: &DensityMatrix, b: Bipartition, p: &ParamPair) -> Result<f64> {
    trace_norm(&build_q_matrix(&as_bipartite(rho, b)?, p)?)
}

/// Mean of [`bipartition_q_norm`] over the three cuts, with one shared pair.
pub fn averaged_q_norm(rho: &DensityMatrix, p: &ParamPair) -> Result<f64> {
    require_parties(rho, 3)?;
    let norms = Bipartition::all()
        .par_iter()
        .map(|&b| bipartition_q_norm(rho, b, p))
        .collect::<Result<Vec<f64>>>()?;
    Ok((norms[0] + norms[1] + norms[2]) / 3.0)
}

/// An entangled verdict means the state is not biseparable.
pub fn biseparability_margin(rho: &DensityMatrix, p: &ParamPair) -> Result<CriterionReport> {
    require_parties(rho, 3)?;
    let d = common_dim(rho)?;
    let lhs = averaged_q_norm(rho, p)?;
    let rhs = p.separable_bound() + 2.0 * (d - 1) as f64 / 3.0;
    Ok(CriterionReport::new("bisep", lhs, rhs, DEFAULT_TAU))
}

/// Lower bound on the GME concurrence: the biseparability margin over `sqrt(d (d-1))`.
pub fn gme_concurrence_lower_bound(rho: &DensityMatrix, p: &ParamPair) -> Result<BoundReport> {
    let report = biseparability_margin(rho, p)?;
    let d = common_dim(rho)?;
    let scale = 1.0 / ((d * (d - 1)) as f64).sqrt();
    Ok(BoundReport::new("gme_concurrence", report.margin, scale, p.clone(), d))
}

/// One real vector per party `first..n` (0-based `first`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuFamily {
    vectors: Vec<Vec<f64>>,
    first: usize,
}

impl MuFamily {
    pub fn new(vectors: Vec<Vec<f64>>, first: usize) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::BadFamily(format!("need at least two vectors, got {}", vectors.len())));
        }
        if vectors.iter().any(|v| v.is_empty()) {
            return Err(Error::BadFamily("empty vector".into()));
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::BadFamily("non-finite entry".into()));
        }
        Ok(Self { vectors, first })
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn first(&self) -> usize {
        self.first
    }

    /// `prod_k sqrt(|mu_k|^2 + 1)`.
    pub fn separable_bound(&self) -> f64 {
        self.vectors
            .iter()
            .map(|v| (v.iter().map(|x| x * x).sum::<f64>() + 1.0).sqrt())
            .product()
    }

    fn check(&self, dims: &[usize]) -> Result<()> {
        let n = dims.len();
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(Error::BadFamily(format!("{n} parties outside 2..={MAX_PARTIES}")));
        }
        if self.first + 1 >= n {
            return Err(Error::BadFamily(format!("start party {} leaves no column parties", self.first + 1)));
        }
        if self.vectors.len() != n - self.first {
            return Err(Error::BadFamily(format!(
                "{} vectors for parties {}..={n}",
                self.vectors.len(),
                self.first + 1
            )));
        }
        Ok(())
    }
}

/// Generalized realignment of any square matrix on `dims`.
///
/// Parties before `first` keep their matrix indices (outermost factor). Party
/// `first` contributes `(mu | Vec)` coordinates to the rows, later parties to
/// the columns in ascending Kronecker order. Every subset of the realigned
/// parties is traced out in turn and its parties take `mu` coordinates, each
/// weighted by the traced factor, so the map is linear in `z`.
pub fn generalized_qr_raw(z: &ComplexMatrix, dims: &[usize], fam: &MuFamily) -> Result<ComplexMatrix> {
    fam.check(dims)?;
    let n = dims.len();
    let side: usize = dims.iter().product();
    if z.rows() != side || z.cols() != side {
        return Err(Error::DimMismatch { expected: side, found: z.rows().max(z.cols()) });
    }
    let q = fam.first;
    let prefix: usize = dims[..q].iter().product();
    // local extent of each realigned party: mu coordinates, then Vec coordinates
    let ext: Vec<usize> = (q..n).map(|k| fam.vectors[k - q].len() + dims[k] * dims[k]).collect();
    let row_ext = ext[0];
    let col_ext: usize = ext[1..].iter().product();
    let mut out = ComplexMatrix::zeros(prefix * row_ext, prefix * col_ext);

    let realigned = n - q;
    let mut full_r = vec![0usize; n];
    let mut full_c = vec![0usize; n];
    let mut local = vec![0usize; realigned];
    for mask in 0..(1usize << realigned) {
        let traced = |k: usize| k >= q && mask >> (k - q) & 1 == 1;
        let keep: Vec<usize> = (0..n).filter(|&k| !traced(k)).collect();
        let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let t = partial_trace_raw(z, dims, &keep)?;
        let mu_parties: Vec<usize> = (q..n).filter(|&k| traced(k)).collect();
        let mu_dims: Vec<usize> = mu_parties.iter().map(|&k| fam.vectors[k - q].len()).collect();
        let mu_count: usize = mu_dims.iter().product();
        let mut mu_digits = vec![0usize; mu_parties.len()];
        let mut kr = vec![0usize; keep.len()];
        let mut kc = vec![0usize; keep.len()];

        for a in 0..mu_count {
            digits(a, &mu_dims, &mut mu_digits);
            let coef = mu_parties
                .iter()
                .zip(&mu_digits)
                .map(|(&k, &i)| fam.vectors[k - q][i])
                .reduce(|acc, x| acc * x);
            for (slot, &k) in mu_parties.iter().enumerate() {
                local[k - q] = mu_digits[slot];
            }
            for i in 0..t.rows() {
                digits(i, &kdims, &mut kr);
                for j in 0..t.cols() {
                    digits(j, &kdims, &mut kc);
                    for (slot, &k) in keep.iter().enumerate() {
                        full_r[k] = kr[slot];
                        full_c[k] = kc[slot];
                    }
                    for k in q..n {
                        if !traced(k) {
                            // column-stacked index of (row, col) within party k
                            local[k - q] = fam.vectors[k - q].len() + full_r[k] + dims[k] * full_c[k];
                        }
                    }
                    let pr = compose(&full_r[..q], &dims[..q]);
                    let pc = compose(&full_c[..q], &dims[..q]);
                    let row = pr * row_ext + local[0];
                    let col = pc * col_ext + compose(&local[1..], &ext[1..]);
                    let v = t[(i, j)];
                    out[(row, col)] = match coef {
                        Some(c) => v * c,
                        None => v,
                    };
                }
            }
        }
    }
    Ok(out)
}

pub fn generalized_qr(rho: &DensityMatrix, fam: &MuFamily) -> Result<ComplexMatrix> {
    generalized_qr_raw(rho.matrix(), rho.dims(), fam)
}

/// An entangled verdict means the state is not fully separable.
pub fn full_separability_margin(rho: &DensityMatrix, fam: &MuFamily) -> Result<CriterionReport> {
    let lhs = trace_norm(&generalized_qr(rho, fam)?)?;
    Ok(CriterionReport::new("fullsep", lhs, fam.separable_bound(), DEFAULT_TAU))
}
