//! Bipartite separability criteria built on the realignment of a state.
//!
//! Every criterion returns a [`CriterionReport`] rather than a boolean: the
//! left-hand value, the bound it is compared against, and the margin between
//! them. A margin above `tau` certifies entanglement; anything else is
//! inconclusive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, kron, partial_trace_raw, realign, trace_norm, vectorize, ComplexMatrix,
    DensityMatrix,
};
use crate::states::StateFamily;

/// Default detection threshold on the margin.
pub const DEFAULT_TAU: f64 = 1e-9;

/// Real parameter vectors `mu` (length n) and `nu` (length m).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    mu: Vec<f64>,
    nu: Vec<f64>,
}

impl ParamPair {
    pub fn new(mu: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() || nu.is_empty() {
            return Err(Error::BadParams("mu and nu must be non-empty".into()));
        }
        if mu.iter().chain(&nu).any(|v| !v.is_finite()) {
            return Err(Error::BadParams("mu and nu must be finite".into()));
        }
        Ok(Self { mu, nu })
    }

    /// One-dimensional `mu = (alpha)`, `nu = (beta)`.
    pub fn scalar(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![alpha], vec![beta])
    }

    /// Constant vectors `alpha (1, ..., 1)` and `beta (1, ..., 1)` of length `l`.
    pub fn constant(alpha: f64, beta: f64, l: usize) -> Result<Self> {
        Self::new(vec![alpha; l], vec![beta; l])
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// `sqrt((|mu|^2 + 1)(|nu|^2 + 1))`, the trace-norm ceiling for separable states.
    pub fn separable_bound(&self) -> f64 {
        let m2: f64 = self.mu.iter().map(|x| x * x).sum();
        let n2: f64 = self.nu.iter().map(|x| x * x).sum();
        ((m2 + 1.0) * (n2 + 1.0)).sqrt()
    }

    /// `mu` followed by `nu`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.mu.iter().chain(&self.nu).copied().collect()
    }

    pub fn from_flat(x: &[f64], n: usize) -> Result<Self> {
        if n == 0 || n >= x.len() {
            return Err(Error::BadParams(format!("cannot split {} values at {n}", x.len())));
        }
        Self::new(x[..n].to_vec(), x[n..].to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Entangled,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub tau: f64,
}

impl CriterionReport {
    pub fn new(criterion: impl Into<String>, lhs: f64, rhs: f64, tau: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            criterion: criterion.into(),
            lhs,
            rhs,
            margin,
            verdict: Self::judge(margin, tau),
            tau,
        }
    }

    fn judge(margin: f64, tau: f64) -> Verdict {
        if margin > tau {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        }
    }

    /// Same report judged against a different threshold.
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self.verdict = Self::judge(self.margin, tau);
        self
    }

    pub fn is_entangled(&self) -> bool {
        self.verdict == Verdict::Entangled
    }
}

/// Augmented realignment matrix of any square matrix on `d_a x d_b`:
///
/// `[[tr(Z) mu nu^T, mu Vec(Z_B)^T], [Vec(Z_A) nu^T, R(Z)]]`
///
/// with `Z_A`, `Z_B` the partial traces. For unit-trace input the corner is
/// `mu nu^T`; carrying the trace keeps the map linear.
pub fn q_matrix_raw(z: &ComplexMatrix, d_a: usize, d_b: usize, p: &ParamPair) -> Result<ComplexMatrix> {
    let dims = [d_a, d_b];
    let total = partial_trace_raw(z, &dims, &[])?[(0, 0)];
    let vec_a = vectorize(&partial_trace_raw(z, &dims, &[0])?);
    let vec_b = vectorize(&partial_trace_raw(z, &dims, &[1])?);
    let r = realign(z, d_a, d_b)?;
    let (n, m) = (p.mu.len(), p.nu.len());
    let mut q = ComplexMatrix::zeros(n + d_a * d_a, m + d_b * d_b);
    for (a, &mu_a) in p.mu.iter().enumerate() {
        for (b, &nu_b) in p.nu.iter().enumerate() {
            q[(a, b)] = total * (mu_a * nu_b);
        }
        for (j, &vb) in vec_b.iter().enumerate() {
            q[(a, m + j)] = vb * mu_a;
        }
    }
    for (i, &va) in vec_a.iter().enumerate() {
        for (b, &nu_b) in p.nu.iter().enumerate() {
            q[(n + i, b)] = va * nu_b;
        }
    }
    q.set_block(n, m, &r);
    Ok(q)
}

/// The matrix `Q_{mu,nu}(rho)` of a bipartite state; reduced states are taken
/// from `rho` by partial trace.
pub fn build_q_matrix(rho: &DensityMatrix, p: &ParamPair) -> Result<ComplexMatrix> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    q_matrix_raw(rho.matrix(), d_a, d_b, p)
}

fn q_report(name: &str, rho: &DensityMatrix, p: &ParamPair) -> Result<CriterionReport> {
    let lhs = trace_norm(&build_q_matrix(rho, p)?)?;
    Ok(CriterionReport::new(name, lhs, p.separable_bound(), DEFAULT_TAU))
}

/// `||Q_{mu,nu}(rho)||_Tr` against `sqrt((|mu|^2+1)(|nu|^2+1))`.
pub fn q_margin(rho: &DensityMatrix, p: &ParamPair) -> Result<CriterionReport> {
    q_report("qmat", rho, p)
}

/// Realignment (CCNR): `||R(rho)||_Tr <= 1` for separable states.
pub fn ccnr_margin(rho: &DensityMatrix) -> Result<CriterionReport> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    let lhs = trace_norm(&realign(rho.matrix(), d_a, d_b)?)?;
    Ok(CriterionReport::new("ccnr", lhs, 1.0, DEFAULT_TAU))
}

/// `||R(rho - rho_A (x) rho_B)||_Tr` against `sqrt((1 - Tr rho_A^2)(1 - Tr rho_B^2))`.
pub fn zhang_margin(rho: &DensityMatrix) -> Result<CriterionReport> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    let a = rho.reduced(0)?;
    let b = rho.reduced(1)?;
    let shifted = rho.matrix() - &kron(a.matrix(), b.matrix());
    let lhs = trace_norm(&realign(&shifted, d_a, d_b)?)?;
    let rhs = ((1.0 - a.purity()).max(0.0) * (1.0 - b.purity()).max(0.0)).sqrt();
    Ok(CriterionReport::new("zhang", lhs, rhs, DEFAULT_TAU))
}

/// The scalar special case `mu = (alpha)`, `nu = (beta)`.
pub fn shi_margin(rho: &DensityMatrix, alpha: f64, beta: f64) -> Result<CriterionReport> {
    q_report("shi", rho, &ParamPair::scalar(alpha, beta)?)
}

/// The constant-vector special case of length `l`.
pub fn sun_margin(rho: &DensityMatrix, alpha: f64, beta: f64, l: usize) -> Result<CriterionReport> {
    if l == 0 {
        return Err(Error::BadParams("l must be positive".into()));
    }
    q_report("sun", rho, &ParamPair::constant(alpha, beta, l)?)
}

/// PPT test: `lhs = -lambda_min(rho^{T_B})`, `rhs = 0`.
pub fn ppt_margin(rho: &DensityMatrix) -> Result<CriterionReport> {
    rho.bipartite_dims()?;
    let pt = rho.partial_transpose(1)?;
    let min = hermitian_eigenvalues(&pt)?.values.last().copied().unwrap_or(0.0);
    Ok(CriterionReport::new("ppt", -min, 0.0, DEFAULT_TAU))
}

/// Which side of the threshold the criterion fires on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectedSide {
    /// entangled for parameters above the threshold
    Upper,
    /// entangled for parameters below the threshold
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub family: String,
    pub threshold: f64,
    pub lo: f64,
    pub hi: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub side: DetectedSide,
    pub lo_report: CriterionReport,
    pub hi_report: CriterionReport,
}

/// Bisects for the parameter where `crit` changes verdict on `family`.
///
/// Assumes a single verdict change inside `[lo, hi]`; only the endpoints are
/// checked. The returned threshold is the midpoint of a final bracket no
/// wider than `tol`.
pub fn threshold_scan<C>(family: &StateFamily, crit: C, lo: f64, hi: f64, tol: f64) -> Result<ThresholdResult>
where
    C: Fn(&DensityMatrix) -> Result<CriterionReport>,
{
    if !(lo < hi) {
        return Err(Error::BadParams(format!("scan bracket [{lo}, {hi}] is empty")));
    }
    let floor = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    if !(tol > 0.0) || tol < floor {
        return Err(Error::TolTooSmall(tol));
    }
    let lo_report = crit(&family.state(lo)?)?;
    let hi_report = crit(&family.state(hi)?)?;
    if lo_report.verdict == hi_report.verdict {
        return Err(Error::NoSignChange { lo_margin: lo_report.margin, hi_margin: hi_report.margin });
    }
    let lo_verdict = lo_report.verdict;
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if crit(&family.state(mid)?)?.verdict == lo_verdict {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let side = if hi_report.is_entangled() { DetectedSide::Upper } else { DetectedSide::Lower };
    Ok(ThresholdResult {
        family: family.name.clone(),
        threshold: 0.5 * (a + b),
        lo,
        hi,
        bracket: (a, b),
        iterations,
        side,
        lo_report,
        hi_report,
    })
}
