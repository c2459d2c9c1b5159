//! Pure-state entanglement measures and lower bounds for mixed states.
//!
//! The mixed-state bounds rescale the margin of [`q_margin`]; they are
//! returned unclamped, so a negative bound simply carries no information.

use serde::{Deserialize, Serialize};

use crate::criteria::{q_margin, ParamPair};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, pure_state, schmidt_coefficients, vec_norm, DensityMatrix,
};
use crate::Complex64;

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub measure: String,
    /// Lower bound on the measure; `bound = scale * margin`.
    pub bound: f64,
    /// Margin of the underlying criterion.
    pub margin: f64,
    pub scale: f64,
    pub params: ParamPair,
    /// `min(d_A, d_B)`, or the common local dimension for tripartite bounds.
    pub d: usize,
    pub vacuous: bool,
}

impl BoundReport {
    pub(crate) fn new(measure: &str, margin: f64, scale: f64, params: ParamPair, d: usize) -> Self {
        let bound = scale * margin;
        Self { measure: measure.to_string(), bound, margin, scale, params, d, vacuous: bound <= 0.0 }
    }
}

fn check_normalized(psi: &[Complex64]) -> Result<()> {
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `sqrt(2 (1 - Tr rho_A^2))` of a pure state `psi` on `d_a x d_b`.
pub fn concurrence_pure(psi: &[Complex64], d_a: usize, d_b: usize) -> Result<f64> {
    let lambda = schmidt_coefficients(psi, d_a, d_b)?;
    let purity: f64 = lambda.iter().map(|l| l * l).sum();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// `(||(|psi><psi|)^{T_B}||_Tr - 1) / (d - 1)` with `d = min(d_a, d_b)`.
pub fn negativity_pure(psi: &[Complex64], d_a: usize, d_b: usize) -> Result<f64> {
    check_normalized(psi)?;
    let d = d_a.min(d_b);
    if d < 2 {
        return Ok(0.0);
    }
    let rho = pure_state(vec![d_a, d_b], psi)?;
    let pt = rho.partial_transpose(1)?;
    let norm: f64 = hermitian_eigenvalues(&pt)?.values.iter().map(|v| v.abs()).sum();
    Ok(((norm - 1.0) / (d - 1) as f64).max(0.0))
}

/// The same quantity as [`negativity_pure`] from the Schmidt coefficients:
/// `2/(d-1) sum_{i<j} sqrt(lambda_i lambda_j)`.
pub fn negativity_from_schmidt(psi: &[Complex64], d_a: usize, d_b: usize) -> Result<f64> {
    let lambda = schmidt_coefficients(psi, d_a, d_b)?;
    let d = d_a.min(d_b);
    if d < 2 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            sum += (lambda[i].max(0.0) * lambda[j].max(0.0)).sqrt();
        }
    }
    Ok(2.0 * sum / (d - 1) as f64)
}

fn min_dim(rho: &DensityMatrix) -> Result<usize> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    let d = d_a.min(d_b);
    if d < 2 {
        return Err(Error::BadParams(format!("local dimension {d} carries no entanglement")));
    }
    Ok(d)
}

/// `sqrt(2 / (d (d-1)))` times the Q-criterion margin.
pub fn concurrence_lower_bound(rho: &DensityMatrix, p: &ParamPair) -> Result<BoundReport> {
    let d = min_dim(rho)?;
    let margin = q_margin(rho, p)?.margin;
    let scale = (2.0 / (d * (d - 1)) as f64).sqrt();
    Ok(BoundReport::new("concurrence", margin, scale, p.clone(), d))
}

/// The Q-criterion margin divided by `d - 1`.
pub fn cren_lower_bound(rho: &DensityMatrix, p: &ParamPair) -> Result<BoundReport> {
    let d = min_dim(rho)?;
    let margin = q_margin(rho, p)?.margin;
    Ok(BoundReport::new("cren", margin, 1.0 / (d - 1) as f64, p.clone(), d))
}

/// `sqrt(min_i (1 - Tr rho_i^2))` over the single-party reductions of a pure state.
pub fn gme_concurrence_pure(psi: &[Complex64], dims: &[usize]) -> Result<f64> {
    check_normalized(psi)?;
    let rho = pure_state(dims.to_vec(), psi)?;
    let mut worst = f64::INFINITY;
    for k in 0..dims.len() {
        worst = worst.min(1.0 - rho.reduced(k)?.purity());
    }
    Ok(worst.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell, builtin_state, random_pure, random_separable, Seed};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn concurrence_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((concurrence_pure(&[re(h), re(0.0), re(0.0), re(h)], 2, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(concurrence_pure(&[re(1.0), re(0.0), re(0.0), re(0.0)], 2, 2).unwrap().abs() < 1e-12);
        let psi = [re(0.9f64.sqrt()), re(0.0), re(0.0), re(0.1f64.sqrt())];
        assert!((concurrence_pure(&psi, 2, 2).unwrap() - 0.6).abs() < 1e-12);
        assert!(matches!(concurrence_pure(&[re(1.0), re(1.0), re(0.0), re(0.0)], 2, 2), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn negativity_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [re(h), re(0.0), re(0.0), re(h)];
        assert!((negativity_pure(&bell, 2, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(negativity_pure(&[re(1.0), re(0.0), re(0.0), re(0.0)], 2, 2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn negativity_formulas_agree() {
        for (k, dims) in [[2, 2], [2, 3], [3, 3], [3, 2], [2, 4]].iter().enumerate() {
            for s in 0..10 {
                let psi = random_pure(dims, Seed(100 * k as u64 + s));
                let a = negativity_pure(&psi, dims[0], dims[1]).unwrap();
                let b = negativity_from_schmidt(&psi, dims[0], dims[1]).unwrap();
                assert!((a - b).abs() < 1e-10, "{dims:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bounds_on_maximally_entangled() {
        let p = ParamPair::scalar(1.0, 1.0).unwrap();
        let c = concurrence_lower_bound(&bell(2), &p).unwrap();
        assert!(c.bound <= 1.0 + 1e-9);
        let n = cren_lower_bound(&bell(3), &p).unwrap();
        assert!(n.bound <= 1.0 + 1e-9 && n.bound > 0.0);
        assert_eq!(n.d, 3);
    }

    #[test]
    fn bounds_are_affine_in_margin() {
        let rho = builtin_state("tiles", &[]).unwrap();
        let p = ParamPair::new(vec![1.0, 1.0], vec![1.0, 0.0]).unwrap();
        let c = concurrence_lower_bound(&rho, &p).unwrap();
        let n = cren_lower_bound(&rho, &p).unwrap();
        assert_eq!(c.margin, n.margin);
        assert_eq!(c.bound, c.scale * c.margin);
        assert!((c.scale - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(n.scale, 0.5);
        assert!(!c.vacuous);
    }

    #[test]
    fn separable_bounds_vacuous() {
        let p = ParamPair::new(vec![0.3, 1.2], vec![-0.7]).unwrap();
        for s in 0..20 {
            let rho = random_separable(&[3, 2], 5, Seed(s)).unwrap();
            assert!(concurrence_lower_bound(&rho, &p).unwrap().bound <= 1e-9);
            assert!(cren_lower_bound(&rho, &p).unwrap().bound <= 1e-9);
        }
    }

    #[test]
    fn gme_pure_ghz() {
        let ghz = crate::states::ghz_vector(3);
        let c = gme_concurrence_pure(&ghz, &[2, 2, 2]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}
