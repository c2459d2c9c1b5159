mod common;

use proptest::prelude::*;
use realign::criteria::{build_q_matrix, q_margin, shi_margin, sun_margin, ParamPair};
use realign::linalg::{kron, realign, trace_norm, vectorize, ComplexMatrix};
use realign::multipartite::{averaged_q_norm, permute_systems, Bipartition};
use realign::states::{random_density, random_separable, Seed};

fn params() -> impl Strategy<Value = ParamPair> {
    (
        prop::collection::vec(-20.0..20.0f64, 1..5),
        prop::collection::vec(-20.0..20.0f64, 1..5),
    )
        .prop_map(|(mu, nu)| ParamPair::new(mu, nu).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realignment_of_products(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut r = common::rng(seed);
        let a = r.complex_matrix(m, m);
        let b = r.complex_matrix(n, n);
        let lhs = realign(&kron(&a, &b), m, n).unwrap();
        let rhs = ComplexMatrix::outer(&vectorize(&a), &vectorize(&b));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn separable_never_detected(seed in any::<u64>(), terms in 1usize..8, p in params()) {
        let rho = random_separable(&[2, 3], terms, Seed(seed)).unwrap();
        prop_assert!(!q_margin(&rho, &p).unwrap().is_entangled());
    }

    #[test]
    fn scalar_and_constant_cases_are_the_general_case(seed in any::<u64>(), a in -5.0..5.0f64, b in -5.0..5.0f64, l in 1usize..4) {
        let rho = random_density(&[2, 2], 2, Seed(seed)).unwrap();
        let general = q_margin(&rho, &ParamPair::scalar(a, b).unwrap()).unwrap();
        prop_assert_eq!(general.lhs, shi_margin(&rho, a, b).unwrap().lhs);
        let general = q_margin(&rho, &ParamPair::constant(a, b, l).unwrap()).unwrap();
        prop_assert_eq!(general.lhs, sun_margin(&rho, a, b, l).unwrap().lhs);
        if l == 1 {
            prop_assert_eq!(general.lhs, shi_margin(&rho, a, b).unwrap().lhs);
        }
    }

    #[test]
    fn swapping_parties_transposes_roles(seed in any::<u64>(), p in params()) {
        // Q of the swapped state with (nu, mu) is the transpose of Q with (mu, nu)
        let rho = random_density(&[2, 3], 3, Seed(seed)).unwrap();
        let swapped = rho.permute(&[1, 0]).unwrap();
        let back = ParamPair::new(p.nu().to_vec(), p.mu().to_vec()).unwrap();
        let a = trace_norm(&build_q_matrix(&rho, &p).unwrap()).unwrap();
        let b = trace_norm(&build_q_matrix(&swapped, &back).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn averaged_norm_relabeling(seed in any::<u64>(), p in params()) {
        let rho = random_density(&[2, 2, 2], 3, Seed(seed)).unwrap();
        let base = averaged_q_norm(&rho, &p).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let moved = permute_systems(&rho, &perm).unwrap();
            prop_assert!((averaged_q_norm(&moved, &p).unwrap() - base).abs() < 1e-9);
        }
    }

    #[test]
    fn permutation_preserves_spectrum(seed in any::<u64>()) {
        let rho = random_density(&[2, 2, 2], 4, Seed(seed)).unwrap();
        let moved = permute_systems(&rho, &[2, 0, 1]).unwrap();
        let a = rho.eigenvalues().unwrap();
        let b = moved.eigenvalues().unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!((moved.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bipartition_cut_relabels() {
    let rho = random_density(&[2, 3, 2], 2, Seed(3)).unwrap();
    let cut = Bipartition::new(1).unwrap();
    let view = realign::multipartite::as_bipartite(&rho, cut).unwrap();
    assert_eq!(view.dims(), &[3, 4]);
}
