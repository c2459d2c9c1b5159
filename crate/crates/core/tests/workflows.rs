use realign::criteria::{ppt_margin, q_margin, threshold_scan, DetectedSide, ParamPair};
use realign::measures::{concurrence_lower_bound, gme_concurrence_pure};
use realign::multipartite::{biseparability_margin, gme_concurrence_lower_bound};
use realign::reproduce::{reproduce, ReferenceData, EXAMPLES};
use realign::states::{builtin_from_spec, StateFamily};
use realign::linalg::DensityMatrix;
use realign::Error;

#[test]
fn example1_detected_at_half() {
    let rho = builtin_from_spec("example1(0.5)").unwrap();
    let p = ParamPair::new(
        vec![11.9967, 12.9195, 11.6808, 12.1705, 11.4476],
        vec![12.5025, 11.5102, 12.0119, 12.3982, 12.7818],
    )
    .unwrap();
    assert!(q_margin(&rho, &p).unwrap().is_entangled());
    assert!(!ppt_margin(&builtin_from_spec("horodecki_2x4").unwrap()).unwrap().is_entangled());
}

#[test]
fn ghz_scan_detects_below_threshold() {
    let fam = StateFamily::from_spec("ghz_noise").unwrap();
    let p = ParamPair::new(vec![1.0, 2.0], vec![2.0, 1.0]).unwrap();
    let res = threshold_scan(&fam, |r: &DensityMatrix| biseparability_margin(r, &p), 0.0, 0.5, 1e-8).unwrap();
    assert_eq!(res.side, DetectedSide::Lower);
    assert!((res.threshold - 0.193038).abs() < 1e-3);
}

#[test]
fn ghz_pure_bound_below_exact_value() {
    let rho = builtin_from_spec("ghz_noise(0)").unwrap();
    let p = ParamPair::new(vec![1.0, 2.0], vec![2.0, 1.0]).unwrap();
    let bound = gme_concurrence_lower_bound(&rho, &p).unwrap().bound;
    let exact = gme_concurrence_pure(&realign::states::ghz_vector(3), &[2, 2, 2]).unwrap();
    assert!(bound > 0.0 && bound <= exact + 1e-9);
}

#[test]
fn bound_requires_bipartite_input() {
    let rho = builtin_from_spec("w_noise(0.9)").unwrap();
    let p = ParamPair::scalar(1.0, 1.0).unwrap();
    assert!(matches!(concurrence_lower_bound(&rho, &p), Err(Error::NotBipartite(3))));
}

#[test]
fn full_reproduction_passes() {
    let data = ReferenceData::bundled().unwrap();
    let reports = reproduce(&EXAMPLES, &data).unwrap();
    assert_eq!(reports.iter().map(|r| r.id).collect::<Vec<_>>(), EXAMPLES);
    for r in &reports {
        assert!(r.pass(), "example {}: {:?}", r.id, r.deviations());
    }
    // known inconsistencies surface as warnings
    assert!(!reports[2].warnings.is_empty());
    assert!(!reports[5].warnings.is_empty());
}

#[test]
fn tightened_reference_reports_deviation() {
    let mut data = ReferenceData::bundled().unwrap();
    for e in &mut data.entries {
        if e.key == "ex3.concurrence" {
            e.value = 0.05;
        }
    }
    let r = realign::reproduce::reproduce_example(3, &data).unwrap();
    assert!(!r.pass());
    assert_eq!(r.deviations().len(), 1);
}
