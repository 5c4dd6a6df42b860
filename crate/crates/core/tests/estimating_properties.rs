//! Invariants of the estimating-function screening path.

use elsis::estimating::{basis_ar1_adjacency, basis_identity, marginal_el_stats_ee, BasisSet, QifEstimatingFunction};
use elsis::screening::{marginal_el_stats, StatFlag};
use elsis::simgen::{generate, Example, SimData, SimulationSpec};
use elsis::{ElConfig, LongitudinalDataset};

fn cfg() -> ElConfig {
    ElConfig::default()
}

fn longitudinal(n: usize, m: usize, rep: u64) -> LongitudinalDataset {
    let mut spec = SimulationSpec::new(Example::Ex4, n, 30, 9);
    spec.m = m;
    spec.c = 1.0;
    match generate(&spec, rep).unwrap() {
        SimData::Longitudinal(d) => d,
        SimData::CrossSection(_) => unreachable!(),
    }
}

fn qif(bases: BasisSet) -> QifEstimatingFunction {
    QifEstimatingFunction { bases }
}

#[test]
fn single_identity_basis_with_one_measurement_reduces_to_marginal() {
    for rep in 1..=3 {
        let data = longitudinal(50, 1, rep);
        let ee = marginal_el_stats_ee(&data, &qif(BasisSet::identity(1)), &cfg()).unwrap();
        let flat = data.flatten().unwrap().standardize().unwrap();
        let plain = marginal_el_stats(&flat, &cfg()).unwrap();
        for (a, b) in ee.iter().zip(&plain) {
            assert_eq!(a.feature, b.feature);
            let (a, b) = (a.statistic.unwrap(), b.statistic.unwrap());
            if a.is_infinite() || b.is_infinite() {
                assert_eq!(a, b);
            } else {
                assert!((a.to_f64() - b.to_f64()).abs() < 1e-10, "{a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn basis_order_does_not_matter() {
    let data = longitudinal(40, 4, 1);
    let ab = BasisSet::new(vec![basis_identity(4), basis_ar1_adjacency(4).unwrap()]).unwrap();
    let ba = BasisSet::new(vec![basis_ar1_adjacency(4).unwrap(), basis_identity(4)]).unwrap();
    let s1 = marginal_el_stats_ee(&data, &qif(ab), &cfg()).unwrap();
    let s2 = marginal_el_stats_ee(&data, &qif(ba), &cfg()).unwrap();
    for (a, b) in s1.iter().zip(&s2) {
        let (x, y) = (a.statistic.unwrap(), b.statistic.unwrap());
        if x.is_infinite() || y.is_infinite() {
            assert_eq!(x, y);
        } else {
            assert!((x.to_f64() - y.to_f64()).abs() < 1e-6 * x.to_f64().max(1.0), "feature {}: {x:?} vs {y:?}", a.feature);
        }
        assert_eq!(a.rank, b.rank);
    }
}

#[test]
fn duplicated_basis_is_degenerate() {
    let data = longitudinal(40, 4, 1);
    let dup = BasisSet::new(vec![basis_identity(4), basis_ar1_adjacency(4).unwrap(), basis_identity(4)]).unwrap();
    let stats = marginal_el_stats_ee(&data, &qif(dup), &cfg()).unwrap();
    for s in &stats {
        assert_eq!(s.statistic, None, "feature {} got a value", s.feature);
        assert_eq!(s.flag, Some(StatFlag::Degenerate));
    }
}
