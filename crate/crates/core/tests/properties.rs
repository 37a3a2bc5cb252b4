use std::collections::BTreeMap;

use mda_aux::dist_catalog::{CatalogEntry, DistributionSpec};
use mda_aux::estimation::{fit_power_psi, sample};
use mda_aux::limit_probes::{gpd_tail, reconstruct_c, vr_limit_probe};
use mda_aux::psi_expr::parse_psi;
use mda_aux::validity::corpus::CORPUS_DISTRIBUTIONS;
use mda_aux::validity::{check_vmr_validity, Validity};
use mda_aux::AuxFn;
use proptest::prelude::*;

fn dist(s: &str) -> DistributionSpec<f64> {
    DistributionSpec::from_spec_str(s).unwrap()
}

fn user(src: &str) -> AuxFn {
    parse_psi(src).unwrap().to_auxiliary(&BTreeMap::new(), 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_survival_is_non_increasing(idx in 0usize..CORPUS_DISTRIBUTIONS.len(), a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let d = dist(CORPUS_DISTRIBUTIONS[idx]);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (l1, l2) = (d.log_survival(lo), d.log_survival(hi));
        prop_assert!(l1 <= 0.0 && l2 <= 0.0);
        prop_assert!(l2 <= l1 || l2 - l1 <= 1e-12 * l1.abs().max(1.0), "{}: F̄({lo}) -> {l1}, F̄({hi}) -> {l2}", CORPUS_DISTRIBUTIONS[idx]);
    }

    #[test]
    fn gpd_tail_is_one_at_zero_and_decreasing(g in -2.0f64..2.0, z1 in 0.0f64..5.0, z2 in 0.0f64..5.0) {
        prop_assert_eq!(gpd_tail(g, 0.0).unwrap(), 1.0);
        let (lo, hi) = if z1 < z2 { (z1, z2) } else { (z2, z1) };
        prop_assume!(hi - lo > 1e-9);
        if let (Ok(a), Ok(b)) = (gpd_tail(g, lo), gpd_tail(g, hi)) {
            prop_assert!(b < a);
        }
    }

    #[test]
    fn pareto_probe_is_sensitive_to_scaling(k in 0.2f64..5.0, z in 0.1f64..3.0) {
        prop_assume!((k - 1.0).abs() > 1e-3);
        let p = dist("pareto_like:alpha=2");
        let psi = user("x/2").scaled(k);
        let r = vr_limit_probe(&p, &psi, z, &p.default_grid()).unwrap();
        let expect = (1.0 + k * z / 2.0).powf(-2.0);
        for &v in r.ratios() {
            prop_assert!((v - expect).abs() <= 1e-12 * expect);
        }
        prop_assert!((r.target - expect).abs() > 1e-9);
    }

    #[test]
    fn display_round_trips(src in "(x|[1-9]|x\\^2|log\\(x\\)|exp\\(-x\\))([+*/-](x|[1-9]|sqrt\\(x\\))){0,4}", x in 0.5f64..20.0) {
        let e = parse_psi(&src).unwrap();
        let again = parse_psi(&e.to_string()).unwrap();
        prop_assert_eq!(e.ast(), again.ast());
        let none = BTreeMap::new();
        prop_assert_eq!(e.eval(x, &none).ok(), again.eval(x, &none).ok());
    }
}

#[test]
fn c_route_agrees_with_vmr_check_on_catalog_pairs() {
    for spec in CORPUS_DISTRIBUTIONS {
        let d = dist(spec);
        let psi_u = d.catalog_psi(CatalogEntry::Universal).unwrap();
        for which in [CatalogEntry::Universal, CatalogEntry::VrSimple] {
            let psi = d.catalog_psi(which).unwrap();
            let x_star = psi.x_star().max(psi_u.x_star());
            let grid = d.default_grid().after(x_star).unwrap();
            let z = grid.points()[0];
            let c = reconstruct_c(&d, &psi, z, &grid).unwrap();
            let v = check_vmr_validity(&psi, &psi_u, d.gamma(), z, &grid, 1e-2);
            if v.verdict != Validity::Inconclusive {
                assert_eq!(
                    c.verdict.is_valid(),
                    v.verdict == Validity::Valid,
                    "{spec} {which:?}: c route {:?}, K route {:?}",
                    c.verdict,
                    v.verdict
                );
            }
        }
    }
}

#[test]
fn fits_are_seed_deterministic() {
    let d = dist("exponential_like:lambda=1");
    let grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let a = fit_power_psi(&sample(&d, 20_000, 11).unwrap(), &grid).unwrap();
    let b = fit_power_psi(&sample(&d, 20_000, 11).unwrap(), &grid).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    let c = fit_power_psi(&sample(&d, 20_000, 12).unwrap(), &grid).unwrap();
    assert_ne!(a.beta_hat, c.beta_hat);
}

#[test]
fn generic_over_f32() {
    let d: DistributionSpec<f32> = DistributionSpec::from_spec_str("pareto_like:alpha=2").unwrap();
    let psi = d.catalog_psi(CatalogEntry::Universal).unwrap();
    let r = vr_limit_probe(&d, &psi, 1.0f32, &d.default_grid()).unwrap();
    assert!(r.ratios().iter().all(|&v| (v - 4.0 / 9.0).abs() < 1e-5));
}
