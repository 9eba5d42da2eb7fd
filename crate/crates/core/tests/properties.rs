use std::f64::consts::PI;

use proptest::prelude::*;

use optomech::cavity::{transmission_at, CavitySetup, Mirror, ScattererArray};
use optomech::superscatterer::{ensemble_response, reduce_mod_pi, special_spacings, uniform_stack};
use optomech::tmm::{
    calibrate_absorption, max_single_element_absorption, power_coefficients, single_element_absorption, Polarizability,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_matches_product(zeta in -15.0..15.0f64, n in 1usize..30, kd in 0.0..PI) {
        let closed = ensemble_response(zeta, n, kd).matrix();
        let brute = uniform_stack(Polarizability::real(zeta), n, kd);
        prop_assert!(closed.relative_distance(&brute) < 1e-9);
    }

    #[test]
    fn lossless_stacks_conserve_power(zeta in -15.0..15.0f64, n in 1usize..30, kd in 0.0..PI) {
        let m = uniform_stack(Polarizability::real(zeta), n, kd);
        // det = 1 up to cancellation between products of size |M|²
        prop_assert!((m.determinant() - 1.0).norm() < 1e-13 * m.norm().powi(2).max(1.0));
        let p = power_coefficients(&m).unwrap();
        prop_assert!((p.reflectivity + p.transmissivity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lossy_stacks_never_gain(zeta in -5.0..5.0f64, n in 1usize..12, kd in 0.0..PI, a in 0.0..0.05f64) {
        let z = calibrate_absorption(a, zeta).unwrap();
        let p = power_coefficients(&uniform_stack(z, n, kd)).unwrap();
        prop_assert!(p.absorption >= -1e-12 && p.absorption <= 1.0);
        prop_assert!((p.reflectivity + p.transmissivity + p.absorption - 1.0).abs() < 1e-12);
    }

    #[test]
    fn absorption_calibration_round_trips(zeta in -20.0..20.0f64, frac in 1e-8..0.99f64) {
        let a = frac * max_single_element_absorption(zeta);
        let z = calibrate_absorption(a, zeta).unwrap();
        prop_assert!((single_element_absorption(z.re(), z.im()) / a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn transmissive_points_are_transparent(zeta in -13.0..-0.05f64, n in 2usize..25) {
        let sp = special_spacings(zeta, n);
        for kd in [sp.kd_plus, sp.kd_minus] {
            prop_assert!((0.0..PI).contains(&kd));
            prop_assert!(ensemble_response(zeta, n, kd).chi.abs() < 1e-6);
        }
    }

    #[test]
    fn reduction_lands_in_range(angle in -100.0..100.0f64) {
        let r = reduce_mod_pi(angle);
        prop_assert!((0.0..PI).contains(&r));
        prop_assert!(((angle - r) / PI - ((angle - r) / PI).round()).abs() < 1e-9);
    }

    #[test]
    fn cavity_transmission_is_bounded(zeta in -3.0..0.0f64, n in 1usize..6, dk in -0.01..0.01f64) {
        let arr = ScattererArray::uniform(Polarizability::real(zeta), n, 0.37).unwrap();
        let s = CavitySetup::new(200.0, Mirror::from_finesse(100.0).unwrap(), arr, 0.0, 1e-6).unwrap();
        let t = transmission_at(&s, dk).unwrap().transmissivity;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
    }
}
