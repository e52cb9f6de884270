use std::f64::consts::PI;

use proptest::prelude::*;
use qei_core::mode_catalog::{build_cylinder_catalog, build_sl_catalog, ModeCatalog, StaticGeometry};
use qei_core::qwei::{
    bochner_checks, cumulative_mass_growth, gamma_sigma_estimate, default_lambdas, integrated_q,
    integrated_q_by_quadrature, integrated_spectrum, pullback_energy_spectrum, q_bound, q_bound_dilated,
    q_bound_for, q_function, reference_spectrum, spectrum_support_probe, verify_static_qwei, ModulatedBump,
    Provenance, Reference, SpectralMeasure,
};
use qei_core::states::StateSpec;
use qei_core::window::{Bump, WindowSpectrum};
use qei_core::C64;

fn unit_cylinder(j: usize) -> ModeCatalog {
    build_cylinder_catalog(2.0 * PI, 1.0, j).unwrap()
}

/// `(1/4π²) Σ_{ω_n < u} ω_n` summed over `n ∈ ℤ` in two different orders.
fn q_closed_form(u: f64) -> (f64, f64) {
    let w = |n: i64| ((n * n) as f64 + 1.0).sqrt();
    let terms: Vec<f64> = (-50..=50).map(w).filter(|&v| v < u).collect();
    let forward: f64 = terms.iter().sum();
    let backward: f64 = terms.iter().rev().sum();
    (forward / (4.0 * PI * PI), backward / (4.0 * PI * PI))
}

#[test]
fn cylinder_atoms() {
    let cat = unit_cylinder(5);
    for x in [0.0, 0.37, 3.0, 6.0] {
        let s = pullback_energy_spectrum(&cat, x).unwrap();
        assert_eq!(s.provenance(), Provenance::Analytic);
        let atoms = s.atoms();
        assert_eq!(atoms.len(), 3);
        assert!((atoms[0].0 - 1.0).abs() < 1e-15 && (atoms[0].1 - 0.5).abs() < 1e-14);
        assert!((atoms[1].0 - 2f64.sqrt()).abs() < 1e-15 && (atoms[1].1 - 2f64.sqrt()).abs() < 1e-14);
        assert!((atoms[2].1 - 5f64.sqrt()).abs() < 1e-14);
        assert!(atoms.iter().all(|a| a.1 >= 0.0));
    }
}

#[test]
fn sl_atoms_agree_with_cylinder() {
    let geom = StaticGeometry::ultrastatic(2.0 * PI, 1.0, 512).unwrap();
    let sl = build_sl_catalog(&geom, 5).unwrap();
    let cyl = unit_cylinder(5);
    let x = sl.grid_point(37);
    let a = pullback_energy_spectrum(&sl, x).unwrap();
    let b = pullback_energy_spectrum(&cyl, x).unwrap();
    assert_eq!(a.len(), b.len());
    for (p, q) in a.atoms().iter().zip(b.atoms()) {
        assert!(((p.0 - q.0) / q.0).abs() <= 1e-4);
        assert!(((p.1 - q.1) / q.1).abs() <= 1e-4, "{p:?} {q:?}");
    }
}

#[test]
fn q_step_function_values() {
    let cat = unit_cylinder(101);
    let s = pullback_energy_spectrum(&cat, 1.1).unwrap();
    assert_eq!(q_function(&s, 0.5), 0.0);
    for (u, lit) in [(1.5, 0.0969752), (2.5, 0.2102557)] {
        let (a, b) = q_closed_form(u);
        assert!((a - b).abs() <= 1e-15);
        assert!((q_function(&s, u) - a).abs() <= 1e-12);
        assert!((a - lit).abs() <= 1e-7);
    }
    assert!((q_closed_form(1.5).0 - (1.0 + 2.0 * 2f64.sqrt()) / (4.0 * PI * PI)).abs() < 1e-15);
}

#[test]
fn integrated_q_both_routes() {
    let cat = unit_cylinder(101);
    let total = integrated_spectrum(&cat, Reference::Ground).unwrap();
    let expect = (1.0 + 2.0 * 2f64.sqrt()) / (2.0 * PI);
    assert!((integrated_q(&total, 1.5) - expect).abs() <= 1e-12);
    assert!((integrated_q(&total, 1.5) - 0.6093131).abs() <= 1e-7);
    let quad = integrated_q_by_quadrature(&cat, Reference::Ground, 1.5).unwrap();
    assert!((quad - expect).abs() <= 1e-12);
    assert_eq!(integrated_q(&total, 1.0), 0.0);
    assert_eq!(integrated_q(&total, 0.3), 0.0);
}

#[test]
fn integrated_q_grows_quadratically() {
    let cat = unit_cylinder(257);
    let total = integrated_spectrum(&cat, Reference::Ground).unwrap();
    let fit = cumulative_mass_growth(&total, 10.0, 100.0, 64).unwrap();
    assert!((fit.slope - 2.0).abs() <= 0.2, "{}", fit.slope);
}

#[test]
fn q_bound_scaling_homogeneity_and_gap() {
    let cat = unit_cylinder(101);
    let spec = pullback_energy_spectrum(&cat, 0.0).unwrap();
    let g = Bump::new(0.0, 1.0, 1.0).unwrap();
    let win = WindowSpectrum::new(g);
    let q1 = q_bound(&spec, &win);
    assert!(q1.value > 0.0);

    // λ ∈ {1, ½, ¼}: q(g_λ)/‖g_λ²‖ is nonincreasing.
    let ratios: Vec<f64> = [1.0, 0.5, 0.25]
        .iter()
        .map(|&l| q_bound_dilated(&spec, &win, l).value * l / win.l1_of_square())
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] <= w[0]), "{ratios:?}");

    let doubled = WindowSpectrum::new(g.scaled(2f64.sqrt()));
    assert!((doubled.l1_of_square() / win.l1_of_square() - 2.0).abs() <= 1e-12);
    assert!((q_bound(&spec, &doubled).value / q1.value - 2.0).abs() <= 1e-10);

    // A long window concentrates |ĝ|² far below the gap.
    let wide = q_bound_dilated(&spec, &win, 1.0 / 64.0);
    assert!(wide.value * (1.0 / 64.0) / win.l1_of_square() <= 1e-8 * ratios[0]);
}

#[test]
fn scaling_covariance_of_q() {
    let cat = unit_cylinder(61);
    let spec = pullback_energy_spectrum(&cat, 2.0).unwrap();
    let g = Bump::new(0.3, 1.0, 1.0).unwrap();
    let win = WindowSpectrum::new(g);
    for lambda in [0.5, 2.0] {
        let by_change_of_variables = q_bound_dilated(&spec, &win, lambda).value;
        let direct = q_bound(&spec, &WindowSpectrum::new(g.dilated(lambda))).value;
        assert!((by_change_of_variables - direct).abs() <= 1e-10, "{by_change_of_variables} vs {direct}");
    }
}

#[test]
fn gamma_sigma_ground_is_quiescent() {
    let cat = unit_cylinder(101);
    let total = integrated_spectrum(&cat, Reference::Ground).unwrap();
    let g = Bump::new(0.0, 1.0, 1.0).unwrap();
    let trace = gamma_sigma_estimate(&total, &g, &default_lambdas()).unwrap();
    assert_eq!(trace.bound, 0.0);
    assert!(trace.values.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(trace.estimate < 1e-8, "{}", trace.estimate);

    // λ = 1 entry is ∫ q(g;x) dμ / ‖g²‖ by the spatial route.
    let win = WindowSpectrum::new(g);
    let mut spatial = 0.0;
    for (i, dmu) in cat.measure_weights().iter().enumerate() {
        spatial += q_bound(&pullback_energy_spectrum(&cat, cat.grid_point(i)).unwrap(), &win).value * dmu;
    }
    let single = gamma_sigma_estimate(&total, &g, &[1.0]).unwrap();
    assert!((single.estimate - spatial / win.l1_of_square()).abs() <= 1e-12);
}

#[test]
fn gamma_sigma_thermal_reference_stays_positive() {
    let cat = unit_cylinder(101);
    let total = integrated_spectrum(&cat, Reference::Kms { beta: 1.0 }).unwrap();
    let g = Bump::new(0.0, 1.0, 1.0).unwrap();
    let trace = gamma_sigma_estimate(&total, &g, &default_lambdas()).unwrap();
    assert!(trace.bound > 0.0);
    assert!(trace.estimate > 0.0);
    assert!((trace.estimate - trace.bound).abs() <= 1e-2 * trace.bound, "{} vs {}", trace.estimate, trace.bound);
}

#[test]
fn ground_margin_is_q() {
    let cat = unit_cylinder(101);
    let win = WindowSpectrum::new(Bump::new(0.0, 0.5, 1.0).unwrap());
    let m = verify_static_qwei(&StateSpec::Ground, &cat, &win, 1.0).unwrap();
    assert_eq!(m.lhs.value, 0.0);
    assert!(m.passed && m.margin > 0.0);
    let q = q_bound_for(&cat, &pullback_energy_spectrum(&cat, 1.0).unwrap(), &win);
    assert_eq!(m.margin, q.value);
}

#[test]
fn margins_hold_for_excited_states() {
    let cat = unit_cylinder(101);
    let c = |re: f64, im: f64| C64::new(re, im);
    let states = [
        StateSpec::SuperposedPair { mode: 1, epsilon: c(0.2, 0.0) },
        StateSpec::SuperposedPair { mode: 1, epsilon: c(0.5, 0.0) },
        StateSpec::Squeezed { modes: vec![(1, 1.0, 0.0), (2, 1.0, 0.0)] },
        StateSpec::Coherent { amplitudes: vec![(0, c(2.0, 0.0))] },
        StateSpec::Mixture {
            components: vec![
                (0.5, StateSpec::Kms { beta: 1.0 }),
                (0.5, StateSpec::SuperposedPair { mode: 2, epsilon: c(0.3, 0.1) }),
            ],
        },
    ];
    for half_width in [0.3, 1.0] {
        let win = WindowSpectrum::new(Bump::new(0.0, half_width, 1.0).unwrap());
        for spec in &states {
            for x in [0.0, 1.0, 2.5] {
                let m = verify_static_qwei(spec, &cat, &win, x).unwrap();
                assert!(m.margin >= -1e-7 && m.passed, "{spec:?} a={half_width} x={x}: {m:?}");
            }
        }
    }
}

#[test]
fn bochner_positive_type_and_empty_measure() {
    let cat = unit_cylinder(257);
    let spec = pullback_energy_spectrum(&cat, 0.4).unwrap();
    let tests: Vec<ModulatedBump> = (0..50)
        .map(|i| {
            let t = i as f64;
            ModulatedBump {
                bump: Bump::new((t * 0.37).sin(), 0.2 + 0.05 * t, 1.0 + (t * 0.11).cos()).unwrap(),
                modulation: 8.0 * (t * 0.71).sin(),
            }
        })
        .collect();
    let report = bochner_checks(&spec, &tests);
    assert!(report.passed());
    assert_eq!(report.positive_type.len(), 50);
    assert_eq!(report.negative_atoms, 0);
    assert!((report.growth.unwrap().slope - 2.0).abs() <= 0.2);

    let empty = SpectralMeasure::empty();
    let report = bochner_checks(&empty, &tests);
    assert!(report.passed());
    assert!(report.positive_type.iter().all(|&v| v == 0.0));
    assert!(report.min_weight.is_none());
}

#[test]
fn q_is_left_continuous_at_atoms() {
    let cat = unit_cylinder(41);
    let s = pullback_energy_spectrum(&cat, 0.8).unwrap();
    for &(z, w) in s.atoms() {
        assert_eq!(q_function(&s, z), q_function(&s, z - 1e-9));
        let jump = q_function(&s, z + 1e-9) - q_function(&s, z);
        assert!((jump - w / (2.0 * PI * PI)).abs() <= 1e-14);
    }
}

#[test]
fn support_probe() {
    let cat = unit_cylinder(21);
    assert_eq!(spectrum_support_probe(&cat, Reference::Ground, 0.3).unwrap(), 1.0);
    let top = *cat.omegas().last().unwrap();
    assert_eq!(spectrum_support_probe(&cat, Reference::Kms { beta: 1.0 }, 0.3).unwrap(), -top);
    let light = build_cylinder_catalog(2.0 * PI, 0.5, 9).unwrap();
    assert_eq!(spectrum_support_probe(&light, Reference::Ground, 0.0).unwrap(), 0.5);
    assert!(reference_spectrum(&cat, Reference::Kms { beta: -1.0 }, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_is_nonnegative_and_nondecreasing(x in 0.0f64..6.28, u in -5.0f64..30.0, du in 0.0f64..5.0, beta in 0.2f64..5.0) {
        let cat = unit_cylinder(41);
        for r in [Reference::Ground, Reference::Kms { beta }] {
            let s = reference_spectrum(&cat, r, x).unwrap();
            let (a, b) = (q_function(&s, u), q_function(&s, u + du));
            prop_assert!(a >= 0.0 && b >= a);
            prop_assert!(s.atoms().iter().all(|p| p.1 >= 0.0));
        }
    }

    #[test]
    fn q_is_x_independent_on_the_cylinder(x in 0.0f64..6.28, y in 0.0f64..6.28, u in 0.0f64..20.0) {
        let cat = unit_cylinder(41);
        let a = q_function(&pullback_energy_spectrum(&cat, x).unwrap(), u);
        let b = q_function(&pullback_energy_spectrum(&cat, y).unwrap(), u);
        prop_assert!((a - b).abs() <= 1e-12);
    }
}
