use std::f64::consts::PI;

use proptest::prelude::*;
use qei_core::energy_density::{
    energy_density, generator_identity_residual, integrated_energy, point_split_t, smeared_energy,
    state_energy_density, state_integrated_energy,
};
use qei_core::linalg::expi_hermitian;
use qei_core::mode_catalog::{build_cylinder_catalog, symplectic_form, ModeCatalog};
use qei_core::states::{
    smear_operator, smeared_field, weyl_operator, FockTruncation, MatrixFunctional, StateSpec,
    DEFAULT_DIMENSION_CAP,
};
use qei_core::window::Bump;
use qei_core::{CMat, CVec, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit_cylinder(j: usize) -> ModeCatalog {
    build_cylinder_catalog(2.0 * PI, 1.0, j).unwrap()
}

/// Classical solution `u = Σ 2 Re(α_j φ_j)` on the unit-mass 2π cylinder and
/// its energy density `½(u̇² + u'² + u²)`, written out mode by mode.
fn classical_energy(cat: &ModeCatalog, amps: &[(usize, C64)], t: f64, x: f64) -> f64 {
    let ns = cat.wavenumbers().unwrap();
    let (mut u, mut ut, mut ux) = (0.0, 0.0, 0.0);
    for &(j, a) in amps {
        let n = ns[j] as f64;
        let w = (n * n + 1.0).sqrt();
        let phi = a * C64::from_polar(1.0, n * x - w * t) / ((2.0 * PI).sqrt() * (2.0 * w).sqrt());
        u += 2.0 * phi.re;
        ut += 2.0 * (phi * c(0.0, -w)).re;
        ux += 2.0 * (phi * c(0.0, n)).re;
    }
    0.5 * (ut * ut + ux * ux + u * u)
}

/// Normal-ordered `T₀₀` on a truncation assembled from hand-built field,
/// velocity and gradient operators, with the vacuum value subtracted.
fn fock_t00(trunc: &FockTruncation, cat: &ModeCatalog, t: f64, x: f64) -> CMat {
    let ns = cat.wavenumbers().unwrap();
    let dim = trunc.dim();
    let (mut f, mut ft, mut fx) = (CMat::zeros(dim, dim), CMat::zeros(dim, dim), CMat::zeros(dim, dim));
    for (slot, &j) in trunc.modes().iter().enumerate() {
        let n = ns[j] as f64;
        let w = cat.omegas()[j];
        let phi = C64::from_polar(1.0, n * x - w * t) / ((2.0 * PI).sqrt() * (2.0 * w).sqrt());
        let a = trunc.annihilation(slot);
        f += a * phi;
        ft += a * (phi * c(0.0, -w));
        fx += a * (phi * c(0.0, n));
    }
    let herm = |m: CMat| &m + m.adjoint();
    let (f, ft, fx) = (herm(f), herm(ft), herm(fx));
    let t00 = (&ft * &ft + &fx * &fx + &f * &f) * c(0.5, 0.0);
    let vac = trunc.vacuum();
    let zero = vac.dotc(&(&t00 * &vac));
    t00 - trunc.identity() * zero
}

fn expect(m: &CMat, v: &CVec) -> C64 {
    v.dotc(&(m * v))
}

#[test]
fn ground_energy_vanishes() {
    let cat = unit_cylinder(11);
    for &(t, x) in &[(0.0, 0.0), (1.3, 2.2), (-4.0, 6.1)] {
        assert_eq!(state_energy_density(&StateSpec::Ground, &cat, t, x).unwrap(), 0.0);
    }
    let g = Bump::new(0.0, 1.0, 1.0).unwrap();
    let m = StateSpec::Ground.moments(&cat).unwrap();
    assert_eq!(smeared_energy(&m, &cat, &g, 1.0).unwrap().value, 0.0);
}

#[test]
fn coherent_energy_is_classical() {
    let cat = unit_cylinder(9);
    let amps = vec![(0, c(0.7, 0.1)), (2, c(-0.3, 0.4)), (5, c(0.2, -0.6))];
    let spec = StateSpec::Coherent { amplitudes: amps.clone() };
    for i in 0..20 {
        let (t, x) = (0.37 * i as f64 - 2.0, 0.31 * i as f64);
        let rho = state_energy_density(&spec, &cat, t, x).unwrap();
        let cl = classical_energy(&cat, &amps, t, x);
        assert!((rho - cl).abs() <= 1e-10, "{rho} vs {cl}");
        assert!(rho >= 0.0);
    }
}

#[test]
fn point_split_kernel_is_hermitian() {
    let cat = unit_cylinder(7);
    let spec = StateSpec::Mixture {
        components: vec![
            (0.4, StateSpec::Squeezed { modes: vec![(1, 0.5, 0.2)] }),
            (0.6, StateSpec::SuperposedPair { mode: 3, epsilon: c(0.2, 0.1) }),
        ],
    };
    let m = spec.moments(&cat).unwrap();
    let (p, q) = ((0.3, 1.0), (-0.8, 4.4));
    let a = point_split_t(&m, &cat, p, q).unwrap();
    let b = point_split_t(&m, &cat, q, p).unwrap();
    assert!((a - b.conj()).norm() <= 1e-14);
}

#[test]
fn superposed_pair_goes_negative_and_matches_fock_oracle() {
    let cat = unit_cylinder(3);
    // The k = 0 mode has m² = ω², so its pair term drops out of T₀₀; the
    // oscillation lives in the n = +1 mode.
    let spec = StateSpec::SuperposedPair { mode: 1, epsilon: c(0.2, 0.0) };
    let trunc = FockTruncation::with_modes(&cat, &[1], 8, DEFAULT_DIMENSION_CAP).unwrap();
    let v = trunc.pure_vector(&spec).unwrap();
    let x = 0.9;
    let mut min = f64::INFINITY;
    for i in 0..200 {
        let t = PI * i as f64 / 200.0;
        let rho = state_energy_density(&spec, &cat, t, x).unwrap();
        let oracle = expect(&fock_t00(&trunc, &cat, t, x), &v);
        assert!((rho - oracle.re).abs() <= 1e-12 && oracle.im.abs() <= 1e-12);
        min = min.min(rho);
    }
    assert!(min < 0.0, "{min}");
}

#[test]
fn kms_density_is_uniform_mode_sum() {
    let cat = unit_cylinder(41);
    let spec = StateSpec::Kms { beta: 1.0 };
    let oracle: f64 = cat.omegas().iter().map(|&w| w / (w.exp() - 1.0) / (2.0 * PI)).sum();
    for &(t, x) in &[(0.0, 0.0), (0.5, 1.0), (2.0, 3.3), (-1.0, 5.9)] {
        let rho = state_energy_density(&spec, &cat, t, x).unwrap();
        assert!(rho > 0.0);
        assert!((rho - oracle).abs() <= 1e-10);
    }
}

#[test]
fn smeared_mixture_is_half_thermal() {
    let cat = unit_cylinder(21);
    let g = Bump::new(0.4, 1.5, 1.0).unwrap();
    let kms = StateSpec::Kms { beta: 1.0 };
    let mix = StateSpec::Mixture { components: vec![(0.5, StateSpec::Ground), (0.5, kms.clone())] };
    let a = smeared_energy(&mix.moments(&cat).unwrap(), &cat, &g, 2.0).unwrap();
    let b = smeared_energy(&kms.moments(&cat).unwrap(), &cat, &g, 2.0).unwrap();
    assert!((a.value - 0.5 * b.value).abs() <= 1e-12);
}

#[test]
fn smeared_pair_energy_is_negative_on_trough() {
    let cat = unit_cylinder(3);
    let spec = StateSpec::SuperposedPair { mode: 1, epsilon: c(0.2, 0.0) };
    let x = 0.0;
    let trough = (0..400)
        .map(|i| PI * i as f64 / 400.0)
        .min_by(|&a, &b| {
            let ra = state_energy_density(&spec, &cat, a, x).unwrap();
            let rb = state_energy_density(&spec, &cat, b, x).unwrap();
            ra.partial_cmp(&rb).unwrap()
        })
        .unwrap();
    let g = Bump::new(trough, 0.4, 1.0).unwrap();
    let value = smeared_energy(&spec.moments(&cat).unwrap(), &cat, &g, x).unwrap();
    assert!(value.value < 0.0, "{}", value.value);

    // Oracle: composite Simpson of g²⟨T₀₀⟩ on the truncation.
    let trunc = FockTruncation::with_modes(&cat, &[1], 8, DEFAULT_DIMENSION_CAP).unwrap();
    let v = trunc.pure_vector(&spec).unwrap();
    let (lo, hi) = g.support();
    let n = 4000;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let t = lo + i as f64 * h;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g.eval(t).powi(2) * expect(&fock_t00(&trunc, &cat, t, x), &v).re;
    }
    acc *= h / 3.0;
    assert!((value.value - acc).abs() <= 1e-7, "{} vs {acc}", value.value);
}

#[test]
fn wide_windows_average_the_pair_oscillation_away() {
    let cat = unit_cylinder(3);
    let spec = StateSpec::SuperposedPair { mode: 1, epsilon: c(0.2, 0.0) };
    let g = Bump::new(0.0, 5.0, 1.0).unwrap();
    let value = smeared_energy(&spec.moments(&cat).unwrap(), &cat, &g, 0.0).unwrap();
    assert!(value.value > 0.0);
}

#[test]
fn single_particle_integrated_energy_is_omega() {
    let cat = unit_cylinder(9);
    for j in 0..9 {
        let e = state_integrated_energy(&StateSpec::SingleParticle { mode: j }, &cat, 0.4).unwrap();
        assert!((e - cat.omegas()[j]).abs() <= 1e-9);
    }
}

#[test]
fn squeezed_integrated_energy_is_conserved() {
    let cat = unit_cylinder(9);
    let spec = StateSpec::Squeezed { modes: vec![(1, 0.4, 0.3), (2, 0.3, 2.0), (6, 0.2, 1.0)] };
    let e0 = state_integrated_energy(&spec, &cat, 0.0).unwrap();
    for t in [0.3, 0.7] {
        assert!((state_integrated_energy(&spec, &cat, t).unwrap() - e0).abs() <= 1e-9);
    }
    let closed: f64 = [(1, 0.4f64), (2, 0.3), (6, 0.2)].iter().map(|&(j, r)| cat.omegas()[j] * r.sinh().powi(2)).sum();
    assert!((e0 - closed).abs() <= 1e-9);
}

#[test]
fn coherent_integrated_energy_is_symplectic_identity() {
    let cat = unit_cylinder(9);
    let amps = vec![(0, c(0.5, 0.2)), (3, c(-0.4, 0.1)), (8, c(0.1, 0.3))];
    let spec = StateSpec::Coherent { amplitudes: amps.clone() };
    let e = state_integrated_energy(&spec, &cat, 0.2).unwrap();
    let mut u = vec![c(0.0, 0.0); cat.len()];
    let mut du = vec![c(0.0, 0.0); cat.len()];
    for &(j, a) in &amps {
        u[j] = a;
        du[j] = a * c(0.0, -cat.omegas()[j]);
    }
    let half_sigma = 0.5 * symplectic_form(&cat, &du, &u, 0.0).unwrap();
    let direct: f64 = amps.iter().map(|&(j, a)| cat.omegas()[j] * a.norm_sqr()).sum();
    assert!((e - half_sigma).abs() <= 1e-10);
    assert!((e - direct).abs() <= 1e-10);
}

#[test]
fn generator_identity_trivial_and_weyl_cases() {
    let cat = unit_cylinder(3);
    let trunc = FockTruncation::new(&cat, 1, 16).unwrap();
    let vac = MatrixFunctional::expectation(trunc.vacuum());
    let one = generator_identity_residual(&trunc, &trunc.identity(), &vac).unwrap();
    assert_eq!(one.lhs, c(0.0, 0.0));
    assert!(one.rhs.norm() <= 1e-14);
    let w = weyl_operator(&trunc, &[c(0.3, -0.2)]).unwrap();
    let check = generator_identity_residual(&trunc, &w, &vac).unwrap();
    assert!(check.residual <= 1e-8, "{}", check.residual);
    // H annihilates the vacuum, so also probe an off-diagonal functional.
    let off = MatrixFunctional::new(trunc.basis_vector(1), trunc.vacuum()).unwrap();
    let check = generator_identity_residual(&trunc, &w, &off).unwrap();
    assert!(check.residual <= 1e-8, "{}", check.residual);
    assert!(check.lhs.norm() > 1e-3);
}

fn low_occupancy_vector(trunc: &FockTruncation, coeffs: &[(f64, f64)]) -> CVec {
    let mut v = CVec::zeros(trunc.dim());
    let mut k = 0;
    for idx in 0..trunc.dim() {
        if trunc.occupations(idx).iter().sum::<usize>() <= 2 && k < coeffs.len() {
            v[idx] = c(coeffs[k].0, coeffs[k].1);
            k += 1;
        }
    }
    v
}

fn smeared_generator(trunc: &FockTruncation, coeffs: &[C64], centre: f64) -> CMat {
    let f = Bump::new(centre, 0.8, 0.6).unwrap();
    smear_operator(trunc, &smeared_field(trunc, coeffs).unwrap(), &f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generator_identity_for_products_of_exponentials(
        g1 in prop::array::uniform4(-0.4f64..0.4),
        g2 in prop::array::uniform4(-0.4f64..0.4),
        centres in (-1.0f64..1.0, -1.0f64..1.0),
        left in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        right in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
    ) {
        let cat = unit_cylinder(3);
        let trunc = FockTruncation::new(&cat, 2, 6).unwrap();
        let a1 = smeared_generator(&trunc, &[c(g1[0], g1[1]), c(g1[2], g1[3])], centres.0);
        let a2 = smeared_generator(&trunc, &[c(g2[0], g2[1]), c(g2[2], g2[3])], centres.1);
        let a = expi_hermitian(&a1) * expi_hermitian(&a2);
        let ell = MatrixFunctional::new(low_occupancy_vector(&trunc, &left), low_occupancy_vector(&trunc, &right)).unwrap();
        let check = generator_identity_residual(&trunc, &a, &ell).unwrap();
        prop_assert!(check.residual <= 1e-6, "{}", check.residual);
    }
}

fn spec_strategy() -> impl Strategy<Value = StateSpec> {
    let leaf = prop_oneof![
        Just(StateSpec::Ground),
        (0.2f64..5.0).prop_map(|beta| StateSpec::Kms { beta }),
        (0usize..7, -1.0f64..1.0, -1.0f64..1.0)
            .prop_map(|(j, a, b)| StateSpec::Coherent { amplitudes: vec![(j, c(a, b))] }),
        (0usize..7, 0.0f64..1.2, 0.0f64..6.28).prop_map(|(j, r, p)| StateSpec::Squeezed { modes: vec![(j, r, p)] }),
        (0usize..7).prop_map(|mode| StateSpec::SingleParticle { mode }),
        (0usize..7, -1.0f64..1.0, -1.0f64..1.0)
            .prop_map(|(mode, a, b)| StateSpec::SuperposedPair { mode, epsilon: c(a, b) }),
    ];
    leaf.clone().prop_recursive(1, 4, 3, move |inner| {
        (inner.clone(), inner, 0.05f64..0.95)
            .prop_map(|(a, b, p)| StateSpec::Mixture { components: vec![(p, a), (1.0 - p, b)] })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integrated_energy_is_conserved(spec in spec_strategy(), t in -3.0f64..3.0) {
        let cat = unit_cylinder(7);
        let e0 = state_integrated_energy(&spec, &cat, 0.0).unwrap();
        let et = state_integrated_energy(&spec, &cat, t).unwrap();
        prop_assert!((et - e0).abs() <= 1e-9 * (1.0 + e0.abs()));
    }

    #[test]
    fn density_is_linear_in_the_functional(
        a in spec_strategy(), b in spec_strategy(),
        za in (-1.0f64..1.0, -1.0f64..1.0), zb in (-1.0f64..1.0, -1.0f64..1.0),
        t in -2.0f64..2.0, x in 0.0f64..6.28,
    ) {
        let cat = unit_cylinder(7);
        let (za, zb) = (c(za.0, za.1), c(zb.0, zb.1));
        let (ma, mb) = (a.moments(&cat).unwrap(), b.moments(&cat).unwrap());
        let combo = ma.scaled(za).add(&mb.scaled(zb));
        let lhs = energy_density(&combo, &cat, t, x).unwrap();
        let rhs = energy_density(&ma, &cat, t, x).unwrap() * za + energy_density(&mb, &cat, t, x).unwrap() * zb;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let ia = integrated_energy(&combo, &cat, t).unwrap();
        let ib = integrated_energy(&ma, &cat, t).unwrap() * za + integrated_energy(&mb, &cat, t).unwrap() * zb;
        prop_assert!((ia - ib).norm() <= 1e-12 * (1.0 + ia.norm()));
    }

    #[test]
    fn coherent_density_is_nonnegative(a in -1.0f64..1.0, b in -1.0f64..1.0, j in 0usize..7, t in -3.0f64..3.0, x in 0.0f64..6.28) {
        let cat = unit_cylinder(7);
        let spec = StateSpec::Coherent { amplitudes: vec![(j, c(a, b)), ((j + 3) % 7, c(b, -a))] };
        prop_assert!(state_energy_density(&spec, &cat, t, x).unwrap() >= -1e-14);
    }
}
