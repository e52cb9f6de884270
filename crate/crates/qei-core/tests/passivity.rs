use std::f64::consts::PI;

use proptest::prelude::*;
use qei_core::linalg::{expi_hermitian, hermitian_eig, operator_norm};
use qei_core::mode_catalog::{build_cylinder_catalog, ModeCatalog};
use qei_core::passivity::{
    default_search_family, delta_of, energy, evolve_cyclic, kms_state, passive_search, passivity_functional,
    work_done, CyclicProcess, DriveTerm, UnitaryWord,
};
use qei_core::states::{smear_operator, smeared_field, weyl_operator, FockTruncation};
use qei_core::window::Bump;
use qei_core::{CMat, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit_cylinder(j: usize) -> ModeCatalog {
    build_cylinder_catalog(2.0 * PI, 1.0, j).unwrap()
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn projector(trunc: &FockTruncation, idx: usize) -> CMat {
    let v = trunc.basis_vector(idx);
    &v * v.adjoint()
}

/// `|i⟩⟨j| + |j⟩⟨i|`.
fn flip(dim: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    m[(i, j)] = c(1.0, 0.0);
    m[(j, i)] = c(1.0, 0.0);
    m
}

fn heisenberg(trunc: &FockTruncation, a: &CMat, s: f64) -> CMat {
    let e = trunc.energies();
    let mut out = a.clone();
    for r in 0..a.nrows() {
        for col in 0..a.ncols() {
            out[(r, col)] *= C64::from_polar(1.0, (e[r] - e[col]) * s);
        }
    }
    out
}

/// Hermitian generator: a time-smeared field plus a multiple of a number
/// operator.
fn generator(trunc: &FockTruncation, p: &[f64; 6]) -> CMat {
    let coeffs: Vec<C64> = (0..trunc.modes().len()).map(|a| c(p[0] / (a + 1) as f64, p[1])).collect();
    let f = Bump::new(p[2], 0.5 + p[3].abs(), 1.0).unwrap();
    let smeared = smear_operator(trunc, &smeared_field(trunc, &coeffs).unwrap(), &f).unwrap();
    smeared + trunc.number(0) * c(p[4], 0.0) + flip(trunc.dim(), 0, 1) * c(p[5], 0.0)
}

fn word(trunc: &FockTruncation, params: &[[f64; 6]]) -> UnitaryWord {
    UnitaryWord::new(trunc.dim(), params.iter().map(|p| generator(trunc, p)).collect()).unwrap()
}

#[test]
fn delta_examples() {
    let cat = unit_cylinder(3);
    let trunc = FockTruncation::new(&cat, 2, 4).unwrap();
    assert_eq!(max_abs(&delta_of(&trunc, &trunc.identity())), 0.0);
    for a in 0..2 {
        let ann = trunc.annihilation(a);
        let expect = ann * c(0.0, -trunc.omegas()[a]);
        assert!(max_abs(&(delta_of(&trunc, ann) - expect)) <= 1e-14);
    }
}

#[test]
fn delta_matches_richardson_difference() {
    let cat = unit_cylinder(3);
    let trunc = FockTruncation::new(&cat, 2, 3).unwrap();
    let dim = trunc.dim();
    let mut a = CMat::zeros(dim, dim);
    for r in 0..dim {
        for col in 0..dim {
            a[(r, col)] = c(((r * 7 + col * 3) % 11) as f64 / 11.0 - 0.5, ((r * 5 + col) % 13) as f64 / 13.0 - 0.5);
        }
    }
    let a = &a + a.adjoint();
    let h = 0.01;
    let d = |h: f64| (heisenberg(&trunc, &a, h) - heisenberg(&trunc, &a, -h)) / c(2.0 * h, 0.0);
    let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
    let r1 = (&d2 * c(4.0, 0.0) - &d1) / c(3.0, 0.0);
    let r2 = (&d3 * c(4.0, 0.0) - &d2) / c(3.0, 0.0);
    let fd = (&r2 * c(16.0, 0.0) - &r1) / c(15.0, 0.0);
    assert!(max_abs(&(delta_of(&trunc, &a) - fd)) <= 1e-8);
}

#[test]
fn displacement_injects_alpha_squared_omega() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 16).unwrap();
    // e^{iΦ(c)} = D(α) with α = i c.
    let u = weyl_operator(&trunc, &[c(0.0, -0.5)]).unwrap();
    let vac = projector(&trunc, 0);
    let value = passivity_functional(&trunc, &vac, &u).unwrap();
    assert!((value - 0.25).abs() <= 1e-8, "{value}");
}

#[test]
fn swap_extracts_one_quantum() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 4).unwrap();
    let u = expi_hermitian(&(flip(trunc.dim(), 0, 1) * c(PI / 2.0, 0.0)));
    let value = passivity_functional(&trunc, &projector(&trunc, 1), &u).unwrap();
    assert!((value + 1.0).abs() <= 1e-12);
}

#[test]
fn kms_examples() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 40).unwrap();
    let cold = kms_state(&trunc, 50.0).unwrap();
    assert!(max_abs(&(cold.density - projector(&trunc, 0))) <= 1e-12);
    let warm = kms_state(&trunc, 1.0).unwrap();
    let n = energy(&trunc, &warm.density);
    assert!((n - 1.0 / (1f64.exp() - 1.0)).abs() <= warm.top_level_probability.max(1e-15) * 50.0);
    assert!((n - 0.5819767).abs() <= 1e-7);
    let small = FockTruncation::new(&cat, 1, 6).unwrap();
    assert!(kms_state(&small, 0.1).is_err());
    assert!(kms_state(&trunc, -1.0).is_err());
}

#[test]
fn hamiltonian_is_bounded_below_by_zero() {
    let cat = unit_cylinder(3);
    let trunc = FockTruncation::new(&cat, 3, 3).unwrap();
    let (vals, _) = hermitian_eig(&trunc.hamiltonian());
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min.abs() <= 1e-12);
}

fn envelope(duration: f64, amplitude: f64) -> Bump {
    Bump::new(duration / 2.0, duration / 2.0, amplitude).unwrap()
}

#[test]
fn idle_process() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 6).unwrap();
    let idle = CyclicProcess::idle(3.0).unwrap();
    let ev = evolve_cyclic(&trunc, &idle).unwrap();
    assert_eq!(ev.u_final, trunc.identity());
    let w = work_done(&trunc, &projector(&trunc, 0), &idle).unwrap();
    assert_eq!(w.integral, 0.0);
    assert_eq!(w.algebraic, 0.0);
}

#[test]
fn commuting_drive_has_closed_form() {
    let cat = unit_cylinder(3);
    let trunc = FockTruncation::new(&cat, 2, 3).unwrap();
    let coupling = trunc.number(0) * c(0.7, 0.0) + trunc.number(1) * c(-0.3, 0.0);
    let f = envelope(4.0, 0.8);
    let proc = CyclicProcess::new(
        4.0,
        vec![DriveTerm { envelope: f, carrier: 0.0, phase: 0.0, coupling: coupling.clone() }],
    )
    .unwrap();
    let ev = evolve_cyclic(&trunc, &proc).unwrap();
    let expect = expi_hermitian(&(coupling * c(-f.integral(), 0.0)));
    assert!(max_abs(&(ev.u_final - expect)) <= 1e-8);
}

#[test]
fn generic_drive_stays_unitary() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 8).unwrap();
    let a = trunc.annihilation(0);
    let x = a + a.adjoint();
    let proc = CyclicProcess::new(
        4.0,
        vec![DriveTerm { envelope: envelope(4.0, 0.6), carrier: 0.0, phase: 0.0, coupling: x }],
    )
    .unwrap();
    let ev = evolve_cyclic(&trunc, &proc).unwrap();
    assert!(ev.unitarity_drift <= 1e-9, "{}", ev.unitarity_drift);
    assert!(ev.halving_error <= 1e-8);
}

#[test]
fn vacuum_work_is_nonnegative_and_identity_holds() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 12).unwrap();
    let a = trunc.annihilation(0);
    let x = a + a.adjoint();
    let raw = envelope(4.0, 1.0);
    let f = raw.scaled(1.0 / raw.integral());
    assert!((f.integral() - 1.0).abs() <= 1e-12);
    let proc = CyclicProcess::new(4.0, vec![DriveTerm { envelope: f, carrier: 0.0, phase: 0.0, coupling: x }]).unwrap();
    let w = work_done(&trunc, &projector(&trunc, 0), &proc).unwrap();
    assert!(w.discrepancy <= 1e-6, "{w:?}");
    assert!(w.integral >= 0.0 && w.algebraic >= 0.0);
    assert!(w.algebraic > 1e-3);
}

#[test]
fn pi_pulse_extracts_work_from_excited_state() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 4).unwrap();
    let duration = 30.0;
    // Resonant drive on the 0–1 transition: in the rotating frame the pulse
    // area ∫f/2 = π/2 swaps |1⟩ into |0⟩.
    let raw = envelope(duration, 1.0);
    let f = raw.scaled(PI / raw.integral());
    let proc = CyclicProcess::new(
        duration,
        vec![DriveTerm { envelope: f, carrier: 1.0, phase: 0.0, coupling: flip(trunc.dim(), 0, 1) }],
    )
    .unwrap();
    let w = work_done(&trunc, &projector(&trunc, 1), &proc).unwrap();
    assert!(w.discrepancy <= 1e-6);
    assert!(w.algebraic < -0.9, "{}", w.algebraic);
}

#[test]
fn search_examples() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 6).unwrap();
    let family = default_search_family(&trunc);
    let vac = projector(&trunc, 0);
    let r = passive_search(&trunc, &vac, &family, 20, 1e-9).unwrap();
    assert!(r.passive && r.infimum >= -1e-9);

    let excited = projector(&trunc, 1);
    let r = passive_search(&trunc, &excited, &family, 40, 1e-9).unwrap();
    assert!(!r.passive);
    assert!(r.infimum <= -1.0 + 1e-6, "{}", r.infimum);
    assert!(energy(&trunc, &r.state) < energy(&trunc, &excited));

    let r = passive_search(&trunc, &excited, &family, 0, 1e-9).unwrap();
    assert_eq!(r.infimum, 0.0);
    assert!(r.trace.is_empty());
    assert_eq!(r.state, excited);
}

#[test]
fn every_excited_level_has_a_witness() {
    let cat = unit_cylinder(1);
    let trunc = FockTruncation::new(&cat, 1, 6).unwrap();
    let family = default_search_family(&trunc);
    for n in 1..=5 {
        let r = passive_search(&trunc, &projector(&trunc, n), &family, 20, 1e-9).unwrap();
        assert!(r.infimum < -0.5, "level {n}: {}", r.infimum);
    }
}

fn gen_params() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-0.6f64..0.6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn words_are_unitary(params in prop::collection::vec(gen_params(), 1..4)) {
        let cat = unit_cylinder(3);
        let trunc = FockTruncation::new(&cat, 2, 4).unwrap();
        prop_assert!(word(&trunc, &params).unitarity_defect() <= 1e-10);
    }

    #[test]
    fn thermal_family_and_mixtures_are_passive(
        params in prop::collection::vec(gen_params(), 1..4),
        weights in prop::array::uniform5(0.01f64..1.0),
    ) {
        let cat = unit_cylinder(1);
        let trunc = FockTruncation::new(&cat, 1, 20).unwrap();
        let u = word(&trunc, &params);
        let mut states = vec![projector(&trunc, 0)];
        for beta in [0.5, 1.0, 2.0, 5.0] {
            states.push(kms_state(&trunc, beta).unwrap().density);
        }
        let total: f64 = weights.iter().sum();
        let mut mix = CMat::zeros(trunc.dim(), trunc.dim());
        for (w, s) in weights.iter().zip(&states) {
            mix += s * c(w / total, 0.0);
        }
        states.push(mix);
        for rho in &states {
            prop_assert!(passivity_functional(&trunc, rho, u.unitary()).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn functional_is_invariant_under_time_translation(params in prop::collection::vec(gen_params(), 1..4), s in -3.0f64..3.0) {
        let cat = unit_cylinder(1);
        let trunc = FockTruncation::new(&cat, 1, 20).unwrap();
        let rho = kms_state(&trunc, 1.0).unwrap().density;
        let u = word(&trunc, &params);
        let moved = u.evolved(&trunc, s).unwrap();
        let a = passivity_functional(&trunc, &rho, u.unitary()).unwrap();
        let b = passivity_functional(&trunc, &rho, moved.unitary()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn work_identity_holds(
        amp in 0.1f64..1.0, carrier in 0.0f64..2.0, phase in 0.0f64..6.28,
        duration in 1.0f64..5.0, mix in 0.0f64..1.0, occupied in 0usize..3,
    ) {
        let cat = unit_cylinder(3);
        let trunc = FockTruncation::new(&cat, 2, 3).unwrap();
        let a0 = trunc.annihilation(0);
        let a1 = trunc.annihilation(1);
        let coupling = a0 + a0.adjoint() + (a1 * a0.adjoint()) * c(mix, 0.0) + (a0 * a1.adjoint()) * c(mix, 0.0);
        prop_assert!(operator_norm(&coupling) > 0.0);
        let proc = CyclicProcess::new(
            duration,
            vec![DriveTerm { envelope: envelope(duration, amp), carrier, phase, coupling }],
        ).unwrap();
        let w = work_done(&trunc, &projector(&trunc, occupied), &proc).unwrap();
        prop_assert!(w.discrepancy <= 1e-6, "{:?}", w);
    }
}
