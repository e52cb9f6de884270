//! Mode foundation, `Q` step function, quiescence and Bochner campaigns.

use std::f64::consts::PI;

use qei_core::mode_catalog::{
    build_cylinder_catalog, build_sl_catalog, orthonormality_residual, symplectic_check, symplectic_form, StaticGeometry,
};
use qei_core::qwei::{
    bochner_checks, default_lambdas, gamma_sigma_estimate, integrated_q, integrated_spectrum, pullback_energy_spectrum,
    q_function, spectrum_support_probe, ModulatedBump, Reference,
};
use qei_core::states::{weyl_operator, FockTruncation};
use qei_core::window::Bump;
use rand_chacha::ChaCha8Rng;

use super::oracle::{closed_form_q, tapered_fft_q};
use super::{c, uniform, CampaignResult};
use crate::config::RunConfig;
use crate::report::{num, Check, Measured, Table};

/// Modes of the numeric catalog compared against the cylinder.
const SL_MODES: usize = 5;
const WEYL_PAIRS: usize = 12;

pub fn foundation(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CampaignResult {
    let tol = cfg.tolerances;
    let (l, m) = (cfg.geometry.circumference, cfg.geometry.m);
    let cyl = build_cylinder_catalog(l, m, cfg.catalog.modes)?;
    let mut checks = vec![
        Check::at_most("cylinder orthonormality residual", Measured::exact(orthonormality_residual(&cyl)), tol.symplectic_analytic),
        Check::at_most("cylinder symplectic residual", Measured::exact(symplectic_check(&cyl)), tol.symplectic_analytic),
    ];

    let flat = StaticGeometry::ultrastatic(l, m, cfg.catalog.grid)?;
    let sl = build_sl_catalog(&flat, SL_MODES.min(cfg.catalog.modes))?;
    let worst = sl
        .omegas()
        .iter()
        .zip(cyl.omegas())
        .map(|(w, e)| ((w - e) / e).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("numeric vs analytic relative frequency error", Measured::exact(worst), tol.sl_frequency));
    checks.push(Check::at_most("numeric orthonormality residual", Measured::exact(orthonormality_residual(&sl)), tol.symplectic_numeric));
    checks.push(Check::at_most("numeric symplectic residual", Measured::exact(symplectic_check(&sl)), tol.symplectic_numeric));

    if !cfg.geometry.is_ultrastatic() {
        let cat = cfg.build_catalog()?;
        checks.push(Check::at_most("configured orthonormality residual", Measured::exact(orthonormality_residual(&cat)), tol.symplectic_numeric));
        checks.push(Check::at_most("configured symplectic residual", Measured::exact(symplectic_check(&cat)), tol.symplectic_numeric));
    }

    // Weyl relation W(u)W(v) = e^{−iσ(u,v)/2} W(u+v) on the occupancy ≤ 3
    // block of a single-mode truncation with n_max = 16.
    let single = build_cylinder_catalog(l, m, 1)?;
    let trunc = FockTruncation::new(&single, 1, 16)?;
    let mut table = Table::new("weyl_relation", &["u_re", "u_im", "v_re", "v_im", "sigma", "block_defect"]);
    let (mut weyl_worst, mut sigma_worst) = (0.0f64, 0.0f64);
    for _ in 0..WEYL_PAIRS {
        let u = [c(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3))];
        let v = [c(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3))];
        let sigma = 2.0 * (u[0].conj() * v[0]).im;
        sigma_worst = sigma_worst.max((symplectic_form(&single, &u, &v, 0.0)? - sigma).abs());
        let lhs = weyl_operator(&trunc, &u)? * weyl_operator(&trunc, &v)? * weyl_operator(&trunc, &[u[0] + v[0]])?.adjoint();
        let phase = qei_core::C64::from_polar(1.0, -sigma / 2.0);
        let mut defect = 0.0f64;
        for r in 0..4 {
            for col in 0..4 {
                let target = if r == col { phase } else { c(0.0, 0.0) };
                defect = defect.max((lhs[(r, col)] - target).norm());
            }
        }
        weyl_worst = weyl_worst.max(defect);
        table.push(vec![num(u[0].re), num(u[0].im), num(v[0].re), num(v[0].im), num(sigma), num(defect)]);
    }
    checks.push(Check::at_most("Weyl relation defect (n_max = 16)", Measured::exact(weyl_worst), tol.weyl));
    checks.push(Check::at_most("symplectic form vs 2 Im(ū v)", Measured::exact(sigma_worst), tol.symplectic_analytic));
    Ok((checks, vec![table]))
}

pub fn q_step(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CampaignResult {
    let tol = cfg.tolerances;
    let (l, m) = (cfg.geometry.circumference, cfg.geometry.m);
    let cyl = build_cylinder_catalog(l, m, cfg.catalog.modes)?;
    let us = [0.5, 1.5, 2.5];
    let mut xs = vec![0.0];
    xs.extend((0..4).map(|_| uniform(rng, 0.0, l)));

    let mut checks = Vec::new();
    let mut table = Table::new("q_step", &["u", "closed_form", "atomic_worst_deviation", "fft_oracle"]);
    let fft = tapered_fft_q(l, m, &us);
    for (&u, &oracle) in us.iter().zip(&fft) {
        let exact = closed_form_q(l, m, u);
        let mut worst = 0.0f64;
        for &x in &xs {
            let spec = pullback_energy_spectrum(&cyl, x)?;
            worst = worst.max((q_function(&spec, u) - exact).abs());
        }
        checks.push(Check::at_most(format!("Q({u}) vs closed form"), Measured::exact(worst), tol.q_exact));
        checks.push(Check::close(format!("Q({u}) vs tapered FFT"), exact, oracle, tol.q_oracle));
        table.push(vec![num(u), num(exact), num(worst), num(oracle)]);
    }

    let total = integrated_spectrum(&cyl, Reference::Ground)?;
    let big_q = integrated_q(&total, 1.5);
    checks.push(Check::close("integrated Q(1.5) vs closed form", big_q, l * closed_form_q(l, m, 1.5), tol.q_exact));
    checks.push(Check::close("integrated Q(1.5) vs tapered FFT", big_q, l * fft[1], tol.q_oracle));

    if l == 2.0 * PI && m == 1.0 {
        let (r2, r5) = (2f64.sqrt(), 5f64.sqrt());
        let pi2 = PI * PI;
        checks.push(Check::close("Q(0.5) = 0", closed_form_q(l, m, 0.5), 0.0, tol.q_exact));
        checks.push(Check::close("Q(1.5) = (1+2√2)/(4π²)", closed_form_q(l, m, 1.5), (1.0 + 2.0 * r2) / (4.0 * pi2), tol.q_exact));
        checks.push(Check::close(
            "Q(2.5) = (1+2√2+2√5)/(4π²)",
            closed_form_q(l, m, 2.5),
            (1.0 + 2.0 * r2 + 2.0 * r5) / (4.0 * pi2),
            tol.q_exact,
        ));
        checks.push(Check::close("integrated Q(1.5) = (1+2√2)/(2π)", big_q, (1.0 + 2.0 * r2) / (2.0 * PI), tol.q_exact));
    }
    Ok((checks, vec![table]))
}

pub fn quiescence(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CampaignResult {
    let tol = cfg.tolerances;
    let cat = cfg.build_catalog()?;
    let total = integrated_spectrum(&cat, Reference::Ground)?;
    let g = Bump::new(0.0, 1.0, 1.0)?;
    let trace = gamma_sigma_estimate(&total, &g, &default_lambdas())?;
    let last_err = *trace.errors.last().unwrap_or(&0.0);
    let rises = trace.values.windows(2).filter(|w| w[1] > w[0] + 1e-15).count();

    let mut table = Table::new("gamma_sigma_trace", &["lambda", "value", "error"]);
    for ((lam, v), e) in trace.lambdas.iter().zip(&trace.values).zip(&trace.errors) {
        table.push(vec![num(*lam), num(*v), num(*e)]);
    }

    let expected_gap = if cfg.geometry.is_ultrastatic() { cfg.geometry.m } else { cat.omegas()[0] };
    let mut checks = vec![
        Check::at_most("final limiting-constant estimate", Measured::new(trace.estimate, last_err), tol.gamma_final),
        Check::close("analytic limit 2π·integrated Q(0+)", trace.bound, 0.0, 0.0),
        Check::count_at_most("increases along the λ sequence", rises, 0),
    ];
    let xs = [0.0, uniform(rng, 0.0, cat.circumference())];
    for x in xs {
        let x = snap(&cat, x);
        let support = spectrum_support_probe(&cat, Reference::Ground, x)?;
        checks.push(Check::close(format!("spectrum support at x = {x:.4} equals the gap"), support, expected_gap, 0.0));
    }
    Ok((checks, vec![table]))
}

/// Numeric catalogs only accept grid points.
fn snap(cat: &qei_core::mode_catalog::ModeCatalog, x: f64) -> f64 {
    match cat.grid_index(x) {
        Ok(_) => x,
        Err(_) => {
            let i = ((x / cat.spacing()).round() as usize) % cat.grid_len().max(1);
            cat.grid_point(i)
        }
    }
}

pub fn bochner(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CampaignResult {
    let tol = cfg.tolerances;
    let cat = cfg.build_catalog()?;
    let x = snap(&cat, uniform(rng, 0.0, cat.circumference()));
    let spec = pullback_energy_spectrum(&cat, x)?;
    let total = integrated_spectrum(&cat, Reference::Ground)?;

    let samples: Vec<ModulatedBump> = (0..cfg.sizes.bochner_samples)
        .map(|_| {
            let bump = Bump::new(uniform(rng, -2.0, 2.0), uniform(rng, 0.2, 3.0), uniform(rng, 0.2, 2.0)).expect("positive width");
            ModulatedBump {
                bump,
                modulation: uniform(rng, -10.0, 10.0),
            }
        })
        .collect();
    let pointwise = bochner_checks(&spec, &samples);
    let integrated = bochner_checks(&total, &samples);
    let nonneg = pointwise.positive_type.iter().filter(|&&v| v >= 0.0).count();

    // Monotonicity of the integrated Q on a fine grid, and left-continuity
    // with the right jump at every atom.
    let top = cat.omegas().last().copied().unwrap_or(0.0) + 1.0;
    let grid: Vec<f64> = (0..=4000).map(|i| -1.0 + (top + 1.0) * i as f64 / 4000.0).collect();
    let values: Vec<f64> = grid.iter().map(|&u| integrated_q(&total, u)).collect();
    let decreases = values.windows(2).filter(|w| w[1] < w[0]).count();
    let eps = tol.left_continuity;
    let (mut left_worst, mut jump_worst) = (0.0f64, 0.0f64);
    for &(z, w) in total.atoms() {
        left_worst = left_worst.max((integrated_q(&total, z) - integrated_q(&total, z - eps)).abs());
        let jump = integrated_q(&total, z + eps) - integrated_q(&total, z);
        jump_worst = jump_worst.max((jump - w / (2.0 * PI * PI)).abs() / (1.0 + w));
    }

    let mut checks = vec![
        Check::count_at_most("negative atoms (pointwise)", pointwise.negative_atoms, 0),
        Check::count_at_most("negative atoms (integrated)", integrated.negative_atoms, 0),
        Check::count_at_least("nonnegative positive-type samples", nonneg, cfg.sizes.bochner_samples),
        Check::count_at_most("decreases of integrated Q", decreases, 0),
        Check::at_most("left-continuity defect at atoms", Measured::exact(left_worst), 1e-15),
        Check::at_most("jump defect at atoms (relative)", Measured::exact(jump_worst), 1e-12),
    ];
    let mut table = Table::new("cumulative_mass", &["u", "integrated_q"]);
    for (u, v) in grid.iter().zip(&values).step_by(40) {
        table.push(vec![num(*u), num(*v)]);
    }
    match integrated.growth {
        Some(fit) => checks.push(Check::close("growth exponent over [10, 100]", fit.slope, 2.0, tol.growth_exponent)),
        None => checks.push(Check::count_at_least("growth fit available", 0, 1)),
    }
    if let Some(min) = pointwise.positive_type.iter().cloned().reduce(f64::min) {
        checks.push(Check::at_least("smallest positive-type sample", Measured::exact(min), 0.0));
    }
    Ok((checks, vec![table]))
}
