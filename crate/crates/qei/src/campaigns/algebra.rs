//! Passivity, work identity and proof-chain campaigns on truncations.

use qei_core::passivity::{
    default_search_family, kms_state, passive_search, passivity_functional, work_done, CyclicProcess, DriveTerm,
};
use qei_core::qwei::{gamma_sigma_estimate, integrated_spectrum, Reference};
use qei_core::states::{weyl_operator, FockTruncation};
use qei_core::window::Bump;
use qei_core::{CMat, CVec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{c, projector, random_word_params, uniform, word_unitary, CampaignResult, GeneratorParams};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{num, Check, Measured, Table};

const BETAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const SEARCH_SWEEPS: usize = 20;

pub fn passivity(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CampaignResult {
    let tol = cfg.tolerances;
    let cat = cfg.build_catalog()?;
    let pt = cfg.passivity_truncation;
    let trunc = FockTruncation::new(&cat, pt.modes, pt.n_max)?;
    let dim = trunc.dim();

    let mut labels = vec!["vacuum".to_string()];
    let mut states = vec![projector(&trunc, 0)];
    let mut worst_top = 0.0f64;
    for beta in BETAS {
        let k = kms_state(&trunc, beta)?;
        worst_top = worst_top.max(k.top_level_probability);
        labels.push(format!("kms beta={beta}"));
        states.push(k.density);
    }
    let basic = states.len();
    for i in 0..cfg.sizes.passivity_mixtures {
        let w: Vec<f64> = (0..basic).map(|_| uniform(rng, 0.01, 1.0)).collect();
        let total: f64 = w.iter().sum();
        let mut mix = CMat::zeros(dim, dim);
        for (wk, s) in w.iter().zip(&states[..basic]) {
            mix += s * c(wk / total, 0.0);
        }
        labels.push(format!("mixture {i}"));
        states.push(mix);
    }

    let words: Vec<Vec<GeneratorParams>> =
        (0..cfg.sizes.passivity_words).map(|_| random_word_params(rng, trunc.modes().len(), None)).collect();
    let per_word = words
        .par_iter()
        .map(|p| {
            let u = word_unitary(&trunc, p)?;
            states
                .iter()
                .map(|rho| Ok(passivity_functional(&trunc, rho, u.unitary())?))
                .collect::<Result<Vec<f64>, CliError>>()
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut mins = vec![f64::INFINITY; states.len()];
    for row in &per_word {
        for (m, v) in mins.iter_mut().zip(row) {
            *m = m.min(*v);
        }
    }
    let worst = mins.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut table = Table::new("passivity_minima", &["state", "words", "min_functional"]);
    for (l, m) in labels.iter().zip(&mins) {
        table.push(vec![l.clone(), per_word.len().to_string(), num(*m)]);
    }

    // Witness of non-passivity for the first excited eigenstate of the
    // lowest truncated mode.
    let excited = trunc.index_of(&{
        let mut occ = vec![0; trunc.modes().len()];
        occ[0] = 1;
        occ
    })?;
    let omega = trunc.omegas()[0];
    let search = passive_search(&trunc, &projector(&trunc, excited), &default_search_family(&trunc), SEARCH_SWEEPS, tol.passivity)?;

    // Displacement benchmark: e^{iΦ(c)} = D(α) with α = ic, α = 0.5.
    let single = FockTruncation::with_modes(&cat, &[0], 16, qei_core::states::DEFAULT_DIMENSION_CAP)?;
    let d = weyl_operator(&single, &[c(0.0, -0.5)])?;
    let injected = passivity_functional(&single, &projector(&single, 0), &d)?;

    let checks = vec![
        Check::count_at_least("states", states.len(), 1 + BETAS.len() + cfg.sizes.passivity_mixtures),
        Check::count_at_least("words", per_word.len(), cfg.sizes.passivity_words),
        Check::at_least("smallest functional over states and words", Measured::new(worst, worst_top), -tol.passivity),
        Check::at_most("excited-state witness", Measured::exact(search.infimum), -omega / 2.0),
        Check::close("displacement benchmark |α|²ω", injected, 0.25 * cat.omegas()[0], tol.displacement),
    ];
    Ok((checks, vec![table]))
}

struct ProcessSpec {
    duration: f64,
    terms: Vec<(f64, f64, f64, [f64; 3])>,
    mixture: Vec<(f64, CVec)>,
}

fn random_process(rng: &mut ChaCha8Rng, trunc: &FockTruncation) -> ProcessSpec {
    let terms = (0..rng.gen_range(1..=2))
        .map(|_| {
            (
                uniform(rng, 0.1, 0.8),
                uniform(rng, 0.0, 2.0),
                uniform(rng, 0.0, std::f64::consts::TAU),
                [uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)],
            )
        })
        .collect();
    let mixture = (0..rng.gen_range(1..=3))
        .map(|_| {
            let mut v = CVec::zeros(trunc.dim());
            for idx in 0..trunc.dim() {
                if trunc.occupations(idx).iter().sum::<usize>() <= 2 {
                    v[idx] = c(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
                }
            }
            let n = v.norm();
            (uniform(rng, 0.1, 1.0), v / c(n, 0.0))
        })
        .collect();
    ProcessSpec {
        duration: uniform(rng, 1.0, 4.0),
        terms,
        mixture,
    }
}

/// Coupling `x₀·(a₀+a₀†) + x₁·i(a_last† − a_last) + x₂·(a₀†a_last + h.c.)`.
fn coupling(trunc: &FockTruncation, x: [f64; 3]) -> CMat {
    let a0 = trunc.annihilation(0);
    let last = trunc.annihilation(trunc.modes().len() - 1);
    let q = a0 + a0.adjoint();
    let p = (last.adjoint() - last) * c(0.0, 1.0);
    let hop = a0.adjoint() * last;
    let hop = &hop + hop.adjoint();
    q * c(x[0], 0.0) + p * c(x[1], 0.0) + hop * c(x[2], 0.0)
}

fn build_process(trunc: &FockTruncation, spec: &ProcessSpec) -> Result<CyclicProcess, CliError> {
    let t = spec.duration;
    let terms = spec
        .terms
        .iter()
        .map(|&(amp, carrier, phase, x)| {
            Ok(DriveTerm {
                envelope: Bump::new(t / 2.0, t / 2.0, amp)?,
                carrier,
                phase,
                coupling: coupling(trunc, x),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CyclicProcess::new(t, terms)?)
}

fn mixture_density(trunc: &FockTruncation, mixture: &[(f64, CVec)]) -> CMat {
    let total: f64 = mixture.iter().map(|m| m.0).sum();
    let mut rho = CMat::zeros(trunc.dim(), trunc.dim());
    for (w, v) in mixture {
        rho += (v * v.adjoint()) * c(w / total, 0.0);
    }
    rho
}

pub fn work_identity(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CampaignResult {
    let tol = cfg.tolerances;
    let cat = cfg.build_catalog()?;
    let trunc = FockTruncation::new(&cat, cfg.truncation.modes, cfg.truncation.n_max)?;
    let specs: Vec<ProcessSpec> = (0..cfg.sizes.work_processes).map(|_| random_process(rng, &trunc)).collect();
    let vacuum = projector(&trunc, 0);
    let reports = specs
        .par_iter()
        .map(|s| {
            let proc = build_process(&trunc, s)?;
            let ground = work_done(&trunc, &vacuum, &proc)?;
            let mixed = work_done(&trunc, &mixture_density(&trunc, &s.mixture), &proc)?;
            Ok((ground, mixed))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut table = Table::new(
        "work_identity",
        &["process", "state", "integral", "algebraic", "discrepancy", "steps", "halving_error", "norm_drift"],
    );
    let (mut worst_gap, mut worst_halving, mut ground_min) = (0.0f64, 0.0f64, f64::INFINITY);
    for (i, (g, m)) in reports.iter().enumerate() {
        for (label, r) in [("ground", g), ("mixture", m)] {
            worst_gap = worst_gap.max(r.discrepancy);
            worst_halving = worst_halving.max(r.halving_error);
            table.push(vec![
                i.to_string(),
                label.into(),
                num(r.integral),
                num(r.algebraic),
                num(r.discrepancy),
                r.steps.to_string(),
                num(r.halving_error),
                num(r.norm_drift),
            ]);
        }
        ground_min = ground_min.min(g.integral.min(g.algebraic));
    }
    let mut idle = 0.0f64;
    let mut idle_states = vec![vacuum];
    idle_states.extend(specs.first().map(|s| mixture_density(&trunc, &s.mixture)));
    for rho in &idle_states {
        let r = work_done(&trunc, rho, &CyclicProcess::idle(1.0)?)?;
        idle = idle.max(r.integral.abs()).max(r.algebraic.abs());
    }
    let checks = vec![
        Check::count_at_least("processes", reports.len(), cfg.sizes.work_processes),
        Check::at_most("largest |integral − algebraic|", Measured::new(worst_gap, worst_halving), tol.work),
        Check::close("idle process work", idle, 0.0, 0.0),
        Check::at_least("smallest ground-state work", Measured::new(ground_min, worst_halving), -tol.ground_work),
    ];
    Ok((checks, vec![table]))
}

/// Half-widths of the proof-chain windows.
const CHAIN_WIDTHS: [f64; 5] = [0.4, 0.7, 1.0, 1.5, 2.5];

pub fn proof_chain(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CampaignResult {
    let cat = cfg.build_catalog()?;
    let trunc = FockTruncation::new(&cat, cfg.truncation.modes, cfg.truncation.n_max)?;
    let total = integrated_spectrum(&cat, Reference::Ground)?;
    let windows: Vec<Bump> = CHAIN_WIDTHS.iter().map(|&w| Bump::new(0.0, w, 1.0)).collect::<Result<_, _>>()?;
    // ∫ q(g;x) dμ / ‖g²‖ is the λ = 1 entry of the limiting-constant trace.
    let bounds = windows
        .par_iter()
        .map(|g| {
            let t = gamma_sigma_estimate(&total, g, &[1.0])?;
            Ok((t.values[0], t.errors[0]))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let trials: Vec<(usize, Vec<GeneratorParams>)> = (0..windows.len())
        .flat_map(|w| (0..cfg.sizes.chain_words).map(move |_| w))
        .map(|w| (w, random_word_params(rng, trunc.modes().len(), Some(windows[w]))))
        .collect();
    let vacuum = projector(&trunc, 0);
    let lhs = trials
        .par_iter()
        .map(|(_, p)| Ok(passivity_functional(&trunc, &vacuum, word_unitary(&trunc, p)?.unitary())?))
        .collect::<Result<Vec<f64>, CliError>>()?;

    let mut table = Table::new("proof_chain", &["window_half_width", "words", "bound", "bound_error", "min_lhs", "min_slack"]);
    let (mut worst_slack, mut worst_err, mut min_lhs) = (f64::INFINITY, 0.0, f64::INFINITY);
    for (w, &(bound, err)) in bounds.iter().enumerate() {
        let vals: Vec<f64> = trials.iter().zip(&lhs).filter(|(t, _)| t.0 == w).map(|(_, v)| *v).collect();
        let low = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let slack = low + bound;
        if slack < worst_slack {
            worst_slack = slack;
            worst_err = err;
        }
        min_lhs = min_lhs.min(low);
        table.push(vec![num(CHAIN_WIDTHS[w]), vals.len().to_string(), num(bound), num(err), num(low), num(slack)]);
    }
    let checks = vec![
        Check::count_at_least("word–window pairs", lhs.len(), cfg.sizes.chain_words * CHAIN_WIDTHS.len()),
        Check::at_least("smallest slack of the bound", Measured::new(worst_slack, worst_err), 0.0),
        Check::at_least("smallest ground-state functional", Measured::exact(min_lhs), -cfg.tolerances.passivity),
    ];
    Ok((checks, vec![table]))
}
