//! Tabulations behind the `modes`, `twopoint`, `energy` and `qwei`
//! subcommands, each with the checks that certify it.

use qei_core::energy_density::{energy_density_field, smeared_energy};
use qei_core::mode_catalog::{orthonormality_residual, symplectic_check, ModeCatalog};
use qei_core::qwei::{integrated_q, integrated_spectrum, pullback_energy_spectrum, q_function, verify_static_qwei, Reference};
use qei_core::states::{normal_ordered_two_point, two_point, StateSpec, TwoPointData};
use qei_core::window::WindowSpectrum;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{num, Check, Measured, Table};

pub type Tabulation = (Vec<Check>, Vec<Table>);

/// Positions usable with `cat`: numeric catalogs need grid points.
fn snap(cat: &ModeCatalog, x: f64) -> f64 {
    if cat.grid_index(x).is_ok() || cat.wavenumbers().is_some() {
        return x;
    }
    let n = cat.grid_len();
    let i = ((x.rem_euclid(cat.circumference()) / cat.spacing()).round() as usize) % n;
    cat.grid_point(i)
}

fn positions(cfg: &RunConfig, cat: &ModeCatalog) -> Vec<f64> {
    let xs = if cfg.positions.is_empty() { vec![0.0] } else { cfg.positions.clone() };
    xs.into_iter().map(|x| snap(cat, x)).collect()
}

fn label(spec: &StateSpec) -> Result<String, CliError> {
    serde_json::to_string(&crate::config::StateConfig::from_spec(spec)).map_err(|e| CliError::Config(e.to_string()))
}

/// Catalog CSV `(j, n, omega, re_u_i..., im_u_i...)` on the `G` grid.
pub fn modes(cfg: &RunConfig, cat: &ModeCatalog) -> Result<Tabulation, CliError> {
    let numeric = cat.wavenumbers().is_none();
    let grid: Vec<f64> = if numeric {
        cat.grid_points()
    } else {
        let g = cfg.catalog.grid;
        (0..g).map(|i| cat.circumference() * i as f64 / g as f64).collect()
    };
    let mut header = vec!["j".to_string(), "n".to_string(), "omega".to_string()];
    header.extend((0..grid.len()).map(|i| format!("re_u_{i}")));
    header.extend((0..grid.len()).map(|i| format!("im_u_{i}")));
    let mut table = Table::with_header("modes", header);
    for j in 0..cat.len() {
        let u = grid.iter().map(|&x| cat.spatial_jet(j, x).map(|s| s.u)).collect::<Result<Vec<_>, _>>()?;
        let n = cat.wavenumbers().map(|w| w[j].to_string()).unwrap_or_default();
        let mut row = vec![j.to_string(), n, num(cat.omegas()[j])];
        row.extend(u.iter().map(|z| num(z.re)));
        row.extend(u.iter().map(|z| num(z.im)));
        table.push(row);
    }
    let limit = if numeric {
        cfg.tolerances.symplectic_numeric
    } else {
        cfg.tolerances.symplectic_analytic
    };
    let unsorted = cat.omegas().windows(2).filter(|w| w[1] < w[0]).count();
    let checks = vec![
        Check::at_most("orthonormality residual", Measured::exact(orthonormality_residual(cat)), limit),
        Check::at_most("symplectic residual", Measured::exact(symplectic_check(cat)), limit),
        Check::at_most("eigen-residual", Measured::exact(cat.eigen_residual()), qei_core::mode_catalog::SL_RESIDUAL_TOLERANCE),
        Check::count_at_most("unsorted frequencies", unsorted, 0),
    ];
    Ok((checks, vec![table]))
}

const TWO_POINT_TIMES: [f64; 3] = [0.0, 0.5, 1.0];
const TWO_POINT_SAMPLES: usize = 64;

/// `W(p, q)` and its normal-ordered part for `p = (0, 0)` and `q` on a grid.
pub fn twopoint(cat: &ModeCatalog, states: &[StateSpec]) -> Result<Tabulation, CliError> {
    let l = cat.circumference();
    let xs: Vec<f64> = (0..TWO_POINT_SAMPLES).map(|i| snap(cat, l * i as f64 / TWO_POINT_SAMPLES as f64)).collect();
    let mut table = Table::new("twopoint", &["state", "t", "x", "re", "im", "normal_re", "normal_im"]);
    let (mut hermiticity, mut min_cov) = (0.0f64, f64::INFINITY);
    for s in states {
        let m = s.moments(cat)?;
        let name = label(s)?;
        for &t in &TWO_POINT_TIMES {
            for &x in &xs {
                if t == 0.0 && x == 0.0 {
                    continue;
                }
                let (p, q) = ((0.0, 0.0), (t, x));
                let w = two_point(&m, cat, p, q)?;
                let back = two_point(&m, cat, q, p)?;
                hermiticity = hermiticity.max((w - back.conj()).norm() / (1.0 + w.norm()));
                let n = normal_ordered_two_point(&m, cat, p, q)?;
                table.push(vec![name.clone(), num(t), num(x), num(w.re), num(w.im), num(n.re), num(n.im)]);
            }
        }
        if let Ok(d) = TwoPointData::from_spec(s, cat) {
            min_cov = min_cov.min(d.covariance_min_eigenvalue());
        }
    }
    let mut checks = vec![Check::at_most("hermiticity defect W(p,q) − conj W(q,p)", Measured::exact(hermiticity), 1e-12)];
    if min_cov.is_finite() {
        checks.push(Check::at_least("smallest covariance eigenvalue", Measured::exact(min_cov), -1e-12));
    }
    Ok((checks, vec![table]))
}

const ENERGY_TIMES: usize = 128;

/// Energy density on a `(t, x)` grid and smeared energies per window.
pub fn energy(cfg: &RunConfig, cat: &ModeCatalog, states: &[StateSpec]) -> Result<Tabulation, CliError> {
    let xs = positions(cfg, cat);
    let times: Vec<f64> = (0..ENERGY_TIMES).map(|i| -4.0 + 8.0 * i as f64 / ENERGY_TIMES as f64).collect();
    let mut density = Table::new("energy_density", &["state", "t", "x", "rho", "cutoff_tail"]);
    let mut smeared = Table::new("smeared_energy", &["state", "window_center", "window_half_width", "x", "value", "error"]);
    let mut worst_err = 0.0f64;
    for s in states {
        let name = label(s)?;
        let field = energy_density_field(s, cat, &times, &xs)?;
        for (t, row) in field.times.iter().zip(&field.values) {
            for (x, rho) in field.positions.iter().zip(row) {
                density.push(vec![name.clone(), num(*t), num(*x), num(*rho), num(field.tail_bound)]);
            }
        }
        let m = s.moments(cat)?;
        for (w, g) in cfg.windows.iter().zip(cfg.bumps()) {
            for &x in &xs {
                let v = smeared_energy(&m, cat, &g, x)?;
                worst_err = worst_err.max(v.error);
                smeared.push(vec![name.clone(), num(w.center), num(w.width), num(x), num(v.value), num(v.error)]);
            }
        }
    }
    let checks = vec![Check::at_most("largest smeared-energy quadrature error", Measured::exact(worst_err), cfg.tolerances.tol_num_max)];
    Ok((checks, vec![density, smeared]))
}

/// `Q(u; x)` and integrated `Q(u)` tables and static QWEI margins of the
/// configured states, windows and positions.
pub fn qwei(cfg: &RunConfig, cat: &ModeCatalog, states: &[StateSpec]) -> Result<Tabulation, CliError> {
    let xs = positions(cfg, cat);
    let total = integrated_spectrum(cat, Reference::Ground)?;
    let spectra = xs.iter().map(|&x| pullback_energy_spectrum(cat, x)).collect::<Result<Vec<_>, _>>()?;
    let mut header = vec!["u".to_string(), "integrated_q".to_string()];
    header.extend(xs.iter().map(|x| format!("q_at_{}", num(*x))));
    let mut q_table = Table::with_header("q_function", header);
    for i in 0..=440 {
        let u = -2.0 + 0.05 * i as f64;
        let mut row = vec![num(u), num(integrated_q(&total, u))];
        row.extend(spectra.iter().map(|s| num(q_function(s, u))));
        q_table.push(row);
    }

    let windows: Vec<WindowSpectrum> = cfg.bumps().into_par_iter().map(WindowSpectrum::new).collect();
    let mut margins = Table::new(
        "qwei_margins",
        &["state", "window_center", "window_half_width", "x", "lhs", "lhs_error", "q", "q_error", "margin", "tol_num", "passed"],
    );
    let (mut failures, mut max_tol) = (0usize, 0.0f64);
    for s in states {
        let name = label(s)?;
        for (w, spec) in cfg.windows.iter().zip(&windows) {
            for &x in &xs {
                let r = verify_static_qwei(s, cat, spec, x)?;
                failures += usize::from(!r.passed);
                max_tol = max_tol.max(r.tol_num);
                margins.push(vec![
                    name.clone(),
                    num(w.center),
                    num(w.width),
                    num(x),
                    num(r.lhs.value),
                    num(r.lhs.error),
                    num(r.q.value),
                    num(r.q.quadrature_error),
                    num(r.margin),
                    num(r.tol_num),
                    r.passed.to_string(),
                ]);
            }
        }
    }
    let checks = vec![
        Check::count_at_most("margins below −tol_num", failures, 0),
        Check::at_most("largest tol_num", Measured::exact(max_tol), cfg.tolerances.tol_num_max),
    ];
    Ok((checks, vec![q_table, margins]))
}
