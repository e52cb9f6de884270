//! Derivations, unitary words, cyclic processes and work on truncated Fock
//! spaces.
//!
//! The dynamics is `α_t = Ad e^{iHt}` with the diagonal truncated
//! Hamiltonian, so `δ(A) = i[H, A]` is exact. A state `ρ` is passive when
//! `(1/i) Tr[ρ U† δ(U)] = Tr[ρ U†HU] − Tr[ρH] ≥ 0` for every unitary `U`.

use alloc::{string::ToString, vec::Vec};
use num_traits::Float;

use crate::{
    error::invalid,
    linalg,
    states::{smeared_field, FockTruncation},
    window::Bump,
    CMat, Error, Result, C64,
};

/// `δ(A) = i[H, A]`.
pub fn delta_of(trunc: &FockTruncation, a: &CMat) -> CMat {
    let e = trunc.energies();
    CMat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * C64::new(0.0, e[r] - e[c]))
}

/// `U = e^{iA_1} ⋯ e^{iA_N}` with hermitian generators.
#[derive(Clone, Debug)]
pub struct UnitaryWord {
    generators: Vec<CMat>,
    unitary: CMat,
}

impl UnitaryWord {
    pub fn new(dim: usize, generators: Vec<CMat>) -> Result<Self> {
        let mut u = CMat::identity(dim, dim);
        for (k, a) in generators.iter().enumerate() {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(invalid!("generator {k} has shape {}x{}, expected {dim}x{dim}", a.nrows(), a.ncols()));
            }
            if linalg::hermiticity_defect(a) > 1e-10 * (1.0 + a.norm()) {
                return Err(invalid!("generator {k} is not hermitian"));
            }
            u *= linalg::expi_hermitian(a);
        }
        Ok(Self { generators, unitary: u })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            generators: Vec::new(),
            unitary: CMat::identity(dim, dim),
        }
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn unitary(&self) -> &CMat {
        &self.unitary
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.unitary)
    }

    /// Word with every generator conjugated by `e^{iHs}`.
    pub fn evolved(&self, trunc: &FockTruncation, s: f64) -> Result<Self> {
        let gens = self
            .generators
            .iter()
            .map(|a| linalg::heisenberg_diag(trunc.energies(), a, s))
            .collect();
        Self::new(trunc.dim(), gens)
    }
}

/// Imaginary residue above which the passivity functional signals a bug.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-9;

/// `(1/i) Tr[ρ U† δ(U)]`, checked to be real.
pub fn passivity_functional(trunc: &FockTruncation, rho: &CMat, u: &CMat) -> Result<f64> {
    if rho.nrows() != trunc.dim() || u.nrows() != trunc.dim() {
        return Err(Error::Mismatch(alloc::format!(
            "state or unitary does not match truncation dimension {}",
            trunc.dim()
        )));
    }
    let v = linalg::trace_product(rho, &(u.adjoint() * delta_of(trunc, u))) / C64::new(0.0, 1.0);
    let scale = 1.0 + v.re.abs();
    if v.im.abs() > IMAGINARY_RESIDUE_LIMIT * scale {
        return Err(Error::Inconsistent(alloc::format!(
            "passivity functional has imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// Thermal state of a truncation with its truncation proxy.
#[derive(Clone, Debug)]
pub struct KmsState {
    pub density: CMat,
    /// Probability of the top occupancy level.
    pub top_level_probability: f64,
}

/// Largest admissible top-level probability of a truncated thermal state.
pub const KMS_TRUNCATION_LIMIT: f64 = 1e-4;

pub fn kms_state(trunc: &FockTruncation, beta: f64) -> Result<KmsState> {
    let density = trunc.kms_density(beta)?;
    let top = trunc.top_level_probability(&density);
    if top > KMS_TRUNCATION_LIMIT {
        return Err(Error::Truncation {
            proxy: top,
            limit: KMS_TRUNCATION_LIMIT,
        });
    }
    Ok(KmsState {
        density,
        top_level_probability: top,
    })
}

/// One term `f(t) cos(νt + φ) C` of a driving Hamiltonian.
#[derive(Clone, Debug)]
pub struct DriveTerm {
    pub envelope: Bump,
    pub carrier: f64,
    pub phase: f64,
    pub coupling: CMat,
}

/// External driving `H_t = Σ_k f_k(t) cos(ν_k t + φ_k) C_k`, vanishing
/// outside `[0, T]`.
#[derive(Clone, Debug)]
pub struct CyclicProcess {
    duration: f64,
    terms: Vec<DriveTerm>,
}

impl CyclicProcess {
    pub fn new(duration: f64, terms: Vec<DriveTerm>) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(invalid!("process duration must be positive, got {duration}"));
        }
        for (k, term) in terms.iter().enumerate() {
            let (lo, hi) = term.envelope.support();
            if lo < -1e-12 || hi > duration + 1e-12 {
                return Err(invalid!("envelope {k} support [{lo}, {hi}] leaves [0, {duration}]"));
            }
            if linalg::hermiticity_defect(&term.coupling) > 1e-12 * (1.0 + term.coupling.norm()) {
                return Err(invalid!("coupling {k} is not hermitian"));
            }
        }
        Ok(Self { duration, terms })
    }

    /// The trivial process `H_t ≡ 0`.
    pub fn idle(duration: f64) -> Result<Self> {
        Self::new(duration, Vec::new())
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn terms(&self) -> &[DriveTerm] {
        &self.terms
    }

    fn dim_check(&self, dim: usize) -> Result<()> {
        for term in &self.terms {
            if term.coupling.nrows() != dim {
                return Err(Error::Mismatch(alloc::format!(
                    "coupling of dimension {} on truncation of dimension {dim}",
                    term.coupling.nrows()
                )));
            }
        }
        Ok(())
    }

    /// `H_t`.
    pub fn hamiltonian(&self, dim: usize, t: f64) -> CMat {
        let mut h = CMat::zeros(dim, dim);
        for term in &self.terms {
            let f = term.envelope.eval(t) * (term.carrier * t + term.phase).cos();
            if f != 0.0 {
                h += &term.coupling * C64::new(f, 0.0);
            }
        }
        h
    }

    /// `dH_t/dt`, differentiating the envelopes analytically.
    pub fn hamiltonian_rate(&self, dim: usize, t: f64) -> CMat {
        let mut h = CMat::zeros(dim, dim);
        for term in &self.terms {
            let arg = term.carrier * t + term.phase;
            let f = term.envelope.derivative(t) * arg.cos() - term.envelope.eval(t) * term.carrier * arg.sin();
            if f != 0.0 {
                h += &term.coupling * C64::new(f, 0.0);
            }
        }
        h
    }

    /// Upper bound of `sup_t ‖H_t‖`.
    pub fn norm_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.envelope.amplitude.abs() * linalg::operator_norm(&t.coupling))
            .sum()
    }
}

/// Integrator settings for [`evolve_cyclic`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    /// Step-halving acceptance threshold on `‖U_T^{(h)} − U_T^{(h/2)}‖`.
    pub tolerance: f64,
    /// Largest admissible `‖H‖·h`.
    pub max_norm_step: f64,
    pub max_steps: usize,
    /// Largest admissible polar projection distance.
    pub projection_limit: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_norm_step: 0.05,
            max_steps: 1 << 20,
            projection_limit: 1e-6,
        }
    }
}

/// Accepted solution of the interaction-picture propagator equation.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub u_final: CMat,
    /// `(t, U_t)` on the accepted grid, at most 65 evenly spaced samples.
    pub trajectory: Vec<(f64, CMat)>,
    pub steps: usize,
    /// Last step-halving disagreement.
    pub halving_error: f64,
    /// `‖U†U − 𝟙‖` before projection.
    pub unitarity_drift: f64,
    /// `‖W − U‖` of the polar projection.
    pub projection_distance: f64,
}

/// Nonzero entries of each coupling, applied without forming `H_t`.
struct SparseDrive {
    entries: Vec<Vec<(usize, usize, C64)>>,
}

impl SparseDrive {
    fn new(proc: &CyclicProcess) -> Self {
        let entries = proc
            .terms()
            .iter()
            .map(|t| {
                let c = &t.coupling;
                let mut v = Vec::new();
                for col in 0..c.ncols() {
                    for row in 0..c.nrows() {
                        let z = c[(row, col)];
                        if z != C64::new(0.0, 0.0) {
                            v.push((row, col, z));
                        }
                    }
                }
                v
            })
            .collect();
        Self { entries }
    }
}

/// `f_k(t) cos(ν_k t + φ_k)` for every term.
fn drive_coefficients(proc: &CyclicProcess, t: f64) -> Vec<f64> {
    proc.terms()
        .iter()
        .map(|term| term.envelope.eval(t) * (term.carrier * t + term.phase).cos())
        .collect()
}

/// Time derivatives of [`drive_coefficients`].
fn drive_rates(proc: &CyclicProcess, t: f64) -> Vec<f64> {
    proc.terms()
        .iter()
        .map(|term| {
            let arg = term.carrier * t + term.phase;
            term.envelope.derivative(t) * arg.cos() - term.envelope.eval(t) * term.carrier * arg.sin()
        })
        .collect()
}

/// `e^{−iHt} Ψ` for diagonal `H`.
fn rotate(e: &[f64], t: f64, psi: &CMat) -> CMat {
    let mut y = psi.clone();
    for (r, &er) in e.iter().enumerate() {
        let ph = C64::from_polar(1.0, -er * t);
        y.row_mut(r).iter_mut().for_each(|v| *v *= ph);
    }
    y
}

/// `−i α_t(H_t) Ψ = −i e^{iHt} H_t e^{−iHt} Ψ`.
fn interaction_apply(e: &[f64], drive: &SparseDrive, coeffs: &[f64], t: f64, psi: &CMat) -> CMat {
    let y = rotate(e, t, psi);
    let mut z = CMat::zeros(psi.nrows(), psi.ncols());
    for (entries, &f) in drive.entries.iter().zip(coeffs) {
        if f == 0.0 {
            continue;
        }
        for &(r, c, v) in entries {
            let fv = v * f;
            for k in 0..psi.ncols() {
                z[(r, k)] += fv * y[(c, k)];
            }
        }
    }
    for (r, &er) in e.iter().enumerate() {
        let ph = C64::from_polar(1.0, er * t) * C64::new(0.0, -1.0);
        z.row_mut(r).iter_mut().for_each(|v| *v *= ph);
    }
    z
}

/// `tr(Ψ† α_t(dH_t/dt) Ψ)`.
fn interaction_power(e: &[f64], drive: &SparseDrive, rates: &[f64], t: f64, psi: &CMat) -> f64 {
    let y = rotate(e, t, psi);
    let mut acc = C64::new(0.0, 0.0);
    for (entries, &f) in drive.entries.iter().zip(rates) {
        if f == 0.0 {
            continue;
        }
        for &(r, c, v) in entries {
            let fv = v * f;
            for k in 0..psi.ncols() {
                acc += y[(r, k)].conj() * fv * y[(c, k)];
            }
        }
    }
    acc.re
}

struct Run {
    psi: CMat,
    work: f64,
    samples: Vec<(f64, CMat)>,
}

/// Classical RK4 for `dΨ/dt = −i α_t(H_t) Ψ`, optionally integrating the
/// power `tr(Ψ_t† α_t(dH_t/dt) Ψ_t)` with the same stages.
fn rk4_run(
    trunc: &FockTruncation,
    proc: &CyclicProcess,
    drive: &SparseDrive,
    psi0: &CMat,
    with_work: bool,
    steps: usize,
    keep: usize,
) -> Run {
    let e = trunc.energies();
    let h = proc.duration / steps as f64;
    let c = |v: f64| C64::new(v, 0.0);
    let mut psi = psi0.clone();
    let mut work = 0.0;
    let stride = (steps / keep.max(1)).max(1);
    let mut samples = Vec::new();
    if keep > 0 {
        samples.push((0.0, psi.clone()));
    }
    let mut f_start = drive_coefficients(proc, 0.0);
    for n in 0..steps {
        let t = n as f64 * h;
        let tm = t + 0.5 * h;
        let f_mid = drive_coefficients(proc, tm);
        let f_end = drive_coefficients(proc, t + h);
        let k1 = interaction_apply(e, drive, &f_start, t, &psi);
        let p2 = &psi + &k1 * c(0.5 * h);
        let k2 = interaction_apply(e, drive, &f_mid, tm, &p2);
        let p3 = &psi + &k2 * c(0.5 * h);
        let k3 = interaction_apply(e, drive, &f_mid, tm, &p3);
        let p4 = &psi + &k3 * c(h);
        let k4 = interaction_apply(e, drive, &f_end, t + h, &p4);
        if with_work {
            let r_mid = drive_rates(proc, tm);
            work += h / 6.0
                * (interaction_power(e, drive, &drive_rates(proc, t), t, &psi)
                    + 2.0 * interaction_power(e, drive, &r_mid, tm, &p2)
                    + 2.0 * interaction_power(e, drive, &r_mid, tm, &p3)
                    + interaction_power(e, drive, &drive_rates(proc, t + h), t + h, &p4));
        }
        psi += (k1 + (k2 + k3) * c(2.0) + k4) * c(h / 6.0);
        f_start = f_end;
        if keep > 0 && (n + 1) % stride == 0 {
            samples.push(((n + 1) as f64 * h, psi.clone()));
        }
    }
    Run { psi, work, samples }
}

/// Step-halving driver: doubles the step count from the `‖H‖·h` bound until
/// two successive runs agree to the tolerance.
fn evolve_block(
    trunc: &FockTruncation,
    proc: &CyclicProcess,
    psi0: &CMat,
    with_work: bool,
    keep: usize,
    opts: &IntegratorOptions,
) -> Result<(Run, usize, f64)> {
    proc.dim_check(trunc.dim())?;
    // The interaction picture adds oscillations up to the spread of H.
    let e = trunc.energies();
    let spread = e.iter().fold(0.0f64, |a, &b| a.max(b)) - e.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let carrier = proc.terms().iter().map(|t| t.carrier.abs()).fold(0.0, f64::max);
    let rate = proc.norm_bound() + spread + carrier;
    let mut steps = ((proc.duration() * rate / opts.max_norm_step).ceil() as usize).max(16);
    let drive = SparseDrive::new(proc);
    let mut coarse = rk4_run(trunc, proc, &drive, psi0, with_work, steps, keep);
    loop {
        if 2 * steps > opts.max_steps {
            return Err(Error::Integrator(alloc::format!(
                "step halving did not reach {:e} within {} steps",
                opts.tolerance,
                opts.max_steps
            )));
        }
        steps *= 2;
        let fine = rk4_run(trunc, proc, &drive, psi0, with_work, steps, keep);
        let diff = (&fine.psi - &coarse.psi).norm().max((fine.work - coarse.work).abs());
        if diff <= opts.tolerance {
            return Ok((fine, steps, diff));
        }
        coarse = fine;
    }
}

/// Integrates `dU_t/dt = −i α_t(H_t) U_t`, `U_0 = 𝟙`, with classical RK4 and
/// step halving; the accepted `U_T` is projected onto the unitary group.
pub fn evolve_cyclic_with(trunc: &FockTruncation, proc: &CyclicProcess, opts: &IntegratorOptions) -> Result<Evolution> {
    proc.dim_check(trunc.dim())?;
    let dim = trunc.dim();
    if proc.terms().is_empty() {
        return Ok(Evolution {
            u_final: CMat::identity(dim, dim),
            trajectory: alloc::vec![(0.0, CMat::identity(dim, dim)), (proc.duration(), CMat::identity(dim, dim))],
            steps: 0,
            halving_error: 0.0,
            unitarity_drift: 0.0,
            projection_distance: 0.0,
        });
    }
    let (run, steps, err) = evolve_block(trunc, proc, &CMat::identity(dim, dim), false, 64, opts)?;
    let drift = linalg::unitarity_defect(&run.psi);
    let (w, dist) = linalg::polar_projection(&run.psi);
    if dist > opts.projection_limit {
        return Err(Error::Integrator(alloc::format!(
            "polar projection distance {dist:e} exceeds {:e}",
            opts.projection_limit
        )));
    }
    Ok(Evolution {
        u_final: w,
        trajectory: run.samples,
        steps,
        halving_error: err,
        unitarity_drift: drift,
        projection_distance: dist,
    })
}

pub fn evolve_cyclic(trunc: &FockTruncation, proc: &CyclicProcess) -> Result<Evolution> {
    evolve_cyclic_with(trunc, proc, &IntegratorOptions::default())
}

/// Both evaluations of the work done on `rho` by a cyclic process.
#[derive(Clone, Debug)]
pub struct WorkReport {
    /// `∫_0^T ρ(α_t^H(dH_t/dt)) dt`
    pub integral: f64,
    /// `(1/i) ρ(U_T† δ(U_T)) = ρ(U_T† H U_T) − ρ(H)`
    pub algebraic: f64,
    pub discrepancy: f64,
    pub steps: usize,
    pub halving_error: f64,
    /// Change of `Tr ρ` under the integrated evolution.
    pub norm_drift: f64,
    /// Set when the two routes disagree by more than `1e−6`.
    pub diagnostics: Option<alloc::string::String>,
}

/// Work done on `rho` by `proc`. Only the eigenvectors of `rho` are
/// propagated, each weighted by the square root of its eigenvalue.
pub fn work_done(trunc: &FockTruncation, rho: &CMat, proc: &CyclicProcess) -> Result<WorkReport> {
    let dim = trunc.dim();
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::Mismatch(alloc::format!("state does not match truncation dimension {dim}")));
    }
    proc.dim_check(dim)?;
    if proc.terms().is_empty() {
        return Ok(WorkReport {
            integral: 0.0,
            algebraic: 0.0,
            discrepancy: 0.0,
            steps: 0,
            halving_error: 0.0,
            norm_drift: 0.0,
            diagnostics: None,
        });
    }
    let (vals, vecs) = linalg::hermitian_eig(&linalg::hermitian_part(rho));
    let top = vals.iter().fold(0.0f64, |a, &b| a.max(b));
    let kept: Vec<usize> = (0..dim).filter(|&k| vals[k] > 1e-15 * top).collect();
    let mut psi0 = CMat::zeros(dim, kept.len());
    for (col, &k) in kept.iter().enumerate() {
        psi0.set_column(col, &(vecs.column(k) * C64::new(vals[k].sqrt(), 0.0)));
    }
    let (run, steps, err) = evolve_block(trunc, proc, &psi0, true, 0, &IntegratorOptions::default())?;
    let e = trunc.energies();
    let energy_of = |p: &CMat| -> f64 {
        p.row_iter()
            .zip(e)
            .map(|(row, &er)| er * row.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    };
    let algebraic = energy_of(&run.psi) - energy_of(&psi0);
    let norm_drift = run.psi.norm_squared() - psi0.norm_squared();
    let integral = run.work;
    let discrepancy = (integral - algebraic).abs();
    let diagnostics = (discrepancy > 1e-6)
        .then(|| alloc::format!("steps={steps} halving={err:e} norm_drift={norm_drift:e}"));
    Ok(WorkReport {
        integral,
        algebraic,
        discrepancy,
        steps,
        halving_error: err,
        norm_drift,
        diagnostics,
    })
}

/// Field quadratures `a+a†`, `i(a†−a)` of every included mode.
pub fn field_quadratures(trunc: &FockTruncation) -> Vec<CMat> {
    let n = trunc.modes().len();
    let mut out = Vec::with_capacity(2 * n);
    for a in 0..n {
        let mut c = alloc::vec![C64::new(0.0, 0.0); n];
        c[a] = C64::new(1.0, 0.0);
        out.push(smeared_field(trunc, &c).unwrap_or_else(|_| unreachable!()));
        c[a] = C64::new(0.0, 1.0);
        out.push(smeared_field(trunc, &c).unwrap_or_else(|_| unreachable!()));
    }
    out
}

/// `a_a† a_a` of every included mode.
pub fn number_operators(trunc: &FockTruncation) -> Vec<CMat> {
    (0..trunc.modes().len()).map(|a| trunc.number(a)).collect()
}

/// `|n⟩⟨n+1| + h.c.` and `−i|n⟩⟨n+1| + h.c.` between adjacent occupations of
/// each mode (other modes unchanged).
pub fn transition_generators(trunc: &FockTruncation) -> Vec<CMat> {
    let mut out = Vec::new();
    for a in 0..trunc.modes().len() {
        for n in 0..trunc.n_max() {
            let mut x = CMat::zeros(trunc.dim(), trunc.dim());
            let mut y = CMat::zeros(trunc.dim(), trunc.dim());
            for idx in 0..trunc.dim() {
                let occ = trunc.occupations(idx);
                if occ[a] == n {
                    let mut up = occ.clone();
                    up[a] = n + 1;
                    let jdx = trunc.index_of(&up).unwrap_or_else(|_| unreachable!());
                    x[(idx, jdx)] = C64::new(1.0, 0.0);
                    x[(jdx, idx)] = C64::new(1.0, 0.0);
                    y[(idx, jdx)] = C64::new(0.0, -1.0);
                    y[(jdx, idx)] = C64::new(0.0, 1.0);
                }
            }
            out.push(x);
            out.push(y);
        }
    }
    out
}

/// Default search family: transitions first, then quadratures and numbers.
pub fn default_search_family(trunc: &FockTruncation) -> Vec<CMat> {
    let mut g = transition_generators(trunc);
    g.extend(field_quadratures(trunc));
    g.extend(number_operators(trunc));
    g
}

/// Outcome of [`passive_search`].
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// `U ρ U†` for the best unitary found.
    pub state: CMat,
    /// Infimum estimate `c_ω` of the passivity functional.
    pub infimum: f64,
    pub angles: Vec<f64>,
    /// Best value after each sweep.
    pub trace: Vec<f64>,
    pub passive: bool,
}

fn word_unitary(dim: usize, family: &[CMat], angles: &[f64]) -> CMat {
    let mut u = CMat::identity(dim, dim);
    for (g, &th) in family.iter().zip(angles) {
        if th != 0.0 {
            u *= linalg::expi_hermitian(&(g * C64::new(th, 0.0)));
        }
    }
    u
}

/// Coordinate search over `U(θ) = Π_k e^{iθ_k G_k}` minimizing the passivity
/// functional of `rho`; `iterations` is the number of sweeps.
pub fn passive_search(
    trunc: &FockTruncation,
    rho: &CMat,
    family: &[CMat],
    iterations: usize,
    tolerance: f64,
) -> Result<SearchResult> {
    for (k, g) in family.iter().enumerate() {
        if g.nrows() != trunc.dim() || linalg::hermiticity_defect(g) > 1e-10 * (1.0 + g.norm()) {
            return Err(invalid!("search generator {k} is not a hermitian matrix on the truncation"));
        }
    }
    let dim = trunc.dim();
    let mut angles = alloc::vec![0.0; family.len()];
    let mut best = 0.0;
    let mut trace = Vec::with_capacity(iterations);
    let mut step = core::f64::consts::FRAC_PI_4;
    for _ in 0..iterations {
        let mut improved = false;
        for k in 0..family.len() {
            for dir in [1.0, -1.0] {
                let mut trial = angles.clone();
                trial[k] += dir * step;
                let v = passivity_functional(trunc, rho, &word_unitary(dim, family, &trial))?;
                if v < best - 1e-15 {
                    best = v;
                    angles = trial;
                    improved = true;
                    break;
                }
            }
        }
        trace.push(best);
        if !improved {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }
    let u = word_unitary(dim, family, &angles);
    let state = &u * rho * u.adjoint();
    Ok(SearchResult {
        state,
        infimum: trace.last().copied().unwrap_or(0.0),
        angles,
        trace,
        passive: best >= -tolerance,
    })
}

/// `Tr[ρ H]`.
pub fn energy(trunc: &FockTruncation, rho: &CMat) -> f64 {
    rho.diagonal().iter().zip(trunc.energies()).map(|(r, e)| r.re * e).sum()
}

/// Names for the generator families, used in reports.
pub fn family_labels(trunc: &FockTruncation) -> Vec<alloc::string::String> {
    let mut out = Vec::new();
    for a in 0..trunc.modes().len() {
        for n in 0..trunc.n_max() {
            out.push(alloc::format!("x[{a}:{n}-{}]", n + 1));
            out.push(alloc::format!("y[{a}:{n}-{}]", n + 1));
        }
    }
    for a in 0..trunc.modes().len() {
        out.push(alloc::format!("q[{a}]"));
        out.push(alloc::format!("p[{a}]"));
    }
    for a in 0..trunc.modes().len() {
        out.push(alloc::format!("n[{a}]"));
    }
    if out.is_empty() {
        out.push("empty".to_string());
    }
    out
}
