//! Normal-ordered point-split energy density and its smeared and integrated
//! forms.
//!
//! The point-split kernel is `½(m² + e_0⊗e_0 + e_1⊗e_1)` applied to
//! `:w₂:[ℓ]`; derivatives act on the mode solutions, so everything reduces to
//! the bilinear pairing `B(X,Y) = ½(m² X_v Y_v + X_0 Y_0 + X_1 Y_1)` of
//! [`SolutionJet`]s. The energy density is `ρ[ℓ] = √g00 :T:[ℓ](x,x)`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::{
    error::invalid,
    linalg,
    mode_catalog::{Backend, ModeCatalog, SolutionJet},
    quadrature::GaussLegendre,
    states::{bose_occupation, FockTruncation, MatrixFunctional, Moments, Point, StateSpec},
    window::Bump,
    CMat, Certified, Error, Result, C64,
};

fn pairing(m2: f64) -> impl Fn(SolutionJet, SolutionJet) -> C64 {
    move |a, b| 0.5 * (a.v * b.v * m2 + a.d0 * b.d0 + a.d1 * b.d1)
}

fn jets_at(cat: &ModeCatalog, modes: &[usize], p: Point) -> Result<Vec<(usize, SolutionJet)>> {
    modes.iter().map(|&j| Ok((j, cat.solution_jet(j, p.0, p.1)?))).collect()
}

fn lookup(table: &[(usize, SolutionJet)], j: usize) -> SolutionJet {
    let i = table.binary_search_by_key(&j, |e| e.0).unwrap_or_else(|_| unreachable!("mode {j} not tabulated"));
    table[i].1
}

fn check_modes(m: &Moments, cat: &ModeCatalog) -> Result<Vec<usize>> {
    let modes = m.modes();
    if let Some(&j) = modes.last() {
        cat.check_mode(j)?;
    }
    Ok(modes)
}

/// Point-split normal-ordered energy kernel `:T:[ℓ](p, q)`.
pub fn point_split_t(m: &Moments, cat: &ModeCatalog, p: Point, q: Point) -> Result<C64> {
    let modes = check_modes(m, cat)?;
    let jp = jets_at(cat, &modes, p)?;
    let jq = jets_at(cat, &modes, q)?;
    let m2 = cat.mass() * cat.mass();
    Ok(m.pair(|j| lookup(&jp, j), |j| lookup(&jq, j), |z| z.conj(), pairing(m2)))
}

/// `ρ[ℓ](t,x) = √g00(x) :T:[ℓ]((t,x),(t,x))`; real for state functionals.
pub fn energy_density(m: &Moments, cat: &ModeCatalog, t: f64, x: f64) -> Result<C64> {
    let (g00, _) = cat.metric_at(x)?;
    Ok(point_split_t(m, cat, (t, x), (t, x))? * g00.sqrt())
}

/// Energy density of a state specification.
pub fn state_energy_density(spec: &StateSpec, cat: &ModeCatalog, t: f64, x: f64) -> Result<f64> {
    Ok(energy_density(&spec.moments(cat)?, cat, t, x)?.re)
}

/// `t ↦ ρ[ℓ](t,x) = Σ_r c_r e^{−iν_r t}` at fixed `x`.
///
/// Every mode jet evolves as `e^{−iω_j t}`, so the time dependence of the
/// energy density is a finite trigonometric sum whose coefficients are
/// computed once.
#[derive(Clone, Debug)]
pub struct DensitySeries {
    pub terms: Vec<(f64, C64)>,
}

impl DensitySeries {
    pub fn new(m: &Moments, cat: &ModeCatalog, x: f64) -> Result<Self> {
        let modes = check_modes(m, cat)?;
        let (g00, _) = cat.metric_at(x)?;
        let jets = jets_at(cat, &modes, (0.0, x))?;
        let b = pairing(cat.mass() * cat.mass());
        let w = |j: usize| cat.omegas()[j];
        let s = g00.sqrt();
        let mut terms = Vec::with_capacity(m.aa.len() + m.ada.len() + m.adad.len());
        for &(j, k, c) in &m.aa {
            terms.push((w(j) + w(k), c * b(lookup(&jets, j), lookup(&jets, k)) * s));
        }
        for &(j, k, c) in &m.ada {
            let (xj, xk) = (lookup(&jets, j), lookup(&jets, k));
            terms.push((w(k) - w(j), c * (b(xj.conj(), xk) + b(xk, xj.conj())) * s));
        }
        for &(j, k, c) in &m.adad {
            terms.push((-(w(j) + w(k)), c * b(lookup(&jets, j).conj(), lookup(&jets, k).conj()) * s));
        }
        Ok(Self { terms })
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.terms.iter().map(|&(nu, c)| c * C64::from_polar(1.0, -nu * t)).sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }

    /// `Σ_r |c_r|`, a uniform bound on `|ρ(t)|`.
    pub fn magnitude_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm()).sum()
    }
}

/// Energy density on a `(t, x)` grid.
#[derive(Clone, Debug)]
pub struct EnergyDensityField {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// `values[i][k] = ρ(times[i], positions[k])`
    pub values: Vec<Vec<f64>>,
    pub cutoff: usize,
    pub tail_bound: f64,
}

pub fn energy_density_field(spec: &StateSpec, cat: &ModeCatalog, times: &[f64], positions: &[f64]) -> Result<EnergyDensityField> {
    let m = spec.moments(cat)?;
    let series: Vec<DensitySeries> = positions.iter().map(|&x| DensitySeries::new(&m, cat, x)).collect::<Result<_>>()?;
    let values = times.iter().map(|&t| series.iter().map(|s| s.eval(t).re).collect()).collect();
    Ok(EnergyDensityField {
        times: times.to_vec(),
        positions: positions.to_vec(),
        values,
        cutoff: cat.len(),
        tail_bound: cutoff_tail_bound(spec, cat),
    })
}

/// Estimated contribution to `ρ` of modes beyond the catalog cutoff. Only
/// thermal components excite infinitely many modes; for them the missing
/// modes are summed with the cylinder dispersion relation (optical length
/// `Σ w Δx` in place of `L` for the numeric backend).
pub fn cutoff_tail_bound(spec: &StateSpec, cat: &ModeCatalog) -> f64 {
    match spec {
        StateSpec::Kms { beta } => {
            let w = cat.weight_samples();
            let (length, max_g00) = match cat.backend() {
                Backend::AnalyticCylinder => (cat.circumference(), 1.0),
                Backend::NumericSl => (
                    w.iter().sum::<f64>() * cat.spacing(),
                    cat.g00_samples().iter().fold(0.0f64, |a, &b| a.max(b)),
                ),
            };
            let m = cat.mass();
            let nmax = cat.len() / 2;
            let mut tail = 0.0;
            for n in nmax as i64.. {
                let k = 2.0 * core::f64::consts::PI * n as f64 / length;
                let om = (m * m + k * k).sqrt();
                let term = 2.0 * om * bose_occupation(*beta, om) / length;
                tail += term;
                if term < 1e-300 || (n > nmax as i64 + 8 && term < 1e-18 * tail.max(1e-300)) {
                    break;
                }
            }
            tail * max_g00.sqrt()
        }
        StateSpec::Mixture { components } => components.iter().map(|(p, s)| p * cutoff_tail_bound(s, cat)).sum(),
        _ => 0.0,
    }
}

/// Relative step-halving target of the smeared-energy quadrature.
pub const SMEARING_REL_TOL: f64 = 1e-10;

/// `∫ g(t)² Re ρ[ℓ](t,x) dt`, certified by panel doubling.
pub fn smeared_energy(m: &Moments, cat: &ModeCatalog, g: &Bump, x: f64) -> Result<Certified> {
    let series = DensitySeries::new(m, cat, x)?;
    smeared_series(&series, g)
}

/// As [`smeared_energy`] for a precomputed [`DensitySeries`].
pub fn smeared_series(series: &DensitySeries, g: &Bump) -> Result<Certified> {
    let (lo, hi) = g.support();
    let osc = series.max_frequency().max(1.0 / g.half_width);
    let initial = ((hi - lo) * osc / 4.0).ceil().max(8.0) as usize;
    let scale = g.l1_of_square() * series.magnitude_bound();
    let rule = GaussLegendre::new(16);
    let f = |t: f64| g.eval(t).powi(2) * series.eval(t).re;
    let mut panels = initial;
    let mut coarse = rule.integrate(lo, hi, panels, f);
    for _ in 0..10 {
        panels *= 2;
        let fine = rule.integrate(lo, hi, panels, f);
        let diff = (fine - coarse).abs();
        if diff <= SMEARING_REL_TOL * scale.max(fine.abs()) {
            // rounding floor of the sum
            let floor = 1e-15 * scale;
            return Ok(Certified::new(fine, diff + floor));
        }
        coarse = fine;
    }
    Err(Error::Quadrature {
        disagreement: f64::NAN,
        tolerance: SMEARING_REL_TOL,
    })
}

/// `∫_Σ dμ ρ[ℓ](t, x)` by the catalog grid quadrature `Σ_i √h_i Δx ρ(t, x_i)`.
pub fn integrated_energy(m: &Moments, cat: &ModeCatalog, t: f64) -> Result<C64> {
    let weights = cat.measure_weights();
    let mut acc = C64::new(0.0, 0.0);
    for (i, w) in weights.iter().enumerate() {
        acc += energy_density(m, cat, t, cat.grid_point(i))? * *w;
    }
    Ok(acc)
}

pub fn state_integrated_energy(spec: &StateSpec, cat: &ModeCatalog, t: f64) -> Result<f64> {
    Ok(integrated_energy(&spec.moments(cat)?, cat, t)?.re)
}

/// Energy density as an operator on a truncation,
/// `√g00 Σ_{jk} [a_j a_k B(φ_j,φ_k) + 2 a_j†a_k B(φ̄_j,φ_k) + a_j†a_k† B(φ̄_j,φ̄_k)]`.
pub fn energy_density_operator(trunc: &FockTruncation, cat: &ModeCatalog, t: f64, x: f64) -> Result<CMat> {
    let (g00, _) = cat.metric_at(x)?;
    let jets: Vec<SolutionJet> = trunc.modes().iter().map(|&j| cat.solution_jet(j, t, x)).collect::<Result<_>>()?;
    let b = pairing(cat.mass() * cat.mass());
    let n = jets.len();
    let ann: Vec<&CMat> = (0..n).map(|a| trunc.annihilation(a)).collect();
    let cre: Vec<CMat> = (0..n).map(|a| trunc.creation(a)).collect();
    let mut op = CMat::zeros(trunc.dim(), trunc.dim());
    for j in 0..n {
        for k in 0..n {
            op += (ann[j] * ann[k]) * b(jets[j], jets[k]);
            op += (&cre[j] * ann[k]) * (b(jets[j].conj(), jets[k]) * 2.0);
            op += (&cre[j] * &cre[k]) * b(jets[j].conj(), jets[k].conj());
        }
    }
    Ok(op * C64::new(g00.sqrt(), 0.0))
}

/// Both sides of the generator identity and their relative residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorCheck {
    /// `ℓ([H_N, A])`
    pub lhs: C64,
    /// `(1/i) d/ds ℓ(e^{iHs} A e^{−iHs})` at `s = 0`
    pub rhs: C64,
    pub step: f64,
    /// `|lhs − rhs| / (|lhs| + |rhs| + 1)`
    pub residual: f64,
}

/// Compares `ℓ([H_N, A])`, with `H_N = Σ ω_j a_j†a_j` the spatial integral of
/// the energy density over the included modes, against a twice
/// Richardson-extrapolated central difference of `s ↦ ℓ(α_s A)`.
pub fn generator_identity_residual(trunc: &FockTruncation, a: &CMat, ell: &MatrixFunctional) -> Result<GeneratorCheck> {
    if a.nrows() != trunc.dim() || a.ncols() != trunc.dim() || ell.left.len() != trunc.dim() {
        return Err(invalid!("operator or functional does not match truncation dimension {}", trunc.dim()));
    }
    let e = trunc.energies();
    let h = trunc.hamiltonian();
    let lhs = ell.eval(&linalg::commutator(&h, a));

    let mut nu_max = 0.0f64;
    for r in 0..trunc.dim() {
        for c in 0..trunc.dim() {
            if a[(r, c)] != C64::new(0.0, 0.0) {
                nu_max = nu_max.max((e[r] - e[c]).abs());
            }
        }
    }
    let step = if nu_max > 0.0 { 0.1 / nu_max } else { 0.1 };
    if !(step > 1e-12) {
        return Err(Error::StepUnderflow { step });
    }
    let f = |s: f64| ell.eval(&linalg::heisenberg_diag(e, a, s));
    let central = |hh: f64| (f(hh) - f(-hh)) / (2.0 * hh);
    let d = [central(step), central(step / 2.0), central(step / 4.0)];
    let r1 = [(d[1] * 4.0 - d[0]) / 3.0, (d[2] * 4.0 - d[1]) / 3.0];
    let derivative = (r1[1] * 16.0 - r1[0]) / 15.0;
    let rhs = derivative / C64::new(0.0, 1.0);
    let residual = (lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1.0);
    Ok(GeneratorCheck { lhs, rhs, step, residual })
}
