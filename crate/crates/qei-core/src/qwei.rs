//! Spectral measures of the pulled-back reference energy density and the
//! static energy inequality machinery built on them.
//!
//! For a stationary quasifree reference the pull-back of the point-split
//! energy density to a worldline `t ↦ ((t,x),(0,x))` is a finite sum of
//! exponentials, so its Fourier transform is an atomic positive measure
//! `Σ_p w_p δ(ζ − ζ_p)`. With it:
//!
//! * `Q(u,x) = (1/2π²) Σ_{ζ_p < u} w_p` (open interval, left-continuous),
//! * `q(g;x) = ∫ |ĝ(u)|² Q(u,x) du = (1/2π²) Σ_p w_p ∫_{ζ_p}^∞ |ĝ|²`,
//! * `𝔔(u) = ∫_Σ dμ Q(u,·)`.
//!
//! Atom weights include the `√g00` factor of `ρ = √g00 :T:`, so the bounds
//! refer to `ρ` directly.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::{
    energy_density::{cutoff_tail_bound, smeared_series, DensitySeries},
    error::invalid,
    fit::{log_log_slope, LineFit},
    mode_catalog::{Backend, ModeCatalog},
    states::{bose_occupation, StateSpec},
    window::{Bump, WindowSpectrum},
    Certified, Result,
};

/// Stationary reference state whose point-split energy density is pulled back.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    Ground,
    Kms { beta: f64 },
}

impl Reference {
    fn validate(&self) -> Result<()> {
        match self {
            Reference::Ground => Ok(()),
            Reference::Kms { beta } if *beta > 0.0 => Ok(()),
            Reference::Kms { beta } => Err(invalid!("KMS inverse temperature must be positive, got {beta}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    FftEstimated,
}

/// Atomic measure `{(ζ_p, w_p)}` with ascending, merged atom locations.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    provenance: Provenance,
}

/// Relative tolerance below which atom locations are merged.
pub const MERGE_TOLERANCE: f64 = 1e-9;

impl SpectralMeasure {
    /// Sorts and merges atoms whose locations agree to [`MERGE_TOLERANCE`].
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>, provenance: Provenance) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (z, w) in atoms {
            match merged.last_mut() {
                Some(last) if (z - last.0).abs() <= MERGE_TOLERANCE * last.0.abs().max(1.0) => last.1 += w,
                _ => merged.push((z, w)),
            }
        }
        Self { atoms: merged, provenance }
    }

    pub fn empty() -> Self {
        Self {
            atoms: Vec::new(),
            provenance: Provenance::Analytic,
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Mass of the open half-line `(−∞, u)`.
    pub fn mass_below(&self, u: f64) -> f64 {
        self.atoms.iter().take_while(|a| a.0 < u).map(|a| a.1).sum()
    }

    /// Smallest atom location.
    pub fn support_infimum(&self) -> Option<f64> {
        self.atoms.first().map(|a| a.0)
    }
}

/// Per-mode data of the reference two-point function at a point:
/// `2π B(φ_j, φ̄_j) √g00`.
fn mode_weights(cat: &ModeCatalog, x: f64) -> Result<Vec<f64>> {
    let (g00, _) = cat.metric_at(x)?;
    let m2 = cat.mass() * cat.mass();
    (0..cat.len())
        .map(|j| {
            let jet = cat.solution_jet(j, 0.0, x)?;
            let b = 0.5 * (m2 * jet.v.norm_sqr() + jet.d0.norm_sqr() + jet.d1.norm_sqr());
            Ok(2.0 * PI * g00.sqrt() * b)
        })
        .collect()
}

fn atoms_from_weights(cat: &ModeCatalog, reference: Reference, weights: &[f64]) -> Vec<(f64, f64)> {
    let mut atoms = Vec::with_capacity(2 * weights.len());
    for (j, &w) in weights.iter().enumerate() {
        let om = cat.omegas()[j];
        match reference {
            Reference::Ground => atoms.push((om, w)),
            Reference::Kms { beta } => {
                let n = bose_occupation(beta, om);
                atoms.push((om, (n + 1.0) * w));
                if n > 0.0 {
                    atoms.push((-om, n * w));
                }
            }
        }
    }
    atoms
}

/// Spectral measure of the pulled-back ground-state energy density at `x`.
pub fn pullback_energy_spectrum(cat: &ModeCatalog, x: f64) -> Result<SpectralMeasure> {
    reference_spectrum(cat, Reference::Ground, x)
}

/// As [`pullback_energy_spectrum`] for any stationary reference. Thermal
/// references carry atoms at `+ω_j` with weight `(n_j+1)w_j` and at `−ω_j`
/// with weight `n_j w_j`.
pub fn reference_spectrum(cat: &ModeCatalog, reference: Reference, x: f64) -> Result<SpectralMeasure> {
    reference.validate()?;
    let w = mode_weights(cat, x)?;
    Ok(SpectralMeasure::from_atoms(
        atoms_from_weights(cat, reference, &w),
        Provenance::Analytic,
    ))
}

/// Spatially integrated measure `∫_Σ dμ(x) [pull-back at x]` by the catalog
/// grid quadrature; `𝔔(u) = (1/2π²) · mass_below(u)` of this measure.
pub fn integrated_spectrum(cat: &ModeCatalog, reference: Reference) -> Result<SpectralMeasure> {
    reference.validate()?;
    let mw = cat.measure_weights();
    let mut totals = alloc::vec![0.0; cat.len()];
    for (i, dmu) in mw.iter().enumerate() {
        let w = mode_weights(cat, cat.grid_point(i))?;
        for (t, wj) in totals.iter_mut().zip(w) {
            *t += wj * dmu;
        }
    }
    Ok(SpectralMeasure::from_atoms(
        atoms_from_weights(cat, reference, &totals),
        Provenance::Analytic,
    ))
}

/// `Q(u) = (1/2π²) Σ_{ζ_p < u} w_p`.
pub fn q_function(spec: &SpectralMeasure, u: f64) -> f64 {
    spec.mass_below(u) / (2.0 * PI * PI)
}

/// `𝔔(u)` from an [`integrated_spectrum`].
pub fn integrated_q(integrated: &SpectralMeasure, u: f64) -> f64 {
    q_function(integrated, u)
}

/// `𝔔(u)` by direct grid quadrature of `Q(u, x_i)` against `dμ`.
pub fn integrated_q_by_quadrature(cat: &ModeCatalog, reference: Reference, u: f64) -> Result<f64> {
    let mw = cat.measure_weights();
    let mut acc = 0.0;
    for (i, dmu) in mw.iter().enumerate() {
        acc += q_function(&reference_spectrum(cat, reference, cat.grid_point(i))?, u) * dmu;
    }
    Ok(acc)
}

/// `q(g;x)` together with its certificates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QBound {
    pub value: f64,
    /// Propagated error of the `|ĝ|²` tail integrals.
    pub quadrature_error: f64,
    /// Estimated contribution of atoms beyond the catalog cutoff. Those atoms
    /// would only increase `q`, so omitting them is conservative.
    pub cutoff_tail: f64,
    /// True when the cutoff tail is not negligible against `value`.
    pub under_resolved: bool,
}

/// `q = (1/2π²) Σ_p w_p T(ζ_p)` with `T(ζ) = ∫_ζ^∞ |ĝ|²`.
pub fn q_bound(spec: &SpectralMeasure, window: &WindowSpectrum) -> QBound {
    let norm = 1.0 / (2.0 * PI * PI);
    let mut value = 0.0;
    let mut mass = 0.0;
    for &(z, w) in spec.atoms() {
        value += w * window.tail(z);
        mass += w;
    }
    QBound {
        value: norm * value,
        quadrature_error: norm * mass * window.quadrature_error(),
        cutoff_tail: 0.0,
        under_resolved: false,
    }
}

/// [`q_bound`] with the cutoff-tail estimate of the catalog attached.
pub fn q_bound_for(cat: &ModeCatalog, spec: &SpectralMeasure, window: &WindowSpectrum) -> QBound {
    let mut q = q_bound(spec, window);
    q.cutoff_tail = q_cutoff_tail(cat, spec, window);
    q.under_resolved = q.cutoff_tail > 1e-3 * q.value.abs().max(1e-300) && q.cutoff_tail > 1e-14;
    q
}

/// Weyl-law estimate of `(1/2π²) Σ_{ω > ω_J} w T(ω)` using cylinder modes of
/// the optical length and the largest atom weight density observed.
fn q_cutoff_tail(cat: &ModeCatalog, spec: &SpectralMeasure, window: &WindowSpectrum) -> f64 {
    let Some(&(top, _)) = spec.atoms().last() else {
        return 0.0;
    };
    let length = match cat.backend() {
        Backend::AnalyticCylinder => cat.circumference(),
        Backend::NumericSl => cat.weight_samples().iter().sum::<f64>() * cat.spacing(),
    };
    let ratio = spec
        .atoms()
        .iter()
        .filter(|a| a.0 > 0.0)
        .map(|a| a.1 / a.0)
        .fold(0.0f64, f64::max);
    let mut tail = 0.0;
    let mut n = 1usize;
    loop {
        let z = top + 2.0 * PI * n as f64 / length;
        let t = window.tail(z);
        tail += 2.0 * ratio * z * t;
        if t == 0.0 || n > 1_000_000 {
            break;
        }
        n += 1;
    }
    tail / (2.0 * PI * PI)
}

/// `q(g_λ)` from the spectrum of `g` by the change of variables
/// `q(g_λ) = λ^{−1} (1/2π²) Σ_p w_p T_g(ζ_p/λ)`.
pub fn q_bound_dilated(spec: &SpectralMeasure, window: &WindowSpectrum, lambda: f64) -> QBound {
    let norm = 1.0 / (2.0 * PI * PI * lambda);
    let mut value = 0.0;
    let mut mass = 0.0;
    for &(z, w) in spec.atoms() {
        value += w * window.tail(z / lambda);
        mass += w;
    }
    QBound {
        value: norm * value,
        quadrature_error: norm * mass * window.quadrature_error(),
        cutoff_tail: 0.0,
        under_resolved: false,
    }
}

/// Trace of `∫_Σ q(g_λ;x) dμ / ‖g_λ²‖` along a λ sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSigmaTrace {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Last entry of `values`.
    pub estimate: f64,
    /// Analytic limit `2π 𝔔(0+)` (zero for a gapped ground reference).
    pub bound: f64,
}

/// Default λ sequence `2^{−k}`, `k = 0..=10`.
pub fn default_lambdas() -> Vec<f64> {
    (0..=10).map(|k| 0.5f64.powi(k)).collect()
}

/// Limiting constant estimate from the integrated spectrum and the window `g`.
pub fn gamma_sigma_estimate(integrated: &SpectralMeasure, g: &Bump, lambdas: &[f64]) -> Result<GammaSigmaTrace> {
    if lambdas.is_empty() {
        return Err(invalid!("empty λ sequence"));
    }
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(invalid!("λ values must be positive"));
    }
    let window = WindowSpectrum::new(*g);
    let norm = window.l1_of_square();
    let mut values = Vec::with_capacity(lambdas.len());
    let mut errors = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let q = q_bound_dilated(integrated, &window, lam);
        // ‖g_λ²‖ = ‖g²‖/λ
        values.push(q.value * lam / norm);
        errors.push(q.quadrature_error * lam / norm);
    }
    Ok(GammaSigmaTrace {
        lambdas: lambdas.to_vec(),
        estimate: *values.last().unwrap_or(&0.0),
        values,
        errors,
        bound: 2.0 * PI * integrated_q(integrated, 0.0 + f64::MIN_POSITIVE),
    })
}

/// Outcome of one static QWEI test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QweiMargin {
    /// `∫ g² ρ dt` of the test state relative to the reference.
    pub lhs: Certified,
    pub q: QBound,
    /// `lhs + q`
    pub margin: f64,
    /// Quadrature certificates plus the test-state cutoff tail.
    pub tol_num: f64,
    pub passed: bool,
}

/// Static QWEI margin of `state` at `x` for the window behind `window`,
/// relative to the ground reference.
pub fn verify_static_qwei(
    state: &StateSpec,
    cat: &ModeCatalog,
    window: &WindowSpectrum,
    x: f64,
) -> Result<QweiMargin> {
    let spec = pullback_energy_spectrum(cat, x)?;
    let q = q_bound_for(cat, &spec, window);
    let series = DensitySeries::new(&state.moments(cat)?, cat, x)?;
    let lhs = smeared_series(&series, window.window())?;
    Ok(margin_from(lhs, q, cutoff_tail_bound(state, cat) * window.l1_of_square()))
}

/// Assembles a margin from its parts.
pub fn margin_from(lhs: Certified, q: QBound, state_tail: f64) -> QweiMargin {
    let margin = lhs.value + q.value;
    let tol_num = lhs.error + q.quadrature_error + state_tail;
    QweiMargin {
        lhs,
        q,
        margin,
        tol_num,
        passed: margin >= -tol_num,
    }
}

/// Results of the positivity and growth checks on an atomic measure.
#[derive(Clone, Debug, PartialEq)]
pub struct BochnerReport {
    pub negative_atoms: usize,
    pub min_weight: Option<f64>,
    /// `(1/2π) Σ_p w_p |f̂(ζ_p)|²` per test function.
    pub positive_type: Vec<f64>,
    /// Log–log fit of the cumulative mass over the requested range.
    pub growth: Option<LineFit>,
}

impl BochnerReport {
    pub fn passed(&self) -> bool {
        self.negative_atoms == 0 && self.positive_type.iter().all(|&v| v >= 0.0)
    }
}

/// Test function `f(t) = g(t) e^{−iνt}`, so that `f̂(ζ) = ĝ(ζ − ν)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulatedBump {
    pub bump: Bump,
    pub modulation: f64,
}

/// `Γ*T(f̄ ⋆ f̃) = (1/2π) Σ_p w_p |f̂(ζ_p)|²`.
pub fn positive_type_value(spec: &SpectralMeasure, f: &ModulatedBump) -> f64 {
    spec.atoms()
        .iter()
        .map(|&(z, w)| w * f.bump.fourier(z - f.modulation).norm_sqr())
        .sum::<f64>()
        / (2.0 * PI)
}

/// Cumulative mass `M(u) = mass_below(u)` sampled at `samples` log-spaced
/// points of `[lo, hi]` and fitted by a power law.
pub fn cumulative_mass_growth(spec: &SpectralMeasure, lo: f64, hi: f64, samples: usize) -> Option<LineFit> {
    if !(lo > 0.0 && hi > lo) || samples < 2 {
        return None;
    }
    let us: Vec<f64> = (0..samples)
        .map(|i| lo * (hi / lo).powf(i as f64 / (samples - 1) as f64))
        .collect();
    let ms: Vec<f64> = us.iter().map(|&u| spec.mass_below(u)).collect();
    log_log_slope(&us, &ms)
}

/// Nonnegativity, positive-type samples and polynomial growth over `[10, 100]`.
pub fn bochner_checks(spec: &SpectralMeasure, test_functions: &[ModulatedBump]) -> BochnerReport {
    BochnerReport {
        negative_atoms: spec.atoms().iter().filter(|a| a.1 < 0.0).count(),
        min_weight: spec.atoms().iter().map(|a| a.1).reduce(f64::min),
        positive_type: test_functions.iter().map(|f| positive_type_value(spec, f)).collect(),
        growth: cumulative_mass_growth(spec, 10.0, 100.0, 64),
    }
}

/// Smallest frequency in the support of the pulled-back reference spectrum.
pub fn spectrum_support_probe(cat: &ModeCatalog, reference: Reference, x: f64) -> Result<f64> {
    let spec = reference_spectrum(cat, reference, x)?;
    spec.support_infimum()
        .ok_or_else(|| invalid!("empty spectral measure has no support"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_catalog::build_cylinder_catalog;

    #[test]
    fn cylinder_atoms_closed_form() {
        let cat = build_cylinder_catalog(2.0 * PI, 1.0, 5).unwrap();
        let s = pullback_energy_spectrum(&cat, 0.37).unwrap();
        assert_eq!(s.len(), 3);
        assert!((s.atoms()[0].1 - 0.5).abs() < 1e-14);
        assert!((s.atoms()[1].1 - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn q_is_left_continuous() {
        let cat = build_cylinder_catalog(2.0 * PI, 1.0, 5).unwrap();
        let s = pullback_energy_spectrum(&cat, 0.0).unwrap();
        assert_eq!(q_function(&s, 1.0), 0.0);
        assert!(q_function(&s, 1.0 + 1e-9) > 0.0);
    }

    #[test]
    fn empty_measure_passes_vacuously() {
        let r = bochner_checks(&SpectralMeasure::empty(), &[]);
        assert!(r.passed());
        assert!(r.growth.is_none());
    }

    #[test]
    fn kms_reference_has_negative_support() {
        let cat = build_cylinder_catalog(2.0 * PI, 1.0, 7).unwrap();
        let inf = spectrum_support_probe(&cat, Reference::Kms { beta: 1.0 }, 0.0).unwrap();
        assert!((inf + cat.omegas()[6]).abs() < 1e-14);
    }
}
