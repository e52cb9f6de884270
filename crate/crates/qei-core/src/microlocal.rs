//! Windowed Fourier decay probes of two-point functions and the Hadamard
//! cone geometry they are compared against.
//!
//! Covectors on `M × M` are written `ℓ = (ζ, ξ; ζ', ξ')` in the identity chart
//! `(t, x; t', x')`. A probe evaluates
//! `u(χ e^{iλ⟨ℓ,·⟩}) = ∫ u(p, q) χ(p, q) e^{iλ⟨ℓ,(p,q)⟩}` for a product bump
//! `χ` and fits the decay order `ν` of its modulus in `λ`.

use alloc::{string::String, vec::Vec};
use num_traits::Float;

use crate::{
    error::invalid,
    fit::{log_log_slope, LineFit},
    mode_catalog::{Backend, ModeCatalog},
    quadrature::GaussLegendre,
    qwei::Reference,
    states::{bose_occupation, Point},
    window::Bump,
    Error, Result, C64,
};

pub use crate::qwei::spectrum_support_probe;

/// A covector `(ζ, ξ; ζ', ξ')` on `M × M`.
pub type Covector = [f64; 4];

/// Outcome of a decay probe, or the prediction of the cone geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Regular,
    Singular,
    Inconclusive,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Regular => "regular",
            Classification::Singular => "singular",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

/// Pair of base points `(p, q)` with a label for reports.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePair {
    pub label: String,
    pub p: Point,
    pub q: Point,
}

impl BasePair {
    pub fn new(label: &str, p: Point, q: Point) -> Self {
        Self {
            label: label.into(),
            p,
            q,
        }
    }
}

/// Coincident, null separated and antipodal equal-time base pairs on a
/// cylinder of circumference `L`.
pub fn default_bases(circumference: f64) -> Vec<BasePair> {
    let d = 1.5f64.min(circumference / 4.0);
    alloc::vec![
        BasePair::new("coincident", (0.0, 0.0), (0.0, 0.0)),
        BasePair::new("null", (0.0, 0.0), (d, d)),
        BasePair::new("antipodal", (0.0, 0.0), (0.0, 0.5 * circumference)),
    ]
}

/// Eight directions: both null pairs `(k; −k)` with `k` future pointing, their
/// past-pointing reflections, a timelike and a spacelike pair, the unflipped
/// null pair and a mismatched null pair.
pub fn default_fan() -> Vec<Covector> {
    let r2 = 2.0f64.sqrt();
    alloc::vec![
        [0.5, 0.5, -0.5, -0.5],
        [0.5, -0.5, -0.5, 0.5],
        [-0.5, -0.5, 0.5, 0.5],
        [-0.5, 0.5, 0.5, -0.5],
        [1.0 / r2, 0.0, -1.0 / r2, 0.0],
        [0.0, 1.0 / r2, 0.0, -1.0 / r2],
        [0.5, 0.5, 0.5, 0.5],
        [0.5, 0.5, -0.5, 0.5],
    ]
}

/// Probe settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// Half-width of each of the four bump factors of `χ`.
    pub half_width: f64,
    pub sharpness: f64,
    /// `ν ≥ regular_threshold` classifies as regular.
    pub regular_threshold: f64,
    /// `ν ≤ singular_threshold` classifies as singular.
    pub singular_threshold: f64,
    /// Magnitudes below this fraction of the largest one are treated as noise.
    pub noise_floor: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            lambda_min: 2.0,
            lambda_max: 64.0,
            lambda_points: 16,
            half_width: 0.6,
            sharpness: 6.0,
            regular_threshold: 3.0,
            singular_threshold: 1.5,
            noise_floor: 1e-12,
        }
    }
}

impl ProbeOptions {
    fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min) {
            return Err(invalid!("need 0 < lambda_min < lambda_max"));
        }
        if self.lambda_points < 4 {
            return Err(invalid!("need at least 4 lambda points"));
        }
        if !(self.half_width > 0.0 && self.sharpness > 0.0) {
            return Err(invalid!("probe window needs positive half-width and sharpness"));
        }
        if self.singular_threshold >= self.regular_threshold {
            return Err(invalid!("singular threshold must lie below the regular threshold"));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        let n = self.lambda_points;
        let r = (self.lambda_max / self.lambda_min).ln();
        (0..n)
            .map(|i| self.lambda_min * (r * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    /// Same probe with every window factor halved.
    pub fn halved(&self) -> Self {
        Self {
            half_width: 0.5 * self.half_width,
            ..*self
        }
    }
}

/// Distribution probed by [`windowed_decay`].
#[derive(Clone, Copy, Debug)]
pub enum ProbeTarget<'a> {
    /// Mode-sum two-point function of the ground or a thermal state.
    ModeSum {
        catalog: &'a ModeCatalog,
        reference: Reference,
    },
    /// Smooth control `exp(−|y − c|² / 2s²)` on `R⁴`.
    GaussianBlob { center: [f64; 4], width: f64 },
}

/// Result of one direction probe.
#[derive(Clone, Debug)]
pub struct DirectionProbe {
    pub base: BasePair,
    pub direction: Covector,
    pub half_width: f64,
    pub lambdas: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Fitted decay order; a lower bound when `floor_reached`.
    pub nu: f64,
    pub fit_residual: f64,
    pub floor_reached: bool,
    pub classification: Classification,
    pub diagnostic: Option<String>,
}

fn normalize(l: Covector) -> Result<Covector> {
    let n = l.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid!("probe direction must be a nonzero finite covector"));
    }
    Ok([l[0] / n, l[1] / n, l[2] / n, l[3] / n])
}

/// `∫ χ(x − x0) v(x) e^{ifx} dx` on the circle for grid samples `v`, in the
/// chart centered at `x0`.
fn grid_transform(cat: &ModeCatalog, samples: &[C64], bump: &Bump, f: f64) -> C64 {
    let l = cat.circumference();
    let dx = cat.spacing();
    let mut acc = C64::new(0.0, 0.0);
    for (i, v) in samples.iter().enumerate() {
        let mut d = cat.grid_point(i) - bump.center;
        d -= l * (d / l).round();
        if d.abs() < bump.half_width {
            let w = bump.eval(bump.center + d);
            acc += v * C64::from_polar(w * dx, f * (bump.center + d));
        }
    }
    acc
}

struct SpatialFactors {
    /// `∫χ u_j e^{ifx}` at the first base point.
    first: Vec<C64>,
    /// `∫χ ū_j e^{ifx}` at the first base point.
    first_conj: Vec<C64>,
    second: Vec<C64>,
    second_conj: Vec<C64>,
}

fn spatial_factors(
    cat: &ModeCatalog,
    samples: Option<&[Vec<C64>]>,
    chi1: &Bump,
    f1: f64,
    chi2: &Bump,
    f2: f64,
) -> Result<SpatialFactors> {
    let n = cat.len();
    let mut s = SpatialFactors {
        first: Vec::with_capacity(n),
        first_conj: Vec::with_capacity(n),
        second: Vec::with_capacity(n),
        second_conj: Vec::with_capacity(n),
    };
    match (cat.backend(), samples) {
        (Backend::AnalyticCylinder, _) => {
            let norm = 1.0 / cat.circumference().sqrt();
            let k = cat.wavenumbers().ok_or_else(|| invalid!("cylinder catalog without wavenumbers"))?;
            for &n in k {
                let kk = 2.0 * core::f64::consts::PI * n as f64 / cat.circumference();
                s.first.push(chi1.fourier(f1 + kk) * norm);
                s.first_conj.push(chi1.fourier(f1 - kk) * norm);
                s.second.push(chi2.fourier(f2 + kk) * norm);
                s.second_conj.push(chi2.fourier(f2 - kk) * norm);
            }
        }
        (Backend::NumericSl, Some(samples)) => {
            for v in samples {
                let conj: Vec<C64> = v.iter().map(|z| z.conj()).collect();
                s.first.push(grid_transform(cat, v, chi1, f1));
                s.first_conj.push(grid_transform(cat, &conj, chi1, f1));
                s.second.push(grid_transform(cat, v, chi2, f2));
                s.second_conj.push(grid_transform(cat, &conj, chi2, f2));
            }
        }
        (Backend::NumericSl, None) => return Err(invalid!("numeric catalog probe needs mode samples")),
    }
    Ok(s)
}

fn mode_sum_transform(
    cat: &ModeCatalog,
    reference: Reference,
    samples: Option<&[Vec<C64>]>,
    base: &BasePair,
    l: &Covector,
    opts: &ProbeOptions,
    lambda: f64,
) -> Result<f64> {
    let bump = |c: f64| Bump::with_sharpness(c, opts.half_width, 1.0, opts.sharpness);
    let (t1, x1) = base.p;
    let (t2, x2) = base.q;
    let (ct1, cx1, ct2, cx2) = (bump(t1)?, bump(x1)?, bump(t2)?, bump(x2)?);
    let s = spatial_factors(cat, samples, &cx1, lambda * l[1], &cx2, lambda * l[3])?;
    let mut acc = C64::new(0.0, 0.0);
    for (j, &w) in cat.omegas().iter().enumerate() {
        let n = match reference {
            Reference::Ground => 0.0,
            Reference::Kms { beta } => bose_occupation(beta, w),
        };
        let pos = ct1.fourier(lambda * l[0] - w) * s.first[j] * ct2.fourier(lambda * l[2] + w) * s.second_conj[j];
        let mut term = pos * (1.0 + n);
        if n > 0.0 {
            let neg = ct1.fourier(lambda * l[0] + w) * s.first_conj[j] * ct2.fourier(lambda * l[2] - w) * s.second[j];
            term += neg * n;
        }
        acc += term / (2.0 * w);
    }
    Ok(acc.norm())
}

/// `∫ χ(y − b) e^{−(y − c)² / 2s²} e^{ify} dy` with Gauss–Legendre panels
/// proportional to the oscillation count, certified by panel doubling.
fn gaussian_factor(rule: &GaussLegendre, chi: &Bump, c: f64, s: f64, f: f64) -> Result<C64> {
    let (lo, hi) = chi.support();
    let panels = (16.0f64.max((f.abs() * chi.half_width / 2.0).ceil())) as usize;
    let g = |y: f64| chi.eval(y) * (-(y - c) * (y - c) / (2.0 * s * s)).exp();
    let run = |p: usize| rule.integrate_complex(lo, hi, p, |y| C64::from_polar(g(y), f * y));
    let coarse = run(panels);
    let fine = run(2 * panels);
    let scale = rule.integrate(lo, hi, panels, g).abs();
    if (fine - coarse).norm() > 1e-13 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Quadrature {
            disagreement: (fine - coarse).norm(),
            tolerance: 1e-13 * scale,
        });
    }
    Ok(fine)
}

/// `|u(χ e^{iλ⟨ℓ,·⟩})|` for one `λ`.
pub fn windowed_transform(
    target: &ProbeTarget<'_>,
    base: &BasePair,
    direction: Covector,
    opts: &ProbeOptions,
    lambda: f64,
) -> Result<f64> {
    opts.validate()?;
    let l = normalize(direction)?;
    match target {
        ProbeTarget::ModeSum { catalog, reference } => {
            let samples = match catalog.backend() {
                Backend::NumericSl => Some(
                    (0..catalog.len())
                        .map(|j| catalog.mode_samples(j))
                        .collect::<Result<Vec<_>>>()?,
                ),
                Backend::AnalyticCylinder => None,
            };
            mode_sum_transform(catalog, *reference, samples.as_deref(), base, &l, opts, lambda)
        }
        ProbeTarget::GaussianBlob { center, width } => {
            if !(*width > 0.0) {
                return Err(invalid!("blob width must be positive"));
            }
            let rule = GaussLegendre::new(16);
            let coords = [base.p.0, base.p.1, base.q.0, base.q.1];
            let mut acc = C64::new(1.0, 0.0);
            for i in 0..4 {
                let chi = Bump::with_sharpness(coords[i], opts.half_width, 1.0, opts.sharpness)?;
                acc *= gaussian_factor(&rule, &chi, center[i], *width, lambda * l[i])?;
            }
            Ok(acc.norm())
        }
    }
}

/// Largest `λ` admitted by the cutoff rule `λ ≤ J / (4a)` for a mode sum.
pub fn cutoff_lambda(target: &ProbeTarget<'_>, opts: &ProbeOptions) -> f64 {
    match target {
        ProbeTarget::ModeSum { catalog, .. } => catalog.len() as f64 / (4.0 * opts.half_width),
        ProbeTarget::GaussianBlob { .. } => f64::INFINITY,
    }
}

/// Relative roundoff of the oscillatory quadratures.
const ROUNDOFF: f64 = 1e-14;

/// Size of `u(χ e^{iλ⟨ℓ,·⟩})` when every phase is ignored, the scale against
/// which quadrature roundoff is measured.
fn noise_scale(target: &ProbeTarget<'_>, opts: &ProbeOptions) -> Result<f64> {
    let chi = Bump::with_sharpness(0.0, opts.half_width, 1.0, opts.sharpness)?.l1_norm();
    Ok(match target {
        ProbeTarget::ModeSum { catalog, reference } => {
            let sum: f64 = catalog
                .omegas()
                .iter()
                .map(|&w| {
                    let n = match reference {
                        Reference::Ground => 0.0,
                        Reference::Kms { beta } => bose_occupation(*beta, w),
                    };
                    (1.0 + 2.0 * n) / (2.0 * w)
                })
                .sum();
            sum * chi.powi(4) / catalog.circumference()
        }
        ProbeTarget::GaussianBlob { .. } => chi.powi(4),
    })
}

/// Fits the decay order of `|u(χ e^{iλ⟨ℓ,·⟩})|` over the upper half of the
/// `λ` grid and classifies the direction.
pub fn windowed_decay(
    target: &ProbeTarget<'_>,
    base: &BasePair,
    direction: Covector,
    opts: &ProbeOptions,
) -> Result<DirectionProbe> {
    opts.validate()?;
    let l = normalize(direction)?;
    let limit = cutoff_lambda(target, opts);
    let all = opts.lambdas();
    let lambdas: Vec<f64> = all.iter().copied().filter(|&v| v <= limit * (1.0 + 1e-12)).collect();
    let mut diagnostic = None;
    if lambdas.len() < all.len() {
        diagnostic = Some(alloc::format!(
            "lambda grid truncated at {limit:.3} by the mode cutoff ({} of {} points kept)",
            lambdas.len(),
            all.len()
        ));
    }
    let samples = match target {
        ProbeTarget::ModeSum { catalog, .. } if catalog.backend() == Backend::NumericSl => Some(
            (0..catalog.len())
                .map(|j| catalog.mode_samples(j))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    let magnitudes = lambdas
        .iter()
        .map(|&lam| match target {
            ProbeTarget::ModeSum { catalog, reference } => {
                mode_sum_transform(catalog, *reference, samples.as_deref(), base, &l, opts, lam)
            }
            _ => windowed_transform(target, base, l, opts, lam),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut probe = DirectionProbe {
        base: base.clone(),
        direction: l,
        half_width: opts.half_width,
        lambdas,
        magnitudes,
        nu: f64::NAN,
        fit_residual: f64::NAN,
        floor_reached: false,
        classification: Classification::Inconclusive,
        diagnostic,
    };
    if probe.lambdas.len() < 4 {
        return Ok(probe);
    }
    let peak = probe.magnitudes.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        probe.diagnostic = Some("transform vanishes on the whole grid".into());
        return Ok(probe);
    }
    let floor = (opts.noise_floor * peak).max(ROUNDOFF * noise_scale(target, opts)?);
    let n = probe.lambdas.len();
    if let Some(c) = probe.magnitudes.iter().position(|&m| m < floor) {
        // Decay into the noise floor: the order is at least the slope needed
        // to get there from the start of the grid.
        probe.floor_reached = true;
        let c = c.max(1);
        probe.nu = (probe.magnitudes[0] / floor).ln() / (probe.lambdas[c] / probe.lambdas[0]).ln();
        probe.fit_residual = 0.0;
    } else {
        let fit: LineFit = log_log_slope(&probe.lambdas[n / 2..], &probe.magnitudes[n / 2..])
            .ok_or_else(|| invalid!("decay fit needs distinct lambda values"))?;
        probe.nu = -fit.slope;
        probe.fit_residual = fit.rms_residual;
    }
    probe.classification = if probe.nu >= opts.regular_threshold {
        Classification::Regular
    } else if probe.nu <= opts.singular_threshold {
        Classification::Singular
    } else {
        Classification::Inconclusive
    };
    Ok(probe)
}

/// Null cone data at a base point of a static metric `g00 dt² − h dx²`,
/// with the metric treated as constant across the probed patch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSpec {
    pub g00: f64,
    pub h: f64,
    /// Spatial period; `None` for the real line.
    pub circumference: Option<f64>,
    /// Relative tolerance of the geometric tests.
    pub tolerance: f64,
}

impl ConeSpec {
    pub fn new(g00: f64, h: f64, circumference: Option<f64>) -> Result<Self> {
        if !(g00 > 0.0 && h > 0.0 && g00.is_finite() && h.is_finite()) {
            return Err(invalid!("cone metric needs positive g00 and h"));
        }
        if let Some(l) = circumference {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid!("circumference must be positive"));
            }
        }
        let cone = Self {
            g00,
            h,
            circumference,
            tolerance: 1e-9,
        };
        for k in cone.future_generators().iter().chain(cone.past_generators().iter()) {
            let n = cone.norm_squared(*k);
            if n.abs() > 1e-12 {
                return Err(Error::Inconsistent(alloc::format!("null generator has g(k,k) = {n:e}")));
            }
        }
        Ok(cone)
    }

    /// Flat cylinder of circumference `L`.
    pub fn cylinder(circumference: f64) -> Result<Self> {
        Self::new(1.0, 1.0, Some(circumference))
    }

    /// `g^{ab} k_a k_b`.
    pub fn norm_squared(&self, k: [f64; 2]) -> f64 {
        k[0] * k[0] / self.g00 - k[1] * k[1] / self.h
    }

    /// Unit-time-component future-pointing null covectors `(1, ±√(h/g00))`.
    pub fn future_generators(&self) -> [[f64; 2]; 2] {
        let s = (self.h / self.g00).sqrt();
        [[1.0, s], [1.0, -s]]
    }

    pub fn past_generators(&self) -> [[f64; 2]; 2] {
        let s = (self.h / self.g00).sqrt();
        [[-1.0, -s], [-1.0, s]]
    }

    /// Coordinate speed of light `√(g00/h)`.
    pub fn light_speed(&self) -> f64 {
        (self.g00 / self.h).sqrt()
    }

    pub fn is_future_null(&self, k: [f64; 2]) -> bool {
        let scale = k[0] * k[0] / self.g00 + k[1] * k[1] / self.h;
        scale > 0.0 && self.norm_squared(k).abs() <= self.tolerance * scale && k[0] > 0.0
    }

    /// Separation vectors `q − p` (over spatial images) that are null or zero.
    fn separations(&self, p: Point, q: Point) -> Vec<(f64, f64)> {
        let dt = q.0 - p.0;
        let dx = q.1 - p.1;
        let scale = 1.0 + dt.abs() + dx.abs();
        let c = self.light_speed();
        let images: Vec<f64> = match self.circumference {
            None => alloc::vec![dx],
            Some(l) => {
                let reach = (dt.abs() * c / l).ceil() as i64 + 1;
                (-reach..=reach).map(|n| dx + n as f64 * l).collect()
            }
        };
        images
            .into_iter()
            .filter(|&d| (dt.abs() * c - d.abs()).abs() <= self.tolerance * scale)
            .map(|d| (dt, d))
            .collect()
    }
}

/// Prediction of the Hadamard singular set at base pair `(p, q)`:
/// `ℓ = (k; −k')` is singular iff `k` is future-pointing null, `k' = k`
/// (trivial transport on the flat cylinder) and either `p = q` or `p, q` are
/// joined by a null geodesic to which `k` is conormal.
pub fn cone_classify(cone: &ConeSpec, base: &BasePair, l: Covector) -> Classification {
    let k = [l[0], l[1]];
    let kp = [-l[2], -l[3]];
    let scale = l.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 || !cone.is_future_null(k) {
        return Classification::Regular;
    }
    if (k[0] - kp[0]).abs() > cone.tolerance * scale || (k[1] - kp[1]).abs() > cone.tolerance * scale {
        return Classification::Regular;
    }
    for (dt, dx) in cone.separations(base.p, base.q) {
        let zero = dt.abs() + dx.abs() <= cone.tolerance;
        // Tangent k^♯ = (ζ/g00, −ξ/h) must be parallel to (dt, dx).
        let sharp = [k[0] / cone.g00, -k[1] / cone.h];
        let cross = sharp[0] * dx - sharp[1] * dt;
        if zero || cross.abs() <= cone.tolerance * scale * (dt.abs() + dx.abs()) {
            return Classification::Singular;
        }
    }
    Classification::Regular
}

/// Closed-form embeddings whose conormal bundles are tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PullbackMap {
    /// Static worldline `t ↦ (t, x)`.
    Worldline,
    /// Pair of times on one worldline `(t, t') ↦ ((t, x), (t', x))`.
    WorldlinePair,
    /// Equal-time diagonal `y ↦ ((t0, y), (t0, y))`.
    EqualTimeDiagonal,
}

impl PullbackMap {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "worldline" | "gamma_x" => Ok(PullbackMap::Worldline),
            "worldline_pair" | "gamma2_x" => Ok(PullbackMap::WorldlinePair),
            "equal_time_diagonal" | "gamma_t0" => Ok(PullbackMap::EqualTimeDiagonal),
            other => Err(invalid!("unknown map descriptor `{other}`")),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PullbackMap::Worldline => "worldline",
            PullbackMap::WorldlinePair => "worldline_pair",
            PullbackMap::EqualTimeDiagonal => "equal_time_diagonal",
        }
    }

    /// Tangent vectors of the image in `(t, x; t', x')` coordinates.
    pub fn tangents(&self) -> Vec<Covector> {
        match self {
            PullbackMap::Worldline => alloc::vec![[1.0, 0.0, 0.0, 0.0]],
            PullbackMap::WorldlinePair => alloc::vec![[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]],
            PullbackMap::EqualTimeDiagonal => alloc::vec![[0.0, 1.0, 0.0, 1.0]],
        }
    }

    /// Whether `ℓ` annihilates every tangent vector.
    pub fn is_conormal(&self, l: Covector, tolerance: f64) -> bool {
        let scale = l.iter().map(|v| v.abs()).fold(0.0, f64::max);
        self.tangents()
            .iter()
            .all(|t| (0..4).map(|i| t[i] * l[i]).sum::<f64>().abs() <= tolerance * scale)
    }
}

/// A closed cone of covectors on `M × M`, given by its extreme rays.
#[derive(Clone, Debug, PartialEq)]
pub enum CovectorCone {
    /// Coincidence singular set `{(k; −k) : k future-pointing null}`.
    Hadamard(ConeSpec),
    /// Positive hull of the listed rays.
    Rays(Vec<Covector>),
}

impl CovectorCone {
    pub fn generators(&self) -> Vec<Covector> {
        match self {
            CovectorCone::Hadamard(c) => c
                .future_generators()
                .iter()
                .map(|k| [k[0], k[1], -k[0], -k[1]])
                .collect(),
            CovectorCone::Rays(r) => r.clone(),
        }
    }
}

/// Whether a conormal bundle meets a cone, with a witness if it does.
#[derive(Clone, Debug, PartialEq)]
pub struct Transversality {
    pub disjoint: bool,
    pub witness: Option<Covector>,
}

/// Intersects the conormal bundle of `map` with `cone`. The Hadamard cone is
/// a union of rays, so the intersection is nontrivial iff a ray is conormal.
pub fn conormal_transversality(map: PullbackMap, cone: &CovectorCone) -> Transversality {
    for g in cone.generators() {
        if g.iter().any(|v| *v != 0.0) && map.is_conormal(g, 1e-12) {
            return Transversality {
                disjoint: false,
                witness: Some(g),
            };
        }
    }
    Transversality {
        disjoint: true,
        witness: None,
    }
}
