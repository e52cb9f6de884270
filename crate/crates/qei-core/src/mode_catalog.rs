//! Spatial mode decompositions of the Klein–Gordon operator on `R × S¹`.
//!
//! For a static metric `g00 dt² − h dx²` the separated equation is
//! `K u = ω² u` with
//! `K u = −g00 (g00 h)^{−1/2} (p u')' + m² g00 u`, `p = (g00/h)^{1/2}`,
//! which is self-adjoint for the weight `w = (h/g00)^{1/2}`. Complex mode
//! solutions are `φ_j(t,x) = (2ω_j)^{−1/2} e^{−iω_j t} u_j(x)` and the field is
//! `Φ = Σ_j (a_j φ_j + a_j† φ̄_j)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Float;

use crate::{error::invalid, Error, Result, C64};

/// Time-independent metric data on a uniform periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticGeometry {
    circumference: f64,
    mass: f64,
    g00: Vec<f64>,
    h: Vec<f64>,
    ultrastatic: bool,
}

impl StaticGeometry {
    pub fn new(circumference: f64, mass: f64, g00: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if !(circumference > 0.0 && circumference.is_finite()) {
            return Err(invalid!("circumference must be positive, got {circumference}"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid!("mass must be positive, got {mass}"));
        }
        if g00.len() != h.len() {
            return Err(invalid!("g00 has {} samples but h has {}", g00.len(), h.len()));
        }
        if g00.len() < 4 {
            return Err(invalid!("grid needs at least 4 points, got {}", g00.len()));
        }
        if let Some(i) = g00.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid!("g00 must be positive, sample {i} is {}", g00[i]));
        }
        if let Some(i) = h.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid!("h must be positive, sample {i} is {}", h[i]));
        }
        let ultrastatic = g00.iter().chain(&h).all(|&v| v == 1.0);
        Ok(Self { circumference, mass, g00, h, ultrastatic })
    }

    /// `g00 ≡ 1`, `h ≡ 1` on `grid` points.
    pub fn ultrastatic(circumference: f64, mass: f64, grid: usize) -> Result<Self> {
        Self::new(circumference, mass, alloc::vec![1.0; grid], alloc::vec![1.0; grid])
    }

    /// Samples `g00` and `h` from functions of `x ∈ [0, L)`.
    pub fn from_fns(
        circumference: f64,
        mass: f64,
        grid: usize,
        g00: impl Fn(f64) -> f64,
        h: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let dx = circumference / grid as f64;
        let xs = (0..grid).map(|i| i as f64 * dx);
        Self::new(circumference, mass, xs.clone().map(&g00).collect(), xs.map(&h).collect())
    }

    pub fn circumference(&self) -> f64 {
        self.circumference
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn grid_len(&self) -> usize {
        self.g00.len()
    }

    pub fn spacing(&self) -> f64 {
        self.circumference / self.g00.len() as f64
    }

    pub fn g00(&self) -> &[f64] {
        &self.g00
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn is_ultrastatic(&self) -> bool {
        self.ultrastatic
    }

    pub fn min_sqrt_g00(&self) -> f64 {
        self.g00.iter().fold(f64::INFINITY, |a, &b| a.min(b)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    AnalyticCylinder,
    NumericSl,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::AnalyticCylinder => "analytic-cylinder",
            Backend::NumericSl => "numeric-sl",
        }
    }
}

/// Value and first derivative of a spatial mode function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialJet {
    pub u: C64,
    pub du: C64,
}

/// Frame components of a complex mode solution `φ_j` at a spacetime point:
/// `v = φ_j`, `d0 = e_0 φ_j = g00^{−1/2} ∂_t φ_j`, `d1 = e_1 φ_j = h^{−1/2} ∂_x φ_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionJet {
    pub v: C64,
    pub d0: C64,
    pub d1: C64,
}

impl SolutionJet {
    pub fn conj(&self) -> Self {
        Self {
            v: self.v.conj(),
            d0: self.d0.conj(),
            d1: self.d1.conj(),
        }
    }
}

/// Spectral data `{ω_j, u_j}` of `K` together with the grid used for spatial
/// quadrature.
#[derive(Clone, Debug)]
pub struct ModeCatalog {
    mass: f64,
    circumference: f64,
    omegas: Vec<f64>,
    wavenumbers: Option<Vec<i64>>,
    backend: Backend,
    g00: Vec<f64>,
    h: Vec<f64>,
    /// Numeric backend only: `u_j(x_i)` and `u_j'(x_i)`, indexed `[j][i]`.
    samples: Vec<Vec<C64>>,
    derivatives: Vec<Vec<C64>>,
    eigen_residual: f64,
}

impl ModeCatalog {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn circumference(&self) -> f64 {
        self.circumference
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn omega(&self, j: usize) -> Result<f64> {
        self.omegas.get(j).copied().ok_or(Error::ModeOutOfRange { index: j, count: self.len() })
    }

    /// Integer wavenumbers `n_j` (cylinder backend only).
    pub fn wavenumbers(&self) -> Option<&[i64]> {
        self.wavenumbers.as_deref()
    }

    /// Worst relative eigen-residual (0 for the analytic backend).
    pub fn eigen_residual(&self) -> f64 {
        self.eigen_residual
    }

    pub fn grid_len(&self) -> usize {
        self.g00.len()
    }

    pub fn spacing(&self) -> f64 {
        self.circumference / self.g00.len() as f64
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn grid_points(&self) -> Vec<f64> {
        (0..self.grid_len()).map(|i| self.grid_point(i)).collect()
    }

    pub fn g00_samples(&self) -> &[f64] {
        &self.g00
    }

    pub fn h_samples(&self) -> &[f64] {
        &self.h
    }

    /// Sturm–Liouville weight `w(x_i) = √(h/g00)`.
    pub fn weight_samples(&self) -> Vec<f64> {
        self.g00.iter().zip(&self.h).map(|(g, h)| (h / g).sqrt()).collect()
    }

    /// `√h(x_i) Δx`, the quadrature weights of `dμ`.
    pub fn measure_weights(&self) -> Vec<f64> {
        let dx = self.spacing();
        self.h.iter().map(|h| h.sqrt() * dx).collect()
    }

    pub fn check_mode(&self, j: usize) -> Result<()> {
        if j < self.len() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange { index: j, count: self.len() })
        }
    }

    /// Grid index of `x`, wrapped periodically. Errors if `x` is off-grid.
    pub fn grid_index(&self, x: f64) -> Result<usize> {
        let dx = self.spacing();
        let wrapped = num_traits::Euclid::rem_euclid(&x, &self.circumference);
        let r = wrapped / dx;
        let i = r.round();
        if (r - i).abs() > 1e-8 {
            return Err(Error::OffGrid { x });
        }
        Ok((i as usize) % self.grid_len())
    }

    /// `(g00(x), h(x))`; any `x` on the cylinder, grid points otherwise.
    pub fn metric_at(&self, x: f64) -> Result<(f64, f64)> {
        match self.backend {
            Backend::AnalyticCylinder => Ok((1.0, 1.0)),
            Backend::NumericSl => {
                let i = self.grid_index(x)?;
                Ok((self.g00[i], self.h[i]))
            }
        }
    }

    fn wavenumber(&self, j: usize) -> f64 {
        let n = self.wavenumbers.as_ref().map(|w| w[j]).unwrap_or(0);
        2.0 * PI * n as f64 / self.circumference
    }

    /// `u_j(x)` and `u_j'(x)`.
    pub fn spatial_jet(&self, j: usize, x: f64) -> Result<SpatialJet> {
        self.check_mode(j)?;
        match self.backend {
            Backend::AnalyticCylinder => {
                let k = self.wavenumber(j);
                let u = C64::from_polar(1.0 / self.circumference.sqrt(), k * x);
                Ok(SpatialJet { u, du: u * C64::new(0.0, k) })
            }
            Backend::NumericSl => {
                let i = self.grid_index(x)?;
                Ok(SpatialJet {
                    u: self.samples[j][i],
                    du: self.derivatives[j][i],
                })
            }
        }
    }

    /// `u_j(x_i)` on the whole grid.
    pub fn mode_samples(&self, j: usize) -> Result<Vec<C64>> {
        self.check_mode(j)?;
        match self.backend {
            Backend::NumericSl => Ok(self.samples[j].clone()),
            Backend::AnalyticCylinder => (0..self.grid_len())
                .map(|i| self.spatial_jet(j, self.grid_point(i)).map(|s| s.u))
                .collect(),
        }
    }

    /// Frame jet of `φ_j` at `(t, x)`.
    pub fn solution_jet(&self, j: usize, t: f64, x: f64) -> Result<SolutionJet> {
        let (g00, h) = self.metric_at(x)?;
        let s = self.spatial_jet(j, x)?;
        Ok(self.assemble_jet(j, t, s, g00, h))
    }

    /// Frame jets of every mode at `(t, x)`.
    pub fn solution_jets(&self, t: f64, x: f64) -> Result<Vec<SolutionJet>> {
        let (g00, h) = self.metric_at(x)?;
        (0..self.len())
            .map(|j| Ok(self.assemble_jet(j, t, self.spatial_jet(j, x)?, g00, h)))
            .collect()
    }

    fn assemble_jet(&self, j: usize, t: f64, s: SpatialJet, g00: f64, h: f64) -> SolutionJet {
        let w = self.omegas[j];
        let phase = C64::from_polar((2.0 * w).sqrt().recip(), -w * t);
        let v = phase * s.u;
        SolutionJet {
            v,
            d0: v * C64::new(0.0, -w) / g00.sqrt(),
            d1: phase * s.du / h.sqrt(),
        }
    }

    /// Restriction to the modes in `indices` (in the given order).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        for &j in indices {
            self.check_mode(j)?;
        }
        let pick = |v: &Vec<Vec<C64>>| {
            if v.is_empty() {
                Vec::new()
            } else {
                indices.iter().map(|&j| v[j].clone()).collect()
            }
        };
        Ok(Self {
            omegas: indices.iter().map(|&j| self.omegas[j]).collect(),
            wavenumbers: self.wavenumbers.as_ref().map(|w| indices.iter().map(|&j| w[j]).collect()),
            samples: pick(&self.samples),
            derivatives: pick(&self.derivatives),
            ..self.clone()
        })
    }
}

/// Cylinder modes `u_n = e^{i2πnx/L}/√L`, `ω_n = √(m² + (2πn/L)²)`, with
/// `n = 0, +1, −1, +2, −2, …` (already ordered by `(ω, |n|, sign)`).
pub fn build_cylinder_catalog(circumference: f64, mass: f64, modes: usize) -> Result<ModeCatalog> {
    if !(circumference > 0.0 && circumference.is_finite()) {
        return Err(invalid!("circumference must be positive, got {circumference}"));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid!("mass must be positive (massless zero mode unsupported), got {mass}"));
    }
    if modes < 1 {
        return Err(invalid!("catalog needs at least one mode"));
    }
    let wavenumbers: Vec<i64> = (0..modes as i64)
        .map(|j| if j % 2 == 1 { (j + 1) / 2 } else { -(j / 2) })
        .collect();
    let omegas = wavenumbers
        .iter()
        .map(|&n| {
            let k = 2.0 * PI * n as f64 / circumference;
            (mass * mass + k * k).sqrt()
        })
        .collect();
    let nmax = wavenumbers.iter().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0);
    let grid = (4 * nmax + 16).max(64);
    Ok(ModeCatalog {
        mass,
        circumference,
        omegas,
        wavenumbers: Some(wavenumbers),
        backend: Backend::AnalyticCylinder,
        g00: alloc::vec![1.0; grid],
        h: alloc::vec![1.0; grid],
        samples: Vec::new(),
        derivatives: Vec::new(),
        eigen_residual: 0.0,
    })
}

/// Tolerance on the relative eigen-residual of the numeric backend.
pub const SL_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Finite-difference Sturm–Liouville catalog of the `modes` lowest eigenpairs.
///
/// Second-order conservative differences with `p_{i+1/2} = (p_i + p_{i+1})/2`;
/// the weighted problem is symmetrized with `W^{−1/2}` and solved densely.
pub fn build_sl_catalog(geom: &StaticGeometry, modes: usize) -> Result<ModeCatalog> {
    if modes < 1 {
        return Err(invalid!("catalog needs at least one mode"));
    }
    let g = geom.grid_len();
    if g < 8 * modes {
        return Err(Error::UnderResolved {
            grid: g,
            modes,
            required: 8 * modes,
        });
    }
    let dx = geom.spacing();
    let m2 = geom.mass * geom.mass;
    let p: Vec<f64> = geom.g00.iter().zip(&geom.h).map(|(a, b)| (a / b).sqrt()).collect();
    let w: Vec<f64> = geom.g00.iter().zip(&geom.h).map(|(a, b)| (b / a).sqrt()).collect();
    let pot: Vec<f64> = geom.g00.iter().zip(&geom.h).map(|(a, b)| m2 * (a * b).sqrt()).collect();
    let half = |i: usize| 0.5 * (p[i] + p[(i + 1) % g]);

    // Symmetric stiffness A (before weighting).
    let mut a = DMatrix::<f64>::zeros(g, g);
    for i in 0..g {
        let ip = (i + 1) % g;
        let im = (i + g - 1) % g;
        let pr = half(i) / (dx * dx);
        let pl = half(im) / (dx * dx);
        a[(i, i)] += pr + pl + pot[i];
        a[(i, ip)] -= pr;
        a[(i, im)] -= pl;
    }
    let isw: Vec<f64> = w.iter().map(|v| v.sqrt().recip()).collect();
    let b = DMatrix::from_fn(g, g, |r, c| a[(r, c)] * isw[r] * isw[c]);
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..g).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut omegas = Vec::with_capacity(modes);
    let mut samples = Vec::with_capacity(modes);
    let mut derivatives = Vec::with_capacity(modes);
    let mut worst = 0.0f64;
    for &idx in order.iter().take(modes) {
        let lam = eig.eigenvalues[idx];
        if !(lam > 0.0) {
            return Err(Error::Inconsistent(alloc::format!("non-positive SL eigenvalue {lam}")));
        }
        let mut u: Vec<f64> = (0..g).map(|i| eig.eigenvectors[(i, idx)] * isw[i] / dx.sqrt()).collect();
        let peak = u.iter().enumerate().fold((0usize, 0.0f64), |best, (i, v)| {
            if v.abs() > best.1.abs() + 1e-12 * best.1.abs().max(1e-300) {
                (i, *v)
            } else {
                best
            }
        });
        if peak.1 < 0.0 {
            u.iter_mut().for_each(|v| *v = -*v);
        }
        // Relative residual of (A u)/w = λ u in the max norm.
        let mut res = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..g {
            let mut au = 0.0;
            for k in [(i + g - 1) % g, i, (i + 1) % g] {
                au += a[(i, k)] * u[k];
            }
            res = res.max((au / w[i] - lam * u[i]).abs());
            scale = scale.max(u[i].abs());
        }
        worst = worst.max(res / (lam * scale));
        let du = (0..g)
            .map(|i| {
                let at = |o: isize| u[((i as isize + o).rem_euclid(g as isize)) as usize];
                C64::new((-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * dx), 0.0)
            })
            .collect();
        omegas.push(lam.sqrt());
        samples.push(u.into_iter().map(|v| C64::new(v, 0.0)).collect());
        derivatives.push(du);
    }
    if !(worst <= SL_RESIDUAL_TOLERANCE) {
        return Err(Error::EigenResidual {
            worst,
            tolerance: SL_RESIDUAL_TOLERANCE,
        });
    }
    Ok(ModeCatalog {
        mass: geom.mass,
        circumference: geom.circumference,
        omegas,
        wavenumbers: None,
        backend: Backend::NumericSl,
        g00: geom.g00.clone(),
        h: geom.h.clone(),
        samples,
        derivatives,
        eigen_residual: worst,
    })
}

/// `max_{j,k} |⟨u_j, u_k⟩_w − δ_jk|` on the catalog grid.
pub fn orthonormality_residual(cat: &ModeCatalog) -> f64 {
    let w = cat.weight_samples();
    let dx = cat.spacing();
    let samples: Vec<Vec<C64>> = (0..cat.len()).map(|j| cat.mode_samples(j).unwrap_or_default()).collect();
    let mut worst = 0.0f64;
    for j in 0..cat.len() {
        for k in j..cat.len() {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..w.len() {
                acc += samples[j][i].conj() * samples[k][i] * w[i];
            }
            acc *= dx;
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

/// Discrete symplectic form `σ(u,v) = Σ_i √h (u e_0 v̇ − v e_0 u̇) Δx` of the real
/// solutions `u = Σ_j (c_j φ_j + c.c.)` and `v = Σ_j (d_j φ_j + c.c.)` at time `t`.
pub fn symplectic_form(cat: &ModeCatalog, c: &[C64], d: &[C64], t: f64) -> Result<f64> {
    if c.len() > cat.len() || d.len() > cat.len() {
        return Err(Error::ModeOutOfRange {
            index: c.len().max(d.len()),
            count: cat.len(),
        });
    }
    let dx = cat.spacing();
    let mut acc = 0.0;
    for i in 0..cat.grid_len() {
        let x = cat.grid_point(i);
        let (g00, h) = (cat.g00[i], cat.h[i]);
        let (mut u, mut du, mut v, mut dv) = (0.0, 0.0, 0.0, 0.0);
        for j in 0..c.len().max(d.len()) {
            let jet = cat.solution_jet(j, t, x)?;
            // e_0 φ carries g00^{−1/2}; undo it to get ∂_t.
            let dt = jet.d0 * g00.sqrt();
            if let Some(cj) = c.get(j) {
                u += 2.0 * (cj * jet.v).re;
                du += 2.0 * (cj * dt).re;
            }
            if let Some(dj) = d.get(j) {
                v += 2.0 * (dj * jet.v).re;
                dv += 2.0 * (dj * dt).re;
            }
        }
        acc += h.sqrt() / g00.sqrt() * (u * dv - v * du) * dx;
    }
    Ok(acc)
}

/// `max_j |2σ(Re φ_j, Im φ_j) + 1|` at `t = 0`.
pub fn symplectic_check(cat: &ModeCatalog) -> f64 {
    let dx = cat.spacing();
    let mut worst = 0.0f64;
    for j in 0..cat.len() {
        let mut sigma = 0.0;
        for i in 0..cat.grid_len() {
            let x = cat.grid_point(i);
            let (g00, h) = (cat.g00[i], cat.h[i]);
            let Ok(jet) = cat.solution_jet(j, 0.0, x) else {
                return f64::INFINITY;
            };
            let dt = jet.d0 * g00.sqrt();
            let (a, b) = (jet.v.re, jet.v.im);
            let (da, db) = (dt.re, dt.im);
            sigma += h.sqrt() / g00.sqrt() * (a * db - b * da) * dx;
        }
        worst = worst.max((2.0 * sigma + 1.0).abs());
    }
    worst
}
