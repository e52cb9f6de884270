//! Smooth compactly supported windows and their Fourier data.
//!
//! Fourier transforms follow the convention `f̂(k) = ∫ f(t) e^{ikt} dt`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::{error::invalid, quadrature::GaussLegendre, Certified, Result, C64};

/// Bump window `A · exp(κ − κ / (1 − s²))`, `s = (t − center) / half_width`,
/// supported on `[center − half_width, center + half_width]` with peak `A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub amplitude: f64,
    /// `κ > 0`; larger values give a narrower core and faster Fourier decay.
    pub sharpness: f64,
}

impl Bump {
    pub fn new(center: f64, half_width: f64, amplitude: f64) -> Result<Self> {
        Self::with_sharpness(center, half_width, amplitude, 1.0)
    }

    pub fn with_sharpness(center: f64, half_width: f64, amplitude: f64, sharpness: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid!("bump half-width must be positive, got {half_width}"));
        }
        if !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(invalid!("bump sharpness must be positive, got {sharpness}"));
        }
        if !center.is_finite() || !amplitude.is_finite() {
            return Err(invalid!("bump center and amplitude must be finite"));
        }
        Ok(Self { center, half_width, amplitude, sharpness })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    /// Unit-amplitude profile as a function of the scaled coordinate `s`.
    fn profile(&self, s: f64) -> f64 {
        let d = 1.0 - s * s;
        if d <= 0.0 {
            0.0
        } else {
            (self.sharpness - self.sharpness / d).exp()
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * self.profile((t - self.center) / self.half_width)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = (t - self.center) / self.half_width;
        let d = 1.0 - s * s;
        if d <= 0.0 {
            return 0.0;
        }
        self.eval(t) * (-2.0 * self.sharpness * s / (d * d)) / self.half_width
    }

    /// `t ↦ g(λ t)`.
    pub fn dilated(&self, lambda: f64) -> Self {
        Self {
            center: self.center / lambda,
            half_width: self.half_width / lambda,
            ..*self
        }
    }

    pub fn translated(&self, center: f64) -> Self {
        Self { center, ..*self }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..*self
        }
    }

    /// `∫_0^a p(τ/a) cos(u τ) dτ` with `panels` composite 16-point panels.
    fn half_cosine(&self, rule: &GaussLegendre, u: f64, panels: usize) -> f64 {
        let a = self.half_width;
        rule.integrate(0.0, a, panels, |tau| self.profile(tau / a) * (u * tau).cos())
    }

    fn panels_for(&self, u: f64) -> usize {
        let phase = (u * self.half_width).abs();
        (16.0f64.max((phase / 3.0).ceil())) as usize
    }

    /// Real even part `R(u)` with `ĝ(u) = e^{iuc} R(u)`.
    pub fn fourier_even(&self, u: f64) -> f64 {
        self.fourier_even_with(&GaussLegendre::new(16), u)
    }

    pub(crate) fn fourier_even_with(&self, rule: &GaussLegendre, u: f64) -> f64 {
        2.0 * self.amplitude * self.half_cosine(rule, u, self.panels_for(u))
    }

    /// `ĝ(u) = ∫ g(t) e^{iut} dt`.
    pub fn fourier(&self, u: f64) -> C64 {
        C64::from_polar(1.0, u * self.center) * self.fourier_even(u)
    }

    /// `ĝ(u)` with a panel-doubling error certificate on the modulus.
    pub fn fourier_certified(&self, u: f64) -> (C64, f64) {
        let rule = GaussLegendre::new(16);
        let p = self.panels_for(u);
        let coarse = 2.0 * self.amplitude * self.half_cosine(&rule, u, p);
        let fine = 2.0 * self.amplitude * self.half_cosine(&rule, u, 2 * p);
        (C64::from_polar(1.0, u * self.center) * fine, (fine - coarse).abs())
    }

    /// `∫ g(t) dt`.
    pub fn integral(&self) -> f64 {
        self.fourier_even(0.0)
    }

    /// `‖g²‖_{L¹} = ∫ g(t)² dt`.
    pub fn l1_of_square(&self) -> f64 {
        let rule = GaussLegendre::new(16);
        let a = self.half_width;
        2.0 * self.amplitude * self.amplitude * rule.integrate(0.0, a, 16, |tau| self.profile(tau / a).powi(2))
    }

    /// `‖g‖_{L¹}`.
    pub fn l1_norm(&self) -> f64 {
        self.integral().abs()
    }
}

const LEGENDRE_ORDER: usize = 16;

/// `P_0(s), …, P_15(s)`.
fn legendre_values(s: f64) -> [f64; LEGENDRE_ORDER] {
    let ext = legendre_values_ext(s);
    let mut out = [0.0; LEGENDRE_ORDER];
    out.copy_from_slice(&ext[..LEGENDRE_ORDER]);
    out
}

/// `P_0(s), …, P_16(s)` by the three-term recurrence.
fn legendre_values_ext(s: f64) -> [f64; LEGENDRE_ORDER + 1] {
    let mut p = [0.0; LEGENDRE_ORDER + 1];
    p[0] = 1.0;
    p[1] = s;
    for n in 1..LEGENDRE_ORDER {
        p[n + 1] = ((2 * n + 1) as f64 * s * p[n] - n as f64 * p[n - 1]) / (n + 1) as f64;
    }
    p
}

/// Tabulated tail integrals `T(ζ) = ∫_ζ^∞ |ĝ(u)|² du` of a window.
///
/// `|ĝ|²` is integrated on panels of width `2 / half_width` until it falls
/// below `1e-30` of its peak; inside a panel `T` integrates the degree-15
/// Legendre interpolant through the Gauss nodes. Negative arguments use `|ĝ(−u)| = |ĝ(u)|` for real windows.
#[derive(Clone, Debug)]
pub struct WindowSpectrum {
    window: Bump,
    panel: f64,
    /// `tail_from_edge[k] = ∫_{k·panel}^{U_max} |ĝ|²`, last entry 0.
    tail_from_edge: Vec<f64>,
    /// Legendre coefficients of `|ĝ|²` on each panel, `LEGENDRE_ORDER` each.
    legendre: Vec<f64>,
    l1_of_square: f64,
    quadrature_error: f64,
}

impl WindowSpectrum {
    pub fn new(window: Bump) -> Self {
        let rule = GaussLegendre::new(LEGENDRE_ORDER);
        let mut nodes = Vec::with_capacity(LEGENDRE_ORDER);
        rule.for_each_node(-1.0, 1.0, 1, |s, w| nodes.push((s, w)));
        let basis: Vec<[f64; LEGENDRE_ORDER]> = nodes.iter().map(|&(s, _)| legendre_values(s)).collect();
        let panel = 2.0 / window.half_width;
        let peak = window.integral().powi(2);
        let mut pieces: Vec<f64> = Vec::new();
        let mut legendre: Vec<f64> = Vec::new();
        let max_panels = 20_000usize;
        let mut quiet = 0usize;
        for k in 0..max_panels {
            let lo = panel * k as f64;
            let values: Vec<f64> = nodes
                .iter()
                .map(|&(s, _)| window.fourier_even_with(&rule, lo + 0.5 * panel * (s + 1.0)).powi(2))
                .collect();
            let panel_max = values.iter().copied().fold(0.0, f64::max);
            // c_n = (2n+1)/2 Σ_i w_i f(s_i) P_n(s_i), exact for the interpolant.
            for n in 0..LEGENDRE_ORDER {
                let c: f64 = (0..LEGENDRE_ORDER).map(|i| nodes[i].1 * values[i] * basis[i][n]).sum();
                legendre.push(0.5 * (2 * n + 1) as f64 * c);
            }
            pieces.push(panel * legendre[k * LEGENDRE_ORDER]);
            if panel_max < 1e-30 * peak {
                quiet += 1;
                if quiet >= 4 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        let mut tail_from_edge = alloc::vec![0.0; pieces.len() + 1];
        for k in (0..pieces.len()).rev() {
            tail_from_edge[k] = tail_from_edge[k + 1] + pieces[k];
        }
        let l1_of_square = window.l1_of_square();
        // Parseval: ∫_0^∞ |ĝ|² = π ∫ g².
        let parseval = (tail_from_edge[0] - PI * l1_of_square).abs();
        let (_, fourier_err) = window.fourier_certified(panel * pieces.len() as f64 * 0.5);
        let quadrature_error = parseval + 1e-14 * tail_from_edge[0] + fourier_err.powi(2);
        Self {
            window,
            panel,
            tail_from_edge,
            legendre,
            l1_of_square,
            quadrature_error,
        }
    }

    pub fn window(&self) -> &Bump {
        &self.window
    }

    /// `‖g²‖_{L¹}`.
    pub fn l1_of_square(&self) -> f64 {
        self.l1_of_square
    }

    /// Absolute error certificate of any single `tail` value.
    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    /// Largest frequency covered by the table.
    pub fn cutoff(&self) -> f64 {
        self.panel * (self.tail_from_edge.len() - 1) as f64
    }

    /// `∫_ζ^∞ |ĝ(u)|² du`.
    pub fn tail(&self, zeta: f64) -> f64 {
        if zeta < 0.0 {
            return 2.0 * self.tail_from_edge[0] - self.tail_nonnegative(-zeta);
        }
        self.tail_nonnegative(zeta)
    }

    fn tail_nonnegative(&self, zeta: f64) -> f64 {
        let k = (zeta / self.panel).floor() as usize;
        if k + 1 >= self.tail_from_edge.len() {
            return 0.0;
        }
        // ∫_{s0}^1 P_0 = 1 − s0 and ∫_{s0}^1 P_n = (P_{n−1}(s0) − P_{n+1}(s0)) / (2n+1).
        let s0 = 2.0 * (zeta - self.panel * k as f64) / self.panel - 1.0;
        let p = legendre_values_ext(s0);
        let c = &self.legendre[k * LEGENDRE_ORDER..(k + 1) * LEGENDRE_ORDER];
        let mut partial = c[0] * (1.0 - s0);
        for n in 1..LEGENDRE_ORDER {
            partial += c[n] * (p[n - 1] - p[n + 1]) / (2 * n + 1) as f64;
        }
        self.tail_from_edge[k + 1] + 0.5 * self.panel * partial
    }

    /// `∫ |ĝ(u)|² du` over all of `R` (equals `2π ‖g²‖_{L¹}` by Parseval).
    pub fn total(&self) -> f64 {
        2.0 * self.tail_from_edge[0]
    }

    pub fn certified_tail(&self, zeta: f64) -> Certified {
        Certified::new(self.tail(zeta), self.quadrature_error)
    }
}
