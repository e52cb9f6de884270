//! Independent estimates of the ground-state `Q` function on an ultrastatic
//! cylinder, used to cross-check the atomic spectral measure.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Cylinder frequencies `ω_n = √((2πn/L)² + m²)` for all `n` with
/// `ω_n < bound`.
fn cylinder_frequencies(circumference: f64, mass: f64, bound: f64) -> Vec<f64> {
    let k = 2.0 * PI / circumference;
    let n_max = (bound / k).ceil() as i64 + 1;
    (-n_max..=n_max)
        .map(|n| ((k * n as f64).powi(2) + mass * mass).sqrt())
        .filter(|&w| w < bound)
        .collect()
}

/// `Q(u) = Σ_{ω_n < u} ω_n / (2πL)`, the closed form of the step function
/// from the dispersion relation alone.
pub fn closed_form_q(circumference: f64, mass: f64, u: f64) -> f64 {
    cylinder_frequencies(circumference, mass, u).iter().sum::<f64>() / (2.0 * PI * circumference)
}

/// `Q(u)` from a Gaussian-tapered FFT of the pulled-back point-split energy
/// density `F(s) = Σ_n ω_n/(2L) e^{−iω_n s}`.
///
/// The taper broadens each atom into a Gaussian of width `1/σ` in frequency;
/// the mass below `u` is a Riemann sum over the FFT grid. Accurate while every
/// `u` keeps several widths of distance from the atoms.
pub fn tapered_fft_q(circumference: f64, mass: f64, us: &[f64]) -> Vec<f64> {
    let u_top = us.iter().cloned().fold(0.0, f64::max);
    let omegas = cylinder_frequencies(circumference, mass, u_top + 15.0);
    let (half_span, sigma, n) = (1000.0, 100.0, 1usize << 15);
    let dt = 2.0 * half_span / n as f64;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|i| {
            let s = -half_span + i as f64 * dt;
            let f: Complex64 = omegas
                .iter()
                .map(|&w| Complex64::from_polar(w / (2.0 * circumference), -w * s))
                .sum();
            f * (-(s * s) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    // Unnormalized inverse transform: Σ x_i e^{+2πi k i/N}.
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let dzeta = 2.0 * PI / (n as f64 * dt);
    let spectrum: Vec<(f64, f64)> = buf
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            let zeta = kk * dzeta;
            // s_i = −S + i·dt, so F̂(ζ_k) = dt e^{−iζ_k S} X_k.
            let value = (x * Complex64::from_polar(dt, -zeta * half_span)).re;
            (zeta, value)
        })
        .collect();
    us.iter()
        .map(|&u| spectrum.iter().filter(|p| p.0 < u).map(|p| p.1).sum::<f64>() * dzeta / (2.0 * PI * PI))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let l = 2.0 * PI;
        assert_eq!(closed_form_q(l, 1.0, 0.5), 0.0);
        let expect = (1.0 + 2.0 * 2f64.sqrt()) / (4.0 * PI * PI);
        assert!((closed_form_q(l, 1.0, 1.5) - expect).abs() <= 1e-15);
    }

    #[test]
    fn fft_oracle_tracks_closed_form() {
        let l = 2.0 * PI;
        let us = [0.5, 1.5, 2.5, 3.5];
        let fft = tapered_fft_q(l, 1.0, &us);
        for (u, q) in us.iter().zip(fft) {
            assert!((q - closed_form_q(l, 1.0, *u)).abs() <= 1e-6, "{u}: {q}");
        }
    }
}
