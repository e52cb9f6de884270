//! Gauss–Legendre rules and composite integration with step-halving
//! certification.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::{error::Error, Certified, Result, C64};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Calls `visit(t, w)` for every node of the composite rule with `panels`
    /// equal panels on `[a, b]`.
    pub fn for_each_node(&self, a: f64, b: f64, panels: usize, mut visit: impl FnMut(f64, f64)) {
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let mid = lo + 0.5 * width;
            let half = 0.5 * width;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                visit(mid + half * x, half * w);
            }
        }
    }

    pub fn integrate(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each_node(a, b, panels, |t, w| acc += w * f(t));
        acc
    }

    pub fn integrate_complex(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> C64,
    ) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        self.for_each_node(a, b, panels, |t, w| acc += f(t) * w);
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite 16-point Gauss–Legendre integration of a real function, doubling
/// the panel count until two successive estimates agree to `rel_tol`
/// (relative to `max(1, |value|)` scaled by `scale`).
///
/// Returns the finer estimate together with the last disagreement as its
/// error certificate.
pub fn integrate_certified(
    a: f64,
    b: f64,
    initial_panels: usize,
    rel_tol: f64,
    scale: f64,
    mut f: impl FnMut(f64) -> f64,
) -> Result<Certified> {
    let rule = GaussLegendre::new(16);
    let mut panels = initial_panels.max(1);
    let mut coarse = rule.integrate(a, b, panels, &mut f);
    for _ in 0..12 {
        panels *= 2;
        let fine = rule.integrate(a, b, panels, &mut f);
        let diff = (fine - coarse).abs();
        if diff <= rel_tol * scale.max(fine.abs()).max(f64::MIN_POSITIVE) {
            return Ok(Certified::new(fine, diff));
        }
        coarse = fine;
    }
    Err(Error::Quadrature {
        disagreement: f64::NAN,
        tolerance: rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the exactness limit for 8 nodes
        let v = rule.integrate(-1.0, 1.0, 1, |x| x.powi(14));
        assert!((v - 2.0 / 15.0).abs() < 1e-15);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = GaussLegendre::new(5);
        assert!(rule.nodes[2].abs() < 1e-16);
        assert!((rule.weights[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn certified_integration_of_oscillatory_function() {
        let c = integrate_certified(0.0, 10.0, 2, 1e-12, 1.0, |t| (3.0 * t).cos()).unwrap();
        assert!((c.value - (30.0f64).sin() / 3.0).abs() < 1e-12);
    }
}
