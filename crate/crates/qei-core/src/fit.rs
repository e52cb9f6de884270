//! Least-squares line fits used for convergence orders, growth exponents and
//! decay orders.

use num_traits::Float;

/// Fitted line `y ≈ intercept + slope·x` with its root-mean-square residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

/// Ordinary least squares; `None` for fewer than two distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for i in 0..n {
        let r = ys[i] - intercept - slope * xs[i];
        ss += r * r;
    }
    Some(LineFit {
        slope,
        intercept,
        rms_residual: (ss / nf).sqrt(),
    })
}

/// Slope of `ln y` against `ln x`, skipping non-positive samples.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let mut lx = alloc::vec::Vec::with_capacity(xs.len());
    let mut ly = alloc::vec::Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys) {
        if x > 0.0 && y > 0.0 {
            lx.push(x.ln());
            ly.push(y.ln());
        }
    }
    fit_line(&lx, &ly)
}
