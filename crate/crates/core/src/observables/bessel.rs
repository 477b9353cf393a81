//! Modified Bessel functions of the second kind and a two-parameter
//! `A K0(x/ξ)` fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn poly(t: f64, c: &[f64]) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * t + k)
}

fn bessel_i0(x: f64) -> f64 {
    let t = (x / 3.75).powi(2);
    poly(t, &[1.0, 3.5156229, 3.0899424, 1.2067492, 0.2659732, 0.0360768, 0.0045813])
}

fn bessel_i1(x: f64) -> f64 {
    let t = (x / 3.75).powi(2);
    x * poly(t, &[0.5, 0.87890594, 0.51498869, 0.15084934, 0.02658733, 0.00301532, 0.00032411])
}

/// `K0(x)` for `x > 0`, relative error below about `1e-7`.
pub fn bessel_k0(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 2.0 {
        let t = (x / 2.0).powi(2);
        -(x / 2.0).ln() * bessel_i0(x)
            + poly(t, &[-0.57721566, 0.42278420, 0.23069756, 0.03488590, 0.00262698, 0.00010750, 0.0000074])
    } else {
        let t = 2.0 / x;
        (-x).exp() / x.sqrt()
            * poly(t, &[1.25331414, -0.07832358, 0.02189568, -0.01062446, 0.00587872, -0.00251540, 0.00053208])
    }
}

/// `K1(x)` for `x > 0`.
pub fn bessel_k1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 2.0 {
        let t = (x / 2.0).powi(2);
        (x * (x / 2.0).ln() * bessel_i1(x)
            + poly(t, &[1.0, 0.15443144, -0.67278579, -0.18156897, -0.01919402, -0.00110404, -0.00004686]))
            / x
    } else {
        let t = 2.0 / x;
        (-x).exp() / x.sqrt()
            * poly(t, &[1.25331414, 0.23498619, -0.03655620, 0.01504268, -0.00780353, 0.00325614, -0.00068245])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselFit {
    pub amplitude: f64,
    pub xi: f64,
    /// Root-mean-square residual divided by the root-mean-square data.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BesselFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * bessel_k0(x / self.xi)
    }
}

const MAX_ITER: usize = 500;

fn cost(x: &[f64], y: &[f64], w: &[f64], a: f64, xi: f64) -> f64 {
    x.iter().zip(y).zip(w).map(|((&x, &y), &w)| w * (y - a * bessel_k0(x / xi)).powi(2)).sum()
}

fn best_amplitude(x: &[f64], y: &[f64], w: &[f64], xi: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for ((&x, &y), &w) in x.iter().zip(y).zip(w) {
        let k = bessel_k0(x / xi);
        num += w * y * k;
        den += w * k * k;
    }
    if den > 0.0 { num / den } else { 0.0 }
}

/// Least-squares fit of `A K0(x/ξ)` to positive abscissae by
/// Levenberg-Marquardt, started from the better of the tail slope and a
/// log-spaced scan of ξ.
pub fn fit_k0(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<BesselFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Analysis(format!("need at least two points, got {}", x.len())));
    }
    if x.iter().any(|&v| !(v > 0.0 && v.is_finite())) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Analysis("fit data must be finite with positive distances".into()));
    }
    let ones = vec![1.0; x.len()];
    let w = weights.unwrap_or(&ones);
    let scale: f64 = (y.iter().zip(w).map(|(v, w)| w * v * v).sum::<f64>() / w.iter().sum::<f64>()).sqrt();
    if scale == 0.0 {
        return Err(Error::Analysis("fit data are identically zero".into()));
    }

    let xmax = x.iter().copied().fold(0.0, f64::max);
    let xmin = x.iter().copied().fold(f64::INFINITY, f64::min);
    // ln|y| + ln(x)/2 ≈ const - x/ξ in the tail
    let tail: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v.abs() > 1e-12 * scale)
        .map(|(&x, &v)| (x, v.abs().ln() + 0.5 * x.ln()))
        .collect();
    let mut xi = xmax;
    if tail.len() >= 2 {
        let n = tail.len() as f64;
        let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
        let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 && sxy < 0.0 {
            xi = -sxx / sxy;
        }
    }
    let (lo, hi) = (0.05 * xmin, 100.0 * xmax);
    xi = xi.clamp(lo, hi);
    let profile = |xi: f64| cost(x, y, w, best_amplitude(x, y, w, xi), xi);
    let mut best = profile(xi);
    for k in 0..=64 {
        let t = lo * (hi / lo).powf(k as f64 / 64.0);
        let c = profile(t);
        if c < best {
            best = c;
            xi = t;
        }
    }
    let mut a = best_amplitude(x, y, w, xi);
    let mut u = xi.ln();
    let mut c = cost(x, y, w, a, xi);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITER {
        iterations += 1;
        let xi = u.exp();
        // normal equations in (A, ln ξ)
        let (mut h00, mut h01, mut h11, mut g0, mut g1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&x, &y), &w) in x.iter().zip(y).zip(w) {
            let z = x / xi;
            let k0 = bessel_k0(z);
            let ja = k0;
            let ju = a * bessel_k1(z) * z;
            let r = y - a * k0;
            h00 += w * ja * ja;
            h01 += w * ja * ju;
            h11 += w * ju * ju;
            g0 += w * ja * r;
            g1 += w * ju * r;
        }
        let mut improved = false;
        for _ in 0..30 {
            let (d00, d11) = (h00 * (1.0 + lambda), h11 * (1.0 + lambda));
            let det = d00 * d11 - h01 * h01;
            if det.abs() < 1e-300 {
                lambda *= 10.0;
                continue;
            }
            let da = (g0 * d11 - g1 * h01) / det;
            let du = (d00 * g1 - h01 * g0) / det;
            let (na, nu) = (a + da, (u + du).clamp(-20.0, 20.0));
            let nc = cost(x, y, w, na, nu.exp());
            if nc.is_finite() && nc <= c {
                let rel = (c - nc) / c.max(1e-300);
                a = na;
                u = nu;
                c = nc;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if rel < 1e-12 || (da.abs() < 1e-9 * a.abs().max(1e-300) && du.abs() < 1e-9) {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved || c == 0.0 {
            converged = true;
        }
        if converged {
            break;
        }
    }
    let wsum: f64 = w.iter().sum();
    let residual = (c / wsum).sqrt() / scale;
    Ok(BesselFit { amplitude: a, xi: u.exp(), residual, iterations, converged })
}
