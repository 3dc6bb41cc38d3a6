//! Shared numerical helpers: continuum-normalized FFTs on a uniform grid,
//! quadrature, moments, interpolation and bracketed root finding.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse transform pair for ψ(k) = (2π)^{-1/2} ∫ e^{-ikz} Ψ(z) dz
/// on the periodic grid z_j = j·dz, j = 0..n.
#[derive(Clone)]
pub struct SpectralTransform {
    n: usize,
    dz: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralTransform {
    pub fn new(n: usize, dz: f64) -> Self {
        let mut planner = FftPlanner::new();
        SpectralTransform {
            n,
            dz,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dz)
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as i64;
        let dk = self.dk();
        (0..n)
            .map(|j| if j < (n + 1) / 2 { j } else { j - n } as f64 * dk)
            .collect()
    }

    pub fn to_spectrum(&self, field: &[Complex64]) -> Vec<Complex64> {
        let mut buf = field.to_vec();
        self.forward.process(&mut buf);
        let scale = self.dz / (2.0 * PI).sqrt();
        buf.iter_mut().for_each(|x| *x *= scale);
        buf
    }

    pub fn to_field(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = self.dk() / (2.0 * PI).sqrt();
        buf.iter_mut().for_each(|x| *x *= scale);
        buf
    }
}

/// Rectangle-rule integral of |f|² on a uniform periodic grid (spectrally
/// accurate for smooth localized data).
pub fn norm_sqr(f: &[Complex64], step: f64) -> f64 {
    f.iter().map(|x| x.norm_sqr()).sum::<f64>() * step
}

/// Relative L2 distance ‖a − b‖ / ‖b‖.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Relative L2 distance between two real profiles.
pub fn relative_l2_real(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Zeroth, first and central second moment of a non-negative density on
/// positions `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
}

pub fn moments(z: &[f64], density: &[f64], step: f64) -> Option<Moments> {
    let mass: f64 = density.iter().sum::<f64>() * step;
    if !(mass > 0.0) {
        return None;
    }
    let mean = z.iter().zip(density).map(|(z, d)| z * d).sum::<f64>() * step / mass;
    let variance = z
        .iter()
        .zip(density)
        .map(|(z, d)| (z - mean).powi(2) * d)
        .sum::<f64>()
        * step
        / mass;
    Some(Moments {
        mass,
        mean,
        variance,
    })
}

/// Linear interpolation of samples on the uniform grid `x0 + i·dx`; zero
/// outside the sampled range.
pub fn interp_uniform(samples: &[Complex64], x0: f64, dx: f64, x: f64) -> Complex64 {
    let s = (x - x0) / dx;
    if s < 0.0 || s > (samples.len() - 1) as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let i = (s.floor() as usize).min(samples.len() - 2);
    let w = s - i as f64;
    samples[i] * (1.0 - w) + samples[i + 1] * w
}

/// Bisection on a sign change of `f` in `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) < tol {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
