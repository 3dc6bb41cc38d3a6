//! Channel envelopes Ψ_p(t, z) from the probe polariton, field amplitudes
//! and the dark-state residual.

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::ratio_factor;
use crate::error::{Error, Result};
use crate::medium::{derive_coefficients, Direction, Setup};

use super::MCState;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisMethod {
    /// Multiply ψ_l(k) by 1 + iη_{p,l}(k) and transform back.
    Spectral,
    /// Real-space kernel convolution with exponential memory of length 1/ξ_p.
    Kernel,
}

/// Envelopes Ψ_p(t, z) of every channel on the propagation grid, in channel order.
#[derive(Debug, Clone)]
pub struct ChannelEnvelopes {
    pub t: f64,
    pub z: Vec<f64>,
    pub dz: f64,
    pub fields: Vec<Vec<Complex64>>,
}

pub fn synthesize(state: &MCState, setup: &Setup, method: SynthesisMethod) -> Result<ChannelEnvelopes> {
    let coeffs = derive_coefficients(setup, state.t)?;
    let xi_l = coeffs.probe_xi();
    let k0 = setup.medium.k0;
    let grid = &state.grid;
    let probe_field = state.probe_field();
    let fields = match method {
        SynthesisMethod::Spectral => coeffs
            .channels
            .par_iter()
            .enumerate()
            .map(|(p, ch)| {
                if p == coeffs.probe {
                    return probe_field.clone();
                }
                let spec: Vec<Complex64> = grid
                    .wavenumbers()
                    .iter()
                    .zip(&state.probe_spectrum)
                    .map(|(&k, psi)| ratio_factor(ch, xi_l, k, k0) * psi)
                    .collect();
                grid.to_field(&spec)
            })
            .collect(),
        SynthesisMethod::Kernel => {
            let obs = state.observables()?;
            if (xi_l.norm() * obs.gaussian_width()) < 10.0 {
                warn!(
                    "kernel synthesis with ξ_l·l = {:.2} < 10; expect reduced accuracy",
                    xi_l.norm() * obs.gaussian_width()
                );
            }
            let dz = grid.dz();
            let deriv = derivative(&probe_field, dz);
            let scale = 1.0 / (xi_l - I * k0);
            let h: Vec<Complex64> = probe_field
                .iter()
                .zip(&deriv)
                .map(|(f, d)| f + d * scale)
                .collect();
            coeffs
                .channels
                .par_iter()
                .enumerate()
                .map(|(p, ch)| {
                    if p == coeffs.probe {
                        return probe_field.clone();
                    }
                    match ch.direction {
                        Direction::Forward => {
                            let pref = ch.xi * (1.0 - I * k0 / xi_l);
                            let a = ch.xi - I * k0;
                            forward_memory(&h, a, dz)
                                .into_iter()
                                .map(|x| pref * x)
                                .collect()
                        }
                        Direction::Backward => {
                            let pref = ch.xi * (1.0 - I * k0 / xi_l);
                            let a = ch.xi - I * k0;
                            backward_memory(&h, a, dz)
                                .into_iter()
                                .map(|x| pref * x)
                                .collect()
                        }
                    }
                })
                .collect()
        }
    };
    Ok(ChannelEnvelopes {
        t: state.t,
        z: grid.positions(),
        dz: grid.dz(),
        fields,
    })
}

/// Fourth-order central difference on a periodic grid.
fn derivative(f: &[Complex64], dz: f64) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            let at = |o: isize| f[((j as isize + o).rem_euclid(n as isize)) as usize];
            (at(-2) - at(-1) * 8.0 + at(1) * 8.0 - at(2)) / (12.0 * dz)
        })
        .collect()
}

/// Weights (w0, w1) for ∫_0^{dz} e^{−a(dz−s)} h(s) ds with h linear between
/// its end samples h0, h1.
fn linear_weights(a: Complex64, dz: f64) -> (Complex64, Complex64, Complex64) {
    let x = a * dz;
    let e = (-x).exp();
    if x.norm() < 1e-2 {
        // Series in x to avoid cancellation.
        let w0 = 0.5 + x * (-1.0 / 3.0 + x * (1.0 / 8.0 + x * (-1.0 / 30.0 + x * (1.0 / 144.0 - x / 840.0))));
        let w1 = 0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 + x * (-1.0 / 120.0 + x * (1.0 / 720.0 - x / 5040.0))));
        return (e, dz * w0, dz * w1);
    }
    let phi = (1.0 - e) / x;
    (e, (phi - e) / a, (1.0 - phi) / a)
}

/// F(z) = ∫_0^z e^{−a(z−z′)} h(z′) dz′.
fn forward_memory(h: &[Complex64], a: Complex64, dz: f64) -> Vec<Complex64> {
    let (e, w0, w1) = linear_weights(a, dz);
    let mut out = vec![Complex64::new(0.0, 0.0); h.len()];
    for j in 1..h.len() {
        out[j] = e * out[j - 1] + w0 * h[j - 1] + w1 * h[j];
    }
    out
}

/// G(z) = ∫_z^L e^{−a(z′−z)} h(z′) dz′.
fn backward_memory(h: &[Complex64], a: Complex64, dz: f64) -> Vec<Complex64> {
    let (e, w0, w1) = linear_weights(a, dz);
    let n = h.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for j in (0..n - 1).rev() {
        out[j] = e * out[j + 1] + w1 * h[j] + w0 * h[j + 1];
    }
    out
}

/// A_p(t, z) = Ω_p(t) / (√N g_p) · Ψ_p(t, z).
pub fn to_amplitudes(env: &ChannelEnvelopes, setup: &Setup, t: f64) -> Result<Vec<Vec<Complex64>>> {
    let sqrt_n = setup.medium.n_line.sqrt();
    env.fields
        .iter()
        .enumerate()
        .map(|(p, field)| {
            let ratio = setup.rabi(p, t)? / (sqrt_n * setup.channels[p].g);
            Ok(field.iter().map(|x| ratio * x).collect())
        })
        .collect()
}

/// Largest relative L2 distance between the phase-stripped envelopes of any
/// two channels whose controls are on. The dark state requires all of them
/// to coincide.
pub fn dark_residual(env: &ChannelEnvelopes, setup: &Setup) -> Result<f64> {
    let coeffs = derive_coefficients(setup, env.t)?;
    let k0 = setup.medium.k0;
    let stripped: Vec<Vec<Complex64>> = coeffs
        .channels
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_active())
        .map(|(p, c)| {
            let s = -c.direction.sign() * k0;
            env.fields[p]
                .iter()
                .zip(&env.z)
                .map(|(x, &z)| x * Complex64::from_polar(1.0, s * z))
                .collect()
        })
        .collect();
    if stripped.len() < 2 {
        return Err(Error::Precondition(
            "dark residual needs at least two active channels".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for a in 0..stripped.len() {
        for b in a + 1..stripped.len() {
            let num: f64 = stripped[a]
                .iter()
                .zip(&stripped[b])
                .map(|(x, y)| (x - y).norm_sqr())
                .sum();
            let na: f64 = stripped[a].iter().map(|x| x.norm_sqr()).sum();
            let nb: f64 = stripped[b].iter().map(|x| x.norm_sqr()).sum();
            let den = na.max(nb);
            if den == 0.0 {
                return Err(Error::ZeroNorm);
            }
            worst = worst.max((num / den).sqrt());
        }
    }
    Ok(worst)
}
