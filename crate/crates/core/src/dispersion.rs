//! Dispersion relation of the coupled MC field and the design quantities
//! derived from it: group velocity, second-order dispersion, stopping
//! condition, optimal detunings and spreading time.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::medium::{Channel, ChannelCoeffs, DerivedCoeffs, Direction};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative gate below which a stopping residual counts as zero.
pub const STATIONARY_GATE: f64 = 1e-9;

/// Coupling function η_{p,l}(k, k_o) between channel `p` and the probe.
pub fn eta(ch: &ChannelCoeffs, xi_l: Complex64, k: f64, k0: f64) -> Complex64 {
    match ch.direction {
        Direction::Forward => {
            let q = k - k0;
            (1.0 / xi_l - 1.0 / ch.xi) * q / (1.0 + I * q / ch.xi)
        }
        Direction::Backward => {
            let num = (k - k0) / xi_l + (k + k0) / ch.xi;
            num / (1.0 - I * (k + k0) / ch.xi)
        }
    }
}

/// Spectral ratio ψ_p(k)/ψ_l(k) = 1 + iη_{p,l}(k, k_o).
pub fn ratio_factor(ch: &ChannelCoeffs, xi_l: Complex64, k: f64, k0: f64) -> Complex64 {
    1.0 + I * eta(ch, xi_l, k, k0)
}

/// β(t; k, k_o) = Σ_p Γ_p η_{p,l}.
pub fn beta(coeffs: &DerivedCoeffs, xi_l: Complex64, k: f64, k0: f64) -> Complex64 {
    coeffs
        .active()
        .map(|ch| ch.rate * eta(ch, xi_l, k, k0))
        .sum()
}

fn nonzero_mu(coeffs: &DerivedCoeffs) -> Result<Complex64> {
    if coeffs.mu.norm() == 0.0 {
        Err(Error::ZeroMu(coeffs.t))
    } else {
        Ok(coeffs.mu)
    }
}

/// ω(t; k, k_o) = [(k − k_o) μ/ξ_l − β] / [1 + iβ/μ].
pub fn dispersion_relation(
    coeffs: &DerivedCoeffs,
    xi_l: Complex64,
    k: f64,
    k0: f64,
) -> Result<Complex64> {
    let mu = nonzero_mu(coeffs)?;
    let b = beta(coeffs, xi_l, k, k0);
    Ok(((k - k0) * mu / xi_l - b) / (1.0 + I * b / mu))
}

/// I(t, k, k_o) = 1 − γ_12/μ + iβ/μ.
pub fn i_factor(coeffs: &DerivedCoeffs, xi_l: Complex64, k: f64, k0: f64) -> Result<Complex64> {
    let mu = nonzero_mu(coeffs)?;
    let b = beta(coeffs, xi_l, k, k0);
    Ok(1.0 - coeffs.gamma12 / mu + I * b / mu)
}

/// ω̃(t, k, k_o) = [−iγ_12 + μ ξ_l⁻¹ (k − k_o) − β] / I(t, k, k_o).
pub fn omega_tilde(
    coeffs: &DerivedCoeffs,
    xi_l: Complex64,
    k: f64,
    k0: f64,
) -> Result<Complex64> {
    let mu = nonzero_mu(coeffs)?;
    let b = beta(coeffs, xi_l, k, k0);
    let i_f = 1.0 - coeffs.gamma12 / mu + I * b / mu;
    Ok((-I * coeffs.gamma12 + mu * (k - k0) / xi_l - b) / i_f)
}

/// v = Σ_m v_m − Σ_n v_n.
pub fn group_velocity(coeffs: &DerivedCoeffs) -> f64 {
    coeffs
        .channels
        .iter()
        .map(|c| c.direction.sign() * c.v)
        .sum()
}

/// Σ_m Ω_m²/g_m² − Σ_n Ω_n²/g_n².
pub fn stopping_residual(coeffs: &DerivedCoeffs) -> f64 {
    coeffs
        .channels
        .iter()
        .map(|c| c.direction.sign() * (c.rabi / c.g).powi(2))
        .sum()
}

fn stopping_scale(coeffs: &DerivedCoeffs) -> f64 {
    coeffs.channels.iter().map(|c| (c.rabi / c.g).powi(2)).sum()
}

pub fn is_stationary(coeffs: &DerivedCoeffs) -> bool {
    stopping_residual(coeffs).abs() <= STATIONARY_GATE * stopping_scale(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionMode {
    /// Full complex pair sum over all active channels.
    General,
    /// Forward-only pair sum with on-resonance absorption coefficients.
    TravelingOptimal,
    /// 2 Σ v_p/ξ_p at the stopping point.
    Stationary,
    /// 2 Σ v_p/ξ°_p at the stopping point and optimal detunings.
    StationaryOptimal,
}

/// Signed inverse absorption length: +1/ξ for forward, −1/ξ for backward.
fn signed_inverse(ch: &ChannelCoeffs, xi: Complex64) -> Complex64 {
    ch.direction.sign() / xi
}

/// Second-order dispersion δω″ (coefficient of −ik²/2 in ω).
pub fn second_order_dispersion(coeffs: &DerivedCoeffs, mode: DispersionMode) -> Result<Complex64> {
    match mode {
        DispersionMode::General | DispersionMode::TravelingOptimal => {
            let mu = nonzero_mu(coeffs)?;
            let active: Vec<&ChannelCoeffs> = coeffs.active().collect();
            let inv = |c: &ChannelCoeffs| match mode {
                DispersionMode::General => signed_inverse(c, c.xi),
                _ => signed_inverse(c, Complex64::new(c.xi0, 0.0)),
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for (i, a) in active.iter().enumerate() {
                for b in &active[i + 1..] {
                    if mode == DispersionMode::TravelingOptimal
                        && (a.direction == Direction::Backward || b.direction == Direction::Backward)
                    {
                        continue;
                    }
                    let d = inv(a) - inv(b);
                    sum += a.rate * b.rate * d * d;
                }
            }
            Ok(2.0 * sum / mu)
        }
        DispersionMode::Stationary | DispersionMode::StationaryOptimal => {
            if !is_stationary(coeffs) {
                return Err(Error::NotStationary {
                    residual: stopping_residual(coeffs),
                    gate: STATIONARY_GATE * stopping_scale(coeffs),
                });
            }
            let sum: Complex64 = coeffs
                .active()
                .map(|c| match mode {
                    DispersionMode::Stationary => c.v / c.xi,
                    _ => Complex64::new(c.v / c.xi0, 0.0),
                })
                .sum();
            Ok(2.0 * sum)
        }
    }
}

/// Detunings solving the spectral condition referenced to the probe:
/// Δ_m = Δ_l g_m²/g_l² (forward), Δ_n = −Δ_l g_n²/g_l² (backward).
pub fn optimal_detunings(channels: &[Channel], probe_label: &str, delta_l: f64) -> Result<Vec<f64>> {
    let probe = channels
        .iter()
        .find(|c| c.label == probe_label)
        .ok_or_else(|| Error::UnknownChannel(probe_label.to_string()))?;
    if probe.direction != Direction::Forward {
        return Err(invalid("probe_label", "must designate a forward channel"));
    }
    let gl2 = probe.g * probe.g;
    Ok(channels
        .iter()
        .map(|c| c.direction.sign() * delta_l * c.g * c.g / gl2)
        .collect())
}

/// Σ_m v_m Δ_m/g_m² + Σ_n v_n Δ_n/g_n² for the given detunings.
pub fn detuning_balance(coeffs: &DerivedCoeffs, detunings: &[f64]) -> f64 {
    coeffs
        .channels
        .iter()
        .zip(detunings)
        .map(|(c, d)| c.v * d / (c.g * c.g))
        .sum()
}

/// δt_spread = l0² / (2 Σ v_p/ξ°_p); +∞ when no control is on.
pub fn spreading_time(l0: f64, coeffs: &DerivedCoeffs) -> Result<f64> {
    if !(l0 >= 0.0) {
        return Err(invalid("l0", "must be >= 0"));
    }
    let denom: f64 = 2.0 * coeffs.channels.iter().map(|c| c.v / c.xi0).sum::<f64>();
    if denom == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(l0 * l0 / denom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionReport {
    pub v: f64,
    pub d2: Complex64,
    pub stopping_residual: f64,
    pub spreading_time: f64,
    pub omega_samples: Vec<(f64, Complex64)>,
}

/// Evaluates every design quantity at one time slice and samples ω(k).
pub fn report(
    coeffs: &DerivedCoeffs,
    k0: f64,
    l0: f64,
    k_samples: &[f64],
) -> Result<DispersionReport> {
    let xi_l = coeffs.probe_xi();
    let omega_samples = k_samples
        .par_iter()
        .map(|&k| dispersion_relation(coeffs, xi_l, k, k0).map(|w| (k, w)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DispersionReport {
        v: group_velocity(coeffs),
        d2: second_order_dispersion(coeffs, DispersionMode::General)?,
        stopping_residual: stopping_residual(coeffs),
        spreading_time: spreading_time(l0, coeffs)?,
        omega_samples,
    })
}

/// Central finite-difference first and second derivatives of ω(k) at `k`.
pub fn finite_difference_derivatives(
    coeffs: &DerivedCoeffs,
    k: f64,
    k0: f64,
    h: f64,
) -> Result<(Complex64, Complex64)> {
    let xi_l = coeffs.probe_xi();
    let w = |q: f64| dispersion_relation(coeffs, xi_l, q, k0);
    let (wm2, wm1, w0, wp1, wp2) = (w(k - 2.0 * h)?, w(k - h)?, w(k)?, w(k + h)?, w(k + 2.0 * h)?);
    let d1 = (-wp2 + 8.0 * wp1 - 8.0 * wm1 + wm2) / (12.0 * h);
    let d2 = (-wp2 + 16.0 * wp1 - 30.0 * w0 + 16.0 * wm1 - wm2) / (12.0 * h * h);
    Ok((d1, d2))
}
