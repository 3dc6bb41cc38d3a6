//! Closed forms for a Gaussian probe: center, width, kinematic shifts,
//! stationary amplitudes, emitted pulses and energy bookkeeping.
//!
//! Position convention: at t₀ the envelope is centered at z = v_l t₀ − z₀.

use log::warn;
use num_complex::Complex64;

use crate::dispersion::{group_velocity, is_stationary, second_order_dispersion, DispersionMode};
use crate::error::{invalid, Error, Result};
use crate::medium::{derive_coefficients, DerivedCoeffs, Direction, Setup};
use crate::C_LIGHT;

/// Relative imaginary part of ∫δω″dt above which widths count as complex.
pub const COMPLEX_WIDTH_GATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulseSpec {
    /// Coherent amplitude, |a_l|² is the mean polariton number.
    pub a_l: f64,
    pub l0: f64,
    pub z0: f64,
    pub theta_l: f64,
    pub v_l: f64,
    pub delta_t0: f64,
    pub t0: f64,
}

impl GaussianPulseSpec {
    /// Builds the pulse with v_l taken from the controls at t₀.
    pub fn new(setup: &Setup, a_l: f64, l0: f64, z0: f64, theta_l: f64, t0: f64) -> Result<Self> {
        if !(l0 > 0.0) {
            return Err(invalid("l0", "must be > 0"));
        }
        if !a_l.is_finite() {
            return Err(invalid("a_l", "must be finite"));
        }
        let coeffs = derive_coefficients(setup, t0)?;
        let v_l = group_velocity(&coeffs);
        if !(v_l > 0.0) {
            return Err(invalid("v_l", "probe group velocity at t0 must be > 0"));
        }
        Ok(GaussianPulseSpec {
            a_l,
            l0,
            z0,
            theta_l,
            v_l,
            delta_t0: l0 / v_l,
            t0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l0 > 0.0) {
            return Err(invalid("l0", "must be > 0"));
        }
        if !(self.v_l > 0.0) {
            return Err(invalid("v_l", "must be > 0"));
        }
        if (self.l0 - self.v_l * self.delta_t0).abs() > 1e-9 * self.l0 {
            return Err(invalid("delta_t0", "must equal l0 / v_l"));
        }
        Ok(())
    }

    /// Envelope center at t₀.
    pub fn center(&self) -> f64 {
        self.v_l * self.t0 - self.z0
    }

    /// A_{l,o} = a_l (√π c δt₀)^{-1/2}.
    pub fn peak_amplitude(&self) -> f64 {
        self.a_l / (std::f64::consts::PI.sqrt() * C_LIGHT * self.delta_t0).sqrt()
    }

    /// Peak of the ratio field Ψ_l at t₀, √(c/v_l)·A_{l,o}.
    pub fn peak_ratio_field(&self) -> f64 {
        (C_LIGHT / self.v_l).sqrt() * self.peak_amplitude()
    }

    /// Input energy W_{l,o} = ω_l |a_l|² in units with ħ = 1.
    pub fn input_energy(&self, omega_l: f64) -> f64 {
        omega_l * self.a_l * self.a_l
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub label: String,
    pub center: f64,
    pub width: f64,
    /// Re δz̃.
    pub shift: f64,
    /// Re δl².
    pub width_correction: f64,
    /// Peak of Ψ_p.
    pub psi_peak: f64,
    /// Peak of |A_p|.
    pub amplitude_peak: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianReport {
    pub t: f64,
    /// ∫ v dt′ since t₀.
    pub displacement: f64,
    /// ∫ Re δω″ dt′ since t₀.
    pub spreading: f64,
    pub b_l: f64,
    pub probe: usize,
    pub channels: Vec<ChannelReport>,
}

impl GaussianReport {
    pub fn probe(&self) -> &ChannelReport {
        &self.channels[self.probe]
    }
}

/// Accumulates (∫v dt, ∫δω″ dt) over the schedule segments in [t0, t].
pub fn accumulate(setup: &Setup, t0: f64, t: f64) -> Result<(f64, Complex64)> {
    if t < t0 {
        return Err(invalid("t", "must not precede t0"));
    }
    let mut disp = 0.0;
    let mut spread = Complex64::new(0.0, 0.0);
    for (a, b) in setup.schedule.segments(t0, t) {
        let coeffs = derive_coefficients(setup, a)?;
        disp += group_velocity(&coeffs) * (b - a);
        spread += second_order_dispersion(&coeffs, DispersionMode::General)? * (b - a);
    }
    Ok((disp, spread))
}

/// B_l = (2/μ)(Σ_m v_m/ξ_m + Σ_n v_n/ξ_n − v/ξ_l).
pub fn b_l(coeffs: &DerivedCoeffs) -> Result<Complex64> {
    if coeffs.mu.norm() == 0.0 {
        return Err(Error::ZeroMu(coeffs.t));
    }
    let v = group_velocity(coeffs);
    let sum: Complex64 = coeffs.channels.iter().map(|c| c.v / c.xi).sum();
    Ok(2.0 / coeffs.mu * (sum - v / coeffs.probe_xi()))
}

/// Kinematic shift δz̃_p.
pub fn shift(coeffs: &DerivedCoeffs, p: usize) -> Result<Complex64> {
    if coeffs.mu.norm() == 0.0 {
        return Err(Error::ZeroMu(coeffs.t));
    }
    let v = group_velocity(coeffs);
    let ch = &coeffs.channels[p];
    Ok(v / coeffs.mu - ch.direction.sign() / ch.xi)
}

/// Width correction δl²_{p,l}.
pub fn width_correction(coeffs: &DerivedCoeffs, p: usize) -> Result<Complex64> {
    let dz_p = shift(coeffs, p)?;
    let dz_l = shift(coeffs, coeffs.probe)?;
    let inv_l = 1.0 / coeffs.probe_xi();
    let inv_p = 1.0 / coeffs.channels[p].xi;
    let cross = match coeffs.channels[p].direction {
        Direction::Forward => 2.0 * inv_p * (inv_l - inv_p),
        Direction::Backward => -2.0 * inv_p * (inv_l + inv_p),
    };
    Ok(dz_p * (dz_p - 2.0 * dz_l) + cross + b_l(coeffs)?)
}

fn real_spreading(spread: Complex64, l0: f64) -> Result<f64> {
    let scale = spread.re.abs().max(l0 * l0 * 1e-12);
    let ratio = spread.im.abs() / scale;
    if ratio > COMPLEX_WIDTH_GATE {
        return Err(Error::ComplexWidth { ratio });
    }
    Ok(spread.re)
}

pub fn evolve_gaussian(pulse: &GaussianPulseSpec, setup: &Setup, t: f64) -> Result<GaussianReport> {
    pulse.validate()?;
    let xi_l = setup.probe_xi();
    if xi_l.norm() * pulse.l0 < 10.0 {
        return Err(Error::Precondition(format!(
            "ξ_l·l0 = {:.3} < 10; the closed form needs a dense medium",
            xi_l.norm() * pulse.l0
        )));
    }
    if setup.medium.k0.abs() / xi_l.norm() > 0.1 {
        warn!("k0/ξ_l = {:.3} is not small; closed forms lose accuracy", setup.medium.k0.abs() / xi_l.norm());
    }
    let (displacement, spread) = accumulate(setup, pulse.t0, t)?;
    let spreading = real_spreading(spread, pulse.l0)?;
    let coeffs = derive_coefficients(setup, t)?;
    let decay = (-setup.medium.gamma2 * (t - pulse.t0)).exp();
    let psi0 = pulse.peak_ratio_field();
    let sqrt_n = setup.medium.n_line.sqrt();
    let channels = (0..setup.channels.len())
        .map(|p| {
            let dz = shift(&coeffs, p)?;
            let dl2 = width_correction(&coeffs, p)?;
            let w2 = pulse.l0 * pulse.l0 - dl2.re + spreading;
            if !(w2 > 0.0) {
                return Err(Error::ComplexWidth { ratio: f64::INFINITY });
            }
            let width = w2.sqrt();
            let psi_peak = psi0 * (pulse.l0 / width) * decay;
            let ch = &coeffs.channels[p];
            Ok(ChannelReport {
                label: setup.channels[p].label.clone(),
                center: pulse.center() + displacement - dz.re,
                width,
                shift: dz.re,
                width_correction: dl2.re,
                psi_peak,
                amplitude_peak: ch.rabi / (sqrt_n * ch.g) * psi_peak,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianReport {
        t,
        displacement,
        spreading,
        b_l: b_l(&coeffs)?.re,
        probe: coeffs.probe,
        channels,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryAmplitude {
    pub label: String,
    pub magnitude: f64,
    pub phase: f64,
}

pub fn stationary_amplitudes(
    pulse: &GaussianPulseSpec,
    setup: &Setup,
    t: f64,
) -> Result<Vec<StationaryAmplitude>> {
    let coeffs = derive_coefficients(setup, t)?;
    if !is_stationary(&coeffs) {
        return Err(Error::NotStationary {
            residual: crate::dispersion::stopping_residual(&coeffs),
            gate: crate::dispersion::STATIONARY_GATE,
        });
    }
    let report = evolve_gaussian(pulse, setup, t)?;
    let probe = setup.probe_index();
    let omega_l0 = setup.rabi(probe, pulse.t0)?.norm();
    let g_l = setup.probe().g;
    let phi_l = setup.schedule.table(&setup.probe().label).map_or(0.0, |t| t.phase);
    let decay = (-setup.medium.gamma2 * (t - pulse.t0)).exp();
    Ok(coeffs
        .channels
        .iter()
        .zip(&report.channels)
        .map(|(ch, rep)| StationaryAmplitude {
            label: rep.label.clone(),
            magnitude: ch.rabi * g_l / (omega_l0 * ch.g) * (pulse.l0 / rep.width)
                * pulse.peak_amplitude()
                * decay,
            phase: pulse.theta_l + ch.phase - phi_l,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedChannel {
    pub label: String,
    /// δt_travel = l/v_travel; zero for channels that emit nothing.
    pub duration: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionReport {
    pub input_energy: f64,
    pub output_energy: f64,
    pub mean_frequency: f64,
    pub v_travel: f64,
    pub width: f64,
    pub channels: Vec<EmittedChannel>,
}

/// W_out = W_{l,o}·(ω̄/ω_l)·(l0/l)·decay.
pub fn output_energy(input_energy: f64, frequency_ratio: f64, width_ratio: f64, decay: f64) -> f64 {
    input_energy * frequency_ratio / width_ratio * decay
}

pub fn emitted_pulse_and_energies(
    pulse: &GaussianPulseSpec,
    setup: &Setup,
    t_out: f64,
) -> Result<EmissionReport> {
    let coeffs = derive_coefficients(setup, t_out)?;
    if coeffs
        .active()
        .any(|c| c.direction == Direction::Backward)
    {
        return Err(Error::Precondition(
            "emission needs a traveling configuration: a backward control is on".into(),
        ));
    }
    let v_travel = group_velocity(&coeffs);
    if !(v_travel > 0.0) {
        return Err(Error::Precondition("no active forward channel at t_out".into()));
    }
    let report = evolve_gaussian(pulse, setup, t_out)?;
    let probe = setup.probe_index();
    let omega_l = setup.channels[probe].omega_opt;
    let w_lo = pulse.input_energy(omega_l);
    let width = report.probe().width;
    let decay = (-2.0 * setup.medium.gamma2 * (t_out - pulse.t0)).exp();
    let mean_frequency = setup
        .channels
        .iter()
        .zip(&coeffs.channels)
        .map(|(ch, c)| ch.omega_opt * c.v)
        .sum::<f64>()
        / v_travel;
    let channels = setup
        .channels
        .iter()
        .zip(&coeffs.channels)
        .zip(&report.channels)
        .map(|((ch, c), rep)| {
            let active = c.is_active() && c.direction == Direction::Forward;
            EmittedChannel {
                label: ch.label.clone(),
                duration: if active { rep.width / v_travel } else { 0.0 },
                energy: if active {
                    w_lo * (ch.omega_opt / omega_l) * (c.v / v_travel) * (pulse.l0 / width) * decay
                } else {
                    0.0
                },
            }
        })
        .collect();
    Ok(EmissionReport {
        input_energy: w_lo,
        output_energy: output_energy(w_lo, mean_frequency / omega_l, width / pulse.l0, decay),
        mean_frequency,
        v_travel,
        width,
        channels,
    })
}

/// N(t) = (l0/l_l(t))·|a_l|²·e^{−2γ₂(t−t₀)}.
pub fn polariton_number(pulse: &GaussianPulseSpec, setup: &Setup, t: f64) -> Result<f64> {
    let report = evolve_gaussian(pulse, setup, t)?;
    let decay = (-2.0 * setup.medium.gamma2 * (t - pulse.t0)).exp();
    Ok(pulse.l0 / report.probe().width * pulse.a_l * pulse.a_l * decay)
}
