//! Exact adiabatic evolution of the probe polariton spectrum and synthesis
//! of every channel envelope.
//!
//! The state keeps the initial spectrum ψ_l(t₀, k) together with the
//! accumulated phase ∫ω̃ dt′ and the factors I(t₀, k), I(t, k), so the
//! current spectrum is always T(t − t₀, k)·ψ_l(t₀, k) evaluated in one shot.
//! Controls are piecewise constant, hence the time integral is exact.

mod synthesis;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{i_factor, omega_tilde};
use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianPulseSpec;
use crate::medium::{derive_coefficients, Setup};
use crate::numerics::{moments, norm_sqr, SpectralTransform};

pub use synthesis::{dark_residual, synthesize, to_amplitudes, ChannelEnvelopes, SynthesisMethod};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fraction of the norm allowed near the medium borders before a
/// localization warning is raised.
pub const LOCALIZATION_WARN: f64 = 1e-4;

/// Accumulated gain Im ∫ω̃ dt′ beyond which a mode is dropped. Runaway
/// modes lie far outside the adiabatic band |k − k_o| ≪ ξ; a passive
/// medium cannot amplify them.
pub const GAIN_LIMIT: f64 = 1.0;

/// Uniform periodic grid over [0, L) and its wavenumbers.
#[derive(Clone)]
pub struct SpectralGrid {
    pub n_k: usize,
    pub length: f64,
    pub k_min: f64,
    pub k_max: f64,
    transform: SpectralTransform,
    k: Vec<f64>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n_k", &self.n_k)
            .field("length", &self.length)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(n_k: usize, length: f64) -> Result<Self> {
        if n_k < 64 || !n_k.is_power_of_two() {
            return Err(invalid("nk", "must be a power of two >= 64"));
        }
        if !(length > 0.0) {
            return Err(invalid("length", "must be > 0"));
        }
        let dz = length / n_k as f64;
        let transform = SpectralTransform::new(n_k, dz);
        let k = transform.wavenumbers();
        let k_min = k.iter().copied().fold(f64::INFINITY, f64::min);
        let k_max = k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(SpectralGrid {
            n_k,
            length,
            k_min,
            k_max,
            transform,
            k,
        })
    }

    pub fn dz(&self) -> f64 {
        self.length / self.n_k as f64
    }

    pub fn dk(&self) -> f64 {
        self.transform.dk()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_k).map(|j| j as f64 * self.dz()).collect()
    }

    pub fn to_field(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        self.transform.to_field(spectrum)
    }

    pub fn to_spectrum(&self, field: &[Complex64]) -> Vec<Complex64> {
        self.transform.to_spectrum(field)
    }
}

/// Initial probe envelope: a Gaussian pulse or a sampled ratio field Ψ_l(z)
/// on the uniform grid `z_start + i·dz`.
#[derive(Debug, Clone)]
pub enum ProbeEnvelope<'a> {
    Gaussian(&'a GaussianPulseSpec),
    Sampled {
        t0: f64,
        z_start: f64,
        dz: f64,
        values: &'a [Complex64],
    },
}

#[derive(Debug, Clone)]
pub struct MCState {
    pub t: f64,
    pub t0: f64,
    pub grid: SpectralGrid,
    initial_spectrum: Vec<Complex64>,
    /// Deterministic part of ψ_l(t, k).
    pub probe_spectrum: Vec<Complex64>,
    /// ∫_{t₀}^{t} ω̃(t′, k, k_o) dt′.
    pub phase_accumulator: Vec<Complex64>,
    pub i_t0: Vec<Complex64>,
    pub i_t: Vec<Complex64>,
    /// Modes removed because ω̃ acquired gain on some segment.
    pub out_of_band: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub centroid: f64,
    /// Root-mean-square width of |Ψ_l|².
    pub width: f64,
    pub polariton_number: f64,
}

impl Observables {
    /// Gaussian width l such that |Ψ|² ∝ exp(−(z − z_c)²/l²).
    pub fn gaussian_width(&self) -> f64 {
        self.width * std::f64::consts::SQRT_2
    }
}

fn i_factors(setup: &Setup, grid: &SpectralGrid, t: f64) -> Result<Vec<Complex64>> {
    let coeffs = derive_coefficients(setup, t)?;
    let xi_l = coeffs.probe_xi();
    let k0 = setup.medium.k0;
    grid.wavenumbers()
        .par_iter()
        .map(|&k| i_factor(&coeffs, xi_l, k, k0))
        .collect()
}

impl MCState {
    pub fn init(setup: &Setup, envelope: ProbeEnvelope<'_>, grid: SpectralGrid) -> Result<Self> {
        if (grid.length - setup.medium.length).abs() > 1e-12 * setup.medium.length {
            return Err(invalid("grid.length", "must equal the medium length"));
        }
        let k0 = setup.medium.k0;
        let (t0, spectrum) = match envelope {
            ProbeEnvelope::Gaussian(pulse) => {
                let l0 = pulse.l0;
                if !(l0 > 0.0) {
                    return Err(Error::Unresolved("l0 must be > 0".into()));
                }
                check_resolution(&grid, l0)?;
                let center = pulse.center();
                if center - 4.0 * l0 <= 0.0 || center + 4.0 * l0 >= grid.length {
                    return Err(Error::Localization(format!(
                        "pulse center {center} ± 4·l0 ({l0}) not inside (0, {})",
                        grid.length
                    )));
                }
                let phi_l = setup
                    .schedule
                    .table(&setup.probe().label)
                    .map_or(0.0, |t| t.phase);
                let amp = pulse.a_l * (l0 / std::f64::consts::PI.sqrt()).sqrt();
                let spectrum = grid
                    .wavenumbers()
                    .iter()
                    .map(|&k| {
                        let q = k - k0;
                        let phase = -q * center + pulse.theta_l - phi_l;
                        Complex64::from_polar(amp * (-0.5 * (q * l0).powi(2)).exp(), phase)
                    })
                    .collect();
                (pulse.t0, spectrum)
            }
            ProbeEnvelope::Sampled {
                t0,
                z_start,
                dz,
                values,
            } => {
                if values.len() < 2 || !(dz > 0.0) {
                    return Err(invalid("envelope", "needs at least two samples and dz > 0"));
                }
                let field: Vec<Complex64> = grid
                    .positions()
                    .iter()
                    .map(|&z| crate::numerics::interp_uniform(values, z_start, dz, z))
                    .collect();
                let z = grid.positions();
                let density: Vec<f64> = field.iter().map(|x| x.norm_sqr()).collect();
                let m = moments(&z, &density, grid.dz()).ok_or(Error::ZeroNorm)?;
                check_resolution(&grid, (2.0 * m.variance).sqrt())?;
                (t0, grid.to_spectrum(&field))
            }
        };
        let i0 = i_factors(setup, &grid, t0)?;
        Ok(MCState {
            t: t0,
            t0,
            phase_accumulator: vec![Complex64::new(0.0, 0.0); grid.n_k],
            out_of_band: vec![false; grid.n_k],
            i_t: i0.clone(),
            i_t0: i0,
            probe_spectrum: spectrum.clone(),
            initial_spectrum: spectrum,
            grid,
        })
    }

    /// Advances the state to `t_target` by applying the exact transfer
    /// function T(t − t₀, k, k_o).
    pub fn evolve(&mut self, setup: &Setup, t_target: f64) -> Result<()> {
        if t_target < self.t {
            return Err(invalid("t_target", "must not precede the state time"));
        }
        if t_target == self.t {
            return Ok(());
        }
        let k0 = setup.medium.k0;
        for (a, b) in setup.schedule.segments(self.t, t_target) {
            let coeffs = derive_coefficients(setup, a)?;
            let xi_l = coeffs.probe_xi();
            let dt = b - a;
            self.grid
                .wavenumbers()
                .par_iter()
                .zip(self.phase_accumulator.par_iter_mut())
                .zip(self.out_of_band.par_iter_mut())
                .try_for_each(|((&k, acc), cut)| -> Result<()> {
                    *acc += omega_tilde(&coeffs, xi_l, k, k0)? * dt;
                    if acc.im > GAIN_LIMIT {
                        *cut = true;
                    }
                    Ok(())
                })?;
        }
        self.warn_out_of_band();
        self.i_t = i_factors(setup, &self.grid, t_target)?;
        self.t = t_target;
        self.probe_spectrum = self
            .initial_spectrum
            .par_iter()
            .zip(&self.phase_accumulator)
            .zip(self.i_t0.par_iter().zip(&self.i_t))
            .zip(&self.out_of_band)
            .map(|(((psi, w), (i0, it)), &cut)| {
                if cut {
                    Complex64::new(0.0, 0.0)
                } else {
                    psi * (i0 / it) * (-I * w).exp()
                }
            })
            .collect();
        self.check_localization();
        Ok(())
    }

    pub fn evolved(&self, setup: &Setup, t_target: f64) -> Result<MCState> {
        let mut next = self.clone();
        next.evolve(setup, t_target)?;
        Ok(next)
    }

    /// Transfer function T(t − t₀, k, k_o) at the current time.
    pub fn transfer(&self) -> Vec<Complex64> {
        self.phase_accumulator
            .iter()
            .zip(self.i_t0.iter().zip(&self.i_t))
            .zip(&self.out_of_band)
            .map(|((w, (i0, it)), &cut)| {
                if cut {
                    Complex64::new(0.0, 0.0)
                } else {
                    (i0 / it) * (-I * w).exp()
                }
            })
            .collect()
    }

    /// Probe ratio field Ψ_l(t, z) on the grid.
    pub fn probe_field(&self) -> Vec<Complex64> {
        self.grid.to_field(&self.probe_spectrum)
    }

    pub fn spectrum_norm(&self) -> f64 {
        norm_sqr(&self.probe_spectrum, self.grid.dk())
    }

    pub fn observables(&self) -> Result<Observables> {
        let field = self.probe_field();
        let z = self.grid.positions();
        let density: Vec<f64> = field.iter().map(|x| x.norm_sqr()).collect();
        let m = moments(&z, &density, self.grid.dz()).ok_or(Error::ZeroNorm)?;
        Ok(Observables {
            centroid: m.mean,
            width: m.variance.sqrt(),
            polariton_number: m.mass,
        })
    }

    fn warn_out_of_band(&self) {
        let total: f64 = self.initial_spectrum.iter().map(|x| x.norm_sqr()).sum();
        let cut: f64 = self
            .initial_spectrum
            .iter()
            .zip(&self.out_of_band)
            .filter(|(_, &c)| c)
            .map(|(x, _)| x.norm_sqr())
            .sum();
        if total > 0.0 && cut / total > 1e-9 {
            warn!(
                "{:.2e} of the initial spectral weight lies outside the adiabatic band and was removed",
                cut / total
            );
        }
    }

    fn check_localization(&self) {
        let field = self.probe_field();
        let n = field.len();
        let edge = (n / 50).max(1);
        let total: f64 = field.iter().map(|x| x.norm_sqr()).sum();
        let border: f64 = field[..edge]
            .iter()
            .chain(&field[n - edge..])
            .map(|x| x.norm_sqr())
            .sum();
        if total > 0.0 && border / total > LOCALIZATION_WARN {
            warn!(
                "localization: {:.2e} of the norm reached the medium border at t = {}",
                border / total,
                self.t
            );
        }
    }
}

fn check_resolution(grid: &SpectralGrid, l0: f64) -> Result<()> {
    if l0 < 4.0 * grid.dz() {
        return Err(Error::Unresolved(format!(
            "width {l0} is below four grid spacings ({})",
            grid.dz()
        )));
    }
    if grid.k_max < 8.0 / l0 {
        return Err(Error::Unresolved(format!(
            "k grid reaches {} < 8/l0 = {}",
            grid.k_max,
            8.0 / l0
        )));
    }
    Ok(())
}
