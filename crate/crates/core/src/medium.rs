//! Static physical parameters, control schedules and the derived
//! per-channel coefficients (γ̃, ξ, ξ°, Γ, v) together with μ(t).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::C_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    /// +1 for forward channels, -1 for backward ones.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// One optical transition |1> -> |p> with its quantum field.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub label: String,
    pub direction: Direction,
    /// Coupling constant g (rate^1/2).
    pub g: f64,
    /// Optical coherence decay γ.
    pub gamma: f64,
    /// Detuning Δ.
    pub delta: f64,
    /// Optical carrier frequency, used for energy bookkeeping only.
    pub omega_opt: f64,
}

impl Channel {
    pub fn new(label: &str, direction: Direction, g: f64, gamma: f64, delta: f64) -> Self {
        Channel {
            label: label.to_string(),
            direction,
            g,
            gamma,
            delta,
            omega_opt: 1.0,
        }
    }

    pub fn with_carrier(mut self, omega_opt: f64) -> Self {
        self.omega_opt = omega_opt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(invalid(&format!("{}.g", self.label), "must be > 0"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid(&format!("{}.gamma", self.label), "must be > 0"));
        }
        if !(self.omega_opt > 0.0 && self.omega_opt.is_finite()) {
            return Err(invalid(&format!("{}.omega_opt", self.label), "must be > 0"));
        }
        if !self.delta.is_finite() {
            return Err(invalid(&format!("{}.delta", self.label), "must be finite"));
        }
        Ok(())
    }

    /// γ̃ = γ − iΔ.
    pub fn gamma_tilde(&self) -> Complex64 {
        Complex64::new(self.gamma, -self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    /// Effective line density N = n_o S.
    pub n_line: f64,
    pub length: f64,
    /// Two-photon wavevector offset k_o = ω_21 / c.
    pub k0: f64,
    pub gamma12: f64,
    /// Envelope decay used by the closed-form Gaussian engine.
    pub gamma2: f64,
}

impl Medium {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_line > 0.0 && self.n_line.is_finite()) {
            return Err(invalid("medium.n_line", "must be > 0"));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(invalid("medium.length", "must be > 0"));
        }
        if !(self.gamma12 >= 0.0) {
            return Err(invalid("medium.gamma12", "must be >= 0"));
        }
        if !(self.gamma2 >= 0.0) {
            return Err(invalid("medium.gamma2", "must be >= 0"));
        }
        if !(self.k0 >= 0.0) {
            return Err(invalid("medium.k0", "must be >= 0"));
        }
        Ok(())
    }
}

/// Piecewise-constant control amplitude of one channel. `values[i]` holds on
/// `[breakpoints[i], breakpoints[i + 1])`; the last value holds forever.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTable {
    pub label: String,
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub phase: f64,
}

impl ControlTable {
    pub fn new(label: &str, breakpoints: Vec<f64>, values: Vec<f64>, phase: f64) -> Self {
        ControlTable {
            label: label.to_string(),
            breakpoints,
            values,
            phase,
        }
    }

    /// A control that stays at `value` from `start` on.
    pub fn constant(label: &str, start: f64, value: f64) -> Self {
        Self::new(label, vec![start], vec![value], 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let key = format!("schedule.{}", self.label);
        if self.breakpoints.is_empty() || self.breakpoints.len() != self.values.len() {
            return Err(invalid(
                &key,
                "breakpoints and values must be non-empty and of equal length",
            ));
        }
        if self.breakpoints.iter().any(|t| !t.is_finite()) {
            return Err(invalid(&key, "breakpoints must be finite"));
        }
        if self.breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(&key, "breakpoints must be strictly increasing"));
        }
        if self.values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid(&key, "control amplitudes must be finite and >= 0"));
        }
        if !self.phase.is_finite() {
            return Err(invalid(&key, "phase must be finite"));
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    /// Amplitude Ω_o(t), right-continuous at breakpoints.
    pub fn amplitude(&self, t: f64) -> Result<f64> {
        if t < self.start() {
            return Err(Error::OutsideSchedule {
                t,
                start: self.start(),
            });
        }
        let idx = self.breakpoints.partition_point(|&b| b <= t) - 1;
        Ok(self.values[idx])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSchedule {
    pub tables: Vec<ControlTable>,
}

impl ControlSchedule {
    pub fn new(tables: Vec<ControlTable>) -> Self {
        ControlSchedule { tables }
    }

    pub fn table(&self, label: &str) -> Option<&ControlTable> {
        self.tables.iter().find(|t| t.label == label)
    }

    /// Earliest time at which every table is defined.
    pub fn start(&self) -> f64 {
        self.tables
            .iter()
            .map(ControlTable::start)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// All breakpoints of all tables, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .tables
            .iter()
            .flat_map(|t| t.breakpoints.iter().copied())
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.dedup();
        all
    }

    /// Splits `[t_from, t_to]` into sub-intervals on which every control is
    /// constant.
    pub fn segments(&self, t_from: f64, t_to: f64) -> Vec<(f64, f64)> {
        let mut cuts = vec![t_from];
        cuts.extend(
            self.breakpoints()
                .into_iter()
                .filter(|&b| b > t_from && b < t_to),
        );
        cuts.push(t_to);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Medium, channels, controls and the designated probe channel, validated
/// together.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub medium: Medium,
    pub channels: Vec<Channel>,
    pub schedule: ControlSchedule,
    probe: usize,
}

impl Setup {
    pub fn new(
        medium: Medium,
        channels: Vec<Channel>,
        schedule: ControlSchedule,
        probe_label: &str,
    ) -> Result<Self> {
        medium.validate()?;
        if channels.is_empty() {
            return Err(invalid("channels", "at least one channel is required"));
        }
        for (i, ch) in channels.iter().enumerate() {
            ch.validate()?;
            if channels[..i].iter().any(|c| c.label == ch.label) {
                return Err(invalid("channels", format!("duplicate label `{}`", ch.label)));
            }
        }
        for table in &schedule.tables {
            table.validate()?;
            if !channels.iter().any(|c| c.label == table.label) {
                return Err(Error::UnknownChannel(table.label.clone()));
            }
        }
        let probe = channels
            .iter()
            .position(|c| c.label == probe_label)
            .ok_or_else(|| Error::UnknownChannel(probe_label.to_string()))?;
        if channels[probe].direction != Direction::Forward {
            return Err(invalid("probe.label", "the probe channel must be forward"));
        }
        Ok(Setup {
            medium,
            channels,
            schedule,
            probe,
        })
    }

    pub fn probe_index(&self) -> usize {
        self.probe
    }

    pub fn probe(&self) -> &Channel {
        &self.channels[self.probe]
    }

    pub fn channel_index(&self, label: &str) -> Result<usize> {
        self.channels
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| Error::UnknownChannel(label.to_string()))
    }

    /// Complex Rabi frequency Ω_o(t) e^{iφ} of channel `idx`.
    pub fn rabi(&self, idx: usize, t: f64) -> Result<Complex64> {
        match self.schedule.table(&self.channels[idx].label) {
            Some(table) => Ok(Complex64::from_polar(table.amplitude(t)?, table.phase)),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn with_schedule(&self, schedule: ControlSchedule) -> Result<Setup> {
        Setup::new(
            self.medium,
            self.channels.clone(),
            schedule,
            &self.probe().label.clone(),
        )
    }

    pub fn with_channels(&self, channels: Vec<Channel>) -> Result<Setup> {
        let probe = self.probe().label.clone();
        Setup::new(self.medium, channels, self.schedule.clone(), &probe)
    }

    /// Absorption coefficient ξ of the probe channel.
    pub fn probe_xi(&self) -> Complex64 {
        channel_xi(&self.medium, self.probe())
    }
}

/// ξ = N g² / (c γ̃).
pub fn channel_xi(medium: &Medium, ch: &Channel) -> Complex64 {
    medium.n_line * ch.g * ch.g / (C_LIGHT * ch.gamma_tilde())
}

/// ξ° = N g² / (c γ).
pub fn channel_xi0(medium: &Medium, ch: &Channel) -> f64 {
    medium.n_line * ch.g * ch.g / (C_LIGHT * ch.gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCoeffs {
    pub direction: Direction,
    pub g: f64,
    /// Ω_o(t) ≥ 0.
    pub rabi: f64,
    pub phase: f64,
    pub gamma_tilde: Complex64,
    pub xi: Complex64,
    pub xi0: f64,
    /// Γ = Ω_o² / γ̃.
    pub rate: Complex64,
    /// v = c Ω_o² / (N g²).
    pub v: f64,
}

impl ChannelCoeffs {
    pub fn is_active(&self) -> bool {
        self.rabi > 0.0
    }
}

/// Time-sliced coefficients of every channel plus μ(t).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCoeffs {
    pub t: f64,
    pub channels: Vec<ChannelCoeffs>,
    /// μ = γ_12 + Σ Γ.
    pub mu: Complex64,
    pub gamma12: f64,
    pub probe: usize,
}

impl DerivedCoeffs {
    pub fn probe_xi(&self) -> Complex64 {
        self.channels[self.probe].xi
    }

    pub fn active(&self) -> impl Iterator<Item = &ChannelCoeffs> {
        self.channels.iter().filter(|c| c.is_active())
    }

    pub fn n_active(&self) -> usize {
        self.active().count()
    }
}

pub fn derive_coefficients(setup: &Setup, t: f64) -> Result<DerivedCoeffs> {
    let medium = &setup.medium;
    let mut channels = Vec::with_capacity(setup.channels.len());
    let mut mu = Complex64::new(medium.gamma12, 0.0);
    for (i, ch) in setup.channels.iter().enumerate() {
        let omega = setup.rabi(i, t)?;
        let rabi = omega.norm();
        let gamma_tilde = ch.gamma_tilde();
        let rate = rabi * rabi / gamma_tilde;
        mu += rate;
        channels.push(ChannelCoeffs {
            direction: ch.direction,
            g: ch.g,
            rabi,
            phase: if rabi > 0.0 { omega.arg() } else { 0.0 },
            gamma_tilde,
            xi: channel_xi(medium, ch),
            xi0: channel_xi0(medium, ch),
            rate,
            v: C_LIGHT * rabi * rabi / (medium.n_line * ch.g * ch.g),
        });
    }
    Ok(DerivedCoeffs {
        t,
        channels,
        mu,
        gamma12: medium.gamma12,
        probe: setup.probe_index(),
    })
}

/// Light and atomic weights of the dark MC-polariton.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkWeights {
    /// (Ω_p/g_p)/√D per channel, in channel order.
    pub light: Vec<Complex64>,
    /// −√N/√D.
    pub atomic: f64,
}

impl DarkWeights {
    pub fn norm_sqr(&self) -> f64 {
        self.light.iter().map(|w| w.norm_sqr()).sum::<f64>() + self.atomic * self.atomic
    }
}

pub fn dark_weights(setup: &Setup, t: f64) -> Result<DarkWeights> {
    let ratios: Vec<Complex64> = (0..setup.channels.len())
        .map(|i| Ok(setup.rabi(i, t)? / setup.channels[i].g))
        .collect::<Result<_>>()?;
    let d = setup.medium.n_line + ratios.iter().map(|r| r.norm_sqr()).sum::<f64>();
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::DegenerateWeights);
    }
    let sd = d.sqrt();
    Ok(DarkWeights {
        light: ratios.into_iter().map(|r| r / sd).collect(),
        atomic: -setup.medium.n_line.sqrt() / sd,
    })
}
