//! Semiclassical Maxwell–Bloch integrator in the weak-probe limit, used as a
//! brute-force oracle for the adiabatic propagator.
//!
//! Per node z_j and channel p:
//!
//! ```text
//! ds_p/dt = −γ̃_p s_p + i g_p A_p + i Ω_p e_p P
//! dP/dt   = −γ_12 P + i Σ_p Ω_p* e_p* s_p
//! (∂_t ± c ∂_z) A_p = i N g_p s_p
//! ```
//!
//! with e_p = e^{∓ik_o z}. Fields are advanced along characteristics with
//! c·dt = dz and every local term with the trapezoidal rule; the implicit
//! couplings are eliminated in closed form, so each step is explicit and the
//! scheme is second order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::GaussianPulseSpec;
use crate::medium::{derive_coefficients, Direction, Setup};
use crate::numerics::{interp_uniform, moments};
use crate::propagator::{
    synthesize, to_amplitudes, MCState, ProbeEnvelope, SpectralGrid, SynthesisMethod,
};
use crate::C_LIGHT;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Trapezoidal rule along the characteristics z ± c t.
    CharacteristicTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MBGrid {
    pub n_z: usize,
    pub dt: f64,
    pub scheme: Scheme,
}

impl MBGrid {
    /// Grid with `n_z` nodes over [0, L] and c·dt = dz.
    pub fn new(n_z: usize, length: f64) -> Result<Self> {
        if n_z < 3 {
            return Err(crate::error::invalid("nz", "needs at least 3 nodes"));
        }
        Ok(MBGrid {
            n_z,
            dt: length / (n_z - 1) as f64 / C_LIGHT,
            scheme: Scheme::CharacteristicTrapezoid,
        })
    }

    pub fn dz(&self, length: f64) -> f64 {
        length / (self.n_z - 1) as f64
    }

    fn check(&self, length: f64) -> Result<()> {
        let dz = self.dz(length);
        let cdt = C_LIGHT * self.dt;
        if cdt > dz * (1.0 + 1e-12) {
            return Err(Error::Cfl { cdt, dz });
        }
        if cdt < dz * (1.0 - 1e-12) {
            return Err(Error::Precondition(format!(
                "the characteristic scheme needs c·dt = dz (got {cdt} < {dz})"
            )));
        }
        Ok(())
    }
}

/// Probe pulse injected at z = 0: A_in(t) = A_{l,o} e^{iϑ} exp{−(t − t_c)²/2δt₀²}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Injection {
    pub peak: f64,
    pub phase: f64,
    pub t_center: f64,
    pub duration: f64,
}

impl Injection {
    /// Temporal profile whose in-medium envelope is the given Gaussian pulse.
    pub fn from_pulse(pulse: &GaussianPulseSpec) -> Self {
        Injection {
            peak: pulse.peak_amplitude(),
            phase: pulse.theta_l,
            t_center: pulse.z0 / pulse.v_l,
            duration: pulse.delta_t0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Injection {
            peak: self.peak * factor,
            ..self
        }
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        let x = (t - self.t_center) / self.duration;
        Complex64::from_polar(self.peak * (-0.5 * x * x).exp(), self.phase)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MBState {
    pub t: f64,
    pub z: Vec<f64>,
    /// A_p(z) per channel.
    pub fields: Vec<Vec<Complex64>>,
    /// s_p(z) per channel.
    pub coherences: Vec<Vec<Complex64>>,
    pub p12: Vec<Complex64>,
}

impl MBState {
    fn zero(n_channels: usize, z: Vec<f64>, t: f64) -> Self {
        let n = z.len();
        MBState {
            t,
            z,
            fields: vec![vec![ZERO; n]; n_channels],
            coherences: vec![vec![ZERO; n]; n_channels],
            p12: vec![ZERO; n],
        }
    }

    /// Σ_p ∫|A_p|² dz + N ∫(Σ_p |s_p|² + |P|²) dz, conserved up to boundary
    /// fluxes when every decay rate vanishes.
    pub fn energy(&self, n_line: f64) -> f64 {
        let dz = self.z[1] - self.z[0];
        let trap = |f: &dyn Fn(usize) -> f64| {
            let n = self.z.len();
            (0..n)
                .map(|j| if j == 0 || j == n - 1 { 0.5 * f(j) } else { f(j) })
                .sum::<f64>()
                * dz
        };
        let field = trap(&|j| self.fields.iter().map(|a| a[j].norm_sqr()).sum());
        let atoms = trap(&|j| {
            self.coherences.iter().map(|s| s[j].norm_sqr()).sum::<f64>() + self.p12[j].norm_sqr()
        });
        field + n_line * atoms
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MBRun {
    pub snapshots: Vec<MBState>,
    /// Step times of the boundary traces.
    pub times: Vec<f64>,
    /// Outgoing field per channel: A_p(z = L) for forward, A_p(0) for backward.
    pub outputs: Vec<Vec<Complex64>>,
    /// Injected probe A_l(0, t).
    pub input: Vec<Complex64>,
    /// c ∫ Σ|A_in|² dt and c ∫ Σ|A_out|² dt.
    pub energy_in: f64,
    pub energy_out: f64,
}

impl MBRun {
    /// Mean transit time ⟨t⟩_out − ⟨t⟩_in of |A|² for channel `p`.
    pub fn delay(&self, p: usize) -> Result<f64> {
        let dt = self.times.get(1).map_or(1.0, |t1| t1 - self.times[0]);
        let din: Vec<f64> = self.input.iter().map(|a| a.norm_sqr()).collect();
        let dout: Vec<f64> = self.outputs[p].iter().map(|a| a.norm_sqr()).collect();
        let mi = moments(&self.times, &din, dt).ok_or(Error::ZeroNorm)?;
        let mo = moments(&self.times, &dout, dt).ok_or(Error::ZeroNorm)?;
        Ok(mo.mean - mi.mean)
    }

    /// ∫|A_out,p|² dt / ∫|A_in|² dt.
    pub fn transmission(&self, p: usize) -> f64 {
        let e_in: f64 = self.input.iter().map(|a| a.norm_sqr()).sum();
        let e_out: f64 = self.outputs[p].iter().map(|a| a.norm_sqr()).sum();
        e_out / e_in
    }
}

const MAX_CHANNELS: usize = 8;

#[derive(Clone, Copy, Default)]
struct NodeUpdate {
    a: [Complex64; MAX_CHANNELS],
    s: [Complex64; MAX_CHANNELS],
    p: Complex64,
}

struct Coefficients {
    gamma_tilde: Vec<Complex64>,
    g: Vec<f64>,
    forward: Vec<bool>,
}

/// Integrates from `t_start` (medium empty) through the largest snapshot
/// time. Snapshots are taken at the step times closest to the requests.
pub fn simulate_mb(
    setup: &Setup,
    injection: &Injection,
    grid: &MBGrid,
    t_start: f64,
    snapshots: &[f64],
) -> Result<MBRun> {
    let length = setup.medium.length;
    grid.check(length)?;
    if snapshots.iter().any(|&t| t < t_start) {
        return Err(Error::Precondition("snapshot precedes the start time".into()));
    }
    let n = grid.n_z;
    let nc = setup.channels.len();
    if nc > MAX_CHANNELS {
        return Err(Error::Precondition(format!(
            "the oracle supports at most {MAX_CHANNELS} channels"
        )));
    }
    let dz = grid.dz(length);
    let dt = grid.dt;
    let h = 0.5 * dt;
    let n_line = setup.medium.n_line;
    let gamma12 = setup.medium.gamma12;
    let k0 = setup.medium.k0;
    let probe = setup.probe_index();
    let z: Vec<f64> = (0..n).map(|j| j as f64 * dz).collect();
    let coeffs = Coefficients {
        gamma_tilde: setup.channels.iter().map(|c| c.gamma_tilde()).collect(),
        g: setup.channels.iter().map(|c| c.g).collect(),
        forward: setup
            .channels
            .iter()
            .map(|c| c.direction == Direction::Forward)
            .collect(),
    };
    // e_p(z) = e^{∓ik_o z}
    let phases: Vec<Vec<Complex64>> = coeffs
        .forward
        .iter()
        .map(|&f| {
            let s = if f { -k0 } else { k0 };
            z.iter().map(|&zj| Complex64::from_polar(1.0, s * zj)).collect()
        })
        .collect();

    let t_end = snapshots.iter().copied().fold(t_start, f64::max);
    let n_steps = ((t_end - t_start) / dt).round() as usize;
    let mut targets: Vec<(usize, usize)> = snapshots
        .iter()
        .enumerate()
        .map(|(i, &t)| (((t - t_start) / dt).round() as usize, i))
        .collect();
    targets.sort();

    let mut state = MBState::zero(nc, z.clone(), t_start);
    let mut taken: Vec<Option<MBState>> = vec![None; snapshots.len()];
    let mut next_target = 0;
    let mut take = |step: usize, state: &MBState, next: &mut usize| {
        while *next < targets.len() && targets[*next].0 == step {
            taken[targets[*next].1] = Some(state.clone());
            *next += 1;
        }
    };
    take(0, &state, &mut next_target);

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut outputs = vec![Vec::with_capacity(n_steps + 1); nc];
    let mut input = Vec::with_capacity(n_steps + 1);
    let record = |state: &MBState,
                  times: &mut Vec<f64>,
                  outputs: &mut Vec<Vec<Complex64>>,
                  input: &mut Vec<Complex64>| {
        times.push(state.t);
        for p in 0..nc {
            let j = if coeffs.forward[p] { n - 1 } else { 0 };
            outputs[p].push(state.fields[p][j]);
        }
        input.push(state.fields[probe][0]);
    };
    state.fields[probe][0] = injection.amplitude(t_start);
    record(&state, &mut times, &mut outputs, &mut input);

    let mut scratch = vec![NodeUpdate::default(); n];
    for step in 1..=n_steps {
        let t_old = state.t;
        let t_new = t_start + step as f64 * dt;
        let rabi: Vec<Complex64> = (0..nc)
            .map(|p| setup.rabi(p, t_old + h))
            .collect::<Result<_>>()?;
        let a_in = injection.amplitude(t_new);
        let old = &state;
        scratch.par_iter_mut().with_min_len(64).enumerate().for_each(|(j, out)| {
            let mut upstream = [ZERO; MAX_CHANNELS];
            let mut kappa = [ZERO; MAX_CHANNELS];
            let mut r = [ZERO; MAX_CHANNELS];
            let mut a = [ZERO; MAX_CHANNELS];
            let p_old = old.p12[j];
            for p in 0..nc {
                let g = coeffs.g[p];
                let gt = coeffs.gamma_tilde[p];
                let boundary = if coeffs.forward[p] { j == 0 } else { j == n - 1 };
                let (u, k) = if boundary {
                    (if p == probe { a_in } else { ZERO }, ZERO)
                } else {
                    let ju = if coeffs.forward[p] { j - 1 } else { j + 1 };
                    let c = I * h * n_line * g;
                    (old.fields[p][ju] + c * old.coherences[p][ju], c)
                };
                a[p] = 1.0 + h * gt - I * h * g * k;
                r[p] = old.coherences[p][j] * (1.0 - h * gt)
                    + I * h * g * (old.fields[p][j] + u)
                    + I * h * rabi[p] * phases[p][j] * p_old;
                upstream[p] = u;
                kappa[p] = k;
            }
            let mut lhs = Complex64::new(1.0 + h * gamma12, 0.0);
            let mut rhs = p_old * (1.0 - h * gamma12);
            for p in 0..nc {
                lhs += h * h * rabi[p].norm_sqr() / a[p];
                rhs += I * h * rabi[p].conj() * phases[p][j].conj() * (old.coherences[p][j] + r[p] / a[p]);
            }
            let p_new = rhs / lhs;
            for p in 0..nc {
                let s_new = (r[p] + I * h * rabi[p] * phases[p][j] * p_new) / a[p];
                out.s[p] = s_new;
                out.a[p] = upstream[p] + kappa[p] * s_new;
            }
            out.p = p_new;
        });
        for (j, upd) in scratch.iter().enumerate() {
            for p in 0..nc {
                state.fields[p][j] = upd.a[p];
                state.coherences[p][j] = upd.s[p];
            }
            state.p12[j] = upd.p;
        }
        state.t = t_new;
        if step % 256 == 0 || step == n_steps {
            check_finite(&state)?;
        }
        record(&state, &mut times, &mut outputs, &mut input);
        take(step, &state, &mut next_target);
    }

    let flux = |trace: &[Complex64]| {
        trace.iter().map(|a| a.norm_sqr()).sum::<f64>() * C_LIGHT * dt
    };
    let energy_in = flux(&input);
    let energy_out = outputs.iter().map(|o| flux(o)).sum();
    Ok(MBRun {
        snapshots: taken.into_iter().map(|s| s.expect("every snapshot is reached")).collect(),
        times,
        outputs,
        input,
        energy_in,
        energy_out,
    })
}

fn check_finite(state: &MBState) -> Result<()> {
    for (j, &z) in state.z.iter().enumerate() {
        let bad = !state.p12[j].is_finite()
            || state.fields.iter().any(|a| !a[j].is_finite())
            || state.coherences.iter().any(|s| !s[j].is_finite());
        if bad {
            return Err(Error::NonFinite { t: state.t, z });
        }
    }
    Ok(())
}

/// Field amplitudes A_p(z) at one time, on a uniform grid starting at z[0].
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSnapshot {
    pub t: f64,
    pub z: Vec<f64>,
    pub fields: Vec<Vec<Complex64>>,
}

impl From<&MBState> for AmplitudeSnapshot {
    fn from(s: &MBState) -> Self {
        AmplitudeSnapshot {
            t: s.t,
            z: s.z.clone(),
            fields: s.fields.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelError {
    pub t: f64,
    pub channel: String,
    pub l2_err: f64,
    pub centroid_err: f64,
    pub width_err: f64,
}

fn profile_moments(z: &[f64], mag: &[f64]) -> (f64, f64) {
    let dz = z[1] - z[0];
    let d: Vec<f64> = mag.iter().map(|m| m * m).collect();
    moments(z, &d, dz).map_or((f64::NAN, f64::NAN), |m| (m.mean, m.variance.sqrt()))
}

/// Per snapshot and active channel: relative L2 error of |A| (reference: MB),
/// centroid and rms-width differences of |A|².
pub fn compare_adiabatic(
    setup: &Setup,
    mb: &[AmplitudeSnapshot],
    adiabatic: &[AmplitudeSnapshot],
) -> Result<Vec<ChannelError>> {
    if mb.len() != adiabatic.len() {
        return Err(Error::Mismatch("snapshot counts differ".into()));
    }
    let mut out = Vec::new();
    for (m, a) in mb.iter().zip(adiabatic) {
        if (m.t - a.t).abs() > 1e-9 * m.t.abs().max(1.0) {
            return Err(Error::Mismatch(format!("snapshot times {} vs {}", m.t, a.t)));
        }
        if m.fields.len() != setup.channels.len() || a.fields.len() != setup.channels.len() {
            return Err(Error::Mismatch("channel counts differ".into()));
        }
        let coeffs = derive_coefficients(setup, m.t)?;
        let adz = a.z[1] - a.z[0];
        for (p, ch) in coeffs.channels.iter().enumerate() {
            if !ch.is_active() {
                continue;
            }
            let reference: Vec<f64> = m.fields[p].iter().map(|x| x.norm()).collect();
            let mags: Vec<Complex64> = a.fields[p].iter().map(|x| Complex64::new(x.norm(), 0.0)).collect();
            let test: Vec<f64> = m
                .z
                .iter()
                .map(|&z| interp_uniform(&mags, a.z[0], adz, z).re)
                .collect();
            let (c_ref, w_ref) = profile_moments(&m.z, &reference);
            let (c_test, w_test) = profile_moments(&m.z, &test);
            out.push(ChannelError {
                t: m.t,
                channel: setup.channels[p].label.clone(),
                l2_err: crate::numerics::relative_l2_real(&test, &reference),
                centroid_err: c_test - c_ref,
                width_err: w_test - w_ref,
            });
        }
    }
    Ok(out)
}

/// Adiabatic counterpart of an MB run: the probe ratio field Ψ_l is sampled
/// from the MB state at `t_sample`, evolved with the exact transfer function
/// and converted to field amplitudes at each requested time.
pub fn adiabatic_from_mb(
    setup: &Setup,
    sample: &MBState,
    n_k: usize,
    times: &[f64],
) -> Result<Vec<AmplitudeSnapshot>> {
    let probe = setup.probe_index();
    let omega = setup.rabi(probe, sample.t)?;
    if omega.norm() == 0.0 {
        return Err(Error::Precondition("probe control is off at the sampling time".into()));
    }
    let scale = setup.medium.n_line.sqrt() * setup.probe().g / omega;
    let k0 = setup.medium.k0;
    let psi: Vec<Complex64> = sample.fields[probe]
        .iter()
        .zip(&sample.z)
        .map(|(a, &z)| a * scale * Complex64::from_polar(1.0, k0 * z))
        .collect();
    let grid = SpectralGrid::new(n_k, setup.medium.length)?;
    let dz = sample.z[1] - sample.z[0];
    let mut state = MCState::init(
        setup,
        ProbeEnvelope::Sampled {
            t0: sample.t,
            z_start: sample.z[0],
            dz,
            values: &psi,
        },
        grid,
    )?;
    times
        .iter()
        .map(|&t| {
            state.evolve(setup, t)?;
            let env = synthesize(&state, setup, SynthesisMethod::Spectral)?;
            Ok(AmplitudeSnapshot {
                t,
                z: env.z.clone(),
                fields: to_amplitudes(&env, setup, t)?,
            })
        })
        .collect()
}

/// Runs the MB oracle and the adiabatic propagator on one scenario and
/// compares them at `snapshots`. The adiabatic run starts from the MB state
/// at `t_sample`, once the probe has fully entered the medium.
pub fn mb_check(
    setup: &Setup,
    pulse: &GaussianPulseSpec,
    grid: &MBGrid,
    n_k: usize,
    t_start: f64,
    t_sample: f64,
    snapshots: &[f64],
) -> Result<(MBRun, Vec<ChannelError>)> {
    let mut requests = vec![t_sample];
    requests.extend_from_slice(snapshots);
    let run = simulate_mb(setup, &Injection::from_pulse(pulse), grid, t_start, &requests)?;
    let times: Vec<f64> = run.snapshots[1..].iter().map(|s| s.t).collect();
    let adiabatic = adiabatic_from_mb(setup, &run.snapshots[0], n_k, &times)?;
    let mb: Vec<AmplitudeSnapshot> = run.snapshots[1..].iter().map(AmplitudeSnapshot::from).collect();
    let report = compare_adiabatic(setup, &mb, &adiabatic)?;
    Ok((run, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::{Channel, ControlSchedule, ControlTable, Medium};

    fn setup(gamma: f64, delta: f64, length: f64) -> Setup {
        let medium = Medium {
            n_line: 100.0,
            length,
            k0: 0.0,
            gamma12: 0.0,
            gamma2: 0.0,
        };
        let channels = vec![Channel::new("l", Direction::Forward, 1.0, gamma, delta)];
        let schedule = ControlSchedule::new(vec![ControlTable::constant("l", 0.0, 1.0)]);
        Setup::new(medium, channels, schedule, "l").unwrap()
    }

    fn injection() -> Injection {
        Injection {
            peak: 1.0,
            phase: 0.3,
            t_center: 30.0,
            duration: 8.0,
        }
    }

    #[test]
    fn zero_input_stays_zero() {
        let s = setup(1.0, 0.0, 1.0);
        let grid = MBGrid::new(101, 1.0).unwrap();
        let run = simulate_mb(&s, &injection().scaled(0.0), &grid, 0.0, &[20.0]).unwrap();
        let st = &run.snapshots[0];
        assert!(st.fields.iter().flatten().all(|a| *a == ZERO));
        assert!(st.p12.iter().all(|a| *a == ZERO));
    }

    #[test]
    fn response_is_linear() {
        let s = setup(1.0, 0.2, 1.0);
        let grid = MBGrid::new(101, 1.0).unwrap();
        let a = simulate_mb(&s, &injection(), &grid, 0.0, &[40.0]).unwrap();
        let b = simulate_mb(&s, &injection().scaled(3.7), &grid, 0.0, &[40.0]).unwrap();
        let (sa, sb) = (&a.snapshots[0], &b.snapshots[0]);
        let scaled = |v: &[Complex64]| v.iter().map(|x| 3.7 * x).collect::<Vec<_>>();
        for (x, y) in [
            (&sa.fields[0], &sb.fields[0]),
            (&sa.coherences[0], &sb.coherences[0]),
            (&sa.p12, &sb.p12),
        ] {
            assert!(crate::numerics::relative_l2(&scaled(x), y) < 1e-10);
        }
    }

    #[test]
    fn lossless_energy_is_accounted_by_fluxes() {
        let s = setup(1e-9, 3.0, 1.0);
        let grid = MBGrid::new(201, 1.0).unwrap();
        let run = simulate_mb(&s, &injection(), &grid, 0.0, &[25.0, 60.0]).unwrap();
        let mid = &run.snapshots[0];
        let stored = mid.energy(100.0);
        assert!(stored > 0.0);
        // at the end the medium is empty again: everything injected left
        let end = run.snapshots[1].energy(100.0);
        let balance = (run.energy_in - run.energy_out - end) / run.energy_in;
        assert!(balance.abs() < 0.01, "balance {balance}");
    }

    #[test]
    fn invalid_grids_are_rejected() {
        let s = setup(1.0, 0.0, 1.0);
        let mut grid = MBGrid::new(101, 1.0).unwrap();
        grid.dt *= 1.5;
        assert!(matches!(
            simulate_mb(&s, &injection(), &grid, 0.0, &[1.0]),
            Err(Error::Cfl { .. })
        ));
    }

    #[test]
    fn self_comparison_is_exact() {
        let s = setup(1.0, 0.0, 1.0);
        let grid = MBGrid::new(101, 1.0).unwrap();
        let run = simulate_mb(&s, &injection(), &grid, 0.0, &[30.0]).unwrap();
        let snap = AmplitudeSnapshot::from(&run.snapshots[0]);
        let r = compare_adiabatic(&s, &[snap.clone()], &[snap]).unwrap();
        assert!(r[0].l2_err < 1e-14);
        assert!(r[0].centroid_err.abs() < 1e-12);
        assert!(compare_adiabatic(&s, &[], &[AmplitudeSnapshot::from(&run.snapshots[0])]).is_err());
    }
}
