//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::time::Instant;

use mclight_core::dispersion::{
    detuning_balance, finite_difference_derivatives, group_velocity, optimal_detunings,
    second_order_dispersion, spreading_time, DispersionMode,
};
use mclight_core::gaussian::{
    accumulate, emitted_pulse_and_energies, evolve_gaussian, output_energy, polariton_number,
    GaussianPulseSpec,
};
use mclight_core::mboracle::{mb_check, simulate_mb, ChannelError, Injection, MBGrid};
use mclight_core::medium::derive_coefficients;
use mclight_core::numerics::{bisect, moments, relative_l2};
use mclight_core::propagator::{synthesize, MCState, ProbeEnvelope, SpectralGrid, SynthesisMethod};
use mclight_core::twophoton::{self, TwoPhotonSpec};
use mclight_core::{Channel, ControlSchedule, ControlTable, Direction, Medium, Setup};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, what: String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what)
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn medium(length: f64) -> Medium {
    Medium {
        n_line: 100.0,
        length,
        k0: 0.0,
        gamma12: 0.0,
        gamma2: 0.0,
    }
}

fn fwd(label: &str, delta: f64) -> Channel {
    Channel::new(label, Direction::Forward, 1.0, 1.0, delta)
}

fn bwd(label: &str, delta: f64) -> Channel {
    Channel::new(label, Direction::Backward, 1.0, 1.0, delta)
}

fn spectral_state(setup: &Setup, pulse: &GaussianPulseSpec, n_k: usize) -> Result<MCState, String> {
    let grid = SpectralGrid::new(n_k, setup.medium.length).map_err(err)?;
    MCState::init(setup, ProbeEnvelope::Gaussian(pulse), grid).map_err(err)
}

// 1. g2 curve
fn g2_curve() -> Check {
    let spec = TwoPhotonSpec::new(10.0, 1.0, 0.0).map_err(err)?;
    let g0 = twophoton::g2(&spec, 0.0).map_err(err)?;
    ensure((g0 - 0.5).abs() <= 1e-9, format!("g2(0) = {g0}"))?;
    let s_star = twophoton::g2_unity(&spec)
        .map_err(err)?
        .ok_or("g2 never reaches 1")?;
    ensure((s_star - 13.89).abs() <= 0.01, format!("tau' gives s = {s_star:.4}"))?;
    ensure(
        (s_star / 14.06 - 1.0).abs() <= 0.02,
        format!("s = {s_star:.4} is not within 2% of 14.06"),
    )?;
    let limit = twophoton::g2_limit(&spec);
    ensure((limit - 3.562).abs() <= 1e-3, format!("limit = {limit:.5}"))?;
    ensure(
        (limit / 3.536 - 1.0).abs() <= 0.01,
        format!("limit {limit:.5} not within 1% of 3.536"),
    )?;
    let far = twophoton::g2(&spec, 1e12).map_err(err)?;
    ensure((far - limit).abs() < 1e-4, format!("g2(1e12) = {far}"))?;
    Ok(format!("g2(0) = {g0:.12}, s' = {s_star:.4}, limit = {limit:.5}"))
}

// 2. g2 and number tables
fn g2_tables() -> Check {
    let spec = TwoPhotonSpec::new(10.0, 1.0, 0.0).map_err(err)?;
    let rows = twophoton::fig3_data(&spec, 400.0, 401).map_err(err)?;
    ensure((rows[0].2 - 2.0).abs() <= 1e-12, format!("N(0) = {}", rows[0].2))?;
    ensure(
        rows.windows(2).all(|w| w[1].2 < w[0].2),
        "N is not strictly decreasing".into(),
    )?;
    // the printed interval [5, a/3b] is empty for a = 10b; its reversal is used
    let (lo, hi) = (spec.a / (3.0 * spec.b), 5.0);
    let mut worst: f64 = 0.0;
    for i in 0..=50 {
        let b1 = lo + (hi - lo) * i as f64 / 50.0;
        let s = b1 * b1 - spec.b * spec.b;
        let c = twophoton::counts(&spec, s).map_err(err)?;
        worst = worst.max((c.n / (2.0 * 2f64.sqrt() * c.n2) - 1.0).abs());
    }
    ensure(worst <= 0.05, format!("N vs 2√2·N2 deviates by {worst:.4}"))?;
    Ok(format!("N(0) = 2, monotone, max |N/(2√2 N2) − 1| = {worst:.4} on b1/b ∈ [{lo:.3}, {hi}]"))
}

// 3. two-photon shapes
fn pair_shapes() -> Check {
    let spec = TwoPhotonSpec::new(10.0, 1.0, 0.0).map_err(err)?;
    let panels = twophoton::fig2_data(&spec, 161).map_err(err)?;
    let mut worst: f64 = 0.0;
    for panel in &panels {
        let n = panel.coords.len();
        for i in 0..n {
            for j in 0..n {
                ensure(
                    panel.values[i * n + j] == panel.values[j * n + i],
                    format!("exchange symmetry broken at √s/b = {}", panel.root_s_over_b),
                )?;
            }
        }
        // moments of |Ψ_II|² along w = (Z2 − Z1)/√2 on a rotated grid
        let s = (panel.root_s_over_b * spec.b).powi(2);
        let st = spec.spread(s).map_err(err)?;
        let (sw, su) = (st.antidiagonal_variance().sqrt(), st.diagonal_variance().sqrt());
        let m = 801;
        let w: Vec<f64> = (0..m).map(|k| -8.0 * sw + 16.0 * sw * k as f64 / (m - 1) as f64).collect();
        let u: Vec<f64> = (0..m).map(|k| -8.0 * su + 16.0 * su * k as f64 / (m - 1) as f64).collect();
        let h = 2f64.sqrt().recip();
        let mut density = vec![0.0; m];
        for (k, &wk) in w.iter().enumerate() {
            for &uk in &u {
                let (z1, z2) = (h * (uk - wk), h * (uk + wk));
                density[k] += twophoton::wavefunction(&spec, s, z1, z2).map_err(err)?.powi(2);
            }
        }
        let mom = moments(&w, &density, w[1] - w[0]).ok_or("zero density")?;
        let rel = (mom.variance / st.antidiagonal_variance() - 1.0).abs();
        worst = worst.max(rel);
        ensure(rel <= 0.01, format!("√s/b = {}: variance off by {rel:.4}", panel.root_s_over_b))?;
    }
    Ok(format!("exchange symmetry exact, anti-diagonal variance within {worst:.2e}"))
}

fn stopping_setup(omega_n: f64, t_sw: f64) -> Result<Setup, String> {
    let schedule = ControlSchedule::new(vec![
        ControlTable::constant("l", 0.0, 1.0),
        ControlTable::new("n", vec![0.0, t_sw], vec![0.0, omega_n], 0.0),
    ]);
    Setup::new(medium(16.0), vec![fwd("l", 0.0), bwd("n", 0.0)], schedule, "l").map_err(err)
}

// 4. Stopping condition
fn stopping() -> Check {
    let t_sw = 1.0;
    let l0 = 1.0;
    let balanced = stopping_setup(1.0, t_sw)?;
    let pulse = GaussianPulseSpec::new(&balanced, 1.0, l0, -8.0, 0.0, 0.0).map_err(err)?;
    let coeffs = derive_coefficients(&balanced, t_sw).map_err(err)?;
    let tau = 0.1 * spreading_time(l0, &coeffs).map_err(err)?;

    let start = spectral_state(&balanced, &pulse, 1024)?.evolved(&balanced, t_sw).map_err(err)?;
    let c0 = start.observables().map_err(err)?.centroid;
    let mut drift: f64 = 0.0;
    let mut st = start.clone();
    for i in 1..=10 {
        st.evolve(&balanced, t_sw + tau * i as f64 / 10.0).map_err(err)?;
        drift = drift.max((st.observables().map_err(err)?.centroid - c0).abs());
    }
    ensure(drift <= 1e-3 * l0, format!("balanced drift {drift:.3e}"))?;

    let imbalanced = stopping_setup(0.9f64.sqrt(), t_sw)?;
    let v = group_velocity(&derive_coefficients(&imbalanced, t_sw).map_err(err)?);
    let st = spectral_state(&imbalanced, &pulse, 1024)?;
    let a = st.evolved(&imbalanced, t_sw).map_err(err)?;
    let b = a.evolved(&imbalanced, t_sw + tau).map_err(err)?;
    let measured = (b.observables().map_err(err)?.centroid - a.observables().map_err(err)?.centroid) / tau;
    let rel = (measured / v - 1.0).abs();
    ensure(rel <= 0.05, format!("imbalanced velocity {measured:.4e} vs {v:.4e}"))?;
    Ok(format!(
        "balanced drift {drift:.2e}·l0 over τ = {tau:.1}; 10% imbalance v = {measured:.4e} vs {v:.4e} ({rel:.2e})"
    ))
}

fn optimal_stationary(delta_l: f64, l0_xi: f64, t_sw: f64) -> Result<(Setup, GaussianPulseSpec), String> {
    let mut channels = vec![fwd("l", 0.0), bwd("n", 0.0)];
    let dets = optimal_detunings(&channels, "l", delta_l).map_err(err)?;
    for (c, d) in channels.iter_mut().zip(dets) {
        c.delta = d;
    }
    let schedule = ControlSchedule::new(vec![
        ControlTable::constant("l", 0.0, 1.0),
        ControlTable::new("n", vec![0.0, t_sw], vec![0.0, 1.0], 0.0),
    ]);
    let setup = Setup::new(medium(4.0), channels, schedule, "l").map_err(err)?;
    let l0 = l0_xi / setup.probe_xi().norm();
    let pulse = GaussianPulseSpec::new(&setup, 1.0, l0, -2.0, 0.0, 0.0).map_err(err)?;
    Ok((setup, pulse))
}

// 5. Gaussian oracle
fn gaussian_oracle() -> Check {
    let t_sw = 1e-3;
    let (setup, pulse) = optimal_stationary(0.5, 20.0, t_sw)?;
    let coeffs = derive_coefficients(&setup, t_sw).map_err(err)?;
    let tau = spreading_time(pulse.l0, &coeffs).map_err(err)? / 4.0;
    let start = spectral_state(&setup, &pulse, 2048)?.evolved(&setup, t_sw).map_err(err)?;
    let w0 = start.observables().map_err(err)?.gaussian_width();
    let mut worst_w: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    for frac in [0.25, 0.5, 1.0] {
        let t = t_sw + frac * tau;
        let obs = start.evolved(&setup, t).map_err(err)?.observables().map_err(err)?;
        let growth = obs.gaussian_width().powi(2) - w0 * w0;
        let expected = accumulate(&setup, t_sw, t).map_err(err)?.1.re;
        worst_w = worst_w.max((growth / expected - 1.0).abs());
        let n = polariton_number(&pulse, &setup, t).map_err(err)?;
        worst_n = worst_n.max((obs.polariton_number / n - 1.0).abs());
    }
    ensure(worst_w <= 0.02, format!("width² growth off by {worst_w:.4}"))?;
    ensure(worst_n <= 0.02, format!("polariton number off by {worst_n:.4}"))?;
    Ok(format!("ξ_l·l0 = 20, τ ≤ δt_spread/4: width² growth {worst_w:.2e}, number {worst_n:.2e}"))
}

// 6. Dual-path synthesis
fn dual_path() -> Check {
    let channels = vec![
        fwd("l", 0.2),
        Channel::new("m", Direction::Forward, 1.3, 1.0, 0.338),
        bwd("n", -0.2),
    ];
    let schedule = ControlSchedule::new(vec![
        ControlTable::new("l", vec![0.0, 10.0], vec![1.0, 1.0], 0.0),
        ControlTable::new("m", vec![0.0, 10.0], vec![0.0, 0.5], 0.0),
        ControlTable::new("n", vec![0.0, 10.0], vec![0.0, 1.1], 0.0),
    ]);
    let setup = Setup::new(medium(16.0), channels, schedule, "l").map_err(err)?;
    let pulse = GaussianPulseSpec::new(&setup, 1.0, 1.0, -8.0, 0.4, 0.0).map_err(err)?;
    let st = spectral_state(&setup, &pulse, 4096)?.evolved(&setup, 200.0).map_err(err)?;
    let a = synthesize(&st, &setup, SynthesisMethod::Spectral).map_err(err)?;
    let b = synthesize(&st, &setup, SynthesisMethod::Kernel).map_err(err)?;
    let worst = a
        .fields
        .iter()
        .zip(&b.fields)
        .map(|(x, y)| relative_l2(y, x))
        .fold(0.0, f64::max);
    ensure(worst <= 1e-3, format!("relative L2 {worst:.3e}"))?;
    Ok(format!("max relative L2 over channels {worst:.2e}"))
}

// 7. Dispersion consistency
fn dispersion_consistency() -> Check {
    let chans = vec![
        fwd("l", 0.3),
        Channel::new("m", Direction::Forward, 1.4, 0.8, -0.5),
        Channel::new("n", Direction::Backward, 0.9, 1.2, 0.7),
    ];
    let tables = |r: [f64; 3]| {
        ControlSchedule::new(vec![
            ControlTable::constant("l", 0.0, r[0]),
            ControlTable::constant("m", 0.0, r[1]),
            ControlTable::constant("n", 0.0, r[2]),
        ])
    };
    let general = Setup::new(medium(10.0), chans.clone(), tables([1.0, 0.7, 0.5]), "l").map_err(err)?;
    let c = derive_coefficients(&general, 0.0).map_err(err)?;
    let (d1, d2) = finite_difference_derivatives(&c, 0.0, 0.0, 0.05).map_err(err)?;
    let v = group_velocity(&c);
    let rel_v = ((d1 - v) / v).norm();
    ensure(rel_v <= 1e-8, format!("v from ω(k) off by {rel_v:.2e}"))?;
    let d = second_order_dispersion(&c, DispersionMode::General).map_err(err)?;
    // ω″ = −i δω″
    let rel_d = ((d2 * mclight_core::Complex64::i() - d) / d).norm();
    ensure(rel_d <= 1e-6, format!("general δω″ off by {rel_d:.2e}"))?;

    // stationary optimal: balanced pair at optimal detunings
    let mut stat = chans.clone();
    let dets = optimal_detunings(&stat, "l", 0.4).map_err(err)?;
    for (ch, d) in stat.iter_mut().zip(&dets) {
        ch.delta = *d;
    }
    let r_n = 0.9 * (1.0f64 + (0.7f64 / 1.4).powi(2)).sqrt();
    let stationary = Setup::new(medium(10.0), stat, tables([1.0, 0.7, r_n]), "l").map_err(err)?;
    let c = derive_coefficients(&stationary, 0.0).map_err(err)?;
    let (_, d2) = finite_difference_derivatives(&c, 0.0, 0.0, 0.05).map_err(err)?;
    let d = second_order_dispersion(&c, DispersionMode::StationaryOptimal).map_err(err)?;
    let rel_s = ((d2 * mclight_core::Complex64::i() - d) / d).norm();
    ensure(rel_s <= 1e-6, format!("stationary optimal δω″ off by {rel_s:.2e}"))?;
    let scale: f64 = c
        .channels
        .iter()
        .zip(&dets)
        .map(|(ch, d)| (ch.v * d / (ch.g * ch.g)).abs())
        .sum();
    let balance = detuning_balance(&c, &dets).abs() / scale;
    ensure(balance <= 1e-12, format!("optimal detuning balance {balance:.2e}"))?;

    let single = Setup::new(medium(10.0), vec![fwd("l", 0.3)], ControlSchedule::new(vec![ControlTable::constant("l", 0.0, 1.2)]), "l")
        .map_err(err)?;
    let d = second_order_dispersion(&derive_coefficients(&single, 0.0).map_err(err)?, DispersionMode::General)
        .map_err(err)?;
    ensure(d.norm() == 0.0, format!("single-channel δω″ = {d}"))?;
    Ok(format!(
        "v {rel_v:.1e}, δω″ general {rel_d:.1e}, stationary-optimal {rel_s:.1e}, balance {balance:.1e}, single-channel 0"
    ))
}

fn release_setup(t_sw: f64, t_rel: f64, omega_m: f64) -> Result<Setup, String> {
    let channels = vec![
        fwd("l", 0.0),
        fwd("m", 0.0).with_carrier(2.0),
        bwd("n", 0.0),
    ];
    let schedule = ControlSchedule::new(vec![
        ControlTable::new("l", vec![0.0, t_sw, t_rel], vec![1.0, 1.0, 0.0], 0.0),
        ControlTable::new("m", vec![0.0, t_sw, t_rel], vec![0.0, 0.0, omega_m], 0.0),
        ControlTable::new("n", vec![0.0, t_sw, t_rel], vec![0.0, 1.0, 0.0], 0.0),
    ]);
    Setup::new(medium(8.0), channels, schedule, "l").map_err(err)
}

fn worst_l2(report: &[ChannelError]) -> f64 {
    report.iter().map(|r| r.l2_err).fold(0.0, f64::max)
}

fn describe(report: &[ChannelError]) -> String {
    report
        .iter()
        .map(|r| format!("{}@{}: {:.3}", r.channel, r.t, r.l2_err))
        .collect::<Vec<_>>()
        .join(", ")
}

// 8. MB oracle
fn mb_oracle() -> Check {
    // single-channel delay and transmission
    let short = Setup::new(
        medium(1.0),
        vec![fwd("l", 0.0)],
        ControlSchedule::new(vec![ControlTable::constant("l", 0.0, 1.0)]),
        "l",
    )
    .map_err(err)?;
    let pulse = GaussianPulseSpec::new(&short, 1.0, 0.5, 3.0, 0.0, 0.0).map_err(err)?;
    let gamma_dt0 = pulse.delta_t0 * short.probe().gamma_tilde().norm();
    ensure(gamma_dt0 >= 50.0, format!("γ̃δt0 = {gamma_dt0}"))?;
    let run = simulate_mb(
        &short,
        &Injection::from_pulse(&pulse),
        &MBGrid::new(257, 1.0).map_err(err)?,
        0.0,
        &[700.0],
    )
    .map_err(err)?;
    let expected = short.medium.length / pulse.v_l;
    let delay = run.delay(0).map_err(err)?;
    let transmission = run.transmission(0);
    ensure((delay / expected - 1.0).abs() <= 0.03, format!("delay {delay:.2} vs {expected:.2}"))?;
    ensure(transmission >= 0.95, format!("transmission {transmission:.4}"))?;

    // (i) single-channel slow light
    let single = Setup::new(
        medium(6.0),
        vec![fwd("l", 0.0)],
        ControlSchedule::new(vec![ControlTable::constant("l", 0.0, 1.0)]),
        "l",
    )
    .map_err(err)?;
    let pulse = GaussianPulseSpec::new(&single, 1.0, 0.5, 3.0, 0.0, 0.0).map_err(err)?;
    ensure(single.probe_xi().norm() * pulse.l0 >= 20.0, "ξ_l·l0 < 20".into())?;
    let grid = MBGrid::new(601, 6.0).map_err(err)?;
    let (_, slow) = mb_check(&single, &pulse, &grid, 1024, 0.0, 500.0, &[550.0, 600.0]).map_err(err)?;

    // (ii) stationary pair, then (iii) release into the frequency-shifted channel m
    let setup = release_setup(600.0, 750.0, 0.8)?;
    let pulse = GaussianPulseSpec::new(&setup, 1.0, 0.5, 3.0, 0.0, 0.0).map_err(err)?;
    let grid = MBGrid::new(801, 8.0).map_err(err)?;
    let (run, report) =
        mb_check(&setup, &pulse, &grid, 2048, 0.0, 550.0, &[650.0, 700.0, 800.0, 850.0]).map_err(err)?;
    let (stationary, release): (Vec<ChannelError>, Vec<ChannelError>) =
        report.into_iter().partition(|r| r.t < 750.0);
    ensure(stationary.len() == 4 && release.len() == 2, "unexpected active channel set".into())?;

    // MB centroid of |A_l|² during the stationary phase
    let centroid = |i: usize| {
        let s = &run.snapshots[i];
        let d: Vec<f64> = s.fields[0].iter().map(|a| a.norm_sqr()).collect();
        moments(&s.z, &d, s.z[1] - s.z[0]).map(|m| m.mean)
    };
    let (c1, c2) = (centroid(1).ok_or("empty")?, centroid(2).ok_or("empty")?);
    let v_stat = ((c2 - c1) / (run.snapshots[2].t - run.snapshots[1].t)).abs();
    ensure(v_stat <= 0.02 * pulse.v_l, format!("stationary MB velocity {v_stat:.2e}"))?;

    for (name, rep) in [("slow", &slow), ("stationary", &stationary), ("release", &release)] {
        ensure(worst_l2(rep) <= 0.05, format!("{name}: {}", describe(rep)))?;
    }
    Ok(format!(
        "delay {delay:.2}/{expected:.2}, T = {transmission:.3}; L2 slow [{}], stationary [{}], release [{}]; |v_stat|/v_l = {:.1e}",
        describe(&slow),
        describe(&stationary),
        describe(&release),
        v_stat / pulse.v_l
    ))
}

// 9. Energy bookkeeping
fn energy_bookkeeping() -> Check {
    let direct = output_energy(1.0, 2.0, 1.2, 1.0);
    ensure((direct - 1.667).abs() <= 1e-3 && (direct - 5.0 / 3.0).abs() <= 1e-12, format!("direct {direct}"))?;

    let single = Setup::new(
        medium(16.0),
        vec![fwd("l", 0.0)],
        ControlSchedule::new(vec![ControlTable::constant("l", 0.0, 1.0)]),
        "l",
    )
    .map_err(err)?;
    let pulse = GaussianPulseSpec::new(&single, 1.3, 1.0, -5.0, 0.0, 0.0).map_err(err)?;
    let e = emitted_pulse_and_energies(&pulse, &single, 500.0).map_err(err)?;
    ensure(
        (e.output_energy / e.input_energy - 1.0).abs() <= 1e-9,
        format!("lossless single channel W_out/W_lo = {}", e.output_energy / e.input_energy),
    )?;

    // stationary storage long enough that l(t_out) = 1.2 l0, then release into
    // a channel at twice the probe carrier
    let (t_sw, omega_m) = (1.0, 0.8);
    let width_at = |t_rel: f64| -> f64 {
        let s = release_setup(t_sw, t_rel, omega_m).expect("valid setup");
        let p = GaussianPulseSpec::new(&s, 1.0, 1.0, -4.0, 0.0, 0.0).expect("valid pulse");
        evolve_gaussian(&p, &s, t_rel + 10.0).map(|r| r.probe().width).unwrap_or(f64::NAN) - 1.2
    };
    let t_rel = bisect(width_at, 2.0, 5000.0, 1e-12).ok_or("no storage time gives l = 1.2 l0")?;
    let setup = release_setup(t_sw, t_rel, omega_m)?;
    let pulse = GaussianPulseSpec::new(&setup, 1.0, 1.0, -4.0, 0.0, 0.0).map_err(err)?;
    let e = emitted_pulse_and_energies(&pulse, &setup, t_rel + 10.0).map_err(err)?;
    let sum: f64 = e.channels.iter().map(|c| c.energy).sum();
    ensure(
        (sum - e.output_energy).abs() <= 1e-12 * e.output_energy,
        format!("Σ W_m = {sum} vs W_out = {}", e.output_energy),
    )?;
    let ratio = e.output_energy / e.input_energy;
    ensure(
        (e.mean_frequency / setup.probe().omega_opt - 2.0).abs() <= 1e-12,
        format!("ω̄/ω_l = {}", e.mean_frequency),
    )?;
    ensure((ratio - 1.667).abs() <= 1e-3, format!("W_out/W_lo = {ratio}"))?;
    ensure((ratio - direct).abs() <= 1e-6, format!("per-channel {ratio} vs direct {direct}"))?;
    Ok(format!("Σ W_m = W_out, lossless ratio 1, release ratio {ratio:.7} (direct {direct:.7})"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("g2 curve", g2_curve),
        ("g2 and number tables", g2_tables),
        ("two-photon shapes", pair_shapes),
        ("stopping condition", stopping),
        ("Gaussian oracle", gaussian_oracle),
        ("dual-path synthesis", dual_path),
        ("dispersion consistency", dispersion_consistency),
        ("MB oracle", mb_oracle),
        ("energy bookkeeping", energy_bookkeeping),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.is_some_and(|n| n != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.2} s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.2} s] {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
