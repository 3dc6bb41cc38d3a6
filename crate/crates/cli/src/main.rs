use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use mclight_core::dispersion::{self, DispersionMode};
use mclight_core::gaussian::{evolve_gaussian, polariton_number};
use mclight_core::mboracle::{mb_check, MBGrid};
use mclight_core::medium::derive_coefficients;
use mclight_core::propagator::{
    dark_residual, synthesize, to_amplitudes, MCState, ProbeEnvelope, SpectralGrid, SynthesisMethod,
};
use mclight_core::scenario::Scenario;
use mclight_core::twophoton::{self, Fig4Mark, TwoPhotonSpec};

#[derive(Parser)]
#[command(name = "mclight", version, about = "Multi-color slow and stationary light laboratory")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory; overrides run.out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Spectral grid size; overrides run.nk.
    #[arg(long, global = true)]
    nk: Option<usize>,
    /// Maxwell-Bloch grid size; overrides run.nz.
    #[arg(long, global = true)]
    nz: Option<usize>,
    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group velocity, second-order dispersion and stopping residual per control segment.
    Dispersion,
    /// Spectral propagation with per-snapshot channel envelopes.
    Propagate,
    /// Closed-form Gaussian pulse evolution.
    Gaussian,
    /// Two-photon tables.
    Twophoton {
        /// Comma-separated spreading values s = δω″τ.
        #[arg(long, value_delimiter = ',')]
        fig2: Option<Vec<f64>>,
        /// s_max and sample count.
        #[arg(long, num_args = 2, value_names = ["S_MAX", "N"])]
        fig3: Option<Vec<f64>>,
        /// s_max and sample count.
        #[arg(long, num_args = 2, value_names = ["S_MAX", "N"])]
        fig4: Option<Vec<f64>>,
    },
    /// Maxwell-Bloch versus adiabatic error report.
    MbCheck,
    /// Figure data (fig2, fig3 or fig4) with the figure parameters.
    Figure { id: String },
}

struct RunContext {
    scenario: Option<Scenario>,
    out: PathBuf,
    command: String,
}

impl RunContext {
    fn scenario(&self) -> Result<&Scenario> {
        self.scenario
            .as_ref()
            .ok_or_else(|| anyhow!("`{}` needs --scenario", self.command))
    }

    fn header(&self) -> String {
        let mut h = format!("# mclight {} {}\n", self.command, env!("CARGO_PKG_VERSION"));
        if let Some(s) = &self.scenario {
            for line in s.to_toml().lines().filter(|l| !l.is_empty()) {
                let _ = writeln!(h, "# {line}");
            }
        }
        h
    }

    fn write(&self, name: &str, extra: &str, columns: &str, rows: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join(name);
        let body = format!("{}{extra}{columns}\n{rows}", self.header());
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        info!("wrote {}", path.display());
        Ok(path)
    }
}

fn two_photon_spec(ctx: &RunContext) -> Result<TwoPhotonSpec> {
    Ok(match &ctx.scenario {
        Some(s) => s.two_photon()?,
        None => TwoPhotonSpec::new(10.0, 1.0, 0.0)?,
    })
}

fn run_dispersion(ctx: &RunContext) -> Result<()> {
    let scenario = ctx.scenario()?;
    let setup = scenario.setup()?;
    let mut rows = String::new();
    for t in setup.schedule.breakpoints() {
        let c = derive_coefficients(&setup, t)?;
        let d2 = dispersion::second_order_dispersion(&c, DispersionMode::General)?;
        let spread = dispersion::spreading_time(scenario.probe.l0, &c)?;
        writeln!(
            rows,
            "{t},{},{},{},{},{spread}",
            dispersion::group_velocity(&c),
            d2.re,
            d2.im,
            dispersion::stopping_residual(&c)
        )?;
    }
    ctx.write("dispersion.csv", "", "t,v,d2_re,d2_im,stopping_residual,spreading_time", &rows)?;
    Ok(())
}

fn snapshot_times(scenario: &Scenario) -> Vec<f64> {
    let mut times = scenario.run.snapshots.clone();
    if times.is_empty() {
        times.push(scenario.probe.t0);
    }
    times.sort_by(f64::total_cmp);
    times
}

fn run_propagate(ctx: &RunContext) -> Result<()> {
    let scenario = ctx.scenario()?;
    let setup = scenario.setup()?;
    let pulse = scenario.pulse(&setup)?;
    let grid = SpectralGrid::new(scenario.run.nk, setup.medium.length)?;
    let mut state = MCState::init(&setup, ProbeEnvelope::Gaussian(&pulse), grid)?;
    let labels: Vec<&str> = setup.channels.iter().map(|c| c.label.as_str()).collect();
    let mut columns = String::from("z");
    for prefix in ["psi", "a"] {
        for l in &labels {
            let _ = write!(columns, ",{prefix}_re_{l},{prefix}_im_{l}");
        }
    }
    let mut summary = String::new();
    for (i, &t) in snapshot_times(scenario).iter().enumerate() {
        state.evolve(&setup, t)?;
        let env = synthesize(&state, &setup, SynthesisMethod::Spectral)?;
        let amps = to_amplitudes(&env, &setup, t)?;
        let mut rows = String::new();
        for (j, z) in env.z.iter().enumerate() {
            let _ = write!(rows, "{z}");
            for f in env.fields.iter().chain(&amps) {
                let _ = write!(rows, ",{},{}", f[j].re, f[j].im);
            }
            rows.push('\n');
        }
        ctx.write(&format!("snapshot_{i:03}.csv"), &format!("# t = {t}\n"), &columns, &rows)?;
        let obs = state.observables()?;
        let residual = dark_residual(&env, &setup).unwrap_or(f64::NAN);
        writeln!(summary, "{t},{},{},{},{residual}", obs.centroid, obs.width, obs.polariton_number)?;
    }
    ctx.write("summary.csv", "", "t,centroid,width,polariton_number,dark_residual", &summary)?;
    Ok(())
}

fn run_gaussian(ctx: &RunContext) -> Result<()> {
    let scenario = ctx.scenario()?;
    let setup = scenario.setup()?;
    let pulse = scenario.pulse(&setup)?;
    let mut rows = String::new();
    for t in snapshot_times(scenario) {
        let report = evolve_gaussian(&pulse, &setup, t)?;
        let n = polariton_number(&pulse, &setup, t)?;
        for ch in &report.channels {
            writeln!(
                rows,
                "{t},{},{},{},{},{},{},{},{n}",
                ch.label, ch.center, ch.width, ch.shift, ch.width_correction, ch.psi_peak, ch.amplitude_peak
            )?;
        }
    }
    ctx.write(
        "gaussian.csv",
        "",
        "t,channel,center,width,shift,width_correction,psi_peak,amplitude_peak,polariton_number",
        &rows,
    )?;
    Ok(())
}

fn grid_rows(spec: &TwoPhotonSpec, s: f64, label: f64, n: usize, rows: &mut String) -> Result<()> {
    let half = 3.0 * spec.spread(s)?.l_l2 / std::f64::consts::SQRT_2;
    let coords: Vec<f64> = (0..n)
        .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
        .collect();
    let values = twophoton::wavefunction_grid(spec, s, &coords)?;
    for (i, z1) in coords.iter().enumerate() {
        for (j, z2) in coords.iter().enumerate() {
            writeln!(rows, "{label},{z1},{z2},{}", values[i * n + j])?;
        }
    }
    Ok(())
}

const GRID_POINTS: usize = 101;

fn emit_fig2(ctx: &RunContext, spec: &TwoPhotonSpec, s_list: Option<&[f64]>) -> Result<PathBuf> {
    let mut rows = String::new();
    match s_list {
        Some(list) => {
            for &s in list {
                grid_rows(spec, s, s, GRID_POINTS, &mut rows)?;
            }
            ctx.write("fig2.csv", "", "s,z1,z2,psi", &rows)
        }
        None => {
            for panel in twophoton::fig2_data(spec, GRID_POINTS)? {
                let n = panel.coords.len();
                for (i, z1) in panel.coords.iter().enumerate() {
                    for (j, z2) in panel.coords.iter().enumerate() {
                        writeln!(rows, "{},{z1},{z2},{}", panel.root_s_over_b, panel.values[i * n + j])?;
                    }
                }
            }
            ctx.write("fig2.csv", "", "root_s_over_b,z1,z2,psi", &rows)
        }
    }
}

fn sample_args(args: &[f64]) -> Result<(f64, usize)> {
    let (s_max, n) = (args[0], args[1]);
    if !(s_max > 0.0) || n < 2.0 || n.fract() != 0.0 {
        bail!("expected a positive s_max and an integer sample count >= 2");
    }
    Ok((s_max, n as usize))
}

fn emit_fig3(ctx: &RunContext, spec: &TwoPhotonSpec, s_max: f64, n: usize) -> Result<PathBuf> {
    let mut rows = String::new();
    for (s, n2, n) in twophoton::fig3_data(spec, s_max, n)? {
        writeln!(rows, "{s},{n2},{n}")?;
    }
    ctx.write("fig3.csv", "", "s,N2,N", &rows)
}

fn emit_fig4(ctx: &RunContext, spec: &TwoPhotonSpec, s_max: f64, n: usize) -> Result<PathBuf> {
    let mut rows = String::new();
    for (s, g, mark) in twophoton::fig4_data(spec, s_max, n)? {
        let mark = match mark {
            Fig4Mark::Sample => "",
            Fig4Mark::Start => "g2=0.5",
            Fig4Mark::Unity => "g2=1",
            Fig4Mark::Asymptote => "asymptote",
        };
        writeln!(rows, "{s},{g},{mark}")?;
    }
    ctx.write("fig4.csv", "", "s,g2,mark", &rows)
}

fn run_mb_check(ctx: &RunContext) -> Result<()> {
    let scenario = ctx.scenario()?;
    let setup = scenario.setup()?;
    let pulse = scenario.pulse(&setup)?;
    let sample = scenario
        .run
        .mb_sample
        .ok_or_else(|| anyhow!("mb-check needs run.mb_sample"))?;
    let grid = MBGrid::new(scenario.run.nz, setup.medium.length)?;
    let times = snapshot_times(scenario);
    let (_, report) = mb_check(
        &setup,
        &pulse,
        &grid,
        scenario.run.nk,
        scenario.run.mb_start,
        sample,
        &times,
    )?;
    let mut rows = String::new();
    for r in &report {
        writeln!(rows, "{},{},{},{},{}", r.t, r.channel, r.l2_err, r.centroid_err, r.width_err)?;
    }
    ctx.write("mb_check.csv", "", "t,channel,l2_err,centroid_err,width_err", &rows)?;
    Ok(())
}

fn load(cli: &Cli) -> Result<Option<Scenario>> {
    let Some(path) = &cli.scenario else {
        return Ok(None);
    };
    let mut scenario = Scenario::load(path)?;
    if let Some(nk) = cli.nk {
        scenario.run.nk = nk;
    }
    if let Some(nz) = cli.nz {
        scenario.run.nz = nz;
    }
    if let Some(out) = &cli.out {
        scenario.run.out = out.display().to_string();
    }
    Ok(Some(scenario))
}

fn run(cli: Cli) -> Result<()> {
    let scenario = load(&cli)?;
    let out = match (&cli.out, &scenario) {
        (Some(o), _) => o.clone(),
        (None, Some(s)) => Path::new(&s.run.out).to_path_buf(),
        (None, None) => PathBuf::from("out"),
    };
    let name = match &cli.command {
        Command::Dispersion => "dispersion",
        Command::Propagate => "propagate",
        Command::Gaussian => "gaussian",
        Command::Twophoton { .. } => "twophoton",
        Command::MbCheck => "mb-check",
        Command::Figure { .. } => "figure",
    };
    let ctx = RunContext {
        scenario,
        out,
        command: name.to_string(),
    };
    match &cli.command {
        Command::Dispersion => run_dispersion(&ctx),
        Command::Propagate => run_propagate(&ctx),
        Command::Gaussian => run_gaussian(&ctx),
        Command::MbCheck => run_mb_check(&ctx),
        Command::Twophoton { fig2, fig3, fig4 } => {
            if fig2.is_none() && fig3.is_none() && fig4.is_none() {
                bail!("twophoton needs at least one of --fig2, --fig3, --fig4");
            }
            let spec = two_photon_spec(&ctx)?;
            if let Some(list) = fig2 {
                emit_fig2(&ctx, &spec, Some(list))?;
            }
            if let Some(args) = fig3 {
                let (s_max, n) = sample_args(args)?;
                emit_fig3(&ctx, &spec, s_max, n)?;
            }
            if let Some(args) = fig4 {
                let (s_max, n) = sample_args(args)?;
                emit_fig4(&ctx, &spec, s_max, n)?;
            }
            Ok(())
        }
        Command::Figure { id } => {
            // figure parameters: a = 10b, b = 1
            let spec = TwoPhotonSpec::new(10.0, 1.0, 0.0)?;
            match id.as_str() {
                "fig2" => emit_fig2(&ctx, &spec, None),
                "fig3" => emit_fig3(&ctx, &spec, 1600.0, 401),
                "fig4" => emit_fig4(&ctx, &spec, 100.0, 401),
                other => bail!("unknown figure id `{other}` (expected fig2, fig3 or fig4)"),
            }
            .map(|_| ())
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
