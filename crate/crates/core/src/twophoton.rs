//! Two-polariton (EPR) correlations of a stored photon pair: wavefunction,
//! counts, coherence lengths, g⁽²⁾ and the preservation margin.
//!
//! Every function takes the accumulated spreading s = ∫δω″dt′ directly.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::numerics::bisect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonSpec {
    /// Two-photon correlation length.
    pub a: f64,
    /// Single-photon length.
    pub b: f64,
    /// Width correction δl²_{l,l}.
    pub delta_l2: f64,
}

impl TwoPhotonSpec {
    pub fn new(a: f64, b: f64, delta_l2: f64) -> Result<Self> {
        if !(b > 0.0 && a > b && a.is_finite()) {
            return Err(invalid("twophoton", "requires a > b > 0"));
        }
        if !(delta_l2 >= 0.0 && delta_l2.is_finite()) {
            return Err(invalid("twophoton.delta_l2", "must be >= 0"));
        }
        Ok(TwoPhotonSpec { a, b, delta_l2 })
    }

    pub fn spread(&self, s: f64) -> Result<SpreadState> {
        SpreadState::new(self, s)
    }
}

/// Derived lengths at spreading `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadState {
    pub s: f64,
    pub b_tau: f64,
    pub b1: f64,
    pub l_l2: f64,
    pub l_l2_0: f64,
    pub l_coh2: f64,
    pub l_l1: f64,
    pub l_l1_0: f64,
    pub l_coh1: f64,
}

impl SpreadState {
    pub fn new(spec: &TwoPhotonSpec, s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(invalid("s", "spreading must be finite and >= 0"));
        }
        let (a, b) = (spec.a, spec.b);
        let a2 = a * a;
        let b_tau2 = b * b + s;
        let b12 = b_tau2 + spec.delta_l2;
        let l_l1 = (a2 + b12).sqrt();
        let l_l1_0 = (a2 + b * b).sqrt();
        Ok(SpreadState {
            s,
            b_tau: b_tau2.sqrt(),
            b1: b12.sqrt(),
            l_l2: (2.0 * a2 + b12).sqrt(),
            l_l2_0: (2.0 * a2 + b * b).sqrt(),
            l_coh2: b12.sqrt() * (2.0 + b12 / a2).sqrt(),
            l_l1,
            l_l1_0,
            l_coh1: SQRT_2 * (l_l1 / a2) * (l_l1 * l_l1 * l_l1_0 * l_l1_0 - a2 * a2).sqrt(),
        })
    }

    /// Variance of |Ψ_II|² along w = (Z2 − Z1)/√2.
    pub fn antidiagonal_variance(&self) -> f64 {
        1.0 / (2.0 / self.l_l2.powi(2) + 4.0 / self.l_coh2.powi(2))
    }

    /// Variance of |Ψ_II|² along u = (Z1 + Z2)/√2.
    pub fn diagonal_variance(&self) -> f64 {
        self.l_l2.powi(2) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counts {
    pub n2: f64,
    pub n: f64,
    pub p_detect: f64,
}

pub fn counts(spec: &TwoPhotonSpec, s: f64) -> Result<Counts> {
    let st = spec.spread(s)?;
    let n2 = (spec.b / st.b1) * (st.l_l2_0 / st.l_l2);
    let n = 2.0 * SQRT_2 / (1.0 + (st.b1 / spec.b).powi(2)).sqrt();
    Ok(Counts {
        n2,
        n,
        p_detect: n2 / 2.0,
    })
}

pub fn wavefunction(spec: &TwoPhotonSpec, s: f64, z1: f64, z2: f64) -> Result<f64> {
    let st = spec.spread(s)?;
    let n2 = counts(spec, s)?.n2;
    Ok(wavefunction_at(spec, &st, n2, z1, z2))
}

fn wavefunction_at(spec: &TwoPhotonSpec, st: &SpreadState, n2: f64, z1: f64, z2: f64) -> f64 {
    let norm = (PI * spec.a * st.l_coh2).powf(-0.5);
    n2.sqrt()
        * norm
        * (-(z1 * z1 + z2 * z2) / (2.0 * st.l_l2 * st.l_l2)).exp()
        * (-(z2 - z1).powi(2) / (2.0 * st.l_coh2 * st.l_coh2)).exp()
}

/// Samples Ψ_II on the square grid `coords × coords`, row-major in Z1.
pub fn wavefunction_grid(spec: &TwoPhotonSpec, s: f64, coords: &[f64]) -> Result<Vec<f64>> {
    let st = spec.spread(s)?;
    let n2 = counts(spec, s)?.n2;
    Ok(coords
        .par_iter()
        .flat_map_iter(|&z1| coords.iter().map(move |&z2| (z1, z2)))
        .map(|(z1, z2)| wavefunction_at(spec, &st, n2, z1, z2))
        .collect())
}

pub fn correlator_ii(spec: &TwoPhotonSpec, s: f64, z1: f64, z2: f64) -> Result<f64> {
    let st = spec.spread(s)?;
    let pref = 4.0 / PI.sqrt() * st.l_l2_0 * spec.b / (st.l_coh1 * spec.a * spec.a);
    Ok(pref
        * (-(z1 * z1 + z2 * z2) / (2.0 * st.l_l1 * st.l_l1)).exp()
        * (-(z1 - z2).powi(2) / (2.0 * st.l_coh1 * st.l_coh1)).exp())
}

/// ∫ I_II(Z, Z) dZ in closed form.
pub fn correlator_diagonal_integral(spec: &TwoPhotonSpec, s: f64) -> Result<f64> {
    let st = spec.spread(s)?;
    Ok(4.0 * st.l_l2_0 * spec.b * st.l_l1 / (st.l_coh1 * spec.a * spec.a))
}

pub fn g2(spec: &TwoPhotonSpec, s: f64) -> Result<f64> {
    let st = spec.spread(s)?;
    let b = spec.b;
    Ok((b / (2.0 * st.b_tau)) * (spec.a.powi(2) + st.l_l1_0.powi(2) * st.b1.powi(2) / (b * b))
        / (st.l_l2_0 * st.l_l2))
}

/// lim_{s→∞} g⁽²⁾ = (a² + b²)/(2b√(2a² + b²)) for δl² = 0.
pub fn g2_limit(spec: &TwoPhotonSpec) -> f64 {
    let (a, b) = (spec.a, spec.b);
    (a * a + b * b) / (2.0 * b * (2.0 * a * a + b * b).sqrt())
}

/// Spreading s* at which g⁽²⁾ first reaches 1, if it does.
pub fn g2_unity(spec: &TwoPhotonSpec) -> Result<Option<f64>> {
    let f = |s: f64| g2(spec, s).map(|g| g - 1.0).unwrap_or(f64::NAN);
    let mut hi = spec.b * spec.b;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 * spec.b * spec.b {
            return Ok(None);
        }
    }
    Ok(bisect(f, 0.0, hi, 1e-13 * hi))
}

/// (b² − s, b² − s ≥ 0).
pub fn preservation_margin(spec: &TwoPhotonSpec, s: f64) -> Result<(f64, bool)> {
    spec.spread(s)?;
    let margin = spec.b * spec.b - s;
    Ok((margin, margin >= 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Panel {
    /// √s / b.
    pub root_s_over_b: f64,
    pub coords: Vec<f64>,
    /// |Ψ_II|, row-major in Z1.
    pub values: Vec<f64>,
}

/// |Ψ_II| grids at √s/b ∈ {5, 20, 40}.
pub fn fig2_data(spec: &TwoPhotonSpec, n: usize) -> Result<Vec<Fig2Panel>> {
    [5.0, 20.0, 40.0]
        .iter()
        .map(|&r| {
            let s = (r * spec.b).powi(2);
            let st = spec.spread(s)?;
            let half = 3.0 * st.l_l2 / SQRT_2;
            let coords: Vec<f64> = (0..n)
                .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
                .collect();
            let values = wavefunction_grid(spec, s, &coords)?;
            Ok(Fig2Panel {
                root_s_over_b: r,
                coords,
                values,
            })
        })
        .collect()
}

fn s_samples(s_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if n == 1 { 0.0 } else { s_max * i as f64 / (n - 1) as f64 })
        .collect()
}

/// (s, N2, N) rows.
pub fn fig3_data(spec: &TwoPhotonSpec, s_max: f64, n: usize) -> Result<Vec<(f64, f64, f64)>> {
    s_samples(s_max, n)
        .into_iter()
        .map(|s| counts(spec, s).map(|c| (s, c.n2, c.n)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fig4Mark {
    Sample,
    Start,
    Unity,
    Asymptote,
}

/// (s, g2, mark) rows; the g2 = 0.5 start, g2 = 1 crossing and asymptote are
/// appended as annotated rows.
pub fn fig4_data(spec: &TwoPhotonSpec, s_max: f64, n: usize) -> Result<Vec<(f64, f64, Fig4Mark)>> {
    let mut rows = s_samples(s_max, n)
        .into_iter()
        .map(|s| g2(spec, s).map(|g| (s, g, Fig4Mark::Sample)))
        .collect::<Result<Vec<_>>>()?;
    rows.push((0.0, g2(spec, 0.0)?, Fig4Mark::Start));
    if let Some(s) = g2_unity(spec)? {
        rows.push((s, g2(spec, s)?, Fig4Mark::Unity));
    }
    rows.push((f64::INFINITY, g2_limit(spec), Fig4Mark::Asymptote));
    Ok(rows)
}
