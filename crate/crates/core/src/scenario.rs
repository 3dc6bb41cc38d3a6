//! Scenario files: TOML with sections `medium`, `channels`, `schedule`,
//! `probe` and the optional `run` and `twophoton`. Unknown keys are errors,
//! reported with their full path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianPulseSpec;
use crate::medium::{Channel, ControlSchedule, ControlTable, Direction, Medium, Setup};
use crate::twophoton::TwoPhotonSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    pub n_line: f64,
    pub length: f64,
    #[serde(default)]
    pub k0: f64,
    #[serde(default)]
    pub gamma12: f64,
    /// Defaults to gamma12.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub label: String,
    pub direction: Direction,
    pub g: f64,
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "one")]
    pub omega_opt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub label: String,
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub label: String,
    /// Input amplitude a_l.
    pub a: f64,
    pub l0: f64,
    pub z0: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub t0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_nk")]
    pub nk: usize,
    #[serde(default = "default_nz")]
    pub nz: usize,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "default_out")]
    pub out: String,
    /// Start of the MB integration (medium empty).
    #[serde(default)]
    pub mb_start: f64,
    /// Time at which the adiabatic run is seeded from the MB state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mb_sample: Option<f64>,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            nk: default_nk(),
            nz: default_nz(),
            snapshots: Vec::new(),
            out: default_out(),
            mb_start: 0.0,
            mb_sample: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPhotonSection {
    #[serde(default = "ten")]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default)]
    pub delta_l2: f64,
}

impl Default for TwoPhotonSection {
    fn default() -> Self {
        TwoPhotonSection {
            a: 10.0,
            b: 1.0,
            delta_l2: 0.0,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn ten() -> f64 {
    10.0
}
fn default_nk() -> usize {
    1024
}
fn default_nz() -> usize {
    512
}
fn default_out() -> String {
    "out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub medium: MediumSpec,
    pub channels: Vec<ChannelSpec>,
    pub schedule: Vec<ScheduleSpec>,
    pub probe: ProbeSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub twophoton: TwoPhotonSection,
}

fn schema(key: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Schema {
        key: key.into(),
        reason: reason.into(),
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.message().to_string();
            // serde reports a missing field at its parent
            let key = match message.strip_prefix("missing field `") {
                Some(rest) => {
                    let field = rest.trim_end_matches('`');
                    if path == "." || path.is_empty() {
                        field.to_string()
                    } else {
                        format!("{path}.{field}")
                    }
                }
                None => path,
            };
            schema(key, message)
        })?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| schema(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    fn check(&self) -> Result<()> {
        if self.probe.label.is_empty() {
            return Err(schema("probe.label", "must name a channel"));
        }
        if !self.channels.iter().any(|c| c.label == self.probe.label) {
            return Err(schema(
                "probe.label",
                format!("no channel labelled `{}`", self.probe.label),
            ));
        }
        for (i, s) in self.schedule.iter().enumerate() {
            if !self.channels.iter().any(|c| c.label == s.label) {
                return Err(schema(
                    format!("schedule[{i}].label"),
                    format!("no channel labelled `{}`", s.label),
                ));
            }
        }
        Ok(())
    }

    pub fn setup(&self) -> Result<Setup> {
        let m = &self.medium;
        let medium = Medium {
            n_line: m.n_line,
            length: m.length,
            k0: m.k0,
            gamma12: m.gamma12,
            gamma2: m.gamma2.unwrap_or(m.gamma12),
        };
        let channels = self
            .channels
            .iter()
            .map(|c| Channel::new(&c.label, c.direction, c.g, c.gamma, c.delta).with_carrier(c.omega_opt))
            .collect();
        let schedule = ControlSchedule::new(
            self.schedule
                .iter()
                .map(|s| ControlTable::new(&s.label, s.breakpoints.clone(), s.values.clone(), s.phase))
                .collect(),
        );
        Setup::new(medium, channels, schedule, &self.probe.label)
    }

    pub fn pulse(&self, setup: &Setup) -> Result<GaussianPulseSpec> {
        let p = &self.probe;
        GaussianPulseSpec::new(setup, p.a, p.l0, p.z0, p.theta, p.t0)
    }

    pub fn two_photon(&self) -> Result<TwoPhotonSpec> {
        let t = &self.twophoton;
        TwoPhotonSpec::new(t.a, t.b, t.delta_l2)
    }

    /// The resolved scenario as TOML, for echoing into output headers.
    pub fn to_toml(&self) -> String {
        let mut resolved = self.clone();
        resolved.medium.gamma2 = Some(self.medium.gamma2.unwrap_or(self.medium.gamma12));
        toml::to_string(&resolved).expect("scenario serializes")
    }
}
