//! Run configuration, read from a TOML file.
//!
//! Every key is namespaced by its table: `sim.dt`, `scenario.reference.kind`,
//! `controller.kind`, `controller.ppc.k1`, `observer.asmdob.lambda2`,
//! `envelope.rho0`, `output.decimation`, and so on. Omitted keys take the
//! values of [`RunConfig::default`], which is the shipped reference setup.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::controllers::{
    EnvelopeParams, PidController, PidGains, PpcController, PpcGains, SmcController, SmcGains,
    TrackingController,
};
use crate::error::{Error, Result};
use crate::observers::{AsmdobGains, AsmdobState, DisturbanceObserver, EsoGains, EsoState};
use crate::scenarios::{DisturbanceProfile, ScenarioSpec};
use crate::sim::{wrap_angle, DisturbanceVec, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    #[default]
    Ppc,
    Smc,
    Pid,
}

impl std::str::FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ppc" => Ok(Self::Ppc),
            "smc" => Ok(Self::Smc),
            "pid" => Ok(Self::Pid),
            other => Err(Error::Config(format!("unknown controller '{other}'"))),
        }
    }
}

impl ControllerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ppc => "ppc",
            Self::Smc => "smc",
            Self::Pid => "pid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObserverKind {
    #[default]
    Asmdob,
    Eso,
    Oracle,
    None,
}

impl std::str::FromStr for ObserverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "asmdob" => Ok(Self::Asmdob),
            "eso" => Ok(Self::Eso),
            "oracle" => Ok(Self::Oracle),
            "none" => Ok(Self::None),
            other => Err(Error::Config(format!("unknown observer '{other}'"))),
        }
    }
}

impl ObserverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Asmdob => "asmdob",
            Self::Eso => "eso",
            Self::Oracle => "oracle",
            Self::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    pub ppc: PpcGains,
    pub smc: SmcGains,
    pub pid: PidGains,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ObserverConfig {
    pub kind: ObserverKind,
    pub asmdob: AsmdobGains,
    pub eso: EsoGains,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write every n-th step to the trace.
    pub decimation: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            decimation: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub scenario: ScenarioSpec,
    pub controller: ControllerConfig,
    pub observer: ObserverConfig,
    pub envelope: EnvelopeParams,
    pub output: OutputConfig,
    /// Directory that relative paths in the file resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every nested invariant plus the startup envelope condition.
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.scenario.reference.validate()?;
        self.envelope.validate()?;
        self.controller.ppc.validate()?;
        self.controller.smc.validate()?;
        self.controller.pid.validate()?;
        self.observer.asmdob.validate()?;
        self.observer.eso.validate()?;
        if self.output.decimation == 0 {
            return Err(Error::Config("output.decimation must be at least 1".into()));
        }
        if self.controller.kind == ControllerKind::Ppc {
            self.envelope.check_initial(&self.initial_errors())?;
        }
        Ok(())
    }

    /// Tracking errors at `t = 0`. The heading error is taken against the
    /// auxiliary heading the controller commands on its first step, with a
    /// zero disturbance estimate.
    pub fn initial_errors(&self) -> [f64; 3] {
        let q = self.sim.initial_pose;
        let r = self.scenario.reference.sample(0.0);
        let mut ctrl = self.build_controller();
        let step = ctrl.control(0.0, &q, &r, &DisturbanceVec::ZERO, self.sim.dt);
        [q.x - r.xd, q.y - r.yd, wrap_angle(q.theta - step.varphi)]
    }

    pub fn build_controller(&self) -> TrackingController {
        match self.controller.kind {
            ControllerKind::Ppc => {
                TrackingController::Ppc(PpcController::new(self.controller.ppc, self.envelope))
            }
            ControllerKind::Smc => TrackingController::Smc(SmcController::new(self.controller.smc)),
            ControllerKind::Pid => TrackingController::Pid(PidController::new(self.controller.pid)),
        }
    }

    pub fn build_observer(&self) -> DisturbanceObserver {
        let q0 = &self.sim.initial_pose;
        match self.observer.kind {
            ObserverKind::Asmdob => DisturbanceObserver::Asmdob {
                gains: self.observer.asmdob,
                state: AsmdobState::new(q0),
            },
            ObserverKind::Eso => DisturbanceObserver::Eso {
                gains: self.observer.eso,
                state: EsoState::new(q0),
            },
            ObserverKind::Oracle => DisturbanceObserver::Oracle(DisturbanceVec::ZERO),
            ObserverKind::None => DisturbanceObserver::None,
        }
    }

    pub fn disturbance_profile(&self) -> Result<DisturbanceProfile> {
        self.scenario.disturbance.load(&self.base_dir)
    }

    /// Short name such as `ppc+asmdob`.
    pub fn label(&self) -> String {
        format!(
            "{}+{}",
            self.controller.kind.as_str(),
            self.observer.kind.as_str()
        )
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = RunConfig::from_toml_str(&text)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    cfg.validate()?;
    // Surface table errors at load time rather than at run time.
    cfg.disturbance_profile()?;
    Ok(cfg)
}
