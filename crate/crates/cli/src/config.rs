//! JSON scenario files.
//!
//! Units at this boundary: wavelengths in nm, rates as rate/2π in GHz,
//! lengths in µm, group velocity as a fraction of c. Everything is converted
//! to SI on the way into the core library.

use std::f64::consts::TAU;

use photon_switch::disorder::DisorderTarget;
use photon_switch::sweep::StepRange;
use photon_switch::{
    params_from_q_factors, EmitterCavityParams, GridAxis, Mode, QFactorSpec, SpectralGrid, SwitchLayout,
    WavePacketSpec, WaveguideLink, SPEED_OF_LIGHT,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    pub layout: LayoutConfig,
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Either `uniform` or explicit `cavities` + `links_um`. Neither means a bare
/// waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    /// Group velocity as a fraction of c.
    pub v_g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<UniformConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cavities: Vec<CavityConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links_um: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformConfig {
    pub n: usize,
    pub d_um: f64,
    pub cavity: CavityConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub lambda_c_nm: f64,
    /// Defaults to `lambda_c_nm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_e_nm: Option<f64>,
    pub g_ghz: f64,
    /// `null` decouples the cavity from the waveguide.
    #[serde(deserialize_with = "Option::deserialize")]
    pub q_c: Option<f64>,
    /// `null` removes intrinsic cavity loss.
    #[serde(deserialize_with = "Option::deserialize")]
    pub q_u: Option<f64>,
    pub gamma_ghz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub axis: GridAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub lambda_cen_nm: f64,
    pub sigma_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeConfig {
    pub mode: Mode,
    pub g_ghz: f64,
    pub q_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RemedyConfig {
    Decouple,
    DetuneToNm(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Spectrum {
        grid: GridConfig,
        /// Report transmission minima below this value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        minima_below: Option<f64>,
    },
    Metrics {
        packet: PacketConfig,
        modes: Vec<Mode>,
        /// Spectrum grid; defaults to the packet window.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GridConfig>,
    },
    SweepD {
        d_um: RangeConfig,
        weak_g_ghz: f64,
        strong_g_ghz: f64,
        packet: PacketConfig,
    },
    SweepG {
        g_ghz: RangeConfig,
        q_c: Vec<f64>,
        packets: Vec<PacketConfig>,
    },
    SweepN {
        n: Vec<usize>,
        d_um: f64,
        packet: PacketConfig,
        regimes: Vec<RegimeConfig>,
    },
    /// `mean`/`sigma` are in nm for wavelengths, µm for separations and
    /// dimensionless for the coupled Q.
    Disorder {
        target: DisorderTarget,
        mean: f64,
        sigma: f64,
        realizations: usize,
        #[serde(default)]
        keep_samples: usize,
        grid: GridConfig,
        /// Axis interval for the RMS deviation; defaults to the whole grid.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<[f64; 2]>,
    },
    /// Weakens the emitter in `cavity` (1-based) to g/2π = 100 MHz and applies
    /// each remedy to the faulty layout.
    Mitigation {
        cavity: usize,
        remedies: Vec<RemedyConfig>,
        grid: GridConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "yes")]
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { svg: true }
    }
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::Spectrum { .. } => "spectrum",
            ExperimentConfig::Metrics { .. } => "metrics",
            ExperimentConfig::SweepD { .. } => "sweep_d",
            ExperimentConfig::SweepG { .. } => "sweep_g",
            ExperimentConfig::SweepN { .. } => "sweep_n",
            ExperimentConfig::Disorder { .. } => "disorder",
            ExperimentConfig::Mitigation { .. } => "mitigation",
        }
    }
}

impl CavityConfig {
    pub fn to_params(&self) -> Result<EmitterCavityParams, CliError> {
        let lambda_e = self.lambda_e_nm.unwrap_or(self.lambda_c_nm);
        let q = QFactorSpec { q_coupled: self.q_c.unwrap_or(1.0), q_intrinsic: self.q_u.unwrap_or(1.0) };
        let mut p =
            params_from_q_factors(self.lambda_c_nm * 1e-9, lambda_e * 1e-9, self.g_ghz * 1e9, q, self.gamma_ghz * 1e9)?;
        if self.q_c.is_none() {
            p.v_r = 0.0;
            p.v_l = 0.0;
        }
        if self.q_u.is_none() {
            p.kappa = 0.0;
        }
        Ok(p)
    }

    pub fn from_params(p: &EmitterCavityParams) -> Self {
        Self {
            lambda_c_nm: p.cavity_wavelength() * 1e9,
            lambda_e_nm: Some(p.emitter_wavelength() * 1e9),
            g_ghz: p.g / TAU * 1e-9,
            q_c: (!p.is_decoupled()).then(|| p.coupled_q()),
            q_u: (p.kappa > 0.0).then(|| p.intrinsic_q()),
            gamma_ghz: p.gamma / TAU * 1e-9,
        }
    }
}

impl LayoutConfig {
    pub fn to_layout(&self) -> Result<SwitchLayout, CliError> {
        let v_g = self.v_g * SPEED_OF_LIGHT;
        let layout = match &self.uniform {
            Some(u) => {
                if !self.cavities.is_empty() || !self.links_um.is_empty() {
                    return Err(CliError::validation(
                        "layout: give either `uniform` or `cavities`/`links_um`, not both",
                    ));
                }
                if u.n == 0 {
                    return Err(CliError::validation("layout.uniform.n must be at least 1"));
                }
                SwitchLayout::identical(u.cavity.to_params()?, u.n, u.d_um * 1e-6, v_g)
            }
            None => SwitchLayout {
                cavities: self.cavities.iter().map(CavityConfig::to_params).collect::<Result<_, _>>()?,
                links: self.links_um.iter().map(|d| WaveguideLink { d: d * 1e-6 }).collect(),
                v_g,
            },
        };
        layout.validate()?;
        Ok(layout)
    }

    /// Explicit form of `layout`.
    pub fn from_layout(layout: &SwitchLayout) -> Self {
        Self {
            v_g: layout.v_g / SPEED_OF_LIGHT,
            uniform: None,
            cavities: layout.cavities.iter().map(CavityConfig::from_params).collect(),
            links_um: layout.links.iter().map(|l| l.d * 1e6).collect(),
        }
    }

    /// First cavity, used as the prototype for sweeps that rebuild the chain.
    pub fn prototype(&self) -> Result<EmitterCavityParams, CliError> {
        match (&self.uniform, self.cavities.first()) {
            (Some(u), _) => u.cavity.to_params(),
            (None, Some(c)) => c.to_params(),
            (None, None) => Err(CliError::validation("this experiment needs at least one cavity")),
        }
    }
}

impl GridConfig {
    pub fn to_grid(&self) -> Result<SpectralGrid, CliError> {
        let grid = SpectralGrid { axis: self.axis, start: self.start, stop: self.stop, points: self.points };
        grid.validate()?;
        Ok(grid)
    }
}

impl PacketConfig {
    pub fn to_packet(&self) -> Result<WavePacketSpec, CliError> {
        Ok(WavePacketSpec::new(self.lambda_cen_nm * 1e-9, self.sigma_nm * 1e-9)?)
    }
}

impl RangeConfig {
    /// The range scaled into SI units.
    pub fn to_range(&self, unit: f64) -> Result<StepRange, CliError> {
        Ok(StepRange::new(self.start * unit, self.stop * unit, self.step * unit)?)
    }
}

/// Parses a scenario, applying `key=value` overrides to the raw JSON first.
pub fn parse_scenario(text: &str, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| CliError::parse(format!("config: {e}")))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    serde_json::from_value(value).map_err(|e| CliError::parse(format!("config: {e}")))
}

/// Sets a dotted path such as `layout.uniform.cavity.g_ghz=500`. The value is
/// read as JSON when it parses, otherwise as a string. Array elements are
/// addressed by index.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::parse(format!("override `{assignment}` is not key=value")))?;
    let new_value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::parse(format!("override path `{path}` has an empty segment")));
    }
    let mut node = root;
    for (depth, key) in keys.iter().enumerate() {
        let last = depth + 1 == keys.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), new_value);
                    return Ok(());
                }
                map.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let index: usize = key
                    .parse()
                    .map_err(|_| CliError::parse(format!("override path `{path}`: `{key}` is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(index)
                    .ok_or_else(|| CliError::parse(format!("override path `{path}`: index {index} >= {len}")))?;
                if last {
                    *slot = new_value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::parse(format!(
                    "override path `{path}`: `{}` is not an object or array",
                    keys[..depth].join(".")
                )))
            }
        };
    }
    unreachable!("loop returns on the last key")
}
