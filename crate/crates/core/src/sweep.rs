//! Parameter sweeps of switch efficiency and fidelity.
//!
//! Rows are evaluated in parallel and returned in parameter order. A row whose
//! evaluation fails keeps its place with the error message recorded.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EmitterCavityParams, SwitchLayout};
use crate::quadrature::QuadratureOptions;
use crate::wavepacket::{packet_integrals, Mode, SwitchMetrics, WavePacketSpec};

/// `start, start + step, …` up to and including `stop` (with a relative slack
/// of 1e-9 steps for rounding).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl StepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
            return Err(Error::InvalidParameter(format!("bad range {start}..={stop} step {step}")));
        }
        Ok(Self { start, stop, step })
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.start + k as f64 * self.step).collect()
    }
}

/// The two configurations a switch toggles between: weak emitter coupling for
/// reflection and strong coupling for transmission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchStates {
    pub reflecting: SwitchLayout,
    pub transmitting: SwitchLayout,
}

impl SwitchStates {
    /// Derives both states from `base` by setting every emitter coupling.
    pub fn from_couplings(base: &SwitchLayout, weak_g: f64, strong_g: f64) -> Self {
        Self {
            reflecting: base.clone().map_cavities(|c| c.with_coupling(weak_g)),
            transmitting: base.clone().map_cavities(|c| c.with_coupling(strong_g)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub d: f64,
    pub reflection: Option<SwitchMetrics>,
    pub transmission: Option<SwitchMetrics>,
    pub failure: Option<String>,
}

fn metrics_for(layout: &SwitchLayout, packet: &WavePacketSpec, mode: Mode) -> Result<SwitchMetrics> {
    Ok(packet_integrals(layout, packet, QuadratureOptions::default())?.metrics(mode))
}

/// Sweeps all (equal) separations over `range`, metres.
pub fn metrics_sweep_separations(
    states: &SwitchStates,
    range: &StepRange,
    packet: &WavePacketSpec,
    modes: &[Mode],
) -> Result<Vec<SeparationRow>> {
    states.reflecting.validate()?;
    states.transmitting.validate()?;
    packet.validate()?;
    let want_r = modes.contains(&Mode::Reflection);
    let want_t = modes.contains(&Mode::Transmission);
    Ok(range
        .values()
        .into_par_iter()
        .map(|d| {
            let mut row = SeparationRow { d, reflection: None, transmission: None, failure: None };
            let mut failures = Vec::new();
            if want_r {
                let layout = states.reflecting.clone().with_all_separations(d);
                match metrics_for(&layout, packet, Mode::Reflection) {
                    Ok(m) => row.reflection = Some(m),
                    Err(e) => failures.push(format!("reflection: {e}")),
                }
            }
            if want_t {
                let layout = states.transmitting.clone().with_all_separations(d);
                match metrics_for(&layout, packet, Mode::Transmission) {
                    Ok(m) => row.transmission = Some(m),
                    Err(e) => failures.push(format!("transmission: {e}")),
                }
            }
            if !failures.is_empty() {
                row.failure = Some(failures.join("; "));
            }
            row
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    /// Emitter-cavity coupling, rad/s.
    pub g: f64,
    pub q_coupled: f64,
    pub metrics: Option<SwitchMetrics>,
    pub failure: Option<String>,
}

/// Transmission-mode metrics versus emitter coupling (rad/s), once per coupled Q.
/// Rows are ordered by Q variant, then by `g`.
pub fn metrics_sweep_coupling(
    base: &SwitchLayout,
    g_range: &StepRange,
    packet: &WavePacketSpec,
    q_variants: &[f64],
) -> Result<Vec<CouplingRow>> {
    base.validate()?;
    packet.validate()?;
    if let Some(q) = q_variants.iter().find(|q| !(q.is_finite() && **q > 0.0)) {
        return Err(Error::InvalidParameter(format!("coupled Q {q} must be positive")));
    }
    let jobs: Vec<(f64, f64)> =
        q_variants.iter().flat_map(|&q| g_range.values().into_iter().map(move |g| (q, g))).collect();
    Ok(jobs
        .into_par_iter()
        .map(|(q, g)| {
            let layout = base.clone().map_cavities(|c| c.with_coupled_q(q).with_coupling(g));
            let (metrics, failure) = split(metrics_for(&layout, packet, Mode::Transmission));
            CouplingRow { g, q_coupled: q, metrics, failure }
        })
        .collect())
}

/// One cavity prototype and the mode it is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub mode: Mode,
    pub cavity: EmitterCavityParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub n: usize,
    pub mode: Mode,
    pub q_coupled: f64,
    pub metrics: Option<SwitchMetrics>,
    pub failure: Option<String>,
}

/// Metrics versus number of identical cavities at fixed separation `d`.
/// Rows are ordered by regime, then by `n`.
pub fn metrics_sweep_cavity_count(
    n_values: &[usize],
    d: f64,
    v_g: f64,
    packet: &WavePacketSpec,
    regimes: &[Regime],
) -> Result<Vec<CountRow>> {
    packet.validate()?;
    for regime in regimes {
        SwitchLayout::identical(regime.cavity, 2, d, v_g).validate()?;
    }
    let jobs: Vec<(Regime, usize)> = regimes.iter().flat_map(|&r| n_values.iter().map(move |&n| (r, n))).collect();
    Ok(jobs
        .into_par_iter()
        .map(|(regime, n)| {
            let layout = SwitchLayout::identical(regime.cavity, n, d, v_g);
            let (metrics, failure) = split(metrics_for(&layout, packet, regime.mode));
            CountRow { n, mode: regime.mode, q_coupled: regime.cavity.coupled_q(), metrics, failure }
        })
        .collect())
}

fn split(r: Result<SwitchMetrics>) -> (Option<SwitchMetrics>, Option<String>) {
    match r {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_range_counts() {
        assert_eq!(StepRange::new(1.0, 100.0, 0.01).unwrap().len(), 9901);
        assert_eq!(StepRange::new(1.0, 2.0, 5.0).unwrap().values(), vec![1.0]);
        assert_eq!(StepRange::new(0.0, 1.0, 0.25).unwrap().values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(StepRange::new(1.0, 0.0, 0.1).is_err());
        assert!(StepRange::new(0.0, 1.0, 0.0).is_err());
    }
}
