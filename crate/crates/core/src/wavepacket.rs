//! Gaussian single-photon wave packets and the switch figures of merit.
//!
//! For a routing mode `ν ∈ {r, t}` with amplitude `ν_N(ω)`:
//!
//! ```text
//! P_ν = ∫ |ν_N(ω)|² |f(ω)|² dω          (routing probability)
//! E_ν = P_ν²
//! F_ν = |∫ ν_N(ω) |f(ω)|² dω|²
//! ```
//!
//! `E_ν` is kept as the square of the probability integral; `P_ν` is reported
//! alongside it.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PhysicalConstants, SwitchLayout, SPEED_OF_LIGHT};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::transfer::scattering;

/// Integration half-width in units of the packet FWHM.
pub const WINDOW_HALF_WIDTHS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    /// Centre wavelength, m.
    pub lambda_cen: f64,
    /// FWHM of the spectral intensity in wavelength, m.
    pub sigma_lambda: f64,
}

impl WavePacketSpec {
    pub fn new(lambda_cen: f64, sigma_lambda: f64) -> Result<Self> {
        let packet = Self { lambda_cen, sigma_lambda };
        packet.validate()?;
        Ok(packet)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_cen.is_finite() && self.lambda_cen > 0.0) {
            return Err(Error::InvalidParameter(format!("packet centre {} must be positive", self.lambda_cen)));
        }
        // the ω ↔ λ width conversion below is first order in σ_λ / λ_cen
        if !(self.sigma_lambda > 0.0 && self.sigma_lambda < self.lambda_cen / 100.0) {
            return Err(Error::InvalidParameter(format!(
                "packet width {} must lie in (0, lambda_cen/100)",
                self.sigma_lambda
            )));
        }
        Ok(())
    }

    pub fn omega_cen(&self) -> f64 {
        PhysicalConstants::omega_from_wavelength(self.lambda_cen)
    }

    /// FWHM in angular frequency, `(2πc/λ_cen²) σ_λ`.
    pub fn sigma_omega(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / (self.lambda_cen * self.lambda_cen) * self.sigma_lambda
    }

    /// Intensity FWHM of the transform-limited pulse in seconds (`4 ln 2 / σ_ω`).
    ///
    /// This is one of several duration conventions; it is a diagnostic only.
    pub fn intensity_fwhm_duration(&self) -> f64 {
        4.0 * LN_2 / self.sigma_omega()
    }

    /// `|f̃(λ)|²` with `λ` in metres, normalised over wavelength.
    pub fn wavelength_envelope_intensity(&self, lambda: f64) -> f64 {
        let ratio = self.lambda_cen / lambda;
        let s = self.sigma_lambda;
        let x = lambda - self.lambda_cen;
        ratio * ratio * (4.0 * LN_2 / (PI * s * s)).sqrt() * (-4.0 * LN_2 * ratio * ratio * x * x / (s * s)).exp()
    }
}

/// `|f(ω)|²`, normalised so that `∫|f|² dω = 1`.
pub fn envelope_intensity(packet: &WavePacketSpec, omega: f64) -> f64 {
    let s = packet.sigma_omega();
    let x = omega - packet.omega_cen();
    (4.0 * LN_2 / (PI * s * s)).sqrt() * (-4.0 * LN_2 * x * x / (s * s)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Reflection,
    Transmission,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Reflection => "reflection",
            Mode::Transmission => "transmission",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchMetrics {
    pub mode: Mode,
    pub efficiency: f64,
    pub fidelity: f64,
    pub routing_probability: f64,
}

/// Raw packet-weighted integrals for both output ports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketIntegrals {
    /// `[∫|t|²f², ∫Re t f², ∫Im t f², ∫|r|²f², ∫Re r f², ∫Im r f²]`
    pub values: [f64; 6],
    pub error_bound: f64,
    pub intervals: usize,
}

impl PacketIntegrals {
    pub fn metrics(&self, mode: Mode) -> SwitchMetrics {
        let v = &self.values;
        let base = match mode {
            Mode::Transmission => 0,
            Mode::Reflection => 3,
        };
        let probability = v[base];
        SwitchMetrics {
            mode,
            efficiency: probability * probability,
            fidelity: v[base + 1] * v[base + 1] + v[base + 2] * v[base + 2],
            routing_probability: probability,
        }
    }
}

/// Frequency-domain integrals over `ω_cen ± 10 σ_ω`.
pub fn packet_integrals(
    layout: &SwitchLayout,
    packet: &WavePacketSpec,
    opts: QuadratureOptions,
) -> Result<PacketIntegrals> {
    packet.validate()?;
    let half = WINDOW_HALF_WIDTHS * packet.sigma_omega();
    let centre = packet.omega_cen();
    let res = integrate(
        |omega| {
            let w = envelope_intensity(packet, omega);
            let (t, r) = scattering(layout, omega)?;
            Ok([t.norm_sqr() * w, t.re * w, t.im * w, r.norm_sqr() * w, r.re * w, r.im * w])
        },
        centre - half,
        centre + half,
        opts,
    )?;
    Ok(PacketIntegrals { values: res.values, error_bound: res.error_bound, intervals: res.intervals })
}

/// Same integrals carried out over wavelength with the transformed envelope.
pub fn packet_integrals_wavelength(
    layout: &SwitchLayout,
    packet: &WavePacketSpec,
    opts: QuadratureOptions,
) -> Result<PacketIntegrals> {
    packet.validate()?;
    let half = WINDOW_HALF_WIDTHS * packet.sigma_lambda;
    // integrate in nm so that the absolute tolerance has the same meaning
    let res = integrate(
        |lambda_nm| {
            let lambda = lambda_nm * 1e-9;
            let w = packet.wavelength_envelope_intensity(lambda) * 1e-9;
            let (t, r) = scattering(layout, PhysicalConstants::omega_from_wavelength(lambda))?;
            Ok([t.norm_sqr() * w, t.re * w, t.im * w, r.norm_sqr() * w, r.re * w, r.im * w])
        },
        (packet.lambda_cen - half) * 1e9,
        (packet.lambda_cen + half) * 1e9,
        opts,
    )?;
    Ok(PacketIntegrals { values: res.values, error_bound: res.error_bound, intervals: res.intervals })
}

/// Efficiency and fidelity of routing `packet` through `layout` in `mode`.
pub fn switch_metrics(layout: &SwitchLayout, packet: &WavePacketSpec, mode: Mode) -> Result<SwitchMetrics> {
    Ok(packet_integrals(layout, packet, QuadratureOptions::default())?.metrics(mode))
}
