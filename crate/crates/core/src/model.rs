//! Physical parameters of the emitter-cavity chain and their unit conversions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, LayoutIssue, Result};

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhysicalConstants;

impl PhysicalConstants {
    pub const C: f64 = SPEED_OF_LIGHT;

    /// Angular frequency of light with vacuum wavelength `lambda` (m).
    pub fn omega_from_wavelength(lambda: f64) -> f64 {
        TAU * Self::C / lambda
    }

    /// Vacuum wavelength (m) of light with angular frequency `omega`.
    pub fn wavelength_from_omega(omega: f64) -> f64 {
        TAU * Self::C / omega
    }
}

/// Per-cavity parameters, all rates in rad/s.
///
/// `v_r`/`v_l` are the couplings to right/left-moving waveguide modes, `kappa`
/// is cavity loss into non-guided modes and `gamma` is emitter loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterCavityParams {
    pub omega_c: f64,
    pub omega_e: f64,
    pub g: f64,
    pub v_r: f64,
    pub v_l: f64,
    pub kappa: f64,
    pub gamma: f64,
}

impl EmitterCavityParams {
    pub fn cavity_wavelength(&self) -> f64 {
        PhysicalConstants::wavelength_from_omega(self.omega_c)
    }

    pub fn emitter_wavelength(&self) -> f64 {
        PhysicalConstants::wavelength_from_omega(self.omega_e)
    }

    /// Coupled Q implied by symmetric waveguide coupling, `omega_c / (v_r + v_l)`.
    /// Infinite for a decoupled cavity.
    pub fn coupled_q(&self) -> f64 {
        self.omega_c / (self.v_r + self.v_l)
    }

    /// Intrinsic Q, `omega_c / kappa`. Infinite for a lossless cavity.
    pub fn intrinsic_q(&self) -> f64 {
        self.omega_c / self.kappa
    }

    pub fn is_decoupled(&self) -> bool {
        self.v_r == 0.0 && self.v_l == 0.0
    }

    /// Same cavity with both waveguide couplings set to `omega_c / (2 q)`.
    pub fn with_coupled_q(mut self, q: f64) -> Self {
        let v = self.omega_c / (2.0 * q);
        self.v_r = v;
        self.v_l = v;
        self
    }

    /// Moves the cavity resonance to `lambda_c` keeping both Q factors fixed,
    /// so `v_r`, `v_l` and `kappa` scale with the new resonance frequency.
    pub fn with_cavity_wavelength(mut self, lambda_c: f64) -> Self {
        let omega = PhysicalConstants::omega_from_wavelength(lambda_c);
        let scale = omega / self.omega_c;
        self.omega_c = omega;
        self.v_r *= scale;
        self.v_l *= scale;
        self.kappa *= scale;
        self
    }

    pub fn with_emitter_wavelength(mut self, lambda_e: f64) -> Self {
        self.omega_e = PhysicalConstants::omega_from_wavelength(lambda_e);
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    /// Pushes every violated invariant of this cavity onto `issues`.
    pub fn collect_issues(&self, index: usize, issues: &mut Vec<LayoutIssue>) {
        let fields = [
            ("omega_c", self.omega_c, true),
            ("omega_e", self.omega_e, true),
            ("g", self.g, false),
            ("v_r", self.v_r, false),
            ("v_l", self.v_l, false),
            ("kappa", self.kappa, false),
            ("gamma", self.gamma, false),
        ];
        for (field, value, strictly_positive) in fields {
            let reason = if !value.is_finite() {
                Some("is not finite")
            } else if strictly_positive && value <= 0.0 {
                Some("must be positive")
            } else if value < 0.0 {
                Some("must be nonnegative")
            } else {
                None
            };
            if let Some(reason) = reason {
                issues.push(LayoutIssue::Cavity { index, field, reason });
            }
        }
        if self.g > 0.0 && self.gamma == 0.0 {
            issues.push(LayoutIssue::EmitterPole { index });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideLink {
    /// Separation between neighbouring cavities, m.
    pub d: f64,
}

/// Ordered cavity chain. `links[i]` separates `cavities[i]` and `cavities[i + 1]`.
///
/// An empty layout is a bare waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchLayout {
    pub cavities: Vec<EmitterCavityParams>,
    pub links: Vec<WaveguideLink>,
    /// Group velocity in the waveguide, m/s.
    pub v_g: f64,
}

impl SwitchLayout {
    pub fn bare_waveguide(v_g: f64) -> Self {
        Self { cavities: Vec::new(), links: Vec::new(), v_g }
    }

    /// `n` copies of `cavity` with every separation equal to `d`.
    pub fn identical(cavity: EmitterCavityParams, n: usize, d: f64, v_g: f64) -> Self {
        Self { cavities: vec![cavity; n], links: vec![WaveguideLink { d }; n.saturating_sub(1)], v_g }
    }

    pub fn len(&self) -> usize {
        self.cavities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cavities.is_empty()
    }

    pub fn with_all_separations(mut self, d: f64) -> Self {
        self.links.iter_mut().for_each(|l| l.d = d);
        self
    }

    pub fn map_cavities(mut self, f: impl Fn(EmitterCavityParams) -> EmitterCavityParams) -> Self {
        self.cavities.iter_mut().for_each(|c| *c = f(*c));
        self
    }

    /// Same physical device traversed from the other end.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.cavities.reverse();
        out.links.reverse();
        out
    }

    pub fn validate(&self) -> Result<()> {
        validate_layout(self).map_err(Error::InvalidLayout)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QFactorSpec {
    pub q_coupled: f64,
    pub q_intrinsic: f64,
}

/// Builds cavity parameters from wavelengths (m), rates quoted as rate/2π (Hz)
/// and Q factors.
pub fn params_from_q_factors(
    lambda_c: f64,
    lambda_e: f64,
    g_over_2pi: f64,
    q: QFactorSpec,
    gamma_over_2pi: f64,
) -> Result<EmitterCavityParams> {
    let positive =
        [("lambda_c", lambda_c), ("lambda_e", lambda_e), ("q_coupled", q.q_coupled), ("q_intrinsic", q.q_intrinsic)];
    for (name, v) in positive {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
        }
    }
    for (name, v) in [("g/2pi", g_over_2pi), ("gamma/2pi", gamma_over_2pi)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
        }
    }
    let omega_c = PhysicalConstants::omega_from_wavelength(lambda_c);
    let v = omega_c / (2.0 * q.q_coupled);
    Ok(EmitterCavityParams {
        omega_c,
        omega_e: PhysicalConstants::omega_from_wavelength(lambda_e),
        g: TAU * g_over_2pi,
        v_r: v,
        v_l: v,
        kappa: omega_c / q.q_intrinsic,
        gamma: TAU * gamma_over_2pi,
    })
}

/// Complex cavity and emitter detunings with loss folded in as imaginary parts.
pub fn detunings(p: &EmitterCavityParams, omega: f64) -> (Complex64, Complex64) {
    (Complex64::new(omega - p.omega_c, 0.5 * p.kappa), Complex64::new(omega - p.omega_e, 0.5 * p.gamma))
}

/// Returns every invariant violation in `layout`, or `Ok(())`.
pub fn validate_layout(layout: &SwitchLayout) -> std::result::Result<(), Vec<LayoutIssue>> {
    let mut issues = Vec::new();
    let n = layout.cavities.len();
    if layout.links.len() != n.saturating_sub(1) {
        issues.push(LayoutIssue::LinkCountMismatch { cavities: n, links: layout.links.len() });
    }
    if !(layout.v_g > 0.0 && layout.v_g <= SPEED_OF_LIGHT) {
        issues.push(LayoutIssue::GroupVelocity { v_g: layout.v_g });
    }
    for (i, c) in layout.cavities.iter().enumerate() {
        c.collect_issues(i, &mut issues);
    }
    for (i, l) in layout.links.iter().enumerate() {
        if !l.d.is_finite() {
            issues.push(LayoutIssue::Link { index: i, reason: "is not finite" });
        } else if l.d < 0.0 {
            issues.push(LayoutIssue::Link { index: i, reason: "must be nonnegative" });
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}
