//! Transfer matrices for single cavities and waveguide segments, their cascade,
//! and extraction of the transmission/reflection amplitudes.
//!
//! The matrices map `(a_R_in, a_L_out)` on the left of an element to
//! `(a_R_out, a_L_in)` on its right, so a chain is the left-fold
//! `T_N · … · T_wg(1,2) · T_1`.
//!
//! `det T_j = (β - α⁻)/(β + α⁻)` and `det T_wg = 1`, so the transmission
//! `t = det M / M22` is formed from the exact determinant product rather than
//! from `M11 - M12 M21 / M22`, which cancels catastrophically when `|β| ≪ V`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix2c;
use crate::model::{detunings, EmitterCavityParams, SwitchLayout};

/// Relative threshold for the cavity prefactor and `M22`.
pub const SINGULARITY_RTOL: f64 = 1e-12;
/// Absolute floor for the same checks.
pub const SINGULARITY_FLOOR: f64 = 1e-300;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The loss-augmented combinations entering a single-cavity transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMatrixTerms {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub beta: Complex64,
    pub zeta: Complex64,
}

impl CavityMatrixTerms {
    pub fn new(p: &EmitterCavityParams, omega: f64) -> Self {
        let (delta_c, delta_e) = detunings(p, omega);
        let beta = if p.g == 0.0 { delta_c } else { delta_c - p.g * p.g / delta_e };
        Self {
            alpha_plus: I * (0.5 * (p.v_r + p.v_l)),
            alpha_minus: I * (0.5 * (p.v_r - p.v_l)),
            beta,
            zeta: -I * (p.v_r * p.v_l).sqrt(),
        }
    }

    fn scale(&self) -> f64 {
        self.beta.norm().max(self.alpha_plus.norm()).max(self.zeta.norm())
    }
}

/// Transfer matrix of one emitter-loaded cavity at angular frequency `omega`.
pub fn cavity_matrix(p: &EmitterCavityParams, omega: f64) -> Result<Matrix2c> {
    if p.is_decoupled() {
        return Ok(Matrix2c::identity());
    }
    let terms = CavityMatrixTerms::new(p, omega);
    let denom = terms.beta + terms.alpha_minus;
    let threshold = (SINGULARITY_RTOL * terms.scale()).max(SINGULARITY_FLOOR);
    if !terms.beta.is_finite() || denom.norm() < threshold {
        return Err(Error::SingularCavity { index: None, omega });
    }
    let inv = denom.inv();
    Ok(Matrix2c::new(
        (terms.beta - terms.alpha_plus) * inv,
        terms.zeta * inv,
        terms.zeta.conj() * inv,
        (terms.beta + terms.alpha_plus) * inv,
    ))
}

/// Free propagation over `d` metres at group velocity `v_g`.
pub fn waveguide_matrix(d: f64, v_g: f64, omega: f64) -> Matrix2c {
    let phase = omega * d / v_g;
    let forward = Complex64::from_polar(1.0, -phase);
    Matrix2c::diag(forward, forward.conj())
}

/// Total transfer matrix of the chain, cavity 0 applied first.
pub fn total_matrix(layout: &SwitchLayout, omega: f64) -> Result<Matrix2c> {
    Ok(cascade(layout, omega)?.0)
}

/// The total matrix together with its determinant.
fn cascade(layout: &SwitchLayout, omega: f64) -> Result<(Matrix2c, Complex64)> {
    let mut total = Matrix2c::identity();
    let mut det = Complex64::new(1.0, 0.0);
    for (index, cavity) in layout.cavities.iter().enumerate() {
        if index > 0 {
            total = waveguide_matrix(layout.links[index - 1].d, layout.v_g, omega) * total;
        }
        let t = cavity_matrix(cavity, omega).map_err(|e| match e {
            Error::SingularCavity { omega, .. } => Error::SingularCavity { index: Some(index), omega },
            other => other,
        })?;
        if !cavity.is_decoupled() {
            let terms = CavityMatrixTerms::new(cavity, omega);
            det *= (terms.beta - terms.alpha_minus) / (terms.beta + terms.alpha_minus);
        }
        total = t * total;
    }
    Ok((total, det))
}

/// Transmission and reflection amplitudes `(t, r)` for a right-moving input.
pub fn scattering(layout: &SwitchLayout, omega: f64) -> Result<(Complex64, Complex64)> {
    let (m, det) = cascade(layout, omega)?;
    amplitudes(&m, det, omega)
}

fn amplitudes(m: &Matrix2c, det: Complex64, omega: f64) -> Result<(Complex64, Complex64)> {
    let threshold = (SINGULARITY_RTOL * m.max_abs()).max(SINGULARITY_FLOOR);
    if !m.is_finite() || m.m22.norm() < threshold {
        return Err(Error::DegenerateOutput { omega });
    }
    let inv = m.m22.inv();
    Ok((det * inv, -m.m21 * inv))
}
