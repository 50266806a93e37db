//! Closed-form scattering for a chain of identical, equally spaced cavities.
//!
//! Used as an independent check on the matrix cascade. The closed form
//! evaluates `(T_c T_wg)^N`, which carries one extra propagation segment on the
//! input side: `t` picks up `e^{-iωd/v_g}` and `r` picks up `e^{-2iωd/v_g}`
//! relative to [`crate::scattering`]. Moduli agree; the phase does not, so
//! fidelity integrals must use the cascade.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{detunings, EmitterCavityParams, SwitchLayout};

/// Relative eigenvalue separation below which the closed form is 0/0.
pub const DEGENERACY_RTOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdenticalChainParams {
    pub cavity: EmitterCavityParams,
    pub d: f64,
    pub v_g: f64,
    pub n: usize,
}

impl IdenticalChainParams {
    pub fn to_layout(&self) -> SwitchLayout {
        SwitchLayout::identical(self.cavity, self.n, self.d, self.v_g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("identical chain needs n >= 1".into()));
        }
        self.to_layout().validate()
    }
}

/// Eigenvalues of the unnormalised single-period matrix
/// `A = [[a, b], [b_pair, a_pair]]`.
///
/// In the lossless case `a_pair = conj(a)` and `b_pair = conj(b)`; with complex
/// detunings they are the analytically continued partners instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEigenpair {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub a_pair: Complex64,
    pub b_pair: Complex64,
}

impl ChainEigenpair {
    pub fn trace(&self) -> Complex64 {
        self.a + self.a_pair
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.a_pair - self.b * self.b_pair
    }

    /// `(|λ₊| + |λ₋|) / |λ₊ - λ₋|`. Relative rounding error in the closed form
    /// grows roughly linearly with this number.
    pub fn condition(&self) -> f64 {
        let scale = self.lambda_plus.norm() + self.lambda_minus.norm() + self.a.norm() + self.b.norm();
        scale / (self.lambda_plus - self.lambda_minus).norm()
    }

    /// The same pair with the square-root branch flipped.
    pub fn swapped(self) -> Self {
        Self { lambda_plus: self.lambda_minus, lambda_minus: self.lambda_plus, ..self }
    }
}

struct ChainTerms {
    /// `Δ_c - |g|²/Δ_e` with losses folded in.
    effective: Complex64,
    half_sum: f64,
    half_diff: f64,
    coupling: f64,
    phase: f64,
}

impl ChainTerms {
    fn new(p: &IdenticalChainParams, omega: f64) -> Self {
        let cav = &p.cavity;
        let (delta_c, delta_e) = detunings(cav, omega);
        let effective = if cav.g == 0.0 { delta_c } else { delta_c - cav.g * cav.g / delta_e };
        Self {
            effective,
            half_sum: 0.5 * (cav.v_r + cav.v_l),
            half_diff: 0.5 * (cav.v_r - cav.v_l),
            coupling: (cav.v_r * cav.v_l).sqrt(),
            phase: omega * p.d / p.v_g,
        }
    }
}

pub fn chain_eigenvalues(p: &IdenticalChainParams, omega: f64) -> ChainEigenpair {
    let ChainTerms { effective, half_sum, coupling, phase, .. } = ChainTerms::new(p, omega);
    let (sin, cos) = phase.sin_cos();
    let centre = effective * cos - half_sum * sin;
    let inner = effective * sin + half_sum * cos;
    let root = (Complex64::from(coupling * coupling) - inner * inner).sqrt();
    let forward = Complex64::from_polar(1.0, -phase);
    ChainEigenpair {
        lambda_plus: centre + root,
        lambda_minus: centre - root,
        a: (effective - I * half_sum) * forward,
        b: -I * coupling * forward.conj(),
        a_pair: (effective + I * half_sum) * forward.conj(),
        b_pair: I * coupling * forward,
    }
}

/// Closed-form `(t_N, r_N)` for the identical chain.
pub fn chain_scattering(p: &IdenticalChainParams, omega: f64) -> Result<(Complex64, Complex64)> {
    let eig = chain_eigenvalues(p, omega);
    closed_form(p, omega, &eig)
}

fn closed_form(p: &IdenticalChainParams, omega: f64, eig: &ChainEigenpair) -> Result<(Complex64, Complex64)> {
    let terms = ChainTerms::new(p, omega);
    let condition = eig.condition();
    if condition.is_nan() || condition * DEGENERACY_RTOL >= 1.0 {
        return Err(Error::DegenerateEigenvalues { omega });
    }
    let n = i32::try_from(p.n).map_err(|_| Error::InvalidParameter("chain too long".into()))?;
    // every term is homogeneous of degree N+1, so dividing by a common scale
    // keeps λ^(N+1) representable for long chains
    let scale = eig.lambda_plus.norm().max(eig.lambda_minus.norm());
    let (lp, lm, a) = (eig.lambda_plus / scale, eig.lambda_minus / scale, eig.a / scale);
    let diff_n = lp.powi(n) - lm.powi(n);
    let diff_n1 = lp.powi(n + 1) - lm.powi(n + 1);
    let denom = diff_n1 - diff_n * a;
    let t = (lp - lm) * ((terms.effective - I * terms.half_diff) / scale).powi(n) / denom;
    let r = -I * Complex64::from_polar(1.0, -terms.phase) * (terms.coupling / scale) * diff_n / denom;
    Ok((t, r))
}
