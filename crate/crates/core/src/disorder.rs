//! Seeded Monte Carlo fabrication disorder and single-cavity mitigation.
//!
//! Every random draw comes from a ChaCha8 stream keyed by the study seed and
//! selected by `(realization, element)`, so a realization's layout does not
//! depend on how many other realizations were drawn or on thread scheduling.
//! Realizations are reduced in index order.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SwitchLayout;
use crate::spectra::{compute_spectrum_serial, ScatteringSample, ScatteringSpectrum, SpectralGrid};

/// Rejected draws tolerated for a single element before giving up.
pub const MAX_REJECTS: usize = 1000;

/// Emitter coupling used for a cavity that fails to reach strong coupling.
pub const WEAK_COUPLING: f64 = TAU * 100e6;

const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderTarget {
    /// Cavity resonance wavelength (m); both Q factors held fixed.
    CavityWavelength,
    /// Emitter transition wavelength (m).
    EmitterWavelength,
    /// Cavity wavelength (m) with each emitter retuned onto its cavity.
    EmitterFollowsCavity,
    /// Coupled Q factor.
    CoupledQ,
    /// Every inter-cavity separation (m).
    Separation,
}

impl DisorderTarget {
    fn admits(self, value: f64) -> bool {
        match self {
            DisorderTarget::Separation => value >= 0.0,
            _ => value > 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub target: DisorderTarget,
    pub mean: f64,
    /// Standard deviation, same units as `mean`.
    pub sigma: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("disorder sigma {} must be >= 0", self.sigma)));
        }
        if !self.mean.is_finite() {
            return Err(Error::InvalidParameter(format!("disorder mean {} is not finite", self.mean)));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("need at least one realization".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderResult {
    /// Pointwise average over realizations. `transmission`/`reflection` are mean
    /// powers; `t`/`r` are mean amplitudes.
    pub mean_spectrum: ScatteringSpectrum,
    /// The first few individual realizations, in index order.
    pub sample_spectra: Vec<ScatteringSpectrum>,
    /// Drawn values per realization, one per disordered element.
    pub realized_parameters: Vec<Vec<f64>>,
    /// Realizations skipped because of a numerical singularity.
    pub failed_realizations: Vec<usize>,
    pub seed: u64,
}

fn stream_id(realization: usize, element: usize) -> u64 {
    ((realization as u64) << 32) | element as u64
}

fn draw_element(spec: &DisorderSpec, realization: usize, element: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream_id(realization, element));
    let normal =
        Normal::new(spec.mean, spec.sigma).map_err(|e| Error::InvalidParameter(format!("normal distribution: {e}")))?;
    for _ in 0..=MAX_REJECTS {
        let v = normal.sample(&mut rng);
        if spec.target.admits(v) {
            return Ok(v);
        }
    }
    Err(Error::ResamplingBudget { rejects: MAX_REJECTS })
}

fn draw_layout(base: &SwitchLayout, spec: &DisorderSpec, realization: usize) -> Result<(SwitchLayout, Vec<f64>)> {
    if spec.sigma == 0.0 {
        return Ok((base.clone(), Vec::new()));
    }
    let mut layout = base.clone();
    let elements = match spec.target {
        DisorderTarget::Separation => layout.links.len(),
        _ => layout.cavities.len(),
    };
    let values = (0..elements).map(|j| draw_element(spec, realization, j)).collect::<Result<Vec<_>>>()?;
    for (j, &v) in values.iter().enumerate() {
        match spec.target {
            DisorderTarget::Separation => layout.links[j].d = v,
            DisorderTarget::CavityWavelength => {
                layout.cavities[j] = layout.cavities[j].with_cavity_wavelength(v);
            }
            DisorderTarget::EmitterWavelength => {
                layout.cavities[j] = layout.cavities[j].with_emitter_wavelength(v);
            }
            DisorderTarget::EmitterFollowsCavity => {
                layout.cavities[j] = layout.cavities[j].with_cavity_wavelength(v).with_emitter_wavelength(v);
            }
            DisorderTarget::CoupledQ => layout.cavities[j] = layout.cavities[j].with_coupled_q(v),
        }
    }
    Ok((layout, values))
}

/// Layout for one disorder realization. `sigma == 0` returns `base` unchanged.
pub fn sample_layout(base: &SwitchLayout, spec: &DisorderSpec, realization: usize) -> Result<SwitchLayout> {
    base.validate()?;
    spec.validate()?;
    Ok(draw_layout(base, spec, realization)?.0)
}

/// Averages the spectrum of `spec.realizations` disordered copies of `base`.
pub fn disorder_study(
    base: &SwitchLayout,
    spec: &DisorderSpec,
    grid: &SpectralGrid,
    keep_samples: usize,
) -> Result<DisorderResult> {
    base.validate()?;
    spec.validate()?;
    grid.validate()?;
    let axis = grid.values();
    let points = axis.len();

    let mut sum_t = vec![0.0; points];
    let mut sum_r = vec![0.0; points];
    let mut sum_ta = vec![num_complex::Complex64::default(); points];
    let mut sum_ra = vec![num_complex::Complex64::default(); points];
    let mut samples = Vec::new();
    let mut params = Vec::with_capacity(spec.realizations);
    let mut failed = Vec::new();
    let mut first_failure = None;

    for start in (0..spec.realizations).step_by(CHUNK) {
        let end = (start + CHUNK).min(spec.realizations);
        let chunk: Vec<Result<(ScatteringSpectrum, Vec<f64>)>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let (layout, values) = draw_layout(base, spec, i)?;
                Ok((compute_spectrum_serial(&layout, grid)?, values))
            })
            .collect();
        for (offset, res) in chunk.into_iter().enumerate() {
            let index = start + offset;
            match res {
                Ok((spectrum, values)) => {
                    for (k, s) in spectrum.samples.iter().enumerate() {
                        sum_t[k] += s.transmission;
                        sum_r[k] += s.reflection;
                        sum_ta[k] += s.t;
                        sum_ra[k] += s.r;
                    }
                    if samples.len() < keep_samples {
                        samples.push(spectrum);
                    }
                    params.push(values);
                }
                Err(e @ Error::SpectrumPoint { .. }) => {
                    failed.push(index);
                    params.push(Vec::new());
                    first_failure.get_or_insert(e);
                }
                Err(e) => return Err(e),
            }
        }
    }

    if let Some(first) = first_failure {
        if failed.len() as f64 >= 0.01 * spec.realizations as f64 {
            return Err(Error::TooManyFailedRealizations {
                failed: failed.len(),
                total: spec.realizations,
                first: Box::new(first),
            });
        }
    }
    let used = (spec.realizations - failed.len()) as f64;
    let mean_samples = axis
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            ScatteringSample::from_powers(
                x,
                grid.axis.omega(x),
                sum_ta[k] / used,
                sum_ra[k] / used,
                sum_t[k] / used,
                sum_r[k] / used,
            )
        })
        .collect();
    Ok(DisorderResult {
        mean_spectrum: ScatteringSpectrum { axis: grid.axis, samples: mean_samples },
        sample_spectra: samples,
        realized_parameters: params,
        failed_realizations: failed,
        seed: spec.seed,
    })
}

/// RMS difference of transmission between two spectra on the same grid,
/// restricted to axis values in `[lo, hi]`.
pub fn rms_transmission_deviation(a: &ScatteringSpectrum, b: &ScatteringSpectrum, lo: f64, hi: f64) -> Result<f64> {
    if a.samples.len() != b.samples.len() || a.axis != b.axis {
        return Err(Error::InvalidParameter("spectra are on different grids".into()));
    }
    let (sum, n) = a.samples.iter().zip(&b.samples).filter(|(s, _)| (lo..=hi).contains(&s.axis_value)).fold(
        (0.0, 0usize),
        |(sum, n), (s, t)| {
            let d = s.transmission - t.transmission;
            (sum + d * d, n + 1)
        },
    );
    if n == 0 {
        return Err(Error::InvalidParameter(format!("no samples in [{lo}, {hi}]")));
    }
    Ok((sum / n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mitigation {
    /// Leave the cavity in place with a weakly coupled emitter.
    WeakCoupling,
    /// Retune the cavity (and its emitter) to this wavelength, m.
    DetuneTo(f64),
    /// Remove the cavity from the waveguide.
    Decouple,
}

/// Applies `action` to cavity `index` (0-based) of `base`.
pub fn mitigation_scenario(base: &SwitchLayout, index: usize, action: Mitigation) -> Result<SwitchLayout> {
    let len = base.cavities.len();
    if index >= len {
        return Err(Error::IndexOutOfRange { index, len });
    }
    let mut out = base.clone();
    let cavity = &mut out.cavities[index];
    match action {
        Mitigation::WeakCoupling => cavity.g = WEAK_COUPLING,
        Mitigation::DetuneTo(lambda) => {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::InvalidParameter(format!("detuning wavelength {lambda} must be positive")));
            }
            *cavity = cavity.with_cavity_wavelength(lambda).with_emitter_wavelength(lambda);
        }
        Mitigation::Decouple => {
            cavity.v_r = 0.0;
            cavity.v_l = 0.0;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{params_from_q_factors, QFactorSpec, SPEED_OF_LIGHT};

    fn ten_cavities(g_over_2pi: f64) -> SwitchLayout {
        let q = QFactorSpec { q_coupled: 500.0, q_intrinsic: 5e4 };
        let c = params_from_q_factors(1550e-9, 1550e-9, g_over_2pi, q, 1e9).unwrap();
        SwitchLayout::identical(c, 10, 31.5e-6, 0.3 * SPEED_OF_LIGHT)
    }

    fn spec(target: DisorderTarget, mean: f64, sigma: f64) -> DisorderSpec {
        DisorderSpec { target, mean, sigma, realizations: 4, seed: 7 }
    }

    #[test]
    fn zero_sigma_keeps_base() {
        let base = ten_cavities(100e6);
        let s = spec(DisorderTarget::CoupledQ, 500.0, 0.0);
        assert_eq!(sample_layout(&base, &s, 3).unwrap(), base);
    }

    #[test]
    fn coupled_q_sampler_statistics() {
        let s = spec(DisorderTarget::CoupledQ, 500.0, 125.0);
        let draws: Vec<f64> = (0..100_000).map(|i| draw_element(&s, i, 0).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        assert!((mean - 500.0).abs() < 2.0, "{mean}");
        assert!((var.sqrt() - 125.0).abs() / 125.0 < 0.02, "{}", var.sqrt());
    }

    #[test]
    fn separations_stay_nonnegative() {
        let base = ten_cavities(100e6);
        let s = spec(DisorderTarget::Separation, 31.5e-6, 1e-6);
        for r in 0..200 {
            let l = sample_layout(&base, &s, r).unwrap();
            assert!(l.links.iter().all(|link| link.d > 0.0));
        }
    }

    #[test]
    fn resampling_exhaustion_is_an_error() {
        let base = ten_cavities(100e6);
        // ten sigma below zero: essentially every draw is rejected
        let s = spec(DisorderTarget::CoupledQ, -10.0, 1.0);
        assert!(matches!(sample_layout(&base, &s, 0), Err(Error::ResamplingBudget { rejects: MAX_REJECTS })));
        // about half the draws are rejected here, which the budget absorbs
        let s = spec(DisorderTarget::Separation, 0.0, 1e-6);
        assert!(sample_layout(&base, &s, 0).is_ok());
    }

    #[test]
    fn study_with_one_realization_is_that_sample() {
        let base = ten_cavities(100e6);
        let mut s = spec(DisorderTarget::CavityWavelength, 1550e-9, 1e-9);
        s.realizations = 1;
        let grid = SpectralGrid::wavelength_nm(1545.0, 1555.0, 101);
        let res = disorder_study(&base, &s, &grid, 1).unwrap();
        let single = compute_spectrum_serial(&sample_layout(&base, &s, 0).unwrap(), &grid).unwrap();
        assert_eq!(res.sample_spectra[0], single);
        for (m, x) in res.mean_spectrum.samples.iter().zip(&single.samples) {
            assert_eq!(m.transmission, x.transmission);
        }
        assert_eq!(res.realized_parameters.len(), 1);
        assert_eq!(res.realized_parameters[0].len(), 10);
    }

    #[test]
    fn same_seed_same_result() {
        let base = ten_cavities(1e12);
        let s = DisorderSpec { realizations: 70, ..spec(DisorderTarget::EmitterFollowsCavity, 1550e-9, 1e-9) };
        let grid = SpectralGrid::wavelength_nm(1545.0, 1555.0, 51);
        let a = disorder_study(&base, &s, &grid, 2).unwrap();
        let b = disorder_study(&base, &s, &grid, 2).unwrap();
        assert_eq!(a, b);
        let other = disorder_study(&base, &DisorderSpec { seed: 8, ..s }, &grid, 2).unwrap();
        assert_ne!(a.mean_spectrum, other.mean_spectrum);
    }

    #[test]
    fn mitigation_actions() {
        let base = ten_cavities(1e12);
        assert!(matches!(
            mitigation_scenario(&base, 10, Mitigation::Decouple),
            Err(Error::IndexOutOfRange { index: 10, len: 10 })
        ));
        let weak = mitigation_scenario(&base, 6, Mitigation::WeakCoupling).unwrap();
        assert_eq!(weak.cavities[6].g, WEAK_COUPLING);
        assert_eq!(weak.cavities[5], base.cavities[5]);
        let detuned = mitigation_scenario(&weak, 6, Mitigation::DetuneTo(1543e-9)).unwrap();
        assert!((detuned.cavities[6].cavity_wavelength() - 1543e-9).abs() < 1e-18);
        assert!((detuned.cavities[6].emitter_wavelength() - 1543e-9).abs() < 1e-18);
        let decoupled = mitigation_scenario(&weak, 6, Mitigation::Decouple).unwrap();
        assert!(decoupled.cavities[6].is_decoupled());
    }
}
