//! Scattering spectra on wavelength or frequency grids, plus feature extraction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PhysicalConstants, SwitchLayout};
use crate::transfer::scattering;

/// Loss values in `[-LOSS_CLIP, 0)` are reported as zero.
pub const LOSS_CLIP: f64 = 1e-10;

/// Points used by [`SpectralGrid::packet_window`].
pub const PACKET_GRID_POINTS: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAxis {
    /// Vacuum wavelength in nm.
    WavelengthNm,
    /// Angular frequency in rad/s.
    FrequencyRadS,
}

impl GridAxis {
    pub fn omega(self, value: f64) -> f64 {
        match self {
            GridAxis::WavelengthNm => PhysicalConstants::omega_from_wavelength(value * 1e-9),
            GridAxis::FrequencyRadS => value,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GridAxis::WavelengthNm => "wavelength_nm",
            GridAxis::FrequencyRadS => "omega_rad_s",
        }
    }
}

/// Uniform grid of `points` samples from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub axis: GridAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SpectralGrid {
    pub fn wavelength_nm(start: f64, stop: f64, points: usize) -> Self {
        Self { axis: GridAxis::WavelengthNm, start, stop, points }
    }

    pub fn frequency(start: f64, stop: f64, points: usize) -> Self {
        Self { axis: GridAxis::FrequencyRadS, start, stop, points }
    }

    /// `±10 σ_λ` around a packet centre, both in metres.
    pub fn packet_window(lambda_cen: f64, sigma_lambda: f64) -> Self {
        let (c, s) = (lambda_cen * 1e9, sigma_lambda * 1e9);
        Self::wavelength_nm(c - 10.0 * s, c + 10.0 * s, PACKET_GRID_POINTS)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
        }
        if self.axis == GridAxis::WavelengthNm && self.start <= 0.0 {
            return Err(Error::InvalidParameter("wavelength grid must be positive".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.points).map(|i| if i + 1 == self.points { self.stop } else { self.start + i as f64 * step }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSample {
    pub axis_value: f64,
    pub omega: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub loss: f64,
}

impl ScatteringSample {
    pub fn new(axis_value: f64, omega: f64, t: Complex64, r: Complex64) -> Self {
        Self::from_powers(axis_value, omega, t, r, t.norm_sqr(), r.norm_sqr())
    }

    pub(crate) fn from_powers(
        axis_value: f64,
        omega: f64,
        t: Complex64,
        r: Complex64,
        transmission: f64,
        reflection: f64,
    ) -> Self {
        let raw = 1.0 - transmission - reflection;
        let loss = if (-LOSS_CLIP..0.0).contains(&raw) { 0.0 } else { raw };
        Self { axis_value, omega, t, r, transmission, reflection, loss }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSpectrum {
    pub axis: GridAxis,
    pub samples: Vec<ScatteringSample>,
}

impl ScatteringSpectrum {
    pub fn transmission(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.transmission).collect()
    }

    pub fn axis_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.axis_value).collect()
    }
}

/// Evaluates the scattering amplitudes at every grid point, in grid order.
pub fn compute_spectrum(layout: &SwitchLayout, grid: &SpectralGrid) -> Result<ScatteringSpectrum> {
    grid.validate()?;
    let results: Vec<Result<ScatteringSample>> =
        grid.values().into_par_iter().map(|x| evaluate_point(layout, grid.axis, x)).collect();
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ScatteringSpectrum { axis: grid.axis, samples })
}

/// Sequential variant for callers that already parallelise at a coarser level.
pub(crate) fn compute_spectrum_serial(layout: &SwitchLayout, grid: &SpectralGrid) -> Result<ScatteringSpectrum> {
    grid.validate()?;
    let samples =
        grid.values().into_iter().map(|x| evaluate_point(layout, grid.axis, x)).collect::<Result<Vec<_>>>()?;
    Ok(ScatteringSpectrum { axis: grid.axis, samples })
}

fn evaluate_point(layout: &SwitchLayout, axis: GridAxis, x: f64) -> Result<ScatteringSample> {
    let omega = axis.omega(x);
    let (t, r) = scattering(layout, omega).map_err(|e| Error::SpectrumPoint { axis_value: x, source: Box::new(e) })?;
    Ok(ScatteringSample::new(x, omega, t, r))
}

/// Local transmission minima below `floor`, refined by a parabola through the
/// minimum sample and its two neighbours. Assumes a uniform axis.
pub fn find_transmission_minima(spec: &ScatteringSpectrum, floor: f64) -> Vec<(f64, f64)> {
    let s = &spec.samples;
    let mut out = Vec::new();
    if s.len() < 3 {
        return out;
    }
    let mut i = 1;
    while i + 1 < s.len() {
        let y1 = s[i].transmission;
        if y1 < s[i - 1].transmission {
            // walk across an exactly flat bottom
            let mut j = i;
            while j + 1 < s.len() && s[j + 1].transmission == y1 {
                j += 1;
            }
            if j + 1 < s.len() && s[j + 1].transmission > y1 && y1 < floor {
                let mid = (i + j) / 2;
                out.push(if i == j { refine(s, i) } else { (s[mid].axis_value, y1) });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn refine(s: &[ScatteringSample], i: usize) -> (f64, f64) {
    let (y0, y1, y2) = (s[i - 1].transmission, s[i].transmission, s[i + 1].transmission);
    let h = 0.5 * (s[i + 1].axis_value - s[i - 1].axis_value);
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature <= 0.0 {
        return (s[i].axis_value, y1);
    }
    let offset = 0.5 * (y0 - y2) / curvature;
    let value = y1 - 0.25 * (y0 - y2) * offset;
    (s[i].axis_value + offset * h, value.max(0.0))
}

/// Photon round-trip time through the chain, `2 Σd / v_g`, in seconds.
pub fn round_trip_time(layout: &SwitchLayout) -> f64 {
    2.0 * layout.links.iter().map(|l| l.d).sum::<f64>() / layout.v_g
}
