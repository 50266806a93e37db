//! Single-photon switch simulator for emitter-loaded cavities side-coupled to
//! a single-mode waveguide.
//!
//! The device is described by a [`SwitchLayout`]: an ordered chain of
//! [`EmitterCavityParams`] separated by waveguide links. Scattering amplitudes
//! are obtained by cascading complex 2×2 transfer matrices ([`transfer`]),
//! cross-checked against closed forms for identical chains ([`analytic`]), and
//! folded into wave-packet efficiency/fidelity figures ([`wavepacket`]).
//!
//! All internal quantities are SI: angular frequencies in rad/s, lengths in
//! metres, velocities in m/s.

pub mod analytic;
pub mod disorder;
pub mod error;
pub mod matrix;
pub mod model;
pub mod quadrature;
pub mod spectra;
pub mod sweep;
pub mod transfer;
pub mod wavepacket;

pub use analytic::{chain_eigenvalues, chain_scattering, ChainEigenpair, IdenticalChainParams};
pub use disorder::{
    disorder_study, mitigation_scenario, sample_layout, DisorderResult, DisorderSpec, DisorderTarget, Mitigation,
};
pub use error::{Error, LayoutIssue, Result};
pub use matrix::Matrix2c;
pub use model::{
    detunings, params_from_q_factors, validate_layout, EmitterCavityParams, PhysicalConstants, QFactorSpec,
    SwitchLayout, WaveguideLink, SPEED_OF_LIGHT,
};
pub use spectra::{
    compute_spectrum, find_transmission_minima, round_trip_time, GridAxis, ScatteringSample, ScatteringSpectrum,
    SpectralGrid,
};
pub use transfer::{cavity_matrix, scattering, total_matrix, waveguide_matrix, CavityMatrixTerms};
pub use wavepacket::{envelope_intensity, switch_metrics, Mode, SwitchMetrics, WavePacketSpec};

pub use num_complex::Complex64;
