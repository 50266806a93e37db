use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single invariant violation found by [`crate::validate_layout`].
#[derive(Debug, Clone, PartialEq)]
pub enum LayoutIssue {
    LinkCountMismatch {
        cavities: usize,
        links: usize,
    },
    GroupVelocity {
        v_g: f64,
    },
    Cavity {
        index: usize,
        field: &'static str,
        reason: &'static str,
    },
    Link {
        index: usize,
        reason: &'static str,
    },
    /// `g > 0` with `gamma == 0` leaves an unguarded pole at the emitter frequency.
    EmitterPole {
        index: usize,
    },
}

impl fmt::Display for LayoutIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutIssue::LinkCountMismatch { cavities, links } => {
                write!(f, "{cavities} cavities need {} links, found {links}", cavities.saturating_sub(1))
            }
            LayoutIssue::GroupVelocity { v_g } => {
                write!(f, "group velocity {v_g} m/s outside (0, c]")
            }
            LayoutIssue::Cavity { index, field, reason } => {
                write!(f, "cavity {index}: {field} {reason}")
            }
            LayoutIssue::Link { index, reason } => write!(f, "link {index}: separation {reason}"),
            LayoutIssue::EmitterPole { index } => {
                write!(f, "cavity {index}: g > 0 requires gamma > 0 (emitter pole is unguarded)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid layout: {}", join_issues(.0))]
    InvalidLayout(Vec<LayoutIssue>),

    /// `|beta + alpha_minus|` vanished; `index` is the cavity position when known.
    #[error("singular cavity transfer matrix{} at omega = {omega:e} rad/s", fmt_index(*.index))]
    SingularCavity { index: Option<usize>, omega: f64 },

    #[error("degenerate output (|M22| ~ 0) at omega = {omega:e} rad/s")]
    DegenerateOutput { omega: f64 },

    #[error("degenerate chain eigenvalues at omega = {omega:e} rad/s")]
    DegenerateEigenvalues { omega: f64 },

    #[error("spectrum point {axis_value:e}: {source}")]
    SpectrumPoint { axis_value: f64, source: Box<Error> },

    #[error("quadrature did not converge: component {component} estimate {estimate:e}, error bound {error_bound:e}")]
    Quadrature { component: usize, estimate: f64, error_bound: f64 },

    #[error("resampling budget exceeded after {rejects} rejected draws (sigma grossly unphysical?)")]
    ResamplingBudget { rejects: usize },

    #[error("{failed} of {total} disorder realizations failed (first: {first})")]
    TooManyFailedRealizations { failed: usize, total: usize, first: Box<Error> },

    #[error("cavity index {index} out of range for {len} cavities")]
    IndexOutOfRange { index: usize, len: usize },
}

fn join_issues(issues: &[LayoutIssue]) -> String {
    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

fn fmt_index(index: Option<usize>) -> String {
    index.map(|i| format!(" (cavity {i})")).unwrap_or_default()
}
