use thiserror::Error;

/// Errors shared by all simulator modules.
///
/// Variants split into two families: configuration/input problems (rejected
/// before any computation) and numerical failures detected during a run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid mode profile: {0}")]
    InvalidProfile(String),

    /// The dressed frame is undefined at the degenerate point delta = 0, u = 0.
    /// Callers choose a convention explicitly instead of receiving a silent default.
    #[error("dressed frame undefined: delta = 0 and u = 0")]
    DegenerateFrame,

    #[error("no propagating incident channel: E = {energy} must be > 0")]
    NoIncidentChannel { energy: f64 },

    /// Emission channel closed by energy conservation (k_in^2 <= 2 m delta).
    #[error("emission channel closed: k_in = {k_in}, threshold k = {threshold}")]
    ChannelClosed { k_in: f64, threshold: f64 },

    #[error("scan row {index} (k = {k}): {source}")]
    ScanRow {
        index: usize,
        k: f64,
        #[source]
        source: Box<Error>,
    },

    /// Grid spacing too coarse for the requested wavenumber content.
    #[error(
        "grid resolution insufficient: dz = {actual_dz:.6} but dz <= {required_dz:.6} \
         needed for k_max = {k_max:.6} (>= 8 points per wavelength)"
    )]
    Resolution {
        actual_dz: f64,
        required_dz: f64,
        k_max: f64,
    },

    #[error("norm drift {drift:.3e} exceeds tolerance {tol:.3e} at t = {t}")]
    NormDrift { drift: f64, tol: f64, t: f64 },

    #[error("propagation unstable: norm grew {factor:.2}x by t = {t}")]
    Unstable { factor: f64, t: f64 },

    /// Asymptotic analysis requested before the packet left the cavity region.
    #[error("premature analysis: residual probability {residual:.3e} in cavity region")]
    PrematureAnalysis { residual: f64 },

    #[error("linear solve failed: {0}")]
    SingularSystem(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than by the computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::InvalidProfile(_)
                | Error::DegenerateFrame
                | Error::NoIncidentChannel { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
