use thiserror::Error;

#[derive(Debug, Error)]
pub enum SncError {
    /// Drone and user share the same 3-D point, so the elevation angle is undefined.
    #[error("elevation angle is undefined at h = r = 0")]
    DegenerateGeometry,

    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dΓ/dα has no sign change on [{lo}, {hi}]")]
    NoStationaryPoint { lo: f64, hi: f64 },

    #[error("no candidate center lies inside the placement bounds")]
    InfeasibleBounds,

    #[error("no altitude in [{h_l}, {h_u}] m covers radius {radius} m")]
    InfeasibleAltitude { radius: f64, h_l: f64, h_u: f64 },

    #[error("sample count {samples} is too small for {breakpoints} breakpoints")]
    TooFewSamples { samples: usize, breakpoints: usize },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SncError>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> SncError {
    SncError::Domain { name, value, expected }
}
