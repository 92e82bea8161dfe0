use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radial coordinate {0} outside [0, 1]")]
    RadiusOutOfRange(f64),
    #[error("foliation level {0} outside (0, pi)")]
    LevelOutOfRange(f64),
    #[error("point is the projection pole")]
    PointAtInfinity,
    #[error("curves intersect (min distance {0:.3e})")]
    CurvesIntersect(f64),
    #[error("sample {index} lies off the torus (residual {residual:.3e})")]
    OffTorus { index: usize, residual: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("immersion failure: sigma_min {sigma:.3e} below floor {floor:.3e} at {location}")]
    Immersion { sigma: f64, floor: f64, location: String },
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("frame {index} failed: {cause}")]
    Frame { index: usize, cause: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
