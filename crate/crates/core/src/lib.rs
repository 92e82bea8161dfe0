pub mod certify;
pub mod disc;
pub mod donut;
pub mod error;
pub mod eversion;
pub mod export;
pub mod geom;
pub mod intersect;
pub mod mesh;
pub mod pipeline;
pub mod s3;

pub use error::{Error, Result};
pub use geom::{Differential3x2, Point3, SampledCurve, Vec3};
