//! Concurrent normals of the elliptic paraboloid `z = (a x² + b y²)/2`.

pub mod caustic;
pub mod classifier;
pub mod error;
pub mod export;
pub mod geometry;
pub mod mesh;
pub mod normals;
pub mod oracle;
pub mod parabola2d;
pub mod polyroots;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Sign};

pub type Paraboloid = geometry::Paraboloid<f64>;
pub type SpacePoint = geometry::SpacePoint<f64>;
pub type ParabolicCoords = geometry::ParabolicCoords<f64>;
pub type CurvatureData = geometry::CurvatureData<f64>;
pub type Polynomial = polyroots::Polynomial<f64>;
pub type RootSet = polyroots::RootSet<f64>;
pub type NormalBundle = normals::NormalBundle<f64>;
pub type Parabola2 = parabola2d::Parabola2<f64>;
pub type PlanePoint = parabola2d::PlanePoint<f64>;
pub type OracleResult = oracle::OracleResult<f64>;
pub type PointClassification = classifier::PointClassification<f64>;
pub type Mesh = mesh::Mesh<f64>;
pub type Polyline = mesh::Polyline<f64>;
