//! Exact rational plane geometry: points, metrics, 2x2 affine maps and
//! convex polygon algebra. Everything here is a pure function over immutable
//! values; no floating point enters any predicate.

mod affine;
mod matrix;
mod metric;
mod point;
mod polygon;

pub use affine::AffineMap2;
pub use matrix::{GramEigenvalues, RatMatrix2};
pub use metric::{distance_l1, Metric};
pub use point::RatPoint;
pub use polygon::{ConvexPolygon, HalfPlane, Location};
