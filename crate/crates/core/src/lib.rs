//! Exact-arithmetic toolkit for piecewise affine maps of the plane.
//!
//! The centerpiece is a parameterized family of maps on the rhombus with
//! vertices (±1, 0), (0, ±1): four open triangles, each sent affinely onto a
//! smaller triangle hanging from a vertex. For parameter t < 1/2 the map is
//! a strict contraction in the l1 metric, every orbit converges to the
//! two-point set {A, B} and the Lyapunov bound is strictly negative, yet the
//! number of depth-n itinerary cells doubles with n, so every entropy
//! estimator in this crate measures log 2.
//!
//! The crate keeps all geometry in arbitrary-precision rationals: cells of
//! the refined partition accumulate at the singularity web, where floating
//! point predicates would misclassify. Floats appear only in the reporting
//! layers (growth-rate fits, eigenvalue approximations, SVG coordinates).
//!
//! A narrative guide with runnable examples lives in `book/`; its snippets
//! are compiled as doc-tests below.

pub mod conformal;
pub mod entropy;
mod error;
pub mod geometry;
pub mod orbit;
pub mod pwa;
pub mod rational;
pub mod report;
pub mod symbolic;

pub use error::{Error, Result};
pub use geometry::{
    distance_l1, AffineMap2, ConvexPolygon, GramEigenvalues, HalfPlane, Location, Metric,
    RatMatrix2, RatPoint,
};
pub use pwa::{
    build_rhombus, load_map, map_hash, save_map, EvalOutcome, Located, Piece, PieceConformality,
    PieceId, PiecewiseMap, RhombusSpec,
};
pub use rational::{format_rational, parse_rational, rat, rat_int, Rational};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The book chapters double as doc-tests so the guide cannot drift from the
// library. Hidden modules carry the included markdown.
#[doc = include_str!("../../../book/src/exact-geometry.md")]
mod _book_exact_geometry {}
#[doc = include_str!("../../../book/src/the-rhombus-map.md")]
mod _book_rhombus_map {}
#[doc = include_str!("../../../book/src/symbolic-dynamics.md")]
mod _book_symbolic_dynamics {}
#[doc = include_str!("../../../book/src/entropy-estimators.md")]
mod _book_entropy_estimators {}
#[doc = include_str!("../../../book/src/orbits-and-lyapunov.md")]
mod _book_orbits_lyapunov {}
#[doc = include_str!("../../../book/src/conformal-contrast.md")]
mod _book_conformal_contrast {}
