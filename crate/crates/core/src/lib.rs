//! Geometry of the two-component Camassa-Holm system with vorticity.
//!
//! The system is the geodesic equation of a right-invariant metric on the
//! group `(Diff(S) ⋉ C∞(S)) × R`. The crate covers:
//!
//! - [`spectral`]: exact trigonometric polynomial arithmetic on the circle
//! - [`algebra`]: the group, its Lie algebra, `Ad`, `ad` and their adjoints
//! - [`metric`]: the metric, Christoffel operators and sectional curvature
//! - [`modes`]: closed-form curvature of cosine-mode planes
//! - [`flow`]: time integration and momentum conservation
//! - [`verify`]: seeded randomized cross-checks of the identities above

pub mod algebra;
pub mod flow;
pub mod metric;
pub mod modes;
pub mod spectral;
pub mod verify;

pub use algebra::{AlgebraElement, AlgebraError, Diffeo, GroupElement, GroupVelocity};
pub use metric::{CurvatureReport, MetricError, Momentum};
pub use spectral::{SpectralError, TrigPoly};
