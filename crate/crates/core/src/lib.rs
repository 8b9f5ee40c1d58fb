pub mod catalog;
pub mod chains;
pub mod contact;
pub mod error;
pub mod exterior;
pub mod expr;
pub mod flow;
pub mod hodge;
pub mod linalg;
pub mod manifold;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use expr::{Expr, Number};
pub use scalar::{Dual, Scalar};
pub use exterior::{Covector, FormField, PointwiseForm, VectorField};

/// Default real type of reports and fixtures.
pub type Real = f64;
/// Covector at a point with real components.
pub type RealCovector = Covector<Real>;
/// First-order jet used for directional derivatives.
pub type Jet = Dual<Real>;
/// Dense matrix used by the pointwise algebra.
pub type RealMat = linalg::Mat<Real>;
