//! Exterior algebra and calculus over coordinate expressions.

pub mod blade;
mod covector;
mod field;
mod form;

pub use blade::Blade;
pub use covector::Covector;
pub use field::{jet, Combination, Exterior, PointwiseForm, Scaled, WedgeOf, ZeroForm};
pub use form::{FormDisplay, FormField, SmoothMap, VectorField};
