//! Coloring tensors, level-preserving transforms, convolution and the linear
//! systems built on them.

pub mod color;
pub mod linalg;
pub mod linform;
pub mod poly;
pub mod probe;
pub mod scalar;
pub mod scheme;
pub mod sx;

pub use color::ColorTensor;
pub use linform::LinearForm;
pub use poly::{vandermonde_transform, PolynomialTransform};
pub use scalar::Scalar;
