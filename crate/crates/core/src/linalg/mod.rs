//! Exact integer and rational linear algebra: matrices, Smith and Hermite
//! normal forms, kernel bases, and unimodular coordinate changes.

pub mod kernel;
pub mod matrix;
pub mod normal_form;
pub mod transform;

pub use kernel::kernel_basis;
pub use matrix::{dot_i64, make_primitive, IntMatrix, RatMatrix};
pub use normal_form::{
    hermite_normal_form, smith_normal_form, HermiteDecomposition, SmithDecomposition,
};
pub use transform::{build_unimodular_transform, UnimodularTransform};
