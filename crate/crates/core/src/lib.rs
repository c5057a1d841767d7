//! Exact-arithmetic computations with root systems of affine Kac-Moody
//! algebras: real/imaginary root enumeration, regular-subsystem certificates
//! and classification, reflection-subgroup indices, coset central charges,
//! and the hyperbolic recursion. No floating point anywhere.

pub mod affine;
pub mod classifier;
pub mod coset;
pub mod error;
pub mod finite;
pub mod hyperbolic;
pub mod labels;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod recognize;
pub mod subsystem;

pub use error::{Error, Result};
pub use labels::{parse_label, parse_label_list, Family, LengthClass, RootSystemLabel};
pub use linalg::Rat;
