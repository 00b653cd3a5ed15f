//! Tilings of finite vector spaces F_q^n, the 1-perfect codes they induce, and
//! factorizations of projective spaces.
//!
//! - [`gf`]: finite field arithmetic with a canonical integer encoding of elements.
//! - [`linalg`]: vectors, vector sets, matrices and Gaussian elimination over F_q.
//! - [`tiling`]: tiling verification, periods and kernels, projectivity, and the
//!   semiprojective and projective full-rank constructions.
//! - [`codes`]: Hamming balls and the passage from a semiprojective tiling to a 1-perfect code.
//! - [`projgeo`]: points of PG(n-1, q), factorizations, restriction, quotients and search.

pub mod codes;
pub mod error;
pub mod gf;
pub mod keyset;
pub mod linalg;
pub mod projgeo;
pub mod tiling;

pub use error::{Error, Result};
pub use gf::{Elem, FieldSpec};
pub use linalg::{FMatrix, FVec, Space, VSet};
