//! Geometry of the Siegel–Jacobi ball `D^J_n = Cⁿ × D_n` and its parent domains.
//!
//! The crate evaluates, in closed form, the balanced Kähler metric of the
//! Siegel–Jacobi ball together with its inverse, determinant, Ricci form,
//! scalar curvature and Laplace–Beltrami operator, the reproducing kernel
//! and the quantities derived from it, and the actions of the Jacobi groups
//! on the ball and on the Siegel–Jacobi upper half-plane.
//!
//! Every closed form has an independent numerical counterpart in [`oracle`]:
//! Wirtinger finite-difference Hessians and Jacobians, which never call the
//! formulas they check. [`oracle::fuzz`] runs all of those comparisons over
//! seeded random points and group elements.
//!
//! Coordinates on `D^J_n` are `(z_1, …, z_n, w_{11}, w_{12}, …, w_{nn})`, the
//! symmetric entries of `W` taken once each in lexicographic order, so the
//! complex dimension is `d = n(n+3)/2` (see [`domains::PairIndex`]).
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod domains;
pub mod error;
pub mod groups;
pub mod kernels;
pub mod laplacian;
pub mod linalg;
pub mod metric;
pub mod oracle;
pub mod quadrature;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
