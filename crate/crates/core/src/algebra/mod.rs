//! Exact arithmetic: rationals, univariate and homogeneous trivariate
//! polynomials, and 3×3 matrices.

pub mod gcd;
pub mod homog;
pub mod linear;
pub mod modp;
pub mod rational;
pub mod upoly;

pub use gcd::{poly_gcd, poly_gcd_many};
pub use homog::{Exponent, HomogPoly};
pub use linear::{format_point, normalize_point, same_point, Matrix3, ProjPoint};
pub use rational::{format_rational, parse_rational, Rational};
