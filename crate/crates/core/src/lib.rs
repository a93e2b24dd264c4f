//! Closed-form radial integrals of two spherical Bessel functions with an
//! exponential and polynomial weight,
//!
//! ```text
//! ∫_0^∞ r^n e^{-α r} j_{λ1}(k1 r) j_{λ2}(k2 r) dr,
//! ```
//!
//! written as finite sums over Wigner 3j/6j symbols and Legendre functions of
//! the second kind, together with independent quadrature oracles that check
//! every closed form numerically.

pub mod closedform;
pub mod error;
pub mod oracle;
pub mod specfun;
pub mod wigner;

pub use closedform::{
    bare_integral, three_bessel_product, two_bessel_equal_order, two_bessel_product,
    EvalResult, IntegralSpec, Method, Offset, ThreeBesselSpec,
};
pub use error::{Error, Result};
pub use oracle::{QuadratureConfig, QuadratureResult};
pub use specfun::{legendre_p, legendre_q, q_kernel, spherical_bessel_j, BesselEval, QEval};
pub use wigner::{threej_000_nonzero, wigner_3j, wigner_6j, AngularMomenta3j, WignerValue};
