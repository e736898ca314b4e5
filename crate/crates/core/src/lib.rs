//! Higher-order Melnikov functions of the perturbed Rayleigh–Liénard oscillator
//!
//! ```text
//! x' = H_y,   y' = -H_x + (l1 + l2 x^2 + l3 y^2 + l4 x^4 + l5 y^4 + l6 x^6) y,
//! H = y^2/2 + a x^2/2 + b x^4/4
//! ```
//!
//! The crate computes Melnikov functions along analytic parameter arcs in exact rational
//! arithmetic, evaluates the elliptic period integrals they are built from, counts zeros of
//! the resulting functions, and checks the predictions against direct numerical integration.

pub mod exactalg;
pub mod appendix;
pub mod bautin;
pub mod elliptic;
pub mod zeros;
pub mod forms;
pub mod francoise;
pub mod simulate;
pub mod theorems;
pub mod cli;
