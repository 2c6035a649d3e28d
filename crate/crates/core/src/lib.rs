#![no_std]
//! Extremal null curves in Minkowski 3-space for the functional ∫(1 + mk)ω.
//!
//! The crate is `no_std` with `alloc`. Modules, bottom up:
//!
//! * [`mink3`]: the Lorentzian inner and cross products on ℝ^{2,1}.
//! * [`e21`]: the group E(2,1), its algebra, exponential and coadjoint action.
//! * [`frenet`]: Frenet frames of normalized null curves.
//! * [`dynamics`]: momentum space, Euler–Lagrange flow, Lax pair, canonical 2-form.
//! * [`elliptic`]: Weierstrass ℘ and the closed-form extremals.
//! * [`reduce`]: orbit classification, cross-sections and reconstruction by quadratures.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod e21;
pub mod elliptic;
pub mod error;
pub mod frenet;
pub mod linalg;
pub mod mink3;
pub mod ode;
pub mod reduce;

pub use error::{Error, Result};
