//! Numerical toolkit for the characteristic problem of the ultrahyperbolic
//! equation. The solution is represented spectrally on the characteristic
//! cone {xi^2 = eta^2}; the crate provides exact multiplier evolution,
//! direct cone quadratures, a Littlewood-Paley shell decomposition, and the
//! stationary-phase far-field machinery used to verify the decay rates of
//! the solution along transversal characteristic lines.

pub mod asymptotics;
pub mod cone_lp;
pub mod geometry;
pub mod harness;
pub mod propagator;
pub mod quad;
pub mod smooth;
pub mod spectral;
pub mod sphere;
