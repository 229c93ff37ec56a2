//! Effective invariants of Lorentzian surfaces `2dxdy + f(x)dy^2` carrying
//! the Killing field `∂_y`.
//!
//! * [`fnprofile`]: the profile `f`, its zeros, components, contiguity graph
//!   and symmetry group.
//! * [`extension`]: squares, bands and leaf space of the maximal extension,
//!   light-leaf completeness, the saddle chart and transverse affine
//!   parameters with their holonomy.
//! * [`isogroup`]: Coxeter presentation, word normal forms, the `(k, ℓ)`
//!   invariants and the census of minimal torsion-free quotients.
//! * [`classify`]: invariants of tori and Klein bottles and their moves.
//! * [`components`]: sign sequences and component indices of the space of
//!   metrics.
//! * [`geodesics`]: the geodesic flow and conjugate points.

pub mod classify;
pub mod components;
pub mod extension;
pub mod fnprofile;
pub mod geodesics;
pub mod isogroup;
pub mod ode;
