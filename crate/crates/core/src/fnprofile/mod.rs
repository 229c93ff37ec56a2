//! Profile functions `f`: parsing, derivatives, zeros, components of
//! `{f != 0}`, the contiguity graph and the symmetry group `Is(f)`.

mod expr;
mod parser;
mod profile;
mod symmetry;
mod zeros;

pub use expr::FunctionExpr;
pub use parser::{parse, ParseError};
pub use profile::{
    key_values, parse_domain, parse_profile_config, parse_real, read_profile, ConfigError, Domain,
    FunctionProfile, ProfileError, DEFAULT_GRID_N, DEFAULT_SCAN_RADIUS, DEFAULT_TOL,
};
pub use symmetry::{canonical_translate, detect_symmetry, transform, CaseLabel, Subtype, SymmetryCase, SymmetryClass};
pub use zeros::{
    components, contiguity_graph, find_zeros, graph_from_components, scan, Boundary, Component, ComponentSet,
    ContiguityGraph, Edge, Scan, Zero, ZeroError, ZeroKind,
};

/// Symbolic derivative.
pub fn differentiate(e: &FunctionExpr) -> FunctionExpr {
    e.derivative()
}

/// `f''(x)/2`.
pub fn curvature(p: &FunctionProfile, x: f64) -> Result<f64, ProfileError> {
    p.curvature(x)
}
