//! Combinatorial model of the universal extension `E^u_f`: squares, bands,
//! the leaf space of the Killing field, light-leaf completeness, transverse
//! affine parameters near a saddle and the holonomies they produce.

use thiserror::Error;

use crate::fnprofile::{components, Boundary, Component, ComponentSet, Domain, FunctionProfile, Zero, ZeroKind};
use crate::ode::{self, Control, Options};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error("the zero at x = {x0} is degenerate (f'(x0) = 0)")]
    DegenerateZero { x0: f64 },
    #[error("x = {x0} is not a zero of f")]
    NotAZero { x0: f64 },
    #[error("the affine parameter of an axis must be non-zero")]
    ZeroAxis,
    #[error("division by zero in the holonomy quotient")]
    DivisionByZero,
    #[error("integration of the transverse structure failed: {0}")]
    Ode(#[from] ode::OdeError),
    #[error("x = {x} lies outside the domino ({lo}, {hi})")]
    OutsideDomino { x: f64, lo: f64, hi: f64 },
}

/// How a square looks from inside at one of its ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndKind {
    /// Simple zero.
    Saddle,
    /// Degenerate zero.
    SourceSink,
    /// Boundary of a zero plateau or of the domain.
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandType {
    I,
    II,
    III,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Square {
    pub x_left: f64,
    pub x_right: f64,
    pub left: EndKind,
    pub right: EndKind,
    pub sign: i8,
}

impl Square {
    pub fn width(&self) -> f64 {
        self.x_right - self.x_left
    }
}

/// A component of `{f != 0}` touching the end of the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfBand {
    pub band: BandType,
    /// Endpoint on the zero side.
    pub zero_end: f64,
    /// Endpoint on the domain side (may be infinite).
    pub open_end: f64,
    pub zero_kind: EndKind,
    pub sign: i8,
}

impl HalfBand {
    pub fn width(&self) -> f64 {
        (self.open_end - self.zero_end).abs()
    }
}

fn end_kind(cs: &ComponentSet, b: Boundary) -> EndKind {
    match b {
        Boundary::Zero(i) => match cs.zeros[i].kind {
            ZeroKind::Simple => EndKind::Saddle,
            ZeroKind::Degenerate => EndKind::SourceSink,
        },
        _ => EndKind::Boundary,
    }
}

fn is_zero_end(b: Boundary) -> bool {
    matches!(b, Boundary::Zero(_) | Boundary::Plateau(_))
}

/// One square per component of `{f != 0}` bounded by zeros on both sides.
pub fn squares(p: &FunctionProfile) -> Vec<Square> {
    squares_of(&components(p))
}

pub fn squares_of(cs: &ComponentSet) -> Vec<Square> {
    cs.components
        .iter()
        .filter(|c| c.is_interior())
        .map(|c| Square {
            x_left: c.left,
            x_right: c.right,
            left: end_kind(cs, c.left_end),
            right: end_kind(cs, c.right_end),
            sign: c.sign,
        })
        .collect()
}

/// Components with exactly one zero end, as Reeb half-bands.
pub fn boundary_bands(p: &FunctionProfile) -> Vec<HalfBand> {
    boundary_bands_of(&components(p))
}

pub fn boundary_bands_of(cs: &ComponentSet) -> Vec<HalfBand> {
    let mut out = Vec::new();
    for c in &cs.components {
        let (l, r) = (is_zero_end(c.left_end), is_zero_end(c.right_end));
        if l && !r {
            out.push(HalfBand {
                band: BandType::III,
                zero_end: c.left,
                open_end: c.right,
                zero_kind: end_kind(cs, c.left_end),
                sign: c.sign,
            });
        } else if r && !l {
            out.push(HalfBand {
                band: BandType::III,
                zero_end: c.right,
                open_end: c.left,
                zero_kind: end_kind(cs, c.right_end),
                sign: c.sign,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    /// A square: both ends doubled.
    DoubleBoundary,
    /// `[0, m[` with doubled closed end: a band next to infinity.
    HalfOpenDouble,
    /// Interior of `{f = 0}`, or the whole line when `f` has no zero.
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub left: f64,
    pub right: f64,
    pub sign: i8,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// How two adjacent segments are glued at an isolated zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JunctionKind {
    /// Simple zero, `f` changes sign: saddle cycle of four branch points.
    A1,
    /// Zero without sign change.
    A2,
    /// Degenerate zero with sign change: source/sink at infinity.
    B,
    /// End of a zero plateau.
    PlateauEnd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Junction {
    pub x: f64,
    pub kind: JunctionKind,
    pub left_segment: usize,
    pub right_segment: usize,
    /// Number of branch points created at this junction.
    pub branch_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeafSpaceModel {
    pub segments: Vec<Segment>,
    pub junctions: Vec<Junction>,
    pub cyclic: bool,
    pub period: Option<f64>,
}

impl LeafSpaceModel {
    /// Total length of the segments (one period for periodic profiles).
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn saddle_cycles(&self) -> usize {
        self.junctions.iter().filter(|j| j.kind == JunctionKind::A1).count()
    }

    pub fn branch_points(&self) -> usize {
        self.junctions.iter().map(|j| j.branch_points).sum()
    }
}

fn segment_of(c: &Component) -> Segment {
    let kind = if c.is_interior() {
        SegmentKind::DoubleBoundary
    } else if is_zero_end(c.left_end) || is_zero_end(c.right_end) {
        SegmentKind::HalfOpenDouble
    } else {
        SegmentKind::Plain
    };
    Segment { kind, left: c.left, right: c.right, sign: c.sign }
}

/// Leaf space of the Killing field on `E^u_f`, cut into metric segments.
pub fn leaf_space(p: &FunctionProfile) -> LeafSpaceModel {
    let cs = components(p);
    let period = p.domain.period();
    let mut segments: Vec<Segment> = Vec::new();
    let mut junctions = Vec::new();
    if cs.is_elementary() {
        let (a, b) = match p.domain {
            Domain::Interval { a, b } => (a, b),
            Domain::Periodic { period } => (0.0, period),
        };
        segments.push(Segment { kind: SegmentKind::Plain, left: a, right: b, sign: cs.components.first().map_or(0, |c| c.sign) });
        return LeafSpaceModel { segments, junctions, cyclic: cs.cyclic, period };
    }
    // Components and plateaus interleaved by position.
    let mut items: Vec<(f64, Segment)> = cs.components.iter().map(|c| (c.left, segment_of(c))).collect();
    for &(s, e) in &cs.plateaus {
        items.push((s, Segment { kind: SegmentKind::Plain, left: s, right: e, sign: 0 }));
    }
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    segments = items.into_iter().map(|(_, s)| s).collect();
    let n = segments.len();
    let glue = |i: usize, j: usize, junctions: &mut Vec<Junction>| {
        let (l, r) = (segments[i], segments[j]);
        let x = l.right;
        let zero = cs.zeros.iter().find(|z| {
            let d = match period {
                Some(t) => ((z.x0 - x).rem_euclid(t)).min((x - z.x0).rem_euclid(t)),
                None => (z.x0 - x).abs(),
            };
            d <= 1e-9 * x.abs().max(1.0)
        });
        let kind = match (l.kind, r.kind, zero) {
            (SegmentKind::Plain, _, _) | (_, SegmentKind::Plain, _) => JunctionKind::PlateauEnd,
            (_, _, Some(z)) if z.kind == ZeroKind::Simple => JunctionKind::A1,
            _ if l.sign != r.sign => JunctionKind::B,
            _ => JunctionKind::A2,
        };
        let branch_points = match kind {
            JunctionKind::A1 => 4,
            JunctionKind::PlateauEnd => 1,
            _ => 2,
        };
        junctions.push(Junction { x, kind, left_segment: i, right_segment: j, branch_points });
    };
    for i in 0..n.saturating_sub(1) {
        glue(i, i + 1, &mut junctions);
    }
    if cs.cyclic && n >= 1 {
        glue(n - 1, 0, &mut junctions);
    }
    LeafSpaceModel { segments, junctions, cyclic: cs.cyclic, period }
}

/// Side of the light leaf `{x = x0}` on which it is complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompleteSide {
    YNegative,
    YPositive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafCompleteness {
    Complete,
    SemiComplete(CompleteSide),
}

/// Completeness of the light leaf of `K` through the zero `z`.
pub fn light_leaf_complete(p: &FunctionProfile, z: &Zero) -> LeafCompleteness {
    let lambda = p.df(z.x0);
    if z.kind == ZeroKind::Degenerate || lambda.abs() <= p.tol {
        LeafCompleteness::Complete
    } else if lambda > 0.0 {
        LeafCompleteness::SemiComplete(CompleteSide::YNegative)
    } else {
        LeafCompleteness::SemiComplete(CompleteSide::YPositive)
    }
}

fn check_simple(p: &FunctionProfile, z: &Zero) -> Result<f64, ExtensionError> {
    if p.f(z.x0).abs() > 1e3 * p.tol * p.value_scale() {
        return Err(ExtensionError::NotAZero { x0: z.x0 });
    }
    let lambda = p.df(z.x0);
    if z.kind == ZeroKind::Degenerate || lambda.abs() <= p.tol {
        return Err(ExtensionError::DegenerateZero { x0: z.x0 });
    }
    Ok(lambda)
}

/// `f(x0 + s) = λ s g(s)` near a simple zero, and the metric
/// `(1/λ)[v² h(uv) du² − 2(g + 1/g) du dv + u² h(uv) dv²]`.
#[derive(Clone, Debug)]
pub struct SaddleChart {
    pub x0: f64,
    pub lambda: f64,
    /// `g'(0)` and `g''(0)/2`.
    a: f64,
    b: f64,
    profile: FunctionProfile,
}

const SERIES_G: f64 = 1e-6;
const SERIES_H: f64 = 1e-5;

impl SaddleChart {
    pub fn g(&self, s: f64) -> f64 {
        if s.abs() < SERIES_G {
            1.0 + s * (self.a + s * self.b)
        } else {
            self.profile.f(self.x0 + s) / (self.lambda * s)
        }
    }

    pub fn h(&self, s: f64) -> f64 {
        if s.abs() < SERIES_H {
            2.0 * self.a + (2.0 * self.b - self.a * self.a) * s
        } else {
            let g = self.g(s);
            (g - 1.0 / g) / s
        }
    }

    /// Coefficients `(α, β, γ)` of `α du² + 2β du dv + γ dv²`.
    pub fn metric(&self, u: f64, v: f64) -> [f64; 3] {
        let s = u * v;
        let (g, h) = (self.g(s), self.h(s));
        [v * v * h / self.lambda, -(g + 1.0 / g) / self.lambda, u * u * h / self.lambda]
    }

    /// `|λ s g(s) − f(x0 + s)|`.
    pub fn reconstruction_residual(&self, s: f64) -> f64 {
        (self.lambda * s * self.g(s) - self.profile.f(self.x0 + s)).abs()
    }

    /// `(x, y) -> (u, v)` in the half `v > 0`, using the transverse structure `aff`.
    pub fn to_uv(&self, aff: &AffineStructure, x: f64, y: f64) -> Result<(f64, f64), ExtensionError> {
        let s = x - self.x0;
        let w = aff.phi(x)? * self.g(s);
        let e = (0.5 * self.lambda * y).exp();
        Ok((s * w.sqrt() * e, 1.0 / (w.sqrt() * e)))
    }

    pub fn from_uv(&self, aff: &AffineStructure, u: f64, v: f64) -> Result<(f64, f64), ExtensionError> {
        let s = u * v;
        let x = self.x0 + s;
        let y = -(v * v * aff.phi(x)? * self.g(s)).ln() / self.lambda;
        Ok((x, y))
    }
}

pub fn saddle_chart(p: &FunctionProfile, z: &Zero) -> Result<SaddleChart, ExtensionError> {
    let lambda = check_simple(p, z)?;
    let f2 = p.d2f(z.x0);
    let f3 = p.d3().eval(z.x0);
    Ok(SaddleChart { x0: z.x0, lambda, a: f2 / (2.0 * lambda), b: f3 / (6.0 * lambda), profile: p.clone() })
}

/// Positive solution `φ` of `φ' = −(f' − λ)/f · φ`, `φ(x0) = 1`, on the
/// domino around a simple zero, and the affine parameter
/// `ξ = φ(x) e^{λy} f(x) / λ`.
#[derive(Clone, Debug)]
pub struct AffineStructure {
    pub x0: f64,
    pub lambda: f64,
    /// Domino `(lo, hi)` actually covered by the stored nodes.
    pub lo: f64,
    pub hi: f64,
    /// `(x, ln φ(x))`, sorted by `x`.
    nodes: Vec<(f64, f64)>,
    c0: f64,
    c1: f64,
    profile: FunctionProfile,
}

const NODE_SPACING: f64 = 1e-3;
const SERIES_C: f64 = 1e-6;

fn ode_opts() -> Options {
    Options { rtol: 1e-13, atol: 1e-14, h_max: NODE_SPACING, ..Default::default() }
}

impl AffineStructure {
    /// `(f'(x) − λ)/f(x)`, continued across `x0`.
    pub fn coefficient(&self, x: f64) -> f64 {
        let s = x - self.x0;
        if s.abs() < SERIES_C {
            self.c0 + self.c1 * s
        } else {
            (self.profile.df(x) - self.lambda) / self.profile.f(x)
        }
    }

    fn log_phi(&self, x: f64) -> Result<f64, ExtensionError> {
        if !(self.lo <= x && x <= self.hi) {
            return Err(ExtensionError::OutsideDomino { x, lo: self.lo, hi: self.hi });
        }
        let k = self.nodes.partition_point(|&(t, _)| t < x);
        let (t0, l0) = match (k.checked_sub(1).map(|i| self.nodes[i]), self.nodes.get(k).copied()) {
            (Some(a), Some(b)) => {
                if x - a.0 <= b.0 - x {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        if t0 == x {
            return Ok(l0);
        }
        let y = ode::solve(|t, _| [-self.coefficient(t)], t0, [l0], x, &ode_opts())?;
        Ok(y[0])
    }

    pub fn phi(&self, x: f64) -> Result<f64, ExtensionError> {
        self.log_phi(x).map(f64::exp)
    }

    pub fn xi(&self, x: f64, y: f64) -> Result<f64, ExtensionError> {
        Ok(self.phi(x)? * (self.lambda * y).exp() * self.profile.f(x) / self.lambda)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().map(|&(x, l)| (x, l.exp()))
    }
}

/// Neighbouring zeros (or domain ends) of `x0`.
fn domino(p: &FunctionProfile, x0: f64) -> (f64, f64) {
    let cs = components(p);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut marks: Vec<f64> = cs.zeros.iter().map(|z| z.x0).collect();
    marks.extend(cs.plateaus.iter().flat_map(|&(s, e)| [s, e]));
    if let Some(t) = p.domain.period() {
        let base = marks.clone();
        for k in [-1.0, 1.0] {
            marks.extend(base.iter().map(|m| m + k * t));
        }
    }
    let eps = 1e-9 * x0.abs().max(1.0);
    for m in marks {
        if m < x0 - eps {
            lo = lo.max(m);
        } else if m > x0 + eps {
            hi = hi.min(m);
        }
    }
    if let Domain::Interval { a, b } = p.domain {
        lo = lo.max(a);
        hi = hi.min(b);
    }
    let r = p.scan_radius;
    (lo.max(x0 - r), hi.min(x0 + r))
}

pub fn solve_affine_ode(p: &FunctionProfile, z: &Zero) -> Result<AffineStructure, ExtensionError> {
    let lambda = check_simple(p, z)?;
    let x0 = z.x0;
    let f2 = p.d2f(x0);
    let f3 = p.d3().eval(x0);
    let (dlo, dhi) = domino(p, x0);
    let mut aff = AffineStructure {
        x0,
        lambda,
        lo: x0,
        hi: x0,
        nodes: vec![(x0, 0.0)],
        c0: f2 / lambda,
        c1: f3 / (2.0 * lambda) - f2 * f2 / (2.0 * lambda * lambda),
        profile: p.clone(),
    };
    // Stop short of the neighbouring zeros, where φ may blow up or vanish.
    let margin = |w: f64| if w.is_finite() { (1e-4 * w).max(1e-6) } else { 0.0 };
    let targets = [dhi - margin(dhi - x0), dlo + margin(x0 - dlo)];
    for (side, &end) in targets.iter().enumerate() {
        let mut pts = Vec::new();
        let res = ode::integrate(|t, _| [-aff.coefficient(t)], x0, [0.0], end, &ode_opts(), |d, y| {
            if !y[0].is_finite() || y[0].abs() > 700.0 {
                return Control::Stop;
            }
            pts.push((d.t1(), y[0]));
            Control::Continue
        });
        let reached = match res {
            Ok(o) => o.t,
            Err(_) => pts.last().map_or(x0, |p| p.0),
        };
        if side == 0 {
            aff.hi = reached;
        } else {
            aff.lo = reached;
        }
        aff.nodes.extend(pts.into_iter().filter(|(t, _)| t.is_finite()));
    }
    aff.nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(aff)
}

/// Holonomy `(ξ⁺/ξ⁻)²` of the transverse structure around a cylinder with a
/// saddle-like end.
pub fn cylinder_holonomy(xi_plus: f64, xi_minus: f64) -> Result<f64, ExtensionError> {
    if xi_plus == 0.0 || xi_minus == 0.0 {
        return Err(ExtensionError::ZeroAxis);
    }
    Ok((xi_plus / xi_minus).powi(2))
}

/// A quasi-saddle closes up into a saddle iff `|ξ⁺| = |ξ⁻|`.
pub fn quasi_saddle_completable(xi_plus: f64, xi_minus: f64, tol: f64) -> Result<bool, ExtensionError> {
    if xi_plus == 0.0 || xi_minus == 0.0 {
        return Err(ExtensionError::ZeroAxis);
    }
    Ok((xi_plus.abs() - xi_minus.abs()).abs() <= tol * xi_plus.abs().max(xi_minus.abs()))
}

/// Values `ξ_i(γ_j)` entering the holonomy of a quasi-saddle covered by four
/// adapted charts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiSaddleData {
    pub xi1_g1: f64,
    pub xi2_g1: f64,
    pub xi3_g3: f64,
    pub xi4_g3: f64,
    pub xi1_g4: f64,
    pub xi2_g2: f64,
    pub xi3_g2: f64,
    pub xi4_g4: f64,
}

impl QuasiSaddleData {
    pub fn from_array(v: [f64; 8]) -> Self {
        QuasiSaddleData {
            xi1_g1: v[0],
            xi2_g1: v[1],
            xi3_g3: v[2],
            xi4_g3: v[3],
            xi1_g4: v[4],
            xi2_g2: v[5],
            xi3_g2: v[6],
            xi4_g4: v[7],
        }
    }
}

/// Holonomy ratio `η` of a quasi-saddle and the induced shift `ln(η)/λ` of
/// the flow parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiSaddleHolonomy {
    pub eta: f64,
    pub shift: f64,
}

pub fn quasi_saddle_holonomy(d: &QuasiSaddleData, lambda: f64) -> Result<QuasiSaddleHolonomy, ExtensionError> {
    let den = d.xi1_g4 * d.xi2_g2 * d.xi3_g2 * d.xi4_g4;
    if den == 0.0 || !den.is_finite() {
        return Err(ExtensionError::DivisionByZero);
    }
    if lambda == 0.0 {
        return Err(ExtensionError::DegenerateZero { x0: f64::NAN });
    }
    let eta = d.xi1_g1 * d.xi2_g1 * d.xi3_g3 * d.xi4_g3 / den;
    Ok(QuasiSaddleHolonomy { eta, shift: eta.abs().ln() / lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnprofile::find_zeros;
    use std::f64::consts::PI;

    fn prof(s: &str, d: Domain) -> FunctionProfile {
        FunctionProfile::parse(s, d).unwrap()
    }

    #[test]
    fn sine_squares() {
        let p = prof("sin(2*x)", Domain::Periodic { period: PI });
        let sq = squares(&p);
        assert_eq!(sq.len(), 2);
        for s in &sq {
            assert!((s.width() - PI / 2.0).abs() < 1e-10);
            assert_eq!((s.left, s.right), (EndKind::Saddle, EndKind::Saddle));
        }
        let ls = leaf_space(&p);
        assert_eq!(ls.segments.len(), 2);
        assert!((ls.total_length() - PI).abs() < 1e-10);
        assert_eq!(ls.saddle_cycles(), 2);
        assert_eq!(ls.branch_points(), 8);
    }

    #[test]
    fn mixed_square() {
        let p = prof("x*(x-1)^2", Domain::Interval { a: -1.0, b: 2.0 });
        let sq = squares(&p);
        assert_eq!(sq.len(), 1);
        assert_eq!((sq[0].left, sq[0].right), (EndKind::Saddle, EndKind::SourceSink));
        let bands = boundary_bands(&p);
        assert_eq!(bands.len(), 2);
        assert!(bands.iter().all(|b| b.band == BandType::III));
        let ls = leaf_space(&p);
        assert_eq!(ls.junctions.iter().map(|j| j.kind).collect::<Vec<_>>(), vec![JunctionKind::A1, JunctionKind::A2]);
        assert!((ls.total_length() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn elementary_and_square() {
        let p = prof("1 + x^2", Domain::Interval { a: f64::NEG_INFINITY, b: f64::INFINITY });
        assert!(squares(&p).is_empty());
        let ls = leaf_space(&p);
        assert_eq!(ls.segments.len(), 1);
        assert_eq!(ls.segments[0].kind, SegmentKind::Plain);
        let p = prof("x^2", Domain::Interval { a: f64::NEG_INFINITY, b: f64::INFINITY });
        let ls = leaf_space(&p);
        assert_eq!(ls.segments.iter().map(|s| s.kind).collect::<Vec<_>>(), vec![SegmentKind::HalfOpenDouble; 2]);
        assert_eq!(ls.junctions[0].kind, JunctionKind::A2);
        assert_eq!(ls.branch_points(), 2);
        let bands = boundary_bands(&p);
        assert!(bands.iter().all(|b| b.width().is_infinite()));
    }

    #[test]
    fn completeness() {
        let p = prof("sin(2*x)", Domain::Periodic { period: PI });
        let z = find_zeros(&p).unwrap();
        assert_eq!(light_leaf_complete(&p, &z[0]), LeafCompleteness::SemiComplete(CompleteSide::YNegative));
        assert_eq!(light_leaf_complete(&p, &z[1]), LeafCompleteness::SemiComplete(CompleteSide::YPositive));
        let p = prof("x^2", Domain::Interval { a: -1.0, b: 1.0 });
        let z = find_zeros(&p).unwrap();
        assert_eq!(light_leaf_complete(&p, &z[0]), LeafCompleteness::Complete);
    }

    #[test]
    fn flat_saddle() {
        let p = prof("3*x", Domain::Interval { a: -1.0, b: 1.0 });
        let z = find_zeros(&p).unwrap()[0];
        let c = saddle_chart(&p, &z).unwrap();
        for (u, v) in [(0.1, 0.2), (-0.3, 0.5), (0.0, 0.0)] {
            let m = c.metric(u, v);
            assert!(m[0].abs() < 1e-12 && m[2].abs() < 1e-12);
            assert!((m[1] + 2.0 / 3.0).abs() < 1e-12);
        }
        let a = solve_affine_ode(&p, &z).unwrap();
        assert!((a.phi(0.7).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rejected() {
        let p = prof("x^2", Domain::Interval { a: -1.0, b: 1.0 });
        let z = find_zeros(&p).unwrap()[0];
        assert!(matches!(saddle_chart(&p, &z), Err(ExtensionError::DegenerateZero { .. })));
        assert!(matches!(solve_affine_ode(&p, &z), Err(ExtensionError::DegenerateZero { .. })));
    }

    #[test]
    fn holonomy_examples() {
        assert_eq!(cylinder_holonomy(2.0, 1.0).unwrap(), 4.0);
        assert_eq!(cylinder_holonomy(1.0, -3.0).unwrap(), 1.0 / 9.0);
        assert!(cylinder_holonomy(0.0, 1.0).is_err());
        assert!(quasi_saddle_completable(2.0, -2.0, 1e-12).unwrap());
        assert!(!quasi_saddle_completable(2.0, 1.0, 1e-12).unwrap());
        let h = quasi_saddle_holonomy(&QuasiSaddleData::from_array([1.0; 8]), 2.0).unwrap();
        assert_eq!(h.eta, 1.0);
        let h = quasi_saddle_holonomy(&QuasiSaddleData::from_array([2., 1., 1., 1., 1., 1., 1., 1.]), 2.0).unwrap();
        assert_eq!(h.eta, 2.0);
        assert!((h.shift - 2f64.ln() / 2.0).abs() < 1e-15);
    }
}
