//! Classification invariants of compact Lorentzian surfaces with a Killing
//! field: marked tori `(t0, τ, f̄, marks)`, elementary tori, and the two
//! families of Klein bottles.
//!
//! Profiles are stored after mass normalization: `f̄` lives on `R/Z`
//! (on `R/2Z` for [`BottleInvariant2`]). Equality of profiles is decided on
//! a uniform grid, so every comparison carries a tolerance.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::fnprofile::{
    components, parse_profile_config, parse_real, scan, ConfigError, Domain, FunctionExpr, FunctionProfile,
    ProfileError,
};

/// Grid size of the profile signature.
pub const SIGNATURE_N: usize = 1024;
/// Relative tolerance for a mark to sit at a component midpoint.
pub const MARK_TOL: f64 = 1e-7;
/// Relative tolerance for ties between signature samples.
pub const SAMPLE_TOL: f64 = 1e-7;
/// Default tolerance of the equivalence tests.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("t0 must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("tau must lie in [0, t0), got {0}")]
    TauOutOfRange(f64),
    #[error("profile must live on R/{expected}Z, got domain {got}")]
    WrongDomain { expected: f64, got: Domain },
    #[error("profile is constant")]
    Constant,
    #[error("profile has no zero (elementary)")]
    NoZero,
    #[error("profile vanishes near {0}")]
    HasZero(f64),
    #[error("even marking expected, got {0} marks")]
    EvenMarking(usize),
    #[error("odd marking expected, got {0} marks")]
    OddMarking(usize),
    #[error("marks must be sorted, distinct and in [0, {0})")]
    MarksNotSorted(f64),
    #[error("mark {0} is not the midpoint of a component")]
    NotMidpoint(f64),
    #[error("profile is not even: f(x) != f(-x) at x = {0}")]
    NotEven(f64),
    #[error("profile vanishes at the fixed point {0}")]
    FixedPointZero(f64),
    #[error("marking is not invariant under x -> -x")]
    NotSymmetric,
    #[error("mark {0} is missing")]
    MissingFixedMark(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("invalid invariant: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("profile must have a periodic domain")]
    NotPeriodic,
    #[error("elementary torus: no zero, use the elementary invariant")]
    Elementary,
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Elementary moves on representatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Move {
    /// Orientation of the leaf space reversed.
    Flip,
    /// Base point moved to `y`.
    Shift(f64),
    /// Exchange of the two special leaves of a type-2 bottle.
    Swap,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Flip => write!(f, "flip"),
            Move::Shift(y) => write!(f, "shift({y})"),
            Move::Swap => write!(f, "swap"),
        }
    }
}

/// Outcome of an equivalence test.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub equivalent: bool,
    /// Moves taking the first argument to the second.
    pub witness: Option<Vec<Move>>,
    /// Smallest defect over the candidate moves.
    pub defect: f64,
    pub tol: f64,
    /// The decision would change if `tol` moved by a factor 10.
    pub near_threshold: bool,
}

impl Comparison {
    fn from_best(best: Option<(f64, Vec<Move>)>, tol: f64) -> Self {
        let (defect, moves) = best.unwrap_or((f64::INFINITY, Vec::new()));
        let equivalent = defect <= tol;
        Comparison {
            equivalent,
            witness: equivalent.then_some(moves),
            defect,
            tol,
            near_threshold: defect.is_finite() && defect > tol / 10.0 && defect <= tol * 10.0,
        }
    }
}

// ---------------------------------------------------------------- helpers

fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period { 0.0 } else { r }
}

/// Like [`wrap`] but snaps values within `eps` of the period to 0.
fn wrap_snap(x: f64, period: f64, eps: f64) -> f64 {
    let r = wrap(x, period);
    if period - r <= eps * period { 0.0 } else { r }
}

fn cyclic_dist(a: f64, b: f64, period: f64) -> f64 {
    let d = wrap(a - b, period);
    d.min(period - d)
}

fn normalize_marks(marks: &mut Vec<f64>, period: f64) {
    for m in marks.iter_mut() {
        *m = wrap_snap(*m, period, 1e-12);
    }
    marks.sort_by(|a, b| a.total_cmp(b));
}

/// Hausdorff distance between two marks sets on the circle.
fn marks_dist(a: &[f64], b: &[f64], period: f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one = |u: &[f64], v: &[f64]| {
        u.iter().map(|&x| v.iter().map(|&y| cyclic_dist(x, y, period)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

fn substituted(p: &FunctionProfile, s: f64, b: f64) -> FunctionProfile {
    let expr = p.expr.affine_substitute(s, b);
    // Moves preserve periodicity; skip the checks if rounding trips them.
    match p.rebuild(expr.clone(), p.domain) {
        Ok(q) => q,
        Err(_) => {
            let d1 = expr.derivative();
            FunctionProfile { d2: d1.derivative(), d1, expr, ..p.clone() }
        }
    }
}

fn period_of(p: &FunctionProfile) -> Option<f64> {
    p.domain.period()
}

/// `f` sampled at `period * i / n`.
pub fn signature(p: &FunctionProfile, n: usize) -> Vec<f64> {
    let t = period_of(p).unwrap_or(1.0);
    (0..n).map(|i| p.f(t * i as f64 / n as f64)).collect()
}

fn cmp_tol(a: &[f64], b: &[f64], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x.total_cmp(y);
        }
    }
    a.len().cmp(&b.len())
}

fn sample_defect(a: &FunctionProfile, b: &FunctionProfile) -> f64 {
    let sa = signature(a, SIGNATURE_N);
    let sb = signature(b, SIGNATURE_N);
    let scale = sa.iter().chain(&sb).map(|v| v.abs()).fold(1.0, f64::max);
    sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Zeros and plateau starts in `[0, period)`.
fn anchors(p: &FunctionProfile) -> Vec<f64> {
    let t = period_of(p).unwrap_or(1.0);
    let s = scan(p);
    let mut v: Vec<f64> = s.zeros.iter().map(|z| z.x0).chain(s.plateaus.iter().map(|pl| pl.0)).map(|x| wrap(x, t)).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Positions of the global maximum, refined on `f'`.
fn argmax_anchors(p: &FunctionProfile) -> Vec<f64> {
    let t = period_of(p).unwrap_or(1.0);
    let n = p.grid_n;
    let h = t / n as f64;
    let fs: Vec<f64> = (0..n).map(|i| p.f(i as f64 * h)).collect();
    let m = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = p.value_scale();
    let mut out = Vec::new();
    for i in 0..n {
        let (prev, next) = (fs[(i + n - 1) % n], fs[(i + 1) % n]);
        if fs[i] >= prev && fs[i] >= next && fs[i] >= m - 1e-6 * scale {
            let (mut lo, mut hi) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
            let x = if p.df(lo) > 0.0 && p.df(hi) < 0.0 {
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if p.df(mid) > 0.0 { lo = mid } else { hi = mid }
                }
                0.5 * (lo + hi)
            } else {
                i as f64 * h
            };
            let x = wrap(x, t);
            if out.iter().all(|&y| cyclic_dist(x, y, t) > 4.0 * h) {
                out.push(x);
            }
        }
    }
    out
}

fn check_t0(t0: f64, out: &mut Vec<Violation>) {
    if !(t0 > 0.0 && t0.is_finite()) {
        out.push(Violation::BadPeriod(t0));
    }
}

fn check_tau(t0: f64, tau: f64, out: &mut Vec<Violation>) {
    if !(tau >= 0.0 && tau < t0) {
        out.push(Violation::TauOutOfRange(tau));
    }
}

/// Checks the domain is `R/period Z`; returns false when later checks are pointless.
fn check_domain(p: &FunctionProfile, period: f64, out: &mut Vec<Violation>) -> bool {
    match p.domain.period() {
        Some(t) if (t - period).abs() <= 1e-12 * period => true,
        _ => {
            out.push(Violation::WrongDomain { expected: period, got: p.domain });
            false
        }
    }
}

/// Non-constant and vanishing.
fn check_vanishing(p: &FunctionProfile, out: &mut Vec<Violation>) {
    if p.is_constant() {
        out.push(Violation::Constant);
    } else if components(p).is_elementary() {
        out.push(Violation::NoZero);
    }
}

fn check_marks(p: &FunctionProfile, marks: &[f64], period: f64, out: &mut Vec<Violation>) {
    let sorted = marks.iter().all(|m| (0.0..period).contains(m)) && marks.windows(2).all(|w| w[0] < w[1]);
    if !sorted {
        out.push(Violation::MarksNotSorted(period));
    }
    let cs = components(p);
    let mids: Vec<f64> = cs.components.iter().filter(|c| c.is_interior()).map(|c| wrap(c.midpoint(), period)).collect();
    for &m in marks {
        if !mids.iter().any(|&c| cyclic_dist(c, m, period) <= MARK_TOL * period) {
            out.push(Violation::NotMidpoint(m));
        }
    }
}

/// Rescales a periodic profile to the given period: `x = a u`, `f̄(u) = f(a u) / a²`.
pub fn normalize_period(p: &FunctionProfile, target: f64) -> Result<(FunctionProfile, f64), ClassifyError> {
    let t = p.domain.period().ok_or(ClassifyError::NotPeriodic)?;
    let a = t / target;
    if a == 1.0 {
        return Ok((p.clone(), 1.0));
    }
    let inner = FunctionExpr::mul(FunctionExpr::constant(a), FunctionExpr::x());
    let expr = FunctionExpr::mul(FunctionExpr::constant(1.0 / (a * a)), p.expr.substitute(&inner));
    Ok((p.rebuild(expr, Domain::Periodic { period: target })?, a))
}

fn into_result<T>(inv: T, v: Vec<Violation>) -> Result<T, ClassifyError> {
    if v.is_empty() { Ok(inv) } else { Err(ClassifyError::Invalid(v)) }
}

// ---------------------------------------------------------------- tori

/// Invariant `(t0, τ, f̄, {x_1, …, x_2k})` of a marked non-elementary torus.
#[derive(Clone, Debug)]
pub struct TorusInvariant {
    pub t0: f64,
    /// Representative in `[0, t0)`.
    pub tau: f64,
    /// Profile on `R/Z`.
    pub fbar: FunctionProfile,
    /// Sorted, in `[0, 1)`.
    pub marks: Vec<f64>,
}

/// Invariant `(t0, τ, f̄)` of an elementary (or flat) torus.
#[derive(Clone, Debug)]
pub struct ElementaryInvariant {
    pub t0: f64,
    pub tau: f64,
    pub fbar: FunctionProfile,
}

/// Klein bottle whose special leaves are light: odd marking of `f̄` on `R/Z`.
#[derive(Clone, Debug)]
pub struct BottleInvariant1 {
    pub t0: f64,
    pub fbar: FunctionProfile,
    pub marks: Vec<f64>,
}

/// Klein bottle with two fixed leaves: even `f̄` on `R/2Z` and a symmetric
/// marking containing 0 and 1.
#[derive(Clone, Debug)]
pub struct BottleInvariant2 {
    pub t0: f64,
    pub fbar: FunctionProfile,
    /// Sorted, in `[0, 2)`.
    pub marks: Vec<f64>,
}

pub fn validate_torus(inv: &TorusInvariant) -> Vec<Violation> {
    let mut v = Vec::new();
    check_t0(inv.t0, &mut v);
    check_tau(inv.t0, inv.tau, &mut v);
    if check_domain(&inv.fbar, 1.0, &mut v) {
        check_vanishing(&inv.fbar, &mut v);
        if inv.marks.len() % 2 != 0 {
            v.push(Violation::EvenMarking(inv.marks.len()));
        }
        check_marks(&inv.fbar, &inv.marks, 1.0, &mut v);
    }
    v
}

pub fn validate_elementary(inv: &ElementaryInvariant) -> Vec<Violation> {
    let mut v = Vec::new();
    check_t0(inv.t0, &mut v);
    check_tau(inv.t0, inv.tau, &mut v);
    if check_domain(&inv.fbar, 1.0, &mut v) && !inv.fbar.is_constant() {
        let s = scan(&inv.fbar);
        if let Some(x) = s.zeros.iter().map(|z| z.x0).chain(s.plateaus.iter().map(|p| p.0)).next() {
            v.push(Violation::HasZero(x));
        }
    }
    v
}

pub fn validate_bottle1(inv: &BottleInvariant1) -> Vec<Violation> {
    let mut v = Vec::new();
    check_t0(inv.t0, &mut v);
    if check_domain(&inv.fbar, 1.0, &mut v) {
        check_vanishing(&inv.fbar, &mut v);
        if inv.marks.len() % 2 != 1 {
            v.push(Violation::OddMarking(inv.marks.len()));
        }
        check_marks(&inv.fbar, &inv.marks, 1.0, &mut v);
    }
    v
}

pub fn validate_bottle2(inv: &BottleInvariant2) -> Vec<Violation> {
    let mut v = Vec::new();
    check_t0(inv.t0, &mut v);
    if !check_domain(&inv.fbar, 2.0, &mut v) {
        return v;
    }
    let p = &inv.fbar;
    check_vanishing(p, &mut v);
    let thr = 100.0 * p.tol * p.value_scale();
    if let Some(x) = p.grid().into_iter().find(|&x| (p.f(x) - p.f(-x)).abs() > thr) {
        v.push(Violation::NotEven(x));
    }
    for c in [0.0, 1.0] {
        if p.f(c).abs() <= thr {
            v.push(Violation::FixedPointZero(c));
        }
        if !inv.marks.iter().any(|&m| cyclic_dist(m, c, 2.0) <= MARK_TOL * 2.0) {
            v.push(Violation::MissingFixedMark(c));
        }
    }
    let mirrored: Vec<f64> = inv.marks.iter().map(|&m| wrap(-m, 2.0)).collect();
    if marks_dist(&inv.marks, &mirrored, 2.0) > MARK_TOL * 2.0 {
        v.push(Violation::NotSymmetric);
    }
    check_marks(p, &inv.marks, 2.0, &mut v);
    v
}

impl TorusInvariant {
    /// Normalizes `tau` and the marks, then validates.
    pub fn new(t0: f64, tau: f64, fbar: FunctionProfile, mut marks: Vec<f64>) -> Result<Self, ClassifyError> {
        normalize_marks(&mut marks, 1.0);
        let inv = TorusInvariant { t0, tau: wrap_snap(tau, t0, 1e-12), fbar, marks };
        let v = validate_torus(&inv);
        into_result(inv, v)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_torus(self)
    }

    /// `ν -> -ν`: `τ -> -τ`, `f̄ -> f̄(-x)`, marks `x -> 1 - x`.
    pub fn flip(&self) -> Self {
        let mut marks: Vec<f64> = self.marks.iter().map(|&m| 1.0 - m).collect();
        normalize_marks(&mut marks, 1.0);
        TorusInvariant {
            t0: self.t0,
            tau: wrap_snap(-self.tau, self.t0, 1e-12),
            fbar: substituted(&self.fbar, -1.0, 0.0),
            marks,
        }
    }

    /// Base point moved to `y`: `f̄ -> f̄(· + y)`, marks `x -> x - y`,
    /// `τ -> (-1)^i τ` with `i` the number of marks in `[0, y]`.
    /// Number of marks in `[0, y]` (reduced mod 1), which fixes the sign of `τ` after a shift.
    pub fn crossed_marks(&self, y: f64) -> usize {
        let r = wrap(y, 1.0);
        self.marks.iter().filter(|&&m| m <= r).count()
    }

    pub fn shift(&self, y: f64) -> Self {
        let i = self.crossed_marks(y);
        let mut marks: Vec<f64> = self.marks.iter().map(|&m| m - y).collect();
        normalize_marks(&mut marks, 1.0);
        let tau = if i % 2 == 1 { wrap_snap(-self.tau, self.t0, 1e-12) } else { self.tau };
        TorusInvariant { t0: self.t0, tau, fbar: substituted(&self.fbar, 1.0, y), marks }
    }

    pub fn apply(&self, m: &Move) -> Self {
        match m {
            Move::Flip => self.flip(),
            Move::Shift(y) => self.shift(*y),
            Move::Swap => self.clone(),
        }
    }

    /// Largest relative discrepancy between two representatives.
    pub fn defect(&self, other: &Self) -> f64 {
        let tau = cyclic_dist(self.tau, other.tau, self.t0.max(other.t0)) / self.t0.max(other.t0);
        [rel_diff(self.t0, other.t0), tau, sample_defect(&self.fbar, &other.fbar), marks_dist(&self.marks, &other.marks, 1.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.defect(other) <= tol
    }

    /// Key of `self.shift(y)` without building the shifted profile.
    fn shifted_key(&self, y: f64) -> TorusKey {
        let n = SIGNATURE_N;
        let samples = (0..n).map(|i| self.fbar.f(i as f64 / n as f64 + y)).collect();
        let mut marks: Vec<f64> = self.marks.iter().map(|&m| m - y).collect();
        normalize_marks(&mut marks, 1.0);
        let tau = if self.crossed_marks(y) % 2 == 1 { wrap_snap(-self.tau, self.t0, 1e-12) } else { self.tau };
        TorusKey { samples, marks, tau, sample_tol: SAMPLE_TOL * self.fbar.value_scale(), t0: self.t0 }
    }
}

/// Searches orientation × zero-aligning shifts for a move taking `a` to `b`.
pub fn compare_tori(a: &TorusInvariant, b: &TorusInvariant, tol: f64) -> Comparison {
    let Some(&zb) = anchors(&b.fbar).first() else {
        return Comparison::from_best(Some((a.defect(b), Vec::new())), tol);
    };
    let mut best: Option<(f64, Vec<Move>)> = None;
    for flip in [false, true] {
        let base = if flip { a.flip() } else { a.clone() };
        for z in anchors(&base.fbar) {
            let y = z - zb;
            let d = base.shift(y).defect(b);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                let mut w = if flip { vec![Move::Flip] } else { Vec::new() };
                w.push(Move::Shift(y));
                best = Some((d, w));
            }
        }
    }
    Comparison::from_best(best, tol)
}

pub fn equivalent_tori(a: &TorusInvariant, b: &TorusInvariant, tol: f64) -> bool {
    compare_tori(a, b, tol).equivalent
}

/// Minimal representative over both orientations and all zero-aligning shifts.
pub fn canonical_torus(inv: &TorusInvariant) -> Result<TorusInvariant, ClassifyError> {
    if components(&inv.fbar).is_elementary() {
        return Err(ClassifyError::Elementary);
    }
    // Candidates are compared on sampled data; only the winner is built.
    let mut best: Option<(TorusKey, bool, f64)> = None;
    let flipped = inv.flip();
    for (flip, base) in [(false, inv), (true, &flipped)] {
        for z in anchors(&base.fbar) {
            let key = base.shifted_key(z);
            if best.as_ref().is_none_or(|(b, _, _)| key.cmp(b) == Ordering::Less) {
                best = Some((key, flip, z));
            }
        }
    }
    let (_, flip, z) = best.ok_or(ClassifyError::Elementary)?;
    Ok(if flip { flipped.shift(z) } else { inv.shift(z) })
}

/// Sort key of a torus representative: samples of `f̄`, marks, then `τ`.
struct TorusKey {
    samples: Vec<f64>,
    marks: Vec<f64>,
    tau: f64,
    sample_tol: f64,
    t0: f64,
}

impl TorusKey {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_tol(&self.samples, &other.samples, self.sample_tol)
            .then_with(|| cmp_tol(&self.marks, &other.marks, MARK_TOL))
            .then_with(|| cmp_tol(&[self.tau], &[other.tau], 1e-9 * self.t0))
    }
}

/// Builds a torus invariant from a periodic profile of any period `T`,
/// rescaling to mass 1: `f̄(u) = f(Tu)/T²`, and `t0`, `τ`, marks accordingly.
pub fn build_torus(profile: &FunctionProfile, t0: f64, tau: f64, marks: &[f64]) -> Result<TorusInvariant, ClassifyError> {
    let (fbar, a) = normalize_period(profile, 1.0)?;
    if components(&fbar).is_elementary() {
        return Err(ClassifyError::Elementary);
    }
    let t0 = a * t0;
    TorusInvariant::new(t0, wrap(a * tau, t0), fbar, marks.iter().map(|m| m / a).collect())
}

// ---------------------------------------------------------------- elementary

impl ElementaryInvariant {
    pub fn new(t0: f64, tau: f64, fbar: FunctionProfile) -> Result<Self, ClassifyError> {
        let inv = ElementaryInvariant { t0, tau: wrap_snap(tau, t0, 1e-12), fbar };
        let v = validate_elementary(&inv);
        into_result(inv, v)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_elementary(self)
    }

    pub fn flip(&self) -> Self {
        ElementaryInvariant { t0: self.t0, tau: wrap_snap(-self.tau, self.t0, 1e-12), fbar: substituted(&self.fbar, -1.0, 0.0) }
    }

    pub fn shift(&self, y: f64) -> Self {
        ElementaryInvariant { t0: self.t0, tau: self.tau, fbar: substituted(&self.fbar, 1.0, y) }
    }

    pub fn apply(&self, m: &Move) -> Self {
        match m {
            Move::Flip => self.flip(),
            Move::Shift(y) => self.shift(*y),
            Move::Swap => self.clone(),
        }
    }

    pub fn defect(&self, other: &Self) -> f64 {
        let t = self.t0.max(other.t0);
        [rel_diff(self.t0, other.t0), cyclic_dist(self.tau, other.tau, t) / t, sample_defect(&self.fbar, &other.fbar)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Flip and shift, anchored at the maxima of `f̄`.
pub fn compare_elementary(a: &ElementaryInvariant, b: &ElementaryInvariant, tol: f64) -> Comparison {
    let mut best: Option<(f64, Vec<Move>)> = None;
    let mut consider = |d: f64, w: Vec<Move>| {
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, w));
        }
    };
    let flat = a.fbar.is_constant() && b.fbar.is_constant();
    let anchor_b = if flat { None } else { argmax_anchors(&b.fbar).first().copied() };
    for flip in [false, true] {
        let base = if flip { a.flip() } else { a.clone() };
        let pre = if flip { vec![Move::Flip] } else { Vec::new() };
        match anchor_b {
            None => consider(base.defect(b), pre),
            Some(zb) => {
                for z in argmax_anchors(&base.fbar) {
                    let mut w = pre.clone();
                    w.push(Move::Shift(z - zb));
                    consider(base.shift(z - zb).defect(b), w);
                }
            }
        }
    }
    Comparison::from_best(best, tol)
}

/// Minimal representative over both orientations and the maxima of `f̄`;
/// a flat profile only normalizes the sign of `τ`.
pub fn canonical_elementary(inv: &ElementaryInvariant) -> ElementaryInvariant {
    let key = |e: &ElementaryInvariant, o: &ElementaryInvariant| {
        let scale = e.fbar.value_scale();
        cmp_tol(&signature(&e.fbar, SIGNATURE_N), &signature(&o.fbar, SIGNATURE_N), SAMPLE_TOL * scale)
            .then_with(|| cmp_tol(&[e.tau], &[o.tau], 1e-9 * e.t0))
    };
    let mut best: Option<ElementaryInvariant> = None;
    for flip in [false, true] {
        let base = if flip { inv.flip() } else { inv.clone() };
        let cands: Vec<ElementaryInvariant> = if base.fbar.is_constant() {
            vec![base]
        } else {
            argmax_anchors(&base.fbar).into_iter().map(|z| base.shift(z)).collect()
        };
        for c in cands {
            if best.as_ref().is_none_or(|b| key(&c, b) == Ordering::Less) {
                best = Some(c);
            }
        }
    }
    best.unwrap_or_else(|| inv.clone())
}

pub fn equivalent_elementary(a: &ElementaryInvariant, b: &ElementaryInvariant, tol: f64) -> bool {
    compare_elementary(a, b, tol).equivalent
}

pub fn build_elementary(profile: &FunctionProfile, t0: f64, tau: f64) -> Result<ElementaryInvariant, ClassifyError> {
    let (fbar, a) = normalize_period(profile, 1.0)?;
    let t0 = a * t0;
    ElementaryInvariant::new(t0, wrap(a * tau, t0), fbar)
}

// ---------------------------------------------------------------- bottles

impl BottleInvariant1 {
    pub fn new(t0: f64, fbar: FunctionProfile, mut marks: Vec<f64>) -> Result<Self, ClassifyError> {
        normalize_marks(&mut marks, 1.0);
        let inv = BottleInvariant1 { t0, fbar, marks };
        let v = validate_bottle1(&inv);
        into_result(inv, v)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_bottle1(self)
    }

    pub fn flip(&self) -> Self {
        let mut marks: Vec<f64> = self.marks.iter().map(|&m| 1.0 - m).collect();
        normalize_marks(&mut marks, 1.0);
        BottleInvariant1 { t0: self.t0, fbar: substituted(&self.fbar, -1.0, 0.0), marks }
    }

    pub fn shift(&self, y: f64) -> Self {
        let mut marks: Vec<f64> = self.marks.iter().map(|&m| m - y).collect();
        normalize_marks(&mut marks, 1.0);
        BottleInvariant1 { t0: self.t0, fbar: substituted(&self.fbar, 1.0, y), marks }
    }

    pub fn apply(&self, m: &Move) -> Self {
        match m {
            Move::Flip => self.flip(),
            Move::Shift(y) => self.shift(*y),
            Move::Swap => self.clone(),
        }
    }

    pub fn defect(&self, other: &Self) -> f64 {
        [rel_diff(self.t0, other.t0), sample_defect(&self.fbar, &other.fbar), marks_dist(&self.marks, &other.marks, 1.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        let scale = self.fbar.value_scale();
        cmp_tol(&signature(&self.fbar, SIGNATURE_N), &signature(&other.fbar, SIGNATURE_N), SAMPLE_TOL * scale)
            .then_with(|| cmp_tol(&self.marks, &other.marks, MARK_TOL))
    }
}

pub fn compare_bottles1(a: &BottleInvariant1, b: &BottleInvariant1, tol: f64) -> Comparison {
    let Some(&zb) = anchors(&b.fbar).first() else {
        return Comparison::from_best(Some((a.defect(b), Vec::new())), tol);
    };
    let mut best: Option<(f64, Vec<Move>)> = None;
    for flip in [false, true] {
        let base = if flip { a.flip() } else { a.clone() };
        for z in anchors(&base.fbar) {
            let d = base.shift(z - zb).defect(b);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                let mut w = if flip { vec![Move::Flip] } else { Vec::new() };
                w.push(Move::Shift(z - zb));
                best = Some((d, w));
            }
        }
    }
    Comparison::from_best(best, tol)
}

pub fn equivalent_bottles1(a: &BottleInvariant1, b: &BottleInvariant1, tol: f64) -> bool {
    compare_bottles1(a, b, tol).equivalent
}

pub fn canonical_bottle1(inv: &BottleInvariant1) -> Result<BottleInvariant1, ClassifyError> {
    let mut best: Option<BottleInvariant1> = None;
    for flip in [false, true] {
        let base = if flip { inv.flip() } else { inv.clone() };
        for z in anchors(&base.fbar) {
            let c = base.shift(z);
            if best.as_ref().is_none_or(|b| c.key_cmp(b) == Ordering::Less) {
                best = Some(c);
            }
        }
    }
    best.ok_or(ClassifyError::Elementary)
}

pub fn build_bottle1(profile: &FunctionProfile, t0: f64, marks: &[f64]) -> Result<BottleInvariant1, ClassifyError> {
    let (fbar, a) = normalize_period(profile, 1.0)?;
    BottleInvariant1::new(a * t0, fbar, marks.iter().map(|m| m / a).collect())
}

impl BottleInvariant2 {
    pub fn new(t0: f64, fbar: FunctionProfile, mut marks: Vec<f64>) -> Result<Self, ClassifyError> {
        normalize_marks(&mut marks, 2.0);
        let inv = BottleInvariant2 { t0, fbar, marks };
        let v = validate_bottle2(&inv);
        into_result(inv, v)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_bottle2(self)
    }

    /// `f̄ -> f̄(1 - x)`, marks `x -> 1 - x` (mod 2).
    pub fn swap(&self) -> Self {
        let mut marks: Vec<f64> = self.marks.iter().map(|&m| 1.0 - m).collect();
        normalize_marks(&mut marks, 2.0);
        BottleInvariant2 { t0: self.t0, fbar: substituted(&self.fbar, -1.0, 1.0), marks }
    }

    pub fn apply(&self, m: &Move) -> Self {
        match m {
            Move::Swap => self.swap(),
            _ => self.clone(),
        }
    }

    pub fn defect(&self, other: &Self) -> f64 {
        [rel_diff(self.t0, other.t0), sample_defect(&self.fbar, &other.fbar), marks_dist(&self.marks, &other.marks, 2.0) / 2.0]
            .into_iter()
            .fold(0.0, f64::max)
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        let scale = self.fbar.value_scale();
        cmp_tol(&signature(&self.fbar, SIGNATURE_N), &signature(&other.fbar, SIGNATURE_N), SAMPLE_TOL * scale)
            .then_with(|| cmp_tol(&self.marks, &other.marks, MARK_TOL))
    }
}

pub fn compare_bottles2(a: &BottleInvariant2, b: &BottleInvariant2, tol: f64) -> Comparison {
    let d0 = a.defect(b);
    let d1 = a.swap().defect(b);
    let best = if d0 <= d1 { (d0, Vec::new()) } else { (d1, vec![Move::Swap]) };
    Comparison::from_best(Some(best), tol)
}

pub fn equivalent_bottles2(a: &BottleInvariant2, b: &BottleInvariant2, tol: f64) -> bool {
    compare_bottles2(a, b, tol).equivalent
}

pub fn canonical_bottle2(inv: &BottleInvariant2) -> BottleInvariant2 {
    let s = inv.swap();
    if s.key_cmp(inv) == Ordering::Less { s } else { inv.clone() }
}

/// Builds from an even periodic profile, rescaled to period 2.
pub fn build_bottle2(profile: &FunctionProfile, t0: f64, marks: &[f64]) -> Result<BottleInvariant2, ClassifyError> {
    let (fbar, a) = normalize_period(profile, 2.0)?;
    BottleInvariant2::new(a * t0, fbar, marks.iter().map(|m| m / a).collect())
}

// ---------------------------------------------------------------- text format

/// Any of the four invariants, as read from text.
#[derive(Clone, Debug)]
pub enum Invariant {
    Torus(TorusInvariant),
    Elementary(ElementaryInvariant),
    Bottle1(BottleInvariant1),
    Bottle2(BottleInvariant2),
}

impl Invariant {
    pub fn kind(&self) -> &'static str {
        match self {
            Invariant::Torus(_) => "torus",
            Invariant::Elementary(_) => "elementary",
            Invariant::Bottle1(_) => "bottle1",
            Invariant::Bottle2(_) => "bottle2",
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Invariant::Torus(i) => validate_torus(i),
            Invariant::Elementary(i) => validate_elementary(i),
            Invariant::Bottle1(i) => validate_bottle1(i),
            Invariant::Bottle2(i) => validate_bottle2(i),
        }
    }

    pub fn t0(&self) -> f64 {
        match self {
            Invariant::Torus(i) => i.t0,
            Invariant::Elementary(i) => i.t0,
            Invariant::Bottle1(i) => i.t0,
            Invariant::Bottle2(i) => i.t0,
        }
    }

    pub fn fbar(&self) -> &FunctionProfile {
        match self {
            Invariant::Torus(i) => &i.fbar,
            Invariant::Elementary(i) => &i.fbar,
            Invariant::Bottle1(i) => &i.fbar,
            Invariant::Bottle2(i) => &i.fbar,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match self {
            Invariant::Torus(i) => Some(i.tau),
            Invariant::Elementary(i) => Some(i.tau),
            _ => None,
        }
    }

    pub fn marks(&self) -> &[f64] {
        match self {
            Invariant::Torus(i) => &i.marks,
            Invariant::Bottle1(i) => &i.marks,
            Invariant::Bottle2(i) => &i.marks,
            Invariant::Elementary(_) => &[],
        }
    }

    /// Text block; floats use the shortest round-tripping form.
    pub fn to_text(&self) -> String {
        let mut s = format!("type = {}\nt0 = {}\n", self.kind(), self.t0());
        if let Some(tau) = self.tau() {
            s.push_str(&format!("tau = {tau}\n"));
        }
        s.push_str(&self.fbar().to_config());
        if !matches!(self, Invariant::Elementary(_)) {
            let m: Vec<String> = self.marks().iter().map(|x| format!("{x}")).collect();
            s.push_str(&format!("marks = [{}]\n", m.join(", ")));
        }
        s
    }

    /// Parses a text block without validating it.
    pub fn from_text(text: &str) -> Result<Self, ClassifyError> {
        let (fbar, rest) = parse_profile_config(text)?;
        let (mut kind, mut t0, mut tau, mut marks) = (None, None, None, None);
        for (line, k, v) in rest {
            match k.as_str() {
                "type" => kind = Some((line, v)),
                "t0" => t0 = Some(parse_real(&v, line)?),
                "tau" => tau = Some(parse_real(&v, line)?),
                "marks" => marks = Some(parse_marks(&v, line)?),
                _ => return Err(ClassifyError::Syntax { line, message: format!("unknown key `{k}`") }),
            }
        }
        let (line, kind) = kind.ok_or(ClassifyError::MissingKey("type"))?;
        let t0 = t0.ok_or(ClassifyError::MissingKey("t0"))?;
        let need_marks = || marks.clone().ok_or(ClassifyError::MissingKey("marks"));
        Ok(match kind.as_str() {
            "torus" => Invariant::Torus(TorusInvariant {
                t0,
                tau: tau.ok_or(ClassifyError::MissingKey("tau"))?,
                fbar,
                marks: need_marks()?,
            }),
            "elementary" => {
                Invariant::Elementary(ElementaryInvariant { t0, tau: tau.ok_or(ClassifyError::MissingKey("tau"))?, fbar })
            }
            "bottle1" => Invariant::Bottle1(BottleInvariant1 { t0, fbar, marks: need_marks()? }),
            "bottle2" => Invariant::Bottle2(BottleInvariant2 { t0, fbar, marks: need_marks()? }),
            other => return Err(ClassifyError::Syntax { line, message: format!("unknown type `{other}`") }),
        })
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `[x1, x2, ...]`; entries may be constant expressions.
pub fn parse_marks(text: &str, line: usize) -> Result<Vec<f64>, ClassifyError> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| ClassifyError::Syntax { line, message: format!("marks must be `[x1, ...]`, got `{text}`") })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|s| parse_real(s.trim(), line).map_err(ClassifyError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine() -> FunctionProfile {
        FunctionProfile::parse("sin(2*pi*x)", Domain::Periodic { period: 1.0 }).unwrap()
    }

    #[test]
    fn midpoint_marks_validate() {
        let t = TorusInvariant::new(1.0, 0.3, sine(), vec![0.25, 0.75]).unwrap();
        assert!(t.validate().is_empty());
        let odd = TorusInvariant { marks: vec![0.25], ..t.clone() };
        assert!(odd.validate().iter().any(|v| v.to_string().contains("even marking")));
        let off = TorusInvariant { marks: vec![0.2, 0.75], ..t };
        assert!(off.validate().contains(&Violation::NotMidpoint(0.2)));
    }

    #[test]
    fn shift_across_one_mark_negates_tau() {
        let t = TorusInvariant::new(2.0, 0.6, sine(), vec![0.25]).unwrap_err();
        assert!(matches!(t, ClassifyError::Invalid(_)));
        let t = TorusInvariant::new(2.0, 0.6, sine(), vec![0.25, 0.75]).unwrap();
        let s = t.shift(0.5);
        assert!((s.tau - 1.4).abs() < 1e-12);
        assert_eq!(s.marks.len(), 2);
        assert!((s.marks[0] - 0.25).abs() < 1e-12 && (s.marks[1] - 0.75).abs() < 1e-12);
        assert!(equivalent_tori(&t, &s, 1e-6));
        let wrong = TorusInvariant { tau: 0.6, ..s };
        assert!(!equivalent_tori(&t, &wrong, 1e-6));
    }

    #[test]
    fn build_normalizes_mass() {
        let p = FunctionProfile::parse("sin(2*x)", Domain::Periodic { period: std::f64::consts::PI }).unwrap();
        let pi = std::f64::consts::PI;
        let t = build_torus(&p, 1.0, 0.25, &[pi / 4.0, 3.0 * pi / 4.0]).unwrap();
        assert!((t.t0 - pi).abs() < 1e-12);
        assert!((t.marks[0] - 0.25).abs() < 1e-12);
        assert!((t.fbar.f(0.125) - (pi / 4.0).sin() / (pi * pi)).abs() < 1e-14);
        assert!(build_torus(&p, 1.0, 0.0, &[0.5]).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let t = TorusInvariant::new(1.0 / 3.0, 0.1, sine(), vec![0.25, 0.75]).unwrap().shift(0.123456789);
        let inv = Invariant::Torus(t.clone());
        let back = Invariant::from_text(&inv.to_text()).unwrap();
        let Invariant::Torus(b) = back else { panic!() };
        assert_eq!(b.t0.to_bits(), t.t0.to_bits());
        assert_eq!(b.tau.to_bits(), t.tau.to_bits());
        assert_eq!(b.marks, t.marks);
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert_eq!(b.fbar.f(x).to_bits(), t.fbar.f(x).to_bits());
        }
    }

    #[test]
    fn bottle2_swap() {
        let p = FunctionProfile::parse("cos(pi*x) + 0.5*cos(2*pi*x) - 0.2", Domain::Periodic { period: 2.0 }).unwrap();
        let cs = components(&p);
        let mids: Vec<f64> = cs.components.iter().map(|c| wrap(c.midpoint(), 2.0)).collect();
        let b = BottleInvariant2::new(1.0, p, mids.clone()).unwrap();
        let s = b.swap();
        assert!(s.validate().is_empty(), "{:?}", s.validate());
        assert!(equivalent_bottles2(&b, &s, 1e-6));
        assert!(s.swap().defect(&b) < 1e-12);
    }
}
