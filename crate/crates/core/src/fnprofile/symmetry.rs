//! The group `Is(f)` of Euclidean motions of the line preserving `f`, and the
//! representative of `[f]` modulo translations and `x -> -x`.

use std::cmp::Ordering;
use std::fmt;

use super::profile::{Domain, FunctionProfile, ProfileError};
use super::zeros::{components, ComponentSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryCase {
    /// Trivial group.
    C0,
    /// One reflection, fixing no component.
    C1a,
    /// One reflection, fixing a component.
    C1b,
    /// Translations only.
    C2,
    /// Infinite dihedral; the two generating involutions fix no component.
    C3a,
    /// Infinite dihedral; exactly one generating involution fixes a component.
    C3b,
    /// Infinite dihedral; both generating involutions fix a component.
    C3c,
}

impl fmt::Display for SymmetryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SymmetryCase::C0 => "(0)",
            SymmetryCase::C1a => "(1a)",
            SymmetryCase::C1b => "(1b)",
            SymmetryCase::C2 => "(2)",
            SymmetryCase::C3a => "(3a)",
            SymmetryCase::C3b => "(3b)",
            SymmetryCase::C3c => "(3c)",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subtype {
    PairUnilatere,
    PairBilatere,
    Impair,
    NotApplicable,
}

/// Case label refined by subtype, as used by the quotient tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseLabel {
    C0,
    C1a,
    C1b,
    C2PlusU,
    C2PlusB,
    C2Minus,
    C3a,
    C3b,
    C3cPlusU,
    C3cPlusB,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 10] = [
        CaseLabel::C0,
        CaseLabel::C1a,
        CaseLabel::C1b,
        CaseLabel::C2PlusU,
        CaseLabel::C2PlusB,
        CaseLabel::C2Minus,
        CaseLabel::C3a,
        CaseLabel::C3b,
        CaseLabel::C3cPlusU,
        CaseLabel::C3cPlusB,
    ];

    pub fn from_parts(case: SymmetryCase, subtype: Subtype) -> Option<CaseLabel> {
        use SymmetryCase as S;
        use Subtype as T;
        Some(match (case, subtype) {
            (S::C0, _) => CaseLabel::C0,
            (S::C1a, _) => CaseLabel::C1a,
            (S::C1b, _) => CaseLabel::C1b,
            (S::C2, T::PairUnilatere) => CaseLabel::C2PlusU,
            (S::C2, T::PairBilatere) => CaseLabel::C2PlusB,
            (S::C2, T::Impair) => CaseLabel::C2Minus,
            (S::C3a, _) => CaseLabel::C3a,
            (S::C3b, _) => CaseLabel::C3b,
            (S::C3c, T::PairUnilatere) => CaseLabel::C3cPlusU,
            (S::C3c, T::PairBilatere) => CaseLabel::C3cPlusB,
            _ => return None,
        })
    }

    pub fn case(&self) -> SymmetryCase {
        match self {
            CaseLabel::C0 => SymmetryCase::C0,
            CaseLabel::C1a => SymmetryCase::C1a,
            CaseLabel::C1b => SymmetryCase::C1b,
            CaseLabel::C2PlusU | CaseLabel::C2PlusB | CaseLabel::C2Minus => SymmetryCase::C2,
            CaseLabel::C3a => SymmetryCase::C3a,
            CaseLabel::C3b => SymmetryCase::C3b,
            CaseLabel::C3cPlusU | CaseLabel::C3cPlusB => SymmetryCase::C3c,
        }
    }

    pub fn parse(s: &str) -> Option<CaseLabel> {
        let t: String = s.chars().filter(|c| !"(){}^ ".contains(*c)).collect();
        Some(match t.as_str() {
            "0" => CaseLabel::C0,
            "1a" => CaseLabel::C1a,
            "1b" => CaseLabel::C1b,
            "2+u" => CaseLabel::C2PlusU,
            "2+b" => CaseLabel::C2PlusB,
            "2-" => CaseLabel::C2Minus,
            "3a" => CaseLabel::C3a,
            "3b" => CaseLabel::C3b,
            "3c+u" => CaseLabel::C3cPlusU,
            "3c+b" => CaseLabel::C3cPlusB,
            _ => return None,
        })
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::C0 => "(0)",
            CaseLabel::C1a => "(1a)",
            CaseLabel::C1b => "(1b)",
            CaseLabel::C2PlusU => "(2+u)",
            CaseLabel::C2PlusB => "(2+b)",
            CaseLabel::C2Minus => "(2-)",
            CaseLabel::C3a => "(3a)",
            CaseLabel::C3b => "(3b)",
            CaseLabel::C3cPlusU => "(3c+u)",
            CaseLabel::C3cPlusB => "(3c+b)",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryClass {
    pub case: SymmetryCase,
    /// Minimal period, for periodic profiles.
    pub period: Option<f64>,
    /// Fixed points `c` of the reflections `x -> 2c - x` preserving `f`
    /// (within one declared period for periodic profiles).
    pub reflection_centers: Vec<f64>,
    /// Fixed points of the generating involutions (one or two).
    pub generators: Vec<f64>,
    /// Whether each generating involution maps a component of `{f != 0}` to itself.
    pub fixes_component: Vec<bool>,
    pub subtype: Subtype,
}

impl SymmetryClass {
    pub fn label(&self) -> Option<CaseLabel> {
        CaseLabel::from_parts(self.case, self.subtype)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.case, SymmetryCase::C2 | SymmetryCase::C3a | SymmetryCase::C3b | SymmetryCase::C3c)
    }
}

fn validation_tol(p: &FunctionProfile) -> f64 {
    100.0 * p.tol * p.value_scale()
}

fn agrees(p: &FunctionProfile, map: impl Fn(f64) -> f64, tol: f64) -> bool {
    p.grid().iter().all(|&x| {
        let (a, b) = (p.f(x), p.f(map(x)));
        !(a.is_finite() && b.is_finite()) || (a - b).abs() <= tol
    })
}

/// Critical points of `f` in the scan window (sign changes of `f'`).
fn extrema(p: &FunctionProfile) -> Vec<f64> {
    let xs = p.grid();
    let (lo, hi) = p.scan_window();
    let periodic = p.domain.is_periodic();
    let n = xs.len();
    let ds: Vec<f64> = xs.iter().map(|&x| p.df(x)).collect();
    let mut out = Vec::new();
    let pairs = if periodic { n } else { n - 1 };
    for k in 0..pairs {
        let (a, b) = (ds[k], ds[(k + 1) % n]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a == 0.0 {
            out.push(xs[k]);
            continue;
        }
        if b != 0.0 && (a < 0.0) != (b < 0.0) {
            let (mut l, mut r) = (xs[k], if k + 1 < n { xs[k + 1] } else { hi + (xs[0] - lo) });
            let sl = a < 0.0;
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                if m <= l || m >= r {
                    break;
                }
                if (p.df(m) < 0.0) == sl {
                    l = m;
                } else {
                    r = m;
                }
            }
            out.push(0.5 * (l + r));
        }
    }
    out
}

fn dedup_sorted(mut v: Vec<f64>, eps: f64) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        if out.last().is_none_or(|&l| x - l > eps) {
            out.push(x);
        }
    }
    out
}

fn subtype_of(cs: &ComponentSet, period: f64, min_period: f64) -> Subtype {
    if cs.is_elementary() || cs.is_empty() {
        return Subtype::NotApplicable;
    }
    let copies = (period / min_period).round().max(1.0) as usize;
    let per_min = cs.len() / copies;
    if per_min % 2 == 1 {
        return Subtype::Impair;
    }
    let n = cs.len();
    let alternating = (0..n).all(|i| cs.components[i].sign != cs.components[(i + 1) % n].sign);
    if alternating {
        Subtype::PairUnilatere
    } else {
        Subtype::PairBilatere
    }
}

/// Detects the minimal period (among divisors `T/m`, `m <= 64`, of the
/// declared period) and the reflection symmetries of `f`, then assigns the
/// case label and subtype.
pub fn detect_symmetry(p: &FunctionProfile) -> SymmetryClass {
    let cs = components(p);
    let vtol = validation_tol(p);
    let min_period = p.domain.period().map(|t| {
        let mut best = t;
        for m in 2..=64 {
            let s = t / m as f64;
            if agrees(p, |x| x + s, vtol) {
                best = s;
            }
        }
        best
    });

    // Candidate fixed points.
    let mut cands: Vec<f64> = Vec::new();
    match p.domain {
        Domain::Interval { a, b } if a.is_finite() && b.is_finite() => cands.push(0.5 * (a + b)),
        Domain::Interval { a, b } if a.is_finite() || b.is_finite() => {}
        _ => {
            let mut pts: Vec<f64> = cs.zeros.iter().map(|z| z.x0).collect();
            pts.extend(cs.plateaus.iter().map(|&(s, e)| 0.5 * (s + e)));
            if let Some(t) = p.domain.period() {
                let more: Vec<f64> = pts.iter().map(|x| x + t).collect();
                pts.extend(more);
            }
            for i in 0..pts.len() {
                for j in i..pts.len() {
                    cands.push(0.5 * (pts[i] + pts[j]));
                }
            }
            cands.extend(extrema(p));
        }
    }
    let (lo, hi) = p.scan_window();
    let centre = 0.5 * (lo + hi);
    if let Some(tm) = min_period {
        cands = cands.into_iter().map(|c| c.rem_euclid(tm / 2.0)).collect();
    } else {
        cands.sort_by(|a, b| (a - centre).abs().partial_cmp(&(b - centre).abs()).unwrap());
    }
    let eps = 1e-9 * (hi - lo).max(1.0);
    let cands = if min_period.is_some() { dedup_sorted(cands, eps) } else { cands };
    let found = cands.into_iter().find(|&c| agrees(p, |x| 2.0 * c - x, vtol));

    let scale = p.value_scale();
    let fixes = |c: f64| p.f(c).abs() > 100.0 * p.tol * scale;
    match (min_period, found) {
        (None, None) => SymmetryClass {
            case: SymmetryCase::C0,
            period: None,
            reflection_centers: vec![],
            generators: vec![],
            fixes_component: vec![],
            subtype: Subtype::NotApplicable,
        },
        (None, Some(c)) => {
            let fx = fixes(c);
            SymmetryClass {
                case: if fx { SymmetryCase::C1b } else { SymmetryCase::C1a },
                period: None,
                reflection_centers: vec![c],
                generators: vec![c],
                fixes_component: vec![fx],
                subtype: Subtype::NotApplicable,
            }
        }
        (Some(tm), found) => {
            let t = p.domain.period().unwrap();
            let subtype = subtype_of(&cs, t, tm);
            match found {
                None => SymmetryClass {
                    case: SymmetryCase::C2,
                    period: Some(tm),
                    reflection_centers: vec![],
                    generators: vec![],
                    fixes_component: vec![],
                    subtype,
                },
                Some(c0) => {
                    let c1 = c0 + tm / 2.0;
                    let (f0, f1) = (fixes(c0), fixes(c1));
                    let case = match (f0 as u8) + (f1 as u8) {
                        0 => SymmetryCase::C3a,
                        1 => SymmetryCase::C3b,
                        _ => SymmetryCase::C3c,
                    };
                    let steps = (2.0 * t / tm).round() as usize;
                    let centers = (0..steps).map(|j| c0 + j as f64 * tm / 2.0).filter(|&c| c < t).collect();
                    SymmetryClass {
                        case,
                        period: Some(tm),
                        reflection_centers: centers,
                        generators: vec![c0, c1],
                        fixes_component: vec![f0, f1],
                        subtype,
                    }
                }
            }
        }
    }
}

/// A canonical representative of `[f]` under `x -> ±x + b`.
///
/// Every zero of `f` (every point where `f` reaches its maximum, if there is
/// no zero) is moved to the origin, in both orientations; the candidate with
/// the lexicographically largest sampled signature wins, so that `f` is
/// preferred over `-f` when both are available.
pub fn canonical_translate(p: &FunctionProfile) -> Result<FunctionProfile, ProfileError> {
    let cs = components(p);
    let mut anchors: Vec<f64> = cs.zeros.iter().map(|z| z.x0).collect();
    if anchors.is_empty() {
        let xs = p.grid();
        let vals: Vec<f64> = xs.iter().map(|&x| p.f(x)).collect();
        let max = vals.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
        let tol = validation_tol(p);
        anchors = extrema(p).into_iter().filter(|&c| (p.f(c) - max).abs() <= tol + 1e-6 * max.abs()).collect();
        if anchors.is_empty() {
            let k = vals.iter().position(|&v| v == max).unwrap_or(0);
            anchors.push(xs[k]);
        }
    }
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    let tol = validation_tol(p);
    for &z in &anchors {
        for s in [1.0, -1.0] {
            let key = signature(p, s, z);
            let better = match &best {
                None => true,
                Some((bk, _, _)) => cmp_tol(&key, bk, tol) == Ordering::Greater,
            };
            if better {
                best = Some((key, s, z));
            }
        }
    }
    let (_, s, z) = best.expect("at least one anchor");
    transform(p, s, z)
}

/// `x -> f(s x + z)` with the matching domain.
pub fn transform(p: &FunctionProfile, s: f64, z: f64) -> Result<FunctionProfile, ProfileError> {
    let domain = match p.domain {
        Domain::Periodic { period } => Domain::Periodic { period },
        Domain::Interval { a, b } => {
            if s > 0.0 {
                Domain::Interval { a: a - z, b: b - z }
            } else {
                Domain::Interval { a: z - b, b: z - a }
            }
        }
    };
    p.rebuild(p.expr.affine_substitute(s, z), domain)
}

const SIG_N: usize = 1024;

fn signature(p: &FunctionProfile, s: f64, z: f64) -> Vec<f64> {
    let (lo, hi) = match p.domain {
        Domain::Periodic { period } => (0.0, period),
        Domain::Interval { a, b } => {
            let (a2, b2) = if s > 0.0 { (a - z, b - z) } else { (z - b, z - a) };
            let r = p.scan_radius;
            (if a2.is_finite() { a2 } else { b2.min(0.0) - r }, if b2.is_finite() { b2 } else { a2.max(0.0) + r })
        }
    };
    let mut key = vec![lo, hi];
    let h = (hi - lo) / SIG_N as f64;
    for i in 0..SIG_N {
        let x = lo + (i as f64 + 0.5) * h;
        let v = p.f(s * x + z);
        key.push(if v.is_finite() { v } else { 0.0 });
    }
    key
}

fn cmp_tol(a: &[f64], b: &[f64], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn prof(s: &str, d: Domain) -> FunctionProfile {
        FunctionProfile::parse(s, d).unwrap()
    }

    #[test]
    fn sine_is_3c_unilateral() {
        let s = detect_symmetry(&prof("sin(2*x)", Domain::Periodic { period: PI }));
        assert_eq!(s.case, SymmetryCase::C3c);
        assert!((s.period.unwrap() - PI).abs() < 1e-12);
        assert_eq!(s.subtype, Subtype::PairUnilatere);
        assert_eq!(s.label(), Some(CaseLabel::C3cPlusU));
        // Fixed points pi/4 and 3pi/4, i.e. the maps x -> pi/2 - x and x -> 3pi/2 - x.
        let mut c = s.reflection_centers.clone();
        c.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(c.len(), 2);
        assert!((c[0] - PI / 4.0).abs() < 1e-9 && (c[1] - 3.0 * PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn minimal_period_divides_declared_one() {
        let s = detect_symmetry(&prof("sin(2*x)", Domain::Periodic { period: 3.0 * PI }));
        assert!((s.period.unwrap() - PI).abs() < 1e-12);
        assert_eq!(s.label(), Some(CaseLabel::C3cPlusU));
    }

    #[test]
    fn translation_only() {
        let s = detect_symmetry(&prof("2 + sin(2*pi*x) + 0.3*sin(4*pi*x)", Domain::Periodic { period: 1.0 }));
        assert_eq!(s.case, SymmetryCase::C2);
        assert_eq!(s.subtype, Subtype::NotApplicable);
        // The pure sine is symmetric about its maximum at 1/4.
        let s = detect_symmetry(&prof("2 + sin(2*pi*x)", Domain::Periodic { period: 1.0 }));
        assert_eq!(s.case, SymmetryCase::C3c);
        assert_eq!(s.label(), None);
    }

    #[test]
    fn even_square_is_1a() {
        let s = detect_symmetry(&prof("x^2", Domain::Interval { a: -1.0, b: 1.0 }));
        assert_eq!(s.case, SymmetryCase::C1a);
        let s = detect_symmetry(&prof("x^2 - 0.25", Domain::Interval { a: -1.0, b: 1.0 }));
        assert_eq!(s.case, SymmetryCase::C1b);
        let s = detect_symmetry(&prof("x^3 - x", Domain::Interval { a: -2.0, b: 3.0 }));
        assert_eq!(s.case, SymmetryCase::C0);
    }

    #[test]
    fn canonical_examples() {
        let d = Domain::Periodic { period: PI };
        let target = prof("sin(2*x)", d);
        for s in ["sin(2*x-1)", "sin(-2*x)", "sin(2*x)"] {
            let c = canonical_translate(&prof(s, d)).unwrap();
            for i in 0..100 {
                let x = i as f64 * 0.031;
                assert!((c.f(x) - target.f(x)).abs() < 1e-9, "{s}");
            }
        }
        let c = canonical_translate(&target).unwrap();
        assert_eq!(c.expr, target.expr);
    }
}
