//! Zeros of `f`, the components of `{f != 0}` and the contiguity graph.

use thiserror::Error;

use super::profile::{Domain, FunctionProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZeroKind {
    Simple,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub x0: f64,
    pub kind: ZeroKind,
    /// `f'(x0)`.
    pub lambda: f64,
}

impl Zero {
    pub fn is_simple(&self) -> bool {
        self.kind == ZeroKind::Simple
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroError {
    #[error("f vanishes on the whole subinterval [{start}, {end}]")]
    ZeroPlateau { start: f64, end: f64 },
}

/// What bounds a component on one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Index into [`ComponentSet::zeros`].
    Zero(usize),
    /// Index into [`ComponentSet::plateaus`].
    Plateau(usize),
    DomainEnd,
    /// Periodic profile without zeros: the component is the whole circle.
    Seam,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Component {
    pub left: f64,
    pub right: f64,
    pub sign: i8,
    pub left_end: Boundary,
    pub right_end: Boundary,
}

impl Component {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    /// Finite point used to read the sign and place marks.
    pub fn midpoint(&self) -> f64 {
        match (self.left.is_finite(), self.right.is_finite()) {
            (true, true) => 0.5 * (self.left + self.right),
            (true, false) => self.left + 1.0,
            (false, true) => self.right - 1.0,
            (false, false) => 0.0,
        }
    }

    /// Both ends are zeros or plateaus.
    pub fn is_interior(&self) -> bool {
        !matches!(self.left_end, Boundary::DomainEnd | Boundary::Seam)
            && !matches!(self.right_end, Boundary::DomainEnd | Boundary::Seam)
    }
}

/// Ordered components of `{f != 0}`; for a periodic profile, one period
/// starting at the first zero in `[0, T)`, with cyclic adjacency.
#[derive(Clone, Debug)]
pub struct ComponentSet {
    pub components: Vec<Component>,
    pub zeros: Vec<Zero>,
    pub plateaus: Vec<(f64, f64)>,
    pub cyclic: bool,
    pub domain: Domain,
}

impl ComponentSet {
    /// No zero at all: `E^u_f` is the ribbon itself.
    pub fn is_elementary(&self) -> bool {
        self.zeros.is_empty() && self.plateaus.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index of the component containing `x` (reduced modulo the period).
    pub fn locate(&self, x: f64) -> Option<usize> {
        let x = match self.domain {
            Domain::Periodic { period } => {
                let start = self.components.first()?.left;
                start + (x - start).rem_euclid(period)
            }
            Domain::Interval { .. } => x,
        };
        self.components.iter().position(|c| c.left < x && x < c.right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Index of the separating simple zero.
    pub zero: usize,
}

#[derive(Clone, Debug)]
pub struct ContiguityGraph {
    pub components: ComponentSet,
    pub edges: Vec<Edge>,
    /// Connected-component label of every vertex.
    pub part: Vec<usize>,
    pub n_parts: usize,
}

impl ContiguityGraph {
    pub fn n_vertices(&self) -> usize {
        self.components.len()
    }

    pub fn is_connected(&self) -> bool {
        self.n_parts == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.a == v || e.b == v).count()
            + self.edges.iter().filter(|e| e.a == v && e.b == v).count()
    }
}

/// Raw scan output, plateaus included.
#[derive(Clone, Debug, Default)]
pub struct Scan {
    pub zeros: Vec<Zero>,
    pub plateaus: Vec<(f64, f64)>,
}

const BISECT_ITERS: usize = 200;

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * mid.abs().max(1.0) * 1e-3 || mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A few guarded Newton steps on `g` inside `[lo, hi]`.
fn polish(g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64) -> f64 {
    let mut best = x;
    let mut gbest = g(x).abs();
    let mut cur = x;
    for _ in 0..4 {
        let d = dg(cur);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = cur - g(cur) / d;
        if !(lo <= next && next <= hi) {
            break;
        }
        let gn = g(next).abs();
        if gn < gbest {
            best = next;
            gbest = gn;
        }
        cur = next;
    }
    best
}

/// Critical point of `f` near `x` in `[lo, hi]`.
fn critical_point(p: &FunctionProfile, x: f64, lo: f64, hi: f64) -> f64 {
    let (a, b) = (p.df(lo), p.df(hi));
    let mut c = if a.is_finite() && b.is_finite() && (a < 0.0) != (b < 0.0) {
        bisect(|t| p.df(t), lo, hi)
    } else {
        x
    };
    c = polish(|t| p.df(t), |t| p.d2f(t), c, lo, hi);
    c
}

fn classify(p: &FunctionProfile, x0: f64) -> Zero {
    let lambda = p.df(x0);
    let kind = if lambda.abs() > p.tol { ZeroKind::Simple } else { ZeroKind::Degenerate };
    Zero { x0, kind, lambda }
}

/// Scans the sampling grid for zeros and plateaus of `f`.
pub fn scan(p: &FunctionProfile) -> Scan {
    let xs = p.grid();
    let n = xs.len();
    let periodic = p.domain.is_periodic();
    let (lo_w, hi_w) = p.scan_window();
    let h = (hi_w - lo_w) / n as f64;
    let fs: Vec<f64> = xs.iter().map(|&x| p.f(x)).collect();
    let tol = p.tol;
    let small = |v: f64| v.is_finite() && v.abs() <= tol;
    let flat: Vec<bool> = xs.iter().zip(&fs).map(|(&x, &v)| small(v) && small(p.df(x))).collect();

    // Plateaus: runs of at least three consecutive flat samples.
    let mut plateaus = Vec::new();
    let mut in_plateau = vec![false; n];
    if flat.iter().all(|&b| b) {
        let span = if periodic { (lo_w, hi_w) } else { p.domain_span() };
        return Scan { zeros: Vec::new(), plateaus: vec![span] };
    }
    let mut i = 0;
    // For periodic profiles, start the run search after a non-small sample.
    let offset = if periodic { flat.iter().position(|&b| !b).unwrap_or(0) } else { 0 };
    while i < n {
        let k = (i + offset) % n;
        if flat[k] {
            let mut j = i;
            while j + 1 < n && flat[(j + 1 + offset) % n] {
                j += 1;
            }
            if j - i + 1 >= 3 {
                for t in i..=j {
                    in_plateau[(t + offset) % n] = true;
                }
                let s = xs[k];
                let e_idx = (j + offset) % n;
                let mut e = xs[e_idx];
                if periodic && e < s {
                    e += hi_w - lo_w;
                }
                plateaus.push((s, e));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    let mut cands: Vec<f64> = Vec::new();
    let pairs = if periodic { n } else { n - 1 };
    let x_at = |k: usize| if k < n { xs[k] } else { xs[k - n] + (hi_w - lo_w) };
    for k in 0..pairs {
        let (i0, i1) = (k, (k + 1) % n);
        if in_plateau[i0] || in_plateau[i1] {
            continue;
        }
        let (a, b) = (fs[i0], fs[i1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a == 0.0 {
            cands.push(xs[i0]);
        } else if b != 0.0 && (a < 0.0) != (b < 0.0) {
            let (xa, xb) = (x_at(k), x_at(k + 1));
            let r = bisect(|t| p.f(t), xa, xb);
            cands.push(polish(|t| p.f(t), |t| p.df(t), r, xa, xb));
        }
    }
    if !periodic && fs[n - 1] == 0.0 && !in_plateau[n - 1] {
        cands.push(xs[n - 1]);
    }
    // Degenerate zeros without sign change: local minima of |f|.
    let (first, last) = if periodic { (0, n) } else { (1, n - 1) };
    for k in first..last {
        let (im, ip) = ((k + n - 1) % n, (k + 1) % n);
        if in_plateau[k] || in_plateau[im] || in_plateau[ip] {
            continue;
        }
        let (fm, f0, fp) = (fs[im], fs[k], fs[ip]);
        if !(fm.is_finite() && f0.is_finite() && fp.is_finite()) || f0 == 0.0 {
            continue;
        }
        if !(f0.abs() <= fm.abs() && f0.abs() <= fp.abs()) {
            continue;
        }
        if (fm < 0.0) != (f0 < 0.0) || (fp < 0.0) != (f0 < 0.0) {
            continue;
        }
        let x = xs[k];
        let c = critical_point(p, x, x - h, x + h);
        if p.f(c).abs() <= tol && p.df(c).abs() <= tol {
            cands.push(c);
        }
    }

    let mut zeros: Vec<Zero> = Vec::new();
    let merge = 1e-8 * (hi_w - lo_w).max(1.0) / (n as f64).sqrt();
    let period = p.domain.period();
    let norm = |x: f64| match period {
        Some(t) => {
            let r = x.rem_euclid(t);
            if t - r < merge { 0.0 } else { r }
        }
        None => x,
    };
    let mut xs_z: Vec<f64> = cands.into_iter().map(norm).collect();
    xs_z.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for x in xs_z {
        if let Some(last) = zeros.last() {
            if (x - last.x0).abs() < merge {
                continue;
            }
        }
        if plateaus.iter().any(|&(s, e)| s - h <= x && x <= e + h) {
            continue;
        }
        zeros.push(classify(p, x));
    }
    if let (Some(t), true) = (period, zeros.len() > 1) {
        let (f0, l0) = (zeros[0].x0, zeros[zeros.len() - 1].x0);
        if f0 + t - l0 < merge {
            zeros.pop();
        }
    }
    Scan { zeros, plateaus }
}

impl FunctionProfile {
    fn domain_span(&self) -> (f64, f64) {
        match self.domain {
            Domain::Interval { a, b } => (a, b),
            Domain::Periodic { period } => (0.0, period),
        }
    }
}

/// Zeros of `f`, sorted, each classified Simple or Degenerate.
pub fn find_zeros(p: &FunctionProfile) -> Result<Vec<Zero>, ZeroError> {
    let s = scan(p);
    if let Some(&(start, end)) = s.plateaus.first() {
        return Err(ZeroError::ZeroPlateau { start, end });
    }
    Ok(s.zeros)
}

fn sign_at(p: &FunctionProfile, x: f64) -> i8 {
    if p.f(x) < 0.0 {
        -1
    } else {
        1
    }
}

/// Components of `{f != 0}` in order.
pub fn components(p: &FunctionProfile) -> ComponentSet {
    let s = scan(p);
    // Boundary items sorted by position: (start, end, tag).
    let mut items: Vec<(f64, f64, Boundary)> = s
        .zeros
        .iter()
        .enumerate()
        .map(|(i, z)| (z.x0, z.x0, Boundary::Zero(i)))
        .chain(s.plateaus.iter().enumerate().map(|(i, &(a, b))| (a, b, Boundary::Plateau(i))))
        .collect();
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut comps = Vec::new();
    let mid_sign = |l: f64, r: f64| {
        let c = Component { left: l, right: r, sign: 1, left_end: Boundary::Seam, right_end: Boundary::Seam };
        sign_at(p, c.midpoint())
    };
    match p.domain {
        Domain::Periodic { period } => {
            if items.is_empty() {
                comps.push(Component {
                    left: 0.0,
                    right: period,
                    sign: sign_at(p, 0.0),
                    left_end: Boundary::Seam,
                    right_end: Boundary::Seam,
                });
            } else if !(items.len() == 1 && matches!(items[0].2, Boundary::Plateau(_)) && items[0].1 - items[0].0 >= period * (1.0 - 1e-9)) {
                for i in 0..items.len() {
                    let (_, l, le) = items[i];
                    let (r, re) = if i + 1 < items.len() {
                        (items[i + 1].0, items[i + 1].2)
                    } else {
                        (items[0].0 + period, items[0].2)
                    };
                    if r - l > 0.0 {
                        comps.push(Component { left: l, right: r, sign: mid_sign(l, r), left_end: le, right_end: re });
                    }
                }
            }
        }
        Domain::Interval { a, b } => {
            let mut l = a;
            let mut le = Boundary::DomainEnd;
            for &(s0, s1, tag) in &items {
                if s0 > l {
                    comps.push(Component { left: l, right: s0, sign: mid_sign(l, s0), left_end: le, right_end: tag });
                }
                l = s1;
                le = tag;
            }
            if b > l {
                comps.push(Component { left: l, right: b, sign: mid_sign(l, b), left_end: le, right_end: Boundary::DomainEnd });
            }
        }
    }
    ComponentSet { components: comps, zeros: s.zeros, plateaus: s.plateaus, cyclic: p.domain.is_periodic(), domain: p.domain }
}

/// Contiguity graph: an edge for each simple zero between two components.
pub fn contiguity_graph(p: &FunctionProfile) -> ContiguityGraph {
    graph_from_components(components(p))
}

pub fn graph_from_components(cs: ComponentSet) -> ContiguityGraph {
    let n = cs.len();
    let mut edges = Vec::new();
    for i in 0..n {
        let j = if i + 1 < n {
            i + 1
        } else if cs.cyclic && n > 0 && cs.components[0].left_end != Boundary::Seam {
            0
        } else {
            continue;
        };
        if let Boundary::Zero(z) = cs.components[i].right_end {
            if cs.zeros[z].is_simple() {
                edges.push(Edge { a: i, b: j, zero: z });
            }
        }
    }
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut c = x;
        while uf[c] != r {
            let nx = uf[c];
            uf[c] = r;
            c = nx;
        }
        r
    }
    for e in &edges {
        let (ra, rb) = (find(&mut uf, e.a), find(&mut uf, e.b));
        if ra != rb {
            uf[ra] = rb;
        }
    }
    let mut labels = vec![usize::MAX; n];
    let mut part = vec![0; n];
    let mut n_parts = 0;
    for v in 0..n {
        let r = find(&mut uf, v);
        if labels[r] == usize::MAX {
            labels[r] = n_parts;
            n_parts += 1;
        }
        part[v] = labels[r];
    }
    ContiguityGraph { components: cs, edges, part, n_parts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnprofile::FunctionProfile;
    use std::f64::consts::PI;

    fn prof(s: &str, d: Domain) -> FunctionProfile {
        FunctionProfile::parse(s, d).unwrap()
    }

    #[test]
    fn sine_zeros() {
        let p = prof("sin(2*x)", Domain::Periodic { period: PI });
        let z = find_zeros(&p).unwrap();
        assert_eq!(z.len(), 2);
        assert!(z[0].x0.abs() < 1e-12 && (z[1].x0 - PI / 2.0).abs() < 1e-12);
        assert!((z[0].lambda - 2.0).abs() < 1e-9 && (z[1].lambda + 2.0).abs() < 1e-9);
        assert!(z.iter().all(Zero::is_simple));
    }

    #[test]
    fn double_zero() {
        let p = prof("x^2", Domain::Interval { a: -1.0, b: 1.0 });
        let z = find_zeros(&p).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].kind, ZeroKind::Degenerate);
        assert!(z[0].x0.abs() < 1e-6);
    }

    #[test]
    fn no_zero() {
        let p = prof("sin(2*x)+1.2", Domain::Periodic { period: PI });
        assert!(find_zeros(&p).unwrap().is_empty());
        let cs = components(&p);
        assert!(cs.is_elementary());
        assert_eq!(cs.len(), 1);
        let g = graph_from_components(cs);
        assert_eq!((g.n_vertices(), g.edges.len()), (1, 0));
    }

    #[test]
    fn mixed_components() {
        let p = prof("x*(x-1)^2", Domain::Interval { a: -1.0, b: 2.0 });
        let cs = components(&p);
        let got: Vec<(f64, f64, i8)> = cs.components.iter().map(|c| (c.left, c.right, c.sign)).collect();
        assert_eq!(got.len(), 3);
        assert_eq!((got[0].0, got[0].2), (-1.0, -1));
        assert!(got[0].1.abs() < 1e-12 && (got[1].1 - 1.0).abs() < 1e-6);
        assert_eq!((got[1].2, got[2].2, got[2].1), (1, 1, 2.0));
        assert_eq!(cs.zeros[1].kind, ZeroKind::Degenerate);
        let g = graph_from_components(cs);
        assert_eq!(g.edges, vec![Edge { a: 0, b: 1, zero: 0 }]);
        assert_eq!(g.n_parts, 2);
    }

    #[test]
    fn sine_graph_is_cyclic() {
        let p = prof("sin(2*x)", Domain::Periodic { period: PI });
        let g = contiguity_graph(&p);
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.components.components[0].sign, 1);
        assert_eq!(g.components.components[1].sign, -1);
        assert!(g.is_connected());
    }

    #[test]
    fn plateau_detected() {
        let p = prof("0*x", Domain::Interval { a: 0.0, b: 1.0 });
        assert!(matches!(find_zeros(&p), Err(ZeroError::ZeroPlateau { .. })));
        assert!(components(&p).is_empty());
    }

    #[test]
    fn triple_zero_is_degenerate_with_sign_change() {
        let p = prof("x^3", Domain::Interval { a: -1.0, b: 2.0 });
        let z = find_zeros(&p).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].kind, ZeroKind::Degenerate);
        let cs = components(&p);
        assert_eq!(cs.components.iter().map(|c| c.sign).collect::<Vec<_>>(), vec![-1, 1]);
    }
}
