//! Geodesic flow of `2dxdy + f(x)dy²`, doubly tangent geodesics (conjugate
//! points) and the necessary conditions for a torus without conjugate points.
//!
//! State vector `[x, y, p, q]` with `p = x'`, `q = y'`.

use std::fmt;

use thiserror::Error;

use crate::fnprofile::{components, Domain, FunctionProfile};
use crate::ode::{integrate as ode_integrate, Control, Dense, OdeError, Options};

/// `|p| + |q|` beyond which a trajectory is declared escaping.
pub const BLOW_UP: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesicError {
    #[error("geodesic escapes at t = {t}")]
    BlowUp { t: f64 },
    #[error("x = {x} is outside the domain")]
    NotInDomain { x: f64 },
    #[error("non-finite evaluation of f at x = {x}")]
    Evaluation { x: f64 },
    #[error("energy sign must be -1, 0 or 1, got {0}")]
    BadEnergy(i8),
    #[error("C must be nonzero")]
    ZeroC,
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub q: f64,
}

impl GeodesicState {
    pub fn new(x: f64, y: f64, p: f64, q: f64) -> Self {
        GeodesicState { t: 0.0, x, y, p, q }
    }

    fn from_vec(t: f64, v: &[f64; 4]) -> Self {
        GeodesicState { t, x: v[0], y: v[1], p: v[2], q: v[3] }
    }

    fn vec(&self) -> [f64; 4] {
        [self.x, self.y, self.p, self.q]
    }

    /// Clairaut integral `f q + p`.
    pub fn clairaut(&self, f: &FunctionProfile) -> f64 {
        f.f(self.x) * self.q + self.p
    }

    /// Energy `f q² + 2 p q`.
    pub fn energy(&self, f: &FunctionProfile) -> f64 {
        f.f(self.x) * self.q * self.q + 2.0 * self.p * self.q
    }
}

/// Euler–Lagrange equations: `x'' = -f'q(p + fq/2)`, `y'' = f'q²/2`.
pub fn geodesic_rhs(s: &[f64; 4], f: &FunctionProfile) -> [f64; 4] {
    let [x, _, p, q] = *s;
    let (fx, dfx) = (f.f(x), f.df(x));
    [p, q, -dfx * q * (p + 0.5 * fx * q), 0.5 * dfx * q * q]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndReason {
    Reached,
    DomainExit,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// State after every accepted step, starting with the initial state.
    pub samples: Vec<GeodesicState>,
    pub end: EndReason,
    /// Largest `|C(t) - C(0)| / max(1, |C(0)|)`.
    pub c_drift: f64,
    /// Same for the energy.
    pub e_drift: f64,
    pub c: f64,
    pub e: f64,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.samples.last().expect("trajectory has its initial state")
    }

    /// Plain-text table `t x y p q C E`.
    pub fn to_table(&self, f: &FunctionProfile) -> String {
        let mut s = String::from("# t x y p q C E\n");
        for st in &self.samples {
            s.push_str(&format!(
                "{:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e}\n",
                st.t,
                st.x,
                st.y,
                st.p,
                st.q,
                st.clairaut(f),
                st.energy(f)
            ));
        }
        s
    }
}

pub fn default_options() -> Options {
    Options::tol(1e-12, 1e-14)
}

fn check_start(f: &FunctionProfile, x: f64) -> Result<(), GeodesicError> {
    if !f.domain.contains(x) {
        return Err(GeodesicError::NotInDomain { x });
    }
    if !(f.f(x).is_finite() && f.df(x).is_finite()) {
        return Err(GeodesicError::Evaluation { x });
    }
    Ok(())
}

/// Integrates from `start` over `[start.t, t_end]`, keeping every accepted
/// step. Escapes (`|p| + |q| > 1e9`) are reported as [`GeodesicError::BlowUp`].
pub fn integrate(f: &FunctionProfile, start: GeodesicState, t_end: f64, opts: &Options) -> Result<Trajectory, GeodesicError> {
    integrate_dense(f, start, t_end, opts, |_| {}).map(|(t, _)| t)
}

fn integrate_dense(
    f: &FunctionProfile,
    start: GeodesicState,
    t_end: f64,
    opts: &Options,
    mut keep: impl FnMut(&Dense<4>),
) -> Result<(Trajectory, bool), GeodesicError> {
    check_start(f, start.x)?;
    let (c0, e0) = (start.clairaut(f), start.energy(f));
    let mut traj = Trajectory { samples: vec![start], end: EndReason::Reached, c_drift: 0.0, e_drift: 0.0, c: c0, e: e0 };
    let mut blown = false;
    let res = ode_integrate(|_, s| geodesic_rhs(s, f), start.t, start.vec(), t_end, opts, |d, y| {
        let st = GeodesicState::from_vec(d.t1(), y);
        if st.p.abs() + st.q.abs() > BLOW_UP {
            blown = true;
            return Control::Stop;
        }
        if !f.domain.contains(st.x) {
            traj.end = EndReason::DomainExit;
            return Control::Stop;
        }
        traj.c_drift = traj.c_drift.max((st.clairaut(f) - c0).abs() / c0.abs().max(1.0));
        traj.e_drift = traj.e_drift.max((st.energy(f) - e0).abs() / e0.abs().max(1.0));
        traj.samples.push(st);
        keep(d);
        Control::Continue
    });
    match res {
        Ok(o) if blown => Err(GeodesicError::BlowUp { t: o.t }),
        Ok(o) => Ok((traj, o.stopped)),
        Err(OdeError::StepUnderflow { t }) | Err(OdeError::NonFinite { t }) => {
            let last = traj.last();
            if last.p.abs() + last.q.abs() > 1e3 {
                Err(GeodesicError::BlowUp { t })
            } else {
                Err(GeodesicError::Ode(OdeError::NonFinite { t }))
            }
        }
        Err(e) => Err(e.into()),
    }
}

/// Light leaf `x = x0` travelled with `y' = q0`.
pub fn light_leaf(x0: f64, q0: f64) -> GeodesicState {
    GeodesicState::new(x0, 0.0, 0.0, q0)
}

// ------------------------------------------------------------ conjugate points

/// Relatively compact component `(a, b)` of `{εf < C²}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disconnection {
    pub a: f64,
    pub b: f64,
    /// The constant actually used, after a possible nudge.
    pub c: f64,
    pub nudged: bool,
}

fn critical_values(f: &FunctionProfile, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut prev = f.df(lo);
    for i in 1..=n {
        let x = lo + i as f64 * h;
        let d = f.df(x);
        if prev.is_finite() && d.is_finite() && (prev < 0.0) != (d < 0.0) {
            let c = bisect(|t| f.df(t), x - h, x);
            out.push(f.f(c));
        }
        prev = d;
    }
    out
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = g(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) < 0.0) == neg_lo { lo = mid } else { hi = mid }
    }
    0.5 * (lo + hi)
}

/// Search window: one period and a half for periodic profiles.
fn window(f: &FunctionProfile) -> (f64, f64) {
    match f.domain {
        Domain::Periodic { period } => (0.0, 2.0 * period),
        Domain::Interval { .. } => f.scan_window(),
    }
}

/// Finds a relatively compact component of `{εf < C²}`, nudging `C` by at
/// most `1e-6` when `εC²` is (numerically) a critical value of `f`.
pub fn disconnection_test(f: &FunctionProfile, eps: i8, c: f64) -> Option<Disconnection> {
    if c == 0.0 || !(eps == 1 || eps == -1) {
        return None;
    }
    let (lo, hi) = window(f);
    let n = 4 * f.grid_n;
    let crit = critical_values(f, lo, hi, n);
    let scale = f.value_scale();
    let e = eps as f64;
    let near_critical = |c: f64| crit.iter().any(|&v| (e * c * c - v * e).abs() <= 1e-8 * scale);
    let mut used = c;
    let mut nudged = false;
    if near_critical(c) {
        let steps = (1..=10).flat_map(|k| [k as f64 * 1e-7, -(k as f64) * 1e-7]);
        used = steps.map(|d| c + d.copysign(c)).find(|&cc| !near_critical(cc))?;
        nudged = true;
    }
    let level = used * used;
    let g = |x: f64| e * f.f(x) - level;
    let h = (hi - lo) / n as f64;
    let mut a: Option<f64> = None;
    let mut prev = g(lo);
    for i in 1..=n {
        let x = lo + i as f64 * h;
        let v = g(x);
        if !(v.is_finite() && prev.is_finite()) {
            a = None;
        } else if prev >= 0.0 && v < 0.0 {
            a = Some(bisect(g, x - h, x));
        } else if prev < 0.0 && v >= 0.0 {
            if let Some(a0) = a {
                let b = bisect(g, x - h, x);
                let (da, db) = (f.df(a0), f.df(b));
                let thr = 1e-8 * scale;
                if da.abs() > thr && db.abs() > thr {
                    return Some(Disconnection { a: a0, b, c: used, nudged });
                }
                a = None;
            }
        }
        prev = v;
    }
    None
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// `∫_a^b dx / sqrt(C² - εf(x))` with `x = a + u²` and `x = b - u²` on the
/// two halves, composite Gauss–Legendre in `u`.
pub fn arrival_time_quadrature(f: &FunctionProfile, eps: i8, c: f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(10);
    let panels = 64;
    let e = eps as f64;
    let m = 0.5 * (a + b);
    let half = |x_of: &dyn Fn(f64) -> f64, umax: f64| -> f64 {
        let h = umax / panels as f64;
        let mut s = 0.0;
        for k in 0..panels {
            let mid = (k as f64 + 0.5) * h;
            for (z, w) in nodes.iter().zip(&weights) {
                let u = mid + 0.5 * h * z;
                let x = x_of(u);
                s += w * 0.5 * h * 2.0 * u / (c * c - e * f.f(x)).sqrt();
            }
        }
        s
    };
    let u_max = (m - a).sqrt();
    half(&|u| a + u * u, u_max) + half(&|u| b - u * u, (b - m).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugateStatus {
    Found,
    NotFound,
    Inconclusive,
}

impl fmt::Display for ConjugateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConjugateStatus::Found => "found",
            ConjugateStatus::NotFound => "not_found",
            ConjugateStatus::Inconclusive => "inconclusive",
        })
    }
}

/// Geodesic leaving `(a, 0)` tangent to `∂_y` and its second tangency.
#[derive(Clone, Debug)]
pub struct ConjugateReport {
    pub status: ConjugateStatus,
    pub eps: i8,
    pub c: f64,
    pub nudged: bool,
    pub interval: Option<(f64, f64)>,
    /// Second tangency time from the integrator.
    pub t_b: Option<f64>,
    /// Same time from the quadrature.
    pub t_quad: Option<f64>,
    pub x_at_tb: Option<f64>,
    pub p_at_tb: Option<f64>,
    /// `max_s |x(t_b + s) - x(t_b - s)|`.
    pub symmetry_defect: Option<f64>,
    pub c_drift: f64,
    pub e_drift: f64,
    pub samples: Vec<GeodesicState>,
    pub note: Option<String>,
}

impl ConjugateReport {
    fn empty(eps: i8, c: f64) -> Self {
        ConjugateReport {
            status: ConjugateStatus::NotFound,
            eps,
            c,
            nudged: false,
            interval: None,
            t_b: None,
            t_quad: None,
            x_at_tb: None,
            p_at_tb: None,
            symmetry_defect: None,
            c_drift: 0.0,
            e_drift: 0.0,
            samples: Vec::new(),
            note: None,
        }
    }

    /// Relative disagreement between integrator and quadrature.
    pub fn arrival_error(&self) -> Option<f64> {
        Some((self.t_b? - self.t_quad?).abs() / self.t_quad?)
    }
}

fn eval_dense(segs: &[Dense<4>], t: f64) -> Option<[f64; 4]> {
    let i = segs.partition_point(|d| d.t1() < t);
    segs.get(i).filter(|d| d.t0 <= t + 1e-12).map(|d| d.eval(t))
}

/// Launches `γ(0) = (a, 0)`, `γ'(0) = ε∂_y/C` and looks for the second
/// tangency `p = 0` at `x = b`.
pub fn conjugate_search(f: &FunctionProfile, eps: i8, c: f64) -> Result<ConjugateReport, GeodesicError> {
    if !(eps == 1 || eps == -1) {
        return Err(GeodesicError::BadEnergy(eps));
    }
    if c == 0.0 {
        return Err(GeodesicError::ZeroC);
    }
    let mut rep = ConjugateReport::empty(eps, c);
    let Some(d) = disconnection_test(f, eps, c) else {
        rep.note = Some("no relatively compact component of {εf < C²}".into());
        return Ok(rep);
    };
    rep.c = d.c;
    rep.nudged = d.nudged;
    rep.interval = Some((d.a, d.b));
    let t_quad = arrival_time_quadrature(f, eps, d.c, d.a, d.b);
    rep.t_quad = Some(t_quad);
    let start = GeodesicState::new(d.a, 0.0, 0.0, eps as f64 / d.c);
    let mut segs: Vec<Dense<4>> = Vec::new();
    let t_end = if t_quad.is_finite() { 2.2 * t_quad } else { 1e4 };
    let traj = match integrate_dense(f, start, t_end, &default_options(), |dd| segs.push(dd.clone())) {
        Ok((t, _)) => t,
        Err(e) => {
            rep.status = ConjugateStatus::Inconclusive;
            rep.note = Some(format!("integration escaped: {e}"));
            return Ok(rep);
        }
    };
    rep.c_drift = traj.c_drift;
    rep.e_drift = traj.e_drift;
    // First sign change of p from + to -.
    let mut seen_pos = false;
    let mut tb = None;
    for seg in &segs {
        let pe = seg.eval(seg.t1())[2];
        if pe > 0.0 {
            seen_pos = true;
        } else if seen_pos && pe < 0.0 {
            tb = Some(bisect(|t| -seg.eval(t)[2], seg.t0, seg.t1()));
            break;
        }
    }
    let Some(tb) = tb else {
        rep.status = ConjugateStatus::Inconclusive;
        rep.note = Some("tangency not bracketed".into());
        rep.samples = traj.samples;
        return Ok(rep);
    };
    let at = eval_dense(&segs, tb).expect("tangency lies inside the integrated range");
    rep.t_b = Some(tb);
    rep.x_at_tb = Some(at[0]);
    rep.p_at_tb = Some(at[2]);
    let t_max = traj.last().t;
    let span = (t_max - tb).min(tb) * 0.95;
    let mut sym: f64 = 0.0;
    for i in 0..=64 {
        let s = span * i as f64 / 64.0;
        if let (Some(u), Some(v)) = (eval_dense(&segs, tb + s), eval_dense(&segs, tb - s)) {
            sym = sym.max((u[0] - v[0]).abs());
        }
    }
    rep.symmetry_defect = Some(sym);
    rep.samples = traj.samples.into_iter().filter(|s| s.t <= 2.0 * tb).collect();
    let width = (d.b - d.a).abs().max(1.0);
    let hit = (at[0] - d.b).abs() <= 1e-6 * width;
    let quad_ok = rep.arrival_error().is_some_and(|e| e <= 1e-5);
    if hit && quad_ok {
        rep.status = ConjugateStatus::Found;
    } else {
        rep.status = ConjugateStatus::Inconclusive;
        rep.note = Some(format!(
            "tangency at x = {} (expected {}), arrival error {:e}",
            at[0],
            d.b,
            rep.arrival_error().unwrap_or(f64::NAN)
        ));
    }
    Ok(rep)
}

// ------------------------------------------------------------ CP conditions

#[derive(Clone, Debug, PartialEq)]
pub enum CpFailure {
    NotPeriodic,
    Constant,
    /// (1): infinitely many components in a period.
    NotLocallyFinite,
    /// (2): a component carries no mark.
    Unmarked { component: usize, left: f64, right: f64 },
    /// (3): consecutive components of the same sign.
    SameSign { first: usize, second: usize },
    /// (4): `f'` changes sign other than once.
    DerivativeSignChanges { component: usize, changes: usize },
}

impl fmt::Display for CpFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpFailure::NotPeriodic => write!(f, "profile is not periodic"),
            CpFailure::Constant => write!(f, "profile is constant"),
            CpFailure::NotLocallyFinite => write!(f, "(1) components are not locally finite"),
            CpFailure::Unmarked { component, left, right } => {
                write!(f, "(2) component {component} = ({left}, {right}) carries no mark")
            }
            CpFailure::SameSign { first, second } => {
                write!(f, "(3) components {first} and {second} have the same sign")
            }
            CpFailure::DerivativeSignChanges { component, changes } => {
                write!(f, "(4) f' changes sign {changes} times on component {component}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpReport {
    pub holds: bool,
    pub failures: Vec<CpFailure>,
}

/// Necessary conditions for a torus modelled on `f` with the given marks
/// (in the coordinates of `f`) to have no conjugate points.
pub fn cp_conditions(f: &FunctionProfile, marks: &[f64]) -> CpReport {
    let mut failures = Vec::new();
    let Some(period) = f.domain.period() else {
        return CpReport { holds: false, failures: vec![CpFailure::NotPeriodic] };
    };
    if f.is_constant() {
        return CpReport { holds: false, failures: vec![CpFailure::Constant] };
    }
    let cs = components(f);
    let n = cs.len();
    if n == 0 || n >= f.grid_n / 4 {
        failures.push(CpFailure::NotLocallyFinite);
    }
    for (i, comp) in cs.components.iter().enumerate() {
        let carries = marks.iter().any(|&m| {
            let x = comp.left + (m - comp.left).rem_euclid(period);
            comp.left < x && x < comp.right
        });
        if !carries {
            failures.push(CpFailure::Unmarked { component: i, left: comp.left, right: comp.right });
        }
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if cs.components[i].sign == cs.components[j].sign {
            failures.push(CpFailure::SameSign { first: i, second: j });
        }
    }
    let thr = f.tol * f.value_scale();
    for (i, comp) in cs.components.iter().enumerate() {
        let m = 1024;
        let mut last: Option<bool> = None;
        let mut changes = 0;
        for k in 1..m {
            let x = comp.left + comp.width() * k as f64 / m as f64;
            let d = f.df(x);
            if d.abs() <= thr {
                continue;
            }
            let s = d > 0.0;
            if last.is_some_and(|l| l != s) {
                changes += 1;
            }
            last = Some(s);
        }
        if changes != 1 {
            failures.push(CpFailure::DerivativeSignChanges { component: i, changes });
        }
    }
    CpReport { holds: failures.is_empty(), failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnprofile::Domain;

    fn prof(s: &str, d: Domain) -> FunctionProfile {
        FunctionProfile::parse(s, d).unwrap()
    }

    fn pi() -> f64 {
        std::f64::consts::PI
    }

    #[test]
    fn flat_is_straight() {
        let f = prof("0", Domain::Interval { a: f64::NEG_INFINITY, b: f64::INFINITY });
        let t = integrate(&f, GeodesicState::new(0.5, 1.0, 0.3, -0.7), 5.0, &default_options()).unwrap();
        let e = t.last();
        assert!((e.x - (0.5 + 1.5)).abs() < 1e-12 && (e.y - (1.0 - 3.5)).abs() < 1e-12);
    }

    #[test]
    fn light_leaf_blows_up_forward() {
        let f = prof("sin(2*x)", Domain::Periodic { period: pi() });
        match integrate(&f, light_leaf(0.0, 1.0), 10.0, &default_options()) {
            Err(GeodesicError::BlowUp { t }) => assert!((t - 1.0).abs() < 1e-6, "{t}"),
            other => panic!("{other:?}"),
        }
        assert!(integrate(&f, light_leaf(0.0, -1.0), 1000.0, &default_options()).is_ok());
    }

    #[test]
    fn disconnection_examples() {
        let f = prof("sin(2*x)+1.2", Domain::Periodic { period: pi() });
        let d = disconnection_test(&f, 1, 1.0).unwrap();
        assert!((f.f(d.a) - 1.0).abs() < 1e-12 && (f.f(d.b) - 1.0).abs() < 1e-12);
        assert!(f.f(0.5 * (d.a + d.b)) < 1.0);
        let one = prof("1", Domain::Periodic { period: 1.0 });
        assert!(disconnection_test(&one, 1, 2.0).is_none());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn conjugate_found_for_shifted_sine() {
        let f = prof("sin(2*x)+1.2", Domain::Periodic { period: pi() });
        let r = conjugate_search(&f, 1, 1.0).unwrap();
        assert_eq!(r.status, ConjugateStatus::Found, "{:?}", r.note);
        assert!(r.arrival_error().unwrap() < 1e-5);
        assert!(r.symmetry_defect.unwrap() < 1e-6);
    }

    #[test]
    fn cp_examples() {
        let f = prof("sin(2*x)", Domain::Periodic { period: pi() });
        assert!(cp_conditions(&f, &[pi() / 4.0, 3.0 * pi() / 4.0]).holds);
        let r = cp_conditions(&f, &[pi() / 4.0]);
        assert!(matches!(r.failures[..], [CpFailure::Unmarked { component: 1, .. }]));
        let g = prof("sin(2*pi*x)^2", Domain::Periodic { period: 1.0 });
        let r = cp_conditions(&g, &[0.25, 0.75]);
        assert!(r.failures.iter().any(|f| matches!(f, CpFailure::SameSign { .. })));
    }
}
