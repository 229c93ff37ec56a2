use std::fmt;

use thiserror::Error;

use super::expr::FunctionExpr;
use super::parser::{parse, ParseError};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_N: usize = 4096;
/// Half-width of the sampling window used in place of an infinite domain end.
pub const DEFAULT_SCAN_RADIUS: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// Open interval `(a, b)`; either end may be infinite.
    Interval { a: f64, b: f64 },
    /// The circle `R / T Z`.
    Periodic { period: f64 },
}

impl Domain {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::Periodic { .. })
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            Domain::Periodic { period } => Some(*period),
            Domain::Interval { .. } => None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            Domain::Interval { a, b } => *a < x && x < *b,
            Domain::Periodic { .. } => x.is_finite(),
        }
    }

    /// Length of the interval, or the period.
    pub fn length(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Periodic { period } => *period,
        }
    }
}

fn fmt_end(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Interval { a, b } => write!(f, "interval:{},{}", fmt_end(*a), fmt_end(*b)),
            Domain::Periodic { period } => write!(f, "periodic:{period}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("grid size must be at least 16, got {0}")]
    InvalidGrid(usize),
    #[error("declared period {period} not validated: |f(x+T)-f(x)| = {defect:e} at x = {x}")]
    NotPeriodic { period: f64, x: f64, defect: f64 },
    #[error("symbolic derivative disagrees with finite differences at x = {x}")]
    DerivativeMismatch { x: f64 },
    #[error("evaluation singularity at x = {x}")]
    Singular { x: f64 },
    #[error("x = {x} lies outside the domain {domain}")]
    OutsideDomain { x: f64, domain: Domain },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: expression error: {source}")]
    Expr { line: usize, source: ParseError },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

impl ConfigError {
    /// True for errors in the text itself, as opposed to a well-formed
    /// description of an invalid profile.
    pub fn is_syntax(&self) -> bool {
        !matches!(self, ConfigError::Profile(_))
    }
}

/// The profile `f` together with its domain and cached derivatives.
#[derive(Clone, Debug)]
pub struct FunctionProfile {
    pub expr: FunctionExpr,
    pub domain: Domain,
    pub d1: FunctionExpr,
    pub d2: FunctionExpr,
    pub tol: f64,
    pub grid_n: usize,
    pub scan_radius: f64,
}

impl FunctionProfile {
    pub fn new(expr: FunctionExpr, domain: Domain) -> Result<Self, ProfileError> {
        Self::with_options(expr, domain, DEFAULT_TOL, DEFAULT_GRID_N)
    }

    pub fn with_options(
        expr: FunctionExpr,
        domain: Domain,
        tol: f64,
        grid_n: usize,
    ) -> Result<Self, ProfileError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ProfileError::InvalidTolerance(tol));
        }
        if grid_n < 16 {
            return Err(ProfileError::InvalidGrid(grid_n));
        }
        match domain {
            Domain::Interval { a, b } => {
                if a.is_nan() || b.is_nan() || a >= b || a == f64::INFINITY || b == f64::NEG_INFINITY {
                    return Err(ProfileError::InvalidDomain(format!("need a < b, got {domain}")));
                }
            }
            Domain::Periodic { period } => {
                if !(period > 0.0 && period.is_finite()) {
                    return Err(ProfileError::InvalidDomain(format!("period must be positive, got {period}")));
                }
            }
        }
        let d1 = expr.derivative();
        let d2 = d1.derivative();
        let p = FunctionProfile { expr, domain, d1, d2, tol, grid_n, scan_radius: DEFAULT_SCAN_RADIUS };
        p.check_derivatives()?;
        p.check_period()?;
        Ok(p)
    }

    pub fn parse(text: &str, domain: Domain) -> Result<Self, ConfigError> {
        let expr = parse(text).map_err(|source| ConfigError::Expr { line: 0, source })?;
        Ok(Self::new(expr, domain)?)
    }

    pub fn with_scan_radius(mut self, r: f64) -> Self {
        self.scan_radius = r;
        self
    }

    /// Same domain and options, different expression.
    pub fn rebuild(&self, expr: FunctionExpr, domain: Domain) -> Result<Self, ProfileError> {
        let mut p = Self::with_options(expr, domain, self.tol, self.grid_n)?;
        p.scan_radius = self.scan_radius;
        Ok(p)
    }

    #[inline]
    pub fn f(&self, x: f64) -> f64 {
        self.expr.eval(x)
    }

    #[inline]
    pub fn df(&self, x: f64) -> f64 {
        self.d1.eval(x)
    }

    #[inline]
    pub fn d2f(&self, x: f64) -> f64 {
        self.d2.eval(x)
    }

    pub fn d3(&self) -> FunctionExpr {
        self.d2.derivative()
    }

    /// Gaussian curvature `f''(x)/2` of `2dxdy + f(x)dy^2`.
    pub fn curvature(&self, x: f64) -> Result<f64, ProfileError> {
        if !self.domain.contains(x) {
            return Err(ProfileError::OutsideDomain { x, domain: self.domain });
        }
        let k = self.d2f(x) / 2.0;
        if !k.is_finite() || !self.f(x).is_finite() {
            return Err(ProfileError::Singular { x });
        }
        Ok(k)
    }

    /// Finite window in which zeros are searched.
    pub fn scan_window(&self) -> (f64, f64) {
        match self.domain {
            Domain::Periodic { period } => (0.0, period),
            Domain::Interval { a, b } => {
                let r = self.scan_radius;
                match (a.is_finite(), b.is_finite()) {
                    (true, true) => (a, b),
                    (true, false) => (a, a.max(0.0) + r),
                    (false, true) => (b.min(0.0) - r, b),
                    (false, false) => (-r, r),
                }
            }
        }
    }

    /// Sample abscissae: `grid_n` points starting at 0 for a period, interior
    /// cell midpoints for an interval window.
    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.scan_window();
        let n = self.grid_n;
        let h = (hi - lo) / n as f64;
        match self.domain {
            Domain::Periodic { .. } => (0..n).map(|i| lo + i as f64 * h).collect(),
            Domain::Interval { .. } => (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect(),
        }
    }

    /// Scale used to turn the relative tolerance into an absolute one.
    pub fn value_scale(&self) -> f64 {
        self.grid()
            .iter()
            .map(|&x| self.f(x).abs())
            .filter(|v| v.is_finite())
            .fold(1.0, f64::max)
    }

    pub fn is_constant(&self) -> bool {
        !self.expr.contains_x() || {
            let g = self.grid();
            let f0 = self.f(g[0]);
            let scale = self.value_scale();
            g.iter().all(|&x| (self.f(x) - f0).abs() <= self.tol * scale)
        }
    }

    fn check_derivatives(&self) -> Result<(), ProfileError> {
        let (lo, hi) = self.scan_window();
        let m = 64;
        for i in 0..m {
            let x = lo + (hi - lo) * (i as f64 + 0.37) / m as f64;
            let h = 1e-5 * x.abs().max(1.0);
            for (g, dg) in [(&self.expr, &self.d1), (&self.d1, &self.d2)] {
                let (gp, gm, dv) = (g.eval(x + h), g.eval(x - h), dg.eval(x));
                if !(gp.is_finite() && gm.is_finite() && dv.is_finite()) {
                    continue;
                }
                let fd = (gp - gm) / (2.0 * h);
                let mag = [dv.abs(), gp.abs() / h * 1e-9, 1.0].into_iter().fold(0.0, f64::max);
                // Skip points where the derivative varies wildly within the stencil.
                let curv = (gp - 2.0 * g.eval(x) + gm).abs() / (h * h);
                if curv * h > 1e3 * mag {
                    continue;
                }
                if (fd - dv).abs() > 1e-6 * mag {
                    return Err(ProfileError::DerivativeMismatch { x });
                }
            }
        }
        Ok(())
    }

    fn check_period(&self) -> Result<(), ProfileError> {
        let Domain::Periodic { period } = self.domain else { return Ok(()) };
        let scale = self.value_scale();
        for &x in self.grid().iter().step_by((self.grid_n / 512).max(1)) {
            let (a, b) = (self.f(x), self.f(x + period));
            if !(a.is_finite() && b.is_finite()) {
                return Err(ProfileError::Singular { x });
            }
            let defect = (a - b).abs();
            if defect > 100.0 * self.tol * scale {
                return Err(ProfileError::NotPeriodic { period, x, defect });
            }
        }
        Ok(())
    }

    /// Serializes as a profile configuration block.
    pub fn to_config(&self) -> String {
        let mut s = format!("function = {}\ndomain = {}\n", self.expr, self.domain);
        if self.tol != DEFAULT_TOL {
            s.push_str(&format!("tol = {}\n", self.tol));
        }
        if self.grid_n != DEFAULT_GRID_N {
            s.push_str(&format!("grid_n = {}\n", self.grid_n));
        }
        if self.scan_radius != DEFAULT_SCAN_RADIUS {
            s.push_str(&format!("scan_radius = {}\n", self.scan_radius));
        }
        s
    }
}

/// Splits `key = value` lines, skipping blanks and `#` comments.
pub fn key_values(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("expected `key = value`, got `{line}`") });
        };
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses a real number given as `inf`, `-inf` or a constant expression.
pub fn parse_real(text: &str, line: usize) -> Result<f64, ConfigError> {
    match text.trim() {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let e = parse(text).map_err(|source| ConfigError::Expr { line, source })?;
    if e.contains_x() {
        return Err(ConfigError::Syntax { line, message: format!("`{text}` must not depend on x") });
    }
    let v = e.eval(0.0);
    if v.is_nan() {
        return Err(ConfigError::Syntax { line, message: format!("`{text}` is not a number") });
    }
    Ok(v)
}

pub fn parse_domain(text: &str, line: usize) -> Result<Domain, ConfigError> {
    if let Some(rest) = text.strip_prefix("periodic:") {
        return Ok(Domain::Periodic { period: parse_real(rest, line)? });
    }
    if let Some(rest) = text.strip_prefix("interval:") {
        let Some((a, b)) = rest.split_once(',') else {
            return Err(ConfigError::Syntax { line, message: "interval needs `a,b`".into() });
        };
        return Ok(Domain::Interval { a: parse_real(a, line)?, b: parse_real(b, line)? });
    }
    Err(ConfigError::Syntax { line, message: format!("unknown domain `{text}`") })
}

/// Reads a profile configuration:
///
/// ```text
/// function = sin(2*x)
/// domain = periodic:pi
/// tol = 1e-9        # optional
/// grid_n = 4096     # optional
/// ```
///
/// Keys other than these (and `scan_radius`) are returned untouched so that
/// callers can layer their own keys on top.
pub fn parse_profile_config(text: &str) -> Result<(FunctionProfile, Vec<(usize, String, String)>), ConfigError> {
    let mut function = None;
    let mut domain = None;
    let mut tol = DEFAULT_TOL;
    let mut grid_n = DEFAULT_GRID_N;
    let mut radius = DEFAULT_SCAN_RADIUS;
    let mut rest = Vec::new();
    for (line, k, v) in key_values(text)? {
        match k.as_str() {
            "function" => function = Some(parse(&v).map_err(|source| ConfigError::Expr { line, source })?),
            "domain" => domain = Some(parse_domain(&v, line)?),
            "tol" => tol = parse_real(&v, line)?,
            "grid_n" => {
                grid_n = v.parse().map_err(|_| ConfigError::Syntax { line, message: format!("bad grid_n `{v}`") })?
            }
            "scan_radius" => radius = parse_real(&v, line)?,
            _ => rest.push((line, k, v)),
        }
    }
    let function = function.ok_or(ConfigError::MissingKey("function"))?;
    let domain = domain.ok_or(ConfigError::MissingKey("domain"))?;
    let mut p = FunctionProfile::with_options(function, domain, tol, grid_n)?;
    p.scan_radius = radius;
    Ok((p, rest))
}

/// Like [`parse_profile_config`] but rejects unknown keys.
pub fn read_profile(text: &str) -> Result<FunctionProfile, ConfigError> {
    let (p, rest) = parse_profile_config(text)?;
    if let Some((line, k, _)) = rest.into_iter().next() {
        return Err(ConfigError::Syntax { line, message: format!("unknown key `{k}`") });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(s: &str, d: Domain) -> FunctionProfile {
        FunctionProfile::parse(s, d).unwrap()
    }

    #[test]
    fn curvature_examples() {
        let p = prof("sin(2*x)", Domain::Periodic { period: std::f64::consts::PI });
        for x in [0.1, 0.7, 2.0] {
            assert!((p.curvature(x).unwrap() + 2.0 * p.f(x)).abs() < 1e-12);
        }
        let flat = prof("x", Domain::Interval { a: -1.0, b: 1.0 });
        assert_eq!(flat.curvature(0.3).unwrap(), 0.0);
        let sq = prof("x^2", Domain::Interval { a: -1.0, b: 1.0 });
        assert_eq!(sq.curvature(-0.4).unwrap(), 1.0);
        let schw = prof("1 - 2/x", Domain::Interval { a: f64::NEG_INFINITY, b: f64::INFINITY });
        assert!(matches!(schw.curvature(0.0), Err(ProfileError::Singular { .. })));
    }

    #[test]
    fn rejects_false_period() {
        let e = parse("sin(2*x)").unwrap();
        assert!(matches!(
            FunctionProfile::new(e, Domain::Periodic { period: 1.0 }),
            Err(ProfileError::NotPeriodic { .. })
        ));
    }

    #[test]
    fn config_round_trip() {
        let text = "# demo\nfunction = sin(2*x)\ndomain = periodic:pi\n";
        let p = read_profile(text).unwrap();
        assert_eq!(p.domain, Domain::Periodic { period: std::f64::consts::PI });
        let again = read_profile(&p.to_config()).unwrap();
        assert_eq!(again.expr, p.expr);
        assert_eq!(again.domain, p.domain);
        let inf = read_profile("function = x^3-x\ndomain = interval:-inf,inf\ngrid_n=2048").unwrap();
        assert_eq!(inf.scan_window(), (-50.0, 50.0));
        assert_eq!(inf.grid_n, 2048);
    }

    #[test]
    fn config_errors() {
        assert!(read_profile("function = sin(2*x\ndomain = periodic:pi").unwrap_err().is_syntax());
        assert!(read_profile("domain = periodic:pi").unwrap_err().is_syntax());
        assert!(read_profile("function = x\ndomain = circle").unwrap_err().is_syntax());
        assert!(!read_profile("function = x\ndomain = interval:1,0").unwrap_err().is_syntax());
    }
}
