//! Expression trees in one variable `x`, with evaluation, printing and
//! symbolic differentiation.

use std::fmt;

/// Expression over the single variable `x`.
///
/// Trees built through the helper constructors ([`FunctionExpr::add`] and
/// friends) are lightly normalized: constants are folded, neutral elements
/// dropped. Nothing more clever than that.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionExpr {
    Const(f64),
    Pi,
    X,
    Neg(Box<FunctionExpr>),
    Sin(Box<FunctionExpr>),
    Cos(Box<FunctionExpr>),
    Exp(Box<FunctionExpr>),
    Add(Box<FunctionExpr>, Box<FunctionExpr>),
    Sub(Box<FunctionExpr>, Box<FunctionExpr>),
    Mul(Box<FunctionExpr>, Box<FunctionExpr>),
    Div(Box<FunctionExpr>, Box<FunctionExpr>),
    Pow(Box<FunctionExpr>, u32),
}

use FunctionExpr::*;

fn folded(v: f64) -> Option<FunctionExpr> {
    v.is_finite().then_some(Const(v))
}

impl FunctionExpr {
    pub fn constant(c: f64) -> Self {
        Const(c)
    }

    pub fn x() -> Self {
        X
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Const(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Const(c) if *c == 1.0)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Self) -> Self {
        match a {
            Const(c) => Const(-c),
            Neg(inner) => *inner,
            other => Neg(Box::new(other)),
        }
    }

    pub fn sin(a: Self) -> Self {
        match a.as_const().and_then(|c| folded(c.sin())) {
            Some(c) => c,
            None => Sin(Box::new(a)),
        }
    }

    pub fn cos(a: Self) -> Self {
        match a.as_const().and_then(|c| folded(c.cos())) {
            Some(c) => c,
            None => Cos(Box::new(a)),
        }
    }

    pub fn exp(a: Self) -> Self {
        match a.as_const().and_then(|c| folded(c.exp())) {
            Some(c) => c,
            None => Exp(Box::new(a)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Self, b: Self) -> Self {
        if let (Some(u), Some(v)) = (a.as_const(), b.as_const()) {
            if let Some(c) = folded(u + v) {
                return c;
            }
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        // Merge repeated offsets: (u + c) + v and (u - c) + v.
        if let Some(v) = b.as_const() {
            match a {
                Add(u, c) if c.as_const().is_some() => return Self::add(*u, Const(c.as_const().unwrap() + v)),
                Sub(u, c) if c.as_const().is_some() => return Self::add(*u, Const(v - c.as_const().unwrap())),
                _ => {}
            }
        }
        Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Self, b: Self) -> Self {
        if let (Some(u), Some(v)) = (a.as_const(), b.as_const()) {
            if let Some(c) = folded(u - v) {
                return c;
            }
        }
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return Self::neg(b);
        }
        if let (Some(v), Add(u, c)) = (b.as_const(), &a) {
            if let Some(c) = c.as_const() {
                return Self::add((**u).clone(), Const(c - v));
            }
        }
        Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Self, b: Self) -> Self {
        if let (Some(u), Some(v)) = (a.as_const(), b.as_const()) {
            if let Some(c) = folded(u * v) {
                return c;
            }
        }
        if a.is_zero() || b.is_zero() {
            return Const(0.0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Self, b: Self) -> Self {
        if let (Some(u), Some(v)) = (a.as_const(), b.as_const()) {
            if let Some(c) = folded(u / v) {
                return c;
            }
        }
        if a.is_zero() && !b.is_zero() {
            return Const(0.0);
        }
        if b.is_one() {
            return a;
        }
        Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Self, n: u32) -> Self {
        if n == 0 {
            return Const(1.0);
        }
        if n == 1 {
            return a;
        }
        if let Some(c) = a.as_const().and_then(|u| folded(u.powi(n as i32))) {
            return c;
        }
        Pow(Box::new(a), n)
    }

    /// Evaluates at `x`. Singular points give non-finite values.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Const(c) => *c,
            Pi => std::f64::consts::PI,
            X => x,
            Neg(a) => -a.eval(x),
            Sin(a) => a.eval(x).sin(),
            Cos(a) => a.eval(x).cos(),
            Exp(a) => a.eval(x).exp(),
            Add(a, b) => a.eval(x) + b.eval(x),
            Sub(a, b) => a.eval(x) - b.eval(x),
            Mul(a, b) => a.eval(x) * b.eval(x),
            Div(a, b) => a.eval(x) / b.eval(x),
            Pow(a, n) => a.eval(x).powi(*n as i32),
        }
    }

    /// Symbolic derivative with respect to `x`.
    pub fn derivative(&self) -> Self {
        match self {
            Const(_) | Pi => Const(0.0),
            X => Const(1.0),
            Neg(a) => Self::neg(a.derivative()),
            Sin(a) => Self::mul(a.derivative(), Self::cos((**a).clone())),
            Cos(a) => Self::neg(Self::mul(a.derivative(), Self::sin((**a).clone()))),
            Exp(a) => Self::mul(a.derivative(), Self::exp((**a).clone())),
            Add(a, b) => Self::add(a.derivative(), b.derivative()),
            Sub(a, b) => Self::sub(a.derivative(), b.derivative()),
            Mul(a, b) => Self::add(
                Self::mul(a.derivative(), (**b).clone()),
                Self::mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => Self::div(
                Self::sub(
                    Self::mul(a.derivative(), (**b).clone()),
                    Self::mul((**a).clone(), b.derivative()),
                ),
                Self::pow((**b).clone(), 2),
            ),
            Pow(a, n) => Self::mul(
                Self::mul(Const(*n as f64), Self::pow((**a).clone(), n - 1)),
                a.derivative(),
            ),
        }
    }

    /// Replaces every occurrence of `x` by `repl`.
    pub fn substitute(&self, repl: &FunctionExpr) -> Self {
        match self {
            Const(c) => Const(*c),
            Pi => Pi,
            X => repl.clone(),
            Neg(a) => Self::neg(a.substitute(repl)),
            Sin(a) => Self::sin(a.substitute(repl)),
            Cos(a) => Self::cos(a.substitute(repl)),
            Exp(a) => Self::exp(a.substitute(repl)),
            Add(a, b) => Self::add(a.substitute(repl), b.substitute(repl)),
            Sub(a, b) => Self::sub(a.substitute(repl), b.substitute(repl)),
            Mul(a, b) => Self::mul(a.substitute(repl), b.substitute(repl)),
            Div(a, b) => Self::div(a.substitute(repl), b.substitute(repl)),
            Pow(a, n) => Self::pow(a.substitute(repl), *n),
        }
    }

    /// `f(s*x + b)` for `s = ±1`.
    pub fn affine_substitute(&self, s: f64, b: f64) -> Self {
        let sx = if s < 0.0 { Self::neg(X) } else { X };
        self.substitute(&Self::add(sx, Const(b)))
    }

    pub fn contains_x(&self) -> bool {
        match self {
            Const(_) | Pi => false,
            X => true,
            Neg(a) | Sin(a) | Cos(a) | Exp(a) | Pow(a, _) => a.contains_x(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.contains_x() || b.contains_x(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Const(_) | Pi | X => 1,
            Neg(a) | Sin(a) | Cos(a) | Exp(a) | Pow(a, _) => 1 + a.node_count(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    // Precedence: 1 sums, 2 products, 3 powers, 4 atoms. Negations and
    // negative constants are parenthesized unless they stand alone.
    fn level(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Pow(..) => 3,
            Neg(_) => 0,
            Const(c) if c.is_sign_negative() => 0,
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.write_bare(f)?;
            write!(f, ")")
        } else {
            self.write_bare(f)
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Const(c) => write!(f, "{c}"),
            Pi => write!(f, "pi"),
            X => write!(f, "x"),
            Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, 3)
            }
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Exp(a) => write!(f, "exp({a})"),
            Add(a, b) | Sub(a, b) => {
                a.write_at(f, 1)?;
                write!(f, "{}", if matches!(self, Add(..)) { "+" } else { "-" })?;
                b.write_at(f, 2)
            }
            Mul(a, b) | Div(a, b) => {
                a.write_at(f, 2)?;
                write!(f, "{}", if matches!(self, Mul(..)) { "*" } else { "/" })?;
                b.write_at(f, 3)
            }
            Pow(a, n) => {
                a.write_at(f, 4)?;
                write!(f, "^{n}")
            }
        }
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_bare(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnprofile::parse;

    fn d(s: &str) -> String {
        parse(s).unwrap().derivative().to_string()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(d("sin(2*x)"), "2*cos(2*x)");
        assert_eq!(d("3"), "0");
        assert_eq!(d("x^3"), "3*x^2");
        assert_eq!(d("exp(x)"), "exp(x)");
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for s in ["1 - 2/x", "sin(x)*cos(3*x)+x^4", "exp(sin(x))/(2+cos(x))", "-x^2-1"] {
            let e = parse(s).unwrap();
            let de = e.derivative();
            for i in 0..50 {
                let x = 0.3 + 0.07 * i as f64;
                let h = 1e-6;
                let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
                assert!((fd - de.eval(x)).abs() <= 1e-6 * (1.0 + fd.abs()), "{s} at {x}");
            }
        }
    }

    #[test]
    fn printing_respects_precedence() {
        let e = FunctionExpr::sub(X, FunctionExpr::sub(X, Const(1.0)));
        assert_eq!(e.to_string(), "x-(x-1)");
        let p = FunctionExpr::pow(FunctionExpr::add(X, Const(1.0)), 2);
        assert_eq!(p.to_string(), "(x+1)^2");
        let n = FunctionExpr::mul(Const(2.0), FunctionExpr::neg(X));
        assert_eq!(n.to_string(), "2*(-x)");
        assert_eq!(Const(-0.5).to_string(), "-0.5");
        assert_eq!(FunctionExpr::mul(X, Const(-0.5)).to_string(), "x*(-0.5)");
    }

    #[test]
    fn substitution_shifts() {
        let e = parse("sin(2*x)").unwrap();
        let s = e.affine_substitute(-1.0, 0.5);
        assert!((s.eval(0.2) - (2.0f64 * (0.3)).sin()).abs() < 1e-15);
    }
}
