//! Sign sequences of bifurcation leaves and the indices of the connected
//! component of the space of Lorentzian metrics containing a torus or a
//! Klein bottle.
//!
//! A sign `(-1)^{s_j}` is stored as `+1` or `-1`; `s_j = 1` encodes `-`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::classify::{BottleInvariant1, BottleInvariant2, TorusInvariant};
use crate::fnprofile::{components, FunctionProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComponentsError {
    #[error("invalid sign `{0}`, expected `+` or `-`")]
    BadSign(char),
    #[error("profile must be even, 2-periodic and nonzero at 0 and 1")]
    Precondition,
    #[error("marks 0 and 1 are required")]
    MissingSouls,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SignSeq {
    pub signs: Vec<i8>,
    pub cyclic: bool,
}

impl SignSeq {
    pub fn linear(signs: Vec<i8>) -> Self {
        SignSeq { signs, cyclic: false }
    }

    pub fn cyclic(signs: Vec<i8>) -> Self {
        SignSeq { signs, cyclic: true }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// `Σ_j (-1)^{j + s_j}` with `j` starting at 1.
    pub fn alternating_sum(&self) -> i64 {
        self.signs.iter().enumerate().map(|(i, &s)| if i % 2 == 0 { -(s as i64) } else { s as i64 }).sum()
    }

    pub fn is_alternating(&self) -> bool {
        self.signs.windows(2).all(|w| w[0] != w[1]) && !(self.cyclic && self.len() >= 2 && self.signs[0] == self.signs[self.len() - 1])
    }
}

impl fmt::Display for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cyclic {
            write!(f, "cyclic:")?;
        }
        for &s in &self.signs {
            write!(f, "{}", if s > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

impl FromStr for SignSeq {
    type Err = ComponentsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (cyclic, body) = match s.strip_prefix("cyclic:") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let signs = body
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '+' => Ok(1),
                '-' | '−' => Ok(-1),
                other => Err(ComponentsError::BadSign(other)),
            })
            .collect::<Result<_, _>>()?;
        Ok(SignSeq { signs, cyclic })
    }
}

/// Reduced sequence: delete the first pair of equal neighbours until the
/// sequence alternates; for a cyclic sequence the ends are neighbours too.
pub fn reduce(seq: &SignSeq) -> SignSeq {
    // A stack performs the leftmost-first deletions in one pass.
    let mut out: Vec<i8> = Vec::with_capacity(seq.len());
    for &s in &seq.signs {
        if out.last() == Some(&s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    if seq.cyclic {
        while out.len() >= 2 && out[0] == out[out.len() - 1] {
            out.pop();
            out.remove(0);
        }
    }
    SignSeq { signs: out, cyclic: seq.cyclic }
}

/// Winding, in turns, of the cones along a broken light geodesic.
pub fn enrollment(seq: &SignSeq) -> f64 {
    seq.alternating_sum() as f64 / 4.0
}

/// Reeb-type index `r(T)` of a torus, with the band counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusComponentIndex {
    pub r: usize,
    pub k_plus: usize,
    pub k_minus: usize,
}

fn sign_of(p: &FunctionProfile, x: f64) -> i8 {
    if p.f(x) < 0.0 { -1 } else { 1 }
}

/// Signs of `f̄` at the marks, in cyclic order.
pub fn torus_signs(inv: &TorusInvariant) -> SignSeq {
    SignSeq::cyclic(inv.marks.iter().map(|&x| sign_of(&inv.fbar, x)).collect())
}

pub fn torus_r(inv: &TorusInvariant) -> TorusComponentIndex {
    torus_r_from_signs(&torus_signs(inv))
}

pub fn torus_r_from_signs(seq: &SignSeq) -> TorusComponentIndex {
    let n = seq.len() as i64;
    let sigma = seq.alternating_sum();
    let l = reduce(&SignSeq::cyclic(seq.signs.clone())).len();
    debug_assert_eq!(l as i64, sigma.abs());
    TorusComponentIndex { r: l / 2, k_plus: ((n + sigma) / 2) as usize, k_minus: ((n - sigma) / 2) as usize }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusComponentSet {
    /// Tori modelled on `f` occur in every component.
    AllComponents,
    /// Only the component of flat metrics.
    FlatOnly,
}

pub fn changes_sign(p: &FunctionProfile) -> bool {
    let cs = components(p);
    cs.components.iter().any(|c| c.sign > 0) && cs.components.iter().any(|c| c.sign < 0)
}

pub fn torus_component_set(p: &FunctionProfile) -> TorusComponentSet {
    if changes_sign(p) { TorusComponentSet::AllComponents } else { TorusComponentSet::FlatOnly }
}

/// Component of a Klein bottle: `(±n_abs, m̄)` up to the sign of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BottleComponentIndex {
    pub n_abs: usize,
    /// `0` for time-orientable, `1` for space-orientable; only for even `n_abs`.
    pub m_bar: Option<u8>,
    pub temporal_orientable: bool,
    pub spatial_orientable: bool,
}

impl BottleComponentIndex {
    fn even(n_abs: usize, temporal: bool) -> Self {
        BottleComponentIndex {
            n_abs,
            m_bar: Some(if temporal { 0 } else { 1 }),
            temporal_orientable: temporal,
            spatial_orientable: !temporal,
        }
    }
}

/// Type 1: flat component, time-orientable iff the number of negative marks is even.
pub fn bottle1_component(inv: &BottleInvariant1) -> BottleComponentIndex {
    let negatives = inv.marks.iter().filter(|&&x| sign_of(&inv.fbar, x) < 0).count();
    BottleComponentIndex::even(0, negatives % 2 == 0)
}

/// Set of components realized by type-1 bottles modelled on `f`.
pub fn bottle1_component_set(p: &FunctionProfile) -> BottleComponentSet {
    let cs = components(p);
    let pos = cs.components.iter().any(|c| c.sign > 0);
    let neg = cs.components.iter().any(|c| c.sign < 0);
    let mut v = Vec::new();
    if pos {
        v.push((0, 0));
    }
    if neg {
        v.push((0, 1));
    }
    BottleComponentSet::Finite(v)
}

/// `n_abs` from the signs of `ζ_1, …, ζ_k` (souls first and last).
pub fn bottle2_nabs_from_signs(signs: &[i8]) -> BottleComponentIndex {
    let k = signs.len();
    let s = |v: i8| usize::from(v < 0);
    let (s1, sk) = (s(signs[0]), s(signs[k - 1]));
    let n_abs = if (s1 + sk + k) % 2 == 0 {
        reduce(&SignSeq::linear(signs[1..k - 1].to_vec())).len()
    } else {
        reduce(&SignSeq::linear(signs[..k - 1].to_vec())).len()
    };
    debug_assert_eq!(n_abs % 2, (s1 + sk) % 2);
    if n_abs % 2 == 1 {
        return BottleComponentIndex { n_abs, m_bar: None, temporal_orientable: false, spatial_orientable: false };
    }
    // Even n_abs forces souls of the same sign.
    BottleComponentIndex::even(n_abs, signs[0] < 0)
}

/// Type 2: signs of `f̄` at the marks of `[0, 1]` in increasing order.
pub fn bottle2_nabs(inv: &BottleInvariant2) -> Result<BottleComponentIndex, ComponentsError> {
    let eps = 1e-7;
    let zetas: Vec<f64> = inv.marks.iter().copied().filter(|&x| x <= 1.0 + eps).collect();
    if zetas.len() < 2 || zetas[0].abs() > eps || (zetas[zetas.len() - 1] - 1.0).abs() > eps {
        return Err(ComponentsError::MissingSouls);
    }
    let signs: Vec<i8> = zetas.iter().map(|&x| sign_of(&inv.fbar, x)).collect();
    Ok(bottle2_nabs_from_signs(&signs))
}

/// Subset of `Z × Z/2Z` indexing components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BottleComponentSet {
    Finite(Vec<(i64, u8)>),
    /// `2Z × {m̄}`.
    EvenTimes(u8),
    /// `Z × Z/2Z`.
    All,
}

impl BottleComponentSet {
    pub fn contains(&self, n: i64, m: u8) -> bool {
        match self {
            BottleComponentSet::Finite(v) => v.contains(&(n, m)),
            BottleComponentSet::EvenTimes(mb) => n % 2 == 0 && m == *mb,
            BottleComponentSet::All => m <= 1,
        }
    }
}

impl fmt::Display for BottleComponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BottleComponentSet::Finite(v) => {
                let items: Vec<String> = v.iter().map(|(n, m)| format!("({n},{m})")).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            BottleComponentSet::EvenTimes(m) => write!(f, "2Z x {{{m}}}"),
            BottleComponentSet::All => write!(f, "Z x Z/2Z"),
        }
    }
}

/// Components realized by type-2 bottles modelled on an even 2-periodic `f`.
pub fn bottle2_component_set(p: &FunctionProfile) -> Result<BottleComponentSet, ComponentsError> {
    if p.domain.period().is_none_or(|t| (t - 2.0).abs() > 1e-12) {
        return Err(ComponentsError::Precondition);
    }
    let thr = 100.0 * p.tol * p.value_scale();
    let (f0, f1) = (p.f(0.0), p.f(1.0));
    if f0.abs() <= thr || f1.abs() <= thr || p.grid().iter().any(|&x| (p.f(x) - p.f(-x)).abs() > thr) {
        return Err(ComponentsError::Precondition);
    }
    Ok(if !changes_sign(p) {
        BottleComponentSet::Finite(vec![(0, if f0 > 0.0 { 1 } else { 0 })])
    } else if f0 * f1 > 0.0 {
        BottleComponentSet::EvenTimes(if f0 < 0.0 { 0 } else { 1 })
    } else {
        BottleComponentSet::All
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> SignSeq {
        t.parse().unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce(&s("++")).len(), 0);
        assert_eq!(reduce(&s("cyclic:+-+-")).len(), 4);
        assert_eq!(reduce(&s("--+-+-++")), s("+-+-"));
        assert_eq!(enrollment(&s("+-")), -0.5);
        assert_eq!(enrollment(&s("--+-+-++")).abs(), 1.0);
        assert_eq!(enrollment(&s("++")), 0.0);
    }

    #[test]
    fn torus_r_examples() {
        assert_eq!(torus_r_from_signs(&s("cyclic:")).r, 0);
        assert_eq!(torus_r_from_signs(&s("cyclic:+-+-")).r, 2);
        assert_eq!(torus_r_from_signs(&s("cyclic:++")).r, 0);
    }

    #[test]
    fn nabs_examples() {
        let b = bottle2_nabs_from_signs(&[-1, -1]);
        assert_eq!((b.n_abs, b.temporal_orientable, b.m_bar), (0, true, Some(0)));
        assert_eq!(bottle2_nabs_from_signs(&[1, -1]).n_abs, 1);
        assert_eq!(bottle2_nabs_from_signs(&[-1, 1, -1]).n_abs, 2);
    }

    #[test]
    fn round_trip_text() {
        for t in ["cyclic:+-+-", "--+", ""] {
            assert_eq!(s(t).to_string(), t);
        }
        assert!("+x".parse::<SignSeq>().is_err());
    }
}
