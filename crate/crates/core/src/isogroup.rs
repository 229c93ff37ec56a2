//! The generic isometry group as a right-angled Coxeter group, word normal
//! forms, the `(k, ℓ)` invariants, the orbifold `E^u/G^K` and the census of
//! minimal torsion-free quotients.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::fnprofile::{CaseLabel, ComponentSet, ContiguityGraph, Domain, SymmetryCase, SymmetryClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("unknown generator {index} (presentation has {n})")]
    UnknownGenerator { index: usize, n: usize },
    #[error("invalid row {label} (k = {k}, ℓ = {ell}{}): {reason}", j.map(|j| format!(", j = {j}")).unwrap_or_default())]
    InvalidRow { label: CaseLabel, k: usize, ell: i64, j: Option<usize>, reason: String },
    #[error("j = {j} out of range {lo}..={hi} for {label}")]
    JOutOfRange { label: CaseLabel, j: usize, lo: usize, hi: usize },
    #[error("parity violation: k + j = {0} must be even")]
    Parity(usize),
    #[error("case (2+b) requires the split (k1, ℓ1)")]
    MissingSplit,
    #[error("invalid split (k1, ℓ1) = ({k1}, {ell1})")]
    InvalidSplit { k1: usize, ell1: i64 },
    #[error("no elliptic products: the minimal index is 2 and the quotient is the orbifold itself")]
    NoEllipticProducts,
    #[error("the case label is undefined for this profile (no subtype)")]
    NoCaseLabel,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Right-angled Coxeter presentation: every generator is an involution and
/// two generators commute iff their components are contiguous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterPresentation {
    pub n: usize,
    /// Unordered commuting pairs `(a, b)` with `a < b`.
    pub commuting: BTreeSet<(usize, usize)>,
    /// Index translation induced by the minimal period, if any.
    pub shift: Option<Vec<usize>>,
}

impl CoxeterPresentation {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let commuting = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
        CoxeterPresentation { n, commuting, shift: None }
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        a == b || self.commuting.contains(&(a.min(b), a.max(b)))
    }

    /// Relators `σ_a²` and `(σ_a σ_b)²`.
    pub fn relations(&self) -> Vec<Vec<usize>> {
        let mut r: Vec<Vec<usize>> = (0..self.n).map(|a| vec![a, a]).collect();
        r.extend(self.commuting.iter().map(|&(a, b)| vec![a, b, a, b]));
        r
    }
}

impl fmt::Display for CoxeterPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (0..self.n).map(|i| format!("s{i}")).collect();
        let rels: Vec<String> = self
            .relations()
            .iter()
            .map(|w| if w.len() == 2 { format!("s{}^2", w[0]) } else { format!("(s{} s{})^2", w[0], w[1]) })
            .collect();
        write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

pub fn presentation(graph: &ContiguityGraph) -> CoxeterPresentation {
    CoxeterPresentation::new(graph.n_vertices(), graph.edges.iter().map(|e| (e.a, e.b)))
}

/// Presentation with the index translation induced by the minimal period.
pub fn presentation_with_symmetry(graph: &ContiguityGraph, sym: &SymmetryClass) -> CoxeterPresentation {
    let mut p = presentation(graph);
    if let Some(t) = sym.period {
        p.shift = perm_of(graph, |x| x + t).map(|(v, _)| v);
    }
    p
}

/// Which cancellable pair to remove first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionOrder {
    LeftFirst,
    RightFirst,
}

fn find_cancellation(w: &[usize], p: &CoxeterPresentation, order: ReductionOrder) -> Option<(usize, usize)> {
    let n = w.len();
    let scan = |i: usize| -> Option<(usize, usize)> {
        for j in i + 1..n {
            if w[j] == w[i] {
                return Some((i, j));
            }
            if !p.commute(w[i], w[j]) {
                return None;
            }
        }
        None
    };
    match order {
        ReductionOrder::LeftFirst => (0..n).find_map(scan),
        ReductionOrder::RightFirst => (0..n).rev().find_map(scan),
    }
}

/// Normal form of a word: cancel pairs `s … s` whose middle commutes with
/// `s` until the word is reduced, then take the lexicographically least word
/// among those obtained by swapping adjacent commuting letters.
pub fn normal_form(w: &[usize], p: &CoxeterPresentation) -> Result<Vec<usize>, IsoError> {
    normal_form_with(w, p, ReductionOrder::LeftFirst)
}

pub fn normal_form_with(w: &[usize], p: &CoxeterPresentation, order: ReductionOrder) -> Result<Vec<usize>, IsoError> {
    if let Some(&index) = w.iter().find(|&&a| a >= p.n) {
        return Err(IsoError::UnknownGenerator { index, n: p.n });
    }
    let mut w = w.to_vec();
    while let Some((i, j)) = find_cancellation(&w, p, order) {
        w.remove(j);
        w.remove(i);
    }
    // Greedy lexicographic linearisation of the commutation class.
    let mut out = Vec::with_capacity(w.len());
    while !w.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..w.len() {
            if w[..i].iter().all(|&b| p.commute(b, w[i]) && b != w[i]) && best.is_none_or(|b| w[i] < w[b]) {
                best = Some(i);
            }
        }
        let i = best.expect("first letter is always available");
        out.push(w.remove(i));
    }
    Ok(out)
}

/// Whether two words represent the same group element.
pub fn words_equal(a: &[usize], b: &[usize], p: &CoxeterPresentation) -> Result<bool, IsoError> {
    Ok(normal_form(a, p)? == normal_form(b, p)?)
}

/// Quotient data `(case, k, ℓ)` driving the orbifold and census tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseData {
    pub label: CaseLabel,
    pub k: usize,
    pub ell: i64,
    /// `(k1, ℓ1)` for case (2+b).
    pub split: Option<(usize, i64)>,
}

impl CaseData {
    pub fn new(label: CaseLabel, k: usize, ell: i64) -> Self {
        CaseData { label, k, ell, split: None }
    }

    pub fn with_split(mut self, k1: usize, ell1: i64) -> Self {
        self.split = Some((k1, ell1));
        self
    }

    pub fn has_saddles(&self) -> bool {
        self.k > 0
    }

    pub fn has_elliptic_products(&self) -> bool {
        self.k > 0 || matches!(self.label.case(), SymmetryCase::C1b | SymmetryCase::C3b | SymmetryCase::C3c)
    }

    /// Minimal index `ν^K` of a torsion-free subgroup of `Π^K`.
    pub fn minimal_index(&self) -> u32 {
        if self.has_elliptic_products() {
            4
        } else {
            2
        }
    }
}

/// Orbit data of `Is(f)` acting on the contiguity graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlData {
    pub k: usize,
    pub ell: i64,
    pub vertex_orbits: usize,
    pub edge_orbits: usize,
    /// Orbit label of every vertex.
    pub vertex_orbit: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn orbits(n: usize, perms: &[&[usize]]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    for p in perms {
        for (i, &j) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut ids: Vec<usize> = roots.clone();
    ids.sort_unstable();
    ids.dedup();
    roots.iter().map(|r| ids.binary_search(r).unwrap()).collect()
}

/// `k = |E/G|` and `ℓ = |V/G| − |E/G|` for a group `G` given by generators
/// acting on vertices and edges (edges are never inverted).
pub fn kl_from_action(n_vertices: usize, n_edges: usize, perms: &[(Vec<usize>, Vec<usize>)]) -> KlData {
    let vp: Vec<&[usize]> = perms.iter().map(|(v, _)| v.as_slice()).collect();
    let ep: Vec<&[usize]> = perms.iter().map(|(_, e)| e.as_slice()).collect();
    let vertex_orbit = orbits(n_vertices, &vp);
    let eo = orbits(n_edges, &ep);
    let vertex_orbits = vertex_orbit.iter().max().map_or(0, |m| m + 1);
    let edge_orbits = eo.iter().max().map_or(0, |m| m + 1);
    KlData { k: edge_orbits, ell: vertex_orbits as i64 - edge_orbits as i64, vertex_orbits, edge_orbits, vertex_orbit }
}

type Perm = (Vec<usize>, Vec<usize>);

fn zero_index(cs: &ComponentSet, x: f64) -> Option<usize> {
    let tol = 1e-6 * x.abs().max(1.0);
    cs.zeros.iter().position(|z| match cs.domain {
        Domain::Periodic { period } => {
            let d = (z.x0 - x).rem_euclid(period);
            d.min(period - d) <= tol
        }
        Domain::Interval { .. } => (z.x0 - x).abs() <= tol,
    })
}

fn perm_of(graph: &ContiguityGraph, map: impl Fn(f64) -> f64) -> Option<Perm> {
    let cs = &graph.components;
    let v: Option<Vec<usize>> = cs.components.iter().map(|c| cs.locate(map(c.midpoint()))).collect();
    let e: Option<Vec<usize>> = graph
        .edges
        .iter()
        .map(|e| {
            let z = zero_index(cs, map(cs.zeros[e.zero].x0))?;
            graph.edges.iter().position(|f| f.zero == z)
        })
        .collect();
    Some((v?, e?))
}

/// `(k, ℓ)` and the case label of a profile's graph and symmetry class.
pub fn kl_invariants(graph: &ContiguityGraph, sym: &SymmetryClass) -> Result<(CaseData, KlData), IsoError> {
    let label = sym.label().ok_or(IsoError::NoCaseLabel)?;
    let mut perms = Vec::new();
    if let Some(t) = sym.period {
        perms.extend(perm_of(graph, |x| x + t));
    }
    for &c in &sym.generators {
        perms.extend(perm_of(graph, move |x| 2.0 * c - x));
    }
    let kl = kl_from_action(graph.n_vertices(), graph.edges.len(), &perms);
    Ok((CaseData::new(label, kl.k, kl.ell), kl))
}

/// Underlying surfaces of the orbifolds `E^u/G^K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Surface {
    Sphere,
    ProjectivePlane,
    Disk,
    Torus,
    KleinBottle,
    Mobius,
    Annulus,
}

impl Surface {
    pub fn symbol(&self) -> char {
        match self {
            Surface::Sphere => 'S',
            Surface::ProjectivePlane => 'P',
            Surface::Disk => 'D',
            Surface::Torus => 'T',
            Surface::KleinBottle => 'K',
            Surface::Mobius => 'M',
            Surface::Annulus => 'A',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbifoldData {
    pub surface: Surface,
    pub n_elliptic: usize,
    pub p_int: usize,
    pub p_bd: usize,
}

fn invalid(case: &CaseData, j: Option<usize>, reason: impl Into<String>) -> IsoError {
    IsoError::InvalidRow { label: case.label, k: case.k, ell: case.ell, j, reason: reason.into() }
}

/// Orbifold structure of `E^u/G^K`.
pub fn orbifold(case: &CaseData) -> Result<OrbifoldData, IsoError> {
    use CaseLabel as L;
    let (surface, dp, p_bd) = match case.label {
        L::C0 => (Surface::Sphere, 0, 0),
        L::C1a => (Surface::ProjectivePlane, 0, 0),
        L::C1b => (Surface::Disk, -1, 1),
        L::C2PlusU => (Surface::Sphere, 2, 0),
        L::C2PlusB | L::C2Minus => (Surface::Torus, 0, 0),
        L::C3a => (Surface::KleinBottle, 0, 0),
        L::C3b => (Surface::Mobius, -1, 1),
        L::C3cPlusU => (Surface::Disk, -1, 2),
        L::C3cPlusB => (Surface::Annulus, -2, 2),
    };
    let p_int = case.ell + dp;
    if p_int < 0 {
        return Err(invalid(case, None, format!("p_int = {p_int} < 0")));
    }
    Ok(OrbifoldData { surface, n_elliptic: case.k, p_int: p_int as usize, p_bd })
}

/// Topological signature `(g; p)^±` of `H/Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientSignature {
    pub g: u32,
    pub p: u32,
    pub orientable: bool,
    pub chi: i64,
}

impl QuotientSignature {
    pub fn new(g: u32, p: u32, orientable: bool) -> Self {
        let chi = if orientable { 2 - 2 * g as i64 - p as i64 } else { 2 - g as i64 - p as i64 };
        QuotientSignature { g, p, orientable, chi }
    }

    /// Rank of the (free) fundamental group when `p >= 1`.
    pub fn free_rank(&self) -> Option<u32> {
        (self.p >= 1).then(|| if self.orientable { 2 * self.g + self.p - 1 } else { self.g + self.p - 1 })
    }
}

impl fmt::Display for QuotientSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {}){}", self.g, self.p, if self.orientable { "+" } else { "-" })
    }
}

fn binom(n: i64, m: i64) -> u64 {
    if m < 0 || n < 0 || m > n {
        return 0;
    }
    let m = m.min(n - m);
    let mut r: u64 = 1;
    for i in 0..m {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

fn pow2(e: i64) -> u64 {
    if e < 0 {
        0
    } else {
        1u64 << e
    }
}

/// Row shape of the census for a case.
struct RowShape {
    /// Inclusive `j` range.
    lo: i64,
    hi: i64,
    parity: bool,
    min_ell: i64,
    needs_k: bool,
}

fn shape(case: &CaseData) -> RowShape {
    use CaseLabel as L;
    let l = case.ell;
    let (lo, hi, parity, min_ell, needs_k) = match case.label {
        L::C0 => (0, l, true, 1, true),
        L::C1a => (0, l, true, 1, true),
        L::C1b => (0, l - 1, false, 1, false),
        L::C2PlusU if l == 0 => (0, 2, true, 0, true),
        L::C2PlusU => (0, l + 2, true, 0, true),
        L::C2PlusB => (0, l, true, 2, true),
        L::C2Minus => (0, l, true, 1, true),
        L::C3a => (0, l, true, 1, true),
        L::C3b => (0, l - 1, false, 1, false),
        L::C3cPlusU => (0, l - 1, false, 1, false),
        L::C3cPlusB => (0, l - 2, false, 2, false),
    };
    RowShape { lo, hi, parity, min_ell, needs_k }
}

/// Raw `(g, p, orientable)` of a census row, before validation.
fn raw_signature(case: &CaseData, j: i64) -> (i64, i64, bool) {
    use CaseLabel as L;
    let (k, l) = (case.k as i64, case.ell);
    match case.label {
        L::C0 => ((k + j) / 2 - 1, 2 * l - j, true),
        L::C1a => (k + j, 2 * l - j, false),
        L::C1b if k + j == 0 => (0, 2 * l - 1, true),
        L::C1b => (k + j, 2 * l - j - 1, false),
        L::C2PlusU => ((k + j) / 2 - 1, 2 * l + 4 - j, true),
        L::C2PlusB | L::C2Minus => ((k + j) / 2 + 1, 2 * l - j, true),
        L::C3a => (k + j + 2, 2 * l - j, false),
        L::C3b => (k + j + 2, 2 * l - j - 1, false),
        L::C3cPlusU => (k + j, 2 * l - j, false),
        L::C3cPlusB => (k + j + 2, 2 * l - j - 2, false),
    }
}

/// The `χ(Γ)` column.
pub fn chi_column(case: &CaseData) -> i64 {
    use CaseLabel as L;
    let (k, l) = (case.k as i64, case.ell);
    match case.label {
        L::C0 => 4 - k - 2 * l,
        L::C1a => 2 - k - 2 * l,
        L::C1b if k == 0 => 3 - 2 * l,
        L::C1b => 3 - 2 * l - k,
        L::C2PlusU | L::C2PlusB | L::C2Minus | L::C3a => -k - 2 * l,
        L::C3b => 1 - 2 * l - k,
        L::C3cPlusU | L::C3cPlusB => 2 - 2 * l - k,
    }
}

/// The "total" column.
pub fn total_column(case: &CaseData) -> u64 {
    use CaseLabel as L;
    let l = case.ell;
    match case.label {
        L::C0 | L::C1b | L::C3cPlusU | L::C3cPlusB => pow2(l - 1),
        L::C1a | L::C3b => pow2(l),
        L::C2PlusU if l == 0 => 2,
        L::C2PlusU | L::C2PlusB | L::C2Minus => 3 * pow2(l - 1),
        L::C3a => pow2(l + 1),
    }
}

fn check_row(case: &CaseData, j: usize) -> Result<(), IsoError> {
    if !case.has_elliptic_products() {
        return Err(IsoError::NoEllipticProducts);
    }
    let s = shape(case);
    if s.needs_k && case.k == 0 {
        return Err(invalid(case, Some(j), "this row requires k > 0"));
    }
    let ji = j as i64;
    if case.label == CaseLabel::C2PlusU && case.ell == 0 && j == 1 {
        return Err(IsoError::JOutOfRange { label: case.label, j, lo: 0, hi: 2 });
    }
    if ji < s.lo || ji > s.hi {
        return Err(IsoError::JOutOfRange { label: case.label, j, lo: s.lo.max(0) as usize, hi: s.hi.max(0) as usize });
    }
    if case.label == CaseLabel::C2PlusU && case.ell == 0 && case.k % 2 == 1 {
        return Err(invalid(case, Some(j), "ℓ = 0 forces k even"));
    }
    if s.parity && (case.k + j) % 2 == 1 {
        return Err(IsoError::Parity(case.k + j));
    }
    let (g, p, _) = raw_signature(case, ji);
    if p <= 0 {
        return Err(invalid(case, Some(j), format!("p = {p}: the quotient would be closed")));
    }
    if g < 0 {
        return Err(invalid(case, Some(j), format!("g = {g} < 0")));
    }
    if case.ell < s.min_ell {
        return Err(invalid(case, Some(j), format!("ℓ must be at least {}", s.min_ell)));
    }
    Ok(())
}

/// Signature of the quotients counted in row `j`.
pub fn signature(case: &CaseData, j: usize) -> Result<QuotientSignature, IsoError> {
    check_row(case, j)?;
    let (g, p, orientable) = raw_signature(case, j as i64);
    // A non-orientable surface of genus 0 does not exist: this only happens
    // for k + j = 0 without elliptic points, where the cover is a sphere.
    let orientable = orientable || g == 0;
    let sig = QuotientSignature::new(g as u32, p as u32, orientable);
    debug_assert_eq!(sig.chi, chi_column(case));
    Ok(sig)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubgroupCount {
    pub per_j: u64,
    pub total: u64,
    pub chi: i64,
}

/// Number of subgroups (up to conjugacy in `Π`) with the topology of row `j`.
pub fn count_subgroups(case: &CaseData, j: usize) -> Result<SubgroupCount, IsoError> {
    use CaseLabel as L;
    check_row(case, j)?;
    let (l, ji) = (case.ell, j as i64);
    let per_j = match case.label {
        L::C0 => binom(l, ji),
        L::C1a => 2 * binom(l, ji),
        L::C1b if case.k + j == 0 => 1,
        L::C1b | L::C3cPlusU => binom(l - 1, ji),
        L::C2PlusU if l == 0 => 1,
        L::C2PlusU => (0..=2).map(|i| binom(l, ji - i)).sum(),
        L::C2PlusB => {
            let (k1, l1) = case.split.ok_or(IsoError::MissingSplit)?;
            if k1 > case.k || l1 < 1 || l1 >= l {
                return Err(IsoError::InvalidSplit { k1, ell1: l1 });
            }
            let star: u64 = (0..=l1.min(ji))
                .filter(|j1| (k1 as i64 + j1) % 2 == 0)
                .map(|j1| binom(l1, j1) * binom(l - l1, ji - j1))
                .sum();
            2 * binom(l, ji) + 2 * star
        }
        L::C2Minus => 3 * binom(l, ji),
        L::C3a => 4 * binom(l, ji),
        L::C3b => 2 * binom(l - 1, ji),
        L::C3cPlusB => 2 * binom(l - 2, ji),
    };
    Ok(SubgroupCount { per_j, total: total_column(case), chi: chi_column(case) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub j: usize,
    pub per_j: u64,
    pub signature: QuotientSignature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub case: CaseData,
    pub rows: Vec<CensusRow>,
    /// Values of `j` in the printed range that were rejected, with the reason.
    pub rejected: Vec<(usize, String)>,
    pub total: u64,
    pub chi: i64,
}

impl Census {
    pub fn sum_per_j(&self) -> u64 {
        self.rows.iter().map(|r| r.per_j).sum()
    }
}

/// All valid census rows for the case.
pub fn census(case: &CaseData) -> Result<Census, IsoError> {
    if !case.has_elliptic_products() {
        return Err(IsoError::NoEllipticProducts);
    }
    if case.label == CaseLabel::C2PlusB && case.split.is_none() {
        return Err(IsoError::MissingSplit);
    }
    let s = shape(case);
    let mut rows = Vec::new();
    let mut rejected = Vec::new();
    for j in s.lo.max(0)..=s.hi.max(-1) {
        let j = j as usize;
        match count_subgroups(case, j).and_then(|c| Ok((c, signature(case, j)?))) {
            Ok((c, sig)) => rows.push(CensusRow { j, per_j: c.per_j, signature: sig }),
            Err(IsoError::Parity(_)) | Err(IsoError::JOutOfRange { .. }) => {}
            Err(e @ IsoError::InvalidRow { .. }) => rejected.push((j, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(Census { case: *case, rows, rejected, total: total_column(case), chi: chi_column(case) })
}

/// A character `ρ: Π^K → μ2` described by signs on the generators
/// (normalised at the base vertex) and the value on the extra involution of
/// cases (1a) and (1b).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub values: Vec<i8>,
    pub extra: Option<i8>,
}

/// Input of [`enumerate_characters`]: a finite graph with the involution
/// `τ` induced on its vertices by the reflection of `f`, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterProblem {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub tau: Option<Vec<usize>>,
    pub case: SymmetryCase,
}

impl CharacterProblem {
    pub fn from_graph(graph: &ContiguityGraph, sym: &SymmetryClass) -> Result<Self, IsoError> {
        let tau = match sym.case {
            SymmetryCase::C0 => None,
            SymmetryCase::C1a | SymmetryCase::C1b => {
                let c = sym.generators[0];
                Some(perm_of(graph, |x| 2.0 * c - x).ok_or(IsoError::Unsupported("reflection does not act".into()))?.0)
            }
            _ => return Err(IsoError::Unsupported("characters are enumerated for finite Is(f) only".into())),
        };
        Ok(CharacterProblem {
            n_vertices: graph.n_vertices(),
            edges: graph.edges.iter().map(|e| (e.a, e.b)).collect(),
            tau,
            case: sym.case,
        })
    }

    /// Base vertex `α0`: the vertex fixed by `τ` in case (1b), vertex 0 otherwise.
    pub fn base(&self) -> usize {
        match (&self.tau, self.case) {
            (Some(t), SymmetryCase::C1b) => (0..self.n_vertices).find(|&i| t[i] == i).unwrap_or(0),
            _ => 0,
        }
    }
}

/// Brute-force enumeration of the characters whose kernel is torsion-free
/// and of index 2 in `Π^K`.
pub fn enumerate_characters(prob: &CharacterProblem) -> Result<Vec<Character>, IsoError> {
    let n = prob.n_vertices;
    if n > 24 {
        return Err(IsoError::Unsupported(format!("{n} vertices is too many for enumeration")));
    }
    if !matches!(prob.case, SymmetryCase::C0 | SymmetryCase::C1a | SymmetryCase::C1b) {
        return Err(IsoError::Unsupported("characters are enumerated for finite Is(f) only".into()));
    }
    let base = prob.base();
    let extras: &[Option<i8>] = match prob.case {
        SymmetryCase::C1a => &[Some(1), Some(-1)],
        SymmetryCase::C1b => &[Some(-1)],
        _ => &[None],
    };
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let val = |i: usize| if mask >> i & 1 == 1 { -1i8 } else { 1 };
        if val(base) != 1 {
            continue;
        }
        if prob.edges.iter().any(|&(a, b)| val(a) * val(b) != -1) {
            continue;
        }
        if let Some(t) = &prob.tau {
            if (0..n).any(|i| val(t[i]) != val(i)) {
                continue;
            }
        }
        let values: Vec<i8> = (0..n).map(val).collect();
        for &extra in extras {
            out.push(Character { values: values.clone(), extra });
        }
    }
    Ok(out)
}

/// Closed-form number of characters: `2^{|X|}`.
pub fn expected_character_count(case: SymmetryCase, ell: i64) -> Option<u64> {
    match case {
        SymmetryCase::C0 | SymmetryCase::C1b => Some(pow2(ell - 1)),
        SymmetryCase::C1a => Some(pow2(ell)),
        _ => None,
    }
}

/// Number of torsion-free normal subgroups of index 4 in `Π` (finite `Is(f)`, with saddles).
pub fn index4_subgroup_count(case: SymmetryCase, k: usize, ell: i64) -> Option<u64> {
    let p3 = |e: i64| if e < 0 { 0 } else { 3u64.pow(e as u32) };
    let k = k as i64;
    match case {
        SymmetryCase::C0 if k > 0 => Some(pow2(k - 1) * p3(ell - 1)),
        SymmetryCase::C1a if k > 0 => Some(pow2(k - 1) * p3(ell)),
        SymmetryCase::C1b => Some(pow2(k) * p3(ell - 1)),
        _ => None,
    }
}

/// Group types whose deformation spaces are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupType {
    /// Fundamental group of a non-compact surface: free.
    Free(QuotientSignature),
    Torus,
    KleinBottle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeformationDims {
    pub dim_der: u32,
    pub dim_h1: u32,
}

/// Dimensions of `Der(Γ, R_ρ)` and `H¹(Γ, R_ρ)`; `twisted` means the
/// linear part `χ_ρ` is non-trivial (the group does not preserve the field).
pub fn deformation_dim(group: GroupType, twisted: bool) -> Result<DeformationDims, IsoError> {
    Ok(match group {
        GroupType::Free(sig) => {
            let r = sig.free_rank().ok_or_else(|| IsoError::Unsupported(format!("closed surface {sig}")))?;
            if twisted && r == 0 {
                return Err(IsoError::Unsupported("a trivial group has no twisted character".into()));
            }
            DeformationDims { dim_der: r, dim_h1: if twisted { r - 1 } else { r } }
        }
        GroupType::Torus => {
            if twisted {
                DeformationDims { dim_der: 1, dim_h1: 0 }
            } else {
                DeformationDims { dim_der: 2, dim_h1: 2 }
            }
        }
        GroupType::KleinBottle => {
            if twisted {
                DeformationDims { dim_der: 2, dim_h1: 1 }
            } else {
                DeformationDims { dim_der: 1, dim_h1: 1 }
            }
        }
    })
}
