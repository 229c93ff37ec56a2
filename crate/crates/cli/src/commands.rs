//! Command implementations. Every command returns a JSON value whose key
//! order is fixed by the report structs below.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use lks_core::classify::{
    self, canonical_bottle1, canonical_bottle2, canonical_elementary, canonical_torus, normalize_period,
    ClassifyError, Comparison, Invariant, Move,
    TorusInvariant,
};
use lks_core::components::{
    bottle1_component, bottle1_component_set, bottle2_component_set, bottle2_nabs, torus_component_set, torus_r,
    torus_signs, BottleComponentIndex, TorusComponentSet,
};
use lks_core::extension::{boundary_bands, leaf_space, light_leaf_complete, squares, LeafCompleteness};
use lks_core::fnprofile::{
    components, contiguity_graph, detect_symmetry, parse_real, read_profile, CaseLabel, ConfigError,
    FunctionProfile, Subtype,
};
use lks_core::geodesics::{self, EndReason, GeodesicError, GeodesicState};
use lks_core::isogroup::{census, kl_invariants, orbifold, CaseData, IsoError};

use crate::{svg, Cli, CliError, Command, Kind};

/// Rounds to 12 significant digits.
pub fn r(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn rv(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| r(x)).collect()
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn config_err(e: ConfigError) -> CliError {
    if e.is_syntax() {
        CliError::Parse(e.to_string())
    } else {
        CliError::Domain(e.to_string())
    }
}

fn classify_err(e: ClassifyError) -> CliError {
    match e {
        ClassifyError::Config(c) => config_err(c),
        e @ (ClassifyError::Syntax { .. } | ClassifyError::MissingKey(_)) => CliError::Parse(e.to_string()),
        e => CliError::Domain(e.to_string()),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_profile(path: &Path) -> Result<FunctionProfile, CliError> {
    read_profile(&read(path)?).map_err(config_err)
}

fn load_invariant(path: &Path) -> Result<Invariant, CliError> {
    Invariant::from_text(&read(path)?).map_err(classify_err)
}

fn real(text: &str, what: &str) -> Result<f64, CliError> {
    parse_real(text, 0).map_err(|e| CliError::Parse(format!("--{what}: {e}")))
}

fn reals(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|s| real(s.trim(), what)).collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let plot = cli.plot.as_deref();
    match &cli.command {
        Command::Analyze { profile } => analyze(&load_profile(profile)?, plot),
        Command::Quotients { profile, case, k, ell, split } => quotients(profile.as_deref(), case.as_deref(), *k, *ell, split.as_deref()),
        Command::Classify { invariant, profile, kind, t0, tau, marks } => {
            let inv = match (invariant, profile) {
                (Some(path), None) => load_invariant(path)?,
                (None, Some(path)) => build(&load_profile(path)?, *kind, t0.as_deref(), tau.as_deref(), marks.as_deref())?,
                _ => return Err(CliError::Parse("give exactly one of --invariant and --profile".into())),
            };
            classify_cmd(&inv)
        }
        Command::Compare { invariants, tol } => {
            if invariants.len() != 2 {
                return Err(CliError::Parse("compare needs exactly two --invariant files".into()));
            }
            compare(&load_invariant(&invariants[0])?, &load_invariant(&invariants[1])?, *tol)
        }
        Command::Components { invariant, profile } => match (invariant, profile) {
            (Some(path), None) => components_of_invariant(&load_invariant(path)?),
            (None, Some(path)) => components_of_profile(&load_profile(path)?),
            _ => Err(CliError::Parse("give exactly one of --invariant and --profile".into())),
        },
        Command::Geodesic { profile, x0, y0, p0, q0, t_end, table } => {
            let start = GeodesicState::new(real(x0, "x0")?, real(y0, "y0")?, real(p0, "p0")?, real(q0, "q0")?);
            geodesic(&load_profile(profile)?, start, real(t_end, "t-end")?, table.as_deref(), plot)
        }
        Command::Conjugate { profile, eps, c } => conjugate(&load_profile(profile)?, *eps, real(c, "C")?, plot),
    }
}

// ------------------------------------------------------------------ analyze

#[derive(Serialize)]
struct ProfileOut {
    function: String,
    domain: String,
}

fn profile_out(p: &FunctionProfile) -> ProfileOut {
    ProfileOut { function: p.expr.to_string(), domain: p.domain.to_string() }
}

#[derive(Serialize)]
struct ZeroOut {
    x: f64,
    kind: &'static str,
    derivative: f64,
    light_leaf: &'static str,
}

#[derive(Serialize)]
struct ComponentOut {
    left: f64,
    right: f64,
    sign: i8,
}

#[derive(Serialize)]
struct GraphOut {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    connected: bool,
}

#[derive(Serialize)]
struct SymmetryOut {
    case: String,
    subtype: &'static str,
    label: Option<String>,
    minimal_period: Option<f64>,
    reflection_centers: Vec<f64>,
    k: Option<usize>,
    ell: Option<i64>,
}

#[derive(Serialize)]
struct SquareOut {
    left: f64,
    right: f64,
    width: f64,
    sign: i8,
    ends: [String; 2],
}

#[derive(Serialize)]
struct HalfBandOut {
    zero_end: f64,
    open_end: f64,
    band: String,
    sign: i8,
}

#[derive(Serialize)]
struct LeafSpaceOut {
    segments: usize,
    junctions: usize,
    saddle_cycles: usize,
    branch_points: usize,
    total_length: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    command: &'static str,
    profile: ProfileOut,
    zeros: Vec<ZeroOut>,
    plateaus: Vec<[f64; 2]>,
    components: Vec<ComponentOut>,
    graph: GraphOut,
    symmetry: SymmetryOut,
    squares: Vec<SquareOut>,
    half_bands: Vec<HalfBandOut>,
    leaf_space: LeafSpaceOut,
}

fn subtype_str(s: Subtype) -> &'static str {
    match s {
        Subtype::PairUnilatere => "even_unilateral",
        Subtype::PairBilatere => "even_bilateral",
        Subtype::Impair => "odd",
        Subtype::NotApplicable => "none",
    }
}

fn analyze(p: &FunctionProfile, plot: Option<&Path>) -> Result<Value, CliError> {
    if p.is_constant() {
        return Err(CliError::Domain(
            "constant profile: constant curvature (flat) case, outside the non-constant analysis".into(),
        ));
    }
    let cs = components(p);
    let graph = contiguity_graph(p);
    let sym = detect_symmetry(p);
    let kl = kl_invariants(&graph, &sym).ok();
    let ls = leaf_space(p);
    let zeros = cs
        .zeros
        .iter()
        .map(|z| ZeroOut {
            x: r(z.x0),
            kind: if z.is_simple() { "simple" } else { "degenerate" },
            derivative: r(z.lambda),
            light_leaf: match light_leaf_complete(p, z) {
                LeafCompleteness::Complete => "complete",
                LeafCompleteness::SemiComplete(lks_core::extension::CompleteSide::YNegative) => "complete_for_y_negative",
                LeafCompleteness::SemiComplete(lks_core::extension::CompleteSide::YPositive) => "complete_for_y_positive",
            },
        })
        .collect();
    let report = AnalyzeReport {
        command: "analyze",
        profile: profile_out(p),
        zeros,
        plateaus: cs.plateaus.iter().map(|&(a, b)| [r(a), r(b)]).collect(),
        components: cs.components.iter().map(|c| ComponentOut { left: r(c.left), right: r(c.right), sign: c.sign }).collect(),
        graph: GraphOut {
            vertices: graph.n_vertices(),
            edges: graph.edges.iter().map(|e| [e.a, e.b]).collect(),
            connected: graph.is_connected(),
        },
        symmetry: SymmetryOut {
            case: sym.case.to_string(),
            subtype: subtype_str(sym.subtype),
            label: sym.label().map(|l| l.to_string()),
            minimal_period: sym.period.map(r),
            reflection_centers: rv(&sym.reflection_centers),
            k: kl.as_ref().map(|(c, _)| c.k),
            ell: kl.as_ref().map(|(c, _)| c.ell),
        },
        squares: squares(p)
            .iter()
            .map(|s| SquareOut {
                left: r(s.x_left),
                right: r(s.x_right),
                width: r(s.width()),
                sign: s.sign,
                ends: [format!("{:?}", s.left).to_lowercase(), format!("{:?}", s.right).to_lowercase()],
            })
            .collect(),
        half_bands: boundary_bands(p)
            .iter()
            .map(|h| HalfBandOut { zero_end: r(h.zero_end), open_end: r(h.open_end), band: format!("{:?}", h.band), sign: h.sign })
            .collect(),
        leaf_space: LeafSpaceOut {
            segments: ls.segments.len(),
            junctions: ls.junctions.len(),
            saddle_cycles: ls.saddle_cycles(),
            branch_points: ls.branch_points(),
            total_length: r(ls.total_length()),
        },
    };
    if let Some(path) = plot {
        let (lo, hi) = p.scan_window();
        let pts: Vec<(f64, f64)> = (0..=800).map(|i| lo + (hi - lo) * i as f64 / 800.0).map(|x| (x, p.f(x))).collect();
        let zs: Vec<f64> = cs.zeros.iter().map(|z| z.x0).collect();
        write_file(path, &svg::plot(&format!("f(x) = {}", p.expr), "x", "f", &pts, &zs, &[], &[]))?;
    }
    Ok(to_value(&report))
}

// ---------------------------------------------------------------- quotients

#[derive(Serialize)]
struct OrbifoldOut {
    surface: String,
    elliptic_points: usize,
    interior_punctures: usize,
    boundary_components: usize,
}

#[derive(Serialize)]
struct RowOut {
    j: usize,
    per_j: u64,
    signature: String,
    chi: i64,
}

#[derive(Serialize)]
struct RejectedOut {
    j: usize,
    reason: String,
}

#[derive(Serialize)]
struct QuotientsReport {
    command: &'static str,
    case: String,
    k: usize,
    ell: i64,
    split: Option<[i64; 2]>,
    minimal_index: u32,
    orbifold: Option<OrbifoldOut>,
    rows: Vec<RowOut>,
    rejected: Vec<RejectedOut>,
    total: Option<u64>,
    chi: Option<i64>,
    note: Option<String>,
}

fn iso_err(e: IsoError) -> CliError {
    CliError::Domain(e.to_string())
}

fn quotients(
    profile: Option<&Path>,
    case: Option<&str>,
    k: Option<usize>,
    ell: Option<i64>,
    split: Option<&str>,
) -> Result<Value, CliError> {
    let mut data = match (case, profile) {
        (Some(label), _) => {
            let l = CaseLabel::parse(label.trim_matches(|c| c == '(' || c == ')'))
                .ok_or_else(|| CliError::Parse(format!("unknown case label `{label}`")))?;
            let (Some(k), Some(ell)) = (k, ell) else {
                return Err(CliError::Parse("--case needs --k and --ell".into()));
            };
            CaseData::new(l, k, ell)
        }
        (None, Some(path)) => {
            let p = load_profile(path)?;
            if p.is_constant() {
                return Err(CliError::Domain("constant profile: no zero, no quotient census".into()));
            }
            let graph = contiguity_graph(&p);
            let sym = detect_symmetry(&p);
            match kl_invariants(&graph, &sym) {
                Ok((c, _)) => c,
                Err(IsoError::NoCaseLabel) if graph.components.is_elementary() => {
                    return Ok(to_value(&QuotientsReport {
                        command: "quotients",
                        case: sym.case.to_string(),
                        k: 0,
                        ell: 0,
                        split: None,
                        minimal_index: 2,
                        orbifold: None,
                        rows: Vec::new(),
                        rejected: Vec::new(),
                        total: None,
                        chi: None,
                        note: Some("elementary profile: no saddle, minimal index 2".into()),
                    }))
                }
                Err(e) => return Err(iso_err(e)),
            }
        }
        (None, None) => return Err(CliError::Parse("give --profile or --case/--k/--ell".into())),
    };
    if let Some(s) = split {
        let v = reals(s, "split")?;
        if v.len() != 2 || v[0] < 0.0 || v[0].fract() != 0.0 || v[1].fract() != 0.0 {
            return Err(CliError::Parse("--split expects `k1,l1`".into()));
        }
        data = data.with_split(v[0] as usize, v[1] as i64);
    }
    let orb = orbifold(&data).ok().map(|o| OrbifoldOut {
        surface: o.surface.symbol().to_string(),
        elliptic_points: o.n_elliptic,
        interior_punctures: o.p_int,
        boundary_components: o.p_bd,
    });
    let mut report = QuotientsReport {
        command: "quotients",
        case: data.label.to_string(),
        k: data.k,
        ell: data.ell,
        split: data.split.map(|(a, b)| [a as i64, b]),
        minimal_index: data.minimal_index(),
        orbifold: orb,
        rows: Vec::new(),
        rejected: Vec::new(),
        total: None,
        chi: None,
        note: None,
    };
    match census(&data) {
        Ok(c) if c.rows.is_empty() => {
            let why: Vec<&str> = c.rejected.iter().map(|(_, r)| r.as_str()).collect();
            return Err(CliError::Domain(format!("case {} admits no quotient: {}", data.label, why.join("; "))));
        }
        Ok(c) => {
            report.rows = c
                .rows
                .iter()
                .map(|row| RowOut { j: row.j, per_j: row.per_j, signature: row.signature.to_string(), chi: row.signature.chi })
                .collect();
            report.rejected = c.rejected.iter().map(|(j, reason)| RejectedOut { j: *j, reason: reason.clone() }).collect();
            report.total = Some(c.total);
            report.chi = Some(c.chi);
        }
        Err(IsoError::NoEllipticProducts) => {
            report.note = Some("no elliptic products: minimal index 2, the quotient is the orbifold".into());
        }
        Err(e) => return Err(iso_err(e)),
    }
    Ok(to_value(&report))
}

// ----------------------------------------------------------------- classify

fn build(p: &FunctionProfile, kind: Kind, t0: Option<&str>, tau: Option<&str>, marks: Option<&str>) -> Result<Invariant, CliError> {
    let t0 = real(t0.unwrap_or("1"), "t0")?;
    let tau = real(tau.unwrap_or("0"), "tau")?;
    let marks = reals(marks.unwrap_or(""), "marks")?;
    let inv = match kind {
        Kind::Torus => Invariant::Torus(classify::build_torus(p, t0, tau, &marks).map_err(classify_err)?),
        Kind::Elementary => Invariant::Elementary(classify::build_elementary(p, t0, tau).map_err(classify_err)?),
        Kind::Bottle1 => Invariant::Bottle1(classify::build_bottle1(p, t0, &marks).map_err(classify_err)?),
        Kind::Bottle2 => Invariant::Bottle2(classify::build_bottle2(p, t0, &marks).map_err(classify_err)?),
    };
    Ok(inv)
}

fn check_valid(inv: &Invariant) -> Result<(), CliError> {
    let v = inv.validate();
    if v.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        Err(CliError::Domain(format!("invalid {} invariant: {}", inv.kind(), list.join("; "))))
    }
}

#[derive(Serialize)]
struct InvariantOut {
    t0: f64,
    tau: Option<f64>,
    function: String,
    domain: String,
    marks: Vec<f64>,
}

fn invariant_out(inv: &Invariant) -> InvariantOut {
    InvariantOut {
        t0: r(inv.t0()),
        tau: inv.tau().map(r),
        function: inv.fbar().expr.to_string(),
        domain: inv.fbar().domain.to_string(),
        marks: rv(inv.marks()),
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    command: &'static str,
    r#type: &'static str,
    valid: bool,
    canonical: InvariantOut,
    text: String,
}

fn canonical(inv: &Invariant) -> Result<Invariant, CliError> {
    Ok(match inv {
        Invariant::Torus(t) => Invariant::Torus(canonical_torus(t).map_err(classify_err)?),
        Invariant::Elementary(e) => Invariant::Elementary(canonical_elementary(e)),
        Invariant::Bottle1(b) => Invariant::Bottle1(canonical_bottle1(b).map_err(classify_err)?),
        Invariant::Bottle2(b) => Invariant::Bottle2(canonical_bottle2(b)),
    })
}

fn classify_cmd(inv: &Invariant) -> Result<Value, CliError> {
    check_valid(inv)?;
    let c = canonical(inv)?;
    Ok(to_value(&ClassifyReport { command: "classify", r#type: inv.kind(), valid: true, canonical: invariant_out(&c), text: c.to_text() }))
}

#[derive(Serialize)]
struct MoveOut {
    r#move: &'static str,
    y: Option<f64>,
    marks_crossed: Option<usize>,
}

#[derive(Serialize)]
struct CompareReport {
    command: &'static str,
    r#type: &'static str,
    verdict: &'static str,
    equivalent: bool,
    defect: f64,
    tol: f64,
    near_threshold: bool,
    witness: Vec<MoveOut>,
}

fn compare(a: &Invariant, b: &Invariant, tol: f64) -> Result<Value, CliError> {
    if a.kind() != b.kind() {
        return Err(CliError::Domain(format!("type mismatch: {} vs {}", a.kind(), b.kind())));
    }
    check_valid(a)?;
    check_valid(b)?;
    let cmp: Comparison = match (a, b) {
        (Invariant::Torus(x), Invariant::Torus(y)) => classify::compare_tori(x, y, tol),
        (Invariant::Elementary(x), Invariant::Elementary(y)) => classify::compare_elementary(x, y, tol),
        (Invariant::Bottle1(x), Invariant::Bottle1(y)) => classify::compare_bottles1(x, y, tol),
        (Invariant::Bottle2(x), Invariant::Bottle2(y)) => classify::compare_bottles2(x, y, tol),
        _ => unreachable!("kinds checked above"),
    };
    let mut witness = Vec::new();
    let mut cur: Option<TorusInvariant> = if let Invariant::Torus(t) = a { Some(t.clone()) } else { None };
    for m in cmp.witness.iter().flatten() {
        let (name, y) = match m {
            Move::Flip => ("flip", None),
            Move::Shift(y) => ("shift", Some(*y)),
            Move::Swap => ("swap", None),
        };
        let crossed = match (&cur, m) {
            (Some(t), Move::Shift(y)) => Some(t.crossed_marks(*y)),
            _ => None,
        };
        cur = cur.map(|t| t.apply(m));
        witness.push(MoveOut { r#move: name, y: y.map(r), marks_crossed: crossed });
    }
    Ok(to_value(&CompareReport {
        command: "compare",
        r#type: a.kind(),
        verdict: if cmp.equivalent { "EQUIVALENT" } else { "NOT EQUIVALENT" },
        equivalent: cmp.equivalent,
        defect: r(cmp.defect),
        tol: cmp.tol,
        near_threshold: cmp.near_threshold,
        witness,
    }))
}

// --------------------------------------------------------------- components

#[derive(Serialize)]
struct TorusIndexOut {
    signs: String,
    r: usize,
    k_plus: usize,
    k_minus: usize,
}

#[derive(Serialize)]
struct BottleIndexOut {
    n_abs: usize,
    m_bar: Option<u8>,
    temporal_orientable: bool,
    spatial_orientable: bool,
}

fn bottle_out(b: BottleComponentIndex) -> BottleIndexOut {
    BottleIndexOut {
        n_abs: b.n_abs,
        m_bar: b.m_bar,
        temporal_orientable: b.temporal_orientable,
        spatial_orientable: b.spatial_orientable,
    }
}

#[derive(Serialize)]
struct ComponentsReport {
    command: &'static str,
    r#type: &'static str,
    torus: Option<TorusIndexOut>,
    bottle: Option<BottleIndexOut>,
    torus_components: Option<&'static str>,
    bottle1_components: Option<String>,
    bottle2_components: Option<String>,
}

fn torus_set_str(s: TorusComponentSet) -> &'static str {
    match s {
        TorusComponentSet::AllComponents => "all",
        TorusComponentSet::FlatOnly => "flat_only",
    }
}

fn components_of_invariant(inv: &Invariant) -> Result<Value, CliError> {
    check_valid(inv)?;
    let mut rep = ComponentsReport {
        command: "components",
        r#type: inv.kind(),
        torus: None,
        bottle: None,
        torus_components: None,
        bottle1_components: None,
        bottle2_components: None,
    };
    match inv {
        Invariant::Torus(t) => {
            let idx = torus_r(t);
            rep.torus = Some(TorusIndexOut { signs: torus_signs(t).to_string(), r: idx.r, k_plus: idx.k_plus, k_minus: idx.k_minus });
            rep.torus_components = Some(torus_set_str(torus_component_set(&t.fbar)));
        }
        Invariant::Elementary(e) => {
            rep.torus = Some(TorusIndexOut { signs: "cyclic:".into(), r: 0, k_plus: 0, k_minus: 0 });
            rep.torus_components = Some(torus_set_str(torus_component_set(&e.fbar)));
        }
        Invariant::Bottle1(b) => {
            rep.bottle = Some(bottle_out(bottle1_component(b)));
            rep.bottle1_components = Some(bottle1_component_set(&b.fbar).to_string());
        }
        Invariant::Bottle2(b) => {
            let idx = bottle2_nabs(b).map_err(|e| CliError::Domain(e.to_string()))?;
            rep.bottle = Some(bottle_out(idx));
            let set = bottle2_component_set(&b.fbar).map_err(|e| CliError::Domain(e.to_string()))?;
            rep.bottle2_components = Some(set.to_string());
        }
    }
    Ok(to_value(&rep))
}

fn components_of_profile(p: &FunctionProfile) -> Result<Value, CliError> {
    let b2 = normalize_period(p, 2.0).ok().and_then(|(q, _)| bottle2_component_set(&q).ok()).map(|s| s.to_string());
    Ok(to_value(&ComponentsReport {
        command: "components",
        r#type: "profile",
        torus: None,
        bottle: None,
        torus_components: Some(torus_set_str(torus_component_set(p))),
        bottle1_components: Some(bottle1_component_set(p).to_string()),
        bottle2_components: b2,
    }))
}

// ---------------------------------------------------------------- geodesics

#[derive(Serialize)]
struct StateOut {
    t: f64,
    x: f64,
    y: f64,
    p: f64,
    q: f64,
}

fn state_out(s: &GeodesicState) -> StateOut {
    StateOut { t: r(s.t), x: r(s.x), y: r(s.y), p: r(s.p), q: r(s.q) }
}

#[derive(Serialize)]
struct GeodesicReport {
    command: &'static str,
    profile: ProfileOut,
    initial: StateOut,
    clairaut: f64,
    energy: f64,
    status: &'static str,
    blow_up_time: Option<f64>,
    last: Option<StateOut>,
    steps: Option<usize>,
    c_drift: Option<f64>,
    e_drift: Option<f64>,
    reduced_residual: Option<f64>,
}

fn geodesic(p: &FunctionProfile, start: GeodesicState, t_end: f64, table: Option<&Path>, plot: Option<&Path>) -> Result<Value, CliError> {
    let opts = geodesics::default_options();
    let (c, e) = (start.clairaut(p), start.energy(p));
    let mut rep = GeodesicReport {
        command: "geodesic",
        profile: profile_out(p),
        initial: state_out(&start),
        clairaut: r(c),
        energy: r(e),
        status: "reached",
        blow_up_time: None,
        last: None,
        steps: None,
        c_drift: None,
        e_drift: None,
        reduced_residual: None,
    };
    match geodesics::integrate(p, start, t_end, &opts) {
        Ok(tr) => {
            rep.status = match tr.end {
                EndReason::Reached => "reached",
                EndReason::DomainExit => "domain_exit",
            };
            rep.last = Some(state_out(tr.last()));
            rep.steps = Some(tr.samples.len() - 1);
            rep.c_drift = Some(r(tr.c_drift));
            rep.e_drift = Some(r(tr.e_drift));
            rep.reduced_residual = Some(r(tr
                .samples
                .iter()
                .map(|s| (s.p * s.p - (c * c - e * p.f(s.x))).abs())
                .fold(0.0, f64::max)));
            if let Some(path) = table {
                write_file(path, &tr.to_table(p))?;
            }
            if let Some(path) = plot {
                let pts: Vec<(f64, f64)> = tr.samples.iter().map(|s| (s.x, s.y)).collect();
                write_file(path, &svg::plot("geodesic", "x", "y", &pts, &zeros_in(p, &pts), &[], &[]))?;
            }
        }
        Err(GeodesicError::BlowUp { t }) => {
            rep.status = "blow_up";
            rep.blow_up_time = Some(r(t));
        }
        Err(e @ (GeodesicError::NotInDomain { .. } | GeodesicError::Evaluation { .. })) => {
            return Err(CliError::Domain(e.to_string()))
        }
        Err(e) => return Err(CliError::Domain(e.to_string())),
    }
    Ok(to_value(&rep))
}

fn zeros_in(p: &FunctionProfile, pts: &[(f64, f64)]) -> Vec<f64> {
    let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(x, _)| (a.min(x), b.max(x)));
    let cs = components(p);
    let mut out = Vec::new();
    for z in &cs.zeros {
        match p.domain.period() {
            Some(t) => {
                let mut x = z.x0 + ((lo - z.x0) / t).ceil() * t;
                while x <= hi {
                    out.push(x);
                    x += t;
                }
            }
            None if (lo..=hi).contains(&z.x0) => out.push(z.x0),
            None => {}
        }
    }
    out
}

#[derive(Serialize)]
struct ConjugateOut {
    command: &'static str,
    profile: ProfileOut,
    status: String,
    eps: i8,
    c: f64,
    nudged: bool,
    interval: Option<[f64; 2]>,
    t_b: Option<f64>,
    t_quadrature: Option<f64>,
    arrival_error: Option<f64>,
    x_at_tangency: Option<f64>,
    p_at_tangency: Option<f64>,
    symmetry_defect: Option<f64>,
    c_drift: f64,
    e_drift: f64,
    note: Option<String>,
}

fn conjugate(p: &FunctionProfile, eps: i8, c: f64, plot: Option<&Path>) -> Result<Value, CliError> {
    let rep = geodesics::conjugate_search(p, eps, c).map_err(|e| CliError::Domain(e.to_string()))?;
    if let (Some(path), false) = (plot, rep.samples.is_empty()) {
        let pts: Vec<(f64, f64)> = rep.samples.iter().map(|s| (s.x, s.y)).collect();
        let mut dots = vec![(pts[0].0, pts[0].1, "tangency a")];
        if let (Some(tb), Some(xb)) = (rep.t_b, rep.x_at_tb) {
            let yb = rep.samples.iter().min_by(|a, b| (a.t - tb).abs().total_cmp(&(b.t - tb).abs())).map_or(0.0, |s| s.y);
            dots.push((xb, yb, "tangency b"));
        }
        let lines: Vec<f64> = rep.interval.map(|(a, b)| vec![a, b]).unwrap_or_default();
        write_file(path, &svg::plot("doubly tangent geodesic", "x", "y", &pts, &zeros_in(p, &pts), &lines, &dots))?;
    }
    let out = ConjugateOut {
        command: "conjugate",
        profile: profile_out(p),
        status: rep.status.to_string(),
        eps: rep.eps,
        c: r(rep.c),
        nudged: rep.nudged,
        interval: rep.interval.map(|(a, b)| [r(a), r(b)]),
        t_b: rep.t_b.map(r),
        t_quadrature: rep.t_quad.map(r),
        arrival_error: rep.arrival_error().map(r),
        x_at_tangency: rep.x_at_tb.map(r),
        p_at_tangency: rep.p_at_tb.map(r),
        symmetry_defect: rep.symmetry_defect.map(r),
        c_drift: r(rep.c_drift),
        e_drift: r(rep.e_drift),
        note: rep.note.clone(),
    };
    Ok(to_value(&out))
}

