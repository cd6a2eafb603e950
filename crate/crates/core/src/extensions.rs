//! Extensions of Taft actions to u_q(sl_2) = <K, E, F> and to the Drinfeld
//! double D(T(n)) = <g, x, G, X>.
//!
//! E and x are Taft generators for K and g, so their tables come straight
//! from [`crate::taft`]. X is the same rule with ζ^{-1} and G in place of ζ
//! and g. F is the mirror image: `F·a = γ_t r^j (K^{-1}·a) - γ_s r^{i+1} a + λ^F σ⁻(a)`
//! with `r = ζ^{-1}` and `σ⁻(a)` the path from `K^{-1}·s(a)` to `t(a)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cyclo::{q as qroot, zeta, CycScalar, Ctx};
use crate::quiver::{AlgebraElement, Path, Quiver};
use crate::symmetry::{decompose_components, orbits, validate_action, Component, ComponentKind, Orbits, ZnAction};
use crate::taft::{
    self, check, params_from_json, params_to_json, sigma, sigma_chain_product, vertex_rows, Fragment,
    Generator, GeneratorTable, ConstraintCheck, ConstraintReport, ParamsJson, Shift, TaftError, TaftParams,
};
use crate::verifier::{
    check_kills_unit, check_relation, check_split_consistency, constraint_entries, extend_system, Entry, OperatorSystem, Relation,
    VerificationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtError {
    #[error(transparent)]
    Taft(#[from] TaftError),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("arrow {arrow} has scale {scale}; the E/F coefficients of a^(i-1)_(j-1) force every scale to 1")]
    Gauge { arrow: String, scale: String },
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("params: {0}")]
    Params(String),
}

/// `σ⁻(a)`: the path of length <= 1 from `h^{-1}·s(a)` to `t(a)`.
pub fn sigma_back(q: &Quiver, act: &ZnAction, a: usize) -> Option<Path> {
    let ar = q.arrow(a);
    let s = act.inverse().vertex_image(ar.src);
    if s == ar.tgt {
        Some(Path::trivial(s))
    } else {
        q.arrow_between(s, ar.tgt).map(|b| q.arrow_path(b))
    }
}

fn path_scale(act: &ZnAction, p: &Path) -> CycScalar {
    match p.as_arrow() {
        Some(b) => act.scale(b).clone(),
        None => CycScalar::one(act.ctx()),
    }
}

fn lambda_on(params: &TaftParams, p: &Option<Path>, ctx: &Ctx) -> CycScalar {
    match p.as_ref().and_then(Path::as_arrow) {
        Some(b) => params.lambda[b].clone(),
        None => CycScalar::zero(ctx),
    }
}

/// `γ_t r^j a - γ_s r^{i+1} (h·a) + λ σ_h(a)`.
pub fn forward_arrow(q: &Quiver, h: &ZnAction, orb: &Orbits, params: &TaftParams, r: &CycScalar, a: usize) -> AlgebraElement {
    let ar = q.arrow(a);
    let (s, t) = (ar.src, ar.tgt);
    let alpha = &params.gamma[orb.vertex_orbit_of[t]] * &r.pow(orb.label[t] as i64);
    let beta = -(&params.gamma[orb.vertex_orbit_of[s]] * &r.pow(orb.label[s] as i64 + 1));
    let mut e = AlgebraElement::zero(q);
    e.add_term(q.arrow_path(a), alpha);
    e.add_term(q.arrow_path(h.arrow_image(a)), beta * h.scale(a));
    if let Some(p) = sigma(q, h, a) {
        e.add_term(p, params.lambda[a].clone());
    }
    e
}

/// `γ_t r^j (h^{-1}·a) - γ_s r^{i+1} a + λ σ⁻(a)`.
pub fn backward_arrow(q: &Quiver, h: &ZnAction, orb: &Orbits, params: &TaftParams, r: &CycScalar, a: usize) -> AlgebraElement {
    let hinv = h.inverse();
    let ar = q.arrow(a);
    let (s, t) = (ar.src, ar.tgt);
    let alpha = &params.gamma[orb.vertex_orbit_of[t]] * &r.pow(orb.label[t] as i64);
    let beta = -(&params.gamma[orb.vertex_orbit_of[s]] * &r.pow(orb.label[s] as i64 + 1));
    let mut e = AlgebraElement::zero(q);
    e.add_term(q.arrow_path(hinv.arrow_image(a)), alpha * hinv.scale(a));
    e.add_term(q.arrow_path(a), beta);
    if let Some(p) = sigma_back(q, h, a) {
        e.add_term(p, params.lambda[a].clone());
    }
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Forward,
    Backward,
}

/// Orbit-size, support, recurrence and power-identity checks for one family.
///
/// `h` supplies the scales in the recurrence `μ(a) λ(φa) = r μ(σ a) λ(a)`.
fn family_checks(
    q: &Quiver,
    h: &ZnAction,
    orb: &Orbits,
    comp: &Component,
    params: &TaftParams,
    r: &CycScalar,
    rule: Rule,
    fam: &str,
) -> Vec<ConstraintCheck> {
    let ctx = h.ctx();
    let n = h.n() as usize;
    let mut short = Vec::new();
    for &o in &comp.orbits {
        if orb.vertex_orbits[o].len() < n && !params.gamma[o].is_zero() {
            short.push(orb.orbit_name(q, o));
        }
    }
    let (mut support, mut diagonal, mut recurrence, mut power) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &a in &comp.arrows {
        let ar = q.arrow(a);
        let id = ar.id.clone();
        let sig = match rule {
            Rule::Forward => sigma(q, h, a),
            Rule::Backward => sigma_back(q, h, a),
        };
        let lam = &params.lambda[a];
        if sig.is_none() && !lam.is_zero() {
            support.push(id.clone());
        }
        // Type B reading of "λ_{i,j} = 0 if i = j": equal labels across the two orbits
        if comp.kind == ComponentKind::TypeB && orb.label[ar.src] == orb.label[ar.tgt] && !lam.is_zero() {
            diagonal.push(id.clone());
        }
        let lhs = &params.lambda[h.arrow_image(a)] * h.scale(a);
        let rhs = match &sig {
            Some(p) => &(r * lam) * &path_scale(h, p),
            None => CycScalar::zero(ctx),
        };
        if lhs != rhs {
            recurrence.push(id.clone());
        }
        if comp.kind == ComponentKind::TypeB {
            let gp = params.gamma[orb.vertex_orbit_of[ar.src]].pow(n as i64);
            let gm = params.gamma[orb.vertex_orbit_of[ar.tgt]].pow(n as i64);
            let pl = sigma_chain_product(q, h, a, |b| params.lambda[b].clone());
            if gp != gm + pl {
                power.push(id);
            }
        }
    }
    let mut out = vec![
        check(&format!("{fam}: gamma-short-orbit"), short),
        check(&format!("{fam}: lambda-support"), support),
        check(&format!("{fam}: lambda-recurrence"), recurrence),
    ];
    if comp.kind == ComponentKind::TypeB {
        out.push(check(&format!("{fam}: lambda-diagonal"), diagonal));
        out.push(check(&format!("{fam}: power-identity"), power));
    }
    out
}

fn orbit_product_check(q: &Quiver, h: &ZnAction, comp: &Component, name: &str) -> ConstraintCheck {
    let rep = validate_action(q, h);
    let bad: BTreeSet<String> = rep
        .violations
        .iter()
        .filter_map(|v| match v {
            crate::symmetry::ActionViolation::ScaleProduct { orbit, .. } => orbit.first().cloned(),
            _ => None,
        })
        .filter(|o| comp.arrows.iter().any(|&a| &q.arrow(a).id == o))
        .collect();
    check(name, bad.into_iter().collect())
}

fn section(json: &BTreeMap<String, ParamsJson>, name: &str) -> ParamsJson {
    json.get(name).cloned().unwrap_or_default()
}

fn parse_sections(json: &str, allowed: &[&str]) -> Result<BTreeMap<String, ParamsJson>, ExtError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let m: BTreeMap<String, ParamsJson> =
        serde_path_to_error::deserialize(de).map_err(|e| ExtError::Params(format!("{}: {}", e.path(), e.inner())))?;
    for k in m.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(ExtError::Params(format!("unknown section {k}; expected one of {}", allowed.join(", "))));
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------- u_q(sl_2)

/// Vertex and arrow scalars of E and F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UqParams {
    pub e: TaftParams,
    pub f: TaftParams,
}

impl UqParams {
    pub fn zero(q: &Quiver, orb: &Orbits, ctx: &Ctx) -> Self {
        UqParams {
            e: TaftParams::zero(q, orb, ctx),
            f: TaftParams::zero(q, orb, ctx),
        }
    }
}

/// `{"E": {gamma, lambda}, "F": {gamma, lambda}}`.
pub fn parse_uq_params(q: &Quiver, orb: &Orbits, ctx: &Ctx, json: &str) -> Result<UqParams, ExtError> {
    let m = parse_sections(json, &["E", "F"])?;
    Ok(UqParams {
        e: params_from_json(q, orb, ctx, &section(&m, "E"))?,
        f: params_from_json(q, orb, ctx, &section(&m, "F"))?,
    })
}

pub fn uq_params_to_json(q: &Quiver, orb: &Orbits, p: &UqParams) -> BTreeMap<String, ParamsJson> {
    BTreeMap::from([
        ("E".to_string(), params_to_json(q, orb, &p.e)),
        ("F".to_string(), params_to_json(q, orb, &p.f)),
    ])
}

/// `γ^F` solving `-γ^E γ^F q^{-1} (q^2 - 1)^2 = 1`.
pub fn uq_partner_gamma(gamma_e: &CycScalar) -> Option<CycScalar> {
    let ctx = gamma_e.ctx();
    let q = qroot(ctx);
    let one = CycScalar::one(ctx);
    let d = &q.pow(2) - &one;
    let denom = -(&(gamma_e * &q.inv()) * &d.pow(2));
    denom.try_inv().ok()
}

fn uq_vertex_product(ge: &CycScalar, gf: &CycScalar) -> CycScalar {
    let ctx = ge.ctx();
    let q = qroot(ctx);
    let d = &q.pow(2) - &CycScalar::one(ctx);
    -(&(&(ge * gf) * &q.inv()) * &d.pow(2))
}

/// A u_q(sl_2)-action: K from `action`, E and F by tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UqSpec {
    pub quiver: Quiver,
    pub action: ZnAction,
    pub e: GeneratorTable,
    pub f: GeneratorTable,
}

fn is_full(orb: &Orbits, comp: &Component, n: usize) -> bool {
    comp.orbits.iter().all(|&o| orb.vertex_orbits[o].len() == n)
}

fn uq_structure(q: &Quiver, act: &ZnAction, orb: &Orbits, comps: &[Component]) -> Result<(), ExtError> {
    let n = act.n() as usize;
    if n < 3 {
        return Err(ExtError::NotImplemented(format!("u_q(sl_2) extension needs n >= 3, got n = {n}")));
    }
    for (o, members) in orb.vertex_orbits.iter().enumerate() {
        let m = members.len();
        if m != n && m > 2 {
            return Err(ExtError::Constraint(format!(
                "{} has size {m}; u_q(sl_2) acts only on orbits of size 1, 2 or {n}",
                orb.orbit_name(q, o)
            )));
        }
    }
    for c in comps {
        let sizes: BTreeSet<bool> = c.orbits.iter().map(|&o| orb.vertex_orbits[o].len() == n).collect();
        if sizes.len() > 1 {
            return Err(ExtError::NotImplemented(format!(
                "component through {} mixes orbits of size {n} with smaller ones",
                orb.orbit_name(q, c.orbits[0])
            )));
        }
    }
    Ok(())
}

/// Every scalar condition on one component.
pub fn check_uq_constraints(q: &Quiver, act: &ZnAction, orb: &Orbits, comp: &Component, p: &UqParams) -> ConstraintReport {
    let ctx = act.ctx();
    let n = act.n() as usize;
    let z = zeta(ctx);
    let zi = z.inv();
    let mut checks = vec![orbit_product_check(q, act, comp, "K: mu-orbit-product")];
    if is_full(orb, comp, n) {
        let gauge: Vec<String> = comp
            .arrows
            .iter()
            .filter(|&&a| !act.scale(a).is_one())
            .map(|&a| q.arrow(a).id.clone())
            .collect();
        checks.push(check("mu-gauge", gauge));
        let cond: Vec<String> = comp
            .orbits
            .iter()
            .filter(|&&o| !uq_vertex_product(&p.e.gamma[o], &p.f.gamma[o]).is_one())
            .map(|&o| orb.orbit_name(q, o))
            .collect();
        checks.push(check("vertex-condition", cond));
        checks.extend(family_checks(q, act, orb, comp, &p.e, &z, Rule::Forward, "E"));
        checks.extend(family_checks(q, act, orb, comp, &p.f, &zi, Rule::Backward, "F"));
        let mut coupling = Vec::new();
        for &a in &comp.arrows {
            let lhs = &p.f.lambda[a] * &lambda_on(&p.e, &sigma_back(q, act, a), ctx);
            let rhs = &p.e.lambda[a] * &lambda_on(&p.f, &sigma(q, act, a), ctx);
            if lhs != rhs {
                coupling.push(q.arrow(a).id.clone());
            }
        }
        checks.push(check("EF-coupling", coupling));
    } else {
        let mut nonzero: Vec<String> = comp
            .orbits
            .iter()
            .filter(|&&o| !p.e.gamma[o].is_zero() || !p.f.gamma[o].is_zero())
            .map(|&o| orb.orbit_name(q, o))
            .collect();
        let mut k2 = Vec::new();
        for &a in &comp.arrows {
            if !p.e.lambda[a].is_zero() || !p.f.lambda[a].is_zero() {
                nonzero.push(q.arrow(a).id.clone());
            }
            let b = act.arrow_image(a);
            if act.arrow_image(b) != a || !(act.scale(a) * act.scale(b)).is_one() {
                k2.push(q.arrow(a).id.clone());
            }
        }
        checks.push(check("short-orbit-zero", nonzero));
        checks.push(check("K-squared-trivial", k2));
    }
    ConstraintReport::from_checks(checks)
}

/// E and F fragment of one component.
pub fn uq_fragment(
    q: &Quiver,
    act: &ZnAction,
    orb: &Orbits,
    comp: &Component,
    p: &UqParams,
    checked: bool,
) -> Result<Fragment, ExtError> {
    if checked {
        let rep = check_uq_constraints(q, act, orb, comp, p);
        if !rep.ok {
            if let Some(c) = rep.checks.iter().find(|c| c.name == "mu-gauge" && !c.passed) {
                let a = q.arrow_index(&c.offending[0]).expect("arrow");
                return Err(ExtError::Gauge {
                    arrow: c.offending[0].clone(),
                    scale: act.scale(a).to_string(),
                });
            }
            return Err(ExtError::Constraint(rep.failures()));
        }
    }
    let z = zeta(act.ctx());
    let zi = z.inv();
    let mut frag = taft::build_component_action(q, act, orb, comp, &p.e, false)?;
    let e_tab = frag.tables.remove("x").expect("x family");
    let e_gam = frag.gammas.remove("x").expect("x family");
    frag.tables.insert("E".into(), e_tab);
    frag.gammas.insert("E".into(), e_gam);
    let gam = frag.gammas.entry("F".into()).or_default();
    let tab = frag.tables.entry("F".into()).or_default();
    for &o in &comp.orbits {
        gam.insert(o, p.f.gamma[o].clone());
        for (v, e) in vertex_rows(q, &orb.vertex_orbits[o], &p.f.gamma[o], &zi, Shift::Backward) {
            tab.insert(Generator::Vertex(v), e);
        }
    }
    for &a in &comp.arrows {
        tab.insert(Generator::Arrow(a), backward_arrow(q, act, orb, &p.f, &zi, a));
    }
    Ok(frag)
}

/// Glue per-component fragments of any generator families.
pub fn glue_extensions(q: &Quiver, orb: &Orbits, fragments: &[Fragment]) -> Result<Fragment, ExtError> {
    Ok(taft::glue(q, orb, fragments)?)
}

fn build_uq(q: &Quiver, act: &ZnAction, p: &UqParams, checked: bool) -> Result<UqSpec, ExtError> {
    let orb = orbits(q, act);
    let comps = decompose_components(q, &orb);
    uq_structure(q, act, &orb, &comps)?;
    let frags = comps
        .iter()
        .map(|c| uq_fragment(q, act, &orb, c, p, checked))
        .collect::<Result<Vec<_>, _>>()?;
    let glued = glue_extensions(q, &orb, &frags)?;
    Ok(UqSpec {
        quiver: q.clone(),
        action: act.clone(),
        e: taft::table_from_fragment(q, &glued, "E")?,
        f: taft::table_from_fragment(q, &glued, "F")?,
    })
}

/// Structural preconditions and every scalar condition, then the tables.
pub fn build_uq_action(q: &Quiver, act: &ZnAction, p: &UqParams) -> Result<UqSpec, ExtError> {
    build_uq(q, act, p, true)
}

/// Tables for the given scalars; only structural preconditions are enforced.
pub fn build_uq_action_unchecked(q: &Quiver, act: &ZnAction, p: &UqParams) -> Result<UqSpec, ExtError> {
    build_uq(q, act, p, false)
}

pub fn uq_system(spec: &UqSpec) -> OperatorSystem {
    OperatorSystem::new(&spec.quiver, spec.action.ctx())
        .grouplike("K", &spec.action)
        .grouplike("K^-1", &spec.action.inverse())
        // Δ(E) = 1⊗E + E⊗K, Δ(F) = K^{-1}⊗F + F⊗1
        .skew("E", spec.e.clone(), None, Some("K"))
        .skew("F", spec.f.clone(), Some("K^-1"), None)
}

fn faithful_entry(name: &str, ok: bool) -> Entry {
    if ok {
        Entry::pass(name)
    } else {
        Entry::fail(name, None)
    }
}

/// `K^n = 1`, `E^n = F^n = 0`, `KE = q^2 EK`, `KF = q^{-2} FK`, `EF - FE = (K - K^{-1})/(q - q^{-1})`.
pub fn verify_uq(spec: &UqSpec, depth: usize) -> VerificationReport {
    let ctx = spec.action.ctx();
    let n = ctx.n() as usize;
    let table = extend_system(&uq_system(spec), depth);
    let one = CycScalar::one(ctx);
    let q = qroot(ctx);
    let q2 = q.pow(2);
    let c = (&q - &q.inv()).inv();
    let relations = vec![
        check_relation(&table, &Relation::new("K^n = 1").term(one.clone(), &Relation::power("K", n)).term(-one.clone(), &[])),
        check_relation(&table, &Relation::new("E^n = 0").term(one.clone(), &Relation::power("E", n))),
        check_relation(&table, &Relation::new("F^n = 0").term(one.clone(), &Relation::power("F", n))),
        check_relation(&table, &Relation::new("KE = q^2 EK").term(one.clone(), &["K", "E"]).term(-q2.clone(), &["E", "K"])),
        check_relation(&table, &Relation::new("KF = q^-2 FK").term(one.clone(), &["K", "F"]).term(-q2.inv(), &["F", "K"])),
        check_relation(
            &table,
            &Relation::new("EF - FE = (K - K^-1)/(q - q^-1)")
                .term(one.clone(), &["E", "F"])
                .term(-one.clone(), &["F", "E"])
                .term(-c.clone(), &["K"])
                .term(c, &["K^-1"]),
        ),
        check_kills_unit(&table, "E"),
        check_kills_unit(&table, "F"),
    ];
    VerificationReport {
        relations,
        splits: check_split_consistency(&table),
        faithfulness: vec![
            faithful_entry("E acts nonzero", !spec.e.is_zero()),
            faithful_entry("F acts nonzero", !spec.f.is_zero()),
        ],
        constraints: Vec::new(),
    }
}

/// Constraint report of every component, as verification entries.
pub fn uq_constraint_entries(q: &Quiver, act: &ZnAction, p: &UqParams) -> Vec<Entry> {
    let orb = orbits(q, act);
    constraint_entries(
        decompose_components(q, &orb)
            .iter()
            .flat_map(|c| check_uq_constraints(q, act, &orb, c, p).checks),
    )
}

// ------------------------------------------------------------------ D(T(n))

/// Scalars of x and X plus the scales of G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleParams {
    pub x: TaftParams,
    pub big_x: TaftParams,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleParamsJson {
    #[serde(default)]
    pub x: ParamsJson,
    #[serde(default, rename = "X")]
    pub big_x: ParamsJson,
    /// Scales of G per arrow; missing arrows get 1.
    #[serde(default, rename = "G-scales")]
    pub g_scales: BTreeMap<String, String>,
}

/// Parameters and the action of G (same vertex permutation as g).
pub fn parse_double_params(
    q: &Quiver,
    orb: &Orbits,
    act_g: &ZnAction,
    json: &str,
) -> Result<(DoubleParams, ZnAction), ExtError> {
    let ctx = act_g.ctx();
    let de = &mut serde_json::Deserializer::from_str(json);
    let j: DoubleParamsJson =
        serde_path_to_error::deserialize(de).map_err(|e| ExtError::Params(format!("{}: {}", e.path(), e.inner())))?;
    let mut mu = vec![CycScalar::one(ctx); q.num_arrows()];
    for (k, v) in &j.g_scales {
        let a = q.arrow_index(k).ok_or_else(|| ExtError::Params(format!("unknown arrow {k}")))?;
        mu[a] = crate::cyclo::parse_scalar(ctx, v).map_err(|e| ExtError::Params(format!("{k}: {e}")))?;
    }
    Ok((
        DoubleParams {
            x: params_from_json(q, orb, ctx, &j.x)?,
            big_x: params_from_json(q, orb, ctx, &j.big_x)?,
        },
        act_g.with_scales(mu),
    ))
}

pub fn double_params_to_json(q: &Quiver, orb: &Orbits, p: &DoubleParams, act_big_g: &ZnAction) -> DoubleParamsJson {
    DoubleParamsJson {
        x: params_to_json(q, orb, &p.x),
        big_x: params_to_json(q, orb, &p.big_x),
        g_scales: (0..q.num_arrows())
            .filter(|&a| !act_big_g.scale(a).is_one())
            .map(|a| (q.arrow(a).id.clone(), act_big_g.scale(a).to_string()))
            .collect(),
    }
}

/// `γ^X` solving `γ^x γ^X (1 - ζ^{-1}) = 1`.
pub fn double_partner_gamma(gamma_x: &CycScalar) -> Option<CycScalar> {
    let ctx = gamma_x.ctx();
    let d = &CycScalar::one(ctx) - &zeta(ctx).inv();
    (gamma_x * &d).try_inv().ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleSpec {
    pub quiver: Quiver,
    pub g: ZnAction,
    pub big_g: ZnAction,
    pub x: GeneratorTable,
    pub big_x: GeneratorTable,
}

fn double_structure(q: &Quiver, g: &ZnAction, big_g: &ZnAction, orb: &Orbits) -> Result<(), ExtError> {
    if g.vertex_perm() != big_g.vertex_perm() || (0..q.num_arrows()).any(|a| g.arrow_image(a) != big_g.arrow_image(a)) {
        return Err(ExtError::Constraint("g and G must permute vertices and arrows alike".into()));
    }
    let n = g.n() as usize;
    if let Some(o) = orb.vertex_orbits.iter().position(|m| m.len() != n) {
        return Err(ExtError::NotImplemented(format!(
            "{} has size {}; only orbits of size {n} are supported for the double",
            orb.orbit_name(q, o),
            orb.vertex_orbits[o].len()
        )));
    }
    Ok(())
}

/// Every scalar condition on one component.
pub fn check_double_constraints(
    q: &Quiver,
    g: &ZnAction,
    big_g: &ZnAction,
    orb: &Orbits,
    comp: &Component,
    p: &DoubleParams,
) -> ConstraintReport {
    let ctx = g.ctx();
    let n = g.n();
    let z = zeta(ctx);
    let zi = z.inv();
    let one = CycScalar::one(ctx);
    let mut checks = vec![
        orbit_product_check(q, g, comp, "g: mu-orbit-product"),
        orbit_product_check(q, big_g, comp, "G: mu-orbit-product"),
    ];
    let mut commute = Vec::new();
    for &a in &comp.arrows {
        let b = g.arrow_image(a);
        if big_g.scale(a) * g.scale(b) != g.scale(a) * big_g.scale(b) {
            commute.push(q.arrow(a).id.clone());
        }
    }
    checks.push(check("gG = Gg scales", commute));
    checks.extend(family_checks(q, g, orb, comp, &p.x, &z, Rule::Forward, "x/g"));
    checks.extend(family_checks(q, big_g, orb, comp, &p.big_x, &zi, Rule::Forward, "X/G"));
    // cross recurrences; gamma and power checks already ran above
    for (fam, params, h, r) in [("x/G", &p.x, big_g, &z), ("X/g", &p.big_x, g, &zi)] {
        let mut bad = Vec::new();
        for &a in &comp.arrows {
            let lhs = &params.lambda[h.arrow_image(a)] * h.scale(a);
            let rhs = match sigma(q, h, a) {
                Some(s) => &(r * &params.lambda[a]) * &path_scale(h, &s),
                None => CycScalar::zero(ctx),
            };
            if lhs != rhs {
                bad.push(q.arrow(a).id.clone());
            }
        }
        checks.push(check(&format!("{fam}: lambda-recurrence"), bad));
    }
    let mut coupling = Vec::new();
    for &a in &comp.arrows {
        let s = sigma(q, g, a);
        let lhs = &p.big_x.lambda[a] * &lambda_on(&p.x, &s, ctx);
        let rhs = &(&z * &p.x.lambda[a]) * &lambda_on(&p.big_x, &s, ctx);
        if lhs != rhs {
            coupling.push(q.arrow(a).id.clone());
        }
    }
    checks.push(check("xX-coupling", coupling));
    let d = &one - &zi;
    if n >= 3 {
        let cond: Vec<String> = comp
            .orbits
            .iter()
            .filter(|&&o| !(&(&p.x.gamma[o] * &p.big_x.gamma[o]) * &d).is_one())
            .map(|&o| orb.orbit_name(q, o))
            .collect();
        checks.push(check("vertex-condition", cond));
    } else {
        // n = 2: a and gG·a coincide, so the two vertex conditions merge into
        // 2 γ^x_t γ^X_t - 2 γ^x_s γ^X_s P = 1 - P with P the gG scale of a.
        let mut bad = Vec::new();
        for &a in &comp.arrows {
            let ar = q.arrow(a);
            let (os, ot) = (orb.vertex_orbit_of[ar.src], orb.vertex_orbit_of[ar.tgt]);
            let pa = big_g.scale(a) * g.scale(g.arrow_image(a));
            let two = CycScalar::from_int(ctx, 2);
            let lhs = &(&two * &(&p.x.gamma[ot] * &p.big_x.gamma[ot])) - &(&(&two * &(&p.x.gamma[os] * &p.big_x.gamma[os])) * &pa);
            if lhs != &one - &pa {
                bad.push(ar.id.clone());
            }
        }
        checks.push(check("xX-diagonal (n = 2)", bad));
    }
    ConstraintReport::from_checks(checks)
}

pub fn double_fragment(
    q: &Quiver,
    g: &ZnAction,
    big_g: &ZnAction,
    orb: &Orbits,
    comp: &Component,
    p: &DoubleParams,
    checked: bool,
) -> Result<Fragment, ExtError> {
    if checked {
        let rep = check_double_constraints(q, g, big_g, orb, comp, p);
        if !rep.ok {
            return Err(ExtError::Constraint(rep.failures()));
        }
    }
    let zi = zeta(g.ctx()).inv();
    let mut frag = taft::build_component_action(q, g, orb, comp, &p.x, false)?;
    let gam = frag.gammas.entry("X".into()).or_default();
    let tab = frag.tables.entry("X".into()).or_default();
    for &o in &comp.orbits {
        gam.insert(o, p.big_x.gamma[o].clone());
        for (v, e) in vertex_rows(q, &orb.vertex_orbits[o], &p.big_x.gamma[o], &zi, Shift::Forward) {
            tab.insert(Generator::Vertex(v), e);
        }
    }
    for &a in &comp.arrows {
        tab.insert(Generator::Arrow(a), forward_arrow(q, big_g, orb, &p.big_x, &zi, a));
    }
    Ok(frag)
}

fn build_double(q: &Quiver, g: &ZnAction, big_g: &ZnAction, p: &DoubleParams, checked: bool) -> Result<DoubleSpec, ExtError> {
    let orb = orbits(q, g);
    double_structure(q, g, big_g, &orb)?;
    let comps = decompose_components(q, &orb);
    let frags = comps
        .iter()
        .map(|c| double_fragment(q, g, big_g, &orb, c, p, checked))
        .collect::<Result<Vec<_>, _>>()?;
    let glued = glue_extensions(q, &orb, &frags)?;
    Ok(DoubleSpec {
        quiver: q.clone(),
        g: g.clone(),
        big_g: big_g.clone(),
        x: taft::table_from_fragment(q, &glued, "x")?,
        big_x: taft::table_from_fragment(q, &glued, "X")?,
    })
}

pub fn build_double_action(q: &Quiver, g: &ZnAction, big_g: &ZnAction, p: &DoubleParams) -> Result<DoubleSpec, ExtError> {
    build_double(q, g, big_g, p, true)
}

pub fn build_double_action_unchecked(
    q: &Quiver,
    g: &ZnAction,
    big_g: &ZnAction,
    p: &DoubleParams,
) -> Result<DoubleSpec, ExtError> {
    build_double(q, g, big_g, p, false)
}

pub fn double_system(spec: &DoubleSpec) -> OperatorSystem {
    OperatorSystem::new(&spec.quiver, spec.g.ctx())
        .grouplike("g", &spec.g)
        .grouplike("G", &spec.big_g)
        .skew("x", spec.x.clone(), None, Some("g"))
        .skew("X", spec.big_x.clone(), None, Some("G"))
}

/// The defining relations of D(T(n)), including `xX - ζXx = ζ(gG - 1)`.
pub fn verify_double(spec: &DoubleSpec, depth: usize) -> VerificationReport {
    let ctx = spec.g.ctx();
    let n = ctx.n() as usize;
    let table = extend_system(&double_system(spec), depth);
    let one = CycScalar::one(ctx);
    let z = zeta(ctx);
    let commute = |name: &str, a: &str, b: &str, c: &CycScalar| {
        check_relation(&table, &Relation::new(name).term(one.clone(), &[a, b]).term(-c.clone(), &[b, a]))
    };
    let relations = vec![
        commute("xg = zeta gx", "x", "g", &z),
        commute("GX = zeta XG", "G", "X", &z),
        commute("gX = zeta Xg", "g", "X", &z),
        commute("xG = zeta Gx", "x", "G", &z),
        commute("gG = Gg", "g", "G", &one),
        check_relation(&table, &Relation::new("g^n = 1").term(one.clone(), &Relation::power("g", n)).term(-one.clone(), &[])),
        check_relation(&table, &Relation::new("G^n = 1").term(one.clone(), &Relation::power("G", n)).term(-one.clone(), &[])),
        check_relation(&table, &Relation::new("x^n = 0").term(one.clone(), &Relation::power("x", n))),
        check_relation(&table, &Relation::new("X^n = 0").term(one.clone(), &Relation::power("X", n))),
        check_relation(
            &table,
            &Relation::new("xX - zeta Xx = zeta(gG - 1)")
                .term(one.clone(), &["x", "X"])
                .term(-z.clone(), &["X", "x"])
                .term(-z.clone(), &["g", "G"])
                .term(z, &[]),
        ),
        check_kills_unit(&table, "x"),
        check_kills_unit(&table, "X"),
    ];
    VerificationReport {
        relations,
        splits: check_split_consistency(&table),
        faithfulness: vec![
            faithful_entry("x acts nonzero", !spec.x.is_zero()),
            faithful_entry("X acts nonzero", !spec.big_x.is_zero()),
        ],
        constraints: Vec::new(),
    }
}

pub fn double_constraint_entries(q: &Quiver, g: &ZnAction, big_g: &ZnAction, p: &DoubleParams) -> Vec<Entry> {
    let orb = orbits(q, g);
    constraint_entries(
        decompose_components(q, &orb)
            .iter()
            .flat_map(|c| check_double_constraints(q, g, big_g, &orb, c, p).checks),
    )
}
