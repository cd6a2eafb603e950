//! Actions of the Taft algebra T(n) = <g, x> extending a Z_n-action.
//!
//! For an arrow `a` with `g·a = μ_a φ(a)` every action has the shape
//! `x·a = α_a a + β_a (g·a) + λ_a σ(a)` with
//! `α_a = γ_{t(a)} ζ^{label t(a)}` and `β_a = -γ_{s(a)} ζ^{label s(a) + 1}`,
//! `γ` being the vertex scalar of the orbit. This covers both minimal types
//! and the degenerate cases where `g` fixes an endpoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::cyclo::{parse_scalar, root_power, zeta, zeta_pow, CycError, CycScalar, Ctx};
use crate::quiver::{AlgebraElement, Path, Quiver};
use crate::symmetry::{decompose_components, orbits, Component, ComponentKind, Orbits, ZnAction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaftError {
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("incompatible {family} scalars on {orbit}: {left} vs {right}")]
    Glue {
        family: String,
        orbit: String,
        left: String,
        right: String,
    },
    #[error("generator {0} is defined by two fragments")]
    Overlap(String),
    #[error("generator {0} is not covered by any fragment")]
    Uncovered(String),
    #[error("params: {0}")]
    Params(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error(transparent)]
    Scalar(#[from] CycError),
}

pub(crate) fn ser_scalar<S: Serializer>(c: &CycScalar, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

pub(crate) fn ser_scalar_map<S: Serializer, K: Serialize + Ord>(
    m: &BTreeMap<K, CycScalar>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &v.to_string())?;
    }
    map.end()
}

/// `σ(a)`: the path of length <= 1 from `s(a)` to `t(g·a)`, if any.
pub fn sigma(q: &Quiver, act: &ZnAction, a: usize) -> Option<Path> {
    let ar = q.arrow(a);
    let end = act.vertex_image(ar.tgt);
    if end == ar.src {
        Some(Path::trivial(ar.src))
    } else {
        q.arrow_between(ar.src, end).map(|b| q.arrow_path(b))
    }
}

fn sigma_scale(act: &ZnAction, p: &Path) -> CycScalar {
    match p.as_arrow() {
        Some(b) => act.scale(b).clone(),
        None => CycScalar::one(act.ctx()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Vertex(usize),
    Arrow(usize),
}

impl Generator {
    pub fn name(&self, q: &Quiver) -> String {
        match *self {
            Generator::Vertex(v) => format!("e[{}]", q.vertex_id(v)),
            Generator::Arrow(a) => q.arrow(a).id.clone(),
        }
    }

    pub fn path(&self, q: &Quiver) -> Path {
        match *self {
            Generator::Vertex(v) => Path::trivial(v),
            Generator::Arrow(a) => q.arrow_path(a),
        }
    }
}

/// Images of all trivial paths and arrows under one operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorTable {
    pub vertex: Vec<AlgebraElement>,
    pub arrow: Vec<AlgebraElement>,
}

impl GeneratorTable {
    pub fn zero(q: &Quiver) -> Self {
        GeneratorTable {
            vertex: vec![AlgebraElement::zero(q); q.num_vertices()],
            arrow: vec![AlgebraElement::zero(q); q.num_arrows()],
        }
    }

    pub fn get(&self, g: Generator) -> &AlgebraElement {
        match g {
            Generator::Vertex(v) => &self.vertex[v],
            Generator::Arrow(a) => &self.arrow[a],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vertex.iter().chain(&self.arrow).all(AlgebraElement::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Generator, &AlgebraElement)> {
        self.vertex
            .iter()
            .enumerate()
            .map(|(v, e)| (Generator::Vertex(v), e))
            .chain(
                self.arrow
                    .iter()
                    .enumerate()
                    .map(|(a, e)| (Generator::Arrow(a), e)),
            )
    }
}

/// Free data of a T(n)-action: γ per vertex orbit, λ per arrow. Missing = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaftParams {
    pub gamma: Vec<CycScalar>,
    pub lambda: Vec<CycScalar>,
}

impl TaftParams {
    pub fn zero(q: &Quiver, orb: &Orbits, ctx: &Ctx) -> Self {
        TaftParams {
            gamma: vec![CycScalar::zero(ctx); orb.vertex_orbits.len()],
            lambda: vec![CycScalar::zero(ctx); q.num_arrows()],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    #[serde(default)]
    pub gamma: BTreeMap<String, String>,
    #[serde(default)]
    pub lambda: BTreeMap<String, String>,
}

/// Resolve `orbit-of:<vertex>` (any vertex of the orbit).
pub fn resolve_orbit(q: &Quiver, orb: &Orbits, key: &str) -> Result<usize, TaftError> {
    let v = key
        .strip_prefix("orbit-of:")
        .and_then(|v| q.vertex_index(v))
        .ok_or_else(|| TaftError::Params(format!("unknown orbit {key}")))?;
    Ok(orb.vertex_orbit_of[v])
}

pub fn params_from_json(
    q: &Quiver,
    orb: &Orbits,
    ctx: &Ctx,
    j: &ParamsJson,
) -> Result<TaftParams, TaftError> {
    let mut p = TaftParams::zero(q, orb, ctx);
    let mut seen = BTreeSet::new();
    for (k, v) in &j.gamma {
        let o = resolve_orbit(q, orb, k)?;
        let val = parse_scalar(ctx, v).map_err(|e| TaftError::Params(format!("{k}: {e}")))?;
        if !seen.insert(o) && p.gamma[o] != val {
            return Err(TaftError::Params(format!("conflicting values for {k}")));
        }
        p.gamma[o] = val;
    }
    for (k, v) in &j.lambda {
        let a = q
            .arrow_index(k)
            .ok_or_else(|| TaftError::Params(format!("unknown arrow {k}")))?;
        p.lambda[a] = parse_scalar(ctx, v).map_err(|e| TaftError::Params(format!("{k}: {e}")))?;
    }
    Ok(p)
}

pub fn params_to_json(q: &Quiver, orb: &Orbits, p: &TaftParams) -> ParamsJson {
    ParamsJson {
        gamma: p
            .gamma
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_zero())
            .map(|(o, g)| (orb.orbit_name(q, o), g.to_string()))
            .collect(),
        lambda: p
            .lambda
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_zero())
            .map(|(a, l)| (q.arrow(a).id.clone(), l.to_string()))
            .collect(),
    }
}

pub fn parse_params(q: &Quiver, orb: &Orbits, ctx: &Ctx, json: &str) -> Result<TaftParams, TaftError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let j: ParamsJson = serde_path_to_error::deserialize(de)
        .map_err(|e| TaftError::Params(format!("{}: {}", e.path(), e.inner())))?;
    params_from_json(q, orb, ctx, &j)
}

/// `x·e_i = γ ζ^i (e_i - ζ e_{i+1})` on one orbit.
pub fn vertex_action(
    q: &Quiver,
    act: &ZnAction,
    orb: &Orbits,
    o: usize,
    gamma: &CycScalar,
) -> Result<Vec<(usize, AlgebraElement)>, TaftError> {
    vertex_rule(q, act, orb, o, gamma, &zeta(act.ctx()), Shift::Forward)
}

/// Which neighbour the vertex formula pairs `e_i` with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    /// `γ r^i (e_i - r e_{i+1})`
    Forward,
    /// `γ r^i (e_{i-1} - r e_i)`
    Backward,
}

/// Generic vertex formula shared by the x, E, F and X families.
pub fn vertex_rule(
    q: &Quiver,
    act: &ZnAction,
    orb: &Orbits,
    o: usize,
    gamma: &CycScalar,
    r: &CycScalar,
    shift: Shift,
) -> Result<Vec<(usize, AlgebraElement)>, TaftError> {
    let members = &orb.vertex_orbits[o];
    let n = act.n() as usize;
    if !gamma.is_zero() && members.len() < n {
        return Err(TaftError::Constraint(format!(
            "nonzero vertex scalar on {} of size {} < {n}",
            orb.orbit_name(q, o),
            members.len()
        )));
    }
    Ok(vertex_rows(q, members, gamma, r, shift))
}

/// The vertex formula without the orbit-size guard.
pub fn vertex_rows(
    q: &Quiver,
    members: &[usize],
    gamma: &CycScalar,
    r: &CycScalar,
    shift: Shift,
) -> Vec<(usize, AlgebraElement)> {
    let m = members.len();
    members
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let c = gamma * &r.pow(k as i64 + 1);
            let mut e = AlgebraElement::zero(q);
            match shift {
                Shift::Forward => {
                    e.add_term(Path::trivial(v), c.clone());
                    e.add_term(Path::trivial(members[(k + 1) % m]), -(&c * r));
                }
                Shift::Backward => {
                    e.add_term(Path::trivial(members[(k + m - 1) % m]), c.clone());
                    e.add_term(Path::trivial(v), -(&c * r));
                }
            }
            (v, e)
        })
        .collect()
}

/// `x·a = α a + β (g·a) + λ σ(a)` for one arrow.
pub fn arrow_action(
    q: &Quiver,
    act: &ZnAction,
    orb: &Orbits,
    params: &TaftParams,
    a: usize,
) -> AlgebraElement {
    let ctx = act.ctx();
    let ar = q.arrow(a);
    let (s, t) = (ar.src, ar.tgt);
    let alpha = &params.gamma[orb.vertex_orbit_of[t]] * &zeta_pow(ctx, orb.label[t] as i64);
    let beta = -(&params.gamma[orb.vertex_orbit_of[s]] * &zeta_pow(ctx, orb.label[s] as i64 + 1));
    let mut e = AlgebraElement::zero(q);
    e.add_term(q.arrow_path(a), alpha);
    e.add_term(q.arrow_path(act.arrow_image(a)), beta * act.scale(a));
    if let Some(p) = sigma(q, act, a) {
        e.add_term(p, params.lambda[a].clone());
    }
    e
}

/// Per-family vertex scalars and generator tables of part of a quiver.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fragment {
    pub gammas: BTreeMap<String, BTreeMap<usize, CycScalar>>,
    pub tables: BTreeMap<String, BTreeMap<Generator, AlgebraElement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub offending: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintReport {
    pub ok: bool,
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn from_checks(checks: Vec<ConstraintCheck>) -> Self {
        ConstraintReport {
            ok: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failures(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} [{}]", c.name, c.offending.join(", ")))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn check(name: &str, offending: Vec<String>) -> ConstraintCheck {
    ConstraintCheck {
        name: name.to_string(),
        passed: offending.is_empty(),
        offending,
    }
}

/// Product of `f(σ^ℓ(a))` for ℓ < n; zero once the chain leaves the arrows.
pub fn sigma_chain_product(
    q: &Quiver,
    act: &ZnAction,
    a: usize,
    f: impl Fn(usize) -> CycScalar,
) -> CycScalar {
    let mut prod = CycScalar::one(act.ctx());
    let mut cur = a;
    for _ in 0..act.n() {
        prod *= &f(cur);
        if prod.is_zero() {
            return prod;
        }
        match sigma(q, act, cur).and_then(|p| p.as_arrow()) {
            Some(b) => cur = b,
            None => return CycScalar::zero(act.ctx()),
        }
    }
    prod
}

/// Every scalar condition for one component.
pub fn check_constraints(
    q: &Quiver,
    act: &ZnAction,
    orb: &Orbits,
    comp: &Component,
    params: &TaftParams,
) -> ConstraintReport {
    let ctx = act.ctx();
    let n = act.n() as usize;
    let z = zeta(ctx);
    let mut short = Vec::new();
    for &o in &comp.orbits {
        if orb.vertex_orbits[o].len() < n && !params.gamma[o].is_zero() {
            short.push(orb.orbit_name(q, o));
        }
    }
    let mut prodmu = Vec::new();
    let mut support = Vec::new();
    let mut recurrence = Vec::new();
    let mut power = Vec::new();
    let mut seen_orbit = BTreeSet::new();
    for &a in &comp.arrows {
        let id = &q.arrow(a).id;
        if seen_orbit.insert(orb.arrow_orbit_of[a]) {
            let mut prod = CycScalar::one(ctx);
            let mut cur = a;
            for _ in 0..n {
                prod *= act.scale(cur);
                cur = act.arrow_image(cur);
            }
            if !prod.is_one() {
                prodmu.push(id.clone());
            }
        }
        let sig = sigma(q, act, a);
        if sig.is_none() && !params.lambda[a].is_zero() {
            support.push(id.clone());
        }
        let lhs = &params.lambda[act.arrow_image(a)] * act.scale(a);
        let rhs = match &sig {
            Some(p) => &(&z * &params.lambda[a]) * &sigma_scale(act, p),
            None => CycScalar::zero(ctx),
        };
        if lhs != rhs {
            recurrence.push(id.clone());
        }
        if comp.kind == ComponentKind::TypeB {
            let ar = q.arrow(a);
            let gp = params.gamma[orb.vertex_orbit_of[ar.src]].pow(n as i64);
            let gm = params.gamma[orb.vertex_orbit_of[ar.tgt]].pow(n as i64);
            let pl = sigma_chain_product(q, act, a, |b| params.lambda[b].clone());
            if gp != gm + pl {
                power.push(id.clone());
            }
        }
    }
    let mut checks = vec![
        check("gamma-short-orbit", short),
        check("mu-orbit-product", prodmu),
        check("lambda-support", support),
        check("lambda-recurrence", recurrence),
    ];
    if comp.kind == ComponentKind::TypeB {
        checks.push(check("power-identity", power));
    }
    ConstraintReport::from_checks(checks)
}

/// x-table fragment for one component.
pub fn build_component_action(
    q: &Quiver,
    act: &ZnAction,
    orb: &Orbits,
    comp: &Component,
    params: &TaftParams,
    checked: bool,
) -> Result<Fragment, TaftError> {
    if checked {
        let rep = check_constraints(q, act, orb, comp, params);
        if !rep.ok {
            return Err(TaftError::Constraint(rep.failures()));
        }
    }
    let mut frag = Fragment::default();
    let gam = frag.gammas.entry("x".into()).or_default();
    let tab = frag.tables.entry("x".into()).or_default();
    let z = zeta(act.ctx());
    for &o in &comp.orbits {
        gam.insert(o, params.gamma[o].clone());
        let members = &orb.vertex_orbits[o];
        for (v, e) in vertex_rows(q, members, &params.gamma[o], &z, Shift::Forward) {
            tab.insert(Generator::Vertex(v), e);
        }
    }
    for &a in &comp.arrows {
        tab.insert(Generator::Arrow(a), arrow_action(q, act, orb, params, a));
    }
    Ok(frag)
}

/// Merge fragments; vertex scalars on shared orbits must agree per family.
pub fn glue(q: &Quiver, orb: &Orbits, fragments: &[Fragment]) -> Result<Fragment, TaftError> {
    let mut out = Fragment::default();
    for f in fragments {
        for (fam, gs) in &f.gammas {
            let dst = out.gammas.entry(fam.clone()).or_default();
            for (&o, g) in gs {
                match dst.get(&o) {
                    Some(prev) if prev != g => {
                        return Err(TaftError::Glue {
                            family: fam.clone(),
                            orbit: orb.orbit_name(q, o),
                            left: prev.to_string(),
                            right: g.to_string(),
                        })
                    }
                    _ => {
                        dst.insert(o, g.clone());
                    }
                }
            }
        }
        for (fam, tab) in &f.tables {
            let dst = out.tables.entry(fam.clone()).or_default();
            for (&gen, e) in tab {
                match dst.get(&gen) {
                    Some(prev) => {
                        // shared vertices come with equal scalars, hence equal images
                        if matches!(gen, Generator::Arrow(_)) {
                            return Err(TaftError::Overlap(gen.name(q)));
                        }
                        if prev != e {
                            return Err(TaftError::Glue {
                                family: fam.clone(),
                                orbit: gen.name(q),
                                left: prev.display(q),
                                right: e.display(q),
                            });
                        }
                    }
                    None => {
                        dst.insert(gen, e.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Extract a complete generator table for one family.
pub fn table_from_fragment(
    q: &Quiver,
    frag: &Fragment,
    family: &str,
) -> Result<GeneratorTable, TaftError> {
    let empty = BTreeMap::new();
    let tab = frag.tables.get(family).unwrap_or(&empty);
    let mut out = GeneratorTable::zero(q);
    for v in 0..q.num_vertices() {
        out.vertex[v] = tab
            .get(&Generator::Vertex(v))
            .ok_or_else(|| TaftError::Uncovered(Generator::Vertex(v).name(q)))?
            .clone();
    }
    for a in 0..q.num_arrows() {
        out.arrow[a] = tab
            .get(&Generator::Arrow(a))
            .ok_or_else(|| TaftError::Uncovered(Generator::Arrow(a).name(q)))?
            .clone();
    }
    Ok(out)
}

/// A T(n)-action given by its generator tables; `g` comes from `action`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpec {
    pub quiver: Quiver,
    pub action: ZnAction,
    pub x: GeneratorTable,
}

impl ActionSpec {
    pub fn ctx(&self) -> &Ctx {
        self.action.ctx()
    }

    pub fn g_on(&self, gen: Generator) -> AlgebraElement {
        let (p, c) = self.action.apply_path(&self.quiver, &gen.path(&self.quiver));
        AlgebraElement::from_path(&self.quiver, p, c)
    }
}

fn build(q: &Quiver, act: &ZnAction, params: &TaftParams, checked: bool) -> Result<ActionSpec, TaftError> {
    let orb = orbits(q, act);
    let comps = decompose_components(q, &orb);
    let frags = comps
        .iter()
        .map(|c| build_component_action(q, act, &orb, c, params, checked))
        .collect::<Result<Vec<_>, _>>()?;
    let glued = glue(q, &orb, &frags)?;
    Ok(ActionSpec {
        quiver: q.clone(),
        action: act.clone(),
        x: table_from_fragment(q, &glued, "x")?,
    })
}

/// Decompose, build every component with constraint checks, glue.
pub fn build_action(q: &Quiver, act: &ZnAction, params: &TaftParams) -> Result<ActionSpec, TaftError> {
    build(q, act, params, true)
}

/// Same formulas without constraint checks, for probing invalid parameters.
pub fn build_action_unchecked(q: &Quiver, act: &ZnAction, params: &TaftParams) -> ActionSpec {
    build(q, act, params, false).expect("unchecked build cannot fail")
}

/// Action on `Q^op`: `g⋄p = g^{-1}·p`, `x⋄p = g^{-1}·(x·p)`, paths reversed.
pub fn opposite_action(spec: &ActionSpec) -> ActionSpec {
    let q = &spec.quiver;
    let qop = q.opposite();
    let ginv = spec.action.inverse();
    let transport = |e: &AlgebraElement| {
        let mut out = AlgebraElement::zero(&qop);
        for (p, c) in e.terms() {
            let (gp, s) = ginv.apply_path(q, p);
            out.add_term(q.reverse_path(&gp), c * &s);
        }
        out
    };
    ActionSpec {
        quiver: qop.clone(),
        action: ginv.clone(),
        x: GeneratorTable {
            vertex: spec.x.vertex.iter().map(transport).collect(),
            arrow: spec.x.arrow.iter().map(transport).collect(),
        },
    }
}

/// x acts nonzero on some generator.
pub fn is_inner_faithful(spec: &ActionSpec) -> bool {
    !spec.x.is_zero()
}

/// Linear combination of parameter symbols.
pub type LinearForm = BTreeMap<String, CycScalar>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    Gamma,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeSymbol {
    pub name: String,
    pub kind: SymbolKind,
    /// Orbit id for γ, seed arrow id for λ.
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derived {
    pub target: String,
    #[serde(serialize_with = "ser_scalar")]
    pub coeff: CycScalar,
    pub symbol: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Forced {
    pub target: String,
    pub reason: String,
}

/// `plus^n = minus^n + coeff * prod(monomial)`; absent γ means 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PowerConstraint {
    pub plus: Option<String>,
    pub minus: Option<String>,
    pub n: u32,
    #[serde(serialize_with = "ser_scalar")]
    pub coeff: CycScalar,
    pub monomial: Vec<String>,
    pub display: String,
}

impl PowerConstraint {
    fn render(&self) -> String {
        let pw = |s: &Option<String>| match s {
            Some(s) => format!("{s}^{}", self.n),
            None => "0".into(),
        };
        let mono = if self.coeff.is_zero() || self.monomial.is_empty() {
            String::new()
        } else {
            let mut factors: Vec<String> = Vec::new();
            let mut i = 0;
            while i < self.monomial.len() {
                let mut k = i;
                while k < self.monomial.len() && self.monomial[k] == self.monomial[i] {
                    k += 1;
                }
                factors.push(if k - i > 1 {
                    format!("{}^{}", self.monomial[i], k - i)
                } else {
                    self.monomial[i].clone()
                });
                i = k;
            }
            let body = factors.join("*");
            if self.coeff.is_one() {
                format!(" + {body}")
            } else if (-&self.coeff).is_one() {
                format!(" - {body}")
            } else {
                format!(" + ({})*{body}", self.coeff)
            }
        };
        format!("{} = {}{}", pw(&self.plus), pw(&self.minus), mono)
    }

    pub fn evaluate(&self, values: &BTreeMap<String, CycScalar>, ctx: &Ctx) -> bool {
        let get = |s: &Option<String>| match s {
            Some(s) => values[s].pow(self.n as i64),
            None => CycScalar::zero(ctx),
        };
        let mut m = self.coeff.clone();
        for s in &self.monomial {
            m *= &values[s];
        }
        get(&self.plus) == get(&self.minus) + m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableTerm {
    pub path: String,
    #[serde(serialize_with = "ser_scalar_map")]
    pub coeff: LinearForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub generator: String,
    pub terms: Vec<TableTerm>,
}

/// Symbolic parameter space of the T(n)-actions extending a Z_n-action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamReport {
    pub n: u32,
    pub free: Vec<FreeSymbol>,
    pub derived: Vec<Derived>,
    #[serde(rename = "forced-zero")]
    pub forced_zero: Vec<Forced>,
    #[serde(rename = "residual-constraints")]
    pub residual_constraints: Vec<PowerConstraint>,
    #[serde(rename = "x-table")]
    pub x_table: Vec<TableRow>,
    #[serde(skip)]
    gamma_symbol: Vec<Option<String>>,
    #[serde(skip)]
    lambda_value: Vec<Option<(CycScalar, String)>>,
}

impl ParamReport {
    pub fn gamma_symbol(&self, orbit: usize) -> Option<&str> {
        self.gamma_symbol[orbit].as_deref()
    }

    pub fn lambda_value(&self, arrow: usize) -> Option<(&CycScalar, &str)> {
        self.lambda_value[arrow].as_ref().map(|(c, s)| (c, s.as_str()))
    }

    pub fn free_names(&self) -> Vec<&str> {
        self.free.iter().map(|f| f.name.as_str()).collect()
    }

    /// Parameters from values of the free symbols (missing symbols are 0).
    pub fn instantiate(&self, ctx: &Ctx, values: &BTreeMap<String, CycScalar>) -> TaftParams {
        let get = |s: &str| values.get(s).cloned().unwrap_or_else(|| CycScalar::zero(ctx));
        TaftParams {
            gamma: self
                .gamma_symbol
                .iter()
                .map(|s| s.as_deref().map(get).unwrap_or_else(|| CycScalar::zero(ctx)))
                .collect(),
            lambda: self
                .lambda_value
                .iter()
                .map(|l| match l {
                    Some((c, s)) => c * &get(s),
                    None => CycScalar::zero(ctx),
                })
                .collect(),
        }
    }

    pub fn row(&self, generator: &str) -> Option<&TableRow> {
        self.x_table.iter().find(|r| r.generator == generator)
    }
}

fn role_name(c_index: usize, comp: &Component, k: usize) -> String {
    match comp.kind {
        ComponentKind::TypeB => format!("gamma^({})_{}", c_index + 1, if k == 0 { "+" } else { "-" }),
        _ => format!("gamma^({})", c_index + 1),
    }
}

/// Decompose, label, and express every action scalar through free symbols.
pub fn parametrize(q: &Quiver, act: &ZnAction) -> ParamReport {
    let ctx = act.ctx();
    let n = act.n();
    let orb = orbits(q, act);
    let comps = decompose_components(q, &orb);
    let z = zeta(ctx);

    let mut free = Vec::new();
    let mut derived = Vec::new();
    let mut forced_zero = Vec::new();

    let mut gamma_symbol: Vec<Option<String>> = vec![None; orb.vertex_orbits.len()];
    for (o, members) in orb.vertex_orbits.iter().enumerate() {
        if members.len() == n as usize {
            let name = format!("gamma[{}]", q.vertex_id(members[0]));
            free.push(FreeSymbol {
                name: name.clone(),
                kind: SymbolKind::Gamma,
                anchor: orb.orbit_name(q, o),
            });
            gamma_symbol[o] = Some(name);
        }
    }
    for (ci, comp) in comps.iter().enumerate() {
        for (k, &o) in comp.orbits.iter().enumerate() {
            let role = role_name(ci, comp, k);
            match &gamma_symbol[o] {
                Some(s) => derived.push(Derived {
                    target: role,
                    coeff: CycScalar::one(ctx),
                    symbol: s.clone(),
                }),
                None => forced_zero.push(Forced {
                    target: role,
                    reason: format!(
                        "orbit {} has size {} < {n}",
                        orb.orbit_name(q, o),
                        orb.vertex_orbits[o].len()
                    ),
                }),
            }
        }
    }

    // λ along arrow orbits: λ(φa) = ζ λ(a) μ(σa) / μ(a)
    let mut lambda_value: Vec<Option<(CycScalar, String)>> = vec![None; q.num_arrows()];
    let mut seeds: Vec<(usize, Vec<(usize, CycScalar)>)> = Vec::new();
    let mut orbit_list: Vec<&Vec<usize>> = orb.arrow_orbits.iter().collect();
    orbit_list.sort_by_key(|o| *o.iter().min().expect("nonempty"));
    for aorb in orbit_list {
        let seed = *aorb
            .iter()
            .min_by_key(|&&a| {
                let ar = q.arrow(a);
                (orb.label[ar.src], orb.label[ar.tgt], a)
            })
            .expect("nonempty");
        if sigma(q, act, seed).is_none() {
            for &a in aorb {
                forced_zero.push(Forced {
                    target: format!("lambda({})", q.arrow(a).id),
                    reason: "no sigma path".into(),
                });
            }
            continue;
        }
        let mut chain = Vec::with_capacity(aorb.len());
        let mut cur = seed;
        let mut coeff = CycScalar::one(ctx);
        loop {
            chain.push((cur, coeff.clone()));
            let sp = sigma(q, act, cur).expect("sigma exists along the orbit");
            coeff = &(&(&coeff * &z) * &sigma_scale(act, &sp)) / act.scale(cur);
            cur = act.arrow_image(cur);
            if cur == seed {
                break;
            }
        }
        if !coeff.is_one() {
            for &a in aorb {
                forced_zero.push(Forced {
                    target: format!("lambda({})", q.arrow(a).id),
                    reason: format!("orbit closure factor {coeff} != 1"),
                });
            }
            continue;
        }
        seeds.push((seed, chain));
    }

    // power identities, iterating forced seeds to a fixed point
    let mut zeroed: BTreeSet<usize> = BTreeSet::new();
    let residual = loop {
        for (seed, chain) in &seeds {
            let name = format!("lambda[{}]", q.arrow(*seed).id);
            for (a, c) in chain {
                lambda_value[*a] = (!zeroed.contains(seed)).then(|| (c.clone(), name.clone()));
            }
        }
        let mut cons: BTreeSet<PowerConstraint> = BTreeSet::new();
        for comp in comps.iter().filter(|c| c.kind == ComponentKind::TypeB) {
            for &a in &comp.arrows {
                let ar = q.arrow(a);
                let plus = gamma_symbol[orb.vertex_orbit_of[ar.src]].clone();
                let minus = gamma_symbol[orb.vertex_orbit_of[ar.tgt]].clone();
                let mut coeff = CycScalar::one(ctx);
                let mut mono = Vec::new();
                let mut cur = a;
                for _ in 0..n {
                    match &lambda_value[cur] {
                        Some((c, s)) => {
                            coeff *= c;
                            mono.push(s.clone());
                        }
                        None => {
                            coeff = CycScalar::zero(ctx);
                            break;
                        }
                    }
                    match sigma(q, act, cur).and_then(|p| p.as_arrow()) {
                        Some(b) => cur = b,
                        None => {
                            coeff = CycScalar::zero(ctx);
                            break;
                        }
                    }
                }
                if coeff.is_zero() {
                    mono.clear();
                }
                mono.sort();
                if plus == minus && coeff.is_zero() {
                    continue;
                }
                if plus.is_none() && minus.is_none() && coeff.is_zero() {
                    continue;
                }
                let mut pc = PowerConstraint {
                    plus,
                    minus,
                    n,
                    coeff,
                    monomial: mono,
                    display: String::new(),
                };
                pc.display = pc.render();
                cons.insert(pc);
            }
        }
        let mut newly = false;
        for c in &cons {
            let distinct: BTreeSet<&String> = c.monomial.iter().collect();
            if c.plus.is_none() && c.minus.is_none() && distinct.len() == 1 {
                let s = distinct.into_iter().next().expect("one symbol");
                if let Some((seed, _)) = seeds
                    .iter()
                    .find(|(sd, _)| &format!("lambda[{}]", q.arrow(*sd).id) == s)
                {
                    newly |= zeroed.insert(*seed);
                }
            }
        }
        if !newly {
            break cons.into_iter().collect::<Vec<_>>();
        }
    };

    for (seed, chain) in &seeds {
        let name = format!("lambda[{}]", q.arrow(*seed).id);
        if zeroed.contains(seed) {
            for (a, _) in chain {
                forced_zero.push(Forced {
                    target: format!("lambda({})", q.arrow(*a).id),
                    reason: format!("power identity forces {name} = 0"),
                });
            }
            continue;
        }
        free.push(FreeSymbol {
            name: name.clone(),
            kind: SymbolKind::Lambda,
            anchor: q.arrow(*seed).id.clone(),
        });
        for (a, c) in chain.iter().skip(1) {
            derived.push(Derived {
                target: format!("lambda({})", q.arrow(*a).id),
                coeff: c.clone(),
                symbol: name.clone(),
            });
        }
    }
    forced_zero.sort_by(|a, b| a.target.cmp(&b.target));

    let x_table = symbolic_table(q, act, &orb, &gamma_symbol, &lambda_value);
    ParamReport {
        n,
        free,
        derived,
        forced_zero,
        residual_constraints: residual,
        x_table,
        gamma_symbol,
        lambda_value,
    }
}

fn add_form(f: &mut LinearForm, sym: &str, c: CycScalar) {
    if c.is_zero() {
        return;
    }
    let e = f.entry(sym.to_string()).or_insert_with(|| CycScalar::zero(c.ctx()));
    *e += &c;
    if e.is_zero() {
        f.remove(sym);
    }
}

fn symbolic_table(
    q: &Quiver,
    act: &ZnAction,
    orb: &Orbits,
    gamma_symbol: &[Option<String>],
    lambda_value: &[Option<(CycScalar, String)>],
) -> Vec<TableRow> {
    let ctx = act.ctx();
    let z = zeta(ctx);
    let finish = |gen: String, terms: BTreeMap<Path, LinearForm>| TableRow {
        generator: gen,
        terms: terms
            .into_iter()
            .filter(|(_, f)| !f.is_empty())
            .map(|(p, f)| TableTerm {
                path: q.path_name(&p),
                coeff: f,
            })
            .collect(),
    };
    let mut rows = Vec::new();
    for v in 0..q.num_vertices() {
        let o = orb.vertex_orbit_of[v];
        let mut terms: BTreeMap<Path, LinearForm> = BTreeMap::new();
        if let Some(s) = &gamma_symbol[o] {
            let c = z.pow(orb.label[v] as i64);
            add_form(terms.entry(Path::trivial(v)).or_default(), s, c.clone());
            add_form(
                terms.entry(Path::trivial(act.vertex_image(v))).or_default(),
                s,
                -(&c * &z),
            );
        }
        rows.push(finish(format!("e[{}]", q.vertex_id(v)), terms));
    }
    for a in 0..q.num_arrows() {
        let ar = q.arrow(a);
        let mut terms: BTreeMap<Path, LinearForm> = BTreeMap::new();
        if let Some(s) = &gamma_symbol[orb.vertex_orbit_of[ar.tgt]] {
            add_form(
                terms.entry(q.arrow_path(a)).or_default(),
                s,
                zeta_pow(ctx, orb.label[ar.tgt] as i64),
            );
        }
        if let Some(s) = &gamma_symbol[orb.vertex_orbit_of[ar.src]] {
            add_form(
                terms.entry(q.arrow_path(act.arrow_image(a))).or_default(),
                s,
                -(&zeta_pow(ctx, orb.label[ar.src] as i64 + 1) * act.scale(a)),
            );
        }
        if let (Some(p), Some((c, s))) = (sigma(q, act, a), &lambda_value[a]) {
            add_form(terms.entry(p).or_default(), s, c.clone());
        }
        rows.push(finish(ar.id.clone(), terms));
    }
    rows
}

fn pool(ctx: &Ctx) -> Vec<CycScalar> {
    ["1", "-1", "2", "-2", "1/2", "-1/2", "z", "z^2", "1+z"]
        .iter()
        .map(|s| parse_scalar(ctx, s).expect("pool literal"))
        .collect()
}

/// Root of `r^n = target` among pool elements times powers of z.
fn pool_root(ctx: &Ctx, target: &CycScalar, n: u32) -> Option<CycScalar> {
    if target.is_zero() {
        return Some(CycScalar::zero(ctx));
    }
    let mut roots = Vec::new();
    for p in pool(ctx) {
        for k in 0..ctx.root_order() as i64 {
            let r = &p * &root_power(ctx, k);
            if r.pow(n as i64) == *target {
                roots.push(r);
            }
        }
    }
    roots.into_iter().min_by_key(crate::cyclo::height)
}

/// Deterministic parameters satisfying the report's constraints.
///
/// Free symbols are drawn from a small pool; each residual constraint is then
/// solved for one unfixed symbol, by division when a λ occurs linearly and
/// otherwise by an n-th root from the pool. After `attempts` failures the
/// symbols of the residual constraints are set to zero.
pub fn sample_params(
    report: &ParamReport,
    ctx: &Ctx,
    seed: u64,
    attempts: usize,
) -> Result<BTreeMap<String, CycScalar>, TaftError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = pool(ctx);
    for _ in 0..attempts {
        let mut values: BTreeMap<String, CycScalar> = BTreeMap::new();
        for f in &report.free {
            let idx = match f.kind {
                SymbolKind::Gamma => rng.gen_range(0..pool.len()),
                // index == len stands for 0
                SymbolKind::Lambda => rng.gen_range(0..=pool.len()),
            };
            let v = pool.get(idx).cloned().unwrap_or_else(|| CycScalar::zero(ctx));
            values.insert(f.name.clone(), v);
        }
        if solve_residuals(report, ctx, &mut values) {
            return Ok(values);
        }
    }
    let mut values: BTreeMap<String, CycScalar> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut involved = BTreeSet::new();
    for c in &report.residual_constraints {
        involved.extend(c.plus.iter().cloned());
        involved.extend(c.minus.iter().cloned());
        involved.extend(c.monomial.iter().cloned());
    }
    for f in &report.free {
        let v = if involved.contains(&f.name) {
            CycScalar::zero(ctx)
        } else {
            pool[rng.gen_range(0..pool.len())].clone()
        };
        values.insert(f.name.clone(), v);
    }
    if report
        .residual_constraints
        .iter()
        .all(|c| c.evaluate(&values, ctx))
    {
        Ok(values)
    } else {
        Err(TaftError::Sampling("no solution found".into()))
    }
}

fn solve_residuals(report: &ParamReport, ctx: &Ctx, values: &mut BTreeMap<String, CycScalar>) -> bool {
    let mut fixed: BTreeSet<String> = BTreeSet::new();
    for c in &report.residual_constraints {
        if c.evaluate(values, ctx) {
            mark(c, &mut fixed);
            continue;
        }
        let pw = |s: &Option<String>, v: &BTreeMap<String, CycScalar>| match s {
            Some(s) => v[s].pow(c.n as i64),
            None => CycScalar::zero(ctx),
        };
        let linear = c
            .monomial
            .iter()
            .find(|s| !fixed.contains(*s) && c.monomial.iter().filter(|t| t == s).count() == 1)
            .cloned();
        let mut solved = false;
        if let Some(s) = linear {
            let mut rest = c.coeff.clone();
            for t in c.monomial.iter().filter(|t| **t != s) {
                rest *= &values[t];
            }
            if !rest.is_zero() {
                let want = pw(&c.plus, values) - pw(&c.minus, values);
                values.insert(s, &want / &rest);
                solved = true;
            }
        }
        if !solved {
            let mono = {
                let mut m = c.coeff.clone();
                for t in &c.monomial {
                    m *= &values[t];
                }
                m
            };
            let try_root = |sym: &Option<String>, target: CycScalar, values: &mut BTreeMap<String, CycScalar>| {
                match sym {
                    Some(s) if !fixed.contains(s) => match pool_root(ctx, &target, c.n) {
                        Some(r) => {
                            values.insert(s.clone(), r);
                            true
                        }
                        None => false,
                    },
                    _ => false,
                }
            };
            let target_plus = pw(&c.minus, values) + mono.clone();
            solved = try_root(&c.plus, target_plus, values);
            if !solved {
                let target_minus = pw(&c.plus, values) - mono;
                solved = try_root(&c.minus, target_minus, values);
            }
        }
        if !solved || !c.evaluate(values, ctx) {
            return false;
        }
        mark(c, &mut fixed);
    }
    report
        .residual_constraints
        .iter()
        .all(|c| c.evaluate(values, ctx))
}

fn mark(c: &PowerConstraint, fixed: &mut BTreeSet<String>) {
    fixed.extend(c.plus.iter().cloned());
    fixed.extend(c.minus.iter().cloned());
    fixed.extend(c.monomial.iter().cloned());
}

impl fmt::Display for PowerConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}
