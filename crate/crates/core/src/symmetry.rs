//! Z_n-actions on quivers, orbits and the decomposition into Z_n-components.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cyclo::{make_context, parse_scalar, CycError, CycScalar, Ctx};
use crate::quiver::{Path, Quiver};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("action order {got} does not match field order {want}")]
    OrderMismatch { got: u32, want: u32 },
    #[error("arrow {arrow}: {source}")]
    Scale { arrow: String, source: CycError },
    #[error(transparent)]
    Field(#[from] CycError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowImageSpec {
    /// Defaults to the unique arrow between the permuted endpoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(default = "one_str")]
    pub scale: String,
}

fn one_str() -> String {
    "1".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpecJson {
    pub n: u32,
    #[serde(default)]
    pub vertex_perm: BTreeMap<String, String>,
    #[serde(default)]
    pub arrows: BTreeMap<String, ArrowImageSpec>,
}

/// The automorphism `g` of kQ: a vertex permutation and `g·a = μ_a φ(a)`.
///
/// Construction does not check the automorphism property; see [`validate_action`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZnAction {
    ctx: Ctx,
    vperm: Vec<usize>,
    aimg: Vec<usize>,
    mu: Vec<CycScalar>,
}

impl ZnAction {
    pub fn new(ctx: &Ctx, vperm: Vec<usize>, aimg: Vec<usize>, mu: Vec<CycScalar>) -> Self {
        assert_eq!(aimg.len(), mu.len());
        ZnAction {
            ctx: ctx.clone(),
            vperm,
            aimg,
            mu,
        }
    }

    /// Action induced by a vertex permutation with all scales 1.
    pub fn from_vertex_perm(q: &Quiver, ctx: &Ctx, vperm: Vec<usize>) -> Option<Self> {
        let mut aimg = Vec::with_capacity(q.num_arrows());
        for a in q.arrows() {
            aimg.push(q.arrow_between(vperm[a.src], vperm[a.tgt])?);
        }
        let mu = vec![CycScalar::one(ctx); q.num_arrows()];
        Some(ZnAction::new(ctx, vperm, aimg, mu))
    }

    pub fn identity(q: &Quiver, ctx: &Ctx) -> Self {
        Self::from_vertex_perm(q, ctx, (0..q.num_vertices()).collect()).expect("identity")
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn n(&self) -> u32 {
        self.ctx.n()
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vperm[v]
    }

    pub fn arrow_image(&self, a: usize) -> usize {
        self.aimg[a]
    }

    pub fn scale(&self, a: usize) -> &CycScalar {
        &self.mu[a]
    }

    pub fn scales(&self) -> &[CycScalar] {
        &self.mu
    }

    pub fn vertex_perm(&self) -> &[usize] {
        &self.vperm
    }

    pub fn with_scales(&self, mu: Vec<CycScalar>) -> Self {
        ZnAction::new(&self.ctx, self.vperm.clone(), self.aimg.clone(), mu)
    }

    /// `g^{-1}`: inverse permutations, `g^{-1}·a = μ_{φ^{-1}(a)}^{-1} φ^{-1}(a)`.
    pub fn inverse(&self) -> Self {
        let mut vperm = vec![0; self.vperm.len()];
        for (v, &w) in self.vperm.iter().enumerate() {
            vperm[w] = v;
        }
        let mut aimg = vec![0; self.aimg.len()];
        let mut mu = vec![CycScalar::one(&self.ctx); self.aimg.len()];
        for (a, &b) in self.aimg.iter().enumerate() {
            aimg[b] = a;
            mu[b] = self.mu[a].inv();
        }
        ZnAction::new(&self.ctx, vperm, aimg, mu)
    }

    /// `g·p` for a basis path, as (image path, scalar).
    pub fn apply_path(&self, q: &Quiver, p: &Path) -> (Path, CycScalar) {
        if p.is_trivial() {
            return (Path::trivial(self.vperm[p.source()]), CycScalar::one(&self.ctx));
        }
        let mut c = CycScalar::one(&self.ctx);
        let mut img = Vec::with_capacity(p.len());
        for a in p.arrows() {
            img.push(self.aimg[a]);
            c *= &self.mu[a];
        }
        (q.path(&img).expect("automorphism"), c)
    }

    pub fn to_json(&self, q: &Quiver) -> ActionSpecJson {
        ActionSpecJson {
            n: self.n(),
            vertex_perm: (0..q.num_vertices())
                .map(|v| {
                    (
                        q.vertex_id(v).to_string(),
                        q.vertex_id(self.vperm[v]).to_string(),
                    )
                })
                .collect(),
            arrows: (0..q.num_arrows())
                .map(|a| {
                    (
                        q.arrow(a).id.clone(),
                        ArrowImageSpec {
                            image: Some(q.arrow(self.aimg[a]).id.clone()),
                            scale: self.mu[a].to_string(),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Parse an action file, building the field from its `n`.
pub fn parse_action(q: &Quiver, json: &str) -> Result<ZnAction, ActionError> {
    let spec = parse_action_json(json)?;
    let ctx = make_context(spec.n as i64)?;
    action_from_json(q, &ctx, &spec)
}

pub fn parse_action_json(json: &str) -> Result<ActionSpecJson, ActionError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    serde_path_to_error::deserialize(de).map_err(|e| ActionError::Schema {
        path: e.path().to_string(),
        msg: e.inner().to_string(),
    })
}

pub fn action_from_json(
    q: &Quiver,
    ctx: &Ctx,
    spec: &ActionSpecJson,
) -> Result<ZnAction, ActionError> {
    if spec.n != ctx.n() {
        return Err(ActionError::OrderMismatch {
            got: spec.n,
            want: ctx.n(),
        });
    }
    let mut vperm: Vec<usize> = (0..q.num_vertices()).collect();
    for (k, v) in &spec.vertex_perm {
        let a = q
            .vertex_index(k)
            .ok_or_else(|| ActionError::UnknownVertex(k.clone()))?;
        let b = q
            .vertex_index(v)
            .ok_or_else(|| ActionError::UnknownVertex(v.clone()))?;
        vperm[a] = b;
    }
    for k in spec.arrows.keys() {
        if q.arrow_index(k).is_none() {
            return Err(ActionError::UnknownArrow(k.clone()));
        }
    }
    let mut aimg = Vec::with_capacity(q.num_arrows());
    let mut mu = Vec::with_capacity(q.num_arrows());
    for (i, a) in q.arrows().iter().enumerate() {
        let entry = spec.arrows.get(&a.id);
        let image = match entry.and_then(|e| e.image.as_ref()) {
            Some(id) => q
                .arrow_index(id)
                .ok_or_else(|| ActionError::UnknownArrow(id.clone()))?,
            // an unresolvable default is left pointing at itself; validation reports it
            None => q.arrow_between(vperm[a.src], vperm[a.tgt]).unwrap_or(i),
        };
        let scale = match entry {
            Some(e) => parse_scalar(ctx, &e.scale).map_err(|source| ActionError::Scale {
                arrow: a.id.clone(),
                source,
            })?,
            None => CycScalar::one(ctx),
        };
        aimg.push(image);
        mu.push(scale);
    }
    Ok(ZnAction::new(ctx, vperm, aimg, mu))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ActionViolation {
    VertexPermNotBijective,
    ArrowMapNotBijective,
    NotAutomorphism { arrow: String, image: String },
    ZeroScale { arrow: String },
    OrderDoesNotDivide { order: u64, n: u32 },
    ScaleProduct { orbit: Vec<String>, product: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    pub valid: bool,
    pub faithful: bool,
    pub order: u64,
    pub violations: Vec<ActionViolation>,
}

fn is_bijection(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    true
}

fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            cyc.push(x);
            x = p[x];
        }
        out.push(cyc);
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    num_integer::Integer::lcm(&a, &b)
}

/// Automorphism property, order dividing n, the n-step scale products, faithfulness.
pub fn validate_action(q: &Quiver, act: &ZnAction) -> ActionReport {
    let mut v = Vec::new();
    let n = act.n();
    let vb = act.vperm.len() == q.num_vertices() && is_bijection(&act.vperm);
    let ab = act.aimg.len() == q.num_arrows() && is_bijection(&act.aimg);
    if !vb {
        v.push(ActionViolation::VertexPermNotBijective);
    }
    if !ab {
        v.push(ActionViolation::ArrowMapNotBijective);
    }
    if !vb || !ab {
        return ActionReport {
            valid: false,
            faithful: false,
            order: 0,
            violations: v,
        };
    }
    for (i, a) in q.arrows().iter().enumerate() {
        let b = q.arrow(act.aimg[i]);
        if b.src != act.vperm[a.src] || b.tgt != act.vperm[a.tgt] {
            v.push(ActionViolation::NotAutomorphism {
                arrow: a.id.clone(),
                image: b.id.clone(),
            });
        }
        if act.mu[i].is_zero() {
            v.push(ActionViolation::ZeroScale {
                arrow: a.id.clone(),
            });
        }
    }
    let vc = cycles(&act.vperm);
    let ac = cycles(&act.aimg);
    let order = vc
        .iter()
        .chain(ac.iter())
        .fold(1u64, |o, c| lcm(o, c.len() as u64));
    if n as u64 % order != 0 {
        v.push(ActionViolation::OrderDoesNotDivide { order, n });
    } else {
        for c in &ac {
            let mut prod = CycScalar::one(&act.ctx);
            for &a in c {
                prod *= &act.mu[a];
            }
            let full = prod.pow((n as usize / c.len()) as i64);
            if !full.is_one() {
                v.push(ActionViolation::ScaleProduct {
                    orbit: c.iter().map(|&a| q.arrow(a).id.clone()).collect(),
                    product: full.to_string(),
                });
            }
        }
    }
    ActionReport {
        valid: v.is_empty(),
        faithful: v.is_empty() && order == n as u64,
        order,
        violations: v,
    }
}

/// Vertex and arrow orbits with canonical labels.
///
/// A vertex orbit starts at its lexicographically smallest id and follows the
/// permutation; `label[v]` is the 1-based position. Orbits are ordered by their
/// smallest vertex index. Arrow orbits start at their smallest arrow index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbits {
    pub vertex_orbits: Vec<Vec<usize>>,
    pub vertex_orbit_of: Vec<usize>,
    pub label: Vec<usize>,
    pub arrow_orbits: Vec<Vec<usize>>,
    pub arrow_orbit_of: Vec<usize>,
}

impl Orbits {
    pub fn orbit_size(&self, v: usize) -> usize {
        self.vertex_orbits[self.vertex_orbit_of[v]].len()
    }

    /// Id of an orbit: `orbit-of:<start vertex id>`.
    pub fn orbit_name(&self, q: &Quiver, o: usize) -> String {
        format!("orbit-of:{}", q.vertex_id(self.vertex_orbits[o][0]))
    }
}

pub fn orbits(q: &Quiver, act: &ZnAction) -> Orbits {
    let mut vertex_orbits = Vec::new();
    let mut vertex_orbit_of = vec![usize::MAX; q.num_vertices()];
    let mut label = vec![0; q.num_vertices()];
    for c in cycles(&act.vperm) {
        let start = *c
            .iter()
            .min_by(|&&a, &&b| q.vertex_id(a).cmp(q.vertex_id(b)))
            .expect("nonempty");
        let mut orb = Vec::with_capacity(c.len());
        let mut x = start;
        loop {
            orb.push(x);
            x = act.vperm[x];
            if x == start {
                break;
            }
        }
        vertex_orbits.push(orb);
    }
    vertex_orbits.sort_by_key(|o| *o.iter().min().expect("nonempty"));
    for (i, o) in vertex_orbits.iter().enumerate() {
        for (k, &v) in o.iter().enumerate() {
            vertex_orbit_of[v] = i;
            label[v] = k + 1;
        }
    }
    let arrow_orbits = cycles(&act.aimg);
    let mut arrow_orbit_of = vec![0; q.num_arrows()];
    for (i, o) in arrow_orbits.iter().enumerate() {
        for &a in o {
            arrow_orbit_of[a] = i;
        }
    }
    Orbits {
        vertex_orbits,
        vertex_orbit_of,
        label,
        arrow_orbits,
        arrow_orbit_of,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    TypeA,
    TypeB,
    IsolatedVertices,
}

/// A Z_n-component. `orbits` is `[o]` for Type A and isolated components,
/// `[source orbit, target orbit]` for Type B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub kind: ComponentKind,
    pub orbits: Vec<usize>,
    pub arrows: Vec<usize>,
}

impl Component {
    pub fn vertices(&self, orb: &Orbits) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .orbits
            .iter()
            .flat_map(|&o| orb.vertex_orbits[o].iter().copied())
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Ordered by smallest arrow index; isolated orbits last, by orbit index.
pub fn decompose_components(q: &Quiver, orb: &Orbits) -> Vec<Component> {
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, a) in q.arrows().iter().enumerate() {
        let key = (orb.vertex_orbit_of[a.src], orb.vertex_orbit_of[a.tgt]);
        groups.entry(key).or_default().push(i);
    }
    let mut touched = vec![false; orb.vertex_orbits.len()];
    let mut comps: Vec<Component> = groups
        .into_iter()
        .map(|((s, t), arrows)| {
            touched[s] = true;
            touched[t] = true;
            if s == t {
                Component {
                    kind: ComponentKind::TypeA,
                    orbits: vec![s],
                    arrows,
                }
            } else {
                Component {
                    kind: ComponentKind::TypeB,
                    orbits: vec![s, t],
                    arrows,
                }
            }
        })
        .collect();
    comps.sort_by_key(|c| c.arrows[0]);
    for (o, t) in touched.iter().enumerate() {
        if !t {
            comps.push(Component {
                kind: ComponentKind::IsolatedVertices,
                orbits: vec![o],
                arrows: Vec::new(),
            });
        }
    }
    comps
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledVertex {
    pub vertex: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledArrow {
    pub arrow: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledComponent {
    pub kind: ComponentKind,
    pub orbits: Vec<String>,
    pub orbit_sizes: Vec<usize>,
    pub vertices: Vec<LabeledVertex>,
    pub arrows: Vec<LabeledArrow>,
}

/// Labels `i` (Type A), `i+` / `j-` (Type B) and arrow names `a^i_j` / `b^i_j`.
pub fn canonical_labels(q: &Quiver, orb: &Orbits, c: &Component) -> LabeledComponent {
    let suffix = |k: usize| match (c.kind, k) {
        (ComponentKind::TypeB, 0) => "+",
        (ComponentKind::TypeB, _) => "-",
        _ => "",
    };
    let mut vertices = Vec::new();
    for (k, &o) in c.orbits.iter().enumerate() {
        for &v in &orb.vertex_orbits[o] {
            vertices.push(LabeledVertex {
                vertex: q.vertex_id(v).to_string(),
                label: format!("{}{}", orb.label[v], suffix(k)),
            });
        }
    }
    let letter = if c.kind == ComponentKind::TypeB {
        'b'
    } else {
        'a'
    };
    let arrows = c
        .arrows
        .iter()
        .map(|&a| {
            let ar = q.arrow(a);
            LabeledArrow {
                arrow: ar.id.clone(),
                name: format!("{letter}^{}_{}", orb.label[ar.src], orb.label[ar.tgt]),
            }
        })
        .collect();
    LabeledComponent {
        kind: c.kind,
        orbits: c.orbits.iter().map(|&o| orb.orbit_name(q, o)).collect(),
        orbit_sizes: c
            .orbits
            .iter()
            .map(|&o| orb.vertex_orbits[o].len())
            .collect(),
        vertices,
        arrows,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Minimality {
    TypeA { m: usize },
    TypeB { m: usize, m_prime: usize },
    NotMinimal,
}

pub fn classify_minimal(q: &Quiver, act: &ZnAction) -> Minimality {
    let orb = orbits(q, act);
    let comps = decompose_components(q, &orb);
    if comps.len() != 1 {
        return Minimality::NotMinimal;
    }
    let c = &comps[0];
    let size = |k: usize| orb.vertex_orbits[c.orbits[k]].len();
    match c.kind {
        ComponentKind::TypeA if size(0) > 1 => Minimality::TypeA { m: size(0) },
        ComponentKind::TypeB => Minimality::TypeB {
            m: size(0),
            m_prime: size(1),
        },
        _ => Minimality::NotMinimal,
    }
}

/// Re-assemble a quiver from components (their union), for gluing checks.
pub fn reassemble(q: &Quiver, orb: &Orbits, comps: &[Component]) -> Quiver {
    let mut vs: Vec<usize> = comps.iter().flat_map(|c| c.vertices(orb)).collect();
    vs.sort();
    vs.dedup();
    let mut arrows: Vec<usize> = comps.iter().flat_map(|c| c.arrows.clone()).collect();
    arrows.sort();
    Quiver::from_parts(
        vs.iter().map(|&v| q.vertex_id(v).to_string()).collect(),
        arrows
            .iter()
            .map(|&a| {
                let ar = q.arrow(a);
                let pos = |x| vs.binary_search(&x).expect("vertex present");
                (ar.id.clone(), pos(ar.src), pos(ar.tgt))
            })
            .collect(),
    )
}
