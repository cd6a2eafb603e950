//! Operators on the filtered path basis and exact relation checks.
//!
//! A skew-primitive `h` with `Δ(h) = L ⊗ h + h ⊗ R` acts on products by
//! `h·(pq) = (L·p)(h·q) + (h·p)(R·q)`. The coproduct conventions of every
//! generator enter only through the `left`/`right` fields of [`SkewOp`]:
//! `x`, `E`, `X` use `(1, g|K|G)`, `F` uses `(K^{-1}, 1)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclo::{zeta, CycScalar, Ctx};
use crate::quiver::{enumerate_paths, AlgebraElement, Path, Quiver};
use crate::symmetry::{validate_action, ZnAction};
use crate::symmetry::{decompose_components, orbits};
use crate::taft::{check_constraints, ActionSpec, ConstraintCheck, Generator, GeneratorTable, TaftParams};

/// A skew-primitive operator given on generators. `None` stands for the identity.
#[derive(Debug, Clone)]
pub struct SkewOp {
    pub table: GeneratorTable,
    pub left: Option<String>,
    pub right: Option<String>,
}

/// Named grouplike and skew-primitive operators acting on one quiver.
#[derive(Debug, Clone)]
pub struct OperatorSystem {
    pub quiver: Quiver,
    pub ctx: Ctx,
    pub grouplikes: BTreeMap<String, ZnAction>,
    pub skews: BTreeMap<String, SkewOp>,
}

impl OperatorSystem {
    pub fn new(quiver: &Quiver, ctx: &Ctx) -> Self {
        OperatorSystem {
            quiver: quiver.clone(),
            ctx: ctx.clone(),
            grouplikes: BTreeMap::new(),
            skews: BTreeMap::new(),
        }
    }

    pub fn grouplike(mut self, name: &str, act: &ZnAction) -> Self {
        self.grouplikes.insert(name.to_string(), act.clone());
        self
    }

    pub fn skew(mut self, name: &str, table: GeneratorTable, left: Option<&str>, right: Option<&str>) -> Self {
        self.skews.insert(
            name.to_string(),
            SkewOp {
                table,
                left: left.map(str::to_string),
                right: right.map(str::to_string),
            },
        );
        self
    }

    /// `g` and `x` of a T(n)-action.
    pub fn taft(spec: &ActionSpec) -> Self {
        OperatorSystem::new(&spec.quiver, spec.ctx())
            .grouplike("g", &spec.action)
            .skew("x", spec.x.clone(), None, Some("g"))
    }
}

/// Sparse columns (images of basis paths) of every operator up to length `depth`.
#[derive(Debug, Clone)]
pub struct OperatorTable {
    pub depth: usize,
    pub basis: Vec<Path>,
    index: HashMap<Path, usize>,
    columns: BTreeMap<String, Vec<AlgebraElement>>,
    system: OperatorSystem,
}

/// Cap worker threads from `HOPFQ_THREADS`; later calls are no-ops.
pub fn configure_threads_from_env() {
    static DONE: OnceLock<()> = OnceLock::new();
    DONE.get_or_init(|| {
        if let Some(k) = std::env::var("HOPFQ_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&k| k > 0)
        {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    });
}

fn grouplike_image(q: &Quiver, act: &ZnAction, p: &Path) -> AlgebraElement {
    let (img, c) = act.apply_path(q, p);
    AlgebraElement::from_path(q, img, c)
}

impl OperatorTable {
    pub fn system(&self) -> &OperatorSystem {
        &self.system
    }

    pub fn quiver(&self) -> &Quiver {
        &self.system.quiver
    }

    pub fn column(&self, op: &str, p: &Path) -> &AlgebraElement {
        &self.columns[op][self.index[p]]
    }

    pub fn operators(&self) -> impl Iterator<Item = &String> {
        self.columns.keys()
    }

    /// Apply a named operator (or `1` for `None`) to an element inside the basis.
    pub fn apply(&self, op: Option<&str>, e: &AlgebraElement) -> AlgebraElement {
        let Some(op) = op else { return e.clone() };
        let cols = &self.columns[op];
        let mut out = AlgebraElement::zero(self.quiver());
        for (p, c) in e.terms() {
            let i = *self
                .index
                .get(p)
                .unwrap_or_else(|| panic!("{} left the basis", self.quiver().path_name(p)));
            out.add_scaled(&cols[i], c);
        }
        out
    }

    /// Apply a word right to left: `["x", "g"]` is `x(g(·))`.
    pub fn apply_word(&self, word: &[String], e: &AlgebraElement) -> AlgebraElement {
        let mut cur = e.clone();
        for op in word.iter().rev() {
            cur = self.apply(Some(op), &cur);
        }
        cur
    }
}

/// Columns of all operators on paths of length <= depth.
pub fn extend_system(system: &OperatorSystem, depth: usize) -> OperatorTable {
    let q = &system.quiver;
    let basis = enumerate_paths(q, depth);
    let index: HashMap<Path, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut columns: BTreeMap<String, Vec<AlgebraElement>> = BTreeMap::new();
    for (name, act) in &system.grouplikes {
        columns.insert(
            name.clone(),
            basis.par_iter().map(|p| grouplike_image(q, act, p)).collect(),
        );
    }
    for (name, op) in &system.skews {
        let mut col: Vec<AlgebraElement> = vec![AlgebraElement::zero(q); basis.len()];
        let mut start = 0;
        while start < basis.len() {
            let len = basis[start].len();
            let end = basis[start..]
                .iter()
                .position(|p| p.len() != len)
                .map_or(basis.len(), |k| start + k);
            let level: Vec<AlgebraElement> = basis[start..end]
                .par_iter()
                .map(|p| {
                    if p.len() <= 1 {
                        let gen = match p.as_arrow() {
                            Some(a) => Generator::Arrow(a),
                            None => Generator::Vertex(p.source()),
                        };
                        return op.table.get(gen).clone();
                    }
                    let (head, rest) = p.split_at(q, 1);
                    let a = head.as_arrow().expect("arrow");
                    let l_head = match &op.left {
                        Some(l) => grouplike_image(q, &system.grouplikes[l], &head),
                        None => AlgebraElement::from_path(q, head.clone(), CycScalar::one(&system.ctx)),
                    };
                    let r_rest = match &op.right {
                        Some(r) => grouplike_image(q, &system.grouplikes[r], &rest),
                        None => AlgebraElement::from_path(q, rest.clone(), CycScalar::one(&system.ctx)),
                    };
                    let h_rest = &col[index[&rest]];
                    let h_head = op.table.get(Generator::Arrow(a));
                    l_head
                        .mul(h_rest)
                        .expect("same quiver")
                        .add(&h_head.mul(&r_rest).expect("same quiver"))
                })
                .collect();
            for (k, e) in level.into_iter().enumerate() {
                col[start + k] = e;
            }
            start = end;
        }
        columns.insert(name.clone(), col);
    }
    OperatorTable {
        depth,
        basis,
        index,
        columns,
        system: system.clone(),
    }
}

/// Operator tables of a T(n)-action.
pub fn extend_operators(spec: &ActionSpec, depth: usize) -> OperatorTable {
    extend_system(&OperatorSystem::taft(spec), depth)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub path: String,
    pub residual: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Entry {
    pub fn pass(name: &str) -> Self {
        Entry {
            name: name.to_string(),
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(name: &str, witness: Option<Witness>) -> Self {
        Entry {
            name: name.to_string(),
            status: Status::Fail,
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub relations: Vec<Entry>,
    pub splits: Vec<Entry>,
    /// Informational; counted only when inner faithfulness is required.
    pub faithfulness: Vec<Entry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<Entry>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.relations
            .iter()
            .chain(&self.splits)
            .chain(&self.constraints)
            .all(Entry::passed)
    }

    pub fn all_pass_faithful(&self) -> bool {
        self.all_pass() && self.faithfulness.iter().all(Entry::passed)
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.relations
            .iter()
            .chain(&self.splits)
            .chain(&self.faithfulness)
            .chain(&self.constraints)
            .find(|e| e.name == name)
    }

    pub fn failures(&self) -> Vec<&Entry> {
        self.relations
            .iter()
            .chain(&self.splits)
            .chain(&self.constraints)
            .filter(|e| !e.passed())
            .collect()
    }
}

/// `Σ coeff · word` with the empty word standing for the identity.
#[derive(Debug, Clone)]
pub struct Relation {
    pub name: String,
    pub terms: Vec<(CycScalar, Vec<String>)>,
}

impl Relation {
    pub fn new(name: &str) -> Self {
        Relation {
            name: name.to_string(),
            terms: Vec::new(),
        }
    }

    pub fn term(mut self, c: CycScalar, word: &[&str]) -> Self {
        self.terms.push((c, word.iter().map(|s| s.to_string()).collect()));
        self
    }

    /// `op^k` as a word.
    pub fn power(op: &str, k: usize) -> Vec<&str> {
        vec![op; k]
    }
}

/// Check a relation on every basis path; the witness is the first failure.
pub fn check_relation(table: &OperatorTable, rel: &Relation) -> Entry {
    let q = table.quiver();
    let one = CycScalar::one(&table.system.ctx);
    let first = table
        .basis
        .par_iter()
        .map(|p| {
            let e = AlgebraElement::from_path(q, p.clone(), one.clone());
            let mut acc = AlgebraElement::zero(q);
            for (c, w) in &rel.terms {
                acc.add_scaled(&table.apply_word(w, &e), c);
            }
            acc
        })
        .enumerate()
        .find_first(|(_, r)| !r.is_zero());
    match first {
        None => Entry::pass(&rel.name),
        Some((i, r)) => Entry::fail(
            &rel.name,
            Some(Witness {
                path: q.path_name(&table.basis[i]),
                residual: r.display(q),
            }),
        ),
    }
}

/// `h·1 = 0` for a skew-primitive `h`.
pub fn check_kills_unit(table: &OperatorTable, op: &str) -> Entry {
    let q = table.quiver();
    let name = format!("{op}.1 = 0");
    let unit = q.unit(&table.system.ctx);
    let r = table.apply(Some(op), &unit);
    if r.is_zero() {
        Entry::pass(&name)
    } else {
        Entry::fail(
            &name,
            Some(Witness {
                path: "1".into(),
                residual: r.display(q),
            }),
        )
    }
}

fn product_rule(
    table: &OperatorTable,
    op: &SkewOp,
    name: &str,
    u: &AlgebraElement,
    v: &AlgebraElement,
) -> AlgebraElement {
    let lu = table.apply(op.left.as_deref(), u);
    let rv = table.apply(op.right.as_deref(), v);
    let hu = table.apply(Some(name), u);
    let hv = table.apply(Some(name), v);
    lu.mul(&hv)
        .expect("same quiver")
        .add(&hu.mul(&rv).expect("same quiver"))
}

/// Every split `p = uv` obeys the product rule; idempotent relations are respected.
pub fn check_split_consistency(table: &OperatorTable) -> Vec<Entry> {
    let q = table.quiver();
    let ctx = &table.system.ctx;
    let one = CycScalar::one(ctx);
    let el = |p: &Path| AlgebraElement::from_path(q, p.clone(), one.clone());
    let mut out = Vec::new();
    for (name, op) in &table.system.skews {
        let splits = table
            .basis
            .par_iter()
            .filter(|p| p.len() >= 2)
            .find_map_first(|p| {
                let hp = table.column(name, p);
                (1..p.len()).find_map(|k| {
                    let (u, v) = p.split_at(q, k);
                    let r = product_rule(table, op, name, &el(&u), &el(&v)).sub(hp);
                    (!r.is_zero()).then(|| Witness {
                        path: format!("{} | {}", q.path_name(&u), q.path_name(&v)),
                        residual: r.display(q),
                    })
                })
            });
        let label = format!("{name}: product rule on splits");
        out.push(match splits {
            None => Entry::pass(&label),
            Some(w) => Entry::fail(&label, Some(w)),
        });

        // e_{s(a)} a = a = a e_{t(a)}
        let mut wit = None;
        for a in 0..q.num_arrows() {
            let ar = q.arrow(a);
            let pa = el(&q.arrow_path(a));
            let ha = table.column(name, &q.arrow_path(a));
            let left = product_rule(table, op, name, &el(&Path::trivial(ar.src)), &pa).sub(ha);
            let right = product_rule(table, op, name, &pa, &el(&Path::trivial(ar.tgt))).sub(ha);
            for (r, tag) in [(left, "e*a"), (right, "a*e")] {
                if !r.is_zero() && wit.is_none() {
                    wit = Some(Witness {
                        path: format!("{tag} for {}", ar.id),
                        residual: r.display(q),
                    });
                }
            }
        }
        for i in 0..q.num_vertices() {
            for j in 0..q.num_vertices() {
                if wit.is_some() {
                    break;
                }
                let ei = el(&Path::trivial(i));
                let ej = el(&Path::trivial(j));
                let lhs = product_rule(table, op, name, &ei, &ej);
                let rhs = if i == j {
                    table.column(name, &Path::trivial(i)).clone()
                } else {
                    AlgebraElement::zero(q)
                };
                let r = lhs.sub(&rhs);
                if !r.is_zero() {
                    wit = Some(Witness {
                        path: format!("{} * {}", q.path_name(&Path::trivial(i)), q.path_name(&Path::trivial(j))),
                        residual: r.display(q),
                    });
                }
            }
        }
        let label = format!("{name}: idempotent relations");
        out.push(match wit {
            None => Entry::pass(&label),
            Some(w) => Entry::fail(&label, Some(w)),
        });
    }
    // images never lengthen paths
    let mut wit = None;
    for name in table.columns.keys() {
        for (i, p) in table.basis.iter().enumerate() {
            let img = &table.columns[name][i];
            if img.degree() > p.len() && wit.is_none() {
                wit = Some(Witness {
                    path: format!("{name} on {}", q.path_name(p)),
                    residual: img.display(q),
                });
            }
        }
    }
    out.push(match wit {
        None => Entry::pass("filtration"),
        Some(w) => Entry::fail("filtration", Some(w)),
    });
    out
}

/// `g^n = 1`, `x^n = 0`, `xg = ζ gx`, `x·1 = 0`.
pub fn check_relations(table: &OperatorTable, ctx: &Ctx) -> Vec<Entry> {
    let n = ctx.n() as usize;
    let one = CycScalar::one(ctx);
    let z = zeta(ctx);
    vec![
        check_relation(
            table,
            &Relation::new("g^n = 1")
                .term(one.clone(), &Relation::power("g", n))
                .term(-one.clone(), &[]),
        ),
        check_relation(
            table,
            &Relation::new("x^n = 0").term(one.clone(), &Relation::power("x", n)),
        ),
        check_relation(
            table,
            &Relation::new("xg = zeta gx")
                .term(one.clone(), &["x", "g"])
                .term(-z, &["g", "x"]),
        ),
        check_kills_unit(table, "x"),
    ]
}

/// Default depth `2n`, capped at 8.
pub fn default_depth(ctx: &Ctx) -> usize {
    (2 * ctx.n() as usize).min(8)
}

/// Extension, split consistency, relations and faithfulness of a T(n)-action.
pub fn verify_all(spec: &ActionSpec, depth: usize) -> VerificationReport {
    let table = extend_operators(spec, depth);
    let ar = validate_action(&spec.quiver, &spec.action);
    let faithful = |name: &str, ok: bool| {
        if ok {
            Entry::pass(name)
        } else {
            Entry::fail(name, None)
        }
    };
    VerificationReport {
        relations: check_relations(&table, spec.ctx()),
        splits: check_split_consistency(&table),
        faithfulness: vec![
            faithful("inner-faithful", !spec.x.is_zero()),
            faithful("quiver-action-faithful", ar.faithful),
        ],
        constraints: Vec::new(),
    }
}

/// One entry per constraint name; offenders of equal names are merged.
pub fn constraint_entries(checks: impl IntoIterator<Item = ConstraintCheck>) -> Vec<Entry> {
    let mut merged: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in checks {
        merged.entry(c.name).or_default().extend(c.offending);
    }
    merged
        .into_iter()
        .map(|(name, off)| {
            if off.is_empty() {
                Entry::pass(&name)
            } else {
                Entry::fail(
                    &name,
                    Some(Witness {
                        path: off.join(", "),
                        residual: "scalar condition".into(),
                    }),
                )
            }
        })
        .collect()
}

/// Scalar conditions of a T(n)-action, over every component.
pub fn taft_constraint_entries(q: &Quiver, act: &ZnAction, params: &TaftParams) -> Vec<Entry> {
    let orb = orbits(q, act);
    constraint_entries(
        decompose_components(q, &orb)
            .iter()
            .flat_map(|c| check_constraints(q, act, &orb, c, params).checks),
    )
}
