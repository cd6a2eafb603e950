//! Bundled example inputs: the six Z_2-minimal quivers with Sweedler actions,
//! the worked gluing examples, and a few extension setups.
//!
//! Taft parameters are stored as values of the free symbols reported by
//! [`crate::taft::parametrize`] and expanded on demand, so the emitted files
//! are a pure function of this table.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::cyclo::{make_context, parse_scalar, CycScalar};
use crate::extensions::{double_partner_gamma, uq_partner_gamma};
use crate::quiver::{parse_quiver, Quiver};
use crate::symmetry::{action_from_json, orbits, parse_action_json, ZnAction};
use crate::taft::{parametrize, params_to_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    Taft,
    Uq,
    Double,
}

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub kind: FixtureKind,
    pub n: u32,
    pub vertices: &'static [&'static str],
    /// `(id, src, tgt)`
    pub arrows: &'static [(&'static str, &'static str, &'static str)],
    /// Vertex permutation; omitted vertices are fixed.
    pub perm: &'static [(&'static str, &'static str)],
    pub scales: &'static [(&'static str, &'static str)],
    /// Taft: free-symbol values. Uq/Double: `gamma[v]` of E or x on each orbit.
    pub values: &'static [(&'static str, &'static str)],
}

const SWAP: &[(&str, &str)] = &[("1", "2"), ("2", "1")];
const SWAP_PM: &[(&str, &str)] = &[("1+", "2+"), ("2+", "1+"), ("1-", "2-"), ("2-", "1-")];
const K3: &[(&str, &str, &str)] = &[
    ("a12", "1", "2"),
    ("a13", "1", "3"),
    ("a21", "2", "1"),
    ("a23", "2", "3"),
    ("a31", "3", "1"),
    ("a32", "3", "2"),
];
const ROT3: &[(&str, &str)] = &[("1", "2"), ("2", "3"), ("3", "1")];

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "sweedler-I",
        summary: "K_2 with the swap, mu = 3",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["1", "2"],
        arrows: &[("a12", "1", "2"), ("a21", "2", "1")],
        perm: SWAP,
        scales: &[("a12", "3"), ("a21", "1/3")],
        values: &[("gamma[1]", "1"), ("lambda[a12]", "2")],
    },
    Fixture {
        name: "sweedler-II",
        summary: "one arrow, both endpoints fixed",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["1+", "1-"],
        arrows: &[("b11", "1+", "1-")],
        perm: &[],
        scales: &[("b11", "-1")],
        values: &[],
    },
    Fixture {
        name: "sweedler-III",
        summary: "fixed source, swapped targets",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["1+", "1-", "2-"],
        arrows: &[("b11", "1+", "1-"), ("b22", "1+", "2-")],
        perm: &[("1-", "2-"), ("2-", "1-")],
        scales: &[("b11", "2"), ("b22", "1/2")],
        values: &[("gamma[1-]", "1"), ("lambda[b11]", "2")],
    },
    Fixture {
        name: "sweedler-IV",
        summary: "swapped sources, fixed target",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["1+", "2+", "1-"],
        arrows: &[("b11", "1+", "1-"), ("b22", "2+", "1-")],
        perm: &[("1+", "2+"), ("2+", "1+")],
        scales: &[("b11", "2"), ("b22", "1/2")],
        values: &[("gamma[1+]", "1"), ("lambda[b11]", "1")],
    },
    Fixture {
        name: "sweedler-V",
        summary: "two parallel arrows, both orbits swapped",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["1+", "2+", "1-", "2-"],
        arrows: &[("b11", "1+", "1-"), ("b22", "2+", "2-")],
        perm: SWAP_PM,
        scales: &[("b11", "2"), ("b22", "1/2")],
        values: &[("gamma[1+]", "1"), ("gamma[1-]", "-1")],
    },
    Fixture {
        name: "sweedler-VI",
        summary: "K_{2,2}, both orbits swapped",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["1+", "2+", "1-", "2-"],
        arrows: &[("b11", "1+", "1-"), ("b22", "2+", "2-"), ("b12", "1+", "2-"), ("b21", "2+", "1-")],
        perm: SWAP_PM,
        scales: &[("b11", "2"), ("b22", "1/2"), ("b12", "3"), ("b21", "1/3")],
        values: &[("gamma[1+]", "3"), ("gamma[1-]", "1"), ("lambda[b11]", "2"), ("lambda[b12]", "4")],
    },
    Fixture {
        name: "ex-4.4",
        summary: "K_{2,4} under Z_4: swapped pair over a 4-cycle",
        kind: FixtureKind::Taft,
        n: 4,
        vertices: &["u1", "u2", "w1", "w2", "w3", "w4"],
        arrows: &[
            ("c11", "u1", "w1"),
            ("c12", "u1", "w2"),
            ("c13", "u1", "w3"),
            ("c14", "u1", "w4"),
            ("c21", "u2", "w1"),
            ("c22", "u2", "w2"),
            ("c23", "u2", "w3"),
            ("c24", "u2", "w4"),
        ],
        perm: &[("u1", "u2"), ("u2", "u1"), ("w1", "w2"), ("w2", "w3"), ("w3", "w4"), ("w4", "w1")],
        scales: &[],
        values: &[],
    },
    Fixture {
        name: "z3-cycle",
        summary: "oriented 3-cycle 1->2->3->1, rotated 1->3->2",
        kind: FixtureKind::Taft,
        n: 3,
        vertices: &["1", "2", "3"],
        arrows: &[("a12", "1", "2"), ("a23", "2", "3"), ("a31", "3", "1")],
        perm: &[("1", "3"), ("3", "2"), ("2", "1")],
        scales: &[],
        values: &[("gamma[1]", "2")],
    },
    Fixture {
        name: "ex-7.7",
        summary: "six vertices, four Z_2-components",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["v1", "v2", "v3", "v4", "v5", "v6"],
        arrows: &[
            ("f1", "v1", "v2"),
            ("f2", "v2", "v1"),
            ("f3", "v1", "v3"),
            ("f4", "v2", "v4"),
            ("f5", "v5", "v3"),
            ("f6", "v6", "v4"),
            ("f7", "v1", "v5"),
            ("f8", "v2", "v6"),
            ("f9", "v1", "v6"),
            ("f10", "v2", "v5"),
        ],
        perm: &[("v1", "v2"), ("v2", "v1"), ("v3", "v4"), ("v4", "v3"), ("v5", "v6"), ("v6", "v5")],
        scales: &[],
        values: &[
            ("gamma[v1]", "1"),
            ("gamma[v3]", "-1"),
            ("gamma[v5]", "1"),
            ("lambda[f1]", "5"),
            ("lambda[f7]", "2"),
        ],
    },
    Fixture {
        name: "ex-7.8",
        summary: "five vertices, three Z_3-components",
        kind: FixtureKind::Taft,
        n: 3,
        vertices: &["v0", "v1", "v2", "v3", "v4"],
        arrows: &[
            ("f1", "v0", "v1"),
            ("f2", "v0", "v2"),
            ("f3", "v0", "v3"),
            ("f4", "v1", "v4"),
            ("f5", "v2", "v4"),
            ("f6", "v3", "v4"),
            ("f7", "v1", "v2"),
            ("f8", "v2", "v3"),
            ("f9", "v3", "v1"),
            ("f10", "v1", "v3"),
            ("f11", "v3", "v2"),
            ("f12", "v2", "v1"),
        ],
        perm: &[("v1", "v2"), ("v2", "v3"), ("v3", "v1")],
        scales: &[],
        values: &[
            ("gamma[v1]", "1"),
            ("lambda[f1]", "-1"),
            ("lambda[f4]", "1"),
            ("lambda[f7]", "2"),
            ("lambda[f10]", "3"),
        ],
    },
    Fixture {
        name: "z4-K2",
        summary: "T(4) on K_2: Z_4 acts through the swap with scale zeta",
        kind: FixtureKind::Taft,
        n: 4,
        vertices: &["1", "2"],
        arrows: &[("a12", "1", "2"), ("a21", "2", "1")],
        perm: SWAP,
        scales: &[("a12", "z^2"), ("a21", "z^2")],
        values: &[("lambda[a12]", "1")],
    },
    Fixture {
        name: "ex-3.7",
        summary: "Z_2 fixing every vertex of a path 1->2->3",
        kind: FixtureKind::Taft,
        n: 2,
        vertices: &["1", "2", "3"],
        arrows: &[("a", "1", "2"), ("b", "2", "3")],
        perm: &[],
        scales: &[("a", "-1"), ("b", "-1")],
        values: &[],
    },
    Fixture {
        name: "uq-K3",
        summary: "u_q(sl_2) at n = 3 on K_3 with the rotation",
        kind: FixtureKind::Uq,
        n: 3,
        vertices: &["1", "2", "3"],
        arrows: K3,
        perm: ROT3,
        scales: &[],
        values: &[("gamma[1]", "1")],
    },
    Fixture {
        name: "double-K3",
        summary: "D(T(3)) on K_3 with the rotation, G = g",
        kind: FixtureKind::Double,
        n: 3,
        vertices: &["1", "2", "3"],
        arrows: K3,
        perm: ROT3,
        scales: &[],
        values: &[("gamma[1]", "2")],
    },
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown fixture {0}")]
pub struct UnknownFixture(pub String);

pub fn names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

pub fn find(name: &str) -> Result<&'static Fixture, UnknownFixture> {
    FIXTURES.iter().find(|f| f.name == name).ok_or_else(|| UnknownFixture(name.to_string()))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

impl Fixture {
    pub fn quiver_value(&self) -> Value {
        json!({
            "vertices": self.vertices,
            "arrows": self.arrows.iter().map(|(id, s, t)| json!({"id": id, "src": s, "tgt": t})).collect::<Vec<_>>(),
        })
    }

    pub fn action_value(&self) -> Value {
        let perm: BTreeMap<&str, &str> = self.perm.iter().copied().collect();
        let arrows: BTreeMap<&str, Value> = self.scales.iter().map(|(a, s)| (*a, json!({"scale": s}))).collect();
        json!({"n": self.n, "vertex_perm": perm, "arrows": arrows})
    }

    pub fn quiver(&self) -> Quiver {
        parse_quiver(&self.quiver_value().to_string()).expect("bundled quiver")
    }

    pub fn action(&self) -> ZnAction {
        let q = self.quiver();
        let ctx = make_context(self.n as i64).expect("context");
        let spec = parse_action_json(&self.action_value().to_string()).expect("bundled action");
        action_from_json(&q, &ctx, &spec).expect("bundled action")
    }

    fn value_map(&self) -> BTreeMap<String, CycScalar> {
        let ctx = make_context(self.n as i64).expect("context");
        self.values
            .iter()
            .map(|(k, v)| (k.to_string(), parse_scalar(&ctx, v).expect("bundled scalar")))
            .collect()
    }

    pub fn params_value(&self) -> Value {
        let q = self.quiver();
        let act = self.action();
        let orb = orbits(&q, &act);
        let vals = self.value_map();
        match self.kind {
            FixtureKind::Taft => {
                let p = parametrize(&q, &act).instantiate(act.ctx(), &vals);
                serde_json::to_value(params_to_json(&q, &orb, &p)).expect("json")
            }
            FixtureKind::Uq | FixtureKind::Double => {
                let mut lo = BTreeMap::new();
                let mut hi = BTreeMap::new();
                for (k, v) in &vals {
                    let vertex = k.trim_start_matches("gamma[").trim_end_matches(']');
                    let partner = match self.kind {
                        FixtureKind::Uq => uq_partner_gamma(v),
                        _ => double_partner_gamma(v),
                    }
                    .expect("invertible gamma");
                    lo.insert(format!("orbit-of:{vertex}"), v.to_string());
                    hi.insert(format!("orbit-of:{vertex}"), partner.to_string());
                }
                let (a, b) = if self.kind == FixtureKind::Uq { ("E", "F") } else { ("x", "X") };
                json!({a: {"gamma": lo}, b: {"gamma": hi}})
            }
        }
    }

    /// File name to contents, as written by the `fixtures` command.
    pub fn files(&self) -> BTreeMap<&'static str, String> {
        BTreeMap::from([
            ("quiver.json", pretty(&self.quiver_value())),
            ("action.json", pretty(&self.action_value())),
            ("params.json", pretty(&self.params_value())),
        ])
    }
}
