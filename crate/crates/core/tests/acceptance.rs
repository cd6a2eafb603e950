//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! A criterion fails when a check fails or its time budget is exceeded.
//! `KNOWN` lists criteria whose literal statement is unattainable; such a
//! criterion still prints FAIL, but only an unexpected result sets a nonzero
//! exit status.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hopfq_core::cyclo::{make_context, root_power, zeta, Ctx, CycScalar};
use hopfq_core::extensions::*;
use hopfq_core::fixtures::{self, FixtureKind};
use hopfq_core::oracle::bridge::Frame;
use hopfq_core::oracle::{psi_by_recursion, psi_table, vanishing_grid, xk_cross_check};
use hopfq_core::quiver::{AlgebraElement, Quiver};
use hopfq_core::symmetry::{
    decompose_components, orbits, reassemble, validate_action, ComponentKind, ZnAction,
};
use hopfq_core::taft::*;
use hopfq_core::verifier::{
    check_relation, check_split_consistency, configure_threads_from_env, extend_operators, verify_all, Relation,
    VerificationReport,
};

/// Criteria expected to fail, with the reason printed next to the result.
const KNOWN: &[(u32, &str)] = &[
    (4, "vanishing grid fails exactly where n | a"),
    (5, "literal scalars do not satisfy every power identity"),
];

#[derive(Default)]
struct Outcome {
    notes: Vec<String>,
    /// Failures of checks that the implementation must meet.
    failures: Vec<String>,
    /// Failures of the literal statement only.
    literal: Vec<String>,
}

impl Outcome {
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

type Criterion = (u32, &'static str, u64, fn(&mut Outcome));

fn main() -> ExitCode {
    configure_threads_from_env();
    let criteria: [Criterion; 9] = [
        (1, "T(2) table", 1, c1_sweedler_table),
        (2, "T(2) constraint soundness", 10, c2_soundness),
        (3, "vertex actions", 5, c3_vertices),
        (4, "closed-form oracle", 30, c4_oracle),
        (5, "glued examples", 10, c5_examples),
        (6, "inner faithfulness", 1, c6_faithful),
        (7, "u_q(sl2) extension", 10, c7_uq),
        (8, "D(T(n)) extension", 10, c8_double),
        (9, "structural properties", 60, c9_structure),
    ];
    let mut unexpected = 0;
    for (id, name, budget, run) in criteria {
        let mut out = Outcome::default();
        let start = Instant::now();
        if let Err(e) = catch_unwind(AssertUnwindSafe(|| run(&mut out))) {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            out.failures.push(format!("panic: {msg}"));
        }
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_secs(budget);
        let pass = out.failures.is_empty() && out.literal.is_empty() && !slow;
        let known = KNOWN.iter().find(|(k, _)| *k == id).map(|(_, r)| *r);
        let mut detail = out.notes.clone();
        detail.extend(out.failures.iter().map(|f| format!("failed: {f}")));
        detail.extend(out.literal.iter().map(|f| format!("literal: {f}")));
        if slow {
            detail.push(format!("over budget of {budget} s"));
        }
        println!(
            "criterion {id}: {} {name} [{:.2} s / {budget} s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for d in &detail {
            println!("    {d}");
        }
        match (pass, known) {
            (false, Some(reason)) if out.failures.is_empty() && !slow => println!("    known failure: {reason}"),
            (true, Some(_)) => {
                println!("    known failure now passes; update the known list");
                unexpected += 1;
            }
            (false, _) => unexpected += 1,
            _ => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------- helpers

fn ctx(n: u32) -> Ctx {
    make_context(n as i64).unwrap()
}

fn int(ctx: &Ctx, v: i64) -> CycScalar {
    CycScalar::from_int(ctx, v)
}

fn rand_scalar(ctx: &Ctx, rng: &mut ChaCha8Rng, nonzero: bool) -> CycScalar {
    loop {
        let deg = ctx.degree();
        let mut s = CycScalar::zero(ctx);
        let z = root_power(ctx, 1);
        let mut p = CycScalar::one(ctx);
        for _ in 0..deg {
            s = &s + &(&int(ctx, rng.gen_range(-3..=3)) * &p);
            p = &p * &z;
        }
        if !nonzero || !s.is_zero() {
            return s;
        }
    }
}

fn fixture(name: &str) -> (Quiver, ZnAction) {
    let f = fixtures::find(name).unwrap();
    (f.quiver(), f.action())
}

fn fixture_params(name: &str) -> TaftParams {
    let (q, act) = fixture(name);
    let orb = orbits(&q, &act);
    let json = fixtures::find(name).unwrap().params_value().to_string();
    parse_params(&q, &orb, act.ctx(), &json).unwrap()
}

fn rotation(n: usize) -> Vec<usize> {
    (0..n).map(|i| (i + 1) % n).collect()
}

/// K_n with the rotation `i -> i + 1`.
fn complete(n: usize) -> (Quiver, ZnAction) {
    let c = ctx(n as u32);
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                arrows.push((format!("a{}_{}", i + 1, j + 1), i, j));
            }
        }
    }
    let q = Quiver::from_parts((1..=n).map(|i| i.to_string()).collect(), arrows);
    let act = ZnAction::from_vertex_perm(&q, &c, rotation(n)).unwrap();
    (q, act)
}

/// K_{n,n} from `s_i` to `t_j`, both orbits rotated; arrow `n*i + j`.
fn bipartite(n: usize) -> (Quiver, ZnAction) {
    let c = ctx(n as u32);
    let mut vs: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
    vs.extend((1..=n).map(|i| format!("t{i}")));
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            arrows.push((format!("b{}_{}", i + 1, j + 1), i, n + j));
        }
    }
    let q = Quiver::from_parts(vs, arrows);
    let perm = (0..2 * n).map(|v| if v < n { (v + 1) % n } else { n + (v - n + 1) % n }).collect();
    let act = ZnAction::from_vertex_perm(&q, &c, perm).unwrap();
    (q, act)
}

/// `m` vertices permuted cyclically under Z_n.
fn vertex_cycle(n: u32, m: usize) -> (Quiver, ZnAction) {
    let q = Quiver::from_parts((1..=m).map(|i| format!("v{i}")).collect(), vec![]);
    let act = ZnAction::from_vertex_perm(&q, &ctx(n), rotation(m)).unwrap();
    (q, act)
}

/// `λ_{i,j} = c ζ^{e i}` on arrows of `bipartite(n)` with `j - i ≡ d`.
fn band(ctx: &Ctx, n: usize, d: usize, c: i64, e: i64) -> Vec<CycScalar> {
    (0..n * n)
        .map(|a| {
            let (i, j) = (a / n, a % n);
            if (j + n - i) % n == d {
                &int(ctx, c) * &zeta(ctx).pow(e * i as i64)
            } else {
                CycScalar::zero(ctx)
            }
        })
        .collect()
}

/// Scales `μ(a) = c(g·a) / c(a)`; every orbit product is 1.
fn random_gauge(act: &ZnAction, rng: &mut ChaCha8Rng) -> ZnAction {
    let c: Vec<CycScalar> = (0..act.scales().len())
        .map(|_| int(act.ctx(), rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 }))
        .collect();
    let mu = (0..c.len()).map(|a| &c[act.arrow_image(a)] / &c[a]).collect();
    act.with_scales(mu)
}

fn witness_of(r: &VerificationReport) -> Option<String> {
    r.failures()
        .into_iter()
        .find_map(|e| e.witness.as_ref().map(|w| format!("{}: {}", e.name, w.path)))
}

// ---------------------------------------------------------------- 1

/// Polynomial in the free symbols: sorted monomial -> coefficient.
type Poly = BTreeMap<Vec<String>, CycScalar>;

fn poly(terms: &[(&[&str], CycScalar)]) -> Poly {
    let mut p = Poly::new();
    for (m, c) in terms {
        let mut key: Vec<String> = m.iter().map(|s| s.to_string()).collect();
        key.sort();
        let v = p.remove(&key).map(|x| &x + c).unwrap_or_else(|| c.clone());
        if !v.is_zero() {
            p.insert(key, v);
        }
    }
    p
}

fn constraint_poly(c: &PowerConstraint, ctx: &Ctx) -> Poly {
    let pw = |s: &Option<String>| s.as_ref().map(|s| vec![s.clone(); c.n as usize]);
    let mut terms: Vec<(Vec<String>, CycScalar)> = Vec::new();
    if let Some(m) = pw(&c.plus) {
        terms.push((m, CycScalar::one(ctx)));
    }
    if let Some(m) = pw(&c.minus) {
        terms.push((m, -CycScalar::one(ctx)));
    }
    terms.push((c.monomial.clone(), -c.coeff.clone()));
    let refs: Vec<(Vec<&str>, CycScalar)> =
        terms.iter().map(|(m, c)| (m.iter().map(String::as_str).collect(), c.clone())).collect();
    let slices: Vec<(&[&str], CycScalar)> = refs.iter().map(|(m, c)| (m.as_slice(), c.clone())).collect();
    poly(&slices)
}

/// Equal up to a nonzero scalar.
fn proportional(a: &Poly, b: &Poly) -> bool {
    if a.len() != b.len() || a.keys().ne(b.keys()) {
        return false;
    }
    let Some((k, va)) = a.iter().next() else { return true };
    let ratio = va / &b[k];
    a.iter().all(|(k, v)| *v == &ratio * &b[k])
}

/// Expected data of one table case, written from the published table with
/// the fixture's scales substituted.
struct Case {
    fixture: &'static str,
    free: Vec<&'static str>,
    /// `(target, coeff, symbol)`
    derived: Vec<(&'static str, CycScalar, &'static str)>,
    forced: Vec<&'static str>,
    residual: Vec<Poly>,
    /// Exact renderings checked as strings.
    display: Vec<&'static str>,
    generators: Vec<&'static str>,
    /// `(generator, path, symbol) -> coefficient`
    table: BTreeMap<(String, String, String), CycScalar>,
}

impl Case {
    fn new(fixture: &'static str, generators: &[&'static str]) -> Self {
        Case {
            fixture,
            free: vec![],
            derived: vec![],
            forced: vec![],
            residual: vec![],
            display: vec![],
            generators: generators.to_vec(),
            table: BTreeMap::new(),
        }
    }

    fn t(&mut self, gen: &str, path: &str, sym: &str, c: CycScalar) {
        self.table.insert((gen.into(), path.into(), sym.into()), c);
    }

    /// `x·e_1 = -γ(e_1 + e_2)`, `x·e_2 = γ(e_1 + e_2)`.
    fn vertex_pair(&mut self, ctx: &Ctx, v1: &str, v2: &str, sym: &str) {
        let (e1, e2) = (format!("e[{v1}]"), format!("e[{v2}]"));
        for (g, s) in [(&e1, -1), (&e2, 1)] {
            self.t(g, &e1, sym, int(ctx, s));
            self.t(g, &e2, sym, int(ctx, s));
        }
    }
}

fn sweedler_cases() -> Vec<Case> {
    let c = ctx(2);
    let one = || CycScalar::one(&c);
    let scale = |name: &str, arrow: &str| {
        let (q, act) = fixture(name);
        act.scale(q.arrow_index(arrow).unwrap()).clone()
    };
    let mut out = Vec::new();

    // (I): x·a12 = γ a12 - γμ a21 + λ e1, x·a21 = γμ⁻¹ a12 - γ a21 - λμ⁻¹ e2
    let mu = scale("sweedler-I", "a12");
    let mut k = Case::new("sweedler-I", &["e[1]", "e[2]", "a12", "a21"]);
    let (g, l) = ("gamma[1]", "lambda[a12]");
    k.free = vec![g, l];
    k.derived = vec![("gamma^(1)", one(), g), ("lambda(a21)", -mu.inv(), l)];
    k.vertex_pair(&c, "1", "2", g);
    k.t("a12", "a12", g, one());
    k.t("a12", "a21", g, -mu.clone());
    k.t("a12", "e[1]", l, one());
    k.t("a21", "a12", g, mu.inv());
    k.t("a21", "a21", g, -one());
    k.t("a21", "e[2]", l, -mu.inv());
    out.push(k);

    // (II): everything vanishes
    let mut k = Case::new("sweedler-II", &["e[1+]", "e[1-]", "b11"]);
    k.forced = vec!["gamma^(1)_+", "gamma^(1)_-", "lambda(b11)"];
    out.push(k);

    // (III): x·b11 = -γ₋ b11 + βμ b22, x·b22 = -βμ⁻¹ b11 + γ₋ b22, β² = γ₋².
    // The free λ[b11] is the coefficient βμ.
    let mu = scale("sweedler-III", "b11");
    let mut k = Case::new("sweedler-III", &["e[1+]", "e[1-]", "e[2-]", "b11", "b22"]);
    let (g, l) = ("gamma[1-]", "lambda[b11]");
    let beta = mu.inv(); // β per unit λ[b11]
    k.free = vec![g, l];
    k.derived = vec![("gamma^(1)_-", one(), g), ("lambda(b22)", -(&beta * &mu.inv()), l)];
    k.forced = vec!["gamma^(1)_+"];
    k.residual = vec![poly(&[(&[l, l], &beta * &beta), (&[g, g], -one())])];
    k.vertex_pair(&c, "1-", "2-", g);
    k.t("b11", "b11", g, -one());
    k.t("b11", "b22", l, &beta * &mu);
    k.t("b22", "b11", l, -(&beta * &mu.inv()));
    k.t("b22", "b22", g, one());
    out.push(k);

    // (IV): x·b11 = α b11 - γ₊μ b22, x·b22 = γ₊μ⁻¹ b11 - α b22, α² = γ₊²; α = λ[b11]
    let mu = scale("sweedler-IV", "b11");
    let mut k = Case::new("sweedler-IV", &["e[1+]", "e[2+]", "e[1-]", "b11", "b22"]);
    let (g, l) = ("gamma[1+]", "lambda[b11]");
    k.free = vec![g, l];
    k.derived = vec![("gamma^(1)_+", one(), g), ("lambda(b22)", -one(), l)];
    k.forced = vec!["gamma^(1)_-"];
    k.residual = vec![poly(&[(&[l, l], one()), (&[g, g], -one())])];
    k.vertex_pair(&c, "1+", "2+", g);
    k.t("b11", "b11", l, one());
    k.t("b11", "b22", g, -mu.clone());
    k.t("b22", "b11", g, mu.inv());
    k.t("b22", "b22", l, -one());
    out.push(k);

    // (V): x·b11 = -γ₋ b11 - γ₊μ b22, x·b22 = γ₊μ⁻¹ b11 + γ₋ b22, γ₊² = γ₋²
    let mu = scale("sweedler-V", "b11");
    let mut k = Case::new("sweedler-V", &["e[1+]", "e[2+]", "e[1-]", "e[2-]", "b11", "b22"]);
    let (gp, gm) = ("gamma[1+]", "gamma[1-]");
    k.free = vec![gp, gm];
    k.derived = vec![("gamma^(1)_+", one(), gp), ("gamma^(1)_-", one(), gm)];
    k.forced = vec!["lambda(b11)", "lambda(b22)"];
    k.residual = vec![poly(&[(&[gp, gp], one()), (&[gm, gm], -one())])];
    k.display = vec!["gamma[1+]^2 = gamma[1-]^2"];
    k.vertex_pair(&c, "1+", "2+", gp);
    k.vertex_pair(&c, "1-", "2-", gm);
    k.t("b11", "b11", gm, -one());
    k.t("b11", "b22", gp, -mu.clone());
    k.t("b22", "b11", gp, mu.inv());
    k.t("b22", "b22", gm, one());
    out.push(k);

    // (VI): four arrows, μ on b11 and μ' on b12, γ₊² = γ₋² + λλ'
    let mu = scale("sweedler-VI", "b11");
    let mu2 = scale("sweedler-VI", "b12");
    let mut k = Case::new(
        "sweedler-VI",
        &["e[1+]", "e[2+]", "e[1-]", "e[2-]", "b11", "b22", "b12", "b21"],
    );
    let (gp, gm, l, l2) = ("gamma[1+]", "gamma[1-]", "lambda[b11]", "lambda[b12]");
    k.free = vec![gp, gm, l, l2];
    k.derived = vec![
        ("gamma^(1)_+", one(), gp),
        ("gamma^(1)_-", one(), gm),
        ("lambda(b22)", -(&mu.inv() * &mu2), l),
        ("lambda(b21)", -(&mu * &mu2.inv()), l2),
    ];
    k.residual = vec![poly(&[(&[gp, gp], one()), (&[gm, gm], -one()), (&[l, l2], -one())])];
    k.display = vec!["gamma[1+]^2 = gamma[1-]^2 + lambda[b11]*lambda[b12]"];
    k.vertex_pair(&c, "1+", "2+", gp);
    k.vertex_pair(&c, "1-", "2-", gm);
    k.t("b11", "b11", gm, -one());
    k.t("b11", "b22", gp, -mu.clone());
    k.t("b11", "b12", l, one());
    k.t("b22", "b11", gp, mu.inv());
    k.t("b22", "b22", gm, one());
    k.t("b22", "b21", l, -(&mu.inv() * &mu2));
    k.t("b12", "b12", gm, one());
    k.t("b12", "b21", gp, -mu2.clone());
    k.t("b12", "b11", l2, one());
    k.t("b21", "b12", gp, mu2.inv());
    k.t("b21", "b21", gm, -one());
    k.t("b21", "b22", l2, -(&mu * &mu2.inv()));
    out.push(k);
    out
}

fn c1_sweedler_table(out: &mut Outcome) {
    let c = ctx(2);
    let cases = sweedler_cases();
    for k in &cases {
        let (q, act) = fixture(k.fixture);
        let r = parametrize(&q, &act);
        let f = k.fixture;
        out.require(r.free_names() == k.free, || format!("{f}: free symbols {:?}", r.free_names()));
        let derived: BTreeSet<(String, CycScalar, String)> =
            r.derived.iter().map(|d| (d.target.clone(), d.coeff.clone(), d.symbol.clone())).collect();
        let want: BTreeSet<(String, CycScalar, String)> =
            k.derived.iter().map(|(t, c, s)| (t.to_string(), c.clone(), s.to_string())).collect();
        out.require(derived == want, || format!("{f}: derived {derived:?}"));
        let forced: BTreeSet<&str> = r.forced_zero.iter().map(|x| x.target.as_str()).collect();
        out.require(forced == k.forced.iter().copied().collect(), || format!("{f}: forced {forced:?}"));
        let got: Vec<Poly> = r.residual_constraints.iter().map(|x| constraint_poly(x, &c)).collect();
        let matched = got.len() == k.residual.len()
            && k.residual.iter().all(|p| got.iter().any(|g| proportional(p, g)));
        out.require(matched, || format!("{f}: residual constraints {:?}", r.residual_constraints));
        for d in &k.display {
            out.require(r.residual_constraints.iter().any(|x| x.display == *d), || format!("{f}: no residual {d}"));
        }
        let gens: Vec<&str> = r.x_table.iter().map(|row| row.generator.as_str()).collect();
        out.require(gens == k.generators, || format!("{f}: generators {gens:?}"));
        let mut table = BTreeMap::new();
        for row in &r.x_table {
            for term in &row.terms {
                for (sym, v) in &term.coeff {
                    if !v.is_zero() {
                        table.insert((row.generator.clone(), term.path.clone(), sym.clone()), v.clone());
                    }
                }
            }
        }
        out.require(table == k.table, || {
            let diff: Vec<_> = table
                .iter()
                .filter(|(key, v)| k.table.get(*key) != Some(*v))
                .chain(k.table.iter().filter(|(key, v)| table.get(*key) != Some(*v)))
                .map(|((g, p, s), v)| format!("{g}/{p}/{s}={v}"))
                .collect();
            format!("{f}: x-table differs at {diff:?}")
        });
    }
    out.note(format!("{} cases compared row by row", cases.len()));
}

// ---------------------------------------------------------------- 2

fn c2_soundness(out: &mut Outcome) {
    const DRAWS: u64 = 100;
    for name in ["sweedler-III", "sweedler-IV", "sweedler-V", "sweedler-VI"] {
        let (q, act) = fixture(name);
        let c = act.ctx().clone();
        let r = parametrize(&q, &act);
        let mut nonzero = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
        for seed in 0..DRAWS {
            let values = sample_params(&r, &c, seed, 50).unwrap();
            let ok = r.residual_constraints.iter().all(|x| x.evaluate(&values, &c));
            out.require(ok, || format!("{name}: sample {seed} misses a constraint"));
            if values.values().any(|v| !v.is_zero()) {
                nonzero += 1;
            }
            let params = r.instantiate(&c, &values);
            match build_action(&q, &act, &params) {
                Ok(spec) => {
                    let rep = verify_all(&spec, 4);
                    out.require(rep.all_pass(), || format!("{name}: sample {seed} fails {:?}", rep.failures()));
                }
                Err(e) => out.require(false, || format!("{name}: sample {seed} rejected: {e}")),
            }

            // break the constraint by redrawing one symbol it involves
            let mut bad = values.clone();
            let involved: Vec<String> = r
                .residual_constraints
                .iter()
                .flat_map(|x| x.plus.iter().chain(&x.minus).chain(&x.monomial).cloned())
                .collect();
            while r.residual_constraints.iter().all(|x| x.evaluate(&bad, &c)) {
                let s = &involved[rng.gen_range(0..involved.len())];
                bad.insert(s.clone(), int(&c, rng.gen_range(1..=5)));
            }
            let params = r.instantiate(&c, &bad);
            out.require(build_action(&q, &act, &params).is_err(), || format!("{name}: violating set {seed} accepted"));
            let rep = verify_all(&build_action_unchecked(&q, &act, &params), 4);
            out.require(!rep.all_pass() && witness_of(&rep).is_some(), || {
                format!("{name}: violating set {seed} has no witness")
            });
        }
        out.note(format!("{name}: {DRAWS} satisfying ({nonzero} nonzero) and {DRAWS} violating sets"));
    }
}

// ---------------------------------------------------------------- 3

fn divisors(n: u32) -> Vec<usize> {
    (1..=n as usize).filter(|m| n as usize % m == 0).collect()
}

fn c3_vertices(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut checked = 0;
    let mut forced = 0;
    for n in 2..=6u32 {
        for m in divisors(n) {
            let (q, act) = vertex_cycle(n, m);
            let c = act.ctx().clone();
            let r = parametrize(&q, &act);
            if m < n as usize {
                let no_gamma = r.free.iter().all(|f| f.kind != SymbolKind::Gamma);
                let is_forced = r.forced_zero.iter().any(|f| f.target.starts_with("gamma"));
                out.require(no_gamma && is_forced, || format!("n = {n}, m = {m}: gamma not forced to 0"));
                forced += 1;
                continue;
            }
            for _ in 0..20 {
                let g = rand_scalar(&c, &mut rng, true);
                let values = BTreeMap::from([(r.free[0].name.clone(), g.clone())]);
                let spec = build_action(&q, &act, &r.instantiate(&c, &values)).unwrap();
                let rep = verify_all(&spec, 1);
                let ok = rep.entry("x^n = 0").is_some_and(|e| e.passed()) && rep.all_pass();
                out.require(ok, || format!("n = {n}: x^n != 0 for gamma = {g}"));
                out.require(!spec.x.is_zero(), || format!("n = {n}: x vanishes for gamma = {g}"));
                checked += 1;
            }
        }
    }
    out.note(format!("{checked} free orbits checked, {forced} short orbits forced to 0"));
}

// ---------------------------------------------------------------- 4

fn c4_oracle(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let mut comparisons = 0usize;
    for n in [2u32, 3, 4, 6] {
        for (kind, (q, act0)) in [("K_n", complete(n as usize)), ("K_n,n", bipartite(n as usize))] {
            let c = act0.ctx().clone();
            for draw in 0..50 {
                let act = random_gauge(&act0, &mut rng);
                let r = parametrize(&q, &act);
                let values = r.free.iter().map(|f| (f.name.clone(), rand_scalar(&c, &mut rng, false))).collect();
                let params = r.instantiate(&c, &values);
                let spec = build_action_unchecked(&q, &act, &params);
                let table = extend_operators(&spec, 1);
                let orb = orbits(&q, &act);
                let frame = match kind {
                    "K_n" => Frame::of_vertex(&orb, 0),
                    _ => Frame::of_arrow(&q, &orb, 0),
                };
                let inp = match frame.inputs(&q, &act, &params) {
                    Ok(i) => i,
                    Err(e) => {
                        out.require(false, || format!("{kind} n = {n} draw {draw}: {e}"));
                        continue;
                    }
                };
                for i in 1..=frame.src.len() as i64 {
                    for j in 1..=frame.tgt.len() as i64 {
                        let Some(p) = frame.vector(&q, i, j) else { continue };
                        let mut e = AlgebraElement::from_path(&q, p, CycScalar::one(&c));
                        for k in 1..=n as i64 {
                            e = table.apply(Some("x"), &e);
                            let coords = frame.coords(&e).unwrap();
                            let mm = xk_cross_check(&inp, i, j, k, &coords).unwrap();
                            out.require(mm.is_none(), || format!("{kind} n = {n} ({i},{j}) k = {k}: {mm:?}"));
                            let closed = psi_table(&inp, i, j, k).unwrap();
                            let rec = psi_by_recursion(&inp, i, j, k);
                            out.require(closed == rec, || format!("{kind} n = {n} ({i},{j}) k = {k}: recursion"));
                            comparisons += 1;
                        }
                    }
                }
            }
        }
        let (points, bad) = vanishing_grid(&ctx(n), 3 * n as i64);
        let off_pattern: Vec<_> = bad.iter().filter(|p| p.a % n as i64 != 0).collect();
        out.require(off_pattern.is_empty(), || format!("n = {n}: grid fails with n not dividing a: {off_pattern:?}"));
        if !bad.is_empty() {
            let pts: Vec<String> = bad.iter().map(|p| format!("({},{})={}", p.a, p.b, p.value)).collect();
            out.literal.push(format!("n = {n}: {} of {points} grid points nonzero: {}", bad.len(), pts.join(" ")));
        }
    }
    out.note(format!("{comparisons} closed-form comparisons over 400 draws"));
}

// ---------------------------------------------------------------- 5

fn c5_examples(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    for (name, comps) in [("ex-7.7", 4), ("ex-7.8", 3)] {
        let (q, act) = fixture(name);
        let c = act.ctx().clone();
        let orb = orbits(&q, &act);
        let got = decompose_components(&q, &orb).len();
        out.require(got == comps, || format!("{name}: {got} components"));
        let r = parametrize(&q, &act);
        for seed in 0..3 {
            let values = sample_params(&r, &c, seed, 50).unwrap();
            let spec = build_action(&q, &act, &r.instantiate(&c, &values)).unwrap();
            let rep = verify_all(&spec, 6);
            out.require(rep.all_pass(), || format!("{name}: sampled set {seed} fails {:?}", rep.failures()));
        }
        let mut literal_pass = 0;
        const LITERAL: usize = 5;
        for _ in 0..LITERAL {
            let mut values: BTreeMap<String, CycScalar> =
                r.free.iter().map(|f| (f.name.clone(), int(&c, rng.gen_range(1..=4)))).collect();
            if name == "ex-7.7" {
                // γ² = γ″² + λ′λ″ only, solved for λ″
                let (g, g2, l1) = (&values["gamma[v1]"], &values["gamma[v5]"], &values["lambda[f7]"]);
                let l2 = &(&g.pow(2) - &g2.pow(2)) / l1;
                values.insert("lambda[f9]".into(), l2);
            }
            let spec = build_action_unchecked(&q, &act, &r.instantiate(&c, &values));
            if verify_all(&spec, 6).all_pass() {
                literal_pass += 1;
            }
        }
        out.note(format!("{name}: {comps} components, 3 sampled sets verify at L = 6"));
        if literal_pass < LITERAL {
            out.literal.push(format!("{name}: {literal_pass} of {LITERAL} literal draws verify at L = 6"));
        }
    }
}

// ---------------------------------------------------------------- 6

fn c6_faithful(out: &mut Outcome) {
    let (q, act) = fixture("z4-K2");
    let spec = build_action(&q, &act, &fixture_params("z4-K2")).unwrap();
    let rep = verify_all(&spec, 4);
    out.require(rep.all_pass(), || format!("z4-K2 fails {:?}", rep.failures()));
    out.require(is_inner_faithful(&spec), || "z4-K2 not inner faithful".into());
    let ar = validate_action(&q, &act);
    out.require(ar.order == 2 && !ar.faithful, || format!("z4-K2 quiver action order {}", ar.order));

    let (q, act) = fixture("ex-3.7");
    let spec = build_action(&q, &act, &fixture_params("ex-3.7")).unwrap();
    let rep = verify_all(&spec, 4);
    out.require(rep.all_pass(), || format!("ex-3.7 fails {:?}", rep.failures()));
    out.require(!is_inner_faithful(&spec), || "ex-3.7 reported inner faithful".into());
    out.require(rep.entry("inner-faithful").is_some_and(|e| !e.passed()), || "ex-3.7 entry".into());
    out.note(format!("z4-K2 order {} inner-faithful, ex-3.7 not inner-faithful", ar.order));
}

// ---------------------------------------------------------------- 7

fn uq_params(q: &Quiver, act: &ZnAction, rng: &mut ChaCha8Rng) -> UqParams {
    let orb = orbits(q, act);
    let c = act.ctx();
    let mut p = UqParams::zero(q, &orb, c);
    for o in 0..orb.vertex_orbits.len() {
        p.e.gamma[o] = rand_scalar(c, rng, true);
        p.f.gamma[o] = uq_partner_gamma(&p.e.gamma[o]).unwrap();
    }
    p
}

fn c7_uq(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let mut runs = 0;
    for n in [3usize, 4] {
        for (kind, (q, act)) in [("vertices", vertex_cycle(n as u32, n)), ("K_n", complete(n))] {
            let depth = if kind == "K_n" { 3 } else { 2 };
            for _ in 0..4 {
                let p = uq_params(&q, &act, &mut rng);
                let rep = verify_uq(&build_uq_action(&q, &act, &p).unwrap(), depth);
                let ef = rep.entry("EF - FE = (K - K^-1)/(q - q^-1)").is_some_and(|e| e.passed());
                out.require(rep.all_pass() && ef, || format!("{kind} n = {n}: {:?}", rep.failures()));
                runs += 1;
            }
            let mut p = uq_params(&q, &act, &mut rng);
            p.f.gamma[0] = &p.f.gamma[0] * &int(act.ctx(), 2);
            out.require(build_uq_action(&q, &act, &p).is_err(), || format!("{kind} n = {n}: violation accepted"));
            let rep = verify_uq(&build_uq_action_unchecked(&q, &act, &p).unwrap(), depth);
            let w = witness_of(&rep);
            let vertex_witness = rep
                .failures()
                .iter()
                .any(|e| e.witness.as_ref().is_some_and(|w| w.path.starts_with("e[")));
            out.require(vertex_witness, || format!("{kind} n = {n}: no vertex witness ({w:?})"));
        }
        let (q, act) = complete(n);
        let a = 0;
        let mut mu = vec![CycScalar::one(act.ctx()); q.num_arrows()];
        mu[a] = int(act.ctx(), 2);
        mu[act.arrow_image(a)] = CycScalar::from_ratio(act.ctx(), 1, 2);
        let scaled = act.with_scales(mu);
        let p = uq_params(&q, &scaled, &mut rng);
        let rejected = matches!(build_uq_action(&q, &scaled, &p), Err(ExtError::Gauge { .. }));
        out.require(rejected, || format!("K_{n}: scaled Type A not rejected"));
    }
    out.note(format!("{runs} satisfying draws verify; violations give vertex witnesses; mu != 1 rejected"));
}

// ---------------------------------------------------------------- 8

fn double_zero(q: &Quiver, act: &ZnAction) -> DoubleParams {
    let orb = orbits(q, act);
    DoubleParams {
        x: TaftParams::zero(q, &orb, act.ctx()),
        big_x: TaftParams::zero(q, &orb, act.ctx()),
    }
}

fn double_gammas(p: &mut DoubleParams, gammas: &[CycScalar]) {
    for (o, g) in gammas.iter().enumerate() {
        p.x.gamma[o] = g.clone();
        p.big_x.gamma[o] = double_partner_gamma(g).unwrap();
    }
}

struct DoubleCase {
    label: String,
    q: Quiver,
    g: ZnAction,
    big_g: ZnAction,
    p: DoubleParams,
    /// Constraint name that must be flagged; `None` for a satisfying case.
    broken: Option<&'static str>,
}

fn double_cases(rng: &mut ChaCha8Rng) -> Vec<DoubleCase> {
    let mut cases = Vec::new();
    for n in [2usize, 3] {
        let (q, act) = complete(n);
        for k in 0..3 {
            let mut p = double_zero(&q, &act);
            double_gammas(&mut p, &[rand_scalar(act.ctx(), rng, true)]);
            cases.push(DoubleCase {
                label: format!("K_{n} draw {k}"),
                q: q.clone(),
                g: act.clone(),
                big_g: act.clone(),
                p,
                broken: None,
            });
        }
        let (q, act) = bipartite(n);
        let c = act.ctx().clone();
        let mut p = double_zero(&q, &act);
        double_gammas(&mut p, &[CycScalar::one(&c), CycScalar::one(&c)]);
        p.x.lambda = band(&c, n, 1, 2, 1);
        p.big_x.lambda = band(&c, n, 1, 7, -1);
        let base = DoubleCase {
            label: format!("K_{n},{n} band"),
            q: q.clone(),
            g: act.clone(),
            big_g: act.clone(),
            p,
            broken: None,
        };
        let variant = |label: &str, broken, f: &dyn Fn(&mut DoubleCase)| {
            let mut d = DoubleCase {
                label: format!("K_{n},{n} {label}"),
                q: base.q.clone(),
                g: base.g.clone(),
                big_g: base.big_g.clone(),
                p: base.p.clone(),
                broken: Some(broken),
            };
            f(&mut d);
            d
        };
        cases.push(variant("Deicond", if n == 2 { "xX-diagonal (n = 2)" } else { "vertex-condition" }, &|d| {
            d.p.big_x.gamma[0] = &d.p.big_x.gamma[0] * &int(&c, 2);
        }));
        cases.push(variant("power identity", "x/g: power-identity", &|d| {
            double_gammas(&mut d.p, &[int(&c, 2), int(&c, 1)]);
        }));
        cases.push(variant("x recurrence", "x/g: lambda-recurrence", &|d| {
            d.p.x.lambda = band(&c, n, 1, 2, 0);
        }));
        if n == 3 {
            // at n = 2 the exponents ±1 coincide
            cases.push(variant("X recurrence", "X/G: lambda-recurrence", &|d| {
                d.p.big_x.lambda = band(&c, n, 1, 7, 1);
            }));
        }
        cases.push(variant("Type B diagonal", "x/g: lambda-diagonal", &|d| {
            d.p.x.lambda = band(&c, n, 0, 2, 1);
            d.p.big_x.lambda = band(&c, n, 0, 7, -1);
        }));
        if n == 3 {
            cases.push(variant("coupling", "xX-coupling", &|d| {
                d.p.big_x.lambda = band(&c, n, 2, 7, -1);
            }));
        }
        cases.push(variant("gG != Gg", "gG = Gg scales", &|d| {
            let mut mu = vec![CycScalar::one(&c); d.q.num_arrows()];
            mu[0] = int(&c, 2);
            mu[d.g.arrow_image(0)] = CycScalar::from_ratio(&c, 1, 2);
            d.big_g = d.g.with_scales(mu);
        }));
        cases.push(base);
    }
    // n = 2 with P = -1: the merged vertex condition forces γ^x γ^X = 1/2
    let c = ctx(2);
    let q = Quiver::from_parts(vec!["1".into(), "2".into()], vec![("a".into(), 0, 1), ("b".into(), 1, 0)]);
    let g = ZnAction::from_vertex_perm(&q, &c, vec![1, 0]).unwrap();
    let big_g = g.with_scales(vec![int(&c, -1), int(&c, -1)]);
    for (label, gx, broken) in [("1/2", CycScalar::from_ratio(&c, 1, 2), None), ("1", int(&c, 1), Some("xX-diagonal (n = 2)"))] {
        let mut p = double_zero(&q, &g);
        p.x.gamma[0] = int(&c, 1);
        p.big_x.gamma[0] = gx;
        cases.push(DoubleCase {
            label: format!("K_2 twisted G, gamma product {label}"),
            q: q.clone(),
            g: g.clone(),
            big_g: big_g.clone(),
            p,
            broken,
        });
    }
    cases
}

fn c8_double(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let cases = double_cases(&mut rng);
    let (mut good, mut broken) = (0, 0);
    for d in &cases {
        let entries = double_constraint_entries(&d.q, &d.g, &d.big_g, &d.p);
        let spec = build_double_action_unchecked(&d.q, &d.g, &d.big_g, &d.p).unwrap();
        let rep = verify_double(&spec, 3);
        let mixed = rep.entry("xX - zeta Xx = zeta(gG - 1)").is_some_and(|e| e.passed());
        match d.broken {
            None => {
                let ok = build_double_action(&d.q, &d.g, &d.big_g, &d.p).is_ok();
                out.require(ok && rep.all_pass() && mixed, || format!("{}: {:?}", d.label, rep.failures()));
                good += 1;
            }
            Some(name) => {
                let flagged = entries.iter().any(|e| e.name == name && !e.passed());
                out.require(flagged, || format!("{}: {name} not flagged", d.label));
                out.require(build_double_action(&d.q, &d.g, &d.big_g, &d.p).is_err(), || format!("{}: accepted", d.label));
                // the literal diagonal bullet is not needed by the relations
                if name != "x/g: lambda-diagonal" {
                    out.require(!rep.all_pass(), || format!("{}: relations still hold", d.label));
                }
                broken += 1;
            }
        }
    }
    out.note(format!("{good} satisfying cases pass, {broken} broken bullets detected"));
}

// ---------------------------------------------------------------- 9

/// Random Z_n-symmetric quiver: vertex cycles of lengths dividing n, arrows
/// added orbit by orbit.
fn random_symmetric(rng: &mut ChaCha8Rng) -> (Quiver, ZnAction) {
    let n = rng.gen_range(2..=6u32);
    let divs = divisors(n);
    let mut perm: Vec<usize> = Vec::new();
    let budget = rng.gen_range(1..=12usize);
    while perm.len() < budget {
        let m = divs[rng.gen_range(0..divs.len())];
        if perm.len() + m > 12 {
            break;
        }
        let base = perm.len();
        perm.extend((0..m).map(|i| base + (i + 1) % m));
    }
    let nv = perm.len();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut arrows = Vec::new();
    if nv > 1 {
        for _ in 0..rng.gen_range(0..=nv * 2) {
            let (u, v) = (rng.gen_range(0..nv), rng.gen_range(0..nv));
            if u == v || pairs.contains(&(u, v)) {
                continue;
            }
            let (mut s, mut t) = (u, v);
            loop {
                pairs.insert((s, t));
                arrows.push((format!("a{}", arrows.len()), s, t));
                (s, t) = (perm[s], perm[t]);
                if (s, t) == (u, v) {
                    break;
                }
            }
        }
    }
    let q = Quiver::from_parts((0..nv).map(|i| format!("v{i}")).collect(), arrows);
    let act = ZnAction::from_vertex_perm(&q, &ctx(n), perm).unwrap();
    (q, act)
}

fn c9_structure(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    let mut arrows_total = 0;
    for k in 0..200 {
        let (q, act) = random_symmetric(&mut rng);
        out.require(validate_action(&q, &act).valid, || format!("quiver {k}: invalid action"));
        let orb = orbits(&q, &act);
        let comps = decompose_components(&q, &orb);
        let mut seen = vec![0; q.num_arrows()];
        for comp in &comps {
            for &a in &comp.arrows {
                seen[a] += 1;
            }
            let ok = match comp.kind {
                ComponentKind::TypeA => comp.orbits.len() == 1,
                ComponentKind::TypeB => comp.orbits.len() == 2,
                ComponentKind::IsolatedVertices => comp.arrows.is_empty(),
            };
            out.require(ok, || format!("quiver {k}: malformed component {comp:?}"));
        }
        out.require(seen.iter().all(|&s| s == 1), || format!("quiver {k}: not an arrow partition"));
        out.require(reassemble(&q, &orb, &comps) == q, || format!("quiver {k}: gluing does not reconstruct"));
        arrows_total += q.num_arrows();
    }
    out.note(format!("200 random quivers, {arrows_total} arrows partitioned and reglued"));

    let mut specs = 0;
    for name in fixtures::names() {
        let f = fixtures::find(name).unwrap();
        let (q, act) = (f.quiver(), f.action());
        let splits_ok = match f.kind {
            FixtureKind::Taft => {
                let spec = build_action(&q, &act, &fixture_params(name)).unwrap();
                let twice = opposite_action(&opposite_action(&spec));
                out.require(twice == spec, || format!("{name}: opposite twice differs"));
                // the opposite action satisfies xg = ζ^{-1}gx
                let table = extend_operators(&opposite_action(&spec), 4);
                let one = CycScalar::one(act.ctx());
                let rels = [
                    Relation::new("xg = zeta^-1 gx")
                        .term(one.clone(), &["x", "g"])
                        .term(-zeta(act.ctx()).inv(), &["g", "x"]),
                    Relation::new("x^n = 0").term(one.clone(), &Relation::power("x", act.n() as usize)),
                ];
                let bad: Vec<_> = rels
                    .iter()
                    .map(|r| check_relation(&table, r))
                    .chain(check_split_consistency(&table))
                    .filter(|e| !e.passed())
                    .collect();
                out.require(bad.is_empty(), || format!("{name}: opposite action fails {bad:?}"));
                verify_all(&spec, 4).splits
            }
            FixtureKind::Uq => {
                let orb = orbits(&q, &act);
                let p = parse_uq_params(&q, &orb, act.ctx(), &f.params_value().to_string()).unwrap();
                verify_uq(&build_uq_action(&q, &act, &p).unwrap(), 4).splits
            }
            FixtureKind::Double => {
                let orb = orbits(&q, &act);
                let (p, big_g) = parse_double_params(&q, &orb, &act, &f.params_value().to_string()).unwrap();
                verify_double(&build_double_action(&q, &act, &big_g, &p).unwrap(), 4).splits
            }
        };
        out.require(splits_ok.iter().all(|e| e.passed()), || format!("{name}: split consistency"));
        specs += 1;
    }
    out.note(format!("split consistency at L = 4 on {specs} fixtures; opposite is an involution"));
}
