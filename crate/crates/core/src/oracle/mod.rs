//! Symmetric-function side of `x^k`: complete homogeneous polynomials,
//! Gaussian binomials and the closed form for the coefficients of `X^k v^i_j`.
//!
//! Nothing here touches the action builders; [`bridge`] only reads scalars
//! out of a parameter set and coordinates out of an operator image.

pub mod bridge;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cyclo::{zeta, zeta_pow, Ctx, CycScalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("q-binomial [{n} choose {k}] out of range")]
    Range { n: i64, k: i64 },
    #[error("tau/theta relation fails at (i, j) = ({i}, {j})")]
    TauTheta { i: usize, j: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// `h_a(x_0, ..., x_b)`, built one variable at a time from
/// `h_a(x_0..x_b) = h_a(x_0..x_{b-1}) + x_b h_{a-1}(x_0..x_b)`.
pub fn h_complete(ctx: &Ctx, a: i64, values: &[CycScalar]) -> CycScalar {
    if a < 0 {
        return CycScalar::zero(ctx);
    }
    let a = a as usize;
    // h[d] over the empty variable set
    let mut h = vec![CycScalar::zero(ctx); a + 1];
    h[0] = CycScalar::one(ctx);
    for x in values {
        for d in 1..=a {
            let add = x * &h[d - 1];
            h[d] = &h[d] + &add;
        }
    }
    h.pop().expect("a + 1 entries")
}

/// `grid[b][a] = h_a(x_0, ..., x_b)` for `a <= amax`, by the same recurrence.
pub fn h_grid(ctx: &Ctx, amax: usize, values: &[CycScalar]) -> Vec<Vec<CycScalar>> {
    let mut h = vec![CycScalar::zero(ctx); amax + 1];
    h[0] = CycScalar::one(ctx);
    let mut out = Vec::with_capacity(values.len());
    for x in values {
        for d in 1..=amax {
            let add = x * &h[d - 1];
            h[d] = &h[d] + &add;
        }
        out.push(h.clone());
    }
    out
}

/// `1, r, r^2, ..., r^b`.
pub fn geometric(ctx: &Ctx, r: &CycScalar, b: i64) -> Vec<CycScalar> {
    let mut out = Vec::new();
    let mut cur = CycScalar::one(ctx);
    for _ in 0..=b.max(-1) {
        out.push(cur.clone());
        cur = &cur * r;
    }
    out.truncate((b + 1).max(0) as usize);
    out
}

/// Gaussian binomial at `at` by `[N, K] = [N-1, K-1] + at^K [N-1, K]`.
pub fn q_binomial(n: i64, k: i64, at: &CycScalar) -> Result<CycScalar, OracleError> {
    if k < 0 || n < 0 || k > n {
        return Err(OracleError::Range { n, k });
    }
    let ctx = at.ctx().clone();
    let (n, k) = (n as usize, k as usize);
    let powers = geometric(&ctx, at, k as i64);
    let mut row = vec![CycScalar::zero(&ctx); k + 1];
    row[0] = CycScalar::one(&ctx);
    for _ in 0..n {
        for r in (1..=k).rev() {
            let next = &row[r - 1] + &(&powers[r] * &row[r]);
            row[r] = next;
        }
    }
    Ok(row.pop().expect("k + 1 entries"))
}

/// Grid point where `h_a(1, ζ, ..., ζ^b)` failed to vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub n: u32,
    pub a: i64,
    pub b: i64,
    pub value: String,
}

/// `h_a(1, ζ, ..., ζ^b) = 0` whenever `n | a + b`, `a, b >= 1`, over `a, b <= bound`.
/// Returns the points checked and those that did not vanish.
pub fn vanishing_grid(ctx: &Ctx, bound: i64) -> (usize, Vec<GridPoint>) {
    let z = zeta(ctx);
    let n = ctx.n() as i64;
    let mut checked = 0;
    let mut bad = Vec::new();
    for a in 1..=bound {
        for b in 1..=bound {
            if (a + b) % n != 0 {
                continue;
            }
            checked += 1;
            let v = h_complete(ctx, a, &geometric(ctx, &z, b));
            if !v.is_zero() {
                bad.push(GridPoint {
                    n: ctx.n(),
                    a,
                    b,
                    value: v.to_string(),
                });
            }
        }
    }
    (checked, bad)
}

/// Scalars of `X v^i_j = η_j v^i_j + θ_{i,j} v^{i+1}_{j+1} + τ_{i,j} v^i_{j+1}`.
///
/// Indices are 1-based and read modulo `m` (rows) and `m'` (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiInputs {
    pub ctx: Ctx,
    pub eta: Vec<CycScalar>,
    pub theta: Vec<Vec<CycScalar>>,
    pub tau: Vec<Vec<CycScalar>>,
}

impl PsiInputs {
    pub fn new(
        ctx: &Ctx,
        eta: Vec<CycScalar>,
        theta: Vec<Vec<CycScalar>>,
        tau: Vec<Vec<CycScalar>>,
    ) -> Result<Self, OracleError> {
        let mp = eta.len();
        let m = theta.len();
        if m == 0 || mp == 0 {
            return Err(OracleError::Shape("empty index range".into()));
        }
        if tau.len() != m || theta.iter().chain(&tau).any(|r| r.len() != mp) {
            return Err(OracleError::Shape(format!("expected {m}x{mp} theta and tau")));
        }
        Ok(PsiInputs {
            ctx: ctx.clone(),
            eta,
            theta,
            tau,
        })
    }

    pub fn m(&self) -> usize {
        self.theta.len()
    }

    pub fn m_prime(&self) -> usize {
        self.eta.len()
    }

    pub fn row(&self, i: i64) -> usize {
        (i - 1).rem_euclid(self.m() as i64) as usize + 1
    }

    pub fn col(&self, j: i64) -> usize {
        (j - 1).rem_euclid(self.m_prime() as i64) as usize + 1
    }

    pub fn eta(&self, j: i64) -> &CycScalar {
        &self.eta[self.col(j) - 1]
    }

    pub fn theta(&self, i: i64, j: i64) -> &CycScalar {
        &self.theta[self.row(i) - 1][self.col(j) - 1]
    }

    pub fn tau(&self, i: i64, j: i64) -> &CycScalar {
        &self.tau[self.row(i) - 1][self.col(j) - 1]
    }

    /// `τ_{i+1,j+1} θ_{i,j} = ζ θ_{i,j+1} τ_{i,j}` for all pairs.
    pub fn check_tau_theta(&self) -> Result<(), OracleError> {
        let z = zeta(&self.ctx);
        for i in 1..=self.m() as i64 {
            for j in 1..=self.m_prime() as i64 {
                let lhs = self.tau(i + 1, j + 1) * self.theta(i, j);
                let rhs = &(&z * self.theta(i, j + 1)) * self.tau(i, j);
                if lhs != rhs {
                    return Err(OracleError::TauTheta {
                        i: i as usize,
                        j: j as usize,
                    });
                }
            }
        }
        Ok(())
    }

    /// Both sides of moving `τ` past `s` factors of `θ`:
    /// `τ_{i+s,j+t-1} Π θ_{i+ℓ,j+ℓ+t-1-s}` and `ζ^s τ_{i,j+t-s-1} Π θ_{i+ℓ,j+ℓ+t-s}`.
    pub fn tau_past_theta(&self, i: i64, j: i64, s: i64, t: i64) -> (CycScalar, CycScalar) {
        let mut lhs = self.tau(i + s, j + t - 1).clone();
        let mut rhs = &zeta_pow(&self.ctx, s) * self.tau(i, j + t - s - 1);
        for l in 0..s {
            lhs = &lhs * self.theta(i + l, j + l + t - 1 - s);
            rhs = &rhs * self.theta(i + l, j + l + t - s);
        }
        (lhs, rhs)
    }
}

/// Closed form of the coefficient of `v^{i+s}_{j+t}` in `X^k v^i_j`.
pub fn psi(inp: &PsiInputs, i: i64, j: i64, k: i64, s: i64, t: i64) -> Result<CycScalar, OracleError> {
    inp.check_tau_theta()?;
    Ok(psi_unchecked(inp, i, j, k, s, t))
}

fn psi_unchecked(inp: &PsiInputs, i: i64, j: i64, k: i64, s: i64, t: i64) -> CycScalar {
    let ctx = &inp.ctx;
    if s < 0 || t < s || k < t {
        return CycScalar::zero(ctx);
    }
    let mut c = CycScalar::one(ctx);
    for l in 0..s {
        c = &c * inp.theta(i + l, j + l + t - s);
    }
    for l in 0..t - s {
        c = &c * inp.tau(i, j + l);
    }
    if c.is_zero() {
        return c;
    }
    let etas: Vec<CycScalar> = (0..=t).map(|l| inp.eta(j + l).clone()).collect();
    let z = zeta(ctx);
    &(&c * &h_complete(ctx, k - t, &etas)) * &h_complete(ctx, s, &geometric(ctx, &z, t - s))
}

/// All `ψ_{k,s,t}` by the closed form, keyed by `(s, t)`.
///
/// Same formula as [`psi`], with the `h` values shared across `(s, t)`.
pub fn psi_table(inp: &PsiInputs, i: i64, j: i64, k: i64) -> Result<BTreeMap<(i64, i64), CycScalar>, OracleError> {
    inp.check_tau_theta()?;
    let ctx = &inp.ctx;
    let mut out = BTreeMap::new();
    if k < 0 {
        return Ok(out);
    }
    let ku = k as usize;
    let etas: Vec<CycScalar> = (0..=k).map(|l| inp.eta(j + l).clone()).collect();
    let eta_h = h_grid(ctx, ku, &etas);
    let geo_h = h_grid(ctx, ku, &geometric(ctx, &zeta(ctx), k));
    for t in 0..=k {
        for s in 0..=t {
            let mut c = CycScalar::one(ctx);
            for l in 0..s {
                c = &c * inp.theta(i + l, j + l + t - s);
            }
            for l in 0..t - s {
                c = &c * inp.tau(i, j + l);
            }
            if !c.is_zero() {
                c = &(&c * &eta_h[t as usize][(k - t) as usize]) * &geo_h[(t - s) as usize][s as usize];
            }
            out.insert((s, t), c);
        }
    }
    Ok(out)
}

/// All `ψ_{k,s,t}` by the one-step recursion
/// `ψ_{k,s,t} = η_{j+t} ψ_{k-1,s,t} + θ_{i+s-1,j+t-1} ψ_{k-1,s-1,t-1} + τ_{i+s,j+t-1} ψ_{k-1,s,t-1}`.
/// Needs no relation between `τ` and `θ`.
pub fn psi_by_recursion(inp: &PsiInputs, i: i64, j: i64, k: i64) -> BTreeMap<(i64, i64), CycScalar> {
    let ctx = &inp.ctx;
    let mut prev: BTreeMap<(i64, i64), CycScalar> = BTreeMap::new();
    prev.insert((0, 0), CycScalar::one(ctx));
    for step in 1..=k {
        let get = |m: &BTreeMap<(i64, i64), CycScalar>, s, t| m.get(&(s, t)).cloned().unwrap_or_else(|| CycScalar::zero(ctx));
        let mut next = BTreeMap::new();
        for t in 0..=step {
            for s in 0..=t {
                let a = inp.eta(j + t) * &get(&prev, s, t);
                let b = inp.theta(i + s - 1, j + t - 1) * &get(&prev, s - 1, t - 1);
                let c = inp.tau(i + s, j + t - 1) * &get(&prev, s, t - 1);
                next.insert((s, t), &(&a + &b) + &c);
            }
        }
        prev = next;
    }
    prev
}

/// Coordinates `(i, j)` (1-based, reduced) of a vector in the span of the `v^i_j`.
pub type Coords = BTreeMap<(usize, usize), CycScalar>;

/// `Σ ψ_{k,s,t} v^{i+s}_{j+t}` with coinciding indices summed.
pub fn xk_closed_form(inp: &PsiInputs, i: i64, j: i64, k: i64) -> Result<Coords, OracleError> {
    let mut out = Coords::new();
    for ((s, t), c) in psi_table(inp, i, j, k)? {
        let key = (inp.row(i + s), inp.col(j + t));
        let cur = out.remove(&key).unwrap_or_else(|| CycScalar::zero(&inp.ctx));
        let v = &cur + &c;
        if !v.is_zero() {
            out.insert(key, v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub i: usize,
    pub j: usize,
    pub expected: String,
    pub actual: String,
}

/// Compare the closed form of `X^k v^i_j` with an independently computed image.
pub fn xk_cross_check(inp: &PsiInputs, i: i64, j: i64, k: i64, actual: &Coords) -> Result<Option<Mismatch>, OracleError> {
    let expected = xk_closed_form(inp, i, j, k)?;
    let zero = CycScalar::zero(&inp.ctx);
    let keys: std::collections::BTreeSet<_> = expected.keys().chain(actual.keys()).copied().collect();
    for key in keys {
        let e = expected.get(&key).unwrap_or(&zero);
        let a = actual.get(&key).unwrap_or(&zero);
        if e != a {
            return Ok(Some(Mismatch {
                i: key.0,
                j: key.1,
                expected: e.to_string(),
                actual: a.to_string(),
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::make_context;

    fn int(ctx: &Ctx, v: i64) -> CycScalar {
        CycScalar::from_int(ctx, v)
    }

    #[test]
    fn h_conventions() {
        let ctx = make_context(3).unwrap();
        assert!(h_complete(&ctx, 0, &[]).is_one());
        assert!(h_complete(&ctx, 2, &[]).is_zero());
        assert!(h_complete(&ctx, -1, &[int(&ctx, 5)]).is_zero());
        let z = zeta(&ctx);
        assert!(h_complete(&ctx, 2, &[CycScalar::one(&ctx), z.clone()]).is_zero());
        // h_2(x, y) = x^2 + xy + y^2
        let v = h_complete(&ctx, 2, &[int(&ctx, 2), int(&ctx, 3)]);
        assert_eq!(v, int(&ctx, 19));
    }

    #[test]
    fn q_binomials() {
        let ctx = make_context(4).unwrap();
        let z = zeta(&ctx);
        assert!(q_binomial(4, 2, &z).unwrap().is_zero());
        assert!(q_binomial(7, 0, &z).unwrap().is_one());
        assert!(q_binomial(3, 4, &z).is_err());
        let two = int(&ctx, 2);
        // [4 choose 2]_2 = 35
        assert_eq!(q_binomial(4, 2, &two).unwrap(), int(&ctx, 35));
    }

    #[test]
    fn principal_specialization() {
        for n in 2..=6 {
            let ctx = make_context(n).unwrap();
            let z = zeta(&ctx);
            for a in 0..=6 {
                for b in 0..=6 {
                    let h = h_complete(&ctx, a, &geometric(&ctx, &z, b));
                    assert_eq!(h, q_binomial(a + b, a, &z).unwrap(), "n={n} a={a} b={b}");
                }
            }
        }
    }

    fn binomial(n: i64, k: i64) -> i64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn grid_fails_exactly_on_multiples() {
        // q-Lucas: [a+b choose a]_ζ = C((a+b)/n, a/n) when n | a and n | b
        for n in 2..=6 {
            let ctx = make_context(n).unwrap();
            let (checked, bad) = vanishing_grid(&ctx, 3 * n);
            assert!(checked > 0);
            for p in &bad {
                assert_eq!(p.a % n, 0, "{p:?}");
                assert_eq!(p.value, binomial((p.a + p.b) / n, p.a / n).to_string());
            }
            let expected = (1..=3).flat_map(|x| (1..=3).map(move |y| (x, y))).count();
            assert_eq!(bad.len(), expected);
        }
    }

    fn vertex_inputs(ctx: &Ctx, gamma: &CycScalar) -> PsiInputs {
        let n = ctx.n() as usize;
        let zero = CycScalar::zero(ctx);
        let mut theta = vec![vec![zero.clone(); n]; n];
        for (i, row) in theta.iter_mut().enumerate() {
            row[i] = -(gamma * &zeta_pow(ctx, i as i64 + 2));
        }
        let eta = (1..=n).map(|j| gamma * &zeta_pow(ctx, j as i64)).collect();
        PsiInputs::new(ctx, eta, theta, vec![vec![zero; n]; n]).unwrap()
    }

    #[test]
    fn vertex_power_vanishes() {
        for n in 2..=6 {
            let ctx = make_context(n).unwrap();
            let gamma = &int(&ctx, 2) + &zeta(&ctx);
            let inp = vertex_inputs(&ctx, &gamma);
            for i in 1..=n {
                let v = xk_closed_form(&inp, i, i, n).unwrap();
                assert!(v.is_empty(), "n={n} i={i}: {v:?}");
                let t = psi_table(&inp, i, i, n).unwrap();
                assert_eq!(t[&(0, 0)], gamma.pow(n));
                assert_eq!(t[&(n, n)], -gamma.pow(n));
            }
        }
    }

    #[test]
    fn table_matches_single_entries() {
        let ctx = make_context(4).unwrap();
        let gamma = &int(&ctx, 3) - &zeta(&ctx);
        let inp = vertex_inputs(&ctx, &gamma);
        for k in 0..=5 {
            let t = psi_table(&inp, 2, 2, k).unwrap();
            assert_eq!(t.len() as i64, (k + 1) * (k + 2) / 2);
            for ((s, tt), v) in &t {
                assert_eq!(*v, psi(&inp, 2, 2, k, *s, *tt).unwrap(), "k={k} s={s} t={tt}");
            }
        }
    }

    #[test]
    fn base_case() {
        let ctx = make_context(3).unwrap();
        let eta = vec![int(&ctx, 1), int(&ctx, 2), int(&ctx, 3)];
        let theta = vec![vec![int(&ctx, 5); 3]; 3];
        let tau = vec![vec![CycScalar::zero(&ctx); 3]; 3];
        let inp = PsiInputs::new(&ctx, eta, theta, tau).unwrap();
        assert_eq!(psi(&inp, 1, 2, 1, 0, 0).unwrap(), int(&ctx, 2));
        assert_eq!(psi(&inp, 1, 2, 1, 1, 1).unwrap(), int(&ctx, 5));
        assert!(psi(&inp, 1, 2, 1, 0, 1).unwrap().is_zero());
        let id = xk_closed_form(&inp, 2, 3, 0).unwrap();
        assert_eq!(id.len(), 1);
        assert!(id[&(2, 3)].is_one());
    }

    #[test]
    fn tau_theta_violation_rejected() {
        let ctx = make_context(2).unwrap();
        let eta = vec![int(&ctx, 1), int(&ctx, 1)];
        let theta = vec![vec![int(&ctx, 1); 2]; 2];
        let mut tau = vec![vec![CycScalar::zero(&ctx); 2]; 2];
        tau[0][0] = int(&ctx, 1);
        let inp = PsiInputs::new(&ctx, eta, theta, tau).unwrap();
        assert!(matches!(psi(&inp, 1, 1, 2, 0, 0), Err(OracleError::TauTheta { .. })));
    }
}
