//! Reads a minimal component as a family `v^i_j`: arrows from the source
//! orbit (label `i`) to the target orbit (label `j`), with `v^i_i = e_i`
//! when both orbits coincide.

use crate::cyclo::{zeta_pow, CycScalar};
use crate::quiver::{AlgebraElement, Path, Quiver};
use crate::symmetry::{Orbits, ZnAction};
use crate::taft::TaftParams;
use crate::verifier::OperatorTable;

use super::{Coords, OracleError, PsiInputs};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    /// Vertices of the source orbit in label order.
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub src_orbit: usize,
    pub tgt_orbit: usize,
}

impl Frame {
    pub fn new(orb: &Orbits, src_orbit: usize, tgt_orbit: usize) -> Self {
        Frame {
            src: orb.vertex_orbits[src_orbit].clone(),
            tgt: orb.vertex_orbits[tgt_orbit].clone(),
            src_orbit,
            tgt_orbit,
        }
    }

    /// Frame of the component containing an arrow, or of a vertex orbit.
    pub fn of_arrow(q: &Quiver, orb: &Orbits, a: usize) -> Self {
        let ar = q.arrow(a);
        Frame::new(orb, orb.vertex_orbit_of[ar.src], orb.vertex_orbit_of[ar.tgt])
    }

    pub fn of_vertex(orb: &Orbits, v: usize) -> Self {
        let o = orb.vertex_orbit_of[v];
        Frame::new(orb, o, o)
    }

    fn wrap(len: usize, i: i64) -> usize {
        (i - 1).rem_euclid(len as i64) as usize
    }

    /// `v^i_j`, if present in the quiver.
    pub fn vector(&self, q: &Quiver, i: i64, j: i64) -> Option<Path> {
        let s = self.src[Self::wrap(self.src.len(), i)];
        let t = self.tgt[Self::wrap(self.tgt.len(), j)];
        if s == t {
            Some(Path::trivial(s))
        } else {
            q.arrow_between(s, t).map(|a| q.arrow_path(a))
        }
    }

    /// Labels `(i, j)` of a basis path, if it belongs to the frame.
    pub fn position(&self, p: &Path) -> Option<(usize, usize)> {
        if p.len() > 1 {
            return None;
        }
        let i = self.src.iter().position(|&v| v == p.source())?;
        let j = self.tgt.iter().position(|&v| v == p.target())?;
        Some((i + 1, j + 1))
    }

    /// Coordinates of an element supported on the frame.
    pub fn coords(&self, e: &AlgebraElement) -> Option<Coords> {
        let mut out = Coords::new();
        for (p, c) in e.terms() {
            out.insert(self.position(p)?, c.clone());
        }
        Some(out)
    }

    /// `η_j = γ_t ζ^j`, `θ_{i,j} = -γ_s μ_{i,j} ζ^{i+1}`, `τ_{i,j} = λ_{i,j}`.
    /// Missing arrows get `μ = 1`, `λ = 0`.
    pub fn inputs(&self, q: &Quiver, act: &ZnAction, params: &TaftParams) -> Result<PsiInputs, OracleError> {
        let ctx = act.ctx();
        let gs = &params.gamma[self.src_orbit];
        let gt = &params.gamma[self.tgt_orbit];
        let (m, mp) = (self.src.len(), self.tgt.len());
        let eta = (1..=mp as i64).map(|j| gt * &zeta_pow(ctx, j)).collect();
        let mut theta = vec![vec![CycScalar::zero(ctx); mp]; m];
        let mut tau = theta.clone();
        for i in 1..=m {
            for j in 1..=mp {
                let arrow = self.vector(q, i as i64, j as i64).and_then(|p| p.as_arrow());
                let (mu, lambda) = match arrow {
                    Some(a) => (act.scale(a).clone(), params.lambda[a].clone()),
                    None => (CycScalar::one(ctx), CycScalar::zero(ctx)),
                };
                theta[i - 1][j - 1] = -(&(gs * &mu) * &zeta_pow(ctx, i as i64 + 1));
                tau[i - 1][j - 1] = lambda;
            }
        }
        PsiInputs::new(ctx, eta, theta, tau)
    }
}

/// `X^k v^i_j` from iterated application of a verifier operator.
pub fn iterate(table: &OperatorTable, op: &str, frame: &Frame, i: i64, j: i64, k: usize) -> Option<Coords> {
    let q = table.quiver();
    let p = frame.vector(q, i, j)?;
    let mut e = AlgebraElement::from_path(q, p, CycScalar::one(&table.system().ctx));
    for _ in 0..k {
        e = table.apply(Some(op), &e);
    }
    frame.coords(&e)
}
