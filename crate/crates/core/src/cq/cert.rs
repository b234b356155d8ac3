//! Exact sequence certificates for directional quasi-/pseudo-normality.
//!
//! With `t_k = 2^{-k}`, `u^k = u + t_k v`, `s^k = P(x̄) + t_k ξ + t_k² w` and
//! `ζ^k = ζ`, quadratic `P` gives
//! `P(x̄ + t_k u^k) − s^k = t_k²(∇P(x̄)v + l/2 − w) + O(t_k³)` where
//! `l = D²P(x̄)(u)`, so the sign conditions reduce to a strict linear system in
//! `(v, w)`. Every term of the prefix is checked exactly.

use num_traits::{One, Signed};

use super::strata::ZPiece;
use super::witness::{cs_term, general_term};
use super::{CheckConfig, Mode, SequenceTerm};
use crate::cones::CellSpec;
use crate::ratgeom::{arrangement_cells, HCone, Sign};
use crate::rational::{add, dot, frac, int, mat_vec, scale, unit, zeros, QMat, QVec, Rational};
use crate::system::{CsInstance, ProblemInstance};

pub(crate) struct Certifier<'a> {
    pub inst: &'a ProblemInstance,
    pub cs: Option<&'a CsInstance>,
    pub j: &'a QMat,
    pub cfg: &'a CheckConfig,
}

fn pow2_inv(k: usize) -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::one() << k)
}

impl Certifier<'_> {
    fn term_ok(&self, zeta: &[Rational], mode: Mode, term: &SequenceTerm) -> bool {
        match self.cs {
            Some(cs) => cs_term(cs, zeta, mode, term).is_ok(),
            None => general_term(self.inst, zeta, mode, term).is_ok(),
        }
    }

    fn term(&self, k: usize, u: &QVec, v: Option<&QVec>, w: &QVec, zeta: &QVec) -> SequenceTerm {
        let t = pow2_inv(k);
        let uk = match v {
            Some(v) => add(u, &scale(v, &t)),
            None => u.clone(),
        };
        if self.cs.is_some() {
            return SequenceTerm {
                t,
                u: uk,
                s: None,
                zeta: None,
            };
        }
        let xi = mat_vec(self.j, u);
        let s = add(
            &add(self.inst.anchor_point().coords(), &scale(&xi, &t)),
            &scale(w, &(&t * &t)),
        );
        SequenceTerm {
            t,
            u: uk,
            s: Some(s),
            zeta: Some(zeta.clone()),
        }
    }

    /// Looks for `prefix_len` consecutive valid terms starting at some
    /// `k0 ≤ max_start`.
    fn search(
        &self,
        u: &QVec,
        v: Option<&QVec>,
        w: &QVec,
        zeta: &QVec,
        mode: Mode,
    ) -> Option<Vec<SequenceTerm>> {
        let len = self.cfg.prefix_len.max(1);
        let mut run: Vec<SequenceTerm> = Vec::new();
        for k in 0..=self.cfg.max_start + len {
            let term = self.term(k, u, v, w, zeta);
            if self.term_ok(zeta, mode, &term) {
                run.push(term);
                if run.len() == len {
                    return Some(run);
                }
            } else {
                run.clear();
                if k >= self.cfg.max_start {
                    return None;
                }
            }
        }
        None
    }

    /// Pseudo-normality sequence for `⟨ζ, l⟩ > 0`: `u^k = u`, `w` the cell
    /// point, so the sign term is `t_k²⟨ζ, l⟩/2`.
    pub fn pseudo(&self, u: &QVec, zeta: &QVec, z: &ZPiece) -> Option<Vec<SequenceTerm>> {
        let w = match &z.cell {
            Some(c) => c.point.clone(),
            None => zeros(self.inst.m()),
        };
        self.search(u, None, &w, zeta, Mode::Pseudo)
    }

    /// Quasi-normality sequence: for each sign pattern `σ` of `ζ ∈ Z`, solve
    /// `σ_i(∇P_i v + l_i/2 − w_i) > 0` on `supp ζ` with `w` in the piece's cell.
    /// Such sequences also satisfy the pseudo sign condition.
    pub fn quasi(&self, u: &QVec, z: &ZPiece, mode: Mode) -> Option<(QVec, Vec<SequenceTerm>)> {
        let m = self.inst.m();
        let n = self.inst.n();
        let l = self.inst.second_derivative(u).ok()?;
        let axes: QMat = (0..m).map(|i| unit(m, i)).collect();
        let cells = arrangement_cells(&z.cone, &axes, self.cfg.cell_cap, |_| false).ok()?;
        for cell in cells.iter().filter(|c| !c.is_origin()) {
            let zeta = cell.point.clone();
            if let Some((v, w)) = self.solve(&cell.signs, &l, z.cell.as_ref(), n, m) {
                if let Some(seq) = self.search(u, Some(&v), &w, &zeta, mode) {
                    return Some((zeta, seq));
                }
            }
        }
        None
    }

    fn solve(
        &self,
        signs: &[Sign],
        l: &QVec,
        cell: Option<&CellSpec>,
        n: usize,
        m: usize,
    ) -> Option<(QVec, QVec)> {
        let mw = if cell.is_some() { m } else { 0 };
        let dim = n + mw + 1;
        let lift_w = |r: &QVec| -> QVec {
            let mut out = zeros(dim);
            for (i, x) in r.iter().enumerate() {
                out[n + i] = x.clone();
            }
            out
        };
        let mut ineq: QMat = Vec::new();
        let mut eq: QMat = Vec::new();
        let mut strict: QMat = Vec::new();
        if let Some(c) = cell {
            ineq.extend(c.closure.ineq().iter().map(lift_w));
            eq.extend(c.closure.eq().iter().map(lift_w));
            strict.extend(c.strict.iter().map(lift_w));
        }
        strict.push(scale(&unit(dim, dim - 1), &int(-1)));
        let half = frac(1, 2);
        for (i, s) in signs.iter().enumerate() {
            let sigma = match s {
                Sign::Zero => continue,
                Sign::Pos => int(1),
                Sign::Neg => int(-1),
            };
            let mut row = zeros(dim);
            for c in 0..n {
                row[c] = -(&sigma * &self.j[i][c]);
            }
            if mw > 0 {
                row[n + i] = sigma.clone();
            }
            row[dim - 1] = -(&sigma * &l[i] * &half);
            strict.push(row);
        }
        let mut all = ineq;
        all.extend(strict.iter().cloned());
        let gens = HCone::new(dim, all, eq).ok()?.generators();
        if gens.is_trivial() {
            return None;
        }
        let p = gens.relint_point().ok()?;
        if strict.iter().any(|a| !dot(a, &p).is_negative()) {
            return None;
        }
        let tau = p[dim - 1].clone();
        let inv = Rational::one() / tau;
        let v = scale(&p[..n], &inv);
        let w = if mw > 0 {
            scale(&p[n..n + m], &inv)
        } else {
            zeros(m)
        };
        Some((v, w))
    }
}
