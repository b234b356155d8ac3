use num_traits::{Signed, Zero};

use super::{dim_err, FunctionAtom, KktLayout, MapStack, ProblemInstance};
use crate::cones::{Factor, StructuredSet};
use crate::error::ModelError;
use crate::rational::{mat_vec, unit, zeros, QMat, QVec, Rational};

/// `H(x) = 0, 0 ≤ Φ(x) ⊥ Ψ(x) ≥ 0` with a feasible anchor.
#[derive(Clone, Debug)]
pub struct CsInstance {
    pub(crate) h: MapStack,
    pub(crate) phi: MapStack,
    pub(crate) psi: MapStack,
    pub(crate) anchor: QVec,
}

/// Biactive, lower-active and upper-active index sets, optionally refined
/// along a direction. Indices are 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexSets {
    pub i00: Vec<usize>,
    pub i0p: Vec<usize>,
    pub ip0: Vec<usize>,
    /// `(I_00(u), I_0+(u), I_+0(u))` when a direction was given.
    pub directional: Option<(Vec<usize>, Vec<usize>, Vec<usize>)>,
}

impl CsInstance {
    pub fn new(h: MapStack, phi: MapStack, psi: MapStack, anchor: QVec) -> Result<Self, ModelError> {
        let n = anchor.len();
        for (name, m) in [("H", &h), ("Φ", &phi), ("Ψ", &psi)] {
            if m.input_dim() != n {
                return Err(dim_err(&format!("input of {name}"), n, m.input_dim()));
            }
        }
        if phi.output_dim() != psi.output_dim() {
            return Err(dim_err("outputs of Ψ vs Φ", phi.output_dim(), psi.output_dim()));
        }
        let cs = CsInstance { h, phi, psi, anchor };
        if cs.is_exact() {
            let hv = cs.h.eval(&cs.anchor)?;
            if hv.iter().any(|x| !x.is_zero()) {
                return Err(ModelError::InfeasibleAnchor("H(x̄) ≠ 0".into()));
            }
            let (pv, sv) = (cs.phi.eval(&cs.anchor)?, cs.psi.eval(&cs.anchor)?);
            for (i, (a, b)) in pv.iter().zip(&sv).enumerate() {
                if a.is_negative() || b.is_negative() || !(a * b).is_zero() {
                    return Err(ModelError::InfeasibleAnchor(format!(
                        "(Φ_{i}, Ψ_{i})(x̄) is not in Ω_EC"
                    )));
                }
            }
        }
        Ok(cs)
    }

    pub fn n(&self) -> usize {
        self.anchor.len()
    }

    pub fn d(&self) -> usize {
        self.h.output_dim()
    }

    pub fn m(&self) -> usize {
        self.phi.output_dim()
    }

    pub fn anchor(&self) -> &[Rational] {
        &self.anchor
    }

    pub fn h(&self) -> &MapStack {
        &self.h
    }

    pub fn phi(&self) -> &MapStack {
        &self.phi
    }

    pub fn psi(&self) -> &MapStack {
        &self.psi
    }

    pub fn is_exact(&self) -> bool {
        self.h.is_exact() && self.phi.is_exact() && self.psi.is_exact()
    }

    pub fn is_affine(&self) -> bool {
        self.h.is_affine() && self.phi.is_affine() && self.psi.is_affine()
    }

    /// `(∇H, ∇Φ, ∇Ψ)` at the anchor.
    pub fn jacobians(&self) -> Result<(QMat, QMat, QMat), ModelError> {
        Ok((
            self.h.jacobian(&self.anchor)?,
            self.phi.jacobian(&self.anchor)?,
            self.psi.jacobian(&self.anchor)?,
        ))
    }
}

/// Index sets at the anchor, refined along `u` when given. A direction
/// outside `L(x̄)` is an error.
pub fn index_sets(cs: &CsInstance, u: Option<&[Rational]>) -> Result<IndexSets, ModelError> {
    let pv = cs.phi.eval(&cs.anchor)?;
    let sv = cs.psi.eval(&cs.anchor)?;
    let mut out = IndexSets::default();
    for i in 0..cs.m() {
        match (pv[i].is_zero(), sv[i].is_zero()) {
            (true, true) => out.i00.push(i),
            (true, false) => out.i0p.push(i),
            (false, true) => out.ip0.push(i),
            (false, false) => unreachable!("anchor validated"),
        }
    }
    let Some(u) = u else {
        return Ok(out);
    };
    if u.len() != cs.n() {
        return Err(dim_err("direction", cs.n(), u.len()));
    }
    let (jh, jp, js) = cs.jacobians()?;
    let hu = mat_vec(&jh, u);
    let pu = mat_vec(&jp, u);
    let su = mat_vec(&js, u);
    let infeasible = hu.iter().any(|x| !x.is_zero())
        || out.i0p.iter().any(|&i| !pu[i].is_zero())
        || out.ip0.iter().any(|&i| !su[i].is_zero());
    if infeasible {
        return Err(ModelError::DirectionInfeasible);
    }
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for &i in &out.i00 {
        let (p, s) = (&pu[i], &su[i]);
        if p.is_negative() || s.is_negative() {
            return Err(ModelError::DirectionInfeasible);
        }
        match (p.is_zero(), s.is_zero()) {
            (true, true) => a.push(i),
            (true, false) => b.push(i),
            (false, true) => c.push(i),
            (false, false) => return Err(ModelError::DirectionInfeasible),
        }
    }
    out.directional = Some((a, b, c));
    Ok(out)
}

/// `(H, (Φ_1, Ψ_1), …, (Φ_m, Ψ_m)) ∈ {0}^d × Ω_EC^m`.
pub fn cs_to_general(cs: &CsInstance) -> Result<ProblemInstance, ModelError> {
    let mut atoms: Vec<FunctionAtom> = cs.h.atoms().to_vec();
    for i in 0..cs.m() {
        atoms.push(cs.phi.row(i)?);
        atoms.push(cs.psi.row(i)?);
    }
    let mut factors = Vec::new();
    if cs.d() > 0 {
        factors.push(Factor::Zero { dim: cs.d() });
    }
    factors.extend(std::iter::repeat_n(Factor::Compl, cs.m()));
    let lambda = StructuredSet::new(factors)?;
    ProblemInstance::new(MapStack::new(cs.n(), atoms)?, lambda, cs.anchor.clone())
}

/// `∇ₓL(x, μ, λ) = 0, μ ≥ 0, g(x) ≤ 0, ⟨g(x), μ⟩ = 0, h(x) = 0`.
#[derive(Clone, Debug)]
pub struct KktInstance {
    pub(crate) f: MapStack,
    pub(crate) g: MapStack,
    pub(crate) h: MapStack,
    pub(crate) x: QVec,
    pub(crate) mu: QVec,
    pub(crate) lambda: QVec,
}

fn exact_parts(atom: &FunctionAtom, p: usize) -> Result<(Vec<QMat>, QMat, QVec), ModelError> {
    match atom {
        FunctionAtom::Affine { a, c } => Ok((vec![vec![zeros(p); p]; c.len()], a.clone(), c.clone())),
        FunctionAtom::Quadratic { q, a, c } => Ok((q.clone(), a.clone(), c.clone())),
        FunctionAtom::Oracle(_) => Err(ModelError::Capability(
            "KKT embedding needs second derivatives: use affine or quadratic atoms".into(),
        )),
    }
}

/// All rows of a stack as `(Q_r, A_r, c_r)`.
fn stack_rows(m: &MapStack) -> Result<Vec<(QMat, QVec, Rational)>, ModelError> {
    let mut out = Vec::new();
    for a in m.atoms() {
        let (q, a, c) = exact_parts(a, m.input_dim())?;
        for r in 0..c.len() {
            out.push((q[r].clone(), a[r].clone(), c[r].clone()));
        }
    }
    Ok(out)
}

impl KktInstance {
    pub fn new(
        f: MapStack,
        g: MapStack,
        h: MapStack,
        x: QVec,
        mu: QVec,
        lambda: QVec,
    ) -> Result<Self, ModelError> {
        let p = x.len();
        for (name, m) in [("f", &f), ("g", &g), ("h", &h)] {
            if m.input_dim() != p {
                return Err(dim_err(&format!("input of {name}"), p, m.input_dim()));
            }
        }
        if f.output_dim() != 1 {
            return Err(dim_err("output of f", 1, f.output_dim()));
        }
        if mu.len() != g.output_dim() {
            return Err(dim_err("μ", g.output_dim(), mu.len()));
        }
        if lambda.len() != h.output_dim() {
            return Err(dim_err("λ", h.output_dim(), lambda.len()));
        }
        let k = KktInstance {
            f,
            g,
            h,
            x,
            mu,
            lambda,
        };
        let grad = k.grad_lagrangian()?;
        if grad.iter().any(|v| !v.is_zero()) {
            return Err(ModelError::InfeasibleAnchor("∇ₓL ≠ 0 at the anchor".into()));
        }
        let gv = k.g.eval(&k.x)?;
        for (gi, mi) in gv.iter().zip(&k.mu) {
            if gi.is_positive() || mi.is_negative() || !(gi * mi).is_zero() {
                return Err(ModelError::InfeasibleAnchor(
                    "complementarity between μ and g fails at the anchor".into(),
                ));
            }
        }
        if k.h.eval(&k.x)?.iter().any(|v| !v.is_zero()) {
            return Err(ModelError::InfeasibleAnchor("h(x̄) ≠ 0".into()));
        }
        Ok(k)
    }

    pub fn p(&self) -> usize {
        self.x.len()
    }

    pub fn anchor(&self) -> QVec {
        let mut z = self.x.clone();
        z.extend(self.mu.iter().cloned());
        z.extend(self.lambda.iter().cloned());
        z
    }

    pub fn f(&self) -> &MapStack {
        &self.f
    }

    pub fn g(&self) -> &MapStack {
        &self.g
    }

    pub fn h(&self) -> &MapStack {
        &self.h
    }

    pub fn multipliers(&self) -> (&[Rational], &[Rational]) {
        (&self.mu, &self.lambda)
    }

    fn grad_lagrangian(&self) -> Result<QVec, ModelError> {
        let mut grad = self.f.jacobian(&self.x)?.remove(0);
        for (row, m) in self.g.jacobian(&self.x)?.iter().zip(&self.mu) {
            for (gi, r) in grad.iter_mut().zip(row) {
                *gi += m * r;
            }
        }
        for (row, l) in self.h.jacobian(&self.x)?.iter().zip(&self.lambda) {
            for (gi, r) in grad.iter_mut().zip(row) {
                *gi += l * r;
            }
        }
        Ok(grad)
    }
}

/// `H := (∇ₓL, h)`, `Φ := −g`, `Ψ := μ` over `z = (x, μ, λ)`.
pub fn kkt_to_cs(k: &KktInstance) -> Result<CsInstance, ModelError> {
    let p = k.p();
    let m = k.mu.len();
    let ne = k.lambda.len();
    let nz = p + m + ne;

    let frow = stack_rows(&k.f)?.remove(0);
    let grows = stack_rows(&k.g)?;
    let hrows = stack_rows(&k.h)?;

    let lift_vec = |v: &QVec| -> QVec {
        let mut out = v.clone();
        out.resize(nz, Rational::zero());
        out
    };
    let lift_mat = |q: &QMat| -> QMat {
        let mut out = vec![zeros(nz); nz];
        for i in 0..p {
            for j in 0..p {
                out[i][j] = q[i][j].clone();
            }
        }
        out
    };

    // Row k of ∇ₓL: (Q_f x + a_f)_k + Σ_i μ_i (Q_i x + a_i)_k + Σ_j λ_j (Q_j x + a_j)_k.
    let mut lq = Vec::new();
    let mut la = Vec::new();
    let mut lc = Vec::new();
    for r in 0..p {
        let mut q = vec![zeros(nz); nz];
        let mut a = zeros(nz);
        for c in 0..p {
            a[c] = frow.0[r][c].clone();
        }
        let c0 = frow.1[r].clone();
        let mults = grows
            .iter()
            .enumerate()
            .map(|(i, row)| (p + i, row))
            .chain(hrows.iter().enumerate().map(|(j, row)| (p + m + j, row)));
        for (col, (qi, ai, _)) in mults {
            a[col] += &ai[r];
            for c in 0..p {
                q[col][c] += &qi[r][c];
                q[c][col] += &qi[r][c];
            }
        }
        lq.push(q);
        la.push(a);
        lc.push(c0);
    }

    let mut h_atoms = vec![FunctionAtom::quadratic(lq, la, lc)];
    if ne > 0 {
        h_atoms.push(FunctionAtom::quadratic(
            hrows.iter().map(|(q, _, _)| lift_mat(q)).collect(),
            hrows.iter().map(|(_, a, _)| lift_vec(a)).collect(),
            hrows.iter().map(|(_, _, c)| c.clone()).collect(),
        ));
    }
    let neg = |x: &Rational| -x;
    let phi = FunctionAtom::quadratic(
        grows
            .iter()
            .map(|(q, _, _)| lift_mat(q).iter().map(|r| r.iter().map(neg).collect()).collect())
            .collect(),
        grows.iter().map(|(_, a, _)| lift_vec(a).iter().map(neg).collect()).collect(),
        grows.iter().map(|(_, _, c)| -c).collect(),
    );
    let psi = FunctionAtom::affine(
        (0..m).map(|i| unit(nz, p + i)).collect(),
        zeros(m),
    );
    CsInstance::new(
        MapStack::new(nz, h_atoms)?,
        MapStack::new(nz, vec![phi])?,
        MapStack::new(nz, vec![psi])?,
        k.anchor(),
    )
}

/// The KKT system as a general instance, tagged with its output layout so the
/// verifier can report the max-residual error bound.
pub fn kkt_to_general(k: &KktInstance) -> Result<ProblemInstance, ModelError> {
    let cs = kkt_to_cs(k)?;
    Ok(cs_to_general(&cs)?.with_kkt(KktLayout {
        p: k.p(),
        n_eq: k.lambda.len(),
        m: k.mu.len(),
    }))
}
