//! The map `P`, problem instances and the complementarity/KKT encodings.

mod cs;
pub mod schema;

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::cones::{tangent_cone, ConeUnion, Piece, SetPoint, StructuredSet};
use crate::error::ModelError;
use crate::ratgeom::linear_preimage;
use crate::rational::{
    bilinear, dot, from_f64, mat_vec, vec_to_f64, zeros, QMat, QVec, Rational,
};

pub use cs::{
    cs_to_general, index_sets, kkt_to_cs, kkt_to_general, CsInstance, IndexSets, KktInstance,
};

/// Numeric callbacks for a smooth map `R^n → R^m`. Implementations must be
/// reentrant: the verifier calls them from several threads at once.
pub trait SmoothOracle: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>>;
    /// `(uᵀ ∇²P_r(x) u)_r`.
    fn second_directional(&self, x: &[f64], u: &[f64]) -> Vec<f64>;
    fn smoothness(&self) -> &str {
        "C2"
    }
}

/// One block of output rows of `P`.
#[derive(Clone)]
pub enum FunctionAtom {
    /// `x ↦ A x + c`.
    Affine { a: QMat, c: QVec },
    /// Row `r` is `½ xᵀ Q_r x + A_r x + c_r`; every `Q_r` is symmetric.
    Quadratic { q: Vec<QMat>, a: QMat, c: QVec },
    Oracle(Arc<dyn SmoothOracle>),
}

impl fmt::Debug for FunctionAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionAtom::Affine { a, c } => f
                .debug_struct("Affine")
                .field("a", a)
                .field("c", c)
                .finish(),
            FunctionAtom::Quadratic { q, a, c } => f
                .debug_struct("Quadratic")
                .field("q", q)
                .field("a", a)
                .field("c", c)
                .finish(),
            FunctionAtom::Oracle(o) => write!(
                f,
                "Oracle({} -> {}, {})",
                o.input_dim(),
                o.output_dim(),
                o.smoothness()
            ),
        }
    }
}

impl PartialEq for FunctionAtom {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FunctionAtom::Affine { a, c }, FunctionAtom::Affine { a: b, c: d }) => a == b && c == d,
            (
                FunctionAtom::Quadratic { q, a, c },
                FunctionAtom::Quadratic { q: q2, a: a2, c: c2 },
            ) => q == q2 && a == a2 && c == c2,
            (FunctionAtom::Oracle(x), FunctionAtom::Oracle(y)) => Arc::ptr_eq(x, y),
            _ => false,
        }
    }
}

fn dim_err(what: &str, expected: usize, found: usize) -> ModelError {
    ModelError::Dimension {
        what: what.to_string(),
        expected,
        found,
    }
}

impl FunctionAtom {
    pub fn affine(a: QMat, c: QVec) -> Self {
        FunctionAtom::Affine { a, c }
    }

    pub fn quadratic(q: Vec<QMat>, a: QMat, c: QVec) -> Self {
        FunctionAtom::Quadratic { q, a, c }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            FunctionAtom::Affine { c, .. } | FunctionAtom::Quadratic { c, .. } => c.len(),
            FunctionAtom::Oracle(o) => o.output_dim(),
        }
    }

    fn validate(&self, n: usize) -> Result<(), ModelError> {
        let check_a = |a: &QMat, c: &QVec| -> Result<(), ModelError> {
            if a.len() != c.len() {
                return Err(dim_err("atom rows of A vs c", c.len(), a.len()));
            }
            for r in a {
                if r.len() != n {
                    return Err(dim_err("atom columns of A", n, r.len()));
                }
            }
            Ok(())
        };
        match self {
            FunctionAtom::Affine { a, c } => check_a(a, c),
            FunctionAtom::Quadratic { q, a, c } => {
                check_a(a, c)?;
                if q.len() != c.len() {
                    return Err(dim_err("atom Hessian count", c.len(), q.len()));
                }
                for m in q {
                    if m.len() != n || m.iter().any(|r| r.len() != n) {
                        return Err(dim_err("atom Hessian size", n, m.len()));
                    }
                    for i in 0..n {
                        for j in 0..i {
                            if m[i][j] != m[j][i] {
                                return Err(ModelError::Invalid(
                                    "quadratic atom has a non-symmetric Hessian".into(),
                                ));
                            }
                        }
                    }
                }
                Ok(())
            }
            FunctionAtom::Oracle(o) => {
                if o.input_dim() != n {
                    return Err(dim_err("oracle input", n, o.input_dim()));
                }
                Ok(())
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, FunctionAtom::Oracle(_))
    }

    pub fn is_affine(&self) -> bool {
        match self {
            FunctionAtom::Affine { .. } => true,
            FunctionAtom::Quadratic { q, .. } => q
                .iter()
                .all(|m| m.iter().all(|r| r.iter().all(Zero::is_zero))),
            FunctionAtom::Oracle(_) => false,
        }
    }

    fn capability() -> ModelError {
        ModelError::Capability("oracle atoms have no exact derivatives".into())
    }

    pub fn eval(&self, x: &[Rational]) -> Result<QVec, ModelError> {
        match self {
            FunctionAtom::Affine { a, c } => {
                Ok(mat_vec(a, x).iter().zip(c).map(|(p, q)| p + q).collect())
            }
            FunctionAtom::Quadratic { q, a, c } => Ok((0..c.len())
                .map(|r| bilinear(&q[r], x, x) / Rational::from_integer(2.into()) + dot(&a[r], x) + &c[r])
                .collect()),
            FunctionAtom::Oracle(_) => Err(Self::capability()),
        }
    }

    pub fn jacobian(&self, x: &[Rational]) -> Result<QMat, ModelError> {
        match self {
            FunctionAtom::Affine { a, .. } => Ok(a.clone()),
            FunctionAtom::Quadratic { q, a, .. } => Ok((0..a.len())
                .map(|r| {
                    mat_vec(&q[r], x)
                        .iter()
                        .zip(&a[r])
                        .map(|(p, s)| p + s)
                        .collect()
                })
                .collect()),
            FunctionAtom::Oracle(_) => Err(Self::capability()),
        }
    }

    /// `(uᵀ Q_r u)_r`; zero for affine atoms.
    pub fn second_derivative(&self, u: &[Rational]) -> Result<QVec, ModelError> {
        match self {
            FunctionAtom::Affine { c, .. } => Ok(zeros(c.len())),
            FunctionAtom::Quadratic { q, .. } => Ok(q.iter().map(|m| bilinear(m, u, u)).collect()),
            FunctionAtom::Oracle(_) => Err(Self::capability()),
        }
    }

    /// Hessians of the output rows.
    pub fn hessians(&self, n: usize) -> Result<Vec<QMat>, ModelError> {
        match self {
            FunctionAtom::Affine { c, .. } => Ok(vec![vec![zeros(n); n]; c.len()]),
            FunctionAtom::Quadratic { q, .. } => Ok(q.clone()),
            FunctionAtom::Oracle(_) => Err(Self::capability()),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FunctionAtom::Oracle(o) => o.eval(x),
            _ => {
                let (q, a, c) = self.f64_parts();
                (0..c.len())
                    .map(|r| {
                        let lin: f64 = a[r].iter().zip(x).map(|(p, s)| p * s).sum();
                        let quad = q
                            .as_ref()
                            .map(|q| 0.5 * quad_form(&q[r], x))
                            .unwrap_or(0.0);
                        quad + lin + c[r]
                    })
                    .collect()
            }
        }
    }

    pub fn jacobian_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        match self {
            FunctionAtom::Oracle(o) => o.jacobian(x),
            _ => {
                let (q, a, _) = self.f64_parts();
                (0..a.len())
                    .map(|r| {
                        let mut row = a[r].clone();
                        if let Some(q) = &q {
                            for (i, v) in row.iter_mut().enumerate() {
                                *v += q[r][i].iter().zip(x).map(|(p, s)| p * s).sum::<f64>();
                            }
                        }
                        row
                    })
                    .collect()
            }
        }
    }

    pub fn second_directional_f64(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        match self {
            FunctionAtom::Oracle(o) => o.second_directional(x, u),
            FunctionAtom::Affine { c, .. } => vec![0.0; c.len()],
            FunctionAtom::Quadratic { .. } => {
                let (q, _, _) = self.f64_parts();
                q.unwrap().iter().map(|m| quad_form(m, u)).collect()
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn f64_parts(&self) -> (Option<Vec<Vec<Vec<f64>>>>, Vec<Vec<f64>>, Vec<f64>) {
        let conv = |m: &QMat| m.iter().map(|r| vec_to_f64(r)).collect::<Vec<_>>();
        match self {
            FunctionAtom::Affine { a, c } => (None, conv(a), vec_to_f64(c)),
            FunctionAtom::Quadratic { q, a, c } => (
                Some(q.iter().map(conv).collect()),
                conv(a),
                vec_to_f64(c),
            ),
            FunctionAtom::Oracle(_) => unreachable!(),
        }
    }

    /// The single-output atom for row `r`.
    pub fn row(&self, r: usize) -> Result<FunctionAtom, ModelError> {
        match self {
            FunctionAtom::Affine { a, c } => Ok(FunctionAtom::Affine {
                a: vec![a[r].clone()],
                c: vec![c[r].clone()],
            }),
            FunctionAtom::Quadratic { q, a, c } => Ok(FunctionAtom::Quadratic {
                q: vec![q[r].clone()],
                a: vec![a[r].clone()],
                c: vec![c[r].clone()],
            }),
            FunctionAtom::Oracle(_) => Err(Self::capability()),
        }
    }
}

fn quad_form(m: &[Vec<f64>], x: &[f64]) -> f64 {
    m.iter()
        .zip(x)
        .map(|(row, xi)| xi * row.iter().zip(x).map(|(p, s)| p * s).sum::<f64>())
        .sum()
}

/// `P = (P_1, …, P_k)` stacked from atoms over a common input space `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapStack {
    n: usize,
    atoms: Vec<FunctionAtom>,
}

impl MapStack {
    pub fn new(n: usize, atoms: Vec<FunctionAtom>) -> Result<Self, ModelError> {
        for a in &atoms {
            a.validate(n)?;
        }
        Ok(MapStack { n, atoms })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.atoms.iter().map(FunctionAtom::output_dim).sum()
    }

    pub fn atoms(&self) -> &[FunctionAtom] {
        &self.atoms
    }

    pub fn is_exact(&self) -> bool {
        self.atoms.iter().all(FunctionAtom::is_exact)
    }

    pub fn is_affine(&self) -> bool {
        self.atoms.iter().all(FunctionAtom::is_affine)
    }

    fn check_x(&self, x: &[Rational]) -> Result<(), ModelError> {
        if x.len() != self.n {
            return Err(dim_err("point", self.n, x.len()));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Rational]) -> Result<QVec, ModelError> {
        self.check_x(x)?;
        let mut out = Vec::new();
        for a in &self.atoms {
            out.extend(a.eval(x)?);
        }
        Ok(out)
    }

    pub fn jacobian(&self, x: &[Rational]) -> Result<QMat, ModelError> {
        self.check_x(x)?;
        let mut out = Vec::new();
        for a in &self.atoms {
            out.extend(a.jacobian(x)?);
        }
        Ok(out)
    }

    /// `D²P(x̄)(u) = {l}` with `l_r = uᵀ Q_r u`.
    pub fn second_derivative(&self, u: &[Rational]) -> Result<QVec, ModelError> {
        self.check_x(u)?;
        let mut out = Vec::new();
        for a in &self.atoms {
            out.extend(a.second_derivative(u)?);
        }
        Ok(out)
    }

    pub fn hessians(&self) -> Result<Vec<QMat>, ModelError> {
        let mut out = Vec::new();
        for a in &self.atoms {
            out.extend(a.hessians(self.n)?);
        }
        Ok(out)
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.atoms.iter().flat_map(|a| a.eval_f64(x)).collect()
    }

    pub fn jacobian_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.atoms.iter().flat_map(|a| a.jacobian_f64(x)).collect()
    }

    pub fn second_directional_f64(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        self.atoms
            .iter()
            .flat_map(|a| a.second_directional_f64(x, u))
            .collect()
    }

    /// Single-output atom for global output row `r`.
    pub fn row(&self, mut r: usize) -> Result<FunctionAtom, ModelError> {
        for a in &self.atoms {
            let k = a.output_dim();
            if r < k {
                return a.row(r);
            }
            r -= k;
        }
        Err(ModelError::Invalid(format!("output row {r} out of range")))
    }
}

/// Output layout of a KKT system embedded in general form:
/// `(∇ₓL (p rows), h (n_eq rows), (−g_i, μ_i) pairs (m))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KktLayout {
    pub p: usize,
    pub n_eq: usize,
    pub m: usize,
}

/// `P(x) ∈ Λ` with a feasible anchor `x̄`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    map: MapStack,
    lambda: StructuredSet,
    anchor: QVec,
    anchor_point: SetPoint,
    kkt: Option<KktLayout>,
}

impl ProblemInstance {
    pub fn new(map: MapStack, lambda: StructuredSet, anchor: QVec) -> Result<Self, ModelError> {
        if map.output_dim() != lambda.dim() {
            return Err(dim_err("output of P vs Λ", lambda.dim(), map.output_dim()));
        }
        if anchor.len() != map.input_dim() {
            return Err(dim_err("anchor", map.input_dim(), anchor.len()));
        }
        let value = if map.is_exact() {
            map.eval(&anchor)?
        } else {
            let v = map.eval_f64(&vec_to_f64(&anchor));
            v.iter()
                .map(|x| from_f64(*x).ok_or_else(|| ModelError::InfeasibleAnchor("non-finite P(x̄)".into())))
                .collect::<Result<_, _>>()?
        };
        let anchor_point = lambda
            .point(&value)
            .map_err(|e| ModelError::InfeasibleAnchor(e.to_string()))?;
        Ok(ProblemInstance {
            map,
            lambda,
            anchor,
            anchor_point,
            kkt: None,
        })
    }

    pub(crate) fn with_kkt(mut self, layout: KktLayout) -> Self {
        self.kkt = Some(layout);
        self
    }

    pub fn map(&self) -> &MapStack {
        &self.map
    }

    pub fn lambda(&self) -> &StructuredSet {
        &self.lambda
    }

    pub fn anchor(&self) -> &[Rational] {
        &self.anchor
    }

    /// `P(x̄)` with its activity certificate.
    pub fn anchor_point(&self) -> &SetPoint {
        &self.anchor_point
    }

    pub fn kkt_layout(&self) -> Option<KktLayout> {
        self.kkt
    }

    pub fn n(&self) -> usize {
        self.map.input_dim()
    }

    pub fn m(&self) -> usize {
        self.lambda.dim()
    }

    pub fn require_exact(&self) -> Result<(), ModelError> {
        if self.map.is_exact() {
            Ok(())
        } else {
            Err(ModelError::Capability(
                "exact checks need affine or quadratic atoms".into(),
            ))
        }
    }

    pub fn jacobian(&self) -> Result<QMat, ModelError> {
        self.map.jacobian(&self.anchor)
    }

    pub fn second_derivative(&self, u: &[Rational]) -> Result<QVec, ModelError> {
        self.map.second_derivative(u)
    }

    /// Scales `P` and `Λ` by a positive rational, keeping the anchor.
    pub fn scaled(&self, s: &Rational) -> Result<Self, ModelError> {
        use crate::cones::{Factor, Polyhedron};
        let sc = |v: &QVec| v.iter().map(|x| x * s).collect::<QVec>();
        let atoms = self
            .map
            .atoms
            .iter()
            .map(|a| match a {
                FunctionAtom::Affine { a, c } => Ok(FunctionAtom::Affine {
                    a: a.iter().map(sc).collect(),
                    c: sc(c),
                }),
                FunctionAtom::Quadratic { q, a, c } => Ok(FunctionAtom::Quadratic {
                    q: q.iter().map(|m| m.iter().map(sc).collect()).collect(),
                    a: a.iter().map(sc).collect(),
                    c: sc(c),
                }),
                FunctionAtom::Oracle(_) => Err(FunctionAtom::capability()),
            })
            .collect::<Result<_, ModelError>>()?;
        let factors = self
            .lambda
            .factors()
            .iter()
            .map(|f| match f {
                Factor::PolyUnion { dim, pieces } => Factor::PolyUnion {
                    dim: *dim,
                    pieces: pieces
                        .iter()
                        .map(|p| Polyhedron::new(*dim, p.rows().to_vec(), sc(&p.rhs().to_vec())).unwrap())
                        .collect(),
                },
                other => other.clone(),
            })
            .collect();
        let lambda = StructuredSet::new(factors)?;
        ProblemInstance::new(MapStack::new(self.n(), atoms)?, lambda, self.anchor.clone())
    }
}

/// `L(x̄) = {u : ∇P(x̄)u ∈ T_Λ(P(x̄))}`, one stratum per tangent piece.
pub fn linearized_cone(inst: &ProblemInstance) -> Result<ConeUnion, ModelError> {
    inst.require_exact()?;
    let j = inst.jacobian()?;
    let t = tangent_cone(inst.lambda(), inst.anchor_point())?;
    let mut pieces = Vec::new();
    for p in t.pieces() {
        let cone = linear_preimage(&j, &p.cone, inst.n())?;
        pieces.push(Piece {
            cone,
            tag: p.tag.clone(),
            cell: None,
        });
    }
    Ok(ConeUnion::from_pieces(inst.n(), pieces)?)
}

#[cfg(test)]
mod tests;
