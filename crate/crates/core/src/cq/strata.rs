//! Direction strata: relatively open cones of `u` on which the directional
//! normal cone `N_Λ(P(x̄); ∇P(x̄)u)` is constant.

use num_traits::Signed;

use crate::cones::{directional_pieces, sensitive_rows, tangent_cone, CellSpec};
use crate::error::{CheckError, GeomError};
use crate::ratgeom::{arrangement_cells, HCone, VCone};
use crate::rational::{
    dot, is_zero_vec, lex_cmp, mat_vec, neg, primitive_unsigned, transpose, unit, DisplayVec,
    QMat, QVec,
};
use crate::system::{index_sets, CsInstance, ProblemInstance};

/// `Z = K ∩ ker ∇P(x̄)*` for one piece `K` of the directional normal cone.
#[derive(Clone, Debug)]
pub(crate) struct ZPiece {
    pub tag: String,
    pub cone: HCone,
    pub gens: VCone,
    /// Cell `C` of the local tangent cone with `N̂(w) ⊇ Z` for `w ∈ C`;
    /// `None` in the complementarity form, where `s^k` is not needed.
    pub cell: Option<CellSpec>,
}

#[derive(Clone, Debug)]
pub(crate) struct Stratum {
    pub tag: String,
    /// A relative-interior direction.
    pub u: QVec,
    /// Generators of the closure.
    pub closure: VCone,
    pub xi: QVec,
    /// Nontrivial pieces only.
    pub z: Vec<ZPiece>,
}

impl Stratum {
    pub fn violating(&self) -> bool {
        !self.z.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut s = format!(
            "stratum {}: u = {}, ξ = {}",
            self.tag,
            DisplayVec(&self.u),
            DisplayVec(&self.xi)
        );
        if self.z.is_empty() {
            s.push_str(", no nonzero multiplier");
        } else {
            for z in &self.z {
                s.push_str(&format!(", multipliers [{}] {:?}", z.tag, z.gens));
            }
        }
        s
    }
}

/// Rows `e_jᵀ∇P(x̄)`, i.e. the equations of `ker ∇P(x̄)*` in `ζ`-space.
pub(crate) fn kernel_rows(j: &QMat, n: usize) -> QMat {
    transpose(j, n)
}

fn nontrivial(cone: HCone, tag: String, cell: Option<CellSpec>) -> Option<ZPiece> {
    let gens = cone.generators();
    (!gens.is_trivial()).then_some(ZPiece {
        tag,
        cone,
        gens,
        cell,
    })
}

/// Cells of the arrangement of pulled-back sensitive rows, restricted to
/// the linearized cone.
pub(crate) fn general(
    inst: &ProblemInstance,
    j: &QMat,
    cap: usize,
) -> Result<Result<Vec<Stratum>, String>, CheckError> {
    let n = inst.n();
    let point = inst.anchor_point();
    let t = tangent_cone(inst.lambda(), point)?;
    let kern = kernel_rows(j, n);

    let mut hyper: QMat = Vec::new();
    for h in sensitive_rows(inst.lambda(), point) {
        let pulled = crate::rational::mat_t_vec(j, &h, n);
        if is_zero_vec(&pulled) {
            continue;
        }
        let p = primitive_unsigned(&pulled);
        if !hyper.contains(&p) {
            hyper.push(p);
        }
    }
    hyper.sort_by(|a, b| lex_cmp(a, b));

    let cells = match arrangement_cells(&HCone::full(n), &hyper, cap, |_| false) {
        Ok(c) => c,
        Err(GeomError::CapExceeded { cap }) => {
            return Ok(Err(format!("direction arrangement exceeds the cell cap {cap}")))
        }
        Err(e) => return Err(e.into()),
    };

    let mut out = Vec::new();
    for cell in cells {
        if cell.is_origin() {
            continue;
        }
        let u = if is_zero_vec(&cell.point) {
            cell.generators.lines()[0].clone()
        } else {
            cell.point.clone()
        };
        let xi = mat_vec(j, &u);
        if !t.contains(&xi) {
            continue;
        }
        let pieces = match directional_pieces(inst.lambda(), point, &xi, cap) {
            Ok(p) => p.expect("ξ is tangent"),
            Err(crate::error::ConeError::Geom(GeomError::CapExceeded { cap })) => {
                return Ok(Err(format!("normal-cone arrangement exceeds the cell cap {cap}")))
            }
            Err(e) => return Err(e.into()),
        };
        let z = pieces
            .into_iter()
            .filter_map(|p| {
                let cone = p.cone.with_rows(&[], &kern).ok()?;
                nontrivial(cone, p.tag.join(" × "), p.cell)
            })
            .collect();
        let tag: String = cell
            .signs
            .iter()
            .map(|s| match s {
                crate::ratgeom::Sign::Neg => '-',
                crate::ratgeom::Sign::Zero => '0',
                crate::ratgeom::Sign::Pos => '+',
            })
            .collect();
        out.push(Stratum {
            tag: format!("cell[{tag}]"),
            u,
            closure: cell.generators,
            xi,
            z,
        });
    }
    Ok(Ok(out))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    /// `∇Φ_i u = 0 = ∇Ψ_i u`.
    Both,
    /// `∇Φ_i u = 0 < ∇Ψ_i u`.
    ZeroPos,
    /// `∇Φ_i u > 0 = ∇Ψ_i u`.
    PosZero,
}

fn fmt_set(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Strata of the complementarity form: one per partition of `I_00` into
/// `(I_00(u), I_0+(u), I_+0(u))`. Multipliers are written in the embedded
/// coordinates `ζ = (η, −γ₁, −ν₁, …, −γ_m, −ν_m)`.
pub(crate) fn complementarity(
    cs: &CsInstance,
    cap: usize,
) -> Result<Result<Vec<Stratum>, String>, CheckError> {
    let n = cs.n();
    let (d, m) = (cs.d(), cs.m());
    let dim = d + 2 * m;
    let sets = index_sets(cs, None)?;
    if sets.i00.len() > cap {
        return Ok(Err(format!(
            "|I_00| = {} exceeds the cap {cap}",
            sets.i00.len()
        )));
    }
    let (jh, jphi, jpsi) = cs.jacobians()?;
    let mut j: QMat = jh.clone();
    for i in 0..m {
        j.push(jphi[i].clone());
        j.push(jpsi[i].clone());
    }
    let kern = kernel_rows(&j, n);
    let phi_col = |i: usize| d + 2 * i;
    let psi_col = |i: usize| d + 2 * i + 1;

    let mut base_eq: QMat = jh.clone();
    base_eq.extend(sets.i0p.iter().map(|&i| jphi[i].clone()));
    base_eq.extend(sets.ip0.iter().map(|&i| jpsi[i].clone()));

    let k = sets.i00.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(k as u32) {
        let mut parts = Vec::with_capacity(k);
        let mut c = code;
        for _ in 0..k {
            parts.push(match c % 3 {
                0 => Part::Both,
                1 => Part::ZeroPos,
                _ => Part::PosZero,
            });
            c /= 3;
        }
        let mut eq = base_eq.clone();
        let mut strict: QMat = Vec::new();
        for (&i, part) in sets.i00.iter().zip(&parts) {
            match part {
                Part::Both => {
                    eq.push(jphi[i].clone());
                    eq.push(jpsi[i].clone());
                }
                Part::ZeroPos => {
                    eq.push(jphi[i].clone());
                    strict.push(neg(&jpsi[i]));
                }
                Part::PosZero => {
                    eq.push(jpsi[i].clone());
                    strict.push(neg(&jphi[i]));
                }
            }
        }
        let closure = HCone::new(n, strict.clone(), eq)?;
        let gens = closure.generators();
        if gens.is_trivial() {
            continue;
        }
        let p = gens.relint_point()?;
        if strict.iter().any(|a| !dot(a, &p).is_negative()) || is_zero_vec(&p) {
            continue;
        }
        let xi = mat_vec(&j, &p);

        let pick = |want: Part| -> Vec<usize> {
            sets.i00
                .iter()
                .zip(&parts)
                .filter(|(_, p)| **p == want)
                .map(|(&i, _)| i)
                .collect()
        };
        let (b00, b0p, bp0) = (pick(Part::Both), pick(Part::ZeroPos), pick(Part::PosZero));

        // Def (ii): γ_i = 0 on I_+0 ∪ I_+0(u), ν_i = 0 on I_0+ ∪ I_0+(u).
        let mut zeq: QMat = kern.clone();
        for &i in sets.ip0.iter().chain(&bp0) {
            zeq.push(unit(dim, phi_col(i)));
        }
        for &i in sets.i0p.iter().chain(&b0p) {
            zeq.push(unit(dim, psi_col(i)));
        }
        let mut z = Vec::new();
        for bcode in 0..3usize.pow(b00.len() as u32) {
            let mut eq = zeq.clone();
            let mut ineq: QMat = Vec::new();
            let mut labels = Vec::new();
            let mut c = bcode;
            for &i in &b00 {
                match c % 3 {
                    0 => {
                        eq.push(unit(dim, phi_col(i)));
                        labels.push(format!("gamma{}=0", i + 1));
                    }
                    1 => {
                        eq.push(unit(dim, psi_col(i)));
                        labels.push(format!("nu{}=0", i + 1));
                    }
                    _ => {
                        ineq.push(unit(dim, phi_col(i)));
                        ineq.push(unit(dim, psi_col(i)));
                        labels.push(format!("gamma{0}>=0,nu{0}>=0", i + 1));
                    }
                }
                c /= 3;
            }
            let cone = HCone::new(dim, ineq, eq)?;
            let tag = if labels.is_empty() {
                "fixed".to_string()
            } else {
                labels.join(" ")
            };
            if let Some(zp) = nontrivial(cone, tag, None) {
                z.push(zp);
            }
        }
        out.push(Stratum {
            tag: format!(
                "I00(u)={} I0+(u)={} I+0(u)={}",
                fmt_set(&b00),
                fmt_set(&b0p),
                fmt_set(&bp0)
            ),
            u: p,
            closure: gens,
            xi,
            z,
        });
    }
    Ok(Ok(out))
}
