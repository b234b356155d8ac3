use std::cell::OnceCell;

use super::cert::Certifier;
use super::second::{self, Outcome};
use super::strata::{self, Stratum};
use super::witness::{verify_cs_witness, verify_witness};
use super::{CheckConfig, Mode, Route, Status, Verdict, Witness};
use crate::cones::limiting_pieces;
use crate::error::CheckError;
use crate::rational::QMat;
use crate::system::schema::CheckKind;
use crate::system::{cs_to_general, CsInstance, ProblemInstance};

const SOSCMS_NOTE: &str = "SOSCMS is tested in the strict form ⟨ζ, l⟩ > 0; \
the non-strict variant ⟨ζ, P''(x̄; u)⟩ ≥ 0 is not used";

/// Verdicts for maps given only through oracles.
pub(crate) fn non_exact(inst: &ProblemInstance, kind: CheckKind) -> Option<Verdict> {
    (!inst.map().is_exact()).then(|| {
        Verdict::unknown(
            kind,
            "exact routes need affine or quadratic atoms; use `verify` for numeric evidence",
        )
    })
}

pub(crate) fn nnamcq(inst: &ProblemInstance) -> Result<Verdict, CheckError> {
    inst.require_exact()?;
    let j = inst.jacobian()?;
    let kern = strata::kernel_rows(&j, inst.n());
    let pieces = limiting_pieces(inst.lambda(), inst.anchor_point(), usize::MAX)?;
    let mut diag = Vec::new();
    for p in &pieces {
        let z = p.cone.with_rows(&[], &kern)?.generators();
        let tag = p.tag.join(" × ");
        diag.push(format!("piece [{tag}]: {z:?}"));
        if let Some(zeta) = z.some_nonzero() {
            let w = Witness {
                u: None,
                zeta,
                stratum: tag,
                l: None,
                sequence: Vec::new(),
            };
            return Ok(checked(inst, None, CheckKind::Nnamcq, Route::Counterexample, w).with_diagnostics(diag));
        }
    }
    Ok(Verdict::holds(CheckKind::Nnamcq, Route::Exhaustive).with_diagnostics(diag))
}

/// Builds a `FAILS` verdict after exact re-verification; a witness that does
/// not re-verify is reported as `UNKNOWN`.
fn checked(
    inst: &ProblemInstance,
    cs: Option<&CsInstance>,
    kind: CheckKind,
    route: Route,
    w: Witness,
) -> Verdict {
    let res = match (cs, kind) {
        (Some(cs), CheckKind::DirPseudo) => verify_cs_witness(cs, Mode::Pseudo, &w),
        (Some(cs), CheckKind::DirQuasi) => verify_cs_witness(cs, Mode::Quasi, &w),
        _ => verify_witness(inst, kind, &w),
    };
    match res {
        Ok(()) => Verdict::fails(kind, route, w),
        Err(e) => Verdict::unknown(kind, format!("internal: witness failed re-verification ({e})")),
    }
}

/// Result of the second-order pass, shared by SOSCMS and pseudo-normality.
struct Second {
    verdict: Verdict,
    /// `(stratum, piece, u, ζ)` with `⟨ζ, D²P(x̄)(u)⟩ > 0`.
    positive: Vec<(usize, usize, crate::QVec, crate::QVec)>,
}

pub(crate) struct Analysis<'a> {
    inst: ProblemInstance,
    cs: Option<&'a CsInstance>,
    cfg: &'a CheckConfig,
    j: QMat,
    hess: Vec<QMat>,
    strata: Result<Vec<Stratum>, String>,
    second: OnceCell<Second>,
}

impl<'a> Analysis<'a> {
    pub fn general(inst: &ProblemInstance, cfg: &'a CheckConfig) -> Result<Self, CheckError> {
        inst.require_exact()?;
        let j = inst.jacobian()?;
        let hess = inst.map().hessians()?;
        let strata = strata::general(inst, &j, cfg.cell_cap)?;
        Ok(Analysis {
            inst: inst.clone(),
            cs: None,
            cfg,
            j,
            hess,
            strata,
            second: OnceCell::new(),
        })
    }

    /// `Err` carries the reason for an `UNKNOWN` verdict (index-set cap).
    pub fn cs(cs: &'a CsInstance, cfg: &'a CheckConfig) -> Result<Result<Self, String>, CheckError> {
        if !cs.is_exact() {
            return Ok(Err("exact routes need affine or quadratic atoms".into()));
        }
        let inst = cs_to_general(cs)?;
        let j = inst.jacobian()?;
        let hess = inst.map().hessians()?;
        let strata = match strata::complementarity(cs, cfg.i00_cap)? {
            Ok(s) => Ok(s),
            Err(reason) => return Ok(Err(reason)),
        };
        Ok(Ok(Analysis {
            inst,
            cs: Some(cs),
            cfg,
            j,
            hess,
            strata,
            second: OnceCell::new(),
        }))
    }

    fn certifier(&self) -> Certifier<'_> {
        Certifier {
            inst: &self.inst,
            cs: self.cs,
            j: &self.j,
            cfg: self.cfg,
        }
    }

    fn diagnostics(&self) -> Vec<String> {
        match &self.strata {
            Ok(s) => s.iter().map(Stratum::describe).collect(),
            Err(e) => vec![e.clone()],
        }
    }

    pub fn foscms(&self) -> Verdict {
        let kind = CheckKind::Foscms;
        let strata = match &self.strata {
            Ok(s) => s,
            Err(e) => return Verdict::unknown(kind, e.clone()),
        };
        let diag = self.diagnostics();
        if strata.is_empty() {
            return Verdict::holds(kind, Route::VacuousLinearizedCone).with_diagnostics(diag);
        }
        if let Some(s) = strata.iter().find(|s| s.violating()) {
            let z = &s.z[0];
            let w = Witness {
                u: Some(s.u.clone()),
                zeta: z.gens.some_nonzero().expect("nontrivial"),
                stratum: format!("{} / {}", s.tag, z.tag),
                l: None,
                sequence: Vec::new(),
            };
            return checked(&self.inst, None, kind, Route::Counterexample, w).with_diagnostics(diag);
        }
        Verdict::holds(kind, Route::Exhaustive).with_diagnostics(diag)
    }

    fn second(&self) -> &Second {
        self.second.get_or_init(|| self.compute_second())
    }

    fn compute_second(&self) -> Second {
        let kind = CheckKind::Soscms;
        let strata = match &self.strata {
            Ok(s) => s,
            Err(e) => {
                return Second {
                    verdict: Verdict::unknown(kind, e.clone()),
                    positive: Vec::new(),
                }
            }
        };
        let n = self.inst.n();
        let mut diag = vec![SOSCMS_NOTE.to_string()];
        let mut positive = Vec::new();
        let mut undecided = Vec::new();
        for (si, s) in strata.iter().enumerate() {
            for (zi, z) in s.z.iter().enumerate() {
                let label = format!("{} / {}", s.tag, z.tag);
                match second::decide(s, z, &self.hess, n) {
                    Outcome::Pass => diag.push(format!("{label}: ⟨ζ, l⟩ ≤ 0 on the stratum")),
                    Outcome::Fail(found) => {
                        diag.push(format!("{label}: ⟨ζ, l⟩ > 0 found"));
                        positive.extend(found.into_iter().map(|(u, g)| (si, zi, u, g)));
                    }
                    Outcome::Undecided => {
                        diag.push(format!("{label}: undecided on relint samples"));
                        undecided.push(label);
                    }
                }
            }
        }
        let verdict = if let Some((si, zi, u, g)) = positive.first() {
            let l = self.inst.second_derivative(u).expect("exact map");
            let w = Witness {
                u: Some(u.clone()),
                zeta: g.clone(),
                stratum: format!("{} / {}", strata[*si].tag, strata[*si].z[*zi].tag),
                l: Some(l),
                sequence: Vec::new(),
            };
            checked(&self.inst, None, kind, Route::Counterexample, w)
        } else if !undecided.is_empty() {
            Verdict::unknown(
                kind,
                format!(
                    "strata of dimension ≥ 2 passed every relint sample but are not certified: {}",
                    undecided.join("; ")
                ),
            )
        } else if strata.is_empty() {
            Verdict::holds(kind, Route::VacuousLinearizedCone)
        } else {
            Verdict::holds(kind, Route::Exhaustive)
        };
        Second {
            verdict: verdict.with_diagnostics(diag),
            positive,
        }
    }

    pub fn soscms(&self) -> Verdict {
        self.second().verdict.clone()
    }

    fn sequence_witness(&self, kind: CheckKind, route: Route, w: Witness) -> Option<Verdict> {
        let v = checked(&self.inst, self.cs, kind, route, w);
        (v.status == Status::Fails).then_some(v)
    }

    /// Exact quasi certificates over every violating stratum, its relint
    /// samples and the sign cells of its multiplier pieces.
    fn quasi_certificates(&self, mode: Mode) -> Option<Verdict> {
        let strata = self.strata.as_ref().ok()?;
        let cert = self.certifier();
        let n = self.inst.n();
        for s in strata.iter().filter(|s| s.violating()) {
            for u in second::samples(&s.u, &s.closure) {
                for z in &s.z {
                    if second::max_sign(&z.gens, &self.hess, &u, n) != std::cmp::Ordering::Greater {
                        continue;
                    }
                    if let Some((zeta, seq)) = cert.quasi(&u, z, mode) {
                        let w = Witness {
                            u: Some(u.clone()),
                            zeta,
                            stratum: format!("{} / {}", s.tag, z.tag),
                            l: self.inst.second_derivative(&u).ok(),
                            sequence: seq,
                        };
                        if let Some(v) = self.sequence_witness(mode.kind(), Route::Certificate, w) {
                            return Some(v);
                        }
                    }
                }
            }
        }
        None
    }

    /// Numeric search, re-verified exactly. The complementarity form runs it
    /// on its embedding and drops `s^k`, `ζ^k`.
    fn falsify(&self, mode: Mode) -> Option<Verdict> {
        if !self.cfg.use_falsifier {
            return None;
        }
        let strata = self.strata.as_ref().ok()?;
        let n = self.inst.n();
        for s in strata.iter().filter(|s| s.violating()) {
            for u in second::samples(&s.u, &s.closure) {
                for z in &s.z {
                    if second::max_sign(&z.gens, &self.hess, &u, n) == std::cmp::Ordering::Less {
                        continue;
                    }
                    for g in second::signed_generators(&z.gens) {
                        let found = crate::verify::sequence_falsifier(
                            &self.inst,
                            &u,
                            &g,
                            mode,
                            &self.cfg.sampling,
                        );
                        let Ok(Some(mut w)) = found else { continue };
                        w.stratum = format!("{} / {}", s.tag, z.tag);
                        if self.cs.is_some() {
                            for t in &mut w.sequence {
                                t.s = None;
                                t.zeta = None;
                            }
                        }
                        if let Some(v) = self.sequence_witness(mode.kind(), Route::Falsifier, w) {
                            return Some(v);
                        }
                    }
                }
            }
        }
        None
    }

    fn unresolved(&self, kind: CheckKind) -> Verdict {
        let open: Vec<String> = match &self.strata {
            Ok(s) => s.iter().filter(|s| s.violating()).map(|s| s.tag.clone()).collect(),
            Err(e) => vec![e.clone()],
        };
        Verdict::unknown(
            kind,
            format!(
                "no route applied; no certificate or falsifier witness for strata: {}",
                open.join("; ")
            ),
        )
    }

    pub fn pseudo(&self, foscms: &Verdict, soscms: &Verdict) -> Verdict {
        let kind = CheckKind::DirPseudo;
        let mut routes = Vec::new();
        if foscms.status == Status::Holds && foscms.route == Route::VacuousLinearizedCone {
            routes.push(Route::VacuousLinearizedCone);
        }
        if self.inst.map().is_affine() && self.inst.lambda().is_polyhedral() {
            routes.push(Route::AffinePolyhedral);
        }
        if foscms.status == Status::Holds && foscms.route != Route::VacuousLinearizedCone {
            routes.push(Route::Foscms);
        }
        if soscms.status == Status::Holds {
            routes.push(Route::Soscms);
        }
        if !routes.is_empty() {
            return Verdict::holds_via(kind, &routes);
        }
        let strata = match &self.strata {
            Ok(s) => s,
            Err(e) => return Verdict::unknown(kind, e.clone()),
        };
        let cert = self.certifier();
        for (si, zi, u, g) in &self.second().positive {
            let (s, z) = (&strata[*si], &strata[*si].z[*zi]);
            if let Some(seq) = cert.pseudo(u, g, z) {
                let w = Witness {
                    u: Some(u.clone()),
                    zeta: g.clone(),
                    stratum: format!("{} / {}", s.tag, z.tag),
                    l: self.inst.second_derivative(u).ok(),
                    sequence: seq,
                };
                if let Some(v) = self.sequence_witness(kind, Route::Certificate, w) {
                    return v;
                }
            }
        }
        if let Some(v) = self.quasi_certificates(Mode::Pseudo) {
            return v;
        }
        if let Some(v) = self.falsify(Mode::Pseudo) {
            return v;
        }
        self.unresolved(kind)
    }

    pub fn quasi(&self, pseudo: &Verdict) -> Verdict {
        let kind = CheckKind::DirQuasi;
        if pseudo.status == Status::Holds {
            let mut routes: Vec<Route> = Vec::new();
            for &r in std::iter::once(&pseudo.route).chain(&pseudo.also) {
                let r = match r {
                    Route::AffinePolyhedral | Route::Foscms | Route::VacuousLinearizedCone => r,
                    _ => Route::ViaPseudo,
                };
                if !routes.contains(&r) {
                    routes.push(r);
                }
            }
            return Verdict::holds_via(kind, &routes);
        }
        if let Some(v) = self.quasi_certificates(Mode::Quasi) {
            return v;
        }
        if let Some(v) = self.falsify(Mode::Quasi) {
            return v;
        }
        self.unresolved(kind)
    }
}
