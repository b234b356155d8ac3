//! Constraint-qualification checkers with three-valued verdicts.
//!
//! `HOLDS` is only reported through a sufficient-condition route, `FAILS`
//! only with a witness that re-verifies exactly, and `UNKNOWN` otherwise.

mod cert;
mod engine;
mod second;
mod strata;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::CheckError;
use crate::rational::{qserde, QVec, Rational};
use crate::system::schema::CheckKind;
use crate::system::{cs_to_general, kkt_to_cs, CsInstance, KktInstance, ProblemInstance};
use crate::verify::SamplingConfig;

pub use witness::{verify_cs_witness, verify_witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Unknown => "UNKNOWN",
        })
    }
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Every stratum was decided exactly.
    Exhaustive,
    /// The linearized cone is `{0}`.
    VacuousLinearizedCone,
    /// FOSCMS holds.
    Foscms,
    /// `P` affine and `Λ` a union of polyhedra.
    AffinePolyhedral,
    /// SOSCMS holds.
    Soscms,
    /// Pseudo-normality holds and implies quasi-normality.
    ViaPseudo,
    /// A counterexample to the condition itself.
    Counterexample,
    /// An exact sequence certificate.
    Certificate,
    /// A numerically found sequence, re-verified exactly.
    Falsifier,
    /// Nothing applied.
    Unresolved,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Exhaustive => "exhaustive exact stratum test",
            Route::VacuousLinearizedCone => "vacuous linearized cone (strong metric subregularity)",
            Route::Foscms => "R1: FOSCMS holds",
            Route::AffinePolyhedral => "R2: affine map, polyhedral set",
            Route::Soscms => "R3: SOSCMS holds",
            Route::ViaPseudo => "directional pseudo-normality holds",
            Route::Counterexample => "exact counterexample",
            Route::Certificate => "R4: exact sequence certificate",
            Route::Falsifier => "R4: sequence falsifier (re-verified exactly)",
            Route::Unresolved => "R5: unresolved",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Quasi,
    Pseudo,
}

impl Mode {
    pub fn kind(self) -> CheckKind {
        match self {
            Mode::Quasi => CheckKind::DirQuasi,
            Mode::Pseudo => CheckKind::DirPseudo,
        }
    }
}

/// One term `(t_k, u^k, s^k, ζ^k)` of a sequence prefix. The complementarity
/// form has no `s^k`, `ζ^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceTerm {
    #[serde(with = "qserde::scalar")]
    pub t: Rational,
    #[serde(with = "qserde::vec")]
    pub u: QVec,
    #[serde(with = "qserde::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<QVec>,
    #[serde(with = "qserde::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<QVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Direction; absent for NNAMCQ.
    #[serde(with = "qserde::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<QVec>,
    /// Multiplier. In the complementarity form this is `(η, −γ₁, −ν₁, …)`.
    #[serde(with = "qserde::vec")]
    pub zeta: QVec,
    pub stratum: String,
    /// `D²P(x̄)(u)` for second-order witnesses.
    #[serde(with = "qserde::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<QVec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sequence: Vec<SequenceTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub condition: CheckKind,
    pub status: Status,
    pub route: Route,
    /// Further routes that certify the same `HOLDS`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub also: Vec<Route>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl Verdict {
    pub(crate) fn new(condition: CheckKind, status: Status, route: Route) -> Self {
        Verdict {
            condition,
            status,
            route,
            also: Vec::new(),
            witness: None,
            reason: None,
            diagnostics: Vec::new(),
        }
    }

    pub(crate) fn holds(condition: CheckKind, route: Route) -> Self {
        Verdict::new(condition, Status::Holds, route)
    }

    pub(crate) fn fails(condition: CheckKind, route: Route, w: Witness) -> Self {
        let mut v = Verdict::new(condition, Status::Fails, route);
        v.witness = Some(w);
        v
    }

    pub(crate) fn unknown(condition: CheckKind, reason: impl Into<String>) -> Self {
        let mut v = Verdict::new(condition, Status::Unknown, Route::Unresolved);
        v.reason = Some(reason.into());
        v
    }

    /// `HOLDS` via the first of `routes`, recording the rest.
    pub(crate) fn holds_via(condition: CheckKind, routes: &[Route]) -> Self {
        let mut v = Verdict::holds(condition, routes[0]);
        v.also = routes[1..].to_vec();
        v
    }

    pub(crate) fn with_diagnostics(mut self, d: Vec<String>) -> Self {
        self.diagnostics = d;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Cap on arrangement cells per enumeration.
    pub cell_cap: usize,
    /// Cap on `|I_00|` in the complementarity form.
    pub i00_cap: usize,
    /// Number of verified terms in a sequence certificate.
    pub prefix_len: usize,
    /// Largest starting exponent `k0` tried for `t_k = 2^{-k}`.
    pub max_start: usize,
    /// Run the numeric falsifier when exact certificates are not found.
    pub use_falsifier: bool,
    pub sampling: SamplingConfig,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            cell_cap: crate::ratgeom::DEFAULT_FACE_CAP,
            i00_cap: 8,
            prefix_len: 6,
            max_start: 40,
            use_falsifier: true,
            sampling: SamplingConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub subregular: bool,
    pub text: String,
    /// The conditions whose `HOLDS` verdict supports the conclusion.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub via: Vec<CheckKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub verdicts: Vec<Verdict>,
    pub conclusion: Conclusion,
}

impl Report {
    pub fn get(&self, kind: CheckKind) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.condition == kind)
    }

    pub fn status(&self, kind: CheckKind) -> Option<Status> {
        self.get(kind).map(|v| v.status)
    }
}

pub fn check_nnamcq(inst: &ProblemInstance) -> Result<Verdict, CheckError> {
    engine::nnamcq(inst)
}

pub fn check_foscms(inst: &ProblemInstance, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    let a = engine::Analysis::general(inst, cfg)?;
    Ok(a.foscms())
}

pub fn check_soscms(inst: &ProblemInstance, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    let a = engine::Analysis::general(inst, cfg)?;
    Ok(a.soscms())
}

pub fn check_dir_pseudo(inst: &ProblemInstance, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    if let Some(v) = engine::non_exact(inst, CheckKind::DirPseudo) {
        return Ok(v);
    }
    let a = engine::Analysis::general(inst, cfg)?;
    let (f, s) = (a.foscms(), a.soscms());
    Ok(a.pseudo(&f, &s))
}

pub fn check_dir_quasi(inst: &ProblemInstance, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    if let Some(v) = engine::non_exact(inst, CheckKind::DirQuasi) {
        return Ok(v);
    }
    let a = engine::Analysis::general(inst, cfg)?;
    let (f, s) = (a.foscms(), a.soscms());
    let p = a.pseudo(&f, &s);
    Ok(a.quasi(&p))
}

/// Directional quasi-/pseudo-normality in complementarity form, with strata
/// given by the partitions of `I_00` and multipliers `(η, γ, ν)`.
pub fn check_cs_directional(
    cs: &CsInstance,
    mode: Mode,
    cfg: &CheckConfig,
) -> Result<Verdict, CheckError> {
    let a = match engine::Analysis::cs(cs, cfg)? {
        Ok(a) => a,
        Err(v) => return Ok(Verdict::unknown(mode.kind(), v)),
    };
    let (f, s) = (a.foscms(), a.soscms());
    let p = a.pseudo(&f, &s);
    Ok(match mode {
        Mode::Pseudo => p,
        Mode::Quasi => a.quasi(&p),
    })
}

/// KKT systems go through their complementarity form.
pub fn check_kkt_directional(
    k: &KktInstance,
    mode: Mode,
    cfg: &CheckConfig,
) -> Result<Verdict, CheckError> {
    check_cs_directional(&kkt_to_cs(k)?, mode, cfg)
}

/// Runs every checker and the implication-chain consistency test.
pub fn report_chain(inst: &ProblemInstance, cfg: &CheckConfig) -> Result<Report, CheckError> {
    let verdicts = if inst.map().is_exact() {
        let a = engine::Analysis::general(inst, cfg)?;
        let n = engine::nnamcq(inst)?;
        let f = a.foscms();
        let s = a.soscms();
        let p = a.pseudo(&f, &s);
        let q = a.quasi(&p);
        vec![n, f, s, p, q]
    } else {
        CheckKind::ALL
            .iter()
            .map(|&k| engine::non_exact(inst, k).expect("non-exact map"))
            .collect()
    };
    chain_consistency(&verdicts)?;
    Ok(conclude(verdicts))
}

/// Like [`report_chain`] on the embedding, with the directional conditions
/// decided in complementarity form.
pub fn report_cs(cs: &CsInstance, cfg: &CheckConfig) -> Result<Report, CheckError> {
    let general = cs_to_general(cs)?;
    let mut verdicts = report_chain(&general, cfg)?.verdicts;
    for v in verdicts.iter_mut() {
        if v.condition == CheckKind::DirPseudo {
            *v = check_cs_directional(cs, Mode::Pseudo, cfg)?;
        } else if v.condition == CheckKind::DirQuasi {
            *v = check_cs_directional(cs, Mode::Quasi, cfg)?;
        }
    }
    chain_consistency(&verdicts)?;
    Ok(conclude(verdicts))
}

fn conclude(verdicts: Vec<Verdict>) -> Report {
    let via: Vec<CheckKind> = verdicts
        .iter()
        .filter(|v| v.status == Status::Holds && v.condition != CheckKind::Soscms)
        .map(|v| v.condition)
        .collect();
    let conclusion = if via.is_empty() {
        Conclusion {
            subregular: false,
            text: "no sufficient condition verified".into(),
            via,
        }
    } else {
        Conclusion {
            subregular: true,
            text: "metrically subregular at (x̄, 0)".into(),
            via,
        }
    };
    Report {
        verdicts,
        conclusion,
    }
}

/// Chains stated for the conditions: NNAMCQ ⇒ FOSCMS ⇒ {pseudo, quasi},
/// SOSCMS ⇒ pseudo ⇒ quasi.
pub fn chain_consistency(verdicts: &[Verdict]) -> Result<(), CheckError> {
    let st = |k: CheckKind| verdicts.iter().find(|v| v.condition == k).map(|v| v.status);
    let implies = |a: CheckKind, b: CheckKind| -> Result<(), CheckError> {
        if st(a) == Some(Status::Holds) && st(b) == Some(Status::Fails) {
            return Err(CheckError::Inconsistent(format!(
                "{} holds but {} fails",
                a.name(),
                b.name()
            )));
        }
        Ok(())
    };
    implies(CheckKind::Nnamcq, CheckKind::Foscms)?;
    implies(CheckKind::Foscms, CheckKind::DirPseudo)?;
    implies(CheckKind::Foscms, CheckKind::DirQuasi)?;
    implies(CheckKind::Soscms, CheckKind::DirPseudo)?;
    implies(CheckKind::DirPseudo, CheckKind::DirQuasi)?;
    Ok(())
}
