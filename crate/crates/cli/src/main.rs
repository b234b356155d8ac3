mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use subreg_core::cones::{
    directional_normal_cone, limiting_normal_cone, regular_normal_cone, tangent_cone,
};
use subreg_core::cq::{chain_consistency, report_chain, report_cs};
use subreg_core::rational::{parse_rational, QVec};
use subreg_core::system::kkt_to_cs;
use subreg_core::verify::{empirical_modulus, sequence_falsifier};
use subreg_core::{
    verify_witness, CheckConfig, CheckError, CheckKind, Mode, Problem, ProblemFile, Report,
    SamplingConfig, Status,
};

const EXIT_HOLDS: u8 = 0;
const EXIT_FAILS: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "subreg", version, about = "Constraint qualifications and metric subregularity for P(x) ∈ Λ")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Problem file (JSON, schema 1).
    file: PathBuf,
    /// Print the machine-readable report instead of the text summary.
    #[arg(long)]
    json: bool,
    /// Seed for sampling and the falsifier.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long)]
    jobs: Option<usize>,
    /// Cap on arrangement cells per enumeration.
    #[arg(long)]
    face_cap: Option<usize>,
    /// Cap on biactive indices in complementarity form.
    #[arg(long)]
    i00_cap: Option<usize>,
    /// Print the parsed problem in canonical form and exit.
    #[arg(long)]
    dump_normalized: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Constraint-qualification verdicts and the implication-chain report.
    Check {
        #[command(flatten)]
        common: Common,
        /// Exit status follows the subregularity conclusion instead of the
        /// requested checks.
        #[arg(long)]
        conclude: bool,
    },
    /// Tangent and normal cones of Λ at a point.
    Cones {
        #[command(flatten)]
        common: Common,
        /// Point of Λ (default P(x̄)), e.g. `0,1/2`.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Direction for the directional limiting normal cone.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
    },
    /// Empirical subregularity modulus.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Numeric search for a sequence witness at a given (u, ζ).
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        #[arg(long, allow_hyphen_values = true)]
        zeta: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Quasi,
    Pseudo,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Quasi => Mode::Quasi,
            ModeArg::Pseudo => Mode::Pseudo,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Inconsistent(_) => Failure::Internal(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn parse_vec(s: &str, what: &str) -> Result<QVec, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| parse_rational(t.trim()).map_err(|e| Failure::Input(format!("--{what}: {e}"))))
        .collect()
}

struct Loaded {
    file: ProblemFile,
    problem: Problem,
}

fn load(c: &Common) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(&c.file)
        .map_err(|e| Failure::Input(format!("{}: {e}", c.file.display())))?;
    let file = ProblemFile::parse(&text).map_err(input)?;
    let problem = file.build().map_err(input)?;
    Ok(Loaded { file, problem })
}

fn sampling(c: &Common, file: &ProblemFile) -> Result<SamplingConfig, Failure> {
    let mut s = SamplingConfig::default().with_spec(&file.sampling());
    if let Some(seed) = c.seed {
        s.seed = seed;
    }
    s.validate().map_err(input)?;
    Ok(s)
}

fn config(c: &Common, file: &ProblemFile) -> Result<CheckConfig, Failure> {
    let mut cfg = CheckConfig {
        sampling: sampling(c, file)?,
        ..CheckConfig::default()
    };
    if let Some(f) = c.face_cap {
        cfg.cell_cap = f;
    }
    if let Some(i) = c.i00_cap {
        cfg.i00_cap = i;
    }
    Ok(cfg)
}

/// A closed pipe (`| head`) is not an error.
fn write_out(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(c: &Common, value: serde_json::Value, text: String) {
    if c.json {
        write_out(&(serde_json::to_string_pretty(&value).expect("json") + "\n"));
    } else {
        write_out(&text);
    }
}

fn status_exit(statuses: impl IntoIterator<Item = Status>) -> u8 {
    let all: Vec<Status> = statuses.into_iter().collect();
    if all.contains(&Status::Fails) {
        EXIT_FAILS
    } else if all.contains(&Status::Unknown) {
        EXIT_UNKNOWN
    } else {
        EXIT_HOLDS
    }
}

fn run_check(c: &Common, conclude: bool) -> Result<u8, Failure> {
    let l = load(c)?;
    let cfg = config(c, &l.file)?;
    let report: Report = match &l.problem {
        Problem::General(p) => report_chain(p, &cfg)?,
        Problem::Cs(cs) => report_cs(cs, &cfg)?,
        Problem::Kkt(k) => report_cs(&kkt_to_cs(k).map_err(input)?, &cfg)?,
    };
    chain_consistency(&report.verdicts)?;
    let requested = l.file.checks();
    let code = if conclude {
        if report.conclusion.subregular {
            EXIT_HOLDS
        } else {
            let sufficient = report
                .verdicts
                .iter()
                .filter(|v| v.condition != CheckKind::Soscms)
                .map(|v| v.status);
            status_exit(sufficient)
        }
    } else {
        status_exit(requested.iter().filter_map(|k| report.status(*k)))
    };
    let value = json!({
        "command": "check",
        "requested": requested,
        "report": report,
        "exit_code": code,
    });
    emit(c, value, render::report(&report, &requested));
    Ok(code)
}

fn run_cones(c: &Common, point: Option<&str>, direction: Option<&str>) -> Result<u8, Failure> {
    let l = load(c)?;
    let inst = l.problem.to_general().map_err(input)?;
    let set = inst.lambda();
    let sp = match point {
        Some(p) => {
            let y = parse_vec(p, "point")?;
            if y.len() != set.dim() {
                return Err(Failure::Input(format!(
                    "--point has {} coordinates, Λ lives in dimension {}",
                    y.len(),
                    set.dim()
                )));
            }
            set.point(&y).map_err(input)?
        }
        None => inst.anchor_point().clone(),
    };
    let t = tangent_cone(set, &sp).map_err(input)?;
    let nr = regular_normal_cone(set, &sp).map_err(input)?;
    let nl = limiting_normal_cone(set, &sp).map_err(input)?;
    let mut value = json!({
        "command": "cones",
        "point": render::qvec(sp.coords()),
        "tangent": render::union_json(&t),
        "regular_normal": render::vcone_json(&nr.generators()),
        "limiting_normal": render::union_json(&nl),
    });
    let mut text = format!("point       {}\n", render::vec_text(sp.coords()));
    text += &format!("T           {}\n", render::union_text(&t));
    text += &format!("N̂           {}\n", render::vcone_text(&nr.generators()));
    text += &format!("N           {}\n", render::union_text(&nl));
    if let Some(d) = direction {
        let d = parse_vec(d, "direction")?;
        if d.len() != set.dim() {
            return Err(Failure::Input(format!(
                "--direction has {} coordinates, Λ lives in dimension {}",
                d.len(),
                set.dim()
            )));
        }
        let nd = directional_normal_cone(set, &sp, &d).map_err(input)?;
        value["direction"] = render::qvec(&d);
        value["directional_normal"] = render::union_json(&nd);
        text += &format!("N(·; {})  {}\n", render::vec_text(&d), render::union_text(&nd));
    }
    emit(c, value, text);
    Ok(EXIT_HOLDS)
}

fn run_verify(c: &Common) -> Result<u8, Failure> {
    let l = load(c)?;
    let inst = l.problem.to_general().map_err(input)?;
    let s = sampling(c, &l.file)?;
    let table = empirical_modulus(&inst, &s).map_err(input)?;
    let value = json!({ "command": "verify", "modulus": table });
    emit(c, value, render::modulus(&table));
    Ok(EXIT_HOLDS)
}

fn run_witness(c: &Common, direction: &str, zeta: &str, mode: Mode) -> Result<u8, Failure> {
    let l = load(c)?;
    let inst = l.problem.to_general().map_err(input)?;
    let u = parse_vec(direction, "direction")?;
    let z = parse_vec(zeta, "zeta")?;
    if u.len() != inst.n() || z.len() != inst.m() {
        return Err(Failure::Input(format!(
            "expected a direction of length {} and a multiplier of length {}",
            inst.n(),
            inst.m()
        )));
    }
    let s = sampling(c, &l.file)?;
    let found = sequence_falsifier(&inst, &u, &z, mode, &s).map_err(input)?;
    let (code, verified, text) = match &found {
        None => (
            EXIT_UNKNOWN,
            None,
            "no sequence witness found (this is not evidence that the condition holds)\n".to_string(),
        ),
        Some(w) => match verify_witness(&inst, mode.kind(), w) {
            Ok(()) => (EXIT_FAILS, Some(true), render::witness(w, "re-verified exactly")),
            Err(e) => (
                EXIT_UNKNOWN,
                Some(false),
                render::witness(w, &format!("sequence found but (u, ζ) is not admissible: {e}")),
            ),
        },
    };
    let value = json!({
        "command": "witness",
        "mode": mode,
        "witness": found,
        "verified": verified,
        "exit_code": code,
    });
    emit(c, value, text);
    Ok(code)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let common = match &cli.cmd {
        Cmd::Check { common, .. }
        | Cmd::Cones { common, .. }
        | Cmd::Verify { common }
        | Cmd::Witness { common, .. } => common.clone(),
    };
    if let Some(j) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(input)?;
    }
    if common.dump_normalized {
        let l = load(&common)?;
        write_out(&(l.file.to_normalized_json() + "\n"));
        return Ok(EXIT_HOLDS);
    }
    match cli.cmd {
        Cmd::Check { common, conclude } => run_check(&common, conclude),
        Cmd::Cones {
            common,
            point,
            direction,
        } => run_cones(&common, point.as_deref(), direction.as_deref()),
        Cmd::Verify { common } => run_verify(&common),
        Cmd::Witness {
            common,
            direction,
            zeta,
            mode,
        } => run_witness(&common, &direction, &zeta, mode.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_HOLDS });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
