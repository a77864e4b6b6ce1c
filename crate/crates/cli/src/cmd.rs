//! The `modpm` subcommands. Every command returns `Ok(exit_code)` when it
//! ran to completion (0 for success, 1 when the completed computation is a
//! negative mathematical finding such as "not an eigenform") or a
//! `Failure` carrying an exit code and a message for stderr: 2 for usage
//! problems, 3 for internal precision exhaustion.
//!
//! All machine output (`--json`) is emitted through serde structs with
//! fixed field order and decimal-string big integers, so a given build
//! produces byte-identical output for identical inputs.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use modpm_core::eigen::{
    assemble_survey, construct_hab, hab_eigenvalues, is_weak_eigenform, min_weak_weight,
    strong_eigensystems, survey_weight, Eigensystem, Survey, WeakCheck,
};
use modpm_core::error::Error as CoreError;
use modpm_core::forms::{delta_polynomial, sturm_bound};
use modpm_core::hecke::{theta_iterate, theta_raw};
use modpm_core::mod2::{compute_cm, compute_nk, hatada_sweep};
use modpm_core::qseries::QExpansion;
use modpm_core::ring::ResidueRing;
use modpm_core::unramified::{UnramifiedElt, UnramifiedRing};
use modpm_core::{LocalRing, Ring};

use crate::expr::{self, ExprError, FormExpression};
use crate::records::{
    self, canonical_record_bytes, occurrence_bound, record_id, EigensystemRecord,
};
use crate::store::Store;

pub const EXIT_FINDING: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PRECISION: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn finding(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_FINDING,
            message: message.into(),
        }
    }
}

/// Map a library error onto the exit-code contract. Commands override
/// individual cases where they know better.
fn classify(e: CoreError) -> Failure {
    use CoreError::*;
    let code = match &e {
        WeightMismatch(..) | MissingWeightTag | UnsupportedPrime(_) | UnsupportedExponent(_)
        | NonIntegralEisenstein(_) | RingMismatch | NonMonic => EXIT_USAGE,
        NotNormalized | NotCongruentModP | CongruentModPSquared | NonUnitDenominator
        | NotComparable | NotFoundWithinCap | HypothesisNotMet(_) | NotInSpan | NoSolution => {
            EXIT_FINDING
        }
        PrecisionTooSmall { .. } | PrecisionLoss(_) | CapNotStabilized(_)
        | IndeterminateValuation | GeneratorNotFound(_) | NotSquarefreeModP => EXIT_PRECISION,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn expr_failure(e: ExprError) -> Failure {
    Failure::usage(e.to_string())
}

/// Weights of level-one cusp computations: even and at least 4 (spaces
/// below weight 12 are merely empty, odd weights are malformed input).
fn check_cusp_weight(k: u64) -> Result<(), Failure> {
    if k % 2 != 0 || k < 4 {
        return Err(Failure::usage(format!(
            "weight {} holds no level-one cusp forms; use an even weight >= 4",
            k
        )));
    }
    Ok(())
}

fn parse_expr(text: &str) -> Result<(FormExpression, i64), Failure> {
    let e = expr::parse_form(text).map_err(expr_failure)?;
    let w = e.weight().map_err(expr_failure)?;
    Ok((e, w))
}

fn emit_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("output serializes"));
}

#[derive(Parser)]
#[command(
    name = "modpm",
    version,
    about = "Modular forms of level 1 modulo prime powers: eigensystems, \
             congruences, degree bounds and occurrence surveys"
)]
pub struct Cli {
    /// Emit machine-readable JSON on stdout instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Strong eigensystems of the weight-k cusp space mod p^m.
    Eigensystems(EigensystemsArgs),
    /// Test whether a form expression reduces to a weak eigenform mod p^m.
    WeakCheck(WeakCheckArgs),
    /// Delta-degree of a form expression mod 2^m (m <= 3).
    Degm(DegmArgs),
    /// The odd-form degree bound N(k) for odd k.
    Nk(NkArgs),
    /// The degree bound C(m) and weight bound kappa(m) with their ledger row.
    Cm(CmArgs),
    /// Check that T_p eigenvalues are even and that mod-4 systems collapse.
    Hatada(HatadaArgs),
    /// Minimal weak weights of all eigensystems up to a weight cap.
    Survey(SurveyArgs),
    /// Apply the theta operator q d/dq to a form expression mod p^m.
    Theta(ThetaArgs),
    /// Average a mod-p congruent eigenform pair into h_{a,b} weak eigenforms.
    Hab(HabArgs),
    /// Validate an eigensystem record file and add it to the store.
    Import(ImportArgs),
    /// Write a stored eigensystem record as canonical JSON.
    Export(ExportArgs),
    /// Least weight at which a stored eigensystem occurs as a weak eigenform.
    MinWeakWeight(MinWeakWeightArgs),
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Eigensystems(a) => run_eigensystems(a, cli.json),
        Command::WeakCheck(a) => run_weak_check(a, cli.json),
        Command::Degm(a) => run_degm(a, cli.json),
        Command::Nk(a) => run_nk(a, cli.json),
        Command::Cm(a) => run_cm(a, cli.json),
        Command::Hatada(a) => run_hatada(a, cli.json),
        Command::Survey(a) => run_survey(a, cli.json),
        Command::Theta(a) => run_theta(a, cli.json),
        Command::Hab(a) => run_hab(a, cli.json),
        Command::Import(a) => run_import(a, cli.json),
        Command::Export(a) => run_export(a),
        Command::MinWeakWeight(a) => run_min_weak_weight(a, cli.json),
    }
}

// ---------------------------------------------------------------- helpers

fn coord_string(v: &[String]) -> String {
    if v.len() == 1 {
        v[0].clone()
    } else {
        format!("[{}]", v.join(", "))
    }
}

fn series_string(f: &QExpansion<ResidueRing>, terms: usize) -> String {
    let shown = terms.min(f.prec());
    let mut parts = Vec::new();
    for n in 0..shown {
        let c = f.coeff(n);
        if c.is_zero() {
            continue;
        }
        parts.push(match n {
            0 => c.to_string(),
            1 => format!("{}*q", c),
            _ => format!("{}*q^{}", c, n),
        });
    }
    let head = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    };
    format!("{} + O(q^{})", head, shown)
}

/// The q-expansion of a rational (residue degree 1) system, rebuilt from
/// its coordinates on the echelonized cusp basis at the requested
/// precision.
fn system_series(sys: &Eigensystem, prec: usize) -> QExpansion<ResidueRing> {
    let ring = ResidueRing::new(sys.p, sys.m);
    let basis = modpm_core::forms::miller_basis_cusp_in(sys.weight, &ring, prec);
    let mut f = QExpansion::zero(ring, prec, Some(sys.weight as i64));
    for (j, bj) in basis.iter().enumerate() {
        f = f.add(
            &bj.clone()
                .with_weight(Some(sys.weight as i64))
                .scale(&sys.a(j + 1)[0]),
        );
    }
    f
}

fn provenance_line(k: u64, p: u64, m: u32) -> String {
    format!("modpm eigensystems --weight {} --p {} --m {}", k, p, m)
}

// ----------------------------------------------------------- eigensystems

#[derive(Args)]
pub struct EigensystemsArgs {
    /// Weight k of the cusp space.
    #[arg(long)]
    pub weight: u64,
    /// The prime p.
    #[arg(long)]
    pub p: u64,
    /// The exponent m of the modulus p^m.
    #[arg(long)]
    pub m: u32,
    /// Add the computed systems to the record store.
    #[arg(long)]
    pub save: bool,
    /// Record store location.
    #[arg(long, default_value = "eigensystems.store.json")]
    pub store: PathBuf,
    /// How many leading coefficients to show in the table.
    #[arg(long, default_value_t = 8)]
    pub coeffs: usize,
}

#[derive(Serialize)]
struct RecordWithId<'a> {
    id: &'a str,
    #[serde(flatten)]
    record: &'a EigensystemRecord,
}

#[derive(Serialize)]
#[serde(untagged)]
enum SystemJson<'a> {
    Stored(RecordWithId<'a>),
    Ramified { ramified: bool, residue_degree: u32 },
}

#[derive(Serialize)]
struct EigensystemsJson<'a> {
    level: u64,
    weight: u64,
    p: u64,
    m: u32,
    count: usize,
    systems: Vec<SystemJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    saved_to: Option<String>,
}

fn run_eigensystems(args: &EigensystemsArgs, json: bool) -> Result<u8, Failure> {
    if args.m == 0 {
        return Err(Failure::usage("m must be at least 1"));
    }
    check_cusp_weight(args.weight)?;
    let systems = strong_eigensystems(args.weight, args.p, args.m).map_err(classify)?;
    let provenance = provenance_line(args.weight, args.p, args.m);
    let stored: Vec<Option<(String, EigensystemRecord)>> = systems
        .iter()
        .map(|s| {
            if s.ramified {
                None
            } else {
                let rec = records::from_eigensystem(s, provenance.clone())
                    .expect("computed unramified systems satisfy the record invariants");
                let id = record_id(&rec);
                Some((id, rec))
            }
        })
        .collect();

    let saved_to = if args.save {
        let mut store = Store::load(&args.store).map_err(Failure::usage)?;
        for entry in stored.iter().flatten() {
            store.insert(entry.1.clone());
        }
        store.save(&args.store).map_err(Failure::usage)?;
        Some(args.store.display().to_string())
    } else {
        None
    };

    if json {
        let systems_json: Vec<SystemJson> = systems
            .iter()
            .zip(&stored)
            .map(|(sys, entry)| match entry {
                Some((id, rec)) => SystemJson::Stored(RecordWithId { id, record: rec }),
                None => SystemJson::Ramified {
                    ramified: true,
                    residue_degree: sys.residue_degree,
                },
            })
            .collect();
        emit_json(&EigensystemsJson {
            level: 1,
            weight: args.weight,
            p: args.p,
            m: args.m,
            count: systems.len(),
            systems: systems_json,
            saved_to,
        });
        return Ok(0);
    }

    println!(
        "{} strong eigensystem(s) in S_{} mod {}^{}",
        systems.len(),
        args.weight,
        args.p,
        args.m
    );
    for (sys, entry) in systems.iter().zip(&stored) {
        match entry {
            Some((id, rec)) => {
                let shown: Vec<String> = rec
                    .coefficients
                    .iter()
                    .take(args.coeffs)
                    .map(|(_, v)| coord_string(v))
                    .collect();
                println!(
                    "  {}  deg {}  a_1..: {}",
                    id,
                    sys.residue_degree,
                    shown.join(", ")
                );
            }
            None => println!(
                "  ramified mass of residue degree {} (no coefficient claims)",
                sys.residue_degree
            ),
        }
    }
    if let Some(path) = &saved_to {
        println!("saved to {}", path);
    }
    Ok(0)
}

// ------------------------------------------------------------- weak-check

#[derive(Args)]
pub struct WeakCheckArgs {
    /// Form expression, e.g. "E4^6*Delta + 2*Delta^3".
    #[arg(long)]
    pub expr: String,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub m: u32,
}

#[derive(Serialize)]
struct WeakCheckJson {
    expr: String,
    weight: i64,
    p: u64,
    m: u32,
    weak_eigenform: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_index: Option<usize>,
}

fn run_weak_check(args: &WeakCheckArgs, json: bool) -> Result<u8, Failure> {
    let (e, w) = parse_expr(&args.expr)?;
    if w < 0 {
        return Err(Failure::usage("negative weight"));
    }
    let b = sturm_bound(w as u64);
    let prec = b * (b + 1) + 1;
    let f = expr::eval_mod(&e, args.p, args.m, prec).map_err(classify)?;
    match is_weak_eigenform(&f).map_err(classify)? {
        WeakCheck::Eigenform { eigenvalues } => {
            if json {
                emit_json(&WeakCheckJson {
                    expr: args.expr.clone(),
                    weight: w,
                    p: args.p,
                    m: args.m,
                    weak_eigenform: true,
                    eigenvalues: Some(eigenvalues.iter().map(|c| c.to_string()).collect()),
                    failing_index: None,
                });
            } else {
                let shown: Vec<String> = eigenvalues.iter().map(|c| c.to_string()).collect();
                println!(
                    "weak eigenform mod {}^{} (weight {}); a_1..a_{}: {}",
                    args.p,
                    args.m,
                    w,
                    shown.len(),
                    shown.join(", ")
                );
            }
            Ok(0)
        }
        WeakCheck::NotEigenform { index } => {
            if json {
                emit_json(&WeakCheckJson {
                    expr: args.expr.clone(),
                    weight: w,
                    p: args.p,
                    m: args.m,
                    weak_eigenform: false,
                    eigenvalues: None,
                    failing_index: Some(index),
                });
            } else {
                println!(
                    "not a weak eigenform mod {}^{}: T_{} deviates from a_{} times the form",
                    args.p, args.m, index, index
                );
            }
            Ok(EXIT_FINDING)
        }
    }
}

// ------------------------------------------------------------------- degm

#[derive(Args)]
pub struct DegmArgs {
    /// Form expression to expand as a polynomial in Delta.
    #[arg(long)]
    pub expr: String,
    /// Exponent of the modulus 2^m; the collapse is valid for m <= 3.
    #[arg(long)]
    pub m: u32,
}

#[derive(Serialize)]
struct DegmJson {
    expr: String,
    weight: i64,
    m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    deg: Option<usize>,
    coefficients: Vec<String>,
}

fn run_degm(args: &DegmArgs, json: bool) -> Result<u8, Failure> {
    if !(1..=3).contains(&args.m) {
        return Err(Failure::usage(
            "the Delta-polynomial collapse needs 1 <= m <= 3 (Q and R are 1 mod 8)",
        ));
    }
    let (e, w) = parse_expr(&args.expr)?;
    if w < 0 {
        return Err(Failure::usage("negative weight"));
    }
    let max_deg = (w as usize) / 12 + 2;
    let prec = 4 * max_deg + 16;
    let f = expr::eval_mod(&e, 2, args.m, prec).map_err(classify)?;
    match delta_polynomial(&f, max_deg) {
        Ok(coeffs) => {
            let deg = if coeffs.is_empty() {
                None
            } else {
                Some(coeffs.len() - 1)
            };
            if json {
                emit_json(&DegmJson {
                    expr: args.expr.clone(),
                    weight: w,
                    m: args.m,
                    deg,
                    coefficients: coeffs.iter().map(|c| c.to_string()).collect(),
                });
            } else {
                match deg {
                    Some(d) => {
                        let shown: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                        println!(
                            "deg_{} = {}; Delta-coefficients (ascending): {}",
                            args.m,
                            d,
                            shown.join(", ")
                        );
                    }
                    None => println!("the reduction mod 2^{} is 0", args.m),
                }
            }
            Ok(0)
        }
        Err(CoreError::NotInSpan) => {
            let msg = format!(
                "not a Delta-polynomial of degree <= {} at precision {}",
                max_deg, prec
            );
            if json {
                emit_json(&DegmJson {
                    expr: args.expr.clone(),
                    weight: w,
                    m: args.m,
                    deg: None,
                    coefficients: Vec::new(),
                });
            } else {
                println!("{}", msg);
            }
            Ok(EXIT_FINDING)
        }
        Err(e) => Err(classify(e)),
    }
}

// --------------------------------------------------------------------- nk

#[derive(Args)]
pub struct NkArgs {
    /// Odd weight-style argument k of the degree bound N(k).
    #[arg(long)]
    pub k: u64,
}

#[derive(Serialize)]
struct NkJson {
    k: u64,
    n: u64,
}

fn run_nk(args: &NkArgs, json: bool) -> Result<u8, Failure> {
    if args.k % 2 == 0 {
        return Err(Failure::usage("N(k) is defined for odd k"));
    }
    let n = compute_nk(args.k).map_err(classify)?;
    if json {
        emit_json(&NkJson { k: args.k, n });
    } else {
        println!("N({}) = {}", args.k, n);
    }
    Ok(0)
}

// --------------------------------------------------------------------- cm

#[derive(Args)]
pub struct CmArgs {
    /// Exponent of the modulus 2^m.
    #[arg(long)]
    pub m: u32,
}

#[derive(Serialize)]
struct CmJson {
    m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<u64>,
    #[serde(rename = "C")]
    c: u64,
    kappa: u64,
}

fn run_cm(args: &CmArgs, json: bool) -> Result<u8, Failure> {
    if args.m == 0 {
        return Err(Failure::usage("m must be at least 1"));
    }
    let row = compute_cm(args.m).map_err(classify)?;
    if json {
        emit_json(&CmJson {
            m: row.m,
            w: row.w,
            c: row.c,
            kappa: row.kappa,
        });
    } else {
        match (row.w, row.w_div_6, row.w_div_12, row.n_arg, row.n_val) {
            (Some(w), Some(w6), Some(w12), Some(narg), Some(nval)) => println!(
                "m = {}: C = {}, kappa = {}   [w = {}, floor(w/6) = {}, floor(w/12) = {}, N({}) = {}]",
                row.m, row.c, row.kappa, w, w6, w12, narg, nval
            ),
            _ => println!("m = {}: C = {}, kappa = {}", row.m, row.c, row.kappa),
        }
    }
    Ok(0)
}

// ----------------------------------------------------------------- hatada

#[derive(Args)]
pub struct HatadaArgs {
    /// Largest even weight for the T_p parity sweep (p in {2, 3, 5, 7}).
    #[arg(long, default_value_t = 60)]
    pub kmax: u64,
    /// Largest even weight for the mod-4 eigensystem collapse check
    /// (defaults to min(kmax, 40)).
    #[arg(long)]
    pub kmax4: Option<u64>,
}

#[derive(Serialize)]
struct HatadaJson {
    parity_kmax: u64,
    mod4_kmax: u64,
    parity_weights_checked: usize,
    mod4_systems_checked: usize,
}

fn run_hatada(args: &HatadaArgs, json: bool) -> Result<u8, Failure> {
    let kmax4 = args.kmax4.unwrap_or_else(|| args.kmax.min(40));
    if args.kmax % 2 != 0 || kmax4 % 2 != 0 {
        return Err(Failure::usage("weight caps must be even"));
    }
    let report = hatada_sweep(args.kmax, kmax4).map_err(classify)?;
    if json {
        emit_json(&HatadaJson {
            parity_kmax: args.kmax,
            mod4_kmax: kmax4,
            parity_weights_checked: report.parity_weights_checked,
            mod4_systems_checked: report.mod4_systems_checked,
        });
    } else {
        println!(
            "T_p eigenvalues even for p in {{2, 3, 5, 7}} through weight {} ({} weights); \
             all {} unramified mod-4 systems through weight {} equal the discriminant's",
            args.kmax, report.parity_weights_checked, report.mod4_systems_checked, kmax4
        );
    }
    Ok(0)
}

// ----------------------------------------------------------------- survey

#[derive(Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub m: u32,
    /// Largest weight scanned (even weights from 12 upward).
    #[arg(long)]
    pub kmax: u64,
    /// Worker threads for the per-weight computations (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write the table as CSV to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct SurveyRowJson {
    weight: u64,
    system_id: Option<String>,
    residue_degree: u32,
    ramified: bool,
    min_weak_weight: Option<u64>,
}

#[derive(Serialize)]
struct SurveyJson {
    p: u64,
    m: u32,
    k_max: u64,
    comparator: u64,
    max_min_weight: Option<u64>,
    ramified_count: usize,
    rows: Vec<SurveyRowJson>,
}

fn survey_rows_json(survey: &Survey) -> Vec<SurveyRowJson> {
    survey
        .rows
        .iter()
        .map(|row| {
            let system_id = if row.system.ramified {
                None
            } else {
                let rec = records::from_eigensystem(
                    &row.system,
                    provenance_line(row.system.weight, row.system.p, row.system.m),
                )
                .expect("unramified survey systems satisfy the record invariants");
                Some(record_id(&rec))
            };
            SurveyRowJson {
                weight: row.system.weight,
                system_id,
                residue_degree: row.system.residue_degree,
                ramified: row.system.ramified,
                min_weak_weight: row.min_weight,
            }
        })
        .collect()
}

fn run_survey(args: &SurveyArgs, json: bool) -> Result<u8, Failure> {
    let weights: Vec<u64> = (12..=args.kmax).step_by(2).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::usage(format!("cannot build thread pool: {}", e)))?;
    let results: Vec<Result<_, CoreError>> = pool.install(|| {
        use rayon::prelude::*;
        weights
            .par_iter()
            .map(|&k| survey_weight(args.p, args.m, k))
            .collect()
    });
    // surface the lowest-weight error deterministically, whatever the
    // scheduling order was
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r.map_err(classify)?);
    }
    let survey = assemble_survey(args.p, args.m, args.kmax, rows);
    let rows_json = survey_rows_json(&survey);

    if let Some(path) = &args.csv {
        let mut text = String::from("weight,system_id,residue_degree,min_weak_weight\n");
        for row in &rows_json {
            text.push_str(&format!(
                "{},{},{},{}\n",
                row.weight,
                row.system_id.as_deref().unwrap_or("-"),
                row.residue_degree,
                row.min_weak_weight
                    .map_or(String::new(), |v| v.to_string())
            ));
        }
        std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {}", path.display(), e)))?;
    }

    if json {
        emit_json(&SurveyJson {
            p: survey.p,
            m: survey.m,
            k_max: survey.k_max,
            comparator: survey.comparator,
            max_min_weight: survey.max_min_weight,
            ramified_count: survey.ramified_count,
            rows: rows_json,
        });
        return Ok(0);
    }

    println!(
        "survey mod {}^{} through weight {}: {} system(s), comparator {}",
        survey.p,
        survey.m,
        survey.k_max,
        survey.rows.len(),
        survey.comparator
    );
    println!("weight  id                deg  min weak weight");
    for row in &rows_json {
        println!(
            "{:<7} {:<17} {:<4} {}",
            row.weight,
            row.system_id.as_deref().unwrap_or("-"),
            row.residue_degree,
            row.min_weak_weight
                .map_or("-".to_string(), |v| v.to_string())
        );
    }
    match survey.max_min_weight {
        Some(max) => println!(
            "max min weak weight {} (comparator {}); {} ramified",
            max, survey.comparator, survey.ramified_count
        ),
        None => println!("no unramified systems in range"),
    }
    Ok(0)
}

// ------------------------------------------------------------------ theta

#[derive(Args)]
pub struct ThetaArgs {
    #[arg(long)]
    pub expr: String,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub m: u32,
    /// How many times to apply theta.
    #[arg(long, default_value_t = 1)]
    pub iter: u32,
    /// How many q-coefficients to display.
    #[arg(long, default_value_t = 12)]
    pub coeffs: usize,
}

#[derive(Serialize)]
struct ThetaJson {
    expr: String,
    p: u64,
    m: u32,
    iterations: u32,
    input_weight: i64,
    /// Absent below p = 5, where the coefficient map carries no weight.
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<i64>,
    coefficients: Vec<String>,
}

fn run_theta(args: &ThetaArgs, json: bool) -> Result<u8, Failure> {
    if args.m == 0 {
        return Err(Failure::usage("m must be at least 1"));
    }
    let (e, w) = parse_expr(&args.expr)?;
    let prec = args.coeffs.max(2);
    let f = expr::eval_mod(&e, args.p, args.m, prec).map_err(classify)?;
    let g = if args.p >= 5 {
        theta_iterate(&f, args.iter).map_err(classify)?
    } else {
        theta_raw(&f, args.iter).with_weight(None)
    };
    if json {
        emit_json(&ThetaJson {
            expr: args.expr.clone(),
            p: args.p,
            m: args.m,
            iterations: args.iter,
            input_weight: w,
            weight: g.weight(),
            coefficients: (0..g.prec()).map(|n| g.coeff(n).to_string()).collect(),
        });
    } else {
        match g.weight() {
            Some(kw) => println!(
                "theta^{} mod {}^{}: weight {} -> {}",
                args.iter, args.p, args.m, w, kw
            ),
            None => println!(
                "theta^{} mod {}^{}: coefficient map only (no weight tag below p = 5)",
                args.iter, args.p, args.m
            ),
        }
        println!("{}", series_string(&g, args.coeffs));
    }
    Ok(0)
}

// -------------------------------------------------------------------- hab

#[derive(Args)]
pub struct HabArgs {
    /// Odd prime p; the average is taken mod p^2.
    #[arg(long)]
    pub p: u64,
    /// Weight holding the congruent pair.
    #[arg(long)]
    pub weight: u64,
    /// How many distinct ratios (a : b) to construct.
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
}

#[derive(Serialize)]
struct HabRatioJson {
    /// Coordinates of a over the ratio ring's canonical basis.
    a: Vec<String>,
    b: Vec<String>,
    /// Each eigenvalue as a coordinate vector over the same basis.
    eigenvalues: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct HabJson {
    p: u64,
    m: u32,
    weight: u64,
    pair: [String; 2],
    /// Residue degree of the ring the ratios are drawn from; 1 means the
    /// scalars are plain integers mod p^2.
    ratio_ring_degree: u32,
    ratio_ring_modulus: Vec<u64>,
    ratios: Vec<HabRatioJson>,
    pairwise_distinct: bool,
}

fn coords_json(e: &UnramifiedElt) -> Vec<String> {
    e.iter().map(|c| c.to_string()).collect()
}

fn coords_human(e: &UnramifiedElt) -> String {
    if e.len() == 1 {
        e[0].to_string()
    } else {
        let inner: Vec<String> = e.iter().map(|c| c.to_string()).collect();
        format!("[{}]", inner.join(","))
    }
}

fn run_hab(args: &HabArgs, json: bool) -> Result<u8, Failure> {
    check_cusp_weight(args.weight)?;
    let systems = strong_eigensystems(args.weight, args.p, 2).map_err(classify)?;
    let rational: Vec<&Eigensystem> = systems
        .iter()
        .filter(|s| !s.ramified && s.residue_degree == 1)
        .collect();

    // The average depends only on the residue t = b/(a+b) mod p, so at
    // most p distinct systems come from integer ratios. Beyond that the
    // family keeps growing through unramified extensions: pick the least
    // residue degree whose field holds --pairs distinct values of t.
    let mut fdeg = 1u32;
    while (args.p as u128).pow(fdeg) < args.pairs as u128 {
        fdeg += 1;
    }
    let ratio_ring = UnramifiedRing::standard(args.p, 2, fdeg);

    let b = sturm_bound(args.weight);
    let prec = b * (b + 1) + 1;
    let one = BigUint::from(1u32);
    let ring1 = ResidueRing::new(args.p, 1);

    // first pair congruent mod p (construct_hab re-checks both congruence
    // hypotheses exactly)
    let mut found = None;
    'outer: for i in 0..rational.len() {
        for j in (i + 1)..rational.len() {
            let (f, g) = (rational[i], rational[j]);
            if f.coefficients == g.coefficients {
                // Two integral systems collapsing to one system mod p^2:
                // averaging them returns the system itself for every ratio.
                continue;
            }
            let congruent = (1..=f.bound().min(g.bound())).all(|n| {
                ring1.reduce_uint(&f.a(n)[0]) == ring1.reduce_uint(&g.a(n)[0])
            });
            if !congruent {
                continue;
            }
            let fs = system_series(f, prec);
            let gs = system_series(g, prec);
            if construct_hab(&fs, &gs, &one, &one).is_ok() {
                found = Some((f, g, fs, gs));
                break 'outer;
            }
        }
    }
    let Some((f, g, fs, gs)) = found else {
        return Err(Failure::finding(format!(
            "no pair of rational systems at weight {} is congruent mod {} but distinct mod {}^2",
            args.weight, args.p, args.p
        )));
    };

    // Lift the congruent pair and its eigenvalues into the ratio ring.
    let w = &ratio_ring;
    let fw = fs.map_ring(w, |c| w.embed_base(c));
    let gw = gs.map_ring(w, |c| w.embed_base(c));
    let lam: Vec<UnramifiedElt> = (1..=b).map(|n| w.embed_base(&f.a(n)[0])).collect();
    let mu: Vec<UnramifiedElt> = (1..=b).map(|n| w.embed_base(&g.a(n)[0])).collect();

    // Ratio number i targets t = b/(a+b) with residue coordinates the
    // base-p digits of i: (a, b) = (1, 0) for t = 0, (t^-1 - 1, 1) else.
    let mut out_rows = Vec::new();
    let mut signatures: Vec<Vec<UnramifiedElt>> = Vec::new();
    for idx in 0..args.pairs {
        let mut digits = vec![BigUint::zero(); fdeg as usize];
        let mut r = idx as u64;
        for d in digits.iter_mut() {
            *d = BigUint::from(r % args.p);
            r /= args.p;
        }
        let t = w.from_coords(digits);
        let (ra, rb) = if w.is_zero(&t) {
            (w.one(), w.zero())
        } else {
            let tinv = w
                .unit_inverse(&t)
                .expect("nonzero residue coordinates give a unit");
            (w.sub(&tinv, &w.one()), w.one())
        };
        let h = construct_hab(&fw, &gw, &ra, &rb).map_err(classify)?;
        let law = hab_eigenvalues(w, &lam, &mu, &ra, &rb).map_err(classify)?;
        match is_weak_eigenform(&h).map_err(classify)? {
            WeakCheck::Eigenform { eigenvalues } => {
                if eigenvalues != law {
                    return Err(Failure::finding(format!(
                        "h_({} : {}) is a weak eigenform but deviates from the averaged law",
                        coords_human(&ra),
                        coords_human(&rb)
                    )));
                }
            }
            WeakCheck::NotEigenform { index } => {
                return Err(Failure::finding(format!(
                    "h_({} : {}) fails the weak eigenform test at n = {}",
                    coords_human(&ra),
                    coords_human(&rb),
                    index
                )));
            }
        }
        out_rows.push(HabRatioJson {
            a: coords_json(&ra),
            b: coords_json(&rb),
            eigenvalues: law.iter().map(coords_json).collect(),
        });
        signatures.push(law);
    }

    let mut distinct = true;
    for i in 0..signatures.len() {
        for j in (i + 1)..signatures.len() {
            if signatures[i] == signatures[j] {
                distinct = false;
            }
        }
    }

    let id_of = |sys: &Eigensystem| {
        let rec = records::from_eigensystem(sys, provenance_line(sys.weight, sys.p, sys.m))
            .expect("rational systems satisfy the record invariants");
        record_id(&rec)
    };

    if json {
        emit_json(&HabJson {
            p: args.p,
            m: 2,
            weight: args.weight,
            pair: [id_of(f), id_of(g)],
            ratio_ring_degree: fdeg,
            ratio_ring_modulus: ratio_ring.modulus_poly().to_vec(),
            ratios: out_rows,
            pairwise_distinct: distinct,
        });
    } else {
        println!(
            "pair at weight {} congruent mod {}: {} and {}",
            args.weight,
            args.p,
            id_of(f),
            id_of(g)
        );
        if fdeg > 1 {
            println!(
                "ratios drawn from the unramified extension of degree {} (modulus {:?})",
                fdeg,
                ratio_ring.modulus_poly()
            );
        }
        for row in &out_rows {
            let evs: Vec<String> = row
                .eigenvalues
                .iter()
                .map(|v| {
                    if v.len() == 1 {
                        v[0].clone()
                    } else {
                        format!("[{}]", v.join(","))
                    }
                })
                .collect();
            println!(
                "  h_([{}] : [{}]):  a_1..a_{}: {}",
                row.a.join(","),
                row.b.join(","),
                evs.len(),
                evs.join(", ")
            );
        }
        println!(
            "{} weak eigensystems mod {}^2, pairwise distinct: {}",
            out_rows.len(),
            args.p,
            if distinct { "yes" } else { "no" }
        );
    }
    if distinct {
        Ok(0)
    } else {
        Ok(EXIT_FINDING)
    }
}

// ----------------------------------------------------------------- import

#[derive(Args)]
pub struct ImportArgs {
    /// Eigensystem record file to validate and store.
    pub file: PathBuf,
    #[arg(long, default_value = "eigensystems.store.json")]
    pub store: PathBuf,
}

#[derive(Serialize)]
struct ImportJson {
    id: String,
    level: u64,
    weight: u64,
    p: u64,
    m: u32,
    residue_degree: u32,
    added: bool,
    store: String,
}

fn run_import(args: &ImportArgs, json: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Failure::usage(format!("cannot read {}: {}", args.file.display(), e)))?;
    let rec: EigensystemRecord = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {}", args.file.display(), e)))?;
    records::validate(&rec).map_err(Failure::usage)?;
    let mut store = Store::load(&args.store).map_err(Failure::usage)?;
    let (id, added) = store.insert(rec.clone());
    store.save(&args.store).map_err(Failure::usage)?;
    if json {
        emit_json(&ImportJson {
            id: id.clone(),
            level: rec.level,
            weight: rec.weight,
            p: rec.p,
            m: rec.m,
            residue_degree: rec.residue_degree,
            added,
            store: args.store.display().to_string(),
        });
    } else {
        println!(
            "{} {} (level {}, weight {}, mod {}^{}) in {}",
            if added { "imported" } else { "already present:" },
            id,
            rec.level,
            rec.weight,
            rec.p,
            rec.m,
            args.store.display()
        );
    }
    Ok(0)
}

// ----------------------------------------------------------------- export

#[derive(Args)]
pub struct ExportArgs {
    /// Content id of the stored record.
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value = "eigensystems.store.json")]
    pub store: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_export(args: &ExportArgs) -> Result<u8, Failure> {
    let store = Store::load(&args.store).map_err(Failure::usage)?;
    let rec = store.get(&args.id).ok_or_else(|| {
        Failure::usage(format!(
            "no record {} in {}",
            args.id,
            args.store.display()
        ))
    })?;
    let bytes = canonical_record_bytes(rec);
    match &args.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Failure::usage(format!("cannot write {}: {}", path.display(), e)))?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::usage(format!("cannot write to stdout: {}", e)))?,
    }
    Ok(0)
}

// -------------------------------------------------------- min-weak-weight

#[derive(Args)]
pub struct MinWeakWeightArgs {
    /// Content id of the stored record.
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value = "eigensystems.store.json")]
    pub store: PathBuf,
}

#[derive(Serialize)]
struct MinWeakWeightJson {
    id: String,
    weight: u64,
    p: u64,
    m: u32,
    min_weak_weight: u64,
}

fn run_min_weak_weight(args: &MinWeakWeightArgs, json: bool) -> Result<u8, Failure> {
    let store = Store::load(&args.store).map_err(Failure::usage)?;
    let rec = store.get(&args.id).ok_or_else(|| {
        Failure::usage(format!(
            "no record {} in {}",
            args.id,
            args.store.display()
        ))
    })?;
    if rec.level != 1 {
        return Err(Failure::usage(format!(
            "record {} has level {}; the occurrence scan is a level-1 computation",
            args.id, rec.level
        )));
    }
    if rec.bound < occurrence_bound(rec.weight) {
        return Err(Failure::usage(format!(
            "record {} stores {} coefficients but the occurrence scan needs {}",
            args.id,
            rec.bound,
            occurrence_bound(rec.weight)
        )));
    }
    let sys = records::to_eigensystem(rec).map_err(Failure::usage)?;
    let kp = min_weak_weight(&sys).map_err(classify)?;
    if json {
        emit_json(&MinWeakWeightJson {
            id: args.id.clone(),
            weight: rec.weight,
            p: rec.p,
            m: rec.m,
            min_weak_weight: kp,
        });
    } else {
        println!(
            "{} (weight {} mod {}^{}) first occurs weakly at weight {}",
            args.id, rec.weight, rec.p, rec.m, kp
        );
    }
    Ok(0)
}
