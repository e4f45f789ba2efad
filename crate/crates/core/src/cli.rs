//! Command line front end. Every report is a JSON object carrying
//! `"schema": "1"`; errors go to the diagnostic stream as JSON too.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::contraction::{contraction_split_auto, ContractionError, DEFAULT_PRECISION};
use crate::group::{
    invariant_lattice, local_prime_content, matrix_json, module_of, parse_matrix, prime_spectrum, scale,
    GroupError, InvariantOutcome, ModelJson, DEFAULT_BUDGET,
};
use crate::lattice::{Lattice, LatticeError, LatticeJson};
use crate::linalg::{MonicPoly, QMatrix};
use crate::newton::{eigenvalue_valuations, scale_exponent, NewtonError};
use crate::nilpotent::{order_histogram, sylow_decompose, GroupSpec, NilpotentError, SubgroupHandle, DEFAULT_CLOSURE_CAP};
use crate::padic::{check_prime, format_rational, parse_rational, PadicError};
use crate::tidy::{tidying_with_caps, TidyCaps, TidyError, DEFAULT_STEP_CAP, DEFAULT_UPLUS_CAP};

pub const SCHEMA: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_UNBOUNDED: i32 = 4;
pub const EXIT_CERTIFICATE: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Command {
    /// Eigenvalue valuations from the Newton polygon.
    #[default]
    Newton,
    /// Contraction decomposition.
    Contract,
    /// Tidy certificate.
    Tidy,
    /// Factored scale and module.
    Scale,
    /// Sylow decomposition of a subgroup.
    Sylow,
    /// Invariant lattice or an unboundedness witness.
    InvariantLattice,
    /// Scale primes of a family against the local prime content.
    Primes,
    /// Module of an automorphism.
    Module,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputMode {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    File(PathBuf),
    Inline(String),
    Stdin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input: InputSource,
    pub precision: u32,
    pub output: OutputMode,
    pub cap_tidy: usize,
    pub cap_budget: i64,
}

impl RunConfig {
    pub fn new(command: Command, input: InputSource) -> Self {
        RunConfig {
            command,
            input,
            precision: DEFAULT_PRECISION,
            output: OutputMode::Json,
            cap_tidy: DEFAULT_STEP_CAP,
            cap_budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.precision < 8 {
            return Err(format!("precision must be at least 8, got {}", self.precision));
        }
        if self.cap_tidy == 0 || self.cap_budget <= 0 {
            return Err("caps must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "tdscale", version, about = "Scale functions and tidy subgroups of p-adic linear automorphisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Eigenvalue valuations of a matrix or polynomial.
    Newton(CommonArgs),
    /// Contraction decomposition E_p + E_0 + E_m.
    Contract(CommonArgs),
    /// Tidy certificate for an automorphism and optional start lattice.
    Tidy(CommonArgs),
    /// Factored scale of a model automorphism.
    Scale(CommonArgs),
    /// Sylow decomposition of a subgroup of a finite nilpotent group.
    Sylow(CommonArgs),
    /// Invariant lattice of a finitely generated matrix group.
    InvariantLattice(CommonArgs),
    /// Family scale primes versus local prime content.
    Primes(CommonArgs),
    /// Module of a model automorphism.
    Module(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Inline JSON input (otherwise --input or stdin).
    pub json_input: Option<String>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub prec: u32,
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    pub cap_tidy: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub cap_budget: i64,
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let (command, a) = match self.command {
            CliCommand::Newton(a) => (Command::Newton, a),
            CliCommand::Contract(a) => (Command::Contract, a),
            CliCommand::Tidy(a) => (Command::Tidy, a),
            CliCommand::Scale(a) => (Command::Scale, a),
            CliCommand::Sylow(a) => (Command::Sylow, a),
            CliCommand::InvariantLattice(a) => (Command::InvariantLattice, a),
            CliCommand::Primes(a) => (Command::Primes, a),
            CliCommand::Module(a) => (Command::Module, a),
        };
        let input = match (a.input, a.json_input) {
            (Some(path), _) => InputSource::File(path),
            (None, Some(s)) => InputSource::Inline(s),
            (None, None) => InputSource::Stdin,
        };
        RunConfig {
            command,
            input,
            precision: a.prec,
            output: if a.text { OutputMode::Text } else { OutputMode::Json },
            cap_tidy: a.cap_tidy,
            cap_budget: a.cap_budget,
        }
    }
}

/// Exit status with the rendered report or diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, kind: "input", message: message.to_string() }
    }

    fn certificate(message: impl ToString) -> Self {
        Failure { code: EXIT_CERTIFICATE, kind: "certificate", message: message.to_string() }
    }
}

impl From<PadicError> for Failure {
    fn from(e: PadicError) -> Self {
        Failure::input(e)
    }
}

impl From<NewtonError> for Failure {
    fn from(e: NewtonError) -> Self {
        Failure::input(e)
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::input(e)
    }
}

impl From<NilpotentError> for Failure {
    fn from(e: NilpotentError) -> Self {
        Failure::input(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::input(e)
    }
}

impl From<ContractionError> for Failure {
    fn from(e: ContractionError) -> Self {
        match e {
            ContractionError::PrecisionExhausted(_) => {
                Failure { code: EXIT_PRECISION, kind: "precision", message: e.to_string() }
            }
            ContractionError::IterationCap | ContractionError::InexactSplit => Failure::certificate(e),
            _ => Failure::input(e),
        }
    }
}

impl From<TidyError> for Failure {
    fn from(e: TidyError) -> Self {
        match e {
            TidyError::Lattice(l) => l.into(),
            TidyError::SplitMismatch | TidyError::NotFullRank => Failure::input(e),
            _ => Failure::certificate(e),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::Contraction(c) => c.into(),
            GroupError::Tidy(t) => t.into(),
            other => Failure::input(other),
        }
    }
}

fn read_input(src: &InputSource) -> Result<String, Failure> {
    match src {
        InputSource::Inline(s) => Ok(s.clone()),
        InputSource::File(path) => std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        InputSource::Stdin => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(Failure::input)?;
            Ok(s)
        }
    }
}

/// Runs one request. Reads the input described by the config.
pub fn run(config: &RunConfig) -> Outcome {
    match read_input(&config.input) {
        Ok(text) => run_on(config, &text),
        Err(f) => render_failure(f),
    }
}

/// Runs one request on the given input text.
pub fn run_on(config: &RunConfig, text: &str) -> Outcome {
    if let Err(m) = config.validate() {
        return render_failure(Failure::input(m));
    }
    let result = match config.command {
        Command::Newton => newton_report(text),
        Command::Contract => contract_report(text, config),
        Command::Tidy => tidy_report(text, config),
        Command::Scale => scale_report(text),
        Command::Sylow => sylow_report(text),
        Command::InvariantLattice => invariant_report(text, config),
        Command::Primes => primes_report(text),
        Command::Module => module_report(text),
    };
    match result {
        Ok((code, mut report)) => {
            report["schema"] = json!(SCHEMA);
            let stdout = match config.output {
                OutputMode::Json => format!("{}\n", serde_json::to_string(&report).expect("serializable")),
                OutputMode::Text => render_text(&report),
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(f) => render_failure(f),
    }
}

fn render_failure(f: Failure) -> Outcome {
    let err = json!({ "schema": SCHEMA, "error": { "kind": f.kind, "message": f.message, "exit_code": f.code } });
    Outcome { code: f.code, stdout: String::new(), stderr: format!("{err}\n") }
}

/// `key: value` lines, nested keys joined with dots.
fn render_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
            other => out.push_str(&format!("{prefix}: {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

type Report = Result<(i32, Value), Failure>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixInput {
    p: u64,
    #[serde(default)]
    matrix: Option<Vec<Vec<String>>>,
    /// Monic polynomial coefficients, constant term first.
    #[serde(default)]
    coeffs: Option<Vec<String>>,
    #[serde(default)]
    start: Option<StartLattice>,
}

/// A lattice object as emitted in reports, or bare basis columns.
#[derive(Deserialize)]
#[serde(untagged)]
enum StartLattice {
    Lattice(LatticeJson),
    Columns(Vec<Vec<String>>),
}

impl MatrixInput {
    fn parse(text: &str) -> Result<Self, Failure> {
        let m: MatrixInput = serde_json::from_str(text)?;
        check_prime(m.p)?;
        Ok(m)
    }

    fn matrix(&self) -> Result<QMatrix, Failure> {
        let rows = self.matrix.as_ref().ok_or_else(|| Failure::input("missing \"matrix\""))?;
        let m = parse_matrix(rows).map_err(Failure::input)?;
        if m.rows() != rows.len() {
            return Err(Failure::input("matrix must be square"));
        }
        Ok(m)
    }
}

fn newton_report(text: &str) -> Report {
    let input = MatrixInput::parse(text)?;
    let poly = match (&input.coeffs, &input.matrix) {
        (Some(c), None) => {
            let coeffs = c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            MonicPoly::from_coeffs(coeffs).map_err(Failure::input)?
        }
        (None, Some(_)) => input.matrix()?.charpoly().map_err(Failure::input)?,
        _ => return Err(Failure::input("give exactly one of \"matrix\" or \"coeffs\"")),
    };
    let vals = eigenvalue_valuations(&poly, input.p)?;
    let mut report = vals.to_json();
    report["polynomial"] = json!(poly.coeffs().iter().map(format_rational).collect::<Vec<_>>());
    report["signature"] = serde_json::to_value(vals.signature()).expect("serializable");
    report["scale_exponent"] = json!(scale_exponent(&vals));
    Ok((EXIT_OK, report))
}

fn contract_report(text: &str, config: &RunConfig) -> Report {
    let input = MatrixInput::parse(text)?;
    let split = contraction_split_auto(&input.matrix()?, input.p, config.precision)?;
    Ok((EXIT_OK, split.to_json()))
}

fn tidy_report(text: &str, config: &RunConfig) -> Report {
    let input = MatrixInput::parse(text)?;
    let alpha = input.matrix()?;
    let n = alpha.rows();
    let start = match &input.start {
        None => Lattice::standard(input.p, n)?,
        Some(StartLattice::Lattice(j)) => {
            let l = Lattice::from_json(j)?;
            if l.prime() != input.p || l.ambient() != n {
                return Err(Failure::input("start lattice must match p and the matrix size"));
            }
            l
        }
        Some(StartLattice::Columns(cols)) => {
            let cols = cols
                .iter()
                .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            if cols.iter().any(|c| c.len() != n) {
                return Err(Failure::input("start lattice columns must match the matrix size"));
            }
            Lattice::from_columns(input.p, n, &cols)?
        }
    };
    let split = contraction_split_auto(&alpha, input.p, config.precision)?;
    let caps = TidyCaps { u_plus: DEFAULT_UPLUS_CAP, steps: config.cap_tidy };
    let cert = tidying_with_caps(&start, &alpha, &split, caps)?;
    let mut report = cert.to_json();
    report["alpha"] = json!(matrix_json(&alpha));
    report["scale"] = json!(num_traits::pow(num_bigint::BigInt::from(input.p), cert.scale_exponent as usize).to_string());
    Ok((EXIT_OK, report))
}

fn model_input(text: &str) -> Result<(ModelJson, crate::group::GroupModel), Failure> {
    let raw: ModelJson = serde_json::from_str(text)?;
    let model = raw.model()?;
    Ok((raw, model))
}

fn scale_report(text: &str) -> Report {
    let (raw, model) = model_input(text)?;
    let aut = raw.automorphism(&model)?;
    let s = scale(&model, &aut)?;
    let mut report = s.to_json();
    report["module"] = json!(format_rational(&module_of(&model, &aut)?));
    Ok((EXIT_OK, report))
}

fn module_report(text: &str) -> Report {
    let (raw, model) = model_input(text)?;
    let aut = raw.automorphism(&model)?;
    let s = format_rational(&scale(&model, &aut)?.value_rational());
    let si = format_rational(&scale(&model, &aut.inverse()?)?.value_rational());
    Ok((EXIT_OK, json!({ "module": format_rational(&module_of(&model, &aut)?), "scale": s, "scale_inverse": si })))
}

fn primes_report(text: &str) -> Report {
    let (raw, model) = model_input(text)?;
    let family = raw.family(&model)?;
    let spectrum = prime_spectrum(&model, &family)?;
    let content = local_prime_content(&model);
    Ok((
        EXIT_OK,
        json!({
            "spectrum": spectrum,
            "local_prime_content": content,
            "contained": spectrum.is_subset(&content),
            "uniscalar": spectrum.is_empty(),
        }),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SylowInput {
    group: GroupSpec,
    generators: Vec<Vec<u32>>,
    #[serde(default)]
    cap: Option<usize>,
}

fn sylow_report(text: &str) -> Report {
    let input: SylowInput = serde_json::from_str(text)?;
    let g = input.group.build()?;
    if input.generators.iter().any(|x| !g.contains(x)) {
        return Err(Failure::input("generator is not an element of the group (one index per factor prime)"));
    }
    let s = SubgroupHandle::with_cap(input.generators, input.cap.unwrap_or(DEFAULT_CLOSURE_CAP));
    let d = sylow_decompose(&g, &s)?;
    let parts: BTreeMap<String, Value> = d
        .parts
        .iter()
        .map(|(p, elems)| (p.to_string(), json!({ "order": elems.len(), "elements": elems })))
        .collect();
    let histogram: BTreeMap<String, usize> =
        order_histogram(&g, s.elements(&g)?).into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let code = if d.verified { EXIT_OK } else { EXIT_CERTIFICATE };
    Ok((
        code,
        json!({
            "primes": g.primes(),
            "group_order": g.order(),
            "subgroup_order": d.order,
            "parts": parts,
            "element_orders": histogram,
            "verified": d.verified,
        }),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantInput {
    p: u64,
    mats: Vec<Vec<Vec<String>>>,
}

fn invariant_report(text: &str, config: &RunConfig) -> Report {
    let input: InvariantInput = serde_json::from_str(text)?;
    check_prime(input.p)?;
    let mats = input.mats.iter().map(parse_matrix).collect::<Result<Vec<_>, _>>()?;
    let n = mats.first().map_or(0, |m| m.rows());
    match invariant_lattice(input.p, n, &mats, config.cap_budget)? {
        InvariantOutcome::Invariant(l) => Ok((EXIT_OK, json!({ "verdict": "invariant", "lattice": l.to_json() }))),
        InvariantOutcome::Unbounded(w) => Ok((
            EXIT_UNBOUNDED,
            json!({
                "verdict": "unbounded",
                "witness": w.word,
                "witness_valuation": w.word_valuation,
                "iterations": w.iterations,
                "lattice_valuation": w.lattice_valuation,
                "budget": config.cap_budget,
            }),
        )),
    }
}
