//! Command-line front end: `analyze`, `generate`, `verify-lemmas`.
//!
//! Exit codes: 0 certified, 1 input error, 2 undetermined, 3 inconsistent
//! (for `verify-lemmas`: at least one failed verdict).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::channel::{classify, ChannelFlags, SuperOperator};
use crate::decompose::{block_decomposition_seeded, verify_block_action};
use crate::io::{channel_to_json, parse_channel, vector_to_json};
use crate::numerics::TolerancePolicy;
use crate::oracles::sweep;
use crate::projector::{
    cesaro_projection, fixed_space_basis, spectral_norm_check, spectral_projection,
    support_subspace,
};
use crate::structure::{cptp_structure, global_structure, CaseKind, Status, StructureReport};
use crate::zoo::{self, ZooSpec};
use crate::{Error, Result};

pub const SCHEMA: u32 = 1;
const CESARO_MAX_TERMS: u64 = 1 << 24;

#[derive(Debug, Parser)]
#[command(
    name = "ptpfix",
    version,
    about = "Fixed spaces of positive trace-preserving maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Project, decompose and certify the structure of a channel file.
    Analyze(AnalyzeArgs),
    /// Write a generated channel in the JSON channel format.
    Generate(GenerateArgs),
    /// Run the lemma oracles on a channel file, one JSON verdict per line.
    VerifyLemmas(VerifyArgs),
}

#[derive(Debug, Args)]
struct TolArgs {
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_fixed: Option<f64>,
    #[arg(long)]
    tol_spec: Option<f64>,
    #[arg(long)]
    tol_cert: Option<f64>,
}

impl TolArgs {
    fn policy(&self) -> Result<TolerancePolicy> {
        let d = TolerancePolicy::default();
        TolerancePolicy::new(
            self.tol_rank.unwrap_or(d.tol_rank),
            self.tol_fixed.unwrap_or(d.tol_fixed),
            self.tol_spec.unwrap_or(d.tol_spec),
            self.tol_cert.unwrap_or(d.tol_cert),
        )
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    path: PathBuf,
    #[command(flatten)]
    tol: TolArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples drawn by the positivity falsifier.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    path: PathBuf,
    #[command(flatten)]
    tol: TolArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random probes per lemma, on top of the structural probes.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Depolarizing,
    Dephasing,
    AmplitudeDamping,
    Unitary,
    Transpose,
    TransposeSymmetrization,
    ConditionalExpectation,
    SpecCase,
    RandomCptp,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    kind: Kind,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated phases of a diagonal unitary.
    #[arg(long)]
    phases: Option<String>,
    /// Blocks `dimY:r1,r2;dimY:r1,...`.
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated spectrum.
    #[arg(long)]
    r: Option<String>,
    /// Cross-block shape `S0;S1` with 1-based comma-separated indices.
    #[arg(long, conflicts_with = "half")]
    partition: Option<String>,
    /// Use the symmetrizing cross-block shape.
    #[arg(long)]
    half: bool,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    kraus: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Analyze(a) => run_analyze(&a),
        Command::Generate(g) => run_generate(&g).map(|_| 0),
        Command::VerifyLemmas(v) => run_verify(&v),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn read_channel(path: &Path) -> Result<(SuperOperator, Option<Value>)> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_channel(&text).map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Input(format!("stdout: {e}")))
        }
    }
}

fn exit_code(status: Status) -> i32 {
    match status {
        Status::Certified => 0,
        Status::Undetermined => 2,
        Status::Inconsistent => 3,
    }
}

fn status_name(status: Status) -> &'static str {
    match status {
        Status::Certified => "certified",
        Status::Undetermined => "undetermined",
        Status::Inconsistent => "inconsistent",
    }
}

fn flags_json(f: &ChannelFlags) -> Value {
    json!({
        "trace_preserving": f.trace_preserving,
        "hermiticity_preserving": f.hermiticity_preserving,
        "completely_positive": f.completely_positive,
        "choi_min_eigenvalue": f.choi_min_eigenvalue,
        "positivity_witness": f.positivity_witness.as_ref().map(|w| json!({
            "value": w.value,
            "x": vector_to_json(&w.x),
            "z": vector_to_json(&w.z),
        })),
    })
}

fn structure_json(rep: &StructureReport) -> (Value, Value) {
    let classes = rep
        .classes
        .iter()
        .map(|c| {
            json!({
                "blocks": c.blocks.iter().map(|b| b + 1).collect::<Vec<_>>(),
                "l": c.l(),
                "m": c.m,
                "r": c.r,
                "case": c.case,
                "residual": c.residual,
                "note": c.note,
            })
        })
        .collect::<Vec<_>>();
    let form = rep.cptp_form.as_ref().map(|f| {
        json!({
            "factors": f.factors.iter().map(|x| json!({
                "dim_y": x.dim_y,
                "dim_z": x.dim_z,
                "rho": x.rho,
            })).collect::<Vec<_>>(),
            "residual": f.residual,
            "fixed_dim": f.fixed_dim,
        })
    });
    (Value::Array(classes), form.unwrap_or(Value::Null))
}

struct Preamble {
    psi: SuperOperator,
    flags: ChannelFlags,
    spectral_norm: f64,
    warnings: Vec<String>,
    /// Reasons the input cannot be analyzed as a PTP map.
    gate_failures: Vec<String>,
}

fn preamble(psi: SuperOperator, policy: &TolerancePolicy, samples: usize, seed: u64) -> Preamble {
    let flags = classify(&psi, policy).with_positivity_search(&psi, samples, seed, policy);
    let spectral_norm = spectral_norm_check(&psi);
    let mut warnings = Vec::new();
    if spectral_norm > 1.0 + 1e-8 {
        warnings.push(format!(
            "spectral norm {spectral_norm:.6} exceeds 1; the input is not a PTP map"
        ));
    }
    let mut gate_failures = Vec::new();
    if !flags.trace_preserving {
        gate_failures.push("input is not trace preserving".to_string());
    }
    if !flags.hermiticity_preserving {
        gate_failures.push("input is not Hermiticity preserving".to_string());
    }
    if let Some(w) = &flags.positivity_witness {
        gate_failures.push(format!(
            "input is not positive: a pure state maps to an operator with eigenvalue {:.6}",
            w.value
        ));
    }
    Preamble {
        psi,
        flags,
        spectral_norm,
        warnings,
        gate_failures,
    }
}

/// The projection to analyze: the input itself when idempotent, otherwise
/// its spectral projection.
fn projection_of(psi: &SuperOperator, policy: &TolerancePolicy) -> Result<(SuperOperator, bool)> {
    if psi.idempotency_residual() <= policy.tol_fixed {
        Ok((psi.clone(), false))
    } else {
        Ok((spectral_projection(psi, policy)?, true))
    }
}

fn tolerances_json(p: &TolerancePolicy) -> Value {
    serde_json::to_value(p).expect("plain data serializes")
}

fn run_analyze(args: &AnalyzeArgs) -> Result<i32> {
    let policy = args.tol.policy()?;
    let (psi, _) = read_channel(&args.path)?;
    let (report, status) = analyze(psi, &policy, args.samples, args.seed);
    let mut text = serde_json::to_string_pretty(&report).expect("plain data serializes");
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    Ok(exit_code(status))
}

/// Runs the analysis pipeline and returns the JSON report with its status.
pub fn analyze(
    psi: SuperOperator,
    policy: &TolerancePolicy,
    samples: usize,
    seed: u64,
) -> (Value, Status) {
    let pre = preamble(psi, policy, samples, seed);
    let mut report = Map::new();
    report.insert("schema".into(), json!(SCHEMA));
    report.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("seed".into(), json!(seed));
    report.insert("samples".into(), json!(samples));
    report.insert("tolerances".into(), tolerances_json(policy));
    report.insert("dim".into(), json!(pre.psi.dim()));
    report.insert("flags".into(), flags_json(&pre.flags));
    report.insert("spectral_norm".into(), json!(pre.spectral_norm));
    let mut warnings = pre.warnings.clone();
    let mut reasons: Vec<String> = pre.gate_failures.clone();
    let mut residuals = Map::new();
    let mut checks = Map::new();

    let status = if !reasons.is_empty() {
        Status::Inconsistent
    } else {
        match analyze_projection(
            &pre,
            policy,
            seed,
            &mut report,
            &mut residuals,
            &mut checks,
            &mut warnings,
        ) {
            Ok((status, r)) => {
                reasons.extend(r);
                status
            }
            Err(e) => {
                reasons.push(e.to_string());
                Status::Inconsistent
            }
        }
    };

    report.insert("residuals".into(), Value::Object(residuals));
    report.insert("cross_checks".into(), Value::Object(checks));
    report.insert("warnings".into(), json!(warnings));
    report.insert("reasons".into(), json!(reasons));
    report.insert("status".into(), json!(status_name(status)));
    (Value::Object(report), status)
}

#[allow(clippy::too_many_arguments)]
fn analyze_projection(
    pre: &Preamble,
    policy: &TolerancePolicy,
    seed: u64,
    report: &mut Map<String, Value>,
    residuals: &mut Map<String, Value>,
    checks: &mut Map<String, Value>,
    warnings: &mut Vec<String>,
) -> Result<(Status, Vec<String>)> {
    let psi = &pre.psi;
    let (phi, projected) = projection_of(psi, policy)?;
    report.insert("input_projected".into(), json!(projected));
    if projected {
        warnings
            .push("input is not idempotent; analyzed its projection onto the fixed space".into());
    }
    residuals.insert("idempotency".into(), json!(phi.idempotency_residual()));

    let fixed_dim = fixed_space_basis(psi, policy)?.dim();
    report.insert("fixed_dim".into(), json!(fixed_dim));

    let cesaro = cesaro_projection(psi, CESARO_MAX_TERMS, policy)?;
    let gap = (cesaro.phi.natural() - phi.natural()).norm();
    checks.insert(
        "cesaro".into(),
        json!({
            "terms": cesaro.terms,
            "residual": cesaro.residual,
            "converged": cesaro.converged,
            "distance": gap,
        }),
    );
    if gap > (10.0 * cesaro.residual).max(1e-6) {
        warnings.push(format!(
            "Cesàro mean differs from the spectral projection by {gap:.3e}"
        ));
    }

    let support = support_subspace(&phi, policy)?;
    report.insert("support_dim".into(), json!(support.dim()));
    let dec = block_decomposition_seeded(&phi, policy, seed)?;
    report.insert(
        "blocks".into(),
        Value::Array(
            dec.blocks
                .iter()
                .map(|b| json!({"dim": b.dim(), "spectrum": b.spectrum}))
                .collect(),
        ),
    );
    let action = verify_block_action(&phi, &dec, policy);
    residuals.insert("block_action".into(), json!(action.max_within()));
    residuals.insert("block_cross".into(), json!(action.max_cross()));

    let structure = if pre.flags.completely_positive {
        cptp_structure(&phi, &dec, policy)?
    } else {
        global_structure(&phi, &dec, policy)?
    };
    let (classes, form) = structure_json(&structure);
    let structural = structure
        .classes
        .iter()
        .filter(|c| c.case.is_some())
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    residuals.insert("structure".into(), json!(structural));
    if let Some(f) = &structure.cptp_form {
        residuals.insert("cptp_form".into(), json!(f.residual));
    }
    report.insert("classes".into(), classes);
    report.insert("cptp_form".into(), form);

    let mut reasons = structure.reasons.clone();
    let mut status = structure.status;
    if !action.pass {
        status = Status::Inconsistent;
        reasons.push("block action law fails".into());
    }
    Ok((status, reasons))
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Input(format!("--{what}: cannot parse {t:?}")))
        })
        .collect()
}

fn parse_partition(s: &str) -> Result<CaseKind> {
    let Some((a, b)) = s.split_once(';') else {
        return Err(Error::Input(format!(
            "--partition expects `S0;S1`, got {s:?}"
        )));
    };
    Ok(CaseKind::Partition {
        s0: parse_list("partition", a)?,
        s1: parse_list("partition", b)?,
    })
}

fn parse_blocks(s: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (dy, r) = t
                .split_once(':')
                .ok_or_else(|| Error::Input(format!("--blocks entry {t:?} lacks `dimY:`")))?;
            let dy = dy
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("--blocks: bad dimY {dy:?}")))?;
            Ok((dy, parse_list("blocks", r)?))
        })
        .collect()
}

fn need<T: Copy>(name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::Input(format!("--{name} is required for this kind")))
}

fn need_str<'a>(name: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::Input(format!("--{name} is required for this kind")))
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    let (psi, meta) = generate(args)?;
    emit(args.out.as_deref(), &channel_to_json(&psi, Some(&meta)))
}

fn generate(args: &GenerateArgs) -> Result<(SuperOperator, Value)> {
    let (spec, meta) = match args.kind {
        Kind::Depolarizing | Kind::Dephasing => {
            let (d, p) = (need("dim", args.dim)?, need("p", args.p)?);
            let (spec, name) = if matches!(args.kind, Kind::Depolarizing) {
                (ZooSpec::Depolarizing { d, p }, "depolarizing")
            } else {
                (ZooSpec::Dephasing { d, p }, "dephasing")
            };
            (Some(spec), json!({"kind": name, "dim": d, "p": p}))
        }
        Kind::AmplitudeDamping => {
            let p = need("p", args.p)?;
            (
                Some(ZooSpec::AmplitudeDamping { p }),
                json!({"kind": "amplitude-damping", "p": p}),
            )
        }
        Kind::Unitary => {
            let phases: Vec<f64> = parse_list("phases", need_str("phases", &args.phases)?)?;
            let psi = zoo::unitary_from_phases(&phases)?;
            return Ok((psi, json!({"kind": "unitary", "phases": phases})));
        }
        Kind::Transpose => {
            let d = need("dim", args.dim)?;
            (
                Some(ZooSpec::Transpose { d }),
                json!({"kind": "transpose", "dim": d}),
            )
        }
        Kind::TransposeSymmetrization => {
            let d = need("dim", args.dim)?;
            let psi = zoo::transpose_symmetrization(d)?;
            return Ok((psi, json!({"kind": "transpose-symmetrization", "dim": d})));
        }
        Kind::ConditionalExpectation => {
            let blocks = parse_blocks(need_str("blocks", &args.blocks)?)?;
            let meta = json!({"kind": "conditional-expectation", "blocks": blocks});
            (Some(ZooSpec::ConditionalExpectation { blocks }), meta)
        }
        Kind::SpecCase => {
            let m = need("m", args.m)?;
            let l = need("l", args.l)?;
            let r: Vec<f64> = parse_list("r", need_str("r", &args.r)?)?;
            let case = match (&args.partition, args.half) {
                (Some(p), false) => parse_partition(p)?,
                (None, true) => CaseKind::Half,
                _ => {
                    return Err(Error::Input(
                        "spec-case needs exactly one of --half or --partition".into(),
                    ))
                }
            };
            let meta = json!({"kind": "spec-case", "m": m, "l": l, "r": r, "case": case});
            (Some(ZooSpec::SpecCase { m, r, case, l }), meta)
        }
        Kind::RandomCptp => {
            let d = need("dim", args.dim)?;
            let kraus = need("kraus", args.kraus)?;
            let meta = json!({"kind": "random-cptp", "dim": d, "kraus": kraus, "seed": args.seed});
            (
                Some(ZooSpec::RandomCptp {
                    d,
                    kraus,
                    seed: args.seed,
                }),
                meta,
            )
        }
    };
    let psi = zoo::builtin_channel(&spec.expect("set above"))?;
    Ok((psi, meta))
}

fn run_verify(args: &VerifyArgs) -> Result<i32> {
    let policy = args.tol.policy()?;
    let (psi, _) = read_channel(&args.path)?;
    let lines = verify(psi, &policy, args.samples, args.seed);
    let failed = lines.iter().any(|l| l["status"] == "fail");
    let mut text = String::new();
    for l in &lines {
        text.push_str(&serde_json::to_string(l).expect("plain data serializes"));
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)?;
    Ok(if failed { 3 } else { 0 })
}

/// Runs the gates and the oracle sweep; returns one JSON object per line:
/// a header, the verdicts, and a summary.
pub fn verify(
    psi: SuperOperator,
    policy: &TolerancePolicy,
    samples: usize,
    seed: u64,
) -> Vec<Value> {
    let pre = preamble(psi, policy, samples.max(1000), seed);
    let mut lines = Vec::new();
    let mut verdicts = Vec::new();
    let gate = |name: &str, ok: bool, detail: Value| {
        let mut v =
            json!({"lemma": "gate", "probe": name, "status": if ok { "pass" } else { "fail" }});
        if !detail.is_null() {
            v["detail"] = detail;
        }
        v
    };
    verdicts.push(gate(
        "trace preserving",
        pre.flags.trace_preserving,
        Value::Null,
    ));
    verdicts.push(gate(
        "hermiticity preserving",
        pre.flags.hermiticity_preserving,
        Value::Null,
    ));
    verdicts.push(gate(
        "positivity falsifier",
        pre.flags.positivity_witness.is_none(),
        pre.flags
            .positivity_witness
            .as_ref()
            .map_or(Value::Null, |w| json!(w.value)),
    ));

    let mut projected = false;
    if pre.gate_failures.is_empty() {
        match projection_of(&pre.psi, policy).and_then(|(phi, p)| {
            projected = p;
            sweep(&phi, samples, seed, policy)
        }) {
            Ok(probes) => {
                for p in probes {
                    verdicts.push(serde_json::to_value(&p).expect("plain data serializes"));
                }
            }
            Err(e) => verdicts.push(json!({
                "lemma": "pipeline",
                "probe": "projection and decomposition",
                "status": "fail",
                "detail": e.to_string(),
            })),
        }
    }

    lines.push(json!({
        "schema": SCHEMA,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "samples": samples,
        "tolerances": tolerances_json(policy),
        "input_projected": projected,
    }));
    let count = |s: &str| verdicts.iter().filter(|v| v["status"] == s).count();
    let summary = json!({
        "summary": {"passed": count("pass"), "failed": count("fail"), "skipped": count("skipped")},
    });
    lines.extend(verdicts);
    lines.push(summary);
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn analyze_depolarizing() {
        let (rep, status) = analyze(zoo::depolarizing(3, 0.7).unwrap(), &policy(), 200, 0);
        assert_eq!(status, Status::Certified, "{rep:#}");
        assert_eq!(rep["fixed_dim"], 1);
        assert_eq!(rep["blocks"].as_array().unwrap().len(), 1);
        assert_eq!(rep["blocks"][0]["dim"], 3);
        for x in rep["blocks"][0]["spectrum"].as_array().unwrap() {
            assert!((x.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
        }
        assert_eq!(rep["input_projected"], true);
        assert_eq!(rep["schema"], 1);
    }

    #[test]
    fn analyze_transpose() {
        let (rep, status) = analyze(zoo::transpose(2).unwrap(), &policy(), 200, 0);
        assert_eq!(status, Status::Certified, "{rep:#}");
        assert_eq!(rep["flags"]["completely_positive"], false);
        assert_eq!(rep["fixed_dim"], 3);
        assert_eq!(rep["blocks"].as_array().unwrap().len(), 2);
        assert_eq!(rep["classes"][0]["case"]["kind"], "half");
    }

    #[test]
    fn analyze_planted_conditional_expectation() {
        let ce = zoo::conditional_expectation_projector(&[(2, vec![0.75, 0.25]), (1, vec![1.0])])
            .unwrap();
        let (rep, status) = analyze(ce, &policy(), 200, 0);
        assert_eq!(status, Status::Certified, "{rep:#}");
        assert_eq!(rep["fixed_dim"], 5);
        assert_eq!(rep["input_projected"], false);
        let mut dims: Vec<(u64, u64)> = rep["cptp_form"]["factors"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| (f["dim_y"].as_u64().unwrap(), f["dim_z"].as_u64().unwrap()))
            .collect();
        dims.sort();
        assert_eq!(dims, vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn certified_residuals_respect_their_tolerances() {
        let p = policy();
        for (name, psi) in zoo::corpus().unwrap() {
            let (rep, status) = analyze(psi, &p, 200, 0);
            if status != Status::Certified {
                continue;
            }
            let r = &rep["residuals"];
            assert!(r["idempotency"].as_f64().unwrap() <= p.tol_fixed, "{name}");
            for key in ["block_action", "block_cross", "structure"] {
                assert!(r[key].as_f64().unwrap() <= p.tol_cert, "{name} {key}");
            }
        }
    }

    #[test]
    fn gates_reject_non_ptp_inputs() {
        let p = policy();
        let scaled = SuperOperator::from_fn(2, |m| m.scale(2.0));
        let (rep, status) = analyze(scaled, &p, 100, 0);
        assert_eq!(status, Status::Inconsistent);
        assert!(!rep["warnings"].as_array().unwrap().is_empty());

        let refl = SuperOperator::from_fn(2, |m| m.transpose().scale(2.0) - m);
        let (rep, status) = analyze(refl, &p, 2000, 0);
        assert_eq!(status, Status::Inconsistent);
        assert!(
            rep["flags"]["positivity_witness"]["value"]
                .as_f64()
                .unwrap()
                < -0.9
        );
    }

    #[test]
    fn degenerate_half_is_undetermined() {
        let phi = zoo::spec_case_projector_unchecked(2, &[0.5, 0.5], &CaseKind::Half, 2).unwrap();
        let (_, status) = analyze(phi, &policy(), 200, 0);
        assert_eq!(status, Status::Undetermined);
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(
            parse_partition("1;2").unwrap(),
            CaseKind::Partition {
                s0: vec![1],
                s1: vec![2]
            }
        );
        assert_eq!(
            parse_partition("1,2;").unwrap(),
            CaseKind::Partition {
                s0: vec![1, 2],
                s1: vec![]
            }
        );
        assert!(parse_partition("1,2").is_err());
        assert_eq!(
            parse_blocks("2:0.75,0.25;1:1").unwrap(),
            vec![(2, vec![0.75, 0.25]), (1, vec![1.0])]
        );
        assert!(parse_blocks("2").is_err());
    }

    #[test]
    fn verify_reports_gate_failures() {
        let p = policy();
        let masked = zoo::schur_masked_identity(3, &[(0, 2)]);
        let lines = verify(masked, &p, 50, 0);
        assert!(lines.iter().any(|l| l["status"] == "fail"));
        let lines = verify(zoo::depolarizing(2, 0.5).unwrap(), &p, 50, 0);
        assert!(lines.iter().all(|l| l["status"] != "fail"));
        assert_eq!(lines[0]["input_projected"], true);
    }
}
