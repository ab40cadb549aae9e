//! Command-line front end: argument parsing, dispatch and JSON reports.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance;
use crate::algebra::{AlgebraSpec, ParamSpec, Substitution, TruncatedAlgebra};
use crate::derham::{cohomology, is_exact, quotient_class, verify_forms_sequence, CohomologyOptions, ExactnessCertificate};
use crate::error::{Error, Result};
use crate::forms::{forms_rank, relative_basis_bounded, Engine, RelativeIdealSpec};
use crate::ksymbols::{bloch_with, filtration_class, filtration_strictness, verify_key_identity, SlotRule};
use crate::parse::{parse_algebra_json, parse_form, parse_poly, parse_symbol, AlgebraFile, Scope};
use crate::poly::Var;
use crate::singularities::{singularity_report, DEFAULT_MAX_TRUNCATION};

pub const WORKERS_ENV: &str = "NILBLOCH_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "nilbloch", version, about = "Relative de Rham cohomology and Bloch maps of nilpotent extensions")]
pub struct Cli {
    /// Also print a plain-text summary on stderr.
    #[arg(long, global = true)]
    pub summary: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct AlgebraArgs {
    /// JSON algebra file.
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    /// Truncation degree (overrides the file).
    #[arg(long = "N")]
    pub bound: Option<u32>,
    /// Number of nilpotent generators (overrides the file).
    #[arg(long = "m")]
    pub nilpotents: Option<usize>,
    /// Extra parameter, `name` or `name:inv` for an invertible one.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Ideal generator; repeatable. Without any, the ideal is `(t)^N`.
    #[arg(long = "ideal")]
    pub ideal: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EngineArg {
    Graded,
    Whole,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SlotArg {
    First,
    Last,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relative de Rham cohomology table.
    Cohom {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// `full`, `power(k)`, `jacobian(f)` or generators separated by `;`.
        #[arg(long, default_value = "full")]
        rel: String,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        #[arg(long, default_value_t = 1)]
        param_bound: i32,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Fail unless every group vanishes.
        #[arg(long)]
        expect_vanishing: bool,
    },
    /// Bloch class of a symbol sum.
    Bloch {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        symbol: String,
        #[arg(long, value_enum, default_value = "first")]
        slot: SlotArg,
        /// Fail unless the class equals the class of this form.
        #[arg(long)]
        expect: Option<String>,
        #[arg(long)]
        expect_zero: bool,
    },
    /// `(dh + hd) w = i w` on basis forms of `Q[params][t]/t^N`.
    VerifyHomotopy {
        #[arg(long = "N")]
        bound: u32,
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Bloch classes of random Steinberg elements vanish.
    VerifySteinberg {
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// `(i+j) B{1+a t^i, 1+b t^j}` against `t^(i+j) (i a db - j b da)`, with a checked primitive
    VerifyKeyIdentity {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
    },
    /// Vanishing for `i + j >= p`, or the full range and strictness witness.
    VerifyFiltration {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        i: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
    },
    /// `sigma: t -> t^(N-1)` between relative forms of `R_2` and `R_N`.
    VerifySigma {
        #[arg(long = "N")]
        bound: u32,
        /// Adjoin an invertible parameter `b` on both sides.
        #[arg(long)]
        parametric: bool,
    },
    /// Long exact sequence for nested ideals `J` inside `I`.
    VerifySequence {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long = "J")]
        small: String,
        #[arg(long = "I", default_value = "full")]
        large: String,
        #[arg(long)]
        n: usize,
    },
    /// Milnor and Tyurina numbers with the de Rham cross-check.
    Singular {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = DEFAULT_MAX_TRUNCATION)]
        n_max: u32,
    },
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub algebra: Option<Value>,
    pub passed: bool,
    pub verdicts: Vec<Verdict>,
    pub data: Value,
    pub elapsed_ms: u128,
}

impl RunReport {
    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}\n", self.command, if self.passed { "PASS" } else { "FAIL" });
        for v in &self.verdicts {
            s.push_str(&format!("  [{}] {}\n", if v.passed { "ok" } else { "FAIL" }, v.name));
        }
        s
    }
}

fn verdict(name: impl Into<String>, passed: bool) -> Verdict {
    Verdict { name: name.into(), passed }
}

fn parse_param(s: &str) -> ParamSpec {
    match s.split_once(':') {
        Some((name, flag)) => ParamSpec { name: name.to_string(), invertible: matches!(flag, "inv" | "invertible" | "true") },
        None => ParamSpec { name: s.to_string(), invertible: false },
    }
}

impl AlgebraArgs {
    pub fn to_file(&self) -> Result<AlgebraFile> {
        let mut file = match &self.algebra {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedSpec(format!("{}: {e}", path.display())))?;
                parse_algebra_json(&text)?
            }
            None => AlgebraFile::default(),
        };
        if let Some(n) = self.bound {
            file.bound = n;
        }
        if let Some(m) = self.nilpotents {
            file.nilpotents = m;
        }
        file.params.extend(self.params.iter().map(|p| parse_param(p)));
        file.ideal.extend(self.ideal.iter().cloned());
        if file.nilpotents == 0 || file.bound == 0 {
            return Err(Error::MalformedSpec("need --algebra or both --N and --m".into()));
        }
        Ok(file)
    }
}

/// `full`, `power(k)`, `jacobian(f)` or `g1; g2; ..`.
pub fn parse_relative(text: &str, spec: &AlgebraSpec) -> Result<RelativeIdealSpec> {
    let t = text.trim();
    let inner = |prefix: &str| t.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')).map(str::trim);
    if t.eq_ignore_ascii_case("full") {
        return Ok(RelativeIdealSpec::Full);
    }
    if let Some(k) = inner("power(") {
        return k.parse().map(RelativeIdealSpec::Power).map_err(|_| Error::InvalidRelative(t.to_string()));
    }
    let scope = Scope::of_spec(spec);
    if let Some(f) = inner("jacobian(") {
        let f = parse_poly(f, &scope)?;
        return Ok(RelativeIdealSpec::Explicit((0..spec.nilpotents).map(|i| f.derivative(Var::Nil(i))).collect()));
    }
    let gens = t.split(';').map(|g| parse_poly(g, &scope)).collect::<Result<Vec<_>>>()?;
    Ok(RelativeIdealSpec::Explicit(gens))
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaRow {
    pub degree: usize,
    pub dim_source: usize,
    pub dim_target: usize,
    pub rank: usize,
    pub images: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub bound: u32,
    pub rows: Vec<SigmaRow>,
    pub bijective: bool,
}

/// Pushforward along `t -> t^(N-1)` from `Omega_{R_2,(t)}` to
/// `Omega_{R_N,(t^(N-1))}` in degrees 0, 1, 2, checked by exact ranks.
pub fn verify_sigma(n: u32, parametric: bool) -> Result<SigmaReport> {
    if n < 2 {
        return Err(Error::TooShallow);
    }
    let mk = |bound| {
        let spec = AlgebraSpec::truncated(1, bound);
        TruncatedAlgebra::new(if parametric { spec.param("b", true) } else { spec })
    };
    let source = mk(2)?;
    let target = mk(n)?;
    let sigma = Substitution::new(&source, &target, [("t", target.t(0).pow(n - 1))])?;
    let target_rel = RelativeIdealSpec::Power(n - 1);
    let mut rows = Vec::new();
    let mut bijective = true;
    for deg in 0..=2 {
        let src = relative_basis_bounded(&source, &RelativeIdealSpec::Full, deg, 1)?;
        let tgt = relative_basis_bounded(&target, &target_rel, deg, 1)?;
        let images = src.iter().map(|w| w.pushforward(&sigma)).collect::<Result<Vec<_>>>()?;
        let rank = forms_rank(&images);
        let mut joint = images.clone();
        joint.extend(tgt.iter().cloned());
        let contained = forms_rank(&joint) == tgt.len();
        bijective &= contained && rank == src.len() && rank == tgt.len();
        rows.push(SigmaRow {
            degree: deg,
            dim_source: src.len(),
            dim_target: tgt.len(),
            rank,
            images: images.iter().map(|w| w.to_string()).collect(),
        });
    }
    Ok(SigmaReport { bound: n, rows, bijective })
}

fn echo(file: &AlgebraFile) -> Value {
    serde_json::to_value(file).unwrap_or(Value::Null)
}

fn dispatch(cmd: &Command) -> Result<(Option<Value>, Vec<Verdict>, Value)> {
    Ok(match cmd {
        Command::Cohom { alg, rel, engine, param_bound, max_degree, expect_vanishing } => {
            let file = alg.to_file()?;
            let a = file.build()?;
            let rel = parse_relative(rel, a.spec())?;
            let opts = CohomologyOptions {
                max_degree: *max_degree,
                param_bound: *param_bound,
                engine: engine.map(|e| match e {
                    EngineArg::Graded => Engine::Graded,
                    EngineArg::Whole => Engine::Whole,
                }),
            };
            let rep = cohomology(&a, &rel, &opts)?;
            let verdicts = if *expect_vanishing { vec![verdict("all groups vanish", rep.all_zero())] } else { Vec::new() };
            (Some(echo(&file)), verdicts, serde_json::to_value(&rep).unwrap_or(Value::Null))
        }
        Command::Bloch { alg, symbol, slot, expect, expect_zero } => {
            let file = alg.to_file()?;
            let a = file.build()?;
            let s = parse_symbol(symbol, &a)?;
            let rule = match slot {
                SlotArg::First => SlotRule::First,
                SlotArg::Last => SlotRule::Last,
            };
            let b = bloch_with(&s, rule)?;
            let witness = match is_exact(&b.raw, &RelativeIdealSpec::Full, None)? {
                ExactnessCertificate::NotExact { witness } => Some(witness.display(&a)),
                ExactnessCertificate::Exact { .. } => None,
            };
            let mut verdicts = Vec::new();
            if let Some(e) = expect {
                let target = quotient_class(&parse_form(e, &a)?, &RelativeIdealSpec::Full)?;
                verdicts.push(verdict(format!("class equals {e}"), target == b.representative));
            }
            if *expect_zero {
                verdicts.push(verdict("class is zero", b.is_zero()));
            }
            let data = json!({
                "symbol": s.to_string(),
                "raw": b.raw.to_string(),
                "representative": b.representative.to_string(),
                "zero": b.is_zero(),
                "witness": witness,
                "base_component": b.base_symbol().to_string(),
            });
            (Some(echo(&file)), verdicts, data)
        }
        Command::VerifyHomotopy { bound, params } => {
            let mut spec = AlgebraSpec::truncated(1, *bound);
            spec.params = params.iter().map(|p| parse_param(p)).collect();
            let a = TruncatedAlgebra::new(spec)?;
            let (checked, failed) = acceptance::homotopy_identity(&a, 2)?;
            let verdicts = vec![verdict(format!("{checked} basis forms"), failed == 0 && checked > 0)];
            (None, verdicts, json!({ "checked": checked, "failed": failed }))
        }
        Command::VerifySteinberg { instances, seed } => {
            let (n, failures) = acceptance::steinberg_batch(*instances, *seed)?;
            (None, vec![verdict(format!("{n} instances vanish"), failures.is_empty())], json!({ "failures": failures }))
        }
        Command::VerifyKeyIdentity { i, j } => {
            let r = verify_key_identity(*i, *j)?;
            let primitive = match &r.certificate {
                ExactnessCertificate::Exact { primitive } => Some(primitive.to_string()),
                ExactnessCertificate::NotExact { .. } => None,
            };
            let data = json!({
                "difference": r.difference.to_string(),
                "exact": r.certificate.is_exact(),
                "primitive": primitive,
                "certificate_checked": r.certificate_checked,
            });
            (None, vec![verdict(format!("key identity ({i},{j})"), r.passed)], data)
        }
        Command::VerifyFiltration { p, i, j } => match (i, j) {
            (Some(i), Some(j)) => {
                let r = filtration_class(*p, *i, *j)?;
                let expected_zero = i + j >= *p;
                let ok = r.certificate_checked && r.zero == expected_zero;
                let data = json!({ "representative": r.representative.to_string(), "zero": r.zero });
                (None, vec![verdict(format!("class zero iff i+j >= p ({i},{j})"), ok)], data)
            }
            _ => {
                let mut verdicts = Vec::new();
                for s in *p..=*p + 2 {
                    for i in 1..s {
                        verdicts.push(verdict(format!("({i},{}) vanishes", s - i), filtration_class(*p, i, s - i)?.zero));
                    }
                }
                let strict = if *p >= 3 { filtration_strictness(*p)? } else { None };
                if *p >= 3 {
                    verdicts.push(verdict("strictness witness", strict.is_some()));
                }
                let data = json!({
                    "witness_pair": strict.as_ref().map(|r| (r.i, r.j)),
                    "witness_class": strict.as_ref().map(|r| r.representative.to_string()),
                });
                (None, verdicts, data)
            }
        },
        Command::VerifySigma { bound, parametric } => {
            let r = verify_sigma(*bound, *parametric)?;
            (None, vec![verdict("sigma bijective", r.bijective)], serde_json::to_value(&r).unwrap_or(Value::Null))
        }
        Command::VerifySequence { alg, small, large, n } => {
            let file = alg.to_file()?;
            let a = file.build()?;
            let j = parse_relative(small, a.spec())?;
            let i = parse_relative(large, a.spec())?;
            let r = verify_forms_sequence(&a, &j, &i, *n)?;
            let verdicts = vec![
                verdict("exact at inner terms", r.exact_at.iter().all(|b| *b)),
                verdict("surjective end", r.surjective_end),
                verdict("complexes additive", r.complexes_additive),
                verdict("euler characteristic", r.euler_characteristic_ok),
            ];
            (Some(echo(&file)), verdicts, serde_json::to_value(&r).unwrap_or(Value::Null))
        }
        Command::Singular { poly, n_max } => {
            let m = (1..=9).rev().find(|i| poly.contains(&format!("t{i}"))).unwrap_or(1);
            let f = parse_poly(poly, &Scope::nil_only(m))?;
            let r = singularity_report(&f, *n_max)?;
            let verdicts = vec![verdict("h_dim = mu - tau", r.h_dim == r.mu - r.tau)];
            (None, verdicts, serde_json::to_value(&r).unwrap_or(Value::Null))
        }
        Command::Selftest => {
            let results = acceptance::run_all();
            let verdicts = results.iter().map(|c| verdict(format!("{} {}", c.id, c.name), c.passed)).collect();
            (None, verdicts, serde_json::to_value(&results).unwrap_or(Value::Null))
        }
    })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Cohom { .. } => "cohom",
        Command::Bloch { .. } => "bloch",
        Command::VerifyHomotopy { .. } => "verify-homotopy",
        Command::VerifySteinberg { .. } => "verify-steinberg",
        Command::VerifyKeyIdentity { .. } => "verify-key-identity",
        Command::VerifyFiltration { .. } => "verify-filtration",
        Command::VerifySigma { .. } => "verify-sigma",
        Command::VerifySequence { .. } => "verify-sequence",
        Command::Singular { .. } => "singular",
        Command::Selftest => "selftest",
    }
}

/// Run one parsed command line. Errors in the input surface as `Err`.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let start = Instant::now();
    let (algebra, verdicts, data) = dispatch(&cli.command)?;
    Ok(RunReport {
        command: command_name(&cli.command).to_string(),
        algebra,
        passed: verdicts.iter().all(|v| v.passed),
        verdicts,
        data,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            if cli.summary {
                eprint!("{}", report.summary());
            }
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CrossCheckFailed { .. } => 1,
                _ => 2,
            }
        }
    }
}
