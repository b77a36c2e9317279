//! `interkernel`: batch front end for K-functionals, dilation indices and
//! Fredholm classification on real interpolation spaces.

mod input;
mod seqcheck;

use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use interkernel::classifier::{classify_sweep, factorize, Classification, RowModel, Verdict};
use interkernel::classifier::linalg::identity;
use interkernel::couples::{a_theta_element, DyadicGrid, PiecewisePower, WeightedCouple};
use interkernel::indices::{indices_of_profile, IndexSet};
use interkernel::kfunctional::{parse_q, profile_of, KProfile, ThetaQ};
use interkernel::worked::{hardy_kernel_profile, strip_thetas, HardyModel, StripModel};

use input::{check_thetas, parse_hardy, parse_model_json, parse_theta_range, ModelSpec};

#[derive(Parser)]
#[command(name = "interkernel", version, about = "Fredholm classification on real interpolation spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an operator at one or more values of θ.
    Classify(ModelArgs),
    /// Dilation indices of an element or of an operator kernel.
    Indices(ElementArgs),
    /// K-profile of an element on the dyadic grid.
    Kfun(ElementArgs),
    /// Identity and bound suites for the sequence-space operators.
    Seqcheck(SeqArgs),
    /// Classification table for `I − H` on power-weighted Lᵖ.
    HardyTable(HardyTableArgs),
    /// Classification table for the Laplace operator on a strip.
    StripTable(StripArgs),
    /// Split a Fredholm operator into class F1, F2, F3 factors.
    Factorize(ModelArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// `q` in `[1, ∞)`, or `inf`.
    #[arg(long, default_value = "2")]
    q: String,
    /// Dyadic grid `kmin:kmax` (default: $INTERKERNEL_GRID, else -80:80).
    #[arg(long)]
    grid: Option<String>,
    /// Absolute tolerance for boundary decisions.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn q(&self) -> Result<f64> {
        Ok(parse_q(&self.q)?)
    }

    fn grid(&self) -> Result<DyadicGrid> {
        Ok(match &self.grid {
            Some(s) => DyadicGrid::parse(s)?,
            None => DyadicGrid::from_env()?,
        })
    }
}

#[derive(Args)]
struct Source {
    /// Hardy model `a0=..,ainf=..,b0=..,binf=..`.
    #[arg(long)]
    hardy: Option<String>,
    /// Exponent `p` of the Hardy model.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Model description file (JSON).
    #[arg(long)]
    input: Option<String>,
    /// Model description given inline (JSON).
    #[arg(long)]
    json: Option<String>,
}

impl Source {
    /// Raw JSON from `--input` or `--json`.
    fn text(&self) -> Result<String> {
        match (&self.input, &self.json) {
            (Some(path), None) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
            (None, Some(t)) => Ok(t.clone()),
            _ => bail!("give exactly one of --input, --json"),
        }
    }

    fn model(&self) -> Result<ModelSpec> {
        match (&self.hardy, &self.input, &self.json) {
            (Some(h), None, None) => Ok(ModelSpec::Hardy(parse_hardy(h, self.p)?)),
            (None, _, _) if self.input.is_some() != self.json.is_some() => parse_model_json(&self.text()?),
            (None, None, None) => bail!("no model given (use --hardy, --input or --json)"),
            _ => bail!("give exactly one of --hardy, --input, --json"),
        }
    }
}

#[derive(Args)]
struct ThetaArgs {
    /// Values of θ, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<f64>,
    /// Sweep `a:b:step`.
    #[arg(long)]
    theta_range: Option<String>,
}

impl ThetaArgs {
    fn values(&self, extra: &[f64]) -> Result<Vec<f64>> {
        let mut v = self.theta.clone();
        if let Some(r) = &self.theta_range {
            v.extend(parse_theta_range(r)?);
        }
        if v.is_empty() {
            v.extend_from_slice(extra);
        }
        check_thetas(&v)?;
        Ok(v)
    }
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    thetas: ThetaArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ElementArgs {
    #[command(flatten)]
    source: Source,
    /// Use the element `a_θ` of the reference couple instead of a model.
    #[arg(long)]
    a_theta: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SeqArgs {
    /// θ of the growth check (profile `t^θ`).
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Largest window `2^max_pow` of the growth check.
    #[arg(long, default_value_t = 12)]
    max_pow: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct HardyTableArgs {
    /// Hardy model `a0=..,ainf=..,b0=..,binf=..`.
    #[arg(long, default_value = "a0=0.5,ainf=0.25,b0=-0.5,binf=-0.75")]
    hardy: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[command(flatten)]
    thetas: ThetaArgs,
    /// Also write the K-profile of `f_*` as CSV here.
    #[arg(long)]
    profile_out: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StripArgs {
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    beta0: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    beta1: f64,
    /// Sobolev order (recorded only).
    #[arg(long, default_value_t = 2)]
    l: u32,
    #[command(flatten)]
    thetas: ThetaArgs,
    #[command(flatten)]
    common: Common,
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// `theta,verdict,n,d` rows; `n`, `d` empty when not Fredholm.
fn verdict_csv(rows: &[Classification]) -> String {
    let mut out = String::from("theta,verdict,n,d\n");
    for c in rows {
        let (n, d) = c
            .verdict
            .counts()
            .map_or((String::new(), String::new()), |(n, d)| (n.to_string(), d.to_string()));
        let _ = writeln!(out, "{},{},{n},{d}", fmt_f(c.tq.theta()), c.verdict.label());
    }
    out
}

#[derive(Serialize)]
struct SweepReport<'a> {
    model: &'a str,
    q: String,
    classifications: &'a [Classification],
}

/// Exit status of a sweep: 2 when any verdict is Boundary.
fn sweep_status(rows: &[Classification]) -> u8 {
    if rows.iter().any(|c| matches!(c.verdict, Verdict::Boundary { .. })) {
        2
    } else {
        0
    }
}

fn write_sweep(common: &Common, label: &str, rows: &[Classification]) -> Result<u8> {
    let text = match common.format {
        Format::Csv => verdict_csv(rows),
        Format::Json => to_json(&SweepReport {
            model: label,
            q: common.q.clone(),
            classifications: rows,
        })?,
    };
    emit(common, &text)?;
    Ok(sweep_status(rows))
}

fn cmd_classify(a: &ModelArgs) -> Result<u8> {
    let q = a.common.q()?;
    let model = a.source.model()?.build(a.common.grid()?)?;
    let thetas = a.thetas.values(&[])?;
    let rows = classify_sweep(&model, q, &thetas)?;
    write_sweep(&a.common, &model.label, &rows)
}

fn cmd_factorize(a: &ModelArgs) -> Result<u8> {
    let q = a.common.q()?;
    let model = a.source.model()?.build(a.common.grid()?)?;
    let thetas = a.thetas.values(&[])?;
    let reports = thetas
        .iter()
        .map(|&t| Ok(factorize(&model, ThetaQ::new(t, q)?)?))
        .collect::<Result<Vec<_>>>()?;
    emit(&a.common, &to_json(&reports)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct IndexReport {
    element: String,
    indices: IndexSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<KProfile>,
}

/// The element named on the command line with its couple.
fn element_profile(a: &ElementArgs, grid: DyadicGrid) -> Result<Option<(String, KProfile)>> {
    if let Some(theta) = a.a_theta {
        let f = a_theta_element(theta)?;
        let p = profile_of(&WeightedCouple::reference_l1(), &f, grid)?;
        return Ok(Some((format!("a_theta (theta = {theta}) in the reference couple"), p)));
    }
    match a.source.model()? {
        ModelSpec::Hardy(h) => Ok(Some(("f_* = 1 in the Hardy couple".into(), hardy_kernel_profile(&h, grid)?))),
        _ => Ok(None),
    }
}

fn cmd_indices(a: &ElementArgs) -> Result<u8> {
    let grid = a.common.grid()?;
    let report = match element_profile(a, grid)? {
        Some((element, prof)) => IndexReport {
            element,
            indices: indices_of_profile(&prof)?,
            profile: Some(prof),
        },
        None => {
            let model = a.source.model()?.build(grid)?;
            let rows = RowModel::from_kernel(&model.kernel)?;
            IndexReport {
                element: format!("kernel of {} (dimension {})", model.label, rows.dim),
                indices: rows.subspace_indices(&identity(rows.dim)),
                profile: None,
            }
        }
    };
    let text = match (a.common.format, &report.profile) {
        (Format::Csv, Some(p)) => p.to_csv(),
        (Format::Csv, None) => bail!("--format csv needs an element with a K-profile"),
        (Format::Json, _) => to_json(&report)?,
    };
    emit(&a.common, &text)?;
    Ok(0)
}

#[derive(serde::Deserialize)]
struct ElementInput {
    couple: WeightedCouple,
    element: PiecewisePower,
}

fn cmd_kfun(a: &ElementArgs) -> Result<u8> {
    let grid = a.common.grid()?;
    let prof = if a.a_theta.is_some() || a.source.hardy.is_some() {
        element_profile(a, grid)?
            .map(|(_, p)| p)
            .ok_or_else(|| anyhow!("no element given"))?
    } else {
        let inp: ElementInput = serde_json::from_str(&a.source.text()?)
            .map_err(|e| anyhow!("invalid element description: {e}"))?;
        inp.couple.validate()?;
        profile_of(&inp.couple, &inp.element, grid)?
    };
    let text = match a.common.format {
        Format::Csv => prof.to_csv(),
        Format::Json => to_json(&prof)?,
    };
    emit(&a.common, &text)?;
    Ok(0)
}

fn with_breakpoints(mut thetas: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    thetas.extend_from_slice(extra);
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    thetas
}

fn cmd_hardy_table(a: &HardyTableArgs) -> Result<u8> {
    let q = a.common.q()?;
    let h: HardyModel = parse_hardy(&a.hardy, a.p)?;
    let default: Vec<f64> = (1..=19).map(|k| k as f64 / 20.0).collect();
    let thetas = with_breakpoints(a.thetas.values(&default)?, &[h.theta_zero(), h.theta_inf()]);
    if let Some(path) = &a.profile_out {
        let prof = hardy_kernel_profile(&h, a.common.grid()?)?;
        std::fs::write(path, prof.to_csv()).with_context(|| format!("writing {path}"))?;
    }
    let rows = interkernel::worked::hardy_classify_sweep(&h, q, &thetas)?;
    write_sweep(&a.common, "I - H", &rows)
}

fn cmd_strip_table(a: &StripArgs) -> Result<u8> {
    let q = a.common.q()?;
    let s = StripModel::new(a.alpha, a.beta0, a.beta1, a.l)?;
    let breaks: Vec<f64> = strip_thetas(&s)?.into_iter().map(|(_, t)| t).collect();
    let default: Vec<f64> = (1..=21).map(|k| k as f64 / 22.0).collect();
    let thetas = with_breakpoints(a.thetas.values(&default)?, &breaks);
    let model = interkernel::worked::strip_model(&s, a.common.grid()?)?;
    let rows = classify_sweep(&model, q, &thetas)?;
    write_sweep(&a.common, &model.label, &rows)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Indices(a) => cmd_indices(a),
        Command::Kfun(a) => cmd_kfun(a),
        Command::Seqcheck(a) => seqcheck::run(a),
        Command::HardyTable(a) => cmd_hardy_table(a),
        Command::StripTable(a) => cmd_strip_table(a),
        Command::Factorize(a) => cmd_factorize(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
