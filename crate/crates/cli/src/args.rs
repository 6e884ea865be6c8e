use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use psiosc::lab::LabRegime;
use psiosc::regions2d::Method;
use psiosc::Rat;

/// Exact rational, from `p/q`, an integer or a decimal string.
pub fn rat(s: &str) -> Result<Rat, String> {
    s.parse().map_err(|e: psiosc::Error| e.to_string())
}

fn int_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two integers a,b, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Vertex `x,y`.
fn vertex(v: &str) -> Result<(Rat, Rat), String> {
    let (a, b) = v.split_once(',').ok_or_else(|| format!("vertex {v:?} is not x,y"))?;
    Ok((rat(a.trim())?, rat(b.trim())?))
}

fn lab_regime(s: &str) -> Result<LabRegime, String> {
    s.parse().map_err(|e: psiosc::Error| e.to_string())
}

fn method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: psiosc::Error| e.to_string())
}

/// `m x n` shape such as `1x2` or `3x1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub m: usize,
    pub n: usize,
}

fn shape(s: &str) -> Result<Shape, String> {
    let bad = || format!("expected a shape mxn such as 1x2, got {s:?}");
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    let (m, n) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if m == 0 || n == 0 {
        return Err(bad());
    }
    Ok(Shape { m, n })
}

#[derive(Parser, Debug)]
#[command(
    name = "psiosc",
    version,
    about = "Irrationality measure functions and their oscillation"
)]
pub struct Cli {
    /// JSON file whose fields stand for flags of the same name; flags given
    /// on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads; the output does not depend on it.
    #[arg(long, global = true, env = "PSIOSC_THREADS")]
    pub threads: Option<usize>,
    /// Print the full report as JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print extra detail.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// ψ_Θ(t) at one t, or the records up to t with --sweep.
    #[command(args_override_self = true)]
    Psi(PsiArgs),
    /// Sign changes of ψ_Θ − ψ_Θ′ up to t.
    #[command(args_override_self = true)]
    Signs(SignsArgs),
    /// μ(M̄ₖ ∩ S) for a square S ⊆ [0,1]² in the linear-form regime.
    #[command(args_override_self = true)]
    Measure2d(Measure2dArgs),
    /// μ(M̄ₖ ∩ S) for a cube S ⊆ [0,1]^m in the simultaneous regime.
    #[command(name = "measure-md", args_override_self = true)]
    MeasureMd(MeasureMdArgs),
    /// Exact or statistical check of one estimate.
    #[command(args_override_self = true)]
    Lemma(LemmaArgs),
    /// Random pairs: sign changes, Ψₖ/Φₖ hits or the density of Ψₖ.
    #[command(args_override_self = true)]
    Experiment(ExperimentArgs),
    /// Re-render an experiment JSON report as CSV.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ThetaArgs {
    /// Matrix shape m x n.
    #[arg(long, value_parser = shape, default_value = "1x1")]
    pub regime: Shape,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    pub alpha: Option<Rat>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    pub beta: Option<Rat>,
    /// All entries, row by row, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = rat, allow_hyphen_values = true)]
    pub entries: Option<Vec<Rat>>,
}

#[derive(Args, Debug)]
pub struct PsiArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[arg(long)]
    pub t: u64,
    /// List every record ψ(1), …, ψ(t) where the value drops.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SignsArgs {
    #[arg(long, value_parser = shape)]
    pub regime: Shape,
    /// Entries of Θ.
    #[arg(long, required = true, value_delimiter = ',', value_parser = rat, allow_hyphen_values = true)]
    pub theta: Vec<Rat>,
    /// Entries of Θ′.
    #[arg(long, required = true, value_delimiter = ',', value_parser = rat, allow_hyphen_values = true)]
    pub theta2: Vec<Rat>,
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Measure2dArgs {
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_parser = rat)]
    pub eps: Rat,
    /// Side of the square.
    #[arg(long, value_parser = rat, default_value = "1")]
    pub side: Rat,
    /// Lower-left corner; the square is centered in [0,1]² by default.
    #[arg(long, value_delimiter = ',', value_parser = rat)]
    pub corner: Option<Vec<Rat>>,
    #[arg(long, value_parser = method, default_value = "exact")]
    pub method: Method,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MeasureMdArgs {
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_parser = rat)]
    pub eps: Rat,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, value_parser = rat, default_value = "1")]
    pub side: Rat,
    #[arg(long, value_delimiter = ',', value_parser = rat)]
    pub corner: Option<Vec<Rat>>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    /// One of 1, 2, 3, 4, 5, 6, 7, 11, 12, 13, 14, jarnik, pick, totient.
    pub id: String,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_parser = rat)]
    pub eps: Option<Rat>,
    /// Side of the square or cube S.
    #[arg(long, value_parser = rat)]
    pub lam: Option<Rat>,
    #[arg(long, value_parser = rat)]
    pub delta: Option<Rat>,
    #[arg(long, value_delimiter = ',', value_parser = rat)]
    pub corner: Option<Vec<Rat>>,
    /// First integer pair (x₁, x₂).
    #[arg(long, value_parser = int_pair, allow_hyphen_values = true)]
    pub x: Option<(i64, i64)>,
    /// Second integer pair (y₁, y₂).
    #[arg(long, value_parser = int_pair, allow_hyphen_values = true)]
    pub y: Option<(i64, i64)>,
    /// Convex polygon `x,y;x,y;…`.
    #[arg(long, value_delimiter = ';', value_parser = vertex, allow_hyphen_values = true)]
    pub vertices: Option<Vec<(Rat, Rat)>>,
    #[arg(long)]
    pub q1: Option<u64>,
    #[arg(long)]
    pub q2: Option<u64>,
    /// Truncation point of the totient series.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, value_parser = method, default_value = "fiber-mc")]
    pub method: Method,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Classify this many random pairs of Tr_k instead of all of them.
    #[arg(long)]
    pub sample: Option<u64>,
    /// Also check the exact first sum of the lower bound (lemma 14).
    #[arg(long)]
    pub first_sum: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Sign changes only.
    Signs,
    /// Sign changes and Ψₖ/Φₖ hits along the ladder.
    Hits,
    /// Empirical density of Ψₖ at one k.
    Density,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long, value_parser = lab_regime)]
    pub regime: LabRegime,
    #[arg(long, value_parser = rat)]
    pub eps: Rat,
    #[arg(long, value_parser = rat, default_value = "1")]
    pub lam: Rat,
    #[arg(long, value_parser = rat, default_value = "1/10")]
    pub delta: Rat,
    #[arg(long, value_enum, default_value = "hits")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1000)]
    pub t: u64,
    #[arg(long, default_value_t = 100)]
    pub pairs: u64,
    #[arg(long, default_value_t = 128)]
    pub denom_bits: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Comma separated k ladder; powers of two by default.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<u64>>,
    /// Decay rate e of the threshold ε·k^(−e).
    #[arg(long, value_parser = rat)]
    pub exponent: Option<Rat>,
    /// k of the density mode.
    #[arg(long, default_value_t = 1000)]
    pub k: u64,
    /// Sampled pairs of the density mode.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// JSON report written by `experiment`.
    pub input: PathBuf,
    /// Emit the (pair, t) change table instead of the (pair, k) hit table.
    #[arg(long)]
    pub changes: bool,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
