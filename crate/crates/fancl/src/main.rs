//! Command-line front end: synthetic instance generation, the two
//! solvers, and file-based metric evaluation.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fancl::bench::io::{
    load_dense_csv, load_triplets, save_dense_csv, save_triplets, TripletFormat,
};
use fancl::bench::metrics::{nmse_dense, psnr, rmse_dense};
use fancl::bench::synthetic::{gen_synth_completion, gen_synth_rpca};
use fancl::bench::tuning::{rpca_default_weights, spec_for, tune_lambda_completion};
use fancl::linalg::SparseCoo;
use fancl::problems::{CompletionProblem, RpcaProblem};
use fancl::solver::{fancl_rpca_solve, fancl_solve, RunReport, SolverConfig};
use fancl::RegKind;

#[derive(Parser)]
#[command(
    name = "fancl",
    version,
    about = "Low-rank matrix learning with nonconvex spectral penalties"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic matrix-completion instance and write its
    /// observed entries as triplet files.
    SynthMc(SynthMcArgs),
    /// Generate a synthetic robust-PCA instance: a dense observation
    /// matrix with planted sparse corruption.
    SynthRpca(SynthRpcaArgs),
    /// Recover a low-rank matrix from observed triplets.
    Complete(CompleteArgs),
    /// Split a dense matrix into low-rank plus sparse parts.
    Rpca(RpcaArgs),
    /// Score an estimate held in a file against a reference.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegName {
    Nuclear,
    CappedL1,
    Lsp,
    Tnn,
    Scad,
    Mcp,
}

impl RegName {
    fn kind(self) -> RegKind {
        match self {
            RegName::Nuclear => RegKind::Nuclear,
            RegName::CappedL1 => RegKind::CappedL1,
            RegName::Lsp => RegKind::Lsp,
            RegName::Tnn => RegKind::Tnn,
            RegName::Scad => RegKind::Scad,
            RegName::Mcp => RegKind::Mcp,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatName {
    /// MatrixMarket coordinate format.
    Mm,
    /// Bare "i j value" lines, 1-based.
    Bare,
}

impl FormatName {
    fn format(self) -> TripletFormat {
        match self {
            FormatName::Mm => TripletFormat::MatrixMarket,
            FormatName::Bare => TripletFormat::Bare,
        }
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Spectral penalty.
    #[arg(long, value_enum)]
    reg: RegName,
    /// Penalty shape parameter. Defaults: capped-l1 2*lambda, lsp
    /// sqrt(lambda), tnn 3; scad and mcp have no default.
    #[arg(long)]
    theta: Option<f64>,
    /// Final regularization weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Step parameter; the gradient step is 1/tau.
    #[arg(long, default_value_t = 1.5)]
    tau: f64,
    /// Continuation decay in (0, 1); the weight approaches lambda as
    /// lambda + (lambda0 - lambda) * nu^t.
    #[arg(long, default_value_t = 0.7)]
    nu: f64,
    /// Starting weight of the continuation schedule, as a multiple of
    /// lambda.
    #[arg(long = "lambda0-mult", default_value_t = 50.0)]
    lambda0_mult: f64,
    /// Power-method rounds per proximal step.
    #[arg(long, default_value_t = 3)]
    tpm: usize,
    /// Restart attempts per iteration before the basis is widened.
    #[arg(long, default_value_t = 10)]
    pmax: usize,
    /// Relative objective-change stopping threshold.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Width of the initial random right basis.
    #[arg(long = "rank-init", default_value_t = 5)]
    rank_init: usize,
}

impl SolverArgs {
    fn config(&self, lambda: f64) -> SolverConfig {
        SolverConfig {
            tau: self.tau,
            lambda,
            lambda0: self.lambda0_mult * lambda,
            nu: self.nu,
            t_pm: self.tpm,
            p_max: self.pmax,
            max_iters: self.max_iter,
            tol: self.tol,
            seed: self.seed,
            rank_init: self.rank_init,
            beta: None,
        }
    }
}

#[derive(Args)]
struct SynthMcArgs {
    /// Side length of the square matrix.
    #[arg(long, default_value_t = 500)]
    m: usize,
    /// Rank of the planted matrix.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Standard deviation of the additive noise.
    #[arg(long = "noise-std", default_value_t = 0.1)]
    noise_std: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mm")]
    format: FormatName,
    /// Training half of the observed entries.
    #[arg(long = "train-out")]
    train_out: PathBuf,
    /// Validation half of the observed entries.
    #[arg(long = "valid-out")]
    valid_out: PathBuf,
    /// All observed entries (training and validation together).
    #[arg(long = "observed-out")]
    observed_out: Option<PathBuf>,
    /// Noise-free planted matrix as dense CSV.
    #[arg(long = "clean-out")]
    clean_out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthRpcaArgs {
    /// Side length of the square matrix; the planted rank is m/100.
    #[arg(long, default_value_t = 500)]
    m: usize,
    /// Standard deviation of the additive noise.
    #[arg(long = "noise-std", default_value_t = 0.1)]
    noise_std: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mm")]
    format: FormatName,
    /// Corrupted dense observation as CSV.
    #[arg(long = "observed-out")]
    observed_out: PathBuf,
    /// Planted sparse corruption as triplets.
    #[arg(long = "corruption-out")]
    corruption_out: Option<PathBuf>,
    /// Noise-free planted low-rank matrix as dense CSV.
    #[arg(long = "clean-out")]
    clean_out: Option<PathBuf>,
}

#[derive(Args)]
struct CompleteArgs {
    /// Observed entries as triplets.
    #[arg(long)]
    input: PathBuf,
    /// Held-out entries for weight selection; required when --lambda is
    /// absent.
    #[arg(long)]
    valid: Option<PathBuf>,
    /// Retrain the final model on input plus validation entries after
    /// weight selection.
    #[arg(long = "retrain-all", default_value_t = false)]
    retrain_all: bool,
    #[arg(long, value_enum, default_value = "mm")]
    format: FormatName,
    #[command(flatten)]
    solver: SolverArgs,
    /// JSON run report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration trace as CSV.
    #[arg(long = "trace-csv")]
    trace_csv: Option<PathBuf>,
    /// Recovered matrix as dense CSV.
    #[arg(long = "estimate-out")]
    estimate_out: Option<PathBuf>,
}

#[derive(Args)]
struct RpcaArgs {
    /// Dense observation matrix as CSV.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// L1 weight on the sparse part; defaults like --lambda from the
    /// observation's largest entry.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum, default_value = "mm")]
    format: FormatName,
    /// JSON run report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration trace as CSV.
    #[arg(long = "trace-csv")]
    trace_csv: Option<PathBuf>,
    /// Recovered low-rank part as dense CSV.
    #[arg(long = "estimate-out")]
    estimate_out: Option<PathBuf>,
    /// Recovered sparse part as triplets.
    #[arg(long = "sparse-out")]
    sparse_out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricName {
    /// Peak signal-to-noise ratio against a dense reference.
    Psnr,
    /// Root mean square error on held-out triplets.
    Rmse,
    /// Relative Frobenius error against a dense reference.
    Nmse,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    metric: MetricName,
    /// Estimate as dense CSV.
    #[arg(long)]
    estimate: PathBuf,
    /// Dense reference CSV; psnr and nmse.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Held-out triplets; rmse.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mm")]
    format: FormatName,
    /// JSON result.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::SynthMc(a) => synth_mc(a),
        Cmd::SynthRpca(a) => synth_rpca(a),
        Cmd::Complete(a) => complete(a),
        Cmd::Rpca(a) => rpca(a),
        Cmd::Eval(a) => eval(a),
    }
}

fn synth_mc(a: SynthMcArgs) -> Result<()> {
    let (train, valid, truth) = gen_synth_completion(a.m, a.k, a.noise_std, a.seed)?;
    let fmt = a.format.format();
    save_triplets(&a.train_out, train.observed(), fmt)
        .with_context(|| format!("writing {}", a.train_out.display()))?;
    save_triplets(&a.valid_out, valid.observed(), fmt)
        .with_context(|| format!("writing {}", a.valid_out.display()))?;
    if let Some(path) = &a.observed_out {
        save_triplets(path, &truth.observed, fmt)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &a.clean_out {
        save_dense_csv(path, &truth.u.dot(&truth.v))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{}x{} rank-{} instance: {} observed entries ({:.2}%), {} train / {} valid",
        a.m,
        a.m,
        a.k,
        truth.observed.nnz(),
        100.0 * truth.observed.nnz() as f64 / (a.m * a.m) as f64,
        train.observed().nnz(),
        valid.observed().nnz(),
    );
    Ok(())
}

fn synth_rpca(a: SynthRpcaArgs) -> Result<()> {
    let (o, truth) = gen_synth_rpca(a.m, a.noise_std, a.seed)?;
    save_dense_csv(&a.observed_out, &o)
        .with_context(|| format!("writing {}", a.observed_out.display()))?;
    if let Some(path) = &a.corruption_out {
        save_triplets(path, &truth.corruption, a.format.format())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &a.clean_out {
        save_dense_csv(path, &truth.u.dot(&truth.v))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{0}x{0} instance: planted rank {1}, {2} corrupted entries",
        a.m,
        truth.u.ncols(),
        truth.corruption.nnz(),
    );
    Ok(())
}

fn complete(a: CompleteArgs) -> Result<()> {
    let fmt = a.format.format();
    let observed = load_triplets(&a.input, fmt)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let kind = a.solver.reg.kind();

    let lambda = match a.solver.lambda {
        Some(l) => l,
        None => {
            let Some(valid_path) = &a.valid else {
                bail!("pass --lambda, or --valid to pick it on held-out entries");
            };
            let valid = load_triplets(valid_path, fmt)
                .with_context(|| format!("reading {}", valid_path.display()))?;
            if kind == RegKind::Nuclear {
                bail!("the grid picker does not handle nuclear; pass --lambda");
            }
            let train_prob = CompletionProblem::new(observed.clone())?;
            let valid_prob = CompletionProblem::new(valid)?;
            let outcome = tune_lambda_completion(
                &train_prob,
                &valid_prob,
                kind,
                a.solver.theta,
                &a.solver.config(1.0),
            )?;
            println!(
                "picked lambda {} (validation rmse {:.6}) from {} grid points",
                outcome.lambda,
                outcome.validation_rmse,
                outcome.grid.len(),
            );
            outcome.lambda
        }
    };

    let train = if a.retrain_all {
        let Some(valid_path) = &a.valid else {
            bail!("--retrain-all needs --valid");
        };
        let valid = load_triplets(valid_path, fmt)
            .with_context(|| format!("reading {}", valid_path.display()))?;
        merge_triplets(&observed, &valid)?
    } else {
        observed
    };

    let spec = spec_for(kind, lambda, a.solver.theta)?;
    let config = a.solver.config(lambda);
    let problem = CompletionProblem::new(train)?;
    let (factors, report) = fancl_solve(&problem, &spec, &config)?;

    write_outputs(&report, a.out.as_deref(), a.trace_csv.as_deref())?;
    if let Some(path) = &a.estimate_out {
        save_dense_csv(path, &factors.to_dense())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{}", summary_line(&report));
    Ok(())
}

fn rpca(a: RpcaArgs) -> Result<()> {
    let o = load_dense_csv(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let kind = a.solver.reg.kind();
    let (default_lambda, default_beta) = rpca_default_weights(&o, kind);
    let lambda = a.solver.lambda.unwrap_or(default_lambda);
    let beta = a.beta.unwrap_or(default_beta);

    let spec = spec_for(kind, lambda, a.solver.theta)?;
    let mut config = a.solver.config(lambda);
    config.beta = Some(beta);
    let problem = RpcaProblem::new(o, lambda, beta)?;
    let (factors, sparse, report) = fancl_rpca_solve(&problem, &spec, &config)?;

    write_outputs(&report, a.out.as_deref(), a.trace_csv.as_deref())?;
    if let Some(path) = &a.estimate_out {
        save_dense_csv(path, &factors.to_dense())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &a.sparse_out {
        save_triplets(path, &sparse, a.format.format())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("lambda {lambda}, beta {beta}; {}", summary_line(&report));
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let estimate = load_dense_csv(&a.estimate)
        .with_context(|| format!("reading {}", a.estimate.display()))?;
    let (name, value) = match a.metric {
        MetricName::Psnr | MetricName::Nmse => {
            let Some(ref_path) = &a.reference else {
                bail!("this metric needs --reference");
            };
            let reference = load_dense_csv(ref_path)
                .with_context(|| format!("reading {}", ref_path.display()))?;
            match a.metric {
                MetricName::Psnr => ("psnr_db", psnr(&estimate, &reference)?),
                _ => ("nmse", nmse_dense(&estimate, &reference)?),
            }
        }
        MetricName::Rmse => {
            let Some(test_path) = &a.test else {
                bail!("rmse needs --test");
            };
            let test = load_triplets(test_path, a.format.format())
                .with_context(|| format!("reading {}", test_path.display()))?;
            ("rmse", rmse_dense(&estimate, &test)?)
        }
    };
    if let Some(path) = &a.out {
        let mut map = serde_json::Map::new();
        map.insert(name.to_string(), serde_json::json!(value));
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("writing {}", path.display()))?,
        );
        serde_json::to_writer_pretty(&mut w, &serde_json::Value::Object(map))?;
        writeln!(w)?;
    }
    println!("{name} = {value}");
    Ok(())
}

fn merge_triplets(a: &SparseCoo, b: &SparseCoo) -> Result<SparseCoo> {
    if a.shape() != b.shape() {
        bail!("cannot merge entry sets with shapes {:?} and {:?}", a.shape(), b.shape());
    }
    let (m, n) = a.shape();
    let triplets: Vec<_> = a.iter().chain(b.iter()).collect();
    Ok(SparseCoo::from_triplets(m, n, triplets)?)
}

fn summary_line(report: &RunReport) -> String {
    let get = |k: &str| report.final_metrics.get(k).cloned().unwrap_or_default();
    format!(
        "objective {} at rank {}, {} iterations, converged {}",
        get("objective"),
        get("rank"),
        get("iterations"),
        get("converged"),
    )
}

fn write_outputs(report: &RunReport, out: Option<&Path>, trace: Option<&Path>) -> Result<()> {
    if let Some(path) = out {
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("writing {}", path.display()))?,
        );
        serde_json::to_writer_pretty(&mut w, report)?;
        writeln!(w)?;
    }
    if let Some(path) = trace {
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("writing {}", path.display()))?,
        );
        writeln!(w, "t,objective,rank,delta_sq,elapsed_ms")?;
        for r in &report.per_iteration {
            // Wall-clock time is pinned to zero here so two runs with the
            // same flags write identical bytes; the JSON report keeps the
            // measured values.
            writeln!(w, "{},{},{},{},0.0", r.t, r.objective, r.rank, r.delta_sq)?;
        }
    }
    Ok(())
}
