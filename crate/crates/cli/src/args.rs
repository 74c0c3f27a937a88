use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("`{s}` is not a number: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mibound",
    version,
    about = "Membership-inference accuracy bounds for ε-DP training",
    long_about = "Membership-inference accuracy bounds for ε-DP training.\n\n\
        Single results are printed as one JSON object per line with fixed keys \
        (listed in each subcommand's --help); tables are printed as CSV.\n\n\
        Exit codes: 0 success, 1 internal failure, 2 invalid arguments, \
        3 a bound violation found by oracle-verify."
)]
pub struct Cli {
    /// Write results to this file instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Positive and negative accuracy intervals for one (ε, p).
    #[command(
        allow_negative_numbers = true,
        after_help = "Output keys: command, eps, prior, pos_lower, pos_upper, neg_lower, neg_upper"
    )]
    Bounds(BoundsArgs),

    /// Our bound next to the Yeom, Erlingsson and Sablayrolles bounds (CSV).
    #[command(
        allow_negative_numbers = true,
        after_help = "CSV columns: eps, prior, ours, erlingsson, sablayrolles, sablayrolles_raw, yeom, yeom_raw"
    )]
    Baselines(BaselinesArgs),

    /// Dataset sub-sampling rate and the positive-accuracy cap it certifies.
    #[command(
        allow_negative_numbers = true,
        after_help = "Output keys: command, eps, target, rate, base_prior, certified_upper, size, expected_size"
    )]
    Plan(PlanArgs),

    /// Keep each id from a file with probability --rate (ids printed one per line).
    #[command(allow_negative_numbers = true)]
    Subsample(SubsampleArgs),

    /// Number of deletion requests absorbable without retraining.
    #[command(
        allow_negative_numbers = true,
        after_help = "Output keys: command, eps, b, universe_size, train_size, per_request_lower, capacity, \
                      whole_requests, unbounded, requests, requests_ok"
    )]
    Unlearn(UnlearnArgs),

    /// Exhaustively check every exact posterior against its bounds.
    #[command(
        allow_negative_numbers = true,
        name = "oracle-verify",
        after_help = "Output keys: command, config, points, outcomes, eps, checked, violations, skipped_outcomes, \
                      max_excess, lemma1_max_residual, lemma1_ok\n\
                      Exits with code 3 if any posterior leaves its interval."
    )]
    OracleVerify(OracleVerifyArgs),

    /// Simulate the membership game against the Bayes-optimal attacker (CSV).
    #[command(
        allow_negative_numbers = true,
        name = "oracle-sim",
        after_help = "CSV columns: point, prior, positive_predictions, empirical_positive_accuracy, \
                      exact_positive_accuracy, positive_se, negative_predictions, empirical_negative_accuracy, \
                      exact_negative_accuracy, negative_se, empirical_accuracy, exact_accuracy, accuracy_se, max_z"
    )]
    OracleSim(OracleSimArgs),

    /// Threshold attack on one gradient step of Gaussian-noised training.
    #[command(
        allow_negative_numbers = true,
        after_help = "Without --alpha, output keys: command, w0, grad_step, sigma, prior_x2, max_accuracy, \
                      max_alpha_offset, m, witness_alpha_offset, witness_positive_accuracy\n\
                      With --alpha, CSV columns: alpha_offset, positive_accuracy, accuracy"
    )]
    Counterexample(CounterexampleArgs),

    /// Write one figure's data as CSV and SVG.
    #[command(allow_negative_numbers = true, after_help = "Output keys: command, id, csv, svg")]
    Figure(FigureArgs),

    /// Write every figure plus headline.csv.
    #[command(allow_negative_numbers = true, after_help = "Output keys: command, out_dir, files")]
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_parser = finite)]
    pub eps: f64,
    /// Prior probability that the point is in the training set.
    #[arg(long, value_parser = finite)]
    pub prior: f64,
}

#[derive(Debug, Args)]
pub struct BaselinesArgs {
    /// Comma-separated ε values.
    #[arg(long, value_parser = finite, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long, value_parser = finite, default_value_t = 0.5)]
    pub prior: f64,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, value_parser = finite)]
    pub eps: f64,
    /// Largest acceptable positive-accuracy bound; the rate is solved for.
    #[arg(long, value_parser = finite, conflicts_with = "rate", required_unless_present = "rate")]
    pub target: Option<f64>,
    /// Keep rate T in (0, 1].
    #[arg(long, value_parser = finite)]
    pub rate: Option<f64>,
    /// Size of the original dataset.
    #[arg(long)]
    pub size: Option<u64>,
    /// Known cap on each point's inclusion probability before sub-sampling.
    #[arg(long = "base-prior", value_parser = finite, default_value_t = 1.0)]
    pub base_prior: f64,
}

#[derive(Debug, Args)]
pub struct SubsampleArgs {
    /// File with one id per line; `-` reads standard input.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = finite)]
    pub rate: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct UnlearnArgs {
    #[arg(long, value_parser = finite)]
    pub eps: f64,
    /// Non-membership posterior that must be maintained.
    #[arg(long, value_parser = finite)]
    pub b: f64,
    /// Number of candidate points N.
    #[arg(long = "universe-size")]
    pub universe_size: u64,
    /// Expected training-set size c; each point is drawn with probability c/N.
    #[arg(long = "train-size", value_parser = finite)]
    pub train_size: f64,
    /// Check whether this many requests fit.
    #[arg(long)]
    pub requests: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OracleVerifyArgs {
    /// JSON universe and mechanism description.
    #[arg(long)]
    pub config: PathBuf,
    /// Also write every posterior and its interval to this CSV.
    #[arg(long)]
    pub reports: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleSimArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, value_parser = finite, default_value_t = 1e6)]
    pub w0: f64,
    #[arg(long = "grad-step", value_parser = finite, default_value_t = 1.0)]
    pub grad_step: f64,
    #[arg(long, value_parser = finite, default_value_t = 4.0412)]
    pub sigma: f64,
    #[arg(long = "prior-x2", value_parser = finite, default_value_t = 0.5)]
    pub prior_x2: f64,
    /// Positive accuracy the witness threshold must exceed.
    #[arg(long, value_parser = finite, default_value_t = 0.99)]
    pub m: f64,
    /// Comma-separated threshold offsets to sweep; switches output to CSV.
    #[arg(long, value_parser = finite, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// mi_bounds, mi_bound_prob, priv_amp_comp, threshold_pos_acc, threshold_acc, sab_comparison, mi_adv or
    /// del_capacity.
    #[arg(long)]
    pub id: String,
    #[arg(long = "out-dir", env = "MIBOUND_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Comma-separated x values replacing the default grid.
    #[arg(long, value_parser = finite, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Vec<f64>,
    /// Comma-separated ε values for the per-ε figures.
    #[arg(long, value_parser = finite, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Vec<f64>,
    #[arg(long = "log-x")]
    pub log_x: bool,
    #[arg(long = "log-y")]
    pub log_y: bool,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long = "out-dir", env = "MIBOUND_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}
