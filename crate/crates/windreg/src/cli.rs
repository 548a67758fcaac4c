//! Command-line interface: argument definitions, the dispatcher, and the
//! exit-code policy (2 usage via the parser, 3 data, 4 model).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use windreg_core::tree::TreeParams;
use windreg_core::validation::{
    cross_validate, evaluate, kfold, permutation_importance_fitted, FittedRegressor, MetricTag,
    ModelError, RegressorSpec, SplitConfig, ValidationError, PERMUTATION_REPEATS,
};

use crate::dataset::{self, DataError, SynthConfig, COLUMN_NAMES};
use crate::modelfile::{self, ModelFile, ModelFileError};
use crate::report::{self, ReportBundle, ReportError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    ModelFile(#[from] ModelFileError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("cannot build a {threads}-thread pool: {message}")]
    ThreadPool { threads: usize, message: String },
}

impl CliError {
    /// 3 for data and configuration problems, 4 for model problems; usage
    /// errors never reach here because the parser exits with 2 itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) | CliError::Report(_) | CliError::ThreadPool { .. } => 3,
            CliError::ModelFile(_) | CliError::Model(_) => 4,
            CliError::Validation(error) => match error {
                ValidationError::DegenerateSplit { .. } | ValidationError::InvalidK { .. } => 3,
                ValidationError::Fold { .. } | ValidationError::Model(_) => 4,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "windreg", version, about = "Wind turbine power regression benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print per-column summary statistics of a dataset CSV
    Stats(StatsArgs),
    /// Generate a synthetic dataset CSV
    Synth(SynthArgs),
    /// Train one model and save it as JSON
    Train(TrainArgs),
    /// Print a saved model's predictions for a dataset, one kW value per line
    Predict(PredictArgs),
    /// Score one model on a held-out test split
    Evaluate(EvaluateArgs),
    /// Run k-fold cross-validation of one model
    Cv(CvArgs),
    /// Print tree impurity and permutation feature importance
    Importance(ImportanceArgs),
    /// Run the full three-model benchmark and write every report file
    Compare(CompareArgs),
    /// Write the dataset-level report files (stats table, scatter matrix)
    Report(ReportArgs),
}

/// Shared seed flag: an explicit `--seed` beats the `WINDREG_SEED`
/// environment variable, which beats the default of 42.
#[derive(Debug, Args)]
pub struct SeedArg {
    /// RNG seed for shuffles, searches, and generation
    #[arg(long, env = "WINDREG_SEED", default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Linear,
    Knn,
    Tree,
}

/// Model family plus its hyperparameters.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model family to train
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Fixed neighbor count for knn; when omitted, k is searched in 1..=25
    /// by inner cross-validation
    #[arg(long)]
    pub k: Option<usize>,
    /// Maximum tree depth (unlimited when omitted)
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Minimum samples a tree node needs to be split
    #[arg(long, default_value_t = 2)]
    pub min_samples_split: usize,
    /// Minimum samples each tree leaf must keep
    #[arg(long, default_value_t = 1)]
    pub min_samples_leaf: usize,
    /// Minimum impurity decrease a tree split must achieve
    #[arg(long, default_value_t = 0.0)]
    pub min_impurity_decrease: f64,
}

impl ModelArgs {
    pub fn spec(&self, seed: u64) -> RegressorSpec {
        match self.model {
            ModelKind::Linear => RegressorSpec::linear(seed),
            ModelKind::Knn => match self.k {
                Some(k) => RegressorSpec::knn_fixed(k, seed),
                None => RegressorSpec::knn(seed),
            },
            ModelKind::Tree => RegressorSpec::tree(
                TreeParams {
                    max_depth: self.max_depth,
                    min_samples_split: self.min_samples_split,
                    min_samples_leaf: self.min_samples_leaf,
                    min_impurity_decrease: self.min_impurity_decrease,
                },
                seed,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Mae,
    Rmse,
    R2Ratio,
    R2Score,
}

impl MetricArg {
    fn tag(self) -> MetricTag {
        match self {
            MetricArg::Mae => MetricTag::Mae,
            MetricArg::Rmse => MetricTag::Rmse,
            MetricArg::R2Ratio => MetricTag::R2Ratio,
            MetricArg::R2Score => MetricTag::R2Score,
        }
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Dataset CSV path
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of rows to generate
    #[arg(long, default_value_t = 4464)]
    pub rows: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Rated turbine power in kW
    #[arg(long, default_value_t = 2050.0)]
    pub rated_power: f64,
    /// Wind speed (m/s) at which the power curve reaches half of rated
    #[arg(long, default_value_t = 10.0)]
    pub midpoint_speed: f64,
    /// Logistic power-curve slope per (m/s)
    #[arg(long, default_value_t = 0.55)]
    pub steepness: f64,
    /// Gaussian noise std (kW) added to the power curve
    #[arg(long, default_value_t = 50.0)]
    pub noise_std: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Training dataset CSV
    #[arg(long)]
    pub data: PathBuf,
    /// Output model JSON path
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Saved model JSON
    #[arg(long)]
    pub model_file: PathBuf,
    /// Dataset CSV to predict on (its wind_power_kw column is ignored)
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Dataset CSV
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Fraction of rows held out for testing
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Hold out the last rows instead of sampling the test set
    #[arg(long)]
    pub chronological: bool,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Dataset CSV
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Number of folds
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Score reported per fold
    #[arg(long, value_enum, default_value_t = MetricArg::R2Score)]
    pub metric: MetricArg,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    /// Dataset CSV
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Fraction of rows held out for the permutation measurements
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Permutation repetitions per feature
    #[arg(long, default_value_t = PERMUTATION_REPEATS)]
    pub repeats: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Dataset CSV
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Output directory for the report files
    #[arg(long)]
    pub out: PathBuf,
    /// Cross-validation fold count
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Fraction of rows held out for testing
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Worker threads for fold evaluation (default: one per CPU)
    #[arg(long)]
    pub threads: Option<usize>,
    /// First row of the prediction-overlay window
    #[arg(long, default_value_t = 0)]
    pub window_start: usize,
    /// Rows in the prediction-overlay window (144 = one day at 10-minute
    /// spacing)
    #[arg(long, default_value_t = 144)]
    pub window_len: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Dataset CSV
    #[arg(long)]
    pub data: PathBuf,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(args) => run_stats(args),
        Command::Synth(args) => run_synth(args),
        Command::Train(args) => run_train(args),
        Command::Predict(args) => run_predict(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Cv(args) => run_cv(args),
        Command::Importance(args) => run_importance(args),
        Command::Compare(args) => run_compare(args),
        Command::Report(args) => run_report(args),
    }
}

fn run_stats(args: StatsArgs) -> Result<(), CliError> {
    let dataset = dataset::load_csv(&args.data)?;
    let stats = dataset::summarize(&dataset);
    print!("{}", report::render_stats_csv(&stats)?);
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<(), CliError> {
    if args.rows == 0 {
        return Err(DataError::EmptyFile.into());
    }
    let cfg = SynthConfig {
        rows: args.rows,
        seed: args.seed.seed,
        rated_power_kw: args.rated_power,
        midpoint_speed_ms: args.midpoint_speed,
        steepness: args.steepness,
        noise_std_kw: args.noise_std,
        ..SynthConfig::default()
    };
    let dataset = dataset::generate_synthetic(&cfg);
    dataset::write_csv(&dataset, &args.out)?;
    println!("wrote {} rows to {}", dataset.rows(), args.out.display());
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<(), CliError> {
    let dataset = dataset::load_csv(&args.data)?;
    let spec = args.model.spec(args.seed.seed);
    let fitted = FittedRegressor::fit(&spec, dataset.features(), dataset.target())?;
    let described = match fitted.chosen_k() {
        Some(k) => format!("{} (k = {k})", fitted.name()),
        None => String::from(fitted.name()),
    };
    modelfile::save_model(&ModelFile::new(fitted, dataset.rows(), spec.seed), &args.out)?;
    println!("trained {described} on {} rows -> {}", dataset.rows(), args.out.display());
    Ok(())
}

fn run_predict(args: PredictArgs) -> Result<(), CliError> {
    let file = modelfile::load_model(&args.model_file)?;
    let dataset = dataset::load_csv(&args.data)?;
    let predictions = file.model.predict(dataset.features())?;
    let mut out = String::with_capacity(predictions.len() * 10);
    for prediction in predictions {
        let _ = writeln!(out, "{prediction:.4}");
    }
    print!("{out}");
    Ok(())
}

fn run_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let dataset = dataset::load_csv(&args.data)?;
    let spec = args.model.spec(args.seed.seed);
    let split = SplitConfig {
        test_fraction: args.test_fraction,
        seed: args.seed.seed,
        chronological: args.chronological,
    };
    let eval = evaluate(std::slice::from_ref(&spec), dataset.features(), dataset.target(), &split)?;
    let model = &eval.models[0];
    println!("model: {}", model.name);
    if let Some(k) = model.chosen_k {
        println!("chosen_k: {k}");
    }
    println!("train_rows: {}", eval.train_size());
    println!("test_rows: {}", eval.test_size());
    println!("mae_kw: {:.2}", model.scores.mae);
    println!("rmse_kw: {:.2}", model.scores.rmse);
    println!("r2_ratio: {:.4}", model.scores.r2_ratio);
    println!("r2_score: {:.4}", model.scores.r2_score);
    Ok(())
}

fn run_cv(args: CvArgs) -> Result<(), CliError> {
    let dataset = dataset::load_csv(&args.data)?;
    let spec = args.model.spec(args.seed.seed);
    let folds = kfold(dataset.rows(), args.folds, args.seed.seed)?;
    let result =
        cross_validate(&spec, dataset.features(), dataset.target(), &folds, args.metric.tag())?;
    println!("fold,{}", result.metric.name());
    for (fold, score) in result.fold_scores.iter().enumerate() {
        println!("{fold},{score:.4}");
    }
    println!("average,{:.4}", result.average);
    Ok(())
}

fn run_importance(args: ImportanceArgs) -> Result<(), CliError> {
    let dataset = dataset::load_csv(&args.data)?;
    let seed = args.seed.seed;
    let split = SplitConfig { test_fraction: args.test_fraction, seed, chronological: false };
    let (train_indices, test_indices) = split.indices(dataset.rows())?;
    let train_x = dataset.features().select_rows(&train_indices);
    let train_y: Vec<f64> = train_indices.iter().map(|&i| dataset.target()[i]).collect();
    let test_x = dataset.features().select_rows(&test_indices);
    let test_y: Vec<f64> = test_indices.iter().map(|&i| dataset.target()[i]).collect();

    let spec = RegressorSpec::tree(TreeParams::default(), seed);
    let fitted = FittedRegressor::fit(&spec, &train_x, &train_y)?;
    let importance = fitted.as_tree().expect("tree spec fits a tree").importance();
    report::validate_importance(&importance.values)?;
    let permutation = permutation_importance_fitted(&fitted, &test_x, &test_y, args.repeats, seed)?;

    if importance.all_leaves {
        println!("note: the tree never split; impurity importance is uniform");
    }
    println!("feature,impurity_importance,permutation_importance");
    for (i, name) in COLUMN_NAMES.iter().take(dataset.features().cols()).enumerate() {
        println!("{name},{:.4},{:.4}", importance.values[i], permutation[i]);
    }
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<(), CliError> {
    let dataset = dataset::load_csv(&args.data)?;
    let stats = dataset::summarize(&dataset);
    let mut bundle = ReportBundle::new(&args.out);
    bundle.add_table("stats.csv", report::render_stats_csv(&stats)?);
    bundle.add_figure("scatter_matrix.svg", report::scatter_matrix(&dataset)?);
    for path in bundle.write()? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_compare(args: CompareArgs) -> Result<(), CliError> {
    match args.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::ThreadPool { threads, message: e.to_string() })?;
            pool.install(|| compare_body(&args))
        }
        None => compare_body(&args),
    }
}

/// The overlay window clamped inside the dataset; always at least two rows
/// as long as the dataset has them.
fn overlay_window(n: usize, start: usize, len: usize) -> (usize, usize) {
    let start = start.min(n.saturating_sub(2));
    let end = (start + len.max(2)).min(n);
    (start, end)
}

fn compare_body(args: &CompareArgs) -> Result<(), CliError> {
    let dataset = dataset::load_csv(&args.data)?;
    let seed = args.seed.seed;
    let stats = dataset::summarize(&dataset);
    let specs = [
        RegressorSpec::linear(seed),
        RegressorSpec::knn(seed),
        RegressorSpec::tree(TreeParams::default(), seed),
    ];

    let folds = kfold(dataset.rows(), args.folds, seed)?;
    let mut cv_results = Vec::with_capacity(specs.len());
    for spec in &specs {
        let result =
            cross_validate(spec, dataset.features(), dataset.target(), &folds, MetricTag::R2Score)?;
        cv_results.push((String::from(spec.name()), result));
    }

    let split = SplitConfig { test_fraction: args.test_fraction, seed, chronological: false };
    let eval = evaluate(&specs, dataset.features(), dataset.target(), &split)?;

    let (window_start, window_end) =
        overlay_window(dataset.rows(), args.window_start, args.window_len);
    let window_indices: Vec<usize> = (window_start..window_end).collect();
    let window_x = dataset.features().select_rows(&window_indices);
    let window_actual: Vec<f64> = window_indices.iter().map(|&i| dataset.target()[i]).collect();
    let mut overlay_series = Vec::with_capacity(eval.models.len());
    for model in &eval.models {
        overlay_series.push((model.name.clone(), model.fitted.predict(&window_x)?));
    }
    let window_stamps =
        dataset.timestamps().map(|stamps| stamps[window_start..window_end].to_vec());
    let overlay = report::overlay_plot(window_stamps.as_deref(), &window_actual, &overlay_series)?;

    let test_actual: Vec<f64> = eval.test_indices.iter().map(|&i| dataset.target()[i]).collect();

    let mut bundle = ReportBundle::new(&args.out);
    bundle.add_table("stats.csv", report::render_stats_csv(&stats)?);
    bundle.add_table("cv.csv", report::render_cv_csv(&cv_results)?);
    bundle.add_table("errors.csv", report::render_errors_csv(&eval)?);
    bundle.add_table("importance.csv", report::render_importance_csv(&eval)?);
    bundle.add_figure("scatter_matrix.svg", report::scatter_matrix(&dataset)?);
    bundle.add_figure("overlay.svg", overlay);
    for model in &eval.models {
        bundle.add_figure(
            &format!("fit_{}.svg", model.name),
            report::fit_plot(&test_actual, &model.test_predictions, &model.name)?,
        );
    }
    let paths = bundle.write()?;

    print!("{}", report::render_errors_csv(&eval)?);
    for model in &eval.models {
        if let Some(k) = model.chosen_k {
            println!("note: {} chose k = {k}", model.name);
        }
    }
    for path in &paths {
        println!("wrote {}", path.display());
    }
    Ok(())
}
