//! Batch command-line front end.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{
    assemble_matrix, extract_feature_vector, pca_fit, pca_transform, FeatureError, LabeledFeatureMatrix, PcaBasis,
};
use crate::harness::synthetic::{write_corpus, SyntheticSpec};
use crate::harness::{
    render_report, run_experiment, write_results_csv, Arm, Dataset, DefaultRunner, ExperimentConfig, HarnessError,
    ReportFormat, SavedModel, Selection, SweepSummary,
};
use crate::image::load_image;
use crate::morphology::SeKind;
use crate::seed::derive_seed;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
            Self::Internal(_) => 3,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InvalidFraction(_)
            | HarnessError::EmptyRange
            | HarnessError::TooFewReps { .. }
            | HarnessError::Config(_) => Self::Usage(e.to_string()),
            HarnessError::Pool(_) => Self::Internal(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "pattern-triage", version, about = "Pattern-spectrum features and neural triage of RGB texture images")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Text,
    Markdown,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the synthetic grain-size corpus as PNGs under <out>/A and <out>/B.
    GenSynthetic {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        per_class: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
    },
    /// Feature CSV from a corpus with one subdirectory per class.
    Extract {
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `path,label` lines overriding directory labels.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        se: Option<SeKind>,
        #[arg(long = "spectrum-bins")]
        spectrum_bins: Option<usize>,
        /// k-means clusters per band.
        #[arg(long)]
        clusters: Option<usize>,
    },
    /// Project a feature CSV onto its leading principal components.
    Pca {
        features: PathBuf,
        #[arg(long = "pca-components")]
        pca_components: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the fitted basis.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Project with an existing basis instead of fitting one.
        #[arg(long, conflicts_with_all = ["pca_components", "basis"])]
        apply: Option<PathBuf>,
    },
    /// Split, sweep hidden sizes, rerun the best networks; writes results under <out>.
    Train {
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replace the configured arms with `pca:N` and `raw`.
        #[arg(long = "pca-components")]
        pca_components: Option<usize>,
        /// MLP without bias terms.
        #[arg(long)]
        strict_paper: bool,
        /// Record wall time per trial in the results CSV.
        #[arg(long)]
        timing: bool,
        /// Select the best network by mean accuracy per hidden size.
        #[arg(long)]
        select_by_mean: bool,
    },
    /// Accuracy of a saved model on a feature CSV.
    Evaluate {
        features: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// PCA basis to apply to the features first.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Per-row predictions CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the tables of a training run directory.
    Report {
        run: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
    },
}

/// Sweep and rerun summaries of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummaries {
    pub sweeps: Vec<SweepSummary>,
    pub reruns: Vec<SweepSummary>,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

const IMAGE_EXTENSIONS: [&str; 4] = ["png", "ppm", "pgm", "pnm"];

fn is_image(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// `(path, label)` for every image, labels taken from the class subdirectory names.
pub fn scan_corpus(dir: &Path) -> Result<Vec<(PathBuf, String)>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut classes: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    classes.sort();
    let mut items = Vec::new();
    for class_dir in classes {
        let label = class_dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| io_err(&class_dir, "class directory name is not UTF-8"))?
            .to_string();
        let mut files: Vec<PathBuf> = std::fs::read_dir(&class_dir)
            .map_err(|e| io_err(&class_dir, e))?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.is_file() && is_image(p))
            .collect();
        files.sort();
        items.extend(files.into_iter().map(|f| (f, label.clone())));
    }
    Ok(items)
}

/// Reads `path,label` lines; relative paths are resolved against `root`.
pub fn read_manifest(path: &Path, root: &Path) -> Result<Vec<(PathBuf, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (p, label) = line
            .rsplit_once(',')
            .ok_or_else(|| io_err(path, format!("line {}: expected `path,label`", i + 1)))?;
        let p = PathBuf::from(p.trim());
        items.push((if p.is_absolute() { p } else { root.join(p) }, label.trim().to_string()));
    }
    Ok(items)
}

fn cmd_gen_synthetic(cli: &Cli, out: &Path, per_class: usize, size: usize) -> Result<(), CliError> {
    if per_class == 0 || size < 16 {
        return Err(CliError::Usage("need --per-class >= 1 and --size >= 16".into()));
    }
    let spec = SyntheticSpec {
        per_class,
        width: size,
        height: size,
        seed: cli.seed.unwrap_or(0),
        ..Default::default()
    };
    let paths = write_corpus(&spec, out).map_err(data)?;
    println!("wrote {} images to {}", paths.len(), out.display());
    Ok(())
}

fn cmd_extract(
    cli: &Cli,
    corpus: &Path,
    out: &Path,
    manifest: Option<&Path>,
    se: Option<SeKind>,
    bins: Option<usize>,
    clusters: Option<usize>,
) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let mut ex = cfg.extract.clone();
    if let Some(se) = se {
        ex.se_kind = se;
    }
    if let Some(k) = bins {
        ex.bins = k;
    }
    if let Some(k) = clusters {
        ex.clusters = k;
    }
    if ex.bins == 0 || ex.clusters == 0 {
        return Err(CliError::Usage("--spectrum-bins and --clusters must be positive".into()));
    }
    let master = cfg.seed.unwrap_or(0);
    let items = match manifest {
        Some(m) => read_manifest(m, corpus)?,
        None => scan_corpus(corpus)?,
    };
    if items.is_empty() {
        return Err(CliError::Data(format!("no images found under {}", corpus.display())));
    }
    info!("extracting {} images", items.len());
    let vectors = pool(cfg.workers)?.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, (path, label))| {
                let img = load_image(path).map_err(data)?;
                let per_image = crate::features::ExtractConfig {
                    seed: derive_seed(master, i as u64),
                    ..ex.clone()
                };
                let fv = extract_feature_vector(&img, label, &per_image).map_err(|e| match e {
                    FeatureError::NotRgb(_) => io_err(path, e),
                    other => CliError::Internal(format!("{}: {other}", path.display())),
                })?;
                if fv.is_degenerate() {
                    warn!("{}: degenerate bands {:?}", path.display(), fv.degenerate_bands);
                }
                Ok(fv)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let m = assemble_matrix(&vectors).map_err(data)?;
    m.save(out).map_err(data)?;
    println!("wrote {} x {} features to {}", m.rows(), m.cols(), out.display());
    Ok(())
}

fn cmd_pca(
    features: &Path,
    n: Option<usize>,
    out: &Path,
    basis_out: Option<&Path>,
    apply: Option<&Path>,
) -> Result<(), CliError> {
    let m = LabeledFeatureMatrix::load(features).map_err(data)?;
    let basis = match apply {
        Some(p) => PcaBasis::load(p).map_err(data)?,
        None => {
            let n = n.ok_or_else(|| CliError::Usage("--pca-components is required unless --apply is given".into()))?;
            pca_fit(&m, n).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    let reduced = pca_transform(&basis, &m).map_err(data)?;
    reduced.save(out).map_err(data)?;
    if let Some(p) = basis_out {
        basis.save(p).map_err(data)?;
    }
    println!(
        "wrote {} x {} to {} ({:.2}% of variance kept)",
        reduced.rows(),
        reduced.cols(),
        out.display(),
        100.0 * basis.explained_ratio()
    );
    Ok(())
}

fn render_run(s: &RunSummaries, format: ReportFormat) -> String {
    let (h1, h2) = match format {
        ReportFormat::Markdown => ("## Sweep: best network and statistics over all trials\n\n", "## Reruns of the selected architecture\n\n"),
        ReportFormat::Text => ("Sweep: best network and statistics over all trials\n\n", "Reruns of the selected architecture\n\n"),
    };
    format!("{h1}{}\n{h2}{}", render_report(&s.sweeps, format), render_report(&s.reruns, format))
}

fn write_reports(dir: &Path, s: &RunSummaries) -> Result<String, CliError> {
    let md = render_run(s, ReportFormat::Markdown);
    write_file(&dir.join("report.md"), &md)?;
    write_file(&dir.join("report.txt"), &render_run(s, ReportFormat::Text))?;
    Ok(md)
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    cli: &Cli,
    features: &Path,
    out: &Path,
    pca_components: Option<usize>,
    strict_paper: bool,
    timing: bool,
    select_by_mean: bool,
) -> Result<(), CliError> {
    let mut cfg = load_config(cli)?;
    if cfg.seed.is_none() {
        return Err(CliError::Usage("train needs a master seed (--seed or `seed` in the config)".into()));
    }
    if let Some(n) = pca_components {
        cfg.arms = vec![Arm::Pca(n), Arm::Raw];
    }
    cfg.strict_paper |= strict_paper;
    if select_by_mean {
        cfg.selection = Selection::Mean;
    }
    cfg.validate()?;
    let m = LabeledFeatureMatrix::load(features).map_err(data)?;
    let runner = DefaultRunner {
        cfg: cfg.effective_classifier(),
    };
    let outcome = run_experiment(&m, &cfg, &runner)?;

    create_dir(out)?;
    create_dir(&out.join("models"))?;
    write_file(&out.join("config.toml"), &cfg.to_toml_string())?;
    let mut split = String::from("row,set\n");
    for (rows, set) in [(&outcome.train_rows, "train"), (&outcome.test_rows, "test")] {
        for r in rows {
            split += &format!("{r},{set}\n");
        }
    }
    write_file(&out.join("split.csv"), &split)?;
    for a in &outcome.arms {
        if let Some(b) = &a.basis {
            b.save(&out.join(format!("pca_{}.json", a.m))).map_err(data)?;
        }
    }
    for (name, summaries) in [("results.csv", &outcome.sweeps), ("reruns.csv", &outcome.reruns)] {
        let trials: Vec<_> = summaries.iter().flat_map(|s| s.trials.iter().cloned()).collect();
        let mut buf = Vec::new();
        write_results_csv(&trials, timing, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
        write_file(&out.join(name), &String::from_utf8(buf).expect("csv is UTF-8"))?;
    }
    for sm in &outcome.best_models {
        let name = format!("{}_m{}.json", sm.trial.classifier.to_string().to_lowercase(), sm.trial.m);
        sm.save(&out.join("models").join(name))?;
    }
    let mut summaries = RunSummaries {
        sweeps: outcome.sweeps,
        reruns: outcome.reruns,
    };
    if !timing {
        for s in summaries.sweeps.iter_mut().chain(summaries.reruns.iter_mut()) {
            s.best.seconds = 0.0;
            s.trials.iter_mut().for_each(|t| t.seconds = 0.0);
        }
    }
    let json = serde_json::to_string_pretty(&summaries).map_err(|e| CliError::Internal(e.to_string()))?;
    write_file(&out.join("summaries.json"), &(json + "\n"))?;
    if outcome.failed_trials > 0 {
        warn!("{} trials failed; see the log above", outcome.failed_trials);
    }
    print!("{}", write_reports(out, &summaries)?);
    Ok(())
}

fn cmd_evaluate(
    cli: &Cli,
    features: &Path,
    model: &Path,
    basis: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if load_config(cli)?.seed.is_none() {
        return Err(CliError::Usage("evaluate needs a master seed (--seed or `seed` in the config)".into()));
    }
    let saved = SavedModel::load(model)?;
    let mut m = LabeledFeatureMatrix::load(features).map_err(data)?;
    if let Some(b) = basis {
        let b = PcaBasis::load(b).map_err(data)?;
        m = pca_transform(&b, &m).map_err(data)?;
    }
    let ds = Dataset::from_matrix(&m, &saved.class_names)?;
    let mut hits = 0;
    let mut lines = String::from("row,label,predicted\n");
    for (i, (x, &c)) in ds.inputs.iter().zip(&ds.classes).enumerate() {
        let p = saved.model.classify(x).map_err(CliError::Data)?;
        hits += usize::from(p == c);
        lines += &format!("{i},{},{}\n", saved.class_names[c], saved.class_names[p]);
    }
    if let Some(o) = out {
        write_file(o, &lines)?;
    }
    println!("accuracy: {:.2}% ({hits}/{})", 100.0 * hits as f64 / ds.len() as f64, ds.len());
    Ok(())
}

fn cmd_report(run: &Path, format: FormatArg) -> Result<(), CliError> {
    let path = run.join("summaries.json");
    let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let s: RunSummaries = serde_json::from_str(&text).map_err(|e| io_err(&path, e))?;
    write_reports(run, &s)?;
    let fmt = match format {
        FormatArg::Text => ReportFormat::Text,
        FormatArg::Markdown => ReportFormat::Markdown,
    };
    print!("{}", render_run(&s, fmt));
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenSynthetic { out, per_class, size } => cmd_gen_synthetic(cli, out, *per_class, *size),
        Command::Extract {
            corpus,
            out,
            manifest,
            se,
            spectrum_bins,
            clusters,
        } => cmd_extract(cli, corpus, out, manifest.as_deref(), *se, *spectrum_bins, *clusters),
        Command::Pca {
            features,
            pca_components,
            out,
            basis,
            apply,
        } => cmd_pca(features, *pca_components, out, basis.as_deref(), apply.as_deref()),
        Command::Train {
            features,
            out,
            pca_components,
            strict_paper,
            timing,
            select_by_mean,
        } => cmd_train(cli, features, out, *pca_components, *strict_paper, *timing, *select_by_mean),
        Command::Evaluate {
            features,
            model,
            basis,
            out,
        } => cmd_evaluate(cli, features, model, basis.as_deref(), out.as_deref()),
        Command::Report { run, format } => cmd_report(run, *format),
    }
}
