use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dirout::core::classify::{predict, train, ClassifierConfig};
use dirout::core::curves::derivative_augment;
use dirout::core::simulate::{derivative_dataset, generate, Dataset, GeneratorSpec};
use dirout::core::{FunctionalGroup, Method};
use dirout::diagnostics::emit_diagnostics;
use dirout::experiment::{run_experiment, ExperimentSpec};
use dirout::io::{read_curves, write_curves_file, CurveTable};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Curve classification by directional outlyingness.
#[derive(Parser)]
#[command(name = "dirout", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one class of a benchmark dataset as curve CSV.
    Simulate(SimulateArgs),
    /// Run a replicated experiment from a JSON spec; writes per-replicate rates.
    Bench(BenchArgs),
    /// Train on one curve CSV and label the curves of another.
    Classify(ClassifyArgs),
    /// Write MO, VO and FO of every curve against a reference sample.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Dataset: 1, 2, 3, 1c, 4, 5 or 6.
    #[arg(long)]
    data: Dataset,
    /// Class, 0 or 1.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    class: u8,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Append first derivatives to the noiseless mean functions.
    #[arg(long)]
    derivative: bool,
    /// Drop the Gaussian noise process.
    #[arg(long)]
    noiseless: bool,
    /// Half-width of the uniform law of U_01 in Data 5.
    #[arg(long)]
    data5_u01_half_width: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// RMD, VOM, FM1, FM2, RP1 or RP2.
    #[arg(long)]
    method: Method,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random projections for RP1/RP2.
    #[arg(long)]
    nr: Option<usize>,
    /// Random directions per grid point for FM1.
    #[arg(long)]
    tukey_dirs: Option<usize>,
    /// MCD subset size for RMD.
    #[arg(long)]
    mcd_h: Option<usize>,
    /// Append first derivatives to train and test curves.
    #[arg(long)]
    derivative: bool,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Curves to summarize; all groups in the file are used.
    #[arg(long)]
    group: PathBuf,
    /// Reference sample; all groups in the file are pooled.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn load(path: &Path) -> Result<CurveTable> {
    read_curves(path).with_context(|| format!("reading {}", path.display()))
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut spec = GeneratorSpec::new(a.data, a.class, a.n, a.seed);
    if a.noiseless {
        spec = spec.noiseless();
    }
    if let Some(w) = a.data5_u01_half_width {
        spec.data5_u01_half_width = w;
    }
    let group = if a.derivative { derivative_dataset(&spec)? } else { generate(&spec)? };
    write_curves_file(&a.out, &[group], None)?;
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.spec).with_context(|| format!("cannot read {}", a.spec.display()))?;
    let spec = ExperimentSpec::from_json(&text).with_context(|| format!("parsing {}", a.spec.display()))?;
    let result = run_experiment(&spec)?;
    let mut w = create(&a.out)?;
    result.write_csv(&mut w)?;
    w.flush()?;
    print!("{}", result.summary());
    Ok(())
}

fn augment(groups: Vec<FunctionalGroup>, derivative: bool) -> Result<Vec<FunctionalGroup>> {
    if !derivative {
        return Ok(groups);
    }
    Ok(groups.iter().map(derivative_augment).collect::<Result<_, _>>()?)
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let train_table = load(&a.train)?;
    let test_table = load(&a.test)?;
    let defaults = ClassifierConfig::default();
    let config = ClassifierConfig {
        projections: a.nr.unwrap_or(defaults.projections),
        tukey_directions: a.tukey_dirs.unwrap_or(defaults.tukey_directions),
        mcd_h: a.mcd_h.or(defaults.mcd_h),
        ..defaults
    };
    let train_groups = augment(train_table.groups, a.derivative)?;
    let test_groups = augment(test_table.groups, a.derivative)?;
    let model = train(&train_groups, a.method, &config, a.seed)?;
    let labels: Vec<String> = train_groups.iter().map(|g| g.label().to_string()).collect();

    let mut w = csv::Writer::from_writer(create(&a.out)?);
    let mut header = vec!["curve_id".to_string(), "true_group".into(), "predicted".into()];
    header.extend(labels.iter().map(|l| format!("score_{l}")));
    w.write_record(&header)?;
    let (mut correct, mut total) = (0usize, 0usize);
    for (group, ids) in test_groups.iter().zip(&test_table.curve_ids) {
        for (curve, id) in group.curves().iter().zip(ids) {
            let p = predict(&model, curve).with_context(|| format!("classifying curve {id}"))?;
            let predicted = &labels[p.label];
            total += 1;
            correct += usize::from(predicted == group.label());
            let mut row = vec![id.clone(), group.label().to_string(), predicted.clone()];
            row.extend(p.scores.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    if total == 0 {
        bail!("{} contains no curves", a.test.display());
    }
    println!("p_c = {:.4} ({correct}/{total})", correct as f64 / total as f64);
    Ok(())
}

fn diagnose(a: DiagnoseArgs) -> Result<()> {
    let group_table = load(&a.group)?;
    let reference = load(&a.reference)?.pooled("reference")?;
    let group = group_table.pooled("group")?;
    let ids: Vec<String> = group_table.curve_ids.concat();
    let mut w = create(&a.out)?;
    emit_diagnostics(&mut w, &group, &ids, &reference)?;
    w.flush()?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
        Command::Classify(a) => classify(a),
        Command::Diagnose(a) => diagnose(a),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
