//! Replicated train/test experiments reporting correct classification
//! rates.

use crate::io::read_curves;
use crate::{Error, Result};
use dirout_core::classify::{predict, train, ClassifierConfig, Method};
use dirout_core::curves::derivative_augment;
use dirout_core::seed;
use dirout_core::simulate::{generate, Dataset, GeneratorSpec};
use dirout_core::{Curve, FunctionalGroup};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

const STREAM_SPLIT: u64 = 10;
const STREAM_MODEL: u64 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    /// Two classes drawn from a benchmark design.
    Generator {
        dataset: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        data5_u01_half_width: Option<f64>,
    },
    /// Labelled curves from a long-format CSV; every group is a class.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodConfig {
    pub projections: usize,
    pub tukey_directions: usize,
    pub mcd_h: Option<usize>,
    /// Append first derivatives as extra components.
    pub derivative: bool,
}

impl Default for MethodConfig {
    fn default() -> Self {
        let c = ClassifierConfig::default();
        Self { projections: c.projections, tukey_directions: c.tukey_directions, mcd_h: c.mcd_h, derivative: false }
    }
}

impl MethodConfig {
    pub fn classifier(&self) -> ClassifierConfig {
        ClassifierConfig {
            projections: self.projections,
            tukey_directions: self.tukey_directions,
            mcd_h: self.mcd_h,
            ..ClassifierConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub source: Source,
    #[serde(with = "method_names")]
    pub methods: Vec<Method>,
    /// Training curves per class.
    pub n_train: usize,
    /// Test curves per class.
    pub n_test: usize,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub config: MethodConfig,
}

mod method_names {
    use dirout_core::classify::Method;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(methods: &[Method], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(methods.iter().map(|m| m.name()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Method>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Spec("replicates must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Spec("methods must not be empty".into()));
        }
        if self.n_train < 2 || self.n_test == 0 {
            return Err(Error::Spec("need n_train >= 2 and n_test >= 1 per class".into()));
        }
        Ok(())
    }
}

/// Rates of one method across replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    #[serde(serialize_with = "method_name")]
    pub method: Method,
    pub rates: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
}

fn method_name<S: serde::Serializer>(m: &Method, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(m.name())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub methods: Vec<MethodResult>,
    pub replicate_seeds: Vec<u64>,
}

impl ExperimentResult {
    pub fn method(&self, m: Method) -> Option<&MethodResult> {
        self.methods.iter().find(|r| r.method == m)
    }

    /// `method,replicate,seed,p_c`, one row per method and replicate.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["method", "replicate", "seed", "p_c"])?;
        for r in &self.methods {
            for (i, (rate, seed)) in r.rates.iter().zip(&self.replicate_seeds).enumerate() {
                w.write_record([r.method.name().to_string(), i.to_string(), seed.to_string(), rate.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `method  mean  sd` lines.
    pub fn summary(&self) -> String {
        let mut out = String::from("method\tmean_p_c\tsd\n");
        for r in &self.methods {
            out.push_str(&format!("{}\t{:.4}\t{:.4}\n", r.method, r.mean, r.sd));
        }
        out
    }
}

/// Train and test curves per class.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<FunctionalGroup>,
    pub test: Vec<FunctionalGroup>,
}

/// Shuffles each group and takes `n_train` then `n_test` curves from it.
pub fn stratified_split(groups: &[FunctionalGroup], n_train: usize, n_test: usize, seed: u64) -> Result<Split> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split { train: Vec::new(), test: Vec::new() };
    for g in groups {
        if g.len() < n_train + n_test {
            return Err(Error::Spec(format!(
                "group '{}' has {} curves, split needs {}",
                g.label(),
                g.len(),
                n_train + n_test
            )));
        }
        let mut idx: Vec<usize> = (0..g.len()).collect();
        idx.shuffle(&mut rng);
        let pick = |ix: &[usize]| -> Result<FunctionalGroup> {
            let curves: Vec<Curve> = ix.iter().map(|&i| g.curves()[i].clone()).collect();
            Ok(FunctionalGroup::new(g.label(), g.grid().clone(), curves)?)
        };
        split.train.push(pick(&idx[..n_train])?);
        split.test.push(pick(&idx[n_train..n_train + n_test])?);
    }
    Ok(split)
}

/// Both classes of a benchmark design, `n` curves each.
pub fn generate_classes(dataset: Dataset, n: usize, seed: u64, data5_u01_half_width: Option<f64>) -> Result<Vec<FunctionalGroup>> {
    (0..2u8)
        .map(|class| {
            let mut spec = GeneratorSpec::new(dataset, class, n, seed::derive(seed, class as u64));
            if let Some(w) = data5_u01_half_width {
                spec.data5_u01_half_width = w;
            }
            Ok(generate(&spec)?)
        })
        .collect()
}

/// Fraction of test curves assigned to their own group.
pub fn correct_rate(method: Method, split: &Split, config: &ClassifierConfig, seed: u64) -> Result<f64> {
    let model = train(&split.train, method, config, seed)?;
    let jobs: Vec<(usize, &Curve)> =
        split.test.iter().enumerate().flat_map(|(k, g)| g.curves().iter().map(move |c| (k, c))).collect();
    let hits = jobs
        .par_iter()
        .map(|&(k, c)| predict(&model, c).map(|p| usize::from(p.label == k)))
        .collect::<dirout_core::Result<Vec<_>>>()?;
    Ok(hits.iter().sum::<usize>() as f64 / jobs.len() as f64)
}

fn replicate_data(spec: &ExperimentSpec, loaded: Option<&[FunctionalGroup]>, seed_r: u64) -> Result<Split> {
    let groups = match (&spec.source, loaded) {
        (_, Some(groups)) => groups.to_vec(),
        (Source::Generator { dataset, data5_u01_half_width }, None) => {
            let ds: Dataset = dataset.parse()?;
            generate_classes(ds, spec.n_train + spec.n_test, seed_r, *data5_u01_half_width)?
        }
        (Source::Csv { .. }, None) => unreachable!("CSV data is loaded up front"),
    };
    let groups = if spec.config.derivative && loaded.is_none() {
        groups.iter().map(derivative_augment).collect::<dirout_core::Result<Vec<_>>>()?
    } else {
        groups
    };
    stratified_split(&groups, spec.n_train, spec.n_test, seed::derive(seed_r, STREAM_SPLIT))
}

fn run_replicate(spec: &ExperimentSpec, loaded: Option<&[FunctionalGroup]>, seed_r: u64) -> Result<Vec<f64>> {
    let split = replicate_data(spec, loaded, seed_r)?;
    let p = split.train[0].dim();
    if spec.methods.contains(&Method::Rmd) && spec.n_train < p + 4 {
        return Err(Error::Spec(format!("RMD needs n_train >= p + 4 = {}", p + 4)));
    }
    let config = spec.config.classifier();
    spec.methods.iter().map(|&m| correct_rate(m, &split, &config, seed::derive(seed_r, STREAM_MODEL))).collect()
}

/// Runs every replicate (in parallel) and aggregates per-method rates.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let loaded = match &spec.source {
        Source::Csv { path } => {
            let table = read_curves(path)?;
            if table.groups.len() < 2 {
                return Err(Error::Spec("CSV source needs at least two groups".into()));
            }
            let groups = if spec.config.derivative {
                table.groups.iter().map(derivative_augment).collect::<dirout_core::Result<Vec<_>>>()?
            } else {
                table.groups
            };
            Some(groups)
        }
        Source::Generator { dataset, .. } => {
            dataset.parse::<Dataset>()?;
            None
        }
    };
    let seeds: Vec<u64> = (0..spec.replicates).map(|r| seed::derive(spec.seed, r as u64)).collect();
    let per_rep = seeds
        .par_iter()
        .enumerate()
        .map(|(r, &s)| {
            run_replicate(spec, loaded.as_deref(), s).map_err(|e| Error::Replicate { replicate: r, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    let methods = spec
        .methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let rates: Vec<f64> = per_rep.iter().map(|r| r[k]).collect();
            let (mean, sd) = mean_sd(&rates);
            MethodResult { method, rates, mean, sd }
        })
        .collect();
    Ok(ExperimentResult { methods, replicate_seeds: seeds })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = if v.len() > 1 { (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}
