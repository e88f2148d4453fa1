//! Shape classifiers on outlyingness (`RMD`, `VOM`) and the maximum-depth
//! baselines built on integrated (`FM1`, `FM2`) and random-projection
//! (`RP1`, `RP2`) functional depths.

use crate::curves::{Curve, FunctionalGroup, Grid};
use crate::linalg::Matrix;
use crate::outlyingness::Reference;
use crate::pointwise::{random_directions, tukey_depth_sorted, MahalanobisScatter, ProjectedCloud, DEFAULT_TUKEY_DIRECTIONS};
use crate::robust::{default_h, mcd_fit, rmd, McdFit};
use crate::{seed, Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random projections per model for `RP1`/`RP2`.
pub const DEFAULT_PROJECTIONS: usize = 50;

const STREAM_TUKEY: u64 = 1;
const STREAM_PROJECTIONS: u64 = 2;
const STREAM_MCD: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Robust Mahalanobis distance of `(MO, VO)` under a per-group MCD fit.
    Rmd,
    /// Frobenius norm of `VOM`.
    Vom,
    /// Integrated random Tukey depth.
    Fm1,
    /// Integrated Mahalanobis depth.
    Fm2,
    /// Random-projection Tukey depth.
    Rp1,
    /// Random-projection Mahalanobis depth.
    Rp2,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Rmd, Method::Vom, Method::Fm1, Method::Fm2, Method::Rp1, Method::Rp2];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rmd => "RMD",
            Method::Vom => "VOM",
            Method::Fm1 => "FM1",
            Method::Fm2 => "FM2",
            Method::Rp1 => "RP1",
            Method::Rp2 => "RP2",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Method::Rmd | Method::Vom => Orientation::LowerIsCloser,
            _ => Orientation::HigherIsCloser,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnsupportedParameter(format!("unknown method '{s}'")))
    }
}

/// Whether small or large scores indicate membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    LowerIsCloser,
    HigherIsCloser,
}

/// Point-wise depth used inside a functional depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseDepth {
    Tukey,
    Mahalanobis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Random grid-function directions for `RP1`/`RP2`.
    pub projections: usize,
    /// Random directions for the point-wise Tukey depth in `FM1`.
    pub tukey_directions: usize,
    /// MCD subset size; `None` means `⌊(n + p + 2)/2⌋`.
    pub mcd_h: Option<usize>,
    pub projection_law: ProjectionLaw,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            projections: DEFAULT_PROJECTIONS,
            tukey_directions: DEFAULT_TUKEY_DIRECTIONS,
            mcd_h: None,
            projection_law: ProjectionLaw::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Index of the chosen group.
    pub label: usize,
    /// One score per group.
    pub scores: Vec<f64>,
    pub orientation: Orientation,
}

impl Prediction {
    /// Picks the optimal score; ties and NaNs go to the smallest index.
    pub fn from_scores(scores: Vec<f64>, orientation: Orientation) -> Self {
        let mut label = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            let best = scores[label];
            let better = match orientation {
                Orientation::LowerIsCloser => s < best || (best.is_nan() && !s.is_nan()),
                Orientation::HigherIsCloser => s > best || (best.is_nan() && !s.is_nan()),
            };
            if better {
                label = i;
            }
        }
        Self { label, scores, orientation }
    }
}

/// Law of the random grid functions used as projection directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectionLaw {
    /// iid standard normal values at the grid points.
    WhiteNoise,
    /// Zero-mean Gaussian process with covariance `exp(−|t − s|/θ)`, where
    /// `θ` is `range` times the span of the grid.
    Exponential { range: f64 },
}

impl Default for ProjectionLaw {
    fn default() -> Self {
        ProjectionLaw::Exponential { range: 0.2 }
    }
}

/// One random grid function per component drawn from `law`, each scaled to
/// unit discrete `L²` norm.
pub fn random_projections(grid: &Grid, p: usize, count: usize, law: ProjectionLaw, seed: u64) -> Result<Vec<Curve>> {
    let m = grid.len();
    let t = grid.points();
    let factor = match law {
        ProjectionLaw::WhiteNoise => None,
        ProjectionLaw::Exponential { range } => {
            let theta = range * (t[m - 1] - t[0]);
            if !(theta > 0.0) {
                return Err(Error::Domain(format!("projection range {range} must be positive")));
            }
            let cov = Matrix::from_fn(m, m, |i, j| libm::exp(-(t[i] - t[j]).abs() / theta));
            Some(cov.cholesky().ok_or(Error::InvalidCovariance)?)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let mut comps: Vec<Vec<f64>> = Vec::with_capacity(p);
            for _ in 0..p {
                let z: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
                let a = match &factor {
                    Some(l) => l.factor().mul_vec(&z),
                    None => z,
                };
                let sq: f64 = a.iter().zip(grid.weights()).map(|(v, w)| w * v * v).sum();
                let norm = libm::sqrt(sq);
                comps.push(a.into_iter().map(|v| v / norm).collect());
            }
            Curve::from_components(&comps).expect("nonempty components")
        })
        .collect())
}

/// `Σ_k ∫ a_k(t) x_k(t) dt` on the grid.
pub fn project(curve: &Curve, direction: &Curve, grid: &Grid) -> f64 {
    curve
        .rows()
        .zip(direction.rows())
        .zip(grid.weights())
        .map(|((x, a), w)| w * x.iter().zip(a).map(|(u, v)| u * v).sum::<f64>())
        .sum()
}

/// Direction-wise summary of a group's projections.
#[derive(Debug, Clone)]
struct ProjectedGroup {
    sorted: Vec<f64>,
    mean: f64,
    var: f64,
}

impl ProjectedGroup {
    fn new(mut values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 { values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        values.sort_by(f64::total_cmp);
        Self { sorted: values, mean, var }
    }

    fn depth(&self, s: f64, kind: PointwiseDepth) -> f64 {
        match kind {
            PointwiseDepth::Tukey => tukey_depth_sorted(s, &self.sorted).value(),
            PointwiseDepth::Mahalanobis if self.var > 0.0 => 1.0 / (1.0 + (s - self.mean) * (s - self.mean) / self.var),
            // all projections equal: depth 1 at the common value only
            PointwiseDepth::Mahalanobis => {
                if s == self.mean {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Mean over `directions` of the univariate depth of the projection of `x0`
/// among the projections of `group`.
pub fn functional_depth_rp(x0: &Curve, group: &FunctionalGroup, kind: PointwiseDepth, directions: &[Curve]) -> Result<f64> {
    group.check_compatible(x0)?;
    if directions.is_empty() {
        return Err(Error::Precondition("random projection depth needs at least one direction".into()));
    }
    let grid = group.grid();
    let mut total = 0.0;
    for a in directions {
        group.check_compatible(a)?;
        let proj = ProjectedGroup::new(group.curves().iter().map(|c| project(c, a, grid)).collect());
        total += proj.depth(project(x0, a, grid), kind);
    }
    Ok(total / directions.len() as f64)
}

/// Integral over the grid of the point-wise depth of `x0(t)` within the
/// group's values at `t`. `seed` drives the Tukey directions.
pub fn functional_depth_fm(x0: &Curve, group: &FunctionalGroup, kind: PointwiseDepth, config: &ClassifierConfig, seed: u64) -> Result<f64> {
    group.check_compatible(x0)?;
    let pw = PointwiseGroup::new(group, kind, &tukey_direction_sets(group.grid().len(), group.dim(), kind, config, seed))?;
    pw.integrated_depth(x0, group.grid())
}

fn tukey_direction_sets(m: usize, p: usize, kind: PointwiseDepth, config: &ClassifierConfig, seed: u64) -> Vec<Vec<Vec<f64>>> {
    if kind != PointwiseDepth::Tukey {
        return Vec::new();
    }
    let master = seed::derive(seed, STREAM_TUKEY);
    (0..m)
        .map(|i| if p == 1 { vec![vec![1.0]] } else { random_directions(p, config.tukey_directions, seed::derive(master, i as u64)) })
        .collect()
}

/// Per-grid-point depth machinery for one group.
#[derive(Debug, Clone)]
enum PointwiseGroup {
    Tukey { clouds: Vec<ProjectedCloud>, directions: Vec<Vec<Vec<f64>>> },
    Mahalanobis(Vec<MahalanobisScatter>),
}

impl PointwiseGroup {
    fn new(group: &FunctionalGroup, kind: PointwiseDepth, directions: &[Vec<Vec<f64>>]) -> Result<Self> {
        let m = group.grid().len();
        Ok(match kind {
            PointwiseDepth::Tukey => {
                if directions.iter().any(Vec::is_empty) {
                    return Err(Error::Precondition("random Tukey depth needs at least one direction".into()));
                }
                PointwiseGroup::Tukey {
                    clouds: (0..m).map(|i| ProjectedCloud::new(group.slice(i), &directions[i])).collect(),
                    directions: directions.to_vec(),
                }
            }
            PointwiseDepth::Mahalanobis => PointwiseGroup::Mahalanobis(
                (0..m).map(|i| MahalanobisScatter::fit(group.slice(i), group.dim())).collect::<Result<_>>()?,
            ),
        })
    }

    fn integrated_depth(&self, x0: &Curve, grid: &Grid) -> Result<f64> {
        let depths: Vec<f64> = match self {
            PointwiseGroup::Tukey { clouds, directions } => {
                x0.rows().enumerate().map(|(i, x)| clouds[i].depth(x, &directions[i]).value()).collect()
            }
            PointwiseGroup::Mahalanobis(s) => x0.rows().enumerate().map(|(i, x)| s[i].depth(x).value()).collect(),
        };
        crate::curves::integrate(&depths, grid)
    }
}

/// Per-group data precomputed at training time.
#[derive(Debug, Clone)]
enum GroupModel {
    Rmd { reference: Reference, fit: McdFit },
    Vom(Reference),
    Integrated(PointwiseGroup),
    Projected(Vec<ProjectedGroup>),
}

/// A classifier ready for prediction. Read-only after [`train`].
#[derive(Debug, Clone)]
pub struct TrainedModel {
    method: Method,
    config: ClassifierConfig,
    seed: u64,
    grid: Grid,
    p: usize,
    labels: Vec<String>,
    groups: Vec<GroupModel>,
    projections: Vec<Curve>,
}

impl TrainedModel {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_groups(&self) -> usize {
        self.labels.len()
    }

    /// Directions shared by all groups (empty unless `RP1`/`RP2`).
    pub fn projections(&self) -> &[Curve] {
        &self.projections
    }

    /// MCD fit of group `i` on its training features (`RMD` only).
    pub fn mcd(&self, i: usize) -> Option<&McdFit> {
        match self.groups.get(i)? {
            GroupModel::Rmd { fit, .. } => Some(fit),
            _ => None,
        }
    }

    fn check_curve(&self, x0: &Curve) -> Result<()> {
        if x0.len() != self.grid.len() || x0.dim() != self.p {
            return Err(Error::Shape(format!(
                "curve is {}x{}, model expects {}x{}",
                x0.len(),
                x0.dim(),
                self.grid.len(),
                self.p
            )));
        }
        Ok(())
    }

    fn require(&self, allowed: &[Method]) -> Result<()> {
        if allowed.contains(&self.method) {
            Ok(())
        } else {
            Err(Error::Precondition(format!("model was trained for {}", self.method)))
        }
    }
}

/// Precomputes everything the chosen method needs from `groups`.
pub fn train(groups: &[FunctionalGroup], method: Method, config: &ClassifierConfig, seed: u64) -> Result<TrainedModel> {
    if groups.len() < 2 {
        return Err(Error::Precondition(format!("need at least two groups, got {}", groups.len())));
    }
    let grid = groups[0].grid().clone();
    let p = groups[0].dim();
    for g in groups {
        if g.grid() != &grid || g.dim() != p {
            return Err(Error::Shape(format!("group '{}' does not share the grid and dimension of the first group", g.label())));
        }
        if g.len() < 2 {
            return Err(Error::Precondition(format!("group '{}' has fewer than two curves", g.label())));
        }
    }
    if matches!(method, Method::Rp1 | Method::Rp2) && config.projections == 0 {
        return Err(Error::Precondition("random projection depth needs at least one direction".into()));
    }
    let projections = match method {
        Method::Rp1 | Method::Rp2 => {
            random_projections(&grid, p, config.projections, config.projection_law, seed::derive(seed, STREAM_PROJECTIONS))?
        }
        _ => Vec::new(),
    };
    let tukey = match method {
        Method::Fm1 => tukey_direction_sets(grid.len(), p, PointwiseDepth::Tukey, config, seed),
        _ => Vec::new(),
    };
    let models = groups
        .iter()
        .map(|g| -> Result<GroupModel> {
            Ok(match method {
                Method::Rmd => {
                    let need = p + 4;
                    if g.len() < need {
                        return Err(Error::Precondition(format!(
                            "group '{}' has {} curves, RMD needs at least {need}",
                            g.label(),
                            g.len()
                        )));
                    }
                    let reference = Reference::new(g)?;
                    let features =
                        g.curves().iter().map(|c| reference.summarize(c).map(|s| s.feature())).collect::<Result<Vec<_>>>()?;
                    let h = config.mcd_h.unwrap_or_else(|| default_h(g.len(), p + 1));
                    let fit = mcd_fit(&features, h, seed::derive(seed, STREAM_MCD))?;
                    GroupModel::Rmd { reference, fit }
                }
                Method::Vom => GroupModel::Vom(Reference::new(g)?),
                Method::Fm1 => GroupModel::Integrated(PointwiseGroup::new(g, PointwiseDepth::Tukey, &tukey)?),
                Method::Fm2 => GroupModel::Integrated(PointwiseGroup::new(g, PointwiseDepth::Mahalanobis, &[])?),
                Method::Rp1 | Method::Rp2 => GroupModel::Projected(
                    projections
                        .iter()
                        .map(|a| ProjectedGroup::new(g.curves().iter().map(|c| project(c, a, &grid)).collect()))
                        .collect(),
                ),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainedModel {
        method,
        config: *config,
        seed,
        grid,
        p,
        labels: groups.iter().map(|g| g.label().into()).collect(),
        groups: models,
        projections,
    })
}

/// Smallest robust Mahalanobis distance of `(MO, VO)` wins.
pub fn predict_rmd(model: &TrainedModel, x0: &Curve) -> Result<Prediction> {
    model.require(&[Method::Rmd])?;
    model.check_curve(x0)?;
    let scores = model
        .groups
        .iter()
        .map(|g| match g {
            GroupModel::Rmd { reference, fit } => rmd(&reference.summarize(x0)?.feature(), fit),
            _ => unreachable!("RMD model holds RMD groups"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prediction::from_scores(scores, Orientation::LowerIsCloser))
}

/// Smallest `‖VOM‖_F` wins.
pub fn predict_vom(model: &TrainedModel, x0: &Curve) -> Result<Prediction> {
    model.require(&[Method::Vom])?;
    model.check_curve(x0)?;
    let scores = model
        .groups
        .iter()
        .map(|g| match g {
            GroupModel::Vom(reference) => Ok(reference.summarize(x0)?.vom.frobenius_norm()),
            _ => unreachable!("VOM model holds VOM groups"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prediction::from_scores(scores, Orientation::LowerIsCloser))
}

/// Largest functional depth wins.
pub fn predict_maxdepth(model: &TrainedModel, x0: &Curve) -> Result<Prediction> {
    model.require(&[Method::Fm1, Method::Fm2, Method::Rp1, Method::Rp2])?;
    model.check_curve(x0)?;
    let kind = if matches!(model.method, Method::Rp1) { PointwiseDepth::Tukey } else { PointwiseDepth::Mahalanobis };
    let scores = model
        .groups
        .iter()
        .map(|g| match g {
            GroupModel::Integrated(pw) => pw.integrated_depth(x0, &model.grid),
            GroupModel::Projected(proj) => {
                let total: f64 =
                    proj.iter().zip(&model.projections).map(|(pg, a)| pg.depth(project(x0, a, &model.grid), kind)).sum();
                Ok(total / proj.len() as f64)
            }
            _ => unreachable!("depth model holds depth groups"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prediction::from_scores(scores, Orientation::HigherIsCloser))
}

/// Dispatches on the model's method.
pub fn predict(model: &TrainedModel, x0: &Curve) -> Result<Prediction> {
    match model.method {
        Method::Rmd => predict_rmd(model, x0),
        Method::Vom => predict_vom(model, x0),
        _ => predict_maxdepth(model, x0),
    }
}
