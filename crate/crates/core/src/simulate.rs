//! Seeded generators for the benchmark curve families: univariate Data 1,
//! 2, 3 and 1C, multivariate Data 4, 5 and 6, and their derivative-augmented
//! versions.

use crate::curves::{derivative_augment, Curve, FunctionalGroup, Grid};
use crate::linalg::{Cholesky, Matrix};
use crate::special::matern;
use crate::{seed, Error, Result};
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Grid points per curve in the benchmark designs.
pub const DEFAULT_GRID_POINTS: usize = 50;

/// Relative jitter added to the covariance diagonal when Cholesky fails.
pub const JITTER: f64 = 1e-10;
/// Number of ×10 jitter escalations after the first attempt.
pub const JITTER_ESCALATIONS: u32 = 3;

/// Contamination probability of Data 1C class 0.
pub const CONTAMINATION: f64 = 0.1;

/// Gneiting bivariate Matérn cross-covariance
/// `C_ij(h) = ρ_ij σ_i σ_j M(h; ν_ij, α_ij)` with `ρ_11 = ρ_22 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateMatern {
    pub sigma: [f64; 2],
    /// `ν_11, ν_22, ν_12`.
    pub nu: [f64; 3],
    /// `α_11, α_22, α_12`.
    pub alpha: [f64; 3],
    pub rho: f64,
}

impl Default for BivariateMatern {
    fn default() -> Self {
        Self { sigma: [0.01, 0.01], nu: [2.0, 2.0, 2.0], alpha: [0.2, 0.1, 0.16], rho: 0.6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovarianceSpec {
    /// `scale · exp(−((t − s)/range)²)`.
    SquaredExponential { scale: f64, range: f64 },
    MaternBivariate(BivariateMatern),
}

impl CovarianceSpec {
    /// Noise of the univariate designs: `0.25 exp(−(t − s)²)`.
    pub const UNIVARIATE: CovarianceSpec = CovarianceSpec::SquaredExponential { scale: 0.25, range: 1.0 };

    /// Noise of the bivariate designs.
    pub fn bivariate() -> Self {
        CovarianceSpec::MaternBivariate(BivariateMatern::default())
    }

    pub fn dim(&self) -> usize {
        match self {
            CovarianceSpec::SquaredExponential { .. } => 1,
            CovarianceSpec::MaternBivariate(_) => 2,
        }
    }

    /// Covariance of the stacked vector `(e_1(t_1..t_m), …, e_p(t_1..t_m))`.
    pub fn joint_matrix(&self, grid: &Grid) -> Result<Matrix> {
        let t = grid.points();
        let m = t.len();
        match *self {
            CovarianceSpec::SquaredExponential { scale, range } => {
                if !(scale > 0.0 && range > 0.0) {
                    return Err(Error::Domain(format!("squared-exponential scale {scale} and range {range} must be positive")));
                }
                Ok(Matrix::from_fn(m, m, |i, j| {
                    let u = (t[i] - t[j]) / range;
                    scale * libm::exp(-u * u)
                }))
            }
            CovarianceSpec::MaternBivariate(b) => {
                let mut out = Matrix::zeros(2 * m, 2 * m);
                for (bi, bj, k, rho) in [(0, 0, 0, 1.0), (1, 1, 1, 1.0), (0, 1, 2, b.rho), (1, 0, 2, b.rho)] {
                    let s = rho * b.sigma[bi] * b.sigma[bj];
                    for i in 0..m {
                        for j in 0..m {
                            out[(bi * m + i, bj * m + j)] = s * matern((t[i] - t[j]).abs(), b.nu[k], b.alpha[k])?;
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Cholesky factor of `cov`, adding `JITTER·max diag·I` on failure and
/// escalating it tenfold up to [`JITTER_ESCALATIONS`] times.
pub fn jittered_cholesky(cov: &Matrix) -> Result<Cholesky> {
    if let Some(c) = cov.cholesky() {
        return Ok(c);
    }
    let n = cov.rows();
    let max_diag = (0..n).map(|i| cov[(i, i)]).fold(0.0, f64::max);
    let mut jitter = JITTER * max_diag;
    for _ in 0..=JITTER_ESCALATIONS {
        if let Some(c) = cov.add(&Matrix::identity(n).scale(jitter)).cholesky() {
            return Ok(c);
        }
        jitter *= 10.0;
    }
    Err(Error::InvalidCovariance)
}

/// `n` zero-mean Gaussian curves with covariance `cov` on `grid`.
pub fn sample_gp(cov: &CovarianceSpec, grid: &Grid, n: usize, seed: u64) -> Result<FunctionalGroup> {
    let chol = jittered_cholesky(&cov.joint_matrix(grid)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(FunctionalGroup::new("gp", grid.clone(), draw(&chol, grid.len(), cov.dim(), n, &mut rng))
        .expect("shapes match the grid"))
}

fn draw(chol: &Cholesky, m: usize, p: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<Curve> {
    let l = chol.factor();
    let dim = m * p;
    (0..n)
        .map(|_| {
            let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            let x = l.mul_vec(&z);
            // stacked by component; curves are stored by grid point
            let vals = (0..m).flat_map(|i| (0..p).map(move |k| (k, i))).map(|(k, i)| x[k * m + i]).collect();
            Curve::new(m, p, vals).expect("m·p values")
        })
        .collect()
}

/// Benchmark designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dataset {
    D1,
    D2,
    D3,
    /// Data 1 with class 0 contaminated by class-1 sine amplitudes.
    D1C,
    D4,
    D5,
    /// Class-matched Data 1, 2 and 3 as three components.
    D6,
}

impl Dataset {
    pub const ALL: [Dataset; 7] = [Dataset::D1, Dataset::D2, Dataset::D3, Dataset::D1C, Dataset::D4, Dataset::D5, Dataset::D6];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::D1 => "1",
            Dataset::D2 => "2",
            Dataset::D3 => "3",
            Dataset::D1C => "1C",
            Dataset::D4 => "4",
            Dataset::D5 => "5",
            Dataset::D6 => "6",
        }
    }

    /// Number of components per curve.
    pub fn dim(self) -> usize {
        match self {
            Dataset::D1 | Dataset::D2 | Dataset::D3 | Dataset::D1C => 1,
            Dataset::D4 | Dataset::D5 => 2,
            Dataset::D6 => 3,
        }
    }

    pub fn is_univariate(self) -> bool {
        self.dim() == 1
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Data {}", self.name())
    }
}

impl FromStr for Dataset {
    type Err = Error;

    /// Accepts `1`, `data1`, `Data 1C`, `d1c` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        let key = lower.trim_start_matches("data").trim_start_matches('d').trim_start_matches(['_', '-', ' ']);
        Dataset::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(key))
            .ok_or_else(|| Error::UnsupportedParameter(format!("unknown dataset '{s}'")))
    }
}

/// What to generate.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub dataset: Dataset,
    /// 0 or 1.
    pub class: u8,
    pub n: usize,
    pub grid: Grid,
    pub seed: u64,
    /// Add the Gaussian noise process; off gives the mean functions with
    /// their random coefficients.
    pub noise: bool,
    /// Half-width `w` of `U_01 ~ U(−w, w)` in Data 5 class 0.
    pub data5_u01_half_width: f64,
}

impl GeneratorSpec {
    /// Benchmark defaults: grid `tᵢ = i/50`, noise on, `U_01 ~ U(−2, 2)`.
    pub fn new(dataset: Dataset, class: u8, n: usize, seed: u64) -> Self {
        Self {
            dataset,
            class,
            n,
            grid: Grid::right_endpoints(DEFAULT_GRID_POINTS).expect("valid grid"),
            seed,
            noise: true,
            data5_u01_half_width: 2.0,
        }
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn noiseless(mut self) -> Self {
        self.noise = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Precondition("generator needs n >= 1".into()));
        }
        if self.class > 1 {
            return Err(Error::Precondition(format!("class must be 0 or 1, got {}", self.class)));
        }
        if !(self.data5_u01_half_width > 0.0) {
            return Err(Error::Domain("Data 5 U01 half-width must be positive".into()));
        }
        Ok(())
    }
}

/// A generated group plus which curves are contaminated (Data 1C class 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub group: FunctionalGroup,
    pub contaminated: Vec<bool>,
}

const STREAM_COEFFICIENTS: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_COMPONENTS: u64 = 10;

/// Draws `spec.n` curves of the requested class.
pub fn generate(spec: &GeneratorSpec) -> Result<FunctionalGroup> {
    generate_detailed(spec).map(|g| g.group)
}

/// [`generate`] that also reports contamination.
pub fn generate_detailed(spec: &GeneratorSpec) -> Result<Generated> {
    spec.validate()?;
    let label = format!("{}", spec.class);
    if spec.dataset == Dataset::D6 {
        return generate_d6(spec, label);
    }
    let grid = &spec.grid;
    let t = grid.points();
    let m = t.len();
    let p = spec.dataset.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(spec.seed, STREAM_COEFFICIENTS));
    let mut contaminated = Vec::with_capacity(spec.n);
    let mut means = Vec::with_capacity(spec.n);
    let sin = |f: f64| t.iter().map(move |&x| libm::sin(f * PI * x));
    let cos = |f: f64| t.iter().map(move |&x| libm::cos(f * PI * x));
    for _ in 0..spec.n {
        let mut dirty = false;
        let comps: Vec<Vec<f64>> = match (spec.dataset, spec.class) {
            (Dataset::D1, 0) => {
                let (a, b) = (rng.random_range(0.5..1.0), rng.random_range(0.5..1.0));
                vec1(sin(2.0).zip(cos(2.0)).map(|(s, c)| a * s + b * c).collect())
            }
            (Dataset::D1 | Dataset::D1C, 1) => {
                let (a, b) = (rng.random_range(1.0..1.2), rng.random_range(1.0..1.2));
                vec1(sin(2.0).zip(cos(2.0)).map(|(s, c)| a * s + b * c).collect())
            }
            (Dataset::D1C, 0) => {
                let v: f64 = rng.random_range(0.0..1.0);
                let (u01, u02, u11) = (rng.random_range(0.5..1.0), rng.random_range(0.5..1.0), rng.random_range(1.0..1.2));
                dirty = v < CONTAMINATION;
                let a = if dirty { u11 } else { u01 };
                vec1(sin(2.0).zip(cos(2.0)).map(|(s, c)| a * s + u02 * c).collect())
            }
            (Dataset::D2, 0) => vec1(sin(2.0).map(|s| 10.0 * s).collect()),
            (Dataset::D2, _) => vec1(sin(2.0).zip(sin(20.0)).map(|(s, w)| 10.0 * s + w).collect()),
            (Dataset::D3, 0) => {
                let u: f64 = rng.random_range(0.5..1.0);
                vec1(sin(2.0).map(|s| u * s).collect())
            }
            (Dataset::D3, _) => {
                let u: f64 = rng.random_range(-1.0..1.0);
                vec1(alloc::vec![u; m])
            }
            (Dataset::D4, 0) => alloc::vec![sin(4.0).collect(), cos(4.0).collect()],
            (Dataset::D4, _) => alloc::vec![
                sin(4.0).zip(sin(20.0)).map(|(a, b)| a + b / 10.0).collect(),
                cos(4.0).zip(cos(20.0)).map(|(a, b)| a + b / 10.0).collect(),
            ],
            (Dataset::D5, 0) => {
                let w = spec.data5_u01_half_width;
                let (u1, u2) = (rng.random_range(-w..w), rng.random_range(-2.0..2.0));
                alloc::vec![alloc::vec![u1; m], alloc::vec![u2; m]]
            }
            (Dataset::D5, _) => {
                let (u1, u2): (f64, f64) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                alloc::vec![sin(4.0).map(|s| u1 + s).collect(), cos(4.0).map(|c| u2 + c).collect()]
            }
            (Dataset::D6, _) => unreachable!("handled above"),
            (_, c) => unreachable!("class {c} validated"),
        };
        contaminated.push(dirty);
        means.push(comps);
    }
    let noise = if spec.noise {
        let cov = if p == 1 { CovarianceSpec::UNIVARIATE } else { CovarianceSpec::bivariate() };
        Some(sample_gp(&cov, grid, spec.n, seed::derive(spec.seed, STREAM_NOISE))?.into_curves())
    } else {
        None
    };
    let curves = means
        .into_iter()
        .enumerate()
        .map(|(j, comps)| {
            let mut c = Curve::from_components(&comps)?;
            if let Some(noise) = &noise {
                let vals: Vec<f64> = c.values().iter().zip(noise[j].values()).map(|(a, b)| a + b).collect();
                c = Curve::new(m, p, vals)?;
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Generated { group: FunctionalGroup::new(label, grid.clone(), curves)?, contaminated })
}

fn vec1(v: Vec<f64>) -> Vec<Vec<f64>> {
    alloc::vec![v]
}

fn generate_d6(spec: &GeneratorSpec, label: alloc::string::String) -> Result<Generated> {
    let parts = [Dataset::D1, Dataset::D2, Dataset::D3]
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            let sub = GeneratorSpec { dataset: d, seed: seed::derive(spec.seed, STREAM_COMPONENTS + k as u64), ..spec.clone() };
            generate(&sub)
        })
        .collect::<Result<Vec<_>>>()?;
    let curves = (0..spec.n)
        .map(|j| Curve::from_components(&parts.iter().map(|g| g.curves()[j].component(0)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Generated {
        group: FunctionalGroup::new(label, spec.grid.clone(), curves)?,
        contaminated: alloc::vec![false; spec.n],
    })
}

/// Univariate design with its first derivative appended as a second
/// component.
pub fn derivative_dataset(spec: &GeneratorSpec) -> Result<FunctionalGroup> {
    if !spec.dataset.is_univariate() {
        return Err(Error::Precondition(format!("derivative augmentation applies to univariate designs, not {}", spec.dataset)));
    }
    derivative_augment(&generate(spec)?)
}
