//! Minimum covariance determinant (FAST-MCD) and the robust Mahalanobis
//! distance on outlyingness features `(MOᵀ, VO)ᵀ`.

use crate::linalg::{self, Cholesky, Matrix};
use crate::seed;
use crate::special::{chi_square_cdf, chi_square_quantile};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tuning of the FAST-MCD search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McdOptions {
    /// Random elemental starts.
    pub starts: usize,
    /// Cap on concentration steps per start.
    pub max_steps: usize,
    /// Relative determinant decrease below which iteration stops.
    pub tolerance: f64,
}

impl Default for McdOptions {
    fn default() -> Self {
        Self { starts: 500, max_steps: 100, tolerance: 1e-12 }
    }
}

/// Maximal-breakdown subset size `⌊(n + d + 1)/2⌋`.
pub fn default_h(n: usize, d: usize) -> usize {
    (n + d).div_ceil(2)
}

/// `(h/n) / P(χ²_{d+2} ≤ χ²_{d}(h/n))`, which makes the raw `h`-subset
/// covariance consistent at the normal model. Equals 1 when `h = n`.
pub fn consistency_factor(h: usize, n: usize, d: usize) -> f64 {
    if h >= n {
        return 1.0;
    }
    let alpha = h as f64 / n as f64;
    let q = chi_square_quantile(alpha, d as f64);
    alpha / chi_square_cdf(q, d as f64 + 2.0)
}

/// Result of an MCD fit.
#[derive(Debug, Clone)]
pub struct McdFit {
    subset: Vec<usize>,
    location: Vec<f64>,
    scatter: Matrix,
    determinant: f64,
    consistency_factor: f64,
    chol: Cholesky,
}

impl McdFit {
    /// Indices `J` of the optimal `h`-subset, ascending.
    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn h(&self) -> usize {
        self.subset.len()
    }

    /// Mean over `J`.
    pub fn location(&self) -> &[f64] {
        &self.location
    }

    /// Covariance over `J` (divisor `h`) times the consistency factor.
    pub fn scatter(&self) -> &Matrix {
        &self.scatter
    }

    /// Determinant of the raw covariance over `J`, the minimized objective.
    pub fn determinant(&self) -> f64 {
        self.determinant
    }

    pub fn consistency_factor(&self) -> f64 {
        self.consistency_factor
    }

    pub fn dim(&self) -> usize {
        self.location.len()
    }
}

/// Mean, raw covariance (divisor `|subset|`) and its Cholesky factor.
struct SubsetStats {
    mean: Vec<f64>,
    cov: Matrix,
    chol: Cholesky,
    log_det: f64,
}

fn subset_stats(points: &[Vec<f64>], subset: &[usize]) -> Option<SubsetStats> {
    let d = points[0].len();
    let rows = || subset.iter().map(|&i| points[i].as_slice());
    let mean = linalg::mean(rows(), d);
    let cov = linalg::scatter(rows(), &mean, subset.len() as f64);
    let chol = cov.cholesky()?;
    let log_det = chol.log_determinant();
    if !log_det.is_finite() || log_det < -700.0 {
        return None;
    }
    Some(SubsetStats { mean, cov, chol, log_det })
}

/// Determinant of the covariance (divisor `|subset|`) of `subset`, or 0 when
/// singular.
pub fn subset_determinant(points: &[Vec<f64>], subset: &[usize]) -> f64 {
    subset_stats(points, subset).map_or(0.0, |s| libm::exp(s.log_det))
}

/// The `h` points with the smallest Mahalanobis distance under `stats`.
fn concentrate(points: &[Vec<f64>], stats: &SubsetStats, h: usize) -> Vec<usize> {
    let mut dist: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let diff: Vec<f64> = p.iter().zip(&stats.mean).map(|(a, b)| a - b).collect();
            (stats.chol.quadratic_form(&diff), i)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut subset: Vec<usize> = dist[..h].iter().map(|&(_, i)| i).collect();
    subset.sort_unstable();
    subset
}

/// Draws a `(d+1)`-point elemental set, growing it until its covariance is
/// nonsingular; returns the first `h`-subset it induces.
fn elemental_start(points: &[Vec<f64>], h: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = points.len();
    let d = points[0].len();
    let order = index::sample(rng, n, n).into_vec();
    let mut size = (d + 1).min(n);
    loop {
        let mut subset = order[..size].to_vec();
        subset.sort_unstable();
        if let Some(stats) = subset_stats(points, &subset) {
            return Some(concentrate(points, &stats, h));
        }
        if size == n {
            return None;
        }
        size += 1;
    }
}

struct Candidate {
    subset: Vec<usize>,
    stats: SubsetStats,
}

/// C-steps from `subset` until the determinant stops decreasing. Pushes the
/// determinant of every visited subset into `trace`.
fn iterate(points: &[Vec<f64>], subset: Vec<usize>, h: usize, opts: &McdOptions, trace: &mut Vec<f64>) -> Option<Candidate> {
    let mut current = Candidate { stats: subset_stats(points, &subset)?, subset };
    trace.push(libm::exp(current.stats.log_det));
    for _ in 0..opts.max_steps {
        let next_subset = concentrate(points, &current.stats, h);
        if next_subset == current.subset {
            break;
        }
        let Some(next_stats) = subset_stats(points, &next_subset) else {
            break;
        };
        trace.push(libm::exp(next_stats.log_det));
        let improvement = current.stats.log_det - next_stats.log_det;
        if improvement < 0.0 {
            break;
        }
        current = Candidate { subset: next_subset, stats: next_stats };
        if improvement < opts.tolerance {
            break;
        }
    }
    Some(current)
}

fn validate(points: &[Vec<f64>], h: usize) -> Result<usize> {
    let n = points.len();
    let d = points.first().map_or(0, Vec::len);
    if d == 0 {
        return Err(Error::Precondition("MCD needs at least one nonempty feature vector".into()));
    }
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Shape("feature vectors of different lengths".into()));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("MCD features"));
    }
    if n < d + 2 {
        return Err(Error::Precondition(format!("MCD in dimension {d} needs n >= {}, got {n}", d + 2)));
    }
    if h < d + 1 || h > n {
        return Err(Error::Precondition(format!("subset size h={h} outside [{}, {n}]", d + 1)));
    }
    Ok(d)
}

/// FAST-MCD with per-start C-step determinant traces.
pub fn mcd_fit_traced(points: &[Vec<f64>], h: usize, seed: u64, opts: &McdOptions) -> Result<(McdFit, Vec<Vec<f64>>)> {
    let d = validate(points, h)?;
    let n = points.len();
    let mut traces = Vec::new();
    let best = if h == n {
        let all: Vec<usize> = (0..n).collect();
        let stats = subset_stats(points, &all)
            .ok_or_else(|| Error::DegenerateData("full-sample covariance is singular".into()))?;
        Candidate { subset: all, stats }
    } else {
        let mut best: Option<Candidate> = None;
        for s in 0..opts.starts {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, s as u64));
            let Some(start) = elemental_start(points, h, &mut rng) else { continue };
            let mut trace = Vec::new();
            let cand = iterate(points, start, h, opts, &mut trace);
            traces.push(trace);
            if let Some(c) = cand {
                let better = match &best {
                    None => true,
                    Some(b) => c.stats.log_det < b.stats.log_det,
                };
                if better {
                    best = Some(c);
                }
            }
        }
        best.ok_or_else(|| Error::DegenerateData("every candidate subset has a singular covariance".into()))?
    };
    let factor = consistency_factor(h, n, d);
    let scatter = best.stats.cov.scale(factor);
    let chol = scatter.cholesky().ok_or(Error::SingularScatter)?;
    let fit = McdFit {
        subset: best.subset,
        location: best.stats.mean,
        determinant: libm::exp(best.stats.log_det),
        scatter,
        consistency_factor: factor,
        chol,
    };
    Ok((fit, traces))
}

/// Minimum covariance determinant estimate from an `h`-subset of `points`.
pub fn mcd_fit(points: &[Vec<f64>], h: usize, seed: u64) -> Result<McdFit> {
    mcd_fit_traced(points, h, seed, &McdOptions::default()).map(|(fit, _)| fit)
}

/// Robust Mahalanobis distance `√((y−μ)ᵀ S⁻¹ (y−μ))` under an MCD fit.
pub fn rmd(y: &[f64], fit: &McdFit) -> Result<f64> {
    if y.len() != fit.dim() {
        return Err(Error::Shape(format!("feature has length {}, fit dimension {}", y.len(), fit.dim())));
    }
    let diff: Vec<f64> = y.iter().zip(&fit.location).map(|(a, b)| a - b).collect();
    Ok(libm::sqrt(fit.chol.quadratic_form(&diff)))
}

/// Draws a uniformly random `h`-subset; used for sanity checks against
/// the MCD optimum.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, h: usize) -> Vec<usize> {
    let mut s = index::sample(rng, n, h).into_vec();
    s.sort_unstable();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..d).map(|_| StandardNormal.sample(rng)).collect()).collect()
    }

    /// Minimum determinant over all `h`-subsets.
    fn exhaustive(points: &[Vec<f64>], h: usize) -> (f64, Vec<usize>) {
        let n = points.len();
        let mut best = (f64::INFINITY, Vec::new());
        let mut idx: Vec<usize> = (0..h).collect();
        loop {
            let det = subset_determinant(points, &idx);
            if det < best.0 {
                best = (det, idx.clone());
            }
            // next combination
            let mut i = h;
            while i > 0 && idx[i - 1] == n - h + i - 1 {
                i -= 1;
            }
            if i == 0 {
                return best;
            }
            idx[i - 1] += 1;
            for j in i..h {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    #[test]
    fn full_subset_is_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = gaussian(&mut rng, 20, 3);
        let fit = mcd_fit(&pts, 20, 5).unwrap();
        assert_eq!(fit.consistency_factor(), 1.0);
        let mean = linalg::mean(pts.iter().map(Vec::as_slice), 3);
        let cov = linalg::scatter(pts.iter().map(Vec::as_slice), &mean, 20.0);
        assert!(fit.scatter().max_abs_diff(&cov) < 1e-14);
        for (a, b) in fit.location().iter().zip(&mean) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn gross_outlier_excluded_and_matches_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut pts = gaussian(&mut rng, 9, 2);
        pts.push(vec![100.0, 100.0]);
        let fit = mcd_fit(&pts, 8, 3).unwrap();
        assert!(!fit.subset().contains(&9));
        let (det, subset) = exhaustive(&pts, 8);
        assert_eq!(fit.subset(), subset.as_slice());
        assert!((fit.determinant() - det).abs() <= 1e-10 * det.max(1e-300));
    }

    #[test]
    fn location_and_scatter_recomputable_from_subset() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = gaussian(&mut rng, 40, 3);
        let fit = mcd_fit(&pts, default_h(40, 3), 8).unwrap();
        assert_eq!(fit.h(), 22);
        let rows = || fit.subset().iter().map(|&i| pts[i].as_slice());
        let mean = linalg::mean(rows(), 3);
        let cov = linalg::scatter(rows(), &mean, fit.h() as f64).scale(fit.consistency_factor());
        assert!(fit.scatter().max_abs_diff(&cov) < 1e-12);
        assert!(fit.location().iter().zip(&mean).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn consistency_factor_value() {
        // h/n = 0.8, d = 2: q = -2 ln 0.2, F4(q) = 1 - 0.2 (1 + q/2)
        let q = -2.0 * libm::log(0.2);
        let expect = 0.8 / (1.0 - 0.2 * (1.0 + q / 2.0));
        assert!((consistency_factor(8, 10, 2) - expect).abs() < 1e-9);
    }

    #[test]
    fn preconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = gaussian(&mut rng, 10, 2);
        assert!(matches!(mcd_fit(&pts, 2, 1), Err(Error::Precondition(_))));
        assert!(matches!(mcd_fit(&pts, 11, 1), Err(Error::Precondition(_))));
        assert!(matches!(mcd_fit(&pts[..3], 3, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn degenerate_data() {
        let pts = vec![vec![1.0, 2.0]; 10];
        assert!(matches!(mcd_fit(&pts, 7, 1), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn seeded_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pts = gaussian(&mut rng, 50, 3);
        let a = mcd_fit(&pts, 30, 99).unwrap();
        let b = mcd_fit(&pts, 30, 99).unwrap();
        assert_eq!(a.subset(), b.subset());
        assert_eq!(a.scatter(), b.scatter());
    }

    #[test]
    fn affine_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let pts = gaussian(&mut rng, 30, 2);
        let a = Matrix::from_vec(2, 2, vec![2.0, 0.5, -0.3, 1.5]);
        let b = [4.0, -7.0];
        let tp: Vec<Vec<f64>> =
            pts.iter().map(|p| a.mul_vec(p).into_iter().zip(b).map(|(u, v)| u + v).collect()).collect();
        let f0 = mcd_fit(&pts, 18, 21).unwrap();
        let f1 = mcd_fit(&tp, 18, 21).unwrap();
        assert_eq!(f0.subset(), f1.subset());
        let loc: Vec<f64> = a.mul_vec(f0.location()).into_iter().zip(b).map(|(u, v)| u + v).collect();
        assert!(loc.iter().zip(f1.location()).all(|(u, v)| (u - v).abs() < 1e-10));
        assert!(f0.scatter().congruence(&a).max_abs_diff(f1.scatter()) < 1e-10);
    }

    #[test]
    fn rmd_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pts = gaussian(&mut rng, 30, 3);
        let fit = mcd_fit(&pts, 20, 1).unwrap();
        assert_eq!(rmd(fit.location(), &fit).unwrap(), 0.0);
        // oracle: explicit inverse
        let inv = fit.scatter().cholesky().unwrap().inverse();
        for _ in 0..10 {
            let y: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
            let diff: Vec<f64> = y.iter().zip(fit.location()).map(|(a, b)| a - b).collect();
            let oracle = libm::sqrt(linalg::dot(&diff, &inv.mul_vec(&diff)));
            assert!((rmd(&y, &fit).unwrap() - oracle).abs() < 1e-10);
        }
        let uni: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let f1 = mcd_fit(&uni, 10, 0).unwrap();
        let expect = (3.3 - f1.location()[0]).abs() / libm::sqrt(f1.scatter()[(0, 0)]);
        assert!((rmd(&[3.3], &f1).unwrap() - expect).abs() < 1e-14);
        assert!(matches!(rmd(&[1.0, 2.0], &f1), Err(Error::Shape(_))));
    }

    #[test]
    fn beats_random_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pts = gaussian(&mut rng, 60, 3);
        let h = default_h(60, 3);
        let fit = mcd_fit(&pts, h, 2).unwrap();
        for _ in 0..100 {
            let s = random_subset(&mut rng, 60, h);
            assert!(fit.determinant() <= subset_determinant(&pts, &s));
        }
    }

    #[test]
    fn clean_gaussian_rmd_median_near_chi_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let d = 3;
        let pts = gaussian(&mut rng, 500, d);
        let fit = mcd_fit(&pts, default_h(500, d), 3).unwrap();
        let mut d2: Vec<f64> = pts.iter().map(|p| libm::pow(rmd(p, &fit).unwrap(), 2.0)).collect();
        d2.sort_by(f64::total_cmp);
        let med = 0.5 * (d2[249] + d2[250]);
        let target = chi_square_quantile(0.5, d as f64);
        assert!((med - target).abs() <= 0.5 * target, "median {med} vs {target}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn c_steps_never_increase_determinant(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = gaussian(&mut rng, 25, 2);
            let opts = McdOptions { starts: 30, ..McdOptions::default() };
            let (_, traces) = mcd_fit_traced(&pts, 14, seed, &opts).unwrap();
            for t in &traces {
                for w in t.windows(2) {
                    prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
                }
            }
        }

        #[test]
        fn small_problems_hit_exhaustive_optimum(seed in 0u64..10_000, n in 8usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = gaussian(&mut rng, n, 2);
            let h = default_h(n, 2);
            let fit = mcd_fit(&pts, h, seed).unwrap();
            let (det, _) = exhaustive(&pts, h);
            prop_assert!((fit.determinant() - det).abs() <= 1e-10 * det.max(1e-12));
        }
    }
}
