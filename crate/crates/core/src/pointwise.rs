//! Point-wise depths and medians for finite-dimensional point clouds.
//!
//! Mahalanobis depth drives the directional outlyingness; the univariate
//! and random Tukey depths back the integrated-depth baselines; the
//! geometric median anchors the outlyingness direction.

use crate::linalg::{self, Cholesky, Matrix};
use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Condition number above which a point-wise covariance gets a ridge.
pub const RIDGE_CONDITION: f64 = 1e12;
/// Ridge size relative to `trace(S)/d`.
pub const RIDGE_EPSILON: f64 = 1e-10;
/// Default number of random directions for random Tukey depth.
pub const DEFAULT_TUKEY_DIRECTIONS: usize = 500;

const WEISZFELD_MAX_ITER: usize = 500;
const POLISH_STEPS: usize = 4;
const WEISZFELD_TOL: f64 = 1e-9;

/// `n` points in `d` dimensions, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::Shape(format!("{} values do not form {dim}-dimensional points", data.len())));
        }
        if data.len() / dim < 2 {
            return Err(Error::Shape("a point cloud needs at least two points".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point cloud"));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut dim = 0;
        let mut data = Vec::new();
        for r in rows {
            if dim == 0 {
                dim = r.len();
            } else if r.len() != dim {
                return Err(Error::Shape("points of different dimension".into()));
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    pub fn univariate(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + Clone {
        self.data.chunks_exact(self.dim)
    }

    /// `uᵀ pᵢ` for every point.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.points().map(|p| linalg::dot(p, u)).collect()
    }
}

/// A depth in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DepthValue(f64);

impl DepthValue {
    pub fn new(value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "depth {value} outside [0,1]");
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sample mean and (ridge-regularized) sample covariance of a cloud,
/// factored for repeated Mahalanobis evaluations.
#[derive(Debug, Clone)]
pub struct MahalanobisScatter {
    mean: Vec<f64>,
    chol: Cholesky,
}

impl MahalanobisScatter {
    pub fn fit<'a>(points: impl IntoIterator<Item = &'a [f64]> + Clone, dim: usize) -> Result<Self> {
        let n = points.clone().into_iter().count();
        if n < 2 {
            return Err(Error::Shape("scatter needs at least two points".into()));
        }
        let mean = linalg::mean(points.clone(), dim);
        let cov = linalg::scatter(points, &mean, (n - 1) as f64);
        let chol = regularized_cholesky(&cov)?;
        Ok(Self { mean, chol })
    }

    pub fn from_cloud(cloud: &PointCloud) -> Result<Self> {
        Self::fit(cloud.points(), cloud.dim())
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn squared_distance(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        self.chol.quadratic_form(&diff)
    }

    pub fn depth(&self, x: &[f64]) -> DepthValue {
        DepthValue::new(1.0 / (1.0 + self.squared_distance(x)))
    }
}

/// Cholesky factor of `cov`, adding `ε·tr(S)/d·I` first when the condition
/// number exceeds [`RIDGE_CONDITION`].
pub fn regularized_cholesky(cov: &Matrix) -> Result<Cholesky> {
    let d = cov.rows();
    let cov = if d == 1 {
        cov.clone()
    } else {
        let eig = cov.symmetric_eigenvalues();
        let (lo, hi) = (eig[0], eig[d - 1]);
        if lo <= 0.0 || hi / lo > RIDGE_CONDITION {
            let ridge = RIDGE_EPSILON * cov.trace() / d as f64;
            cov.add(&Matrix::identity(d).scale(ridge))
        } else {
            cov.clone()
        }
    };
    Cholesky::new(&cov).ok_or(Error::SingularScatter)
}

/// `1 / (1 + (x−μ)ᵀ S⁻¹ (x−μ))` with sample mean and covariance.
pub fn mahalanobis_depth(x: &[f64], cloud: &PointCloud) -> Result<DepthValue> {
    if x.len() != cloud.dim() {
        return Err(Error::Shape(format!("point has dimension {}, cloud {}", x.len(), cloud.dim())));
    }
    Ok(MahalanobisScatter::from_cloud(cloud)?.depth(x))
}

/// Univariate halfspace depth `min(#{p ≤ x}, #{p ≥ x}) / n`.
pub fn tukey_depth_1d(x: f64, cloud: &[f64]) -> DepthValue {
    let below = cloud.iter().filter(|&&p| p <= x).count();
    let above = cloud.iter().filter(|&&p| p >= x).count();
    DepthValue::new(below.min(above) as f64 / cloud.len() as f64)
}

/// [`tukey_depth_1d`] against an ascending-sorted cloud.
pub fn tukey_depth_sorted(x: f64, sorted: &[f64]) -> DepthValue {
    let below = sorted.partition_point(|&p| p <= x);
    let above = sorted.len() - sorted.partition_point(|&p| p < x);
    DepthValue::new(below.min(above) as f64 / sorted.len() as f64)
}

/// `count` directions drawn uniformly on the unit sphere in `dim`
/// dimensions. A longer request with the same seed extends a shorter one.
pub fn random_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = linalg::norm(&v);
        if norm > 1e-12 {
            out.push(v.into_iter().map(|c| c / norm).collect());
        }
    }
    out
}

/// Minimum univariate Tukey depth over seeded random directions. In one
/// dimension this is exactly [`tukey_depth_1d`].
pub fn random_tukey_depth(x: &[f64], cloud: &PointCloud, n_dirs: usize, seed: u64) -> Result<DepthValue> {
    if n_dirs == 0 {
        return Err(Error::Precondition("random Tukey depth needs at least one direction".into()));
    }
    if x.len() != cloud.dim() {
        return Err(Error::Shape(format!("point has dimension {}, cloud {}", x.len(), cloud.dim())));
    }
    if cloud.dim() == 1 {
        return Ok(tukey_depth_1d(x[0], &cloud.data));
    }
    let depth = random_directions(cloud.dim(), n_dirs, seed)
        .iter()
        .map(|u| tukey_depth_1d(linalg::dot(x, u), &cloud.project(u)).value())
        .fold(1.0, f64::min);
    Ok(DepthValue::new(depth))
}

/// Sorted projections of one cloud onto a fixed direction set, for fast
/// repeated random Tukey depth queries.
#[derive(Debug, Clone)]
pub struct ProjectedCloud {
    sorted: Vec<Vec<f64>>,
}

impl ProjectedCloud {
    pub fn new<'a>(points: impl IntoIterator<Item = &'a [f64]> + Clone, directions: &[Vec<f64>]) -> Self {
        let sorted = directions
            .iter()
            .map(|u| {
                let mut proj: Vec<f64> = points.clone().into_iter().map(|p| linalg::dot(p, u)).collect();
                proj.sort_by(f64::total_cmp);
                proj
            })
            .collect();
        Self { sorted }
    }

    pub fn depth(&self, x: &[f64], directions: &[Vec<f64>]) -> DepthValue {
        let d = directions
            .iter()
            .zip(&self.sorted)
            .map(|(u, s)| tukey_depth_sorted(linalg::dot(x, u), s).value())
            .fold(1.0, f64::min);
        DepthValue::new(d)
    }
}

/// Sample median, averaging the two central order statistics for even `n`.
pub fn median_1d(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn weiszfeld_objective(points: &PointCloud, z: &[f64]) -> f64 {
    points
        .points()
        .map(|p| libm::sqrt(p.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum()))
        .sum()
}

fn weiszfeld(cloud: &PointCloud, mut history: Option<&mut Vec<f64>>) -> Result<Vec<f64>> {
    let d = cloud.dim();
    let mut z = linalg::mean(cloud.points(), d);
    let spread = cloud.points().map(|p| linalg::norm(&sub(p, &z))).sum::<f64>() / cloud.len() as f64;
    let tol = WEISZFELD_TOL * (1.0 + spread);
    let coincide = 1e-14 * (1.0 + spread);
    if let Some(h) = history.as_deref_mut() {
        h.push(weiszfeld_objective(cloud, &z));
    }
    let mut num = vec![0.0; d];
    let mut resid = vec![0.0; d];
    for _ in 0..WEISZFELD_MAX_ITER {
        // Plain iteration only crawls toward a median sitting on a data
        // point, so test the nearest one for optimality directly.
        if let Some(x) = optimal_nearest_point(cloud, &z, coincide) {
            if let Some(h) = history.as_deref_mut() {
                h.push(weiszfeld_objective(cloud, &x));
            }
            return Ok(x);
        }
        num.iter_mut().for_each(|v| *v = 0.0);
        resid.iter_mut().for_each(|v| *v = 0.0);
        let mut wsum = 0.0;
        let mut at_point = 0usize;
        for p in cloud.points() {
            let diff = sub(p, &z);
            let r = linalg::norm(&diff);
            if r <= coincide {
                at_point += 1;
                continue;
            }
            for k in 0..d {
                num[k] += p[k] / r;
                resid[k] += diff[k] / r;
            }
            wsum += 1.0 / r;
        }
        if wsum == 0.0 {
            // every point coincides with z
            return Ok(z);
        }
        let t: Vec<f64> = num.iter().map(|v| v / wsum).collect();
        // Vardi-Zhang step when the iterate sits on data points
        let fallback = if at_point == 0 {
            t
        } else {
            let r = linalg::norm(&resid);
            let eta = at_point as f64;
            if r <= eta {
                return Ok(z);
            }
            let lam = eta / r;
            t.iter().zip(&z).map(|(a, b)| (1.0 - lam) * a + lam * b).collect()
        };
        // Weiszfeld is linear at best and crawls when the optimum is close
        // to a data point; take a Newton step whenever it does better.
        let current = weiszfeld_objective(cloud, &z);
        let next = match newton_step(cloud, &z, coincide) {
            Some(n) if at_point == 0 && weiszfeld_objective(cloud, &n) < current.min(weiszfeld_objective(cloud, &fallback)) => n,
            _ => fallback,
        };
        let step = linalg::norm(&sub(&next, &z));
        z = next;
        if let Some(h) = history.as_deref_mut() {
            h.push(weiszfeld_objective(cloud, &z));
        }
        if step < tol {
            return Ok(polish(cloud, z, coincide, history));
        }
    }
    Err(Error::Convergence { iterations: WEISZFELD_MAX_ITER, last: z })
}

/// `z − H⁻¹∇` for the spatial objective, where `∇ = Σ uᵢ` and
/// `H = Σ (I − uᵢuᵢᵀ)/rᵢ` with `uᵢ = (z − pᵢ)/rᵢ`.
/// A small Weiszfeld step still leaves an error of order step/(1 − rate);
/// Newton steps remove it while they keep shrinking the gradient.
fn polish(cloud: &PointCloud, mut z: Vec<f64>, coincide: f64, mut history: Option<&mut Vec<f64>>) -> Vec<f64> {
    for _ in 0..POLISH_STEPS {
        let (Some(g), Some(next)) = (gradient_norm(cloud, &z, coincide), newton_step(cloud, &z, coincide)) else {
            break;
        };
        match gradient_norm(cloud, &next, coincide) {
            Some(gn) if gn < g => z = next,
            _ => break,
        }
        if let Some(h) = history.as_deref_mut() {
            h.push(weiszfeld_objective(cloud, &z));
        }
    }
    z
}

fn gradient_norm(cloud: &PointCloud, z: &[f64], coincide: f64) -> Option<f64> {
    let mut grad = vec![0.0; z.len()];
    for p in cloud.points() {
        let diff = sub(z, p);
        let r = linalg::norm(&diff);
        if r <= coincide {
            return None;
        }
        grad.iter_mut().zip(&diff).for_each(|(g, v)| *g += v / r);
    }
    Some(linalg::norm(&grad))
}

fn newton_step(cloud: &PointCloud, z: &[f64], coincide: f64) -> Option<Vec<f64>> {
    let d = z.len();
    let mut grad = vec![0.0; d];
    let mut hess = Matrix::zeros(d, d);
    for p in cloud.points() {
        let diff = sub(z, p);
        let r = linalg::norm(&diff);
        if r <= coincide {
            return None;
        }
        for a in 0..d {
            grad[a] += diff[a] / r;
            for b in 0..d {
                let id = if a == b { 1.0 } else { 0.0 };
                hess[(a, b)] += (id - diff[a] * diff[b] / (r * r)) / r;
            }
        }
    }
    let delta = hess.cholesky()?.solve(&grad);
    Some(z.iter().zip(&delta).map(|(a, b)| a - b).collect())
}

/// The data point nearest `z` if it minimizes the spatial objective: the
/// pull of the remaining points has norm at most its multiplicity.
fn optimal_nearest_point(cloud: &PointCloud, z: &[f64], coincide: f64) -> Option<Vec<f64>> {
    let nearest = cloud
        .points()
        .map(|p| linalg::norm(&sub(p, z)))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?
        .0;
    let x = cloud.point(nearest);
    let mut pull = vec![0.0; x.len()];
    let mut multiplicity = 0usize;
    for p in cloud.points() {
        let diff = sub(p, x);
        let r = linalg::norm(&diff);
        if r <= coincide {
            multiplicity += 1;
        } else {
            pull.iter_mut().zip(&diff).for_each(|(a, b)| *a += b / r);
        }
    }
    (linalg::norm(&pull) <= multiplicity as f64).then(|| x.to_vec())
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Spatial (L1) median `argmin_z Σ‖pᵢ − z‖` by Weiszfeld iteration; the
/// sample median in one dimension.
pub fn geometric_median(cloud: &PointCloud) -> Result<Vec<f64>> {
    if cloud.dim() == 1 {
        return Ok(vec![median_1d(&cloud.data)]);
    }
    weiszfeld(cloud, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn cloud2(points: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_rows(points.iter().map(|p| p.as_slice())).unwrap()
    }

    fn diamond() -> PointCloud {
        cloud2(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    }

    #[test]
    fn mahalanobis_depth_examples() {
        let c = PointCloud::univariate(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(mahalanobis_depth(&[0.0], &c).unwrap().value(), 1.0);
        assert!((mahalanobis_depth(&[1.0], &c).unwrap().value() - 0.5).abs() < 1e-15);
        let m = linalg::mean(diamond().points(), 2);
        assert!((mahalanobis_depth(&m, &diamond()).unwrap().value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mahalanobis_depth_degenerate() {
        let c = PointCloud::univariate(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(mahalanobis_depth(&[2.0], &c), Err(Error::SingularScatter));
        let c2 = cloud2(&[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]);
        assert_eq!(mahalanobis_depth(&[0.0, 0.0], &c2), Err(Error::SingularScatter));
    }

    #[test]
    fn mahalanobis_ridge_on_collinear_cloud() {
        // rank-one covariance gets regularized instead of failing
        let c = cloud2(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]);
        let d = mahalanobis_depth(&[1.5, 1.5], &c).unwrap().value();
        assert!((d - 1.0).abs() < 1e-9);
        let off = mahalanobis_depth(&[1.5, 1.6], &c).unwrap().value();
        assert!(off < 1e-3);
    }

    #[test]
    fn tukey_1d_examples() {
        assert!((tukey_depth_1d(2.0, &[1.0, 2.0, 3.0]).value() - 2.0 / 3.0).abs() < 1e-15);
        assert!((tukey_depth_1d(1.0, &[1.0, 2.0, 3.0]).value() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(tukey_depth_1d(0.0, &[1.0, 2.0, 3.0]).value(), 0.0);
        for x in [-1.0, 1.0, 1.5, 2.0, 3.0, 4.0] {
            let mut s = [3.0, 1.0, 2.0, 2.0];
            let a = tukey_depth_1d(x, &s).value();
            s.sort_by(f64::total_cmp);
            assert_eq!(a, tukey_depth_sorted(x, &s).value());
        }
    }

    #[test]
    fn random_tukey_in_one_dimension_is_exact() {
        let c = PointCloud::univariate(&[0.3, -1.0, 2.0, 5.0, 0.1]).unwrap();
        for x in [-2.0, 0.1, 0.2, 2.0] {
            for n in [1, 7, 500] {
                assert_eq!(random_tukey_depth(&[x], &c, n, 9).unwrap(), tukey_depth_1d(x, &c.data));
            }
        }
    }

    #[test]
    fn random_tukey_identical_points() {
        let c = cloud2(&[[1.0, 2.0]; 5]);
        assert_eq!(random_tukey_depth(&[1.0, 2.0], &c, 50, 3).unwrap().value(), 1.0);
    }

    /// Exhaustive sweep at 1° resolution, plus the halfspaces whose
    /// boundaries pass through the query (the minimizers for a finite cloud).
    fn tukey_sweep_oracle(x: &[f64; 2], pts: &[[f64; 2]]) -> f64 {
        let n = pts.len() as f64;
        let mut best = 1.0f64;
        let count = |ux: f64, uy: f64| {
            let px = x[0] * ux + x[1] * uy;
            let ge = pts.iter().filter(|p| p[0] * ux + p[1] * uy >= px - 1e-12).count();
            ge as f64 / n
        };
        for deg in 0..360 {
            let a = (deg as f64).to_radians();
            best = best.min(count(libm::cos(a), libm::sin(a)));
        }
        best
    }

    #[test]
    fn random_tukey_diamond_center() {
        let pts = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        let oracle = tukey_sweep_oracle(&[0.0, 0.0], &pts);
        assert_eq!(oracle, 0.5);
        let d = random_tukey_depth(&[0.0, 0.0], &diamond(), 500, 17).unwrap().value();
        assert!(d >= oracle);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn random_tukey_requires_directions() {
        assert!(matches!(random_tukey_depth(&[0.0, 0.0], &diamond(), 0, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn projected_cloud_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<f64> = (0..3 * 40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = PointCloud::new(3, pts).unwrap();
        let dirs = random_directions(3, 100, 11);
        let pc = ProjectedCloud::new(c.points(), &dirs);
        for q in [[0.0, 0.0, 0.0], [0.5, -0.2, 0.1], [2.0, 0.0, 0.0]] {
            let direct = random_tukey_depth(&q, &c, 100, 11).unwrap();
            assert_eq!(pc.depth(&q, &dirs), direct);
        }
    }

    #[test]
    fn geometric_median_examples() {
        let m = geometric_median(&diamond()).unwrap();
        assert!(m[0].abs() < 1e-9 && m[1].abs() < 1e-9);
        assert_eq!(geometric_median(&PointCloud::univariate(&[1.0, 2.0, 4.0]).unwrap()).unwrap(), vec![2.0]);
        assert_eq!(geometric_median(&PointCloud::univariate(&[1.0, 2.0, 4.0, 9.0]).unwrap()).unwrap(), vec![3.0]);
    }

    #[test]
    fn geometric_median_matches_grid_search() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]];
        let c = cloud2(&pts);
        let m = geometric_median(&c).unwrap();
        // coarse grid over [-1,6]^2 then 1e-3 refinement around the best cell
        let obj = |x: f64, y: f64| weiszfeld_objective(&c, &[x, y]);
        let (mut bx, mut by, mut bv) = (0.0, 0.0, f64::INFINITY);
        let mut x = -1.0;
        while x <= 6.0 {
            let mut y = -1.0;
            while y <= 6.0 {
                let v = obj(x, y);
                if v < bv {
                    (bx, by, bv) = (x, y, v);
                }
                y += 0.01;
            }
            x += 0.01;
        }
        let (cx, cy) = (bx, by);
        for i in -20..=20 {
            for j in -20..=20 {
                let (x, y) = (cx + i as f64 * 1e-3, cy + j as f64 * 1e-3);
                let v = obj(x, y);
                if v < bv {
                    (bx, by, bv) = (x, y, v);
                }
            }
        }
        assert!((m[0] - bx).abs() < 1e-2 && (m[1] - by).abs() < 1e-2, "{m:?} vs ({bx},{by})");
    }

    #[test]
    fn geometric_median_at_data_point() {
        // the heavy middle point is the median
        let c = cloud2(&[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let m = geometric_median(&c).unwrap();
        assert!(linalg::norm(&m) < 1e-9);
    }

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointCloud {
        PointCloud::new(d, (0..n * d).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap()
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
        // Gram-Schmidt on a Gaussian matrix
        let mut cols: Vec<Vec<f64>> = Vec::new();
        while cols.len() < d {
            let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            for c in &cols {
                let proj = linalg::dot(&v, c);
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= proj * b);
            }
            let n = linalg::norm(&v);
            if n > 1e-6 {
                cols.push(v.into_iter().map(|a| a / n).collect());
            }
        }
        Matrix::from_fn(d, d, |i, j| cols[j][i])
    }

    fn transform(c: &PointCloud, a: &Matrix, b: &[f64]) -> PointCloud {
        PointCloud::new(
            c.dim(),
            c.points().flat_map(|p| a.mul_vec(p).into_iter().zip(b).map(|(x, y)| x + y)).collect(),
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mahalanobis_affine_invariance(seed in 0u64..10_000, d in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_cloud(&mut rng, 12, d);
            let a = loop {
                let m = Matrix::from_fn(d, d, |_, _| rng.random_range(-2.0..2.0));
                let det: f64 = m.matmul(&m.transpose()).symmetric_eigenvalues().iter().product();
                if det > 1e-2 { break m; }
            };
            let b: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let tx: Vec<f64> = a.mul_vec(&x).into_iter().zip(&b).map(|(u, v)| u + v).collect();
            let d0 = mahalanobis_depth(&x, &c).unwrap().value();
            let d1 = mahalanobis_depth(&tx, &transform(&c, &a, &b)).unwrap().value();
            prop_assert!((d0 - d1).abs() < 1e-10);
            prop_assert!(d0 > 0.0 && d0 <= 1.0);
            let mean = linalg::mean(c.points(), d);
            prop_assert!(mahalanobis_depth(&mean, &c).unwrap().value() >= d0);
        }

        #[test]
        fn random_tukey_monotone_in_directions(seed in 0u64..10_000, k in 1usize..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_cloud(&mut rng, 15, 2);
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let few = random_tukey_depth(&x, &c, k, seed).unwrap();
            let more = random_tukey_depth(&x, &c, k + 10, seed).unwrap();
            prop_assert!(more <= few);
        }

        #[test]
        fn geometric_median_equivariance(seed in 0u64..10_000, d in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_cloud(&mut rng, 9, d);
            let a = random_orthogonal(&mut rng, d);
            let b: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
            let m0 = geometric_median(&c).unwrap();
            let m1 = geometric_median(&transform(&c, &a, &b)).unwrap();
            let expect: Vec<f64> = a.mul_vec(&m0).into_iter().zip(&b).map(|(u, v)| u + v).collect();
            for (u, v) in m1.iter().zip(&expect) {
                prop_assert!((u - v).abs() < 1e-6);
            }
        }

        #[test]
        fn weiszfeld_objective_non_increasing(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_cloud(&mut rng, 11, 3);
            let mut hist = Vec::new();
            weiszfeld(&c, Some(&mut hist)).unwrap();
            for w in hist.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-14));
            }
        }
    }
}
