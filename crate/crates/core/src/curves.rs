//! Curves on a shared discrete grid.

use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Strictly increasing sampling points with normalized trapezoidal weights.
///
/// The weights discretize a constant weight function `1/λ(I)` over the
/// interval spanned by the points, so they sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InsufficientGrid { required: 2, found: points.len() });
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("grid"));
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing (t[{}]={} >= t[{}]={})",
                i,
                points[i],
                i + 1,
                points[i + 1]
            )));
        }
        let m = points.len();
        let span = points[m - 1] - points[0];
        let mut weights = Vec::with_capacity(m);
        for i in 0..m {
            let left = if i > 0 { points[i] - points[i - 1] } else { 0.0 };
            let right = if i + 1 < m { points[i + 1] - points[i] } else { 0.0 };
            weights.push(0.5 * (left + right) / span);
        }
        // Sterbenz: the head sums to at least 1/2, so this makes Σw == 1.0 exactly.
        let head: f64 = weights[..m - 1].iter().sum();
        weights[m - 1] = 1.0 - head;
        Ok(Self { points, weights })
    }

    /// `m` equally spaced points from `start` to `end` inclusive.
    pub fn equispaced(start: f64, end: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InsufficientGrid { required: 2, found: m });
        }
        let step = (end - start) / (m - 1) as f64;
        Self::new((0..m).map(|i| start + step * i as f64).collect())
    }

    /// `t_i = i/m` for `i = 1..=m`, the simulation design.
    pub fn right_endpoints(m: usize) -> Result<Self> {
        Self::new((1..=m).map(|i| i as f64 / m as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Length of the covered interval.
    pub fn measure(&self) -> f64 {
        self.points[self.points.len() - 1] - self.points[0]
    }

    /// True when all spacings agree to a relative `1e-9`.
    pub fn is_uniform(&self) -> bool {
        let h = self.measure() / (self.len() - 1) as f64;
        self.points.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    }
}

/// Weighted average `Σ wᵢ valueᵢ` with the grid's normalized weights.
pub fn integrate(values: &[f64], grid: &Grid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::Shape(format!(
            "integrand has {} values for a {}-point grid",
            values.len(),
            grid.len()
        )));
    }
    Ok(values.iter().zip(grid.weights()).map(|(v, w)| v * w).sum())
}

/// One `p`-variate observation: an `m × p` row-major matrix, row `i` being
/// the value at grid point `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    values: Vec<f64>,
    m: usize,
    p: usize,
}

impl Curve {
    pub fn new(m: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Shape("curve needs at least one component".into()));
        }
        if values.len() != m * p {
            return Err(Error::Shape(format!("expected {}x{} values, got {}", m, p, values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("curve values"));
        }
        Ok(Self { values, m, p })
    }

    /// Builds a curve from per-component vectors of equal length.
    pub fn from_components(components: &[Vec<f64>]) -> Result<Self> {
        let p = components.len();
        let m = components.first().map_or(0, Vec::len);
        if components.iter().any(|c| c.len() != m) {
            return Err(Error::Shape("components have different lengths".into()));
        }
        let mut values = Vec::with_capacity(m * p);
        for i in 0..m {
            for c in components {
                values.push(c[i]);
            }
        }
        Self::new(m, p, values)
    }

    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        Self::new(m, 1, values)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Value `X(tᵢ)` as a `p`-vector.
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.values[i * self.p + k]).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }
}

/// Labelled curves sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalGroup {
    label: String,
    grid: Grid,
    curves: Vec<Curve>,
}

impl FunctionalGroup {
    pub fn new(label: impl Into<String>, grid: Grid, curves: Vec<Curve>) -> Result<Self> {
        let p = match curves.first() {
            Some(c) => c.dim(),
            None => return Err(Error::Shape("group has no curves".into())),
        };
        for (j, c) in curves.iter().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::Shape(format!(
                    "curve {j} has {} points, grid has {}",
                    c.len(),
                    grid.len()
                )));
            }
            if c.dim() != p {
                return Err(Error::Shape(format!("curve {j} has {} components, expected {p}", c.dim())));
            }
        }
        Ok(Self { label: label.into(), grid, curves })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn into_curves(self) -> Vec<Curve> {
        self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.curves[0].dim()
    }

    /// Values of every curve at grid index `i`.
    pub fn slice(&self, i: usize) -> impl Iterator<Item = &[f64]> + Clone {
        self.curves.iter().map(move |c| c.at(i))
    }

    /// Checks that `curve` lives on this group's grid and dimension.
    pub fn check_compatible(&self, curve: &Curve) -> Result<()> {
        if curve.len() != self.grid.len() || curve.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "curve is {}x{}, group '{}' expects {}x{}",
                curve.len(),
                curve.dim(),
                self.label,
                self.grid.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Requires enough curves for an invertible point-wise scatter.
    pub fn check_reference(&self) -> Result<()> {
        let need = self.dim() + 2;
        if self.len() < need {
            return Err(Error::Precondition(format!(
                "reference group '{}' has {} curves, needs at least {need}",
                self.label,
                self.len()
            )));
        }
        Ok(())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// First derivative of `values` sampled at `t`: central differences inside,
/// one-sided at the ends.
pub fn finite_difference(values: &[f64], t: &[f64]) -> Vec<f64> {
    let m = t.len();
    (0..m)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == m - 1 => (m - 2, m - 1),
                i => (i - 1, i + 1),
            };
            (values[b] - values[a]) / (t[b] - t[a])
        })
        .collect()
}

/// Appends first derivatives: a `p`-variate group becomes `2p`-variate, the
/// original components first.
pub fn derivative_augment(group: &FunctionalGroup) -> Result<FunctionalGroup> {
    let m = group.grid().len();
    if m < 3 {
        return Err(Error::InsufficientGrid { required: 3, found: m });
    }
    let t = group.grid().points();
    let curves = group
        .curves()
        .iter()
        .map(|c| {
            let mut comps: Vec<Vec<f64>> = (0..c.dim()).map(|k| c.component(k)).collect();
            let derivs: Vec<Vec<f64>> = comps.iter().map(|v| finite_difference(v, t)).collect();
            comps.extend(derivs);
            Curve::from_components(&comps)
        })
        .collect::<Result<Vec<_>>>()?;
    FunctionalGroup::new(group.label(), group.grid().clone(), curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn integrate_constant_and_two_points() {
        let g = Grid::new(vec![0.0, 0.3, 0.35, 1.0]).unwrap();
        assert!((integrate(&[2.5; 4], &g).unwrap() - 2.5).abs() < 1e-15);
        let g2 = Grid::equispaced(0.0, 1.0, 2).unwrap();
        assert_eq!(integrate(&[0.0, 1.0], &g2).unwrap(), 0.5);
    }

    #[test]
    fn integrate_sine_over_period() {
        let g = Grid::equispaced(0.0, 1.0, 50).unwrap();
        let v: Vec<f64> = g.points().iter().map(|t| libm::sin(2.0 * PI * t)).collect();
        assert!(integrate(&v, &g).unwrap().abs() < 5e-2);
    }

    #[test]
    fn integrate_all_ones_is_exactly_one() {
        let g = Grid::right_endpoints(50).unwrap();
        assert_eq!(integrate(&[1.0; 50], &g).unwrap(), 1.0);
    }

    #[test]
    fn integrate_length_mismatch() {
        let g = Grid::equispaced(0.0, 1.0, 5).unwrap();
        assert!(matches!(integrate(&[1.0; 4], &g), Err(Error::Shape(_))));
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(Grid::new(vec![0.0]), Err(Error::InsufficientGrid { .. })));
        assert!(matches!(Grid::new(vec![0.0, 0.0, 1.0]), Err(Error::InvalidGrid(_))));
        assert!(Grid::right_endpoints(50).unwrap().is_uniform());
        assert!(!Grid::new(vec![0.0, 0.1, 1.0]).unwrap().is_uniform());
    }

    fn group_of(values: Vec<Vec<f64>>, grid: &Grid) -> FunctionalGroup {
        let curves = values.into_iter().map(|v| Curve::univariate(v).unwrap()).collect();
        FunctionalGroup::new("g", grid.clone(), curves).unwrap()
    }

    #[test]
    fn derivative_of_constant_and_linear() {
        let g = Grid::equispaced(0.0, 2.0, 9).unwrap();
        let a = 1.7;
        let lin: Vec<f64> = g.points().iter().map(|t| a * t).collect();
        let grp = group_of(vec![vec![3.0; 9], lin], &g);
        let aug = derivative_augment(&grp).unwrap();
        assert_eq!(aug.dim(), 2);
        assert_eq!(aug.len(), 2);
        assert!(aug.curves()[0].component(1).iter().all(|d| *d == 0.0));
        for d in aug.curves()[1].component(1) {
            assert!((d - a).abs() < 1e-12);
        }
        assert_eq!(aug.curves()[1].component(0), grp.curves()[1].component(0));
    }

    #[test]
    fn derivative_of_sine_within_bound() {
        let g = Grid::equispaced(0.0, 1.0, 50).unwrap();
        let v: Vec<f64> = g.points().iter().map(|t| libm::sin(2.0 * PI * t)).collect();
        let d = finite_difference(&v, g.points());
        let bound = 0.05 * 2.0 * PI;
        for i in 1..49 {
            let exact = 2.0 * PI * libm::cos(2.0 * PI * g.points()[i]);
            assert!((d[i] - exact).abs() <= bound);
        }
    }

    #[test]
    fn derivative_needs_three_points() {
        let g = Grid::equispaced(0.0, 1.0, 2).unwrap();
        let grp = group_of(vec![vec![0.0, 1.0]], &g);
        assert!(matches!(derivative_augment(&grp), Err(Error::InsufficientGrid { required: 3, .. })));
    }

    #[test]
    fn group_rejects_mixed_shapes() {
        let g = Grid::equispaced(0.0, 1.0, 3).unwrap();
        let a = Curve::univariate(vec![0.0; 3]).unwrap();
        let b = Curve::new(3, 2, vec![0.0; 6]).unwrap();
        assert!(FunctionalGroup::new("x", g.clone(), vec![a.clone(), b]).is_err());
        let short = Curve::univariate(vec![0.0; 2]).unwrap();
        assert!(FunctionalGroup::new("x", g, vec![a, short]).is_err());
    }

    proptest! {
        #[test]
        fn integrate_is_linear(
            u in proptest::collection::vec(-10.0f64..10.0, 12),
            v in proptest::collection::vec(-10.0f64..10.0, 12),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            gaps in proptest::collection::vec(0.01f64..1.0, 11),
        ) {
            let mut pts = vec![0.0];
            for g in &gaps { let last = *pts.last().unwrap(); pts.push(last + g); }
            let grid = Grid::new(pts).unwrap();
            let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = integrate(&combo, &grid).unwrap();
            let rhs = alpha * integrate(&u, &grid).unwrap() + beta * integrate(&v, &grid).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
            let s: f64 = grid.weights().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-14);
        }

        #[test]
        fn augment_preserves_n_and_doubles_p(n in 1usize..6, p in 1usize..4, seed in 0u64..1000) {
            let grid = Grid::equispaced(0.0, 1.0, 7).unwrap();
            let curves = (0..n).map(|j| {
                let vals = (0..7 * p).map(|k| ((seed + j as u64 * 31 + k as u64 * 7) % 13) as f64).collect();
                Curve::new(7, p, vals).unwrap()
            }).collect();
            let grp = FunctionalGroup::new("g", grid, curves).unwrap();
            let aug = derivative_augment(&grp).unwrap();
            prop_assert_eq!(aug.len(), n);
            prop_assert_eq!(aug.dim(), 2 * p);
        }
    }
}
