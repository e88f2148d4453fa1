//! Directional outlyingness of a curve with respect to a reference group.
//!
//! At every grid point the outlyingness vector is `(1/d − 1)·v`, where `d`
//! is the Mahalanobis depth of `X(t)` in the reference slice and `v` the
//! unit vector from the slice's spatial median to `X(t)`. Integrating over
//! the grid gives the mean outlyingness `MO`, its variation `VO`, the total
//! `FO = ‖MO‖² + VO`, and their matrix forms `FOM = MO·MOᵀ + VOM`.

use crate::curves::{Curve, FunctionalGroup, Grid};
use crate::linalg::{self, Matrix};
use crate::pointwise::{geometric_median, MahalanobisScatter, PointCloud};
use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Distance to the median below which the direction is undefined and the
/// outlyingness is taken as zero.
pub const MEDIAN_COINCIDENCE: f64 = 1e-12;

/// Outlyingness vectors over the grid, `m × p` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseOutlyingness {
    p: usize,
    values: Vec<f64>,
}

impl PointwiseOutlyingness {
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlyingnessSummary {
    /// Mean directional outlyingness.
    pub mo: Vec<f64>,
    /// Variation of directional outlyingness.
    pub vo: f64,
    /// Functional directional outlyingness.
    pub fo: f64,
    pub fom: Matrix,
    pub vom: Matrix,
}

impl OutlyingnessSummary {
    /// Integrates point-wise outlyingness with the grid weights.
    pub fn from_pointwise(o: &PointwiseOutlyingness, grid: &Grid) -> Result<Self> {
        if o.len() != grid.len() {
            return Err(Error::Shape(format!("{} outlyingness rows for {} grid points", o.len(), grid.len())));
        }
        let p = o.dim();
        let w = grid.weights();
        let mut mo = vec![0.0; p];
        for (row, wi) in o.rows().zip(w) {
            for k in 0..p {
                mo[k] += wi * row[k];
            }
        }
        let mut fom = Matrix::zeros(p, p);
        let mut vom = Matrix::zeros(p, p);
        let mut fo = 0.0;
        let mut vo = 0.0;
        let mut centered = vec![0.0; p];
        for (row, wi) in o.rows().zip(w) {
            for k in 0..p {
                centered[k] = row[k] - mo[k];
            }
            for a in 0..p {
                for b in 0..p {
                    fom[(a, b)] += wi * (row[a] * row[b]);
                    vom[(a, b)] += wi * (centered[a] * centered[b]);
                }
            }
            fo += wi * linalg::dot(row, row);
            vo += wi * linalg::dot(&centered, &centered);
        }
        Ok(Self { mo, vo, fo, fom, vom })
    }

    /// Feature vector `(MOᵀ, VO)ᵀ`.
    pub fn feature(&self) -> Vec<f64> {
        let mut y = self.mo.clone();
        y.push(self.vo);
        y
    }
}

/// Per-grid-point Mahalanobis scatter and spatial median of a reference
/// group, computed once and shared by all queries.
#[derive(Debug, Clone)]
pub struct Reference {
    grid: Grid,
    p: usize,
    scatter: Vec<MahalanobisScatter>,
    medians: Vec<Vec<f64>>,
}

impl Reference {
    pub fn new(group: &FunctionalGroup) -> Result<Self> {
        group.check_reference()?;
        let p = group.dim();
        let m = group.grid().len();
        let mut scatter = Vec::with_capacity(m);
        let mut medians = Vec::with_capacity(m);
        for i in 0..m {
            scatter.push(MahalanobisScatter::fit(group.slice(i), p)?);
            medians.push(geometric_median(&PointCloud::from_rows(group.slice(i))?)?);
        }
        Ok(Self { grid: group.grid().clone(), p, scatter, medians })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Point-wise spatial medians, i.e. the median curve.
    pub fn median_curve(&self) -> Result<Curve> {
        Curve::new(self.grid.len(), self.p, self.medians.concat())
    }

    pub fn pointwise(&self, curve: &Curve) -> Result<PointwiseOutlyingness> {
        if curve.len() != self.grid.len() || curve.dim() != self.p {
            return Err(Error::Shape(format!(
                "curve is {}x{}, reference expects {}x{}",
                curve.len(),
                curve.dim(),
                self.grid.len(),
                self.p
            )));
        }
        let mut values = Vec::with_capacity(curve.len() * self.p);
        for (i, x) in curve.rows().enumerate() {
            let diff: Vec<f64> = x.iter().zip(&self.medians[i]).map(|(a, b)| a - b).collect();
            let dist = linalg::norm(&diff);
            if dist < MEDIAN_COINCIDENCE {
                values.extend(core::iter::repeat_n(0.0, self.p));
                continue;
            }
            // 1/d − 1 equals the squared Mahalanobis distance
            let magnitude = self.scatter[i].squared_distance(x);
            values.extend(diff.iter().map(|v| magnitude * v / dist));
        }
        Ok(PointwiseOutlyingness { p: self.p, values })
    }

    pub fn summarize(&self, curve: &Curve) -> Result<OutlyingnessSummary> {
        OutlyingnessSummary::from_pointwise(&self.pointwise(curve)?, &self.grid)
    }
}

/// `O(X(t), F_{X(t)})` at every grid point, with the reference being the
/// empirical distribution of `reference` (the curve itself is not pooled).
pub fn pointwise_outlyingness(curve: &Curve, reference: &FunctionalGroup) -> Result<PointwiseOutlyingness> {
    reference.check_compatible(curve)?;
    Reference::new(reference)?.pointwise(curve)
}

/// `MO`, `VO`, `FO`, `FOM` and `VOM` of `curve` against `reference`.
pub fn summarize(curve: &Curve, reference: &FunctionalGroup) -> Result<OutlyingnessSummary> {
    reference.check_compatible(curve)?;
    Reference::new(reference)?.summarize(curve)
}

/// Applies `T(X)(tᵢ) = f(tᵢ)·A₀·X(t_{g(i)}) + b` to `curve` and every
/// reference curve, recomputes `VOM`, and returns the largest elementwise
/// deviation from `A₀·VOM·A₀ᵀ`.
///
/// `g` is a permutation of grid indices; it only preserves the integral
/// when the grid weights are invariant under it (e.g. reversal on a
/// uniform grid).
pub fn check_transformation_invariance(
    curve: &Curve,
    reference: &FunctionalGroup,
    a0: &Matrix,
    b: &[f64],
    f: &[f64],
    g: &[usize],
) -> Result<f64> {
    let p = reference.dim();
    let m = reference.grid().len();
    reference.check_compatible(curve)?;
    if a0.rows() != p || a0.cols() != p || b.len() != p {
        return Err(Error::Shape(format!("A0 must be {p}x{p} and b length {p}")));
    }
    let gram = a0.transpose().matmul(a0);
    if gram.max_abs_diff(&Matrix::identity(p)) > 1e-10 {
        return Err(Error::Precondition("A0 is not orthogonal".into()));
    }
    if f.len() != m || f.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Precondition("f must be positive at every grid point".into()));
    }
    let mut seen = vec![false; m];
    if g.len() != m || g.iter().any(|&j| j >= m || core::mem::replace(&mut seen[j], true)) {
        return Err(Error::Precondition("g must be a permutation of grid indices".into()));
    }

    let transform = |c: &Curve| -> Result<Curve> {
        let mut values = Vec::with_capacity(m * p);
        for i in 0..m {
            let y = a0.mul_vec(c.at(g[i]));
            values.extend(y.iter().zip(b).map(|(v, s)| f[i] * v + s));
        }
        Curve::new(m, p, values)
    };
    let t_curves = reference.curves().iter().map(transform).collect::<Result<Vec<_>>>()?;
    let t_reference = FunctionalGroup::new(reference.label(), reference.grid().clone(), t_curves)?;
    let before = summarize(curve, reference)?.vom;
    let after = summarize(&transform(curve)?, &t_reference)?.vom;
    Ok(after.max_abs_diff(&before.congruence(a0)))
}
