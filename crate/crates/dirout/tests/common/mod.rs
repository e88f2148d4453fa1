#![allow(dead_code)]

use dirout_core::simulate::{sample_gp, CovarianceSpec};
use dirout_core::{Curve, FunctionalGroup, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Five classes of smooth bumps on a 150-point grid, 30 curves each, in the
/// spirit of log-periodogram phoneme curves.
pub fn phoneme_like_fixture(seed: u64) -> Vec<FunctionalGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::right_endpoints(150).unwrap();
    (0..5)
        .map(|k| {
            let noise =
                sample_gp(&CovarianceSpec::SquaredExponential { scale: 0.05, range: 0.1 }, &grid, 30, rng.random()).unwrap();
            let centre = 0.2 * k as f64 + 0.1;
            let curves = noise
                .curves()
                .iter()
                .map(|e| {
                    let amp: f64 = rng.random_range(0.8..1.2);
                    let vals = grid
                        .points()
                        .iter()
                        .zip(e.values())
                        .map(|(&t, &z)| amp * (-20.0 * (t - centre).powi(2)).exp() + 0.2 * (k as f64 + 1.0) * (6.0 * t).sin() + z)
                        .collect();
                    Curve::univariate(vals).unwrap()
                })
                .collect();
            FunctionalGroup::new(format!("class{k}"), grid.clone(), curves).unwrap()
        })
        .collect()
}

/// Level-shifted copies of a common smooth noise law.
pub fn level_groups(levels: &[f64], n: usize, seed: u64) -> Vec<FunctionalGroup> {
    let grid = Grid::right_endpoints(50).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    levels
        .iter()
        .enumerate()
        .map(|(k, &level)| {
            let noise =
                sample_gp(&CovarianceSpec::SquaredExponential { scale: 0.25, range: 1.0 }, &grid, n, rng.random()).unwrap();
            let curves = noise
                .curves()
                .iter()
                .map(|e| {
                    let u: f64 = rng.random_range(-1.0..1.0);
                    Curve::univariate(e.values().iter().map(|z| level + u + z).collect()).unwrap()
                })
                .collect();
            FunctionalGroup::new(k.to_string(), grid.clone(), curves).unwrap()
        })
        .collect()
}
