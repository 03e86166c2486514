//! One-shot aggregation of two local minimizers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ProblemInstance;
use crate::linalg;
use crate::region::{Membership, Region, RegionRegime, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregationResult {
    /// Constant-weighted average of the minimizers.
    pub p: Vec<f64>,
    /// Smallest gradient bound for which the region is nonempty.
    #[serde(rename = "L_min")]
    pub l_min: f64,
    /// Regime under the instance's own bound.
    pub regime_at_l: RegionRegime,
    /// Membership of `p` under the instance's own bound.
    pub in_region: Membership,
}

/// `(sigma1 x1* + sigma2 x2*) / (sigma1 + sigma2)`: the point that stays in
/// the region for the smallest possible gradient bound.
pub fn fed_point(inst: &ProblemInstance) -> AggregationResult {
    let (s1, s2) = (inst.sigma1(), inst.sigma2());
    let p: Vec<f64> = inst
        .x1_star()
        .iter()
        .zip(inst.x2_star())
        .map(|(a, b)| (s1 * a + s2 * b) / (s1 + s2))
        .collect();
    let region = Region::new(inst);
    let in_region = region.classify(&p, DEFAULT_TOL).expect("dimension matches");
    AggregationResult {
        l_min: bound_for(inst.x1_star(), inst.x2_star(), s1, s2),
        regime_at_l: region.regime().clone(),
        in_region,
        p,
    }
}

fn bound_for(x1: &[f64], x2: &[f64], s1: f64, s2: f64) -> f64 {
    linalg::dist(x1, x2) / (1.0 / s1 + 1.0 / s2)
}

/// Smallest `L` for which some pair of functions has a sum minimizer with
/// gradients bounded by `L`.
pub fn min_gradient_bound(x1_star: &[f64], x2_star: &[f64], sigma1: f64, sigma2: f64) -> Result<f64> {
    if x1_star.len() != x2_star.len() {
        return Err(Error::DimensionMismatch {
            expected: x1_star.len(),
            got: x2_star.len(),
        });
    }
    if !(sigma1 > 0.0 && sigma2 > 0.0) {
        return Err(Error::InvalidInput(
            "strong convexity constants must be positive".into(),
        ));
    }
    Ok(bound_for(x1_star, x2_star, sigma1, sigma2))
}
