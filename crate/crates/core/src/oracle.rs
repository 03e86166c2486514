//! Brute-force verification: random quadratic pairs checked against the
//! outer region, witnesses checked for sampled inner points, and
//! finite-difference gradients.
//!
//! Every trial draws from its own ChaCha stream derived from the seed, so a
//! report depends only on `(instance, trials, seed)` and not on scheduling.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{CanonicalInstance, ProblemInstance};
use crate::linalg::{self, Matrix};
use crate::quadratic::{sum_minimizer, witness_pair_in, QuadraticFunction};
use crate::region::{MembershipValue, RegimeCase, Region, DEFAULT_TOL};

/// Gradient filter slack for accepting sampled pairs.
pub const FILTER_SLACK: f64 = 1e-12;
/// Rejection-sampling attempts per completeness trial.
const MAX_ATTEMPTS: usize = 100_000;

/// Random quadratic with minimizer `x_star` and smallest eigenvalue `sigma`.
///
/// The eigenbasis is the Q factor of a Gaussian matrix; the other
/// eigenvalues are `sigma (1 + u spread)` with `u` uniform on `[0, 1)`.
/// `spread = 0` returns exactly `sigma I`.
pub fn sample_quadratic<R: Rng + ?Sized>(
    x_star: &[f64],
    sigma: f64,
    n: usize,
    spread: f64,
    rng: &mut R,
) -> Result<QuadraticFunction> {
    if x_star.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x_star.len(),
        });
    }
    if !(sigma.is_finite() && sigma > 0.0 && spread.is_finite() && spread >= 0.0) {
        return Err(Error::InvalidInput(
            "sigma must be positive and spread nonnegative".into(),
        ));
    }
    if spread == 0.0 {
        return Ok(QuadraticFunction::with_minimizer(
            Matrix::scaled_identity(n, sigma),
            x_star,
        ));
    }
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let v = linalg::orthonormal_columns(&a);
    let mut eig = vec![sigma; n];
    for e in eig.iter_mut().skip(1) {
        *e = sigma * (1.0 + rng.gen::<f64>() * spread);
    }
    let mut q = v.matmul(&Matrix::diag(&eig)).matmul(&v.transpose());
    q.symmetrize();
    Ok(QuadraticFunction::with_minimizer(q, x_star))
}

/// Largest absolute error between central differences and the analytic
/// gradient.
pub fn fd_gradient_check(q: &QuadraticFunction, x: &[f64], h: f64) -> Result<f64> {
    let g = q.grad(x)?;
    let mut worst: f64 = 0.0;
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = q.eval(&xp)?;
        xp[i] = x[i] - h;
        let fm = q.eval(&xp)?;
        xp[i] = x[i];
        worst = worst.max(((fp - fm) / (2.0 * h) - g[i]).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerificationMode {
    Soundness,
    Completeness,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeTally {
    pub trials: usize,
    pub accepted: usize,
    pub violations: usize,
    pub worst_margin: f64,
}

impl RegimeTally {
    fn empty() -> Self {
        Self {
            trials: 0,
            accepted: 0,
            violations: 0,
            worst_margin: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, other: &RegimeTally) {
        self.trials += other.trials;
        self.accepted += other.accepted;
        self.violations += other.violations;
        self.worst_margin = self.worst_margin.max(other.worst_margin);
    }
}

/// Outcome of a Monte-Carlo run.
///
/// Soundness: `accepted` counts pairs passing the gradient filter and
/// `worst_margin` is the largest angular excess (`-slack`, or the relative
/// ball excess outside the balls) over accepted minimizers; negative means
/// every minimizer was strictly inside.
///
/// Completeness: `accepted` counts sampled inner points and `worst_margin`
/// is the largest witness residual divided by its tolerance; above 1 is a
/// violation. `skipped` counts trials where no inner point was found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: VerificationMode,
    pub seed: u64,
    pub tolerance: f64,
    pub trials: usize,
    pub accepted: usize,
    pub violations: usize,
    pub skipped: usize,
    pub worst_margin: f64,
    pub by_regime: BTreeMap<RegimeCase, RegimeTally>,
}

impl VerificationReport {
    fn new(mode: VerificationMode, seed: u64, tolerance: f64) -> Self {
        Self {
            mode,
            seed,
            tolerance,
            trials: 0,
            accepted: 0,
            violations: 0,
            skipped: 0,
            worst_margin: f64::NEG_INFINITY,
            by_regime: BTreeMap::new(),
        }
    }

    /// Fold another report into this one.
    pub fn merge(&mut self, other: &VerificationReport) {
        self.trials += other.trials;
        self.accepted += other.accepted;
        self.violations += other.violations;
        self.skipped += other.skipped;
        self.worst_margin = self.worst_margin.max(other.worst_margin);
        for (k, v) in &other.by_regime {
            self.by_regime.entry(*k).or_insert_with(RegimeTally::empty).add(v);
        }
    }

    fn finish(mut self, case: RegimeCase, outcomes: &[Outcome]) -> Self {
        let mut tally = RegimeTally::empty();
        for o in outcomes {
            tally.trials += 1;
            match *o {
                Outcome::Rejected => {}
                Outcome::Skipped => self.skipped += 1,
                Outcome::Checked { margin, violation } => {
                    tally.accepted += 1;
                    tally.violations += usize::from(violation);
                    tally.worst_margin = tally.worst_margin.max(margin);
                }
            }
        }
        self.trials = tally.trials;
        self.accepted = tally.accepted;
        self.violations = tally.violations;
        self.worst_margin = tally.worst_margin;
        self.by_regime.insert(case, tally);
        self
    }
}

#[derive(Debug, Clone, Copy)]
enum Outcome {
    Rejected,
    Skipped,
    Checked { margin: f64, violation: bool },
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// How far outside the outer region a point is: `-slack` where defined,
/// otherwise the relative distance beyond the balls.
fn outside_margin(ci: &CanonicalInstance, y1: f64, t: f64) -> f64 {
    let rep = ci.report_reduced(y1, t);
    if rep.defined {
        -rep.slack
    } else {
        let e1 = ci.sigma1 * rep.d1 / ci.grad_bound - 1.0;
        let e2 = ci.sigma2 * rep.d2 / ci.grad_bound - 1.0;
        e1.max(e2).max(0.0)
    }
}

/// Sample random admissible pairs and check that every sum minimizer whose
/// gradient passes the bound is classified inside or on the region.
///
/// Half of the draws use the exact constant, the other half a larger one
/// (up to `1 + spread` times), so the whole admissible class is exercised.
pub fn mc_soundness(inst: &ProblemInstance, trials: usize, spread: f64, seed: u64) -> Result<VerificationReport> {
    let region = Region::new(inst);
    let n = inst.dim();
    let l = inst.grad_bound();
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Outcome> {
            let mut rng = trial_rng(seed, i);
            let draw_sigma = |s: f64, rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.5) {
                    s
                } else {
                    s * (1.0 + rng.gen::<f64>() * spread)
                }
            };
            let s1 = draw_sigma(inst.sigma1(), &mut rng);
            let s2 = draw_sigma(inst.sigma2(), &mut rng);
            let f1 = sample_quadratic(inst.x1_star(), s1, n, spread, &mut rng)?;
            let f2 = sample_quadratic(inst.x2_star(), s2, n, spread, &mut rng)?;
            let x = sum_minimizer(&f1, &f2)?;
            if linalg::norm(&f1.grad(&x)?) > l + FILTER_SLACK {
                return Ok(Outcome::Rejected);
            }
            let m = region.classify(&x, DEFAULT_TOL)?;
            let (y1, t) = region.reduce(&x)?;
            Ok(Outcome::Checked {
                margin: outside_margin(region.canonical(), y1, t),
                violation: m.value == MembershipValue::Exterior,
            })
        })
        .collect::<Result<_>>()?;
    Ok(VerificationReport::new(VerificationMode::Soundness, seed, DEFAULT_TOL).finish(region.regime().case, &outcomes))
}

/// Sample interior points and check that each has a valid witness pair.
pub fn mc_completeness(inst: &ProblemInstance, trials: usize, seed: u64) -> Result<VerificationReport> {
    let region = Region::new(inst);
    let case = region.regime().case;
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Outcome> {
            let mut rng = trial_rng(seed, i);
            let Some(x) = sample_inner(&region, &mut rng)? else {
                return Ok(Outcome::Skipped);
            };
            let margin = match witness_pair_in(&region, &x) {
                Ok(w) => {
                    let c = w.check(inst)?;
                    [
                        c.gradient_error / 1e-9,
                        c.bound_excess / 1e-9,
                        c.convexity_gap[0] / 1e-9,
                        c.convexity_gap[1] / 1e-9,
                        c.minimizer_error / 1e-8,
                    ]
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max)
                }
                Err(_) => f64::INFINITY,
            };
            Ok(Outcome::Checked {
                margin,
                violation: margin > 1.0,
            })
        })
        .collect::<Result<_>>()?;
    Ok(VerificationReport::new(VerificationMode::Completeness, seed, 1.0).finish(case, &outcomes))
}

/// A uniformly drawn point classified Interior and in the inner region, or
/// the isolated point of a singleton region.
fn sample_inner<R: Rng + ?Sized>(region: &Region, rng: &mut R) -> Result<Option<Vec<f64>>> {
    let reg = region.regime();
    let ci = region.canonical();
    let n = ci.n;
    match reg.case {
        RegimeCase::Empty | RegimeCase::Coincident => return Ok(None),
        RegimeCase::Singleton => {
            let mut y = vec![0.0; n];
            y[0] = reg.singleton_point();
            return region.frame().from_canonical(&y).map(Some);
        }
        _ => {}
    }
    let (r, r1, r2) = (ci.r, ci.ball_radius1(), ci.ball_radius2());
    let lo = (-r - r1).max(r - r2);
    let hi = (-r + r1).min(r + r2);
    let h = r1.min(r2);
    if hi <= lo {
        return Ok(None);
    }
    let mut y = vec![0.0; n];
    for _ in 0..MAX_ATTEMPTS {
        y[0] = rng.gen_range(lo..hi);
        for v in y.iter_mut().skip(1) {
            *v = rng.gen_range(-h..h);
        }
        let (y1, t) = CanonicalInstance::reduce(&y);
        if region.in_inner_reduced(y1, t)
            && region.classify_reduced(y1, t, DEFAULT_TOL).value == MembershipValue::Interior
        {
            return region.frame().from_canonical(&y).map(Some);
        }
    }
    Ok(None)
}
