//! Problem data, the canonical frame, and the angle quantities built on it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Two minimizers, their strong-convexity constants and the gradient bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    x1_star: Vec<f64>,
    x2_star: Vec<f64>,
    sigma1: f64,
    sigma2: f64,
    #[serde(rename = "L")]
    grad_bound: f64,
}

impl ProblemInstance {
    pub fn new(x1_star: Vec<f64>, x2_star: Vec<f64>, sigma1: f64, sigma2: f64, grad_bound: f64) -> Result<Self> {
        if x1_star.len() != x2_star.len() {
            return Err(Error::DimensionMismatch {
                expected: x1_star.len(),
                got: x2_star.len(),
            });
        }
        if x1_star.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "dimension must be at least 2, got {}",
                x1_star.len()
            )));
        }
        if !linalg::is_finite(&x1_star) || !linalg::is_finite(&x2_star) {
            return Err(Error::InvalidInput("minimizers must be finite".into()));
        }
        for (name, v) in [("sigma1", sigma1), ("sigma2", sigma2), ("L", grad_bound)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self {
            x1_star,
            x2_star,
            sigma1,
            sigma2,
            grad_bound,
        })
    }

    /// Instance already in canonical position: minimizers at `(-r, 0, ..)` and `(r, 0, ..)`.
    pub fn canonical(n: usize, r: f64, sigma1: f64, sigma2: f64, grad_bound: f64) -> Result<Self> {
        let mut x1 = vec![0.0; n];
        let mut x2 = vec![0.0; n];
        if n > 0 {
            x1[0] = -r;
            x2[0] = r;
        }
        Self::new(x1, x2, sigma1, sigma2, grad_bound)
    }

    pub fn x1_star(&self) -> &[f64] {
        &self.x1_star
    }
    pub fn x2_star(&self) -> &[f64] {
        &self.x2_star
    }
    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
    pub fn grad_bound(&self) -> f64 {
        self.grad_bound
    }
    pub fn dim(&self) -> usize {
        self.x1_star.len()
    }

    /// Half the distance between the minimizers.
    pub fn r(&self) -> f64 {
        0.5 * linalg::dist(&self.x1_star, &self.x2_star)
    }

    /// Same minimizers and constants with a different gradient bound.
    pub fn with_grad_bound(&self, grad_bound: f64) -> Result<Self> {
        Self::new(
            self.x1_star.clone(),
            self.x2_star.clone(),
            self.sigma1,
            self.sigma2,
            grad_bound,
        )
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !linalg::is_finite(x) {
            return Err(Error::InvalidInput("point must be finite".into()));
        }
        Ok(())
    }

    /// Sorted constants and the half-distance, ready for the canonical formulas.
    pub fn reduced(&self) -> CanonicalInstance {
        let swapped = self.sigma1 < self.sigma2;
        let (s1, s2) = if swapped {
            (self.sigma2, self.sigma1)
        } else {
            (self.sigma1, self.sigma2)
        };
        CanonicalInstance {
            n: self.dim(),
            r: self.r(),
            sigma1: s1,
            sigma2: s2,
            grad_bound: self.grad_bound,
        }
    }
}

/// Orthonormal change of basis putting the minimizers at `(-r, 0, ..)` and `(r, 0, ..)`.
///
/// When `swapped` is set the minimizer with the larger constant (the original
/// `x2_star`) is the one placed at `-r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalFrame {
    /// Columns are the new basis vectors in original coordinates.
    pub e: Matrix,
    pub b: Vec<f64>,
    pub r: f64,
    pub swapped: bool,
}

impl CanonicalFrame {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn to_canonical(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(self.e.tr_mul_vec(&linalg::sub(x, &self.b)))
    }

    pub fn from_canonical(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y)?;
        Ok(linalg::add(&self.e.mul_vec(y), &self.b))
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

pub fn canonical_frame(inst: &ProblemInstance) -> CanonicalFrame {
    let n = inst.dim();
    let swapped = inst.sigma1 < inst.sigma2;
    let (lo, hi) = if swapped {
        (&inst.x2_star, &inst.x1_star)
    } else {
        (&inst.x1_star, &inst.x2_star)
    };
    let b = linalg::scale(&linalg::add(lo, hi), 0.5);
    let diff = linalg::sub(hi, lo);
    let len = linalg::norm(&diff);
    let e = if len == 0.0 {
        Matrix::identity(n)
    } else {
        Matrix::from_columns(&linalg::complete_basis(&diff))
    };
    CanonicalFrame {
        e,
        b,
        r: 0.5 * len,
        swapped,
    }
}

/// Constants of an instance in canonical position with `sigma1 >= sigma2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalInstance {
    pub n: usize,
    pub r: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub grad_bound: f64,
}

/// Distances and angles of a point relative to the two minimizers.
///
/// Angle fields that cannot be evaluated are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleReport {
    pub d1: f64,
    pub d2: f64,
    pub phi1_t: f64,
    pub phi2_t: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub psi: f64,
    pub slack: f64,
    pub defined: bool,
}

impl CanonicalInstance {
    pub fn ball_radius1(&self) -> f64 {
        self.grad_bound / self.sigma1
    }
    pub fn ball_radius2(&self) -> f64 {
        self.grad_bound / self.sigma2
    }

    /// Distance below which a point is treated as a minimizer.
    pub fn point_eps(&self) -> f64 {
        1e-12 * self.r.max(1.0)
    }

    /// Angle report in the reduced coordinates `(y1, t)` with `t = |y_rest| >= 0`.
    pub fn report_reduced(&self, y1: f64, t: f64) -> AngleReport {
        let r = self.r;
        let d1 = (y1 + r).hypot(t);
        let d2 = (y1 - r).hypot(t);
        let eps = self.point_eps();
        let at_min = d1 <= eps || d2 <= eps;
        let (alpha1, alpha2) = if at_min {
            (f64::NAN, f64::NAN)
        } else {
            (t.atan2(y1 + r), t.atan2(y1 - r))
        };
        let psi = PI - (alpha2 - alpha1);
        let a1 = self.sigma1 * d1 / self.grad_bound;
        let a2 = self.sigma2 * d2 / self.grad_bound;
        let in_balls = a1 <= 1.0 + 1e-12 && a2 <= 1.0 + 1e-12;
        let phi1_t = if a1 <= 1.0 + 1e-12 {
            a1.clamp(-1.0, 1.0).acos()
        } else {
            f64::NAN
        };
        let phi2_t = if a2 <= 1.0 + 1e-12 {
            a2.clamp(-1.0, 1.0).acos()
        } else {
            f64::NAN
        };
        let defined = in_balls && !at_min;
        let slack = if defined { phi1_t + phi2_t - psi } else { f64::NAN };
        AngleReport {
            d1,
            d2,
            phi1_t,
            phi2_t,
            alpha1,
            alpha2,
            psi,
            slack,
            defined,
        }
    }

    /// Slack `phi1_t + phi2_t - psi`, or `None` where it is undefined.
    pub fn slack_reduced(&self, y1: f64, t: f64) -> Option<f64> {
        let rep = self.report_reduced(y1, t);
        rep.defined.then_some(rep.slack)
    }

    /// Gradient of the slack in `(y1, t)`.
    ///
    /// `None` where the slack is undefined or on a ball boundary (infinite
    /// derivative of arccos).
    pub fn slack_gradient_reduced(&self, y1: f64, t: f64) -> Option<[f64; 2]> {
        let rep = self.report_reduced(y1, t);
        if !rep.defined {
            return None;
        }
        let r = self.r;
        let l = self.grad_bound;
        let mut g = [0.0; 2];
        for (w, d, sigma, sign) in [(y1 + r, rep.d1, self.sigma1, -1.0), (y1 - r, rep.d2, self.sigma2, 1.0)] {
            let a = sigma * d / l;
            let root = (1.0 - a * a).max(0.0).sqrt();
            if root == 0.0 {
                return None;
            }
            let k = -(sigma / l) / root;
            g[0] += k * w / d;
            g[1] += k * t / d;
            // psi = pi - alpha2 + alpha1, so slack picks up +alpha2 - alpha1
            let d2 = d * d;
            g[0] += sign * (-t / d2);
            g[1] += sign * (w / d2);
        }
        Some(g)
    }

    /// Split a canonical point into `(y1, |y_rest|)`.
    pub fn reduce(y: &[f64]) -> (f64, f64) {
        (y[0], linalg::norm(&y[1..]))
    }
}

/// Angle report for a point given in canonical coordinates.
pub fn angle_report(ci: &CanonicalInstance, y: &[f64]) -> AngleReport {
    let (y1, t) = CanonicalInstance::reduce(y);
    ci.report_reduced(y1, t)
}
