//! Quadratic functions, the constructive existence procedure, and witness
//! pairs certifying that a point is the minimizer of some admissible sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, FeasibilityViolation, Result};
use crate::geometry::ProblemInstance;
use crate::linalg::{self, Matrix};
use crate::region::{RegimeCase, Region, ANGLE_TOL};

/// `f(x) = 0.5 x^T Q x + b^T x + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFunction {
    pub q: Matrix,
    pub b: Vec<f64>,
    pub c: f64,
}

impl QuadraticFunction {
    pub fn new(q: Matrix, b: Vec<f64>, c: f64) -> Result<Self> {
        let n = b.len();
        if q.rows() != n || q.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.rows(),
            });
        }
        if !q.is_finite() || !linalg::is_finite(&b) || !c.is_finite() {
            return Err(Error::InvalidInput("quadratic data must be finite".into()));
        }
        if q.asymmetry() > 1e-12 * q.max_abs().max(1.0) {
            return Err(Error::InvalidInput("Q must be symmetric".into()));
        }
        Ok(Self { q, b, c })
    }

    /// `0.5 (x - x*)^T Q (x - x*)`: minimizer `x*`, minimum value 0.
    pub fn with_minimizer(q: Matrix, x_star: &[f64]) -> Self {
        let qx = q.mul_vec(x_star);
        let b = linalg::scale(&qx, -1.0);
        let c = 0.5 * linalg::dot(x_star, &qx);
        Self { q, b, c }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
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

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(0.5 * linalg::dot(x, &self.q.mul_vec(x)) + linalg::dot(&self.b, x) + self.c)
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(linalg::add(&self.q.mul_vec(x), &self.b))
    }

    pub fn lambda_min(&self) -> f64 {
        linalg::lambda_min(&self.q)
    }

    pub fn minimizer(&self) -> Result<Vec<f64>> {
        linalg::solve(&self.q, &linalg::scale(&self.b, -1.0))
    }
}

pub fn eval(q: &QuadraticFunction, x: &[f64]) -> Result<f64> {
    q.eval(x)
}

pub fn grad(q: &QuadraticFunction, x: &[f64]) -> Result<Vec<f64>> {
    q.grad(x)
}

/// Minimizer of `f1 + f2`.
pub fn sum_minimizer(f1: &QuadraticFunction, f2: &QuadraticFunction) -> Result<Vec<f64>> {
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch {
            expected: f1.dim(),
            got: f2.dim(),
        });
    }
    let q = f1.q.add(&f2.q);
    let rhs = linalg::scale(&linalg::add(&f1.b, &f2.b), -1.0);
    linalg::solve(&q, &rhs)
}

/// Angles the gradient at `x0` may make with `x0 - x*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AdmissibleAngles {
    /// `[0, sup)`.
    Interval {
        sup: f64,
    },
    /// Only 0: `x0` sits on the boundary of the reachable ball.
    ZeroOnly,
    Empty,
}

impl AdmissibleAngles {
    pub fn contains(&self, angle: f64) -> bool {
        match *self {
            Self::Interval { sup } => (0.0..sup).contains(&angle),
            Self::ZeroOnly => angle == 0.0,
            Self::Empty => false,
        }
    }
}

pub fn admissible_angles(x_star: &[f64], sigma: f64, grad_bound: f64, x0: &[f64]) -> Result<AdmissibleAngles> {
    if x_star.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x_star.len(),
            got: x0.len(),
        });
    }
    let d = linalg::dist(x0, x_star);
    if d == 0.0 {
        return Err(Error::InvalidInput("x0 must differ from the minimizer".into()));
    }
    let ratio = sigma * d / grad_bound;
    Ok(if ratio > 1.0 + 1e-12 {
        AdmissibleAngles::Empty
    } else if ratio >= 1.0 {
        AdmissibleAngles::ZeroOnly
    } else {
        AdmissibleAngles::Interval { sup: ratio.acos() }
    })
}

/// Check that a `sigma`-strongly convex quadratic with minimizer `x*` can
/// have gradient `g` at `x0`. Returns `true` for the boundary case where
/// only `sigma I` works.
fn feasibility(v: &[f64], g: &[f64], sigma: f64) -> Result<bool> {
    let d = linalg::norm(v);
    let gn = linalg::norm(g);
    if d == 0.0 {
        return Err(Error::InvalidInput("x0 must differ from the minimizer".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    if gn == 0.0 {
        return Err(Error::Infeasible(FeasibilityViolation::OutsideBall));
    }
    let ratio = sigma * d / gn;
    if ratio > 1.0 + 1e-12 {
        return Err(Error::Infeasible(FeasibilityViolation::OutsideBall));
    }
    let angle = linalg::angle_between(g, v);
    if ratio >= 1.0 {
        return if angle <= 1e-9 {
            Ok(true)
        } else {
            Err(Error::Infeasible(FeasibilityViolation::AngleTooWide))
        };
    }
    if angle >= ratio.acos() - 1e-12 {
        return Err(Error::Infeasible(FeasibilityViolation::AngleTooWide));
    }
    Ok(false)
}

/// Planar matrix `P` with `P v = g` and smallest eigenvalue `sigma`.
/// Assumes feasibility has been checked and `v != 0`.
fn planar_matrix(v: [f64; 2], g: [f64; 2], sigma: f64) -> Matrix {
    let d = v[0].hypot(v[1]);
    let lh = g[0].hypot(g[1]) / d;
    let cross = v[0] * g[1] - v[1] * g[0];
    let phi = cross.atan2(v[0] * g[0] + v[1] * g[1]);
    let (s, c) = phi.sin_cos();
    let den = lh * c - sigma;
    let p22_axis = |s: f64| {
        if s == 0.0 {
            sigma
        } else {
            sigma + (lh * s).powi(2) / den
        }
    };

    if v[1].abs() >= 1e-3 * d {
        let (v1, v2) = (v[0], v[1]);
        let d2 = d * d;
        let p11 = ((den) * (sigma * v2 * v2 - 2.0 * lh * v1 * v2 * s + lh * v1 * v1 * c) + (lh * v2 * s).powi(2))
            / (d2 * den);
        let p22 = ((den) * (sigma * v1 * v1 + 2.0 * lh * v1 * v2 * s + lh * v2 * v2 * c) + (lh * v1 * s).powi(2))
            / (d2 * den);
        let p12 = -v1 / (d2 * v2) * (lh * v1 * v1 * c - 2.0 * lh * v1 * v2 * s - lh * v2 * v2 * c)
            - (lh * lh - sigma * sigma) * v1 * v2 / (d2 * den)
            + lh * (v1 / v2 * c - s);
        Matrix::from_rows(&[vec![p11, p12], vec![p12, p22]])
    } else {
        // rotate v onto the first axis, use the axis formulas, rotate back
        let (sv, cv) = (v[1] / d, v[0] / d);
        let p = Matrix::from_rows(&[vec![lh * c, lh * s], vec![lh * s, p22_axis(s)]]);
        let rot = Matrix::from_rows(&[vec![cv, -sv], vec![sv, cv]]);
        let mut out = rot.matmul(&p).matmul(&rot.transpose());
        out.symmetrize();
        out
    }
}

/// Quadratic on the plane with minimizer `x_star`, smallest eigenvalue
/// `sigma` and gradient `g` at `x0`.
pub fn construct_quadratic_2d(x_star: &[f64], x0: &[f64], g: &[f64], sigma: f64) -> Result<QuadraticFunction> {
    for len in [x0.len(), g.len()] {
        if len != 2 || x_star.len() != 2 {
            return Err(Error::UnsupportedDimension(if x_star.len() != 2 {
                x_star.len()
            } else {
                len
            }));
        }
    }
    let v = linalg::sub(x0, x_star);
    let q = if feasibility(&v, g, sigma)? {
        Matrix::scaled_identity(2, sigma)
    } else {
        planar_matrix([v[0], v[1]], [g[0], g[1]], sigma)
    };
    Ok(QuadraticFunction::with_minimizer(q, x_star))
}

/// Quadratic in any dimension `n >= 2` with minimizer `x_star`, smallest
/// eigenvalue `sigma` and gradient `g` at `x0`.
///
/// Solves the problem in the plane spanned by `x0 - x*` and `g` and uses
/// `sigma` on the orthogonal complement.
pub fn construct_quadratic(x_star: &[f64], x0: &[f64], g: &[f64], sigma: f64) -> Result<QuadraticFunction> {
    let n = x_star.len();
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    for len in [x0.len(), g.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let v = linalg::sub(x0, x_star);
    if feasibility(&v, g, sigma)? {
        return Ok(QuadraticFunction::with_minimizer(
            Matrix::scaled_identity(n, sigma),
            x_star,
        ));
    }
    let d = linalg::norm(&v);
    let e1 = linalg::scale(&v, 1.0 / d);
    let along = linalg::dot(g, &e1);
    let rest = linalg::axpy(g, -along, &e1);
    let rest_norm = linalg::norm(&rest);
    let e2 = if rest_norm <= 1e-14 * linalg::norm(g) {
        // g parallel to v: any unit vector orthogonal to v spans the plane
        linalg::complete_basis(&e1).swap_remove(1)
    } else {
        linalg::scale(&rest, 1.0 / rest_norm)
    };
    let p = planar_matrix([d, 0.0], [along, rest_norm.max(0.0)], sigma);

    // Q = E P E^T + sigma (I - E E^T)
    let mut q = Matrix::scaled_identity(n, sigma);
    let basis = [&e1, &e2];
    for i in 0..2 {
        for j in 0..2 {
            let coef = p[(i, j)] - if i == j { sigma } else { 0.0 };
            q.add_outer(coef, basis[i], basis[j]);
        }
    }
    q.symmetrize();
    Ok(QuadraticFunction::with_minimizer(q, x_star))
}

/// Two quadratics whose sum is minimized at `point`, with gradients `g` and
/// `-g` there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub f1: QuadraticFunction,
    pub f2: QuadraticFunction,
    pub g: Vec<f64>,
    pub point: Vec<f64>,
}

/// Residuals of a witness pair against its defining properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessCheck {
    /// `|grad f1(x) - g| + |grad f2(x) + g|`.
    pub gradient_error: f64,
    /// `|g| - L` (nonpositive when the bound holds).
    pub bound_excess: f64,
    /// `sigma_i - lambda_min(Q_i)`, nonpositive when strong convexity holds.
    pub convexity_gap: [f64; 2],
    /// `|sum minimizer - x| / max(1, |x|)`.
    pub minimizer_error: f64,
    /// Smallest-eigenvalue mismatch `|lambda_min(Q_i) - sigma_i|`.
    pub eigen_error: [f64; 2],
}

impl WitnessCheck {
    /// Default tolerances used across tests and the verification oracle.
    pub fn passes(&self) -> bool {
        self.gradient_error <= 1e-9 * (1.0 + self.bound_excess.abs())
            && self.bound_excess <= 1e-9
            && self.convexity_gap.iter().all(|g| *g <= 1e-9)
            && self.minimizer_error <= 1e-8
    }
}

impl WitnessPair {
    pub fn check(&self, inst: &ProblemInstance) -> Result<WitnessCheck> {
        let g1 = self.f1.grad(&self.point)?;
        let g2 = self.f2.grad(&self.point)?;
        let gradient_error = linalg::dist(&g1, &self.g) + linalg::norm(&linalg::add(&g2, &self.g));
        let bound_excess = linalg::norm(&self.g) - inst.grad_bound();
        let l1 = self.f1.lambda_min();
        let l2 = self.f2.lambda_min();
        let m = sum_minimizer(&self.f1, &self.f2)?;
        let minimizer_error = linalg::dist(&m, &self.point) / linalg::norm(&self.point).max(1.0);
        Ok(WitnessCheck {
            gradient_error,
            bound_excess,
            convexity_gap: [inst.sigma1() - l1, inst.sigma2() - l2],
            minimizer_error,
            eigen_error: [(l1 - inst.sigma1()).abs(), (l2 - inst.sigma2()).abs()],
        })
    }
}

/// Plane and angle window in which a witness gradient may be chosen.
struct GradientWindow {
    /// Unit vector from `x1*` toward `x`.
    a: Vec<f64>,
    /// Unit vector orthogonal to `a` in the plane of `a` and `-u2`.
    w: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl GradientWindow {
    fn direction(&self, t: f64) -> Vec<f64> {
        let (s, c) = t.sin_cos();
        linalg::add(&linalg::scale(&self.a, c), &linalg::scale(&self.w, s))
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

enum WitnessSite {
    /// The isolated point of a singleton region; `g` is the given vector.
    SingletonPoint(Vec<f64>),
    Window(GradientWindow),
}

fn witness_site(region: &Region, x: &[f64]) -> Result<WitnessSite> {
    let inst = region.instance();
    let reg = region.regime();
    let (y1, t) = region.reduce(x)?;
    if reg.case == RegimeCase::Singleton && region.in_inner_reduced(y1, t) {
        let rep = region.canonical().report_reduced(y1, t);
        if !(rep.defined && rep.slack > ANGLE_TOL) {
            // the gradient of the stiffer function points along the first axis
            let e1 = region.frame().e.column(0);
            let sign = if region.frame().swapped { -1.0 } else { 1.0 };
            return Ok(WitnessSite::SingletonPoint(linalg::scale(
                &e1,
                sign * inst.grad_bound(),
            )));
        }
    }
    let rep = region.canonical().report_reduced(y1, t);
    if !rep.defined || rep.slack < -ANGLE_TOL {
        return Err(Error::NotInInner);
    }
    // angles in the caller's labelling (the slack is symmetric)
    let (phi1, phi2) = if region.frame().swapped {
        (rep.phi2_t, rep.phi1_t)
    } else {
        (rep.phi1_t, rep.phi2_t)
    };
    let u1 = linalg::sub(x, inst.x1_star());
    let u1 = linalg::scale(&u1, 1.0 / linalg::norm(&u1));
    let u2 = linalg::sub(x, inst.x2_star());
    let neg_u2 = linalg::scale(&u2, -1.0 / linalg::norm(&u2));
    let psi = linalg::angle_between(&u1, &neg_u2);
    let along = linalg::dot(&neg_u2, &u1);
    let rest = linalg::axpy(&neg_u2, -along, &u1);
    let rest_norm = linalg::norm(&rest);
    let w = if rest_norm <= 1e-12 {
        linalg::complete_basis(&u1).swap_remove(1)
    } else {
        linalg::scale(&rest, 1.0 / rest_norm)
    };
    Ok(WitnessSite::Window(GradientWindow {
        a: u1,
        w,
        lo: (psi - phi2).max(-phi1),
        hi: phi1.min(psi + phi2),
    }))
}

fn pair_for_gradient(inst: &ProblemInstance, x: &[f64], g: Vec<f64>) -> Result<WitnessPair> {
    let f1 = construct_quadratic(inst.x1_star(), x, &g, inst.sigma1())?;
    let f2 = construct_quadratic(inst.x2_star(), x, &linalg::scale(&g, -1.0), inst.sigma2())?;
    Ok(WitnessPair {
        f1,
        f2,
        g,
        point: x.to_vec(),
    })
}

/// Witness pair for a point of the inner region.
///
/// The gradient has norm `L` and sits in the middle of the admissible angle
/// window in the plane of `x - x1*` and `x2* - x`.
pub fn witness_pair(inst: &ProblemInstance, x: &[f64]) -> Result<WitnessPair> {
    let region = Region::new(inst);
    witness_pair_in(&region, x)
}

pub(crate) fn witness_pair_in(region: &Region, x: &[f64]) -> Result<WitnessPair> {
    let inst = region.instance();
    if !region.in_inner(x)? {
        return Err(Error::NotInInner);
    }
    let g = match witness_site(region, x)? {
        WitnessSite::SingletonPoint(g) => g,
        WitnessSite::Window(win) => {
            let mid = 0.5 * (win.lo + win.hi);
            linalg::scale(&win.direction(mid), inst.grad_bound())
        }
    };
    pair_for_gradient(inst, x, g)
}

/// Smallest angle window that still yields a family of distinct witnesses.
pub const MIN_FAMILY_MARGIN: f64 = 1e-6;

/// `k` distinct witness pairs for the same point, from gradients rotated
/// within the admissible window by angles evenly spaced in
/// `[-width/4, width/4]`.
pub fn witness_family(inst: &ProblemInstance, x: &[f64], k: usize) -> Result<Vec<WitnessPair>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let region = Region::new(inst);
    match witness_site(&region, x)? {
        WitnessSite::SingletonPoint(g) => {
            if k == 1 {
                Ok(vec![pair_for_gradient(inst, x, g)?])
            } else {
                Err(Error::InsufficientMargin { margin: 0.0 })
            }
        }
        WitnessSite::Window(win) => {
            let width = win.width();
            if width < MIN_FAMILY_MARGIN {
                return Err(Error::InsufficientMargin { margin: width });
            }
            let mid = 0.5 * (win.lo + win.hi);
            let spread = width / 4.0;
            (0..k)
                .map(|j| {
                    let delta = if k == 1 {
                        0.0
                    } else {
                        -spread + 2.0 * spread * j as f64 / (k - 1) as f64
                    };
                    let g = linalg::scale(&win.direction(mid + delta), inst.grad_bound());
                    pair_for_gradient(inst, x, g)
                })
                .collect()
        }
    }
}
