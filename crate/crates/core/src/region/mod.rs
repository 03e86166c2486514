//! Regime selection, membership predicates and classification.
//!
//! Internally everything runs in canonical coordinates with `sigma1 >= sigma2`.
//! Piece tags are mapped back to the caller's labelling before they leave
//! this module.

mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{canonical_frame, AngleReport, CanonicalFrame, CanonicalInstance, ProblemInstance};

pub use trace::{trace_boundary, BoundaryTrace, Segment, SegmentTag};

/// Tolerance on slack comparisons, in radians.
pub const ANGLE_TOL: f64 = 1e-9;
/// Default classification tolerance, in point units.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Tolerance on the regime cutoffs for a given half-distance.
pub fn cutoff_tol(r: f64) -> f64 {
    1e-9 * (1.0 + r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegimeCase {
    /// Equal minimizers; the region is that single point.
    Coincident,
    TwoCusps,
    OneCusp,
    ThreeArcs,
    Singleton,
    Empty,
}

impl RegimeCase {
    pub fn name(self) -> &'static str {
        match self {
            Self::Coincident => "Coincident",
            Self::TwoCusps => "TwoCusps",
            Self::OneCusp => "OneCusp",
            Self::ThreeArcs => "ThreeArcs",
            Self::Singleton => "Singleton",
            Self::Empty => "Empty",
        }
    }
}

impl std::fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Regime of an instance plus the constants describing its boundary.
///
/// Indices refer to the sorted constants (`sigma1 >= sigma2`) and all
/// coordinates are canonical. `swapped` tells whether that order differs
/// from the instance's own labelling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRegime {
    pub case: RegimeCase,
    pub r: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    #[serde(rename = "L")]
    pub grad_bound: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub beta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub nu1: Option<f64>,
    pub nu2: Option<f64>,
    /// `L/2sigma1`, `L/2sigma2`, `(L/2)(1/sigma1 + 1/sigma2)`.
    pub thresholds: [f64; 3],
    pub swapped: bool,
}

impl RegionRegime {
    pub fn from_canonical(ci: &CanonicalInstance, swapped: bool) -> Self {
        let CanonicalInstance {
            r,
            sigma1: s1,
            sigma2: s2,
            grad_bound: l,
            ..
        } = *ci;
        let t1 = l / (2.0 * s1);
        let t2 = l / (2.0 * s2);
        let t3 = t1 + t2;
        let tau = cutoff_tol(r);
        let case = if r == 0.0 {
            RegimeCase::Coincident
        } else if (r - t3).abs() <= tau {
            RegimeCase::Singleton
        } else if r > t3 {
            RegimeCase::Empty
        } else if r <= t1 + tau {
            RegimeCase::TwoCusps
        } else if r <= t2 + tau {
            RegimeCase::OneCusp
        } else {
            RegimeCase::ThreeArcs
        };

        let gamma1 = (l / s1).powi(2);
        let gamma2 = (l / s2).powi(2);
        let beta = s2 / s1;
        let lambda1 = (1.0 + beta) / (1.0 + 2.0 * beta) * gamma1 / (2.0 * r) - r / (1.0 + 2.0 * beta);
        let lambda2 = -(1.0 + beta) / (2.0 + beta) * gamma2 / (2.0 * r) + beta * r / (2.0 + beta);
        let r2 = r * r;
        let nu1_val = || {
            let rad = -(gamma1 / r2 - 4.0) * ((1.0 + beta).powi(2) * gamma1 / r2 - 4.0 * beta * beta);
            r / (2.0 * (1.0 + 2.0 * beta)) * rad.max(0.0).sqrt()
        };
        let nu2_val = || {
            let rad = -(gamma2 / r2 - 4.0) * ((1.0 + beta).powi(2) * gamma2 / r2 - 4.0);
            r / (2.0 * (2.0 + beta)) * rad.max(0.0).sqrt()
        };
        let (nu1, nu2) = match case {
            RegimeCase::OneCusp => (Some(nu1_val()), None),
            RegimeCase::ThreeArcs | RegimeCase::Singleton => (Some(nu1_val()), Some(nu2_val())),
            _ => (None, None),
        };
        Self {
            case,
            r,
            sigma1: s1,
            sigma2: s2,
            grad_bound: l,
            gamma1,
            gamma2,
            beta,
            lambda1,
            lambda2,
            nu1,
            nu2,
            thresholds: [t1, t2, t3],
            swapped,
        }
    }

    /// The single point of a Singleton region, canonical coordinates.
    pub fn singleton_point(&self) -> f64 {
        -self.r + self.grad_bound / self.sigma1
    }

    /// Curve pieces and isolated points that make up the boundary, in the
    /// instance's own labelling.
    pub fn boundary_pieces(&self) -> (Vec<BoundaryPiece>, Vec<BoundaryPiece>) {
        use BoundaryPiece::*;
        let (curves, points) = match self.case {
            RegimeCase::TwoCusps => (vec![CurveT], vec![CuspX1, CuspX2]),
            RegimeCase::OneCusp => (vec![Arc1, CurveT], vec![CuspX1]),
            RegimeCase::ThreeArcs => (vec![Arc1, Arc2, CurveT], vec![]),
            RegimeCase::Singleton | RegimeCase::Coincident => (vec![], vec![SingletonPoint]),
            RegimeCase::Empty => (vec![], vec![]),
        };
        let fix = |v: Vec<BoundaryPiece>| v.into_iter().map(|p| p.relabel(self.swapped)).collect();
        (fix(curves), fix(points))
    }
}

/// Regime of an instance.
pub fn regime(inst: &ProblemInstance) -> RegionRegime {
    let frame = canonical_frame(inst);
    RegionRegime::from_canonical(&inst.reduced(), frame.swapped)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MembershipValue {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundaryPiece {
    CurveT,
    Arc1,
    Arc2,
    CuspX1,
    CuspX2,
    SingletonPoint,
}

impl BoundaryPiece {
    /// Swap the minimizer-specific tags when the internal order differs from
    /// the caller's.
    pub fn relabel(self, swapped: bool) -> Self {
        if !swapped {
            return self;
        }
        match self {
            Self::Arc1 => Self::Arc2,
            Self::Arc2 => Self::Arc1,
            Self::CuspX1 => Self::CuspX2,
            Self::CuspX2 => Self::CuspX1,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub value: MembershipValue,
    pub which_piece: Option<BoundaryPiece>,
}

impl Membership {
    pub const INTERIOR: Self = Self {
        value: MembershipValue::Interior,
        which_piece: None,
    };
    pub const EXTERIOR: Self = Self {
        value: MembershipValue::Exterior,
        which_piece: None,
    };

    pub fn boundary(piece: BoundaryPiece) -> Self {
        Self {
            value: MembershipValue::Boundary,
            which_piece: Some(piece),
        }
    }

    pub fn is_exterior(&self) -> bool {
        self.value == MembershipValue::Exterior
    }
}

/// An instance with its frame and regime precomputed, for repeated queries.
#[derive(Debug, Clone)]
pub struct Region {
    inst: ProblemInstance,
    frame: CanonicalFrame,
    ci: CanonicalInstance,
    regime: RegionRegime,
}

impl Region {
    pub fn new(inst: &ProblemInstance) -> Self {
        let frame = canonical_frame(inst);
        let ci = inst.reduced();
        let regime = RegionRegime::from_canonical(&ci, frame.swapped);
        Self {
            inst: inst.clone(),
            frame,
            ci,
            regime,
        }
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.inst
    }
    pub fn frame(&self) -> &CanonicalFrame {
        &self.frame
    }
    pub fn canonical(&self) -> &CanonicalInstance {
        &self.ci
    }
    pub fn regime(&self) -> &RegionRegime {
        &self.regime
    }

    /// `(y1, |y_rest|)` of an original-coordinate point.
    pub fn reduce(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.inst.check_point(x)?;
        let y = self.frame.to_canonical(x)?;
        Ok(CanonicalInstance::reduce(&y))
    }

    pub fn angle_report(&self, x: &[f64]) -> Result<AngleReport> {
        let (y1, t) = self.reduce(x)?;
        Ok(self.ci.report_reduced(y1, t))
    }

    pub fn in_outer(&self, x: &[f64]) -> Result<bool> {
        let (y1, t) = self.reduce(x)?;
        Ok(self.in_outer_reduced(y1, t))
    }

    pub fn in_inner(&self, x: &[f64]) -> Result<bool> {
        let (y1, t) = self.reduce(x)?;
        Ok(self.in_inner_reduced(y1, t))
    }

    pub fn classify(&self, x: &[f64], tol: f64) -> Result<Membership> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        let (y1, t) = self.reduce(x)?;
        let m = self.classify_reduced(y1, t, tol);
        Ok(Membership {
            value: m.value,
            which_piece: m.which_piece.map(|p| p.relabel(self.frame.swapped)),
        })
    }

    pub fn t_residual(&self, x: &[f64]) -> Result<f64> {
        let (y1, t) = self.reduce(x)?;
        self.t_residual_reduced(y1, t)
    }

    pub fn in_outer_reduced(&self, y1: f64, t: f64) -> bool {
        self.ci.slack_reduced(y1, t).is_some_and(|s| s >= -ANGLE_TOL)
    }

    pub fn in_inner_reduced(&self, y1: f64, t: f64) -> bool {
        if self.regime.case == RegimeCase::Singleton
            && (y1 - self.regime.singleton_point()).hypot(t) <= cutoff_tol(self.ci.r)
        {
            return true;
        }
        self.ci.slack_reduced(y1, t).is_some_and(|s| s > ANGLE_TOL)
    }

    /// Closure of the region as used for boundary detection: defined with
    /// nonnegative slack.
    fn closed_member(&self, y1: f64, t: f64) -> bool {
        self.ci.slack_reduced(y1, t.abs()).is_some_and(|s| s >= 0.0)
    }

    /// Algebraic form of the curve equation, evaluated in reduced coordinates.
    ///
    /// Negative inside the region, positive outside, zero on the curve.
    pub fn t_residual_reduced(&self, y1: f64, t: f64) -> Result<f64> {
        let CanonicalInstance {
            r,
            sigma1: s1,
            sigma2: s2,
            grad_bound: l,
            ..
        } = self.ci;
        let d1sq = (y1 + r).powi(2) + t * t;
        let d2sq = (y1 - r).powi(2) + t * t;
        if d1sq == 0.0 || d2sq == 0.0 {
            return Err(Error::OutOfDomain("point coincides with a minimizer".into()));
        }
        let rad1 = 1.0 / d1sq - (s1 / l).powi(2);
        let rad2 = 1.0 / d2sq - (s2 / l).powi(2);
        for (rad, d) in [(rad1, d1sq), (rad2, d2sq)] {
            // relative to 1/d^2 so the check is scale-free
            if rad < -1e-10 / d {
                return Err(Error::OutOfDomain("point lies outside a gradient ball".into()));
            }
        }
        let norm_sq = y1 * y1 + t * t;
        Ok((norm_sq - r * r) / (d1sq * d2sq) + s1 * s2 / (l * l) - rad1.max(0.0).sqrt() * rad2.max(0.0).sqrt())
    }

    pub(crate) fn classify_reduced(&self, y1: f64, t: f64, tol: f64) -> Membership {
        use BoundaryPiece::*;
        let reg = &self.regime;
        let r = self.ci.r;
        let rad1 = self.ci.ball_radius1();
        let rad2 = self.ci.ball_radius2();
        let d1 = (y1 + r).hypot(t);
        let d2 = (y1 - r).hypot(t);
        match reg.case {
            RegimeCase::Empty => return Membership::EXTERIOR,
            RegimeCase::Coincident => {
                return if d1 <= tol {
                    Membership::boundary(SingletonPoint)
                } else {
                    Membership::EXTERIOR
                };
            }
            RegimeCase::Singleton => {
                return if (y1 - reg.singleton_point()).hypot(t) <= tol {
                    Membership::boundary(SingletonPoint)
                } else {
                    Membership::EXTERIOR
                };
            }
            _ => {}
        }

        // isolated cusp points
        if matches!(reg.case, RegimeCase::TwoCusps | RegimeCase::OneCusp) && d1 <= tol {
            return Membership::boundary(CuspX1);
        }
        if reg.case == RegimeCase::TwoCusps && d2 <= tol {
            return Membership::boundary(CuspX2);
        }

        // junctions belong to the curve
        if let Some(nu1) = reg.nu1 {
            if (y1 - reg.lambda1).hypot(t - nu1) <= 2.0 * tol {
                return Membership::boundary(CurveT);
            }
        }
        if reg.case == RegimeCase::ThreeArcs {
            if let Some(nu2) = reg.nu2 {
                if (y1 - reg.lambda2).hypot(t - nu2) <= 2.0 * tol {
                    return Membership::boundary(CurveT);
                }
            }
        }

        // arcs
        let has_arc1 = matches!(reg.case, RegimeCase::OneCusp | RegimeCase::ThreeArcs);
        let has_arc2 = reg.case == RegimeCase::ThreeArcs;
        if has_arc1 && (d1 - rad1).abs() <= tol && y1 > reg.lambda1 + tol {
            return Membership::boundary(Arc1);
        }
        if has_arc2 && (d2 - rad2).abs() <= tol && y1 < reg.lambda2 - tol {
            return Membership::boundary(Arc2);
        }

        // the curve: look for a membership change within tol of the point
        if self.near_curve(y1, t, tol) {
            return Membership::boundary(CurveT);
        }

        let slack_pos = self.ci.slack_reduced(y1, t).is_some_and(|s| s > 0.0);
        let interior = match reg.case {
            RegimeCase::TwoCusps => slack_pos,
            RegimeCase::OneCusp => (d1 < rad1 && y1 > reg.lambda1) || (slack_pos && y1 <= reg.lambda1),
            RegimeCase::ThreeArcs => {
                (d1 < rad1 && y1 > reg.lambda1)
                    || (d2 < rad2 && y1 < reg.lambda2)
                    || (slack_pos && reg.lambda2 <= y1 && y1 <= reg.lambda1)
            }
            _ => unreachable!(),
        };
        if interior {
            Membership::INTERIOR
        } else {
            Membership::EXTERIOR
        }
    }

    fn near_curve(&self, y1: f64, t: f64, tol: f64) -> bool {
        let here = self.closed_member(y1, t);
        let dirs: Vec<[f64; 2]> = match self.ci.slack_gradient_reduced(y1, t) {
            Some(g) if g[0].is_finite() && g[1].is_finite() && g[0].hypot(g[1]) > 0.0 => {
                let n = g[0].hypot(g[1]);
                vec![[g[0] / n, g[1] / n]]
            }
            _ => {
                if !here {
                    // undefined points near the curve are caught by the
                    // cusp, junction and arc tests
                    return false;
                }
                let h = std::f64::consts::FRAC_1_SQRT_2;
                vec![[1.0, 0.0], [0.0, 1.0], [h, h], [h, -h]]
            }
        };
        dirs.iter().any(|d| {
            [1.0, -1.0]
                .iter()
                .any(|s| self.closed_member(y1 + s * tol * d[0], t + s * tol * d[1]) != here)
        })
    }
}

pub fn in_outer(inst: &ProblemInstance, x: &[f64]) -> Result<bool> {
    Region::new(inst).in_outer(x)
}

pub fn in_inner(inst: &ProblemInstance, x: &[f64]) -> Result<bool> {
    Region::new(inst).in_inner(x)
}

pub fn classify(inst: &ProblemInstance, x: &[f64], tol: f64) -> Result<Membership> {
    Region::new(inst).classify(x, tol)
}

pub fn t_residual(inst: &ProblemInstance, x: &[f64]) -> Result<f64> {
    Region::new(inst).t_residual(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1(r: f64) -> ProblemInstance {
        ProblemInstance::canonical(2, r, 1.5, 1.0, 10.0).unwrap()
    }

    #[test]
    fn regimes_of_reference_config() {
        assert_eq!(regime(&fig1(2.0)).case, RegimeCase::TwoCusps);
        assert_eq!(regime(&fig1(4.0)).case, RegimeCase::OneCusp);
        assert_eq!(regime(&fig1(6.0)).case, RegimeCase::ThreeArcs);
        let s = regime(&fig1(25.0 / 3.0));
        assert_eq!(s.case, RegimeCase::Singleton);
        assert!((s.singleton_point() + 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(regime(&fig1(9.0)).case, RegimeCase::Empty);
    }

    #[test]
    fn thresholds_and_ties() {
        let reg = regime(&fig1(2.0));
        let [t1, t2, t3] = reg.thresholds;
        assert!((t1 - 10.0 / 3.0).abs() < 1e-14);
        assert_eq!(t2, 5.0);
        assert!((t3 - 25.0 / 3.0).abs() < 1e-14);
        assert_eq!(regime(&fig1(10.0 / 3.0)).case, RegimeCase::TwoCusps);
        assert_eq!(regime(&fig1(5.0)).case, RegimeCase::OneCusp);
        assert_eq!(regime(&fig1(0.0)).case, RegimeCase::Coincident);
    }

    #[test]
    fn junction_constants_at_r4() {
        let reg = regime(&fig1(4.0));
        assert!((reg.lambda1 - 2.25397).abs() < 1e-5);
        assert!((reg.nu1.unwrap() - 2.3092).abs() < 1e-4);
        assert!(reg.nu2.is_none());
        assert!(reg.lambda1 < 10.0 / 1.5 - 4.0);
    }

    #[test]
    fn nu_presence() {
        assert!(regime(&fig1(2.0)).nu1.is_none());
        let reg = regime(&fig1(6.0));
        assert!(reg.nu1.is_some() && reg.nu2.is_some());
        let s = regime(&fig1(25.0 / 3.0));
        assert!(s.nu1.unwrap().abs() < 1e-6 && s.nu2.unwrap().abs() < 1e-6);
    }

    #[test]
    fn lambda_beyond_ball_in_two_cusps() {
        let reg = regime(&fig1(2.0));
        assert!(reg.lambda1 > 10.0 / 1.5 - 2.0);
    }

    #[test]
    fn predicates_reference_points() {
        let i = fig1(2.0);
        assert!(in_outer(&i, &[0.0, 0.0]).unwrap());
        assert!(in_inner(&i, &[0.0, 0.0]).unwrap());
        assert!(!in_outer(&i, &[-2.0, 0.0]).unwrap());
        assert!(!in_outer(&i, &[100.0, 0.0]).unwrap());
        let s = fig1(25.0 / 3.0);
        assert!(in_inner(&s, &[-5.0 / 3.0, 0.0]).unwrap());
    }

    #[test]
    fn classify_reference_points() {
        let i = fig1(2.0);
        assert_eq!(
            classify(&i, &[-2.0, 0.0], DEFAULT_TOL).unwrap(),
            Membership::boundary(BoundaryPiece::CuspX1)
        );
        assert_eq!(
            classify(&i, &[2.0, 0.0], DEFAULT_TOL).unwrap(),
            Membership::boundary(BoundaryPiece::CuspX2)
        );
        assert_eq!(classify(&i, &[0.0, 0.0], DEFAULT_TOL).unwrap(), Membership::INTERIOR);

        let i6 = fig1(6.0);
        let reg = regime(&i6);
        let rad = 10.0 / 1.5;
        let theta: f64 = 0.05;
        let p = [-6.0 + rad * theta.cos(), rad * theta.sin()];
        assert!(p[0] > reg.lambda1);
        assert_eq!(
            classify(&i6, &p, DEFAULT_TOL).unwrap(),
            Membership::boundary(BoundaryPiece::Arc1)
        );

        let e = fig1(9.0);
        for p in [[0.0, 0.0], [-9.0, 0.0], [3.0, 1.0]] {
            assert_eq!(classify(&e, &p, DEFAULT_TOL).unwrap(), Membership::EXTERIOR);
        }
    }

    #[test]
    fn classify_swapped_labels() {
        // stiffer function second: pieces come back in the caller's labels
        let i = ProblemInstance::new(vec![-2.0, 0.0], vec![2.0, 0.0], 1.0, 1.5, 10.0).unwrap();
        assert_eq!(
            classify(&i, &[2.0, 0.0], DEFAULT_TOL).unwrap(),
            Membership::boundary(BoundaryPiece::CuspX2)
        );
        let i4 = ProblemInstance::new(vec![-4.0, 0.0], vec![4.0, 0.0], 1.0, 1.5, 10.0).unwrap();
        assert_eq!(
            classify(&i4, &[4.0, 0.0], DEFAULT_TOL).unwrap(),
            Membership::boundary(BoundaryPiece::CuspX2)
        );
        // the softer minimizer sits outside the stiffer one's ball here
        assert!(classify(&i4, &[-4.0, 0.0], DEFAULT_TOL).unwrap().is_exterior());
    }

    #[test]
    fn coincident_region_is_the_point() {
        let i = ProblemInstance::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0, 2.0, 3.0).unwrap();
        assert_eq!(
            classify(&i, &[1.0, 1.0], DEFAULT_TOL).unwrap(),
            Membership::boundary(BoundaryPiece::SingletonPoint)
        );
        assert!(classify(&i, &[1.1, 1.0], DEFAULT_TOL).unwrap().is_exterior());
    }

    #[test]
    fn residual_at_junction_and_midpoint() {
        let reg = regime(&fig1(4.0));
        let res = t_residual(&fig1(4.0), &[reg.lambda1, reg.nu1.unwrap()]).unwrap();
        assert!(res.abs() < 1e-9, "{res}");
        assert!(t_residual(&fig1(2.0), &[0.0, 0.0]).unwrap() < 0.0);
        assert!(matches!(
            t_residual(&fig1(2.0), &[100.0, 0.0]),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn bad_tolerance_rejected() {
        assert!(classify(&fig1(2.0), &[0.0, 0.0], 0.0).is_err());
    }
}
