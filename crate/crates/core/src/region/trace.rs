//! Polyline approximation of the region boundary in the plane.
//!
//! The upper half (`y2 >= 0` in canonical coordinates) is traced and the
//! lower half mirrored. Curve points are found by bisection on the closed
//! membership predicate:
//! - on vertical lines for `-r <= y1 <= r`, where membership is monotone in
//!   the height;
//! - on rays leaving a minimizer away from the other one, where membership
//!   is monotone in the distance. This covers the parts of the curve near
//!   the cusps that bend past the minimizers.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::io;

use serde::Serialize;

use super::{BoundaryPiece, RegimeCase, Region};
use crate::error::{Error, Result};
use crate::geometry::ProblemInstance;

const BISECTION_STEPS: usize = 60;
/// Fine samples per traced sub-arc before arclength resampling.
const FINE_FACTOR: usize = 8;

pub type Point2 = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SegmentTag {
    CurveT,
    Arc1,
    Arc2,
    IsolatedPoint,
}

impl SegmentTag {
    pub fn name(self) -> &'static str {
        match self {
            Self::CurveT => "CurveT",
            Self::Arc1 => "Arc1",
            Self::Arc2 => "Arc2",
            Self::IsolatedPoint => "IsolatedPoint",
        }
    }

    fn relabel(self, swapped: bool) -> Self {
        match (self, swapped) {
            (Self::Arc1, true) => Self::Arc2,
            (Self::Arc2, true) => Self::Arc1,
            (t, _) => t,
        }
    }

    fn color(self) -> &'static str {
        match self {
            Self::CurveT => "blue",
            Self::Arc1 => "cyan",
            Self::Arc2 => "magenta",
            Self::IsolatedPoint => "black",
        }
    }

    pub fn piece(self) -> Option<BoundaryPiece> {
        match self {
            Self::CurveT => Some(BoundaryPiece::CurveT),
            Self::Arc1 => Some(BoundaryPiece::Arc1),
            Self::Arc2 => Some(BoundaryPiece::Arc2),
            Self::IsolatedPoint => None,
        }
    }
}

/// One boundary piece. A piece may consist of several disconnected
/// polylines (the curve in the three-arc case has an upper and a lower
/// branch).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub tag: SegmentTag,
    /// The single branch closes on itself.
    pub closed: bool,
    pub branches: Vec<Vec<Point2>>,
}

impl Segment {
    pub fn points(&self) -> impl Iterator<Item = &Point2> {
        self.branches.iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryTrace {
    pub segments: Vec<Segment>,
    /// Samples per traced half-branch.
    pub resolution: usize,
}

impl BoundaryTrace {
    /// Number of curve pieces (everything but isolated points).
    pub fn curve_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| s.tag != SegmentTag::IsolatedPoint)
            .count()
    }

    pub fn isolated_count(&self) -> usize {
        self.segments.len() - self.curve_count()
    }

    pub fn segments_tagged(&self, tag: SegmentTag) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(move |s| s.tag == tag)
    }

    /// CSV with columns `segment_tag,idx,x1,x2`. `idx` restarts at 0 at the
    /// start of every polyline.
    pub fn write_csv<W: io::Write>(&self, w: W) -> std::result::Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["segment_tag", "idx", "x1", "x2"])?;
        for seg in &self.segments {
            for branch in &seg.branches {
                for (i, p) in branch.iter().enumerate() {
                    wr.serialize((seg.tag.name(), i, p[0], p[1]))?;
                }
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_svg(&self) -> String {
        let pts: Vec<&Point2> = self.segments.iter().flat_map(|s| s.points()).collect();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &pts {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let pad = 0.05 * span;
        let size = 800.0;
        let sc = size / (span + 2.0 * pad);
        let map = |p: &Point2| ((p[0] - lo[0] + pad) * sc, (hi[1] - p[1] + pad) * sc);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for seg in &self.segments {
            let color = seg.tag.color();
            for branch in &seg.branches {
                if seg.tag == SegmentTag::IsolatedPoint {
                    for p in branch {
                        let (x, y) = map(p);
                        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{color}"/>"#);
                    }
                    continue;
                }
                let coords: Vec<String> = branch
                    .iter()
                    .map(|p| {
                        let (x, y) = map(p);
                        format!("{x:.3},{y:.3}")
                    })
                    .collect();
                let elem = if seg.closed { "polygon" } else { "polyline" };
                let _ = writeln!(
                    out,
                    r#"<{elem} points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    coords.join(" ")
                );
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Trace the boundary of a planar instance.
///
/// `samples` is the number of points on each traced upper half-branch.
pub fn trace_boundary(inst: &ProblemInstance, samples: usize) -> Result<BoundaryTrace> {
    if inst.dim() != 2 {
        return Err(Error::UnsupportedDimension(inst.dim()));
    }
    if samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples per segment".into()));
    }
    let region = Region::new(inst);
    let tracer = Tracer::new(&region, samples);
    let canonical = tracer.segments()?;
    let frame = region.frame();
    let segments = canonical
        .into_iter()
        .map(|s| Segment {
            tag: s.tag.relabel(frame.swapped),
            closed: s.closed,
            branches: s
                .branches
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|y| {
                            let x = frame.from_canonical(y).expect("planar frame");
                            [x[0], x[1]]
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    Ok(BoundaryTrace {
        segments,
        resolution: samples,
    })
}

/// Which parametrization a curve point is solved in.
#[derive(Clone, Copy)]
enum Chart {
    /// Vertical line at fixed `y1`.
    Vertical,
    /// Ray from the left minimizer.
    FromLeft,
    /// Ray from the right minimizer.
    FromRight,
}

struct Tracer<'a> {
    region: &'a Region,
    n: usize,
    r: f64,
    rad1: f64,
    rad2: f64,
}

impl<'a> Tracer<'a> {
    fn new(region: &'a Region, n: usize) -> Self {
        let ci = region.canonical();
        Self {
            region,
            n,
            r: ci.r,
            rad1: ci.ball_radius1(),
            rad2: ci.ball_radius2(),
        }
    }

    fn member(&self, p: Point2) -> bool {
        self.region.closed_member(p[0], p[1])
    }

    /// Bisection between a point assumed inside and one assumed outside.
    fn bisect(&self, inside: Point2, outside: Point2) -> Point2 {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..BISECTION_STEPS {
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            if self.member(m) {
                a = m;
            } else {
                b = m;
            }
        }
        // report the inside end: it satisfies the closed predicate
        a
    }

    /// Curve height above `y1`, for `-r <= y1 <= r`.
    fn vertical(&self, y1: f64) -> Point2 {
        let r = self.r;
        let h1 = (self.rad1 * self.rad1 - (y1 + r).powi(2)).max(0.0).sqrt();
        let h2 = (self.rad2 * self.rad2 - (y1 - r).powi(2)).max(0.0).sqrt();
        self.bisect([y1, 0.0], [y1, h1.min(h2)])
    }

    /// Curve point on the ray from a minimizer at angle `theta`.
    fn polar(&self, from_left: bool, theta: f64) -> Point2 {
        let r = self.r;
        let (c, other, own_rad, other_rad) = if from_left {
            ([-r, 0.0], [r, 0.0], self.rad1, self.rad2)
        } else {
            ([r, 0.0], [-r, 0.0], self.rad2, self.rad1)
        };
        let u = [theta.cos(), theta.sin()];
        // exit from the other ball: |c + rho u - other| = other_rad
        let w = [c[0] - other[0], c[1] - other[1]];
        let bb = u[0] * w[0] + u[1] * w[1];
        let cc = w[0] * w[0] + w[1] * w[1] - other_rad * other_rad;
        let other_exit = -bb + (bb * bb - cc).max(0.0).sqrt();
        let rho_max = own_rad.min(other_exit);
        let at = |rho: f64| [c[0] + rho * u[0], c[1] + rho * u[1]];
        self.bisect(at(0.0), at(rho_max))
    }

    fn project(&self, chart: Chart, p: Point2) -> Point2 {
        match chart {
            Chart::Vertical => self.vertical(p[0]),
            Chart::FromLeft => self.polar(true, p[1].atan2(p[0] + self.r)),
            Chart::FromRight => self.polar(false, p[1].atan2(p[0] - self.r)),
        }
    }

    fn chart_of(&self, p: Point2) -> Chart {
        if p[0] < -self.r {
            Chart::FromLeft
        } else if p[0] > self.r {
            Chart::FromRight
        } else {
            Chart::Vertical
        }
    }

    /// Upper branch of the curve from `start` to `end`, built from the
    /// listed pieces, resampled to `n` points by arclength.
    fn curve_branch(&self, start: Point2, end: Point2, pieces: &[(Chart, f64, f64)]) -> Vec<Point2> {
        let m = FINE_FACTOR * self.n;
        let mut fine = vec![start];
        for &(chart, a, b) in pieces {
            for k in 0..=m {
                let s = a + (b - a) * k as f64 / m as f64;
                let p = match chart {
                    Chart::Vertical => self.vertical(s),
                    Chart::FromLeft => self.polar(true, s),
                    Chart::FromRight => self.polar(false, s),
                };
                fine.push(p);
            }
        }
        fine.push(end);
        fine.dedup_by(|a, b| (a[0] - b[0]).hypot(a[1] - b[1]) < 1e-14);

        let mut out = resample(&fine, self.n);
        let last = out.len() - 1;
        for p in out.iter_mut().take(last).skip(1) {
            *p = self.project(self.chart_of(*p), *p);
        }
        out[0] = start;
        out[last] = end;
        out
    }

    fn arc(&self, center: Point2, radius: f64, from: f64, to: f64) -> Vec<Point2> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let th = from + (to - from) * k as f64 / (n - 1) as f64;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            })
            .collect()
    }

    fn segments(&self) -> Result<Vec<Segment>> {
        let reg = self.region.regime();
        let ci = self.region.canonical();
        let r = self.r;
        let x1 = [-r, 0.0];
        let x2 = [r, 0.0];
        let point = |p: Point2| Segment {
            tag: SegmentTag::IsolatedPoint,
            closed: false,
            branches: vec![vec![p]],
        };
        let cusp_angle = |sigma: f64| (2.0 * r * sigma / ci.grad_bound).clamp(-1.0, 1.0).acos();

        Ok(match reg.case {
            RegimeCase::Empty => return Err(Error::RegionEmpty),
            RegimeCase::Coincident => vec![point(x1)],
            RegimeCase::Singleton => vec![point([reg.singleton_point(), 0.0])],
            RegimeCase::TwoCusps => {
                let c1 = cusp_angle(ci.sigma2);
                let c2 = cusp_angle(ci.sigma1);
                let upper = self.curve_branch(
                    x1,
                    x2,
                    &[
                        (Chart::FromLeft, FRAC_PI_2 + c1, FRAC_PI_2),
                        (Chart::Vertical, -r, r),
                        (Chart::FromRight, FRAC_PI_2, FRAC_PI_2 - c2),
                    ],
                );
                // closed loop: upper x1 -> x2, then lower back toward x1
                let mut lp = upper.clone();
                lp.extend(upper[1..upper.len() - 1].iter().rev().map(|p| mirror(*p)));
                vec![
                    Segment {
                        tag: SegmentTag::CurveT,
                        closed: true,
                        branches: vec![lp],
                    },
                    point(x1),
                    point(x2),
                ]
            }
            RegimeCase::OneCusp => {
                let c1 = cusp_angle(ci.sigma2);
                let junction = [reg.lambda1, reg.nu1.expect("junction height")];
                let upper = self.curve_branch(
                    x1,
                    junction,
                    &[
                        (Chart::FromLeft, FRAC_PI_2 + c1, FRAC_PI_2),
                        (Chart::Vertical, -r, reg.lambda1),
                    ],
                );
                // C1 -> x1 -> mirrored C1
                let mut t: Vec<Point2> = upper.iter().rev().copied().collect();
                t.extend(upper[1..].iter().map(|p| mirror(*p)));
                let th = junction[1].atan2(junction[0] + r);
                let mut arc = self.arc(x1, self.rad1, -th, 0.0);
                arc.extend(self.arc(x1, self.rad1, 0.0, th).into_iter().skip(1));
                pin_ends(&mut arc, mirror(junction), junction);
                vec![
                    Segment {
                        tag: SegmentTag::Arc1,
                        closed: false,
                        branches: vec![arc],
                    },
                    Segment {
                        tag: SegmentTag::CurveT,
                        closed: false,
                        branches: vec![t],
                    },
                    point(x1),
                ]
            }
            RegimeCase::ThreeArcs => {
                let j1 = [reg.lambda1, reg.nu1.expect("junction height")];
                let j2 = [reg.lambda2, reg.nu2.expect("junction height")];
                let upper = self.curve_branch(j2, j1, &[(Chart::Vertical, reg.lambda2, reg.lambda1)]);
                let lower: Vec<Point2> = upper.iter().map(|p| mirror(*p)).collect();

                let th1 = j1[1].atan2(j1[0] + r);
                let mut arc1 = self.arc(x1, self.rad1, -th1, 0.0);
                arc1.extend(self.arc(x1, self.rad1, 0.0, th1).into_iter().skip(1));
                pin_ends(&mut arc1, mirror(j1), j1);

                let th2 = j2[1].atan2(j2[0] - r);
                let mut arc2 = self.arc(x2, self.rad2, th2, PI);
                arc2.extend(self.arc(x2, self.rad2, PI, 2.0 * PI - th2).into_iter().skip(1));
                pin_ends(&mut arc2, j2, mirror(j2));

                vec![
                    Segment {
                        tag: SegmentTag::Arc1,
                        closed: false,
                        branches: vec![arc1],
                    },
                    Segment {
                        tag: SegmentTag::Arc2,
                        closed: false,
                        branches: vec![arc2],
                    },
                    Segment {
                        tag: SegmentTag::CurveT,
                        closed: false,
                        branches: vec![upper, lower],
                    },
                ]
            }
        })
    }
}

fn mirror(p: Point2) -> Point2 {
    [p[0], -p[1]]
}

fn pin_ends(v: &mut [Point2], first: Point2, last: Point2) {
    let n = v.len();
    v[0] = first;
    v[n - 1] = last;
}

/// `n` points evenly spaced by arclength along a polyline.
fn resample(poly: &[Point2], n: usize) -> Vec<Point2> {
    let mut cum = Vec::with_capacity(poly.len());
    cum.push(0.0);
    for w in poly.windows(2) {
        let l = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        cum.push(cum.last().unwrap() + l);
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let s = total * k as f64 / (n - 1) as f64;
        while j + 2 < cum.len() && cum[j + 1] < s {
            j += 1;
        }
        let seg = cum[j + 1] - cum[j];
        let f = if seg > 0.0 {
            ((s - cum[j]) / seg).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push([
            poly[j][0] + f * (poly[j + 1][0] - poly[j][0]),
            poly[j][1] + f * (poly[j + 1][1] - poly[j][1]),
        ]);
    }
    out
}
