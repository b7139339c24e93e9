//! Closed polylines on the surface and their signed crossings with other curves.

use serde::Serialize;

use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, SurfacePoint, Vec3};

/// Default minimum crossing angle, in degrees.
pub const DEFAULT_MARGIN_DEG: f64 = 5.0;

/// A transverse crossing of two polylines `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub point: [f64; 3],
    /// Segment of `a` and position along it in `[0, 1)`.
    pub a_segment: usize,
    pub a_param: f64,
    pub b_segment: usize,
    pub b_param: f64,
    /// Sign of `det[a', b', n]`.
    pub sign: i64,
    pub angle_deg: f64,
}

impl Crossing {
    /// Position along `a` as a single number.
    pub fn a_position(&self) -> f64 {
        self.a_segment as f64 + self.a_param
    }
}

struct Segment {
    p: Vec3,
    q: Vec3,
    d: Vec3,
    lo: Vec3,
    hi: Vec3,
    /// Surface normal at the midpoint.
    n: Vec3,
}

fn segments(points: &[Vec3], surface: &ImplicitSurface) -> Result<Vec<Segment>> {
    points
        .windows(2)
        .map(|w| {
            let n = surface.unit_normal(&((w[0] + w[1]) * 0.5))?;
            Ok(Segment { p: w[0], q: w[1], d: w[1] - w[0], lo: w[0].inf(&w[1]), hi: w[0].sup(&w[1]), n })
        })
        .collect()
}

fn boxes_overlap(a: &Segment, b: &Segment, pad: f64) -> bool {
    (0..3).all(|i| a.lo[i] <= b.hi[i] + pad && b.lo[i] <= a.hi[i] + pad)
}

fn cross2(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// Side of `q` relative to the line of `s`, seen from the normal of `s`.
fn left_of(s: &Segment, q: &Vec3) -> bool {
    s.d.cross(&(q - s.p)).dot(&s.n) >= 0.0
}

/// All crossings of the polylines `a` and `b`, ordered along `a`.
///
/// The vertices of one segment are classified against the line of the other
/// in that segment's own tangent plane, so a vertex shared by two segments
/// gets the same side in both tests and a crossing through it counts once.
pub fn polyline_crossings(a: &[Vec3], b: &[Vec3], surface: &ImplicitSurface) -> Result<Vec<Crossing>> {
    let sa = segments(a, surface)?;
    let sb = segments(b, surface)?;
    let mut out = Vec::new();
    for (i, u) in sa.iter().enumerate() {
        for (j, v) in sb.iter().enumerate() {
            let pad = 1e-12 * (1.0 + u.hi.amax());
            if !boxes_overlap(u, v, pad) {
                continue;
            }
            if left_of(v, &u.p) == left_of(v, &u.q) || left_of(u, &v.p) == left_of(u, &v.q) {
                continue;
            }
            let n = (u.n + v.n).normalize();
            let (e1, e2) = SurfacePoint { coords: u.p, normal: n }.orientation_frame();
            let flat = |w: &Vec3| (w.dot(&e1), w.dot(&e2));
            let (du, dv, w) = (flat(&u.d), flat(&v.d), flat(&(v.p - u.p)));
            let den = cross2(du, dv);
            let scale = u.d.norm() * v.d.norm();
            if den == 0.0 || scale == 0.0 {
                continue;
            }
            let s = (cross2(w, dv) / den).clamp(0.0, 1.0);
            let t = (cross2(w, du) / den).clamp(0.0, 1.0);
            let pa = u.p + u.d * s;
            let pb = v.p + v.d * t;
            // Guard against segments on different sheets that overlap in projection.
            if (pa - pb).norm() > 0.25 * (u.d.norm() + v.d.norm()) {
                continue;
            }
            let angle = (den.abs() / scale).clamp(0.0, 1.0).asin().to_degrees();
            let q = (pa + pb) * 0.5;
            out.push(Crossing {
                point: [q.x, q.y, q.z],
                a_segment: i,
                a_param: s,
                b_segment: j,
                b_param: t,
                sign: den.signum() as i64,
                angle_deg: angle,
            });
        }
    }
    out.sort_by(|x, y| x.a_position().total_cmp(&y.a_position()));
    Ok(out)
}

/// First crossing whose angle is below `margin_deg`, as an error.
pub fn check_transverse(crossings: &[Crossing], margin_deg: f64) -> Result<()> {
    match crossings.iter().find(|c| c.angle_deg < margin_deg) {
        Some(c) => Err(Error::NonTransverse { at: c.point, angle_deg: c.angle_deg }),
        None => Ok(()),
    }
}

/// Distance from `q` to the segment `[a, b]`.
pub fn point_segment_distance(q: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 { ((q - a).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (a + d * t - q).norm()
}

/// A closed oriented polyline on the surface standing in for a singular 1-cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoCycleCurve {
    /// First and last points coincide.
    pub points: Vec<Vec3>,
    /// Smallest crossing angle accepted, in degrees.
    pub margin_deg: f64,
}

impl PseudoCycleCurve {
    /// Project `points` onto the surface, close the polyline and subdivide
    /// segments longer than `max_len`.
    pub fn from_points(surface: &ImplicitSurface, points: &[Vec3], max_len: f64) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Invalid("a closed curve needs at least three points".into()));
        }
        let mut pts: Vec<Vec3> = points.iter().map(|p| surface.project(p).map(|s| s.coords)).collect::<Result<_>>()?;
        if (pts[0] - pts[pts.len() - 1]).norm() > 0.0 {
            pts.push(pts[0]);
        }
        let mut out = vec![pts[0]];
        for w in pts.windows(2) {
            let pieces = ((w[1] - w[0]).norm() / max_len).ceil().max(1.0) as usize;
            for k in 1..pieces {
                let t = k as f64 / pieces as f64;
                out.push(surface.project(&(w[0] + (w[1] - w[0]) * t))?.coords);
            }
            out.push(w[1]);
        }
        Ok(PseudoCycleCurve { points: out, margin_deg: DEFAULT_MARGIN_DEG })
    }

    /// Closed curve from a parameterization sampled at `n` points of `[0, 2 pi)`.
    pub fn parametric(surface: &ImplicitSurface, n: usize, max_len: f64, g: impl Fn(f64) -> Vec3) -> Result<Self> {
        let pts: Vec<Vec3> = (0..n).map(|k| g(std::f64::consts::TAU * k as f64 / n as f64)).collect();
        Self::from_points(surface, &pts, max_len)
    }

    /// Circle of ambient radius `radius` about `center` in its tangent plane,
    /// counterclockwise for the surface orientation.
    pub fn small_circle(surface: &ImplicitSurface, center: &Vec3, radius: f64, n: usize) -> Result<Self> {
        let c = surface.project(center)?;
        let (e1, e2) = c.orientation_frame();
        Self::parametric(surface, n, f64::INFINITY, |t| c.coords + (e1 * t.cos() + e2 * t.sin()) * radius)
    }

    /// Tube circle of the catalog vertical torus at longitude `phi`.
    pub fn torus_meridian(surface: &ImplicitSurface, phi: f64, n: usize) -> Result<Self> {
        Self::parametric(surface, n, f64::INFINITY, |t| {
            Vec3::new((2.0 + t.cos()) * phi.cos(), t.sin(), (2.0 + t.cos()) * phi.sin())
        })
    }

    /// Circle around the axis of the catalog vertical torus at tube angle `theta`.
    pub fn torus_longitude(surface: &ImplicitSurface, theta: f64, n: usize) -> Result<Self> {
        Self::parametric(surface, n, f64::INFINITY, |t| {
            Vec3::new((2.0 + theta.cos()) * t.cos(), theta.sin(), (2.0 + theta.cos()) * t.sin())
        })
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        PseudoCycleCurve { points, margin_deg: self.margin_deg }
    }

    /// Insert the projected midpoint of every segment.
    pub fn refined(&self, surface: &ImplicitSurface) -> Result<Self> {
        let mut points = vec![self.points[0]];
        for w in self.points.windows(2) {
            points.push(surface.project(&((w[0] + w[1]) * 0.5))?.coords);
            points.push(w[1]);
        }
        Ok(PseudoCycleCurve { points, margin_deg: self.margin_deg })
    }

    /// Same closed curve started at vertex `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.points.len() - 1;
        let mut points: Vec<Vec3> = (0..=n).map(|i| self.points[(i + k) % n]).collect();
        points[n] = points[0];
        PseudoCycleCurve { points, margin_deg: self.margin_deg }
    }

    /// Move each vertex by `displacement(vertex)` and reproject.
    pub fn moved(&self, surface: &ImplicitSurface, displacement: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        let n = self.points.len() - 1;
        let mut points: Vec<Vec3> =
            self.points[..n].iter().map(|p| surface.project(&(p + displacement(p))).map(|s| s.coords)).collect::<Result<_>>()?;
        points.push(points[0]);
        Ok(PseudoCycleCurve { points, margin_deg: self.margin_deg })
    }

    pub fn is_closed(&self) -> bool {
        self.points.len() >= 4 && self.points[0] == self.points[self.points.len() - 1]
    }

    pub fn max_segment(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max)
    }

    /// Fails with [`Error::ClearanceViolation`] if the curve passes within
    /// `clearance` of a critical point.
    pub fn check_clearance(&self, crit: &[CriticalPoint], clearance: f64) -> Result<()> {
        for c in crit {
            let d = self
                .points
                .windows(2)
                .map(|w| point_segment_distance(&c.coords(), &w[0], &w[1]))
                .fold(f64::INFINITY, f64::min);
            if d < clearance {
                return Err(Error::ClearanceViolation { id: c.id, distance: d });
            }
        }
        Ok(())
    }
}
