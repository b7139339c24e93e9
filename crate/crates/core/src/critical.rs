//! Critical points of `f` restricted to a surface.
//!
//! Seeds come from a grid on the bounding box projected onto the surface; each
//! seed runs a tangent-space Newton iteration on the restricted gradient using
//! the Lagrange Hessian as model. Converged points are deduplicated, classified
//! by the signs of the restricted Hessian and numbered by ascending `f`.

use std::cmp::Ordering;

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, SurfacePoint, Vec3};
use crate::scalarfield::{lagrange_hessian, restricted_gradient, Expression, DEFAULT_CRIT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    /// Seeds per bounding box axis.
    pub grid_density: usize,
    /// Bound on the restricted gradient norm at a critical point.
    pub newton_tol: f64,
    /// Points closer than this are merged; `None` means `1e-4 * diameter`.
    pub dedupe_radius: Option<f64>,
    pub max_newton_iter: usize,
    /// Relative nondegeneracy threshold against the largest eigenvalue magnitude.
    pub nondeg_rel: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            grid_density: 12,
            newton_tol: DEFAULT_CRIT_TOL,
            dedupe_radius: None,
            max_newton_iter: 60,
            nondeg_rel: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub id: usize,
    pub location: SurfacePoint,
    pub f_value: f64,
    /// Morse index: number of negative eigenvalues.
    pub index: usize,
    /// Eigenvalues of the restricted Hessian, ascending.
    pub eigenvalues: [f64; 2],
    /// Eigenvectors of the negative eigenvalues, ascending.
    pub unstable_frame: Vec<Vec3>,
    pub stable_frame: Vec<Vec3>,
}

impl CriticalPoint {
    /// Unstable direction of a saddle.
    pub fn unstable_direction(&self) -> Vec3 {
        self.unstable_frame[0]
    }

    /// Stable direction of a saddle, chosen so that `det[u s n] = +1`.
    pub fn stable_direction(&self) -> Vec3 {
        self.stable_frame[0]
    }

    /// +1 if the unstable frame orients `W^u(x)` like the surface (index 2 only),
    /// otherwise +1 by convention.
    pub fn unstable_orientation(&self) -> i64 {
        if self.index == 2 {
            let d = self.location.area_form(&self.unstable_frame[0], &self.unstable_frame[1]);
            if d > 0.0 {
                1
            } else {
                -1
            }
        } else {
            1
        }
    }

    pub fn coords(&self) -> Vec3 {
        self.location.coords
    }
}

/// Ascending eigenvalues and unit eigenvectors of a symmetric 2x2 matrix.
pub(crate) fn sym2_eigen(m: &Matrix2<f64>) -> ([f64; 2], [Vector2<f64>; 2]) {
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let mean = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let lo = mean - r;
    let hi = mean + r;
    let v_lo = if b.abs() > 1e-300 {
        let p = Vector2::new(b, lo - a);
        let q = Vector2::new(lo - c, b);
        if p.norm() >= q.norm() {
            p.normalize()
        } else {
            q.normalize()
        }
    } else if a <= c {
        Vector2::new(1.0, 0.0)
    } else {
        Vector2::new(0.0, 1.0)
    };
    let v_hi = Vector2::new(-v_lo.y, v_lo.x);
    ([lo, hi], [v_lo, v_hi])
}

/// Flip `v` so that its largest-magnitude component is positive.
fn canonical_sign(v: Vec3) -> Vec3 {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}

fn newton_from(
    f: &Expression,
    surface: &ImplicitSurface,
    seed: SurfacePoint,
    params: &SearchParams,
) -> Option<SurfacePoint> {
    let max_step = 0.05 * surface.diameter();
    let mut p = seed;
    let mut converged = false;
    let mut best = f64::INFINITY;
    let mut polish = 0;
    for _ in 0..params.max_newton_iter {
        let (h, g) = lagrange_hessian(f, surface, &p).ok()?;
        let gn = g.norm();
        if converged {
            // Keep iterating while the residual still drops noticeably.
            if gn >= 0.5 * best || polish >= 4 {
                break;
            }
            polish += 1;
        } else if gn <= params.newton_tol {
            converged = true;
        }
        best = best.min(gn);
        let (vals, vecs) = sym2_eigen(&h);
        let scale = vals[0].abs().max(vals[1].abs());
        let mut xi = Vector2::zeros();
        for k in 0..2 {
            if vals[k].abs() > 1e-12 * scale {
                xi -= vecs[k] * (vecs[k].dot(&g) / vals[k]);
            }
        }
        let (e1, e2) = p.orientation_frame();
        let mut step = e1 * xi.x + e2 * xi.y;
        let len = step.norm();
        if len > max_step {
            step *= max_step / len;
        }
        if len == 0.0 {
            break;
        }
        p = surface.project(&(p.coords + step)).ok()?;
    }
    let gn = restricted_gradient(f, &p).ok()?.norm();
    (gn <= params.newton_tol).then_some(p)
}

fn seeds(surface: &ImplicitSurface, density: usize) -> Vec<Vec3> {
    let b = surface.bounding_box;
    let n = density.max(1);
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let t = |lo: f64, hi: f64, m: usize| lo + (hi - lo) * (m as f64 + 0.5) / n as f64;
                out.push(Vec3::new(t(b[0][0], b[0][1], i), t(b[1][0], b[1][1], j), t(b[2][0], b[2][1], k)));
            }
        }
    }
    out
}

fn lex_cmp(a: &Vec3, b: &Vec3) -> Ordering {
    for i in 0..3 {
        match a[i].total_cmp(&b[i]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Restricted gradient zeros, deduplicated, without classification.
pub fn locate_zeros(f: &Expression, surface: &ImplicitSurface, params: &SearchParams) -> Vec<SurfacePoint> {
    let radius = params.dedupe_radius.unwrap_or(1e-4 * surface.diameter());
    let found: Vec<Option<SurfacePoint>> = seeds(surface, params.grid_density)
        .par_iter()
        .map(|q| {
            let seed = surface.project(q).ok()?;
            newton_from(f, surface, seed, params)
        })
        .collect();
    let mut unique: Vec<SurfacePoint> = Vec::new();
    for p in found.into_iter().flatten() {
        if unique.iter().all(|u| (u.coords - p.coords).norm() >= radius) {
            unique.push(p);
        }
    }
    unique
}

/// Classify a critical point; `nondeg` is the absolute eigenvalue threshold.
fn classify(
    f: &Expression,
    surface: &ImplicitSurface,
    p: SurfacePoint,
) -> Result<(f64, [f64; 2], [Vec3; 2])> {
    let (h, _) = lagrange_hessian(f, surface, &p)?;
    let (vals, vecs) = sym2_eigen(&h);
    let (e1, e2) = p.orientation_frame();
    let amb = |v: Vector2<f64>| canonical_sign(e1 * v.x + e2 * v.y);
    let f_value = f.eval_f64(p.coords_array())?;
    Ok((f_value, vals, [amb(vecs[0]), amb(vecs[1])]))
}

/// All critical points of `f` on `surface`, numbered by ascending `f`.
///
/// Fails with [`Error::DegenerateCritical`] if some Hessian eigenvalue is small
/// relative to the largest one found, and with [`Error::EulerMismatch`] if the
/// alternating count of indices disagrees with the declared Euler
/// characteristic.
pub fn find_critical_points(
    f: &Expression,
    surface: &ImplicitSurface,
    params: &SearchParams,
) -> Result<Vec<CriticalPoint>> {
    let zeros = locate_zeros(f, surface, params);
    let mut classified = Vec::with_capacity(zeros.len());
    for p in zeros {
        let (fv, vals, vecs) = classify(f, surface, p)?;
        classified.push((p, fv, vals, vecs));
    }
    let scale = classified
        .iter()
        .flat_map(|c| c.2)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let nondeg = params.nondeg_rel * scale;
    for (p, _, vals, _) in &classified {
        for v in vals {
            if v.abs() < nondeg || *v == 0.0 {
                return Err(Error::DegenerateCritical { at: p.coords_array(), eigenvalue: *v });
            }
        }
    }
    classified.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&a.0.coords, &b.0.coords)));
    let points: Vec<CriticalPoint> = classified
        .into_iter()
        .enumerate()
        .map(|(id, (p, f_value, eigenvalues, vecs))| {
            let index = eigenvalues.iter().filter(|v| **v < 0.0).count();
            let (unstable_frame, stable_frame) = match index {
                0 => (vec![], vec![vecs[0], vecs[1]]),
                1 => {
                    let u = vecs[0];
                    let mut s = vecs[1];
                    if p.area_form(&u, &s) < 0.0 {
                        s = -s;
                    }
                    (vec![u], vec![s])
                }
                _ => (vec![vecs[0], vecs[1]], vec![]),
            };
            CriticalPoint { id, location: p, f_value, index, eigenvalues, unstable_frame, stable_frame }
        })
        .collect();
    let report = euler_check(&points, surface);
    if !report.pass {
        return Err(Error::EulerMismatch { found: report.signed_count, expected: report.expected });
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub signed_count: i64,
    pub expected: i64,
    pub pass: bool,
}

/// Alternating count `sum (-1)^index` against the declared Euler characteristic.
pub fn euler_check(points: &[CriticalPoint], surface: &ImplicitSurface) -> EulerReport {
    let signed_count = points.iter().map(|c| if c.index % 2 == 0 { 1 } else { -1 }).sum();
    EulerReport { signed_count, expected: surface.expected_euler, pass: signed_count == surface.expected_euler }
}

/// Ids of the points of a given index, ascending.
pub fn ids_of_index(points: &[CriticalPoint], index: usize) -> Vec<usize> {
    points.iter().filter(|c| c.index == index).map(|c| c.id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{tilted_height, Surface};
    use approx::assert_relative_eq;

    fn indices(points: &[CriticalPoint]) -> Vec<usize> {
        let mut v: Vec<usize> = points.iter().map(|c| c.index).collect();
        v.sort();
        v
    }

    #[test]
    fn sphere_poles() {
        let s = Surface::Sphere.build();
        let f = Expression::parse("z").unwrap();
        let pts = find_critical_points(&f, &s, &SearchParams::default()).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].index, 0);
        assert_relative_eq!(pts[0].coords(), -Vec3::z(), epsilon = 1e-12);
        assert_eq!(pts[1].index, 2);
        assert_relative_eq!(pts[1].coords(), Vec3::z(), epsilon = 1e-12);
        assert_eq!(pts[1].eigenvalues, [-1.0, -1.0]);
        assert_eq!(euler_check(&pts, &s), EulerReport { signed_count: 2, expected: 2, pass: true });
    }

    /// Newton on the torus parameterization
    /// `(x, y, z) = ((2 + cos t) cos p, sin t, (2 + cos t) sin p)`.
    fn torus_oracle(a: f64, b: f64) -> Vec<Vec3> {
        let g = |p: f64, t: f64| {
            // f = z + a x + b y
            let r = 2.0 + t.cos();
            let fp = r * p.cos() - a * r * p.sin();
            let ft = -t.sin() * p.sin() - a * t.sin() * p.cos() + b * t.cos();
            Vector2::new(fp, ft)
        };
        let mut roots: Vec<Vec3> = Vec::new();
        for i in 0..16 {
            for j in 0..16 {
                let mut x = Vector2::new(i as f64 * 0.4, j as f64 * 0.4);
                for _ in 0..100 {
                    let h = 1e-7;
                    let g0 = g(x.x, x.y);
                    let jp = (g(x.x + h, x.y) - g(x.x - h, x.y)) / (2.0 * h);
                    let jt = (g(x.x, x.y + h) - g(x.x, x.y - h)) / (2.0 * h);
                    let jac = Matrix2::from_columns(&[jp, jt]);
                    let Some(inv) = jac.try_inverse() else { break };
                    x -= inv * g0;
                }
                if g(x.x, x.y).norm() < 1e-12 {
                    let r = 2.0 + x.y.cos();
                    let q = Vec3::new(r * x.x.cos(), x.y.sin(), r * x.x.sin());
                    if roots.iter().all(|o| (o - q).norm() > 1e-6) {
                        roots.push(q);
                    }
                }
            }
        }
        roots
    }

    #[test]
    fn tilted_torus_matches_parameterization_oracle() {
        let s = Surface::VerticalTorus.build();
        let f = Surface::VerticalTorus.default_function(0.1);
        let pts = find_critical_points(&f, &s, &SearchParams::default()).unwrap();
        assert_eq!(indices(&pts), vec![0, 1, 1, 2]);
        let c = 0.1 * std::f64::consts::FRAC_1_SQRT_2;
        let oracle = torus_oracle(c, c);
        assert_eq!(oracle.len(), 4);
        for q in oracle {
            assert!(pts.iter().any(|p| (p.coords() - q).norm() < 1e-9), "missing {q}");
        }
        let top = pts.iter().find(|p| p.index == 2).unwrap();
        assert!(top.eigenvalues[1] < 0.0);
    }

    #[test]
    fn torus_with_x_tilt_has_four_points() {
        let s = Surface::VerticalTorus.build();
        let f = tilted_height(0.1, 0.0);
        let pts = find_critical_points(&f, &s, &SearchParams::default()).unwrap();
        assert_eq!(indices(&pts), vec![0, 1, 1, 2]);
    }

    #[test]
    fn dumbbell_matches_profile_oracle() {
        // Critical points of z + 0.1 x lie on y = 0. With z = ±sqrt(s(x)),
        // dz/dx = ±s'(x) / (2 sqrt(s)) = -0.1 gives the locations; solve by bisection.
        let s = |x: f64| (1.0 - x * x) * (x * x + 0.5);
        let ds = |x: f64| -2.0 * x * (x * x + 0.5) + (1.0 - x * x) * 2.0 * x;
        let mut oracle = Vec::new();
        for sign in [1.0, -1.0] {
            let h = |x: f64| sign * ds(x) / (2.0 * s(x).sqrt()) + 0.1;
            let grid: Vec<f64> = (0..=1000).map(|i| -0.999 + 1.998 * i as f64 / 1000.0).collect();
            for w in grid.windows(2) {
                let (mut lo, mut hi) = (w[0], w[1]);
                if h(lo).signum() == h(hi).signum() {
                    continue;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid).signum() == h(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                oracle.push(Vec3::new(lo, 0.0, sign * s(lo).sqrt()));
            }
        }
        assert_eq!(oracle.len(), 6);
        let surface = Surface::Dumbbell.build();
        let f = Surface::Dumbbell.default_function(0.1);
        let pts = find_critical_points(&f, &surface, &SearchParams::default()).unwrap();
        assert_eq!(indices(&pts), vec![0, 0, 1, 1, 2, 2]);
        for q in oracle {
            assert!(pts.iter().any(|p| (p.coords() - q).norm() < 1e-9), "missing {q}");
        }
        assert_eq!(euler_check(&pts, &surface).signed_count, 2);
    }

    #[test]
    fn flat_torus_is_degenerate() {
        let s = Surface::FlatTorus.build();
        let f = Expression::parse("z").unwrap();
        assert!(matches!(
            find_critical_points(&f, &s, &SearchParams::default()),
            Err(Error::DegenerateCritical { .. })
        ));
    }

    #[test]
    fn missing_points_are_reported() {
        let mut s = Surface::Sphere.build();
        s.expected_euler = 0;
        let f = Expression::parse("z").unwrap();
        assert_eq!(
            find_critical_points(&f, &s, &SearchParams::default()),
            Err(Error::EulerMismatch { found: 2, expected: 0 })
        );
    }

    #[test]
    fn denser_grid_finds_same_points() {
        let s = Surface::Dumbbell.build();
        let f = Surface::Dumbbell.default_function(0.1);
        let a = find_critical_points(&f, &s, &SearchParams::default()).unwrap();
        let params = SearchParams { grid_density: 24, ..SearchParams::default() };
        let b = find_critical_points(&f, &s, &params).unwrap();
        assert_eq!(a.len(), b.len());
        let r = 1e-4 * s.diameter();
        for (p, q) in a.iter().zip(&b) {
            assert!((p.coords() - q.coords()).norm() < r);
            assert_eq!(p.index, q.index);
        }
    }

    #[test]
    fn index_transforms() {
        let s = Surface::VerticalTorus.build();
        let f = Surface::VerticalTorus.default_function(0.1);
        let base = find_critical_points(&f, &s, &SearchParams::default()).unwrap();
        let shifted = f.clone().plus(Expression::Const(3.0));
        let doubled = f.clone().scaled(2.0);
        let negated = f.clone().scaled(-1.0);
        for (g, flip) in [(shifted, false), (doubled, false), (negated, true)] {
            let pts = find_critical_points(&g, &s, &SearchParams::default()).unwrap();
            for p in &base {
                let q = pts.iter().find(|q| (q.coords() - p.coords()).norm() < 1e-8).unwrap();
                let expect = if flip { 2 - p.index } else { p.index };
                assert_eq!(q.index, expect);
            }
        }
    }

    #[test]
    fn saddle_frames_are_positive() {
        let s = Surface::Dumbbell.build();
        let f = Surface::Dumbbell.default_function(0.1);
        for c in find_critical_points(&f, &s, &SearchParams::default()).unwrap() {
            if c.index == 1 {
                let u = c.unstable_direction();
                let st = c.stable_direction();
                assert_relative_eq!(c.location.area_form(&u, &st), 1.0, epsilon = 1e-12);
            }
            let frame: Vec<Vec3> = c.unstable_frame.iter().chain(&c.stable_frame).copied().collect();
            assert_eq!(frame.len(), 2);
            assert!(frame[0].dot(&frame[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_2x2() {
        let (v, e) = sym2_eigen(&Matrix2::new(2.0, 1.0, 1.0, 2.0));
        assert_relative_eq!(v[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(v[1], 3.0, epsilon = 1e-14);
        let m = Matrix2::new(2.0, 1.0, 1.0, 2.0);
        assert_relative_eq!(m * e[0], e[0] * v[0], epsilon = 1e-14);
        assert_relative_eq!(m * e[1], e[1] * v[1], epsilon = 1e-14);
        let (v, _) = sym2_eigen(&Matrix2::new(3.0, 0.0, 0.0, -1.0));
        assert_eq!(v, [-1.0, 3.0]);
    }
}
