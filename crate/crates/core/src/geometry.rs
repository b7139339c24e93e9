//! Compact regular level sets `{phi = 0}` in 3-space with the induced metric.
//!
//! Points are stored in ambient coordinates together with the unit normal
//! `grad phi / |grad phi|`, which fixes the orientation of the surface: a
//! tangent pair `(a, b)` is positively oriented when `det[a b n] > 0`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalarfield::Expression;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurfaceTolerances {
    /// Maximum `|phi|` for a point to count as on the surface.
    pub on_surface: f64,
    /// Minimum `|grad phi|` accepted on the surface.
    pub regularity: f64,
    pub newton_max_iter: usize,
}

impl Default for SurfaceTolerances {
    fn default() -> Self {
        SurfaceTolerances { on_surface: 1e-10, regularity: 1e-6, newton_max_iter: 50 }
    }
}

/// Axis-aligned box `[lo, hi]` per coordinate.
pub type BoundingBox = [[f64; 2]; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitSurface {
    pub constraint: Expression,
    pub bounding_box: BoundingBox,
    pub expected_euler: i64,
    pub tol: SurfaceTolerances,
}

/// A point on the surface with its cached unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub coords: Vec3,
    pub normal: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: SurfacePoint,
    pub vec: Vec3,
}

impl ImplicitSurface {
    pub fn new(constraint: Expression, bounding_box: BoundingBox, expected_euler: i64) -> Self {
        ImplicitSurface { constraint, bounding_box, expected_euler, tol: SurfaceTolerances::default() }
    }

    /// Length of the bounding box diagonal; all length tolerances scale with it.
    pub fn diameter(&self) -> f64 {
        self.bounding_box.iter().map(|[lo, hi]| (hi - lo).powi(2)).sum::<f64>().sqrt()
    }

    pub fn contains(&self, q: &Vec3) -> bool {
        (0..3).all(|i| q[i] >= self.bounding_box[i][0] && q[i] <= self.bounding_box[i][1])
    }

    pub fn phi(&self, q: &Vec3) -> Result<f64> {
        self.constraint.eval_f64([q.x, q.y, q.z])
    }

    /// Unit normal at an ambient point (which need not be on the surface).
    pub fn unit_normal(&self, q: &Vec3) -> Result<Vec3> {
        let g = self.constraint.jet1([q.x, q.y, q.z])?.gradient;
        let norm = g.norm();
        if norm < self.tol.regularity {
            return Err(Error::Degenerate { norm, at: [q.x, q.y, q.z] });
        }
        Ok(g / norm)
    }

    /// Newton iteration along `grad phi` onto the level set.
    pub fn project(&self, q: &Vec3) -> Result<SurfacePoint> {
        if !self.contains(q) {
            return Err(Error::OutsideBox { at: [q.x, q.y, q.z] });
        }
        let mut p = *q;
        let mut residual = f64::INFINITY;
        for _ in 0..=self.tol.newton_max_iter {
            let j = self.constraint.jet1([p.x, p.y, p.z])?;
            residual = j.value.abs();
            let g2 = j.gradient.norm_squared();
            if g2.sqrt() < self.tol.regularity {
                return Err(Error::Degenerate { norm: g2.sqrt(), at: [p.x, p.y, p.z] });
            }
            if residual <= self.tol.on_surface {
                if !self.contains(&p) {
                    return Err(Error::OutsideBox { at: [p.x, p.y, p.z] });
                }
                return Ok(SurfacePoint { coords: p, normal: j.gradient / g2.sqrt() });
            }
            p -= j.gradient * (j.value / g2);
        }
        Err(Error::NoConvergence { residual, iterations: self.tol.newton_max_iter })
    }
}

impl SurfacePoint {
    pub fn tangent_project(&self, v: &Vec3) -> TangentVector {
        TangentVector { base: *self, vec: project_out(v, &self.normal) }
    }

    /// Right-handed orthonormal tangent basis `(e1, e2)` with `e1 x e2 = n`.
    ///
    /// `e1` is the projection of the first coordinate axis whose component along
    /// the normal is at most 0.9 in magnitude.
    pub fn orientation_frame(&self) -> (Vec3, Vec3) {
        let n = self.normal;
        let axis = (0..3).find(|&i| n[i].abs() <= 0.9).unwrap_or(0);
        let e1 = project_out(&Vec3::ith(axis, 1.0), &n).normalize();
        let e2 = n.cross(&e1);
        (e1, e2)
    }

    /// Signed area form of the oriented surface: `det[a b n]`.
    pub fn area_form(&self, a: &Vec3, b: &Vec3) -> f64 {
        a.cross(b).dot(&self.normal)
    }

    pub fn coords_array(&self) -> [f64; 3] {
        [self.coords.x, self.coords.y, self.coords.z]
    }
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }
}

pub(crate) fn project_out(v: &Vec3, n: &Vec3) -> Vec3 {
    v - n * v.dot(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Surface;
    use approx::assert_relative_eq;

    fn sphere() -> ImplicitSurface {
        Surface::Sphere.build()
    }

    #[test]
    fn radial_projection_on_sphere() {
        let s = sphere();
        let p = s.project(&Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(p.coords, Vec3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
        let p = s.project(&Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p.coords, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(p.normal, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn torus_projection_matches_radial_newton() {
        // 1-D oracle: g(r) = (r - 2)^2 - 1 on the slice y = z = 0.
        let mut r: f64 = 3.5;
        for _ in 0..60 {
            let g = (r - 2.0).powi(2) - 1.0;
            let dg = 2.0 * (r - 2.0);
            r -= g / dg;
        }
        assert_relative_eq!(r, 3.0, epsilon = 1e-15);
        let t = Surface::VerticalTorus.build();
        let p = t.project(&Vec3::new(3.5, 0.0, 0.0)).unwrap();
        assert_relative_eq!(p.coords, Vec3::new(r, 0.0, 0.0), epsilon = 1e-10);
    }

    #[test]
    fn projection_errors() {
        let s = sphere();
        assert!(matches!(s.project(&Vec3::new(5.0, 0.0, 0.0)), Err(Error::OutsideBox { .. })));
        assert!(matches!(s.project(&Vec3::zeros()), Err(Error::Degenerate { .. })));
        let mut tight = sphere();
        tight.tol.newton_max_iter = 1;
        assert!(matches!(
            tight.project(&Vec3::new(1.9, 0.3, 0.2)),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn projection_is_idempotent() {
        let s = Surface::Dumbbell.build();
        for q in [Vec3::new(0.3, 0.5, 0.2), Vec3::new(-0.8, -0.1, 0.4), Vec3::new(0.0, 0.0, -0.9)] {
            let p = s.project(&q).unwrap();
            let pp = s.project(&p.coords).unwrap();
            assert!((p.coords - pp.coords).norm() <= 1e-10);
            assert!(s.phi(&pp.coords).unwrap().abs() <= 1e-10);
            assert!((p.normal.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn tangent_projection() {
        let s = sphere();
        let north = s.project(&Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(north.tangent_project(&Vec3::new(1.0, 0.0, 3.0)).vec, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(north.tangent_project(&north.normal).vec, Vec3::zeros());
        let east = s.project(&Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(east.tangent_project(&Vec3::new(0.0, 0.0, 1.0)).vec, Vec3::new(0.0, 0.0, 1.0));
        // idempotent and linear
        let v = Vec3::new(0.3, -2.0, 0.7);
        let w = Vec3::new(-1.1, 0.4, 2.5);
        let p = s.project(&Vec3::new(0.4, 0.5, 0.6)).unwrap();
        let pv = p.tangent_project(&v).vec;
        assert_relative_eq!(p.tangent_project(&pv).vec, pv, epsilon = 1e-15);
        let lin = p.tangent_project(&(v * 2.0 + w)).vec;
        assert_relative_eq!(lin, pv * 2.0 + p.tangent_project(&w).vec, epsilon = 1e-14);
        assert!(pv.dot(&p.normal).abs() <= 1e-9 * pv.norm());
    }

    #[test]
    fn frames_are_right_handed() {
        let s = sphere();
        let north = s.project(&Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let (e1, e2) = north.orientation_frame();
        assert_eq!(e1, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(e2, Vec3::new(0.0, 1.0, 0.0));
        for surface in [Surface::Sphere, Surface::VerticalTorus, Surface::Dumbbell] {
            let s = surface.build();
            let [[x0, x1], [y0, y1], [z0, z1]] = s.bounding_box;
            for i in 0..7 {
                for j in 0..7 {
                    for k in 0..7 {
                        let q = Vec3::new(
                            x0 + (x1 - x0) * (i as f64 + 0.5) / 7.0,
                            y0 + (y1 - y0) * (j as f64 + 0.5) / 7.0,
                            z0 + (z1 - z0) * (k as f64 + 0.5) / 7.0,
                        );
                        let Ok(p) = s.project(&q) else { continue };
                        let (e1, e2) = p.orientation_frame();
                        let det = e1.cross(&e2).dot(&p.normal);
                        assert!((det - 1.0).abs() < 1e-12);
                        assert!(e1.dot(&e2).abs() < 1e-14);
                    }
                }
            }
        }
    }
}
