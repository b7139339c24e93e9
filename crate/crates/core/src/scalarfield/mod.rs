//! Scalar fields given as expressions over ambient coordinates, their jets,
//! and their derivatives restricted to a surface.

mod jet;
mod parse;

use nalgebra::{Matrix2, Vector2};

pub use jet::{Differentiable, Jet1, Jet2};
pub use parse::{Expression, Func};

use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, SurfacePoint, TangentVector};

/// Default bound on `|grad_M f|` for a point to count as critical.
pub const DEFAULT_CRIT_TOL: f64 = 1e-8;

/// Gradient of `f` for the induced metric: the tangential part of `grad f`.
pub fn restricted_gradient(f: &Expression, p: &SurfacePoint) -> Result<TangentVector> {
    let g = f.jet1(p.coords_array())?.gradient;
    Ok(p.tangent_project(&g))
}

/// Hessian of `f|M` at a critical point, in the basis `p.orientation_frame()`.
///
/// Uses the Lagrange form `e_i^T (H_f - lambda H_phi) e_j` with
/// `lambda = <grad f, grad phi> / |grad phi|^2`.
pub fn restricted_hessian(
    f: &Expression,
    surface: &ImplicitSurface,
    p: &SurfacePoint,
    crit_tol: f64,
) -> Result<Matrix2<f64>> {
    let norm = restricted_gradient(f, p)?.norm();
    if norm > crit_tol {
        return Err(Error::NotCritical { norm });
    }
    Ok(lagrange_hessian(f, surface, p)?.0)
}

/// Lagrange Hessian in the orientation frame together with the frame-coordinate
/// gradient. Valid away from critical points as a Newton model.
pub(crate) fn lagrange_hessian(
    f: &Expression,
    surface: &ImplicitSurface,
    p: &SurfacePoint,
) -> Result<(Matrix2<f64>, Vector2<f64>)> {
    let q = p.coords_array();
    let jf = f.jet2(q)?;
    let jp = surface.constraint.jet2(q)?;
    let lambda = jf.gradient.dot(&jp.gradient) / jp.gradient.norm_squared();
    let h = jf.hessian - jp.hessian * lambda;
    let (e1, e2) = p.orientation_frame();
    let frame = [e1, e2];
    let mut m = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = frame[i].dot(&(h * frame[j]));
        }
    }
    let m = (m + m.transpose()) * 0.5;
    let g = Vector2::new(jf.gradient.dot(&e1), jf.gradient.dot(&e2));
    Ok((m, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Surface;
    use crate::geometry::Vec3;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn height_gradient_on_sphere() {
        let s = Surface::Sphere.build();
        let f = Expression::parse("z").unwrap();
        let p = s.project(&Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(restricted_gradient(&f, &p).unwrap().vec, Vec3::z(), epsilon = 1e-15);
        let north = s.project(&Vec3::z()).unwrap();
        assert_eq!(restricted_gradient(&f, &north).unwrap().vec, Vec3::zeros());
        for t in [0.1f64, 0.7, 1.2, -0.4, 2.9] {
            let p = s.project(&Vec3::new(t.cos(), 0.0, t.sin())).unwrap();
            let g = restricted_gradient(&f, &p).unwrap();
            assert_relative_eq!(g.norm(), t.cos().abs(), epsilon = 1e-12);
        }
    }

    #[test]
    fn pole_hessians() {
        let s = Surface::Sphere.build();
        let f = Expression::parse("z").unwrap();
        let north = s.project(&Vec3::z()).unwrap();
        let h = restricted_hessian(&f, &s, &north, DEFAULT_CRIT_TOL).unwrap();
        assert_eq!(h, -Matrix2::identity());
        let south = s.project(&-Vec3::z()).unwrap();
        let h = restricted_hessian(&f, &s, &south, DEFAULT_CRIT_TOL).unwrap();
        assert_eq!(h, Matrix2::identity());
        let east = s.project(&Vec3::x()).unwrap();
        assert!(matches!(
            restricted_hessian(&f, &s, &east, DEFAULT_CRIT_TOL),
            Err(Error::NotCritical { .. })
        ));
    }

    #[test]
    fn hessian_signs_invariant_under_rescaling_phi() {
        let s = Surface::Sphere.build();
        let mut s3 = s.clone();
        s3.constraint = s.constraint.clone().scaled(3.0);
        let f = Expression::parse("z + 0.3*x*y + 0.2*x^2").unwrap();
        let north = s.project(&Vec3::z()).unwrap();
        let a = restricted_hessian(&f, &s, &north, 1.0).unwrap().symmetric_eigenvalues();
        let north3 = s3.project(&Vec3::z()).unwrap();
        let b = restricted_hessian(&f, &s3, &north3, 1.0).unwrap().symmetric_eigenvalues();
        assert_relative_eq!(a, b, epsilon = 1e-13);
    }

    fn arb_expr() -> impl Strategy<Value = Expression> {
        let leaf = prop_oneof![
            (0usize..3).prop_map(Expression::Var),
            (-2.0f64..2.0).prop_map(Expression::Const),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expression::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expression::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expression::Mul(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expression::Neg(Box::new(a))),
                (inner.clone(), 0u32..4).prop_map(|(a, n)| Expression::Pow(Box::new(a), n)),
                inner.clone().prop_map(|a| Expression::Call(Func::Sin, Box::new(a))),
                inner.clone().prop_map(|a| Expression::Call(Func::Cos, Box::new(a))),
                inner.clone().prop_map(|a| Expression::Call(
                    Func::Exp,
                    Box::new(Expression::Call(Func::Sin, Box::new(a)))
                )),
                inner.clone().prop_map(|a| Expression::Call(
                    Func::Sqrt,
                    Box::new(Expression::Add(
                        Box::new(Expression::Const(1.5)),
                        Box::new(Expression::Call(Func::Cos, Box::new(a)))
                    ))
                )),
                inner.clone().prop_map(|a| Expression::Div(
                    Box::new(a),
                    Box::new(Expression::Add(
                        Box::new(Expression::Const(2.0)),
                        Box::new(Expression::Call(Func::Sin, Box::new(Expression::Var(1))))
                    ))
                )),
            ]
        })
    }

    fn central_diff(e: &Expression, q: [f64; 3], h: f64) -> (Vec3, nalgebra::Matrix3<f64>) {
        let at = |d: [f64; 3]| e.eval_f64([q[0] + d[0], q[1] + d[1], q[2] + d[2]]).unwrap();
        let mut g = Vec3::zeros();
        let mut hess = nalgebra::Matrix3::zeros();
        for i in 0..3 {
            let mut di = [0.0; 3];
            di[i] = h;
            let mi = di.map(|v| -v);
            g[i] = (at(di) - at(mi)) / (2.0 * h);
            for j in 0..3 {
                let mut dj = [0.0; 3];
                dj[j] = h;
                let pp = [di[0] + dj[0], di[1] + dj[1], di[2] + dj[2]];
                let pm = [di[0] - dj[0], di[1] - dj[1], di[2] - dj[2]];
                let mp = [-di[0] + dj[0], -di[1] + dj[1], -di[2] + dj[2]];
                let mm = [-di[0] - dj[0], -di[1] - dj[1], -di[2] - dj[2]];
                hess[(i, j)] = (at(pp) - at(pm) - at(mp) + at(mm)) / (4.0 * h * h);
            }
        }
        (g, hess)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn jets_match_central_differences(
            e in arb_expr(),
            pts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 20),
        ) {
            for (x, y, z) in pts {
                let q = [x, y, z];
                let j = e.jet2(q).unwrap();
                prop_assert!((j.hessian - j.hessian.transpose()).abs().max() <= 1e-12 * (1.0 + j.hessian.abs().max()));
                let (g, _) = central_diff(&e, q, 1e-5);
                let gscale = 1.0 + j.gradient.abs().max();
                prop_assert!((g - j.gradient).abs().max() <= 1e-6 * gscale,
                    "gradient {:?} vs {:?} for {}", j.gradient, g, e);
                // Hessian at h = 1e-5 from central differences of the gradient
                // (second differences of values would be dominated by rounding).
                let h = 1e-5;
                let mut hess = nalgebra::Matrix3::zeros();
                for i in 0..3 {
                    let mut qp = q;
                    let mut qm = q;
                    qp[i] += h;
                    qm[i] -= h;
                    let col = (e.jet1(qp).unwrap().gradient - e.jet1(qm).unwrap().gradient) / (2.0 * h);
                    hess.set_column(i, &col);
                }
                let hscale = 1.0 + j.hessian.abs().max();
                prop_assert!((hess - j.hessian).abs().max() <= 1e-6 * hscale,
                    "hessian {:?} vs {:?} for {}", j.hessian, hess, e);
                let (_, hess_values) = central_diff(&e, q, 1e-3);
                prop_assert!((hess_values - j.hessian).abs().max() <= 1e-4 * (hscale + j.value.abs()));
            }
        }

        #[test]
        fn print_parse_roundtrip(e in arb_expr(), x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let back = Expression::parse(&e.to_string()).unwrap();
            let (a, b) = (e.eval_f64([x, y, z]), back.eval_f64([x, y, z]));
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert!(a == b || (a.is_nan() && b.is_nan())),
                (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
            }
        }
    }
}
