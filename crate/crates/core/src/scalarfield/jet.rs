//! Forward-mode differentiation up to second order.
//!
//! A jet carries the value of a subexpression together with its derivatives
//! with respect to the three ambient coordinates. Every AST node maps jets to
//! jets, so gradients and Hessians come out exact up to rounding.

use nalgebra::{Matrix3, Vector3};

use super::parse::{Expression, Func};
use crate::error::{Error, Result};

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vector3<f64>,
    pub hessian: Matrix3<f64>,
}

/// Value and gradient only; used on the hot path of the flow integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub gradient: Vector3<f64>,
}

/// Arithmetic needed to push a number type through an [`Expression`].
pub trait Differentiable: Copy {
    /// Highest derivative order carried.
    const ORDER: usize;
    fn constant(c: f64) -> Self;
    fn variable(axis: usize, value: f64) -> Self;
    fn value(&self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn neg(self) -> Self;
    /// Compose with a scalar function given its value and first two derivatives
    /// at `self.value()`.
    fn chain(self, d0: f64, d1: f64, d2: f64) -> Self;
}

impl Differentiable for f64 {
    const ORDER: usize = 0;
    fn constant(c: f64) -> Self {
        c
    }
    fn variable(_: usize, value: f64) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn neg(self) -> Self {
        -self
    }
    fn chain(self, d0: f64, _: f64, _: f64) -> Self {
        d0
    }
}

impl Differentiable for Jet1 {
    const ORDER: usize = 1;
    fn constant(c: f64) -> Self {
        Jet1 { value: c, gradient: Vector3::zeros() }
    }
    fn variable(axis: usize, value: f64) -> Self {
        let mut gradient = Vector3::zeros();
        gradient[axis] = 1.0;
        Jet1 { value, gradient }
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn add(self, o: Self) -> Self {
        Jet1 { value: self.value + o.value, gradient: self.gradient + o.gradient }
    }
    fn sub(self, o: Self) -> Self {
        Jet1 { value: self.value - o.value, gradient: self.gradient - o.gradient }
    }
    fn mul(self, o: Self) -> Self {
        Jet1 {
            value: self.value * o.value,
            gradient: self.gradient * o.value + o.gradient * self.value,
        }
    }
    fn neg(self) -> Self {
        Jet1 { value: -self.value, gradient: -self.gradient }
    }
    fn chain(self, d0: f64, d1: f64, _: f64) -> Self {
        Jet1 { value: d0, gradient: self.gradient * d1 }
    }
}

impl Differentiable for Jet2 {
    const ORDER: usize = 2;
    fn constant(c: f64) -> Self {
        Jet2 { value: c, gradient: Vector3::zeros(), hessian: Matrix3::zeros() }
    }
    fn variable(axis: usize, value: f64) -> Self {
        let mut gradient = Vector3::zeros();
        gradient[axis] = 1.0;
        Jet2 { value, gradient, hessian: Matrix3::zeros() }
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn add(self, o: Self) -> Self {
        Jet2 {
            value: self.value + o.value,
            gradient: self.gradient + o.gradient,
            hessian: self.hessian + o.hessian,
        }
    }
    fn sub(self, o: Self) -> Self {
        Jet2 {
            value: self.value - o.value,
            gradient: self.gradient - o.gradient,
            hessian: self.hessian - o.hessian,
        }
    }
    fn mul(self, o: Self) -> Self {
        let cross = self.gradient * o.gradient.transpose();
        Jet2 {
            value: self.value * o.value,
            gradient: self.gradient * o.value + o.gradient * self.value,
            hessian: self.hessian * o.value + o.hessian * self.value + cross + cross.transpose(),
        }
    }
    fn neg(self) -> Self {
        Jet2 { value: -self.value, gradient: -self.gradient, hessian: -self.hessian }
    }
    fn chain(self, d0: f64, d1: f64, d2: f64) -> Self {
        Jet2 {
            value: d0,
            gradient: self.gradient * d1,
            hessian: self.hessian * d1 + self.gradient * self.gradient.transpose() * d2,
        }
    }
}

impl Expression {
    /// Evaluate over any [`Differentiable`] number type at ambient point `q`.
    pub fn eval<T: Differentiable>(&self, q: [f64; 3]) -> Result<T> {
        use Expression::*;
        Ok(match self {
            Const(c) => T::constant(*c),
            Var(i) => T::variable(*i, q[*i]),
            Neg(a) => a.eval::<T>(q)?.neg(),
            Add(a, b) => a.eval::<T>(q)?.add(b.eval(q)?),
            Sub(a, b) => a.eval::<T>(q)?.sub(b.eval(q)?),
            Mul(a, b) => a.eval::<T>(q)?.mul(b.eval(q)?),
            Div(a, b) => {
                let num = a.eval::<T>(q)?;
                let den = b.eval::<T>(q)?;
                let v = den.value();
                if v == 0.0 {
                    return Err(Error::Domain(format!("division by zero at {q:?}")));
                }
                num.mul(den.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
            }
            Pow(a, n) => {
                let u = a.eval::<T>(q)?;
                let v = u.value();
                let n = *n as i32;
                match n {
                    0 => T::constant(1.0),
                    1 => u,
                    _ => u.chain(
                        v.powi(n),
                        n as f64 * v.powi(n - 1),
                        (n * (n - 1)) as f64 * v.powi(n - 2),
                    ),
                }
            }
            Call(func, a) => {
                let u = a.eval::<T>(q)?;
                let v = u.value();
                match func {
                    Func::Sin => u.chain(v.sin(), v.cos(), -v.sin()),
                    Func::Cos => u.chain(v.cos(), -v.sin(), -v.cos()),
                    Func::Exp => {
                        let e = v.exp();
                        u.chain(e, e, e)
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(Error::Domain(format!("sqrt of {v} at {q:?}")));
                        }
                        let s = v.sqrt();
                        if s == 0.0 {
                            // Value is fine; any derivative is infinite.
                            if T::ORDER == 0 {
                                return Ok(T::constant(0.0));
                            }
                            return Err(Error::Domain(format!("sqrt not differentiable at 0 ({q:?})")));
                        }
                        u.chain(s, 0.5 / s, -0.25 / (s * v))
                    }
                }
            }
        })
    }

    pub fn eval_f64(&self, q: [f64; 3]) -> Result<f64> {
        self.eval::<f64>(q)
    }

    pub fn jet1(&self, q: [f64; 3]) -> Result<Jet1> {
        self.eval::<Jet1>(q)
    }

    /// Value, gradient and Hessian at `q`.
    pub fn jet2(&self, q: [f64; 3]) -> Result<Jet2> {
        if q.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite point {q:?}")));
        }
        self.eval::<Jet2>(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn jet(src: &str, q: [f64; 3]) -> Jet2 {
        Expression::parse(src).unwrap().jet2(q).unwrap()
    }

    #[test]
    fn product_jet() {
        let j = jet("x*y", [2.0, 3.0, 0.0]);
        assert_eq!(j.value, 6.0);
        assert_eq!(j.gradient, Vector3::new(3.0, 2.0, 0.0));
        assert_eq!(j.hessian[(0, 1)], 1.0);
        assert_eq!(j.hessian[(1, 0)], 1.0);
        assert_eq!(j.hessian[(0, 0)], 0.0);
    }

    #[test]
    fn coordinate_jet() {
        let j = jet("z", [0.3, -1.0, 7.0]);
        assert_eq!(j.gradient, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(j.hessian, Matrix3::zeros());
    }

    #[test]
    fn sphere_jet() {
        let j = jet("x^2+y^2+z^2-1", [0.0, 0.0, 1.0]);
        assert_eq!(j.value, 0.0);
        assert_eq!(j.gradient, Vector3::new(0.0, 0.0, 2.0));
        assert_eq!(j.hessian, Matrix3::identity() * 2.0);
    }

    #[test]
    fn quotient_and_functions() {
        let j = jet("exp(x)/cos(y) + sqrt(z)", [0.5, 0.25, 4.0]);
        let expect = 0.5f64.exp() / 0.25f64.cos() + 2.0;
        assert_relative_eq!(j.value, expect, max_relative = 1e-15);
        // d/dz sqrt(z) = 1/(2 sqrt z); d2/dz2 = -1/(4 z^{3/2})
        assert_relative_eq!(j.gradient[2], 0.25, max_relative = 1e-15);
        assert_relative_eq!(j.hessian[(2, 2)], -1.0 / 32.0, max_relative = 1e-15);
        // d/dy (e^x / cos y) = e^x sin y / cos^2 y
        let dy = 0.5f64.exp() * 0.25f64.sin() / 0.25f64.cos().powi(2);
        assert_relative_eq!(j.gradient[1], dy, max_relative = 1e-14);
    }

    #[test]
    fn domain_errors() {
        let e = Expression::parse("1/x").unwrap();
        assert!(matches!(e.jet2([0.0, 1.0, 1.0]), Err(Error::Domain(_))));
        let e = Expression::parse("sqrt(x)").unwrap();
        assert!(matches!(e.jet2([-1.0, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(e.jet2([0.0, 0.0, 0.0]), Err(Error::Domain(_))));
        assert_eq!(e.eval_f64([0.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn zero_power_is_one() {
        let j = jet("x^0", [0.0, 0.0, 0.0]);
        assert_eq!(j.value, 1.0);
        assert_eq!(j.gradient, Vector3::zeros());
    }

    #[test]
    fn jet1_matches_jet2() {
        let e = Expression::parse("(sqrt(x^2 + z^2) - 2)^2 + y^2 - 1 + sin(x*y)").unwrap();
        let q = [2.3, 0.4, -1.1];
        let a = e.jet1(q).unwrap();
        let b = e.jet2(q).unwrap();
        assert_eq!(a.value, b.value);
        assert_relative_eq!(a.gradient, b.gradient, max_relative = 1e-15);
    }
}
