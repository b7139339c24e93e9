//! Built-in surfaces and Morse functions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::ImplicitSurface;
use crate::scalarfield::Expression;

/// Default tilt magnitude for catalog functions.
pub const DEFAULT_TILT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    /// Unit sphere.
    Sphere,
    /// Torus of revolution about the y-axis, tube centre radius 2, tube radius 1.
    VerticalTorus,
    /// Surface of revolution about the x-axis with radius profile
    /// `s(x) = (1 - x^2)(x^2 + 0.5)`, pinched at `x = 0`.
    Dumbbell,
    /// Torus of revolution about the z-axis; the height function is degenerate on it.
    FlatTorus,
}

impl Surface {
    pub const ALL: [Surface; 4] =
        [Surface::Sphere, Surface::VerticalTorus, Surface::Dumbbell, Surface::FlatTorus];

    pub fn name(self) -> &'static str {
        match self {
            Surface::Sphere => "sphere",
            Surface::VerticalTorus => "vertical-torus",
            Surface::Dumbbell => "dumbbell",
            Surface::FlatTorus => "flat-torus",
        }
    }

    pub fn constraint_source(self) -> &'static str {
        match self {
            Surface::Sphere => "x^2 + y^2 + z^2 - 1",
            Surface::VerticalTorus => "(sqrt(x^2 + z^2) - 2)^2 + y^2 - 1",
            Surface::Dumbbell => "y^2 + z^2 - (1 - x^2)*(x^2 + 0.5)",
            Surface::FlatTorus => "(sqrt(x^2 + y^2) - 2)^2 + z^2 - 1",
        }
    }

    pub fn build(self) -> ImplicitSurface {
        let bbox = match self {
            Surface::Sphere => [[-2.0, 2.0]; 3],
            Surface::VerticalTorus => [[-3.5, 3.5], [-1.5, 1.5], [-3.5, 3.5]],
            Surface::Dumbbell => [[-1.5, 1.5], [-1.0, 1.0], [-1.0, 1.0]],
            Surface::FlatTorus => [[-3.5, 3.5], [-3.5, 3.5], [-1.5, 1.5]],
        };
        let euler = match self {
            Surface::Sphere | Surface::Dumbbell => 2,
            Surface::VerticalTorus | Surface::FlatTorus => 0,
        };
        let constraint = Expression::parse(self.constraint_source()).expect("catalog constraint parses");
        ImplicitSurface::new(constraint, bbox, euler)
    }

    /// Default Morse function: the height `z` tilted by `eps` along a horizontal
    /// direction that breaks every reflection symmetry forcing a saddle-to-saddle
    /// flow line.
    ///
    /// On the vertical torus the plane `y = 0` is invariant under the flow of any
    /// function `z + a*x`, and the inner equator then joins the two saddles, so
    /// its tilt needs a `y` component.
    pub fn default_function(self, eps: f64) -> Expression {
        match self {
            Surface::VerticalTorus => tilted_height(eps, std::f64::consts::FRAC_PI_4),
            _ => tilted_height(eps, 0.0),
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Surface {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Surface::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown catalog surface `{s}`")))
    }
}

/// `z + eps*(cos(angle)*x + sin(angle)*y)`.
pub fn tilted_height(eps: f64, angle: f64) -> Expression {
    let (s, c) = angle.sin_cos();
    let mut e = Expression::Var(2);
    let a = eps * c;
    let b = eps * s;
    if a.abs() > 1e-15 {
        e = e.plus(Expression::Var(0).scaled(a));
    }
    if b.abs() > 1e-15 {
        e = e.plus(Expression::Var(1).scaled(b));
    }
    e
}

/// `n` tilt angles in radians drawn from `[20, 70] + k*90` degrees, `k` uniform
/// in `0..4`; the ranges keep both horizontal components away from zero.
pub fn random_tilt_angles(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let k = rng.random_range(0..4) as f64;
            (rng.random_range(20.0..70.0) + 90.0 * k).to_radians()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for s in Surface::ALL {
            assert_eq!(s.name().parse::<Surface>().unwrap(), s);
        }
        assert!("klein-bottle".parse::<Surface>().is_err());
    }

    #[test]
    fn tilt_expression() {
        let f = tilted_height(0.1, 0.0);
        assert_eq!(f.to_string(), "(z + (0.1 * x))");
        let g = tilted_height(0.2, std::f64::consts::FRAC_PI_2);
        assert!((g.eval_f64([5.0, 1.0, 1.0]).unwrap() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn random_angles_avoid_axes() {
        let a = random_tilt_angles(7, 50);
        assert_eq!(a, random_tilt_angles(7, 50));
        for t in a {
            let d = t.to_degrees() % 90.0;
            assert!((20.0..70.0).contains(&d), "{d}");
        }
    }
}
