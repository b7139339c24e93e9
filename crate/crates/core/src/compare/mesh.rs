//! Oriented triangle meshes covering the catalog surfaces once.

use crate::catalog::Surface;
use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, Vec3};

use super::simplicial::SimplicialComplex;

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    /// Counterclockwise for the surface orientation.
    pub triangles: Vec<[usize; 3]>,
}

/// Vertex grid with `rows` rings of `cols` points, wrapping in the column
/// direction, optionally closed by a pole vertex at each end.
fn grid_triangles(rows: usize, cols: usize, poles: Option<(usize, usize)>, wrap_rows: bool) -> Vec<[usize; 3]> {
    let at = |r: usize, c: usize| r * cols + c % cols;
    let mut t = Vec::new();
    let row_pairs = if wrap_rows { rows } else { rows - 1 };
    for r in 0..row_pairs {
        let r2 = (r + 1) % rows;
        for c in 0..cols {
            t.push([at(r, c), at(r2, c), at(r2, c + 1)]);
            t.push([at(r, c), at(r2, c + 1), at(r, c + 1)]);
        }
    }
    if let Some((first, last)) = poles {
        for c in 0..cols {
            t.push([first, at(0, c), at(0, c + 1)]);
            t.push([last, at(rows - 1, c + 1), at(rows - 1, c)]);
        }
    }
    t
}

impl SurfaceMesh {
    /// Mesh of a catalog surface at resolution `n`; every vertex is projected.
    ///
    /// Rings are rotated by an offset so that no mesh edge lies on a
    /// coordinate plane.
    pub fn catalog(surface: Surface, n: usize) -> Result<Self> {
        let s = surface.build();
        let n = n.max(4);
        let cols = 2 * n;
        let offset = 0.1234;
        let angle = |c: usize| std::f64::consts::TAU * (c as f64 + offset) / cols as f64;
        let mut raw = Vec::new();
        let triangles = match surface {
            Surface::Sphere | Surface::Dumbbell => {
                // Poles on the axis of revolution, rings in between.
                let rows = n - 1;
                for r in 0..rows {
                    let t = std::f64::consts::PI * (r + 1) as f64 / n as f64;
                    for c in 0..cols {
                        let a = angle(c);
                        raw.push(match surface {
                            Surface::Sphere => Vec3::new(t.sin() * a.cos(), t.sin() * a.sin(), t.cos()),
                            _ => {
                                let x = -t.cos();
                                let rad = ((1.0 - x * x) * (x * x + 0.5)).sqrt();
                                Vec3::new(x, rad * a.cos(), rad * a.sin())
                            }
                        });
                    }
                }
                let (p0, p1) = match surface {
                    Surface::Sphere => (Vec3::z(), -Vec3::z()),
                    _ => (-Vec3::x(), Vec3::x()),
                };
                raw.push(p0);
                raw.push(p1);
                grid_triangles(rows, cols, Some((rows * cols, rows * cols + 1)), false)
            }
            Surface::VerticalTorus => {
                let rows = n;
                for r in 0..rows {
                    let th = std::f64::consts::TAU * (r as f64 + offset) / rows as f64;
                    for c in 0..cols {
                        let ph = angle(c);
                        raw.push(Vec3::new((2.0 + th.cos()) * ph.cos(), th.sin(), (2.0 + th.cos()) * ph.sin()));
                    }
                }
                grid_triangles(rows, cols, None, true)
            }
            Surface::FlatTorus => return Err(Error::Invalid("no mesh for the flat torus".into())),
        };
        let vertices = raw.iter().map(|p| s.project(p).map(|q| q.coords)).collect::<Result<Vec<_>>>()?;
        let mut mesh = SurfaceMesh { vertices, triangles };
        mesh.orient(&s)?;
        Ok(mesh)
    }

    /// Flip all triangles if the first one disagrees with the surface normal,
    /// then check every triangle agrees.
    fn orient(&mut self, s: &ImplicitSurface) -> Result<()> {
        let sign = |m: &SurfaceMesh, t: &[usize; 3]| -> Result<f64> {
            let [a, b, c] = t.map(|i| m.vertices[i]);
            let n = s.unit_normal(&((a + b + c) / 3.0))?;
            Ok((b - a).cross(&(c - a)).dot(&n))
        };
        if sign(self, &self.triangles[0])? < 0.0 {
            for t in &mut self.triangles {
                t.swap(1, 2);
            }
        }
        for t in &self.triangles {
            if sign(self, t)? <= 0.0 {
                return Err(Error::CheckFailed("mesh triangles are not coherently oriented".into()));
            }
        }
        Ok(())
    }

    pub fn to_simplicial(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_triangles(self.vertices.len(), self.triangles.clone())
    }

    /// Signed number of triangles covering `q`, seen from the normal `n` at `q`.
    pub fn local_degree(&self, q: &Vec3, n: &Vec3) -> i64 {
        let mut deg = 0;
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.vertices[i]);
            let size = (b - a).norm().max((c - a).norm()).max((c - b).norm());
            if ((a + b + c) / 3.0 - q).norm() > size {
                continue;
            }
            let ws = [(b - q).cross(&(c - q)).dot(n), (c - q).cross(&(a - q)).dot(n), (a - q).cross(&(b - q)).dot(n)];
            if ws.iter().all(|&w| w > 0.0) {
                deg += 1;
            } else if ws.iter().all(|&w| w < 0.0) {
                deg -= 1;
            }
        }
        deg
    }
}
