//! Oriented simplicial 2-complexes and their homology.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{homology_of, Coefficients, HomologySummary, IntMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    pub vertices: usize,
    /// Oriented edges `[a, b]`.
    pub edges: Vec<[usize; 2]>,
    /// Oriented triangles `[a, b, c]`.
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum VertexSpec {
    Count(usize),
    Coordinates(Vec<[f64; 3]>),
}

/// On-disk form: vertex count (or coordinate list), optional edge list, triangles
/// with optional orientation integers (`-1` reverses the listed order).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangulationFile {
    vertices: VertexSpec,
    #[serde(default)]
    edges: Option<Vec<[usize; 2]>>,
    triangles: Vec<[usize; 3]>,
    #[serde(default)]
    orientations: Option<Vec<i64>>,
}

impl SimplicialComplex {
    /// Triangles with edges derived from them, each oriented from the smaller vertex.
    pub fn from_triangles(vertices: usize, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut edges: Vec<[usize; 2]> = triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [b, c], [a, c]])
            .map(|[u, v]| [u.min(v), u.max(v)])
            .collect();
        edges.sort();
        edges.dedup();
        let k = SimplicialComplex { vertices, edges, triangles };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("triangulation: {what}")));
        if self.edges.iter().flatten().chain(self.triangles.iter().flatten()).any(|&v| v >= self.vertices) {
            return bad("vertex index out of range");
        }
        if self.edges.iter().any(|[a, b]| a == b) {
            return bad("degenerate edge");
        }
        if self.triangles.iter().any(|[a, b, c]| a == b || b == c || a == c) {
            return bad("degenerate triangle");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TriangulationFile =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("triangulation: {e}")))?;
        let vertices = match file.vertices {
            VertexSpec::Count(n) => n,
            VertexSpec::Coordinates(c) => c.len(),
        };
        let mut triangles = file.triangles;
        if let Some(o) = file.orientations {
            if o.len() != triangles.len() {
                return Err(Error::Invalid("triangulation: one orientation per triangle expected".into()));
            }
            for (t, s) in triangles.iter_mut().zip(o) {
                match s {
                    1 => {}
                    -1 => t.swap(0, 1),
                    _ => return Err(Error::Invalid(format!("triangulation: orientation {s} is not +-1"))),
                }
            }
        }
        match file.edges {
            Some(edges) => {
                let k = SimplicialComplex { vertices, edges, triangles };
                k.validate()?;
                Ok(k)
            }
            None => Self::from_triangles(vertices, triangles),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read triangulation {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Boundary of the tetrahedron: a triangulated sphere.
    pub fn tetrahedron_boundary() -> Self {
        Self::from_triangles(4, vec![[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]]).expect("valid")
    }

    /// Seven-vertex torus.
    pub fn csaszar_torus() -> Self {
        let triangles = vec![
            [0, 1, 3],
            [0, 3, 2],
            [1, 2, 4],
            [1, 4, 3],
            [2, 3, 5],
            [2, 5, 4],
            [3, 4, 6],
            [3, 6, 5],
            [4, 5, 0],
            [4, 0, 6],
            [5, 6, 1],
            [5, 1, 0],
            [6, 0, 2],
            [6, 2, 1],
        ];
        Self::from_triangles(7, triangles).expect("valid")
    }

    pub fn single_vertex() -> Self {
        SimplicialComplex { vertices: 1, edges: vec![], triangles: vec![] }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "tetrahedron" => Some(Self::tetrahedron_boundary()),
            "csaszar" => Some(Self::csaszar_torus()),
            "point" => Some(Self::single_vertex()),
            _ => None,
        }
    }

    /// Vertices x edges.
    pub fn d1(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.vertices, self.edges.len());
        for (j, &[a, b]) in self.edges.iter().enumerate() {
            m.set(a, j, m.get(a, j) - 1);
            m.set(b, j, m.get(b, j) + 1);
        }
        m
    }

    /// Edges x triangles; fails if a triangle side is not a listed edge.
    pub fn d2(&self) -> Result<IntMatrix> {
        let index: BTreeMap<[usize; 2], usize> = self.edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut m = IntMatrix::zeros(self.edges.len(), self.triangles.len());
        for (j, &[a, b, c]) in self.triangles.iter().enumerate() {
            for ([u, v], s) in [([b, c], 1), ([a, c], -1), ([a, b], 1)] {
                let (row, sign) = match (index.get(&[u, v]), index.get(&[v, u])) {
                    (Some(&i), _) => (i, s),
                    (None, Some(&i)) => (i, -s),
                    _ => return Err(Error::Invalid(format!("triangulation: edge ({u}, {v}) missing"))),
                };
                m.set(row, j, m.get(row, j) + sign);
            }
        }
        Ok(m)
    }
}

/// Homology from the simplicial boundary matrices.
pub fn simplicial_homology(k: &SimplicialComplex, coefficients: Coefficients) -> Result<HomologySummary> {
    let d1 = k.d1();
    let d2 = k.d2()?;
    if !d1.mul(&d2)?.is_zero() {
        return Err(Error::NotAComplex);
    }
    homology_of(&[k.vertices, k.edges.len(), k.triangles.len()], &[d1, d2], coefficients)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleComparison {
    pub morse: HomologySummary,
    pub simplicial: HomologySummary,
    pub betti_match: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracles() {
        let t = SimplicialComplex::tetrahedron_boundary();
        assert_eq!((t.vertices, t.edges.len(), t.triangles.len()), (4, 6, 4));
        let h = simplicial_homology(&t, Coefficients::Z).unwrap();
        assert_eq!(h.betti, vec![1, 0, 1]);
        assert!(h.torsion.iter().all(Vec::is_empty));
        let c = SimplicialComplex::csaszar_torus();
        assert_eq!((c.vertices, c.edges.len(), c.triangles.len()), (7, 21, 14));
        let h = simplicial_homology(&c, Coefficients::Z).unwrap();
        assert_eq!(h.betti, vec![1, 2, 1]);
        assert!(h.torsion.iter().all(Vec::is_empty));
        assert_eq!(simplicial_homology(&c, Coefficients::Z2).unwrap().betti, vec![1, 2, 1]);
        assert_eq!(simplicial_homology(&SimplicialComplex::single_vertex(), Coefficients::Z).unwrap().betti, vec![1, 0, 0]);
    }

    #[test]
    fn reorienting_a_triangle_is_a_change_of_basis() {
        let t = SimplicialComplex::tetrahedron_boundary();
        let mut flipped = t.clone();
        flipped.triangles[0].swap(0, 1);
        let (a, b) = (t.d2().unwrap(), flipped.d2().unwrap());
        assert_eq!(a.column(0).iter().map(|v| -v).collect::<Vec<_>>(), b.column(0));
        assert_eq!(simplicial_homology(&flipped, Coefficients::Z).unwrap().betti, vec![1, 0, 1]);
    }

    #[test]
    fn json_roundtrip() {
        let k = SimplicialComplex::from_json(
            r#"{"vertices": 4, "triangles": [[1,2,3],[0,3,2],[0,1,3],[0,1,2]], "orientations": [1,1,1,-1]}"#,
        )
        .unwrap();
        assert_eq!(simplicial_homology(&k, Coefficients::Z).unwrap().betti, vec![1, 0, 1]);
        let coords = SimplicialComplex::from_json(
            r#"{"vertices": [[0,0,0],[1,0,0],[0,1,0]], "edges": [[0,1],[1,2],[0,2]], "triangles": [[0,1,2]]}"#,
        )
        .unwrap();
        assert_eq!(simplicial_homology(&coords, Coefficients::Z).unwrap().betti, vec![1, 0, 0]);
        assert!(matches!(SimplicialComplex::from_json(r#"{"vertices": 2, "triangles": [[0,1,2]]}"#), Err(Error::Invalid(_))));
        assert!(matches!(
            SimplicialComplex::from_json(r#"{"vertices": 3, "edges": [[0,1]], "triangles": [[0,1,2]]}"#)
                .and_then(|k| simplicial_homology(&k, Coefficients::Z)),
            Err(Error::Invalid(_))
        ));
    }
}
