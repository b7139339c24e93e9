//! Scenario files: which surface, which functions, which tasks.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::Surface;
use crate::complex::Coefficients;
use crate::critical::SearchParams;
use crate::error::{Error, Result};
use crate::flow::FlowSettings;
use crate::geometry::{ImplicitSurface, SurfaceTolerances};
use crate::scalarfield::Expression;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Crit,
    Complex,
    Homology,
    Pairing,
    Glue,
    Continue,
    Functoriality,
    Psi,
    Roundtrip,
    SimplicialCompare,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Crit => "crit",
            Task::Complex => "complex",
            Task::Homology => "homology",
            Task::Pairing => "pairing",
            Task::Glue => "glue",
            Task::Continue => "continue",
            Task::Functoriality => "functoriality",
            Task::Psi => "psi",
            Task::Roundtrip => "roundtrip",
            Task::SimplicialCompare => "simplicial-compare",
        }
    }
}

/// A catalog name or an implicit surface given by its defining expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SurfaceSpec {
    Catalog(String),
    Implicit {
        phi: String,
        bbox: [[f64; 2]; 3],
        euler: i64,
    },
}

/// Closed test curves for `psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    /// Tube circle of the catalog vertical torus at longitude `phi`.
    Meridian { phi: f64, #[serde(default = "default_samples")] samples: usize },
    /// Circle around the axis of the catalog vertical torus at tube angle `theta`.
    Longitude { theta: f64, #[serde(default = "default_samples")] samples: usize },
    SmallCircle { center: [f64; 3], radius: f64, #[serde(default = "default_samples")] samples: usize },
    /// Closed polyline through the projections of `points`.
    Polyline { points: Vec<[f64; 3]>, #[serde(default = "default_max_len")] max_len: f64 },
}

fn default_samples() -> usize {
    400
}

fn default_max_len() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedPoint {
    pub at: [f64; 3],
    #[serde(default = "one")]
    pub weight: i64,
}

fn one() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub surface: SurfaceTolerances,
    pub search: SearchParams,
    pub flow: FlowSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    pub surface: SurfaceSpec,
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<String>,
    #[serde(default)]
    pub coeff: Coefficients,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub tasks: Vec<Task>,
    /// Degree-one cycles for pairing, glue and roundtrip; defaults to a basis of `H_1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<WeightedPoint>,
    /// `builtin:tetrahedron`, `builtin:csaszar`, `builtin:point`, `mesh:<n>`
    /// for a mesh of the catalog surface, or a path to a JSON file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangulation: Option<String>,
    /// Seed for the perturbations suggested after a genericity failure.
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn catalog_surface(&self) -> Option<Surface> {
        match &self.surface {
            SurfaceSpec::Catalog(name) => name.parse().ok(),
            SurfaceSpec::Implicit { .. } => None,
        }
    }

    pub fn build_surface(&self) -> Result<ImplicitSurface> {
        let mut s = match &self.surface {
            SurfaceSpec::Catalog(name) => name.parse::<Surface>()?.build(),
            SurfaceSpec::Implicit { phi, bbox, euler } => {
                if bbox.iter().any(|[lo, hi]| !(lo < hi)) {
                    return Err(Error::Invalid("bounding box needs lo < hi on every axis".into()));
                }
                ImplicitSurface::new(Expression::parse(phi)?, *bbox, *euler)
            }
        };
        s.tol = self.tolerances.surface;
        Ok(s)
    }

    pub fn function(&self, which: usize) -> Result<Option<Expression>> {
        let src = match which {
            0 => Some(&self.f),
            1 => self.f1.as_ref(),
            _ => self.f2.as_ref(),
        };
        src.map(|s| Expression::parse(s)).transpose()
    }

    /// Schema version, parseable expressions, and the inputs each task needs.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Invalid(format!("unsupported schema {} (expected {SCHEMA})", self.schema)));
        }
        self.build_surface()?;
        for k in 0..3 {
            self.function(k)?;
        }
        let need = |task: Task, ok: bool, what: &str| -> Result<()> {
            if self.tasks.contains(&task) && !ok {
                return Err(Error::Invalid(format!("task `{}` needs {what}", task.name())));
            }
            Ok(())
        };
        need(Task::Continue, self.f1.is_some(), "`f1`")?;
        need(Task::Roundtrip, self.f1.is_some(), "`f1`")?;
        need(Task::Functoriality, self.f1.is_some() && self.f2.is_some(), "`f1` and `f2`")?;
        need(Task::SimplicialCompare, self.triangulation.is_some(), "a `triangulation`")?;
        need(Task::Psi, !self.curves.is_empty() || !self.points.is_empty() || self.catalog_surface().is_some(), "curves or points")?;
        let torus = self.catalog_surface() == Some(Surface::VerticalTorus);
        for c in &self.curves {
            if matches!(c, CurveSpec::Meridian { .. } | CurveSpec::Longitude { .. }) && !torus {
                return Err(Error::Invalid("meridian and longitude curves need the vertical-torus surface".into()));
            }
        }
        Ok(())
    }
}
