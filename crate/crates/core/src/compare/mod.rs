//! Singular cycles against Morse cycles.
//!
//! The simplicial oracle computes homology from a triangulation. The map
//! `Psi` sends a closed curve to the Morse 1-chain counting its signed
//! crossings with the stable curves of the saddles, a weighted point set to
//! the 0-chain of the minima whose basins contain the points, and the
//! fundamental class to the 2-chain of maxima weighted by their orientation.

mod curve;
mod mesh;
mod simplicial;

pub use curve::{
    check_transverse, point_segment_distance, polyline_crossings, Crossing, PseudoCycleCurve, DEFAULT_MARGIN_DEG,
};
pub use mesh::SurfaceMesh;
pub use simplicial::{simplicial_homology, OracleComparison, SimplicialComplex};

use serde::Serialize;

use crate::complex::{find_pairing, glue_cycle_curve, homologous, in_image, Coefficients, MorseComplex, MorseCycle};
use crate::continuation::ContinuationMatrix;
use crate::error::{Error, Result};
use crate::flow::{basin_of, FlowConfig};
use crate::geometry::{ImplicitSurface, Vec3};
use crate::morse::MorseData;

/// A point of `M_{chi; x}`: the curve meets the stable curve of saddle `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntersectionRecord {
    pub point: [f64; 3],
    pub saddle: usize,
    pub sign: i64,
    pub angle_deg: f64,
    /// Position along the curve (segment index plus fraction).
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiResult {
    pub cycle: MorseCycle,
    pub records: Vec<IntersectionRecord>,
}

/// Minimum distance a curve must keep from critical points.
pub fn default_clearance(cfg: &FlowConfig) -> f64 {
    10.0 * cfg.capture_radius
}

/// `Psi` of a union of closed curves: per saddle, the signed crossings with
/// its stable curve, `det[curve', stable', n]`.
pub fn psi_degree1(
    curves: &[PseudoCycleCurve],
    data: &MorseData,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
) -> Result<PsiResult> {
    let saddles: Vec<usize> = data.of_index(1).map(|c| c.id).collect();
    let mut coefficients = vec![0; saddles.len()];
    let mut records = Vec::new();
    for chi in curves {
        if !chi.is_closed() {
            return Err(Error::Invalid("pseudo-cycle curve is not closed".into()));
        }
        chi.check_clearance(&data.crit, default_clearance(cfg))?;
        for (pos, &x) in saddles.iter().enumerate() {
            let stable = data
                .census
                .stable_curve(x)
                .ok_or(Error::MissingModuli { source_id: x, target_id: x })?;
            let crossings = polyline_crossings(&chi.points, &stable.points, surface)?;
            check_transverse(&crossings, chi.margin_deg)?;
            for c in crossings {
                coefficients[pos] += c.sign;
                records.push(IntersectionRecord {
                    point: c.point,
                    saddle: x,
                    sign: c.sign,
                    angle_deg: c.angle_deg,
                    position: c.a_position(),
                });
            }
        }
    }
    Ok(PsiResult { cycle: MorseCycle::new(1, coefficients), records })
}

/// `Psi` of weighted points: each weight goes to the minimum of its basin.
pub fn psi_degree0(
    points: &[(Vec3, i64)],
    data: &MorseData,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
) -> Result<MorseCycle> {
    let minima: Vec<usize> = data.of_index(0).map(|c| c.id).collect();
    let mut coefficients = vec![0; minima.len()];
    for (q, w) in points {
        let p = surface.project(q)?;
        let m = basin_of(&p, &data.f, surface, &data.crit, cfg)?;
        let pos = minima.iter().position(|&id| id == m).expect("basin is a minimum");
        coefficients[pos] += w;
    }
    Ok(MorseCycle::new(0, coefficients))
}

/// `Psi` of the fundamental class given by a mesh covering the surface once:
/// each maximum gets its orientation sign times the local covering degree.
pub fn psi_fundamental(mesh: &SurfaceMesh, data: &MorseData) -> Result<MorseCycle> {
    let mut coefficients = Vec::new();
    for x in data.of_index(2) {
        let deg = mesh.local_degree(&x.coords(), &x.location.normal);
        if deg.abs() != 1 {
            return Err(Error::CheckFailed(format!("mesh covers maximum {} with degree {deg}", x.id)));
        }
        coefficients.push(x.unstable_orientation() * deg);
    }
    Ok(MorseCycle::new(2, coefficients))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub cycle: Vec<i64>,
    pub curves: usize,
    pub max_gap: f64,
    pub psi: Vec<i64>,
    pub phi: Vec<i64>,
    pub records: Vec<IntersectionRecord>,
    /// Whether `[Psi(glue(a))] = [Phi_10 a]` in `H_1(f1)`.
    pub pass: bool,
}

/// Glue the degree-one cycle `a` of `d0` into curves, map them by `Psi` of
/// `d1`, and compare the class with the continuation image of `a`.
pub fn roundtrip_phi_psi(
    a: &MorseCycle,
    d0: &MorseData,
    d1: &MorseData,
    phi: &ContinuationMatrix,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
) -> Result<RoundtripReport> {
    let c0 = d0.complex(Coefficients::Z)?;
    let c1 = d1.complex(Coefficients::Z)?;
    let pairing = find_pairing(a, &c0, &d0.census)?;
    let glued = glue_cycle_curve(a, &pairing, &d0.census, &d0.crit, cfg)?;
    let curves: Vec<PseudoCycleCurve> = glued
        .curve_points()
        .into_iter()
        .map(|points| PseudoCycleCurve { points, margin_deg: DEFAULT_MARGIN_DEG })
        .collect();
    let psi = psi_degree1(&curves, d1, surface, cfg)?;
    let phi_a = phi.degree(1).apply(&a.coefficients)?;
    let pass = homologous(&c1, 1, &psi.cycle.coefficients, &phi_a)?;
    Ok(RoundtripReport {
        cycle: a.coefficients.clone(),
        curves: curves.len(),
        max_gap: glued.max_gap,
        psi: psi.cycle.coefficients,
        phi: phi_a,
        records: psi.records,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CobordanceReport {
    pub psi_a: Vec<i64>,
    pub psi_b: Vec<i64>,
    pub difference: Vec<i64>,
    /// Whether the difference is a boundary.
    pub pass: bool,
}

/// `Psi(a) - Psi(b)` lies in the image of the second boundary.
pub fn cobordance_invariance(
    a: &PseudoCycleCurve,
    b: &PseudoCycleCurve,
    data: &MorseData,
    complex: &MorseComplex,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
) -> Result<CobordanceReport> {
    let pa = psi_degree1(std::slice::from_ref(a), data, surface, cfg)?.cycle.coefficients;
    let pb = psi_degree1(std::slice::from_ref(b), data, surface, cfg)?.cycle.coefficients;
    let difference: Vec<i64> = pa.iter().zip(&pb).map(|(x, y)| x - y).collect();
    let pass = in_image(&complex.d(2), &difference)?;
    Ok(CobordanceReport { psi_a: pa, psi_b: pb, difference, pass })
}
