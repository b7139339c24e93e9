//! Continuation maps between the Morse complexes of two functions.
//!
//! The homotopy `f_s = (1 - beta(s)) f0 + beta(s) f1` equals `f0` for
//! `s <= -R` and `f1` for `s >= R`. A continuation trajectory from `x0` to
//! `x1` leaves `x0` along `W^u(x0; f0)`, follows the non-autonomous flow for
//! `s` in `[-R, R]` and then lies on `W^s(x1; f1)`. Writing `H` for the flow
//! map from time `-R` to `R`, the trajectories are the intersections of
//! `H(W^u(x0; f0))` with `W^s(x1; f1)`:
//!
//! * degree 0: `H(x0)` lies in the basin of exactly one minimum of `f1`;
//! * degree 1: the curve `H(W^u(x0))` crosses the stable curves of `f1`;
//! * degree 2: `H^{-1}(x1)` lies in the ascent basin of one maximum of `f0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::compare::{check_transverse, polyline_crossings};
use crate::complex::{complex_homology_basis, gf2, induced_map, Coefficients, IntMatrix, MorseComplex};
use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::flow::{integrate_flow, FlowConfig, FlowOutcome, FlowPath, FlowStop, GradientField, TangentField};
use crate::geometry::{ImplicitSurface, SurfacePoint, Vec3};
use crate::morse::MorseData;
use crate::scalarfield::Expression;

/// Smallest crossing angle accepted for continuation trajectories, degrees.
const CROSSING_MARGIN_DEG: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ramp {
    /// `3t^2 - 2t^3`.
    #[default]
    Smoothstep,
    /// `6t^5 - 15t^4 + 10t^3`.
    Smootherstep,
}

impl Ramp {
    fn at(self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            Ramp::Smoothstep => t * t * (3.0 - 2.0 * t),
            Ramp::Smootherstep => t * t * t * (t * (6.0 * t - 15.0) + 10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Homotopy {
    pub f0: Expression,
    pub f1: Expression,
    pub ramp: Ramp,
    pub radius: f64,
}

impl Homotopy {
    pub fn new(f0: Expression, f1: Expression) -> Self {
        Homotopy { f0, f1, ramp: Ramp::Smoothstep, radius: 5.0 }
    }

    pub fn with_ramp(self, ramp: Ramp) -> Self {
        Homotopy { ramp, ..self }
    }

    pub fn beta(&self, s: f64) -> f64 {
        self.ramp.at((s + self.radius) / (2.0 * self.radius))
    }
}

/// Descent field of `f_s`; with `reversed` the time runs backwards, so
/// integrating from `-T` to `T` follows `s` from `T` down to `-T`.
struct HomotopyField<'a> {
    h: &'a Homotopy,
    surface: &'a ImplicitSurface,
    reversed: bool,
}

impl TangentField for HomotopyField<'_> {
    fn surface(&self) -> &ImplicitSurface {
        self.surface
    }

    fn velocity(&self, q: &Vec3, t: f64) -> Result<Vec3> {
        let s = if self.reversed { -t } else { t };
        let b = self.h.beta(s);
        let at = [q.x, q.y, q.z];
        let mut g = Vec3::zeros();
        if b < 1.0 {
            g += self.h.f0.jet1(at)?.gradient * (1.0 - b);
        }
        if b > 0.0 {
            g += self.h.f1.jet1(at)?.gradient * b;
        }
        let n = self.surface.unit_normal(q)?;
        let v = g - n * g.dot(&n);
        Ok(if self.reversed { v } else { -v })
    }
}

/// `n(x0, x1)` per degree: rows are generators of `f1`, columns of `f0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuationMatrix {
    pub degrees: [IntMatrix; 3],
    pub coefficients: Coefficients,
}

impl ContinuationMatrix {
    pub fn degree(&self, k: usize) -> &IntMatrix {
        &self.degrees[k]
    }

    pub fn reduced_mod2(&self) -> ContinuationMatrix {
        ContinuationMatrix { degrees: self.degrees.clone().map(|m| m.mod2()), coefficients: Coefficients::Z2 }
    }

    /// Composite `other * self` (first `self`, then `other`).
    pub fn then(&self, other: &ContinuationMatrix) -> Result<ContinuationMatrix> {
        let mut degrees = [IntMatrix::zeros(0, 0), IntMatrix::zeros(0, 0), IntMatrix::zeros(0, 0)];
        for k in 0..3 {
            degrees[k] = other.degrees[k].mul(&self.degrees[k])?;
            if self.coefficients == Coefficients::Z2 {
                degrees[k] = degrees[k].mod2();
            }
        }
        Ok(ContinuationMatrix { degrees, coefficients: self.coefficients })
    }
}

/// One crossing of `H(W^u(x0))` with `W^s(x1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationCrossing {
    pub source: usize,
    pub target: usize,
    pub sign: i64,
    pub point: [f64; 3],
    pub angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuationReport {
    pub matrix: ContinuationMatrix,
    pub crossings: Vec<ContinuationCrossing>,
    /// Local degree of the flow map at each maximum of `f1`.
    pub windings: Vec<i64>,
}

fn generators(crit: &[CriticalPoint], k: usize) -> Vec<&CriticalPoint> {
    crit.iter().filter(|c| c.index == k).collect()
}

/// Time span of the homotopy flow, padded by one unit on each side.
fn span(h: &Homotopy) -> (f64, f64) {
    (-h.radius - 1.0, h.radius + 1.0)
}

fn flow_through(
    p: SurfacePoint,
    h: &Homotopy,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
    reversed: bool,
    (t0, t1): (f64, f64),
) -> Result<SurfacePoint> {
    let field = HomotopyField { h, surface, reversed };
    Ok(*integrate_flow(p, &field, cfg, FlowStop::until(t0, t1))?.end())
}

/// Critical point reached from `p` by the flow of `f`, required to have `index`.
fn settle(
    p: SurfacePoint,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
    ascend: bool,
    index: usize,
) -> Result<usize> {
    let field = if ascend { GradientField::ascent(f, surface) } else { GradientField::descent(f, surface) };
    let path = integrate_flow(p, &field, cfg, FlowStop::capture(crit))?;
    match path.outcome {
        FlowOutcome::ConvergedTo(id) if crit[id].index == index => Ok(id),
        FlowOutcome::ConvergedTo(id) => Err(Error::NonGenericHomotopy(format!(
            "continuation trajectory from {:?} ends at critical point {id} of index {}",
            p.coords_array(),
            crit[id].index
        ))),
        _ => Err(Error::Inconclusive(format!("flow from {:?} did not settle", p.coords_array()))),
    }
}

fn degree_zero(h: &Homotopy, d0: &MorseData, d1: &MorseData, surface: &ImplicitSurface, cfg: &FlowConfig) -> Result<IntMatrix> {
    let src = generators(&d0.crit, 0);
    let dst = generators(&d1.crit, 0);
    let ends: Vec<usize> = src
        .par_iter()
        .map(|x0| {
            let p = flow_through(x0.location, h, surface, cfg, false, span(h))?;
            settle(p, &d1.f, surface, &d1.crit, cfg, false, 0)
        })
        .collect::<Result<_>>()?;
    let mut m = IntMatrix::zeros(dst.len(), src.len());
    for (j, id) in ends.into_iter().enumerate() {
        let i = dst.iter().position(|c| c.id == id).expect("minimum of f1");
        m.set(i, j, 1);
    }
    Ok(m)
}

/// Winding number of a closed loop about `center`, seen from its normal.
fn winding(points: &[Vec3], center: &SurfacePoint) -> Result<i64> {
    let (e1, e2) = center.orientation_frame();
    let angles: Vec<f64> = points
        .iter()
        .map(|p| {
            let d = p - center.coords;
            d.dot(&e2).atan2(d.dot(&e1))
        })
        .collect();
    let mut total = 0.0;
    for k in 0..angles.len() {
        let mut step = angles[(k + 1) % angles.len()] - angles[k];
        step -= std::f64::consts::TAU * (step / std::f64::consts::TAU).round();
        if step.abs() > 0.5 * std::f64::consts::PI {
            return Err(Error::IllConditioned { angle: step.abs() });
        }
        total += step;
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}

/// Local degree of the backward flow map at `start`, as a product of the
/// windings of small loops carried over short time steps.
fn local_degree(start: SurfacePoint, h: &Homotopy, surface: &ImplicitSurface, cfg: &FlowConfig) -> Result<i64> {
    let (t0, t1) = span(h);
    let pieces = (2.0 * (t1 - t0)).ceil() as usize;
    let rho = 10.0 * cfg.capture_radius;
    let mut q = start;
    let mut degree = 1;
    for k in 0..pieces {
        let a = t0 + (t1 - t0) * k as f64 / pieces as f64;
        let b = t0 + (t1 - t0) * (k + 1) as f64 / pieces as f64;
        let (e1, e2) = q.orientation_frame();
        let next = flow_through(q, h, surface, cfg, true, (a, b))?;
        let loop_pts = (0..16)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / 16.0;
                let r = surface.project(&(q.coords + (e1 * th.cos() + e2 * th.sin()) * rho))?;
                Ok(flow_through(r, h, surface, cfg, true, (a, b))?.coords)
            })
            .collect::<Result<Vec<_>>>()?;
        degree *= winding(&loop_pts, &next)?;
        q = next;
    }
    Ok(degree)
}

fn degree_two(
    h: &Homotopy,
    d0: &MorseData,
    d1: &MorseData,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
) -> Result<(IntMatrix, Vec<i64>)> {
    let src = generators(&d0.crit, 2);
    let dst = generators(&d1.crit, 2);
    let results: Vec<(usize, i64)> = dst
        .par_iter()
        .map(|x1| {
            let p = flow_through(x1.location, h, surface, cfg, true, span(h))?;
            let x0 = settle(p, &d0.f, surface, &d0.crit, cfg, true, 2)?;
            Ok((x0, local_degree(x1.location, h, surface, cfg)?))
        })
        .collect::<Result<_>>()?;
    let mut m = IntMatrix::zeros(dst.len(), src.len());
    let mut windings = Vec::new();
    for (i, (x0, w)) in results.into_iter().enumerate() {
        let j = src.iter().position(|c| c.id == x0).expect("maximum of f0");
        m.set(i, j, src[j].unstable_orientation() * dst[i].unstable_orientation() * w);
        windings.push(w);
    }
    Ok((m, windings))
}

/// `W^u(x0; f0)` parameterized by `sigma`: `|sigma| <= 1` is the segment
/// `x0 + sigma*delta*u`, and `1 + k + a` is the `+u` ray at its `k`-th
/// sample flowed on for the fraction `a` of the next time step (likewise for
/// negative `sigma` and the `-u` ray).
struct UnstableCurve<'a> {
    x0: &'a CriticalPoint,
    rays: [FlowPath; 2],
    f0: &'a Expression,
    surface: &'a ImplicitSurface,
    cfg: &'a FlowConfig,
}

impl UnstableCurve<'_> {
    fn extent(&self, side: usize) -> f64 {
        (self.rays[side].points.len() - 1) as f64
    }

    fn seed(&self, sigma: f64) -> Result<SurfacePoint> {
        if sigma.abs() <= 1.0 {
            return self.surface.project(&(self.x0.coords() + self.x0.unstable_direction() * (sigma * self.cfg.shoot_radius)));
        }
        let side = usize::from(sigma < 0.0);
        let ray = &self.rays[side];
        let r = (sigma.abs() - 1.0).min(self.extent(side));
        let k = (r.floor() as usize).min(ray.points.len() - 1);
        let a = r - k as f64;
        if a <= 0.0 || k + 1 >= ray.points.len() {
            return Ok(ray.points[k]);
        }
        let dt = a * (ray.times[k + 1] - ray.times[k]);
        let field = GradientField::descent(self.f0, self.surface);
        Ok(*integrate_flow(ray.points[k], &field, self.cfg, FlowStop::until(0.0, dt))?.end())
    }
}

/// Image of `W^u(x0; f0)` under the flow map, refined until no segment is
/// longer than `max_seg`.
///
/// The polyline is carried forward in short time steps and refined after
/// each one: a single long step can fold the curve so that both ends of a
/// segment land near the same minimum while its middle passes elsewhere.
fn image_curve(curve: &UnstableCurve<'_>, h: &Homotopy, max_seg: f64) -> Result<Vec<Vec3>> {
    let (t0, t1) = (-h.radius, h.radius);
    let steps = (2.0 * (t1 - t0)).ceil() as usize;
    let time = |k: usize| t0 + (t1 - t0) * k as f64 / steps as f64;
    let advance = |p: SurfacePoint, a: f64, b: f64| flow_through(p, h, curve.surface, curve.cfg, false, (a, b));
    // The linear part is sampled off-centre so the saddle is never a vertex.
    let n_lin = 15;
    let mut sigmas: Vec<f64> = (0..curve.rays[1].points.len()).rev().map(|k| -1.0 - k as f64).collect();
    sigmas.extend((0..n_lin).map(|k| -1.0 + (k as f64 + 0.37) * 2.0 / n_lin as f64));
    sigmas.extend((0..curve.rays[0].points.len()).map(|k| 1.0 + k as f64));
    let mut points: Vec<SurfacePoint> = sigmas.par_iter().map(|&s| curve.seed(s)).collect::<Result<_>>()?;
    for k in 0..=steps {
        if k > 0 {
            let (a, b) = (time(k - 1), time(k));
            points = points.into_par_iter().map(|p| advance(p, a, b)).collect::<Result<_>>()?;
        }
        let now = time(k);
        let mut passes = 0;
        loop {
            let split: Vec<usize> = (0..sigmas.len() - 1)
                .filter(|&i| (points[i + 1].coords - points[i].coords).norm() > max_seg)
                .collect();
            if split.is_empty() {
                break;
            }
            passes += 1;
            if passes > 40 || split.iter().any(|&i| sigmas[i + 1] - sigmas[i] < 1e-12) {
                return Err(Error::NonGenericHomotopy("image of an unstable curve could not be resolved".into()));
            }
            let mids: Vec<f64> = split.iter().map(|&i| 0.5 * (sigmas[i] + sigmas[i + 1])).collect();
            let new: Vec<SurfacePoint> = mids.par_iter().map(|&s| advance(curve.seed(s)?, t0, now)).collect::<Result<_>>()?;
            let mut s2 = Vec::with_capacity(sigmas.len() + mids.len());
            let mut p2 = Vec::with_capacity(sigmas.len() + mids.len());
            let mut next = 0;
            for i in 0..sigmas.len() {
                s2.push(sigmas[i]);
                p2.push(points[i]);
                if next < split.len() && split[next] == i {
                    s2.push(mids[next]);
                    p2.push(new[next]);
                    next += 1;
                }
            }
            sigmas = s2;
            points = p2;
        }
    }
    Ok(points.into_iter().map(|p| p.coords).collect())
}

fn degree_one(
    h: &Homotopy,
    d0: &MorseData,
    d1: &MorseData,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
) -> Result<(IntMatrix, Vec<ContinuationCrossing>)> {
    let src = generators(&d0.crit, 1);
    let dst = generators(&d1.crit, 1);
    let max_seg = 0.01 * surface.diameter();
    let mut m = IntMatrix::zeros(dst.len(), src.len());
    let mut records = Vec::new();
    for (j, x0) in src.iter().enumerate() {
        let ray = |side: f64| -> Result<FlowPath> {
            let p = surface.project(&(x0.coords() + x0.unstable_direction() * (side * cfg.shoot_radius)))?;
            let field = GradientField::descent(&d0.f, surface);
            let path = integrate_flow(p, &field, cfg, FlowStop::capture(&d0.crit))?;
            match path.outcome {
                FlowOutcome::ConvergedTo(id) if d0.crit[id].index == 0 => Ok(path),
                FlowOutcome::ConvergedTo(id) => Err(Error::MorseSmaleFailure { from: x0.id, to: id }),
                _ => Err(Error::Inconclusive(format!("unstable ray of saddle {} timed out", x0.id))),
            }
        };
        let curve = UnstableCurve { x0, rays: [ray(1.0)?, ray(-1.0)?], f0: &d0.f, surface, cfg };
        let image = image_curve(&curve, h, max_seg)?;
        for (i, x1) in dst.iter().enumerate() {
            let stable = d1.census.stable_curve(x1.id).ok_or(Error::MissingModuli { source_id: x1.id, target_id: x1.id })?;
            let crossings = polyline_crossings(&image, &stable.points, surface)?;
            check_transverse(&crossings, CROSSING_MARGIN_DEG).map_err(|e| {
                Error::NonGenericHomotopy(format!("continuation from saddle {} to saddle {}: {e}", x0.id, x1.id))
            })?;
            let mut n = 0;
            for c in crossings {
                n += c.sign;
                records.push(ContinuationCrossing {
                    source: x0.id,
                    target: x1.id,
                    sign: c.sign,
                    point: c.point,
                    angle_deg: c.angle_deg,
                });
            }
            m.set(i, j, n);
        }
    }
    Ok((m, records))
}

/// Continuation matrices of the homotopy from `d0.f` to `d1.f`.
pub fn continuation_matrix(
    h: &Homotopy,
    d0: &MorseData,
    d1: &MorseData,
    surface: &ImplicitSurface,
    cfg: &FlowConfig,
    coefficients: Coefficients,
) -> Result<ContinuationReport> {
    let m0 = degree_zero(h, d0, d1, surface, cfg)?;
    let (m1, crossings) = degree_one(h, d0, d1, surface, cfg)?;
    let (m2, windings) = degree_two(h, d0, d1, surface, cfg)?;
    let mut matrix = ContinuationMatrix { degrees: [m0, m1, m2], coefficients: Coefficients::Z };
    if coefficients == Coefficients::Z2 {
        matrix = matrix.reduced_mod2();
    }
    Ok(ContinuationReport { matrix, crossings, windings })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainMapReport {
    /// `Phi_{k-1} d_k` for `k = 1, 2`.
    pub lhs: Vec<IntMatrix>,
    /// `d_k Phi_k` for `k = 1, 2`.
    pub rhs: Vec<IntMatrix>,
    pub pass: bool,
}

/// Check `Phi d = d Phi` exactly over the coefficient ring of `c0`.
pub fn verify_chain_map(phi: &ContinuationMatrix, c0: &MorseComplex, c1: &MorseComplex) -> Result<ChainMapReport> {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for k in 1..=2 {
        let mut l = phi.degrees[k - 1].mul(&c0.d(k))?;
        let mut r = c1.d(k).mul(&phi.degrees[k])?;
        if c0.coefficients == Coefficients::Z2 {
            l = l.mod2();
            r = r.mod2();
        }
        lhs.push(l);
        rhs.push(r);
    }
    let pass = lhs == rhs;
    Ok(ChainMapReport { lhs, rhs, pass })
}

/// Maps induced on homology, one matrix per degree, in the bases chosen by
/// [`complex_homology_basis`] (or its binary counterpart).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedMaps {
    pub maps: Vec<IntMatrix>,
    pub determinants: Vec<i64>,
}

fn induced_degree(phi: &IntMatrix, c0: &MorseComplex, c1: &MorseComplex, k: usize) -> Result<IntMatrix> {
    match c0.coefficients {
        Coefficients::Z => {
            let b0 = complex_homology_basis(c0, k)?;
            let b1 = complex_homology_basis(c1, k)?;
            induced_map(phi, &b0, &b1)
        }
        Coefficients::Z2 => {
            let b0 = gf2::homology_basis(&c0.d(k), &c0.d(k + 1));
            let b1 = gf2::homology_basis(&c1.d(k), &c1.d(k + 1));
            let mut m = IntMatrix::zeros(b1.cols(), b0.cols());
            for j in 0..b0.cols() {
                let image = phi.apply(&b0.column(j))?;
                let coords = gf2::coordinates(&b1, &c1.d(k + 1), &image)
                    .ok_or_else(|| Error::CheckFailed(format!("image of a degree-{k} cycle is not a cycle")))?;
                for (i, v) in coords.into_iter().enumerate() {
                    m.set(i, j, v);
                }
            }
            Ok(m)
        }
    }
}

/// Induced maps with an isomorphism check in every degree.
pub fn induced_homology_map(phi: &ContinuationMatrix, c0: &MorseComplex, c1: &MorseComplex) -> Result<InducedMaps> {
    let mut maps = Vec::new();
    let mut determinants = Vec::new();
    for k in 0..3 {
        let m = induced_degree(&phi.degrees[k], c0, c1, k)?;
        if m.rows() != m.cols() {
            return Err(Error::NotIso { degree: k, det: 0 });
        }
        let det = match c0.coefficients {
            Coefficients::Z => m.det()?,
            Coefficients::Z2 => i64::from(crate::complex::rank_mod2(&m) == m.rows()),
        };
        if det.abs() != 1 {
            return Err(Error::NotIso { degree: k, det });
        }
        maps.push(m);
        determinants.push(det);
    }
    Ok(InducedMaps { maps, determinants })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctorialityReport {
    /// `H(Phi_21) H(Phi_10)` per degree.
    pub composite: Vec<IntMatrix>,
    /// `H(Phi_20)` per degree.
    pub direct: Vec<IntMatrix>,
    pub pass: bool,
}

/// Continuation data for a triple of functions on one surface.
pub struct Triple<'a> {
    pub data: [&'a MorseData; 3],
    pub phi10: &'a ContinuationMatrix,
    pub phi21: &'a ContinuationMatrix,
    pub phi20: &'a ContinuationMatrix,
}

/// `H(Phi_21) H(Phi_10) = H(Phi_20)` in every degree.
pub fn verify_functoriality(t: &Triple<'_>, coefficients: Coefficients) -> Result<FunctorialityReport> {
    let c: Vec<MorseComplex> = t.data.iter().map(|d| d.complex(coefficients)).collect::<Result<_>>()?;
    let h10 = induced_homology_map(t.phi10, &c[0], &c[1])?;
    let h21 = induced_homology_map(t.phi21, &c[1], &c[2])?;
    let h20 = induced_homology_map(t.phi20, &c[0], &c[2])?;
    let mut composite = Vec::new();
    for k in 0..3 {
        let mut m = h21.maps[k].mul(&h10.maps[k])?;
        if coefficients == Coefficients::Z2 {
            m = m.mod2();
        }
        composite.push(m);
    }
    let pass = composite == h20.maps;
    Ok(FunctorialityReport { composite, direct: h20.maps, pass })
}

/// Whether two chain maps between the same complexes induce the same map on
/// the free part of homology.
pub fn same_induced_map(a: &ContinuationMatrix, b: &ContinuationMatrix, c0: &MorseComplex, c1: &MorseComplex) -> Result<bool> {
    for k in 0..3 {
        let ma = induced_degree(&a.degrees[k], c0, c1, k)?;
        let mb = induced_degree(&b.degrees[k], c0, c1, k)?;
        if ma != mb {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramps_are_constant_outside_the_window() {
        let f = Expression::parse("z").unwrap();
        for ramp in [Ramp::Smoothstep, Ramp::Smootherstep] {
            let h = Homotopy::new(f.clone(), f.clone()).with_ramp(ramp);
            assert_eq!(h.beta(-5.0), 0.0);
            assert_eq!(h.beta(-100.0), 0.0);
            assert_eq!(h.beta(5.0), 1.0);
            assert_eq!(h.beta(7.0), 1.0);
            assert!((h.beta(0.0) - 0.5).abs() < 1e-15);
            let vals: Vec<f64> = (0..=100).map(|k| h.beta(-5.0 + 0.1 * k as f64)).collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}
