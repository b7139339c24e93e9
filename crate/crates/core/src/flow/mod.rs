//! Negative gradient flow on the surface and the trajectories it produces.
//!
//! Vector fields are evaluated in ambient coordinates: at a point `q` near the
//! surface the velocity is the tangential part of the ambient gradient with
//! respect to the normal `grad phi(q) / |grad phi(q)|`. Every accepted
//! Runge-Kutta step is pulled back onto the surface by Newton projection.

mod census;
mod moduli;

pub use census::{launch_circle_census, CensusReport};
pub use moduli::{
    basin_of, enumerate_max_to_saddle, enumerate_moduli, enumerate_saddle_rays, stable_curve,
    trajectory_sign_transport, FlowCensus, ModuliSpace, StableCurve, Trajectory,
};

use serde::{Deserialize, Serialize};

use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, SurfacePoint, Vec3};
use crate::scalarfield::Expression;

/// Flow tolerances; lengths are relative to the bounding box diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowSettings {
    /// Per-step local error bound of the embedded Runge-Kutta pair.
    pub rk_tol: f64,
    pub max_time: f64,
    pub capture_radius: f64,
    /// Offset `delta` from a critical point when launching along a direction.
    pub shoot_radius: f64,
    pub bisection_tol: f64,
    /// Cap on the ambient displacement of a single step.
    pub max_step: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        FlowSettings {
            rk_tol: 1e-9,
            max_time: 1e4,
            capture_radius: 1e-5,
            shoot_radius: 1e-3,
            bisection_tol: 1e-12,
            max_step: 0.02,
        }
    }
}

impl FlowSettings {
    /// Scale the integrator and bisection tolerances by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        FlowSettings { rk_tol: self.rk_tol * factor, bisection_tol: self.bisection_tol * factor, ..self }
    }

    pub fn resolve(&self, surface: &ImplicitSurface) -> FlowConfig {
        let d = surface.diameter();
        FlowConfig {
            rk_tol: self.rk_tol,
            max_time: self.max_time,
            capture_radius: self.capture_radius * d,
            shoot_radius: self.shoot_radius * d,
            bisection_tol: self.bisection_tol,
            max_step: self.max_step * d,
        }
    }
}

/// Flow tolerances with lengths in ambient units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub rk_tol: f64,
    pub max_time: f64,
    pub capture_radius: f64,
    pub shoot_radius: f64,
    pub bisection_tol: f64,
    pub max_step: f64,
}

impl FlowConfig {
    pub fn for_surface(surface: &ImplicitSurface) -> Self {
        FlowSettings::default().resolve(surface)
    }
}

/// A time-dependent tangent vector field.
pub trait TangentField: Sync {
    fn surface(&self) -> &ImplicitSurface;
    /// Velocity at ambient point `q` (near the surface) and time `t`.
    fn velocity(&self, q: &Vec3, t: f64) -> Result<Vec3>;
}

/// `direction * grad_M f`; `direction = -1` is the descent flow.
#[derive(Debug, Clone, Copy)]
pub struct GradientField<'a> {
    pub f: &'a Expression,
    pub surface: &'a ImplicitSurface,
    pub direction: f64,
}

impl<'a> GradientField<'a> {
    pub fn descent(f: &'a Expression, surface: &'a ImplicitSurface) -> Self {
        GradientField { f, surface, direction: -1.0 }
    }

    pub fn ascent(f: &'a Expression, surface: &'a ImplicitSurface) -> Self {
        GradientField { f, surface, direction: 1.0 }
    }
}

pub(crate) fn tangential_gradient(f: &Expression, surface: &ImplicitSurface, q: &Vec3) -> Result<Vec3> {
    let n = surface.unit_normal(q)?;
    let g = f.jet1([q.x, q.y, q.z])?.gradient;
    Ok(g - n * g.dot(&n))
}

impl TangentField for GradientField<'_> {
    fn surface(&self) -> &ImplicitSurface {
        self.surface
    }
    fn velocity(&self, q: &Vec3, _t: f64) -> Result<Vec3> {
        Ok(tangential_gradient(self.f, self.surface, q)? * self.direction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowOutcome {
    /// Came within the capture radius of the critical point with this id.
    ConvergedTo(usize),
    TimedOut,
    /// Reached the requested end time.
    Finished,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowPath {
    pub points: Vec<SurfacePoint>,
    pub times: Vec<f64>,
    pub outcome: FlowOutcome,
}

impl FlowPath {
    pub fn end(&self) -> &SurfacePoint {
        self.points.last().expect("flow path has a start point")
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step: fifth-order update and error estimate.
fn dopri_step<F: TangentField + ?Sized>(field: &F, q: &Vec3, t: f64, h: f64, k0: Vec3) -> Result<(Vec3, f64)> {
    let mut k = [Vec3::zeros(); 7];
    k[0] = k0;
    for s in 1..7 {
        let mut y = *q;
        for (j, kj) in k.iter().enumerate().take(s) {
            y += kj * (h * A[s][j]);
        }
        k[s] = field.velocity(&y, t + C[s] * h)?;
    }
    let mut next = *q;
    let mut err = Vec3::zeros();
    for s in 0..7 {
        next += k[s] * (h * B5[s]);
        err += k[s] * (h * E[s]);
    }
    Ok((next, err.amax()))
}

/// Where and when to stop a flow.
#[derive(Debug, Clone, Copy)]
pub struct FlowStop<'a> {
    pub t0: f64,
    /// Stop exactly at this time if given.
    pub t_end: Option<f64>,
    /// Critical points that capture the flow.
    pub stops: &'a [CriticalPoint],
}

impl<'a> FlowStop<'a> {
    pub fn capture(stops: &'a [CriticalPoint]) -> Self {
        FlowStop { t0: 0.0, t_end: None, stops }
    }

    pub fn until(t0: f64, t_end: f64) -> Self {
        FlowStop { t0, t_end: Some(t_end), stops: &[] }
    }
}

fn captured_by(stops: &[CriticalPoint], q: &Vec3, radius: f64) -> Option<usize> {
    stops.iter().find(|c| (c.location.coords - q).norm() < radius).map(|c| c.id)
}

/// Integrate `field` from `p0` with adaptive RK45 and reprojection.
///
/// The flow is captured by a stop point once it is within the capture radius
/// and the speed is still decreasing.
pub fn integrate_flow<F: TangentField + ?Sized>(
    p0: SurfacePoint,
    field: &F,
    cfg: &FlowConfig,
    stop: FlowStop<'_>,
) -> Result<FlowPath> {
    let surface = field.surface();
    let mut points = vec![p0];
    let mut t = stop.t0;
    let mut times = vec![t];
    if let Some(id) = captured_by(stop.stops, &p0.coords, cfg.capture_radius) {
        return Ok(FlowPath { points, times, outcome: FlowOutcome::ConvergedTo(id) });
    }
    let mut q = p0.coords;
    let mut v = field.velocity(&q, t)?;
    let mut speed = v.norm();
    let mut h: f64 = 1e-2;
    loop {
        if let Some(end) = stop.t_end {
            if end - t <= 1e-12 * end.abs().max(1.0) {
                return Ok(FlowPath { points, times, outcome: FlowOutcome::Finished });
            }
            h = h.min(end - t);
        } else if t - stop.t0 > cfg.max_time {
            return Ok(FlowPath { points, times, outcome: FlowOutcome::TimedOut });
        }
        if speed * h > cfg.max_step {
            h = cfg.max_step / speed;
        }
        if h < 1e-13 * t.abs().max(1.0) {
            return Err(Error::StepFailure { t });
        }
        let (next, err) = dopri_step(field, &q, t, h, v)?;
        if !err.is_finite() || err > cfg.rk_tol {
            let factor = if err.is_finite() { (0.9 * (cfg.rk_tol / err).powf(0.2)).max(0.1) } else { 0.1 };
            h *= factor.min(0.9);
            continue;
        }
        if !surface.contains(&next) {
            return Err(Error::LeftBoundingBox { at: [next.x, next.y, next.z] });
        }
        let p = surface.project(&next).map_err(|e| match e {
            Error::OutsideBox { at } => Error::LeftBoundingBox { at },
            e => e,
        })?;
        t += h;
        q = p.coords;
        points.push(p);
        times.push(t);
        let grow = if err > 0.0 { (0.9 * (cfg.rk_tol / err).powf(0.2)).min(5.0) } else { 5.0 };
        h *= grow.max(1.0);
        let nv = field.velocity(&q, t)?;
        let nspeed = nv.norm();
        if let Some(id) = captured_by(stop.stops, &q, cfg.capture_radius) {
            if nspeed <= speed {
                return Ok(FlowPath { points, times, outcome: FlowOutcome::ConvergedTo(id) });
            }
        }
        v = nv;
        speed = nspeed;
    }
}
