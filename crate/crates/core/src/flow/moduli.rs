//! Connecting trajectories between critical points of adjacent index.
//!
//! Saddle to minimum: the two rays of the one-dimensional unstable manifold,
//! launched from `x +- delta*u`.
//!
//! Maximum to saddle: the stable manifold of a saddle `y` is a curve with two
//! branches; following each branch backwards in time (ascent from
//! `y +- delta*s`) ends at the maximum it comes from. Each branch is one
//! element of the moduli space of that maximum and `y`, and this list is
//! complete because every trajectory into `y` arrives along one of the two
//! branches.

use rayon::prelude::*;

use super::{integrate_flow, tangential_gradient, FlowConfig, FlowOutcome, FlowPath, FlowStop, GradientField};
use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, SurfacePoint, Vec3};
use crate::scalarfield::Expression;

/// An unparameterized flow line from `source` to `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub source: usize,
    pub target: usize,
    /// Orientation sign.
    pub sign: i64,
    /// Launch side: which ray of the saddle (`+u`/`-u`) for a saddle-minimum
    /// trajectory, which stable branch (`+s`/`-s`) for a maximum-saddle one.
    pub branch: i64,
    /// Crossing of the level halfway between the endpoint values.
    pub anchor: Vec3,
    /// From the source to the target, both included.
    pub samples: Vec<SurfacePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuliSpace {
    pub source: usize,
    pub target: usize,
    pub trajectories: Vec<Trajectory>,
}

impl ModuliSpace {
    /// Signed count `n(x, y)`.
    pub fn n(&self) -> i64 {
        self.trajectories.iter().map(|t| t.sign).sum()
    }

    pub fn count(&self) -> usize {
        self.trajectories.len()
    }
}

/// Sampled stable manifold of a saddle: ordered from the end of the `-s`
/// branch, through the saddle, to the end of the `+s` branch.
///
/// The saddle itself is not a vertex; it lies on the segment joining
/// `y - delta*s` and `y + delta*s`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableCurve {
    pub saddle: usize,
    pub points: Vec<Vec3>,
    /// Maximum reached by the `-s` and `+s` branches.
    pub ends: [Option<usize>; 2],
}

/// All moduli spaces of index difference one, plus the saddle stable curves.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowCensus {
    /// One entry per index-adjacent pair, sorted by `(source, target)`.
    pub moduli: Vec<ModuliSpace>,
    pub stable_curves: Vec<StableCurve>,
}

impl FlowCensus {
    pub fn get(&self, source: usize, target: usize) -> Option<&ModuliSpace> {
        self.moduli.iter().find(|m| m.source == source && m.target == target)
    }

    pub fn stable_curve(&self, saddle: usize) -> Option<&StableCurve> {
        self.stable_curves.iter().find(|c| c.saddle == saddle)
    }

    pub fn trajectories_from(&self, source: usize) -> impl Iterator<Item = &Trajectory> {
        self.moduli.iter().filter(move |m| m.source == source).flat_map(|m| &m.trajectories)
    }

    pub fn trajectories_into(&self, target: usize) -> impl Iterator<Item = &Trajectory> {
        self.moduli.iter().filter(move |m| m.target == target).flat_map(|m| &m.trajectories)
    }
}

fn shoot(
    start: &Vec3,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
    ascend: bool,
) -> Result<FlowPath> {
    let p0 = surface.project(start)?;
    let field = if ascend { GradientField::ascent(f, surface) } else { GradientField::descent(f, surface) };
    integrate_flow(p0, &field, cfg, FlowStop::capture(crit))
}

/// The minimum whose basin contains `p`.
pub fn basin_of(
    p: &SurfacePoint,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<usize> {
    let field = GradientField::descent(f, surface);
    let path = integrate_flow(*p, &field, cfg, FlowStop::capture(crit))?;
    match path.outcome {
        FlowOutcome::ConvergedTo(id) if crit[id].index == 0 => Ok(id),
        FlowOutcome::ConvergedTo(id) => Err(Error::Inconclusive(format!(
            "descent from {:?} stopped at critical point {id} of index {}",
            p.coords_array(),
            crit[id].index
        ))),
        _ => Err(Error::Inconclusive(format!("descent from {:?} timed out", p.coords_array()))),
    }
}

/// Point where `f` crosses `level` between consecutive samples, moved onto the
/// level set along the gradient.
fn anchor_at(samples: &[SurfacePoint], f: &Expression, surface: &ImplicitSurface, level: f64) -> Result<Vec3> {
    let value = |q: &Vec3| f.eval_f64([q.x, q.y, q.z]);
    let mut prev = samples[0].coords;
    let mut fprev = value(&prev)?;
    for s in &samples[1..] {
        let q = s.coords;
        let fq = value(&q)?;
        if fprev >= level && fq <= level {
            let w = if fprev > fq { (fprev - level) / (fprev - fq) } else { 0.5 };
            let mut p = surface.project(&(prev + (q - prev) * w))?;
            for _ in 0..30 {
                let fp = value(&p.coords)?;
                if (fp - level).abs() <= 1e-13 * (1.0 + level.abs()) {
                    break;
                }
                let g = tangential_gradient(f, surface, &p.coords)?;
                p = surface.project(&(p.coords - g * ((fp - level) / g.norm_squared())))?;
            }
            return Ok(p.coords);
        }
        prev = q;
        fprev = fq;
    }
    Err(Error::Inconclusive("trajectory does not cross its middle level".into()))
}

fn build_trajectory(
    source: &CriticalPoint,
    target: &CriticalPoint,
    middle: Vec<SurfacePoint>,
    branch: i64,
    f: &Expression,
    surface: &ImplicitSurface,
) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity(middle.len() + 2);
    samples.push(source.location);
    samples.extend(middle);
    samples.push(target.location);
    let level = 0.5 * (source.f_value + target.f_value);
    let anchor = anchor_at(&samples, f, surface, level)?;
    Ok(Trajectory { source: source.id, target: target.id, sign: 0, branch, anchor, samples })
}

fn saddle_ray(
    x: &CriticalPoint,
    side: i64,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<Trajectory> {
    let start = x.coords() + x.unstable_direction() * (side as f64 * cfg.shoot_radius);
    let path = shoot(&start, f, surface, crit, cfg, false)?;
    match path.outcome {
        FlowOutcome::ConvergedTo(id) if crit[id].index == 0 => {
            let mut t = build_trajectory(x, &crit[id], path.points, side, f, surface)?;
            t.sign = side;
            Ok(t)
        }
        FlowOutcome::ConvergedTo(id) => Err(Error::MorseSmaleFailure { from: x.id, to: id }),
        _ => Err(Error::Inconclusive(format!("unstable ray {side:+} of saddle {} timed out", x.id))),
    }
}

/// The two rays of `W^u(x)` for a saddle `x`: `+u` with sign +1, then `-u` with sign -1.
pub fn enumerate_saddle_rays(
    x: &CriticalPoint,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<Vec<Trajectory>> {
    if x.index != 1 {
        return Err(Error::Invalid(format!("critical point {} is not a saddle", x.id)));
    }
    Ok(vec![saddle_ray(x, 1, f, surface, crit, cfg)?, saddle_ray(x, -1, f, surface, crit, cfg)?])
}

/// Backward flow along the stable branch `side` of saddle `y`.
fn stable_branch(
    y: &CriticalPoint,
    side: i64,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<FlowPath> {
    let start = y.coords() + y.stable_direction() * (side as f64 * cfg.shoot_radius);
    let path = shoot(&start, f, surface, crit, cfg, true)?;
    match path.outcome {
        FlowOutcome::ConvergedTo(id) if crit[id].index == 1 => Err(Error::MorseSmaleFailure { from: id, to: y.id }),
        _ => Ok(path),
    }
}

fn branch_trajectory(
    y: &CriticalPoint,
    side: i64,
    path: FlowPath,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
) -> Result<Trajectory> {
    let FlowOutcome::ConvergedTo(id) = path.outcome else {
        return Err(Error::Inconclusive(format!("stable branch {side:+} of saddle {} timed out", y.id)));
    };
    let x = &crit[id];
    let mut middle = path.points;
    middle.reverse();
    let mut t = build_trajectory(x, y, middle, side, f, surface)?;
    t.sign = trajectory_sign_transport(&t, x, y)?;
    Ok(t)
}

fn curve_from_branches(y: &CriticalPoint, minus: &FlowPath, plus: &FlowPath, crit: &[CriticalPoint]) -> StableCurve {
    let end = |p: &FlowPath| match p.outcome {
        FlowOutcome::ConvergedTo(id) => Some(id),
        _ => None,
    };
    let mut points: Vec<Vec3> = Vec::with_capacity(minus.points.len() + plus.points.len() + 2);
    if let Some(id) = end(minus) {
        points.push(crit[id].coords());
    }
    points.extend(minus.points.iter().rev().map(|p| p.coords));
    points.extend(plus.points.iter().map(|p| p.coords));
    if let Some(id) = end(plus) {
        points.push(crit[id].coords());
    }
    StableCurve { saddle: y.id, points, ends: [end(minus), end(plus)] }
}

/// Sampled `W^s(y)` of a saddle, oriented by its stable direction.
pub fn stable_curve(
    y: &CriticalPoint,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<StableCurve> {
    if y.index != 1 {
        return Err(Error::Invalid(format!("critical point {} is not a saddle", y.id)));
    }
    let minus = stable_branch(y, -1, f, surface, crit, cfg)?;
    let plus = stable_branch(y, 1, f, surface, crit, cfg)?;
    Ok(curve_from_branches(y, &minus, &plus, crit))
}

/// Trajectories from the maximum `x` to the saddle `y`.
pub fn enumerate_max_to_saddle(
    x: &CriticalPoint,
    y: &CriticalPoint,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<ModuliSpace> {
    if x.index != 2 || y.index != 1 {
        return Err(Error::Invalid(format!("({}, {}) is not a maximum-saddle pair", x.id, y.id)));
    }
    let mut trajectories = Vec::new();
    for side in [1, -1] {
        let path = stable_branch(y, side, f, surface, crit, cfg)?;
        if path.outcome == FlowOutcome::ConvergedTo(x.id) {
            trajectories.push(branch_trajectory(y, side, path, f, surface, crit)?);
        }
    }
    finish_moduli(x.id, y.id, trajectories, cfg)
}

/// Orientation sign of a maximum-to-saddle trajectory.
///
/// The unstable direction of `y` is carried backwards along the samples by
/// projecting onto each tangent plane and onto the normal line of the
/// trajectory, keeping its side. At `x` the pair (flow direction, carried
/// vector) is compared with the orientation of `W^u(x)`.
pub fn trajectory_sign_transport(traj: &Trajectory, x: &CriticalPoint, y: &CriticalPoint) -> Result<i64> {
    let s = &traj.samples;
    if s.len() < 3 {
        return Err(Error::IllConditioned { angle: 0.0 });
    }
    let min_sin = 1e-4f64.sin();
    let direction = |k: usize| -> Vec3 {
        let a = s[k.saturating_sub(1)].coords;
        let b = s[(k + 1).min(s.len() - 1)].coords;
        let d = s[k].tangent_project(&(b - a)).vec;
        d / d.norm()
    };
    let mut w = y.unstable_direction();
    for k in (1..s.len() - 1).rev() {
        let t = direction(k);
        let pw = s[k].tangent_project(&w).vec;
        let len = pw.norm();
        let perp = pw - t * pw.dot(&t);
        let plen = perp.norm();
        if !(plen > min_sin * len) {
            return Err(Error::IllConditioned { angle: (plen / len).asin() });
        }
        w = perp / plen;
    }
    let start = &s[0];
    let t0 = start.tangent_project(&(s[1].coords - start.coords)).vec;
    let w0 = start.tangent_project(&w).vec;
    let orient = start.area_form(&t0, &w0);
    if orient == 0.0 || !orient.is_finite() {
        return Err(Error::IllConditioned { angle: 0.0 });
    }
    Ok(orient.signum() as i64 * x.unstable_orientation())
}

fn finish_moduli(source: usize, target: usize, mut trajectories: Vec<Trajectory>, cfg: &FlowConfig) -> Result<ModuliSpace> {
    trajectories.sort_by(|a, b| {
        (0..3).map(|i| a.anchor[i].total_cmp(&b.anchor[i])).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    for (i, a) in trajectories.iter().enumerate() {
        for b in &trajectories[i + 1..] {
            if (a.anchor - b.anchor).norm() <= 10.0 * cfg.capture_radius {
                return Err(Error::Inconclusive(format!(
                    "two trajectories from {source} to {target} share an anchor"
                )));
            }
        }
    }
    Ok(ModuliSpace { source, target, trajectories })
}

enum Task {
    Ray(usize, i64),
    Branch(usize, i64),
}

enum Done {
    Ray(Trajectory),
    Branch(usize, i64, FlowPath),
}

/// Every moduli space of index difference one, and the stable curves.
///
/// Independent shots run in parallel; results are assembled in a fixed order.
pub fn enumerate_moduli(
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<FlowCensus> {
    let saddles: Vec<&CriticalPoint> = crit.iter().filter(|c| c.index == 1).collect();
    let tasks: Vec<Task> = saddles
        .iter()
        .flat_map(|c| [Task::Ray(c.id, 1), Task::Ray(c.id, -1), Task::Branch(c.id, -1), Task::Branch(c.id, 1)])
        .collect();
    let results: Vec<Result<Done>> = tasks
        .par_iter()
        .map(|task| match *task {
            Task::Ray(id, side) => saddle_ray(&crit[id], side, f, surface, crit, cfg).map(Done::Ray),
            Task::Branch(id, side) => {
                stable_branch(&crit[id], side, f, surface, crit, cfg).map(|p| Done::Branch(id, side, p))
            }
        })
        .collect();
    let mut rays = Vec::new();
    let mut branches = Vec::new();
    for r in results {
        match r? {
            Done::Ray(t) => rays.push(t),
            Done::Branch(id, side, p) => branches.push((id, side, p)),
        }
    }
    let mut stable_curves = Vec::new();
    for pair in branches.chunks(2) {
        let y = &crit[pair[0].0];
        stable_curves.push(curve_from_branches(y, &pair[0].2, &pair[1].2, crit));
    }
    let built: Vec<Result<Trajectory>> = branches
        .into_par_iter()
        .map(|(id, side, path)| branch_trajectory(&crit[id], side, path, f, surface, crit))
        .collect();
    let mut all = rays;
    for t in built {
        all.push(t?);
    }
    let mut moduli = Vec::new();
    for x in crit {
        for y in crit.iter().filter(|y| y.index + 1 == x.index) {
            let ts: Vec<Trajectory> =
                all.iter().filter(|t| t.source == x.id && t.target == y.id).cloned().collect();
            moduli.push(finish_moduli(x.id, y.id, ts, cfg)?);
        }
    }
    Ok(FlowCensus { moduli, stable_curves })
}
