//! Launch-circle census around a maximum.
//!
//! Directions on the circle of radius `delta` around a maximum are descended
//! to minima. The trajectories leaving the maximum cut the circle into arcs; on
//! each arc the minimum reached must be constant, and just beside a
//! trajectory into the saddle `y` the descent must follow one of the two
//! unstable rays of `y`: the ray with the trajectory's sign on the side of
//! increasing angle, the other ray on the side of decreasing angle. This is an
//! independent check of the counts and the signs.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::{basin_of, FlowCensus, FlowConfig, Trajectory};
use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::geometry::{ImplicitSurface, Vec3};
use crate::scalarfield::Expression;

/// Angular offset of the side probes beside each trajectory.
const SIDE_OFFSET: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub maximum: usize,
    pub directions: usize,
    /// Launch angles of the trajectories leaving the maximum, ascending.
    pub trajectory_angles: Vec<f64>,
    /// Minimum reached on each arc following a trajectory angle.
    pub arc_minima: Vec<usize>,
    pub consistent: bool,
    pub detail: Option<String>,
}

fn exit_angle(t: &Trajectory, x: &CriticalPoint, delta: f64) -> f64 {
    let (e1, e2) = (x.unstable_frame[0], x.unstable_frame[1]);
    let c = x.coords();
    let mut prev = c;
    let mut dprev = 0.0;
    let mut hit = t.samples.last().unwrap().coords;
    for s in &t.samples[1..] {
        let d = (s.coords - c).norm();
        if d >= delta {
            let w = (delta - dprev) / (d - dprev);
            hit = prev + (s.coords - prev) * w;
            break;
        }
        prev = s.coords;
        dprev = d;
    }
    let v = hit - c;
    v.dot(&e2).atan2(v.dot(&e1)).rem_euclid(TAU)
}

fn launch(x: &CriticalPoint, theta: f64, delta: f64) -> Vec3 {
    x.coords() + (x.unstable_frame[0] * theta.cos() + x.unstable_frame[1] * theta.sin()) * delta
}

/// Check the arcs of the launch circle of the maximum `x` against `census`.
pub fn launch_circle_census(
    x: &CriticalPoint,
    f: &Expression,
    surface: &ImplicitSurface,
    crit: &[CriticalPoint],
    census: &FlowCensus,
    cfg: &FlowConfig,
    directions: usize,
) -> Result<CensusReport> {
    if x.index != 2 {
        return Err(Error::Invalid(format!("critical point {} is not a maximum", x.id)));
    }
    let delta = cfg.shoot_radius;
    let mut outgoing: Vec<(f64, &Trajectory)> =
        census.trajectories_from(x.id).map(|t| (exit_angle(t, x, delta), t)).collect();
    outgoing.sort_by(|a, b| a.0.total_cmp(&b.0));

    let ray_target = |y: usize, sign: i64| -> Option<usize> {
        census.trajectories_from(y).find(|r| r.sign == sign).map(|r| r.target)
    };

    // Probe angles: a uniform grid offset from zero, plus both sides of each trajectory.
    let mut probes: Vec<f64> = (0..directions).map(|j| (j as f64 + 0.5) * TAU / directions as f64).collect();
    for (a, _) in &outgoing {
        probes.push((a + SIDE_OFFSET).rem_euclid(TAU));
        probes.push((a - SIDE_OFFSET).rem_euclid(TAU));
    }
    let minima: Vec<Result<usize>> = probes
        .par_iter()
        .map(|&th| {
            let p = surface.project(&launch(x, th, delta))?;
            basin_of(&p, f, surface, crit, cfg)
        })
        .collect();

    let mut detail = None;
    let mut reached = Vec::with_capacity(probes.len());
    for (th, m) in probes.iter().zip(minima) {
        match m {
            Ok(id) => reached.push(id),
            Err(Error::Inconclusive(msg)) => {
                detail.get_or_insert(format!("direction {th:.6}: {msg}"));
                reached.push(usize::MAX);
            }
            Err(e) => return Err(e),
        }
    }

    // Arc index of an angle: the number of trajectory angles not above it, mod count.
    let arc_of = |th: f64| -> usize {
        if outgoing.is_empty() {
            return 0;
        }
        let k = outgoing.iter().filter(|(a, _)| *a <= th).count();
        (k + outgoing.len() - 1) % outgoing.len()
    };
    let arcs = outgoing.len().max(1);
    let mut arc_minima: Vec<Option<usize>> = vec![None; arcs];
    for (th, &m) in probes.iter().zip(&reached) {
        if m == usize::MAX {
            continue;
        }
        let a = arc_of(*th);
        match arc_minima[a] {
            None => arc_minima[a] = Some(m),
            Some(prev) if prev != m => {
                detail.get_or_insert(format!("arc {a} of maximum {} reaches minima {prev} and {m}", x.id));
            }
            _ => {}
        }
    }
    for (k, (a, t)) in outgoing.iter().enumerate() {
        let close = outgoing.iter().enumerate().any(|(j, (b, _))| {
            j != k && {
                let d = (a - b).rem_euclid(TAU);
                d.min(TAU - d) < 3.0 * SIDE_OFFSET
            }
        });
        if close {
            continue;
        }
        let plus = reached[directions + 2 * k];
        let minus = reached[directions + 2 * k + 1];
        let expect_plus = ray_target(t.target, t.sign);
        let expect_minus = ray_target(t.target, -t.sign);
        if Some(plus) != expect_plus || Some(minus) != expect_minus {
            detail.get_or_insert(format!(
                "beside trajectory {}->{} (sign {:+}) descent reaches {plus}/{minus}, rays give {expect_plus:?}/{expect_minus:?}",
                t.source, t.target, t.sign
            ));
        }
    }
    Ok(CensusReport {
        maximum: x.id,
        directions,
        trajectory_angles: outgoing.iter().map(|(a, _)| *a).collect(),
        arc_minima: arc_minima.iter().map(|m| m.unwrap_or(usize::MAX)).collect(),
        consistent: detail.is_none(),
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Surface;
    use crate::critical::{find_critical_points, SearchParams};
    use crate::flow::enumerate_moduli;

    fn check(surface: Surface) -> Vec<CensusReport> {
        let s = surface.build();
        let f = surface.default_function(0.1);
        let crit = find_critical_points(&f, &s, &SearchParams::default()).unwrap();
        let cfg = FlowConfig::for_surface(&s);
        let census = enumerate_moduli(&f, &s, &crit, &cfg).unwrap();
        crit.iter()
            .filter(|c| c.index == 2)
            .map(|x| launch_circle_census(x, &f, &s, &crit, &census, &cfg, 24).unwrap())
            .collect()
    }

    #[test]
    fn dumbbell_arcs_match_trajectories() {
        for r in check(Surface::Dumbbell) {
            assert!(r.consistent, "{:?}", r.detail);
        }
    }

    #[test]
    fn torus_circle_reaches_single_minimum() {
        let reports = check(Surface::VerticalTorus);
        assert_eq!(reports.len(), 1);
        assert!(reports[0].consistent, "{:?}", reports[0].detail);
        assert_eq!(reports[0].trajectory_angles.len(), 4);
        assert!(reports[0].arc_minima.iter().all(|&m| m == 0));
    }

    #[test]
    fn flipped_sign_is_detected() {
        let surface = Surface::Dumbbell;
        let s = surface.build();
        let f = surface.default_function(0.1);
        let crit = find_critical_points(&f, &s, &SearchParams::default()).unwrap();
        let cfg = FlowConfig::for_surface(&s);
        let mut census = enumerate_moduli(&f, &s, &crit, &cfg).unwrap();
        // Flip a trajectory into a saddle whose rays reach different minima.
        let target = census
            .moduli
            .iter()
            .filter(|m| crit[m.target].index == 1 && !m.trajectories.is_empty())
            .find(|m| {
                let mins: Vec<usize> = census.trajectories_from(m.target).map(|r| r.target).collect();
                mins.len() == 2 && mins[0] != mins[1]
            })
            .map(|m| (m.source, m.target))
            .unwrap();
        let m = census.moduli.iter_mut().find(|m| (m.source, m.target) == target).unwrap();
        m.trajectories[0].sign *= -1;
        let x = &crit[target.0];
        let r = launch_circle_census(x, &f, &s, &crit, &census, &cfg, 24).unwrap();
        assert!(!r.consistent);
    }
}
