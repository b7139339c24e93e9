//! Morse cycles, the opposite-sign pairing of their outgoing trajectories, and
//! the closed curves obtained by gluing unstable manifolds along it.
//!
//! For a cycle `a` of degree `k`, take `|a_x|` copies of every trajectory
//! leaving `x` towards index `k - 1`, each with the sign `sgn(a_x) * tau`.
//! Grouped by endpoint, the signs sum to the coefficients of the boundary of
//! `a`, so they cancel exactly when `a` is a cycle and the elements can be
//! matched in `+/-` pairs. In degree one every copy of a saddle contributes its
//! two unstable rays, and following the matching closes them up into loops.

use serde::Serialize;

use super::MorseComplex;
use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::flow::{FlowCensus, FlowConfig, Trajectory};
use crate::geometry::Vec3;

/// `sum a_x x` over the generators of one degree, in generator order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseCycle {
    pub degree: usize,
    pub coefficients: Vec<i64>,
}

impl MorseCycle {
    /// No cycle condition is checked here; see [`MorseCycle::boundary`].
    pub fn new(degree: usize, coefficients: Vec<i64>) -> Self {
        MorseCycle { degree, coefficients }
    }

    pub fn zero(c: &MorseComplex, degree: usize) -> Self {
        MorseCycle { degree, coefficients: vec![0; c.rank(degree)] }
    }

    /// The chain with coefficient 1 on generator `id` and 0 elsewhere.
    pub fn generator(c: &MorseComplex, degree: usize, id: usize) -> Result<Self> {
        let pos = c
            .position(degree, id)
            .ok_or_else(|| Error::Invalid(format!("critical point {id} is not a generator of degree {degree}")))?;
        let mut coefficients = vec![0; c.rank(degree)];
        coefficients[pos] = 1;
        Ok(MorseCycle { degree, coefficients })
    }

    pub fn boundary(&self, c: &MorseComplex) -> Result<Vec<i64>> {
        c.d(self.degree).apply(&self.coefficients)
    }

    pub fn is_cycle(&self, c: &MorseComplex) -> Result<bool> {
        Ok(self.boundary(c)?.iter().all(|&v| v == 0))
    }
}

/// A trajectory in the census: `trajectories[index]` of the moduli space
/// `(source, target)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TrajectoryRef {
    pub source: usize,
    pub target: usize,
    pub index: usize,
}

impl TrajectoryRef {
    pub fn resolve<'a>(&self, census: &'a FlowCensus) -> Option<&'a Trajectory> {
        census.get(self.source, self.target)?.trajectories.get(self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeltaElement {
    pub trajectory: TrajectoryRef,
    /// Which of the `|a_x|` copies.
    pub copy: usize,
    /// `sgn(a_x) * tau`.
    pub sign: i64,
    pub endpoint: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingWitness {
    pub elements: Vec<DeltaElement>,
    /// Index pairs `(positive, negative)` into `elements`.
    pub matching: Vec<(usize, usize)>,
}

impl PairingWitness {
    /// Every element used once, each pair of opposite signs and equal endpoint.
    pub fn is_valid(&self) -> bool {
        let mut used = vec![false; self.elements.len()];
        for &(p, n) in &self.matching {
            if p >= used.len() || n >= used.len() || used[p] || used[n] {
                return false;
            }
            used[p] = true;
            used[n] = true;
            let (a, b) = (&self.elements[p], &self.elements[n]);
            if a.sign != 1 || b.sign != -1 || a.endpoint != b.endpoint {
                return false;
            }
        }
        used.into_iter().all(|u| u)
    }
}

/// Match the signed trajectory copies leaving a cycle in opposite-sign pairs.
///
/// Fails with [`Error::NotACycle`] at the first endpoint whose signs do not
/// cancel.
pub fn find_pairing(a: &MorseCycle, c: &MorseComplex, census: &FlowCensus) -> Result<PairingWitness> {
    let mut elements = Vec::new();
    if a.degree > 0 {
        for (pos, &coef) in a.coefficients.iter().enumerate() {
            if coef == 0 {
                continue;
            }
            let x = c.generators[a.degree][pos];
            for &y in &c.generators[a.degree - 1] {
                let Some(moduli) = census.get(x, y) else {
                    return Err(Error::MissingModuli { source_id: x, target_id: y });
                };
                for copy in 0..coef.unsigned_abs() as usize {
                    for (index, t) in moduli.trajectories.iter().enumerate() {
                        elements.push(DeltaElement {
                            trajectory: TrajectoryRef { source: x, target: y, index },
                            copy,
                            sign: coef.signum() * t.sign,
                            endpoint: y,
                        });
                    }
                }
            }
        }
    }
    let mut matching = Vec::new();
    let endpoints: Vec<usize> = if a.degree > 0 { c.generators[a.degree - 1].clone() } else { Vec::new() };
    for y in endpoints {
        let plus: Vec<usize> = (0..elements.len()).filter(|&i| elements[i].endpoint == y && elements[i].sign > 0).collect();
        let minus: Vec<usize> = (0..elements.len()).filter(|&i| elements[i].endpoint == y && elements[i].sign < 0).collect();
        if plus.len() != minus.len() {
            return Err(Error::NotACycle { generator: y, coefficient: plus.len() as i64 - minus.len() as i64 });
        }
        matching.extend(plus.into_iter().zip(minus));
    }
    Ok(PairingWitness { elements, matching })
}

/// Closed curves realizing a degree-one cycle, with the largest junction gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluedCycle {
    /// Each curve is closed: its first and last points coincide.
    pub curves: Vec<Vec<[f64; 3]>>,
    pub max_gap: f64,
}

impl GluedCycle {
    pub fn curve_points(&self) -> Vec<Vec<Vec3>> {
        self.curves.iter().map(|c| c.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()).collect()
    }
}

/// Last integrated point of a saddle ray, before the appended minimum.
fn ray_end(t: &Trajectory) -> Vec3 {
    t.samples[t.samples.len() - 2].coords
}

/// Glue the unstable manifolds of a degree-one cycle into closed curves.
///
/// Each copy of a saddle `x` is the path (`-u` ray reversed, `x`, `+u` ray),
/// traversed backwards when `a_x < 0`; a path then starts at its negative
/// element and ends at its positive one, and the matching says which path
/// continues at each minimum.
pub fn glue_cycle_curve(
    a: &MorseCycle,
    pairing: &PairingWitness,
    census: &FlowCensus,
    crit: &[CriticalPoint],
    cfg: &FlowConfig,
) -> Result<GluedCycle> {
    if a.degree != 1 {
        return Err(Error::Invalid("only degree-one cycles are glued into curves".into()));
    }
    if !pairing.is_valid() {
        return Err(Error::CheckFailed("pairing witness is not a perfect opposite-sign matching".into()));
    }
    // Paths: one per (saddle, copy); remember their start and end elements.
    struct Path {
        points: Vec<Vec3>,
        start: usize,
        end: usize,
    }
    let mut paths: Vec<Path> = Vec::new();
    let mut keys: Vec<(usize, usize)> = pairing.elements.iter().map(|e| (e.trajectory.source, e.copy)).collect();
    keys.sort();
    keys.dedup();
    for (x, copy) in keys {
        let members: Vec<usize> = (0..pairing.elements.len())
            .filter(|&i| pairing.elements[i].trajectory.source == x && pairing.elements[i].copy == copy)
            .collect();
        let ray = |side: i64| -> Result<(usize, &Trajectory)> {
            for &i in &members {
                let t = pairing.elements[i]
                    .trajectory
                    .resolve(census)
                    .ok_or(Error::MissingModuli { source_id: x, target_id: pairing.elements[i].endpoint })?;
                if t.branch == side {
                    return Ok((i, t));
                }
            }
            Err(Error::CheckFailed(format!("saddle {x} is missing an unstable ray")))
        };
        let (ip, plus) = ray(1)?;
        let (im, minus) = ray(-1)?;
        let mut points: Vec<Vec3> = minus.samples.iter().rev().map(|s| s.coords).collect();
        points.extend(plus.samples.iter().skip(1).map(|s| s.coords));
        let (start, end) = if pairing.elements[ip].sign > 0 { (im, ip) } else {
            points.reverse();
            (ip, im)
        };
        debug_assert_eq!(crit[x].index, 1);
        paths.push(Path { points, start, end });
    }
    let partner = |elem: usize| -> usize {
        pairing
            .matching
            .iter()
            .find_map(|&(p, n)| if p == elem { Some(n) } else if n == elem { Some(p) } else { None })
            .expect("valid matching covers every element")
    };
    let mut used = vec![false; paths.len()];
    let mut curves = Vec::new();
    let mut max_gap: f64 = 0.0;
    for first in 0..paths.len() {
        if used[first] {
            continue;
        }
        let mut curve: Vec<Vec3> = Vec::new();
        let mut k = first;
        loop {
            used[k] = true;
            if curve.is_empty() {
                curve.extend(&paths[k].points);
            } else {
                curve.extend(paths[k].points.iter().skip(1));
            }
            let next_start = partner(paths[k].end);
            let gap = {
                let a = pairing.elements[paths[k].end].trajectory.resolve(census).unwrap();
                let b = pairing.elements[next_start].trajectory.resolve(census).unwrap();
                (ray_end(a) - ray_end(b)).norm()
            };
            max_gap = max_gap.max(gap);
            k = paths.iter().position(|p| p.start == next_start).expect("every start element belongs to a path");
            if k == first {
                break;
            }
        }
        curves.push(curve.iter().map(|p| [p.x, p.y, p.z]).collect());
    }
    let tol = 10.0 * cfg.capture_radius;
    if max_gap > tol {
        return Err(Error::GluingGap { gap: max_gap, tol });
    }
    Ok(GluedCycle { curves, max_gap })
}
