//! Plot-ready polylines: trajectories, stable curves, glued cycles, test curves.

use serde_json::{json, Value};

use super::run::{Context, Options};
use super::scenario::Scenario;
use crate::complex::{complex_homology_basis, find_pairing, glue_cycle_curve, Coefficients, MorseCycle};
use crate::error::Result;
use crate::geometry::Vec3;

fn polyline(points: impl IntoIterator<Item = Vec3>) -> Value {
    Value::Array(points.into_iter().map(|p| json!([p.x, p.y, p.z])).collect())
}

/// Polylines of `f` on the scenario surface. Cycles default to a basis of `H_1`.
pub fn dump(scenario: Scenario, options: Options) -> Result<Value> {
    let mut scenario = scenario;
    scenario.tasks.clear();
    let mut ctx = Context::new(scenario, options)?;
    ctx.compute()?;
    let d = &ctx.data[0];
    let critical: Vec<Value> = d
        .crit
        .iter()
        .map(|c| json!({ "id": c.id, "index": c.index, "coords": c.location.coords_array() }))
        .collect();
    let trajectories: Vec<Value> = d
        .census
        .moduli
        .iter()
        .flat_map(|m| &m.trajectories)
        .map(|t| {
            json!({
                "source": t.source,
                "target": t.target,
                "sign": t.sign,
                "branch": t.branch,
                "points": polyline(t.samples.iter().map(|s| s.coords)),
            })
        })
        .collect();
    let stable: Vec<Value> = d
        .census
        .stable_curves
        .iter()
        .map(|s| json!({ "saddle": s.saddle, "ends": s.ends, "points": polyline(s.points.iter().copied()) }))
        .collect();
    let c = d.complex(Coefficients::Z)?;
    let cycles = match &ctx.scenario.cycles {
        Some(list) => list.clone(),
        None => complex_homology_basis(&c, 1)?.cycles,
    };
    let mut glued = Vec::new();
    for a in cycles {
        let cycle = MorseCycle::new(1, a.clone());
        let w = find_pairing(&cycle, &c, &d.census)?;
        let g = glue_cycle_curve(&cycle, &w, &d.census, &d.crit, &ctx.cfg)?;
        let curves: Vec<Value> = g.curve_points().into_iter().map(polyline).collect();
        glued.push(json!({ "cycle": a, "curves": curves }));
    }
    let mut curves = Vec::new();
    for spec in &ctx.scenario.curves {
        let chi = super::run::build_curve(&ctx, spec)?;
        curves.push(polyline(chi.points));
    }
    Ok(json!({
        "schema": super::scenario::SCHEMA,
        "name": ctx.scenario.name,
        "critical_points": critical,
        "trajectories": trajectories,
        "stable_curves": stable,
        "glued_cycles": glued,
        "curves": curves,
    }))
}
