//! Executes the tasks of a scenario and builds its report.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::format::to_value;
use super::scenario::{CurveSpec, Scenario, Task};
use crate::catalog::{random_tilt_angles, Surface};
use crate::compare::{
    psi_degree0, psi_degree1, psi_fundamental, roundtrip_phi_psi, simplicial_homology, OracleComparison,
    PseudoCycleCurve, SimplicialComplex, SurfaceMesh,
};
use crate::complex::{
    complex_homology_basis, find_pairing, glue_cycle_curve, homology, smith_normal_form, verify_d_squared,
    Coefficients, MorseComplex, MorseCycle,
};
use crate::continuation::{
    continuation_matrix, induced_homology_map, same_induced_map, verify_chain_map, verify_functoriality,
    ContinuationMatrix, Homotopy, Ramp, Triple,
};
use crate::critical::{euler_check, find_critical_points, CriticalPoint, SearchParams};
use crate::error::{Error, ErrorClass, Result};
use crate::flow::{enumerate_moduli, launch_circle_census, FlowCensus, FlowConfig};
use crate::geometry::{ImplicitSurface, Vec3};
use crate::morse::MorseData;

/// Deliberate corruption of the computed data, for testing the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of one maximum-to-saddle trajectory.
    FlipSign,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff: Option<Coefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Factor on the integrator and bisection tolerances.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    /// Directory for relative triangulation paths.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

/// Launch directions per maximum in the launch-circle census.
const CENSUS_DIRECTIONS: usize = 24;
/// Mesh resolution for the fundamental class.
const FUNDAMENTAL_MESH: usize = 24;
/// Size of the perturbations suggested after a genericity failure.
const SUGGESTION_SIZE: f64 = 0.05;

/// Everything shared by the tasks of one run.
pub struct Context {
    pub scenario: Scenario,
    pub options: Options,
    pub surface: ImplicitSurface,
    pub search: SearchParams,
    pub cfg: FlowConfig,
    pub coeff: Coefficients,
    pub data: Vec<MorseData>,
}

impl Context {
    pub fn new(scenario: Scenario, options: Options) -> Result<Self> {
        let surface = scenario.build_surface()?;
        let mut settings = scenario.tolerances.flow;
        if let Some(k) = options.tol_scale {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Invalid(format!("tolerance scale {k} must be positive")));
            }
            settings = settings.scaled(k);
        }
        let cfg = settings.resolve(&surface);
        let coeff = options.coeff.unwrap_or(scenario.coeff);
        let search = scenario.tolerances.search;
        Ok(Context { scenario, options, surface, search, cfg, coeff, data: Vec::new() })
    }

    pub fn seed(&self) -> u64 {
        self.options.seed.unwrap_or(self.scenario.seed)
    }

    fn morse_data(&self, which: usize) -> Result<MorseData> {
        let f = self.scenario.function(which)?.expect("validated scenario has the function");
        let crit = find_critical_points(&f, &self.surface, &self.search)?;
        let mut census = enumerate_moduli(&f, &self.surface, &crit, &self.cfg)?;
        if which == 0 && self.options.fault == Some(Fault::FlipSign) {
            flip_one_sign(&mut census);
        }
        Ok(MorseData { f, crit, census })
    }

    /// Morse data of `f`, `f1`, `f2` as far as the tasks need them.
    pub fn compute(&mut self) -> Result<()> {
        let needed = if self.scenario.tasks.contains(&Task::Functoriality) {
            3
        } else if self.scenario.tasks.iter().any(|t| matches!(t, Task::Continue | Task::Roundtrip)) {
            2
        } else {
            1
        };
        while self.data.len() < needed {
            let d = self.morse_data(self.data.len())?;
            self.data.push(d);
        }
        Ok(())
    }

    fn complex(&self, which: usize, coeff: Coefficients) -> Result<MorseComplex> {
        self.data[which].complex(coeff)
    }
}

/// Flip the first maximum-to-saddle trajectory into a saddle whose two rays
/// reach different minima, so the error shows in the first boundary as well;
/// otherwise the first one there is.
fn flip_one_sign(census: &mut FlowCensus) {
    let rays_split = |c: &FlowCensus, y: usize| {
        let targets: Vec<usize> = c.trajectories_from(y).map(|t| t.target).collect();
        targets.len() == 2 && targets[0] != targets[1]
    };
    let saddles: Vec<usize> = census.stable_curves.iter().map(|s| s.saddle).collect();
    let pick = saddles
        .iter()
        .copied()
        .find(|&y| rays_split(census, y) && census.trajectories_into(y).next().is_some())
        .or_else(|| saddles.iter().copied().find(|&y| census.trajectories_into(y).next().is_some()));
    if let Some(y) = pick {
        if let Some(t) = census.moduli.iter_mut().filter(|m| m.target == y).flat_map(|m| &mut m.trajectories).next() {
            t.sign = -t.sign;
        }
    }
}

fn crit_table(crit: &[CriticalPoint]) -> Value {
    Value::Array(
        crit.iter()
            .map(|c| {
                json!({
                    "id": c.id,
                    "coords": c.location.coords_array(),
                    "f_value": c.f_value,
                    "index": c.index,
                    "eigenvalues": c.eigenvalues,
                })
            })
            .collect(),
    )
}

fn task_crit(ctx: &Context) -> Result<Value> {
    let d = &ctx.data[0];
    let euler = euler_check(&d.crit, &ctx.surface);
    let counts: Vec<usize> = (0..3).map(|k| d.of_index(k).count()).collect();
    Ok(json!({
        "critical_points": crit_table(&d.crit),
        "index_counts": counts,
        "euler": to_value(&euler),
        "pass": euler.pass,
    }))
}

fn task_complex(ctx: &Context) -> Result<Value> {
    let d = &ctx.data[0];
    let c = ctx.complex(0, ctx.coeff)?;
    let dd = verify_d_squared(&c)?;
    let moduli: Vec<Value> = d
        .census
        .moduli
        .iter()
        .filter(|m| m.count() > 0)
        .map(|m| {
            json!({
                "source": m.source,
                "target": m.target,
                "count": m.count(),
                "n": m.n(),
                "signs": m.trajectories.iter().map(|t| t.sign).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut censuses = Vec::new();
    for x in d.of_index(2) {
        censuses.push(launch_circle_census(x, &d.f, &ctx.surface, &d.crit, &d.census, &ctx.cfg, CENSUS_DIRECTIONS)?);
    }
    let census_ok = censuses.iter().all(|r| r.consistent);
    Ok(json!({
        "coefficients": c.coefficients,
        "generators": c.generators,
        "boundary": to_value(&c.boundary),
        "moduli": moduli,
        "d_squared": to_value(&dd),
        "launch_census": to_value(&censuses),
        "pass": dd.pass && census_ok,
    }))
}

/// Number of even torsion coefficients per degree.
fn even_torsion(torsion: &[Vec<i64>]) -> Vec<usize> {
    torsion.iter().map(|t| t.iter().filter(|v| *v % 2 == 0).count()).collect()
}

fn task_homology(ctx: &Context) -> Result<Value> {
    let cz = ctx.complex(0, Coefficients::Z)?;
    let c2 = ctx.complex(0, Coefficients::Z2)?;
    let hz = homology(&cz)?;
    let h2 = homology(&c2)?;
    let mut diagonals = Vec::new();
    for k in 1..=2 {
        diagonals.push(smith_normal_form(&cz.d(k))?.diagonal);
    }
    // Universal coefficients: dim H_k(Z2) = b_k + t_k + t_{k-1}, t counting even torsion.
    let t = even_torsion(&hz.torsion);
    let predicted: Vec<usize> =
        (0..3).map(|k| hz.betti[k] + t[k] + if k > 0 { t[k - 1] } else { 0 }).collect();
    let consistent = predicted == h2.betti;
    let euler_ok = hz.euler_characteristic() == ctx.surface.expected_euler;
    let main = if ctx.coeff == Coefficients::Z { &hz } else { &h2 };
    Ok(json!({
        "coefficients": ctx.coeff,
        "betti": main.betti,
        "torsion": main.torsion,
        "integer": to_value(&hz),
        "binary": to_value(&h2),
        "snf_diagonals": diagonals,
        "binary_predicted": predicted,
        "binary_consistent": consistent,
        "euler_characteristic": hz.euler_characteristic(),
        "pass": consistent && euler_ok,
    }))
}

/// The scenario's degree-one cycles, or a basis of the free part of `H_1`.
fn cycles(ctx: &Context, c: &MorseComplex) -> Result<Vec<Vec<i64>>> {
    match &ctx.scenario.cycles {
        Some(list) => {
            for a in list {
                if a.len() != c.rank(1) {
                    return Err(Error::Invalid(format!(
                        "cycle {a:?} has {} coefficients, the complex has {} saddles",
                        a.len(),
                        c.rank(1)
                    )));
                }
            }
            Ok(list.clone())
        }
        None => Ok(complex_homology_basis(c, 1)?.cycles),
    }
}

fn task_pairing(ctx: &Context) -> Result<Value> {
    let c = ctx.complex(0, Coefficients::Z)?;
    let mut entries = Vec::new();
    let mut pass = true;
    for a in cycles(ctx, &c)? {
        let cycle = MorseCycle::new(1, a.clone());
        match find_pairing(&cycle, &c, &ctx.data[0].census) {
            Ok(w) => {
                let valid = w.is_valid();
                pass &= valid;
                entries.push(json!({ "cycle": a, "valid": valid, "witness": to_value(&w) }));
            }
            Err(e @ Error::NotACycle { .. }) => {
                pass = false;
                entries.push(json!({ "cycle": a, "valid": false, "error": error_value(&e, ctx) }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(json!({ "cycles": entries, "pass": pass }))
}

fn task_glue(ctx: &Context) -> Result<Value> {
    let c = ctx.complex(0, Coefficients::Z)?;
    let d = &ctx.data[0];
    let tol = 10.0 * ctx.cfg.capture_radius;
    let mut entries = Vec::new();
    let mut pass = true;
    for a in cycles(ctx, &c)? {
        let cycle = MorseCycle::new(1, a.clone());
        let w = find_pairing(&cycle, &c, &d.census)?;
        let g = glue_cycle_curve(&cycle, &w, &d.census, &d.crit, &ctx.cfg)?;
        let closed = g.curves.iter().all(|p| p.first() == p.last());
        let ok = closed && g.max_gap <= tol;
        pass &= ok;
        entries.push(json!({
            "cycle": a,
            "curves": g.curves.len(),
            "points": g.curves.iter().map(Vec::len).collect::<Vec<_>>(),
            "closed": closed,
            "max_gap": g.max_gap,
            "gap_tolerance": tol,
            "pass": ok,
        }));
    }
    Ok(json!({ "cycles": entries, "pass": pass }))
}

pub(crate) fn build_curve(ctx: &Context, spec: &CurveSpec) -> Result<PseudoCycleCurve> {
    let s = &ctx.surface;
    match spec {
        CurveSpec::Meridian { phi, samples } => PseudoCycleCurve::torus_meridian(s, *phi, *samples),
        CurveSpec::Longitude { theta, samples } => PseudoCycleCurve::torus_longitude(s, *theta, *samples),
        CurveSpec::SmallCircle { center, radius, samples } => {
            PseudoCycleCurve::small_circle(s, &Vec3::from(*center), *radius, *samples)
        }
        CurveSpec::Polyline { points, max_len } => {
            let pts: Vec<Vec3> = points.iter().map(|p| Vec3::from(*p)).collect();
            PseudoCycleCurve::from_points(s, &pts, *max_len)
        }
    }
}

fn task_psi(ctx: &Context) -> Result<Value> {
    let d = &ctx.data[0];
    let c = ctx.complex(0, Coefficients::Z)?;
    let d1 = c.d(1);
    let mut pass = true;
    let mut curves = Vec::new();
    for spec in &ctx.scenario.curves {
        let chi = build_curve(ctx, spec)?;
        let r = psi_degree1(std::slice::from_ref(&chi), d, &ctx.surface, &ctx.cfg)?;
        let boundary = d1.apply(&r.cycle.coefficients)?;
        let is_cycle = boundary.iter().all(|&v| v == 0);
        pass &= is_cycle;
        curves.push(json!({
            "curve": to_value(spec),
            "samples": chi.points.len(),
            "coefficients": r.cycle.coefficients,
            "boundary": boundary,
            "records": to_value(&r.records),
            "is_cycle": is_cycle,
        }));
    }
    let mut out = Map::new();
    out.insert("curves".into(), Value::Array(curves));
    if !ctx.scenario.points.is_empty() {
        let pts: Vec<(Vec3, i64)> = ctx.scenario.points.iter().map(|p| (Vec3::from(p.at), p.weight)).collect();
        let r = psi_degree0(&pts, d, &ctx.surface, &ctx.cfg)?;
        let minima: Vec<usize> = d.of_index(0).map(|m| m.id).collect();
        let mut basins = Vec::new();
        for (q, _) in &pts {
            let single = psi_degree0(&[(*q, 1)], d, &ctx.surface, &ctx.cfg)?;
            let pos = single.coefficients.iter().position(|&v| v == 1).expect("one basin");
            basins.push(minima[pos]);
        }
        out.insert("points".into(), json!({ "coefficients": r.coefficients, "basins": basins }));
    }
    if let Some(surface) = ctx.scenario.catalog_surface().filter(|s| *s != Surface::FlatTorus) {
        let mesh = SurfaceMesh::catalog(surface, FUNDAMENTAL_MESH)?;
        let r = psi_fundamental(&mesh, d)?;
        let boundary = c.d(2).apply(&r.coefficients)?;
        let is_cycle = boundary.iter().all(|&v| v == 0);
        let generates = match complex_homology_basis(&c, 2)?.coordinates(&r.coefficients)?.as_slice() {
            [v] => v.abs() == 1,
            _ => false,
        };
        pass &= is_cycle && generates;
        out.insert(
            "fundamental".into(),
            json!({
                "mesh_resolution": FUNDAMENTAL_MESH,
                "coefficients": r.coefficients,
                "is_cycle": is_cycle,
                "generates": generates,
            }),
        );
    }
    out.insert("pass".into(), Value::Bool(pass));
    Ok(Value::Object(out))
}

fn continuation(ctx: &Context, from: usize, to: usize, ramp: Ramp, coeff: Coefficients) -> Result<(ContinuationMatrix, Value)> {
    let (a, b) = (&ctx.data[from], &ctx.data[to]);
    let h = Homotopy::new(a.f.clone(), b.f.clone()).with_ramp(ramp);
    let r = continuation_matrix(&h, a, b, &ctx.surface, &ctx.cfg, coeff)?;
    let detail = json!({ "crossings": to_value(&r.crossings), "windings": r.windings });
    Ok((r.matrix, detail))
}

fn task_continue(ctx: &Context) -> Result<Value> {
    let c0 = ctx.complex(0, ctx.coeff)?;
    let c1 = ctx.complex(1, ctx.coeff)?;
    let (phi, detail) = continuation(ctx, 0, 1, Ramp::Smoothstep, ctx.coeff)?;
    let chain = verify_chain_map(&phi, &c0, &c1)?;
    let induced = induced_homology_map(&phi, &c0, &c1)?;
    let (other, _) = continuation(ctx, 0, 1, Ramp::Smootherstep, ctx.coeff)?;
    let ramp_independent = same_induced_map(&phi, &other, &c0, &c1)?;
    Ok(json!({
        "coefficients": ctx.coeff,
        "generators": [c0.generators, c1.generators],
        "matrices": to_value(&phi.degrees),
        "detail": detail,
        "chain_map": to_value(&chain),
        "induced": to_value(&induced),
        "ramp_independent": ramp_independent,
        "pass": chain.pass && ramp_independent,
    }))
}

fn task_functoriality(ctx: &Context) -> Result<Value> {
    let (phi10, _) = continuation(ctx, 0, 1, Ramp::Smoothstep, ctx.coeff)?;
    let (phi21, _) = continuation(ctx, 1, 2, Ramp::Smoothstep, ctx.coeff)?;
    let (phi20, _) = continuation(ctx, 0, 2, Ramp::Smoothstep, ctx.coeff)?;
    let t = Triple { data: [&ctx.data[0], &ctx.data[1], &ctx.data[2]], phi10: &phi10, phi21: &phi21, phi20: &phi20 };
    let r = verify_functoriality(&t, ctx.coeff)?;
    Ok(json!({
        "coefficients": ctx.coeff,
        "phi10": to_value(&phi10.degrees),
        "phi21": to_value(&phi21.degrees),
        "phi20": to_value(&phi20.degrees),
        "composite": to_value(&r.composite),
        "direct": to_value(&r.direct),
        "pass": r.pass,
    }))
}

fn task_roundtrip(ctx: &Context) -> Result<Value> {
    let c = ctx.complex(0, Coefficients::Z)?;
    let (phi, _) = continuation(ctx, 0, 1, Ramp::Smoothstep, Coefficients::Z)?;
    let mut entries = Vec::new();
    let mut pass = true;
    for a in cycles(ctx, &c)? {
        let cycle = MorseCycle::new(1, a);
        let r = roundtrip_phi_psi(&cycle, &ctx.data[0], &ctx.data[1], &phi, &ctx.surface, &ctx.cfg)?;
        pass &= r.pass;
        entries.push(to_value(&r));
    }
    Ok(json!({ "phi": to_value(&phi.degrees), "cycles": entries, "pass": pass }))
}

/// The triangulation a scenario names.
pub fn load_triangulation(ctx: &Context, name: &str) -> Result<SimplicialComplex> {
    if let Some(builtin) = name.strip_prefix("builtin:") {
        return SimplicialComplex::builtin(builtin)
            .ok_or_else(|| Error::Invalid(format!("unknown builtin triangulation `{builtin}`")));
    }
    if let Some(n) = name.strip_prefix("mesh:") {
        let n: usize = n.parse().map_err(|_| Error::Invalid(format!("bad mesh resolution `{n}`")))?;
        let surface = ctx
            .scenario
            .catalog_surface()
            .ok_or_else(|| Error::Invalid("mesh triangulations need a catalog surface".into()))?;
        return SurfaceMesh::catalog(surface, n)?.to_simplicial();
    }
    let mut path = PathBuf::from(name);
    if path.is_relative() {
        if let Some(dir) = &ctx.options.base_dir {
            path = dir.join(path);
        }
    }
    SimplicialComplex::load(&path)
}

fn task_simplicial(ctx: &Context) -> Result<Value> {
    let name = ctx.scenario.triangulation.as_deref().expect("validated");
    let k = load_triangulation(ctx, name)?;
    let morse = homology(&ctx.complex(0, ctx.coeff)?)?;
    let simplicial = simplicial_homology(&k, ctx.coeff)?;
    let betti_match = morse.betti == simplicial.betti;
    let torsion_match = morse.torsion == simplicial.torsion;
    let cmp = OracleComparison { morse, simplicial, betti_match };
    Ok(json!({
        "triangulation": name,
        "cells": [k.vertices, k.edges.len(), k.triangles.len()],
        "comparison": to_value(&cmp),
        "betti_match": betti_match,
        "torsion_match": torsion_match,
        "pass": betti_match && torsion_match,
    }))
}

fn run_task(ctx: &Context, task: Task) -> Result<Value> {
    match task {
        Task::Crit => task_crit(ctx),
        Task::Complex => task_complex(ctx),
        Task::Homology => task_homology(ctx),
        Task::Pairing => task_pairing(ctx),
        Task::Glue => task_glue(ctx),
        Task::Continue => task_continue(ctx),
        Task::Functoriality => task_functoriality(ctx),
        Task::Psi => task_psi(ctx),
        Task::Roundtrip => task_roundtrip(ctx),
        Task::SimplicialCompare => task_simplicial(ctx),
    }
}

/// Small tilts to try after a genericity failure, drawn from the seed.
pub fn suggestions(f: &str, seed: u64) -> Vec<String> {
    random_tilt_angles(seed, 3)
        .into_iter()
        .map(|a| {
            let (s, c) = a.sin_cos();
            format!("({f}) + {:.4}*x + {:.4}*y", SUGGESTION_SIZE * c, SUGGESTION_SIZE * s)
        })
        .collect()
}

fn error_value(e: &Error, ctx: &Context) -> Value {
    let mut v = json!({
        "class": e.class().name(),
        "kind": e.kind(),
        "message": e.to_string(),
    });
    if e.class() == ErrorClass::Genericity {
        v["suggestions"] = json!(suggestions(&ctx.scenario.f, ctx.seed()));
    }
    v
}

/// Run every task in order. The first error stops the run; its class gives
/// the exit code. Otherwise a failed check gives 4.
pub fn run(scenario: Scenario, options: Options) -> Outcome {
    let echo = to_value(&scenario);
    let opts = to_value(&options);
    let mut tasks = Vec::new();
    let mut error = Value::Null;
    let mut exit_code = 0;
    match Context::new(scenario, options) {
        Err(e) => {
            exit_code = e.exit_code();
            error = json!({ "class": e.class().name(), "kind": e.kind(), "message": e.to_string() });
        }
        Ok(mut ctx) => {
            let mut failure = ctx.compute().err();
            if failure.is_none() {
                for &task in &ctx.scenario.tasks.clone() {
                    match run_task(&ctx, task) {
                        Ok(mut v) => {
                            if v["pass"] == Value::Bool(false) {
                                exit_code = ErrorClass::Check.exit_code();
                            }
                            v["task"] = json!(task.name());
                            tasks.push(v);
                        }
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    }
                }
            }
            if let Some(e) = failure {
                exit_code = e.exit_code();
                error = error_value(&e, &ctx);
            }
        }
    }
    let status = match exit_code {
        0 => "ok",
        4 if error.is_null() => "check-failed",
        _ => "error",
    };
    let report = json!({
        "schema": super::scenario::SCHEMA,
        "scenario": echo,
        "options": opts,
        "tasks": tasks,
        "status": status,
        "exit_code": exit_code,
        "error": error,
    });
    Outcome { report, exit_code }
}
