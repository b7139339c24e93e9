//! `verify-all`: the acceptance scenarios over the built-in catalog.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use super::format::integer_skeleton;
use super::run::{run, Fault, Options, Outcome};
use super::scenario::{Scenario, Task};
use crate::catalog::{random_tilt_angles, tilted_height};
use crate::error::{Error, Result};

/// Embedded scenario files with the exit code each must produce.
pub const SCENARIOS: [(&str, &str, i32); 6] = [
    ("sphere", include_str!("../../scenarios/sphere.json"), 0),
    ("torus", include_str!("../../scenarios/torus.json"), 0),
    ("dumbbell", include_str!("../../scenarios/dumbbell.json"), 0),
    ("dumbbell-z2", include_str!("../../scenarios/dumbbell-z2.json"), 0),
    ("torus-untilted", include_str!("../../scenarios/torus-untilted.json"), 3),
    ("dumbbell-untilted", include_str!("../../scenarios/dumbbell-untilted.json"), 3),
];

/// Tilts per surface in the robustness sweep.
pub const RANDOM_TILTS: usize = 10;
pub const DEFAULT_SEED: u64 = 7;
/// Tolerance factor of the integer-stability comparison.
pub const TIGHT_SCALE: f64 = 0.1;

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Read `tetrahedron.json` and `csaszar.json` from here instead of the builtins.
    pub triangulations: Option<PathBuf>,
    pub seed: Option<u64>,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    pub expected: i32,
    pub actual: i32,
    pub pass: bool,
    #[serde(skip)]
    pub seconds: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: Vec<Row>,
    pub exit_code: i32,
}

impl Summary {
    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(8);
        let mut s = format!("{:<width$}  expect  exit  result  seconds  note\n", "scenario");
        for r in &self.rows {
            s.push_str(&format!(
                "{:<width$}  {:>6}  {:>4}  {:<6}  {:>7.2}  {}\n",
                r.name,
                r.expected,
                r.actual,
                if r.pass { "pass" } else { "FAIL" },
                r.seconds,
                r.note
            ));
        }
        s.push_str(&format!("exit code {}\n", self.exit_code));
        s
    }
}

fn parse(text: &str) -> Result<Scenario> {
    Scenario::from_json(text)
}

fn betti_of(o: &Outcome) -> Option<Value> {
    let tasks = o.report["tasks"].as_array()?;
    tasks.iter().find(|t| t["task"] == "homology").map(|t| t["betti"].clone())
}

/// Exit code a failed row contributes: its own, or 4 when it succeeded but should not have.
fn row_code(expected: i32, actual: i32) -> i32 {
    if expected == actual {
        0
    } else if actual == 0 {
        4
    } else {
        actual
    }
}

struct Runner {
    rows: Vec<Row>,
    fault: Option<Fault>,
}

impl Runner {
    fn run(&mut self, name: &str, scenario: Scenario, expected: i32, tol_scale: Option<f64>) -> Outcome {
        let start = Instant::now();
        let options = Options { fault: self.fault, tol_scale, ..Options::default() };
        let o = run(scenario, options);
        let note = match o.report["error"]["message"].as_str() {
            Some(m) => m.to_string(),
            None if o.exit_code == 4 => "check failed".into(),
            None => String::new(),
        };
        self.rows.push(Row {
            name: name.into(),
            expected,
            actual: o.exit_code,
            pass: o.exit_code == expected,
            seconds: start.elapsed().as_secs_f64(),
            note,
        });
        o
    }

    fn fail(&mut self, name: &str, code: i32, note: String) {
        self.rows.push(Row { name: name.into(), expected: 0, actual: code, pass: false, seconds: 0.0, note });
    }
}

/// Run every acceptance scenario, the random-tilt sweep and the tolerance
/// comparison; the exit code is the worst over the failed rows.
pub fn verify_all(opts: &VerifyOptions) -> Result<Summary> {
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    let mut runner = Runner { rows: Vec::new(), fault: opts.fault };
    for (name, text, expected) in SCENARIOS {
        let mut s = parse(text)?;
        if let (Some(dir), Some(t)) = (&opts.triangulations, &s.triangulation) {
            let file = match t.as_str() {
                "builtin:tetrahedron" => "tetrahedron.json",
                "builtin:csaszar" => "csaszar.json",
                other => return Err(Error::Invalid(format!("no file for triangulation `{other}`"))),
            };
            let path = dir.join(file);
            if !path.is_file() {
                runner.fail(name, 1, format!("missing triangulation {}", path.display()));
                continue;
            }
            s.triangulation = Some(path.display().to_string());
        }
        runner.run(name, s, expected, None);
    }

    let basic = [Task::Crit, Task::Complex, Task::Homology];
    for (name, text, _) in &SCENARIOS[..3] {
        let mut base = parse(text)?;
        base.tasks = basic.to_vec();
        base.f1 = None;
        base.f2 = None;
        base.curves.clear();
        base.points.clear();
        base.triangulation = None;
        let reference = runner.run(&format!("{name}-basic"), base.clone(), 0, None);
        let tight = runner.run(&format!("{name}-tight"), base.clone(), 0, Some(TIGHT_SCALE));
        let same = integer_skeleton(&reference.report["tasks"]) == integer_skeleton(&tight.report["tasks"]);
        if !same {
            runner.fail(&format!("{name}-tight-integers"), 4, "tighter tolerances changed an integer".into());
        }
        let betti = betti_of(&reference);
        for (k, angle) in random_tilt_angles(seed, RANDOM_TILTS).into_iter().enumerate() {
            let mut s = base.clone();
            s.name = format!("{name}-tilt-{k}");
            s.f = tilted_height(0.1, angle).to_string();
            let o = runner.run(&s.name.clone(), s, 0, None);
            if o.exit_code == 0 && betti_of(&o) != betti {
                runner.fail(&format!("{name}-tilt-{k}-betti"), 4, "Betti numbers changed".into());
            }
        }
    }
    let exit_code = runner.rows.iter().filter(|r| !r.pass).map(|r| row_code(r.expected, r.actual)).max().unwrap_or(0);
    Ok(Summary { rows: runner.rows, exit_code })
}
