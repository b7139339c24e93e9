//! Scenario files, the task runner and the `morseflow` command line.
//!
//! Reports are JSON with sorted keys and floats rounded to 12 significant
//! digits, so two runs of one scenario give identical bytes.

pub mod dump;
pub mod format;
pub mod run;
pub mod scenario;
pub mod verify;

pub use run::{run, Fault, Options, Outcome};
pub use scenario::{Scenario, Task};
pub use verify::{verify_all, Summary, VerifyOptions};
