//! Config-driven experiment runs: scenario files in, CSV tables and run
//! manifests out.

mod experiments;
mod run;
mod scenario;

pub use experiments::{cone_slice_discrepancy, execute, AssertionRecord, ConeSliceReport, ExperimentOutput};
pub use run::{report, run_scenario, Manifest, Outcome, Overrides, RunInfo, RunStatus};
pub use scenario::{build_action, ActionKind, ActionSpec, BaseKind, ExperimentKind, OutputSpec, Params, Scenario, SpaceSpec};
