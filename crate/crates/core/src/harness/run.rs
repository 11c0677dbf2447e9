use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::warp::DEFAULT_COMPLETE_CAP;

use super::experiments::{execute, AssertionRecord};
use super::scenario::{ExperimentKind, Scenario};

const DEFAULT_OUT_DIR: &str = "out";
const MANIFEST_EXT: &str = "manifest";

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub tool: String,
    pub version: String,
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub cap: usize,
    /// File name of the data table, next to the manifest.
    pub csv: String,
    pub status: RunStatus,
}

/// Everything needed to rerun and audit one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run: RunInfo,
    #[serde(default)]
    pub assertions: Vec<AssertionRecord>,
    /// The effective scenario, overrides applied.
    pub scenario: Scenario,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0),
            reason: e.message().to_string(),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn passed(&self) -> bool {
        self.run.status == RunStatus::Pass
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub manifest: Manifest,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Read a config file, run it and write `<name>.csv` and
/// `<name>.manifest` into the output directory.
///
/// Failed assertions are reported in the outcome, not as errors.
pub fn run_scenario(config: &Path, overrides: &Overrides) -> Result<Outcome> {
    let text = fs::read_to_string(config)?;
    let mut scenario = Scenario::parse(&text)?;
    if let Some(seed) = overrides.seed {
        scenario.seed = Some(seed);
    }
    if let Some(cap) = overrides.cap {
        scenario.cap = Some(cap);
    }
    scenario.validate()?;
    let dir = overrides
        .out
        .clone()
        .or_else(|| scenario.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    log::info!("running {} ({})", scenario.name, scenario.kind);
    let output = execute(&scenario)?;
    for a in output.assertions.iter().filter(|a| !a.passed) {
        log::warn!("{}: {} failed: {}", scenario.name, a.invariant, a.detail);
    }

    fs::create_dir_all(&dir)?;
    let csv_name = format!("{}.csv", scenario.name);
    let csv_path = dir.join(&csv_name);
    fs::write(&csv_path, &output.csv)?;
    let manifest = Manifest {
        run: RunInfo {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            kind: scenario.kind,
            seed: scenario.seed,
            cap: scenario.cap.unwrap_or(DEFAULT_COMPLETE_CAP),
            csv: csv_name,
            status: if output.passed() { RunStatus::Pass } else { RunStatus::Fail },
        },
        assertions: output.assertions,
        scenario,
    };
    let manifest_path = dir.join(format!("{}.{MANIFEST_EXT}", manifest.scenario.name));
    fs::write(&manifest_path, manifest.to_toml()?)?;
    Ok(Outcome {
        manifest,
        csv_path,
        manifest_path,
    })
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Collect every manifest in `dir` into `report_summary.csv` (one row per
/// run) and `report_long.csv` (one row per assertion). Returns both paths.
pub fn report(dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == MANIFEST_EXT));
    paths.sort();
    let manifests = paths
        .iter()
        .map(|p| Manifest::parse(&fs::read_to_string(p)?))
        .collect::<Result<Vec<_>>>()?;

    let summary_path = dir.join("report_summary.csv");
    let mut summary = csv::Writer::from_path(&summary_path).map_err(csv_error)?;
    summary
        .write_record(["name", "kind", "seed", "status", "assertions", "failed"])
        .map_err(csv_error)?;
    let long_path = dir.join("report_long.csv");
    let mut long = csv::Writer::from_path(&long_path).map_err(csv_error)?;
    long.write_record(["name", "invariant", "passed", "detail", "tolerance"])
        .map_err(csv_error)?;

    for m in &manifests {
        let failed = m.assertions.iter().filter(|a| !a.passed).count();
        let status = if m.passed() { "pass" } else { "fail" };
        summary
            .write_record([
                m.scenario.name.clone(),
                m.run.kind.to_string(),
                m.run.seed.map(|s| s.to_string()).unwrap_or_default(),
                status.to_string(),
                m.assertions.len().to_string(),
                failed.to_string(),
            ])
            .map_err(csv_error)?;
        for a in &m.assertions {
            long.write_record([
                m.scenario.name.clone(),
                a.invariant.clone(),
                a.passed.to_string(),
                a.detail.clone(),
                a.tolerance.map(|t| t.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_error)?;
        }
    }
    summary.flush()?;
    long.flush()?;
    Ok((summary_path, long_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAILURE: &str = r#"
name = "star"
kind = "faithful-radius"

[space]
kind = "torus"
dim = 1
resolution = 8
extension = 0.5

[action]
kind = "rotation"
turns = ["golden"]

[params]
levels = [4.0, 8.0]
radii = [1, 2]
expect = "failure"
"#;

    #[test]
    fn writes_csv_and_round_trippable_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("star.toml");
        fs::write(&config, FAILURE).unwrap();
        let out = dir.path().join("out");
        let overrides = Overrides {
            out: Some(out.clone()),
            ..Overrides::default()
        };
        let outcome = run_scenario(&config, &overrides).unwrap();
        assert!(outcome.manifest.passed(), "{:?}", outcome.manifest.assertions);
        let csv = fs::read_to_string(&outcome.csv_path).unwrap();
        assert!(csv.starts_with("radius,status,"));
        assert_eq!(csv.lines().count(), 3);
        let text = fs::read_to_string(&outcome.manifest_path).unwrap();
        assert_eq!(Manifest::parse(&text).unwrap(), outcome.manifest);

        let (summary, long) = report(&out).unwrap();
        let summary = fs::read_to_string(summary).unwrap();
        assert_eq!(summary.lines().nth(1).unwrap(), "star,faithful-radius,,pass,2,0");
        assert_eq!(fs::read_to_string(long).unwrap().lines().count(), 3);
    }

    #[test]
    fn missing_config_is_io_error() {
        let err = run_scenario(Path::new("/nonexistent/x.toml"), &Overrides::default()).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
