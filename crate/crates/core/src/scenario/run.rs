use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::Scenario;
use crate::analysis::{
    analyze_change_advancing, default_eps, order_of, write_classification_csv, ChangeType,
    OrderClass,
};
use crate::dynamics::Encoding;
use crate::error::{Error, Result};
use crate::optimizer::{run_dynamic_ea, EaConfig};
use crate::pareto::{write_fronts_csv, Grid};
use crate::rng::Rng;

/// Overrides the output directory of every run.
pub const OUT_DIR_ENV: &str = "DYNMO_OUT_DIR";

/// Tolerance used for bit-string problems, whose grid cell spans the
/// whole box.
const BINARY_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub order: OrderClass,
    pub change_type: Option<ChangeType>,
    pub final_igd: Option<f64>,
    pub evaluations: Option<u64>,
}

/// Runs the analysis and/or optimiser and writes the CSV artifacts plus
/// `manifest.txt` into `out_dir` (or the scenario's `out`).
///
/// Everything is computed before the first file is written; if writing
/// fails, files written by this run are removed again.
pub fn run_scenario(scenario: &Scenario, out_dir: Option<&Path>) -> Result<RunSummary> {
    let out_dir = out_dir.map_or_else(|| scenario.out.clone(), Path::to_path_buf);
    let mut outputs: Vec<(&str, Vec<u8>)> = Vec::new();

    let probe = scenario.build_problem()?;
    let order = order_of(&probe);
    let mut change_type = None;
    if scenario.mode.analyzes() {
        let mut problem = probe;
        let grid = Grid::uniform(scenario.grid).with_budget(scenario.grid_budget);
        let eps = match (scenario.eps, problem.encoding()) {
            (Some(eps), _) => eps,
            (None, Encoding::Binary) => BINARY_EPS,
            (None, Encoding::Real) => default_eps(&problem, &grid)?,
        };
        let mut rng = Rng::substream(scenario.seed, "analysis");
        let report = analyze_change_advancing(&mut problem, &scenario.times, &grid, eps, &mut rng)?;
        let mut fronts = Vec::new();
        write_fronts_csv(
            &report.snapshots,
            problem.dimension(),
            problem.objectives(),
            &mut fronts,
        )
        .map_err(|source| io_error(&out_dir.join("fronts.csv"), source))?;
        let mut classification = Vec::new();
        write_classification_csv(&report, order, scenario.hv_ref.as_deref(), &mut classification)
            .map_err(|source| io_error(&out_dir.join("classification.csv"), source))?;
        outputs.push(("fronts.csv", fronts));
        outputs.push(("classification.csv", classification));
        change_type = Some(report.change_type);
    }

    let mut final_igd = None;
    let mut evaluations = None;
    if scenario.mode.optimizes() {
        let mut problem = scenario.build_problem()?;
        let mut cfg = EaConfig::new(scenario.budget, scenario.mu, scenario.tau_t);
        cfg.hv_reference = scenario.hv_ref.clone();
        let mut rng = Rng::substream(scenario.seed, "optimizer");
        let timeline = run_dynamic_ea(&mut problem, &cfg, &mut rng)?;
        let mut csv = Vec::new();
        timeline
            .write_csv(&mut csv)
            .map_err(|source| io_error(&out_dir.join("timeline.csv"), source))?;
        outputs.push(("timeline.csv", csv));
        final_igd = timeline.last().and_then(|r| r.igd);
        evaluations = Some(timeline.evaluations());
    }

    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut resolved = scenario.clone();
    resolved.out = out_dir.clone();
    let manifest = format!(
        "# resolved scenario; parse this file to reproduce the run\n# written at unix time {stamp}\n{}",
        resolved.to_text()
    );
    outputs.push(("manifest.txt", manifest.into_bytes()));

    let files = write_all(&out_dir, &outputs)?;
    Ok(RunSummary {
        out_dir,
        files,
        order,
        change_type,
        final_igd,
        evaluations,
    })
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_all(dir: &Path, outputs: &[(&str, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| io_error(dir, source))?;
    let mut written = Vec::new();
    for (name, bytes) in outputs {
        let path = dir.join(name);
        if let Err(source) = fs::write(&path, bytes) {
            for done in &written {
                let _ = fs::remove_file(done);
            }
            let _ = fs::remove_file(&path);
            return Err(io_error(&path, source));
        }
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_analysis_reports_type_iv() {
        let dir = tempfile::tempdir().unwrap();
        let s = Scenario::parse("problem = two-sphere\nmode = analyze\ngrid = 21\n").unwrap();
        let summary = run_scenario(&s, Some(dir.path())).unwrap();
        assert_eq!(summary.change_type, Some(ChangeType::TypeIV));
        let csv = fs::read_to_string(dir.path().join("classification.csv")).unwrap();
        assert!(csv.lines().last().unwrap().contains("static,independent,false,false,Type IV"));
        assert!(!dir.path().join("timeline.csv").exists());
    }

    #[test]
    fn failed_runs_leave_no_files() {
        let dir = tempfile::tempdir().unwrap();
        let s = Scenario::parse("problem = dsw\nmode = analyze\ngrid = 5000\n").unwrap();
        assert!(matches!(
            run_scenario(&s, Some(dir.path())),
            Err(Error::Capacity { .. })
        ));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn manifest_reproduces_the_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let s = Scenario::parse("problem = mnk\nbudget = 400\nmu = 20\nrho = 0.5\n").unwrap();
        run_scenario(&s, Some(dir.path())).unwrap();
        let manifest = Scenario::from_file(&dir.path().join("manifest.txt")).unwrap();
        let mut expected = s.clone();
        expected.out = dir.path().to_path_buf();
        assert_eq!(manifest, expected);
    }
}
