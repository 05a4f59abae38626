//! Running a plan, regenerating reports and verifying an output directory.
//!
//! Output layout:
//!
//! ```text
//! <out>/manifest.json
//! <out>/logs/f<F>_d<D>_i<I>.csv
//! <out>/art.tsv
//! <out>/ecdf/ecdf_<group>_d<D>.tsv
//! <out>/scaling/scaling_f<F>.tsv
//! <out>/comparison.tsv        (report --reference)
//! <out>/plots/*.svg           (plot)
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fda_core::driver::optimize;
use fda_core::metrics::{runtimes_from_trace, standard_budget_grid, RunRecord, TargetSet};
use fda_core::suite::{make_instance, ProblemKey};
use rayon::prelude::*;

use crate::error::RunnerError;
use crate::logs::RunLog;
use crate::manifest::{sha256_hex, Manifest, RunEntry, RunStatus, MANIFEST_FILE};
use crate::plan::ExperimentPlan;
use crate::plot;
use crate::reference::{read_reference, render_comparison, COMPARISON_FILE};
use crate::report::{build_reports, parse_art_table, parse_ecdf, parse_scaling, ART_FILE};

pub const LOG_DIR: &str = "logs";
pub const PLOT_DIR: &str = "plots";
/// Entries of an output directory that a rerun may replace.
const OWNED: [&str; 7] = [
    LOG_DIR,
    "ecdf",
    "scaling",
    PLOT_DIR,
    ART_FILE,
    COMPARISON_FILE,
    MANIFEST_FILE,
];

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

impl ExperimentOutcome {
    pub fn failures(&self) -> usize {
        self.manifest.failures()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub files_checked: usize,
    pub discrepancies: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Writes through a temporary sibling and a rename, so readers never see partial files.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), RunnerError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| RunnerError::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| RunnerError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| RunnerError::io(path, e))
}

fn prepare_output(dir: &Path) -> Result<(), RunnerError> {
    if !dir.exists() {
        return fs::create_dir_all(dir).map_err(|e| RunnerError::io(dir, e));
    }
    if dir.join(MANIFEST_FILE).exists() {
        for name in OWNED {
            let p = dir.join(name);
            let res = if p.is_dir() {
                fs::remove_dir_all(&p)
            } else if p.exists() {
                fs::remove_file(&p)
            } else {
                Ok(())
            };
            res.map_err(|e| RunnerError::io(&p, e))?;
        }
        return Ok(());
    }
    let mut entries = fs::read_dir(dir).map_err(|e| RunnerError::io(dir, e))?;
    if entries.next().is_some() {
        return Err(RunnerError::Config(format!(
            "{} is not empty and holds no manifest; refusing to overwrite",
            dir.display()
        )));
    }
    Ok(())
}

fn log_path(key: &ProblemKey) -> String {
    format!("{LOG_DIR}/{}", RunLog::file_name(key))
}

fn run_one(plan: &ExperimentPlan, key: ProblemKey) -> Result<(RunEntry, RunLog), String> {
    let budget = plan.budget(key.dimension);
    let mut instance =
        make_instance(key.function, key.dimension, key.instance).map_err(|e| e.to_string())?;
    let config = plan.fda_config(key.dimension).map_err(|e| e.to_string())?;
    let trace = optimize(&mut instance, &config).map_err(|e| e.to_string())?;
    let log = RunLog::from_trace(key, budget, instance.f_opt(), &trace);
    let entry = RunEntry {
        problem: key.to_string(),
        status: RunStatus::Ok,
        budget,
        evaluations_used: trace.evaluations_used,
        log: Some(log_path(&key)),
        error: None,
    };
    Ok((entry, log))
}

/// Runtimes per standard target, derived from the parsed logs only.
pub fn records_from_logs(logs: &[RunLog]) -> Result<Vec<RunRecord>, RunnerError> {
    let targets = TargetSet::standard();
    logs.iter()
        .map(|l| {
            Ok(runtimes_from_trace(
                l.key,
                &l.points,
                l.evaluations_used,
                &targets,
            )?)
        })
        .collect()
}

fn reports_from_logs(logs: &[RunLog]) -> Result<BTreeMap<String, String>, RunnerError> {
    build_reports(
        &records_from_logs(logs)?,
        &TargetSet::standard(),
        &standard_budget_grid(),
    )
}

/// Runs every problem of the plan in parallel and writes logs, reports and the manifest.
///
/// A run that cannot be started (for instance an unimplemented function) is recorded as
/// failed; the others proceed. Results do not depend on the thread count.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentOutcome, RunnerError> {
    let mut plan = plan.clone();
    plan.normalize()?;
    let dir = plan.output.clone();
    prepare_output(&dir)?;

    let results: Vec<Result<(RunEntry, Option<RunLog>), RunnerError>> = plan
        .problems()
        .into_par_iter()
        .map(|key| match run_one(&plan, key) {
            Ok((entry, log)) => {
                write_atomic(&dir.join(log_path(&key)), log.render().as_bytes())?;
                Ok((entry, Some(log)))
            }
            Err(message) => Ok((
                RunEntry {
                    problem: key.to_string(),
                    status: RunStatus::Failed,
                    budget: plan.budget(key.dimension),
                    evaluations_used: 0,
                    log: None,
                    error: Some(message),
                },
                None,
            )),
        })
        .collect();

    let mut runs = Vec::new();
    let mut logs = Vec::new();
    for r in results {
        let (entry, log) = r?;
        runs.push(entry);
        logs.extend(log);
    }

    let mut outputs = BTreeMap::new();
    for log in &logs {
        outputs.insert(log_path(&log.key), sha256_hex(log.render().as_bytes()));
    }
    for (path, text) in reports_from_logs(&logs)? {
        write_atomic(&dir.join(&path), text.as_bytes())?;
        outputs.insert(path, sha256_hex(text.as_bytes()));
    }

    let config = serde_json::to_value(&plan).expect("plan serializes");
    let manifest = Manifest::new(config, runs, outputs);
    write_atomic(&dir.join(MANIFEST_FILE), manifest.render().as_bytes())?;
    Ok(ExperimentOutcome { dir, manifest })
}

fn read_logs(dir: &Path, manifest: &Manifest) -> Result<Vec<RunLog>, RunnerError> {
    manifest
        .runs
        .iter()
        .filter_map(|r| r.log.as_ref())
        .map(|rel| RunLog::read(&dir.join(rel)))
        .collect()
}

/// Rebuilds the report tables from the logs, and the comparison table when a reference file
/// is given. The manifest is updated to the new table hashes.
pub fn report(dir: &Path, reference: Option<&Path>) -> Result<Manifest, RunnerError> {
    let manifest = Manifest::read(dir)?;
    let logs = read_logs(dir, &manifest)?;
    let reports = reports_from_logs(&logs)?;
    let mut outputs: BTreeMap<String, String> = manifest
        .outputs
        .iter()
        .filter(|(k, _)| k.starts_with(LOG_DIR))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    for (path, text) in &reports {
        write_atomic(&dir.join(path), text.as_bytes())?;
        outputs.insert(path.clone(), sha256_hex(text.as_bytes()));
    }
    if let Some(reference) = reference {
        let rows = read_reference(reference)?;
        let art_text = reports.get(ART_FILE).map(String::as_str).unwrap_or("");
        let ours = if art_text.is_empty() {
            Vec::new()
        } else {
            parse_art_table(&dir.join(ART_FILE), art_text)?
        };
        write_atomic(
            &dir.join(COMPARISON_FILE),
            render_comparison(&ours, &rows).as_bytes(),
        )?;
    }
    let manifest = Manifest::new(manifest.config, manifest.runs, outputs);
    write_atomic(&dir.join(MANIFEST_FILE), manifest.render().as_bytes())?;
    Ok(manifest)
}

/// Renders every ECDF and scaling table to SVG under `plots/`. Returns the written paths.
pub fn plot(dir: &Path) -> Result<Vec<PathBuf>, RunnerError> {
    let manifest = Manifest::read(dir)?;
    let mut written = Vec::new();
    for rel in manifest.outputs.keys() {
        let path = dir.join(rel);
        let svg = if rel.starts_with("ecdf/") {
            let text = fs::read_to_string(&path).map_err(|e| RunnerError::io(&path, e))?;
            plot::ecdf_svg(&parse_ecdf(&path, &text)?)
        } else if rel.starts_with("scaling/") {
            let text = fs::read_to_string(&path).map_err(|e| RunnerError::io(&path, e))?;
            plot::scaling_svg(&parse_scaling(&path, &text)?)
        } else {
            continue;
        };
        let stem = Path::new(rel).file_stem().expect("table file name");
        let out = dir.join(PLOT_DIR).join(stem).with_extension("svg");
        write_atomic(&out, svg.as_bytes())?;
        written.push(out);
    }
    Ok(written)
}

/// Recomputes everything derivable from the raw logs and compares it with the files on disk.
///
/// Checks the manifest hash, every recorded output hash, byte equality of each table with its
/// recomputation, budget compliance of each run, and that every ECDF is non-decreasing and
/// within `[0, 1]`.
pub fn verify(dir: &Path) -> Result<VerifyReport, RunnerError> {
    let manifest = Manifest::read(dir)?;
    let mut report = VerifyReport::default();
    let mut flag = |msg: String| report.discrepancies.push(msg);

    if manifest.compute_hash() != manifest.manifest_hash {
        flag("manifest_hash does not match manifest contents".into());
    }

    let mut logs = Vec::new();
    let mut checked = 0;
    for run in &manifest.runs {
        let Some(rel) = &run.log else {
            if run.status == RunStatus::Ok {
                flag(format!("{}: successful run without a log", run.problem));
            }
            continue;
        };
        let path = dir.join(rel);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                flag(format!("{rel}: {e}"));
                continue;
            }
        };
        checked += 1;
        if manifest.outputs.get(rel) != Some(&sha256_hex(&bytes)) {
            flag(format!("{rel}: hash differs from manifest"));
        }
        let text = String::from_utf8_lossy(&bytes);
        match RunLog::parse(&path, &text) {
            Ok(log) => {
                if log.key.to_string() != run.problem {
                    flag(format!(
                        "{rel}: holds {} instead of {}",
                        log.key, run.problem
                    ));
                }
                if log.evaluations_used != run.evaluations_used || log.budget != run.budget {
                    flag(format!("{rel}: evaluation counts differ from manifest"));
                }
                if log.evaluations_used > log.budget {
                    flag(format!(
                        "{rel}: used {} of {}",
                        log.evaluations_used, log.budget
                    ));
                }
                if log.render() != text {
                    flag(format!("{rel}: not in canonical form"));
                }
                logs.push(log);
            }
            Err(e) => flag(e.to_string()),
        }
    }

    let expected = reports_from_logs(&logs)?;
    for (rel, text) in &expected {
        let path = dir.join(rel);
        checked += 1;
        match fs::read_to_string(&path) {
            Ok(disk) if &disk == text => {}
            Ok(_) => flag(format!("{rel}: differs from recomputation")),
            Err(e) => flag(format!("{rel}: {e}")),
        }
        if manifest.outputs.get(rel) != Some(&sha256_hex(text.as_bytes())) {
            flag(format!("{rel}: manifest hash differs from recomputation"));
        }
        if rel.starts_with("ecdf/") {
            match parse_ecdf(&path, text) {
                Ok(curve) => {
                    if let Some(problem) = curve.check() {
                        flag(format!("{rel}: {problem}"));
                    }
                }
                Err(e) => flag(e.to_string()),
            }
        }
    }
    for rel in manifest.outputs.keys() {
        if !rel.starts_with(LOG_DIR) && !expected.contains_key(rel) {
            flag(format!(
                "{rel}: listed in manifest but not derivable from logs"
            ));
        }
    }
    report.files_checked = checked;
    Ok(report)
}
