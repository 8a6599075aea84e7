//! Experiment orchestration: build the system from the catalog, verify the
//! theorem for every requested k, write the report and CSV side files.

use std::path::PathBuf;
use std::time::Instant;

use crate::catalog::{build_system, catalog};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::lyapunov::verify_theorem;
use crate::report::{side_file, write_atomic, write_dilation_csv, write_limit_csv, RunReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of one `run`: the in-memory report, whether every verdict was
/// true, and where the report file went.
pub struct RunOutcome {
    pub report: RunReport,
    pub report_path: PathBuf,
}

/// Execute the full pipeline described by `config` and write the report.
///
/// Exit-code contract for callers: 0 iff every verdict is true, 1 for a
/// verdict failure, 2 for usage errors, 3 for numeric stage failures.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let system = build_system(&config.system_id, &config.params)?;
    let d = system.dim();

    let k_list: Vec<usize> = if config.k_list.is_empty() {
        (1..=d).collect()
    } else {
        for &k in &config.k_list {
            if k < 1 || k > d {
                return Err(Error::Config(format!(
                    "run.k_list: k = {k} out of range for `{}` (dimension {d})",
                    config.system_id
                )));
            }
        }
        config.k_list.clone()
    };

    let theorem_config = config.to_theorem_config();
    let started = Instant::now();
    let mut reports = Vec::with_capacity(k_list.len());
    for &k in &k_list {
        reports.push(verify_theorem(&system, k, &theorem_config)?);
    }

    let report = RunReport {
        version: VERSION,
        config: config.clone(),
        reports,
        total_seconds: started.elapsed().as_secs_f64(),
    };

    write_atomic(&config.report_path, &report.render())?;
    if config.csv {
        for rep in &report.reports {
            write_dilation_csv(
                &side_file(&config.report_path, &format!("dilation.k{}.csv", rep.k)),
                &rep.dilation,
            )?;
            write_limit_csv(
                &side_file(&config.report_path, &format!("limit.k{}.csv", rep.k)),
                &rep.limit_diagnostic,
            )?;
        }
    }

    Ok(RunOutcome {
        report_path: config.report_path.clone(),
        report,
    })
}

/// Human-readable catalog listing: id, dimension, parameters, and known
/// ground-truth exponents (blank for the nonlinear systems).
pub fn list_systems() -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14} {:>3}  {:<24} {}\n",
        "id", "d", "parameters", "ground-truth exponents"
    ));
    for entry in catalog() {
        let params = if entry.params.is_empty() {
            "-".to_string()
        } else {
            entry
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let gt = match &entry.ground_truth {
            None => String::new(),
            Some(chis) => chis
                .iter()
                .map(|c| format!("{c:+.6}"))
                .collect::<Vec<_>>()
                .join(", "),
        };
        out.push_str(&format!(
            "{:<14} {:>3}  {:<24} {}\n",
            entry.id, entry.dim, params, gt
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small_config(dir: &std::path::Path) -> RunConfig {
        let text = format!(
            "\
[system]
id = cat_map
[run]
k_list = 1
seed = 9
n_schedule = 1..8
n_l_schedule = 100,300
m_list = 1,2
[output]
report = {}
csv = true
",
            dir.join("report.txt").display()
        );
        parse_config(&text, &[]).unwrap()
    }

    #[test]
    fn run_writes_report_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let outcome = run(&config).unwrap();
        assert!(outcome.report.all_verdicts_true());
        let body = std::fs::read_to_string(&outcome.report_path).unwrap();
        assert!(body.contains("[theorem k=1]"));
        assert!(body.contains("[timing]"));
        let csv =
            std::fs::read_to_string(dir.path().join("report.dilation.k1.csv")).unwrap();
        assert!(csv.starts_with("n,best_log_ratio,best_disk_id\n"));
        assert_eq!(csv.lines().count(), 9); // header + 8 schedule entries
        let limit = std::fs::read_to_string(dir.path().join("report.limit.k1.csv")).unwrap();
        assert!(limit.starts_with("m,value\n"));
    }

    #[test]
    fn run_report_body_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let a = run(&config).unwrap().report.render_body();
        let b = run(&config).unwrap().report.render_body();
        assert_eq!(a, b);
    }

    #[test]
    fn k_out_of_range_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = small_config(dir.path());
        config.k_list = vec![3];
        let err = match run(&config) {
            Err(e) => e,
            Ok(_) => panic!("expected a usage error"),
        };
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn empty_k_list_covers_all_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = small_config(dir.path());
        config.system_id = "identity".into();
        config.k_list = vec![];
        let outcome = run(&config).unwrap();
        assert_eq!(outcome.report.reports.len(), 2);
    }

    #[test]
    fn listing_contains_catalog_contract() {
        let listing = list_systems();
        assert!(listing.contains("cat_map"));
        assert!(listing.contains("standard_map"));
        assert!(listing.contains("K=1"));
        // nonlinear systems have an empty ground-truth column
        let std_line = listing
            .lines()
            .find(|l| l.starts_with("standard_map"))
            .unwrap();
        assert!(!std_line.contains('+'));
        let cat_line = listing.lines().find(|l| l.starts_with("cat_map")).unwrap();
        assert!(cat_line.contains("+0.96"));
    }
}
