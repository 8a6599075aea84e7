//! Machine-readable run reports: a single structured text document plus
//! optional CSV side files for the growth series.
//!
//! The report body is byte-deterministic for a fixed config and seed; wall
//! clocks live in a trailing `[timing]` section that determinism checks
//! exclude.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::Result;
use crate::lyapunov::TheoremReport;
use crate::numeric::{fmt_g17, fnv1a64};
use crate::volume::{DilationEstimate, Disk};

pub const TIMING_HEADER: &str = "[timing]";

/// Everything one `run` invocation produced.
pub struct RunReport {
    pub version: &'static str,
    pub config: RunConfig,
    pub reports: Vec<TheoremReport>,
    pub total_seconds: f64,
}

impl RunReport {
    pub fn all_verdicts_true(&self) -> bool {
        self.reports.iter().all(|r| r.verdict)
    }

    pub fn config_hash(&self) -> u64 {
        fnv1a64(self.config.canonical_echo().as_bytes())
    }

    /// Deterministic report body (everything except timing).
    pub fn render_body(&self) -> String {
        let mut out = String::new();
        out.push_str("# dilation run report\n");
        out.push_str(&format!("version = {}\n", self.version));
        out.push_str(&format!("config_hash = {:016x}\n", self.config_hash()));
        out.push('\n');
        out.push_str("[config]\n");
        out.push_str(&self.config.canonical_echo());

        for rep in &self.reports {
            let k = rep.k;
            out.push('\n');
            out.push_str(&format!("[theorem k={k}]\n"));
            out.push_str(&format!("system = {}\n", rep.system_id));
            for (name, value) in &rep.params {
                out.push_str(&format!("param.{name} = {}\n", fmt_g17(*value)));
            }
            out.push_str(&format!("d_k_slope_fit = {}\n", fmt_g17(rep.dilation.slope_fit)));
            out.push_str(&format!(
                "d_k_last_point = {}\n",
                fmt_g17(rep.dilation.last_point)
            ));
            out.push_str(&format!("method = {}\n", rep.method.name()));
            out.push_str(&format!("d_k_hat = {}\n", fmt_g17(rep.d_k_hat)));
            out.push_str(&format!(
                "chi_partial_sum = {}\n",
                fmt_g17(rep.chi_partial_sum)
            ));
            out.push_str(&format!("tolerance = {}\n", fmt_g17(rep.tolerance)));
            out.push_str(&format!("verdict = {}\n", rep.verdict));
            out.push_str(&format!(
                "invariance_residual = {}\n",
                fmt_g17(rep.invariance_residual)
            ));
            let chis: Vec<String> = rep.spectrum.chis().iter().map(|&c| fmt_g17(c)).collect();
            out.push_str(&format!("spectrum = {}\n", chis.join(",")));
            out.push_str(&format!("spectrum_n_used = {}\n", rep.spectrum.n_used()));
            out.push_str(&format!(
                "spectrum_transient = {}\n",
                rep.spectrum.transient_discarded()
            ));

            out.push('\n');
            out.push_str(&format!("[family k={k}]\n"));
            for disk in &rep.family {
                out.push_str(&disk_record(disk));
            }

            out.push('\n');
            out.push_str(&format!("[dilation k={k}]\n"));
            out.push_str("n,best_log_ratio,best_disk_id\n");
            for r in &rep.dilation.records {
                out.push_str(&format!(
                    "{},{},{}\n",
                    r.n,
                    fmt_g17(r.best_log_ratio),
                    r.best_disk_id
                ));
            }

            for w in &rep.witnesses {
                out.push('\n');
                out.push_str(&format!("[witness k={k} n_l={}]\n", w.n));
                out.push_str(&format!("node_index = {}\n", w.node_index));
                out.push_str(&format!("u_star = {}\n", vec_g17(w.u_star.iter())));
                out.push_str(&format!(
                    "x_witness = {}\n",
                    vec_g17(w.x_witness.coords().iter())
                ));
                out.push_str(&format!("log_cocycle = {}\n", fmt_g17(w.log_cocycle)));
                out.push_str(&format!("log_ratio = {}\n", fmt_g17(w.log_ratio)));
                out.push_str(&format!("epsilon = {}\n", fmt_g17(w.epsilon)));
            }

            for s in &rep.spreads {
                out.push('\n');
                out.push_str(&format!("[spread k={k} n_l={} m={}]\n", s.n_l, s.m));
                out.push_str(&format!(
                    "q = {}\n",
                    s.q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                ));
                out.push_str(&format!(
                    "r = {}\n",
                    s.r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                ));
                out.push_str(&format!("a_l = {}\n", fmt_g17(s.a_l)));
                out.push_str(&format!("b_l = {}\n", fmt_g17(s.b_l)));
                out.push_str(&format!("middle = {}\n", fmt_g17(s.middle)));
                out.push_str(&format!("lhs = {}\n", fmt_g17(s.lhs)));
                out.push_str(&format!("bound_L = {}\n", fmt_g17(s.bound_l)));
                out.push_str(&format!("eps_prime = {}\n", fmt_g17(s.eps_prime)));
            }

            out.push('\n');
            out.push_str(&format!("[limit k={k}]\n"));
            out.push_str("m,value\n");
            for &(m, v) in &rep.limit_diagnostic {
                out.push_str(&format!("{m},{}\n", fmt_g17(v)));
            }
        }
        out
    }

    /// Wall-clock section; separated so report bodies stay reproducible.
    pub fn render_timing(&self) -> String {
        let mut out = String::new();
        out.push('\n');
        out.push_str(TIMING_HEADER);
        out.push('\n');
        for rep in &self.reports {
            for (stage, secs) in &rep.stage_seconds {
                out.push_str(&format!("k={}.{stage}_s = {secs:.3}\n", rep.k));
            }
        }
        out.push_str(&format!("total_s = {:.3}\n", self.total_seconds));
        out
    }

    /// Body followed by timing; what `write_report` puts on disk.
    pub fn render(&self) -> String {
        format!("{}{}", self.render_body(), self.render_timing())
    }
}

fn vec_g17<'a>(it: impl Iterator<Item = &'a f64>) -> String {
    it.map(|&v| fmt_g17(v)).collect::<Vec<_>>().join(",")
}

/// Flat record serialization of one disk: id, base, frame columns, scale,
/// perturbation coefficients.
fn disk_record(disk: &Disk) -> String {
    let mut row = format!(
        "disk = id={} k={} scale={} base=({})",
        disk.id(),
        disk.k(),
        fmt_g17(disk.scale()),
        vec_g17(disk.base().coords().iter())
    );
    for j in 0..disk.k() {
        let col: Vec<String> = disk.frame().column(j).iter().map(|&v| fmt_g17(v)).collect();
        row.push_str(&format!(" frame{j}=({})", col.join(",")));
    }
    match disk.perturbation() {
        None => row.push_str(" perturb=none"),
        Some(p) => {
            for t in &p.terms {
                row.push_str(&format!(
                    " perturb=(amp=({}) freq=({}) phase={})",
                    vec_g17(t.amplitude.iter()),
                    t.freq.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                    fmt_g17(t.phase)
                ));
            }
        }
    }
    row.push('\n');
    row
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV side file for the dilation series:
/// `n,best_log_ratio,best_disk_id` at full precision.
pub fn write_dilation_csv(path: &Path, est: &DilationEstimate) -> Result<()> {
    let mut out = String::from("n,best_log_ratio,best_disk_id\n");
    for r in &est.records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.n,
            fmt_g17(r.best_log_ratio),
            r.best_disk_id
        ));
    }
    write_atomic(path, &out)
}

/// CSV side file for the limit diagnostic series: `m,value`.
pub fn write_limit_csv(path: &Path, series: &[(usize, f64)]) -> Result<()> {
    let mut out = String::from("m,value\n");
    for &(m, v) in series {
        out.push_str(&format!("{m},{}\n", fmt_g17(v)));
    }
    write_atomic(path, &out)
}

/// Side-file path `<report stem>.<suffix>` next to the report.
pub fn side_file(report_path: &Path, suffix: &str) -> PathBuf {
    let stem = report_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report_path.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_file_names() {
        let p = PathBuf::from("/tmp/out/report.txt");
        assert_eq!(
            side_file(&p, "dilation.k1.csv"),
            PathBuf::from("/tmp/out/report.dilation.k1.csv")
        );
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.txt");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert!(!path.with_extension("tmp").exists());
    }
}
