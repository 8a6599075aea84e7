//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Every tolerance is pinned here. Run with
//! `cargo test --release --test acceptance -- --nocapture` to see the
//! lines for passing criteria too.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dilation::catalog::{build_system, catalog_ids};
use dilation::config::parse_config;
use dilation::lyapunov::{lyapunov_spectrum, verify_theorem, TheoremConfig};
use dilation::measure::{integrate_log_norm, invariance_residual, spread_in_time, witness_point};
use dilation::report::TIMING_HEADER;
use dilation::volume::{default_disk_family, estimate_dilation, QuadratureGrid};
use dilation::{cocycle_log_norm, exterior_log_norm, minor_matrix_log_norm, Point, SystemDef};

fn criterion<F>(number: u32, name: &str, body: F)
where
    F: FnOnce() + std::panic::UnwindSafe,
{
    let outcome = std::panic::catch_unwind(body);
    let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
    println!("criterion {number} ({name}): {status}");
    if let Err(panic) = outcome {
        std::panic::resume_unwind(panic);
    }
}

fn system(id: &str) -> SystemDef {
    build_system(id, &BTreeMap::new()).unwrap()
}

fn system_with(id: &str, key: &str, value: f64) -> SystemDef {
    build_system(id, &BTreeMap::from([(key.to_string(), value)])).unwrap()
}

/// Runtime limits hold on an optimized build; a debug build still runs the
/// full computation but skips the wall-clock assertion.
fn assert_runtime(elapsed: std::time::Duration, limit_s: f64, what: &str) {
    println!("  {what}: {:.2} s (limit {limit_s} s)", elapsed.as_secs_f64());
    if cfg!(not(debug_assertions)) {
        assert!(
            elapsed.as_secs_f64() < limit_s,
            "{what} took {:.2} s, limit {limit_s} s",
            elapsed.as_secs_f64()
        );
    }
}

#[test]
fn criterion_1_exterior_norm_oracle() {
    criterion(1, "exterior-norm oracle", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20240811);
        let mut checked = 0usize;
        for _ in 0..200 {
            let d = rng.gen_range(1..=6);
            let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-2.0..2.0));
            for k in 1..=d {
                let fast = exterior_log_norm(&a, k).unwrap().value;
                let slow = minor_matrix_log_norm(&a, k).unwrap().value;
                assert!(
                    (fast - slow).abs() <= 1e-9,
                    "d={d} k={k}: |{fast} - {slow}| > 1e-9"
                );
                checked += 1;
            }
        }
        assert!(checked >= 200);
        assert_runtime(start.elapsed(), 5.0, "200-matrix oracle sweep");
    });
}

#[test]
fn criterion_2_linear_lyapunov_ground_truth() {
    criterion(2, "linear Lyapunov ground truth", || {
        let start = Instant::now();
        let cat = system("cat_map");
        let s = lyapunov_spectrum(&cat, &Point::new(vec![0.2, 0.7]), 10_000, 1000).unwrap();
        let lambda = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        assert!((s.chis()[0] - lambda).abs() <= 1e-8);
        assert!((s.chis()[1] + lambda).abs() <= 1e-8);

        let diag = system("diag23");
        let s = lyapunov_spectrum(&diag, &Point::new(vec![0.21, 0.52]), 10_000, 1000).unwrap();
        assert!((s.chis()[0] - 3.0f64.ln()).abs() <= 1e-10);
        assert!((s.chis()[1] - 2.0f64.ln()).abs() <= 1e-10);
        assert_runtime(start.elapsed(), 1.0, "two spectra at n = 10^4");
    });
}

#[test]
fn criterion_3_dilation_ground_truth() {
    criterion(3, "dilation ground truth", || {
        let start = Instant::now();
        let schedule: Vec<usize> = (1..=20).collect();

        let doubling = system("doubling");
        let fam = default_disk_family(&doubling, 1, 8, 42).unwrap();
        let grid = QuadratureGrid::default_for(1).unwrap();
        let est = estimate_dilation(&doubling, 1, &fam, &schedule, &grid).unwrap();
        assert!(
            (est.slope_fit - 2.0f64.ln()).abs() <= 0.02,
            "doubling d1 = {}",
            est.slope_fit
        );

        let cat = system("cat_map");
        let fam = default_disk_family(&cat, 1, 8, 42).unwrap();
        let est = estimate_dilation(&cat, 1, &fam, &schedule, &grid).unwrap();
        let lambda = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        assert!(
            (est.slope_fit - lambda).abs() <= 0.05,
            "cat d1 = {}",
            est.slope_fit
        );

        let fam = default_disk_family(&cat, 2, 8, 42).unwrap();
        let grid2 = QuadratureGrid::default_for(2).unwrap();
        let est = estimate_dilation(&cat, 2, &fam, &schedule, &grid2).unwrap();
        assert!(est.slope_fit.abs() <= 1e-6, "cat d2 = {}", est.slope_fit);

        let diag = system("diag23");
        let fam = default_disk_family(&diag, 2, 8, 42).unwrap();
        let est = estimate_dilation(&diag, 2, &fam, &schedule, &grid2).unwrap();
        assert!(
            (est.slope_fit - 6.0f64.ln()).abs() <= 0.05,
            "diag23 d2 = {}",
            est.slope_fit
        );
        assert_runtime(start.elapsed(), 30.0, "four dilation estimates");
    });
}

#[test]
fn criterion_4_theorem_inequality_on_catalog() {
    criterion(4, "theorem inequality on the whole catalog", || {
        let start = Instant::now();
        let mut targets: Vec<SystemDef> = catalog_ids().iter().map(|id| system(id)).collect();
        targets.push(system_with("standard_map", "K", 0.5));
        targets.push(system_with("standard_map", "K", 1.5));
        targets.push(system_with("perturbed_cat", "epsilon", 0.02));

        let config = TheoremConfig {
            tolerance: 0.05,
            ..Default::default()
        };
        for sys in &targets {
            for k in 1..=sys.dim() {
                let report = verify_theorem(sys, k, &config).unwrap();
                assert!(
                    report.verdict,
                    "{} {:?} k={k}: d_k_hat = {} > chi_sum = {} + 0.05",
                    sys.id(),
                    sys.params(),
                    report.d_k_hat,
                    report.chi_partial_sum
                );
            }
        }
        assert_runtime(start.elapsed(), 120.0, "theorem check across the catalog");
    });
}

#[test]
fn criterion_5_lemma1_discrete_pigeonhole() {
    criterion(5, "discrete pigeonhole (witness dominates the ratio)", || {
        for id in catalog_ids() {
            let sys = system(id);
            let family = default_disk_family(&sys, 1, 2, 13).unwrap();
            let grid = QuadratureGrid::default_for(1).unwrap();
            for disk in &family.disks {
                for n in [1usize, 5, 15, 200] {
                    let w = witness_point(&sys, disk, n, 1, &grid).unwrap();
                    assert!(
                        w.log_cocycle >= w.log_ratio - 1e-12,
                        "{id} disk {} n={n}: {} < {} - 1e-12",
                        disk.id(),
                        w.log_cocycle,
                        w.log_ratio
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_6_step2_chain_and_eq1_residual() {
    criterion(6, "step-2 telescoping, a_l/b_l bounds, Eq-(1) residual", || {
        // constant-Jacobian systems where the chain is exact
        let linear = ["identity", "diag23", "cat_map", "doubling", "doubling_d", "contraction"];
        let n_l_schedule = [200usize, 1000, 5000];
        let m_list = [1usize, 2, 5, 10];

        for id in linear {
            let sys = system(id);
            let family = default_disk_family(&sys, 1, 2, 21).unwrap();
            let disk = &family.disks[0];
            let grid = QuadratureGrid::default_for(1).unwrap();
            let log_l = sys.lipschitz_bound(4096).ln();

            let mut residual_trail = Vec::new();
            for &n_l in &n_l_schedule {
                let w = witness_point(&sys, disk, n_l, 1, &grid).unwrap();
                let deficit = ((w.log_ratio - w.log_cocycle) / n_l as f64).max(0.0);
                for &m in &m_list {
                    let (rep, _) = spread_in_time(&sys, &w, m, 1, 50.0).unwrap();
                    // a_l, b_l bounds with L from lipschitz_bound
                    assert!(rep.a_l <= rep.bound_l + 1e-12, "{id} n_l={n_l} m={m}: a_l");
                    assert!(rep.b_l <= rep.bound_l + 1e-12, "{id} n_l={n_l} m={m}: b_l");
                    assert!(
                        (rep.bound_l - (m as f64 * log_l / n_l as f64)).abs() <= 1e-12,
                        "bound formula"
                    );
                    // summed telescoping inequality
                    assert!(
                        rep.lhs <= rep.a_l + rep.middle + rep.b_l + 1e-9,
                        "{id} n_l={n_l} m={m}: telescoping"
                    );
                    // Eq (1) residual bound on linear systems
                    assert!(
                        rep.eps_prime <= 2.0 * (m as f64) * log_l / n_l as f64 + deficit + 1e-12,
                        "{id} n_l={n_l} m={m}: eps_prime = {} too large",
                        rep.eps_prime
                    );
                    if m == 10 {
                        residual_trail.push(rep.eps_prime);
                    }
                }
            }
            // the residual decreases along 200 -> 1000 -> 5000 wherever it is
            // above numerical noise (expanding k=1 systems)
            if ["diag23", "cat_map", "doubling", "doubling_d"].contains(&id) {
                assert!(
                    residual_trail[0] > residual_trail[1] && residual_trail[1] > residual_trail[2],
                    "{id}: eps_prime trail {residual_trail:?} not decreasing"
                );
            }
        }

        // per-residue telescoping on a nonlinear system
        let sys = system_with("standard_map", "K", 1.5);
        let family = default_disk_family(&sys, 1, 2, 21).unwrap();
        let grid = QuadratureGrid::default_for(1).unwrap();
        let w = witness_point(&sys, &family.disks[0], 200, 1, &grid).unwrap();
        let orbit = sys.iterate(&w.x_witness, w.n).unwrap();
        let pts = orbit.points();
        let full = cocycle_log_norm(&sys, &pts[0], 200, 1).unwrap().value;
        for m in m_list {
            for i in 0..m {
                let q = (200 - i) / m;
                let r = (200 - i) % m;
                let mut rhs = cocycle_log_norm(&sys, &pts[200 - r], r, 1).unwrap().value;
                for j in 0..q {
                    rhs += cocycle_log_norm(&sys, &pts[i + j * m], m, 1).unwrap().value;
                }
                rhs += cocycle_log_norm(&sys, &pts[0], i, 1).unwrap().value;
                assert!(
                    full <= rhs + 1e-9,
                    "standard_map m={m} residue {i}: {full} > {rhs}"
                );
            }
        }
    });
}

#[test]
fn criterion_7_lemma2_truncation() {
    criterion(7, "truncated integrand monotone in r", || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (id, param) in [("contraction", None), ("standard_map", Some(("K", 1.5)))] {
            let sys = match param {
                Some((k, v)) => system_with(id, k, v),
                None => system(id),
            };
            let family = default_disk_family(&sys, 1, 1, 5).unwrap();
            let grid = QuadratureGrid::default_for(1).unwrap();
            let w = witness_point(&sys, &family.disks[0], 120, 1, &grid).unwrap();
            let m = 3;
            let (_, nu) = spread_in_time(&sys, &w, m, 1, 50.0).unwrap();

            // randomized ascending truncation levels
            let mut levels: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..4.0)).collect();
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut prev = f64::INFINITY;
            for &r in &levels {
                let v = integrate_log_norm(&nu, &sys, m, 1, r).unwrap();
                assert!(v <= prev + 1e-15, "{id}: value at r={r} rose: {v} > {prev}");
                prev = v;
            }

            // equal to the untruncated value once r exceeds every |atom value|
            let max_abs = nu
                .atoms()
                .iter()
                .map(|y| cocycle_log_norm(&sys, y, m, 1).unwrap().value.abs())
                .fold(0.0f64, f64::max);
            let untruncated = integrate_log_norm(&nu, &sys, m, 1, f64::INFINITY).unwrap();
            let inactive = integrate_log_norm(&nu, &sys, m, 1, max_abs + 1.0).unwrap();
            assert_eq!(untruncated, inactive, "{id}: truncation still active");
        }
    });
}

#[test]
fn criterion_8_invariance_diagnostic() {
    criterion(8, "invariance residual shrinks with n_l", || {
        let sys = system("cat_map");
        let family = default_disk_family(&sys, 1, 0, 8).unwrap();
        let grid = QuadratureGrid::default_for(1).unwrap();
        let mut residuals = Vec::new();
        for n_l in [1_000usize, 10_000] {
            let w = witness_point(&sys, &family.disks[0], n_l, 1, &grid).unwrap();
            let (_, nu) = spread_in_time(&sys, &w, 1, 1, 50.0).unwrap();
            residuals.push(invariance_residual(&nu, &sys, 20, 2024).unwrap());
        }
        assert!(
            residuals[1] < residuals[0],
            "residuals {residuals:?} not strictly decreasing"
        );
        assert!(
            residuals[1] < 0.02,
            "residual at n_l = 10^4 is {}",
            residuals[1]
        );
    });
}

#[test]
fn criterion_9_report_determinism() {
    criterion(9, "byte-identical report bodies", || {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            "\
[system]
id = cat_map
[run]
k_list = 1,2
seed = 31415
n_schedule = 1..10
n_l_schedule = 200,500
m_list = 1,2,5
[output]
report = {}
",
            dir.path().join("report.txt").display()
        );
        let config = parse_config(&text, &[]).unwrap();

        let first = dilation::run(&config).unwrap();
        let first_file = std::fs::read_to_string(&first.report_path).unwrap();
        let second = dilation::run(&config).unwrap();
        let second_file = std::fs::read_to_string(&second.report_path).unwrap();

        assert_eq!(
            first.report.render_body(),
            second.report.render_body(),
            "in-memory bodies differ"
        );
        let body = |s: &str| s.split(TIMING_HEADER).next().unwrap().to_string();
        assert_eq!(body(&first_file), body(&second_file), "file bodies differ");
        assert_ne!(first_file, ""); // files really were written
    });
}
