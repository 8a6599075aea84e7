//! Disk volumes under iteration and the k-dilation estimate: the growth
//! records, the two estimators, and which disk wins at each n.
//!
//! ```bash
//! cargo run --release -p dilation --example volume_growth
//! ```

use std::collections::BTreeMap;

use dilation::{
    build_system, default_disk_family, estimate_dilation, log_iterated_volume, log_volume,
    QuadratureGrid,
};

fn main() -> dilation::Result<()> {
    let sys = build_system("cat_map", &BTreeMap::new())?;
    let grid = QuadratureGrid::default_for(1)?;
    let family = default_disk_family(&sys, 1, 4, 42)?;

    // raw volume ratios for one disk
    let disk = &family.disks[0];
    let lv = log_volume(disk, &grid)?;
    println!("disk `{}`: log V = {:.6}", disk.id(), lv);
    for n in [1usize, 5, 10, 20] {
        let liv = log_iterated_volume(&sys, disk, n, &grid)?;
        println!("  log V(f^{n} o sigma) - log V(sigma) = {:.6}", liv - lv);
    }

    // the dilation estimate takes the best ratio over the family per n
    let schedule: Vec<usize> = (1..=20).collect();
    let est = estimate_dilation(&sys, 1, &family, &schedule, &grid)?;
    println!("\nn, best_log_ratio, best_disk_id");
    for r in est.records.iter().step_by(4) {
        println!("{:>2}, {:>10.6}, {}", r.n, r.best_log_ratio, r.best_disk_id);
    }
    let lambda = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
    println!("\nslope fit   d_1 = {:.6}", est.slope_fit);
    println!("last point  d_1 = {:.6}", est.last_point);
    println!("log lambda_1    = {:.6}", lambda);

    // area-preserving: the 2-dilation vanishes
    let family2 = default_disk_family(&sys, 2, 4, 42)?;
    let grid2 = QuadratureGrid::default_for(2)?;
    let est2 = estimate_dilation(&sys, 2, &family2, &schedule, &grid2)?;
    println!("\nk = 2 (det = 1): slope fit d_2 = {:.3e}", est2.slope_fit);
    Ok(())
}
