//! Exterior-power norms: the singular-value route, the minor-matrix oracle
//! that confirms it, and cocycle growth along orbits.
//!
//! ```bash
//! cargo run --release -p dilation --example exterior_norms
//! ```

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use dilation::{
    build_system, cocycle_log_norm, exterior_log_norm, minor_matrix_log_norm, Point,
};

fn main() -> dilation::Result<()> {
    // |Λ² diag(3,2,1)| = 3·2 = 6, from the top two singular values
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0]));
    let fast = exterior_log_norm(&a, 2)?;
    let slow = minor_matrix_log_norm(&a, 2)?;
    println!("log |L^2 diag(3,2,1)|: singular values {:.12}", fast.value);
    println!("                       minor matrix    {:.12}", slow.value);
    println!("                       log 6         = {:.12}", 6.0f64.ln());

    // at k = d the exterior norm is |det|
    let cat = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
    println!(
        "\nlog |L^2 cat| = {:.3e} (area preserving, det = 1)",
        exterior_log_norm(&cat, 2)?.value
    );

    // cocycle growth: log |L^k T_x f^n| by QR-renormalized frame transport
    let sys = build_system("cat_map", &BTreeMap::new())?;
    let x = Point::new(vec![0.3, 0.4]);
    let lambda = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
    println!("\ncat map cocycle, k = 1 (rate should be {lambda:.6}):");
    for n in [5usize, 10, 20, 40] {
        let v = cocycle_log_norm(&sys, &x, n, 1)?;
        println!("  n = {n:>3}: log norm = {:>10.6}  rate = {:.6}", v.value, v.value / n as f64);
    }

    let sys = build_system("diag23", &BTreeMap::new())?;
    println!("\ndiag(2,3) cocycle rates (log 3 = {:.6}, log 6 = {:.6}):", 3.0f64.ln(), 6.0f64.ln());
    for k in 1..=2 {
        let v = cocycle_log_norm(&sys, &x, 30, k)?;
        println!("  k = {k}: rate = {:.12}", v.value / 30.0);
    }
    Ok(())
}
