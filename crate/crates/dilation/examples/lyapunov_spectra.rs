//! Lyapunov spectra for the catalog by QR renormalization, with partial
//! sums compared against the cocycle growth rates they should match.
//!
//! ```bash
//! cargo run --release -p dilation --example lyapunov_spectra
//! ```

use std::collections::BTreeMap;

use dilation::{
    build_system, catalog_ids, chi_partial_sum, cocycle_log_norm, lyapunov_spectrum, Point,
};

fn main() -> dilation::Result<()> {
    println!("{:<14} spectrum (n = 10^4, 10% transient)", "system");
    for id in catalog_ids() {
        let sys = build_system(id, &BTreeMap::new())?;
        let x0 = Point::from_vector(sys.domain().center() * 0.9);
        let s = lyapunov_spectrum(&sys, &x0, 10_000, 1000)?;
        let chis: Vec<String> = s.chis().iter().map(|c| format!("{c:+.6}")).collect();
        let truth = match sys.ground_truth() {
            Some(gt) => format!(
                "   (exact: {})",
                gt.iter().map(|c| format!("{c:+.6}")).collect::<Vec<_>>().join(", ")
            ),
            None => String::new(),
        };
        println!("{:<14} {}{}", id, chis.join(", "), truth);
    }

    // partial sums of the top k exponents equal k-cocycle growth rates
    let sys = build_system("diag23", &BTreeMap::new())?;
    let x0 = Point::new(vec![0.123, 0.456]);
    let s = lyapunov_spectrum(&sys, &x0, 10_000, 100)?;
    println!("\ndiag(2,3): partial sums vs cocycle rates at n = 10^4");
    for k in 1..=2 {
        let chi = chi_partial_sum(&s, k)?;
        let rate = cocycle_log_norm(&sys, &x0, 10_000, k)?.value / 10_000.0;
        println!("  k = {k}: chi sum = {chi:.10}  cocycle rate = {rate:.10}");
    }
    Ok(())
}
