//! Tour of the system catalog: build each system, run a short orbit, and
//! compare the analytic Lipschitz bound with a sampled one.
//!
//! ```bash
//! cargo run --release -p dilation --example catalog_tour
//! ```

use std::collections::BTreeMap;

use dilation::{build_system, catalog_ids, list_systems, Point};

fn main() -> dilation::Result<()> {
    print!("{}", list_systems());
    println!();

    for id in catalog_ids() {
        let sys = build_system(id, &BTreeMap::new())?;
        let start = Point::from_vector(sys.domain().center() * 0.9);
        let orbit = sys.iterate(&start, 5)?;
        let tail = orbit.points().last().unwrap();
        println!(
            "{:<14} d={}  L={:.4}  f^5({start}) = {tail}",
            id,
            sys.dim(),
            sys.lipschitz_bound(1000),
        );
    }

    // parameters select family members
    let params = BTreeMap::from([("K".to_string(), 0.5)]);
    let gentle = build_system("standard_map", &params)?;
    println!(
        "\nstandard_map with K=0.5 has sampled Lipschitz bound {:.4}",
        gentle.lipschitz_bound(10_000)
    );
    Ok(())
}
