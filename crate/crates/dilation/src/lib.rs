//! Volume growth and Lyapunov exponents for discrete dynamical systems.
//!
//! The library estimates the k-dilation — the exponential growth rate of
//! the maximal k-volume expansion of iterated disks — constructs empirical
//! measures along witness orbits by spreading that expansion out in time,
//! computes Lyapunov spectra by QR renormalization, and checks that the
//! dilation is dominated by the sum of the top k exponents of the
//! constructed measure.
//!
//! Modules follow the pipeline:
//!
//! - [`dynamics`] / [`catalog`]: systems, orbits, and the test catalog.
//! - [`exterior`]: log norms of exterior powers and Jacobian cocycles.
//! - [`volume`]: disks, quadrature, k-volumes, dilation estimates.
//! - [`measure`]: witness points, time spreading, empirical measures.
//! - [`lyapunov`]: spectra, partial sums, and the end-to-end check.
//! - [`config`] / [`report`] / [`runner`]: files in, files out.
//!
//! The `examples/` directory has one runnable walkthrough per capability;
//! start with `cargo run --release -p dilation --example theorem_check`.

pub mod catalog;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod exterior;
pub mod lyapunov;
pub mod measure;
pub mod numeric;
pub mod report;
pub mod runner;
pub mod volume;

pub use catalog::{build_system, catalog, catalog_ids};
pub use config::{parse_config, RunConfig};
pub use dynamics::{Domain, Orbit, Point, SystemDef};
pub use error::{Error, Result};
pub use exterior::{
    cocycle_frame_log_norm, cocycle_log_norm, exterior_log_norm, minor_matrix_log_norm, LogNorm,
    LOG_FLOOR,
};
pub use lyapunov::{
    chi_partial_sum, limit_diagnostic, lyapunov_spectrum, verify_theorem, Spectrum, TheoremConfig,
    TheoremReport,
};
pub use measure::{
    integrate_log_norm, invariance_residual, spread_in_time, witness_point, EmpiricalMeasure,
    SpreadReport, WitnessResult,
};
pub use runner::{list_systems, run, RunOutcome};
pub use volume::{
    default_disk_family, estimate_dilation, log_iterated_volume, log_volume, DilationEstimate,
    DilationMethod, Disk, DiskFamily, QuadratureGrid,
};
