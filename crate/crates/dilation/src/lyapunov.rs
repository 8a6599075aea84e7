//! Lyapunov spectra by QR renormalization along orbits, partial sums of top
//! exponents, and the end-to-end check that the k-dilation is dominated by
//! the top-k exponent sum of the constructed measure.

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DMatrix;

use crate::dynamics::{Point, SystemDef};
use crate::error::{Error, Result};
use crate::exterior::LOG_FLOOR;
use crate::measure::{
    cached_witness_orbit, invariance_residual, spread_with_orbit, witness_point, EmpiricalMeasure,
    SpreadReport, WitnessResult,
};
use crate::volume::{
    default_disk_family, estimate_dilation, DilationEstimate, DilationMethod, Disk, QuadratureGrid,
};

/// Lyapunov exponents of one orbit, sorted nonincreasing.
#[derive(Clone, Debug)]
pub struct Spectrum {
    chis: Vec<f64>,
    n_used: usize,
    transient_discarded: usize,
    any_floor: bool,
}

impl Spectrum {
    pub fn chis(&self) -> &[f64] {
        &self.chis
    }

    pub fn n_used(&self) -> usize {
        self.n_used
    }

    pub fn transient_discarded(&self) -> usize {
        self.transient_discarded
    }

    pub fn any_floor(&self) -> bool {
        self.any_floor
    }
}

/// Standard QR (Benettin) spectrum: propagate a full d×d orthonormal frame,
/// QR-factorize each step, and average the post-transient log |R_ii|.
pub fn lyapunov_spectrum(
    system: &SystemDef,
    x0: &Point,
    n: usize,
    transient: usize,
) -> Result<Spectrum> {
    let d = system.dim();
    if x0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x0.dim(),
        });
    }
    if n <= transient {
        return Err(Error::InvalidArgument(format!(
            "lyapunov_spectrum requires n > transient, got n = {n}, transient = {transient}"
        )));
    }
    let mut q = DMatrix::<f64>::identity(d, d);
    let mut acc = vec![0.0f64; d];
    let mut any_floor = false;
    let mut x = x0.clone();
    for step in 0..n {
        let (qn, r) = (system.jacobian(&x) * q).qr().unpack();
        q = qn;
        if step >= transient {
            for i in 0..d {
                let l = r[(i, i)].abs().ln();
                if l.is_finite() && l > LOG_FLOOR {
                    acc[i] += l;
                } else {
                    acc[i] += LOG_FLOOR;
                    any_floor = true;
                }
            }
        }
        x = system.evaluate(&x)?;
    }
    let window = (n - transient) as f64;
    let mut chis: Vec<f64> = acc.iter().map(|a| a / window).collect();
    chis.sort_by(|a, b| b.partial_cmp(a).expect("exponents are not NaN"));
    Ok(Spectrum {
        chis,
        n_used: n - transient,
        transient_discarded: transient,
        any_floor,
    })
}

/// Sum of the top k exponents.
pub fn chi_partial_sum(spectrum: &Spectrum, k: usize) -> Result<f64> {
    if k < 1 || k > spectrum.chis.len() {
        return Err(Error::KOutOfRange {
            k,
            max: spectrum.chis.len(),
        });
    }
    Ok(spectrum.chis.iter().take(k).sum())
}

/// `(1/m) ∫ Φ_r dν_l` for each m in the list. Along one measure the values
/// form a nonincreasing trend up to boundary terms of size
/// `O(k log L · m / n_l)`; the trend approaches the top-k exponent sum.
pub fn limit_diagnostic(
    measure: &EmpiricalMeasure,
    system: &SystemDef,
    k: usize,
    m_list: &[usize],
    r: f64,
) -> Result<Vec<(usize, f64)>> {
    if m_list.is_empty() {
        return Err(Error::InvalidArgument("empty m list".into()));
    }
    m_list
        .iter()
        .map(|&m| Ok((m, crate::measure::integrate_log_norm(measure, system, m, k, r)?)))
        .collect()
}

/// Configuration for [`verify_theorem`]. Defaults match the desk-scale
/// schedules used throughout the test suite.
#[derive(Clone, Debug)]
pub struct TheoremConfig {
    pub family_budget: usize,
    pub seed: u64,
    /// Iteration counts for the volume-growth stage (kept moderate so the
    /// midpoint quadrature stays trustworthy).
    pub n_schedule: Vec<usize>,
    /// Orbit lengths for the measure-construction stage.
    pub n_l_schedule: Vec<usize>,
    pub m_list: Vec<usize>,
    /// Midpoint nodes per axis; `None` picks the per-k default.
    pub nodes_per_axis: Option<usize>,
    /// Truncation level of the Φ_r integrand, per m-block.
    pub truncation_r: f64,
    pub tolerance: f64,
    pub method: DilationMethod,
    pub test_functions: usize,
    /// When set, witness orbits are cached under this directory.
    pub cache_dir: Option<PathBuf>,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            family_budget: 8,
            seed: 42,
            n_schedule: (1..=50).collect(),
            n_l_schedule: vec![200, 1000, 5000],
            m_list: vec![1, 2, 5, 10],
            nodes_per_axis: None,
            truncation_r: 50.0,
            tolerance: 0.05,
            method: DilationMethod::SlopeFit,
            test_functions: 20,
            cache_dir: None,
        }
    }
}

impl TheoremConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, sched) in [
            ("n_schedule", &self.n_schedule),
            ("n_l_schedule", &self.n_l_schedule),
            ("m_list", &self.m_list),
        ] {
            if sched.is_empty() {
                return Err(Error::Config(format!("{name} must be nonempty")));
            }
            if !sched.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Config(format!("{name} must be strictly increasing")));
            }
        }
        let max_m = *self.m_list.last().unwrap();
        let min_nl = self.n_l_schedule[0];
        if max_m >= min_nl {
            return Err(Error::Config(format!(
                "m_list entries must stay below every n_l (got m = {max_m} >= n_l = {min_nl})"
            )));
        }
        if self.n_schedule[0] < 1 {
            return Err(Error::Config("n_schedule entries must be >= 1".into()));
        }
        if self.truncation_r < 0.0 {
            return Err(Error::Config("truncation_r must be >= 0".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Config("tolerance must be >= 0".into()));
        }
        if self.test_functions < 1 {
            return Err(Error::Config("test_functions must be >= 1".into()));
        }
        Ok(())
    }
}

/// Full pipeline record for one (system, k) pair.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub system_id: String,
    pub params: Vec<(String, f64)>,
    pub k: usize,
    pub dilation: DilationEstimate,
    /// The disk family the dilation stage searched over.
    pub family: Vec<Disk>,
    pub witnesses: Vec<WitnessResult>,
    pub spreads: Vec<SpreadReport>,
    pub limit_diagnostic: Vec<(usize, f64)>,
    pub invariance_residual: f64,
    pub spectrum: Spectrum,
    pub chi_partial_sum: f64,
    pub d_k_hat: f64,
    pub method: DilationMethod,
    pub tolerance: f64,
    pub verdict: bool,
    /// Wall-clock seconds per stage, in pipeline order. Reporting metadata
    /// only; excluded from determinism comparisons.
    pub stage_seconds: Vec<(&'static str, f64)>,
}

/// Run the whole construction for one k and check the dilation bound
/// `d_k ≤ χ₁ + … + χ_k` at the configured tolerance.
///
/// Pipeline: dilation estimate over the disk family, witness point at each
/// n_l on the best disk, time spreading over the m list, limit diagnostic
/// and invariance residual on the largest-n_l measure, then the Lyapunov
/// spectrum started at that witness point (10% transient). The verdict uses
/// the configured dilation estimator against the top-k exponent sum.
pub fn verify_theorem(system: &SystemDef, k: usize, config: &TheoremConfig) -> Result<TheoremReport> {
    config.validate()?;
    let d = system.dim();
    if k < 1 || k > d {
        return Err(Error::KOutOfRange { k, max: d });
    }
    let grid = match config.nodes_per_axis {
        Some(n) => QuadratureGrid::midpoint(k, n)?,
        None => QuadratureGrid::default_for(k)?,
    };
    let mut stage_seconds = Vec::new();

    let t0 = Instant::now();
    let family = default_disk_family(system, k, config.family_budget, config.seed)
        .map_err(|e| e.in_stage("dilation"))?;
    let dilation = estimate_dilation(system, k, &family, &config.n_schedule, &grid)
        .map_err(|e| e.in_stage("dilation"))?;
    stage_seconds.push(("dilation", t0.elapsed().as_secs_f64()));

    let best_id = &dilation.records.last().unwrap().best_disk_id;
    let best_disk = family
        .disks
        .iter()
        .find(|disk| disk.id() == best_id)
        .expect("best disk id comes from the family")
        .clone();

    let t0 = Instant::now();
    let mut witnesses = Vec::with_capacity(config.n_l_schedule.len());
    for &n_l in &config.n_l_schedule {
        witnesses.push(
            witness_point(system, &best_disk, n_l, k, &grid)
                .map_err(|e| e.in_stage("witness"))?,
        );
    }
    stage_seconds.push(("witness", t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let mut spreads = Vec::new();
    let mut measure_big: Option<EmpiricalMeasure> = None;
    let max_m = *config.m_list.last().unwrap();
    for witness in &witnesses {
        let orbit = match &config.cache_dir {
            Some(dir) => cached_witness_orbit(system, witness, dir),
            None => system.iterate(&witness.x_witness, witness.n),
        }
        .map_err(|e| e.in_stage("spread"))?;
        for &m in &config.m_list {
            let (report, measure) =
                spread_with_orbit(system, witness, &orbit, m, k, config.truncation_r)
                    .map_err(|e| e.in_stage("spread"))?;
            spreads.push(report);
            // One measure stands in for the weak-* limit: the largest n_l,
            // with atoms cut at n_l - max(m) so every m integrates against
            // the same object.
            if witness.n == *config.n_l_schedule.last().unwrap() && m == max_m {
                measure_big = Some(measure);
            }
        }
    }
    let measure_big = measure_big.expect("largest n_l and m are always visited");
    stage_seconds.push(("spread", t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let limit = limit_diagnostic(&measure_big, system, k, &config.m_list, config.truncation_r)
        .map_err(|e| e.in_stage("limit"))?;
    let residual = invariance_residual(&measure_big, system, config.test_functions, config.seed)
        .map_err(|e| e.in_stage("limit"))?;
    stage_seconds.push(("limit", t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let n_l_max = *config.n_l_schedule.last().unwrap();
    let transient = n_l_max / 10;
    let witness_last = witnesses.last().unwrap();
    let spectrum = lyapunov_spectrum(system, &witness_last.x_witness, n_l_max, transient)
        .map_err(|e| e.in_stage("spectrum"))?;
    let chi_sum = chi_partial_sum(&spectrum, k).map_err(|e| e.in_stage("spectrum"))?;
    stage_seconds.push(("spectrum", t0.elapsed().as_secs_f64()));

    let d_k_hat = dilation.d_k_hat(config.method);
    Ok(TheoremReport {
        system_id: system.id().to_string(),
        params: system.params().iter().map(|(a, b)| (a.clone(), *b)).collect(),
        k,
        dilation,
        family: family.disks,
        witnesses,
        spreads,
        limit_diagnostic: limit,
        invariance_residual: residual,
        spectrum,
        chi_partial_sum: chi_sum,
        d_k_hat,
        method: config.method,
        tolerance: config.tolerance,
        verdict: d_k_hat <= chi_sum + config.tolerance,
        stage_seconds,
    })
}
