//! Constructive counterparts of the proof's three steps: a witness point
//! where the cocycle realizes the volume-expansion ratio, time spreading of
//! that expansion via Euclidean division into an empirical measure, and
//! truncated integration of the m-step cocycle against that measure.

use std::f64::consts::PI;

use nalgebra::DVector;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{Domain, Orbit, Point, SystemDef};
use crate::error::{Error, Result};
use crate::exterior::cocycle_log_norm;
use crate::numeric::log_sum_exp;
use crate::volume::{chain_node_values, disk_node_values, Disk, QuadratureGrid};

/// Grid count used when estimating the Lipschitz bound inside spread
/// reports.
const LIPSCHITZ_SAMPLES: usize = 4096;

/// Result of the constructive pigeonhole: the grid node whose n-step
/// cocycle realizes the discrete volume-expansion ratio.
#[derive(Clone, Debug)]
pub struct WitnessResult {
    /// Argmax node in `[0,1]^k`.
    pub u_star: DVector<f64>,
    /// Index of that node in the grid's lexicographic order.
    pub node_index: usize,
    /// `σ(u_star)`, the witness point on the manifold.
    pub x_witness: Point,
    /// Cocycle length.
    pub n: usize,
    /// `log |Λᵏ T_{x_witness} f^n|` (frame-method lower bound; at the
    /// argmax it dominates the discrete ratio by construction).
    pub log_cocycle: f64,
    /// `log V(f^n ∘ σ) − log V(σ)` on the same grid.
    pub log_ratio: f64,
    /// Deficit bookkeeping `(log_ratio − log_cocycle)/n`; may be ≤ 0.
    pub epsilon: f64,
}

/// Uniformly weighted Dirac comb along an orbit segment: atoms
/// `f^p(x)` for `p = 0..n_l − m`, each of weight `1/n_l`.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    atoms: Vec<Point>,
    n_l: usize,
    m: usize,
}

impl EmpiricalMeasure {
    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn n_l(&self) -> usize {
        self.n_l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn atom_weight(&self) -> f64 {
        1.0 / self.n_l as f64
    }

    /// Total mass `(n_l − m + 1)/n_l ∈ (0, 1]`.
    pub fn mass(&self) -> f64 {
        self.atoms.len() as f64 / self.n_l as f64
    }
}

/// Bookkeeping of the time-spreading step for one `(n_l, m)` pair.
#[derive(Clone, Debug)]
pub struct SpreadReport {
    pub n_l: usize,
    pub m: usize,
    /// Euclidean division quotients per residue: `n_l = i + m q_i + r_i`.
    pub q: Vec<usize>,
    pub r: Vec<usize>,
    /// `(1/(m n_l)) Σ_i log |Λᵏ T_{f^{i+m q_i}(x)} f^{r_i}|`.
    pub a_l: f64,
    /// `(1/(m n_l)) Σ_i log |Λᵏ T_x f^i|`.
    pub b_l: f64,
    /// `(1/m) ∫ log |Λᵏ T_y f^m| dν_l`, truncated at `−floor_r·m` per atom.
    pub middle: f64,
    /// Witness rate `log_cocycle / n_l`.
    pub lhs: f64,
    /// A priori bound `(k m² / (m n_l)) log L` on each of a_l and b_l.
    pub bound_l: f64,
    /// Residual of the spread inequality: what must be subtracted from the
    /// witness rate for `lhs − eps_prime ≤ middle` to hold, i.e.
    /// `lhs − middle`.
    pub eps_prime: f64,
}

/// Locate the grid node maximizing the n-step cocycle over the disk.
///
/// Per node the score is the larger of the aligned-frame cocycle value and
/// the chain value minus the disk integrand; both are lower bounds of
/// `log |Λᵏ T_{σ(u)} f^n|`, and the second makes the discrete pigeonhole
/// `max ≥ log_ratio` hold up to pure rounding. Ties resolve to the
/// lexicographically smallest node index.
pub fn witness_point(
    system: &SystemDef,
    disk: &Disk,
    n: usize,
    k: usize,
    grid: &QuadratureGrid,
) -> Result<WitnessResult> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "witness_point requires n >= 1".into(),
        ));
    }
    if disk.k() != k || grid.k() != k {
        return Err(Error::KOutOfRange { k, max: disk.k() });
    }
    let disk_vals = disk_node_values(disk, grid)?;
    let chain_vals = chain_node_values(system, disk, n, grid)?;
    if chain_vals.iter().all(|v| v.is_floor) {
        return Err(Error::DegenerateDisk);
    }

    let scores: Vec<f64> = grid
        .nodes()
        .par_iter()
        .enumerate()
        .map(|(idx, u)| {
            let x = disk.point(u, system.domain());
            let aligned = cocycle_log_norm(system, &x, n, k)?.value;
            Ok(aligned.max(chain_vals[idx].value - disk_vals[idx].value))
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut best = 0usize;
    for (idx, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = idx;
        }
    }

    let chain: Vec<f64> = chain_vals.iter().map(|v| v.value).collect();
    let flat: Vec<f64> = disk_vals.iter().map(|v| v.value).collect();
    let log_ratio = log_sum_exp(&chain) - log_sum_exp(&flat);
    let log_cocycle = scores[best];
    let u_star = grid.nodes()[best].clone();
    let x_witness = disk.point(&u_star, system.domain());
    Ok(WitnessResult {
        u_star,
        node_index: best,
        x_witness,
        n,
        log_cocycle,
        log_ratio,
        epsilon: (log_ratio - log_cocycle) / n as f64,
    })
}

/// Spread the witness dilation out in time (the Euclidean-division step),
/// producing the empirical measure `ν_l` and the bookkeeping of the summed
/// telescoping inequality.
pub fn spread_in_time(
    system: &SystemDef,
    witness: &WitnessResult,
    m: usize,
    k: usize,
    floor_r: f64,
) -> Result<(SpreadReport, EmpiricalMeasure)> {
    let orbit = system.iterate(&witness.x_witness, witness.n)?;
    spread_with_orbit(system, witness, &orbit, m, k, floor_r)
}

/// Same as [`spread_in_time`] with the witness orbit supplied by the
/// caller (e.g. from a cache). The orbit must start at the witness point
/// and have length `witness.n`.
pub fn spread_with_orbit(
    system: &SystemDef,
    witness: &WitnessResult,
    orbit: &Orbit,
    m: usize,
    k: usize,
    floor_r: f64,
) -> Result<(SpreadReport, EmpiricalMeasure)> {
    let n_l = witness.n;
    if m < 1 || m >= n_l {
        return Err(Error::InvalidArgument(format!(
            "spread_in_time requires 1 <= m < n_l, got m = {m}, n_l = {n_l}"
        )));
    }
    if orbit.len() != n_l || orbit.start() != &witness.x_witness {
        return Err(Error::InvalidArgument(
            "orbit does not match the witness".into(),
        ));
    }
    let pts = orbit.points();

    let atoms: Vec<Point> = pts[..=n_l - m].to_vec();
    let measure = EmpiricalMeasure {
        atoms,
        n_l,
        m,
    };

    let mut q = Vec::with_capacity(m);
    let mut r = Vec::with_capacity(m);
    for i in 0..m {
        q.push((n_l - i) / m);
        r.push((n_l - i) % m);
    }

    let mn = (m * n_l) as f64;
    let mut a_l = 0.0;
    for &ri in &r {
        if ri > 0 {
            a_l += cocycle_log_norm(system, &pts[n_l - ri], ri, k)?.value;
        }
    }
    a_l /= mn;

    let mut b_l = 0.0;
    for i in 1..m {
        b_l += cocycle_log_norm(system, &pts[0], i, k)?.value;
    }
    b_l /= mn;

    let block_floor = -floor_r * m as f64;
    let block_sum: f64 = measure
        .atoms
        .par_iter()
        .map(|y| Ok(cocycle_log_norm(system, y, m, k)?.value.max(block_floor)))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    let middle = block_sum / mn;

    let lhs = witness.log_cocycle / n_l as f64;
    let log_l = system.lipschitz_bound(LIPSCHITZ_SAMPLES).ln();
    let bound_l = ((k * m * m) as f64 / mn) * log_l;

    Ok((
        SpreadReport {
            n_l,
            m,
            q,
            r,
            a_l,
            b_l,
            middle,
            lhs,
            bound_l,
            eps_prime: lhs - middle,
        },
        measure,
    ))
}

/// `(1/m) ∫ Φ_r dν_l` where `Φ_r(y) = max(log |Λᵏ T_y f^m|, −r)`.
///
/// Nonincreasing in `r`, and constant in `r` once `−r` is below every
/// atom's value.
pub fn integrate_log_norm(
    measure: &EmpiricalMeasure,
    system: &SystemDef,
    m: usize,
    k: usize,
    r: f64,
) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "truncation level r must be >= 0, got {r}"
        )));
    }
    if m < 1 || m >= measure.n_l {
        return Err(Error::InvalidArgument(format!(
            "integrate_log_norm requires 1 <= m < n_l, got m = {m}, n_l = {}",
            measure.n_l
        )));
    }
    let sum: f64 = measure
        .atoms
        .par_iter()
        .map(|y| Ok(cocycle_log_norm(system, y, m, k)?.value.max(-r)))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    Ok(sum * measure.atom_weight() / m as f64)
}

/// Witness orbit with an optional on-disk cache.
///
/// The cache is an optimization only: a text table, one point per row with
/// full-precision coordinates, keyed by (system id, parameters, witness
/// point, n_l). Round-tripping through the table is bit-exact, so cached
/// and fresh runs produce identical downstream numbers. Any unreadable or
/// stale entry is silently recomputed and rewritten.
pub fn cached_witness_orbit(
    system: &SystemDef,
    witness: &WitnessResult,
    cache_dir: &std::path::Path,
) -> Result<Orbit> {
    use crate::numeric::{fmt_g17, fnv1a64};
    use std::io::Write;

    let mut key = String::new();
    key.push_str(system.id());
    for (name, value) in system.params() {
        key.push_str(&format!(";{name}={}", fmt_g17(*value)));
    }
    for c in witness.x_witness.coords().iter() {
        key.push_str(&format!(";{:016x}", c.to_bits()));
    }
    key.push_str(&format!(";n_l={}", witness.n));
    let path = cache_dir.join(format!("orbit_{:016x}.txt", fnv1a64(key.as_bytes())));

    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Some(orbit) = parse_orbit_table(&text, system.dim(), witness.n) {
            if orbit.start() == &witness.x_witness {
                return Ok(orbit);
            }
        }
    }

    let orbit = system.iterate(&witness.x_witness, witness.n)?;
    std::fs::create_dir_all(cache_dir)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        for p in orbit.points() {
            let row: Vec<String> = p.coords().iter().map(|&c| fmt_g17(c)).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
    }
    std::fs::rename(&tmp, &path)?;
    Ok(orbit)
}

fn parse_orbit_table(text: &str, d: usize, n: usize) -> Option<Orbit> {
    let mut points = Vec::with_capacity(n + 1);
    for line in text.lines() {
        let coords: Option<Vec<f64>> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok())
            .collect();
        let coords = coords?;
        if coords.len() != d {
            return None;
        }
        points.push(Point::new(coords));
    }
    if points.len() != n + 1 {
        return None;
    }
    Some(Orbit::from_points(points))
}

/// A smooth bounded observable on the domain: `cos(2π w·x̂ + φ)` with
/// integer frequencies, box coordinates rescaled to the unit cube.
#[derive(Clone, Debug)]
pub struct TrigObservable {
    pub freq: Vec<i32>,
    pub phase: f64,
}

impl TrigObservable {
    pub fn eval(&self, x: &Point, domain: &Domain) -> f64 {
        let mut arg = self.phase;
        match domain {
            Domain::TorusFlat { .. } => {
                for (a, &w) in self.freq.iter().enumerate() {
                    arg += 2.0 * PI * w as f64 * x.coords()[a];
                }
            }
            Domain::Box { lo, hi } => {
                for (a, &w) in self.freq.iter().enumerate() {
                    let t = (x.coords()[a] - lo[a]) / (hi[a] - lo[a]);
                    arg += 2.0 * PI * w as f64 * t;
                }
            }
        }
        arg.cos()
    }
}

/// `|∫ g∘f dν_l − ∫ g dν_l|` for one observable (unnormalized integrals,
/// weight 1/n_l per atom).
pub fn residual_for_observable(
    measure: &EmpiricalMeasure,
    system: &SystemDef,
    obs: &TrigObservable,
) -> Result<f64> {
    let w = measure.atom_weight();
    let mut pushed = 0.0;
    let mut plain = 0.0;
    for y in measure.atoms() {
        plain += obs.eval(y, system.domain());
        pushed += obs.eval(&system.evaluate(y)?, system.domain());
    }
    Ok(((pushed - plain) * w).abs())
}

/// Distance from invariance of the empirical measure, probed by a seeded
/// family of trigonometric observables: the maximum over the family of
/// `|∫ g∘f dν_l − ∫ g dν_l|`. Converges to 0 as `n_l → ∞` at rate
/// `O(m/n_l)` (boundary terms only).
pub fn invariance_residual(
    measure: &EmpiricalMeasure,
    system: &SystemDef,
    test_functions: usize,
    seed: u64,
) -> Result<f64> {
    if test_functions < 1 {
        return Err(Error::InvalidArgument(
            "invariance_residual needs at least one test function".into(),
        ));
    }
    let d = system.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..test_functions {
        let mut freq: Vec<i32> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
        if freq.iter().all(|&w| w == 0) {
            freq[0] = 1;
        }
        let obs = TrigObservable {
            freq,
            phase: rng.gen_range(0.0..2.0 * PI),
        };
        worst = worst.max(residual_for_observable(measure, system, &obs)?);
    }
    Ok(worst)
}
