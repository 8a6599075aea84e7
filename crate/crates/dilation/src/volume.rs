//! Parametrized disks, k-volumes by midpoint quadrature, and estimation of
//! the k-dilation from the growth of iterated disk volumes.
//!
//! All volume arithmetic runs in log space with log-sum-exp: iterated
//! volumes of expanding maps overflow doubles near n = 30 otherwise.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{Domain, Point, SystemDef};
use crate::error::{Error, Result};
use crate::exterior::{cocycle_frame_log_norm, exterior_log_norm, LogNorm};
use crate::numeric::{least_squares_slope, log_sum_exp};

/// Default disk edge length in manifold units. Small enough that midpoint
/// quadrature stays accurate for moderate iteration counts.
pub const DEFAULT_DISK_SCALE: f64 = 0.1;

/// One term of a finite trigonometric perturbation series:
/// `amplitude * sin(2π freq·u + phase)`.
#[derive(Clone, Debug)]
pub struct TrigTerm {
    pub amplitude: DVector<f64>,
    pub freq: Vec<i32>,
    pub phase: f64,
}

/// Smooth perturbation of an affine disk, with analytic tangent.
#[derive(Clone, Debug, Default)]
pub struct TrigPerturbation {
    pub terms: Vec<TrigTerm>,
}

impl TrigPerturbation {
    fn offset(&self, u: &DVector<f64>) -> DVector<f64> {
        let d = self.terms[0].amplitude.len();
        let mut out = DVector::zeros(d);
        for t in &self.terms {
            let arg: f64 = 2.0 * PI * dot_if(u, &t.freq) + t.phase;
            out += &t.amplitude * arg.sin();
        }
        out
    }

    fn tangent(&self, u: &DVector<f64>, d: usize, k: usize) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(d, k);
        for t in &self.terms {
            let arg: f64 = 2.0 * PI * dot_if(u, &t.freq) + t.phase;
            let c = arg.cos();
            for j in 0..k {
                let factor = 2.0 * PI * t.freq[j] as f64 * c;
                for i in 0..d {
                    out[(i, j)] += t.amplitude[i] * factor;
                }
            }
        }
        out
    }

    /// Sup bound on the Euclidean norm of the offset, for domain checks.
    fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.norm()).sum()
    }
}

fn dot_if(u: &DVector<f64>, w: &[i32]) -> f64 {
    u.iter().zip(w).map(|(&a, &b)| a * b as f64).sum()
}

/// A parametrized C¹ embedding `σ : [0,1]^k → M`:
/// `σ(u) = base + scale·frame·(u − ½·1) + perturb(u)`, wrapped into the
/// domain at evaluation time. The tangent map is analytic.
#[derive(Clone, Debug)]
pub struct Disk {
    id: String,
    k: usize,
    base: Point,
    frame: DMatrix<f64>,
    scale: f64,
    perturb: Option<TrigPerturbation>,
}

impl Disk {
    pub fn new(
        id: impl Into<String>,
        base: Point,
        frame: DMatrix<f64>,
        scale: f64,
        perturb: Option<TrigPerturbation>,
    ) -> Result<Disk> {
        let d = base.dim();
        let k = frame.ncols();
        if frame.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: frame.nrows(),
            });
        }
        if k < 1 || k > d {
            return Err(Error::KOutOfRange { k, max: d });
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "disk scale must be positive, got {scale}"
            )));
        }
        for j in 0..k {
            let norm = frame.column(j).norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "disk frame column {j} has norm {norm}, expected 1"
                )));
            }
            for j2 in 0..j {
                let dot = frame.column(j).dot(&frame.column(j2)).abs();
                if dot > 0.99 {
                    return Err(Error::InvalidArgument(format!(
                        "disk frame columns {j2} and {j} are nearly parallel (|dot| = {dot})"
                    )));
                }
            }
        }
        if let Some(p) = &perturb {
            for (t, term) in p.terms.iter().enumerate() {
                if term.amplitude.len() != d || term.freq.len() != k {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: term.amplitude.len().max(term.freq.len()),
                    });
                }
                if term.freq.iter().all(|&f| f == 0) {
                    return Err(Error::InvalidArgument(format!(
                        "perturbation term {t} has zero frequency"
                    )));
                }
            }
        }
        Ok(Disk {
            id: id.into(),
            k,
            base,
            frame,
            scale,
            perturb,
        })
    }

    pub fn affine(
        id: impl Into<String>,
        base: Point,
        frame: DMatrix<f64>,
        scale: f64,
    ) -> Result<Disk> {
        Disk::new(id, base, frame, scale, None)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn perturbation(&self) -> Option<&TrigPerturbation> {
        self.perturb.as_ref()
    }

    /// `σ(u)`, wrapped into the domain.
    pub fn point(&self, u: &DVector<f64>, domain: &Domain) -> Point {
        let centered = u - DVector::from_element(self.k, 0.5);
        let mut raw = self.base.coords() + &self.frame * centered * self.scale;
        if let Some(p) = &self.perturb {
            raw += p.offset(u);
        }
        Point::from_vector(domain.wrap(raw))
    }

    /// Analytic tangent map `T_u σ = scale·frame + perturb'(u)` (d×k).
    pub fn tangent(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut t = &self.frame * self.scale;
        if let Some(p) = &self.perturb {
            t += p.tangent(u, self.base.dim(), self.k);
        }
        t
    }

    /// Conservative check that the image stays inside a box domain.
    fn fits_in(&self, domain: &Domain) -> bool {
        match domain {
            Domain::TorusFlat { .. } => true,
            Domain::Box { lo, hi } => {
                let reach = self.scale * (self.k as f64).sqrt() / 2.0
                    + self.perturb.as_ref().map_or(0.0, |p| p.sup_bound());
                (0..self.base.dim()).all(|a| {
                    self.base.coords()[a] - reach >= lo[a] && self.base.coords()[a] + reach <= hi[a]
                })
            }
        }
    }
}

/// Midpoint quadrature grid on `[0,1]^k`: the `N^k` cell midpoints with
/// uniform weight `1/N^k`. Nodes are listed in lexicographic multi-index
/// order (first axis slowest), which fixes the reduction order.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    k: usize,
    nodes_per_axis: usize,
    nodes: Vec<DVector<f64>>,
}

impl QuadratureGrid {
    pub fn midpoint(k: usize, nodes_per_axis: usize) -> Result<QuadratureGrid> {
        if k < 1 {
            return Err(Error::KOutOfRange { k, max: 8 });
        }
        if nodes_per_axis < 1 {
            return Err(Error::InvalidArgument(
                "quadrature grid needs at least one node per axis".into(),
            ));
        }
        let total = nodes_per_axis.pow(k as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut multi = vec![0usize; k];
        loop {
            nodes.push(DVector::from_fn(k, |a, _| {
                (multi[a] as f64 + 0.5) / nodes_per_axis as f64
            }));
            let mut axis = k;
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                multi[axis] += 1;
                if multi[axis] < nodes_per_axis {
                    done = false;
                    break;
                }
                multi[axis] = 0;
            }
            if done {
                break;
            }
        }
        Ok(QuadratureGrid {
            k,
            nodes_per_axis,
            nodes,
        })
    }

    /// Default node counts: 17 per axis for k ≤ 2, 9 for k = 3, 5 beyond.
    /// Keeps total node counts around 10^4 or less.
    pub fn default_for(k: usize) -> Result<QuadratureGrid> {
        let n = match k {
            0..=2 => 17,
            3 => 9,
            _ => 5,
        };
        QuadratureGrid::midpoint(k, n)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn nodes(&self) -> &[DVector<f64>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// log of the uniform node weight, `-k ln N`.
    pub fn log_weight(&self) -> f64 {
        -(self.k as f64) * (self.nodes_per_axis as f64).ln()
    }
}

fn check_disk_grid(disk: &Disk, grid: &QuadratureGrid) -> Result<()> {
    if disk.k() != grid.k() {
        return Err(Error::DimensionMismatch {
            expected: disk.k(),
            got: grid.k(),
        });
    }
    Ok(())
}

/// Per-node integrand `log |Λᵏ T_u σ|` over the grid.
pub(crate) fn disk_node_values(disk: &Disk, grid: &QuadratureGrid) -> Result<Vec<LogNorm>> {
    check_disk_grid(disk, grid)?;
    grid.nodes()
        .par_iter()
        .map(|u| exterior_log_norm(&disk.tangent(u), disk.k()))
        .collect()
}

/// Per-node chain values `log |Λᵏ (T_{σ(u)} f^n ∘ T_u σ)|`, computed by
/// pushing the disk tangent frame through the QR-renormalized cocycle. This
/// is the exact chain-rule value per node, not a bound.
pub(crate) fn chain_node_values(
    system: &SystemDef,
    disk: &Disk,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<Vec<LogNorm>> {
    check_disk_grid(disk, grid)?;
    if disk.base().dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: disk.base().dim(),
        });
    }
    grid.nodes()
        .par_iter()
        .map(|u| {
            let x = disk.point(u, system.domain());
            cocycle_frame_log_norm(system, &x, n, &disk.tangent(u))
        })
        .collect()
}

fn reduce_log_integral(values: &[LogNorm], grid: &QuadratureGrid) -> Result<f64> {
    if values.iter().all(|v| v.is_floor) {
        return Err(Error::DegenerateDisk);
    }
    let vals: Vec<f64> = values.iter().map(|v| v.value).collect();
    Ok(log_sum_exp(&vals) + grid.log_weight())
}

/// `log V(σ)`: log of the quadrature sum of `|Λᵏ T_u σ|` over the grid.
pub fn log_volume(disk: &Disk, grid: &QuadratureGrid) -> Result<f64> {
    reduce_log_integral(&disk_node_values(disk, grid)?, grid)
}

/// `log V(f^n ∘ σ)` by the chain rule per node; `n = 0` reduces exactly to
/// [`log_volume`].
pub fn log_iterated_volume(
    system: &SystemDef,
    disk: &Disk,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<f64> {
    if n == 0 {
        return log_volume(disk, grid);
    }
    reduce_log_integral(&chain_node_values(system, disk, n, grid)?, grid)
}

/// A finite family of disks standing in for the paper-level supremum over
/// all of S_k.
#[derive(Clone, Debug)]
pub struct DiskFamily {
    pub disks: Vec<Disk>,
}

impl DiskFamily {
    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }
}

/// Deterministic default family: every coordinate-plane affine disk at the
/// domain center, plus `budget` random affine disks (random base, random
/// orthonormal frame from QR of a Gaussian matrix), all at scale 0.1.
/// Reproducible from `seed`.
pub fn default_disk_family(
    system: &SystemDef,
    k: usize,
    budget: usize,
    seed: u64,
) -> Result<DiskFamily> {
    let d = system.dim();
    if k < 1 || k > d {
        return Err(Error::KOutOfRange { k, max: d });
    }
    let mut disks = Vec::new();
    let center = Point::from_vector(system.domain().center());
    for axes in (0..d).combinations(k) {
        let mut frame = DMatrix::zeros(d, k);
        for (j, &a) in axes.iter().enumerate() {
            frame[(a, j)] = 1.0;
        }
        let id = format!("axis_{}", axes.iter().map(|a| a.to_string()).join("_"));
        disks.push(Disk::affine(id, center.clone(), frame, DEFAULT_DISK_SCALE)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for b in 0..budget {
        let base = random_base(system.domain(), &mut rng);
        let raw = DMatrix::from_fn(d, k, |_, _| gaussian(&mut rng));
        let (frame, _r) = raw.qr().unpack();
        let disk = Disk::affine(format!("rand_{b}"), base, frame, DEFAULT_DISK_SCALE)?;
        if disk.fits_in(system.domain()) {
            disks.push(disk);
        }
    }
    Ok(DiskFamily { disks })
}

fn random_base(domain: &Domain, rng: &mut ChaCha8Rng) -> Point {
    match domain {
        Domain::TorusFlat { d } => Point::new((0..*d).map(|_| rng.gen::<f64>()).collect()),
        Domain::Box { lo, hi } => Point::new(
            (0..lo.len())
                .map(|a| lo[a] + (0.2 + 0.6 * rng.gen::<f64>()) * (hi[a] - lo[a]))
                .collect(),
        ),
    }
}

/// Box-Muller standard normal; avoids an extra distribution dependency.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Which of the two recorded estimators [`DilationEstimate`] reports as its
/// headline value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DilationMethod {
    /// Least-squares slope over the upper half of the schedule.
    SlopeFit,
    /// best_log_ratio / n at the largest schedule entry.
    LastPoint,
}

impl DilationMethod {
    pub fn parse(s: &str) -> Result<DilationMethod> {
        match s {
            "slope" | "slope_fit" => Ok(DilationMethod::SlopeFit),
            "last" | "last_point" => Ok(DilationMethod::LastPoint),
            other => Err(Error::Config(format!(
                "unknown dilation method `{other}` (expected `slope` or `last`)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DilationMethod::SlopeFit => "slope_fit",
            DilationMethod::LastPoint => "last_point",
        }
    }
}

/// Per-n growth record: the best log volume ratio over the family and the
/// disk that attained it.
#[derive(Clone, Debug)]
pub struct DilationRecord {
    pub n: usize,
    pub best_log_ratio: f64,
    pub best_disk_id: String,
}

/// Growth records plus the two fitted per-unit-time dilation estimators.
#[derive(Clone, Debug)]
pub struct DilationEstimate {
    pub k: usize,
    pub records: Vec<DilationRecord>,
    pub slope_fit: f64,
    pub last_point: f64,
}

impl DilationEstimate {
    pub fn d_k_hat(&self, method: DilationMethod) -> f64 {
        match method {
            DilationMethod::SlopeFit => self.slope_fit,
            DilationMethod::LastPoint => self.last_point,
        }
    }
}

/// Estimate the k-dilation: for each n in the schedule take the best log
/// volume ratio over the family, then fit the growth rate.
///
/// The per-n transient (alignment of a disk with the expanding directions)
/// biases early ratios downward, so the slope fit uses only the upper half
/// of the schedule; the last-point estimator is recorded alongside so
/// disagreement stays visible.
pub fn estimate_dilation(
    system: &SystemDef,
    k: usize,
    family: &DiskFamily,
    schedule: &[usize],
    grid: &QuadratureGrid,
) -> Result<DilationEstimate> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty dilation schedule".into()));
    }
    if !schedule.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "dilation schedule must be strictly increasing".into(),
        ));
    }
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty disk family".into()));
    }
    for disk in &family.disks {
        if disk.k() != k {
            return Err(Error::KOutOfRange { k: disk.k(), max: k });
        }
    }

    // ratios[disk][schedule position]
    let ratios: Vec<Vec<f64>> = family
        .disks
        .par_iter()
        .map(|disk| {
            let lv = log_volume(disk, grid)?;
            schedule
                .iter()
                .map(|&n| Ok(log_iterated_volume(system, disk, n, grid)? - lv))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(schedule.len());
    for (pos, &n) in schedule.iter().enumerate() {
        let mut best = f64::NEG_INFINITY;
        let mut best_id = "";
        for (disk, row) in family.disks.iter().zip(&ratios) {
            if row[pos] > best {
                best = row[pos];
                best_id = disk.id();
            }
        }
        records.push(DilationRecord {
            n,
            best_log_ratio: best,
            best_disk_id: best_id.to_string(),
        });
    }

    let upper: Vec<(f64, f64)> = records[records.len() / 2..]
        .iter()
        .map(|r| (r.n as f64, r.best_log_ratio))
        .collect();
    let slope_fit = least_squares_slope(&upper);
    let last = records.last().unwrap();
    let last_point = last.best_log_ratio / last.n as f64;
    if !slope_fit.is_finite() || !last_point.is_finite() {
        return Err(Error::InvalidArgument(
            "dilation estimate is not finite".into(),
        ));
    }
    Ok(DilationEstimate {
        k,
        records,
        slope_fit,
        last_point,
    })
}
