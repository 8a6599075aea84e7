//! Log norms of k-th exterior powers of linear maps and of Jacobian cocycles
//! along orbits, with overflow-safe QR renormalization.
//!
//! Norm convention: `|Λᵏ L|` is the operator norm of the induced map on
//! k-vectors, which equals the product of the k largest singular values of
//! `L`. The minor-matrix construction below is the brute-force oracle for
//! that identity.

use nalgebra::DMatrix;

use itertools::Itertools;

use crate::dynamics::{Point, SystemDef};
use crate::error::{Error, Result};
use crate::numeric::hashed_unit;

/// Floor applied to the log of a vanishing singular value, near the log of
/// the smallest representable positive double. Keeps the arithmetic total.
pub const LOG_FLOOR: f64 = -745.0;

/// Maximum matrix dimension accepted by the minor-matrix oracle.
pub const MINOR_ORACLE_MAX_DIM: usize = 8;

/// Steps of orbit used to align the cocycle frame before measuring.
const WARMUP_WINDOW: usize = 256;

/// Forward passes of the alignment loop: at least 3 (two full power
/// iterations before the measured value), at most this many.
const MAX_FORWARD_PASSES: usize = 64;

/// A log-scale norm value together with a flag recording whether the
/// rank-deficiency floor was applied anywhere in its computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogNorm {
    pub value: f64,
    pub is_floor: bool,
}

impl LogNorm {
    fn exact(value: f64) -> Self {
        LogNorm {
            value,
            is_floor: false,
        }
    }
}

fn log_or_floor(x: f64) -> (f64, bool) {
    debug_assert!(x >= 0.0);
    let l = x.ln();
    if l.is_finite() && l > LOG_FLOOR {
        (l, false)
    } else {
        (LOG_FLOOR, true)
    }
}

/// `log |Λᵏ A|` as the sum of logs of the k largest singular values of `A`.
///
/// `A` may be rectangular (`d × d'`); `k` must satisfy `1 ≤ k ≤ min(d, d')`.
/// Vanishing singular values are floored and flagged.
pub fn exterior_log_norm(a: &DMatrix<f64>, k: usize) -> Result<LogNorm> {
    let kmax = a.nrows().min(a.ncols());
    if k < 1 || k > kmax {
        return Err(Error::KOutOfRange { k, max: kmax });
    }
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("singular values are not NaN"));
    let mut value = 0.0;
    let mut is_floor = false;
    for &s in sv.iter().take(k) {
        let (l, fl) = log_or_floor(s);
        value += l;
        is_floor |= fl;
    }
    Ok(LogNorm { value, is_floor })
}

/// Brute-force oracle for [`exterior_log_norm`]: builds the
/// `C(d,k) × C(d,k)` matrix of k×k minors of a square `A` (the matrix of
/// `Λᵏ A` in the lexicographically ordered standard basis of k-vectors) and
/// returns the log of its operator norm.
///
/// Refuses `d > 8` to guard against combinatorial blowup.
pub fn minor_matrix_log_norm(a: &DMatrix<f64>, k: usize) -> Result<LogNorm> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::InvalidArgument(format!(
            "minor-matrix oracle requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if d > MINOR_ORACLE_MAX_DIM {
        return Err(Error::MinorDimension {
            d,
            limit: MINOR_ORACLE_MAX_DIM,
        });
    }
    if k < 1 || k > d {
        return Err(Error::KOutOfRange { k, max: d });
    }
    let subsets: Vec<Vec<usize>> = (0..d).combinations(k).collect();
    let m = subsets.len();
    let compound = DMatrix::from_fn(m, m, |r, c| {
        let sub = DMatrix::from_fn(k, k, |i, j| a[(subsets[r][i], subsets[c][j])]);
        sub.determinant()
    });
    let top = compound
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let (value, is_floor) = log_or_floor(top);
    Ok(LogNorm { value, is_floor })
}

/// Deterministic generic orthonormal d×k frame.
///
/// The orientation is fixed and dense in every coordinate, so power
/// iteration is never trapped in an exactly invariant coordinate subspace
/// (the first-k-basis-vectors frame is, e.g. for diagonal maps).
fn generic_frame(d: usize, k: usize) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(d, k, |i, j| hashed_unit(i, j));
    let (q, _r) = raw.qr().unpack();
    q
}

/// One QR-renormalized push of an orthonormal frame through a linear map.
/// Accumulates the log k-volume expansion (sum of log |R_ii|).
fn push_frame(
    j: &DMatrix<f64>,
    frame: DMatrix<f64>,
    acc: &mut f64,
    floored: &mut bool,
) -> DMatrix<f64> {
    let k = frame.ncols();
    let (q, r) = (j * frame).qr().unpack();
    for i in 0..k {
        let (l, fl) = log_or_floor(r[(i, i)].abs());
        *acc += l;
        *floored |= fl;
    }
    q
}

/// Forward pass over cached window points: measures the expansion of `frame`
/// and returns the pushed frame.
fn forward_window(
    system: &SystemDef,
    pts: &[Point],
    steps: usize,
    mut frame: DMatrix<f64>,
) -> (f64, bool, DMatrix<f64>) {
    let mut acc = 0.0;
    let mut floored = false;
    for p in pts.iter().take(steps) {
        let j = system.jacobian(p);
        frame = push_frame(&j, frame, &mut acc, &mut floored);
    }
    (acc, floored, frame)
}

/// Backward pass (transposed Jacobians in reverse orbit order); the second
/// half of one power iteration of the window cocycle's Gram map.
fn backward_window(
    system: &SystemDef,
    pts: &[Point],
    steps: usize,
    mut frame: DMatrix<f64>,
) -> DMatrix<f64> {
    let mut acc = 0.0;
    let mut floored = false;
    for p in pts.iter().take(steps).rev() {
        let j = system.jacobian(p).transpose();
        frame = push_frame(&j, frame, &mut acc, &mut floored);
    }
    frame
}

fn check_cocycle_args(system: &SystemDef, x: &Point, k: usize) -> Result<()> {
    let d = system.dim();
    if x.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.dim(),
        });
    }
    if k < 1 || k > d {
        return Err(Error::KOutOfRange { k, max: d });
    }
    Ok(())
}

/// `log |Λᵏ T_x f^n|` by frame propagation with QR renormalization.
///
/// The frame starts generic, is aligned with the top singular subspace of
/// the cocycle by forward/backward power iterations over a leading window
/// of the orbit (at least two full iterations, then until the measured
/// window expansion stabilizes), and the returned value is the expansion of
/// the aligned frame measured from `x` forward over all `n` steps. The
/// result is a lower bound of the norm that is exact up to the alignment
/// residual, which decays with the singular-value gap.
pub fn cocycle_log_norm(system: &SystemDef, x: &Point, n: usize, k: usize) -> Result<LogNorm> {
    check_cocycle_args(system, x, k)?;
    if n == 0 {
        return Ok(LogNorm::exact(0.0));
    }
    let d = system.dim();
    let w = n.min(WARMUP_WINDOW);
    let window = system.iterate(x, w - 1)?;
    let pts = window.points();

    let mut frame = generic_frame(d, k);
    let mut prev: Option<f64> = None;
    let mut passes = 0;
    loop {
        let (val, _fl, pushed) = forward_window(system, pts, w, frame.clone());
        passes += 1;
        let converged = match prev {
            Some(p) => (val - p).abs() <= 1e-12 + 1e-14 * val.abs(),
            None => false,
        };
        if passes >= 3 && (converged || passes >= MAX_FORWARD_PASSES) {
            break;
        }
        prev = Some(val);
        frame = backward_window(system, pts, w, pushed);
    }

    // Measured pass over the full orbit with the aligned frame.
    let mut acc = 0.0;
    let mut floored = false;
    let mut xcur = x.clone();
    for _ in 0..n {
        let j = system.jacobian(&xcur);
        frame = push_frame(&j, frame, &mut acc, &mut floored);
        xcur = system.evaluate(&xcur)?;
    }
    Ok(LogNorm {
        value: acc,
        is_floor: floored,
    })
}

/// Exact chain-rule value `log |Λᵏ (T_x f^n ∘ F)|` for a specific d×k frame
/// `F` (e.g. a disk tangent). No alignment is involved: the initial QR of
/// `F` contributes `log |Λᵏ F|` and each orbit step contributes its exact
/// k-volume expansion factor.
pub fn cocycle_frame_log_norm(
    system: &SystemDef,
    x: &Point,
    n: usize,
    frame: &DMatrix<f64>,
) -> Result<LogNorm> {
    let k = frame.ncols();
    check_cocycle_args(system, x, k)?;
    if frame.nrows() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: frame.nrows(),
        });
    }
    let mut acc = 0.0;
    let mut floored = false;
    let (mut q, r) = frame.clone().qr().unpack();
    for i in 0..k {
        let (l, fl) = log_or_floor(r[(i, i)].abs());
        acc += l;
        floored |= fl;
    }
    let mut xcur = x.clone();
    for _ in 0..n {
        let j = system.jacobian(&xcur);
        q = push_frame(&j, q, &mut acc, &mut floored);
        xcur = system.evaluate(&xcur)?;
    }
    Ok(LogNorm {
        value: acc,
        is_floor: floored,
    })
}
