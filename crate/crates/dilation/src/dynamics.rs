//! Discrete dynamical systems in flat coordinates: state points, domains,
//! system definitions with analytic Jacobians, and orbit evaluation.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A point of the state space in flat coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point {
            coords: DVector::from_vec(coords),
        }
    }

    pub fn from_vector(coords: DVector<f64>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// State-space domain. Flat metric throughout: either the unit torus with
/// coordinates in `[0, 1)` per axis, or a forward-invariant box in `R^d`.
#[derive(Clone, Debug)]
pub enum Domain {
    TorusFlat { d: usize },
    Box { lo: DVector<f64>, hi: DVector<f64> },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::TorusFlat { d } => *d,
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    /// Fold a raw image point back into the domain. Torus wrap is
    /// `x - floor(x)` per coordinate, guarded against the `1.0` rounding
    /// artifact for tiny negative inputs; box domains are left untouched
    /// (forward invariance is the system's contract).
    pub fn wrap(&self, mut x: DVector<f64>) -> DVector<f64> {
        if let Domain::TorusFlat { .. } = self {
            for v in x.iter_mut() {
                let mut f = *v - v.floor();
                if f >= 1.0 {
                    f = 0.0;
                }
                *v = f;
            }
        }
        x
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        match self {
            Domain::TorusFlat { d } => {
                x.len() == *d && x.iter().all(|&v| v >= 0.0 && v < 1.0 + tol)
            }
            Domain::Box { lo, hi } => {
                x.len() == lo.len()
                    && x.iter()
                        .zip(lo.iter().zip(hi.iter()))
                        .all(|(&v, (&l, &h))| v >= l - tol && v <= h + tol)
            }
        }
    }

    pub fn center(&self) -> DVector<f64> {
        match self {
            Domain::TorusFlat { d } => DVector::from_element(*d, 0.5),
            Domain::Box { lo, hi } => (lo + hi) * 0.5,
        }
    }

    /// Uniform grid point for Lipschitz sampling: per-axis midpoint lattice.
    fn grid_point(&self, multi: &[usize], per_axis: usize) -> DVector<f64> {
        let d = self.dim();
        let mut x = DVector::zeros(d);
        for a in 0..d {
            let t = (multi[a] as f64 + 0.5) / per_axis as f64;
            x[a] = match self {
                Domain::TorusFlat { .. } => t,
                Domain::Box { lo, hi } => lo[a] + t * (hi[a] - lo[a]),
            };
        }
        x
    }
}

type MapFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type JacFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// A self-describing discrete dynamical system: map rule, analytic Jacobian,
/// domain, and an optional analytic Lipschitz cap.
///
/// Values are immutable after construction and safe to share across threads;
/// all operations are pure functions of their inputs.
pub struct SystemDef {
    id: String,
    params: BTreeMap<String, f64>,
    domain: Domain,
    map_rule: Box<MapFn>,
    jacobian_rule: Box<JacFn>,
    lipschitz_cap: Option<f64>,
    ground_truth: Option<Vec<f64>>,
}

impl SystemDef {
    pub fn new(
        id: impl Into<String>,
        domain: Domain,
        map_rule: Box<MapFn>,
        jacobian_rule: Box<JacFn>,
        lipschitz_cap: Option<f64>,
    ) -> Self {
        SystemDef {
            id: id.into(),
            params: BTreeMap::new(),
            domain,
            map_rule,
            jacobian_rule,
            lipschitz_cap,
            ground_truth: None,
        }
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn with_ground_truth(mut self, chis: Vec<f64>) -> Self {
        self.ground_truth = Some(chis);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Known exponent spectrum (sorted nonincreasing) when the system is
    /// simple enough to admit one; `None` for the nonlinear catalog entries.
    pub fn ground_truth(&self) -> Option<&[f64]> {
        self.ground_truth.as_deref()
    }

    /// Apply the map once, wrapping the image back into the domain.
    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let img = (self.map_rule)(x.coords());
        Ok(Point::from_vector(self.domain.wrap(img)))
    }

    /// Tangent map at `x` in standard flat coordinates. Total by contract.
    pub fn jacobian(&self, x: &Point) -> DMatrix<f64> {
        debug_assert_eq!(x.dim(), self.dim(), "jacobian: dimension mismatch");
        (self.jacobian_rule)(x.coords())
    }

    /// Orbit of length `n` starting at `x` (n+1 points including the start).
    pub fn iterate(&self, x: &Point, n: usize) -> Result<Orbit> {
        let mut points = Vec::with_capacity(n + 1);
        points.push(x.clone());
        for _ in 0..n {
            let next = self.evaluate(points.last().unwrap())?;
            points.push(next);
        }
        Ok(Orbit { points })
    }

    /// Upper bound `L = max(sup_x |T_x f|, 1)` for the Lipschitz constant.
    ///
    /// Uses the analytic cap when provided; otherwise the maximum operator
    /// norm of the Jacobian over a deterministic midpoint lattice of roughly
    /// `samples` points. Refining the lattice by an odd factor keeps earlier
    /// sample points, so the estimate is monotone under nested refinement.
    pub fn lipschitz_bound(&self, samples: usize) -> f64 {
        if let Some(cap) = self.lipschitz_cap {
            return cap.max(1.0);
        }
        let d = self.dim();
        let samples = samples.max(1);
        let per_axis = (samples as f64).powf(1.0 / d as f64).round().max(1.0) as usize;
        let mut best: f64 = 1.0;
        let mut multi = vec![0usize; d];
        loop {
            let x = self.domain.grid_point(&multi, per_axis);
            let j = (self.jacobian_rule)(&x);
            let sv = j.singular_values();
            let top = sv.iter().cloned().fold(0.0f64, f64::max);
            best = best.max(top);
            // advance the multi-index odometer
            let mut axis = d;
            loop {
                if axis == 0 {
                    return best;
                }
                axis -= 1;
                multi[axis] += 1;
                if multi[axis] < per_axis {
                    break;
                }
                multi[axis] = 0;
            }
        }
    }
}

impl fmt::Debug for SystemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemDef")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// A finite orbit segment: `points[p+1] = f(points[p])`.
#[derive(Clone, Debug)]
pub struct Orbit {
    points: Vec<Point>,
}

impl Orbit {
    pub fn start(&self) -> &Point {
        &self.points[0]
    }

    /// Number of map applications (the orbit holds `n + 1` points).
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub(crate) fn from_points(points: Vec<Point>) -> Self {
        assert!(!points.is_empty());
        Orbit { points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_system;
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn system(id: &str) -> SystemDef {
        build_system(id, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn identity_fixes_points() {
        let sys = system("identity");
        let x = Point::new(vec![0.3, 0.7]);
        let y = sys.evaluate(&x).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn cat_map_half_half() {
        // [[2,1],[1,1]] (0.5, 0.5) = (1.5, 1.0) -> (0.5, 0.0) mod 1,
        // confirmed by integer arithmetic: (3/2 mod 1, 2/2 mod 1).
        let sys = system("cat_map");
        let y = sys.evaluate(&Point::new(vec![0.5, 0.5])).unwrap();
        assert_relative_eq!(y.coords()[0], 0.5, max_relative = 1e-15);
        assert_eq!(y.coords()[1], 0.0);
    }

    #[test]
    fn doubling_three_quarters() {
        let sys = system("doubling");
        let y = sys.evaluate(&Point::new(vec![0.75])).unwrap();
        assert_eq!(y.coords()[0], 0.5);
    }

    #[test]
    fn evaluate_rejects_dimension_mismatch() {
        let sys = system("cat_map");
        let err = sys.evaluate(&Point::new(vec![0.5])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn iterate_zero_steps() {
        let sys = system("standard_map");
        let x = Point::new(vec![0.2, 0.4]);
        let orbit = sys.iterate(&x, 0).unwrap();
        assert_eq!(orbit.len(), 0);
        assert_eq!(orbit.points().len(), 1);
        assert_eq!(orbit.start(), &x);
    }

    #[test]
    fn cat_map_origin_is_fixed() {
        let sys = system("cat_map");
        let orbit = sys.iterate(&Point::new(vec![0.0, 0.0]), 10).unwrap();
        for p in orbit.points() {
            assert_eq!(p.coords()[0], 0.0);
            assert_eq!(p.coords()[1], 0.0);
        }
    }

    #[test]
    fn doubling_orbit_of_one_third() {
        // exact rational oracle: 1/3 -> 2/3 -> 4/3 mod 1 = 1/3
        let sys = system("doubling");
        let orbit = sys.iterate(&Point::new(vec![1.0 / 3.0]), 2).unwrap();
        let expected = [1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0];
        for (p, e) in orbit.points().iter().zip(expected) {
            assert_relative_eq!(p.coords()[0], e, epsilon = 1e-15);
        }
    }

    #[test]
    fn orbit_points_chain() {
        let sys = system("standard_map");
        let orbit = sys.iterate(&Point::new(vec![0.11, 0.23]), 50).unwrap();
        for w in orbit.points().windows(2) {
            assert_eq!(sys.evaluate(&w[0]).unwrap(), w[1]);
        }
    }

    #[test]
    fn forward_invariance_long_orbits() {
        for id in crate::catalog::catalog_ids() {
            let sys = system(id);
            let d = sys.dim();
            let start = Point::from_vector(sys.domain().center() * 0.9);
            let orbit = sys.iterate(&start, 10_000).unwrap();
            for p in orbit.points() {
                assert!(
                    sys.domain().contains(p.coords(), 1e-12),
                    "{id} (d={d}) left its domain at {p}"
                );
            }
        }
    }

    #[test]
    fn lipschitz_identity_is_one() {
        assert_eq!(system("identity").lipschitz_bound(100), 1.0);
    }

    #[test]
    fn lipschitz_cat_map_spectral_norm() {
        // [[2,1],[1,1]] is symmetric positive definite, so the operator norm
        // is the top eigenvalue (3 + sqrt 5)/2.
        let expected = (3.0 + 5.0f64.sqrt()) / 2.0;
        assert_relative_eq!(system("cat_map").lipschitz_bound(10), expected, epsilon = 1e-12);
    }

    #[test]
    fn lipschitz_contraction_floored_at_one() {
        assert_eq!(system("contraction").lipschitz_bound(100), 1.0);
    }

    #[test]
    fn lipschitz_monotone_under_nested_refinement() {
        // Midpoint lattices nest under refinement by 3, so the sampled
        // maximum cannot decrease. Use a system without an analytic cap.
        let sys = system("standard_map");
        let coarse = sys.lipschitz_bound(9); // 3 per axis
        let mid = sys.lipschitz_bound(81); // 9 per axis
        let fine = sys.lipschitz_bound(729); // 27 per axis
        assert!(coarse <= mid + 1e-15);
        assert!(mid <= fine + 1e-15);
        assert!(fine >= 1.0);
    }

    #[test]
    fn torus_wrap_stays_half_open() {
        let dom = Domain::TorusFlat { d: 1 };
        let w = dom.wrap(DVector::from_vec(vec![-1e-300]));
        assert!(w[0] >= 0.0 && w[0] < 1.0);
        let w = dom.wrap(DVector::from_vec(vec![3.75]));
        assert_eq!(w[0], 0.75);
        let w = dom.wrap(DVector::from_vec(vec![-0.25]));
        assert_eq!(w[0], 0.75);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        // Central differences with torus-aware deltas; relative error vs the
        // analytic Jacobian stays below 1e-5 at 100 sampled points.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for id in crate::catalog::catalog_ids() {
            let sys = system(id);
            let d = sys.dim();
            for _ in 0..100 / crate::catalog::catalog_ids().len() + 1 {
                let x = match sys.domain() {
                    Domain::TorusFlat { .. } => {
                        Point::new((0..d).map(|_| rng.gen::<f64>()).collect())
                    }
                    Domain::Box { lo, hi } => Point::new(
                        (0..d)
                            .map(|a| lo[a] + (0.2 + 0.6 * rng.gen::<f64>()) * (hi[a] - lo[a]))
                            .collect(),
                    ),
                };
                let j = sys.jacobian(&x);
                let fd = finite_difference_jacobian(&sys, &x, 1e-6);
                let scale = j.amax().max(1.0);
                assert!(
                    (&j - &fd).amax() / scale <= 1e-5,
                    "{id}: FD mismatch at {x}: analytic {j} vs fd {fd}"
                );
            }
        }
    }

    fn finite_difference_jacobian(sys: &SystemDef, x: &Point, h: f64) -> DMatrix<f64> {
        let d = sys.dim();
        let torus = matches!(sys.domain(), Domain::TorusFlat { .. });
        DMatrix::from_fn(d, d, |i, j| {
            let mut xp = x.coords().clone();
            let mut xm = x.coords().clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = sys.evaluate(&Point::from_vector(sys.domain().wrap(xp))).unwrap();
            let fm = sys.evaluate(&Point::from_vector(sys.domain().wrap(xm))).unwrap();
            let mut delta = fp.coords()[i] - fm.coords()[i];
            if torus {
                delta -= delta.round();
            }
            delta / (2.0 * h)
        })
    }
}
