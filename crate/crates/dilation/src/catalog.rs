//! Catalog of test systems with known ground truth where available.
//!
//! Systems are addressed by string id plus a flat key-value parameter table.
//! Linear toral endomorphisms give exact ground truth; the standard map and
//! the perturbed cat map exercise the generic nonlinear path.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{Domain, SystemDef};
use crate::error::{Error, Result};

/// Ids of every system the catalog can build, in listing order.
pub fn catalog_ids() -> &'static [&'static str] {
    &[
        "identity",
        "diag23",
        "cat_map",
        "doubling",
        "doubling_d",
        "standard_map",
        "perturbed_cat",
        "contraction",
    ]
}

/// One row of the catalog listing.
pub struct CatalogEntry {
    pub id: &'static str,
    pub dim: usize,
    pub params: Vec<(String, f64)>,
    pub summary: &'static str,
    pub ground_truth: Option<Vec<f64>>,
}

/// Describe every catalog system built with default parameters.
pub fn catalog() -> Vec<CatalogEntry> {
    catalog_ids()
        .iter()
        .map(|id| {
            let sys = build_system(id, &BTreeMap::new()).expect("default build");
            CatalogEntry {
                id,
                dim: sys.dim(),
                params: sys.params().iter().map(|(k, v)| (k.clone(), *v)).collect(),
                summary: summary(id),
                ground_truth: sys.ground_truth().map(|g| g.to_vec()),
            }
        })
        .collect()
}

fn summary(id: &str) -> &'static str {
    match id {
        "identity" => "identity map on the torus",
        "diag23" => "diagonal toral endomorphism diag(2,3) mod 1",
        "cat_map" => "Arnold cat map [[2,1],[1,1]] mod 1",
        "doubling" => "angle doubling x -> 2x mod 1",
        "doubling_d" => "coordinate-wise doubling on the d-torus",
        "standard_map" => "Chirikov standard map on the unit torus",
        "perturbed_cat" => "cat map with a small trigonometric C1 perturbation",
        "contraction" => "linear contraction x -> factor*x on a box",
        _ => "",
    }
}

/// Build a catalog system from its id and a parameter table.
///
/// Unknown ids and unknown or invalid parameters are usage errors.
pub fn build_system(id: &str, params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    match id {
        "identity" => identity(params),
        "diag23" => diag23(params),
        "cat_map" => cat_map(params),
        "doubling" => doubling(params),
        "doubling_d" => doubling_d(params),
        "standard_map" => standard_map(params),
        "perturbed_cat" => perturbed_cat(params),
        "contraction" => contraction(params),
        other => Err(Error::UnknownSystem(other.to_string())),
    }
}

fn check_keys(id: &str, params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "system `{id}` has no parameter `{key}` (allowed: {allowed:?})"
            )));
        }
    }
    Ok(())
}

fn dim_param(id: &str, params: &BTreeMap<String, f64>, default: usize) -> Result<usize> {
    match params.get("d") {
        None => Ok(default),
        Some(&v) => {
            if v.fract() != 0.0 || !(1.0..=8.0).contains(&v) {
                Err(Error::Config(format!(
                    "system `{id}`: parameter `d` must be an integer in 1..=8, got {v}"
                )))
            } else {
                Ok(v as usize)
            }
        }
    }
}

fn identity(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("identity", params, &["d"])?;
    let d = dim_param("identity", params, 2)?;
    let table = BTreeMap::from([("d".to_string(), d as f64)]);
    Ok(SystemDef::new(
        "identity",
        Domain::TorusFlat { d },
        Box::new(|x: &DVector<f64>| x.clone()),
        Box::new(move |_: &DVector<f64>| DMatrix::identity(d, d)),
        Some(1.0),
    )
    .with_params(table)
    .with_ground_truth(vec![0.0; d]))
}

fn diag23(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("diag23", params, &[])?;
    Ok(SystemDef::new(
        "diag23",
        Domain::TorusFlat { d: 2 },
        Box::new(|x: &DVector<f64>| DVector::from_vec(vec![2.0 * x[0], 3.0 * x[1]])),
        Box::new(|_: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])),
        Some(3.0),
    )
    .with_ground_truth(vec![3.0f64.ln(), 2.0f64.ln()]))
}

fn cat_map(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("cat_map", params, &[])?;
    // [[2,1],[1,1]] is symmetric, so |T f| equals the top eigenvalue.
    let lambda = (3.0 + 5.0f64.sqrt()) / 2.0;
    Ok(SystemDef::new(
        "cat_map",
        Domain::TorusFlat { d: 2 },
        Box::new(|x: &DVector<f64>| DVector::from_vec(vec![2.0 * x[0] + x[1], x[0] + x[1]])),
        Box::new(|_: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])),
        Some(lambda),
    )
    .with_ground_truth(vec![lambda.ln(), -lambda.ln()]))
}

fn doubling(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("doubling", params, &[])?;
    Ok(SystemDef::new(
        "doubling",
        Domain::TorusFlat { d: 1 },
        Box::new(|x: &DVector<f64>| x * 2.0),
        Box::new(|_: &DVector<f64>| DMatrix::from_element(1, 1, 2.0)),
        Some(2.0),
    )
    .with_ground_truth(vec![2.0f64.ln()]))
}

fn doubling_d(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("doubling_d", params, &["d"])?;
    let d = dim_param("doubling_d", params, 3)?;
    let table = BTreeMap::from([("d".to_string(), d as f64)]);
    Ok(SystemDef::new(
        "doubling_d",
        Domain::TorusFlat { d },
        Box::new(|x: &DVector<f64>| x * 2.0),
        Box::new(move |_: &DVector<f64>| DMatrix::identity(d, d) * 2.0),
        Some(2.0),
    )
    .with_params(table)
    .with_ground_truth(vec![2.0f64.ln(); d]))
}

fn standard_map(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("standard_map", params, &["K"])?;
    let k = params.get("K").copied().unwrap_or(1.5);
    if !k.is_finite() || k < 0.0 {
        return Err(Error::Config(format!(
            "system `standard_map`: parameter `K` must be finite and >= 0, got {k}"
        )));
    }
    let table = BTreeMap::from([("K".to_string(), k)]);
    // Coordinates (theta, p), both mod 1:
    //   p'     = p + (K / 2 pi) sin(2 pi theta)
    //   theta' = theta + p'
    // det T f = 1 (area preserving).
    Ok(SystemDef::new(
        "standard_map",
        Domain::TorusFlat { d: 2 },
        Box::new(move |x: &DVector<f64>| {
            let p_next = x[1] + (k / (2.0 * PI)) * (2.0 * PI * x[0]).sin();
            DVector::from_vec(vec![x[0] + p_next, p_next])
        }),
        Box::new(move |x: &DVector<f64>| {
            let c = k * (2.0 * PI * x[0]).cos();
            DMatrix::from_row_slice(2, 2, &[1.0 + c, 1.0, c, 1.0])
        }),
        None,
    )
    .with_params(table))
}

fn perturbed_cat(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("perturbed_cat", params, &["epsilon"])?;
    let eps = params.get("epsilon").copied().unwrap_or(0.02);
    if !(0.0..=0.05).contains(&eps) {
        return Err(Error::Config(format!(
            "system `perturbed_cat`: parameter `epsilon` must lie in [0, 0.05], got {eps}"
        )));
    }
    let table = BTreeMap::from([("epsilon".to_string(), eps)]);
    Ok(SystemDef::new(
        "perturbed_cat",
        Domain::TorusFlat { d: 2 },
        Box::new(move |x: &DVector<f64>| {
            DVector::from_vec(vec![
                2.0 * x[0] + x[1] + eps * (2.0 * PI * x[1]).sin(),
                x[0] + x[1] + eps * (2.0 * PI * x[0]).sin(),
            ])
        }),
        Box::new(move |x: &DVector<f64>| {
            let cx = 2.0 * PI * eps * (2.0 * PI * x[0]).cos();
            let cy = 2.0 * PI * eps * (2.0 * PI * x[1]).cos();
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0 + cy, 1.0 + cx, 1.0])
        }),
        None,
    )
    .with_params(table))
}

fn contraction(params: &BTreeMap<String, f64>) -> Result<SystemDef> {
    check_keys("contraction", params, &["d", "factor"])?;
    let d = dim_param("contraction", params, 2)?;
    let factor = params.get("factor").copied().unwrap_or(0.5);
    if !(0.0 < factor && factor < 1.0) {
        return Err(Error::Config(format!(
            "system `contraction`: parameter `factor` must lie in (0, 1), got {factor}"
        )));
    }
    let table = BTreeMap::from([("d".to_string(), d as f64), ("factor".to_string(), factor)]);
    Ok(SystemDef::new(
        "contraction",
        Domain::Box {
            lo: DVector::from_element(d, -1.0),
            hi: DVector::from_element(d, 1.0),
        },
        Box::new(move |x: &DVector<f64>| x * factor),
        Box::new(move |_: &DVector<f64>| DMatrix::identity(d, d) * factor),
        Some(factor),
    )
    .with_params(table)
    .with_ground_truth(vec![factor.ln(); d]))
}
