// SPDX-License-Identifier: Apache-2.0

//! Browser bindings. Each export has a plain-Rust twin returning
//! `Result<_, String>` so that native tests can call it.

use num_complex::Complex64 as C64;
use subradiance_core::dynamics::{
    assemble_hamiltonian, bell_amplitudes, concurrence, dark_bell_sign, evolve_exact_with,
    reduced_two_qubit, PureState, StepConfig,
};
use subradiance_core::lattice::{enumerate_modes, isofrequency_contour, LatticeSpec, Orientation, Site};
use subradiance_core::rates::{crosstalk_map_with_tol, steady_rates, AtomSet};
use wasm_bindgen::prelude::*;

const DT: f64 = 0.01;
const MAX_SITES: usize = 81 * 81;

fn spec(nx: usize, ny: usize, orientation: &str, jtilde: f64) -> Result<LatticeSpec, String> {
    let o: Orientation = orientation.parse().map_err(|e: subradiance_core::Error| e.to_string())?;
    let spec = LatticeSpec::new(nx, ny, 1.0, jtilde, o).map_err(|e| e.to_string())?;
    if spec.num_sites() > MAX_SITES {
        return Err(format!("at most {MAX_SITES} sites in the browser"));
    }
    Ok(spec)
}

/// `Γ_1r/Γ_11` for every site, row-major (y outer).
pub fn crosstalk_grid(
    nx: usize,
    ny: usize,
    orientation: &str,
    jtilde: f64,
    sx: usize,
    sy: usize,
    tol: f64,
) -> Result<Vec<f64>, String> {
    let table = enumerate_modes(&spec(nx, ny, orientation, jtilde)?);
    let map = crosstalk_map_with_tol(&table, Site::new(sx, sy), 0.0, tol).map_err(|e| e.to_string())?;
    Ok(map.values().to_vec())
}

/// Concurrence of the dark and bright Bell states of two atoms, sampled
/// every `every` time units: `[t, dark, bright]` triples, flattened.
#[allow(clippy::too_many_arguments)]
pub fn bell_curves(
    nx: usize,
    ny: usize,
    orientation: &str,
    a: (usize, usize),
    b: (usize, usize),
    lambda: f64,
    t_final: f64,
    every: f64,
) -> Result<Vec<f64>, String> {
    let table = enumerate_modes(&spec(nx, ny, orientation, 0.0)?);
    let atoms = AtomSet::new(vec![a.into(), b.into()], 0.0, lambda).map_err(|e| e.to_string())?;
    let rates = steady_rates(&table, &atoms).map_err(|e| e.to_string())?;
    let dark = dark_bell_sign(&rates, 0, 1).ok_or("the two atoms have no cross-talk")?;
    let h = assemble_hamiltonian(&table, &atoms).map_err(|e| e.to_string())?;
    let stride = ((every / DT).round() as usize).max(1);
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::new();
    for sign in [dark, -dark] {
        let amps: Vec<C64> = bell_amplitudes(2, 0, 1, sign).map_err(|e| e.to_string())?;
        let psi = PureState::atomic(&amps, table.len()).map_err(|e| e.to_string())?;
        let mut curve = Vec::new();
        let mut failed = None;
        evolve_exact_with(&h, &psi, &StepConfig::new(DT, t_final, stride), |s| {
            match reduced_two_qubit(s, 0, 1).and_then(|r| concurrence(&r)) {
                Ok(c) => curve.push((s.time, c)),
                Err(e) => failed = Some(e.to_string()),
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some(e) = failed {
            return Err(e);
        }
        curves.push(curve);
    }
    Ok(curves[0].iter().zip(&curves[1]).flat_map(|(d, b)| [d.0, d.1, b.1]).collect())
}

/// Points `(kx, ky)` of the `ω = omega` contour, flattened; branches are
/// separated by a `NaN` pair.
pub fn contour_points(orientation: &str, jtilde: f64, omega: f64, samples: usize) -> Result<Vec<f64>, String> {
    let spec = spec(49, 49, orientation, jtilde)?;
    let contour = isofrequency_contour(&spec, omega, samples).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (i, b) in contour.branches.iter().enumerate() {
        if i > 0 {
            out.extend([f64::NAN, f64::NAN]);
        }
        out.extend(b.points.iter().flat_map(|&(kx, ky)| [kx, ky]));
    }
    Ok(out)
}

fn js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen(js_name = crosstalkMap)]
pub fn crosstalk_map_js(
    nx: usize,
    ny: usize,
    orientation: &str,
    jtilde: f64,
    sx: usize,
    sy: usize,
    tol: f64,
) -> Result<Vec<f64>, JsValue> {
    crosstalk_grid(nx, ny, orientation, jtilde, sx, sy, tol).map_err(js)
}

#[wasm_bindgen(js_name = bellConcurrence)]
#[allow(clippy::too_many_arguments)]
pub fn bell_concurrence_js(
    nx: usize,
    ny: usize,
    orientation: &str,
    x1: usize,
    y1: usize,
    x2: usize,
    y2: usize,
    lambda: f64,
    t_final: f64,
    every: f64,
) -> Result<Vec<f64>, JsValue> {
    bell_curves(nx, ny, orientation, (x1, y1), (x2, y2), lambda, t_final, every).map_err(js)
}

#[wasm_bindgen(js_name = isoContour)]
pub fn iso_contour_js(orientation: &str, jtilde: f64, omega: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    contour_points(orientation, jtilde, omega, samples).map_err(js)
}
