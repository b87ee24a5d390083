//! WebAssembly bindings for the browser demo. The plain functions are also
//! used by native tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use orbitwalk::kernel::CoinSpec;
use orbitwalk::orbit::{local_dos, orbit_kernel, CoinedCircle};
use orbitwalk::{BoundaryConvention, KernelParams, LatticePoint, OrbitSpace, Representation, Statistics, TruncationPolicy};
use wasm_bindgen::prelude::*;

const MAX_SITES: u32 = 64;

fn space_for(kind: &str, length: u32) -> Result<OrbitSpace, String> {
    if !(2..=MAX_SITES).contains(&length) {
        return Err(format!("length must lie in 2..={MAX_SITES}"));
    }
    match kind {
        "circle" => Ok(OrbitSpace::circle(length)),
        "interval" => Ok(OrbitSpace::interval(length, BoundaryConvention::Standard)),
        "interval_dirichlet" => Ok(OrbitSpace::interval(length, BoundaryConvention::Dirichlet)),
        _ => Err(format!("unknown space '{kind}'")),
    }
}

/// Single-walker representation; on the interval both angles snap to 0 or pi.
fn rep_for(space: &OrbitSpace, theta: f64, phi: f64) -> Representation {
    let sign = |a: f64| if (a.rem_euclid(2.0 * PI) - PI).abs() < PI / 2.0 { PI } else { 0.0 };
    match (space.has_reflections(), space.boundary) {
        (false, _) => Representation::flux(theta),
        (true, BoundaryConvention::Dirichlet) => Representation::reflection_phase(PI),
        (true, BoundaryConvention::Standard) => Representation::new(sign(theta), sign(phi), Statistics::Boson),
    }
}

fn err(e: orbitwalk::Error) -> String {
    e.to_string()
}

/// `P_tau(x)` for a walker started at `start`, for `x = 1..=length`.
pub fn distribution(kind: &str, length: u32, theta: f64, phi: f64, omega_tau: f64, start: i64) -> Result<Vec<f64>, String> {
    let space = space_for(kind, length)?;
    let rep = rep_for(&space, theta, phi);
    let p = KernelParams::evolution(1.0, omega_tau);
    let policy = TruncationPolicy::default();
    let y = LatticePoint(vec![start.clamp(1, length as i64)]);
    (1..=length as i64)
        .map(|x| Ok(orbit_kernel(&space, &rep, &LatticePoint(vec![x]), &y, &p, &policy).map_err(err)?.value.norm_sqr()))
        .collect()
}

/// Total density of states on a twisted ring, as `[e0, dos0, e1, dos1, ...]`
/// over `points` energies spanning the band plus `10 eta`.
pub fn dos_curve(length: u32, theta: f64, eta: f64, points: usize) -> Result<Vec<f64>, String> {
    let space = space_for("circle", length)?;
    let rep = rep_for(&space, theta, 0.0);
    let policy = TruncationPolicy::new(1e-14, 4096);
    let eta = eta.clamp(1e-3, 1.0);
    let points = points.clamp(2, 4000);
    let (lo, hi) = (-1.0 - 10.0 * eta, 1.0 + 10.0 * eta);
    let mut out = Vec::with_capacity(2 * points);
    for k in 0..points {
        let e = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let mut s = 0.0;
        for x in 1..=length as i64 {
            s += local_dos(&space, &rep, &LatticePoint(vec![x]), 1.0, e, eta, &policy).map_err(err)?;
        }
        out.push(e);
        out.push(s);
    }
    Ok(out)
}

/// Site probabilities of a Hadamard walk on a twisted ring after `steps`,
/// from coin state `(1, i)/sqrt 2` at `start`.
pub fn coined_distribution(length: u32, theta: f64, steps: i64, start: i64) -> Result<Vec<f64>, String> {
    let space = space_for("circle", length)?;
    let rep = Representation::flux(theta);
    let walk = CoinedCircle::new(&space, &rep, steps.clamp(0, 500), &CoinSpec::hadamard(), &TruncationPolicy::default())
        .map_err(err)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let chi = [Complex64::new(h, 0.0), Complex64::new(0.0, h)];
    let y = start.clamp(1, length as i64);
    (1..=length as i64)
        .map(|x| {
            let b = walk.kernel(x, y).map_err(err)?.value;
            Ok((0..2).map(|i| (b[(i, 0)] * chi[0] + b[(i, 1)] * chi[1]).norm_sqr()).sum())
        })
        .collect()
}

#[wasm_bindgen(js_name = distribution)]
pub fn distribution_js(kind: &str, length: u32, theta: f64, phi: f64, omega_tau: f64, start: i32) -> Result<Vec<f64>, JsValue> {
    distribution(kind, length, theta, phi, omega_tau, start.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = dosCurve)]
pub fn dos_curve_js(length: u32, theta: f64, eta: f64, points: u32) -> Result<Vec<f64>, JsValue> {
    dos_curve(length, theta, eta, points as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = coinedDistribution)]
pub fn coined_distribution_js(length: u32, theta: f64, steps: i32, start: i32) -> Result<Vec<f64>, JsValue> {
    coined_distribution(length, theta, steps.into(), start.into()).map_err(|e| JsValue::from_str(&e))
}
