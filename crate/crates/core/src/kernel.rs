//! Building-block kernels on the covering lattice `Z^N`.
//!
//! Free-walker kernels depend only on coordinate differences, so they are
//! stored as one-dimensional tables indexed by `|x - y|` and combined into
//! products for several walkers.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::special::{bessel_i_table, bessel_j_table, QuarterPhase, N_MAX};

/// Largest accepted number of coined steps.
pub const STEP_MAX: i64 = 10_000;
/// Largest accepted coin dimension.
pub const COIN_DIM_MAX: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    /// Hopping strength, `hbar = 1`.
    pub omega: f64,
    pub tau: f64,
    pub beta: f64,
    /// Resolvent argument, `Im > 0`.
    pub energy: Complex64,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { omega: 1.0, tau: 0.0, beta: 0.0, energy: Complex64::new(0.0, 1.0) }
    }
}

impl KernelParams {
    pub fn evolution(omega: f64, tau: f64) -> Self {
        KernelParams { omega, tau, ..Default::default() }
    }

    pub fn thermal(omega: f64, beta: f64) -> Self {
        KernelParams { omega, beta, ..Default::default() }
    }

    pub fn resolvent(omega: f64, energy: Complex64) -> Self {
        KernelParams { omega, energy, ..Default::default() }
    }

    pub(crate) fn check_omega(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::Domain(format!("omega must be finite and positive, got {}", self.omega)));
        }
        Ok(())
    }
}

/// Radius beyond which `J_n(z)` terms are below `1e-16`:
/// `ceil(z + 12 z^{1/3} + 30)`.
pub fn window_radius(z: f64) -> i64 {
    let z = z.abs();
    (z + 12.0 * z.cbrt() + 30.0).ceil() as i64
}

/// Drops trailing entries past order `z` that are below `1e-18` of the
/// largest entry; they cannot affect sums at the supported tolerances.
fn trim_tail(mut table: Vec<f64>, z: f64) -> Vec<f64> {
    let peak = table.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let keep_from = z.ceil() as usize + 1;
    while table.len() > keep_from && table.last().is_some_and(|v| v.abs() < 1e-18 * peak) {
        table.pop();
    }
    table
}

/// Value type of an orbit sum: a scalar amplitude or a coin-space block.
pub trait OrbitValue: Clone {
    fn zero_like(&self) -> Self;
    /// `self += w * term`.
    fn accumulate(&mut self, w: Complex64, term: &Self);
    /// Largest entry modulus, used for truncation.
    fn magnitude(&self) -> f64;
}

impl OrbitValue for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn accumulate(&mut self, w: Complex64, term: &Self) {
        *self += w * term;
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl OrbitValue for CMatrix {
    fn zero_like(&self) -> Self {
        CMatrix::zeros(self.rows(), self.cols())
    }

    fn accumulate(&mut self, w: Complex64, term: &Self) {
        self.add_scaled(w, term);
    }

    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

/// A kernel `K(x, y)` on the covering lattice. Implementors are expected to
/// satisfy composition, unitarity, the initial condition and invariance
/// under the group in use; the orbit sum then yields a kernel on the orbit
/// space with the corresponding properties.
pub trait CoveringKernel {
    type Value: OrbitValue;

    fn eval(&self, x: &[i64], y: &[i64]) -> Self::Value;

    /// Additive identity with the right shape.
    fn zero(&self) -> Self::Value;
}

/// A translation-invariant single-coordinate kernel `K(d)` with `d = x - y`.
pub trait DifferenceKernel {
    fn at(&self, d: i64) -> Complex64;
}

/// `Π_j K(x_j - y_j)`.
#[derive(Clone, Debug)]
pub struct ProductKernel<K> {
    pub factor: K,
}

impl<K: DifferenceKernel> ProductKernel<K> {
    pub fn new(factor: K) -> Self {
        ProductKernel { factor }
    }
}

impl<K: DifferenceKernel> CoveringKernel for ProductKernel<K> {
    type Value = Complex64;

    fn eval(&self, x: &[i64], y: &[i64]) -> Complex64 {
        let mut v = self.factor.at(x[0] - y[0]);
        for j in 1..x.len() {
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
            v *= self.factor.at(x[j] - y[j]);
        }
        v
    }

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

impl<K: DifferenceKernel + ?Sized> DifferenceKernel for &K {
    fn at(&self, d: i64) -> Complex64 {
        (**self).at(d)
    }
}

/// `i^{|d|} J_{|d|}(omega tau)` for `tau >= 0`, `(-i)^{|d|} J_{|d|}(omega |tau|)`
/// otherwise. Entries past the window radius are zero.
#[derive(Clone, Debug)]
pub struct EvolutionKernel {
    table: Vec<f64>,
    phase: QuarterPhase,
}

impl EvolutionKernel {
    pub fn new(omega: f64, tau: f64) -> Result<Self> {
        KernelParams::evolution(omega, tau).check_omega()?;
        if !tau.is_finite() {
            return Err(Error::Domain(format!("tau must be finite, got {tau}")));
        }
        let z = omega * tau.abs();
        let radius = window_radius(z).min(N_MAX as i64) as u32;
        let table = trim_tail(bessel_j_table(radius, z)?, z);
        let phase = if tau >= 0.0 { QuarterPhase::new(1) } else { QuarterPhase::new(-1) };
        Ok(EvolutionKernel { table, phase })
    }

    pub fn radius(&self) -> i64 {
        self.table.len() as i64 - 1
    }
}

impl DifferenceKernel for EvolutionKernel {
    fn at(&self, d: i64) -> Complex64 {
        let n = d.unsigned_abs();
        match self.table.get(n as usize) {
            Some(&j) => self.phase.pow(n as i64).scale(j),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// `I_{|d|}(beta omega)`, the matrix elements of `e^{-beta H}` on the line.
#[derive(Clone, Debug)]
pub struct HeatKernel {
    table: Vec<f64>,
}

impl HeatKernel {
    pub fn new(omega: f64, beta: f64) -> Result<Self> {
        KernelParams::thermal(omega, beta).check_omega()?;
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Domain(format!("beta must be finite and >= 0, got {beta}")));
        }
        let z = omega * beta;
        let radius = window_radius(z).min(N_MAX as i64) as u32;
        Ok(HeatKernel { table: trim_tail(bessel_i_table(radius, z)?, z) })
    }
}

impl DifferenceKernel for HeatKernel {
    fn at(&self, d: i64) -> Complex64 {
        let v = self.table.get(d.unsigned_abs() as usize).copied().unwrap_or(0.0);
        Complex64::new(v, 0.0)
    }
}

/// Solves `E = -omega cos p` with `Re p in (0, pi)`, `Im p > 0`.
pub fn resolvent_branch(omega: f64, energy: Complex64) -> Result<Complex64> {
    KernelParams::resolvent(omega, energy).check_omega()?;
    if !(energy.im > 0.0) || !energy.re.is_finite() || !energy.im.is_finite() {
        return Err(Error::Branch(format!("resolvent needs finite E with Im E > 0, got {energy}")));
    }
    let mut p = (-energy / omega).acos();
    if p.im < 0.0 {
        p = -p;
    }
    let residual = (energy + omega * p.cos()).norm();
    if residual > 1e-12 * energy.norm().max(omega) || !(p.im > 0.0) || !(p.re > 0.0 && p.re < std::f64::consts::PI) {
        return Err(Error::Branch(format!("no valid branch for E = {energy}: p = {p}, residual {residual:e}")));
    }
    Ok(p)
}

/// `e^{i p |d|} / (i omega sin p)`, the matrix elements of `(E - H)^{-1}` on
/// the line.
#[derive(Clone, Debug)]
pub struct ResolventKernel {
    p: Complex64,
    prefactor: Complex64,
}

impl ResolventKernel {
    pub fn new(omega: f64, energy: Complex64) -> Result<Self> {
        let p = resolvent_branch(omega, energy)?;
        let prefactor = (Complex64::new(0.0, omega) * p.sin()).inv();
        Ok(ResolventKernel { p, prefactor })
    }

    pub fn momentum(&self) -> Complex64 {
        self.p
    }
}

impl DifferenceKernel for ResolventKernel {
    fn at(&self, d: i64) -> Complex64 {
        let n = d.unsigned_abs() as f64;
        (Complex64::new(0.0, n) * self.p).exp() * self.prefactor
    }
}

/// Time-evolution kernel on the line.
pub fn line_kernel(x: i64, y: i64, p: &KernelParams) -> Result<Complex64> {
    let n = (x - y).unsigned_abs();
    if n > N_MAX as u64 {
        return Err(Error::Domain(format!("separation {n} exceeds N_MAX")));
    }
    let z = p.omega * p.tau.abs();
    p.check_omega()?;
    let j = crate::special::bessel_j(n as u32, z)?;
    let phase = if p.tau >= 0.0 { QuarterPhase::new(1) } else { QuarterPhase::new(-1) };
    Ok(phase.pow(n as i64).scale(j))
}

/// Heat kernel `<x| e^{-beta H} |y>` on the line.
pub fn line_heat_kernel(x: i64, y: i64, p: &KernelParams) -> Result<f64> {
    p.check_omega()?;
    if !(p.beta.is_finite() && p.beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be finite and >= 0, got {}", p.beta)));
    }
    let n = (x - y).unsigned_abs();
    if n > N_MAX as u64 {
        return Err(Error::Domain(format!("separation {n} exceeds N_MAX")));
    }
    crate::special::bessel_i(n as u32, p.beta * p.omega)
}

/// Resolvent kernel `<x| (E - H)^{-1} |y>` on the line.
pub fn line_resolvent(x: i64, y: i64, p: &KernelParams) -> Result<Complex64> {
    Ok(ResolventKernel::new(p.omega, p.energy)?.at(x - y))
}

/// `Π_j line_kernel(x_j, y_j)`.
pub fn product_kernel(x: &[i64], y: &[i64], p: &KernelParams) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    x.iter().zip(y).try_fold(Complex64::new(1.0, 0.0), |acc, (&a, &b)| Ok(acc * line_kernel(a, b, p)?))
}

/// Coin operator and per-state shifts for a discrete-time walk.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinSpec {
    coin: CMatrix,
    shifts: Vec<i64>,
}

impl CoinSpec {
    pub fn new(coin: CMatrix, shifts: Vec<i64>) -> Result<Self> {
        let d = coin.rows();
        if d == 0 || !coin.is_square() || shifts.len() != d {
            return Err(Error::Config(format!(
                "coin must be square with one shift per state ({}x{} coin, {} shifts)",
                coin.rows(),
                coin.cols(),
                shifts.len()
            )));
        }
        if d > COIN_DIM_MAX {
            return Err(Error::SizeCap(format!("coin dimension {d} exceeds {COIN_DIM_MAX}")));
        }
        let defect = coin.matmul(&coin.adjoint()).max_abs_diff(&CMatrix::identity(d));
        if defect > 1e-14 {
            return Err(Error::Config(format!("coin is not unitary (defect {defect:e})")));
        }
        Ok(CoinSpec { coin, shifts })
    }

    /// Hadamard coin with shifts `(+1, -1)`.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let coin = CMatrix::from_fn(2, 2, |i, j| Complex64::new(if i == 1 && j == 1 { -h } else { h }, 0.0));
        CoinSpec { coin, shifts: vec![1, -1] }
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }

    pub fn coin(&self) -> &CMatrix {
        &self.coin
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn max_shift(&self) -> i64 {
        self.shifts.iter().map(|s| s.abs()).max().unwrap_or(0)
    }
}

/// All nonzero blocks of `W^n` on the line, keyed by `x - y`.
#[derive(Clone, Debug)]
pub struct CoinedPropagator {
    dim: usize,
    blocks: BTreeMap<i64, CMatrix>,
}

impl CoinedPropagator {
    pub fn new(steps: i64, coin: &CoinSpec) -> Result<Self> {
        if steps.abs() > STEP_MAX {
            return Err(Error::StepOverflow(steps));
        }
        let d = coin.dim();
        let reach = steps.abs() * coin.max_shift();
        let width = (2 * reach + 1) as usize;
        // psi[(z + reach) * d + j][i]: column i of the block at offset z.
        let mut psi = vec![vec![Complex64::new(0.0, 0.0); d]; width * d];
        for i in 0..d {
            psi[reach as usize * d + i][i] = Complex64::new(1.0, 0.0);
        }
        let mut next = psi.clone();
        let c = coin.coin();
        for _ in 0..steps.abs() {
            for row in next.iter_mut() {
                row.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            }
            for z in 0..width as i64 {
                for j in 0..d {
                    let s = coin.shifts[j];
                    if steps > 0 {
                        // (W psi)(z, j) = sum_i C_ji psi(z - s_j, i)
                        let src = z - s;
                        if !(0..width as i64).contains(&src) {
                            continue;
                        }
                        for i in 0..d {
                            let cji = c[(j, i)];
                            if cji == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            for col in 0..d {
                                let v = psi[src as usize * d + i][col];
                                next[z as usize * d + j][col] += cji * v;
                            }
                        }
                    } else {
                        // (W^{-1} phi)(z, i) = sum_j conj(C_ji) phi(z + s_j, j)
                        let src = z + s;
                        if !(0..width as i64).contains(&src) {
                            continue;
                        }
                        for i in 0..d {
                            let cji = c[(j, i)].conj();
                            if cji == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            for col in 0..d {
                                let v = psi[src as usize * d + j][col];
                                next[z as usize * d + i][col] += cji * v;
                            }
                        }
                    }
                }
            }
            std::mem::swap(&mut psi, &mut next);
        }
        let mut blocks = BTreeMap::new();
        for z in 0..width {
            let block = CMatrix::from_fn(d, d, |j, i| psi[z * d + j][i]);
            if block.max_abs() > 0.0 {
                blocks.insert(z as i64 - reach, block);
            }
        }
        Ok(CoinedPropagator { dim: d, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Block at offset `x - y`.
    pub fn block(&self, d: i64) -> CMatrix {
        self.blocks.get(&d).cloned().unwrap_or_else(|| CMatrix::zeros(self.dim, self.dim))
    }

    pub fn offsets(&self) -> impl Iterator<Item = (&i64, &CMatrix)> {
        self.blocks.iter()
    }
}

impl CoveringKernel for CoinedPropagator {
    type Value = CMatrix;

    fn eval(&self, x: &[i64], y: &[i64]) -> CMatrix {
        self.block(x[0] - y[0])
    }

    fn zero(&self) -> CMatrix {
        CMatrix::zeros(self.dim, self.dim)
    }
}

/// The `(x, y)` block of `W^steps` on the line.
pub fn coined_line_kernel(steps: i64, x: i64, y: i64, coin: &CoinSpec) -> Result<CMatrix> {
    Ok(CoinedPropagator::new(steps, coin)?.block(x - y))
}
