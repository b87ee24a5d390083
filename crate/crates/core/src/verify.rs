//! Property and oracle-equivalence checks for one orbit space.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::group::{act, BoundaryConvention, GroupElement, LatticePoint, OrbitSpace, Representation, SpaceKind, Statistics};
use crate::kernel::KernelParams;
use crate::linalg::CMatrix;
use crate::oracle::{diagonalize, build_hamiltonian, gauge_check, half_line_window, many_body_kernel, HamiltonianSpec, SpectralDecomposition};
use crate::orbit::{
    orbit_kernel_at, orbit_kernel_direct, orbit_kernel_factorized, orbit_kernel_factorized_at, sorted_tuples,
    OrbitKernelReport, TruncationPolicy,
};

pub const CHECKS: [&str; 8] =
    ["initial", "unitarity", "composition", "equivariance", "oracle", "gauge", "wall", "factorization"];

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub representation: Representation,
    pub omega_tau: f64,
    /// Max deviation per entry of [`CHECKS`]; `None` when not applicable.
    pub deviations: [Option<f64>; 8],
    pub tolerances: [f64; 8],
}

impl VerifyRow {
    pub fn passed(&self) -> bool {
        self.deviations.iter().zip(&self.tolerances).all(|(d, t)| d.is_none_or(|d| d <= *t))
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        CHECKS
            .iter()
            .zip(self.deviations.iter().zip(&self.tolerances))
            .filter(|(_, (d, t))| d.is_some_and(|d| !(d <= **t)))
            .map(|(n, _)| *n)
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub omega: f64,
    pub policy: TruncationPolicy,
    /// Oracle chain length for the line and half line.
    pub window: Option<usize>,
    /// Largest single-coordinate label checked on infinite spaces.
    pub grid: i64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { omega: 1.0, policy: TruncationPolicy::default(), window: None, grid: 12 }
    }
}

/// Representations worth iterating for a space: every valid pair of sign
/// phases, plus a few generic fluxes on the circle.
pub fn standard_representations(space: &OrbitSpace) -> Vec<Representation> {
    let stats = if space.walkers > 1 { vec![Statistics::Boson, Statistics::Fermion] } else { vec![Statistics::Boson] };
    let pairs: Vec<(f64, f64)> = match (space.kind, space.boundary) {
        (SpaceKind::Line, _) => vec![(0.0, 0.0)],
        (SpaceKind::Circle, _) => vec![(0.0, 0.0), (PI / 2.0, 0.0), (2.0 * PI / 3.0, 0.0), (PI, 0.0)],
        (SpaceKind::HalfLine, BoundaryConvention::Standard) => vec![(0.0, 0.0), (0.0, PI)],
        (SpaceKind::HalfLine, BoundaryConvention::Dirichlet) => vec![(0.0, PI)],
        (SpaceKind::Interval, BoundaryConvention::Standard) => vec![(0.0, 0.0), (0.0, PI), (PI, 0.0), (PI, PI)],
        (SpaceKind::Interval, BoundaryConvention::Dirichlet) => vec![(0.0, PI)],
    };
    let mut out = Vec::new();
    for &(t, p) in &pairs {
        for &s in &stats {
            out.push(Representation::new(t, p, s));
        }
    }
    out
}

/// Test points and the oracle chain that represents them.
struct Layout {
    /// Single-coordinate labels used for grid points.
    labels: Vec<i64>,
    /// Oracle site of lattice coordinate `x` is `x + offset`.
    offset: i64,
    window: Option<usize>,
}

fn layout(space: &OrbitSpace, opts: &VerifyOptions, omega_tau: f64) -> Layout {
    let grid = opts.grid.max(2);
    match space.kind {
        SpaceKind::Circle | SpaceKind::Interval => {
            Layout { labels: (1..=space.length as i64).collect(), offset: 0, window: None }
        }
        SpaceKind::HalfLine => {
            let w = opts.window.unwrap_or_else(|| half_line_window(1.0, omega_tau * 1.5));
            Layout { labels: (1..=grid).collect(), offset: 0, window: Some(w) }
        }
        SpaceKind::Line => {
            let w = opts.window.unwrap_or_else(|| half_line_window(1.0, omega_tau * 1.5)) as i64;
            Layout { labels: (1..=grid).collect(), offset: w / 2 - grid / 2, window: Some(w as usize) }
        }
    }
}

fn tuples(space: &OrbitSpace, labels: &[i64], strict: bool) -> Vec<LatticePoint> {
    sorted_tuples(labels[0], *labels.last().unwrap(), space.walkers, strict)
}

/// Kernel at arbitrary points. Several walkers with translations go through
/// the factorized path; the direct sum is compared with it separately.
fn eval_at(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    if space.walkers > 1 && space.has_translations() {
        orbit_kernel_factorized_at(space, rep, x, y, params, policy)
    } else {
        orbit_kernel_at(space, rep, x, y, params, policy)
    }
}

/// Dense kernel matrix over `points`.
fn kernel_matrix(
    space: &OrbitSpace,
    rep: &Representation,
    points: &[LatticePoint],
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<CMatrix> {
    let n = points.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            m[(i, j)] = eval_at(space, rep, x, y, params, policy)?.value;
        }
    }
    Ok(m)
}

/// Kernel at zero time on canonical points: only walker permutations can
/// relate two of them, so each entry is a signed stabilizer count.
fn initial_matrix(space: &OrbitSpace, rep: &Representation, points: &[LatticePoint]) -> Result<CMatrix> {
    let n = points.len();
    let mut m = CMatrix::zeros(n, n);
    let perms: Vec<GroupElement> =
        crate::group::permutations(space.walkers).into_iter().map(GroupElement::from_permutation).collect();
    for (j, y) in points.iter().enumerate() {
        for g in &perms {
            let gy = act(g, y, space)?;
            if let Some(i) = points.iter().position(|x| *x == gy) {
                m[(i, j)] += crate::group::rep_value(rep, g, space)?;
            }
        }
    }
    Ok(m)
}

/// Generators of the group as acting on `space`.
pub fn generators(space: &OrbitSpace) -> Vec<GroupElement> {
    let n = space.walkers;
    let mut out = Vec::new();
    if space.has_translations() {
        out.push(GroupElement::translation_at(n, 0, 1));
        out.push(GroupElement::translation_at(n, 0, -1));
    }
    if space.has_reflections() {
        out.push(GroupElement::reflection_at(n, 0));
    }
    for i in 0..n.saturating_sub(1) {
        out.push(GroupElement::transposition(n, i));
    }
    out
}

fn max_dev(a: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter().fold(0.0, |m, v| if v.is_nan() || v > m { v } else { m })
}

fn oracle_tolerance(space: &OrbitSpace) -> f64 {
    match space.kind {
        SpaceKind::Circle if space.walkers == 1 => 1e-11,
        SpaceKind::Interval | SpaceKind::Circle => 1e-10,
        SpaceKind::HalfLine | SpaceKind::Line => 1e-9,
    }
}

/// Runs every applicable check for `(space, rep)` at `omega * tau = omega_tau`.
pub fn verify_case(space: &OrbitSpace, rep: &Representation, omega_tau: f64, opts: &VerifyOptions) -> Result<VerifyRow> {
    rep.validate(space)?;
    let omega = opts.omega;
    let tau = omega_tau / omega;
    let policy = &opts.policy;
    let lay = layout(space, opts, omega_tau);
    let points = tuples(space, &lay.labels, false);
    let p = KernelParams::evolution(omega, tau);
    let tolerances = [1e-12, 1e-12, 1e-10, 1e-12, oracle_tolerance(space), 1e-10, 1e-12, 1e-10];
    let mut dev: [Option<f64>; 8] = [None; 8];

    let u = kernel_matrix(space, rep, &points, &p, policy)?;
    let u0 = kernel_matrix(space, rep, &points, &KernelParams::evolution(omega, 0.0), policy)?;
    dev[0] = Some(u0.max_abs_diff(&initial_matrix(space, rep, &points)?));
    let um = kernel_matrix(space, rep, &points, &KernelParams::evolution(omega, -tau), policy)?;
    dev[1] = Some(u.conj().max_abs_diff(&um.transpose()));

    dev[2] = composition_deviation(space, rep, &lay, omega, tau, policy)?;

    let mut eq = Vec::new();
    for g in generators(space) {
        let w = crate::group::rep_value(rep, &g, space)?;
        for (i, x) in points.iter().enumerate() {
            let gx = act(&g, x, space)?;
            for (j, y) in points.iter().enumerate() {
                let v = eval_at(space, rep, &gx, y, &p, policy)?.value;
                eq.push((v - w * u[(i, j)]).norm());
            }
        }
    }
    dev[3] = Some(max_dev(eq));

    let spec = HamiltonianSpec::for_space(&space.single(), rep, omega, lay.window)?;
    let dec = diagonalize(&build_hamiltonian(&spec)?)?;
    dev[4] = Some(oracle_deviation(&dec, rep.statistics, &points, &u, lay.offset, tau)?);

    if space.kind == SpaceKind::Circle && space.walkers == 1 && space.length >= 2 {
        dev[5] = Some(gauge_check(space.length as usize, rep.theta, omega, tau)?);
    }

    if space.boundary == BoundaryConvention::Dirichlet {
        let mut walls = vec![0];
        if space.kind == SpaceKind::Interval {
            walls.push(space.length as i64 + 1);
        }
        let mut d = Vec::new();
        for &wall in &walls {
            for y in &points {
                let mut x = y.coords().to_vec();
                x[0] = wall;
                x.sort();
                d.push(eval_at(space, rep, &LatticePoint(x), y, &p, policy)?.value.norm());
            }
        }
        dev[6] = Some(max_dev(d));
    }

    if space.walkers > 1 {
        // Direct S_N-enumerating sum against the factorization, on the
        // diagonal and the first row and column.
        let mut d = Vec::new();
        for (i, x) in points.iter().enumerate() {
            for (j, y) in points.iter().enumerate() {
                if i == j || i == 0 || j == 0 {
                    let a = orbit_kernel_direct(space, rep, x, y, &p, policy)?.value;
                    let b = orbit_kernel_factorized(space, rep, x, y, &p, policy)?.value;
                    d.push((a - b).norm());
                }
            }
        }
        dev[7] = Some(max_dev(d));
    }

    Ok(VerifyRow { representation: *rep, omega_tau, deviations: dev, tolerances })
}

fn oracle_deviation(
    dec: &SpectralDecomposition,
    statistics: Statistics,
    points: &[LatticePoint],
    u: &CMatrix,
    offset: i64,
    tau: f64,
) -> Result<f64> {
    let shift = |p: &LatticePoint| p.coords().iter().map(|c| c + offset).collect::<Vec<_>>();
    let mut d = Vec::new();
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            let o = many_body_kernel(dec, statistics, &shift(x), &shift(y), tau)?;
            d.push((o - u[(i, j)]).norm());
        }
    }
    Ok(max_dev(d))
}

/// Composition law `Σ_z U_{tau}(x,z) U_{tau/2}(z,y) = U_{3tau/2}(x,y)`.
///
/// The z-sum runs over the fundamental domain. On the half line it runs over
/// the oracle window, whose light-cone tail is negligible at the checked
/// points. N-walker spaces are checked for fermions on strictly ordered
/// tuples of finite spaces only: for bosons the sum over sorted tuples
/// double-counts coincident configurations.
fn composition_deviation(
    space: &OrbitSpace,
    rep: &Representation,
    lay: &Layout,
    omega: f64,
    tau: f64,
    policy: &TruncationPolicy,
) -> Result<Option<f64>> {
    let (inner, outer): (Vec<LatticePoint>, Vec<LatticePoint>) = match space.kind {
        _ if space.walkers > 1 => {
            if rep.statistics != Statistics::Fermion || !space.has_finite_domain() {
                return Ok(None);
            }
            let all = tuples(space, &lay.labels, true);
            (all.clone(), all)
        }
        SpaceKind::Circle | SpaceKind::Interval => {
            let all = tuples(space, &lay.labels, false);
            (all.clone(), all)
        }
        SpaceKind::HalfLine => {
            let w = lay.window.unwrap_or(200) as i64;
            (tuples(space, &(1..=w).collect::<Vec<_>>(), false), tuples(space, &lay.labels, false))
        }
        SpaceKind::Line => {
            let lo = lay.labels[0] - lay.offset;
            let hi = lo + lay.window.unwrap_or(200) as i64 - 1;
            (tuples(space, &(lo..=hi).collect::<Vec<_>>(), false), tuples(space, &lay.labels, false))
        }
    };
    let p1 = KernelParams::evolution(omega, tau);
    let p2 = KernelParams::evolution(omega, 0.5 * tau);
    let p3 = KernelParams::evolution(omega, 1.5 * tau);
    let mut d = Vec::new();
    let a: Vec<Vec<Complex64>> = outer
        .iter()
        .map(|x| inner.iter().map(|z| Ok(eval_at(space, rep, x, z, &p1, policy)?.value)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let b: Vec<Vec<Complex64>> = inner
        .iter()
        .map(|z| outer.iter().map(|y| Ok(eval_at(space, rep, z, y, &p2, policy)?.value)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    for (i, x) in outer.iter().enumerate() {
        for (j, y) in outer.iter().enumerate() {
            let s: Complex64 = (0..inner.len()).map(|k| a[i][k] * b[k][j]).sum();
            let want = eval_at(space, rep, x, y, &p3, policy)?.value;
            d.push((s - want).norm());
        }
    }
    Ok(Some(max_dev(d)))
}
