//! Finite tight-binding Hamiltonians and their dense spectral decomposition.
//!
//! This module shares no code with the image-sum side beyond the matrix
//! type; it is the reference against which every orbit sum is checked.
//! Sites are labelled `1..=sites` and stored at index `site - 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{BoundaryConvention, OrbitSpace, Representation, SpaceKind, Statistics};
use crate::kernel::CoinSpec;
use crate::linalg::{determinant, permanent, CMatrix};
use crate::special::unit_phase;

/// Largest matrix handed to the eigensolver.
pub const SITES_MAX: usize = 2048;
/// Largest coined step matrix.
pub const COINED_DIM_MAX: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleBoundary {
    /// Open chain, no boundary terms.
    Open,
    /// Ring with `H_{L,1} = -(omega/2) e^{i theta}`.
    CircleTwisted { theta: f64 },
    /// Chain with `-(omega/2) e^{i phi}` on the first diagonal entry; the far
    /// end is an artificial open edge.
    HalfLinePhase { phi: f64 },
    /// Chain with `-(omega/2) e^{i phi}` at `(1,1)` and
    /// `-(omega/2) e^{i(theta+phi)}` at `(L,L)`.
    IntervalPhase { theta: f64, phi: f64 },
    /// Ring with every bond carrying `e^{i theta / L}`.
    Peierls { theta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub sites: usize,
    pub omega: f64,
    pub boundary: OracleBoundary,
}

fn is_sign_phase(a: f64) -> bool {
    let z = unit_phase(a);
    z.im == 0.0
}

impl HamiltonianSpec {
    pub fn new(sites: usize, omega: f64, boundary: OracleBoundary) -> Self {
        HamiltonianSpec { sites, omega, boundary }
    }

    /// The finite Hamiltonian whose spectral kernel should reproduce the
    /// orbit-space kernel of a single walker. `window` sets the chain length
    /// for the line and half line.
    pub fn for_space(space: &OrbitSpace, rep: &Representation, omega: f64, window: Option<usize>) -> Result<Self> {
        let l = space.length as usize;
        let need_window = || window.ok_or_else(|| Error::Config(format!("{:?} oracle needs a window", space.kind)));
        let boundary_and_sites = match (space.kind, space.boundary) {
            (SpaceKind::Line, _) => (OracleBoundary::Open, need_window()?),
            (SpaceKind::Circle, _) => (OracleBoundary::CircleTwisted { theta: rep.theta }, l),
            (SpaceKind::HalfLine, BoundaryConvention::Standard) => {
                (OracleBoundary::HalfLinePhase { phi: rep.phi }, need_window()?)
            }
            (SpaceKind::HalfLine, BoundaryConvention::Dirichlet) => (OracleBoundary::Open, need_window()?),
            (SpaceKind::Interval, BoundaryConvention::Standard) => {
                (OracleBoundary::IntervalPhase { theta: rep.theta, phi: rep.phi }, l)
            }
            (SpaceKind::Interval, BoundaryConvention::Dirichlet) => (OracleBoundary::Open, l),
        };
        Ok(HamiltonianSpec { sites: boundary_and_sites.1, omega, boundary: boundary_and_sites.0 })
    }
}

/// Half-line window that keeps the artificial far edge outside the light
/// cone: `max(200, ceil(4 omega tau) + 80)` sites.
pub fn half_line_window(omega: f64, tau: f64) -> usize {
    200usize.max((4.0 * omega * tau.abs()).ceil() as usize + 80)
}

pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<CMatrix> {
    let n = spec.sites;
    if n < 2 {
        return Err(Error::Config(format!("oracle needs at least 2 sites, got {n}")));
    }
    if !(spec.omega.is_finite() && spec.omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive, got {}", spec.omega)));
    }
    let hop = -0.5 * spec.omega;
    let mut h = CMatrix::zeros(n, n);
    let bond = |h: &mut CMatrix, a: usize, b: usize, phase: Complex64| {
        // H_{a,b} = hop * phase, H_{b,a} = conj.
        h[(a, b)] += phase * hop;
        h[(b, a)] += phase.conj() * hop;
    };
    let one = Complex64::new(1.0, 0.0);
    match spec.boundary {
        OracleBoundary::Peierls { theta } => {
            let ph = Complex64::from_polar(1.0, theta / n as f64);
            for i in 0..n {
                bond(&mut h, i, (i + 1) % n, ph);
            }
        }
        _ => {
            for i in 0..n - 1 {
                bond(&mut h, i, i + 1, one);
            }
        }
    }
    match spec.boundary {
        OracleBoundary::Open | OracleBoundary::Peierls { .. } => {}
        OracleBoundary::CircleTwisted { theta } => bond(&mut h, n - 1, 0, unit_phase(theta)),
        OracleBoundary::HalfLinePhase { phi } => {
            if !is_sign_phase(phi) {
                return Err(Error::InvalidRepresentation(format!("half-line phase must be 0 or pi, got {phi}")));
            }
            h[(0, 0)] += unit_phase(phi) * hop;
        }
        OracleBoundary::IntervalPhase { theta, phi } => {
            if !is_sign_phase(phi) || !is_sign_phase(theta) {
                return Err(Error::InvalidRepresentation(format!(
                    "interval phases must be 0 or pi, got theta={theta}, phi={phi}"
                )));
            }
            h[(0, 0)] += unit_phase(phi) * hop;
            h[(n - 1, n - 1)] += unit_phase(theta + phi) * hop;
        }
    }
    Ok(h)
}

/// Eigenpairs of a Hermitian matrix; column `p` of `vectors` is `v_p`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMatrix,
}

const MAX_SWEEPS: usize = 60;

/// Cyclic Jacobi diagonalization with a fixed `(p, q)` sweep order.
pub fn diagonalize(h: &CMatrix) -> Result<SpectralDecomposition> {
    let n = h.rows();
    if !h.is_square() || n == 0 {
        return Err(Error::Config("diagonalize needs a non-empty square matrix".into()));
    }
    if n > SITES_MAX {
        return Err(Error::SizeCap(format!("{n} sites exceeds {SITES_MAX}")));
    }
    let scale = h.norm_inf().max(f64::MIN_POSITIVE);
    if h.hermiticity_defect() > 1e-13 * scale {
        return Err(Error::Domain("matrix is not Hermitian".into()));
    }
    let real = h.row(0).iter().all(|z| z.im == 0.0) && (0..n).all(|i| h.row(i).iter().all(|z| z.im == 0.0));
    let (eigenvalues, vectors) = if real { jacobi_real(h)? } else { jacobi_complex(h)? };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&p| eigenvalues[p]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |i, p| vectors[(i, order[p])]);
    Ok(SpectralDecomposition { eigenvalues: sorted_values, vectors: sorted_vectors })
}

fn off_norm_sq(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += a[i * n + j] * a[i * n + j];
        }
    }
    s
}

fn jacobi_real(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.rows();
    let mut a: Vec<f64> = (0..n * n).map(|k| h[(k / n, k % n)].re).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    for _sweep in 0..MAX_SWEEPS {
        if off_norm_sq(&a, n) <= 1e-32 * total {
            let vals = (0..n).map(|i| a[i * n + i]).collect();
            let vecs = CMatrix::from_fn(n, n, |i, j| Complex64::new(v[i * n + j], 0.0));
            return Ok((vals, vecs));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if apq.abs() < 1e-18 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::EigenConvergence(MAX_SWEEPS))
}

fn jacobi_complex(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(n);
    let total: f64 = (0..n).map(|i| h.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>().max(f64::MIN_POSITIVE);
    let off = |a: &CMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        s
    };
    for _sweep in 0..MAX_SWEEPS {
        if off(&a) <= 1e-32 * total {
            let vals = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok((vals, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if r < 1e-18 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                // Rotate column/row q by e^{-i alpha} so that a_pq becomes real.
                let w = apq.conj() / r; // e^{-i alpha}
                for k in 0..n {
                    a[(k, q)] *= w;
                }
                for k in 0..n {
                    a[(q, k)] *= w.conj();
                }
                a[(q, q)] = Complex64::new(aqq, 0.0);
                for k in 0..n {
                    v[(k, q)] *= w;
                }
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * s;
                    a[(k, q)] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * s;
                    a[(q, k)] = apk * s + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * s;
                    v[(k, q)] = vkp * s + vkq * c;
                }
            }
        }
    }
    Err(Error::EigenConvergence(MAX_SWEEPS))
}

impl SpectralDecomposition {
    pub fn sites(&self) -> usize {
        self.eigenvalues.len()
    }

    fn index(&self, x: i64) -> Result<usize> {
        if x < 1 || x as usize > self.sites() {
            return Err(Error::OutOfDomain(vec![x]));
        }
        Ok(x as usize - 1)
    }

    /// Applies `f(eps_p)` spectrally: `Σ_p v_p f(eps_p) v_p^H`.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.sites();
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        let scaled = CMatrix::from_fn(n, n, |i, p| self.vectors[(i, p)] * weights[p]);
        scaled.matmul(&self.vectors.adjoint())
    }

    /// `e^{-i tau H}`.
    pub fn evolution_matrix(&self, tau: f64) -> CMatrix {
        self.function(|e| Complex64::from_polar(1.0, -e * tau))
    }

    /// Largest `|H v_p - eps_p v_p|` over `p`.
    pub fn residual(&self, h: &CMatrix) -> f64 {
        let n = self.sites();
        let hv = h.matmul(&self.vectors);
        let mut worst: f64 = 0.0;
        for p in 0..n {
            let r: f64 = (0..n).map(|i| (hv[(i, p)] - self.vectors[(i, p)] * self.eigenvalues[p]).norm_sqr()).sum();
            worst = worst.max(r.sqrt());
        }
        worst
    }
}

/// `Σ_p v_p(x) e^{-i eps_p tau} conj(v_p(y))` at site labels `x`, `y`.
pub fn spectral_kernel(dec: &SpectralDecomposition, tau: f64, x: i64, y: i64) -> Result<Complex64> {
    let (i, j) = (dec.index(x)?, dec.index(y)?);
    let mut s = Complex64::new(0.0, 0.0);
    for (p, &e) in dec.eigenvalues.iter().enumerate() {
        s += dec.vectors[(i, p)] * Complex64::from_polar(1.0, -e * tau) * dec.vectors[(j, p)].conj();
    }
    Ok(s)
}

/// `(E - H)^{-1}` by LU solve.
pub fn resolvent_direct(h: &CMatrix, energy: Complex64) -> Result<CMatrix> {
    if !(energy.im > 0.0) {
        return Err(Error::Branch(format!("direct resolvent needs Im E > 0, got {energy}")));
    }
    let n = h.rows();
    let mut a = h.scale(Complex64::new(-1.0, 0.0));
    for i in 0..n {
        a[(i, i)] += energy;
    }
    let g = a.inverse()?;
    Ok(g)
}

/// `e^{-beta H}`.
pub fn gibbs_direct(dec: &SpectralDecomposition, beta: f64) -> CMatrix {
    dec.function(|e| Complex64::new((-beta * e).exp(), 0.0))
}

/// `Σ_p e^{-beta eps_p}`.
pub fn partition_direct(dec: &SpectralDecomposition, beta: f64) -> f64 {
    dec.eigenvalues.iter().map(|&e| (-beta * e).exp()).sum()
}

/// Permanent or determinant of `[K(x_i, y_j)]` with `K` the spectral kernel.
pub fn many_body_kernel(
    dec: &SpectralDecomposition,
    statistics: Statistics,
    x: &[i64],
    y: &[i64],
    tau: f64,
) -> Result<Complex64> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if n == 0 || n > crate::group::MAX_WALKERS {
        return Err(Error::SizeCap(format!("walker count {n} outside 1..={}", crate::group::MAX_WALKERS)));
    }
    for t in [x, y] {
        if t.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::OutOfDomain(t.to_vec()));
        }
    }
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = spectral_kernel(dec, tau, x[i], y[j])?;
        }
    }
    match statistics {
        Statistics::Boson => permanent(&m),
        Statistics::Fermion => determinant(&m),
    }
}

/// One step `S_theta (1 ⊗ C)` of a coined walk on a twisted ring of `l` sites.
/// Index `(x - 1) * d + j` holds site `x`, coin state `j`.
pub fn coined_circle_step(l: usize, theta: f64, coin: &CoinSpec) -> Result<CMatrix> {
    let d = coin.dim();
    if l == 0 || l * d > COINED_DIM_MAX {
        return Err(Error::SizeCap(format!("coined ring of dimension {} exceeds {COINED_DIM_MAX}", l * d)));
    }
    let lz = l as i64;
    let mut w = CMatrix::zeros(l * d, l * d);
    for z in 0..lz {
        for j in 0..d {
            // State (z, i) is sent to z + s_j; wrapping k times picks up e^{-i k theta}.
            let target = z + coin.shifts()[j];
            let wrapped = target.rem_euclid(lz);
            let k = (target - wrapped) / lz;
            let phase = crate::special::cis_multiple(-k, theta);
            for i in 0..d {
                w[(wrapped as usize * d + j, z as usize * d + i)] += phase * coin.coin()[(j, i)];
            }
        }
    }
    Ok(w)
}

/// `W^steps` for the twisted coined ring.
pub fn coined_circle_power(l: usize, theta: f64, coin: &CoinSpec, steps: u64) -> Result<CMatrix> {
    Ok(coined_circle_step(l, theta, coin)?.pow(steps))
}

/// Largest `|K'(x,y) - e^{-i theta (x-y)/L} U(x,y)|` where `K'` is the kernel
/// of the Peierls ring and `U` that of the twisted ring.
pub fn gauge_check(l: usize, theta: f64, omega: f64, tau: f64) -> Result<f64> {
    if l < 2 {
        return Err(Error::Config(format!("gauge check needs L >= 2, got {l}")));
    }
    let twisted = diagonalize(&build_hamiltonian(&HamiltonianSpec::new(l, omega, OracleBoundary::CircleTwisted { theta }))?)?;
    let peierls = diagonalize(&build_hamiltonian(&HamiltonianSpec::new(l, omega, OracleBoundary::Peierls { theta }))?)?;
    let u = twisted.evolution_matrix(tau);
    let k = peierls.evolution_matrix(tau);
    let mut worst: f64 = 0.0;
    for x in 0..l {
        for y in 0..l {
            let phase = Complex64::from_polar(1.0, -theta * (x as f64 - y as f64) / l as f64);
            worst = worst.max((k[(x, y)] - phase * u[(x, y)]).norm());
        }
    }
    Ok(worst)
}
