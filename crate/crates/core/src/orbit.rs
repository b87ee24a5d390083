//! Image sums `U(x, y) = Σ_γ D(γ) Ũ(x, γ y)` over a discrete group, with
//! shell-by-shell truncation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    act_into, check_domain, in_site_range, permutations, visit_shell, LatticePoint, OrbitSpace, Representation,
    SpaceKind, Statistics, WeightMap,
};
use crate::kernel::{
    CoinSpec, CoinedPropagator, CoveringKernel, DifferenceKernel, EvolutionKernel, HeatKernel, KernelParams,
    OrbitValue, ProductKernel, ResolventKernel,
};
use crate::linalg::{determinant, permanent, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TruncationPolicy {
    /// Absolute tolerance on the largest term of a shell.
    pub tol: f64,
    pub max_shell: u32,
    pub consecutive_quiet_shells: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tol: 1e-14, max_shell: 64, consecutive_quiet_shells: 2 }
    }
}

impl TruncationPolicy {
    pub fn new(tol: f64, max_shell: u32) -> Self {
        TruncationPolicy { tol, max_shell, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("truncation tol must be positive, got {}", self.tol)));
        }
        if self.max_shell == 0 || self.consecutive_quiet_shells == 0 {
            return Err(Error::Config("max_shell and consecutive_quiet_shells must be positive".into()));
        }
        Ok(())
    }
}

/// A truncated orbit sum together with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSum<V> {
    pub value: V,
    pub shells_used: u32,
    pub last_shell_magnitude: f64,
    pub terms_evaluated: u64,
}

pub type OrbitKernelReport = OrbitSum<Complex64>;

/// Evaluates `Σ_γ D(γ) K(x, γ y)` shell by shell. No domain checks on `x`, `y`.
pub fn orbit_sum<K: CoveringKernel>(
    space: &OrbitSpace,
    rep: &Representation,
    kernel: &K,
    x: &[i64],
    y: &[i64],
    policy: &TruncationPolicy,
) -> Result<OrbitSum<K::Value>> {
    rep.validate(space)?;
    policy.validate()?;
    for len in [x.len(), y.len()] {
        if len != space.walkers {
            return Err(Error::DimensionMismatch { expected: space.walkers, got: len });
        }
    }
    let weights = WeightMap::new(rep, space);
    let perms = permutations(space.walkers);
    let mut value = kernel.zero();
    let mut image = vec![0; y.len()];
    let mut terms = 0u64;
    let mut quiet = 0u32;
    for shell in 0..=policy.max_shell {
        let mut shell_max: f64 = 0.0;
        visit_shell(space, shell, &perms, |g| {
            act_into(space, g, y, &mut image);
            let term = kernel.eval(x, &image);
            shell_max = shell_max.max(term.magnitude());
            value.accumulate(weights.weight(g), &term);
            terms += 1;
        });
        if space.is_finite_group() {
            return Ok(OrbitSum { value, shells_used: 1, last_shell_magnitude: 0.0, terms_evaluated: terms });
        }
        if shell >= 1 {
            quiet = if shell_max < policy.tol { quiet + 1 } else { 0 };
        }
        if quiet >= policy.consecutive_quiet_shells {
            return Ok(OrbitSum { value, shells_used: shell + 1, last_shell_magnitude: shell_max, terms_evaluated: terms });
        }
        if shell == policy.max_shell {
            return Err(Error::NonConvergence { max_shell: policy.max_shell, last_shell_magnitude: shell_max });
        }
    }
    unreachable!("loop returns at max_shell")
}

fn check_points(space: &OrbitSpace, x: &LatticePoint, y: &LatticePoint) -> Result<()> {
    space.validate()?;
    check_domain(space, x.coords())?;
    check_domain(space, y.coords())
}

/// Orbit sum of a product of single-coordinate kernels, using the
/// permanent/determinant factorization for four or more walkers.
fn product_orbit_sum<K: DifferenceKernel>(
    space: &OrbitSpace,
    rep: &Representation,
    factor: K,
    x: &[i64],
    y: &[i64],
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    if space.walkers >= 4 {
        factorized_sum(space, rep, &factor, x, y, policy)
    } else {
        orbit_sum(space, rep, &ProductKernel::new(factor), x, y, policy)
    }
}

/// Time-evolution kernel `U_tau(x, y)` on the orbit space, for `x`, `y` in
/// the fundamental domain.
pub fn orbit_kernel(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    check_points(space, x, y)?;
    orbit_kernel_at(space, rep, x, y, params, policy)
}

/// As [`orbit_kernel`] but at arbitrary lattice points; used for boundary
/// and equivariance identities.
pub fn orbit_kernel_at(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    let k = EvolutionKernel::new(params.omega, params.tau)?;
    product_orbit_sum(space, rep, k, x.coords(), y.coords(), policy)
}

/// Direct `S_N`-enumerating orbit sum regardless of walker count.
pub fn orbit_kernel_direct(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    check_points(space, x, y)?;
    let k = EvolutionKernel::new(params.omega, params.tau)?;
    orbit_sum(space, rep, &ProductKernel::new(k), x.coords(), y.coords(), policy)
}

/// Builds `M_ij = U_1(x_i, y_j)` from single-walker orbit sums and returns
/// its permanent (bosons) or determinant (fermions).
fn factorized_sum<K: DifferenceKernel>(
    space: &OrbitSpace,
    rep: &Representation,
    factor: &K,
    x: &[i64],
    y: &[i64],
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    rep.validate(space)?;
    let single = space.single();
    let single_rep = rep.with_statistics(Statistics::Boson);
    let kernel = ProductKernel::new(factor);
    let n = x.len();
    let mut m = CMatrix::zeros(n, n);
    let mut shells = 0;
    let mut last: f64 = 0.0;
    let mut terms = 0;
    for i in 0..n {
        for j in 0..n {
            let s = orbit_sum(&single, &single_rep, &kernel, &x[i..=i], &y[j..=j], policy)?;
            m[(i, j)] = s.value;
            shells = shells.max(s.shells_used);
            last = last.max(s.last_shell_magnitude);
            terms += s.terms_evaluated;
        }
    }
    let value = match rep.statistics {
        Statistics::Boson => permanent(&m)?,
        Statistics::Fermion => determinant(&m)?,
    };
    Ok(OrbitSum { value, shells_used: shells, last_shell_magnitude: last, terms_evaluated: terms })
}

/// N-walker time-evolution kernel via the permanent/determinant of
/// single-walker orbit kernels.
pub fn orbit_kernel_factorized(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    check_points(space, x, y)?;
    orbit_kernel_factorized_at(space, rep, x, y, params, policy)
}

/// As [`orbit_kernel_factorized`] at arbitrary lattice points.
pub fn orbit_kernel_factorized_at(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    let k = EvolutionKernel::new(params.omega, params.tau)?;
    factorized_sum(space, rep, &k, x.coords(), y.coords(), policy)
}

fn single_walker_only(space: &OrbitSpace, what: &str) -> Result<()> {
    if space.walkers != 1 {
        return Err(Error::InvalidSpace(format!("{what} is implemented for a single walker")));
    }
    Ok(())
}

/// Resolvent kernel `G_E(x, y)` on the orbit space.
pub fn orbit_resolvent(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    check_points(space, x, y)?;
    orbit_resolvent_at(space, rep, x, y, params, policy)
}

/// As [`orbit_resolvent`] at arbitrary lattice points.
pub fn orbit_resolvent_at(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    single_walker_only(space, "the resolvent")?;
    let k = ResolventKernel::new(params.omega, params.energy)?;
    orbit_sum(space, rep, &ProductKernel::new(k), x.coords(), y.coords(), policy)
}

/// Local density of states `-(1/pi) Im G_{E + i eta}(x, x)`.
pub fn local_dos(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    omega: f64,
    energy: f64,
    eta: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if !(1e-6..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta must lie in [1e-6, 1], got {eta}")));
    }
    let params = KernelParams::resolvent(omega, Complex64::new(energy, eta));
    let g = orbit_resolvent(space, rep, x, x, &params, policy)?;
    Ok(-g.value.im / std::f64::consts::PI)
}

/// Unnormalized Gibbs kernel `<x| e^{-beta H} |y>` on the orbit space.
pub fn orbit_heat_kernel(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<OrbitKernelReport> {
    check_points(space, x, y)?;
    single_walker_only(space, "the thermal kernel")?;
    let k = HeatKernel::new(params.omega, params.beta)?;
    orbit_sum(space, rep, &ProductKernel::new(k), x.coords(), y.coords(), policy)
}

/// Fundamental-domain sites of a finite single-walker orbit space.
pub fn domain_sites(space: &OrbitSpace) -> Result<Vec<i64>> {
    if !space.has_finite_domain() {
        return Err(Error::InvalidSpace(format!("{:?} has infinitely many sites", space.kind)));
    }
    Ok((1..=space.length as i64).collect())
}

/// Canonical partition function `Z(beta) = Σ_x <x| e^{-beta H} |x>`.
pub fn partition_function(
    space: &OrbitSpace,
    rep: &Representation,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    single_walker_only(space, "the partition function")?;
    let k = ProductKernel::new(HeatKernel::new(params.omega, params.beta)?);
    let mut z = 0.0;
    for x in domain_sites(space)? {
        z += orbit_sum(space, rep, &k, &[x], &[x], policy)?.value.re;
    }
    Ok(z)
}

/// Canonical density matrix element `rho_beta(x, y)`.
pub fn orbit_density_matrix(
    space: &OrbitSpace,
    rep: &Representation,
    x: &LatticePoint,
    y: &LatticePoint,
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let z = partition_function(space, rep, params, policy)?;
    Ok(orbit_heat_kernel(space, rep, x, y, params, policy)?.value / z)
}

/// Matrix-valued kernel of a coined walk on the twisted circle.
pub fn orbit_coined_kernel(
    space: &OrbitSpace,
    rep: &Representation,
    steps: i64,
    x: i64,
    y: i64,
    coin: &CoinSpec,
    policy: &TruncationPolicy,
) -> Result<OrbitSum<CMatrix>> {
    CoinedCircle::new(space, rep, steps, coin, policy)?.kernel_at(x, y)
}

/// Reusable coined propagator on a circle.
#[derive(Clone, Debug)]
pub struct CoinedCircle {
    space: OrbitSpace,
    rep: Representation,
    propagator: CoinedPropagator,
    policy: TruncationPolicy,
}

impl CoinedCircle {
    pub fn new(
        space: &OrbitSpace,
        rep: &Representation,
        steps: i64,
        coin: &CoinSpec,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        if space.kind != SpaceKind::Circle || space.walkers != 1 {
            return Err(Error::InvalidSpace("coined walks are supported on a single-walker circle only".into()));
        }
        rep.validate(space)?;
        Ok(CoinedCircle { space: *space, rep: *rep, propagator: CoinedPropagator::new(steps, coin)?, policy: *policy })
    }

    pub fn dim(&self) -> usize {
        self.propagator.dim()
    }

    /// Block at fundamental-domain sites `x`, `y`.
    pub fn kernel(&self, x: i64, y: i64) -> Result<OrbitSum<CMatrix>> {
        check_domain(&self.space, &[x])?;
        check_domain(&self.space, &[y])?;
        self.kernel_at(x, y)
    }

    /// Block at arbitrary lattice sites.
    pub fn kernel_at(&self, x: i64, y: i64) -> Result<OrbitSum<CMatrix>> {
        orbit_sum(&self.space, &self.rep, &self.propagator, &[x], &[y], &self.policy)
    }
}

/// A wave function on fundamental-domain points.
pub type State = BTreeMap<LatticePoint, Complex64>;

pub fn state_norm(psi: &State) -> f64 {
    psi.values().map(|a| a.norm_sqr()).sum::<f64>()
}

/// `(U_tau psi)(x)` at each target point.
pub fn evolve_state(
    space: &OrbitSpace,
    rep: &Representation,
    psi0: &State,
    targets: &[LatticePoint],
    params: &KernelParams,
    policy: &TruncationPolicy,
) -> Result<State> {
    space.validate()?;
    for y in psi0.keys() {
        check_domain(space, y.coords())?;
    }
    let mut out = State::new();
    for x in targets {
        check_domain(space, x.coords())?;
        let mut amp = Complex64::new(0.0, 0.0);
        for (y, &a) in psi0 {
            if a != Complex64::new(0.0, 0.0) {
                amp += orbit_kernel_at(space, rep, x, y, params, policy)?.value * a;
            }
        }
        out.insert(x.clone(), amp);
    }
    Ok(out)
}

/// `|(U_tau psi)(x)|^2`.
pub fn probability(
    space: &OrbitSpace,
    rep: &Representation,
    psi0: &State,
    params: &KernelParams,
    policy: &TruncationPolicy,
    x: &LatticePoint,
) -> Result<f64> {
    let out = evolve_state(space, rep, psi0, std::slice::from_ref(x), params, policy)?;
    Ok(out[x].norm_sqr())
}

/// Sorted N-tuples drawn from single-walker sites `lo..=hi`.
pub fn sorted_tuples(lo: i64, hi: i64, walkers: usize, strict: bool) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(walkers);
    fn rec(lo: i64, hi: i64, left: usize, strict: bool, cur: &mut Vec<i64>, out: &mut Vec<LatticePoint>) {
        if left == 0 {
            out.push(LatticePoint(cur.clone()));
            return;
        }
        let start = match cur.last() {
            Some(&p) if strict => p + 1,
            Some(&p) => p,
            None => lo,
        };
        for v in start..=hi {
            cur.push(v);
            rec(lo, hi, left - 1, strict, cur, out);
            cur.pop();
        }
    }
    rec(lo, hi, walkers, strict, &mut cur, &mut out);
    out
}

/// Fundamental-domain points in `window` (inclusive single-coordinate
/// range), clipped to the domain.
pub fn domain_points(space: &OrbitSpace, window: (i64, i64)) -> Vec<LatticePoint> {
    let (lo, hi) = window;
    let lo = (lo..=hi).find(|&v| in_site_range(space, v)).unwrap_or(hi + 1);
    let hi = (lo..=hi).rev().find(|&v| in_site_range(space, v)).unwrap_or(lo - 1);
    sorted_tuples(lo, hi, space.walkers, false)
}
