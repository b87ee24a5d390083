//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so that the summary is always printed.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use orbitwalk::kernel::{line_kernel, line_resolvent, CoinSpec};
use orbitwalk::oracle::{
    build_hamiltonian, coined_circle_power, diagonalize, gauge_check, many_body_kernel, partition_direct,
    resolvent_direct, spectral_kernel, HamiltonianSpec, SpectralDecomposition,
};
use orbitwalk::orbit::{
    local_dos, orbit_heat_kernel, orbit_kernel_at, orbit_kernel_direct, orbit_kernel_factorized, orbit_resolvent,
    partition_function, sorted_tuples, CoinedCircle,
};
use orbitwalk::verify::{verify_case, VerifyOptions};
use orbitwalk::{
    BoundaryConvention, CMatrix, KernelParams, LatticePoint, OrbitSpace, Representation, Result, Statistics,
    TruncationPolicy,
};

/// Worst deviation per named check, against its tolerance.
#[derive(Default)]
struct Checks {
    items: Vec<(String, f64, f64)>,
}

impl Checks {
    fn record(&mut self, name: &str, dev: f64, tol: f64) {
        match self.items.iter_mut().find(|(n, ..)| n == name) {
            Some(item) => {
                if dev.is_nan() || dev > item.1 {
                    item.1 = dev;
                }
            }
            None => self.items.push((name.to_string(), dev, tol)),
        }
    }

    fn passed(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|(_, d, t)| *d <= *t)
    }

    fn summary(&self) -> String {
        self.items.iter().map(|(n, d, t)| format!("{n}={d:.2e} (tol {t:.0e})")).collect::<Vec<_>>().join(", ")
    }
}

fn pt(x: i64) -> LatticePoint {
    LatticePoint(vec![x])
}

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn kernel(space: &OrbitSpace, rep: &Representation, x: i64, y: i64, wt: f64) -> Result<Complex64> {
    Ok(orbit_kernel_at(space, rep, &pt(x), &pt(y), &KernelParams::evolution(1.0, wt), &policy())?.value)
}

fn oracle(space: &OrbitSpace, rep: &Representation, window: Option<usize>) -> Result<SpectralDecomposition> {
    let spec = HamiltonianSpec::for_space(space, rep, 1.0, window)?;
    diagonalize(&build_hamiltonian(&spec)?)
}

const THETAS: [f64; 4] = [0.0, PI / 2.0, 2.0 * PI / 3.0, PI];
const SIGNS: [(f64, f64); 4] = [(0.0, 0.0), (0.0, PI), (PI, 0.0), (PI, PI)];
const OMEGA_TAUS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn circle_resummation(c: &mut Checks) -> Result<()> {
    for l in 2u32..=10 {
        let space = OrbitSpace::circle(l);
        for theta in THETAS {
            let rep = Representation::flux(theta);
            let dec = oracle(&space, &rep, None)?;
            for wt in [0.5, 1.0, 5.0] {
                for x in 1..=l as i64 {
                    for y in 1..=l as i64 {
                        let d = (kernel(&space, &rep, x, y, wt)? - spectral_kernel(&dec, wt, x, y)?).norm();
                        c.record("oracle", d, 1e-11);
                    }
                }
            }
        }
    }
    Ok(())
}

fn half_line(c: &mut Checks) -> Result<()> {
    let cases = [
        (BoundaryConvention::Standard, 0.0),
        (BoundaryConvention::Standard, PI),
        (BoundaryConvention::Dirichlet, PI),
    ];
    for (boundary, phi) in cases {
        let space = OrbitSpace::half_line(boundary);
        let rep = Representation::reflection_phase(phi);
        let dec = oracle(&space, &rep, Some(400))?;
        for wt in OMEGA_TAUS {
            for y in 1..=40 {
                for x in 1..=40 {
                    let d = (kernel(&space, &rep, x, y, wt)? - spectral_kernel(&dec, wt, x, y)?).norm();
                    c.record("oracle", d, 1e-9);
                }
                let u0 = kernel(&space, &rep, 0, y, wt)?;
                match boundary {
                    BoundaryConvention::Standard => {
                        let u1 = kernel(&space, &rep, 1, y, wt)?;
                        c.record("boundary", (u0 - Complex64::from_polar(1.0, phi) * u1).norm(), 1e-12);
                    }
                    BoundaryConvention::Dirichlet => c.record("dirichlet_zero", u0.norm(), 1e-12),
                }
            }
        }
    }
    Ok(())
}

fn interval(c: &mut Checks) -> Result<()> {
    for l in 2u32..=8 {
        let li = l as i64;
        let space = OrbitSpace::interval(l, BoundaryConvention::Standard);
        for (theta, phi) in SIGNS {
            let rep = Representation::new(theta, phi, Statistics::Boson);
            let dec = oracle(&space, &rep, None)?;
            let (eth, eph) = (Complex64::from_polar(1.0, theta), Complex64::from_polar(1.0, phi));
            for wt in OMEGA_TAUS {
                for y in 1..=li {
                    for x in 1..=li {
                        let u = kernel(&space, &rep, x, y, wt)?;
                        c.record("oracle", (u - spectral_kernel(&dec, wt, x, y)?).norm(), 1e-10);
                        c.record("translate", (kernel(&space, &rep, x + 2 * li, y, wt)? - eth * u).norm(), 1e-12);
                        c.record("reflect", (kernel(&space, &rep, 1 - x, y, wt)? - eph * u).norm(), 1e-12);
                    }
                    let (u0, u1) = (kernel(&space, &rep, 0, y, wt)?, kernel(&space, &rep, 1, y, wt)?);
                    let (ul, ul1) = (kernel(&space, &rep, li, y, wt)?, kernel(&space, &rep, li + 1, y, wt)?);
                    c.record("boundary", (u0 - eph * u1).norm(), 1e-12);
                    c.record("boundary", (ul1 - eth * eph * ul).norm(), 1e-12);
                }
            }
        }
        let dspace = OrbitSpace::interval(l, BoundaryConvention::Dirichlet);
        let drep = Representation::reflection_phase(PI);
        let dec = oracle(&dspace, &drep, None)?;
        for wt in OMEGA_TAUS {
            for y in 1..=li {
                for x in 1..=li {
                    let d = (kernel(&dspace, &drep, x, y, wt)? - spectral_kernel(&dec, wt, x, y)?).norm();
                    c.record("dirichlet_oracle", d, 1e-10);
                }
                c.record("dirichlet_zero", kernel(&dspace, &drep, 0, y, wt)?.norm(), 1e-12);
                c.record("dirichlet_zero", kernel(&dspace, &drep, li + 1, y, wt)?.norm(), 1e-12);
            }
        }
    }
    Ok(())
}

fn properties(c: &mut Checks) -> Result<()> {
    let mut cases: Vec<(OrbitSpace, Representation)> = Vec::new();
    for l in 2u32..=10 {
        for theta in THETAS {
            cases.push((OrbitSpace::circle(l), Representation::flux(theta)));
        }
    }
    for phi in [0.0, PI] {
        cases.push((OrbitSpace::half_line(BoundaryConvention::Standard), Representation::reflection_phase(phi)));
    }
    cases.push((OrbitSpace::half_line(BoundaryConvention::Dirichlet), Representation::reflection_phase(PI)));
    for l in 2u32..=8 {
        for (theta, phi) in SIGNS {
            cases.push((OrbitSpace::interval(l, BoundaryConvention::Standard), Representation::new(theta, phi, Statistics::Boson)));
        }
        cases.push((OrbitSpace::interval(l, BoundaryConvention::Dirichlet), Representation::reflection_phase(PI)));
    }
    for stats in [Statistics::Boson, Statistics::Fermion] {
        cases.push((OrbitSpace::circle(6).with_walkers(2), Representation::new(2.0 * PI / 3.0, 0.0, stats)));
        cases.push((OrbitSpace::interval(5, BoundaryConvention::Standard).with_walkers(2), Representation::new(PI, 0.0, stats)));
    }
    let opts = VerifyOptions::default();
    let names = ["initial", "unitarity", "composition", "equivariance"];
    let tols = [1e-12, 1e-12, 1e-10, 1e-12];
    for (space, rep) in &cases {
        for wt in [0.5, 1.0, 5.0] {
            let row = verify_case(space, rep, wt, &opts)?;
            for k in 0..4 {
                if let Some(d) = row.deviations[k] {
                    c.record(names[k], d, tols[k]);
                }
            }
        }
    }
    Ok(())
}

/// Direct sum, factorized sum and many-body oracle on all sorted tuples.
fn walkers_case(
    c: &mut Checks,
    space: &OrbitSpace,
    rep: &Representation,
    labels: (i64, i64),
    dec: &SpectralDecomposition,
    offset: i64,
    wt: f64,
) -> Result<()> {
    let points = sorted_tuples(labels.0, labels.1, space.walkers, false);
    let p = KernelParams::evolution(1.0, wt);
    let shift = |x: &LatticePoint| x.coords().iter().map(|v| v + offset).collect::<Vec<_>>();
    let coincident = |x: &LatticePoint| x.coords().windows(2).any(|w| w[0] == w[1]);
    for x in &points {
        for y in &points {
            let direct = orbit_kernel_direct(space, rep, x, y, &p, &policy())?.value;
            let fact = orbit_kernel_factorized(space, rep, x, y, &p, &policy())?.value;
            let orc = many_body_kernel(dec, rep.statistics, &shift(x), &shift(y), wt)?;
            c.record("direct_vs_factorized", (direct - fact).norm(), 1e-10);
            c.record("direct_vs_oracle", (direct - orc).norm(), 1e-10);
            c.record("factorized_vs_oracle", (fact - orc).norm(), 1e-10);
            if rep.statistics == Statistics::Fermion && (coincident(x) || coincident(y)) {
                c.record("fermion_coincident", direct.norm().max(fact.norm()), 1e-13);
            }
        }
    }
    Ok(())
}

fn identical_walkers(c: &mut Checks) -> Result<()> {
    for n in [2usize, 3] {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            for wt in [0.5, 2.0] {
                let line = OrbitSpace::line(n);
                let rep = Representation::new(0.0, 0.0, stats);
                let window = 120usize;
                let dec = oracle(&line.single(), &rep, Some(window))?;
                walkers_case(c, &line, &rep, (1, 6), &dec, window as i64 / 2 - 3, wt)?;

                let circle = OrbitSpace::circle(6).with_walkers(n);
                for theta in [0.0, 2.0 * PI / 3.0] {
                    let rep = Representation::new(theta, 0.0, stats);
                    let dec = oracle(&circle.single(), &rep, None)?;
                    walkers_case(c, &circle, &rep, (1, 6), &dec, 0, wt)?;
                }

                let interval = OrbitSpace::interval(5, BoundaryConvention::Standard).with_walkers(n);
                for (theta, phi) in SIGNS {
                    let rep = Representation::new(theta, phi, stats);
                    let dec = oracle(&interval.single(), &rep, None)?;
                    walkers_case(c, &interval, &rep, (1, 5), &dec, 0, wt)?;
                }
            }
        }
    }
    Ok(())
}

fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

fn resolvent(c: &mut Checks) -> Result<()> {
    let energies = [Complex64::new(0.4, 0.3), Complex64::new(-0.2, 0.05), Complex64::new(1.5, 1.0)];
    let slow = TruncationPolicy::new(1e-14, 4096);
    let mut cases: Vec<(OrbitSpace, Representation)> =
        THETAS.iter().map(|&t| (OrbitSpace::circle(6), Representation::flux(t))).collect();
    for (theta, phi) in SIGNS {
        cases.push((OrbitSpace::interval(5, BoundaryConvention::Standard), Representation::new(theta, phi, Statistics::Boson)));
    }
    for (space, rep) in &cases {
        let h = build_hamiltonian(&HamiltonianSpec::for_space(space, rep, 1.0, None)?)?;
        let l = space.length as i64;
        for e in energies {
            let g = resolvent_direct(&h, e)?;
            let p = KernelParams::resolvent(1.0, e);
            for x in 1..=l {
                for y in 1..=l {
                    let v = orbit_resolvent(space, rep, &pt(x), &pt(y), &p, &slow)?.value;
                    c.record("direct_inverse", (v - g[((x - 1) as usize, (y - 1) as usize)]).norm(), 1e-9);
                }
            }
        }
    }
    // i G_E(x, y) = ∫_0^∞ U_tau(x, y) e^{iE tau} d tau on the line.
    let e = Complex64::new(0.3, 0.5);
    let i = Complex64::new(0.0, 1.0);
    for (x, y) in [(0i64, 0i64), (0, 3), (2, -1), (-4, 4)] {
        let integral = simpson(
            |t| line_kernel(x, y, &KernelParams::evolution(1.0, t)).unwrap() * (i * e * t).exp(),
            0.0,
            200.0,
            40_000,
        );
        let g = line_resolvent(x, y, &KernelParams::resolvent(1.0, e))?;
        c.record("laplace", (integral - i * g).norm(), 1e-6);
    }
    Ok(())
}

fn thermal(c: &mut Checks) -> Result<()> {
    let mut cases: Vec<(OrbitSpace, Representation)> = Vec::new();
    for l in 3u32..=8 {
        for theta in THETAS {
            cases.push((OrbitSpace::circle(l), Representation::flux(theta)));
        }
    }
    for l in 2u32..=6 {
        for (theta, phi) in SIGNS {
            cases.push((OrbitSpace::interval(l, BoundaryConvention::Standard), Representation::new(theta, phi, Statistics::Boson)));
        }
    }
    for (space, rep) in &cases {
        let dec = oracle(space, rep, None)?;
        for beta in [0.5, 1.0, 2.0] {
            let p = KernelParams::thermal(1.0, beta);
            let z = partition_function(space, rep, &p, &policy())?;
            let zd = partition_direct(&dec, beta);
            c.record("partition_relative", ((z - zd) / zd).abs(), 1e-11);
            let mut trace = Complex64::new(0.0, 0.0);
            for x in 1..=space.length as i64 {
                trace += orbit_heat_kernel(space, rep, &pt(x), &pt(x), &p, &policy())?.value / z;
            }
            c.record("trace_rho", (trace - 1.0).norm(), 1e-12);
        }
        let z0 = partition_function(space, rep, &KernelParams::thermal(1.0, 0.0), &policy())?;
        c.record("beta_zero", (z0 - space.length as f64).abs(), 0.0);
    }
    Ok(())
}

fn dos(c: &mut Checks) -> Result<()> {
    let space = OrbitSpace::circle(5);
    let rep = Representation::trivial();
    let eta = 0.05;
    let slow = TruncationPolicy::new(1e-14, 4096);
    let dec = oracle(&space, &rep, None)?;
    let total = |e: f64| -> Result<f64> {
        let mut s = 0.0;
        for x in 1..=5 {
            s += local_dos(&space, &rep, &pt(x), 1.0, e, eta, &slow)?;
        }
        Ok(s)
    };
    for k in 0..=800 {
        let e = -2.0 + 4.0 * k as f64 / 800.0;
        let hist: f64 = dec.eigenvalues.iter().map(|&ev| eta / PI / ((e - ev).powi(2) + eta * eta)).sum();
        c.record("histogram", (total(e)? - hist).abs(), 1e-6);
    }
    // Trapezoid over the band widened by 100 eta on each side.
    let (lo, hi, n) = (-(1.0 + 100.0 * eta), 1.0 + 100.0 * eta, 2000usize);
    let h = (hi - lo) / (n - 1) as f64;
    for x in 1..=5 {
        let mut s = 0.0;
        for k in 0..n {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            s += w * local_dos(&space, &rep, &pt(x), 1.0, lo + k as f64 * h, eta, &slow)?;
        }
        c.record("site_integral", (s * h - 1.0).abs(), 0.02);
    }
    Ok(())
}

fn block(m: &CMatrix, x: i64, y: i64, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| m[((x - 1) as usize * d + i, (y - 1) as usize * d + j)])
}

fn discrete_time(c: &mut Checks) -> Result<()> {
    let coin = CoinSpec::hadamard();
    for l in [4u32, 6, 8] {
        let li = l as i64;
        let space = OrbitSpace::circle(l);
        for theta in [0.0, PI / 2.0] {
            let rep = Representation::flux(theta);
            let phase = Complex64::from_polar(1.0, theta);
            let walk = |s: i64| CoinedCircle::new(&space, &rep, s, &coin, &policy());
            let walks: Vec<CoinedCircle> = (-12..=12).map(walk).collect::<Result<_>>()?;
            let at = |s: i64| &walks[(s + 12) as usize];
            for s in 0..=12i64 {
                let w = coined_circle_power(l as usize, theta, &coin, s as u64)?;
                for x in 1..=li {
                    for y in 1..=li {
                        let k = at(s).kernel(x, y)?.value;
                        c.record("step_power", k.max_abs_diff(&block(&w, x, y, 2)), 1e-12);
                        let shifted = at(s).kernel_at(x + li, y)?.value;
                        c.record("boundary", shifted.max_abs_diff(&k.scale(phase)), 1e-12);
                        let back = at(-s).kernel(y, x)?.value;
                        c.record("adjoint", k.adjoint().max_abs_diff(&back), 1e-12);
                        if s == 0 {
                            let want = if x == y { CMatrix::identity(2) } else { CMatrix::zeros(2, 2) };
                            c.record("initial", k.max_abs_diff(&want), 1e-12);
                        }
                    }
                }
            }
            for s1 in 0..=6i64 {
                for s2 in 0..=6i64 {
                    for x in 1..=li {
                        for y in 1..=li {
                            let mut acc = CMatrix::zeros(2, 2);
                            for z in 1..=li {
                                let m = at(s1).kernel(x, z)?.value.matmul(&at(s2).kernel(z, y)?.value);
                                acc.add_scaled(Complex64::new(1.0, 0.0), &m);
                            }
                            c.record("composition", acc.max_abs_diff(&at(s1 + s2).kernel(x, y)?.value), 1e-12);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn gauge(c: &mut Checks) -> Result<()> {
    for l in [3usize, 5] {
        for theta in [1.1, PI] {
            c.record("gauge", gauge_check(l, theta, 1.0, 2.0)?, 1e-10);
        }
    }
    Ok(())
}

fn special_functions(c: &mut Checks) -> Result<()> {
    for n in 0..=20u32 {
        for m in 0..=200u64 {
            let got = orbitwalk::bessel_j(n, m as f64 / 4.0)?;
            c.record("series_oracle", (got - common::exact_bessel_j(n, m, 4)).abs(), 1e-12);
        }
    }
    for z in [0.5, 1.0, 5.0, 20.0] {
        let mmax = (z + 40.0_f64).ceil() as u32;
        let mut s = orbitwalk::bessel_j(0, z)?.powi(2);
        for n in 1..=mmax {
            s += 2.0 * orbitwalk::bessel_j(n, z)?.powi(2);
        }
        c.record("normalization", (s - 1.0).abs(), 1e-12);
    }
    let j = common::bessel_j_signed;
    for n1 in -5i64..=5 {
        for n2 in -5i64..=5 {
            for z1 in [0.3, 1.0] {
                for z2 in [0.3, 1.0] {
                    let rhs: f64 = (-60i64..=60).map(|n| j(n1 - n, z1) * j(n - n2, z2)).sum();
                    c.record("addition", (j(n1 - n2, z1 + z2) - rhs).abs(), 1e-11);
                }
            }
        }
    }
    Ok(())
}

type Criterion = (&'static str, fn(&mut Checks) -> Result<()>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("circle resummation vs twisted ring spectrum", circle_resummation),
        ("half line vs chain spectrum", half_line),
        ("interval vs chain spectrum and boundary identities", interval),
        ("composition, unitarity, initial condition, equivariance", properties),
        ("identical walkers: direct, factorized, many-body oracle", identical_walkers),
        ("resolvent vs direct inverse and Laplace transform", resolvent),
        ("partition function and density matrix trace", thermal),
        ("local density of states", dos),
        ("coined walk on the twisted circle", discrete_time),
        ("gauge equivalence of flux and Peierls ring", gauge),
        ("Bessel functions", special_functions),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f.parse() == Ok(id)) {
            continue;
        }
        let start = Instant::now();
        let mut checks = Checks::default();
        let outcome = run(&mut checks);
        let secs = start.elapsed().as_secs_f64();
        let ok = outcome.is_ok() && checks.passed();
        if !ok {
            failed += 1;
        }
        let detail = match outcome {
            Ok(()) => checks.summary(),
            Err(e) => format!("error: {e}; {}", checks.summary()),
        };
        println!("criterion {id}: {} {name} [{secs:.1}s] {detail}", if ok { "PASS" } else { "FAIL" });
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
