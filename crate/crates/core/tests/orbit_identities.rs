use std::f64::consts::PI;

use num_complex::Complex64;
use orbitwalk::oracle::{build_hamiltonian, resolvent_direct, HamiltonianSpec, OracleBoundary};
use orbitwalk::orbit::{evolve_state, orbit_kernel_at, state_norm, State};
use orbitwalk::{
    line_resolvent, BoundaryConvention, KernelParams, LatticePoint, OrbitSpace, Representation, Statistics,
    TruncationPolicy,
};

fn pt(x: i64) -> LatticePoint {
    LatticePoint(vec![x])
}

fn kernel(space: &OrbitSpace, rep: &Representation, x: i64, y: i64, p: &KernelParams) -> Complex64 {
    orbit_kernel_at(space, rep, &pt(x), &pt(y), p, &TruncationPolicy::default()).unwrap().value
}

#[test]
fn line_resolvent_matches_long_chain_inverse() {
    // 401-site open chain; edges sit 200 sites from the centre.
    let n = 401;
    let h = build_hamiltonian(&HamiltonianSpec::new(n, 1.0, OracleBoundary::Open)).unwrap();
    for e in [Complex64::new(0.3, 0.5), Complex64::new(-0.7, 0.4), Complex64::new(1.5, 1.0)] {
        let g = resolvent_direct(&h, e).unwrap();
        let p = KernelParams::resolvent(1.0, e);
        let mut worst: f64 = 0.0;
        for x in -10i64..=10 {
            for y in -10i64..=10 {
                let want = g[((200 + x) as usize, (200 + y) as usize)];
                worst = worst.max((line_resolvent(x, y, &p).unwrap() - want).norm());
            }
        }
        assert!(worst <= 1e-8, "E={e}: {worst:e}");
    }
}

#[test]
fn circle_reflection_conjugates_flux() {
    for l in [4u32, 5, 7] {
        let space = OrbitSpace::circle(l);
        for theta in [0.7, PI] {
            let plus = Representation::flux(theta);
            let minus = Representation::flux(-theta);
            let p = KernelParams::evolution(1.0, 1.3);
            for z in [0i64, 3, 8] {
                for x in 1..=l as i64 {
                    for y in 1..=l as i64 {
                        let a = kernel(&space, &plus, z - x, z - y, &p);
                        let b = kernel(&space, &minus, x, y, &p);
                        assert!((a - b).norm() <= 1e-12, "L={l} theta={theta} z={z} ({x},{y})");
                    }
                }
            }
        }
    }
}

#[test]
fn interval_from_gauged_circle() {
    // Interval kernel = Σ_m D(r^m) U_circle(x, r^m y) on the circle of length 2L,
    // with r y = 1 - y.
    for l in 2u32..=6 {
        let interval = OrbitSpace::interval(l, BoundaryConvention::Standard);
        let circle = OrbitSpace::circle(2 * l);
        for theta in [0.0, PI] {
            for phi in [0.0, PI] {
                let rep = Representation::new(theta, phi, Statistics::Boson);
                let flux = Representation::flux(theta);
                let sign = Complex64::from_polar(1.0, phi);
                for wt in [0.5, 1.0, 5.0] {
                    let p = KernelParams::evolution(1.0, wt);
                    for x in 1..=l as i64 {
                        for y in 1..=l as i64 {
                            let want = kernel(&circle, &flux, x, y, &p) + sign * kernel(&circle, &flux, x, 1 - y, &p);
                            let got = kernel(&interval, &rep, x, y, &p);
                            assert!((got - want).norm() <= 1e-12, "L={l} ({theta},{phi}) wt={wt}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn half_line_single_site_value() {
    // x = y = 1 with phi = 0: J_0 + i J_1.
    let space = OrbitSpace::half_line(BoundaryConvention::Standard);
    let rep = Representation::trivial();
    for wt in [0.5, 1.0, 3.0] {
        let got = kernel(&space, &rep, 1, 1, &KernelParams::evolution(1.0, wt));
        let want = Complex64::new(orbitwalk::bessel_j(0, wt).unwrap(), orbitwalk::bessel_j(1, wt).unwrap());
        assert!((got - want).norm() <= 1e-14);
    }
}

#[test]
fn evolved_states_conserve_norm() {
    let policy = TruncationPolicy::default();
    let cases = [
        (OrbitSpace::circle(8), Representation::trivial(), 2.0),
        (OrbitSpace::circle(5), Representation::flux(1.1), 3.0),
        (OrbitSpace::interval(6, BoundaryConvention::Standard), Representation::new(PI, 0.0, Statistics::Boson), 4.0),
        (OrbitSpace::interval(4, BoundaryConvention::Dirichlet), Representation::reflection_phase(PI), 4.0),
    ];
    for (space, rep, wt) in cases {
        let mut psi = State::new();
        psi.insert(pt(1), Complex64::new(0.6, 0.0));
        psi.insert(pt(2), Complex64::new(0.0, 0.8));
        let targets: Vec<_> = (1..=space.length as i64).map(pt).collect();
        let out = evolve_state(&space, &rep, &psi, &targets, &KernelParams::evolution(1.0, wt), &policy).unwrap();
        assert!((state_norm(&out) - 1.0).abs() <= 1e-12, "{space:?}");
    }
}

#[test]
fn fermion_pair_vanishes_at_coincidence() {
    let policy = TruncationPolicy::default();
    let rep = Representation::new(0.0, 0.0, Statistics::Fermion);
    let space = OrbitSpace::line(2);
    let mut psi = State::new();
    psi.insert(LatticePoint(vec![1, 2]), Complex64::new(1.0, 0.0));
    let targets: Vec<_> = (-3..=5).map(|x| LatticePoint(vec![x, x])).collect();
    let out = evolve_state(&space, &rep, &psi, &targets, &KernelParams::evolution(1.0, 1.5), &policy).unwrap();
    for a in out.values() {
        assert!(a.norm() <= 1e-13);
    }
}
