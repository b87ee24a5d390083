use num_complex::Complex64;

use super::config::RunConfig;
use super::output::{Cell, Report, Table};
use crate::error::{Error, Result};
use crate::group::{LatticePoint, OrbitSpace, Representation};
use crate::kernel::{CoinSpec, KernelParams};
use crate::linalg::CMatrix;
use crate::oracle::{
    build_hamiltonian, coined_circle_power, diagonalize, partition_direct, resolvent_direct, HamiltonianSpec,
};
use crate::orbit::{
    domain_points, domain_sites, evolve_state, local_dos, orbit_heat_kernel, orbit_resolvent, partition_function,
    state_norm, CoinedCircle, State,
};
use crate::verify::{standard_representations, verify_case, VerifyOptions, CHECKS};

fn setup(cfg: &RunConfig) -> (OrbitSpace, Representation) {
    (cfg.space.space(), cfg.representation.representation())
}

/// Output points: the whole fundamental domain of a finite space, or the
/// configured window.
fn output_points(cfg: &RunConfig, space: &OrbitSpace) -> Result<Vec<LatticePoint>> {
    let window = match (cfg.window, space.has_finite_domain()) {
        (Some([lo, hi]), _) => (lo, hi),
        (None, true) => (1, space.length as i64),
        (None, false) => {
            return Err(Error::Config(format!("{:?} is infinite: an explicit output window is required", space.kind)))
        }
    };
    let pts = domain_points(space, window);
    if pts.is_empty() {
        return Err(Error::Config("output window contains no fundamental-domain points".into()));
    }
    if pts.len() > 200_000 {
        return Err(Error::Config(format!("{} output points exceed the limit of 200000", pts.len())));
    }
    Ok(pts)
}

fn coord_columns(n: usize, prefix: &str) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn coord_cells(p: &LatticePoint) -> Vec<Cell> {
    p.coords().iter().map(|&c| Cell::Int(c)).collect()
}

pub fn run_evolve(cfg: &RunConfig) -> Result<Report> {
    let (space, rep) = setup(cfg);
    let targets = output_points(cfg, &space)?;
    let mut psi0 = State::new();
    if cfg.initial_state.is_empty() {
        psi0.insert(LatticePoint((1..=space.walkers as i64).collect()), Complex64::new(1.0, 0.0));
    } else {
        for a in &cfg.initial_state {
            *psi0.entry(LatticePoint(a.point.clone())).or_default() += Complex64::new(a.re, a.im);
        }
    }
    let norm = state_norm(&psi0);
    let params = KernelParams::evolution(cfg.params.omega, cfg.params.tau);
    let out = evolve_state(&space, &rep, &psi0, &targets, &params, &cfg.truncation)?;

    let mut report = Report::default();
    report.meta("input_norm", norm);
    if (norm - 1.0).abs() > 1e-12 {
        let msg = format!("initial state is not normalized (norm {norm:e})");
        eprintln!("warning: {msg}");
        report.meta("warning", msg);
    }
    let mut cols = coord_columns(space.walkers, "x");
    cols.extend(["re", "im", "probability"].map(String::from));
    let mut t = Table::with_columns("distribution", cols);
    let mut total = 0.0;
    for x in &targets {
        let a = out[x];
        let p = a.norm_sqr();
        total += p;
        let mut row = coord_cells(x);
        row.extend([Cell::Float(a.re), Cell::Float(a.im), Cell::Float(p)]);
        t.push(row);
    }
    let mut totals = Table::new("totals", &["points", "total_probability"]);
    totals.push(vec![Cell::Int(targets.len() as i64), Cell::Float(total)]);
    report.tables.extend([t, totals]);
    Ok(report)
}

fn single_sites(cfg: &RunConfig, space: &OrbitSpace, what: &str) -> Result<Vec<i64>> {
    if space.walkers != 1 {
        return Err(Error::Config(format!("{what} is available for a single walker only")));
    }
    Ok(output_points(cfg, space)?.into_iter().map(|p| p.0[0]).collect())
}

pub fn run_resolvent(cfg: &RunConfig) -> Result<Report> {
    let (space, rep) = setup(cfg);
    let sites = single_sites(cfg, &space, "resolvent")?;
    let energy = Complex64::new(cfg.params.energy_re, cfg.params.energy_im);
    let params = KernelParams::resolvent(cfg.params.omega, energy);
    let direct = if space.has_finite_domain() {
        let h = build_hamiltonian(&HamiltonianSpec::for_space(&space, &rep, cfg.params.omega, None)?)?;
        Some(resolvent_direct(&h, energy)?)
    } else {
        None
    };
    let mut t = Table::new("resolvent", &["x", "y", "re", "im", "oracle_deviation"]);
    let mut shells = 0;
    let mut worst: f64 = 0.0;
    for &x in &sites {
        for &y in &sites {
            let r = orbit_resolvent(&space, &rep, &LatticePoint(vec![x]), &LatticePoint(vec![y]), &params, &cfg.truncation)?;
            shells = shells.max(r.shells_used);
            let dev = direct.as_ref().map(|g| (g[(x as usize - 1, y as usize - 1)] - r.value).norm());
            worst = worst.max(dev.unwrap_or(0.0));
            t.push(vec![Cell::Int(x), Cell::Int(y), Cell::Float(r.value.re), Cell::Float(r.value.im), dev.into()]);
        }
    }
    let mut report = Report::default();
    report.meta("max_shells_used", shells);
    if direct.is_some() {
        report.meta("oracle_max_deviation", worst);
    }
    report.tables.push(t);
    Ok(report)
}

pub fn run_thermal(cfg: &RunConfig) -> Result<Report> {
    let (space, rep) = setup(cfg);
    if space.walkers != 1 || !space.has_finite_domain() {
        return Err(Error::Config("thermal needs a single walker on a circle or interval".into()));
    }
    let params = KernelParams::thermal(cfg.params.omega, cfg.params.beta);
    let z = partition_function(&space, &rep, &params, &cfg.truncation)?;
    let sites = domain_sites(&space)?;
    let mut t = Table::new("density_matrix", &["x", "y", "re", "im"]);
    let mut trace = 0.0;
    for &x in &sites {
        for &y in &sites {
            let k = orbit_heat_kernel(&space, &rep, &LatticePoint(vec![x]), &LatticePoint(vec![y]), &params, &cfg.truncation)?;
            let rho = k.value / z;
            if x == y {
                trace += rho.re;
            }
            t.push(vec![Cell::Int(x), Cell::Int(y), Cell::Float(rho.re), Cell::Float(rho.im)]);
        }
    }
    let dec = diagonalize(&build_hamiltonian(&HamiltonianSpec::for_space(&space, &rep, cfg.params.omega, None)?)?)?;
    let z_oracle = partition_direct(&dec, cfg.params.beta);
    let mut pt = Table::new("partition", &["beta", "z", "trace", "z_oracle", "relative_deviation"]);
    pt.push(vec![
        Cell::Float(cfg.params.beta),
        Cell::Float(z),
        Cell::Float(trace),
        Cell::Float(z_oracle),
        Cell::Float(((z - z_oracle) / z_oracle).abs()),
    ]);
    let mut report = Report::default();
    report.tables.extend([t, pt]);
    Ok(report)
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

pub fn run_dos(cfg: &RunConfig) -> Result<Report> {
    let (space, rep) = setup(cfg);
    let sites = single_sites(cfg, &space, "dos")?;
    let omega = cfg.params.omega;
    let eta = cfg.dos.eta;
    let e_min = cfg.dos.e_min.unwrap_or(-(omega + 100.0 * eta));
    let e_max = cfg.dos.e_max.unwrap_or(omega + 100.0 * eta);
    if !(e_min < e_max) {
        return Err(Error::Config(format!("empty energy range [{e_min}, {e_max}]")));
    }
    let n = cfg.dos.points;
    let energies: Vec<f64> = (0..n).map(|k| e_min + (e_max - e_min) * k as f64 / (n - 1) as f64).collect();
    let mut cols = vec!["energy".to_string()];
    cols.extend(sites.iter().map(|x| format!("ldos_{x}")));
    cols.push("total".into());
    let mut t = Table::with_columns("dos", cols);
    let mut per_site = vec![Vec::with_capacity(n); sites.len()];
    let mut totals = Vec::with_capacity(n);
    for &e in &energies {
        let mut row = vec![Cell::Float(e)];
        let mut total = 0.0;
        for (k, &x) in sites.iter().enumerate() {
            let v = local_dos(&space, &rep, &LatticePoint(vec![x]), omega, e, eta, &cfg.truncation)?;
            per_site[k].push(v);
            total += v;
            row.push(Cell::Float(v));
        }
        totals.push(total);
        row.push(Cell::Float(total));
        t.push(row);
    }
    let mut it = Table::new("integral", &["site", "integral"]);
    for (k, &x) in sites.iter().enumerate() {
        it.push(vec![Cell::Int(x), Cell::Float(trapezoid(&energies, &per_site[k]))]);
    }
    it.push(vec![Cell::Text("total".into()), Cell::Float(trapezoid(&energies, &totals))]);
    let mut report = Report::default();
    report.meta("e_min", e_min);
    report.meta("e_max", e_max);
    report.tables.extend([t, it]);
    Ok(report)
}

fn coin_from_config(cfg: &RunConfig) -> Result<CoinSpec> {
    match &cfg.coined.coin {
        None => match &cfg.coined.shifts {
            None => Ok(CoinSpec::hadamard()),
            Some(s) => CoinSpec::new(CoinSpec::hadamard().coin().clone(), s.clone()),
        },
        Some(rows) => {
            let m = CMatrix::from_rows(
                &rows.iter().map(|r| r.iter().map(|c| Complex64::new(c[0], c[1])).collect()).collect::<Vec<_>>(),
            )?;
            let shifts = cfg
                .coined
                .shifts
                .clone()
                .ok_or_else(|| Error::Config("a custom coin needs coined.shifts".into()))?;
            CoinSpec::new(m, shifts)
        }
    }
}

pub fn run_coined(cfg: &RunConfig) -> Result<Report> {
    let (space, rep) = setup(cfg);
    let coin = coin_from_config(cfg)?;
    let steps = cfg.coined.steps;
    let circle = CoinedCircle::new(&space, &rep, steps, &coin, &cfg.truncation)?;
    let l = space.length as usize;
    let d = coin.dim();
    let power = coined_circle_power(l, rep.theta, &coin, steps.unsigned_abs())?;
    let oracle = if steps >= 0 { power } else { power.adjoint() };
    let state: Vec<Complex64> = cfg.coined.coin_state.iter().map(|c| Complex64::new(c[0], c[1])).collect();
    if state.len() != d {
        return Err(Error::Config(format!("coined.coin_state needs {d} entries, got {}", state.len())));
    }
    let start = cfg.coined.start;
    crate::group::check_domain(&space, &[start])?;

    let mut blocks = Table::new("blocks", &["x", "y", "row", "col", "re", "im", "oracle_re", "oracle_im", "deviation"]);
    let mut worst: f64 = 0.0;
    let mut dist = Table::new("distribution", &["x", "probability"]);
    let mut total = 0.0;
    let mut shells = 0;
    for x in 1..=l as i64 {
        for y in 1..=l as i64 {
            let b = circle.kernel(x, y)?;
            shells = shells.max(b.shells_used);
            for j in 0..d {
                for i in 0..d {
                    let v = b.value[(j, i)];
                    let o = oracle[((x - 1) as usize * d + j, (y - 1) as usize * d + i)];
                    let dev = (v - o).norm();
                    worst = worst.max(dev);
                    blocks.push(vec![
                        Cell::Int(x),
                        Cell::Int(y),
                        Cell::Int(j as i64),
                        Cell::Int(i as i64),
                        Cell::Float(v.re),
                        Cell::Float(v.im),
                        Cell::Float(o.re),
                        Cell::Float(o.im),
                        Cell::Float(dev),
                    ]);
                }
            }
            if y == start {
                let amp = b.value.mul_vec(&state);
                let p: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
                total += p;
                dist.push(vec![Cell::Int(x), Cell::Float(p)]);
            }
        }
    }
    let mut totals = Table::new("totals", &["points", "total_probability"]);
    totals.push(vec![Cell::Int(l as i64), Cell::Float(total)]);
    let mut report = Report::default();
    report.meta("max_shells_used", shells);
    report.meta("oracle_max_deviation", worst);
    report.tables.extend([blocks, dist, totals]);
    Ok(report)
}

/// Returns the report and whether every check passed.
pub fn run_verify(cfg: &RunConfig) -> Result<(Report, bool)> {
    let (space, rep) = setup(cfg);
    let reps = if cfg.verify.all_representations { standard_representations(&space) } else { vec![rep] };
    let opts = VerifyOptions {
        omega: cfg.params.omega,
        policy: cfg.truncation,
        window: cfg.verify.oracle_window,
        grid: cfg.verify.grid,
    };
    let mut cols: Vec<String> = ["theta", "phi", "statistics", "omega_tau"].map(String::from).to_vec();
    cols.extend(CHECKS.iter().map(|c| c.to_string()));
    cols.push("result".into());
    let mut t = Table::with_columns("verify", cols);
    let mut all = true;
    for r in &reps {
        for &wt in &cfg.verify.omega_taus {
            let row = verify_case(&space, r, wt, &opts)?;
            let passed = row.passed();
            all &= passed;
            let mut cells = vec![
                Cell::Float(r.theta),
                Cell::Float(r.phi),
                Cell::Text(format!("{:?}", r.statistics).to_lowercase()),
                Cell::Float(wt),
            ];
            cells.extend(row.deviations.iter().map(|&d| Cell::from(d)));
            cells.push(Cell::from(passed));
            t.push(cells);
        }
    }
    let mut report = Report::default();
    report.meta("result", if all { "pass" } else { "fail" });
    report.tables.push(t);
    Ok((report, all))
}
