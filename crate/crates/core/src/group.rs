//! Discrete groups acting on `Z^N` and their one-dimensional unitary
//! representations.
//!
//! Every group used here is a subgroup of `D_inf wr S_N`: each coordinate
//! carries a translation power `n_i` and a reflection bit `m_i`, followed by a
//! permutation `sigma`. An element `t^n r^m sigma` acts as
//!
//! ```text
//! (g x)_i = n_i T + (m_i ? c - x_{sigma(i)} : x_{sigma(i)})
//! ```
//!
//! where the period `T` and reflection centre `c` depend on the orbit space
//! and its boundary convention.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{cis_multiple, snap_quarter, QuarterPhase};

/// A point of the covering lattice `Z^N`, in units of the lattice spacing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl From<i64> for LatticePoint {
    fn from(x: i64) -> Self {
        LatticePoint(vec![x])
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Line,
    Circle,
    HalfLine,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConvention {
    /// `r x = 1 - x`, `t x = x + L` (circle) or `x + 2L` (interval).
    #[default]
    Standard,
    /// `r x = -x`, `t x = x + 2(L + 1)`: Dirichlet walls at `0` and `L + 1`.
    Dirichlet,
}

/// Which orbit space `Z^N / Gamma` the walkers live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitSpace {
    pub kind: SpaceKind,
    /// Period (circle) or site count (interval); ignored for line and half line.
    pub length: u32,
    pub walkers: usize,
    pub boundary: BoundaryConvention,
}

/// Hard cap on walker count; `S_6` has 720 elements.
pub const MAX_WALKERS: usize = 6;

impl OrbitSpace {
    pub fn line(walkers: usize) -> Self {
        OrbitSpace { kind: SpaceKind::Line, length: 0, walkers, boundary: BoundaryConvention::Standard }
    }

    pub fn circle(length: u32) -> Self {
        OrbitSpace { kind: SpaceKind::Circle, length, walkers: 1, boundary: BoundaryConvention::Standard }
    }

    pub fn half_line(boundary: BoundaryConvention) -> Self {
        OrbitSpace { kind: SpaceKind::HalfLine, length: 0, walkers: 1, boundary }
    }

    pub fn interval(length: u32, boundary: BoundaryConvention) -> Self {
        OrbitSpace { kind: SpaceKind::Interval, length, walkers: 1, boundary }
    }

    pub fn with_walkers(mut self, walkers: usize) -> Self {
        self.walkers = walkers;
        self
    }

    /// The single-walker space whose wreath power this is.
    pub fn single(&self) -> Self {
        OrbitSpace { walkers: 1, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.walkers == 0 || self.walkers > MAX_WALKERS {
            return Err(Error::InvalidSpace(format!("walker count must be in 1..={MAX_WALKERS}, got {}", self.walkers)));
        }
        match self.kind {
            SpaceKind::Circle | SpaceKind::Interval if self.length == 0 => {
                Err(Error::InvalidSpace(format!("{:?} needs a positive length", self.kind)))
            }
            SpaceKind::Line | SpaceKind::Circle if self.boundary == BoundaryConvention::Dirichlet => {
                Err(Error::InvalidSpace(format!("{:?} has no reflection, so no Dirichlet convention", self.kind)))
            }
            _ => Ok(()),
        }
    }

    /// Translation period `T`, if the group has translations.
    pub fn period(&self) -> Option<i64> {
        let l = self.length as i64;
        match (self.kind, self.boundary) {
            (SpaceKind::Circle, _) => Some(l),
            (SpaceKind::Interval, BoundaryConvention::Standard) => Some(2 * l),
            (SpaceKind::Interval, BoundaryConvention::Dirichlet) => Some(2 * (l + 1)),
            _ => None,
        }
    }

    /// Reflection centre `c` in `r x = c - x`, if the group has reflections.
    pub fn reflection_centre(&self) -> Option<i64> {
        match (self.kind, self.boundary) {
            (SpaceKind::HalfLine | SpaceKind::Interval, BoundaryConvention::Standard) => Some(1),
            (SpaceKind::HalfLine | SpaceKind::Interval, BoundaryConvention::Dirichlet) => Some(0),
            _ => None,
        }
    }

    pub fn has_translations(&self) -> bool {
        self.period().is_some()
    }

    pub fn has_reflections(&self) -> bool {
        self.reflection_centre().is_some()
    }

    /// Whether `Gamma` is finite (no translations).
    pub fn is_finite_group(&self) -> bool {
        !self.has_translations()
    }

    /// Whether the fundamental domain has finitely many sites.
    pub fn has_finite_domain(&self) -> bool {
        matches!(self.kind, SpaceKind::Circle | SpaceKind::Interval)
    }

    /// Single-coordinate fundamental-domain range, `None` for unbounded ends.
    pub fn site_range(&self) -> (Option<i64>, Option<i64>) {
        let l = self.length as i64;
        match self.kind {
            SpaceKind::Line => (None, None),
            SpaceKind::Circle | SpaceKind::Interval => (Some(1), Some(l)),
            SpaceKind::HalfLine => (Some(1), None),
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.walkers {
            return Err(Error::DimensionMismatch { expected: self.walkers, got: n });
        }
        Ok(())
    }
}

/// Word in normal form `t_1^{n_1} r_1^{m_1} ... t_N^{n_N} r_N^{m_N} sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub winding: Vec<i64>,
    pub reflect: Vec<bool>,
    /// `(sigma x)_i = x_{perm[i]}`, zero-based.
    pub perm: Vec<usize>,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement { winding: vec![0; n], reflect: vec![false; n], perm: (0..n).collect() }
    }

    /// `t^n` on a single coordinate.
    pub fn translation(n: i64) -> Self {
        GroupElement { winding: vec![n], reflect: vec![false], perm: vec![0] }
    }

    /// `r` on a single coordinate.
    pub fn reflection() -> Self {
        GroupElement { winding: vec![0], reflect: vec![true], perm: vec![0] }
    }

    /// `t_i` acting on coordinate `i` (zero-based) of `n` walkers.
    pub fn translation_at(n: usize, i: usize, power: i64) -> Self {
        let mut g = Self::identity(n);
        g.winding[i] = power;
        g
    }

    /// `r_i` acting on coordinate `i` (zero-based) of `n` walkers.
    pub fn reflection_at(n: usize, i: usize) -> Self {
        let mut g = Self::identity(n);
        g.reflect[i] = true;
        g
    }

    /// Adjacent transposition `sigma_i` swapping coordinates `i` and `i + 1`
    /// (zero-based `i`).
    pub fn transposition(n: usize, i: usize) -> Self {
        let mut g = Self::identity(n);
        g.perm.swap(i, i + 1);
        g
    }

    pub fn from_permutation(perm: Vec<usize>) -> Self {
        let n = perm.len();
        GroupElement { winding: vec![0; n], reflect: vec![false; n], perm }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.winding.iter().all(|&n| n == 0) && self.reflect.iter().all(|&m| !m) && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn total_winding(&self) -> i64 {
        self.winding.iter().sum()
    }

    pub fn total_reflections(&self) -> i64 {
        self.reflect.iter().filter(|&&m| m).count() as i64
    }

    pub fn max_winding(&self) -> u64 {
        self.winding.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    /// Parity of `sigma` by inversion count: `true` when odd.
    pub fn is_odd(&self) -> bool {
        permutation_is_odd(&self.perm)
    }

    /// Inverse in the same normal form.
    pub fn inverse(&self) -> GroupElement {
        let n = self.dim();
        let mut inv = GroupElement::identity(n);
        for i in 0..n {
            let j = self.perm[i];
            inv.perm[j] = i;
            inv.reflect[j] = self.reflect[i];
            inv.winding[j] = if self.reflect[i] { self.winding[i] } else { -self.winding[i] };
        }
        inv
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        let mut first = true;
        for i in 0..self.dim() {
            if self.winding[i] != 0 {
                write!(f, "{}t{}^{}", if first { "" } else { " " }, i + 1, self.winding[i])?;
                first = false;
            }
            if self.reflect[i] {
                write!(f, "{}r{}", if first { "" } else { " " }, i + 1)?;
                first = false;
            }
        }
        if self.perm.iter().enumerate().any(|(i, &p)| i != p) {
            write!(f, "{}s{:?}", if first { "" } else { " " }, self.perm.iter().map(|p| p + 1).collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

pub fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

fn check_element(space: &OrbitSpace, g: &GroupElement) -> Result<()> {
    space.check_dim(g.dim())?;
    if !space.has_translations() && g.winding.iter().any(|&n| n != 0) {
        return Err(Error::InvalidSpace(format!("{:?} has no translations", space.kind)));
    }
    if !space.has_reflections() && g.reflect.iter().any(|&m| m) {
        return Err(Error::InvalidSpace(format!("{:?} has no reflections", space.kind)));
    }
    Ok(())
}

/// Writes `g x` into `out` without validation. `out.len()` must equal `x.len()`.
pub(crate) fn act_into(space: &OrbitSpace, g: &GroupElement, x: &[i64], out: &mut [i64]) {
    let period = space.period().unwrap_or(0);
    let centre = space.reflection_centre().unwrap_or(0);
    for i in 0..x.len() {
        let v = x[g.perm[i]];
        let v = if g.reflect[i] { centre - v } else { v };
        out[i] = v + g.winding[i] * period;
    }
}

/// `g x`.
pub fn act(g: &GroupElement, x: &LatticePoint, space: &OrbitSpace) -> Result<LatticePoint> {
    check_element(space, g)?;
    space.check_dim(x.dim())?;
    let mut out = vec![0; x.dim()];
    act_into(space, g, &x.0, &mut out);
    Ok(LatticePoint(out))
}

/// Group product `g1 g2`, so that `act(g1 g2, x) = act(g1, act(g2, x))`.
pub fn compose(g1: &GroupElement, g2: &GroupElement, space: &OrbitSpace) -> Result<GroupElement> {
    check_element(space, g1)?;
    check_element(space, g2)?;
    Ok(compose_unchecked(g1, g2))
}

pub(crate) fn compose_unchecked(g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    let n = g1.dim();
    let mut out = GroupElement::identity(n);
    for i in 0..n {
        let j = g1.perm[i];
        let inner = g2.winding[j];
        out.winding[i] = g1.winding[i] + if g1.reflect[i] { -inner } else { inner };
        out.reflect[i] = g1.reflect[i] ^ g2.reflect[j];
        out.perm[i] = g2.perm[j];
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    #[default]
    Boson,
    Fermion,
}

/// A unit-modulus angle, held exactly when it is a multiple of `pi/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Quarter(QuarterPhase),
    General(f64),
}

impl Angle {
    pub fn from_radians(a: f64) -> Self {
        match snap_quarter(a) {
            Some(q) => Angle::Quarter(q),
            None => Angle::General(a.rem_euclid(std::f64::consts::TAU)),
        }
    }

    /// `e^{i n a}`.
    pub fn power(self, n: i64) -> Complex64 {
        match self {
            Angle::Quarter(q) => q.pow(n).value(),
            Angle::General(a) => cis_multiple(n, a),
        }
    }

    /// Whether `e^{i a} = +-1`.
    pub fn is_sign(self) -> bool {
        matches!(self, Angle::Quarter(q) if q.k() % 2 == 0)
    }
}

/// One-dimensional unitary representation `D^{[theta, phi, +-]}`:
/// `D(t^n r^m sigma) = e^{i theta sum n} e^{i phi sum m} (+-1)^{#sigma}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    /// Flux through the circle / phase per period; radians.
    #[serde(default)]
    pub theta: f64,
    /// Reflection phase; radians, `0` or `pi`.
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub statistics: Statistics,
}

impl Default for Representation {
    fn default() -> Self {
        Representation::trivial()
    }
}

impl Representation {
    pub fn trivial() -> Self {
        Representation { theta: 0.0, phi: 0.0, statistics: Statistics::Boson }
    }

    pub fn new(theta: f64, phi: f64, statistics: Statistics) -> Self {
        Representation { theta, phi, statistics }
    }

    pub fn flux(theta: f64) -> Self {
        Representation { theta, ..Self::trivial() }
    }

    pub fn reflection_phase(phi: f64) -> Self {
        Representation { phi, ..Self::trivial() }
    }

    pub fn with_statistics(mut self, statistics: Statistics) -> Self {
        self.statistics = statistics;
        self
    }

    pub fn theta_angle(&self) -> Angle {
        Angle::from_radians(self.theta)
    }

    pub fn phi_angle(&self) -> Angle {
        Angle::from_radians(self.phi)
    }

    /// Checks that the phases are compatible with the group relations of
    /// `space` and that every element with fixed points carries a
    /// non-trivial weight.
    pub fn validate(&self, space: &OrbitSpace) -> Result<()> {
        space.validate()?;
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return Err(Error::InvalidRepresentation("angles must be finite".into()));
        }
        if space.has_reflections() && !self.phi_angle().is_sign() {
            return Err(Error::InvalidRepresentation(format!("reflection phase must be 0 or pi (r^2 = e), got {}", self.phi)));
        }
        if space.has_reflections() && space.has_translations() && !self.theta_angle().is_sign() {
            return Err(Error::InvalidRepresentation(format!(
                "interval flux must be 0 or pi (r t r = t^-1 forces D(t)^2 = 1), got {}",
                self.theta
            )));
        }
        for g in fixing_elements(&space.single(), 2, 64) {
            let w = self.single_weight(&g, space);
            if (w - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
                return Err(Error::InvalidRepresentation(format!(
                    "element {g} has fixed points and trivial weight; no definite boundary condition"
                )));
            }
        }
        Ok(())
    }

    fn single_weight(&self, g: &GroupElement, space: &OrbitSpace) -> Complex64 {
        let mut w = Complex64::new(1.0, 0.0);
        if space.has_translations() {
            w *= self.theta_angle().power(g.total_winding());
        }
        if space.has_reflections() {
            w *= self.phi_angle().power(g.total_reflections());
        }
        w
    }
}

/// `D(g)`; exact whenever `theta` and `phi` are multiples of `pi/2`.
pub fn rep_value(rep: &Representation, g: &GroupElement, space: &OrbitSpace) -> Result<Complex64> {
    rep.validate(space)?;
    check_element(space, g)?;
    Ok(WeightMap::new(rep, space).weight(g))
}

/// Pre-resolved representation for repeated evaluation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct WeightMap {
    theta: Option<Angle>,
    phi: Option<Angle>,
    fermion: bool,
}

impl WeightMap {
    pub(crate) fn new(rep: &Representation, space: &OrbitSpace) -> Self {
        WeightMap {
            theta: space.has_translations().then(|| rep.theta_angle()),
            phi: space.has_reflections().then(|| rep.phi_angle()),
            fermion: rep.statistics == Statistics::Fermion && space.walkers > 1,
        }
    }

    pub(crate) fn weight(&self, g: &GroupElement) -> Complex64 {
        let mut quarter = QuarterPhase::ONE;
        let mut general = None;
        let mut fold = |a: Angle, n: i64| match a {
            Angle::Quarter(q) => quarter = quarter * q.pow(n),
            Angle::General(_) => general = Some(general.unwrap_or(Complex64::new(1.0, 0.0)) * a.power(n)),
        };
        if let Some(t) = self.theta {
            fold(t, g.total_winding());
        }
        if let Some(p) = self.phi {
            fold(p, g.total_reflections());
        }
        if self.fermion && g.is_odd() {
            quarter = quarter * QuarterPhase::new(2);
        }
        match general {
            Some(z) => quarter.rotate(z),
            None => quarter.value(),
        }
    }
}

/// Calls `f` on every element of shell `shell` (elements with
/// `max |n_i| = shell`, all reflection and permutation combinations), in a
/// fixed order. Finite groups put everything in shell 0.
pub(crate) fn visit_shell(space: &OrbitSpace, shell: u32, perms: &[Vec<usize>], mut f: impl FnMut(&GroupElement)) {
    let n = space.walkers;
    let s = shell as i64;
    if !space.has_translations() && shell > 0 {
        return;
    }
    let reflection_masks: u32 = if space.has_reflections() { 1 << n } else { 1 };
    let mut g = GroupElement::identity(n);
    let mut winding = vec![-s; n];
    loop {
        if winding.iter().any(|w| w.abs() == s) {
            g.winding.copy_from_slice(&winding);
            for mask in 0..reflection_masks {
                for (i, m) in g.reflect.iter_mut().enumerate() {
                    *m = mask & (1 << i) != 0;
                }
                for p in perms {
                    g.perm.copy_from_slice(p);
                    f(&g);
                }
            }
        }
        // odometer over [-s, s]^n
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if winding[i] < s {
                winding[i] += 1;
                for w in winding.iter_mut().skip(i + 1) {
                    *w = -s;
                }
                break;
            }
        }
    }
}

/// All group elements with `max |winding| = shell`.
pub fn enumerate_shell(space: &OrbitSpace, shell: u32) -> Vec<GroupElement> {
    let perms = permutations(space.walkers);
    let mut out = Vec::new();
    visit_shell(space, shell, &perms, |g| out.push(g.clone()));
    out
}

/// Non-identity single-walker elements in shells `0..=max_shell` that fix
/// some point with `|x| <= radius`.
fn fixing_elements(space: &OrbitSpace, max_shell: u32, radius: i64) -> Vec<GroupElement> {
    let single = space.single();
    let mut out = Vec::new();
    for shell in 0..=max_shell {
        for g in enumerate_shell(&single, shell) {
            if g.is_identity() {
                continue;
            }
            let fixes = (-radius..=radius).any(|x| {
                let mut y = [0];
                act_into(&single, &g, &[x], &mut y);
                y[0] == x
            });
            if fixes {
                out.push(g);
            }
        }
    }
    out
}

/// `true` iff no non-identity element in shells `0..=2` fixes a single-walker
/// point with `|x| <= sample_radius`.
pub fn fixed_point_free_check(space: &OrbitSpace, sample_radius: u32) -> bool {
    fixing_elements(space, 2, sample_radius.min(50) as i64).is_empty()
}

/// Whether a single coordinate lies in the fundamental domain.
pub fn in_site_range(space: &OrbitSpace, x: i64) -> bool {
    let (lo, hi) = space.site_range();
    lo.is_none_or(|l| x >= l) && hi.is_none_or(|h| x <= h)
}

/// Checks that `x` is a fundamental-domain point: every coordinate in the
/// single-walker domain and coordinates non-decreasing.
pub fn check_domain(space: &OrbitSpace, x: &[i64]) -> Result<()> {
    space.check_dim(x.len())?;
    if x.iter().any(|&c| !in_site_range(space, c)) || x.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::OutOfDomain(x.to_vec()));
    }
    Ok(())
}

/// Writes `x = g x0` with `x0` in the fundamental domain; returns `(x0, g)`.
pub fn canonicalize(space: &OrbitSpace, x: &LatticePoint) -> Result<(LatticePoint, GroupElement)> {
    space.validate()?;
    space.check_dim(x.dim())?;
    let n = x.dim();
    // Reduce each coordinate: x_i = h_i(y_i) with y_i in the site range.
    let mut reduced = Vec::with_capacity(n);
    let mut per_coord = Vec::with_capacity(n);
    for &c in x.coords() {
        let (y, w, m) = reduce_coordinate(space, c).ok_or_else(|| Error::OutOfDomain(x.0.clone()))?;
        reduced.push(y);
        per_coord.push((w, m));
    }
    // Sort the reduced coordinates: x0 = sorted, reduced[i] = x0[perm[i]].
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (reduced[i], i));
    let x0: Vec<i64> = order.iter().map(|&i| reduced[i]).collect();
    let mut perm = vec![0; n];
    for (k, &i) in order.iter().enumerate() {
        perm[i] = k;
    }
    let g = GroupElement {
        winding: per_coord.iter().map(|p| p.0).collect(),
        reflect: per_coord.iter().map(|p| p.1).collect(),
        perm,
    };
    Ok((LatticePoint(x0), g))
}

fn reduce_coordinate(space: &OrbitSpace, x: i64) -> Option<(i64, i64, bool)> {
    let centre = space.reflection_centre();
    match space.period() {
        Some(period) => {
            let l = space.length as i64;
            let r = x.rem_euclid(period);
            let w = (x - r) / period;
            match centre {
                None => {
                    // circle: representatives 1..=L
                    if r == 0 {
                        Some((l, w - 1, false))
                    } else {
                        Some((r, w, false))
                    }
                }
                Some(c) => {
                    // x = w T + v, v in [0, T); v either in 1..=L or a reflected image c - y.
                    if (1..=l).contains(&r) {
                        Some((r, w, false))
                    } else {
                        // x = c - y + w' T
                        let mut y = (c - x).rem_euclid(period);
                        if y == 0 && c == 1 {
                            y = period;
                        }
                        if !(1..=l).contains(&y) {
                            return None;
                        }
                        let w2 = (x - (c - y)) / period;
                        Some((y, w2, true))
                    }
                }
            }
        }
        None => match centre {
            None => Some((x, 0, false)),
            Some(c) => {
                if x >= 1 {
                    Some((x, 0, false))
                } else if c - x >= 1 {
                    Some((c - x, 0, true))
                } else {
                    None
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lp(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    #[test]
    fn actions() {
        let circle = OrbitSpace::circle(4);
        assert_eq!(act(&GroupElement::translation(1), &lp(&[2]), &circle).unwrap(), lp(&[6]));
        let half = OrbitSpace::half_line(BoundaryConvention::Standard);
        assert_eq!(act(&GroupElement::reflection(), &lp(&[3]), &half).unwrap(), lp(&[-2]));
        let line = OrbitSpace::line(3);
        assert_eq!(act(&GroupElement::transposition(3, 0), &lp(&[5, 7, 9]), &line).unwrap(), lp(&[7, 5, 9]));
        assert!(matches!(act(&GroupElement::identity(2), &lp(&[1]), &line), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dihedral_relations() {
        let iv = OrbitSpace::interval(3, BoundaryConvention::Standard);
        let r = GroupElement::reflection();
        let t = GroupElement::translation(1);
        assert!(compose(&r, &r, &iv).unwrap().is_identity());
        let rtr = compose(&r, &compose(&t, &r, &iv).unwrap(), &iv).unwrap();
        assert_eq!(rtr, GroupElement::translation(-1));
        let g = compose(&t, &r, &iv).unwrap();
        assert_eq!(compose(&GroupElement::identity(1), &g, &iv).unwrap(), g);
    }

    #[test]
    fn representation_values() {
        let circle = OrbitSpace::circle(4);
        let v = rep_value(&Representation::flux(PI / 2.0), &GroupElement::translation(3), &circle).unwrap();
        assert_eq!(v, Complex64::new(0.0, -1.0));
        let line = OrbitSpace::line(3);
        let s1s2 = compose(&GroupElement::transposition(3, 0), &GroupElement::transposition(3, 1), &line).unwrap();
        let fermion = Representation::trivial().with_statistics(Statistics::Fermion);
        assert_eq!(rep_value(&fermion, &s1s2, &line).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(rep_value(&fermion, &GroupElement::transposition(3, 0), &line).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(rep_value(&Representation::flux(0.3), &GroupElement::identity(1), &circle).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn invalid_representations() {
        let iv = OrbitSpace::interval(3, BoundaryConvention::Standard);
        assert!(matches!(Representation::flux(PI / 3.0).validate(&iv), Err(Error::InvalidRepresentation(_))));
        let half = OrbitSpace::half_line(BoundaryConvention::Standard);
        assert!(Representation::reflection_phase(PI / 2.0).validate(&half).is_err());
        let half_d = OrbitSpace::half_line(BoundaryConvention::Dirichlet);
        assert!(Representation::trivial().validate(&half_d).is_err());
        assert!(Representation::reflection_phase(PI).validate(&half_d).is_ok());
        let iv_d = OrbitSpace::interval(3, BoundaryConvention::Dirichlet);
        assert!(Representation::new(0.0, PI, Statistics::Boson).validate(&iv_d).is_ok());
        assert!(Representation::new(PI, PI, Statistics::Boson).validate(&iv_d).is_err());
    }

    #[test]
    fn shells() {
        let half = OrbitSpace::half_line(BoundaryConvention::Standard);
        let s0 = enumerate_shell(&half, 0);
        assert_eq!(s0, vec![GroupElement::identity(1), GroupElement::reflection()]);
        assert!(enumerate_shell(&half, 1).is_empty());
        let c5 = OrbitSpace::circle(5);
        let s2 = enumerate_shell(&c5, 2);
        assert_eq!(s2, vec![GroupElement::translation(-2), GroupElement::translation(2)]);
        let line2 = OrbitSpace::line(2);
        assert_eq!(enumerate_shell(&line2, 0), vec![GroupElement::identity(2), GroupElement::transposition(2, 0)]);
        let sizes: Vec<usize> = (0..5).map(|s| enumerate_shell(&c5, s).len()).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 2]);
        let iv = OrbitSpace::interval(3, BoundaryConvention::Standard);
        let sizes: Vec<usize> = (0..5).map(|s| enumerate_shell(&iv, s).len()).collect();
        assert_eq!(sizes, vec![2, 4, 4, 4, 4]);
        let iv3 = iv.with_walkers(3);
        assert_eq!(enumerate_shell(&iv3, 1).len(), (27 - 1) * 8 * 6);
    }

    #[test]
    fn fixed_points() {
        assert!(fixed_point_free_check(&OrbitSpace::half_line(BoundaryConvention::Standard), 20));
        assert!(!fixed_point_free_check(&OrbitSpace::half_line(BoundaryConvention::Dirichlet), 20));
        for l in 1..6 {
            assert!(fixed_point_free_check(&OrbitSpace::circle(l), 20));
            assert!(fixed_point_free_check(&OrbitSpace::interval(l, BoundaryConvention::Standard), 20));
        }
    }

    #[test]
    fn permutation_enumeration() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[0], vec![0, 1, 2]);
        assert_eq!(permutations(1), vec![vec![0]]);
        assert!(!permutation_is_odd(&[1, 2, 0]));
        assert!(permutation_is_odd(&[1, 0, 2]));
    }

    #[test]
    fn canonicalization_round_trips() {
        let spaces = [
            OrbitSpace::circle(5).with_walkers(2),
            OrbitSpace::interval(4, BoundaryConvention::Standard).with_walkers(2),
            OrbitSpace::half_line(BoundaryConvention::Standard).with_walkers(2),
            OrbitSpace::line(2),
        ];
        for space in spaces {
            for a in -12..12 {
                for b in -12..12 {
                    let x = lp(&[a, b]);
                    let (x0, g) = canonicalize(&space, &x).unwrap();
                    check_domain(&space, &x0.0).unwrap();
                    assert_eq!(act(&g, &x0, &space).unwrap(), x, "{space:?} {x}");
                }
            }
        }
        let iv_d = OrbitSpace::interval(3, BoundaryConvention::Dirichlet);
        assert!(canonicalize(&iv_d, &lp(&[4])).is_err());
        assert_eq!(canonicalize(&iv_d, &lp(&[-2])).unwrap().0, lp(&[2]));
    }
}
