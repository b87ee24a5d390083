//! Integer-order Bessel functions and exact unit phases.
//!
//! `J_n` is evaluated by the ascending series where its terms are monotone
//! (`z^2/4 <= n + 1`) and by Miller's backward recurrence normalized with
//! `J_0 + 2 sum J_{2k} = 1` elsewhere. `I_n` uses the all-positive ascending
//! series carried in log scale so that overflow is detected instead of
//! silently producing infinities.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Probability amplitude. Kernel values, resolvent entries and weights all
/// use this type.
pub type ComplexAmplitude = Complex64;

/// Largest accepted Bessel argument.
pub const Z_MAX: f64 = 1e4;
/// Largest accepted Bessel order.
pub const N_MAX: u32 = 10_000;

/// An element of `{1, i, -1, -i}`, stored as `k mod 4` for `e^{i pi k / 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct QuarterPhase(u8);

impl QuarterPhase {
    pub const ONE: QuarterPhase = QuarterPhase(0);

    pub fn new(k: i64) -> Self {
        QuarterPhase(k.rem_euclid(4) as u8)
    }

    pub fn k(self) -> u8 {
        self.0
    }

    pub fn value(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Self {
        QuarterPhase::new(-(self.0 as i64))
    }

    pub fn pow(self, n: i64) -> Self {
        QuarterPhase::new(self.0 as i64 * n.rem_euclid(4))
    }

    /// Multiplies `z` by this phase without rounding.
    pub fn rotate(self, z: Complex64) -> Complex64 {
        match self.0 {
            0 => z,
            1 => Complex64::new(-z.im, z.re),
            2 => Complex64::new(-z.re, -z.im),
            _ => Complex64::new(z.im, -z.re),
        }
    }

    /// Phase times a real number, exact.
    pub fn scale(self, r: f64) -> Complex64 {
        self.rotate(Complex64::new(r, 0.0))
    }
}

impl Mul for QuarterPhase {
    type Output = QuarterPhase;
    fn mul(self, rhs: QuarterPhase) -> QuarterPhase {
        QuarterPhase((self.0 + rhs.0) % 4)
    }
}

/// `e^{i pi k / 2}` as an exact complex number.
pub fn quarter_phase(k: i64) -> ComplexAmplitude {
    QuarterPhase::new(k).value()
}

const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `e^{i n a}` with the product `n a` reduced modulo `2 pi` in double-double
/// arithmetic, so large integer multiples keep full phase accuracy.
pub fn cis_multiple(n: i64, angle: f64) -> Complex64 {
    if n == 0 || angle == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let nf = n as f64;
    let hi = nf * angle;
    let lo = nf.mul_add(angle, -hi);
    let k = (hi / TWO_PI_HI).round();
    let r = (-k).mul_add(TWO_PI_HI, hi) - k * TWO_PI_LO + lo;
    Complex64::new(r.cos(), r.sin())
}

fn check_args(n: u32, z: f64) -> Result<()> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {z}")));
    }
    if z > Z_MAX {
        return Err(Error::Domain(format!("Bessel argument {z} exceeds Z_MAX = {Z_MAX}")));
    }
    if n > N_MAX {
        return Err(Error::Domain(format!("Bessel order {n} exceeds N_MAX = {N_MAX}")));
    }
    Ok(())
}

/// Ascending series for `J_n(z)`; accurate to relative rounding when the
/// terms decrease from the start, i.e. `z^2/4 <= n + 1`.
fn series_j(n: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0u64;
    loop {
        k += 1;
        term *= -q / (k as f64 * (k + n as u64) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

fn miller_start(nmax: usize, z: f64) -> usize {
    let base = (nmax as f64).max(z.ceil());
    let m = base + 30.0 + 15.0 * z.max(1.0).cbrt();
    let m = m.ceil() as usize;
    m + (m & 1)
}

/// Miller backward recurrence, returning `J_0..=J_nmax`. Requires `z >= 2`
/// so that the ratio `2k/z` stays moderate.
fn miller_j(nmax: usize, z: f64) -> Vec<f64> {
    let start = miller_start(nmax, z);
    let mut out = vec![0.0; nmax + 1];
    let mut next = 0.0; // j_{k+1}
    let mut cur = 1e-30; // j_k, k = start
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if k <= nmax {
            out[k] = cur;
        }
        if k == 0 {
            norm += cur;
            break;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = (2.0 * k as f64 / z) * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > 1e200 {
            let s = 1e-200;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// Bessel function of the first kind `J_n(z)` for `n >= 0`, `z >= 0`.
///
/// Negative orders follow from `J_{-n} = (-1)^n J_n` at the call site.
pub fn bessel_j(n: u32, z: f64) -> Result<f64> {
    check_args(n, z)?;
    if z == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if 0.25 * z * z <= (n + 1) as f64 {
        return Ok(series_j(n, z));
    }
    Ok(miller_j(n as usize, z)[n as usize])
}

/// `J_0(z), ..., J_nmax(z)` in a single pass.
pub fn bessel_j_table(nmax: u32, z: f64) -> Result<Vec<f64>> {
    check_args(nmax, z)?;
    if z == 0.0 {
        let mut v = vec![0.0; nmax as usize + 1];
        v[0] = 1.0;
        return Ok(v);
    }
    if z < 2.0 {
        return Ok((0..=nmax).map(|n| series_j(n, z)).collect());
    }
    Ok(miller_j(nmax as usize, z))
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n as u64).map(|k| (k as f64).ln()).sum()
}

/// Modified Bessel function of the first kind `I_n(z)` for `n >= 0`, `z >= 0`.
pub fn bessel_i(n: u32, z: f64) -> Result<f64> {
    check_args(n, z)?;
    if z == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * z;
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut log_scale = 0.0;
    let mut k = 0u64;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n as u64) as f64);
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_scale += 250.0 * std::f64::consts::LN_10;
        }
        if term <= 1e-17 * sum && k as f64 > half {
            break;
        }
    }
    let ln_value = n as f64 * half.ln() - ln_factorial(n) + sum.ln() + log_scale;
    if ln_value > f64::MAX.ln() {
        return Err(Error::Overflow(format!("I_{n}({z})")));
    }
    Ok(ln_value.exp())
}

/// `I_0(z), ..., I_nmax(z)`.
pub fn bessel_i_table(nmax: u32, z: f64) -> Result<Vec<f64>> {
    (0..=nmax).map(|n| bessel_i(n, z)).collect()
}

/// `e^{i angle}` for an angle given in radians; exact when the angle is a
/// multiple of `pi/2` to within `1e-12`.
pub fn unit_phase(angle: f64) -> Complex64 {
    match snap_quarter(angle) {
        Some(q) => q.value(),
        None => Complex64::from_polar(1.0, angle),
    }
}

/// Returns the quarter phase if `angle` is within `1e-12` of `k pi / 2`.
pub fn snap_quarter(angle: f64) -> Option<QuarterPhase> {
    let k = (angle / (0.5 * PI)).round();
    if (angle - k * 0.5 * PI).abs() <= 1e-12 && k.abs() < 1e15 {
        Some(QuarterPhase::new(k as i64))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        assert!((bessel_j(0, 2.0).unwrap() - 0.223_890_779_141_235_7).abs() < 1e-15);
        assert!((bessel_i(1, 1.0).unwrap() - 0.565_159_103_992_485).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_j(0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(N_MAX + 1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, 2e4), Err(Error::Domain(_))));
        assert!(matches!(bessel_i(0, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(bessel_i(0, 800.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn table_agrees_with_scalar() {
        for &z in &[0.3, 1.0, 2.5, 7.0, 40.0] {
            let t = bessel_j_table(60, z).unwrap();
            for (n, v) in t.iter().enumerate() {
                let s = bessel_j(n as u32, z).unwrap();
                assert!((v - s).abs() < 1e-14, "n={n} z={z}: {v} vs {s}");
            }
        }
    }

    #[test]
    fn quarter_phases() {
        assert_eq!(quarter_phase(0), Complex64::new(1.0, 0.0));
        assert_eq!(quarter_phase(2), Complex64::new(-1.0, 0.0));
        assert_eq!(quarter_phase(5), Complex64::new(0.0, 1.0));
        assert_eq!(quarter_phase(-1), Complex64::new(0.0, -1.0));
        for a in -8..8 {
            for b in -8..8 {
                let p = QuarterPhase::new(a) * QuarterPhase::new(b);
                assert_eq!(p.value(), QuarterPhase::new(a).value() * QuarterPhase::new(b).value());
                assert_eq!(p, QuarterPhase::new(a + b));
            }
        }
        let z = Complex64::new(0.3, -1.7);
        for k in 0..4 {
            assert_eq!(QuarterPhase::new(k).rotate(z), QuarterPhase::new(k).value() * z);
        }
    }

    #[test]
    fn cis_multiple_reduces_large_arguments() {
        let a = 0.7;
        for n in [-1000_i64, -3, 0, 1, 17, 123_456] {
            let direct = Complex64::from_polar(1.0, (n as f64) * a);
            assert!((cis_multiple(n, a) - direct).norm() < 1e-9);
            assert!((cis_multiple(n, a).norm() - 1.0).abs() < 1e-15);
        }
        let p = cis_multiple(7, 1.1) * cis_multiple(-3, 1.1);
        assert!((p - cis_multiple(4, 1.1)).norm() < 1e-15);
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_quarter(PI), Some(QuarterPhase::new(2)));
        assert_eq!(snap_quarter(-0.5 * PI), Some(QuarterPhase::new(3)));
        assert_eq!(snap_quarter(0.7), None);
        assert_eq!(unit_phase(PI), Complex64::new(-1.0, 0.0));
    }
}
