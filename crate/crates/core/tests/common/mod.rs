//! Independent reference values shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

const DIGITS: u32 = 100;

fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

fn to_f64(v: &BigInt) -> f64 {
    // Shift down to ~30 significant digits before the float conversion.
    let shift = BigInt::from(10u32).pow(DIGITS - 30);
    (v / shift).to_f64().expect("finite") / 1e30
}

/// Ascending series for `J_n(p/q)` (or `I_n` with `alternating = false`)
/// in fixed-point integer arithmetic with 100 decimal digits.
fn series(n: u32, p: u64, q: u64, alternating: bool) -> f64 {
    // t_0 = (z/2)^n / n!, t_k = t_{k-1} * s (z/2)^2 / (k (k + n)).
    let mut num = scale() * BigInt::from(p).pow(n);
    let mut den = BigInt::from(2 * q).pow(n);
    for k in 1..=n {
        den *= k;
    }
    let mut t = num.clone() / &den;
    let mut sum = t.clone();
    let z2n = BigInt::from(p * p);
    let z2d = BigInt::from(4 * q * q);
    let mut k: u64 = 1;
    loop {
        num = &t * &z2n;
        den = &z2d * BigInt::from(k) * BigInt::from(k + n as u64);
        t = num / den;
        if alternating {
            t = -t;
        }
        sum += &t;
        if t.is_zero() || (t.abs() < BigInt::from(1u8) && (k * q) as f64 > p as f64) {
            break;
        }
        k += 1;
    }
    to_f64(&sum)
}

/// `J_n(p/q)` from the exact ascending series.
pub fn exact_bessel_j(n: u32, p: u64, q: u64) -> f64 {
    series(n, p, q, true)
}

/// `I_n(p/q)` from the exact ascending series.
pub fn exact_bessel_i(n: u32, p: u64, q: u64) -> f64 {
    series(n, p, q, false)
}

/// Signed-order `J_n(z)` from the production routine.
pub fn bessel_j_signed(n: i64, z: f64) -> f64 {
    let v = orbitwalk::bessel_j(n.unsigned_abs() as u32, z).unwrap();
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}
