//! Test-only reference implementations, independent of the crate's own
//! evaluation paths.

#![allow(dead_code)]

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

const FRACTION_BITS: u32 = 320;

fn decode(x: f64) -> (BigInt, i64) {
    assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    (BigInt::from(mant), e)
}

fn shift(v: BigInt, by: i64) -> BigInt {
    if by >= 0 {
        v << by as usize
    } else {
        v >> (-by) as usize
    }
}

/// Ascending series for `J_k(x)` in 320-bit fixed point; the sum is exact
/// to far below f64 resolution for any x the crate accepts.
fn series_fixed(k: u32, x: f64) -> BigInt {
    if x == 0.0 {
        return if k == 0 {
            BigInt::from(1) << FRACTION_BITS as usize
        } else {
            BigInt::zero()
        };
    }
    let (mant, e) = decode(x);
    let half_e = e - 1; // x / 2 = mant * 2^half_e
    let mut term = BigInt::from(1) << FRACTION_BITS as usize;
    for i in 1..=k {
        term = shift(term * &mant, half_e) / BigInt::from(i);
    }
    let mant_sq = &mant * &mant;
    let mut sum = term.clone();
    let floor = BigInt::from(1) << 8;
    let mut j: u64 = 0;
    loop {
        j += 1;
        term = -shift(term * &mant_sq, 2 * half_e) / BigInt::from(j * (j + u64::from(k)));
        sum += &term;
        if (j as f64) > x && term.abs() < floor {
            break;
        }
        assert!(j < 5000, "series did not terminate");
    }
    sum
}

fn to_f64(v: &BigInt) -> f64 {
    let (shifted, scale) = if v.bits() > 900 {
        let extra = v.bits() - 900;
        (v >> extra as usize, extra as i32)
    } else {
        (v.clone(), 0)
    };
    shifted.to_f64().unwrap() * 2f64.powi(scale - FRACTION_BITS as i32)
}

pub fn oracle_j(k: u32, x: f64) -> f64 {
    to_f64(&series_fixed(k, x))
}

/// `J_k'` from the recurrence form on the high-precision series.
fn prime_fixed(k: u32, x: f64) -> BigInt {
    if k == 0 {
        -series_fixed(1, x)
    } else {
        (series_fixed(k - 1, x) - series_fixed(k + 1, x)) >> 1usize
    }
}

pub fn oracle_j_prime(k: u32, x: f64) -> f64 {
    to_f64(&prime_fixed(k, x))
}

fn sign(v: &BigInt) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// First `count` positive zeros found by scanning for sign changes from
/// x = 0.5 and bisecting each bracket to ~1e-14.
pub fn bisection_zeros(k: u32, count: usize, derivative: bool) -> Vec<f64> {
    let eval = |x: f64| {
        if derivative {
            sign(&prime_fixed(k, x))
        } else {
            sign(&series_fixed(k, x))
        }
    };
    let step = 0.25;
    let mut out = Vec::new();
    let mut a = 0.5;
    let mut sa = eval(a);
    while out.len() < count {
        let b = a + step;
        let sb = eval(b);
        if sb != sa {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let sm = eval(mid);
                if sm == 0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if sm == sa {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        sa = sb;
    }
    out
}

pub struct ZeroOracle {
    pub j: Vec<Vec<f64>>,
    pub j_prime: Vec<Vec<f64>>,
}

/// Oracle zeros for k <= 11, n <= 11, computed once per test binary.
pub fn zero_oracle() -> &'static ZeroOracle {
    static ORACLE: OnceLock<ZeroOracle> = OnceLock::new();
    ORACLE.get_or_init(|| {
        let handles: Vec<_> = (0..=11u32)
            .map(|k| {
                std::thread::spawn(move || {
                    (bisection_zeros(k, 11, false), bisection_zeros(k, 11, true))
                })
            })
            .collect();
        let (j, j_prime) = handles.into_iter().map(|h| h.join().unwrap()).unzip();
        ZeroOracle { j, j_prime }
    })
}
