//! Bessel functions of the first kind, their derivatives and positive zeros.
//!
//! `J_k(x)` is evaluated with the ascending power series for small arguments
//! and with Miller's backward recurrence, normalised by
//! `J_0 + 2 * sum J_{2j} = 1`, everywhere else. Zeros are bracketed by a
//! sign-change scan starting at `x = k` and polished with a Newton iteration
//! that falls back to bisection whenever a step leaves the bracket.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_j`] and [`bessel_j_prime`].
pub const MAX_ORDER: u32 = 50;
/// Largest argument accepted by [`bessel_j`] and [`bessel_j_prime`].
pub const MAX_ARGUMENT: f64 = 500.0;
/// Largest order and index served by the zero tables.
pub const MAX_ZERO_ORDER: u32 = 20;
pub const MAX_ZERO_INDEX: u32 = 20;
/// Residual bound every tabulated zero satisfies.
pub const ZERO_TOLERANCE: f64 = 1e-10;

// Above this the series loses more than ~1e-13 to cancellation (I_0(8) ~ 430).
const SERIES_LIMIT: f64 = 8.0;
const SCAN_STEP: f64 = 0.1;
const MAX_POLISH_ITERATIONS: usize = 200;

fn check_range(k: u32, x: f64) -> Result<()> {
    if k > MAX_ORDER {
        return Err(Error::Range(format!("order {k} exceeds {MAX_ORDER}")));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Range(format!(
            "argument {x} outside [0, {MAX_ARGUMENT}]"
        )));
    }
    Ok(())
}

/// `J_k(x)` for `k <= 50`, `0 <= x <= 500`, absolute error below 1e-12.
pub fn bessel_j(k: u32, x: f64) -> Result<f64> {
    check_range(k, x)?;
    Ok(j_unchecked(k, x))
}

/// `dJ_k/dx`, from `J_0' = -J_1` and `J_k' = (J_{k-1} - J_{k+1}) / 2`.
pub fn bessel_j_prime(k: u32, x: f64) -> Result<f64> {
    check_range(k, x)?;
    Ok(j_prime_unchecked(k, x))
}

pub(crate) fn j_unchecked(k: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(k, x)
    } else {
        miller(k, x)
    }
}

pub(crate) fn j_prime_unchecked(k: u32, x: f64) -> f64 {
    if k == 0 {
        -j_unchecked(1, x)
    } else {
        0.5 * (j_unchecked(k - 1, x) - j_unchecked(k + 1, x))
    }
}

fn j_second_unchecked(k: u32, x: f64) -> f64 {
    // Bessel's equation: x^2 J'' + x J' + (x^2 - k^2) J = 0
    let kf = f64::from(k);
    -j_prime_unchecked(k, x) / x - (1.0 - kf * kf / (x * x)) * j_unchecked(k, x)
}

fn series(k: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=k {
        term *= half / f64::from(i);
    }
    let q = half * half;
    let mut sum = term;
    let kf = f64::from(k);
    for j in 1..200 {
        let jf = f64::from(j);
        term *= -q / (jf * (kf + jf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term.abs() < 1e-300 {
            break;
        }
    }
    sum
}

fn miller(k: u32, x: f64) -> f64 {
    let top = f64::from(k).max(x) + 15.0 * x.cbrt() + 30.0;
    let mut n = top.ceil() as u32;
    if n % 2 == 1 {
        n += 1;
    }
    let two_over_x = 2.0 / x;
    let mut above = 0.0_f64; // J_{j+1}
    let mut current = 1e-30_f64; // J_j
    let mut norm = 0.0;
    let mut wanted = 0.0;
    let mut j = n;
    loop {
        if j == k {
            wanted = current;
        }
        if j % 2 == 0 {
            norm += if j == 0 { current } else { 2.0 * current };
        }
        if j == 0 {
            break;
        }
        let below = f64::from(j) * two_over_x * current - above;
        above = current;
        current = below;
        j -= 1;
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    wanted / norm
}

/// Which function the zeros belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroKind {
    /// Zeros `p_{kn}` of `J_k`.
    J,
    /// Zeros `p'_{kn}` of `J_k'`, excluding the trivial one at the origin.
    JPrime,
}

/// Immutable table of the first `max_index` positive zeros for orders
/// `0..=max_order`.
#[derive(Debug, Clone)]
pub struct BesselZeroTable {
    kind: ZeroKind,
    max_order: u32,
    max_index: u32,
    tolerance: f64,
    zeros: Vec<f64>,
}

impl BesselZeroTable {
    pub fn build(kind: ZeroKind, max_order: u32, max_index: u32) -> Result<Self> {
        if max_index == 0 {
            return Err(Error::Range("zero table needs at least one index".into()));
        }
        if max_order > MAX_ORDER - 1 {
            return Err(Error::Range(format!(
                "zero table order {max_order} exceeds {}",
                MAX_ORDER - 1
            )));
        }
        let mut zeros = Vec::with_capacity(((max_order + 1) * max_index) as usize);
        for k in 0..=max_order {
            zeros.extend(zeros_of_order(kind, k, max_index)?);
        }
        Ok(Self {
            kind,
            max_order,
            max_index,
            tolerance: ZERO_TOLERANCE,
            zeros,
        })
    }

    pub fn kind(&self) -> ZeroKind {
        self.kind
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// The `n`-th zero (1-based) of order `k`, if tabulated.
    pub fn get(&self, k: u32, n: u32) -> Option<f64> {
        if k > self.max_order || n == 0 || n > self.max_index {
            return None;
        }
        Some(self.zeros[(k * self.max_index + n - 1) as usize])
    }

    /// Iterates `(k, n, zero)` in order-major order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.zeros.iter().enumerate().map(move |(i, &p)| {
            let i = i as u32;
            (i / self.max_index, i % self.max_index + 1, p)
        })
    }
}

fn global_table(kind: ZeroKind) -> &'static BesselZeroTable {
    static J: OnceLock<BesselZeroTable> = OnceLock::new();
    static JP: OnceLock<BesselZeroTable> = OnceLock::new();
    let cell = match kind {
        ZeroKind::J => &J,
        ZeroKind::JPrime => &JP,
    };
    cell.get_or_init(|| {
        BesselZeroTable::build(kind, MAX_ZERO_ORDER, MAX_ZERO_INDEX)
            .expect("built-in Bessel zero table must converge")
    })
}

fn check_zero_index(k: u32, n: u32) -> Result<()> {
    if k > MAX_ZERO_ORDER || n == 0 || n > MAX_ZERO_INDEX {
        return Err(Error::Range(format!(
            "zero ({k}, {n}) outside k <= {MAX_ZERO_ORDER}, 1 <= n <= {MAX_ZERO_INDEX}"
        )));
    }
    Ok(())
}

/// `p_{kn}`, the `n`-th positive zero of `J_k`.
pub fn bessel_zero(k: u32, n: u32) -> Result<f64> {
    check_zero_index(k, n)?;
    Ok(global_table(ZeroKind::J).get(k, n).expect("index checked"))
}

/// `p'_{kn}`, the `n`-th positive zero of `J_k'` for `k >= 1`.
pub fn bessel_prime_zero(k: u32, n: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Range(
            "derivative zeros start at order 1; use p'_{0n} = p_{1n}".into(),
        ));
    }
    check_zero_index(k, n)?;
    Ok(global_table(ZeroKind::JPrime)
        .get(k, n)
        .expect("index checked"))
}

/// `z_{kn} = p_{kn} / pi`.
pub fn scaled_zero(k: u32, n: u32) -> Result<f64> {
    bessel_zero(k, n).map(|p| p / PI)
}

/// `z'_{kn} = p'_{kn} / pi`.
pub fn scaled_prime_zero(k: u32, n: u32) -> Result<f64> {
    bessel_prime_zero(k, n).map(|p| p / PI)
}

fn mcmahon_guess(kind: ZeroKind, k: u32, n: u32) -> f64 {
    let mu = 4.0 * f64::from(k) * f64::from(k);
    let nf = f64::from(n);
    let kf = f64::from(k);
    match kind {
        ZeroKind::J => {
            let beta = (nf + 0.5 * kf - 0.25) * PI;
            beta - (mu - 1.0) / (8.0 * beta)
        }
        ZeroKind::JPrime if k == 0 => {
            // p'_{0n} = p_{1n}
            let beta = (nf + 0.25) * PI;
            beta - 3.0 / (8.0 * beta)
        }
        ZeroKind::JPrime => {
            let beta = (nf + 0.5 * kf - 0.75) * PI;
            beta - (mu + 3.0) / (8.0 * beta)
        }
    }
}

fn zeros_of_order(kind: ZeroKind, k: u32, count: u32) -> Result<Vec<f64>> {
    let (f, df): (fn(u32, f64) -> f64, fn(u32, f64) -> f64) = match kind {
        ZeroKind::J => (j_unchecked, j_prime_unchecked),
        ZeroKind::JPrime => (j_prime_unchecked, j_second_unchecked),
    };
    // Neither J_k nor J_k' vanishes on (0, k] apart from the origin.
    let mut a = f64::from(k).max(0.5);
    let mut fa = f(k, a);
    let mut out = Vec::with_capacity(count as usize);
    while out.len() < count as usize {
        let b = a + SCAN_STEP;
        if b > MAX_ARGUMENT {
            return Err(Error::Numerical(format!(
                "zero scan for order {k} ran past x = {MAX_ARGUMENT}"
            )));
        }
        let fb = f(k, b);
        if fb == 0.0 {
            out.push(b);
            a = b + 1e-9;
            fa = f(k, a);
            continue;
        }
        if fa.signum() != fb.signum() {
            let n = out.len() as u32 + 1;
            out.push(polish(f, df, k, a, b, mcmahon_guess(kind, k, n))?);
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

fn polish(
    f: fn(u32, f64) -> f64,
    df: fn(u32, f64) -> f64,
    k: u32,
    mut lo: f64,
    mut hi: f64,
    guess: f64,
) -> Result<f64> {
    let f_lo = f(k, lo);
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_POLISH_ITERATIONS {
        let fx = f(k, x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let slope = df(k, x);
        let mut next = x - fx / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            return finish(f, k, next);
        }
        x = next;
    }
    Err(Error::Numerical(format!(
        "zero polish for order {k} did not converge in [{lo}, {hi}]"
    )))
}

fn finish(f: fn(u32, f64) -> f64, k: u32, x: f64) -> Result<f64> {
    let residual = f(k, x).abs();
    if residual < ZERO_TOLERANCE {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "zero of order {k} near {x} has residual {residual:e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_prime(0, 0.0).unwrap(), 0.0);
        let x = 1.0;
        assert_eq!(bessel_j_prime(0, x).unwrap(), -bessel_j(1, x).unwrap());
    }

    #[test]
    fn first_zeros_vanish() {
        assert!(bessel_j(0, 2.404826).unwrap().abs() < 1e-6);
        assert!(bessel_j_prime(1, 1.841184).unwrap().abs() < 1e-6);
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(bessel_j(51, 1.0), Err(Error::Range(_))));
        assert!(matches!(bessel_j(0, 500.5), Err(Error::Range(_))));
        assert!(matches!(bessel_j(0, -1.0), Err(Error::Range(_))));
        assert!(matches!(bessel_j(0, f64::NAN), Err(Error::Range(_))));
        assert!(matches!(bessel_zero(21, 1), Err(Error::Range(_))));
        assert!(matches!(bessel_zero(0, 0), Err(Error::Range(_))));
        assert!(matches!(bessel_prime_zero(0, 1), Err(Error::Range(_))));
    }

    #[test]
    fn series_and_recurrence_agree_at_switchover() {
        for k in 0..=10 {
            let s = series(k, SERIES_LIMIT);
            let m = miller(k, SERIES_LIMIT);
            assert!((s - m).abs() < 1e-13, "k={k}: {s} vs {m}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-5;
        for k in 0..=5 {
            for i in 1..=40 {
                let x = 0.5 * f64::from(i);
                let fd = (bessel_j(k, x + h).unwrap() - bessel_j(k, x - h).unwrap()) / (2.0 * h);
                let d = bessel_j_prime(k, x).unwrap();
                assert!((d - fd).abs() < 1e-8, "k={k} x={x}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn listed_zeros() {
        assert!((bessel_zero(0, 1).unwrap() - 2.404826).abs() < 1e-5);
        assert!((bessel_zero(1, 1).unwrap() - 3.831706).abs() < 1e-5);
        assert!((bessel_zero(0, 2).unwrap() - 5.520078).abs() < 1e-5);
        assert!((bessel_prime_zero(1, 1).unwrap() - 1.841184).abs() < 1e-5);
        assert!((bessel_prime_zero(2, 1).unwrap() - 3.054237).abs() < 1e-5);
        assert!(bessel_prime_zero(1, 1).unwrap() < bessel_zero(1, 1).unwrap());
    }

    #[test]
    fn residuals_and_interlacing() {
        for k in 0..=10 {
            for n in 1..=10 {
                let p = bessel_zero(k, n).unwrap();
                assert!(bessel_j(k, p).unwrap().abs() < 1e-10);
                assert!(p < bessel_zero(k + 1, n).unwrap());
                assert!(bessel_zero(k + 1, n).unwrap() < bessel_zero(k, n + 1).unwrap());
                if k >= 1 {
                    let q = bessel_prime_zero(k, n).unwrap();
                    assert!(bessel_j_prime(k, q).unwrap().abs() < 1e-10);
                    assert!(q < bessel_prime_zero(k, n + 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn prime_column_zero_equals_first_order_zeros() {
        let table = BesselZeroTable::build(ZeroKind::JPrime, 1, 10).unwrap();
        for n in 1..=10 {
            let d = table.get(0, n).unwrap() - bessel_zero(1, n).unwrap();
            assert!(d.abs() < 1e-9, "n={n}: {d}");
        }
        assert_eq!(table.iter().count(), 20);
        assert_eq!(table.get(2, 1), None);
    }

    #[test]
    fn table_extremes_converge() {
        let p = bessel_zero(20, 20).unwrap();
        assert!(bessel_j(20, p).unwrap().abs() < ZERO_TOLERANCE);
        let q = bessel_prime_zero(20, 20).unwrap();
        assert!(bessel_j_prime(20, q).unwrap().abs() < ZERO_TOLERANCE);
    }
}
