//! Wigner 3-j and 6-j symbols.
//!
//! Both symbols are evaluated with the Racah single-sum formulas. Every term
//! of the sum is a ratio of factorials, which is carried as a vector of prime
//! exponents; the sum itself is accumulated as an exact big integer after the
//! common prime content has been factored out. Rounding happens once, when the
//! final value is converted to `f64`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multiple of 1/2, stored as the doubled integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Angular momenta must be non-negative multiples of 1/2.
    pub fn angular_momentum(value: f64) -> Result<Self> {
        let h = HalfInt::try_from(value).map_err(|_| Error::NotHalfInteger(value))?;
        if h.0 < 0 {
            return Err(Error::NotHalfInteger(value));
        }
        Ok(h)
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > f64::from(i32::MAX) {
            return Err(Error::NotHalfIntegerProjection(value));
        }
        Ok(HalfInt(twice as i32))
    }
}

impl From<HalfInt> for f64 {
    fn from(h: HalfInt) -> f64 {
        h.value()
    }
}

impl From<i32> for HalfInt {
    fn from(n: i32) -> Self {
        HalfInt::integer(n)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `(a + b + c)` integral and `|a - b| <= c <= a + b`, all on doubled values.
fn triangle(a: i32, b: i32, c: i32) -> bool {
    (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

fn primes_up_to(n: usize) -> Vec<u64> {
    let mut sieve = vec![true; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            primes.push(i as u64);
            let mut k = i * i;
            while k <= n {
                sieve[k] = false;
                k += i;
            }
        }
    }
    primes
}

/// Prime exponents of a product of factorials with signed multiplicities.
struct FactorialProduct<'a> {
    primes: &'a [u64],
    exps: Vec<i64>,
}

impl<'a> FactorialProduct<'a> {
    fn new(primes: &'a [u64]) -> Self {
        FactorialProduct {
            primes,
            exps: vec![0; primes.len()],
        }
    }

    /// Multiplies by `(n!)^power`.
    fn factorial(&mut self, n: i64, power: i64) -> &mut Self {
        for (e, &p) in self.exps.iter_mut().zip(self.primes) {
            let p = p as i64;
            if p > n {
                break;
            }
            let mut q = n;
            let mut count = 0;
            while q > 0 {
                q /= p;
                count += q;
            }
            *e += power * count;
        }
        self
    }
}

/// `sign * sqrt(prefactor) * sum_k (-1)^k term_k`, with `prefactor` and every
/// `term_k` given as prime-exponent vectors.
fn racah_sum(primes: &[u64], prefactor: &[i64], terms: &[(bool, Vec<i64>)]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let width = primes.len();
    let mut common = vec![i64::MAX; width];
    for (_, e) in terms {
        for (c, &x) in common.iter_mut().zip(e) {
            *c = (*c).min(x);
        }
    }

    let mut sum = BigInt::zero();
    for (negative, e) in terms {
        let mut term = BigInt::one();
        for ((&p, &x), &c) in primes.iter().zip(e).zip(&common) {
            let k = (x - c) as u32;
            if k > 0 {
                term *= BigInt::from(p).pow(k);
            }
        }
        if *negative {
            sum -= term;
        } else {
            sum += term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    // Doubled total exponent: sqrt(prefactor) * prod p^common.
    let mut num = sum.abs();
    let mut den = BigInt::one();
    let mut radicand = 1.0_f64;
    for ((&p, &pre), &c) in primes.iter().zip(prefactor).zip(&common) {
        let twice = pre + 2 * c;
        let whole = twice.div_euclid(2);
        let half = twice.rem_euclid(2);
        if whole > 0 {
            num *= BigInt::from(p).pow(whole as u32);
        } else if whole < 0 {
            den *= BigInt::from(p).pow((-whole) as u32);
        }
        // Odd negative exponents floor to whole - 1 with half = 1, so the
        // radicand only ever multiplies.
        if half == 1 {
            radicand *= p as f64;
        }
    }
    let magnitude = ratio_to_f64(&num, &den) * radicand.sqrt();
    if sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    match (num.to_f64(), den.to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale both down to the f64 range; only relevant for huge j.
            let shift = num.bits().max(den.bits()).saturating_sub(1000);
            let n = (num >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (den >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

fn half(doubled: i32) -> i64 {
    debug_assert!(doubled % 2 == 0);
    i64::from(doubled / 2)
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)`.
///
/// Returns 0 whenever a selection rule fails (projection sum, `|m| <= j`,
/// parity of `j - m`, triangle condition).
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    let (tj1, tj2, tj3) = (j1.doubled(), j2.doubled(), j3.doubled());
    let (tm1, tm2, tm3) = (m1.doubled(), m2.doubled(), m3.doubled());
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return 0.0;
    }
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if (tj1 - tm1) % 2 != 0 || (tj2 - tm2) % 2 != 0 || (tj3 - tm3) % 2 != 0 {
        return 0.0;
    }
    if !triangle(tj1, tj2, tj3) {
        return 0.0;
    }

    let a = half(tj1 + tj2 - tj3);
    let b = half(tj1 - tj2 + tj3);
    let c = half(-tj1 + tj2 + tj3);
    let total = half(tj1 + tj2 + tj3);
    let jm = [
        half(tj1 + tm1),
        half(tj1 - tm1),
        half(tj2 + tm2),
        half(tj2 - tm2),
        half(tj3 + tm3),
        half(tj3 - tm3),
    ];

    let primes = primes_up_to((total + 1) as usize);
    let mut pre = FactorialProduct::new(&primes);
    pre.factorial(a, 1)
        .factorial(b, 1)
        .factorial(c, 1)
        .factorial(total + 1, -1);
    for &x in &jm {
        pre.factorial(x, 1);
    }

    // Denominator arguments: k, j3-j2+k+m1, j3-j1+k-m2, j1+j2-j3-k, j1-k-m1, j2-k+m2.
    let s1 = half(tj3 - tj2 + tm1);
    let s2 = half(tj3 - tj1 - tm2);
    let u1 = a;
    let u2 = jm[1];
    let u3 = jm[2];
    let kmin = 0.max(-s1).max(-s2);
    let kmax = u1.min(u2).min(u3);

    let terms: Vec<(bool, Vec<i64>)> = (kmin..=kmax)
        .map(|k| {
            let mut t = FactorialProduct::new(&primes);
            t.factorial(k, -1)
                .factorial(s1 + k, -1)
                .factorial(s2 + k, -1)
                .factorial(u1 - k, -1)
                .factorial(u2 - k, -1)
                .factorial(u3 - k, -1);
            (k % 2 != 0, t.exps)
        })
        .collect();

    let value = racah_sum(&primes, &pre.exps, &terms);
    // Overall phase (-1)^(j1 - j2 - m3).
    if half(tj1 - tj2 - tm3).rem_euclid(2) == 1 {
        -value
    } else {
        value
    }
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}`.
///
/// Returns 0 when any of the four triads `(j1 j2 j3)`, `(j1 j5 j6)`,
/// `(j4 j2 j6)`, `(j4 j5 j3)` violates the triangle rule.
pub fn wigner_6j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> f64 {
    let t = [
        j1.doubled(),
        j2.doubled(),
        j3.doubled(),
        j4.doubled(),
        j5.doubled(),
        j6.doubled(),
    ];
    if t.iter().any(|&x| x < 0) {
        return 0.0;
    }
    let triads = [
        (t[0], t[1], t[2]),
        (t[0], t[4], t[5]),
        (t[3], t[1], t[5]),
        (t[3], t[4], t[2]),
    ];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return 0.0;
    }

    let alphas: Vec<i64> = triads.iter().map(|&(a, b, c)| half(a + b + c)).collect();
    let betas = [
        half(t[0] + t[1] + t[3] + t[4]),
        half(t[1] + t[2] + t[4] + t[5]),
        half(t[2] + t[0] + t[5] + t[3]),
    ];
    let top = *betas.iter().max().unwrap();
    let primes = primes_up_to((top + 1) as usize);

    let mut pre = FactorialProduct::new(&primes);
    for &(a, b, c) in &triads {
        pre.factorial(half(a + b - c), 1)
            .factorial(half(a - b + c), 1)
            .factorial(half(-a + b + c), 1)
            .factorial(half(a + b + c) + 1, -1);
    }

    let tmin = *alphas.iter().max().unwrap();
    let tmax = *betas.iter().min().unwrap();
    let terms: Vec<(bool, Vec<i64>)> = (tmin..=tmax)
        .map(|s| {
            let mut f = FactorialProduct::new(&primes);
            f.factorial(s + 1, 1);
            for &a in &alphas {
                f.factorial(s - a, -1);
            }
            for &b in &betas {
                f.factorial(b - s, -1);
            }
            (s % 2 != 0, f.exps)
        })
        .collect();

    racah_sum(&primes, &pre.exps, &terms)
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j m>` (Condon-Shortley phase).
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    let phase = half((j1 - j2 + m).doubled()).rem_euclid(2);
    let sign = if phase == 1 { -1.0 } else { 1.0 };
    sign * f64::from(j.doubled() + 1).sqrt() * wigner_3j(j1, j2, j, m1, m2, -m)
}

/// 3-j symbol from floating-point quantum numbers; rejects anything that is
/// not a multiple of 1/2.
pub fn wigner_3j_f64(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Result<f64> {
    Ok(wigner_3j(
        HalfInt::angular_momentum(j1)?,
        HalfInt::angular_momentum(j2)?,
        HalfInt::angular_momentum(j3)?,
        HalfInt::try_from(m1)?,
        HalfInt::try_from(m2)?,
        HalfInt::try_from(m3)?,
    ))
}

/// 6-j symbol from floating-point quantum numbers.
pub fn wigner_6j_f64(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64, j6: f64) -> Result<f64> {
    Ok(wigner_6j(
        HalfInt::angular_momentum(j1)?,
        HalfInt::angular_momentum(j2)?,
        HalfInt::angular_momentum(j3)?,
        HalfInt::angular_momentum(j4)?,
        HalfInt::angular_momentum(j5)?,
        HalfInt::angular_momentum(j6)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(x: f64) -> HalfInt {
        HalfInt::try_from(x).unwrap()
    }

    #[test]
    fn three_j_with_zero_column() {
        let v = wigner_3j(h(1.0), h(1.0), h(0.0), h(0.0), h(0.0), h(0.0));
        assert!((v + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        for tj in 0..12 {
            let j = HalfInt::from_doubled(tj);
            let mut m = -j;
            while m <= j {
                if (j - m).is_integer() {
                    let sign = if ((j - m).doubled() / 2) % 2 == 1 { -1.0 } else { 1.0 };
                    let expected = sign / f64::from(tj + 1).sqrt();
                    let v = wigner_3j(j, j, HalfInt::ZERO, m, -m, HalfInt::ZERO);
                    assert!((v - expected).abs() < 1e-14, "j={j} m={m}: {v} vs {expected}");
                }
                m = m + HalfInt::ONE;
            }
        }
    }

    #[test]
    fn three_j_selection_rules() {
        assert_eq!(wigner_3j(h(1.0), h(1.0), h(1.0), h(0.0), h(0.0), h(1.0)), 0.0);
        assert_eq!(wigner_3j(h(1.0), h(1.0), h(3.0), h(0.0), h(0.0), h(0.0)), 0.0);
        assert_eq!(wigner_3j(h(1.0), h(1.0), h(1.0), h(2.0), h(-2.0), h(0.0)), 0.0);
        // (1 1 1; 0 0 0) vanishes by parity.
        assert_eq!(wigner_3j(h(1.0), h(1.0), h(1.0), h(0.0), h(0.0), h(0.0)), 0.0);
    }

    #[test]
    fn three_j_stretched() {
        let v = wigner_3j(h(1.0), h(1.0), h(2.0), h(1.0), h(1.0), h(-2.0));
        assert!((v - 1.0 / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn six_j_values() {
        let v = wigner_6j(h(0.5), h(0.5), h(1.0), h(0.5), h(0.5), h(1.0));
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(wigner_6j(h(1.0), h(2.0), h(4.0), h(2.0), h(1.0), h(2.0)), 0.0);
        // {j j' 0; j' j 0}-type closed form: {a b c; b a 0} = (-1)^(a+b+c) / sqrt((2a+1)(2b+1)).
        for ta in 0..8 {
            for tb in 0..8 {
                let (a, b) = (HalfInt::from_doubled(ta), HalfInt::from_doubled(tb));
                let mut c = (a - b).abs();
                while c <= a + b {
                    let v = wigner_6j(a, b, c, b, a, HalfInt::ZERO);
                    let sign = if half((a + b + c).doubled()).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                    let expected = sign / (f64::from(ta + 1) * f64::from(tb + 1)).sqrt();
                    assert!((v - expected).abs() < 1e-14, "{a} {b} {c}: {v} vs {expected}");
                    c = c + HalfInt::ONE;
                }
            }
        }
    }

    #[test]
    fn float_entry_rejects_non_half_integers() {
        assert!(matches!(
            wigner_3j_f64(1.0, 1.0, 0.3, 0.0, 0.0, 0.0),
            Err(Error::NotHalfInteger(_))
        ));
        assert!(matches!(
            wigner_3j_f64(1.0, 1.0, 1.0, 0.25, 0.0, -0.25),
            Err(Error::NotHalfIntegerProjection(_))
        ));
        assert!(wigner_6j_f64(-0.5, 0.5, 1.0, 0.5, 0.5, 1.0).is_err());
        assert!((wigner_3j_f64(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap() + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn clebsch_gordan_spin_half_pair() {
        let s = HalfInt::HALF;
        // <1/2 1/2; 1/2 -1/2 | 0 0> = 1/sqrt(2)
        let v = clebsch_gordan(s, s, s, -s, HalfInt::ZERO, HalfInt::ZERO);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let v = clebsch_gordan(s, -s, s, s, HalfInt::ZERO, HalfInt::ZERO);
        assert!((v + 0.5f64.sqrt()).abs() < 1e-15);
    }
}
