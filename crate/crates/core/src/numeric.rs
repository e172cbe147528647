//! Fixed-point reals with ~115 decimal digits of absolute precision.
//!
//! Used for diagnostics only: displaying irrational cosines, cross-checking
//! exact results, and evaluating inequalities whose sides are irrational.
//! No admissibility decision is taken on a [`Real`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::ExactRational;

/// Binary digits kept after the point.
pub const PRECISION_BITS: u32 = 384;

/// Default number of significant decimal digits for display.
pub const DISPLAY_DIGITS: usize = 50;

/// A real number `raw / 2^PRECISION_BITS`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real {
    raw: BigInt,
}

fn one_raw() -> BigInt {
    BigInt::one() << PRECISION_BITS
}

/// `num / den` rounded to nearest, ties away from zero.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    let twice = r.abs() << 1;
    if twice >= den.abs() {
        if (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

impl Real {
    pub fn zero() -> Self {
        Self { raw: BigInt::zero() }
    }

    pub fn one() -> Self {
        Self { raw: one_raw() }
    }

    pub fn from_integer(v: i64) -> Self {
        Self {
            raw: BigInt::from(v) << PRECISION_BITS,
        }
    }

    pub fn from_rational(q: &ExactRational) -> Self {
        Self {
            raw: div_round(&(q.numer() << PRECISION_BITS), q.denom()),
        }
    }

    /// Exact conversion of a finite `f64` (truncated below the last kept bit).
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite f64");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let m = BigInt::from(mantissa) * sign;
        let shift = exp + PRECISION_BITS as i64;
        let raw = if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize
        };
        Self { raw }
    }

    /// The dyadic rational this value holds exactly.
    pub fn to_rational(&self) -> ExactRational {
        ExactRational::new(self.raw.clone(), one_raw()).expect("nonzero scale")
    }

    pub fn to_f64(&self) -> f64 {
        // shift down first so the BigInt -> f64 step stays in range
        let shifted = &self.raw >> (PRECISION_BITS - 128);
        shifted.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-128)
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.raw.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self { raw: self.raw.abs() }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        assert!(k <= PRECISION_BITS);
        Self {
            raw: BigInt::one() << (PRECISION_BITS - k),
        }
    }

    /// `10^-k`, rounded.
    pub fn pow10_neg(k: u32) -> Self {
        Self {
            raw: div_round(&one_raw(), &num_traits::pow(BigInt::from(10), k as usize)),
        }
    }

    /// Square root. Negative inputs within `2^-300` of zero are treated as
    /// zero; anything more negative panics.
    pub fn sqrt(&self) -> Self {
        if self.raw.is_negative() {
            assert!(
                self.raw.abs() < (BigInt::one() << (PRECISION_BITS - 300)),
                "sqrt of a negative value"
            );
            return Self::zero();
        }
        Self {
            raw: (&self.raw << PRECISION_BITS).sqrt(),
        }
    }

    pub fn pi() -> Self {
        static PI: OnceLock<Real> = OnceLock::new();
        PI.get_or_init(machin_pi).clone()
    }

    pub fn two_pi() -> Self {
        Self {
            raw: Self::pi().raw << 1,
        }
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        // reduce into [-pi, pi]
        let two_pi = Self::two_pi();
        let k = div_round(&self.raw, &two_pi.raw);
        let r = Self {
            raw: &self.raw - k * &two_pi.raw,
        };
        taylor_sin_cos(&r)
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    /// `(sin 2πt, cos 2πt)` for an exact number of turns `t`.
    pub fn sin_cos_turns(turns: &ExactRational) -> (Self, Self) {
        // map t into [-1/2, 1/2) exactly before going numeric
        let half = crate::rational::ratio(1, 2);
        let t = (turns + &half).fract_positive() - half;
        let angle = &Self::two_pi() * &Self::from_rational(&t);
        taylor_sin_cos(&angle)
    }

    pub fn cos_turns(turns: &ExactRational) -> Self {
        Self::sin_cos_turns(turns).1
    }

    /// Positional decimal with `sig` significant digits (rounded), e.g.
    /// `0.70710678…` or `-0.000123…`.
    pub fn to_sig_string(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.raw.is_zero() {
            return "0".to_string();
        }
        let neg = self.raw.is_negative();
        let mag = self.raw.abs();
        // decimal exponent e with 10^e <= |x| < 10^(e+1); start from f64 and correct
        let approx = self.abs().to_f64();
        let mut e = if approx > 0.0 {
            approx.log10().floor() as i64
        } else {
            -(PRECISION_BITS as i64)
        };
        let digits = loop {
            let k = sig as i64 - 1 - e;
            let scaled = if k >= 0 {
                div_round(&(&mag * num_traits::pow(BigInt::from(10), k as usize)), &one_raw())
            } else {
                div_round(&mag, &(one_raw() * num_traits::pow(BigInt::from(10), (-k) as usize)))
            };
            let s = scaled.to_string();
            match s.len().cmp(&sig) {
                Ordering::Equal => break s,
                Ordering::Greater => e += 1,
                Ordering::Less => e -= 1,
            }
        };
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if e < 0 {
            out.push_str("0.");
            for _ in 0..(-e - 1) {
                out.push('0');
            }
            out.push_str(&digits);
        } else {
            let int_len = (e + 1) as usize;
            if int_len >= digits.len() {
                out.push_str(&digits);
                for _ in digits.len()..int_len {
                    out.push('0');
                }
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
        out
    }
}

fn taylor_sin_cos(x: &Real) -> (Real, Real) {
    let one = one_raw();
    let x2 = (&x.raw * &x.raw) >> PRECISION_BITS;
    // cos: sum (-1)^k x^{2k}/(2k)!, sin: sum (-1)^k x^{2k+1}/(2k+1)!
    let mut cos = one.clone();
    let mut sin = x.raw.clone();
    let mut term_c = one;
    let mut term_s = x.raw.clone();
    let mut k: u64 = 1;
    loop {
        term_c = -((&term_c * &x2) >> PRECISION_BITS) / BigInt::from((2 * k - 1) * (2 * k));
        term_s = -((&term_s * &x2) >> PRECISION_BITS) / BigInt::from((2 * k) * (2 * k + 1));
        if term_c.is_zero() && term_s.is_zero() {
            break;
        }
        cos += &term_c;
        sin += &term_s;
        k += 1;
    }
    (Real { raw: sin }, Real { raw: cos })
}

/// `atan(1/x)` for integer `x > 1`, with the series carried at extra precision.
fn atan_inv(x: u64, guard: u32) -> BigInt {
    let scale = BigInt::one() << (PRECISION_BITS + guard);
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &scale / &x;
    let mut sum = power.clone();
    let mut n: u64 = 1;
    loop {
        power = &power / &x2;
        let term = &power / BigInt::from(2 * n + 1);
        if term.is_zero() {
            break;
        }
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
    sum
}

fn machin_pi() -> Real {
    const GUARD: u32 = 32;
    let pi = atan_inv(5, GUARD) * 16 - atan_inv(239, GUARD) * 4;
    Real {
        raw: div_round(&pi, &(BigInt::one() << GUARD)),
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real {
            raw: &self.raw + &rhs.raw,
        }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real {
            raw: &self.raw - &rhs.raw,
        }
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        Real {
            raw: div_round(&(&self.raw * &rhs.raw), &one_raw()),
        }
    }
}

/// Panics on a zero divisor.
impl Div for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        assert!(!rhs.raw.is_zero(), "division by zero");
        Real {
            raw: div_round(&(&self.raw << PRECISION_BITS), &rhs.raw),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { raw: -&self.raw }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { raw: -self.raw }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(DISPLAY_DIGITS);
        f.write_str(&self.to_sig_string(digits))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sig_string(DISPLAY_DIGITS))
    }
}

/// Default match tolerance for [`reconstruct_rational`].
pub fn reconstruction_tolerance() -> Real {
    Real::pow10_neg(40)
}

/// Searches the continued-fraction convergents of `x` with denominator at
/// most `max_den` for one within `tol` of `x`.
///
/// Any `a/b` with `|x - a/b| < 1/(2b^2)` is a convergent, so when `tol` is far
/// below `1/(2 max_den^2)` a `None` result rules out every rational with
/// denominator up to `max_den`.
pub fn reconstruct_rational(x: &Real, max_den: u64, tol: &Real) -> Option<ExactRational> {
    let max_den = BigInt::from(max_den);
    let mut num = x.raw.clone();
    let mut den = one_raw();
    // convergents h/k via the usual recurrence
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    while !den.is_zero() {
        let a = num.div_floor(&den);
        let r = &num - &a * &den;
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            break;
        }
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let candidate = ExactRational::new(h.clone(), k.clone()).expect("positive denominator");
        let err = (&Real::from_rational(&candidate) - x).abs();
        if &err <= tol {
            return Some(candidate);
        }
        num = std::mem::replace(&mut den, r);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const PI_60: &str = "3.14159265358979323846264338327950288419716939937510582097494";

    #[test]
    fn pi_digits() {
        assert_eq!(Real::pi().to_sig_string(60), PI_60);
    }

    #[test]
    fn sqrt_two() {
        let s = Real::from_integer(2).sqrt();
        assert_eq!(
            s.to_sig_string(50),
            "1.4142135623730950488016887242096980785696718753769"
        );
    }

    #[test]
    fn exact_cosines() {
        let tol = Real::pow10_neg(100);
        for (t, v) in [((1, 6), (1, 2)), ((1, 3), (-1, 2)), ((1, 4), (0, 1)), ((1, 2), (-1, 1)), ((0, 1), (1, 1)), ((5, 6), (1, 2))] {
            let c = Real::cos_turns(&ratio(t.0, t.1));
            let want = Real::from_rational(&ratio(v.0, v.1));
            assert!((&c - &want).abs() < tol, "cos of {t:?} turns = {c}");
        }
    }

    #[test]
    fn cos_two_pi_over_seventeen() {
        // reference value from an independent arbitrary-precision evaluation
        let c = Real::cos_turns(&ratio(1, 17));
        assert_eq!(
            c.to_sig_string(60),
            "0.932472229404355804573115891821563386262587777945116928248350"
        );
    }

    #[test]
    fn sin_cos_unreduced_argument() {
        let x = &Real::from_integer(100) * &Real::one();
        let (s, c) = x.sin_cos();
        let unit = &(&s * &s) + &(&c * &c);
        assert!((&unit - &Real::one()).abs() < Real::pow10_neg(100));
        assert!((s.to_f64() - 100f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn sig_string_formats() {
        assert_eq!(Real::from_rational(&ratio(-1, 8)).to_sig_string(3), "-0.125");
        assert_eq!(Real::from_rational(&ratio(1, 3000)).to_sig_string(4), "0.0003333");
        assert_eq!(Real::from_integer(250).to_sig_string(2), "250");
        assert_eq!(Real::from_rational(&ratio(2, 3)).to_sig_string(5), "0.66667");
        assert_eq!(Real::from_rational(&ratio(999_999, 100_000)).to_sig_string(3), "10.0");
        assert_eq!(Real::zero().to_sig_string(5), "0");
    }

    #[test]
    fn from_f64_is_exact() {
        for v in [0.5, -0.75, 1e-3, std::f64::consts::FRAC_1_SQRT_2, 12345.678] {
            assert_eq!(Real::from_f64(v).to_f64(), v);
        }
    }

    #[test]
    fn reconstruction_finds_small_rationals() {
        let x = Real::from_rational(&ratio(355, 113));
        assert_eq!(reconstruct_rational(&x, 1_000_000, &reconstruction_tolerance()), Some(ratio(355, 113)));
        let x = Real::from_rational(&ratio(-12, 25));
        assert_eq!(reconstruct_rational(&x, 1_000_000, &reconstruction_tolerance()), Some(ratio(-12, 25)));
        let x = Real::from_rational(&ratio(999_983, 1_000_000));
        assert_eq!(reconstruct_rational(&x, 1_000_000, &reconstruction_tolerance()), Some(ratio(999_983, 1_000_000)));
    }

    #[test]
    fn reconstruction_rejects_irrationals() {
        let tol = reconstruction_tolerance();
        assert_eq!(reconstruct_rational(&Real::pi(), 1_000_000, &tol), None);
        assert_eq!(reconstruct_rational(&Real::from_integer(2).sqrt(), 1_000_000, &tol), None);
        assert_eq!(reconstruct_rational(&Real::cos_turns(&ratio(1, 17)), 1_000_000, &tol), None);
        // a rational just past the bound is not found either
        let x = Real::from_rational(&ratio(1, 1_000_003));
        assert_eq!(reconstruct_rational(&x, 1_000_000, &tol), None);
    }
}
