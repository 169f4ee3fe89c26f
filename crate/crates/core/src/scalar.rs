//! Scalar fields: exact Gaussian rationals and tolerance-based complex floats.
//!
//! Every algebraic object in this crate is generic over [`Scalar`]. The exact
//! backend ([`Exact`]) is the default and makes every emptiness/equality
//! question decidable; the float backend ([`Approx`]) compares against a
//! global per-run tolerance and exists for instances whose structure
//! constants are not Gaussian-rational.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(f64::to_bits(1e-9));

/// Global tolerance used by all float-mode comparisons.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Set the global float-mode tolerance for this run.
pub fn set_tolerance(tau: f64) {
    TOLERANCE_BITS.store(tau.to_bits(), Ordering::Relaxed);
}

/// Complex scalar field with the operations the solvers need.
///
/// Implementations must be exact fields or behave like one up to the global
/// tolerance. All comparisons in generic code go through [`Scalar::is_zero`]
/// so that the two backends differ only there and in [`Scalar::pivot_size`].
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Whether this backend is exact (decidable equality).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_i64(n: i64) -> Self;
    /// p/q as a real scalar. Panics if q == 0.
    fn from_ratio(p: i64, q: i64) -> Self;
    /// Build from float parts; `None` when the backend cannot represent
    /// arbitrary floats (exact mode).
    fn from_f64_parts(re: f64, im: f64) -> Option<Self>;

    fn conj(&self) -> Self;
    /// Multiplicative inverse; `None` for (numerical) zero.
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// Real part as a scalar of the same backend.
    fn re_part(&self) -> Self;
    /// Imaginary part (a real scalar: the coefficient of i).
    fn im_part(&self) -> Self;

    /// Pivot quality: exact mode returns 1.0 for nonzero and 0.0 for zero, so
    /// elimination picks the first nonzero row; float mode returns |z| so it
    /// picks the max-magnitude row.
    fn pivot_size(&self) -> f64;
    /// Approximate modulus, for reports and diagnostics.
    fn abs_approx(&self) -> f64;
    /// (re, im) as f64, lossy in exact mode.
    fn to_f64_parts(&self) -> (f64, f64);
    /// Sign of the real part (-1, 0, 1). Exact in exact mode; callers should
    /// gate with `is_zero` first in float mode.
    fn re_sign(&self) -> i32;

    /// Parse one real component: accepts "p/q", integers, and decimal
    /// notation (with optional exponent) in both backends.
    fn parse_real(s: &str) -> Result<Self>;
    /// Canonical string form of one real component.
    fn format_real(x: &Self) -> String;

    /// Small random Gaussian rational: numerators in -9..=9, denominators in
    /// {1, 2}. Produces identical values in both backends for the same rng
    /// stream.
    fn random_small<R: rand::Rng>(rng: &mut R) -> Self {
        let pr = rng.random_range(-9i64..=9);
        let qr = rng.random_range(1i64..=2);
        let pi = rng.random_range(-9i64..=9);
        let qi = rng.random_range(1i64..=2);
        Self::from_ratio(pr, qr) + Self::i() * Self::from_ratio(pi, qi)
    }

    /// Small random real rational, for coefficients of realified systems.
    fn random_small_real<R: rand::Rng>(rng: &mut R) -> Self {
        let p = rng.random_range(-9i64..=9);
        let q = rng.random_range(1i64..=2);
        Self::from_ratio(p, q)
    }

    /// a/b, panicking on division by (numerical) zero.
    fn div(&self, rhs: &Self) -> Self {
        self.clone() * rhs.inv().expect("division by zero scalar")
    }

    /// Equality up to the backend's notion of zero.
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }
}

/// Exact Gaussian rational: re + im·i with `BigRational` components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Exact {
    pub re: BigRational,
    pub im: BigRational,
}

impl Exact {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Exact { re, im }
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Exact::new(re, im)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact::new(-self.re, -self.im)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Parse a decimal or rational literal into an exact `BigRational`.
fn parse_big_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar component".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational numerator {p:?}")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational denominator {q:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    // Decimal with optional exponent: [sign] digits [. digits] [e [sign] digits]
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i32 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['+', '-']);
    if (int_digits.is_empty() && frac_part.is_empty())
        || !int_digits.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("bad scalar literal {s:?}")));
    }
    let digits = format!("{int_digits}{frac_part}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad scalar literal {s:?}")))?
    };
    if negative {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let scale = ten.pow(shift.unsigned_abs());
    Ok(if shift >= 0 {
        BigRational::from_integer(num * scale)
    } else {
        BigRational::new(num, scale)
    })
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Exact::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Exact::new(BigRational::one(), BigRational::zero())
    }
    fn i() -> Self {
        Exact::new(BigRational::zero(), BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Exact::new(Exact::rat(n, 1), BigRational::zero())
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Exact::new(Exact::rat(p, q), BigRational::zero())
    }
    fn from_f64_parts(_re: f64, _im: f64) -> Option<Self> {
        None
    }

    fn conj(&self) -> Self {
        Exact::new(self.re.clone(), -self.im.clone())
    }

    fn inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(Exact::new(&self.re / &norm, -&self.im / &norm))
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn re_part(&self) -> Self {
        Exact::new(self.re.clone(), BigRational::zero())
    }
    fn im_part(&self) -> Self {
        Exact::new(self.im.clone(), BigRational::zero())
    }

    fn pivot_size(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn abs_approx(&self) -> f64 {
        let (re, im) = self.to_f64_parts();
        re.hypot(im)
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn re_sign(&self) -> i32 {
        match self.re.cmp(&BigRational::zero()) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        }
    }

    fn parse_real(s: &str) -> Result<Self> {
        Ok(Exact::new(parse_big_rational(s)?, BigRational::zero()))
    }

    fn format_real(x: &Self) -> String {
        x.re.to_string()
    }
}

/// Complex float scalar; all zero tests use the global [`tolerance`].
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Approx(pub Complex64);

impl Add for Approx {
    type Output = Approx;
    fn add(self, rhs: Approx) -> Approx {
        Approx(self.0 + rhs.0)
    }
}

impl Sub for Approx {
    type Output = Approx;
    fn sub(self, rhs: Approx) -> Approx {
        Approx(self.0 - rhs.0)
    }
}

impl Mul for Approx {
    type Output = Approx;
    fn mul(self, rhs: Approx) -> Approx {
        Approx(self.0 * rhs.0)
    }
}

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx(-self.0)
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Scalar for Approx {
    const EXACT: bool = false;

    fn zero() -> Self {
        Approx(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Approx(Complex64::new(1.0, 0.0))
    }
    fn i() -> Self {
        Approx(Complex64::new(0.0, 1.0))
    }
    fn from_i64(n: i64) -> Self {
        Approx(Complex64::new(n as f64, 0.0))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Approx(Complex64::new(p as f64 / q as f64, 0.0))
    }
    fn from_f64_parts(re: f64, im: f64) -> Option<Self> {
        Some(Approx(Complex64::new(re, im)))
    }

    fn conj(&self) -> Self {
        Approx(self.0.conj())
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Approx(self.0.finv()))
        }
    }

    fn is_zero(&self) -> bool {
        // |a - 0| <= tau * (1 + |a| + |0|)
        let n = self.0.norm();
        n <= tolerance() * (1.0 + n)
    }

    fn re_part(&self) -> Self {
        Approx(Complex64::new(self.0.re, 0.0))
    }
    fn im_part(&self) -> Self {
        Approx(Complex64::new(self.0.im, 0.0))
    }

    fn pivot_size(&self) -> f64 {
        self.0.norm()
    }

    fn abs_approx(&self) -> f64 {
        self.0.norm()
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        (self.0.re, self.0.im)
    }

    fn re_sign(&self) -> i32 {
        if self.0.re < 0.0 {
            -1
        } else if self.0.re > 0.0 {
            1
        } else {
            0
        }
    }

    fn parse_real(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let pv: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational numerator {p:?}")))?;
            let qv: f64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational denominator {q:?}")))?;
            if qv == 0.0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Approx(Complex64::new(pv / qv, 0.0)));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad scalar literal {s:?}")))?;
        Ok(Approx(Complex64::new(v, 0.0)))
    }

    fn format_real(x: &Self) -> String {
        format!("{}", x.0.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tolerance_default_is_1e9() {
        assert_eq!(tolerance(), 1e-9);
    }

    #[test]
    fn exact_field_ops() {
        let a = Exact::from_ratio(2, 3) + Exact::i() * Exact::from_ratio(-1, 2);
        let b = a.clone() * a.inv().unwrap();
        assert_eq!(b, Exact::one());
        assert!((a.clone() - a).is_zero());
        assert_eq!(
            Exact::i() * Exact::i(),
            Exact::from_i64(-1),
        );
        let c = Exact::from_ratio(3, 4) + Exact::i() * Exact::from_ratio(5, 7);
        assert_eq!(c.conj().conj(), c);
        assert_eq!(
            (c.clone() * c.conj()).im_part(),
            Exact::zero(),
        );
    }

    #[test]
    fn exact_parse_rational_and_decimal() {
        let x = Exact::parse_real("3/4").unwrap();
        assert_eq!(x, Exact::from_ratio(3, 4));
        // decimals parse exactly
        let y = Exact::parse_real("0.75").unwrap();
        assert_eq!(y, Exact::from_ratio(3, 4));
        let z = Exact::parse_real("-1.5e2").unwrap();
        assert_eq!(z, Exact::from_i64(-150));
        let w = Exact::parse_real("25e-3").unwrap();
        assert_eq!(w, Exact::from_ratio(1, 40));
        assert_eq!(Exact::parse_real("-7").unwrap(), Exact::from_i64(-7));
        assert!(Exact::parse_real("1/0").is_err());
        assert!(Exact::parse_real("abc").is_err());
        assert!(Exact::parse_real("").is_err());
    }

    #[test]
    fn exact_format_roundtrip() {
        let x = Exact::from_ratio(-22, 8);
        let s = Exact::format_real(&x);
        assert_eq!(s, "-11/4");
        assert_eq!(Exact::parse_real(&s).unwrap(), x);
    }

    #[test]
    fn approx_parse_both_syntaxes() {
        let x = Approx::parse_real("3/4").unwrap();
        assert!((x.0.re - 0.75).abs() < 1e-15);
        let y = Approx::parse_real("7.25e-1").unwrap();
        assert!((y.0.re - 0.725).abs() < 1e-15);
    }

    #[test]
    fn approx_zero_uses_tolerance() {
        let tiny = Approx(Complex64::new(1e-12, -1e-13));
        assert!(tiny.is_zero());
        let not_tiny = Approx(Complex64::new(1e-6, 0.0));
        assert!(!not_tiny.is_zero());
    }

    #[test]
    fn pivot_size_conventions() {
        assert_eq!(Exact::from_i64(5).pivot_size(), 1.0);
        assert_eq!(Exact::zero().pivot_size(), 0.0);
        assert!((Approx(Complex64::new(3.0, 4.0)).pivot_size() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn random_small_matches_across_backends() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let e = Exact::random_small(&mut r1);
            let a = Approx::random_small(&mut r2);
            let (er, ei) = e.to_f64_parts();
            assert_eq!((er, ei), (a.0.re, a.0.im));
        }
    }

    #[test]
    fn division() {
        let a = Exact::from_i64(3) + Exact::i();
        let b = Exact::from_i64(1) - Exact::i();
        let q = a.div(&b);
        assert_eq!(q.clone() * b, a);
    }
}
