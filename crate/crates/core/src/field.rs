//! Exact scalar fields: prime fields `F_p` (odd `p`) and the rationals.
//!
//! Elements carry enough information to do arithmetic on their own
//! (an `F_p` element stores its modulus), so generic code can use the
//! ordinary `+ - * /`-style operators. Constants such as zero and one are
//! produced by the [`Field`] value, which plays the role of a context.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{MaslovError, Result};

/// Default upper bound on accepted primes.
pub const DEFAULT_MAX_PRIME: u32 = 101;

/// Arithmetic an exact field element must support.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Eq
    + Hash
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
}

/// A field of characteristic not 2, used as the context for its elements.
pub trait Field: Clone + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    type Elem: Scalar;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// `0` for the rationals.
    fn characteristic(&self) -> u64;
    /// Parses an integer or a `"num/den"` string.
    fn parse(&self, s: &str) -> Result<Self::Elem>;
    /// A random element; for infinite fields a small integer.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// A random nonzero element.
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }
    fn name(&self) -> String;

    fn half(&self) -> Self::Elem {
        self.from_i64(2).inv().expect("characteristic is not 2")
    }

    fn zero_vec(&self, n: usize) -> Vec<Self::Elem> {
        vec![self.zero(); n]
    }

    fn unit_vec(&self, n: usize, i: usize) -> Vec<Self::Elem> {
        let mut v = self.zero_vec(n);
        v[i] = self.one();
        v
    }

    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .fold(self.zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }
}

/// Elementwise helpers on coordinate vectors.
pub fn vec_add<E: Scalar>(a: &[E], b: &[E]) -> Vec<E> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

pub fn vec_sub<E: Scalar>(a: &[E], b: &[E]) -> Vec<E> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect()
}

pub fn vec_scale<E: Scalar>(c: &E, a: &[E]) -> Vec<E> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn vec_neg<E: Scalar>(a: &[E]) -> Vec<E> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn vec_is_zero<E: Scalar>(a: &[E]) -> bool {
    a.iter().all(Scalar::is_zero)
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field `F_p` for an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    /// Accepts odd primes up to [`DEFAULT_MAX_PRIME`].
    pub fn new(p: u32) -> Result<Self> {
        Self::with_limit(p, DEFAULT_MAX_PRIME)
    }

    pub fn with_limit(p: u32, max_prime: u32) -> Result<Self> {
        if p == 2 {
            return Err(MaslovError::InvalidField(
                "characteristic 2 is not supported".into(),
            ));
        }
        if !is_prime(p) {
            return Err(MaslovError::InvalidField(format!("{p} is not a prime")));
        }
        if p > max_prime || p > 46_340 {
            return Err(MaslovError::InvalidField(format!(
                "prime {p} exceeds the configured limit {max_prime}"
            )));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn elem(&self, v: u64) -> Fp {
        Fp {
            v: (v % self.p as u64) as u32,
            p: self.p,
        }
    }

    /// All field elements in increasing residue order.
    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| Fp { v, p: self.p })
    }

    /// Euler's criterion; `None` for zero.
    pub fn is_square(&self, x: &Fp) -> Option<bool> {
        if x.is_zero() {
            return None;
        }
        Some(x.pow(((self.p - 1) / 2) as u64).v == 1)
    }

    /// The least quadratic non-residue.
    pub fn least_non_square(&self) -> Fp {
        self.elements()
            .skip(1)
            .find(|x| self.is_square(x) == Some(false))
            .expect("odd prime fields have non-squares")
    }
}

/// An element of `F_p`, stored as its least nonnegative residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u32,
    p: u32,
}

impl Fp {
    pub fn value(&self) -> u32 {
        self.v
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn pow(&self, mut e: u64) -> Fp {
        let p = self.p as u64;
        let mut base = self.v as u64;
        let mut acc = 1u64 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Fp {
            v: acc as u32,
            p: self.p,
        }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        let s = self.v + o.v;
        Fp {
            v: if s >= self.p { s - self.p } else { s },
            p: self.p,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp {
            v: if self.v >= o.v {
                self.v - o.v
            } else {
                self.v + self.p - o.v
            },
            p: self.p,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp {
            v: ((self.v as u64 * o.v as u64) % self.p as u64) as u32,
            p: self.p,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            v: if self.v == 0 { 0 } else { self.p - self.v },
            p: self.p,
        }
    }
}

impl Scalar for Fp {
    fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn inv(&self) -> Option<Fp> {
        if self.v == 0 {
            return None;
        }
        // Fermat: x^(p-2)
        Some(self.pow((self.p - 2) as u64))
    }
}

impl Field for PrimeField {
    type Elem = Fp;

    fn zero(&self) -> Fp {
        Fp { v: 0, p: self.p }
    }

    fn one(&self) -> Fp {
        Fp { v: 1, p: self.p }
    }

    fn from_i64(&self, n: i64) -> Fp {
        Fp {
            v: n.rem_euclid(self.p as i64) as u32,
            p: self.p,
        }
    }

    fn characteristic(&self) -> u64 {
        self.p as u64
    }

    fn parse(&self, s: &str) -> Result<Fp> {
        let q = parse_rational(s)?;
        let num = self.from_big(q.numer());
        let den = self.from_big(q.denom());
        let inv = den.inv().ok_or_else(|| {
            MaslovError::Parse(format!("denominator of {s} vanishes mod {}", self.p))
        })?;
        Ok(num * inv)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        Fp {
            v: rng.random_range(0..self.p),
            p: self.p,
        }
    }

    fn name(&self) -> String {
        format!("F_{}", self.p)
    }
}

impl PrimeField {
    fn from_big(&self, n: &BigInt) -> Fp {
        let r = n.mod_floor_u32(self.p);
        Fp { v: r, p: self.p }
    }
}

trait ModFloorU32 {
    fn mod_floor_u32(&self, p: u32) -> u32;
}

impl ModFloorU32 for BigInt {
    fn mod_floor_u32(&self, p: u32) -> u32 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        r.to_u32().expect("residue fits in u32")
    }
}

/// The field of rational numbers with exact arbitrary-precision arithmetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

/// Maximum absolute value of the small integers drawn by [`Rationals::random`].
const RATIONAL_SAMPLE_BOUND: i64 = 3;

impl Scalar for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn inv(&self) -> Option<BigRational> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn parse(&self, s: &str) -> Result<BigRational> {
        parse_rational(s)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.random_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND))
    }

    fn name(&self) -> String {
        "Q".into()
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || MaslovError::Parse(format!("not an exact rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if Zero::is_zero(&den) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Exact textual form of a rational: `"a"` for integers, `"a/b"` otherwise.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Sign of a rational as `-1`, `0` or `1`.
pub fn rational_signum(q: &BigRational) -> i32 {
    if Zero::is_zero(q) {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
