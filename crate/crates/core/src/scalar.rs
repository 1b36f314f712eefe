//! Exact scalars over the rationals or a prime field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    /// Prime field of the given characteristic (`p < 2^31`).
    Prime(u32),
}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        if !(2..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Modular {
                value: n.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    /// Builds `num/den`; `den` must be nonzero in the field.
    pub fn from_fraction(self, num: i64, den: i64) -> Option<Scalar> {
        let d = self.from_i64(den);
        if d.is_zero() {
            return None;
        }
        Some(self.from_i64(num) / d)
    }

    /// Parses `n`, `-n` or `p/q`.
    pub fn parse_scalar(self, text: &str) -> std::result::Result<Scalar, String> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| format!("bad scalar `{text}`"))?;
        let den: BigInt = den.parse().map_err(|_| format!("bad scalar `{text}`"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        let s = match self {
            Field::Rationals => Scalar::Rational(BigRational::new(num, den)),
            Field::Prime(p) => {
                let reduce = |x: &BigInt| -> u32 {
                    x.mod_floor(&BigInt::from(p)).to_u32().expect("residue fits")
                };
                let d = Scalar::Modular { value: reduce(&den), modulus: p };
                if d.is_zero() {
                    return Err(format!("denominator of `{text}` vanishes mod {p}"));
                }
                Scalar::Modular { value: reduce(&num), modulus: p } / d
            }
        };
        Ok(s)
    }

    /// Every element of a prime field, zero first. `None` over the rationals.
    pub fn elements(self) -> Option<impl Iterator<Item = Scalar>> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some((0..p).map(move |v| Scalar::Modular { value: v, modulus: p })),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rationals);
        }
        let digits = s
            .strip_prefix('F')
            .or_else(|| s.strip_prefix("GF"))
            .ok_or_else(|| format!("unknown field `{s}` (expected Q or F<p>)"))?;
        let p: u32 = digits.parse().map_err(|_| format!("bad characteristic in `{s}`"))?;
        Field::prime(p).map_err(|e| e.to_string())
    }
}

/// An exact field element. Arithmetic between elements of different fields panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u32, modulus: u32 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: pow_mod(*value as u64, (*modulus - 2) as u64, *modulus as u64) as u32,
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(&self) -> Option<Scalar> {
        self.nth_root(2)
    }

    /// Some `x` with `x^n = self`, if one exists in the field.
    ///
    /// Over the rationals only exact roots of numerator and denominator are found.
    /// Over a prime field every `n`-th root is considered, so `None` means no root exists.
    pub fn nth_root(&self, n: u32) -> Option<Scalar> {
        assert!(n >= 1, "root degree must be positive");
        if n == 1 || self.is_zero() {
            return Some(self.clone());
        }
        match self {
            Scalar::Rational(r) => {
                let negative = r.is_negative();
                if negative && n.is_multiple_of(2) {
                    return None;
                }
                let num = exact_root(&r.numer().abs(), n)?;
                let den = exact_root(r.denom(), n)?;
                let root = BigRational::new(num, den);
                Some(Scalar::Rational(if negative { -root } else { root }))
            }
            Scalar::Modular { value, modulus } => {
                let p = *modulus as u64;
                mod_nth_root(*value as u64, n as u64, p).map(|v| Scalar::Modular {
                    value: v as u32,
                    modulus: *modulus,
                })
            }
        }
    }

    fn binary(&self, rhs: &Scalar, rat: impl Fn(&BigRational, &BigRational) -> BigRational, modop: impl Fn(u64, u64, u64) -> u64) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(rat(a, b)),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: q }) if p == q => {
                Scalar::Modular {
                    value: modop(*a as u64, *b as u64, *p as u64) as u32,
                    modulus: *p,
                }
            }
            _ => panic!("arithmetic between {} and {}", self.field(), rhs.field()),
        }
    }
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// All `q`-th roots of `c` in `F_p` for a prime `q`, with `c != 0`.
fn mod_prime_roots(c: u64, q: u64, p: u64) -> Vec<u64> {
    let order = p - 1;
    if !order.is_multiple_of(q) {
        // x -> x^q is a bijection; invert the exponent.
        let inv = mod_inverse(q % order, order).expect("q coprime to p-1");
        return vec![pow_mod(c, inv, p)];
    }
    if pow_mod(c, order / q, p) != 1 {
        return Vec::new();
    }
    // p - 1 = q^e * s with q not dividing s.
    let mut e = 0;
    let mut s = order;
    while s.is_multiple_of(q) {
        s /= q;
        e += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, order / q, p) != 1).expect("non-residue exists");
    let g = pow_mod(z, s, p); // generates the q-Sylow subgroup, order q^e
    let u = if s == 1 { 0 } else { mod_inverse(q % s, s).expect("coprime") };
    let x0 = pow_mod(c, u, p);
    // x0^q = c * b with b in the Sylow subgroup.
    let b = pow_mod(x0, q, p) * mod_inverse(c, p).unwrap() % p;
    let log = sylow_log(b, g, q, e, p);
    debug_assert_eq!(log % q, 0);
    let sylow_order = order / s;
    let y = pow_mod(g, (sylow_order - log / q) % sylow_order, p);
    let x = x0 * y % p;
    // Multiply through by the q-th roots of unity.
    let zeta = pow_mod(g, sylow_order / q, p);
    let mut roots = Vec::with_capacity(q as usize);
    let mut r = x;
    for _ in 0..q {
        roots.push(r);
        r = r * zeta % p;
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Discrete log of `b` to base `g` where `g` has order `q^e`.
fn sylow_log(b: u64, g: u64, q: u64, e: u32, p: u64) -> u64 {
    let mut log = 0u64;
    let mut qk = 1u64;
    let gamma = pow_mod(g, q.pow(e - 1), p); // order q
    for k in 0..e {
        let ginv = mod_inverse(pow_mod(g, log, p), p).unwrap();
        let h = pow_mod(b * ginv % p, q.pow(e - 1 - k), p);
        let digit = (0..q).find(|&d| pow_mod(gamma, d, p) == h).expect("digit in range");
        log += digit * qk;
        qk *= q;
    }
    log
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (a as i128).extended_gcd(&(m as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i128) as u64)
}

fn mod_nth_root(c: u64, n: u64, p: u64) -> Option<u64> {
    if c == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(c);
    }
    // Peel off one prime factor at a time and keep every branch, since a particular
    // q-th root need not have further roots even when some other one does.
    let factors = prime_factors(n);
    let q = factors[0];
    let rest = n / q;
    let mut roots = mod_prime_roots(c, q, p);
    roots.sort_unstable();
    if rest == 1 {
        return roots.first().copied();
    }
    roots.into_iter().find_map(|r| mod_nth_root(r, rest, p))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(_) => write!(f, "{self}"),
            Scalar::Modular { value, modulus } => write!(f, "{value}%{modulus}"),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but total order, used only for canonical output.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: q }) => {
                (p, a).cmp(&(q, b))
            }
            (Scalar::Rational(_), _) => Ordering::Less,
            _ => Ordering::Greater,
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a + b, |a, b, p| (a + b) % p)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a - b, |a, b, p| (a + p - b) % p)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a * b, |a, b, p| a * b % p)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}
