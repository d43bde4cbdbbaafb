//! Exact rationals, a small numeric trait shared by exact and floating
//! evaluation paths, and toll values.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `n/d` as a reduced rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Always `p/q`, including integers (`3/1`), so consumers can split on `/`.
pub fn fmt_rational(r: &Rational) -> String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Large numerators: scale both parts down before dividing.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Arithmetic needed by formulas that run both exactly and in `f64`.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn as_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        rat(n, d)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn as_f64(&self) -> f64 {
        to_f64(self)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        libm::fabs(*self)
    }
}

/// Value of a toll or an additive functional: exact when every summand is.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Real(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Zero::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Value::Exact(int(n))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => to_f64(r),
            Value::Real(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Real(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Real(x) => *x == 0.0,
        }
    }

    pub fn add_assign(&mut self, other: &Value) {
        *self = match (&*self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            (a, b) => Value::Real(a.to_f64() + b.to_f64()),
        };
    }
}

macro_rules! value_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Value {
            type Output = Value;
            fn $m(self, rhs: Value) -> Value {
                match (self, rhs) {
                    (Value::Exact(a), Value::Exact(b)) => Value::Exact(a.$m(b)),
                    (a, b) => Value::Real(a.to_f64().$m(b.to_f64())),
                }
            }
        }
    };
}

value_binop!(Add, add);
value_binop!(Sub, sub);
value_binop!(Mul, mul);
value_binop!(Div, div);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(-a),
            Value::Real(x) => Value::Real(-x),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.partial_cmp(b),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}

impl Scalar for Value {
    fn zero() -> Self {
        Value::zero()
    }
    fn one() -> Self {
        Value::from_int(1)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Value::Exact(rat(n, d))
    }
    fn from_rational(r: &Rational) -> Self {
        Value::Exact(r.clone())
    }
    fn as_f64(&self) -> f64 {
        self.to_f64()
    }
    fn abs_val(&self) -> Self {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Real(x) => Value::Real(libm::fabs(*x)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&fmt_rational(r)),
            Value::Real(x) => write!(f, "{}", fmt_real(*x)),
        }
    }
}

/// Twelve significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return alloc::format!("{x}");
    }
    let mag = libm::floor(libm::log10(libm::fabs(x))) as i32;
    if (-5..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = alloc::format!("{x:.decimals$}");
        trim_zeros(s)
    } else {
        alloc::format!("{x:.11e}")
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    String::from(t)
}

/// Square-root-free Cholesky factorization `A = L D Lᵀ` in exact arithmetic.
///
/// Returns the pivots `D`; a symmetric matrix is positive definite iff every
/// pivot is strictly positive. `None` when the matrix is not square or a
/// zero pivot stops the elimination.
pub fn ldl_pivots(a: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return None;
    }
    let mut l = alloc::vec![alloc::vec![<Rational as Zero>::zero(); n]; n];
    let mut d: Vec<Rational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = a[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if dj.is_zero() {
            d.push(dj);
            return Some(d);
        }
        for i in j + 1..n {
            let mut s = a[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = s / &dj;
        }
        l[j][j] = <Rational as One>::one();
        d.push(dj);
    }
    Some(d)
}

/// True iff the symmetric matrix is positive definite.
pub fn is_positive_definite(a: &[Vec<Rational>]) -> bool {
    match ldl_pivots(a) {
        Some(d) => d.len() == a.len() && d.iter().all(Signed::is_positive),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn formats_as_p_over_q() {
        assert_eq!(fmt_rational(&rat(22, 45)), "22/45");
        assert_eq!(fmt_rational(&rat(6, 2)), "3/1");
        assert_eq!(parse_rational("4/6"), Some(rat(2, 3)));
        assert_eq!(parse_rational("-7"), Some(int(-7)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(0.5), "0.5");
        assert_eq!(fmt_real(2.0 / 45.0), "0.0444444444444");
    }

    #[test]
    fn ldl_detects_definiteness() {
        let pd = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(2, 1)]];
        assert!(is_positive_definite(&pd));
        assert_eq!(ldl_pivots(&pd).unwrap(), vec![rat(2, 1), rat(3, 2)]);
        let indef = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(1, 1)]];
        assert!(!is_positive_definite(&indef));
        let singular = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]];
        assert!(!is_positive_definite(&singular));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(BigInt::from(3) << 2000, BigInt::from(2) << 2000);
        assert!((to_f64(&big) - 1.5).abs() < 1e-15);
    }
}
