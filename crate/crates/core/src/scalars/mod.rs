//! Exact arithmetic in Q(v), where v = q^{1/D} and q = e^{hbar/2}.
//!
//! A [`QScalar`] is stored as `v^shift * num(v) / den(v)` with `num`, `den` in
//! Z[v], both with nonzero constant term, `den` with positive leading
//! coefficient and `gcd(num, den) = 1` in Z[v]. That form is canonical, so
//! structural equality is field equality.

mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
pub use poly::Poly;

/// Laurent polynomial `v^shift * poly(v)` with integer coefficients, `poly(0) != 0` unless zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    shift: i64,
    poly: Poly,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(BigInt::one(), 0)
    }

    pub fn monomial(c: BigInt, k: i64) -> Self {
        Laurent::new(k, Poly::constant(c))
    }

    pub fn new(shift: i64, poly: Poly) -> Self {
        if poly.is_zero() {
            return Laurent::zero();
        }
        let tz = poly.trailing_zeros();
        Laurent {
            shift: shift + tz as i64,
            poly: poly.shift_down(tz),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Lowest and highest exponent present.
    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        self.poly
            .degree()
            .map(|d| (self.shift, self.shift + d as i64))
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(other.shift);
        let a = self.poly.shift_up((self.shift - s) as usize);
        let b = other.poly.shift_up((other.shift - s) as usize);
        Laurent::new(s, a.add(&b))
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            shift: self.shift,
            poly: self.poly.neg(),
        }
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        if self.is_zero() || other.is_zero() {
            return Laurent::zero();
        }
        Laurent::new(self.shift + other.shift, self.poly.mul(&other.poly))
    }

    /// Multiply by `v^k`.
    pub fn shifted(&self, k: i64) -> Laurent {
        if self.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            shift: self.shift + k,
            poly: self.poly.clone(),
        }
    }

    pub fn eval_complex(&self, v: Complex64) -> Complex64 {
        self.poly.eval_complex(v) * v.powi(self.shift as i32)
    }

    /// Value at v = 1.
    pub fn at_one(&self) -> BigInt {
        self.poly.coeffs().iter().sum()
    }

    /// Coefficients as a polynomial after multiplying by `v^-lowest`, where `lowest <= shift`.
    pub fn to_poly_from(&self, lowest: i64) -> Poly {
        debug_assert!(self.is_zero() || lowest <= self.shift);
        self.poly.shift_up((self.shift - lowest).max(0) as usize)
    }

    pub fn to_qscalar(&self) -> QScalar {
        QScalar {
            shift: self.shift,
            num: self.poly.clone(),
            den: Poly::one(),
        }
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shift = self.shift;
        poly::write_terms(
            f,
            self.poly
                .coeffs()
                .iter()
                .enumerate()
                .map(move |(k, c)| (k as i64 + shift, c)),
        )
    }
}

/// An element of Q(v).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QScalar {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar {
            shift: 0,
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        QScalar::from_int(1)
    }

    pub fn from_int(c: i64) -> Self {
        QScalar::from_bigint(BigInt::from(c))
    }

    pub fn from_bigint(c: BigInt) -> Self {
        QScalar {
            shift: 0,
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        QScalar::normalized(0, Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
    }

    /// `v^k`.
    pub fn v_power(k: i64) -> Self {
        QScalar {
            shift: k,
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    /// `num / den` for Laurent polynomials; errors if `den` is zero.
    pub fn from_laurents(num: &Laurent, den: &Laurent) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QScalar::normalized(
            num.shift() - den.shift(),
            num.poly().clone(),
            den.poly().clone(),
        ))
    }

    fn normalized(shift: i64, num: Poly, den: Poly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return QScalar::zero();
        }
        let tn = num.trailing_zeros();
        let td = den.trailing_zeros();
        let mut num = num.shift_down(tn);
        let mut den = den.shift_down(td);
        let shift = shift + tn as i64 - td as i64;
        if !den.is_one() {
            let g = num.gcd(&den);
            if !g.is_one() {
                num = num.div_exact(&g).expect("gcd divides numerator");
                den = den.div_exact(&g).expect("gcd divides denominator");
            }
            if den.lead().is_some_and(|l| l.is_negative()) {
                num = num.neg();
                den = den.neg();
            }
        }
        QScalar { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a Laurent polynomial.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn numerator(&self) -> Laurent {
        Laurent::new(self.shift, self.num.clone())
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn add(&self, other: &QScalar) -> QScalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(other.shift);
        let a = self.num.shift_up((self.shift - s) as usize);
        let b = other.num.shift_up((other.shift - s) as usize);
        if self.den == other.den {
            return QScalar::normalized(s, a.add(&b), self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let da = self.den.div_exact(&g).unwrap();
        let db = other.den.div_exact(&g).unwrap();
        let num = a.mul(&db).add(&b.mul(&da));
        QScalar::normalized(s, num, da.mul(&other.den))
    }

    pub fn neg(&self) -> QScalar {
        QScalar {
            shift: self.shift,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &QScalar) -> QScalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QScalar) -> QScalar {
        if self.is_zero() || other.is_zero() {
            return QScalar::zero();
        }
        let shift = self.shift + other.shift;
        if self.den.is_one() && other.den.is_one() {
            return QScalar {
                shift,
                num: self.num.mul(&other.num),
                den: Poly::one(),
            };
        }
        // cross-cancel before multiplying to keep the gcd small
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        QScalar::normalized(shift, n1.mul(&n2), d1.mul(&d2))
    }

    pub fn inv(&self) -> Result<QScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QScalar::normalized(
            -self.shift,
            self.den.clone(),
            self.num.clone(),
        ))
    }

    pub fn div(&self, other: &QScalar) -> Result<QScalar> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: u32) -> QScalar {
        let mut acc = QScalar::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The bar involution v -> v^{-1}.
    pub fn bar(&self) -> QScalar {
        if self.is_zero() {
            return QScalar::zero();
        }
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        QScalar::normalized(-self.shift - dn + dd, self.num.reversed(), self.den.reversed())
    }

    /// Value at v = 1, or `None` if the denominator vanishes there.
    pub fn at_one(&self) -> Option<BigRational> {
        let d: BigInt = self.den.coeffs().iter().sum();
        if d.is_zero() {
            return None;
        }
        let n: BigInt = self.num.coeffs().iter().sum();
        Some(BigRational::new(n, d))
    }

    /// Value at a complex point `v`.
    pub fn eval_at_v(&self, v: Complex64) -> std::result::Result<Complex64, Poly> {
        let d = self.den.eval_complex(v);
        let scale: f64 = self
            .den
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64().unwrap_or(f64::INFINITY).abs() * v.norm().powi(k as i32))
            .sum();
        if d.norm() <= 1e-12 * scale.max(1.0) {
            return Err(self.den.clone());
        }
        Ok(self.num.eval_complex(v) * v.powi(self.shift as i32) / d)
    }

    /// Numeric value at q = e^{hbar/2}, i.e. v = e^{hbar/(2D)}.
    pub fn evaluate_numeric(&self, hbar: Complex64, denom: Denominator) -> Result<Complex64> {
        self.eval_at_v(denom.v_at(hbar)).map_err(|den| Error::Pole {
            factor: den.to_string(),
            hbar: format!("{}", hbar),
        })
    }

    /// Heuristic size, smaller is cheaper to pivot on.
    pub fn weight(&self) -> usize {
        self.num.weight() + self.den.weight()
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator();
        if self.den.is_one() {
            write!(f, "{}", num)
        } else {
            write!(f, "({})/({})", num, self.den)
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&QScalar> for &QScalar {
            type Output = QScalar;
            fn $m(self, rhs: &QScalar) -> QScalar {
                QScalar::$m(self, rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar::neg(self)
    }
}

/// Session denominator D: every q-exponent in a session lies in (1/D)Z, and v = q^{1/D}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Denominator(u32);

impl Default for Denominator {
    fn default() -> Self {
        Denominator(1)
    }
}

impl Denominator {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Denominator(d))
    }

    pub fn value(&self) -> u32 {
        self.0
    }

    /// Smallest D' divisible by D that makes every given exponent integral after scaling.
    pub fn covering<'a>(self, exponents: impl IntoIterator<Item = &'a BigRational>) -> Self {
        let mut d = BigInt::from(self.0);
        for e in exponents {
            d = d.lcm(e.denom());
        }
        Denominator(d.to_u32().expect("session denominator fits in u32"))
    }

    /// `e * D` as an integer, or an error if it is not integral.
    pub fn exponent(&self, e: &BigRational) -> Result<i64> {
        let scaled = e * BigRational::from_integer(BigInt::from(self.0));
        if !scaled.is_integer() {
            return Err(Error::DenominatorTooSmall {
                exponent: e.to_string(),
                denom: self.0,
            });
        }
        scaled
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Internal(format!("exponent {} overflows", e)))
    }

    /// `q^e` as the Laurent monomial `v^{eD}`.
    pub fn q_power(&self, e: &BigRational) -> Result<QScalar> {
        Ok(QScalar::v_power(self.exponent(e)?))
    }

    pub fn q(&self) -> QScalar {
        QScalar::v_power(self.0 as i64)
    }

    /// `q^e - q^{-e}` as a Laurent polynomial.
    pub fn q_difference(&self, e: &BigRational) -> Result<Laurent> {
        let k = self.exponent(e)?;
        Ok(Laurent::monomial(BigInt::one(), k).sub(&Laurent::monomial(BigInt::one(), -k)))
    }

    /// `q - q^{-1}`.
    pub fn q_minus_q_inv(&self) -> Laurent {
        self.q_difference(&BigRational::one()).unwrap()
    }

    /// `[x]_{q^e} = (q^{ex} - q^{-ex}) / (q^e - q^{-e})` for rational `x`.
    pub fn q_number(&self, x: &BigRational, e: &BigRational) -> Result<QScalar> {
        if e.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self.q_difference(&(x * e))?;
        let den = self.q_difference(e)?;
        QScalar::from_laurents(&num, &den)
    }

    /// `[m]_{q^e}` for an integer `m >= 0`.
    pub fn q_integer(&self, m: u32, e: &BigRational) -> Result<QScalar> {
        self.q_number(&BigRational::from_integer(BigInt::from(m)), e)
    }

    /// `[m]_{q^e}! = [1][2]...[m]`, with `[0]! = 1`.
    pub fn q_factorial(&self, m: u32, e: &BigRational) -> Result<QScalar> {
        let mut acc = QScalar::one();
        for k in 1..=m {
            acc = acc.mul(&self.q_integer(k, e)?);
        }
        Ok(acc)
    }

    /// The numeric value of v at the given hbar: `exp(hbar / (2D))`.
    pub fn v_at(&self, hbar: Complex64) -> Complex64 {
        (hbar / (2.0 * self.0 as f64)).exp()
    }
}
