//! The two arithmetic backends.
//!
//! [`ExactField`] computes in the field of rational functions of `t = q^(1/4)`,
//! [`FloatField`] in binary floating point at a fixed `q` and precision. Every
//! formula in the crate is generic over [`QField`], so the same code runs on
//! both.

mod exact;
mod float;
pub(crate) mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use exact::{ExactField, ExactScalar};
pub use float::{FloatField, FloatScalar};

use crate::{Error, Rat, Result};

/// Field element of one of the backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn is_zero(&self) -> bool;

    fn inv(&self) -> Result<Self>;

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * &rhs.inv()?)
    }

    fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc: Option<Self> = None;
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a * &sq,
                });
            }
            k >>= 1;
            if k > 0 {
                sq = sq.clone() * &sq;
            }
        }
        Ok(match acc {
            Some(a) => a,
            None => self.clone() * &self.inv().unwrap_or_else(|_| self.clone()),
        })
    }
}

/// A product `c * q^e * prod [x]^k * prod (1 - q^x)^k * prod (1 + q^x)^k`.
///
/// This is the shape of every closed form in the crate. The exact backend
/// turns it into cyclotomic factors without multiplying polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: BigRational,
    pub q_exp: Rat,
    pub qnum: BTreeMap<Rat, i64>,
    pub one_minus: BTreeMap<Rat, i64>,
    pub one_plus: BTreeMap<Rat, i64>,
}

impl Default for Monomial {
    fn default() -> Self {
        Monomial {
            coeff: BigRational::one(),
            q_exp: Rat::zero(),
            qnum: BTreeMap::new(),
            one_minus: BTreeMap::new(),
            one_plus: BTreeMap::new(),
        }
    }
}

fn bump(map: &mut BTreeMap<Rat, i64>, key: Rat, k: i64) {
    let e = map.entry(key).or_insert(0);
    *e += k;
    if *e == 0 {
        map.remove(&key);
    }
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn zero() -> Self {
        Monomial { coeff: BigRational::zero(), ..Self::default() }
    }

    pub fn scale(&mut self, r: &BigRational) -> &mut Self {
        self.coeff *= r;
        self
    }

    pub fn negate(&mut self) -> &mut Self {
        self.coeff = -self.coeff.clone();
        self
    }

    pub fn q_pow(&mut self, e: Rat) -> &mut Self {
        self.q_exp += e;
        self
    }

    /// Multiplies by `[x]^k`. `[0]` with `k > 0` zeroes the monomial.
    pub fn qnum(&mut self, x: Rat, k: i64) -> Result<&mut Self> {
        if k == 0 {
            return Ok(self);
        }
        if x.is_zero() {
            if k < 0 {
                return Err(Error::DivisionByZero);
            }
            *self = Monomial::zero();
            return Ok(self);
        }
        if x < Rat::zero() {
            if k % 2 != 0 {
                self.negate();
            }
            bump(&mut self.qnum, -x, k);
        } else {
            bump(&mut self.qnum, x, k);
        }
        Ok(self)
    }

    /// Multiplies by `(1 - q^x)^k`.
    pub fn one_minus(&mut self, x: Rat, k: i64) -> Result<&mut Self> {
        if k == 0 {
            return Ok(self);
        }
        if x.is_zero() {
            if k < 0 {
                return Err(Error::DivisionByZero);
            }
            *self = Monomial::zero();
            return Ok(self);
        }
        bump(&mut self.one_minus, x, k);
        Ok(self)
    }

    /// Multiplies by `(1 + q^x)^k`.
    pub fn one_plus(&mut self, x: Rat, k: i64) -> &mut Self {
        if k != 0 {
            bump(&mut self.one_plus, x, k);
        }
        self
    }

    pub fn mul(&mut self, o: &Monomial) -> &mut Self {
        if self.is_zero() || o.is_zero() {
            *self = Monomial::zero();
            return self;
        }
        self.coeff *= &o.coeff;
        self.q_exp += o.q_exp;
        for (x, k) in &o.qnum {
            bump(&mut self.qnum, *x, *k);
        }
        for (x, k) in &o.one_minus {
            bump(&mut self.one_minus, *x, *k);
        }
        for (x, k) in &o.one_plus {
            bump(&mut self.one_plus, *x, *k);
        }
        self
    }

    pub fn inv(&self) -> Result<Monomial> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Monomial {
            coeff: self.coeff.recip(),
            q_exp: -self.q_exp,
            qnum: self.qnum.iter().map(|(x, k)| (*x, -k)).collect(),
            one_minus: self.one_minus.iter().map(|(x, k)| (*x, -k)).collect(),
            one_plus: self.one_plus.iter().map(|(x, k)| (*x, -k)).collect(),
        })
    }
}

pub(crate) fn big(r: Rat) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// A backend: constructs scalars from rationals and q-expressions.
pub trait QField: Clone + fmt::Debug + Send + Sync + 'static {
    type S: Scalar;

    fn is_exact(&self) -> bool;

    fn big_rational(&self, r: &BigRational) -> Self::S;

    fn monomial(&self, m: &Monomial) -> Result<Self::S>;

    /// Absolute size of a value, used for residual reports. The exact
    /// backend samples the rational function at its probe value of q.
    fn magnitude(&self, x: &Self::S) -> f64;

    /// Short human-readable description for report metadata.
    fn describe(&self) -> String;

    fn zero(&self) -> Self::S {
        self.big_rational(&BigRational::zero())
    }

    fn one(&self) -> Self::S {
        self.big_rational(&BigRational::one())
    }

    fn int(&self, n: i64) -> Self::S {
        self.big_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn rational(&self, r: Rat) -> Self::S {
        self.big_rational(&big(r))
    }

    fn q_pow(&self, e: Rat) -> Result<Self::S> {
        let mut m = Monomial::one();
        m.q_pow(e);
        self.monomial(&m)
    }

    /// The symmetric q-number `[s] = (q^(s/2) - q^(-s/2)) / (q^(1/2) - q^(-1/2))`.
    fn q_number(&self, s: Rat) -> Result<Self::S> {
        let mut m = Monomial::one();
        m.qnum(s, 1)?;
        self.monomial(&m)
    }

    fn one_minus_q_pow(&self, e: Rat) -> Result<Self::S> {
        let mut m = Monomial::one();
        m.one_minus(e, 1)?;
        self.monomial(&m)
    }

    fn one_plus_q_pow(&self, e: Rat) -> Result<Self::S> {
        let mut m = Monomial::one();
        m.one_plus(e, 1);
        self.monomial(&m)
    }

    /// `kappa = q^(1/2) - q^(-1/2)`.
    fn kappa(&self) -> Result<Self::S> {
        Ok(self.q_pow(Rat::new(1, 2))? - self.q_pow(Rat::new(-1, 2))?)
    }
}
