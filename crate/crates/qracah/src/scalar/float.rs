use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_base::{Abs, Sign, SquareRoot};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Monomial, QField, Scalar};
use crate::{Error, Rat, Result};

type F = FBig<HalfEven, 2>;

/// A binary floating-point number with correctly rounded `+ - * / sqrt`.
#[derive(Clone, Debug)]
pub struct FloatScalar(F);

fn ibig(x: &BigInt) -> IBig {
    IBig::from_str(&x.to_string()).expect("decimal integer")
}

impl FloatScalar {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn abs(&self) -> FloatScalar {
        FloatScalar(self.0.clone().abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.sign() == Sign::Negative && !self.is_zero()
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn sqrt(&self) -> Result<FloatScalar> {
        if self.is_negative() {
            return Err(Error::NegativeUnderRadical);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        Ok(FloatScalar(self.0.sqrt()))
    }

    /// `log10 |x|`, or `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let v = self.to_f64().abs();
        if v.is_finite() && v > 0.0 {
            return v.log10();
        }
        let ln = self.0.clone().abs().ln().to_f64().value();
        ln / std::f64::consts::LN_10
    }

    pub fn max_abs(self, o: &FloatScalar) -> FloatScalar {
        if o.0.clone().abs() > self.0.clone().abs() {
            o.abs()
        } else {
            self.abs()
        }
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let d: FBig<HalfEven, 10> = self.0.clone().with_base_and_precision::<10>(digits).value();
        let (sig, exp) = (d.repr().significand().clone(), d.repr().exponent());
        let neg = sig < IBig::ZERO;
        let s = if neg { (-sig).to_string() } else { sig.to_string() };
        let s = s.trim_end_matches('0');
        let s = if s.is_empty() { "0" } else { s };
        let total = sig_len(&d) as isize;
        let e10 = exp + total - 1;
        let (head, tail) = s.split_at(1);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if e10 != 0 {
            out.push_str(&format!("e{e10}"));
        }
        out
    }
}

fn sig_len(d: &FBig<HalfEven, 10>) -> usize {
    let s = d.repr().significand().to_string();
    s.trim_start_matches('-').len()
}

impl fmt::Display for FloatScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits =
            f.precision().unwrap_or_else(|| (self.0.precision() as f64 * std::f64::consts::LOG10_2).floor().max(1.0) as usize);
        write!(f, "{}", self.to_sci(digits))
    }
}

impl PartialEq for FloatScalar {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0
    }
}

impl PartialOrd for FloatScalar {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        self.0.partial_cmp(&o.0)
    }
}

impl Scalar for FloatScalar {
    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let one = F::ONE.with_precision(self.0.precision()).value();
        Ok(FloatScalar(one / &self.0))
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FloatScalar(&self.0 / &rhs.0))
    }

    fn powi(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(FloatScalar(F::ONE.with_precision(self.0.precision()).value()));
        }
        if self.is_zero() {
            return if e > 0 { Ok(self.clone()) } else { Err(Error::DivisionByZero) };
        }
        let p = self.0.powi(IBig::from(e.unsigned_abs()));
        let p = FloatScalar(p);
        if e < 0 {
            p.inv()
        } else {
            Ok(p)
        }
    }
}

impl Neg for FloatScalar {
    type Output = Self;
    fn neg(self) -> Self {
        FloatScalar(-self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for FloatScalar {
            type Output = FloatScalar;
            fn $m(self, o: FloatScalar) -> FloatScalar {
                FloatScalar(self.0.$m(o.0))
            }
        }
        impl<'a> $tr<&'a FloatScalar> for FloatScalar {
            type Output = FloatScalar;
            fn $m(self, o: &'a FloatScalar) -> FloatScalar {
                FloatScalar(self.0.$m(&o.0))
            }
        }
        impl<'a, 'b> $tr<&'b FloatScalar> for &'a FloatScalar {
            type Output = FloatScalar;
            fn $m(self, o: &'b FloatScalar) -> FloatScalar {
                FloatScalar((&self.0).$m(&o.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

/// Floating-point evaluation at a fixed rational `q > 0, q != 1`.
#[derive(Clone, Debug)]
pub struct FloatField {
    q: BigRational,
    precision: usize,
    t: F,
    ln_q: F,
}

impl FloatField {
    /// Smallest accepted precision, in bits.
    pub const MIN_PRECISION: usize = 64;

    pub fn new(q: Rat, precision: usize) -> Result<Self> {
        Self::from_big(super::big(q), precision)
    }

    pub fn from_big(q: BigRational, precision: usize) -> Result<Self> {
        if precision < Self::MIN_PRECISION {
            return Err(Error::PrecisionTooLow(precision));
        }
        if !q.is_positive() {
            return Err(Error::InvalidQ(format!("{q} is not positive")));
        }
        if q.is_one() {
            return Err(Error::InvalidQ("q = 1 is the classical limit; use the exact backend".into()));
        }
        let qf = Self::lift(&q, precision);
        let t = qf.sqrt().sqrt();
        let ln_q = qf.ln();
        Ok(FloatField { q, precision, t, ln_q })
    }

    fn lift(r: &BigRational, precision: usize) -> F {
        let n = F::from(ibig(r.numer())).with_precision(precision).value();
        let d = F::from(ibig(r.denom())).with_precision(precision).value();
        n / d
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    /// `t = q^(1/4)`.
    pub fn t(&self) -> FloatScalar {
        FloatScalar(self.t.clone())
    }

    pub fn from_f64(&self, x: f64) -> FloatScalar {
        let f = F::try_from(x).unwrap_or(F::ZERO);
        FloatScalar(f.with_precision(self.precision).value())
    }

    fn q_pow_f(&self, e: Rat) -> F {
        if e.is_zero() {
            return F::ONE.with_precision(self.precision).value();
        }
        let four = e * 4;
        if four.is_integer() {
            let k = four.to_integer();
            let p = self.t.powi(IBig::from(k.unsigned_abs()));
            if k < 0 {
                F::ONE.with_precision(self.precision).value() / p
            } else {
                p
            }
        } else {
            let ef = Self::lift(&super::big(e), self.precision);
            (ef * &self.ln_q).exp()
        }
    }
}

impl QField for FloatField {
    type S = FloatScalar;

    fn is_exact(&self) -> bool {
        false
    }

    fn big_rational(&self, r: &BigRational) -> FloatScalar {
        FloatScalar(Self::lift(r, self.precision))
    }

    fn monomial(&self, m: &Monomial) -> Result<FloatScalar> {
        if m.is_zero() {
            return Ok(self.zero());
        }
        let one = F::ONE.with_precision(self.precision).value();
        let mut v = FloatScalar(Self::lift(&m.coeff, self.precision) * self.q_pow_f(m.q_exp));
        let kappa = self.q_pow_f(Rat::new(1, 2)) - self.q_pow_f(Rat::new(-1, 2));
        for (&x, &k) in &m.qnum {
            let h = x / 2;
            let f = (self.q_pow_f(h) - self.q_pow_f(-h)) / &kappa;
            v = v * &FloatScalar(f).powi(k)?;
        }
        for (&x, &k) in &m.one_minus {
            let f = &one - self.q_pow_f(x);
            v = v * &FloatScalar(f).powi(k)?;
        }
        for (&x, &k) in &m.one_plus {
            let f = &one + self.q_pow_f(x);
            v = v * &FloatScalar(f).powi(k)?;
        }
        Ok(v)
    }

    fn q_pow(&self, e: Rat) -> Result<FloatScalar> {
        Ok(FloatScalar(self.q_pow_f(e)))
    }

    fn magnitude(&self, x: &FloatScalar) -> f64 {
        x.to_f64().abs()
    }

    fn describe(&self) -> String {
        format!("float(q={}, precision={})", self.q, self.precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> FloatField {
        FloatField::new(Rat::new(7, 10), 128).unwrap()
    }

    #[test]
    fn rejects_bad_q_and_precision() {
        assert!(matches!(FloatField::new(Rat::new(1, 1), 128), Err(Error::InvalidQ(_))));
        assert!(matches!(FloatField::new(Rat::new(-1, 2), 128), Err(Error::InvalidQ(_))));
        assert!(matches!(FloatField::new(Rat::new(1, 2), 32), Err(Error::PrecisionTooLow(32))));
    }

    #[test]
    fn q_number_matches_f64() {
        let fl = f();
        let q: f64 = 0.7;
        for s in [-5.5, -1.0, 0.5, 1.0, 2.0, 7.5] {
            let v = fl.q_number(Rat::new((2.0 * s) as i64, 2)).unwrap().to_f64();
            let want = (q.powf(s / 2.0) - q.powf(-s / 2.0)) / (q.sqrt() - 1.0 / q.sqrt());
            assert!((v - want).abs() < 1e-13 * want.abs(), "s = {s}");
        }
        assert!(fl.q_number(Rat::new(0, 1)).unwrap().is_zero());
    }

    #[test]
    fn q_number_identity_at_full_precision() {
        let fl = f();
        let two = fl.q_number(Rat::new(2, 1)).unwrap();
        let res = two.clone() * &two - fl.q_number(Rat::new(3, 1)).unwrap() - fl.one();
        assert!(res.log10_abs() < -35.0, "{res}");
    }

    #[test]
    fn inverse_q_symmetry() {
        let a = f();
        let b = FloatField::new(Rat::new(10, 7), 128).unwrap();
        for s in [1, 3, 9] {
            let x = a.q_number(Rat::new(s, 2)).unwrap();
            let y = b.q_number(Rat::new(s, 2)).unwrap();
            assert!((x - y).log10_abs() < -35.0);
        }
    }

    #[test]
    fn non_quarter_exponent() {
        let fl = f();
        let x = fl.q_pow(Rat::new(1, 3)).unwrap().powi(3).unwrap();
        let want = fl.rational(Rat::new(7, 10));
        assert!((x - want).log10_abs() < -35.0);
    }

    #[test]
    fn errors() {
        let fl = f();
        assert_eq!(fl.zero().inv().unwrap_err(), Error::DivisionByZero);
        assert_eq!(fl.int(-4).sqrt().unwrap_err(), Error::NegativeUnderRadical);
        assert_eq!(fl.int(9).sqrt().unwrap().to_string(), "3");
        assert_eq!(fl.rational(Rat::new(-1, 8)).to_sci(5), "-1.25e-1");
    }
}
