use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{cyclotomic, cyclotomic_at_one, divisors_of, ZPoly};
use super::{big, Monomial, QField, Scalar};
use crate::{Error, Rat, Result};

/// An element of Q(t), `t = q^(1/4)`, kept as
/// `coeff * t^shift * prod_d Phi_d(t)^e_d * num(t) / den(t)`.
///
/// `num` and `den` are primitive with positive leading coefficient and
/// nonzero constant term. `num` shares no factor with `den` or with a
/// cyclotomic factor of negative exponent, and `den` none with a cyclotomic
/// factor of positive exponent. Values built from q-numbers and q-Pochhammer
/// symbols stay fully factored, so products rarely touch polynomials at all.
#[derive(Clone, Debug)]
pub struct ExactScalar {
    coeff: BigRational,
    shift: i64,
    cyclo: BTreeMap<u32, i32>,
    num: ZPoly,
    den: ZPoly,
}

const P61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn reduce(x: &BigInt) -> u64 {
    let m = BigInt::from(P61);
    x.mod_floor(&m).to_u64().unwrap()
}

/// Cheap necessary condition for `phi | p`: exact division modulo a prime.
fn divisible_mod_p(p: &ZPoly, phi: &ZPoly) -> bool {
    let pc = p.coeffs();
    let mc = phi.coeffs();
    if pc.len() < mc.len() {
        return false;
    }
    let dm = mc.len() - 1;
    let mut r: Vec<u64> = pc.iter().map(reduce).collect();
    let m: Vec<u64> = mc.iter().map(reduce).collect();
    for i in (0..=(pc.len() - 1 - dm)).rev() {
        let coef = r[i + dm];
        if coef == 0 {
            continue;
        }
        r[i + dm] = 0;
        for j in 0..dm {
            if m[j] != 0 {
                r[i + j] = (r[i + j] + P61 - mulmod(coef, m[j])) % P61;
            }
        }
    }
    r.iter().all(|&x| x == 0)
}

fn try_divide(p: &ZPoly, d: u32) -> Option<ZPoly> {
    if p.degree() == 0 {
        return None;
    }
    let phi = cyclotomic(d);
    if phi.degree() > p.degree() || !divisible_mod_p(p, &phi) {
        return None;
    }
    p.div_exact_monic(&phi)
}

fn expand(d: u32, e: i32) -> ZPoly {
    cyclotomic(d).pow(e as u32)
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { coeff: BigRational::zero(), shift: 0, cyclo: BTreeMap::new(), num: ZPoly::one(), den: ZPoly::one() }
    }

    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        ExactScalar { coeff: r, ..Self::zero() }
    }

    fn from_monomial(m: &Monomial) -> Result<Self> {
        if m.is_zero() {
            return Ok(Self::zero());
        }
        let quarter = |x: Rat| -> Result<i64> {
            let y = x * 4;
            if y.is_integer() {
                Ok(y.to_integer())
            } else {
                Err(Error::NonHalfIntegerExponent(x.to_string()))
            }
        };
        let mut out = ExactScalar { coeff: m.coeff.clone(), ..Self::zero() };
        out.shift = quarter(m.q_exp)?;
        let bump = |d: u32, k: i64, cyclo: &mut BTreeMap<u32, i32>| {
            *cyclo.entry(d).or_insert(0) += k as i32;
        };
        for (&x, &k) in &m.qnum {
            // [x] = t^(2-2x) (t^(4x) - 1) / (t^4 - 1), x > 0
            let n4 = quarter(x)?;
            if n4 % 2 != 0 {
                return Err(Error::NonHalfIntegerExponent(x.to_string()));
            }
            out.shift += k * (2 - n4 / 2);
            for d in divisors_of(n4 as u32) {
                bump(d, k, &mut out.cyclo);
            }
            for d in [1, 2, 4] {
                bump(d, -k, &mut out.cyclo);
            }
        }
        for (&x, &k) in &m.one_minus {
            let e = quarter(x)?;
            if e > 0 {
                if k % 2 != 0 {
                    out.coeff = -out.coeff;
                }
            } else {
                out.shift += k * e;
            }
            for d in divisors_of(e.unsigned_abs() as u32) {
                bump(d, k, &mut out.cyclo);
            }
        }
        for (&x, &k) in &m.one_plus {
            let e = quarter(x)?;
            if e < 0 {
                out.shift += k * e;
            }
            let e = e.unsigned_abs() as u32;
            if e == 0 {
                let two = BigRational::from_integer(BigInt::from(2));
                out.coeff *= two.pow(k as i32);
                continue;
            }
            for d in divisors_of(2 * e) {
                if e % d != 0 {
                    bump(d, k, &mut out.cyclo);
                }
            }
        }
        out.cyclo.retain(|_, e| *e != 0);
        Ok(out)
    }

    /// Removes cyclotomic factors of `num` and `den` that cancel against
    /// `cyclo`, for the listed divisors only.
    fn cancel_cyclo(&mut self, num_ds: &[u32], den_ds: &[u32]) {
        for &d in num_ds {
            while self.cyclo.get(&d).copied().unwrap_or(0) < 0 {
                match try_divide(&self.num, d) {
                    Some(p) => {
                        self.num = p;
                        *self.cyclo.get_mut(&d).unwrap() += 1;
                    }
                    None => break,
                }
            }
        }
        for &d in den_ds {
            while self.cyclo.get(&d).copied().unwrap_or(0) > 0 {
                match try_divide(&self.den, d) {
                    Some(p) => {
                        self.den = p;
                        *self.cyclo.get_mut(&d).unwrap() -= 1;
                    }
                    None => break,
                }
            }
        }
        self.cyclo.retain(|_, e| *e != 0);
    }

    fn cancel_gcd(&mut self) {
        if self.num.degree() > 0 && self.den.degree() > 0 {
            let g = self.num.gcd(&self.den);
            if g.degree() > 0 {
                self.num = self.num.div_exact(&g).expect("gcd divides");
                self.den = self.den.div_exact(&g).expect("gcd divides");
            }
        }
    }

    /// Restores the invariants after `num` or `den` changed arbitrarily.
    fn normalize(&mut self) {
        if self.num.is_zero() || self.coeff.is_zero() {
            *self = Self::zero();
            return;
        }
        let v = self.num.valuation();
        if v > 0 {
            self.num = self.num.strip_low(v);
            self.shift += v as i64;
        }
        let v = self.den.valuation();
        if v > 0 {
            self.den = self.den.strip_low(v);
            self.shift -= v as i64;
        }
        let (c, p) = self.num.primitive();
        self.num = p;
        self.coeff *= BigRational::from_integer(c);
        let (c, p) = self.den.primitive();
        self.den = p;
        self.coeff /= BigRational::from_integer(c);
        let neg: Vec<u32> = self.cyclo.iter().filter(|(_, e)| **e < 0).map(|(d, _)| *d).collect();
        let pos: Vec<u32> = self.cyclo.iter().filter(|(_, e)| **e > 0).map(|(d, _)| *d).collect();
        self.cancel_cyclo(&neg, &pos);
        self.cancel_gcd();
    }

    fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut cyclo = self.cyclo.clone();
        for (d, e) in &o.cyclo {
            *cyclo.entry(*d).or_insert(0) += e;
        }
        // Only factors of one operand's num can meet the other's negative exponents.
        let mut num_ds = Vec::new();
        let mut den_ds = Vec::new();
        for (x, y) in [(self, o), (o, self)] {
            if x.num.degree() > 0 {
                num_ds.extend(y.cyclo.iter().filter(|(_, e)| **e < 0).map(|(d, _)| *d));
            }
            if x.den.degree() > 0 {
                den_ds.extend(y.cyclo.iter().filter(|(_, e)| **e > 0).map(|(d, _)| *d));
            }
        }
        let mut out = ExactScalar {
            coeff: &self.coeff * &o.coeff,
            shift: self.shift + o.shift,
            cyclo,
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        };
        num_ds.sort_unstable();
        num_ds.dedup();
        den_ds.sort_unstable();
        den_ds.dedup();
        out.cancel_cyclo(&num_ds, &den_ds);
        if !(self.den.is_one() && o.den.is_one()) {
            out.cancel_gcd();
        }
        out
    }

    fn add_ref(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let shift = self.shift.min(o.shift);
        let mut cyclo = BTreeMap::new();
        for d in self.cyclo.keys().chain(o.cyclo.keys()) {
            let ea = self.cyclo.get(d).copied().unwrap_or(0);
            let eb = o.cyclo.get(d).copied().unwrap_or(0);
            let m = ea.min(eb);
            if m != 0 {
                cyclo.insert(*d, m);
            }
        }
        let l = self.coeff.denom().lcm(o.coeff.denom());
        let lift = |x: &Self| -> ZPoly {
            let k = x.coeff.numer() * (&l / x.coeff.denom());
            let mut p = x.num.scale(&k).shift_up((x.shift - shift) as usize);
            for (d, e) in &x.cyclo {
                let extra = e - cyclo.get(d).copied().unwrap_or(0);
                if extra > 0 {
                    p = p.mul(&expand(*d, extra));
                }
            }
            for (d, e) in &cyclo {
                if !x.cyclo.contains_key(d) && *e < 0 {
                    p = p.mul(&expand(*d, -e));
                }
            }
            p
        };
        let pa = lift(self);
        let pb = lift(o);
        let (num, den) = if self.den == o.den {
            (pa.add(&pb), self.den.clone())
        } else if self.den.is_one() {
            (pa.mul(&o.den).add(&pb), o.den.clone())
        } else if o.den.is_one() {
            (pa.add(&pb.mul(&self.den)), self.den.clone())
        } else {
            let g = self.den.gcd(&o.den);
            let da = self.den.div_exact(&g).expect("gcd divides");
            let db = o.den.div_exact(&g).expect("gcd divides");
            (pa.mul(&db).add(&pb.mul(&da)), self.den.mul(&db))
        };
        let mut out = ExactScalar { coeff: BigRational::new(BigInt::one(), l), shift, cyclo, num, den };
        out.normalize();
        out
    }

    /// Expanded canonical form `(c * N(t) * t^shift) / D(t)` with `N`, `D`
    /// integer polynomials, `D` primitive with positive leading coefficient.
    /// Returns the numerator as (exponent, coefficient) pairs and `D`'s
    /// coefficients, lowest degree first.
    pub fn expanded(&self) -> (Vec<(i64, BigInt)>, Vec<BigInt>) {
        if self.is_zero() {
            return (Vec::new(), vec![BigInt::one()]);
        }
        let mut n = self.num.clone();
        let mut d = self.den.clone();
        let mut shift = self.shift;
        for (k, e) in &self.cyclo {
            if *e > 0 {
                n = n.mul(&expand(*k, *e));
            } else {
                let phi = expand(*k, -e);
                d = d.mul(&phi);
            }
        }
        let v = d.valuation();
        d = d.strip_low(v);
        shift -= v as i64;
        let (c, dp) = d.primitive();
        let coeff = &self.coeff / BigRational::from_integer(c);
        // Clear the rational coefficient into the numerator / denominator.
        let nn = n.scale(coeff.numer());
        let dd = dp.scale(coeff.denom());
        let num: Vec<(i64, BigInt)> =
            nn.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as i64 + shift, c.clone())).collect();
        (num, dd.coeffs().to_vec())
    }

    /// The q -> 1 limit, when it is finite.
    pub fn eval_at_unity(&self) -> Result<BigRational> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let mut v = self.coeff.clone();
        for (d, e) in &self.cyclo {
            let p = cyclotomic_at_one(*d);
            if p == 0 {
                if *e > 0 {
                    return Ok(BigRational::zero());
                }
                return Err(Error::DenominatorVanishesAtUnity);
            }
            let pe = BigRational::from_integer(BigInt::from(p)).pow(*e);
            v *= pe;
        }
        let n1 = self.num.eval_at_one();
        let d1 = self.den.eval_at_one();
        if d1.is_zero() {
            return Err(Error::DenominatorVanishesAtUnity);
        }
        Ok(v * BigRational::new(n1, d1))
    }

    /// Value at a real `t` in double precision.
    pub fn eval_f64(&self, t: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let horner = |p: &ZPoly| -> f64 { p.coeffs().iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN)) };
        let mut v = self.coeff.to_f64().unwrap_or(f64::NAN) * t.powi(self.shift as i32);
        for (d, e) in &self.cyclo {
            v *= horner(&cyclotomic(*d)).powi(*e);
        }
        v * horner(&self.num) / horner(&self.den)
    }

    /// Value at `t` in the float backend.
    pub fn eval_float(&self, field: &super::FloatField) -> Result<super::FloatScalar> {
        if self.is_zero() {
            return Ok(field.zero());
        }
        let t = field.t();
        let horner = |p: &ZPoly| {
            p.coeffs()
                .iter()
                .rev()
                .fold(field.zero(), |acc, c| acc * &t + field.big_rational(&BigRational::from_integer(c.clone())))
        };
        let mut v = field.big_rational(&self.coeff) * t.powi(self.shift)?;
        for (d, e) in &self.cyclo {
            v = v * &horner(&cyclotomic(*d)).powi(*e as i64)?;
        }
        v = v * &horner(&self.num);
        v.try_div(&horner(&self.den))
    }
}

impl Scalar for ExactScalar {
    fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar {
            coeff: self.coeff.recip(),
            shift: -self.shift,
            cyclo: self.cyclo.iter().map(|(d, e)| (*d, -e)).collect(),
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    fn powi(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::from_rational(BigRational::one()));
        }
        if self.is_zero() {
            return if e > 0 { Ok(Self::zero()) } else { Err(Error::DivisionByZero) };
        }
        let b = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(ExactScalar {
            coeff: b.coeff.pow(k as i32),
            shift: b.shift * k as i64,
            cyclo: b.cyclo.iter().map(|(d, x)| (*d, x * k as i32)).collect(),
            num: b.num.pow(k as u32),
            den: b.den.pow(k as u32),
        })
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, o: &Self) -> bool {
        self.sub_ref(o).is_zero()
    }
}

impl ExactScalar {
    fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.clone().neg())
    }
}

impl Neg for ExactScalar {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.coeff = -self.coeff;
        self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                self.$f(&o)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &'a ExactScalar) -> ExactScalar {
                self.$f(o)
            }
        }
        impl<'a, 'b> $tr<&'b ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &'b ExactScalar) -> ExactScalar {
                self.$f(o)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

fn fmt_poly(terms: &[(i64, BigInt)], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (i, (e, c)) in terms.iter().rev().enumerate() {
        let mag = c.abs();
        if i == 0 {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        match *e {
            0 => write!(f, "{mag}")?,
            _ => {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                if *e == 1 {
                    write!(f, "t")?;
                } else {
                    write!(f, "t^{e}")?;
                }
            }
        }
    }
    Ok(())
}

/// Prints the expanded canonical form in `t = q^(1/4)`, e.g.
/// `(t^4 + 1)/(t^2)` prints as `t^2 + t^-2`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.expanded();
        if d.len() == 1 {
            // A constant denominator folds into the coefficients when it divides them.
            let dc = &d[0];
            if n.iter().all(|(_, c)| (c % dc).is_zero()) {
                let n: Vec<_> = n.iter().map(|(e, c)| (*e, c / dc)).collect();
                return fmt_poly(&n, f);
            }
        }
        write!(f, "(")?;
        fmt_poly(&n, f)?;
        write!(f, ")/(")?;
        let dt: Vec<(i64, BigInt)> =
            d.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as i64, c.clone())).collect();
        fmt_poly(&dt, f)?;
        write!(f, ")")
    }
}

/// Exact arithmetic in Q(q^(1/4)).
#[derive(Clone, Debug)]
pub struct ExactField {
    probe: f64,
}

impl Default for ExactField {
    fn default() -> Self {
        ExactField { probe: 0.7 }
    }
}

impl ExactField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the value of q used when an exact residual must be reported as a
    /// number.
    pub fn with_probe(q: f64) -> Self {
        ExactField { probe: q }
    }
}

impl QField for ExactField {
    type S = ExactScalar;

    fn is_exact(&self) -> bool {
        true
    }

    fn big_rational(&self, r: &BigRational) -> ExactScalar {
        ExactScalar::from_rational(r.clone())
    }

    fn rational(&self, r: Rat) -> ExactScalar {
        ExactScalar::from_rational(big(r))
    }

    fn monomial(&self, m: &Monomial) -> Result<ExactScalar> {
        ExactScalar::from_monomial(m)
    }

    fn magnitude(&self, x: &ExactScalar) -> f64 {
        x.eval_f64(self.probe.powf(0.25)).abs()
    }

    fn describe(&self) -> String {
        "exact".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> ExactField {
        ExactField::new()
    }

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn q_number_expansions() {
        let fl = f();
        assert_eq!(fl.q_number(r(1, 1)).unwrap().to_string(), "1");
        assert_eq!(fl.q_number(r(2, 1)).unwrap().to_string(), "t^2 + t^-2");
        assert_eq!(fl.q_number(r(1, 2)).unwrap().to_string(), "(t)/(t^2 + 1)");
        assert_eq!(fl.q_number(r(-3, 1)).unwrap().to_string(), "-t^4 - 1 - t^-4");
    }

    #[test]
    fn kappa_squared_times_c1() {
        let fl = f();
        let k = fl.kappa().unwrap();
        assert_eq!(k.to_string(), "t^2 - t^-2");
        let c1 = fl.q_pow(r(1, 2)).unwrap().try_div(&(k.clone() * &k)).unwrap();
        let back = c1 * &k * &k * &fl.q_pow(r(-1, 2)).unwrap();
        assert_eq!(back, fl.one());
    }

    #[test]
    fn sums_cancel_exactly() {
        let fl = f();
        // [2]^2 = [3] + [1]
        let two = fl.q_number(r(2, 1)).unwrap();
        let lhs = two.clone() * &two;
        let rhs = fl.q_number(r(3, 1)).unwrap() + fl.one();
        assert!((lhs - rhs).is_zero());
        // (1 - q^2) / (1 - q) = 1 + q
        let a = fl.one_minus_q_pow(r(2, 1)).unwrap().try_div(&fl.one_minus_q_pow(r(1, 1)).unwrap()).unwrap();
        assert_eq!(a, fl.one() + fl.q_pow(r(1, 1)).unwrap());
        assert_eq!(a, fl.one_plus_q_pow(r(1, 1)).unwrap());
    }

    #[test]
    fn rational_function_round_trip() {
        let fl = f();
        let x = fl.q_number(r(5, 2)).unwrap() + fl.int(3);
        let y = fl.q_number(r(7, 1)).unwrap() - fl.q_pow(r(3, 4)).unwrap();
        let z = x.try_div(&y).unwrap();
        assert_eq!(z * &y, x);
        assert!((x.clone() - &x).is_zero());
    }

    #[test]
    fn classical_limit() {
        let fl = f();
        assert_eq!(fl.q_number(r(7, 2)).unwrap().eval_at_unity().unwrap(), big(r(7, 2)));
        let ratio = fl.one_minus_q_pow(r(3, 1)).unwrap().try_div(&fl.one_minus_q_pow(r(1, 1)).unwrap()).unwrap();
        assert_eq!(ratio.eval_at_unity().unwrap(), big(r(3, 1)));
        assert_eq!(fl.kappa().unwrap().eval_at_unity().unwrap(), BigRational::zero());
        assert_eq!(fl.kappa().unwrap().inv().unwrap().eval_at_unity(), Err(Error::DenominatorVanishesAtUnity));
    }

    #[test]
    fn odd_quarter_exponents_are_rejected() {
        assert!(matches!(f().q_number(r(1, 4)), Err(Error::NonHalfIntegerExponent(_))));
        assert!(matches!(f().q_pow(r(1, 8)), Err(Error::NonHalfIntegerExponent(_))));
    }

    #[test]
    fn float_agreement() {
        let fl = f();
        let x = fl.q_number(r(9, 2)).unwrap() * &fl.one_minus_q_pow(r(-5, 2)).unwrap() + fl.one_plus_q_pow(r(3, 4)).unwrap();
        let t: f64 = 0.7f64.powf(0.25);
        let q: f64 = 0.7;
        let qn = |s: f64| (q.powf(s / 2.0) - q.powf(-s / 2.0)) / (q.sqrt() - 1.0 / q.sqrt());
        let want = qn(4.5) * (1.0 - q.powf(-2.5)) + (1.0 + q.powf(0.75));
        assert!((x.eval_f64(t) - want).abs() < 1e-12 * want.abs());
    }
}
