//! q-numbers, q-factorials, both q-Pochhammer symbols and ratios of the
//! Gamma-tilde function.
//!
//! `Γ̃_q(x)` is never evaluated by itself. [`GammaProduct`] reduces every
//! argument `x` to `Γ̃_q(r) (r|q)_m` with `r` in `(0, 1]` and `m = x - r`
//! an integer; `Γ̃_q(1) = 1` and the remaining `Γ̃_q(r)` stay symbolic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{big, Monomial, QField, Scalar};
use crate::{Error, Rat, Result};

/// `[s]_q = (q^(s/2) - q^(-s/2)) / (q^(1/2) - q^(-1/2))`.
pub fn q_number<F: QField>(f: &F, s: Rat) -> Result<F::S> {
    f.q_number(s)
}

/// `[n]_q! = [1][2]...[n]`.
pub fn q_factorial<F: QField>(f: &F, n: i64) -> Result<F::S> {
    if n < 0 {
        return Err(Error::NegativeArgument(n));
    }
    f.monomial(&q_factorial_monomial(n))
}

pub(crate) fn q_factorial_monomial(n: i64) -> Monomial {
    let mut m = Monomial::one();
    for k in 2..=n {
        m.qnum(Rat::from(k), 1).expect("positive");
    }
    m
}

/// `(q^a; q)_k = (1 - q^a)(1 - q^(a+1))...(1 - q^(a+k-1))`.
pub fn q_pochhammer_basic<F: QField>(f: &F, a: Rat, k: i64) -> Result<F::S> {
    if k < 0 {
        return Err(Error::NegativeArgument(k));
    }
    let mut m = Monomial::one();
    for i in 0..k {
        m.one_minus(a + i, 1)?;
    }
    f.monomial(&m)
}

/// `(a|q)_k = [a][a+1]...[a+k-1]`.
pub fn q_pochhammer_nu<F: QField>(f: &F, a: Rat, k: i64) -> Result<F::S> {
    if k < 0 {
        return Err(Error::NegativeArgument(k));
    }
    let mut m = Monomial::one();
    for i in 0..k {
        m.qnum(a + i, 1)?;
    }
    f.monomial(&m)
}

/// `Γ̃_q(a + offset) / Γ̃_q(a)`.
pub fn gamma_tilde_ratio<F: QField>(f: &F, a: Rat, offset: i64) -> Result<F::S> {
    let mut m = Monomial::one();
    if offset >= 0 {
        for i in 0..offset {
            m.qnum(a + i, 1)?;
        }
    } else {
        for i in offset..0 {
            if (a + i).is_zero() {
                return Err(Error::PoleInRatio);
            }
            m.qnum(a + i, -1)?;
        }
    }
    f.monomial(&m)
}

/// A value multiplied by symbolic powers `Γ̃_q(r)^k`, `0 < r < 1`.
#[derive(Clone, Debug)]
pub struct GammaValue<S> {
    pub value: S,
    pub basis: BTreeMap<Rat, i64>,
}

impl<S: Scalar> GammaValue<S> {
    pub fn plain(value: S) -> Self {
        GammaValue { value, basis: BTreeMap::new() }
    }

    pub fn is_plain(&self) -> bool {
        self.basis.is_empty()
    }

    /// The value, provided no symbolic factor is left.
    pub fn into_plain(self) -> Result<S> {
        if self.basis.is_empty() || self.value.is_zero() {
            Ok(self.value)
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.value.is_zero() {
            return Ok(o.clone());
        }
        if o.value.is_zero() {
            return Ok(self.clone());
        }
        if self.basis != o.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(GammaValue { value: self.value.clone() + &o.value, basis: self.basis.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&GammaValue { value: -o.value.clone(), basis: o.basis.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut basis = self.basis.clone();
        for (r, k) in &o.basis {
            let e = basis.entry(*r).or_insert(0);
            *e += k;
            if *e == 0 {
                basis.remove(r);
            }
        }
        GammaValue { value: self.value.clone() * &o.value, basis }
    }

    pub fn scale(&self, s: &S) -> Self {
        GammaValue { value: self.value.clone() * s, basis: self.basis.clone() }
    }

    /// Quotient; the symbolic factors subtract.
    pub fn div(&self, o: &Self) -> Result<Self> {
        let inv = GammaValue { value: o.value.inv()?, basis: o.basis.iter().map(|(r, k)| (*r, -k)).collect() };
        Ok(self.mul(&inv))
    }
}

/// Builder for products of q-numbers, q-powers and `Γ̃_q` factors.
///
/// Arguments may carry an infinitesimal part `c ε`: a q-number `[c ε]` counts
/// as `c` times one power of `ε`, and the product is the `ε -> 0` limit.
/// Positive total order gives zero, negative order is a pole. Exact zeros
/// (`c = 0`) give zero; exact poles are an error.
#[derive(Clone, Debug)]
pub struct GammaProduct {
    mono: Monomial,
    basis: BTreeMap<Rat, i64>,
    order: i64,
    hard_zero: bool,
    hard_pole: bool,
}

impl Default for GammaProduct {
    fn default() -> Self {
        GammaProduct { mono: Monomial::one(), basis: BTreeMap::new(), order: 0, hard_zero: false, hard_pole: false }
    }
}

impl GammaProduct {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rational(mut self, r: Rat) -> Self {
        if r.is_zero() {
            self.hard_zero = true;
        } else {
            self.mono.scale(&big(r));
        }
        self
    }

    pub fn big_rational(mut self, r: &BigRational) -> Self {
        if r.is_zero() {
            self.hard_zero = true;
        } else {
            self.mono.scale(r);
        }
        self
    }

    pub fn sign(mut self, negative: bool) -> Self {
        if negative {
            self.mono.negate();
        }
        self
    }

    /// Multiplies by `(-1)^k` for an integer `k`.
    pub fn parity(self, k: i64) -> Self {
        self.sign(k.rem_euclid(2) == 1)
    }

    pub fn q_pow(mut self, e: Rat) -> Self {
        self.mono.q_pow(e);
        self
    }

    /// `[x + c ε]^pow`.
    pub fn qnum_eps(mut self, x: Rat, c: i64, pow: i64) -> Self {
        if pow == 0 {
            return self;
        }
        if x.is_zero() {
            if c == 0 {
                if pow > 0 {
                    self.hard_zero = true;
                } else {
                    self.hard_pole = true;
                }
            } else {
                let cb = BigRational::from_integer(BigInt::from(c));
                self.mono.scale(&num_traits::Pow::pow(&cb, pow as i32));
                self.order += pow;
            }
            return self;
        }
        self.mono.qnum(x, pow).expect("nonzero argument");
        self
    }

    pub fn qnum(self, x: Rat, pow: i64) -> Self {
        self.qnum_eps(x, 0, pow)
    }

    pub fn qnum_i(self, x: i64, pow: i64) -> Self {
        self.qnum(Rat::from(x), pow)
    }

    /// `(a|q)_k^pow`.
    pub fn poch(mut self, a: Rat, k: i64, pow: i64) -> Self {
        for i in 0..k {
            self = self.qnum(a + i, pow);
        }
        self
    }

    /// `([n]!)^pow`; a negative `n` is a pole of `Γ̃_q(n+1)`.
    pub fn factorial(self, n: i64, pow: i64) -> Self {
        self.gamma(Rat::from(n + 1), pow)
    }

    /// `(1 - q^x)^pow`; `x = 0` is an exact zero or pole.
    pub fn one_minus(mut self, x: Rat, pow: i64) -> Self {
        if pow == 0 {
            return self;
        }
        if x.is_zero() {
            if pow > 0 {
                self.hard_zero = true;
            } else {
                self.hard_pole = true;
            }
            return self;
        }
        self.mono.one_minus(x, pow).expect("nonzero exponent");
        self
    }

    pub fn one_plus(mut self, x: Rat, pow: i64) -> Self {
        self.mono.one_plus(x, pow);
        self
    }

    /// `Γ̃_q(x + c ε)^pow`.
    pub fn gamma_eps(mut self, x: Rat, c: i64, pow: i64) -> Self {
        if pow == 0 {
            return self;
        }
        let m = x.ceil().to_integer() - 1;
        let r = x - m;
        if r != Rat::one() {
            let e = self.basis.entry(r).or_insert(0);
            *e += pow;
            if *e == 0 {
                self.basis.remove(&r);
            }
        }
        if m >= 0 {
            for i in 0..m {
                self = self.qnum(r + i, pow);
            }
        } else {
            for i in 0..(-m) {
                self = self.qnum_eps(x + i, c, -pow);
            }
        }
        self
    }

    pub fn gamma(self, x: Rat, pow: i64) -> Self {
        self.gamma_eps(x, 0, pow)
    }

    pub fn gamma_i(self, x: i64, pow: i64) -> Self {
        self.gamma(Rat::from(x), pow)
    }

    pub fn mul(mut self, o: &GammaProduct) -> Self {
        self.mono.mul(&o.mono);
        for (r, k) in &o.basis {
            let e = self.basis.entry(*r).or_insert(0);
            *e += k;
            if *e == 0 {
                self.basis.remove(r);
            }
        }
        self.order += o.order;
        self.hard_zero |= o.hard_zero;
        self.hard_pole |= o.hard_pole;
        self
    }

    pub fn inv(&self) -> Self {
        GammaProduct {
            mono: if self.mono.is_zero() { Monomial::zero() } else { self.mono.inv().expect("nonzero") },
            basis: self.basis.iter().map(|(r, k)| (*r, -k)).collect(),
            order: -self.order,
            hard_zero: self.hard_pole,
            hard_pole: self.hard_zero,
        }
    }

    pub fn is_zero(&self) -> bool {
        !self.hard_pole && (self.hard_zero || self.order > 0 || self.mono.is_zero())
    }

    pub fn basis(&self) -> &BTreeMap<Rat, i64> {
        &self.basis
    }

    /// The rational-function part, ignoring symbolic factors.
    pub fn monomial(&self) -> Result<Monomial> {
        if self.hard_pole {
            return Err(Error::PoleInRatio);
        }
        if self.hard_zero {
            return Ok(Monomial::zero());
        }
        if self.order < 0 {
            return Err(Error::PoleInRatio);
        }
        if self.is_zero() {
            return Ok(Monomial::zero());
        }
        Ok(self.mono.clone())
    }

    pub fn eval<F: QField>(&self, f: &F) -> Result<GammaValue<F::S>> {
        let m = self.monomial()?;
        Ok(GammaValue { value: f.monomial(&m)?, basis: self.basis.clone() })
    }

    /// Evaluates a product that must not carry symbolic factors.
    pub fn eval_plain<F: QField>(&self, f: &F) -> Result<F::S> {
        let m = self.monomial()?;
        if m.is_zero() {
            return Ok(f.zero());
        }
        if !self.basis.is_empty() {
            return Err(Error::BasisMismatch);
        }
        f.monomial(&m)
    }
}

/// Classical rising factorial `(a)_k` over the rationals.
pub fn classical_pochhammer(a: &BigRational, k: i64) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc *= a + BigRational::from_integer(BigInt::from(i));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ExactField, ExactScalar};

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn examples() {
        let f = ExactField::new();
        assert!(q_number(&f, r(0, 1)).unwrap().is_zero());
        assert_eq!(q_number(&f, r(1, 1)).unwrap(), f.one());
        let want = f.q_pow(r(1, 2)).unwrap() + f.q_pow(r(-1, 2)).unwrap();
        assert_eq!(q_number(&f, r(2, 1)).unwrap(), want);
        assert_eq!(q_number(&f, r(-7, 2)).unwrap(), -q_number(&f, r(7, 2)).unwrap());
        assert_eq!(q_factorial(&f, 0).unwrap(), f.one());
        assert_eq!(q_factorial(&f, 1).unwrap(), f.one());
        let three = q_number(&f, r(2, 1)).unwrap() * &q_number(&f, r(3, 1)).unwrap();
        assert_eq!(q_factorial(&f, 3).unwrap(), three);
        assert_eq!(q_factorial(&f, -1).unwrap_err(), Error::NegativeArgument(-1));
        assert_eq!(q_pochhammer_basic(&f, r(3, 2), 0).unwrap(), f.one());
        assert!(q_pochhammer_basic(&f, r(0, 1), 1).unwrap().is_zero());
        assert!(q_pochhammer_basic(&f, r(-3, 1), 4).unwrap().is_zero());
        assert!(q_pochhammer_nu(&f, r(0, 1), 2).unwrap().is_zero());
        assert_eq!(q_pochhammer_nu(&f, r(5, 2), 0).unwrap(), f.one());
    }

    #[test]
    fn pochhammer_flavours_agree() {
        // (a|q)_k = (-1)^k (q^a;q)_k kappa^-k q^(-k(k-1)/4 - k a / 2)
        let f = ExactField::new();
        for a2 in -6..8 {
            for k in 0..5 {
                let a = r(a2, 2);
                let lhs = q_pochhammer_nu(&f, a, k).unwrap();
                let kappa = f.kappa().unwrap();
                let mut rhs = q_pochhammer_basic(&f, a, k).unwrap()
                    * &kappa.powi(-k).unwrap()
                    * &f.q_pow(r(-k * (k - 1), 4) - a * k / 2).unwrap();
                if k % 2 == 1 {
                    rhs = -rhs;
                }
                assert_eq!(lhs, rhs, "a = {a}, k = {k}");
            }
        }
    }

    #[test]
    fn gamma_ratios() {
        let f = ExactField::new();
        assert_eq!(gamma_tilde_ratio(&f, r(7, 2), 0).unwrap(), f.one());
        assert_eq!(gamma_tilde_ratio(&f, r(1, 1), 4).unwrap(), q_factorial(&f, 4).unwrap());
        assert_eq!(gamma_tilde_ratio(&f, r(2, 1), -2).unwrap_err(), Error::PoleInRatio);
        // Γ̃(A - s) = Γ̃(A) (-1)^s / (1 - A|q)_s with A = 5, s = 2
        let lhs = gamma_tilde_ratio(&f, r(5, 1), -2).unwrap();
        let rhs = q_pochhammer_nu(&f, r(-4, 1), 2).unwrap().inv().unwrap();
        assert_eq!(lhs, rhs);
        for a2 in [-7, -3, 1, 5, 9] {
            for j in -2..3 {
                for k in -2..3 {
                    let a = r(a2, 2);
                    let lhs = gamma_tilde_ratio(&f, a, j + k);
                    let rhs = gamma_tilde_ratio(&f, a, j).and_then(|x| Ok(x * &gamma_tilde_ratio(&f, a + j, k)?));
                    if let (Ok(l), Ok(r)) = (lhs, rhs) {
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn classical_limits() {
        let f = ExactField::new();
        let mut fact = BigInt::one();
        for n in 0..=12i64 {
            if n > 0 {
                fact *= n;
            }
            let v = q_factorial(&f, n).unwrap().eval_at_unity().unwrap();
            assert_eq!(v, BigRational::from_integer(fact.clone()));
        }
        for s2 in -40..=40 {
            let s = r(s2, 2);
            let x = q_number(&f, s).unwrap();
            let y = q_number(&f, -s).unwrap();
            assert_eq!(x.clone() * &y, -(x.clone() * &x));
            assert_eq!(x.eval_at_unity().unwrap(), big(s));
        }
    }

    #[test]
    fn gamma_product_regularization() {
        let f = ExactField::new();
        // Γ̃(ε) / Γ̃(2ε) -> 2
        let g = GammaProduct::new().gamma_eps(r(0, 1), 1, 1).gamma_eps(r(0, 1), 2, -1);
        assert_eq!(g.eval_plain(&f).unwrap(), f.int(2));
        // 1 / Γ̃(-2) = 0 exactly
        let z = GammaProduct::new().gamma_i(-2, -1).gamma(r(1, 2), 1);
        assert!(z.eval(&f).unwrap().value.is_zero());
        assert_eq!(GammaProduct::new().gamma_i(0, 1).eval_plain(&f).unwrap_err(), Error::PoleInRatio);
        // Γ̃(5/2) / Γ̃(-1/2) = [3/2][1/2][-1/2], symbolic parts cancel
        let g = GammaProduct::new().gamma(r(5, 2), 1).gamma(r(-1, 2), -1);
        let want: ExactScalar = q_pochhammer_nu(&f, r(-1, 2), 3).unwrap();
        assert_eq!(g.eval_plain(&f).unwrap(), want);
        let h = GammaProduct::new().gamma(r(5, 2), 1);
        assert_eq!(h.eval_plain(&f).unwrap_err(), Error::BasisMismatch);
    }
}
