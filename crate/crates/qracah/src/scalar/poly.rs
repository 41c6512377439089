//! Dense univariate polynomials over the integers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Coefficients are stored lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ZPoly {
    c: Vec<BigInt>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        ZPoly { c: vec![BigInt::one()] }
    }

    pub fn from_coeffs(c: Vec<BigInt>) -> Self {
        let mut p = ZPoly { c };
        p.trim();
        p
    }

    pub fn monomial(coeff: BigInt, deg: usize) -> Self {
        if coeff.is_zero() {
            return ZPoly::zero();
        }
        let mut c = vec![BigInt::zero(); deg + 1];
        c[deg] = coeff;
        ZPoly { c }
    }

    fn trim(&mut self) {
        while matches!(self.c.last(), Some(x) if x.is_zero()) {
            self.c.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> &BigInt {
        self.c.last().expect("leading coefficient of zero polynomial")
    }

    pub fn add(&self, o: &ZPoly) -> ZPoly {
        let (long, short) = if self.c.len() >= o.c.len() { (self, o) } else { (o, self) };
        let mut c = long.c.clone();
        for (i, x) in short.c.iter().enumerate() {
            c[i] += x;
        }
        ZPoly::from_coeffs(c)
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &ZPoly) -> ZPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                if !y.is_zero() {
                    c[i + j] += x * y;
                }
            }
        }
        ZPoly::from_coeffs(c)
    }

    pub fn pow(&self, e: u32) -> ZPoly {
        let mut acc = ZPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> ZPoly {
        if k.is_zero() {
            return ZPoly::zero();
        }
        ZPoly { c: self.c.iter().map(|x| x * k).collect() }
    }

    /// Multiply by t^k.
    pub fn shift_up(&self, k: usize) -> ZPoly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.c.iter().cloned());
        ZPoly { c }
    }

    /// Number of leading zero coefficients from the bottom (the t-adic valuation).
    pub fn valuation(&self) -> usize {
        self.c.iter().take_while(|x| x.is_zero()).count()
    }

    pub fn strip_low(&self, k: usize) -> ZPoly {
        ZPoly { c: self.c[k..].to_vec() }
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in &self.c {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Splits into (signed content, primitive part with positive leading coefficient).
    pub fn primitive(&self) -> (BigInt, ZPoly) {
        if self.is_zero() {
            return (BigInt::zero(), ZPoly::zero());
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        if g.is_one() {
            return (g, self.clone());
        }
        let c = self.c.iter().map(|x| x / &g).collect();
        (g, ZPoly { c })
    }

    /// Quotient by a monic divisor when the division is exact.
    pub fn div_exact_monic(&self, m: &ZPoly) -> Option<ZPoly> {
        debug_assert!(m.lc().is_one());
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if self.c.len() < m.c.len() {
            return None;
        }
        let dm = m.c.len() - 1;
        let mut r = self.c.clone();
        let mut q = vec![BigInt::zero(); self.c.len() - dm];
        for i in (0..q.len()).rev() {
            let coef = std::mem::take(&mut r[i + dm]);
            if coef.is_zero() {
                continue;
            }
            for (j, mj) in m.c[..dm].iter().enumerate() {
                if !mj.is_zero() {
                    r[i + j] -= &coef * mj;
                }
            }
            q[i] = coef;
        }
        if r.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(ZPoly::from_coeffs(q))
    }

    /// Quotient over Z when the division is exact.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        if d.lc().is_one() {
            return self.div_exact_monic(d);
        }
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if self.c.len() < d.c.len() {
            return None;
        }
        let dd = d.c.len() - 1;
        let lc = d.lc().clone();
        let mut r = self.c.clone();
        let mut q = vec![BigInt::zero(); self.c.len() - dd];
        for i in (0..q.len()).rev() {
            let top = std::mem::take(&mut r[i + dd]);
            if top.is_zero() {
                continue;
            }
            let (coef, rem) = top.div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dj) in d.c[..dd].iter().enumerate() {
                if !dj.is_zero() {
                    r[i + j] -= &coef * dj;
                }
            }
            q[i] = coef;
        }
        if r.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(ZPoly::from_coeffs(q))
    }

    fn pseudo_rem(&self, d: &ZPoly) -> ZPoly {
        let mut r = self.clone();
        let dd = d.degree();
        let lc = d.lc().clone();
        while !r.is_zero() && r.degree() >= dd {
            let k = r.degree() - dd;
            let top = r.lc().clone();
            r = r.scale(&lc).sub(&d.scale(&top).shift_up(k));
        }
        r
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, o: &ZPoly) -> ZPoly {
        let (_, mut a) = self.primitive();
        let (_, mut b) = o.primitive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == 0 {
                return ZPoly::one();
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive().1;
        }
        a
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.c.iter().sum()
    }
}

fn divisors(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

pub(crate) fn divisors_of(n: u32) -> Vec<u32> {
    divisors(n)
}

/// Value of the d-th cyclotomic polynomial at t = 1.
pub(crate) fn cyclotomic_at_one(d: u32) -> u32 {
    if d == 1 {
        return 0;
    }
    let mut m = d;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            return if m == 1 { p } else { 1 };
        }
        p += 1;
    }
    m
}

type CycloCache = Mutex<HashMap<u32, Arc<ZPoly>>>;

pub(crate) fn cyclotomic(d: u32) -> Arc<ZPoly> {
    static CACHE: OnceLock<CycloCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return p.clone();
    }
    let mut p = ZPoly::monomial(BigInt::one(), d as usize).sub(&ZPoly::one());
    for e in divisors(d) {
        if e < d {
            p = p.div_exact_monic(&cyclotomic(e)).expect("cyclotomic factor");
        }
    }
    let p = Arc::new(p);
    cache.lock().unwrap().insert(d, p.clone());
    p
}
