//! 6j-symbols `{j1 j2 j12; j3 j j23}_q` of `U_q(su(2))` and the Racah
//! coefficients built from them.
//!
//! A symbol is `(-1)^φ sqrt(R) P`: a phase, a radicand `R` that is a rational
//! function of `q`, and a polynomial value `P`. [`parts`] returns these three
//! pieces over any [`QField`], so the same code gives float values
//! ([`sixj_value`]) and exact squares ([`sixj_squared_exact`]).
//!
//! The working assumptions are `j1 >= j2`, `j3 >= j2`, `|j - j3| <= j1 - j2`
//! and `|j - j1| <= j3 - j2`. Then `(j12, j23)` runs over the full rectangle
//! `[j1-j2, j1+j2] × [j3-j2, j3+j2]`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::qarith::GammaProduct;
use crate::qhyper::eval_f;
use crate::racah::{Family, Method, RacahParams};
use crate::scalar::{ExactField, ExactScalar, FloatField, FloatScalar, QField, Scalar};
use crate::{Error, Rat, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SixJ {
    pub j1: Rat,
    pub j2: Rat,
    pub j12: Rat,
    pub j3: Rat,
    pub j: Rat,
    pub j23: Rat,
}

fn half() -> Rat {
    Rat::new(1, 2)
}

fn int(x: Rat) -> i64 {
    debug_assert!(x.is_integer());
    x.to_integer()
}

impl SixJ {
    pub fn new(j1: Rat, j2: Rat, j12: Rat, j3: Rat, j: Rat, j23: Rat) -> Result<Self> {
        let sj = SixJ { j1, j2, j12, j3, j, j23 };
        sj.check()?;
        Ok(sj)
    }

    /// Builds a symbol from doubled momenta `2j`.
    pub fn from_doubled(d: [i64; 6]) -> Result<Self> {
        let h = |x: i64| Rat::new(x, 2);
        Self::new(h(d[0]), h(d[1]), h(d[2]), h(d[3]), h(d[4]), h(d[5]))
    }

    fn unchecked(j1: Rat, j2: Rat, j12: Rat, j3: Rat, j: Rat, j23: Rat) -> Self {
        SixJ { j1, j2, j12, j3, j, j23 }
    }

    pub fn check(&self) -> Result<()> {
        let SixJ { j1, j2, j12, j3, j, j23 } = *self;
        let bad = |m: String| Err(Error::TriangleViolation(format!("{self}: {m}")));
        for x in [j1, j2, j12, j3, j, j23] {
            if x < Rat::zero() || !(x * 2).is_integer() {
                return bad(format!("{x} is not a nonnegative half-integer"));
            }
        }
        if j1 < j2 || j3 < j2 {
            return bad("need j1 >= j2 and j3 >= j2".into());
        }
        if (j - j3).abs() > j1 - j2 || (j - j1).abs() > j3 - j2 {
            return bad("need |j-j3| <= j1-j2 and |j-j1| <= j3-j2".into());
        }
        if j23 < j3 - j2 || j23 > j2 + j3 || !(j23 - j3 + j2).is_integer() {
            return bad("j23 outside [j3-j2, j3+j2]".into());
        }
        if j12 < j1 - j2 || j12 > j1 + j2 || !(j12 - j1 + j2).is_integer() {
            return bad("j12 outside [j1-j2, j1+j2]".into());
        }
        if !(j1 + j + j23).is_integer() || !(j12 + j3 + j).is_integer() {
            return bad("j1+j+j23 and j12+j3+j must be integers".into());
        }
        Ok(())
    }

    pub fn outer(&self) -> Outer {
        Outer { j1: self.j1, j2: self.j2, j3: self.j3, j: self.j }
    }

    /// `{j1 j2 j12; j3 j j23} -> {j3 j2 j23; j1 j j12}`.
    pub fn swapped(&self) -> SixJ {
        SixJ::unchecked(self.j3, self.j2, self.j23, self.j1, self.j, self.j12)
    }

    /// Parameters `(a, b, α, β)`, degree and variable of the polynomial
    /// behind the symbol: `s = j23`, `a = j3-j2`, `b = j2+j3+1`,
    /// `α = j1-j2-j3+j`, `β = j1-j2+j3-j`, `n = j12-j1+j2` for `u` and
    /// `n = j1+j2-j12` for `ũ`.
    pub fn racah_params(&self, family: Family) -> (RacahParams, i64, Rat) {
        let SixJ { j1, j2, j12, j3, j, j23 } = *self;
        let p = RacahParams { a: j3 - j2, b: j2 + j3 + 1, alpha: j1 - j2 - j3 + j, beta: j1 - j2 + j3 - j, family };
        let n = match family {
            Family::U => int(j12 - j1 + j2),
            Family::UTilde => int(j1 + j2 - j12),
        };
        (p, n, j23)
    }
}

impl fmt::Display for SixJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} {} {}; {} {} {}}}", self.j1, self.j2, self.j12, self.j3, self.j, self.j23)
    }
}

impl FromStr for SixJ {
    type Err = Error;

    /// Six rationals separated by commas, semicolons, spaces or braces, in the
    /// order `j1 j2 j12 j3 j j23`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace() || c == '{' || c == '}')
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 6 {
            return Err(Error::TriangleViolation(format!("expected six momenta, got '{s}'")));
        }
        let mut v = [Rat::zero(); 6];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| Error::TriangleViolation(format!("cannot parse '{p}'")))?;
        }
        SixJ::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }
}

/// The fixed momenta `(j1, j2, j3, j)` of a recoupling matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outer {
    pub j1: Rat,
    pub j2: Rat,
    pub j3: Rat,
    pub j: Rat,
}

impl Outer {
    pub fn j12_range(&self) -> Vec<Rat> {
        (0..=int(self.j2 * 2)).map(|i| self.j1 - self.j2 + i).collect()
    }

    pub fn j23_range(&self) -> Vec<Rat> {
        (0..=int(self.j2 * 2)).map(|i| self.j3 - self.j2 + i).collect()
    }

    pub fn symbol(&self, j12: Rat, j23: Rat) -> Result<SixJ> {
        SixJ::new(self.j1, self.j2, j12, self.j3, self.j, j23)
    }

    pub fn contains(&self, j12: Rat, j23: Rat) -> bool {
        self.j2 >= Rat::zero()
            && j12 >= self.j1 - self.j2
            && j12 <= self.j1 + self.j2
            && j23 >= self.j3 - self.j2
            && j23 <= self.j3 + self.j2
    }

    pub fn symbols(&self) -> Vec<SixJ> {
        let mut out = Vec::new();
        for j12 in self.j12_range() {
            for j23 in self.j23_range() {
                out.extend(self.symbol(j12, j23));
            }
        }
        out
    }
}

fn outer_candidates(jmax: Rat) -> Vec<Outer> {
    let top = int(jmax * 2);
    let vals: Vec<Rat> = (0..=top).map(|k| Rat::new(k, 2)).collect();
    let mut out = Vec::new();
    for &j1 in &vals {
        for &j2 in &vals {
            for &j3 in &vals {
                for &j in &vals {
                    if j1 < j2 || j3 < j2 || (j - j3).abs() > j1 - j2 || (j - j1).abs() > j3 - j2 {
                        continue;
                    }
                    if !(j1 + j2 + j3 + j).is_integer() {
                        continue;
                    }
                    out.push(Outer { j1, j2, j3, j });
                }
            }
        }
    }
    out
}

/// Outer tuples whose whole `(j12, j23)` rectangle has every momentum at
/// most `jmax`.
pub fn outer_tuples(jmax: Rat) -> Vec<Outer> {
    outer_candidates(jmax).into_iter().filter(|o| o.j1 + o.j2 <= jmax && o.j3 + o.j2 <= jmax).collect()
}

/// All admissible symbols with every momentum at most `jmax`, in
/// lexicographic order of `(j1, j2, j3, j, j12, j23)`.
pub fn admissible_symbols(jmax: Rat) -> Vec<SixJ> {
    let mut out = Vec::new();
    for o in outer_candidates(jmax) {
        for sj in o.symbols() {
            if sj.j12 <= jmax && sj.j23 <= jmax {
                out.push(sj);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// Weight, norm and value of `u_n` with `n = j12-j1+j2`.
    ViaU,
    /// Weight, norm and value of `ũ_n` with `n = j1+j2-j12`.
    ViaUTilde,
    /// Single sum obtained from the explicit formula for `u_n`.
    Explicit,
    /// Single sum obtained from the explicit formula for `ũ_n`.
    ExplicitTilde,
}

impl Route {
    pub const ALL: [Route; 4] = [Route::ViaU, Route::ViaUTilde, Route::Explicit, Route::ExplicitTilde];

    pub fn name(&self) -> &'static str {
        match self {
            Route::ViaU => "via-u",
            Route::ViaUTilde => "via-utilde",
            Route::Explicit => "explicit",
            Route::ExplicitTilde => "explicit-tilde",
        }
    }
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Route::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| format!("unknown route '{s}'"))
    }
}

/// Closed forms valid on part of the rectangle, and four `4F3`
/// representations valid everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// `j12 = j1 - j2`.
    MinJ12,
    /// `j12 = j1 + j2`.
    MaxJ12,
    /// `j23 = j3 - j2`.
    MinJ23,
    /// `j23 = j2 + j3`.
    MaxJ23,
    F1,
    F2,
    F3,
    F4,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 8] = [
        ClosedForm::MinJ12,
        ClosedForm::MaxJ12,
        ClosedForm::MinJ23,
        ClosedForm::MaxJ23,
        ClosedForm::F1,
        ClosedForm::F2,
        ClosedForm::F3,
        ClosedForm::F4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::MinJ12 => "min-j12",
            ClosedForm::MaxJ12 => "max-j12",
            ClosedForm::MinJ23 => "min-j23",
            ClosedForm::MaxJ23 => "max-j23",
            ClosedForm::F1 => "f1",
            ClosedForm::F2 => "f2",
            ClosedForm::F3 => "f3",
            ClosedForm::F4 => "f4",
        }
    }

    pub fn applies(&self, sj: &SixJ) -> bool {
        match self {
            ClosedForm::MinJ12 => sj.j12 == sj.j1 - sj.j2,
            ClosedForm::MaxJ12 => sj.j12 == sj.j1 + sj.j2,
            ClosedForm::MinJ23 => sj.j23 == sj.j3 - sj.j2,
            ClosedForm::MaxJ23 => sj.j23 == sj.j2 + sj.j3,
            _ => true,
        }
    }
}

/// `(-1)^φ sqrt(radicand) poly`.
#[derive(Clone, Debug)]
pub struct SixJParts<S> {
    pub negative: bool,
    pub radicand: S,
    pub poly: S,
}

impl<S: Scalar> SixJParts<S> {
    /// `radicand · poly²`.
    pub fn square(&self) -> S {
        self.radicand.clone() * &self.poly * &self.poly
    }
}

impl SixJParts<FloatScalar> {
    pub fn value(&self) -> Result<FloatScalar> {
        let v = self.radicand.sqrt()? * &self.poly;
        Ok(if self.negative { -v } else { v })
    }
}

impl SixJParts<ExactScalar> {
    /// Sign of the symbol at the field's `q`: `1`, `-1`, or `0`.
    pub fn sign_at(&self, f: &FloatField) -> Result<i8> {
        let p = self.poly.eval_float(f)?;
        if p.is_zero() {
            return Ok(0);
        }
        Ok(if p.is_negative() != self.negative { -1 } else { 1 })
    }
}

/// Product of `[x]!^pow`; a negative argument makes the product vanish.
#[derive(Default)]
struct Facts {
    g: GammaProduct,
    vanishes: bool,
}

impl Facts {
    fn new() -> Self {
        Self::default()
    }

    fn f(mut self, x: Rat, pow: i64) -> Self {
        let n = int(x);
        if n < 0 {
            self.vanishes = true;
        } else {
            self.g = self.g.factorial(n, pow);
        }
        self
    }

    fn num(self, xs: &[Rat]) -> Self {
        xs.iter().fold(self, |acc, &x| acc.f(x, 1))
    }

    fn den(self, xs: &[Rat]) -> Self {
        xs.iter().fold(self, |acc, &x| acc.f(x, -1))
    }

    /// A negative argument is an error here: prefactors are finite and
    /// nonzero on admissible symbols.
    fn eval_strict<F: QField>(self, f: &F, sj: &SixJ) -> Result<F::S> {
        if self.vanishes {
            return Err(Error::TriangleViolation(format!("{sj}: negative factorial argument")));
        }
        self.g.eval_plain(f)
    }
}

fn parity(x: Rat) -> bool {
    int(x).rem_euclid(2) == 1
}

/// Phase, radicand and polynomial value of the symbol along `route`.
pub fn parts<F: QField>(f: &F, sj: &SixJ, route: Route) -> Result<SixJParts<F::S>> {
    sj.check()?;
    let SixJ { j1, j2, j12, j3, j, j23 } = *sj;
    match route {
        Route::ViaU | Route::ViaUTilde => {
            let family = if route == Route::ViaU { Family::U } else { Family::UTilde };
            let (p, n, s) = sj.racah_params(family);
            let radicand = p.rho_product(s).mul(&p.d2_product(n).inv()).qnum(j12 * 2 + 1, -1).eval_plain(f)?;
            let poly = p.eval(f, n, s, Method::Hypergeometric)?;
            let negative = if route == Route::ViaU { parity(j1 + j23 + j) } else { parity(j12 + j3 + j) };
            Ok(SixJParts { negative, radicand, poly })
        }
        Route::Explicit => {
            let radicand = Facts::new()
                .num(&[j23 + j2 - j3, j23 + j2 + j3 + 1, j23 + j - j1, j2 + j3 - j23])
                .den(&[j23 + j3 - j2, j23 + j1 - j, j23 + j1 + j + 1, j1 + j - j23])
                .num(&[j12 - j1 + j2, j1 - j2 + j12, j1 + j2 - j12, j3 - j12 + j])
                .den(&[j12 - j3 + j, j12 + j3 - j, j1 + j2 + j12 + 1, j12 + j3 + j + 1])
                .eval_strict(f, sj)?;
            let mut poly = f.zero();
            for k in 0..=int(j12 - j1 + j2) {
                let kr = Rat::from(k);
                let term = Facts::new()
                    .num(&[kr + j23 + j3 - j2, j23 * 2 + k - j12 + j1 - j2, kr + j23 + j1 - j, kr + j23 + j1 + j + 1])
                    .num(&[j + j2 + j12 - j23 - k])
                    .den(&[kr, j12 - j1 + j2 - k, j23 * 2 + 1 + k, kr + j23 + j1 - j12 - j3])
                    .den(&[kr + j23 + j1 - j12 + j3 + 1, kr + j23 + j - j2 - j12, j2 + j3 - j23 - k]);
                if term.vanishes {
                    continue;
                }
                let g = term.g.qnum(kr * 2 + j1 - j2 - j12 + j23 * 2 + 1, 1).parity(k);
                poly = poly + g.eval_plain(f)?;
            }
            Ok(SixJParts { negative: parity(j1 + j23 + j), radicand, poly })
        }
        Route::ExplicitTilde => {
            let radicand = Facts::new()
                .num(&[j23 + j1 + j + 1, j1 - j23 + j, j2 - j3 + j23, j2 + j3 + j23 + 1])
                .den(&[j23 - j2 + j3, j23 + j - j1, j3 + j - j12, j1 + j2 + j12 + 1])
                .num(&[j1 + j23 - j, j2 + j3 - j23, j1 + j2 - j12, j2 + j12 - j1])
                .num(&[j + j12 - j3, j12 + j3 + j + 1, j1 - j2 + j12, j12 + j3 - j])
                .eval_strict(f, sj)?;
            let mut poly = f.zero();
            for l in 0..=int(j1 + j2 - j12) {
                let lr = Rat::from(l);
                let term = Facts::new()
                    .num(&[j23 * 2 + l - j1 - j2 + j12, j23 + l - j2 + j3, j + j23 + l - j1])
                    .den(&[lr, j1 + j2 - j12 - l, j23 * 2 + l + 1, j23 - j1 + j12 + l - j3])
                    .den(&[j2 + j3 - j23 - l, lr + j12 - j2 + j + j23 + 1, j1 + j - j23 - l])
                    .den(&[j12 + j3 + j23 + l + 1 - j1, j12 - j2 - j + j23 + l]);
                if term.vanishes {
                    continue;
                }
                let g = term.g.qnum(j23 * 2 + l * 2 - j1 - j2 + j12 + 1, 1).parity(l);
                poly = poly + g.eval_plain(f)?;
            }
            Ok(SixJParts { negative: parity(j1 + j2 + j3 + j), radicand, poly })
        }
    }
}

/// Phase, radicand and value of a closed form.
pub fn closed_form_parts<F: QField>(f: &F, sj: &SixJ, form: ClosedForm) -> Result<SixJParts<F::S>> {
    sj.check()?;
    if !form.applies(sj) {
        return Err(Error::InadmissibleParams(format!("{form:?} does not apply to {sj}")));
    }
    let SixJ { j1, j2, j12, j3, j, j23 } = *sj;
    let s = j23;
    let one = f.one();
    // every F-form carries the j23 factor A and the j12 factor B
    let a_u = || {
        Facts::new().num(&[j1 + j + j23 + 1, j1 + j - j23, j1 - j + j23, j3 - j2 + j23]).den(&[
            j - j1 + j23,
            j3 + j2 - j23,
            j2 - j3 + j23,
            j2 + j3 + j23 + 1,
        ])
    };
    let a_t = || {
        Facts::new().num(&[j - j1 + j23, j3 - j2 + j23]).den(&[
            j1 + j + j23 + 1,
            j1 + j - j23,
            j2 - j3 + j23,
            j2 + j3 + j23 + 1,
            j1 - j + j23,
        ])
    };
    let (negative, radicand, poly) = match form {
        ClosedForm::MinJ12 => {
            let r = Facts::new()
                .num(&[j1 + j + s + 1, j1 + j - s, j1 - j + s, j3 - j2 + s])
                .den(&[j - j1 + s, j3 + j2 - s, j2 - j3 + s, j2 + j3 + s + 1])
                .num(&[j1 * 2 - j2 * 2, j2 * 2, j2 + j3 + j - j1])
                .den(&[j1 * 2 + 1, j1 + j3 - j2 - j, j1 - j3 - j2 + j, j1 + j3 - j2 + j + 1]);
            (parity(j + j1 + s), r.eval_strict(f, sj)?, one)
        }
        ClosedForm::MaxJ12 => {
            let r = Facts::new()
                .num(&[j1 * 2, j2 * 2, j1 + j2 + j3 + j + 1, j1 + j2 - j3 + j, j1 + j2 + j3 - j])
                .den(&[j1 * 2 + j2 * 2 + 1, j3 + j - j1 - j2, j2 + j3 + s + 1])
                .num(&[s - j1 + j, s - j2 + j3])
                .den(&[j1 + j - s, j1 - j + s, j1 + j + s + 1, j2 + j3 - s, j2 - j3 + s]);
            (parity(j1 + j2 + j3 + j), r.eval_strict(f, sj)?, one)
        }
        ClosedForm::MinJ23 => {
            let r = Facts::new()
                .num(&[j3 * 2 - j2 * 2, j1 + j2 - j3 + j, j2 * 2, j12 + j3 - j, j12 + j3 + j + 1, j1 - j2 + j12, j3 - j12 + j])
                .den(&[j3 * 2 + 1, j3 - j1 - j2 + j, j12 - j3 + j, j1 + j2 + j12 + 1])
                .den(&[j12 - j1 + j2, j1 + j2 - j12, j1 - j2 + j3 - j, j1 - j2 + j3 + j + 1]);
            (parity(j12 + j3 + j), r.eval_strict(f, sj)?, one)
        }
        ClosedForm::MaxJ23 => {
            let r = Facts::new()
                .num(&[j2 * 2, j12 - j3 + j, j2 - j1 + j3 + j, j3 * 2, j1 + j2 + j3 - j])
                .den(&[j1 + j2 - j12, j1 - j2 - j3 + j, j3 - j12 + j])
                .num(&[j1 - j2 + j12, j1 + j2 + j3 + j + 1])
                .den(&[j2 - j1 + j12, j2 * 2 + j3 * 2 + 1, j12 + j3 - j, j1 + j2 + j12 + 1, j12 + j3 + j + 1]);
            (parity(j1 + j2 + j3 + j), r.eval_strict(f, sj)?, one)
        }
        ClosedForm::F1 => {
            let r = Facts::new().num(&[j2 * 2, j2 * 2]).den(&[
                j1 - j2 + j3 - j,
                j1 - j2 + j3 - j,
                j1 - j2 + j3 + j + 1,
                j1 - j2 + j3 + j + 1,
            ]);
            let b = Facts::new().num(&[j12 + j1 - j2, j3 + j - j12, j3 + j12 - j, j3 + j12 + j + 1]).den(&[
                j12 - j1 + j2,
                j12 - j3 + j,
                j1 + j2 + j12 + 1,
                j1 + j2 - j12,
            ]);
            let rad = r.eval_strict(f, sj)? * &a_u().eval_strict(f, sj)? * &b.eval_strict(f, sj)?;
            let poly = eval_f(
                f,
                &[j1 - j2 - j12, j1 - j2 + j12 + 1, j3 - j2 - j23, j23 + j3 - j2 + 1],
                &[-j2 * 2, j1 - j2 + j3 - j + 1, j1 - j2 + j3 + j + 2],
                &one,
            )?;
            (parity(j12 + j23 + j2 + j), rad, poly)
        }
        ClosedForm::F2 => {
            let r = Facts::new()
                .num(&[j2 * 2, j2 * 2, j2 + j3 - j1 + j, j2 + j3 - j1 + j])
                .den(&[j1 - j2 - j3 + j, j1 - j2 - j3 + j]);
            let b = Facts::new().num(&[j12 + j1 - j2, j12 - j3 + j]).den(&[
                j12 - j1 + j2,
                j1 + j2 + j12 + 1,
                j1 + j2 - j12,
                j3 + j - j12,
                j12 + j3 - j,
                j3 + j12 + j + 1,
            ]);
            let rad = r.eval_strict(f, sj)? * &a_u().eval_strict(f, sj)? * &b.eval_strict(f, sj)?;
            let poly = eval_f(
                f,
                &[j1 - j2 - j12, j1 - j2 + j12 + 1, j23 - j3 - j2, -j23 - j3 - j2 - 1],
                &[-j2 * 2, j1 - j2 - j3 + j + 1, j1 - j2 - j3 - j],
                &one,
            )?;
            (parity(j1 + j23 + j), rad, poly)
        }
        ClosedForm::F3 => {
            let r = Facts::new()
                .num(&[j2 * 2, j2 * 2, j1 + j2 - j3 + j, j1 + j2 - j3 + j])
                .den(&[j3 - j2 - j1 + j, j3 - j2 - j1 + j]);
            let b = Facts::new().num(&[j3 - j12 + j, j12 + j3 - j, j3 + j12 + j + 1, j1 - j2 + j12]).den(&[
                j3 + j2 - j23,
                j1 + j2 - j12,
                j2 - j1 + j12,
                j12 - j3 + j,
                j1 + j2 + j12 + 1,
            ]);
            let rad = r.eval_strict(f, sj)? * &a_t().eval_strict(f, sj)? * &b.eval_strict(f, sj)?;
            let poly = eval_f(
                f,
                &[j12 - j1 - j2, -j1 - j2 - j12 - 1, j3 - j2 - j23, j23 + j3 - j2 + 1],
                &[-j2 * 2, j3 - j1 - j2 + j + 1, j3 - j1 - j2 - j],
                &one,
            )?;
            (parity(j12 + j3 + j), rad, poly)
        }
        ClosedForm::F4 => {
            let r = Facts::new()
                .num(&[j2 * 2, j2 * 2, j1 + j2 + j3 + j + 1, j1 + j2 + j3 + j + 1, j1 + j2 + j3 - j, j1 + j2 + j3 - j])
                .den(&[j3 + j2 - j23, j1 + j2 - j12]);
            let b = Facts::new().num(&[j12 - j3 + j, j12 + j1 - j2]).den(&[
                j3 - j12 + j,
                j12 + j3 - j,
                j1 + j2 + j12 + 1,
                j2 - j1 + j12,
                j3 + j12 + j + 1,
            ]);
            let rad = r.eval_strict(f, sj)? * &a_t().eval_strict(f, sj)? * &b.eval_strict(f, sj)?;
            let poly = eval_f(
                f,
                &[j12 - j1 - j2, -j1 - j2 - j12 - 1, -j3 - j2 - j23 - 1, j23 - j3 - j2],
                &[-j2 * 2, -j1 - j2 - j3 - j - 1, j - j1 - j2 - j3],
                &one,
            )?;
            (parity(j1 + j2 + j3 + j), rad, poly)
        }
    };
    Ok(SixJParts { negative, radicand, poly })
}

/// The symbol at the field's `q`.
pub fn sixj_value(f: &FloatField, sj: &SixJ, route: Route) -> Result<FloatScalar> {
    parts(f, sj, route)?.value()
}

/// The exact square as a rational function of `t = q^(1/4)`, and the sign of
/// the symbol at the `q` of `at`.
pub fn sixj_squared_exact(sj: &SixJ, route: Route, at: &FloatField) -> Result<(ExactScalar, i8)> {
    let p = parts(&ExactField::new(), sj, route)?;
    Ok((p.square(), p.sign_at(at)?))
}

/// `U_q = (-1)^(j1+j2+j3+j) sqrt([2j12+1][2j23+1]) {6j}`.
pub fn racah_coefficient_u(f: &FloatField, sj: &SixJ, route: Route) -> Result<FloatScalar> {
    let w = f.q_number(sj.j12 * 2 + 1)? * &f.q_number(sj.j23 * 2 + 1)?;
    let v = w.sqrt()? * &sixj_value(f, sj, route)?;
    Ok(if parity(sj.j1 + sj.j2 + sj.j3 + sj.j) { -v } else { v })
}

/// `{j1 j2 j12; j3 j j23} - {j3 j2 j23; j1 j j12}`.
pub fn sixj_symmetry_residual(f: &FloatField, sj: &SixJ, route: Route) -> Result<FloatScalar> {
    Ok(sixj_value(f, sj, route)? - sixj_value(f, &sj.swapped(), route)?)
}

/// Classical (`q = 1`) symbol from the Racah single-sum formula, in exact
/// rationals: returns the square and the sign.
pub fn classical_sixj_squared(sj: &SixJ) -> (BigRational, i8) {
    let SixJ { j1: a, j2: b, j12: c, j3: d, j: e, j23: ff } = *sj;
    let fact = |x: Rat| -> BigInt { (1..=int(x)).map(BigInt::from).product() };
    let delta2 = |x: Rat, y: Rat, z: Rat| -> BigRational {
        BigRational::new(fact(x + y - z) * fact(x - y + z) * fact(-x + y + z), fact(x + y + z + 1))
    };
    let tri = delta2(a, b, c) * delta2(a, e, ff) * delta2(d, b, ff) * delta2(d, e, c);
    let lo = [a + b + c, a + e + ff, d + b + ff, d + e + c].into_iter().max().unwrap();
    let hi = [a + b + d + e, a + c + d + ff, b + c + e + ff].into_iter().min().unwrap();
    let mut sum = BigRational::zero();
    let mut t = lo;
    while t <= hi {
        let num = fact(t + 1);
        let den = fact(t - a - b - c)
            * fact(t - a - e - ff)
            * fact(t - d - b - ff)
            * fact(t - d - e - c)
            * fact(a + b + d + e - t)
            * fact(a + c + d + ff - t)
            * fact(b + c + e + ff - t);
        let term = BigRational::new(num, den);
        if parity(t) {
            sum -= term;
        } else {
            sum += term;
        }
        t += 1;
    }
    let sign = if sum.is_zero() {
        0
    } else if sum.is_negative() {
        -1
    } else {
        1
    };
    (tri * &sum * &sum, sign)
}

/// All symbols of one outer tuple, evaluated once.
#[derive(Clone, Debug)]
pub struct SixJGrid {
    pub outer: Outer,
    values: HashMap<(Rat, Rat), FloatScalar>,
}

impl SixJGrid {
    pub fn new(f: &FloatField, outer: Outer, route: Route) -> Result<Self> {
        let mut values = HashMap::new();
        for sj in outer.symbols() {
            values.insert((sj.j12, sj.j23), sixj_value(f, &sj, route)?);
        }
        Ok(SixJGrid { outer, values })
    }

    pub fn get(&self, j12: Rat, j23: Rat) -> Option<&FloatScalar> {
        self.values.get(&(j12, j23))
    }

    /// `max |sum_(j23) U(j12,j23) U(j12',j23) - δ|` and the same over `j12`.
    pub fn unitarity_deviation(&self, f: &FloatField) -> Result<(f64, f64)> {
        let o = self.outer;
        let mut u = HashMap::new();
        for (&(j12, j23), v) in &self.values {
            let w = (f.q_number(j12 * 2 + 1)? * &f.q_number(j23 * 2 + 1)?).sqrt()? * v;
            u.insert((j12, j23), if parity(o.j1 + o.j2 + o.j3 + o.j) { -w } else { w });
        }
        let dev = |rows: &[Rat], cols: &[Rat], by_row: bool| -> f64 {
            let mut worst: f64 = 0.0;
            for &x in rows {
                for &y in rows {
                    let mut sum = f.zero();
                    for &z in cols {
                        let (k1, k2) = if by_row { ((x, z), (y, z)) } else { ((z, x), (z, y)) };
                        sum = sum + u[&k1].clone() * &u[&k2];
                    }
                    if x == y {
                        sum = sum - f.one();
                    }
                    worst = worst.max(sum.to_f64().abs());
                }
            }
            worst
        };
        let (r, c) = (o.j12_range(), o.j23_range());
        Ok((dev(&r, &c, true), dev(&c, &r, false)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Recurrence {
    /// Three-term recurrence in `j23`.
    J23,
    /// Three-term recurrence in `j12`.
    J12,
    /// Forward difference formula, `(j1, j2) -> (j1+1/2, j2-1/2)`.
    Forward,
    /// Companion of [`Recurrence::Forward`] lowering back.
    Lowering,
    /// Forward difference formula on the `ũ` route, `(j1, j2) -> (j1-1/2, j2-1/2)`.
    ForwardTilde,
    LoweringTilde,
    /// Mixed recurrences linking `j23 ± 1` with `j12 + 1`.
    Mixed1,
    Mixed2,
    /// Mixed recurrences linking `j23 ± 1` with `j12 - 1`.
    Mixed1Tilde,
    Mixed2Tilde,
}

impl Recurrence {
    pub const ALL: [Recurrence; 10] = [
        Recurrence::J23,
        Recurrence::J12,
        Recurrence::Forward,
        Recurrence::Lowering,
        Recurrence::ForwardTilde,
        Recurrence::LoweringTilde,
        Recurrence::Mixed1,
        Recurrence::Mixed2,
        Recurrence::Mixed1Tilde,
        Recurrence::Mixed2Tilde,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Recurrence::J23 => "ttrr-j23",
            Recurrence::J12 => "ttrr-j12",
            Recurrence::Forward => "forward",
            Recurrence::Lowering => "lowering",
            Recurrence::ForwardTilde => "forward-tilde",
            Recurrence::LoweringTilde => "lowering-tilde",
            Recurrence::Mixed1 => "mixed-1",
            Recurrence::Mixed2 => "mixed-2",
            Recurrence::Mixed1Tilde => "mixed-1-tilde",
            Recurrence::Mixed2Tilde => "mixed-2-tilde",
        }
    }
}

/// Residual of one recurrence: `|value|` and the sum of the magnitudes that
/// went into it, for a relative measure.
#[derive(Clone, Debug)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value
        } else {
            self.value / self.scale
        }
    }
}

/// The grids needed by every recurrence of one outer tuple: the tuple itself
/// and, for `j2 >= 1/2`, the tuples `(j1 ± 1/2, j2 - 1/2, j3, j)`.
pub struct RecurrenceSweep<'a> {
    f: &'a FloatField,
    main: SixJGrid,
    up: Option<SixJGrid>,
    down: Option<SixJGrid>,
    sigma: RacahParams,
    sigma_t: RacahParams,
}

fn qprod(xs: &[Rat]) -> GammaProduct {
    xs.iter().fold(GammaProduct::new(), |g, &x| g.qnum(x, 1))
}

/// A value with the sum of the magnitudes that were combined to form it.
#[derive(Clone)]
struct Bounded {
    v: FloatScalar,
    m: FloatScalar,
}

impl Bounded {
    fn exact(v: FloatScalar) -> Self {
        let m = v.abs();
        Bounded { v, m }
    }
}

impl Add for Bounded {
    type Output = Bounded;
    fn add(self, o: Bounded) -> Bounded {
        Bounded { v: self.v + &o.v, m: self.m + &o.m }
    }
}

impl Sub for Bounded {
    type Output = Bounded;
    fn sub(self, o: Bounded) -> Bounded {
        Bounded { v: self.v - &o.v, m: self.m + &o.m }
    }
}

impl Mul for Bounded {
    type Output = Bounded;
    fn mul(self, o: Bounded) -> Bounded {
        Bounded { v: self.v * &o.v, m: self.m * &o.m }
    }
}

enum Which {
    Main,
    Up,
    Down,
}

impl<'a> RecurrenceSweep<'a> {
    pub fn new(f: &'a FloatField, outer: Outer, route: Route) -> Result<Self> {
        let main = SixJGrid::new(f, outer, route)?;
        let h = half();
        let (up, down) = if outer.j2 >= h {
            let up = Outer { j1: outer.j1 + h, j2: outer.j2 - h, ..outer };
            let down = Outer { j1: outer.j1 - h, j2: outer.j2 - h, ..outer };
            (Some(SixJGrid::new(f, up, route)?), Some(SixJGrid::new(f, down, route)?))
        } else {
            (None, None)
        };
        let sj = SixJ::unchecked(outer.j1, outer.j2, outer.j1 - outer.j2, outer.j3, outer.j, outer.j3 - outer.j2);
        let (sigma, _, _) = sj.racah_params(Family::U);
        let (sigma_t, _, _) = sj.racah_params(Family::UTilde);
        Ok(RecurrenceSweep { f, main, up, down, sigma, sigma_t })
    }

    pub fn grid(&self) -> &SixJGrid {
        &self.main
    }

    fn sig(&self, x: Rat) -> Result<FloatScalar> {
        self.sigma.sigma_product(x).eval_plain(self.f)
    }

    fn sigt(&self, x: Rat) -> Result<FloatScalar> {
        self.sigma_t.sigma_product(x).eval_plain(self.f)
    }

    /// `coef · {..}`; `None` if the symbol lies outside its rectangle while
    /// its coefficient does not vanish identically.
    fn term(&self, coef: &GammaProduct, sqrt: bool, which: Which, j12: Rat, j23: Rat) -> Result<Option<Bounded>> {
        let grid = match which {
            Which::Main => Some(&self.main),
            Which::Up => self.up.as_ref(),
            Which::Down => self.down.as_ref(),
        };
        let value = grid.and_then(|g| g.get(j12, j23));
        if coef.is_zero() {
            return Ok(Some(Bounded::exact(self.f.zero())));
        }
        let Some(v) = value else { return Ok(None) };
        let c = coef.eval_plain(self.f)?;
        let c = if sqrt { c.abs().sqrt()? } else { c };
        Ok(Some(Bounded::exact(c * v)))
    }

    fn root(&self, coef: &GammaProduct) -> Result<Bounded> {
        if coef.is_zero() {
            return Ok(Bounded::exact(self.f.zero()));
        }
        Ok(Bounded::exact(coef.eval_plain(self.f)?.abs().sqrt()?))
    }

    fn a_minus(j1: Rat, j2: Rat, j3: Rat, j: Rat, j23: Rat) -> GammaProduct {
        qprod(&[
            j + j23 + j1 + 1,
            j + j23 - j1,
            j - j23 + j1 + 1,
            j23 - j + j1,
            j2 + j3 + j23 + 1,
            j2 + j3 - j23 + 1,
            j3 - j2 + j23,
            j2 - j3 + j23,
        ])
    }

    fn a_plus(j1: Rat, j2: Rat, j3: Rat, j: Rat, j23: Rat) -> GammaProduct {
        qprod(&[
            j + j23 + j1 + 2,
            j + j23 - j1 + 1,
            j - j23 + j1,
            j23 - j + j1 + 1,
            j2 + j3 + j23 + 2,
            j2 + j3 - j23,
            j3 - j2 + j23 + 1,
            j2 - j3 + j23 + 1,
        ])
    }

    fn at_minus(j1: Rat, j2: Rat, j3: Rat, j: Rat, j12: Rat) -> GammaProduct {
        qprod(&[
            j2 - j1 + j12,
            j1 - j2 + j12,
            j12 - j3 + j,
            j12 + j3 - j,
            j1 + j2 + j12 + 1,
            j12 + j3 + j + 1,
            j1 + j2 - j12 + 1,
            j3 - j12 + j + 1,
        ])
    }

    fn at_plus(j1: Rat, j2: Rat, j3: Rat, j: Rat, j12: Rat) -> GammaProduct {
        qprod(&[
            j2 - j1 + j12 + 1,
            j1 - j2 + j12 + 1,
            j12 - j3 + j + 1,
            j12 + j3 - j + 1,
            j1 + j2 + j12 + 2,
            j12 + j3 + j + 2,
            j1 + j2 - j12,
            j3 - j12 + j,
        ])
    }

    /// `A^-(j23)`, `A^+(j23)` of the `j23` recurrence, squared, and
    /// `σ(j23) σ(-j23)`, `σ(j23+1) σ(-j23-1)` at the `u` parameters.
    pub fn a_identity<F: QField>(f: &F, sj: &SixJ) -> Result<[F::S; 4]> {
        let (p, _, _) = sj.racah_params(Family::U);
        let SixJ { j1, j2, j3, j, j23, .. } = *sj;
        let s = |x: Rat| p.sigma_product(x).eval_plain(f);
        Ok([
            Self::a_minus(j1, j2, j3, j, j23).eval_plain(f)?,
            s(j23)? * &s(-j23)?,
            Self::a_plus(j1, j2, j3, j, j23).eval_plain(f)?,
            s(j23 + 1)? * &s(-j23 - 1)?,
        ])
    }

    /// Residual of `rec` at `(j12, j23)`; `None` when the recurrence would
    /// need a symbol outside the rectangle with a nonvanishing coefficient.
    pub fn residual(&self, rec: Recurrence, j12: Rat, j23: Rat) -> Result<Option<Residual>> {
        let Outer { j1, j2, j3, j } = self.main.outer;
        let Some(v) = self.main.get(j12, j23).cloned() else {
            return Err(Error::TriangleViolation(format!("({j12}, {j23}) outside the rectangle")));
        };
        let v = Bounded::exact(v);
        let q = |x: Rat| -> Result<Bounded> { Ok(Bounded::exact(self.f.q_number(x)?)) };
        let sig = |x: Rat| -> Result<Bounded> { Ok(Bounded::exact(self.sig(x)?)) };
        let sigt = |x: Rat| -> Result<Bounded> { Ok(Bounded::exact(self.sigt(x)?)) };
        let h = half();
        let two = q(Rat::from(2))?;
        macro_rules! need {
            ($e:expr) => {
                match $e? {
                    Some(t) => t,
                    None => return Ok(None),
                }
            };
        }
        let total = match rec {
            Recurrence::J23 => {
                let wm = need!(self.term(&Self::a_minus(j1, j2, j3, j, j23), true, Which::Main, j12, j23 - 1));
                let wp = need!(self.term(&Self::a_plus(j1, j2, j3, j, j23), true, Which::Main, j12, j23 + 1));
                let mid = (q(j23 * 2)? * q(j1 * 2 + 2)? - two.clone() * q(j - j23 + j1 + 1)? * q(j + j23 - j1)?)
                    * (q(j2 * 2)? * q(j23 * 2 + 2)? - two.clone() * q(j3 - j2 + j23 + 1)? * q(j3 + j2 - j23)?)
                    - (q(j2 * 2)? * q(j1 * 2 + 2)? - two.clone() * q(j12 - j2 + j1 + 1)? * q(j12 + j2 - j1)?)
                        * q(j23 * 2 + 2)?
                        * q(j23 * 2)?;
                two.clone() * q(j23 * 2 + 2)? * wm + two * q(j23 * 2)? * wp - mid * q(j23 * 2 + 1)? * v
            }
            Recurrence::J12 => {
                let wp = need!(self.term(&Self::at_plus(j1, j2, j3, j, j12), true, Which::Main, j12 + 1, j23));
                let wm = need!(self.term(&Self::at_minus(j1, j2, j3, j, j12), true, Which::Main, j12 - 1, j23));
                let mid =
                    q(j12 * 2)? * q(j12 * 2 + 1)? * q(j12 * 2 + 2)? * (q(j23)? * q(j23 + 1)? - q(j3 - j2)? * q(j3 - j2 + 1)?)
                        + q(j12 * 2)? * q(j1 - j2 + j12 + 1)? * q(j12 - j1 - j2)? * q(j12 + j3 - j + 1)? * q(j12 + j3 + j + 2)?
                        - q(j12 * 2 + 2)? * q(j12 - j3 + j)? * q(j1 + j2 + j12 + 1)? * q(j3 - j12 + j + 1)? * q(j2 - j1 + j12)?;
                q(j12 * 2)? * wp + q(j12 * 2 + 2)? * wm - mid * v
            }
            Recurrence::Forward => {
                let w1 = need!(self.term(&self.sigma.sigma_product(j23 + 1), true, Which::Main, j12, j23 + 1));
                let c = self.root(&self.sigma.sigma_product(-j23 - 1))?;
                let g = qprod(&[j2 - j1 + j12, j1 - j2 + j12 + 1]);
                let sh = need!(self.term(&g, true, Which::Up, j12, j23 + h));
                w1 + c * v - q(j23 * 2 + 2)? * sh
            }
            Recurrence::Lowering => {
                let c = self.root(&qprod(&[j12 - j1 + j2, j12 + j1 - j2 + 1]))?;
                let a = need!(self.term(&self.sigma.sigma_product(-j23 - 1), true, Which::Up, j12, j23 + h));
                let b = need!(self.term(&self.sigma.sigma_product(j23), true, Which::Up, j12, j23 - h));
                a + b - q(j23 * 2 + 1)? * c * v
            }
            Recurrence::ForwardTilde => {
                let w1 = need!(self.term(&self.sigma_t.sigma_product(j23 + 1), true, Which::Main, j12, j23 + 1));
                let c = self.root(&self.sigma_t.sigma_product(-j23 - 1))?;
                let g = qprod(&[j1 + j2 - j12, j1 + j2 + j12 + 1]);
                let sh = need!(self.term(&g, true, Which::Down, j12, j23 + h));
                w1 - c * v + q(j23 * 2 + 2)? * sh
            }
            Recurrence::LoweringTilde => {
                let c = self.root(&qprod(&[j1 + j2 - j12, j1 + j2 + j12 + 1]))?;
                let a = need!(self.term(&self.sigma_t.sigma_product(-j23 - 1), true, Which::Down, j12, j23 + h));
                let b = need!(self.term(&self.sigma_t.sigma_product(j23), true, Which::Down, j12, j23 - h));
                a - b - q(j23 * 2 + 1)? * c * v
            }
            Recurrence::Mixed1 | Recurrence::Mixed2 => {
                let hh = (j1 - j2 - j12) / 2;
                let lam = sig(hh - 1)? - sig(hh)? - q(j12 * 2 + 2)? * q(j23 - hh)? * q(j23 - hh + 1)?;
                let wr = need!(self.term(&Self::at_plus(j1, j2, j3, j, j12), true, Which::Main, j12 + 1, j23));
                if rec == Recurrence::Mixed1 {
                    let wm = need!(self.term(&Self::a_minus(j1, j2, j3, j, j23), true, Which::Main, j12, j23 - 1));
                    let c = sig(j23)? * q(j12 * 2 + 2)? + q(j1 - j2 + j12 + 1)? * q(j23 * 2)? * lam;
                    q(j12 * 2 + 2)? * wm + q(j23 * 2)? * wr + c * v
                } else {
                    let wp = need!(self.term(&Self::a_plus(j1, j2, j3, j, j23), true, Which::Main, j12, j23 + 1));
                    let inner = lam + q(j12 - j1 + j2)? * q(j12 * 2 + 2)? * q(j23 * 2 + 1)?;
                    let c = q(j12 * 2 + 2)? * sig(-j23 - 1)? - q(j23 * 2 + 2)? * q(j1 - j2 + j12 + 1)? * inner;
                    q(j12 * 2 + 2)? * wp - q(j23 * 2 + 2)? * wr + c * v
                }
            }
            Recurrence::Mixed1Tilde | Recurrence::Mixed2Tilde => {
                let hh = (j12 - j1 - j2) / 2;
                let lam = sigt(hh - 1)? - sigt(hh)? - q(j12 * 2)? * q(j23 - hh)? * q(j23 - hh + 1)?;
                let wl = need!(self.term(&Self::at_minus(j1, j2, j3, j, j12), true, Which::Main, j12 - 1, j23));
                if rec == Recurrence::Mixed1Tilde {
                    let wm = need!(self.term(&Self::a_minus(j1, j2, j3, j, j23), true, Which::Main, j12, j23 - 1));
                    let c = sigt(j23)? * q(j12 * 2)? + q(j1 + j2 + j12 + 1)? * q(j23 * 2)? * lam;
                    q(j12 * 2)? * wm - q(j23 * 2)? * wl - c * v
                } else {
                    let wp = need!(self.term(&Self::a_plus(j1, j2, j3, j, j23), true, Which::Main, j12, j23 + 1));
                    let inner = lam + q(j1 + j2 - j12)? * q(j12 * 2)? * q(j23 * 2 + 1)?;
                    let c = q(j12 * 2)? * sigt(-j23 - 1)? - q(j23 * 2 + 2)? * q(j1 + j2 + j12 + 1)? * inner;
                    q(j12 * 2)? * wp + q(j23 * 2 + 2)? * wl - c * v
                }
            }
        };
        Ok(Some(Residual { value: total.v.abs().to_f64(), scale: total.m.to_f64() }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: i64) -> Rat {
        Rat::new(n, 2)
    }

    #[test]
    fn parse_and_display() {
        let sj: SixJ = "3/2 1/2 1; 3/2 3/2 2".parse().unwrap();
        assert_eq!(sj.to_string(), "{3/2 1/2 1; 3/2 3/2 2}");
        assert_eq!(sj.swapped().swapped(), sj);
        assert!("1 1 1 1 1".parse::<SixJ>().is_err());
        assert!(SixJ::new(h(1), h(3), h(2), h(3), h(1), h(2)).is_err());
    }

    #[test]
    fn small_value_matches_classical() {
        // {1/2 1/2 1; 1/2 1/2 1} = 1/6 classically
        let sj = SixJ::new(h(1), h(1), h(2), h(1), h(1), h(2)).unwrap();
        let (sq, sign) = classical_sixj_squared(&sj);
        assert_eq!(sq, BigRational::new(1.into(), 36.into()));
        assert_eq!(sign, 1);
        let f = FloatField::new(Rat::new(1_000_001, 1_000_000), 128).unwrap();
        let v = sixj_value(&f, &sj, Route::ViaU).unwrap().to_f64();
        assert!((v - 1.0 / 6.0).abs() < 1e-5);
    }
}
