//! Terminating basic hypergeometric series `rφp`, the q-hypergeometric
//! function `rFp` built on `(a|q)_k`, and the very-well-poised `6φ5` sum.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::qarith::classical_pochhammer;
use crate::scalar::{big, Monomial, QField, Scalar};
use crate::{Error, Rat, Result};

/// A parameter `q^exp` of a basic series, or `-q^exp` when `negated`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Param {
    pub exp: Rat,
    pub negated: bool,
}

impl Param {
    pub fn q(exp: Rat) -> Self {
        Param { exp, negated: false }
    }

    pub fn neg_q(exp: Rat) -> Self {
        Param { exp, negated: true }
    }

    /// `k` such that the parameter is `q^-k`, `k >= 0`.
    fn terminating_index(&self) -> Option<i64> {
        (!self.negated && self.exp.is_integer() && self.exp <= Rat::zero()).then(|| -self.exp.to_integer())
    }

    /// Multiplies `m` by `(1 - p q^k)^pow`.
    fn factor(&self, m: &mut Monomial, k: i64, pow: i64) -> Result<()> {
        if self.negated {
            m.one_plus(self.exp + k, pow);
            Ok(())
        } else {
            m.one_minus(self.exp + k, pow).map(|_| ())
        }
    }
}

impl From<Rat> for Param {
    fn from(exp: Rat) -> Self {
        Param::q(exp)
    }
}

fn plain(ps: &[Rat]) -> Vec<Param> {
    ps.iter().copied().map(Param::q).collect()
}

/// Number of the last nonzero term of a series with these upper parameters.
fn termination(upper: impl Iterator<Item = Option<i64>>) -> Result<i64> {
    upper.flatten().min().ok_or(Error::NonTerminating)
}

/// `rφp(upper; lower | q, z)`, summed up to its terminating index.
///
/// The `k`-th term is `prod (a_i;q)_k / prod (b_j;q)_k * z^k / (q;q)_k *
/// [(-1)^k q^(k(k-1)/2)]^(p-r+1)`.
pub fn eval_phi<F: QField>(f: &F, upper: &[Param], lower: &[Param], z: &F::S) -> Result<F::S> {
    let n = termination(upper.iter().map(Param::terminating_index))?;
    let extra = lower.len() as i64 - upper.len() as i64 + 1;
    let mut term = f.one();
    let mut sum = f.one();
    for k in 0..n {
        let mut ratio = Monomial::one();
        for a in upper {
            a.factor(&mut ratio, k, 1)?;
        }
        for b in lower {
            if !b.negated && (b.exp + k).is_zero() {
                return Err(Error::PoleBeforeTermination(k as usize + 1));
            }
            b.factor(&mut ratio, k, -1)?;
        }
        ratio.one_minus(Rat::from(k + 1), -1)?;
        if extra != 0 {
            ratio.q_pow(Rat::from(k * extra));
            if extra % 2 != 0 {
                ratio.negate();
            }
        }
        term = term * &f.monomial(&ratio)? * z;
        if term.is_zero() {
            break;
        }
        sum = sum + &term;
    }
    Ok(sum)
}

/// `rFp(upper; lower | q, z)` with `(a|q)_k` Pochhammer symbols.
///
/// The `k`-th term is `prod (a_i|q)_k / prod (b_j|q)_k * z^k / (1|q)_k *
/// [kappa^-k q^(k(k-1)/4)]^(p-r+1)`.
pub fn eval_f<F: QField>(f: &F, upper: &[Rat], lower: &[Rat], z: &F::S) -> Result<F::S> {
    let n = termination(upper.iter().map(|a| (a.is_integer() && *a <= Rat::zero()).then(|| -a.to_integer())))?;
    let extra = lower.len() as i64 - upper.len() as i64 + 1;
    let mut term = f.one();
    let mut sum = f.one();
    for k in 0..n {
        let mut ratio = Monomial::one();
        for a in upper {
            ratio.qnum(a + k, 1)?;
        }
        for b in lower {
            if (b + k).is_zero() {
                return Err(Error::PoleBeforeTermination(k as usize + 1));
            }
            ratio.qnum(b + k, -1)?;
        }
        ratio.qnum(Rat::from(k + 1), -1)?;
        if extra != 0 {
            // kappa^-1 q^(k/2) = -q^(1/2) (1-q)^-1 q^(k/2)
            ratio.q_pow(Rat::new(extra * (k + 1), 2));
            ratio.one_minus(Rat::one(), -extra)?;
            if extra % 2 != 0 {
                ratio.negate();
            }
        }
        term = term * &f.monomial(&ratio)? * z;
        if term.is_zero() {
            break;
        }
        sum = sum + &term;
    }
    Ok(sum)
}

/// The argument `t0 = z q^((sum a - sum b - 1)/2)` at which `p+1Fp(t0)`
/// equals `p+1φp(z)` with parameters `q^a`, `q^b`.
pub fn f_argument_for_phi<F: QField>(f: &F, upper: &[Rat], lower: &[Rat], z: &F::S) -> Result<F::S> {
    let sa: Rat = upper.iter().sum();
    let sb: Rat = lower.iter().sum();
    Ok(z.clone() * &f.q_pow((sa - sb - 1) / 2)?)
}

/// `p+1φp` with plain `q^a` parameters, for convenience.
pub fn eval_phi_plain<F: QField>(f: &F, upper: &[Rat], lower: &[Rat], z: &F::S) -> Result<F::S> {
    eval_phi(f, &plain(upper), &plain(lower), z)
}

/// Closed form `(aq, aq/bc; q)_k / (aq/b, aq/c; q)_k` of the terminating
/// very-well-poised `6φ5` with `a = q^a_exp`, `b = q^b_exp`, `c = q^c_exp`.
pub fn sum_very_well_poised_6phi5<F: QField>(f: &F, a: Rat, b: Rat, c: Rat, k: i64) -> Result<F::S> {
    f.monomial(&vwp_closed_form(a, b, c, k)?)
}

pub(crate) fn vwp_closed_form(a: Rat, b: Rat, c: Rat, k: i64) -> Result<Monomial> {
    let mut m = Monomial::one();
    for i in 0..k {
        let (num1, num2) = (a + 1 + i, a + 1 - b - c + i);
        let (den1, den2) = (a + 1 - b + i, a + 1 - c + i);
        if den1.is_zero() || den2.is_zero() {
            return Err(Error::PoleInClosedForm);
        }
        m.one_minus(num1, 1)?;
        m.one_minus(num2, 1)?;
        m.one_minus(den1, -1)?;
        m.one_minus(den2, -1)?;
    }
    Ok(m)
}

/// The `6φ5` series itself:
/// `6φ5(a, q a^½, -q a^½, b, c, q^-k; a^½, -a^½, aq/b, aq/c, a q^(k+1) | q, a q^(k+1)/(bc))`.
pub fn very_well_poised_6phi5_series<F: QField>(f: &F, a: Rat, b: Rat, c: Rat, k: i64) -> Result<F::S> {
    let h = a / 2;
    let upper = [Param::q(a), Param::q(h + 1), Param::neg_q(h + 1), Param::q(b), Param::q(c), Param::q(Rat::from(-k))];
    let lower = [Param::q(h), Param::neg_q(h), Param::q(a + 1 - b), Param::q(a + 1 - c), Param::q(a + k + 1)];
    let z = f.q_pow(a + k + 1 - b - c)?;
    eval_phi(f, &upper, &lower, &z)
}

/// Classical `rFp(upper; lower | z)` over the rationals, summed until a
/// numerator parameter terminates it.
pub fn classical_hypergeometric(upper: &[BigRational], lower: &[BigRational], z: &BigRational) -> Result<BigRational> {
    let n = termination(upper.iter().map(|a| {
        (a.is_integer() && *a <= BigRational::zero())
            .then(|| -num_traits::ToPrimitive::to_i64(&a.to_integer()).unwrap_or(i64::MAX))
    }))?;
    let mut sum = BigRational::zero();
    let mut fact = BigRational::one();
    let mut zk = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            fact *= BigRational::from_integer(BigInt::from(k));
            zk *= z;
        }
        let mut num = BigRational::one();
        for a in upper {
            num *= classical_pochhammer(a, k);
        }
        let mut den = BigRational::one();
        for b in lower {
            den *= classical_pochhammer(b, k);
        }
        if den.is_zero() {
            return Err(Error::PoleBeforeTermination(k as usize));
        }
        sum += num * &zk / (den * &fact);
    }
    Ok(sum)
}

/// Both sides of the terminating `4φ3` identity
///
/// `4φ3(q^(n-N+1), q^(-n-N)/(AB), q^-k, q^-k D; q^(1-N), q^-2k D/B, q^(1-N)/A | q, q)`
/// `= q^(-kN) (AB)^-k (qB, q^(N-2k) D A; q)_k / (q^-2k D/B, q^(1-N)/A; q)_k`
/// `  * 4φ3(q^-n, AB q^(n+1), q^-k, q^-k D; q^(1-N), qB, q^(N-2k) D A | q, q)`
///
/// with `A = q^alpha`, `B = q^beta`, `D = q^delta`.
pub fn closing_identity_sides<F: QField>(
    f: &F,
    n: i64,
    k: i64,
    big_n: i64,
    alpha: Rat,
    beta: Rat,
    delta: Rat,
) -> Result<(F::S, F::S)> {
    let q = f.q_pow(Rat::one())?;
    let (n_, k_, nn) = (Rat::from(n), Rat::from(k), Rat::from(big_n));
    let lhs = eval_phi_plain(
        f,
        &[n_ - nn + 1, -n_ - nn - alpha - beta, -k_, -k_ + delta],
        &[-nn + 1, -k_ * 2 + delta - beta, -nn + 1 - alpha],
        &q,
    )?;
    let series = eval_phi_plain(
        f,
        &[-n_, alpha + beta + n_ + 1, -k_, -k_ + delta],
        &[-nn + 1, beta + 1, nn - k_ * 2 + delta + alpha],
        &q,
    )?;
    let mut pre = Monomial::one();
    pre.q_pow(-k_ * nn - k_ * (alpha + beta));
    for i in 0..k {
        let den1 = -k_ * 2 + delta - beta + i;
        let den2 = -nn + 1 - alpha + i;
        if den1.is_zero() || den2.is_zero() {
            return Err(Error::PoleInClosedForm);
        }
        pre.one_minus(beta + 1 + i, 1)?;
        pre.one_minus(nn - k_ * 2 + delta + alpha + i, 1)?;
        pre.one_minus(den1, -1)?;
        pre.one_minus(den2, -1)?;
    }
    Ok((lhs, f.monomial(&pre)? * &series))
}

/// Classical limit helper: `(a)_k` for rational `a`.
pub fn classical_rising(a: Rat, k: i64) -> BigRational {
    classical_pochhammer(&big(a), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ExactField;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn trivial_series() {
        let f = ExactField::new();
        let z = f.q_pow(r(1, 1)).unwrap();
        let one = eval_phi_plain(&f, &[r(0, 1), r(3, 2)], &[r(5, 2)], &z).unwrap();
        assert_eq!(one, f.one());
        let one = eval_f(&f, &[r(0, 1), r(1, 2)], &[r(3, 1)], &f.one()).unwrap();
        assert_eq!(one, f.one());
        assert_eq!(eval_phi_plain(&f, &[r(1, 2)], &[r(3, 2)], &z).unwrap_err(), Error::NonTerminating);
        assert_eq!(eval_phi_plain(&f, &[r(-3, 1)], &[r(-1, 1)], &z).unwrap_err(), Error::PoleBeforeTermination(2));
    }

    #[test]
    fn two_term_series_by_hand() {
        // 2φ1(q^-1, q^a; q^b | q, z) = 1 + (1-q^-1)(1-q^a) z / ((1-q^b)(1-q))
        let f = ExactField::new();
        let (a, b) = (r(5, 2), r(3, 4));
        let z = f.q_pow(r(1, 2)).unwrap() + f.int(2);
        let got = eval_phi_plain(&f, &[r(-1, 1), a], &[b], &z).unwrap();
        let one = f.one();
        let num = (one.clone() - f.q_pow(r(-1, 1)).unwrap()) * &(one.clone() - f.q_pow(a).unwrap()) * &z;
        let den = (one.clone() - f.q_pow(b).unwrap()) * &(one.clone() - f.q_pow(r(1, 1)).unwrap());
        assert_eq!(got, one + num.try_div(&den).unwrap());
    }

    #[test]
    fn f_equals_phi_at_t0() {
        let f = ExactField::new();
        let upper = [r(-3, 1), r(7, 2), r(1, 2), r(5, 2)];
        let lower = [r(3, 2), r(-9, 2), r(2, 1)];
        let z = f.q_pow(r(1, 1)).unwrap();
        let t0 = f_argument_for_phi(&f, &upper, &lower, &z).unwrap();
        let lhs = eval_f(&f, &upper, &lower, &t0).unwrap();
        let rhs = eval_phi_plain(&f, &upper, &lower, &z).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn classical_limit_of_4f3() {
        let f = ExactField::new();
        let upper = [r(-3, 1), r(9, 2), r(3, 2), r(5, 2)];
        let lower = [r(7, 2), r(-11, 2), r(2, 1)];
        let got = eval_f(&f, &upper, &lower, &f.one()).unwrap().eval_at_unity().unwrap();
        let b = |v: &[Rat]| v.iter().map(|x| big(*x)).collect::<Vec<_>>();
        let want = classical_hypergeometric(&b(&upper), &b(&lower), &BigRational::one()).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn six_phi_five_summation() {
        let f = ExactField::new();
        assert_eq!(sum_very_well_poised_6phi5(&f, r(3, 1), r(1, 1), r(2, 1), 0).unwrap(), f.one());
        for (a, b, c, k) in [(r(3, 1), r(1, 1), r(2, 1), 2), (r(3, 1), r(2, 1), r(9, 2), 3), (r(7, 2), r(1, 2), r(5, 1), 2)] {
            let closed = sum_very_well_poised_6phi5(&f, a, b, c, k).unwrap();
            let series = very_well_poised_6phi5_series(&f, a, b, c, k).unwrap();
            assert_eq!(closed, series, "a = {a}, b = {b}, c = {c}, k = {k}");
        }
    }

    #[test]
    fn closing_identity_small_grid() {
        let f = ExactField::new();
        let (alpha, beta, a) = (r(1, 1), r(1, 2), r(1, 2));
        for big_n in 2..=4 {
            for n in 0..big_n.min(3) {
                for k in 0..big_n.min(3) {
                    let s = a + k;
                    let (l, rr) = closing_identity_sides(&f, n, k, big_n, alpha, beta, s * 2 + 1).unwrap();
                    assert_eq!(l, rr, "n = {n}, k = {k}, N = {big_n}");
                }
            }
        }
    }
}
