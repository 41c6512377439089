//! The Nikiforov–Uvarov construction on the quadratic lattice
//! `x(s) = [s][s+1]`, driven only by the four roots of `σ`.
//!
//! A problem is `σ(s) = A [s-s1][s-s2][s-s3][s-s4]` plus a normalization
//! rule `B_n`. Everything else (τ, λ_n, the explicit sum, the three-term
//! recurrence, the difference-differentiation formulas) follows from those.
//! Weights need closed forms and come in through [`Weight`].

use num_traits::{One, Zero};

use crate::qarith::{GammaProduct, GammaValue};
use crate::qhyper::eval_f;
use crate::scalar::{Monomial, QField, Scalar};
use crate::{Error, Rat, Result};

fn half() -> Rat {
    Rat::new(1, 2)
}

/// The lattice `x(s) = c1 (q^s + q^(-s-1)) + c3` with `c1 = q^(1/2)/κ²`,
/// `c3 = -[2]/κ²`, which equals `[s][s+1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Lattice;

impl Lattice {
    pub const MU: i64 = 1;

    pub fn x<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        let mut m = Monomial::one();
        m.qnum(s, 1)?.qnum(s + 1, 1)?;
        f.monomial(&m)
    }

    pub fn c1<F: QField>(&self, f: &F) -> Result<F::S> {
        let k = f.kappa()?;
        f.q_pow(half())?.try_div(&(k.clone() * &k))
    }

    pub fn c3<F: QField>(&self, f: &F) -> Result<F::S> {
        let k = f.kappa()?;
        Ok(-f.q_number(Rat::from(2))?.try_div(&(k.clone() * &k))?)
    }

    /// `x(s)` from the defining exponential form.
    pub fn x_exponential<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        Ok(self.c1(f)? * &(f.q_pow(s)? + f.q_pow(-s - 1)?) + self.c3(f)?)
    }

    /// `x_n(s) = x(s + n/2)`.
    pub fn x_n<F: QField>(&self, f: &F, n: i64, s: Rat) -> Result<F::S> {
        self.x(f, s + Rat::new(n, 2))
    }

    /// `Δx(s) = [2s+2]`.
    pub fn delta_x<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        f.q_number(s * 2 + 2)
    }

    /// `∇x(s) = [2s]`.
    pub fn nabla_x<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        f.q_number(s * 2)
    }
}

/// The normalization constants `B_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BNorm {
    /// `B_n = (-1)^n / [n]!`.
    SignedInverseFactorial,
    /// `B_n = 1 / [n]!`.
    InverseFactorial,
}

impl BNorm {
    pub fn product(&self, n: i64) -> GammaProduct {
        let g = GammaProduct::new().factorial(n, -1);
        match self {
            BNorm::SignedInverseFactorial => g.parity(n),
            BNorm::InverseFactorial => g,
        }
    }
}

/// Closed forms of `ρ(s)` and `ρ_n(s)` for a concrete family.
pub trait Weight {
    /// `ρ(s + c ε)`, read as the limit `ε -> 0` together with the other factors.
    fn rho_eps(&self, s: Rat, c: i64) -> GammaProduct;
    fn rho_n(&self, n: i64, s: Rat) -> GammaProduct;

    fn rho(&self, s: Rat) -> GammaProduct {
        self.rho_eps(s, 0)
    }
}

/// A polynomial family on the lattice, described by the roots of `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NUProblem {
    pub roots: [Rat; 4],
    pub a_coef: Rat,
    pub b_norm: BNorm,
    /// Orthogonality interval `a <= s <= b - 1`.
    pub a: Rat,
    pub b: Rat,
    pub lattice: Lattice,
}

impl NUProblem {
    pub fn new(roots: [Rat; 4], a_coef: Rat, b_norm: BNorm, a: Rat, b: Rat) -> Result<Self> {
        if a_coef.is_zero() {
            return Err(Error::InadmissibleParams("A must be nonzero".into()));
        }
        Ok(NUProblem { roots, a_coef, b_norm, a, b, lattice: Lattice })
    }

    /// The family whose roots are shifted by 1/2: the polynomials that
    /// `ΔP_n/Δx` lands on.
    pub fn companion(&self) -> NUProblem {
        NUProblem {
            roots: self.roots.map(|r| r + half()),
            a_coef: self.a_coef,
            b_norm: self.b_norm,
            a: self.a + half(),
            b: self.b - half(),
            lattice: self.lattice,
        }
    }

    /// Number of lattice points `b - a`.
    pub fn size(&self) -> i64 {
        (self.b - self.a).to_integer()
    }

    fn root_sum(&self) -> Rat {
        self.roots.iter().sum()
    }

    pub fn sigma_product(&self, s: Rat, c: i64) -> GammaProduct {
        let mut g = GammaProduct::new().rational(self.a_coef);
        for r in self.roots {
            g = g.qnum_eps(s - r, c, 1);
        }
        g
    }

    /// `σ(s) = A prod [s - s_i]`.
    pub fn sigma<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        self.sigma_product(s, 0).eval_plain(f)
    }

    /// `σ(s) = C q^(-2s) prod (q^s - q^(s_i))`, `C = A q^(-sum s_i / 2) / κ^4`.
    pub fn sigma_power_form<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        let k = f.kappa()?;
        let k4 = (k.clone() * &k).powi(2)?;
        let c = f.rational(self.a_coef) * &f.q_pow(-self.root_sum() / 2)?.try_div(&k4)?;
        let mut v = c * &f.q_pow(-s * 2)?;
        let qs = f.q_pow(s)?;
        for r in self.roots {
            v = v * &(qs.clone() - f.q_pow(r)?);
        }
        Ok(v)
    }

    /// `σ(-s-1)`.
    pub fn sigma_reflected<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        self.sigma(f, -s - 1)
    }

    /// `σ(s) + τ(s) Δx(s - 1/2) - σ(-s-1)`.
    pub fn reflection_residual<F: QField>(&self, f: &F, s: Rat) -> Result<F::S> {
        let lhs = self.sigma(f, s)? + self.tau_n(f, 0, s)? * &f.q_number(s * 2 + 1)?;
        Ok(lhs - self.sigma_reflected(f, s)?)
    }

    /// `λ_n / [n] = -A [sum s_i + n + 1]`, defined for every `n`.
    pub fn lambda_over_qn<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        Ok(f.rational(-self.a_coef) * &f.q_number(self.root_sum() + n + 1)?)
    }

    /// `λ_n = -A [n] [sum s_i + n + 1]`.
    pub fn lambda_n<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        Ok(self.lambda_over_qn(f, n)? * &f.q_number(Rat::from(n))?)
    }

    /// `λ_n` from the leading-power form `-(A q / (c1² κ^4)) [n] [sum s_i + n + 1]`.
    pub fn lambda_n_leading<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        let c1 = self.lattice.c1(f)?;
        let k = f.kappa()?;
        let den = c1.clone() * &c1 * &(k.clone() * &k).powi(2)?;
        let pre = f.rational(-self.a_coef) * &f.q_pow(Rat::one())?.try_div(&den)?;
        Ok(pre * &f.q_number(Rat::from(n))? * &f.q_number(self.root_sum() + n + 1)?)
    }

    /// `τ_n' = A [sum s_i + 2n + 2]`.
    pub fn tau_n_prime<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        Ok(f.rational(self.a_coef) * &f.q_number(self.root_sum() + 2 * n + 2)?)
    }

    /// `τ_n(0) = σ(-n/2 - 1) - σ(-n/2)`.
    pub fn tau_n_zero<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        let h = Rat::new(-n, 2);
        Ok(self.sigma(f, h - 1)? - self.sigma(f, h)?)
    }

    /// `τ_n(s) = τ_n' x_n(s) + τ_n(0)`.
    pub fn tau_n<F: QField>(&self, f: &F, n: i64, s: Rat) -> Result<F::S> {
        Ok(self.tau_n_prime(f, n)? * &self.lattice.x_n(f, n, s)? + self.tau_n_zero(f, n)?)
    }

    /// `τ_n(s)` from its definition `(σ(-s-n-1) - σ(s)) / Δx_(n-1)(s)`.
    pub fn tau_n_quotient<F: QField>(&self, f: &F, n: i64, s: Rat) -> Result<F::S> {
        let den = f.q_number(s * 2 + n + 1)?;
        if den.is_zero() {
            return Err(Error::DegenerateLatticePoint(s.to_string()));
        }
        (self.sigma(f, -s - n - 1)? - self.sigma(f, s)?).try_div(&den)
    }

    /// `B_n`.
    pub fn b_n<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        self.b_norm.product(n).eval_plain(f)
    }

    /// Leading coefficient `a_n = B_n A^n prod_{m<n} [sum s_i + n + m + 1]`.
    pub fn leading_product(&self, n: i64) -> GammaProduct {
        let mut g = self.b_norm.product(n);
        for m in 0..n {
            g = g.rational(self.a_coef).qnum(self.root_sum() + n + m + 1, 1);
        }
        g
    }

    pub fn a_n<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        self.leading_product(n).eval_plain(f)
    }

    /// `A_{n,n} = [n]! prod_{m<n} (-λ_{n+m}/[n+m])`.
    pub fn a_nn<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        let mut g = GammaProduct::new().factorial(n, 1);
        for m in 0..n {
            g = g.rational(self.a_coef).qnum(self.root_sum() + n + m + 1, 1);
        }
        g.eval_plain(f)
    }

    /// `α_n = a_n / a_(n+1)`.
    pub fn alpha_n<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        self.leading_product(n).mul(&self.leading_product(n + 1).inv()).eval_plain(f)
    }

    /// `β_n` from the τ coefficients:
    /// `[n] τ_(n-1)(0)/τ'_(n-1) - [n+1] τ_n(0)/τ'_n + c3 ([n] + 1 - [n+1])`.
    pub fn beta_n_tau<F: QField>(&self, f: &F, n: i64) -> Result<F::S> {
        let qn = f.q_number(Rat::from(n))?;
        let qn1 = f.q_number(Rat::from(n + 1))?;
        let mut v = -(qn1.clone() * &self.tau_n_zero(f, n)?.try_div(&self.tau_n_prime(f, n)?)?);
        if n > 0 {
            v = v + qn.clone() * &self.tau_n_zero(f, n - 1)?.try_div(&self.tau_n_prime(f, n - 1)?)?;
        }
        Ok(v + self.lattice.c3(f)? * &(qn + f.one() - qn1))
    }

    /// Explicit sum for `P_n(s)`:
    ///
    /// `B_n sum_m [n]! (-1)^(m+n) / ([m]! [n-m]!) [2s+2m-n+1] / prod_(l=0..n) [2s+m-l+1]
    ///  * ρ_n(s-n+m) / ρ(s)`,
    ///
    /// with the weight ratio expanded through the Pearson equation. Points
    /// where single terms are singular are evaluated as limits `s -> s + ε`.
    pub fn explicit_sum<F: QField>(&self, f: &F, n: i64, s: Rat) -> Result<F::S> {
        let mut total = f.zero();
        for m in 0..=n {
            let mut g = self.b_norm.product(n).factorial(n, 1).factorial(m, -1).factorial(n - m, -1).parity(m + n).qnum_eps(
                s * 2 + 2 * m - n + 1,
                2,
                1,
            );
            for l in 0..=n {
                g = g.qnum_eps(s * 2 + m - l + 1, 2, -1);
            }
            for i in 0..m {
                g = g.mul(&self.sigma_product(-s - i - 1, -1));
                g = g.mul(&self.sigma_product(s + i + 1, 1).inv());
            }
            for i in 1..=n {
                g = g.mul(&self.sigma_product(s - n + m + i, 1));
            }
            total = total + &g.eval_plain(f)?;
        }
        Ok(total)
    }

    /// `P_n(s) = B_n A^n (s1+s2+1|q)_n (s1+s3+1|q)_n (s1+s4+1|q)_n
    ///  4F3(-n, sum s_i + n + 1, s1 - s, s1 + s + 1; s1+s2+1, s1+s3+1, s1+s4+1 | q, 1)`.
    pub fn hypergeometric<F: QField>(&self, f: &F, n: i64, s: Rat) -> Result<F::S> {
        let [s1, s2, s3, s4] = self.roots;
        let lower = [s1 + s2 + 1, s1 + s3 + 1, s1 + s4 + 1];
        let mut pre = self.b_norm.product(n);
        for l in lower {
            pre = pre.poch(l, n, 1);
        }
        for _ in 0..n {
            pre = pre.rational(self.a_coef);
        }
        let upper = [Rat::from(-n), self.root_sum() + n + 1, s1 - s, s1 + s + 1];
        let series = eval_f(f, &upper, &lower, &f.one())?;
        Ok(pre.eval_plain(f)? * &series)
    }

    /// `A_s P(s+1) + B_s P(s) + C_s P(s-1) + λ_n P(s)` with
    /// `A_s = σ(-s-1)/([2s+2][2s+1])`, `C_s = σ(s)/([2s][2s+1])`, `B_s = -A_s - C_s`.
    pub fn sode_residual<F: QField>(&self, f: &F, n: i64, s: Rat, prev: &F::S, cur: &F::S, next: &F::S) -> Result<F::S> {
        let d1 = f.q_number(s * 2 + 1)?;
        let d2 = f.q_number(s * 2 + 2)?;
        let d0 = f.q_number(s * 2)?;
        if d0.is_zero() || d1.is_zero() || d2.is_zero() {
            return Err(Error::DegenerateLatticePoint(s.to_string()));
        }
        let a_s = self.sigma_reflected(f, s)?.try_div(&(d2 * &d1))?;
        let c_s = self.sigma(f, s)?.try_div(&(d0 * &d1))?;
        let b_s = -(a_s.clone() + &c_s);
        Ok(a_s * next + b_s * cur + c_s * prev + self.lambda_n(f, n)? * cur)
    }

    /// `σ(s) ρ(s)` at `s = a` and at `s = b` must vanish.
    pub fn check_boundary(&self, w: &dyn Weight) -> Result<()> {
        for s in [self.a, self.b] {
            let g = self.sigma_product(s, 1).mul(&w.rho_eps(s, 1));
            if !g.is_zero() {
                return Err(Error::BoundaryConditionViolated(s.to_string()));
            }
        }
        Ok(())
    }

    fn check_degree(&self, n: i64) -> Result<()> {
        let max = self.size() - 1;
        if n < 0 || n > max {
            return Err(Error::DegreeOutOfRange { n, max });
        }
        Ok(())
    }

    /// `d_n² = (-1)^n A_{n,n} B_n² sum_(s=a)^(b-n-1) ρ_n(s) [2s+n+1]`.
    pub fn norm_d2_sum<F: QField>(&self, f: &F, w: &dyn Weight, n: i64) -> Result<GammaValue<F::S>> {
        self.check_degree(n)?;
        self.check_boundary(w)?;
        let mut sum = GammaValue::plain(f.zero());
        for k in 0..(self.size() - n) {
            let s = self.a + k;
            let g = w.rho_n(n, s).qnum(s * 2 + n + 1, 1);
            sum = sum.add(&g.eval(f)?)?;
        }
        let b = self.b_n(f, n)?;
        let mut pre = self.a_nn(f, n)? * &b * &b;
        if n % 2 == 1 {
            pre = -pre;
        }
        Ok(sum.scale(&pre))
    }

    /// `sum_(s=a)^(b-1) P_n(s) P_m(s) ρ(s) [2s+1]` with `P` supplied by the caller.
    pub fn orthogonality_sum<F: QField>(&self, f: &F, w: &dyn Weight, pn: &[F::S], pm: &[F::S]) -> Result<GammaValue<F::S>> {
        let mut sum = GammaValue::plain(f.zero());
        for (k, (x, y)) in pn.iter().zip(pm).enumerate() {
            let s = self.a + k as i64;
            let g = w.rho(s).qnum(s * 2 + 1, 1).eval(f)?;
            sum = sum.add(&g.scale(&(x.clone() * y)))?;
        }
        Ok(sum)
    }

    /// `ΔP_n(s)/Δx(s) + λ_n B_n / B̃_(n-1) P̃_(n-1)(s+1/2)`, where `P̃` belongs
    /// to [`NUProblem::companion`].
    pub fn forward_residual<F: QField>(&self, f: &F, n: i64, s: Rat, p_s: &F::S, p_s1: &F::S, pt: &F::S) -> Result<F::S> {
        let lhs = (p_s1.clone() - p_s).try_div(&self.lattice.delta_x(f, s)?)?;
        let k = self.b_n(f, n)?.try_div(&self.companion().b_n(f, n - 1)?)?;
        Ok(lhs + self.lambda_n(f, n)? * &k * pt)
    }

    /// `[2s+1] P_n(s) - B_n/B̃_(n-1) (σ(-s-1) P̃(s+1/2) - σ(s) P̃(s-1/2))`.
    pub fn lower_residual<F: QField>(&self, f: &F, n: i64, s: Rat, p_s: &F::S, pt_plus: &F::S, pt_minus: &F::S) -> Result<F::S> {
        let k = self.b_n(f, n)?.try_div(&self.companion().b_n(f, n - 1)?)?;
        let rhs = self.sigma_reflected(f, s)? * pt_plus - self.sigma(f, s)? * pt_minus;
        Ok(f.q_number(s * 2 + 1)? * p_s - k * &rhs)
    }

    /// `σ(s) ∇P_n(s)/∇x(s) - λ_n/([n] τ_n') (τ_n(s) P_n(s) - B_n/B_(n+1) P_(n+1)(s))`.
    pub fn d3_residual<F: QField>(&self, f: &F, n: i64, s: Rat, p_prev: &F::S, p_s: &F::S, p_next_deg: &F::S) -> Result<F::S> {
        let nab = self.lattice.nabla_x(f, s)?;
        if nab.is_zero() {
            return Err(Error::DegenerateLatticePoint(s.to_string()));
        }
        let lhs = self.sigma(f, s)? * &(p_s.clone() - p_prev).try_div(&nab)?;
        let k = self.lambda_over_qn(f, n)?.try_div(&self.tau_n_prime(f, n)?)?;
        let ratio = self.b_n(f, n)?.try_div(&self.b_n(f, n + 1)?)?;
        let rhs = k * &(self.tau_n(f, n, s)? * p_s - ratio * p_next_deg);
        Ok(lhs - rhs)
    }

    /// `σ(-s-1) ΔP_n(s)/Δx(s) - λ_n/([n] τ_n')
    ///  ((τ_n(s) - [n] τ_n' [2s+1]) P_n(s) - B_n/B_(n+1) P_(n+1)(s))`.
    pub fn d4_residual<F: QField>(&self, f: &F, n: i64, s: Rat, p_s: &F::S, p_next: &F::S, p_next_deg: &F::S) -> Result<F::S> {
        let lhs = self.sigma_reflected(f, s)? * &(p_next.clone() - p_s).try_div(&self.lattice.delta_x(f, s)?)?;
        let tp = self.tau_n_prime(f, n)?;
        let k = self.lambda_over_qn(f, n)?.try_div(&tp)?;
        let ratio = self.b_n(f, n)?.try_div(&self.b_n(f, n + 1)?)?;
        let shifted = self.tau_n(f, n, s)? - f.q_number(Rat::from(n))? * &tp * &f.q_number(s * 2 + 1)?;
        let rhs = k * &(shifted * p_s - ratio * p_next_deg);
        Ok(lhs - rhs)
    }

    /// `ρ(s+1) σ(s+1) - ρ(s) σ(-s-1)`.
    pub fn pearson_residual<F: QField>(&self, f: &F, w: &dyn Weight, s: Rat) -> Result<GammaValue<F::S>> {
        let lhs = w.rho(s + 1).mul(&self.sigma_product(s + 1, 0)).eval(f)?;
        let rhs = w.rho(s).mul(&self.sigma_product(-s - 1, 0)).eval(f)?;
        lhs.add(&GammaValue { value: -rhs.value, basis: rhs.basis })
    }

    /// `ρ_n(s) - ρ(s+n) prod_(m=1..n) σ(s+m)`.
    pub fn rho_n_residual<F: QField>(&self, f: &F, w: &dyn Weight, n: i64, s: Rat) -> Result<GammaValue<F::S>> {
        let mut g = w.rho(s + n);
        for m in 1..=n {
            g = g.mul(&self.sigma_product(s + m, 0));
        }
        let lhs = w.rho_n(n, s).eval(f)?;
        let rhs = g.eval(f)?;
        lhs.add(&GammaValue { value: -rhs.value, basis: rhs.basis })
    }
}

/// Divided differences `f[x_0..x_k]` for `k = 0..nodes.len()`; entry `k` is
/// the order-`k` difference over the first `k+1` nodes.
pub fn divided_differences<F: QField>(nodes: &[F::S], values: &[F::S]) -> Result<Vec<F::S>> {
    let mut table: Vec<F::S> = values.to_vec();
    let mut out = vec![table[0].clone()];
    for k in 1..nodes.len() {
        for i in (k..nodes.len()).rev() {
            let num = table[i].clone() - &table[i - 1];
            let den = nodes[i].clone() - &nodes[i - k];
            table[i] = num.try_div(&den)?;
        }
        out.push(table[k].clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ExactField;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    /// Racah-type roots `(a, -b, β - a, b + α)` with `A = -1`.
    fn sample() -> NUProblem {
        let (a, b, al, be) = (r(1, 2), r(9, 2), r(1, 1), r(0, 1));
        NUProblem::new([a, -b, be - a, b + al], r(-1, 1), BNorm::SignedInverseFactorial, a, b).unwrap()
    }

    #[test]
    fn lattice_forms_agree() {
        let f = ExactField::new();
        let l = Lattice;
        for s2 in -5..9 {
            let s = r(s2, 2);
            assert_eq!(l.x(&f, s).unwrap(), l.x_exponential(&f, s).unwrap());
            assert_eq!(l.x(&f, s).unwrap(), l.x(&f, -s - 1).unwrap());
        }
    }

    #[test]
    fn sigma_factorizations_and_reflection() {
        let f = ExactField::new();
        let p = sample();
        assert!(p.sigma(&f, p.a).unwrap().is_zero());
        for s2 in -3..12 {
            let s = r(s2, 2);
            assert_eq!(p.sigma(&f, s).unwrap(), p.sigma_power_form(&f, s).unwrap());
            assert!(p.reflection_residual(&f, s).unwrap().is_zero());
        }
    }

    #[test]
    fn lambda_and_tau() {
        let f = ExactField::new();
        let p = sample();
        assert!(p.lambda_n(&f, 0).unwrap().is_zero());
        for n in 0..4 {
            assert_eq!(p.lambda_n(&f, n).unwrap(), p.lambda_n_leading(&f, n).unwrap());
            let tp = p.tau_n_prime(&f, n).unwrap();
            let via_lambda = -p.lambda_n(&f, 2 * n + 1).unwrap().try_div(&f.q_number(Rat::from(2 * n + 1)).unwrap()).unwrap();
            assert_eq!(tp, via_lambda);
            for s2 in 1..8 {
                let s = r(s2, 2);
                if let Ok(q) = p.tau_n_quotient(&f, n, s) {
                    assert_eq!(q, p.tau_n(&f, n, s).unwrap(), "n = {n}, s = {s}");
                }
            }
        }
    }

    #[test]
    fn explicit_sum_matches_hypergeometric_and_solves_sode() {
        let f = ExactField::new();
        let p = sample();
        for n in 0..4 {
            let vals: Vec<_> = (0..p.size()).map(|k| p.explicit_sum(&f, n, p.a + k).unwrap()).collect();
            for (k, v) in vals.iter().enumerate() {
                let h = p.hypergeometric(&f, n, p.a + k as i64).unwrap();
                assert_eq!(*v, h, "n = {n}, k = {k}");
            }
            for k in 1..(vals.len() - 1) {
                let s = p.a + k as i64;
                let res = p.sode_residual(&f, n, s, &vals[k - 1], &vals[k], &vals[k + 1]).unwrap();
                assert!(res.is_zero());
            }
        }
    }

    #[test]
    fn degree_by_divided_differences() {
        let f = ExactField::new();
        let p = sample();
        let l = Lattice;
        for n in 0..3 {
            let nodes: Vec<_> = (0..n + 2).map(|k| l.x(&f, p.a + k).unwrap()).collect();
            let vals: Vec<_> = (0..n + 2).map(|k| p.explicit_sum(&f, n, p.a + k).unwrap()).collect();
            let dd = divided_differences::<ExactField>(&nodes, &vals).unwrap();
            assert!(dd[n as usize + 1].is_zero());
            assert_eq!(dd[n as usize], p.a_n(&f, n).unwrap());
        }
    }
}
