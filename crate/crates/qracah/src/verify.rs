//! Verification suites over default parameter grids.
//!
//! Exact suites report a residual of `0` when the identity holds in `Q(t)`;
//! otherwise the residual is the magnitude of the nonzero difference at the
//! configured `q`. Float suites report relative residuals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::nulattice::{divided_differences, Lattice};
use crate::qarith::{gamma_tilde_ratio, q_pochhammer_basic, q_pochhammer_nu, GammaValue};
use crate::qhyper::{closing_identity_sides, sum_very_well_poised_6phi5, very_well_poised_6phi5_series};
use crate::racah::{DualParams, Family, Method, RacahParams};
use crate::sixj::{
    admissible_symbols, closed_form_parts, outer_tuples, parts, sixj_squared_exact, sixj_value, ClosedForm, Recurrence,
    RecurrenceSweep, Route, SixJGrid,
};
use crate::{Error, ExactField, ExactScalar, FloatField, FloatScalar, QField, Rat, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Sode,
    Orthogonality,
    Duality,
    DiffFormulas,
    Connection,
    SixjRecurrences,
    SixjUnitarity,
    Identities,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Sode,
        Suite::Orthogonality,
        Suite::Duality,
        Suite::DiffFormulas,
        Suite::Connection,
        Suite::SixjRecurrences,
        Suite::SixjUnitarity,
        Suite::Identities,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Sode => "sode",
            Suite::Orthogonality => "orthogonality",
            Suite::Duality => "duality",
            Suite::DiffFormulas => "diff-formulas",
            Suite::Connection => "connection",
            Suite::SixjRecurrences => "sixj-recurrences",
            Suite::SixjUnitarity => "sixj-unitarity",
            Suite::Identities => "identities",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// `q` for float suites and for sizing nonzero exact residuals.
    pub q: Rat,
    pub precision: usize,
    pub tolerance: f64,
    /// Largest momentum for the 6j suites.
    pub jmax: Rat,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { q: Rat::new(7, 10), precision: 128, tolerance: 1e-25, jmax: Rat::from(3) }
    }
}

/// One named property on one parameter set, aggregated over its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub params: String,
    pub exact: bool,
    pub count: usize,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    pub fn evaluations(&self) -> usize {
        self.checks.iter().map(|c| c.count).sum()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Recorder {
    checks: BTreeMap<(String, String), Check>,
    order: Vec<(String, String)>,
    tolerance: f64,
    t: f64,
}

impl Recorder {
    fn new(cfg: &VerifyConfig) -> Self {
        let q = *cfg.q.numer() as f64 / *cfg.q.denom() as f64;
        Recorder { checks: BTreeMap::new(), order: Vec::new(), tolerance: cfg.tolerance, t: q.powf(0.25) }
    }

    fn entry(&mut self, name: &str, params: &str, exact: bool) -> &mut Check {
        let key = (name.to_string(), params.to_string());
        if !self.checks.contains_key(&key) {
            self.order.push(key.clone());
            self.checks.insert(
                key.clone(),
                Check { name: key.0.clone(), params: key.1.clone(), exact, count: 0, max_residual: 0.0, passed: true },
            );
        }
        self.checks.get_mut(&key).unwrap()
    }

    fn exact(&mut self, name: &str, params: &str, r: &ExactScalar) {
        let t = self.t;
        let c = self.entry(name, params, true);
        c.count += 1;
        if !r.is_zero() {
            c.passed = false;
            let v = r.eval_f64(t).abs();
            c.max_residual = c.max_residual.max(if v.is_finite() && v > 0.0 { v } else { f64::INFINITY });
        }
    }

    fn exact_gamma(&mut self, name: &str, params: &str, r: &GammaValue<ExactScalar>) {
        self.exact(name, params, &r.value);
    }

    fn float(&mut self, name: &str, params: &str, relative: f64) {
        let tol = self.tolerance;
        let c = self.entry(name, params, false);
        c.count += 1;
        c.max_residual = c.max_residual.max(relative);
        if !(relative < tol) {
            c.passed = false;
        }
    }

    fn fail(&mut self, name: &str, params: &str) {
        let c = self.entry(name, params, true);
        c.count += 1;
        c.passed = false;
        c.max_residual = f64::INFINITY;
    }

    fn finish(mut self, suite: Suite) -> Report {
        let checks = self.order.iter().map(|k| self.checks.remove(k).unwrap()).collect();
        Report { suite, checks }
    }
}

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// Default `(a, b, α, β)` tuples: half-integer parameters with
/// `3 <= b - a <= 6`, admissible for both families.
pub fn default_tuples() -> Vec<(Rat, Rat, Rat, Rat)> {
    vec![
        (r(1, 2), r(9, 2), r(1, 1), r(0, 1)),
        (r(0, 1), r(4, 1), r(0, 1), r(0, 1)),
        (r(1, 2), r(7, 2), r(1, 2), r(1, 2)),
        (r(1, 1), r(5, 1), r(2, 1), r(1, 1)),
        (r(3, 2), r(9, 2), r(-1, 2), r(1, 1)),
        (r(0, 1), r(3, 1), r(1, 2), r(-1, 2)),
        (r(1, 2), r(11, 2), r(0, 1), r(3, 2)),
        (r(1, 1), r(7, 1), r(1, 1), r(0, 1)),
    ]
}

/// Both families on every default tuple.
pub fn default_grid() -> Vec<RacahParams> {
    let mut out = Vec::new();
    for (a, b, al, be) in default_tuples() {
        for fam in [Family::U, Family::UTilde] {
            if let Ok(p) = RacahParams::new(fam, a, b, al, be) {
                out.push(p);
            }
        }
    }
    out
}

pub fn describe(p: &RacahParams) -> String {
    format!("{} a={} b={} alpha={} beta={}", p.family, p.a, p.b, p.alpha, p.beta)
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<Report> {
    let mut rec = Recorder::new(cfg);
    match suite {
        Suite::Sode => sode(&mut rec)?,
        Suite::Orthogonality => orthogonality(&mut rec)?,
        Suite::Duality => duality(&mut rec)?,
        Suite::DiffFormulas => diff_formulas(&mut rec)?,
        Suite::Connection => connection(&mut rec)?,
        Suite::Identities => identities(&mut rec)?,
        Suite::SixjRecurrences => sixj_recurrences(&mut rec, cfg)?,
        Suite::SixjUnitarity => sixj_unitarity(&mut rec, cfg)?,
    }
    Ok(rec.finish(suite))
}

fn hyp(f: &ExactField, p: &RacahParams, n: i64, s: Rat) -> Result<ExactScalar> {
    p.eval(f, n, s, Method::Hypergeometric)
}

fn sode(rec: &mut Recorder) -> Result<()> {
    let f = ExactField::new();
    for p in default_grid() {
        let d = describe(&p);
        let g = p.problem();
        for n in 0..p.size() {
            for s in p.grid() {
                let v = |t: Rat| hyp(&f, &p, n, t);
                match g.sode_residual(&f, n, s, &v(s - 1)?, &v(s)?, &v(s + 1)?) {
                    Ok(x) => rec.exact("difference-equation", &d, &x),
                    Err(Error::DegenerateLatticePoint(_)) => {}
                    Err(e) => return Err(e),
                }
                let want = v(s)?;
                for m in Method::ALL {
                    rec.exact(&format!("method-{}", m.name()), &d, &(p.eval(&f, n, s, m)? - &want));
                }
                // α_(N-1) of ũ has a pole when α + β = 0; the relation stops there
                let Ok((al, be, ga)) = p.ttrr_table(&f, n) else { continue };
                let mut res = Lattice.x(&f, s)? * &want - al * &hyp(&f, &p, n + 1, s)? - be * &want;
                if n > 0 {
                    res = res - ga * &hyp(&f, &p, n - 1, s)?;
                }
                rec.exact("three-term-recurrence", &d, &res);
            }
            let nodes: Vec<Rat> = (0..=n + 1).map(|k| p.a + k).collect();
            let xs = nodes.iter().map(|&s| Lattice.x(&f, s)).collect::<Result<Vec<_>>>()?;
            let vs = nodes.iter().map(|&s| hyp(&f, &p, n, s)).collect::<Result<Vec<_>>>()?;
            let dd = divided_differences::<ExactField>(&xs, &vs)?;
            rec.exact("degree", &d, &dd[n as usize + 1]);
            rec.exact("leading-coefficient", &d, &(dd[n as usize].clone() - &p.a_n_product(n).eval_plain(&f)?));
        }
    }
    Ok(())
}

fn orthogonality(rec: &mut Recorder) -> Result<()> {
    let f = ExactField::new();
    for p in default_grid() {
        let d = describe(&p);
        let g = p.problem();
        let top = 4.min(p.size() - 1);
        let vals = (0..=top)
            .map(|n| p.grid().into_iter().map(|s| hyp(&f, &p, n, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        for n in 0..=top {
            let d2 = p.d2(&f, n)?;
            for m in 0..=n {
                let sum = g.orthogonality_sum(&f, &p, &vals[n as usize], &vals[m as usize])?;
                let res = if n == m { sum.sub(&d2)? } else { sum };
                rec.exact_gamma("orthogonality", &d, &res);
            }
            rec.exact_gamma("norm-closed-form", &d, &d2.sub(&g.norm_d2_sum(&f, &p, n)?)?);
        }
        rec.exact("boundary", &d, &f.zero());
        if g.check_boundary(&p).is_err() {
            rec.fail("boundary", &d);
        }
    }
    Ok(())
}

fn duality(rec: &mut Recorder) -> Result<()> {
    let f = ExactField::new();
    for p in default_grid() {
        let d = describe(&p);
        let dual = p.dual();
        for n in 0..p.size() {
            for s in p.grid() {
                rec.exact("dual-relation", &d, &dual.relation_residual(&f, n, s, Method::Hypergeometric)?);
            }
        }
        for s in p.grid() {
            for s2 in p.grid() {
                let v = p.dual_orthogonality_sum(&f, s, s2, Method::Hypergeometric)?.into_plain()?;
                let want = if s == s2 { f.one() } else { f.zero() };
                rec.exact("dual-orthogonality", &d, &(v - &want));
            }
        }
        if p.family != Family::U {
            continue;
        }
        if (p.alpha + p.beta).is_integer() {
            dual_exchange(rec, &f, &dual, &d, |rec, name, d, v: ExactScalar| rec.exact(name, d, &v))?;
        } else {
            // x(a') needs q^((α+β)/4): outside the exact ring, checked at 256 bits
            let g = FloatField::new(r(7, 10), 256)?;
            dual_exchange(rec, &g, &dual, &d, |rec, name, d, v: FloatScalar| {
                let x = v.abs().to_f64();
                rec.float(name, d, if x < 1e-60 { 0.0 } else { x })
            })?;
        }
    }
    Ok(())
}

fn dual_exchange<F: QField>(
    rec: &mut Recorder,
    f: &F,
    dual: &DualParams,
    d: &str,
    put: impl Fn(&mut Recorder, &str, &str, F::S),
) -> Result<()> {
    let p = dual.source;
    for n in 0..p.size() {
        let (a, b) = dual.dual_sigma_check(f, n)?;
        put(rec, "dual-sigma", d, a);
        put(rec, "dual-sigma", d, b);
        for k in 0..p.size() {
            put(rec, "dual-recurrence-from-equation", d, dual.dual_ttrr_residual(f, n, k, Method::Explicit)?);
            put(rec, "dual-equation-from-recurrence", d, dual.dual_sode_residual(f, n, k, Method::Explicit)?);
        }
    }
    for k in 0..p.size() {
        put(rec, "dual-beta", d, dual.dual_beta(f, k)? - &dual.params.ttrr_beta(f, k)?);
    }
    Ok(())
}

fn diff_formulas(rec: &mut Recorder) -> Result<()> {
    let f = ExactField::new();
    let half = r(1, 2);
    for p in default_grid() {
        let d = describe(&p);
        let g = p.problem();
        let c = p.companion();
        let mut points = p.grid();
        points.push(p.a + half);
        points.push(p.a - half);
        for n in 0..=3.min(p.size() - 1) {
            let tp_zero = g.tau_n_prime(&f, n)?.is_zero();
            for &s in &points {
                for (name, x) in p.differentiation_residuals(&f, n, s, Method::Hypergeometric)? {
                    rec.exact(&format!("table-{name}"), &d, &x);
                }
                let v = |m: i64, t: Rat| hyp(&f, &p, m, t);
                let vc = |m: i64, t: Rat| hyp(&f, &c, m, t);
                if n >= 1 {
                    let x = g.forward_residual(&f, n, s, &v(n, s)?, &v(n, s + 1)?, &vc(n - 1, s + half)?)?;
                    rec.exact("forward", &d, &x);
                    let x = g.lower_residual(&f, n, s, &v(n, s)?, &vc(n - 1, s + half)?, &vc(n - 1, s - half)?)?;
                    rec.exact("lowering", &d, &x);
                }
                // both formulas divide by τ'_n; the second also by [2s]
                if tp_zero {
                    continue;
                }
                if !(s * 2).is_zero() {
                    let x = g.d3_residual(&f, n, s, &v(n, s - 1)?, &v(n, s)?, &v(n + 1, s)?)?;
                    rec.exact("first-derivative", &d, &x);
                }
                let x = g.d4_residual(&f, n, s, &v(n, s)?, &v(n, s + 1)?, &v(n + 1, s)?)?;
                rec.exact("second-derivative", &d, &x);
            }
        }
    }
    Ok(())
}

fn connection(rec: &mut Recorder) -> Result<()> {
    let f = ExactField::new();
    for (a, b, al, be) in default_tuples() {
        let Ok(p) = RacahParams::u(a, b, al, be) else { continue };
        if p.size() > 6 {
            continue;
        }
        let d = describe(&p);
        for n in 0..p.size() {
            for s in p.grid() {
                for m in [Method::Hypergeometric, Method::Sears, Method::Explicit] {
                    rec.exact("connection", &d, &p.connection_residual(&f, n, s, m)?);
                }
            }
        }
    }
    closing(rec, &f)
}

/// The terminating `4φ3` transformation closing the connection formula, for
/// `n, k <= 3` and `N <= 6`.
fn closing(rec: &mut Recorder, f: &ExactField) -> Result<()> {
    for (alpha, beta, a) in [(r(1, 1), r(1, 2), r(1, 2)), (r(0, 1), r(1, 1), r(1, 1)), (r(3, 2), r(-1, 2), r(1, 1))] {
        let d = format!("alpha={alpha} beta={beta} a={a}");
        for big_n in 2..=6 {
            for n in 0..big_n.min(4) {
                for k in 0..big_n.min(4) {
                    let delta = (a + k) * 2 + 1;
                    match closing_identity_sides(f, n, k, big_n, alpha, beta, delta) {
                        Ok((l, rr)) => rec.exact("closing-4phi3", &d, &(l - &rr)),
                        Err(Error::PoleInClosedForm) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok(())
}

/// Ten `(a, b, c)` exponent triples for the very-well-poised summation.
pub fn vwp_grid() -> Vec<(Rat, Rat, Rat)> {
    vec![
        (r(13, 2), r(1, 1), r(2, 1)),
        (r(7, 1), r(3, 2), r(5, 2)),
        (r(15, 2), r(2, 1), r(1, 2)),
        (r(8, 1), r(1, 2), r(3, 1)),
        (r(17, 2), r(5, 2), r(2, 1)),
        (r(9, 1), r(3, 1), r(3, 2)),
        (r(6, 1), r(1, 2), r(1, 2)),
        (r(11, 2), r(3, 2), r(1, 1)),
        (r(10, 1), r(2, 1), r(7, 2)),
        (r(19, 2), r(1, 1), r(5, 2)),
    ]
}

fn identities(rec: &mut Recorder) -> Result<()> {
    let f = ExactField::new();
    for (a, b, c) in vwp_grid() {
        let d = format!("a={a} b={b} c={c}");
        for k in 0..=5 {
            let closed = sum_very_well_poised_6phi5(&f, a, b, c, k)?;
            rec.exact("6phi5-summation", &d, &(closed - &very_well_poised_6phi5_series(&f, a, b, c, k)?));
        }
    }
    // (a|q)_k = (-1)^k (q^a;q)_k κ^-k q^(-k(k-1)/4 - ka/2)
    let kappa = f.kappa()?;
    for a2 in -6..8 {
        let a = r(a2, 2);
        for k in 0..5 {
            let mut rhs = q_pochhammer_basic(&f, a, k)? * &kappa.powi(-k)? * &f.q_pow(r(-k * (k - 1), 4) - a * k / 2)?;
            if k % 2 == 1 {
                rhs = -rhs;
            }
            rec.exact("pochhammer-conventions", "a in -3..7/2, k <= 4", &(q_pochhammer_nu(&f, a, k)? - &rhs));
        }
    }
    // Γ̃(A - s) = Γ̃(A) (-1)^s / (1 - A|q)_s
    for a2 in [9, 10, 11, 13, 16] {
        let big_a = r(a2, 2);
        for s in 0..4 {
            let lhs = gamma_tilde_ratio(&f, big_a, -s)?;
            let mut rhs = q_pochhammer_nu(&f, Rat::from(1) - big_a, s)?.inv()?;
            if s % 2 == 1 {
                rhs = -rhs;
            }
            rec.exact("gamma-reflection", "A in 9/2..8, s <= 3", &(lhs - &rhs));
        }
    }
    for p in default_grid() {
        let d = describe(&p);
        for n in 0..p.size() {
            for s in p.grid() {
                let h = p.eval(&f, n, s, Method::Hypergeometric)?;
                rec.exact("sears-4F3", &d, &(p.eval(&f, n, s, Method::Sears)? - &h));
                let phi = p.eval(&f, n, s, Method::Phi)?;
                rec.exact("sears-4phi3", &d, &(p.eval(&f, n, s, Method::PhiSears)? - &phi));
            }
        }
    }
    closing(rec, &f)
}

fn rel(a: &FloatScalar, b: &FloatScalar) -> f64 {
    let d = (a.clone() - b).abs().to_f64();
    if d == 0.0 {
        return 0.0;
    }
    d / a.abs().to_f64().max(b.abs().to_f64())
}

fn sixj_recurrences(rec: &mut Recorder, cfg: &VerifyConfig) -> Result<()> {
    let f = FloatField::new(cfg.q, cfg.precision)?;
    for o in outer_tuples(cfg.jmax) {
        let d = format!("j1={} j2={} j3={} j={}", o.j1, o.j2, o.j3, o.j);
        let sweep = RecurrenceSweep::new(&f, o, Route::ViaU)?;
        for sj in o.symbols() {
            for r in Recurrence::ALL {
                if let Some(res) = sweep.residual(r, sj.j12, sj.j23)? {
                    rec.float(r.name(), &d, res.relative());
                }
            }
        }
    }
    let fe = ExactField::new();
    for sj in admissible_symbols(cfg.jmax.min(r(5, 2))) {
        let [am, sm, ap, sp] = RecurrenceSweep::a_identity(&fe, &sj)?;
        rec.exact("a-minus-squared", "all symbols", &(am - &sm));
        rec.exact("a-plus-squared", "all symbols", &(ap - &sp));
    }
    Ok(())
}

fn sixj_unitarity(rec: &mut Recorder, cfg: &VerifyConfig) -> Result<()> {
    let f = FloatField::new(cfg.q, cfg.precision)?;
    for o in outer_tuples(cfg.jmax) {
        let d = format!("j1={} j2={} j3={} j={}", o.j1, o.j2, o.j3, o.j);
        let grid = SixJGrid::new(&f, o, Route::ViaU)?;
        let (rows, cols) = grid.unitarity_deviation(&f)?;
        rec.float("unitarity-rows", &d, rows);
        rec.float("unitarity-columns", &d, cols);
        for sj in o.symbols() {
            let base = grid.get(sj.j12, sj.j23).expect("in rectangle").clone();
            for route in [Route::ViaUTilde, Route::Explicit, Route::ExplicitTilde] {
                rec.float(&format!("route-{}", route.name()), &d, rel(&sixj_value(&f, &sj, route)?, &base));
            }
            let sw = sj.swapped();
            if sw.check().is_ok() {
                rec.float("symmetry", &d, rel(&sixj_value(&f, &sw, Route::ViaU)?, &base));
            }
            for form in ClosedForm::ALL {
                if form.applies(&sj) {
                    let v = closed_form_parts(&f, &sj, form)?.value()?;
                    rec.float(&format!("closed-form-{}", form.name()), &d, rel(&v, &base));
                }
            }
        }
    }
    let fe = ExactField::new();
    for sj in admissible_symbols(cfg.jmax.min(r(2, 1))) {
        let (sq, sign) = sixj_squared_exact(&sj, Route::ExplicitTilde, &f)?;
        let v = sixj_value(&f, &sj, Route::ViaU)?;
        let signed = sq.eval_float(&f)?.sqrt()?;
        let signed = if sign < 0 { -signed } else { signed };
        rec.float("exact-square-and-sign", "j <= 2", rel(&signed, &v));
        let a = parts(&fe, &sj, Route::ViaU)?.square();
        let b = parts(&fe, &sj, Route::Explicit)?.square();
        rec.exact("exact-square-routes", "j <= 2", &(a - &b));
    }
    Ok(())
}
