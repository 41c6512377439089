//! Acceptance checks, one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qracah::racah::{Family, Method, RacahParams};
use qracah::sixj::{
    admissible_symbols, classical_sixj_squared, closed_form_parts, outer_tuples, parts, sixj_value, ClosedForm, Outer,
    Recurrence, RecurrenceSweep, Route,
};
use qracah::verify::{run, Report, Suite, VerifyConfig};
use qracah::{ExactField, FloatField, FloatScalar, Rat};

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn suite(s: Suite, cfg: &VerifyConfig) -> Result<Report, String> {
    let report = run(s, cfg).map_err(|e| format!("{s}: {e}"))?;
    if let Some(c) = report.failures().next() {
        return Err(format!("{s}: {} on {} (residual {:e})", c.name, c.params, c.max_residual));
    }
    Ok(report)
}

fn rel(a: &FloatScalar, b: &FloatScalar) -> f64 {
    let d = (a.clone() - b).abs().to_f64();
    if d == 0.0 {
        return 0.0;
    }
    d / a.abs().to_f64().max(b.abs().to_f64())
}

fn fields() -> Vec<FloatField> {
    [r(1, 2), r(9, 10), r(3, 2)].into_iter().map(|q| FloatField::new(q, 128).unwrap()).collect()
}

fn c1() -> Outcome {
    let grid = qracah::verify::default_grid();
    let tuples = grid.iter().filter(|p| p.family == Family::U && (3..=6).contains(&(p.b - p.a).to_integer())).count();
    let tilde = grid.iter().filter(|p| p.family == Family::UTilde).count();
    if tuples < 6 || tilde < 6 {
        return Err(format!("only {tuples}/{tilde} tuples"));
    }
    let rep = suite(Suite::Orthogonality, &VerifyConfig::default())?;
    Ok(format!("{} tuples x 2 families, {} exact identities", tuples, rep.evaluations()))
}

fn c2() -> Outcome {
    let a = suite(Suite::Sode, &VerifyConfig::default())?;
    let b = suite(Suite::DiffFormulas, &VerifyConfig::default())?;
    Ok(format!("{} exact residuals", a.evaluations() + b.evaluations()))
}

fn c3() -> Outcome {
    let rep = suite(Suite::Duality, &VerifyConfig::default())?;
    let float = rep.checks.iter().filter(|c| !c.exact).map(|c| c.count).sum::<usize>();
    Ok(format!("{} residuals ({} at 256 bits where x(a') leaves Q(t))", rep.evaluations(), float))
}

fn c4() -> Outcome {
    let rep = suite(Suite::Connection, &VerifyConfig::default())?;
    let closing = rep.checks.iter().filter(|c| c.name == "closing-4phi3").map(|c| c.count).sum::<usize>();
    if closing == 0 {
        return Err("closing identity not exercised".into());
    }
    Ok(format!("{} exact identities, {} of them the closing 4phi3", rep.evaluations(), closing))
}

fn c5() -> Outcome {
    let rep = suite(Suite::Identities, &VerifyConfig::default())?;
    let n = rep.checks.iter().filter(|c| c.name == "6phi5-summation").map(|c| c.count).sum::<usize>();
    if n != 60 {
        return Err(format!("expected 10 instances x k = 0..5, got {n}"));
    }
    Ok(format!("{n} sums equal their closed form"))
}

fn c6() -> Outcome {
    let syms = admissible_symbols(r(4, 1));
    let mut worst: f64 = 0.0;
    for f in fields() {
        for sj in &syms {
            let base = sixj_value(&f, sj, Route::ViaU).map_err(|e| format!("{sj}: {e}"))?;
            for route in [Route::ViaUTilde, Route::Explicit, Route::ExplicitTilde] {
                let v = sixj_value(&f, sj, route).map_err(|e| format!("{sj}: {e}"))?;
                worst = worst.max(rel(&v, &base));
            }
        }
    }
    if worst >= 1e-25 {
        return Err(format!("max relative deviation {worst:e}"));
    }
    Ok(format!("{} symbols x 3 q, max relative deviation {worst:e}", syms.len()))
}

fn c7() -> Outcome {
    let mut evals = 0;
    let mut worst: f64 = 0.0;
    for q in [r(1, 2), r(9, 10), r(3, 2)] {
        let cfg = VerifyConfig { q, jmax: r(4, 1), ..VerifyConfig::default() };
        let rep = suite(Suite::SixjUnitarity, &cfg)?;
        for name in [
            "unitarity-rows",
            "unitarity-columns",
            "symmetry",
            "closed-form-min-j23",
            "closed-form-max-j23",
            "closed-form-min-j12",
            "closed-form-max-j12",
        ] {
            if !rep.checks.iter().any(|c| c.name == name) {
                return Err(format!("{name} not exercised"));
            }
        }
        evals += rep.evaluations();
        worst = worst.max(rep.max_residual());
    }
    Ok(format!("{evals} checks, max deviation {worst:e}"))
}

/// Monic orthogonal polynomials on `x(s) = s(s+1)` from the classical
/// weight, by the Stieltjes procedure; values on the grid.
fn stieltjes(p: &RacahParams) -> Result<Vec<Vec<BigRational>>, String> {
    let roots = p.problem().roots;
    let big = |x: Rat| BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()));
    let sigma = |s: Rat| roots.iter().map(|&a| big(s - a)).fold(BigRational::one(), |acc, v| acc * v);
    let grid = p.grid();
    let mut w = Vec::new();
    let mut rho = BigRational::one();
    for (i, &s) in grid.iter().enumerate() {
        if i > 0 {
            let prev = grid[i - 1];
            let den = sigma(prev + 1);
            if den.is_zero() {
                return Err(format!("classical weight undefined at s = {s}"));
            }
            rho = rho * sigma(-prev - 1) / den;
        }
        w.push(rho.clone() * big(s * 2 + 1));
    }
    let x: Vec<BigRational> = grid.iter().map(|&s| big(s * (s + 1))).collect();
    let dot = |a: &[BigRational], b: &[BigRational], xw: bool| -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..a.len() {
            let t = a[i].clone() * &b[i] * &w[i];
            acc += if xw { t * &x[i] } else { t };
        }
        acc
    };
    let n = grid.len();
    let mut ps: Vec<Vec<BigRational>> = vec![vec![BigRational::one(); n]];
    let mut norms = vec![dot(&ps[0], &ps[0], false)];
    for k in 0..n - 1 {
        let bk = dot(&ps[k], &ps[k], true) / &norms[k];
        let next: Vec<BigRational> = (0..n)
            .map(|i| {
                let mut v = (x[i].clone() - &bk) * &ps[k][i];
                if k > 0 {
                    v -= norms[k].clone() / &norms[k - 1] * &ps[k - 1][i];
                }
                v
            })
            .collect();
        norms.push(dot(&next, &next, false));
        ps.push(next);
    }
    Ok(ps)
}

fn c8() -> Outcome {
    let f = ExactField::new();
    let mut count = 0;
    for (a, b, al, be) in [(0, 4, 0, 0), (1, 5, 2, 1), (1, 7, 1, 0), (0, 5, 1, 1), (2, 6, 0, 1), (0, 3, 2, 0)] {
        for fam in [Family::U, Family::UTilde] {
            let Ok(p) = RacahParams::new(fam, a.into(), b.into(), al.into(), be.into()) else { continue };
            let monic = stieltjes(&p)?;
            for n in 0..p.size() {
                let lead = p.a_n_product(n).eval_plain(&f).and_then(|v| v.eval_at_unity()).map_err(|e| e.to_string())?;
                for (i, &s) in p.grid().iter().enumerate() {
                    let got = p.eval(&f, n, s, Method::Ttrr).and_then(|v| v.eval_at_unity()).map_err(|e| e.to_string())?;
                    let want = lead.clone() * &monic[n as usize][i];
                    if got != want {
                        return Err(format!("{fam} ({a},{b},{al},{be}) n={n} s={s}: {got} vs {want}"));
                    }
                    count += 1;
                }
            }
        }
    }
    let near = FloatField::new(r(1_000_001, 1_000_000), 128).unwrap();
    let syms = admissible_symbols(r(3, 1));
    let mut worst: f64 = 0.0;
    for sj in &syms {
        let (sq, sign) = classical_sixj_squared(sj);
        let exact = parts(&f, sj, Route::Explicit).and_then(|p| p.square().eval_at_unity()).map_err(|e| e.to_string())?;
        if exact != sq {
            return Err(format!("{sj}: exact q -> 1 square {exact} vs {sq}"));
        }
        let c = sign as f64 * sq.to_f64().unwrap().sqrt();
        let v = sixj_value(&near, sj, Route::ViaU).map_err(|e| e.to_string())?.to_f64();
        if c != 0.0 {
            worst = worst.max((v - c).abs() / c.abs());
        } else if v.abs() > 1e-5 {
            return Err(format!("{sj}: {v} should vanish"));
        }
    }
    if worst >= 1e-4 {
        return Err(format!("6j at q = 1 + 1e-6 off by {worst:e}"));
    }
    Ok(format!("{count} polynomial values, {} symbols (max rel {worst:.1e})", syms.len()))
}

fn c9() -> Outcome {
    let chosen = [
        Outer { j1: r(3, 2), j2: r(1, 2), j3: r(3, 2), j: r(3, 2) },
        Outer { j1: r(2, 1), j2: r(1, 1), j3: r(2, 1), j: r(2, 1) },
        Outer { j1: r(5, 2), j2: r(3, 2), j3: r(3, 1), j: r(3, 1) },
        Outer { j1: r(3, 1), j2: r(2, 1), j3: r(5, 2), j: r(5, 2) },
        Outer { j1: r(4, 1), j2: r(2, 1), j3: r(7, 2), j: r(7, 2) },
    ];
    let all = outer_tuples(r(3, 1));
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for f in fields() {
        for o in chosen.iter().chain(&all) {
            if o.symbols().len() != o.j12_range().len() * o.j23_range().len() {
                return Err(format!("{o:?} is not a full rectangle"));
            }
            let sweep = RecurrenceSweep::new(&f, *o, Route::ViaU).map_err(|e| e.to_string())?;
            for sj in o.symbols() {
                for rec in Recurrence::ALL {
                    let res = sweep.residual(rec, sj.j12, sj.j23).map_err(|e| e.to_string())?;
                    match res {
                        Some(res) if res.relative() < 1e-25 => {
                            worst = worst.max(res.relative());
                            count += 1;
                        }
                        Some(res) => return Err(format!("{} at {sj}: {:e}", rec.name(), res.relative())),
                        None if matches!(rec, Recurrence::J23 | Recurrence::J12) => {
                            return Err(format!("{} undefined at {sj}", rec.name()))
                        }
                        None => {}
                    }
                }
            }
        }
    }
    Ok(format!("{count} residuals incl. mixed recurrences, max {worst:e}"))
}

fn boundary_values() -> Outcome {
    // the two boundary closed forms at (3/2, 1/2, 3/2, 3/2; j12 = 1), q = 0.7
    let f = FloatField::new(r(7, 10), 128).unwrap();
    for (j23, form) in [(r(1, 1), ClosedForm::MinJ23), (r(2, 1), ClosedForm::MaxJ23)] {
        let sj = qracah::sixj::SixJ::new(r(3, 2), r(1, 2), r(1, 1), r(3, 2), r(3, 2), j23).map_err(|e| e.to_string())?;
        let v = closed_form_parts(&f, &sj, form).and_then(|p| p.value()).map_err(|e| e.to_string())?;
        for route in Route::ALL {
            let w = sixj_value(&f, &sj, route).map_err(|e| e.to_string())?;
            if rel(&v, &w) >= 1e-25 {
                return Err(format!("{form:?} vs {route:?} at {sj}"));
            }
        }
    }
    Ok(String::new())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 9] = [
        (1, "exact orthogonality", 60, c1),
        (2, "exact difference equation, recurrence and differentiation", 120, c2),
        (3, "duality", 60, c3),
        (4, "connection formula and closing 4phi3", 30, c4),
        (5, "very-well-poised 6phi5 summation", 10, c5),
        (6, "6j route agreement", 120, c6),
        (7, "6j unitarity, symmetry and boundary values", 60, || {
            boundary_values()?;
            c7()
        }),
        (8, "classical limit", 60, c8),
        (9, "6j recurrence sweep", 60, c9),
    ];
    let mut failed = 0;
    for (id, title, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(msg) if secs < budget as f64 => Ok(msg),
            Ok(msg) => Err(format!("{msg}; took {secs:.1}s, budget {budget}s")),
            Err(e) => Err(e),
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {id}: {title} [{secs:.1}s] {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id}: {title} [{secs:.1}s] {msg}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
